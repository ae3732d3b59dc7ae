//! Linear subspaces of `R^n` under the normalized inner product
//! `<f, g> = (1/n) Σ f_i g_i`.
//!
//! A [`Subspace`] stores only its orthonormal basis (`d` rows of length `n`);
//! projector diagonals and `Ω` are derived from the rows on demand.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Normalized inner product `(1/n) Σ a_i b_i`.
pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Normalized 2-norm `sqrt((1/n) Σ a_i²)`.
pub fn norm2(a: &[f64]) -> f64 {
    inner(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Equispaced design `x_i = i / n`, `i = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGrid {
    x: Vec<f64>,
}

impl DesignGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("n >= 1");
        }
        Ok(DesignGrid {
            x: (1..=n).map(|i| i as f64 / n as f64).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<f64>>,
    omega: f64,
}

const PIVOT_TOL: f64 = 1e-12;

impl Subspace {
    /// Orthonormalizes the rows of `raw` by modified Gram-Schmidt with one
    /// re-orthogonalization pass. Fails on the first row whose residual norm
    /// falls below `1e-12` relative to its original norm.
    pub fn orthonormalize(raw: &[Vec<f64>], n: usize) -> Result<Self> {
        if raw.is_empty() {
            return domain("at least one basis row");
        }
        if raw.len() > n {
            return domain(format!("d <= n (got d={}, n={n})", raw.len()));
        }
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
        for (row, v) in raw.iter().enumerate() {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            let orig = norm2(v);
            let mut w = v.clone();
            for _pass in 0..2 {
                for q in &basis {
                    let c = inner(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let r = norm2(&w);
            if !(orig > 0.0) || r <= PIVOT_TOL * orig {
                return Err(Error::RankDeficient { row });
            }
            w.iter_mut().for_each(|x| *x /= r);
            basis.push(w);
        }
        Ok(Self::from_orthonormal(basis, n))
    }

    fn from_orthonormal(basis: Vec<Vec<f64>>, n: usize) -> Self {
        let mut s = Subspace { n, basis, omega: 0.0 };
        s.omega = s.leverages().into_iter().fold(0.0, f64::max).sqrt();
        s
    }

    /// The whole space `R^n` with the scaled standard basis.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("n >= 1");
        }
        let scale = (n as f64).sqrt();
        let basis = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = scale;
                e
            })
            .collect();
        Ok(Self::from_orthonormal(basis, n))
    }

    /// Span of the functions evaluated on the design grid.
    pub fn from_functions<F: Fn(f64) -> f64>(fns: &[F], grid: &DesignGrid) -> Result<Self> {
        if fns.is_empty() {
            return domain("at least one function");
        }
        let rows: Vec<Vec<f64>> = fns
            .iter()
            .map(|f| grid.points().iter().map(|&x| f(x)).collect())
            .collect();
        Self::orthonormalize(&rows, grid.n())
    }

    /// Cosine basis `1, √2 cos(π x), …, √2 cos((d-1) π x)` on the grid.
    pub fn cosine(n: usize, d: usize) -> Result<Self> {
        let grid = DesignGrid::new(n)?;
        let fns: Vec<Box<dyn Fn(f64) -> f64>> = (0..d)
            .map(|j| -> Box<dyn Fn(f64) -> f64> {
                if j == 0 {
                    Box::new(|_| 1.0)
                } else {
                    let k = j as f64 * std::f64::consts::PI;
                    Box::new(move |x| std::f64::consts::SQRT_2 * (k * x).cos())
                }
            })
            .collect();
        Self::from_functions(&fns, &grid)
    }

    /// Piecewise constants on `d` contiguous blocks. Block sizes are `⌊n/d⌋`,
    /// with the first `n mod d` blocks one element larger.
    pub fn blocks(n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return domain("d >= 1");
        }
        if d > n {
            return domain(format!("d <= n (got d={d}, n={n})"));
        }
        let basis = block_ranges(n, d)
            .into_iter()
            .map(|(start, end)| {
                let h = ((n as f64) / (end - start) as f64).sqrt();
                let mut v = vec![0.0; n];
                v[start..end].iter_mut().for_each(|x| *x = h);
                v
            })
            .collect();
        Ok(Self::from_orthonormal(basis, n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `Ω = max_i ||Π e_i|| / ||e_i||`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Diagonal of the Euclidean projector, `Π_ii = Σ_j φ_ji² / n`.
    pub fn leverages(&self) -> Vec<f64> {
        let mut lev = vec![0.0; self.n];
        for row in &self.basis {
            lev.iter_mut().zip(row).for_each(|(l, p)| *l += p * p);
        }
        let n = self.n as f64;
        lev.iter_mut().for_each(|l| *l /= n);
        lev
    }

    /// Index of the coordinate with the largest leverage.
    pub fn omega_argmax(&self) -> usize {
        let lev = self.leverages();
        let mut best = 0;
        for (i, &l) in lev.iter().enumerate() {
            if l > lev[best] {
                best = i;
            }
        }
        best
    }

    pub fn coefficients(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        Ok(self.basis.iter().map(|q| inner(q, y)).collect())
    }

    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        let coef = self.coefficients(y)?;
        let mut out = vec![0.0; self.n];
        for (c, q) in coef.iter().zip(&self.basis) {
            out.iter_mut().zip(q).for_each(|(o, qi)| *o += c * qi);
        }
        Ok(out)
    }

    /// `y - Π y`.
    pub fn residual(&self, y: &[f64]) -> Result<Vec<f64>> {
        let p = self.project(y)?;
        Ok(y.iter().zip(&p).map(|(a, b)| a - b).collect())
    }

    /// `min { ||v|| : v ∈ S, ||v||_∞ = eps } = eps / (√n Ω)`.
    pub fn min_two_norm_given_inf(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return domain(format!("eps > 0 (got {eps})"));
        }
        if self.omega == 0.0 {
            return domain("Ω > 0");
        }
        Ok(eps / ((self.n as f64).sqrt() * self.omega))
    }

    /// `max { ||v||_∞ : v ∈ S, ||v|| = eps } = eps √n Ω`.
    pub fn max_inf_given_two_norm(&self, eps: f64) -> f64 {
        eps * (self.n as f64).sqrt() * self.omega
    }

    /// True when every basis vector of `self` lies in `other`.
    pub fn is_contained_in(&self, other: &Subspace, tol: f64) -> bool {
        self.n == other.n
            && self.basis.iter().all(|q| {
                other
                    .residual(q)
                    .map(|r| norm_inf(&r) <= tol)
                    .unwrap_or(false)
            })
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: y.len() });
        }
        Ok(())
    }
}

fn block_ranges(n: usize, d: usize) -> Vec<(usize, usize)> {
    let base = n / d;
    let extra = n % d;
    let mut out = Vec::with_capacity(d);
    let mut start = 0;
    for j in 0..d {
        let len = base + usize::from(j < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}

/// An increasing chain `F_1 ⊂ … ⊂ F_m` of subspaces of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedScale {
    levels: Vec<Subspace>,
}

const NESTING_TOL: f64 = 1e-9;

impl NestedScale {
    pub fn new(levels: Vec<Subspace>) -> Result<Self> {
        if levels.is_empty() {
            return domain("at least one level");
        }
        let n = levels[0].n();
        for (j, pair) in levels.windows(2).enumerate() {
            if pair[1].n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: pair[1].n() });
            }
            if pair[1].dim() <= pair[0].dim() {
                return domain(format!(
                    "strictly increasing dimensions (level {} has d={}, level {} has d={})",
                    j + 1,
                    pair[0].dim(),
                    j + 2,
                    pair[1].dim()
                ));
            }
            if !pair[0].is_contained_in(&pair[1], NESTING_TOL) {
                return Err(Error::NotNested { level: j + 1, next: j + 2 });
            }
        }
        Ok(NestedScale { levels })
    }

    /// Single-level scale.
    pub fn single(space: Subspace) -> Self {
        NestedScale { levels: vec![space] }
    }

    /// Nested piecewise-constant block spaces with the given block counts.
    pub fn dyadic(n: usize, dims: &[usize]) -> Result<Self> {
        let levels = dims
            .iter()
            .map(|&d| Subspace::blocks(n, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels)
    }

    pub fn levels(&self) -> &[Subspace] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn n(&self) -> usize {
        self.levels[0].n()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(Subspace::dim).collect()
    }
}

/// JSON description of a subspace or nested scale.
///
/// ```json
/// {"kind": "dyadic", "dims": [1, 4, 16]}
/// {"kind": "cosine", "d": 5}
/// {"kind": "custom", "rows": [[1, 1, 1, 1]]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SubspaceSpec {
    Dyadic { dims: Vec<usize> },
    Cosine { d: usize },
    Custom { rows: Vec<Vec<f64>> },
    Full,
}

impl SubspaceSpec {
    /// Builds the scale this spec describes. `cosine`, `custom` and `full`
    /// describe a single level.
    pub fn build(&self, n: usize) -> Result<NestedScale> {
        match self {
            SubspaceSpec::Dyadic { dims } => {
                if dims.is_empty() {
                    return Err(Error::Config("dyadic spec needs at least one dimension".into()));
                }
                NestedScale::dyadic(n, dims)
            }
            SubspaceSpec::Cosine { d } => Ok(NestedScale::single(Subspace::cosine(n, *d)?)),
            SubspaceSpec::Custom { rows } => {
                Ok(NestedScale::single(Subspace::orthonormalize(rows, n)?))
            }
            SubspaceSpec::Full => Ok(NestedScale::single(Subspace::full(n)?)),
        }
    }
}
