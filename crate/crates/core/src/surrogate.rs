//! The surrogate map `f ↦ f⋆`, its nested set-valued version `f ↦ F⋆(f)`,
//! spoiler classification, and closed-form tuning rules for `(ε₂, ε∞)`.
//!
//! A function is surrogated by its projection onto a level when it is close to
//! that level in the normalized 2-norm (`≤ ε₂`) yet far from it in sup-norm
//! (`> ε∞`). The comparison convention is exactly that: non-strict on the
//! 2-norm, strict on the sup-norm.

use serde::{Deserialize, Serialize};

use crate::bounds::w_target;
use crate::error::{domain, Error, Result};
use crate::specfun::{econst, kappa};
use crate::subspace::{norm2, norm_inf, NestedScale, Subspace};

/// Per-level tolerances. `eps2` is in normalized 2-norm units, `eps_inf` in
/// sup-norm units; both share the units of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SurrogateTuning {
    pub eps2: Vec<f64>,
    pub eps_inf: Vec<f64>,
}

impl SurrogateTuning {
    pub fn new(eps2: Vec<f64>, eps_inf: Vec<f64>) -> Result<Self> {
        if eps2.len() != eps_inf.len() {
            return Err(Error::DimensionMismatch { expected: eps2.len(), got: eps_inf.len() });
        }
        if eps2.iter().chain(&eps_inf).any(|e| !(*e >= 0.0)) {
            return domain("ε₂, ε∞ >= 0");
        }
        Ok(SurrogateTuning { eps2, eps_inf })
    }

    pub fn single(eps2: f64, eps_inf: f64) -> Result<Self> {
        Self::new(vec![eps2], vec![eps_inf])
    }

    pub fn levels(&self) -> usize {
        self.eps2.len()
    }

    fn check_levels(&self, m: usize) -> Result<()> {
        if self.levels() != m {
            return Err(Error::DimensionMismatch { expected: m, got: self.levels() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TuningRule {
    /// `ε₂ = 2κ(α,γ)(n-d)^{1/4}/√n`: the smallest ε₂ compatible with the width
    /// lower bound.
    LowerBound,
    /// `ε₂ = E(n-d, α', γ)(n-d)^{1/4}/√n`: guarantees feasibility of the
    /// adaptive procedure.
    Achievable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Spoiler,
    Invariant,
}

/// Which definition produced a member of the surrogate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Identity,
    /// Projection onto level `j` (1-based).
    Projection(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateMember {
    pub values: Vec<f64>,
    pub provenance: Vec<Provenance>,
}

/// `F⋆(f) = {Π_j f : j ∈ J(f)} ∪ {f}` with exact-equality deduplication.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSet {
    members: Vec<SurrogateMember>,
}

impl SurrogateSet {
    pub fn members(&self) -> &[SurrogateMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Levels `J(f)` that contributed a projection, in increasing order.
    pub fn levels(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .members
            .iter()
            .flat_map(|m| m.provenance.iter())
            .filter_map(|p| match p {
                Provenance::Projection(j) => Some(*j),
                Provenance::Identity => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// True when some member `g` satisfies `lower ≤ g ≤ upper` pointwise.
    pub fn intersects(&self, lower: &[f64], upper: &[f64]) -> bool {
        self.members.iter().any(|m| {
            m.values
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(g, (l, u))| l <= g && g <= u)
        })
    }
}

fn is_surrogated(residual: &[f64], eps2: f64, eps_inf: f64) -> bool {
    norm2(residual) <= eps2 && norm_inf(residual) > eps_inf
}

/// `f⋆`: `Π f` when `||f - Πf|| ≤ ε₂` and `||f - Πf||_∞ > ε∞`, else `f`.
pub fn surrogate_single(f: &[f64], space: &Subspace, eps2: f64, eps_inf: f64) -> Result<Vec<f64>> {
    let proj = space.project(f)?;
    let res: Vec<f64> = f.iter().zip(&proj).map(|(a, b)| a - b).collect();
    Ok(if is_surrogated(&res, eps2, eps_inf) { proj } else { f.to_vec() })
}

pub fn classify(f: &[f64], space: &Subspace, eps2: f64, eps_inf: f64) -> Result<Classification> {
    let s = surrogate_single(f, space, eps2, eps_inf)?;
    Ok(if s.as_slice() != f { Classification::Spoiler } else { Classification::Invariant })
}

/// `J(f)`, 1-based.
pub fn surrogate_levels(f: &[f64], scale: &NestedScale, tuning: &SurrogateTuning) -> Result<Vec<usize>> {
    tuning.check_levels(scale.len())?;
    let mut out = Vec::new();
    for (j, lvl) in scale.levels().iter().enumerate() {
        let res = lvl.residual(f)?;
        if is_surrogated(&res, tuning.eps2[j], tuning.eps_inf[j]) {
            out.push(j + 1);
        }
    }
    Ok(out)
}

pub fn surrogate_set(f: &[f64], scale: &NestedScale, tuning: &SurrogateTuning) -> Result<SurrogateSet> {
    tuning.check_levels(scale.len())?;
    let mut members = vec![SurrogateMember {
        values: f.to_vec(),
        provenance: vec![Provenance::Identity],
    }];
    // Projections onto different levels that agree up to rounding are merged.
    let tol = 1e-12 * (1.0 + norm_inf(f));
    for (j, lvl) in scale.levels().iter().enumerate() {
        let proj = lvl.project(f)?;
        let res: Vec<f64> = f.iter().zip(&proj).map(|(a, b)| a - b).collect();
        if !is_surrogated(&res, tuning.eps2[j], tuning.eps_inf[j]) {
            continue;
        }
        let tag = Provenance::Projection(j + 1);
        match members.iter_mut().find(|m| sup_dist(&m.values, &proj) <= tol) {
            Some(m) => m.provenance.push(tag),
            None => members.push(SurrogateMember { values: proj, provenance: vec![tag] }),
        }
    }
    Ok(SurrogateSet { members })
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// `(n - d)^{1/4} / √n`.
pub(crate) fn eps2_scale(n: usize, d: usize) -> f64 {
    ((n - d) as f64).powf(0.25) / (n as f64).sqrt()
}

/// Tuning for a single subspace.
///
/// `ε∞ = w_F(α, γ, σ)` for both rules. `ε₂` is `2κ(α,γ)` or `E(n-d, α/2, γ)`
/// times `σ (n-d)^{1/4} / √n`; it is zero when `d = n`.
pub fn optimal_tuning(
    space: &Subspace,
    alpha: f64,
    gamma: f64,
    sigma: f64,
    rule: TuningRule,
) -> Result<SurrogateTuning> {
    let (e2, einf) = level_tuning(space, alpha, alpha / 2.0, gamma, sigma, rule)?;
    SurrogateTuning::single(e2, einf)
}

/// Per-level tuning for a nested scale with level budgets `alpha_split[j]`.
///
/// The achievable rule uses `E(n - d_j, α_j, γ)`; the lower-bound rule uses
/// `2κ(α, γ)` at every level. `ε∞_j = w_{F_j}(α, γ, σ)` in both cases, so a
/// one-level scale with `α_1 = α/2` reproduces [`optimal_tuning`].
pub fn optimal_tuning_nested(
    scale: &NestedScale,
    alpha: f64,
    alpha_split: &[f64],
    gamma: f64,
    sigma: f64,
    rule: TuningRule,
) -> Result<SurrogateTuning> {
    if alpha_split.len() < scale.len() {
        return Err(Error::DimensionMismatch { expected: scale.len(), got: alpha_split.len() });
    }
    let (eps2, eps_inf) = scale
        .levels()
        .iter()
        .zip(alpha_split)
        .map(|(lvl, &aj)| level_tuning(lvl, alpha, aj, gamma, sigma, rule))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    SurrogateTuning::new(eps2, eps_inf)
}

fn level_tuning(
    space: &Subspace,
    alpha: f64,
    level_alpha: f64,
    gamma: f64,
    sigma: f64,
    rule: TuningRule,
) -> Result<(f64, f64)> {
    if !(sigma > 0.0) {
        return domain(format!("σ > 0 (got {sigma})"));
    }
    let (n, d) = (space.n(), space.dim());
    let eps_inf = w_target(space.omega(), alpha, gamma, sigma)?;
    let constant = match rule {
        TuningRule::LowerBound => 2.0 * kappa(alpha, gamma)?,
        TuningRule::Achievable if d < n => econst(n - d, level_alpha, gamma)?,
        TuningRule::Achievable => {
            kappa(level_alpha, gamma)?;
            0.0
        }
    };
    Ok((sigma * constant * eps2_scale(n, d), eps_inf))
}
