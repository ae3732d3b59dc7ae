//! Band constructors: fixed-width Bonferroni, subspace-centered, and the
//! adaptive single-subspace and nested procedures that select a level by a
//! chi-square goodness-of-fit test.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{chi2_quantile, z_upper, NoncentralChi2};
use crate::subspace::{NestedScale, Subspace};
use crate::surrogate::SurrogateTuning;

/// A band `(L, U)` on the design grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Band {
    pub lower: Vec<f64>,
    pub center: Vec<f64>,
    pub upper: Vec<f64>,
    /// `||U - L||_∞`.
    pub width: f64,
    /// Selected level `Ĵ` (1-based; `m + 1` is the full space).
    pub selected_level: Option<usize>,
    /// Single-subspace procedures: whether the goodness-of-fit test accepted.
    pub accepted: Option<bool>,
    /// Standardized statistics `T_j = n ||Y - Π_j Y||² / σ²`.
    pub statistics: Vec<f64>,
    pub thresholds: Vec<f64>,
}

impl Band {
    fn symmetric(center: Vec<f64>, half: impl Fn(usize) -> f64) -> Self {
        let lower: Vec<f64> = center.iter().enumerate().map(|(i, c)| c - half(i)).collect();
        let upper: Vec<f64> = center.iter().enumerate().map(|(i, c)| c + half(i)).collect();
        let width = lower
            .iter()
            .zip(&upper)
            .fold(0.0, |m: f64, (l, u)| m.max(u - l));
        Band {
            lower,
            center,
            upper,
            width,
            selected_level: None,
            accepted: None,
            statistics: Vec::new(),
            thresholds: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    /// `L ≤ g ≤ U` pointwise.
    pub fn covers(&self, g: &[f64]) -> bool {
        g.len() == self.n()
            && g
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BandParams {
    pub alpha: f64,
    pub gamma: f64,
    pub sigma: f64,
    /// Per-level budgets `α_1 … α_{m+1}` for the nested procedure.
    #[serde(default)]
    pub alpha_split: Vec<f64>,
    pub tuning: SurrogateTuning,
}

impl BandParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("0<α<1 (got α={})", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return domain(format!("0<γ<1 (got γ={})", self.gamma));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return domain(format!("σ>0 (got σ={})", self.sigma));
        }
        if self.alpha_split.iter().any(|a| !(*a > 0.0)) {
            return domain("every α_j > 0");
        }
        let total: f64 = self.alpha_split.iter().sum();
        if total > self.alpha * (1.0 + 1e-12) {
            return domain(format!("Σα_j ≤ α (got Σα_j={total}, α={})", self.alpha));
        }
        Ok(())
    }

    /// Equal split `α_j = α / (m + 1)`.
    pub fn equal_split(alpha: f64, m: usize) -> Vec<f64> {
        vec![alpha / (m + 1) as f64; m + 1]
    }
}

fn check_len(y: &[f64], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    Ok(())
}

/// `Y ± σ z_{α/(2n)}`.
pub fn bonferroni_band(y: &[f64], sigma: f64, alpha: f64) -> Result<Band> {
    let n = y.len();
    if n == 0 {
        return domain("n >= 1");
    }
    if !(sigma > 0.0) {
        return domain(format!("σ>0 (got σ={sigma})"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("0<α<1 (got α={alpha})"));
    }
    let half = sigma * z_upper(alpha / (2.0 * n as f64))?;
    Ok(Band::symmetric(y.to_vec(), |_| half))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordinateWidth {
    /// `σ √Π_ii z` at coordinate `i`.
    #[default]
    PerCoordinate,
    /// `σ Ω z` everywhere.
    Uniform,
}

/// `Π Y ± σ √Π_ii z_{α/(2n)}` (or `σ Ω z_{α/(2n)}` with [`CoordinateWidth::Uniform`]).
pub fn subspace_band(
    y: &[f64],
    space: &Subspace,
    sigma: f64,
    alpha: f64,
    mode: CoordinateWidth,
) -> Result<Band> {
    let n = space.n();
    check_len(y, n)?;
    if !(sigma > 0.0) {
        return domain(format!("σ>0 (got σ={sigma})"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("0<α<1 (got α={alpha})"));
    }
    let z = z_upper(alpha / (2.0 * n as f64))?;
    let center = space.project(y)?;
    Ok(match mode {
        CoordinateWidth::PerCoordinate => {
            let lev = space.leverages();
            Band::symmetric(center, |i| sigma * lev[i].sqrt() * z)
        }
        CoordinateWidth::Uniform => {
            let h = sigma * space.omega() * z;
            Band::symmetric(center, |_| h)
        }
    })
}

/// Smallest `γ` for which the test at one level of dimension `d` has type-II
/// error at most `level_alpha` against alternatives at 2-norm distance `eps2`:
/// `1 - F_{0,n-d}(F^{-1}_{n ε₂²/σ², n-d}(level_alpha))`.
pub fn gamma_required(n: usize, d: usize, eps2: f64, level_alpha: f64, sigma: f64) -> Result<f64> {
    if d >= n {
        return domain(format!("d < n (got d={d}, n={n})"));
    }
    if !(sigma > 0.0) {
        return domain(format!("σ>0 (got σ={sigma})"));
    }
    if !(eps2 >= 0.0) {
        return domain(format!("ε₂ >= 0 (got {eps2})"));
    }
    let df = n - d;
    let ncp = n as f64 * eps2 * eps2 / (sigma * sigma);
    if !ncp.is_finite() {
        return Ok(0.0);
    }
    let r = chi2_quantile(level_alpha, NoncentralChi2::new(df, ncp)?)?;
    Ok(1.0 - NoncentralChi2::central(df)?.cdf(r))
}

/// Feasibility threshold for [`adaptive_band_single`]: the required `γ` with
/// the type-II budget `α/2`.
pub fn gamma_feasible(n: usize, d: usize, eps2: f64, alpha: f64, sigma: f64) -> Result<f64> {
    gamma_required(n, d, eps2, alpha / 2.0, sigma)
}

/// `max_j` of [`gamma_required`] over the levels of a nested scale.
pub fn nested_gamma_feasible(
    scale: &NestedScale,
    eps2: &[f64],
    alpha_split: &[f64],
    sigma: f64,
) -> Result<f64> {
    if eps2.len() != scale.len() {
        return Err(Error::DimensionMismatch { expected: scale.len(), got: eps2.len() });
    }
    if alpha_split.len() < scale.len() {
        return Err(Error::DimensionMismatch { expected: scale.len(), got: alpha_split.len() });
    }
    let mut worst: f64 = 0.0;
    for ((lvl, &e), &a) in scale.levels().iter().zip(eps2).zip(alpha_split) {
        worst = worst.max(gamma_required(lvl.n(), lvl.dim(), e, a, sigma)?);
    }
    Ok(worst)
}

/// A validated adaptive procedure with precomputed thresholds and half-widths.
///
/// Level `j ≤ m` has half-width `σ Ω_j z_{α_j/(2n)} + ε∞_j` around `Π_j Y`;
/// level `m + 1` has half-width `σ z_{α_{m+1}/(2n)}` around `Y`.
#[derive(Debug, Clone)]
pub struct AdaptiveProcedure<'a> {
    scale: &'a NestedScale,
    sigma: f64,
    thresholds: Vec<f64>,
    half_widths: Vec<f64>,
    single: bool,
}

impl<'a> AdaptiveProcedure<'a> {
    /// Nested procedure; `params.alpha_split` must have `m + 1` entries.
    pub fn nested(scale: &'a NestedScale, params: &BandParams) -> Result<Self> {
        params.validate()?;
        let m = scale.len();
        if params.alpha_split.len() != m + 1 {
            return Err(Error::DimensionMismatch { expected: m + 1, got: params.alpha_split.len() });
        }
        Self::build(scale, params, &params.alpha_split, false)
    }

    /// Single-subspace procedure: each branch gets budget `α/2`, so both
    /// half-widths use `z_{α/(4n)}`.
    pub fn single(scale: &'a NestedScale, params: &BandParams) -> Result<Self> {
        params.validate()?;
        if scale.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: scale.len() });
        }
        let split = [params.alpha / 2.0, params.alpha / 2.0];
        Self::build(scale, params, &split, true)
    }

    fn build(scale: &'a NestedScale, params: &BandParams, split: &[f64], single: bool) -> Result<Self> {
        let m = scale.len();
        let n = scale.n();
        let t = &params.tuning;
        if t.levels() != m {
            return Err(Error::DimensionMismatch { expected: m, got: t.levels() });
        }
        let min_gamma = nested_gamma_feasible(scale, &t.eps2, split, params.sigma)?;
        if params.gamma < min_gamma {
            return Err(Error::Infeasible { gamma: params.gamma, min_gamma });
        }
        let sigma = params.sigma;
        let nf = n as f64;
        let mut thresholds = Vec::with_capacity(m);
        let mut half_widths = Vec::with_capacity(m + 1);
        for (j, lvl) in scale.levels().iter().enumerate() {
            thresholds.push(chi2_quantile(1.0 - params.gamma, NoncentralChi2::central(n - lvl.dim())?)?);
            let z = z_upper(split[j] / (2.0 * nf))?;
            half_widths.push(sigma * lvl.omega() * z + t.eps_inf[j]);
        }
        half_widths.push(sigma * z_upper(split[m] / (2.0 * nf))?);
        Ok(AdaptiveProcedure { scale, sigma, thresholds, half_widths, single })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Half-width used when level `j` (1-based, up to `m + 1`) is selected.
    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    /// Band width `2 × half-width` at each level `1..=m+1`.
    pub fn level_widths(&self) -> Vec<f64> {
        self.half_widths.iter().map(|h| 2.0 * h).collect()
    }

    pub fn fit(&self, y: &[f64]) -> Result<Band> {
        check_len(y, self.scale.n())?;
        let s2 = self.sigma * self.sigma;
        let mut stats = Vec::with_capacity(self.scale.len());
        let mut selected = None;
        let mut center = None;
        for (j, lvl) in self.scale.levels().iter().enumerate() {
            let proj = lvl.project(y)?;
            let ss: f64 = y.iter().zip(&proj).map(|(a, b)| (a - b) * (a - b)).sum();
            let t = ss / s2;
            stats.push(t);
            if selected.is_none() && t <= self.thresholds[j] {
                selected = Some(j + 1);
                center = Some(proj);
            }
        }
        let j_hat = selected.unwrap_or(self.scale.len() + 1);
        let center = center.unwrap_or_else(|| y.to_vec());
        let h = self.half_widths[j_hat - 1];
        let mut band = Band::symmetric(center, |_| h);
        band.selected_level = Some(j_hat);
        band.accepted = self.single.then_some(j_hat == 1);
        band.statistics = stats;
        band.thresholds = self.thresholds.clone();
        Ok(band)
    }
}

/// Adaptive band for one subspace `F` versus `R^n`.
///
/// `T = n ||Y - ΠY||² / σ²` is compared with the central `χ²_{n-d}` quantile
/// at `1 - γ`. On acceptance the band is `ΠY ± (σ Ω z_{α/(4n)} + ε∞)`,
/// otherwise `Y ± σ z_{α/(4n)}`.
pub fn adaptive_band_single(y: &[f64], space: &Subspace, params: &BandParams) -> Result<Band> {
    let scale = NestedScale::single(space.clone());
    AdaptiveProcedure::single(&scale, params)?.fit(y)
}

/// Adaptive band over a nested scale with level budgets `params.alpha_split`.
pub fn adaptive_band_nested(y: &[f64], scale: &NestedScale, params: &BandParams) -> Result<Band> {
    AdaptiveProcedure::nested(scale, params)?.fit(y)
}

/// Target level widths `w_{F_j}(α_j, γ, σ) + ε∞_j` for `j ≤ m`, and
/// `w_{R^n}(α_{m+1}, γ, σ)` at level `m + 1`.
pub fn target_level_widths(scale: &NestedScale, params: &BandParams) -> Result<Vec<f64>> {
    let m = scale.len();
    if params.alpha_split.len() != m + 1 || params.tuning.levels() != m {
        return Err(Error::DimensionMismatch { expected: m + 1, got: params.alpha_split.len() });
    }
    let mut out = Vec::with_capacity(m + 1);
    for (j, lvl) in scale.levels().iter().enumerate() {
        let w = crate::bounds::w_target(lvl.omega(), params.alpha_split[j], params.gamma, params.sigma)?;
        out.push(w + params.tuning.eps_inf[j]);
    }
    out.push(crate::bounds::w_target(1.0, params.alpha_split[m], params.gamma, params.sigma)?);
    Ok(out)
}
