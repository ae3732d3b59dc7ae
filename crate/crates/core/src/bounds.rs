//! Closed-form lower bounds on confidence band width and related rates.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{check_alpha_gamma, kappa, tau_inv};
use crate::surrogate::eps2_scale;

/// Target width on a subspace with geometry constant `omega`:
/// `Ω σ τ⁻¹(1 - 2α - γ)`.
pub fn w_target(omega: f64, alpha: f64, gamma: f64, sigma: f64) -> Result<f64> {
    check_alpha_gamma(alpha, gamma)?;
    if !(0.0..=1.0).contains(&omega) {
        return domain(format!("0 <= Ω <= 1 (got {omega})"));
    }
    if !(sigma > 0.0) {
        return domain(format!("σ > 0 (got {sigma})"));
    }
    Ok(omega * sigma * tau_inv(1.0 - 2.0 * alpha - gamma)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerBoundInputs {
    pub n: usize,
    pub d: usize,
    pub eps2: f64,
    pub eps_inf: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerBoundReport {
    pub inputs: LowerBoundInputs,
    pub w_f: f64,
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    /// `max(w_F, v0, v1)`.
    pub underline_w: f64,
}

/// Lower bound on the width of any band with surrogate coverage `1 - α` that
/// has width at most `w` with probability `1 - γ` on the subspace.
///
/// `v2` carries a factor `σ` so that the tolerances and the bound share units
/// with the data.
pub fn surrogate_lower_bound(inp: LowerBoundInputs) -> Result<LowerBoundReport> {
    let LowerBoundInputs { n, d, eps2, eps_inf, alpha, gamma, sigma, omega } = inp;
    if d >= n {
        return domain(format!("d < n (got d={d}, n={n})"));
    }
    if !(eps2 >= 0.0 && eps_inf >= 0.0) {
        return domain("ε₂, ε∞ >= 0");
    }
    let w_f = w_target(omega, alpha, gamma, sigma)?;
    let full = sigma * tau_inv(1.0 - 2.0 * alpha - gamma)?;
    let v0 = ((n as f64).sqrt() * eps2).min(eps_inf).min(full);
    let k = kappa(alpha, gamma)?;
    let v2 = sigma * k * eps2_scale(n, d);
    let v1 = if eps2 >= 2.0 * v2 { 0.0 } else { v2 };
    let underline_w = w_f.max(v0.max(v1));
    Ok(LowerBoundReport { inputs: inp, w_f, v0, v1, v2, underline_w })
}

/// Width lower bound over all of `R^n`: `(1 - 2α - 2ε) σ √(log(n ε²))`.
pub fn rn_lower_bound(n: usize, alpha: f64, eps: f64, sigma: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("0 < α < 1/2 (got {alpha})"));
    }
    if !(eps > 0.0 && eps < 0.5 - alpha) {
        return domain(format!("0 < ε < 1/2 − α (got ε={eps})"));
    }
    let ne2 = n as f64 * eps * eps;
    if !(ne2 > 1.0) {
        return domain(format!("n ε² > 1 (got {ne2})"));
    }
    Ok((1.0 - 2.0 * alpha - 2.0 * eps) * sigma * ne2.ln().sqrt())
}

/// Width lower bound over a Lipschitz ball of radius `lip` on the grid
/// `x_i = i/n`. Leading order `(log n / n)^{1/3} (L σ² / 2)^{1/3}`, times a
/// logarithmic correction.
pub fn lipschitz_rate(n: usize, lip: f64, sigma: f64, alpha: f64, eps: f64) -> Result<f64> {
    if n < 3 {
        return domain(format!("n >= 3 (got {n})"));
    }
    if !(lip > 0.0 && sigma > 0.0) {
        return domain("L > 0 and σ > 0");
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("0 < α < 1/2 (got {alpha})"));
    }
    if !(eps > 0.0 && eps < 0.5 - alpha) {
        return domain(format!("0 < ε < 1/2 − α (got ε={eps})"));
    }
    let ln_n = (n as f64).ln();
    let l1e = (eps * eps).ln_1p();
    let l_ratio = (lip / (2.0 * sigma)).ln();
    let inner = ln_n / 3.0 + l1e + 2.0 / 3.0 * l_ratio;
    if !(inner > 0.0) {
        return domain("log n / 3 + log(1+ε²) + (2/3) log(L/2σ) > 0");
    }
    let lead = (ln_n / n as f64).cbrt() * (lip * sigma * sigma / 2.0).cbrt();
    let bracket = 1.0 + 3.0 * l1e / ln_n + 2.0 * l_ratio / ln_n - inner.ln() / ln_n;
    Ok(lead * bracket)
}

/// A rate known only up to a factor growing at most logarithmically in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rate {
    pub rate: f64,
    pub times_polylog: bool,
}

/// `n^{-p/(2p+1)}` for a Sobolev ball of order `p`.
pub fn sobolev_rate(n: usize, p: f64) -> Result<Rate> {
    if !(p > 0.0) {
        return domain(format!("p > 0 (got {p})"));
    }
    Ok(Rate { rate: (n as f64).powf(-p / (2.0 * p + 1.0)), times_polylog: true })
}

/// `n^{-1/(1/p - ξ - 1/2)}` for a Besov ball.
pub fn besov_rate(n: usize, p: f64, xi: f64) -> Result<Rate> {
    if !(p > 0.0) {
        return domain(format!("p > 0 (got {p})"));
    }
    let den = 1.0 / p - xi - 0.5;
    if den.abs() < 1e-12 {
        return domain("1/p − ξ − 1/2 ≠ 0");
    }
    Ok(Rate { rate: (n as f64).powf(-1.0 / den), times_polylog: true })
}

/// Separation `(n-d)^{1/4} n^{-1/2} (2 log(1 + 4δ²))^{1/4}` below which no
/// level-ξ goodness-of-fit test has power better than `ξ + δ`.
pub fn baraud_eps(n: usize, d: usize, delta: f64) -> Result<f64> {
    if d >= n {
        return domain(format!("d < n (got d={d}, n={n})"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("0 < δ < 1 (got {delta})"));
    }
    Ok(((n - d) as f64).powf(0.25) / (n as f64).sqrt()
        * (2.0 * (4.0 * delta * delta).ln_1p()).powf(0.25))
}

/// Closed-form modulus of continuity of `f ↦ f_1` over the coverage set
/// `V(F, ε₂, ε∞)`, normalized-norm version:
///
/// `u Ω √n √(Ω²/(1+Ω²)) + min(u √n / √(1+Ω²), ε₂ √n, ε∞)`.
///
/// The supremum over the split `c` is evaluated at its unconstrained
/// maximizer, so when the tolerance term binds this is not the exact supremum.
pub fn modulus(u: f64, omega: f64, n: usize, eps2: f64, eps_inf: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return domain(format!("u >= 0 (got {u})"));
    }
    let rn = (n as f64).sqrt();
    let o2 = omega * omega;
    let lead = u * omega * rn * (o2 / (1.0 + o2)).sqrt();
    let ball = (u * rn / (1.0 + o2).sqrt()).min(eps2 * rn).min(eps_inf);
    Ok(lead + ball)
}

/// Natural (root-sum-of-squares) norm variant of [`modulus`]; `eps2` is in
/// natural-norm units.
pub fn modulus_natural(u: f64, omega: f64, eps2: f64, eps_inf: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return domain(format!("u >= 0 (got {u})"));
    }
    if !(omega > 0.0) {
        return domain("Ω > 0");
    }
    let s = (omega * omega / (1.0 + omega * omega)).sqrt();
    Ok(u * omega * s + (u / omega * s).min(eps2).min(eps_inf))
}
