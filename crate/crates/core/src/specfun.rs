//! Scalar special functions: Gaussian tails and quantiles, the total-variation
//! function `tau`, central and noncentral chi-square distributions, and the
//! tuning constants `kappa`, `Q` and `E` used by the band procedures.
//!
//! Every quantile in this module is found by bracketed bisection on a monotone
//! CDF. Only [`normal_quantile`], which feeds the random variate generator, uses
//! a closed-form rational approximation.

use serde::{Deserialize, Serialize};
use libm::{erf, erfc};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{domain, Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Prob(f64);

impl Prob {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Prob(value))
        } else {
            domain(format!("0 <= p <= 1 (got {value})"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Prob::new(value)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

/// Standard normal CDF, accurate to about 1e-16 absolute.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `1 - Φ(x)`, computed without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper-tail quantile `z_p`, i.e. the `x` with `1 - Φ(x) = p`.
pub fn z_upper(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("0 < p < 1 (got {p})"));
    }
    // The survival function is decreasing; sf(-40) = 1 and sf(40) = 0 in f64.
    Ok(bisect_decreasing(normal_sf, p, -40.0, 40.0, 1e-13))
}

/// Inverse standard normal CDF by Wichura's AS 241 (PPND16), relative error
/// near 1e-16. Used for variate generation where bisection would be too slow.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let q = u - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_812_8e4) * r
            + 6.726_577_092_700_870_1e4)
            * r
            + 4.592_195_393_154_987_1e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5.226_495_278_852_545_5e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }
    let mut r = if q < 0.0 { u } else { 1.0 - u };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114_4)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Total-variation distance between `N(0,1)` and `N(eps,1)`:
/// `Φ(eps/2) - Φ(-eps/2)`.
pub fn tau(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return domain(format!("eps >= 0 (got {eps})"));
    }
    Ok(erf(eps / (2.0 * std::f64::consts::SQRT_2)))
}

/// Inverse of [`tau`] on `[0, 1)`.
pub fn tau_inv(t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return domain(format!("0 <= t < 1 (got {t})"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |e: f64| erf(e / (2.0 * std::f64::consts::SQRT_2));
    let mut hi = 1.0;
    while f(hi) < t {
        hi *= 2.0;
        if hi > 128.0 {
            return Err(Error::Bracket(format!("tau saturates before reaching {t}")));
        }
    }
    Ok(bisect_increasing(f, t, 0.0, hi, 1e-13))
}

/// Parameters of a (possibly noncentral) chi-square distribution. The
/// noncentrality is the squared Euclidean norm of the mean vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoncentralChi2 {
    pub df: usize,
    pub ncp: f64,
}

impl NoncentralChi2 {
    pub fn new(df: usize, ncp: f64) -> Result<Self> {
        if df == 0 {
            return domain("df >= 1");
        }
        if !(ncp >= 0.0 && ncp.is_finite()) {
            return domain(format!("ncp >= 0 (got {ncp})"));
        }
        Ok(NoncentralChi2 { df, ncp })
    }

    pub fn central(df: usize) -> Result<Self> {
        Self::new(df, 0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        chi2_cdf_raw(x, self.df as f64, self.ncp)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        chi2_quantile(u, *self)
    }

    fn mean(&self) -> f64 {
        self.df as f64 + self.ncp
    }

    fn sd(&self) -> f64 {
        (2.0 * (self.df as f64 + 2.0 * self.ncp)).sqrt()
    }
}

pub fn chi2_cdf(x: f64, p: NoncentralChi2) -> f64 {
    p.cdf(x)
}

// Poisson(ncp/2) mixture of central chi-square CDFs. Summation starts at the
// Poisson mode and walks outward; the regularized gamma values are updated by
// the recurrence P(a+1, y) = P(a, y) - y^a e^{-y} / Γ(a+1), so only one
// incomplete-gamma evaluation is needed. Each walk stops once a geometric
// bound on the remaining Poisson mass falls below 1e-15.
fn chi2_cdf_raw(x: f64, df: f64, ncp: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let y = 0.5 * x;
    if ncp == 0.0 {
        return gamma_lr(0.5 * df, y);
    }
    let lambda = 0.5 * ncp;
    let mode = lambda.floor();
    let a0 = 0.5 * df + mode;
    let w0 = (-lambda + mode * lambda.ln() - ln_gamma(mode + 1.0)).exp();
    let p0 = gamma_lr(a0, y);
    // g(a) = y^a e^{-y} / Γ(a+1)
    let g0 = (a0 * y.ln() - y - ln_gamma(a0 + 1.0)).exp();

    let mut sum = w0 * p0;
    const TAIL: f64 = 1e-15;

    // upward
    let (mut k, mut a, mut w, mut p, mut g) = (mode, a0, w0, p0, g0);
    loop {
        p = (p - g).max(0.0);
        g *= y / (a + 1.0);
        a += 1.0;
        w *= lambda / (k + 1.0);
        k += 1.0;
        sum += w * p;
        let r = lambda / (k + 1.0);
        if (r < 1.0 && w * r / (1.0 - r) < TAIL) || p == 0.0 || w == 0.0 {
            break;
        }
    }

    // downward
    let (mut k, mut a, mut w, mut p, mut g) = (mode, a0, w0, p0, g0);
    while k > 0.0 {
        g *= a / y;
        a -= 1.0;
        p = (p + g).min(1.0);
        w *= k / lambda;
        k -= 1.0;
        sum += w * p;
        let r = k / lambda;
        if w * r / (1.0 - r) < TAIL {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Quantile of a (noncentral) chi-square distribution by bisection in `x`.
pub fn chi2_quantile(u: f64, p: NoncentralChi2) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("0 < u < 1 (got {u})"));
    }
    let mut hi = p.mean() + 10.0 * p.sd();
    let mut guard = 0;
    while p.cdf(hi) < u {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Bracket(format!("chi-square quantile {u} not bracketed")));
        }
    }
    Ok(bisect_increasing(|x| p.cdf(x), u, 0.0, hi, 1e-10))
}

/// `(2 log(1 + 4 (1 - γ - 2α)^2))^{1/4}`.
pub fn kappa(alpha: f64, gamma: f64) -> Result<f64> {
    check_alpha_gamma(alpha, gamma)?;
    let delta = 1.0 - gamma - 2.0 * alpha;
    Ok((2.0 * (4.0 * delta * delta).ln_1p()).powf(0.25))
}

pub(crate) fn check_alpha_gamma(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("0<α<1 (got α={alpha})"));
    }
    if !(gamma > 0.0 && gamma < 1.0 - 2.0 * alpha) {
        return domain(format!("0<γ<1−2α (got α={alpha}, γ={gamma})"));
    }
    Ok(())
}

/// Upper end of the bisection bracket for [`qconst`].
pub const QCONST_BRACKET: f64 = 64.0;

/// The constant `Q(m, β, ξ)`: the `c` solving
/// `ξ = 1 - F_{0,m}(F^{-1}_{λ(c),m}(β))` with noncentrality `λ(c) = c²√m`.
///
/// With this scaling a residual tolerance `ε₂ = c (m)^{1/4} / √n` produces
/// noncentrality exactly `n ε₂² = c² √m` in the goodness-of-fit statistic.
/// Solved by bisection on `c ∈ [0, 64]`; the defining equation is rewritten as
/// `F_{λ(c),m}(F^{-1}_{0,m}(1-ξ)) = β`, which is decreasing in `c`.
pub fn qconst(m: usize, beta: f64, xi: f64) -> Result<f64> {
    if m == 0 {
        return domain("m >= 1");
    }
    if !(beta > 0.0 && beta < 1.0 - xi && 1.0 - xi < 1.0) {
        return domain(format!("0 < β < 1−ξ < 1 (got β={beta}, ξ={xi})"));
    }
    let x_star = chi2_quantile(1.0 - xi, NoncentralChi2::central(m)?)?;
    let sqrt_m = (m as f64).sqrt();
    let f = |c: f64| chi2_cdf_raw(x_star, m as f64, c * c * sqrt_m);
    if f(QCONST_BRACKET) > beta {
        return Err(Error::Bracket(format!(
            "Q(m={m}, β={beta}, ξ={xi}) exceeds {QCONST_BRACKET}"
        )));
    }
    Ok(bisect_decreasing(f, beta, 0.0, QCONST_BRACKET, 1e-10))
}

/// Noncentrality attached to `Q` at dimension `m`.
pub fn qconst_noncentrality(q: f64, m: usize) -> f64 {
    q * q * (m as f64).sqrt()
}

/// `E(m, α, γ) = max(Q(m, α, γ), 2 κ(α, γ))`.
pub fn econst(m: usize, alpha: f64, gamma: f64) -> Result<f64> {
    let k = kappa(alpha, gamma)?;
    let q = qconst(m, alpha, gamma)?;
    Ok(q.max(2.0 * k))
}

/// Non-asymptotic lower and upper bounds on the `u`-quantile of a chi-square
/// with `d` degrees of freedom and noncentrality `z`.
pub fn birge_bounds(z: f64, d: usize, u: f64) -> (f64, f64) {
    let d = d as f64;
    let s = 2.0 * z + d;
    let lower = z + d - 2.0 * (s * (1.0 / u).ln()).sqrt();
    let l1 = (1.0 / (1.0 - u)).ln();
    let upper = z + d + 2.0 * (s * l1).sqrt() + 2.0 * l1;
    (lower, upper)
}

fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    bisect_increasing(|x| -f(x), -target, lo, hi, tol)
}
