//! Seeded Monte Carlo verification of band procedures under the normal-means
//! model `Y_i = f_i + σ ε_i`.
//!
//! Replication `r` draws its noise from a ChaCha stream keyed by
//! `(seed, r)`, so results do not depend on how replications are scheduled
//! across threads. Outcomes are collected in replication order and reduced
//! with integer counts.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bands::{bonferroni_band, subspace_band, AdaptiveProcedure, Band, BandParams, CoordinateWidth};
use crate::error::{domain, Error, Result};
use crate::specfun::normal_quantile;
use crate::subspace::{norm2, norm_inf, NestedScale, Subspace};
use crate::surrogate::{surrogate_set, SurrogateSet};

/// `Y = f + σ ε` with `ε` drawn from the stream `(seed, rep_index)`.
pub fn gen_data(f: &[f64], sigma: f64, seed: u64, rep_index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep_index);
    f.iter().map(|&fi| fi + sigma * standard_normal(&mut rng)).collect()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // 53-bit uniform on the open interval (0, 1)
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    normal_quantile(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Procedure {
    Bonferroni,
    Subspace,
    AdaptiveSingle,
    AdaptiveNested,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub truth: Vec<f64>,
    /// Noise level of the generated data.
    pub sigma: f64,
    pub procedure: Procedure,
    /// Spaces used by the procedure and by the surrogate set.
    pub scale: Option<NestedScale>,
    pub params: BandParams,
    pub reps: u64,
    pub seed: u64,
}

/// A Monte Carlo proportion with its standard error `√(p(1-p)/reps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p: f64,
    pub se: f64,
}

impl Estimate {
    fn from_count(count: u64, reps: u64) -> Self {
        let p = count as f64 / reps as f64;
        Estimate { p, se: (p * (1.0 - p) / reps as f64).sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthQuantile {
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReport {
    pub procedure: Procedure,
    pub reps: u64,
    pub seed: u64,
    /// `P(F⋆(f) ∩ B ≠ ∅)`.
    pub surrogate_coverage: Estimate,
    /// `P(L ≤ f ≤ U)`.
    pub true_coverage: Estimate,
    pub mean_width: f64,
    /// Width quantiles at `0.5`, `0.9` and `1 - γ`.
    pub width_quantiles: Vec<WidthQuantile>,
    pub width_threshold: Option<f64>,
    /// `P(W ≤ width_threshold)`.
    pub prob_width_le: Option<Estimate>,
    /// Counts of the selected level `Ĵ = 1..=m+1` for adaptive procedures.
    pub level_histogram: Option<Vec<u64>>,
    pub surrogate_set_size: usize,
}

#[derive(Debug, Clone, Copy)]
struct RepOutcome {
    surrogate: bool,
    truth: bool,
    width: f64,
    level: Option<usize>,
}

enum Prepared<'a> {
    Bonferroni,
    Subspace(&'a Subspace),
    Adaptive(AdaptiveProcedure<'a>),
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.truth.len()
    }

    /// Checks every prerequisite of the procedure, including feasibility of
    /// `γ`, before any replication runs.
    fn prepare(&self) -> Result<(Prepared<'_>, SurrogateSet)> {
        if self.reps == 0 {
            return domain("reps >= 1");
        }
        if self.truth.is_empty() {
            return domain("n >= 1");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return domain(format!("σ>0 (got σ={})", self.sigma));
        }
        self.params.validate()?;
        if let Some(scale) = &self.scale {
            if scale.n() != self.n() {
                return Err(Error::DimensionMismatch { expected: self.n(), got: scale.n() });
            }
        }
        let need_scale = || {
            self.scale
                .as_ref()
                .ok_or_else(|| Error::Config(format!("{:?} requires spaces", self.procedure)))
        };
        let prepared = match self.procedure {
            Procedure::Bonferroni => Prepared::Bonferroni,
            Procedure::Subspace => {
                let scale = need_scale()?;
                if scale.len() != 1 {
                    return Err(Error::Config("subspace procedure takes a single level".into()));
                }
                Prepared::Subspace(&scale.levels()[0])
            }
            Procedure::AdaptiveSingle => Prepared::Adaptive(AdaptiveProcedure::single(need_scale()?, &self.params)?),
            Procedure::AdaptiveNested => Prepared::Adaptive(AdaptiveProcedure::nested(need_scale()?, &self.params)?),
        };
        let set = match &self.scale {
            Some(scale) if self.params.tuning.levels() == scale.len() => {
                surrogate_set(&self.truth, scale, &self.params.tuning)?
            }
            _ => surrogate_set(
                &self.truth,
                &NestedScale::single(Subspace::full(self.n())?),
                &crate::surrogate::SurrogateTuning::single(0.0, f64::INFINITY)?,
            )?,
        };
        Ok((prepared, set))
    }

    fn band(&self, prepared: &Prepared<'_>, y: &[f64]) -> Result<Band> {
        let p = &self.params;
        match prepared {
            Prepared::Bonferroni => bonferroni_band(y, p.sigma, p.alpha),
            Prepared::Subspace(s) => subspace_band(y, s, p.sigma, p.alpha, CoordinateWidth::PerCoordinate),
            Prepared::Adaptive(a) => a.fit(y),
        }
    }

    fn one(&self, prepared: &Prepared<'_>, set: &SurrogateSet, rep: u64) -> Result<RepOutcome> {
        let y = gen_data(&self.truth, self.sigma, self.seed, rep);
        let band = self.band(prepared, &y)?;
        Ok(RepOutcome {
            surrogate: set.intersects(&band.lower, &band.upper),
            truth: band.covers(&self.truth),
            width: band.width,
            level: band.selected_level,
        })
    }
}

/// Runs the scenario on `threads` worker threads (`1` runs serially).
pub fn run(s: &Scenario, width_threshold: Option<f64>, threads: usize) -> Result<SimReport> {
    run_with_widths(s, width_threshold, threads).map(|(r, _)| r)
}

/// As [`run`], also returning the per-replication widths in replication order.
pub fn run_with_widths(
    s: &Scenario,
    width_threshold: Option<f64>,
    threads: usize,
) -> Result<(SimReport, Vec<f64>)> {
    let (prepared, set) = s.prepare()?;
    let outcomes = replicate(s, &prepared, &set, threads)?;
    Ok(summarize(s, &outcomes, &set, width_threshold))
}

#[cfg(feature = "parallel")]
fn replicate(s: &Scenario, prepared: &Prepared<'_>, set: &SurrogateSet, threads: usize) -> Result<Vec<RepOutcome>> {
    use rayon::prelude::*;
    if threads <= 1 {
        return (0..s.reps).map(|r| s.one(prepared, set, r)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    // Prepared borrows are read-only; Sync is required by rayon.
    pool.install(|| (0..s.reps).into_par_iter().map(|r| s.one(prepared, set, r)).collect())
}

#[cfg(not(feature = "parallel"))]
fn replicate(s: &Scenario, prepared: &Prepared<'_>, set: &SurrogateSet, _threads: usize) -> Result<Vec<RepOutcome>> {
    (0..s.reps).map(|r| s.one(prepared, set, r)).collect()
}

fn summarize(
    s: &Scenario,
    outcomes: &[RepOutcome],
    set: &SurrogateSet,
    width_threshold: Option<f64>,
) -> (SimReport, Vec<f64>) {
    let reps = s.reps;
    let count = |pred: &dyn Fn(&RepOutcome) -> bool| outcomes.iter().filter(|o| pred(o)).count() as u64;
    let widths: Vec<f64> = outcomes.iter().map(|o| o.width).collect();
    let mut sorted = widths.clone();
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| {
        let k = ((q * reps as f64).ceil() as usize).clamp(1, sorted.len());
        sorted[k - 1]
    };
    let mut qs = vec![0.5, 0.9, 1.0 - s.params.gamma];
    qs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let width_quantiles = qs.into_iter().map(|q| WidthQuantile { q, value: quantile(q) }).collect();

    let level_histogram = match s.procedure {
        Procedure::AdaptiveSingle | Procedure::AdaptiveNested => {
            let m = s.scale.as_ref().map_or(1, NestedScale::len);
            let mut h = vec![0u64; m + 1];
            for l in outcomes.iter().filter_map(|o| o.level) {
                h[l - 1] += 1;
            }
            Some(h)
        }
        _ => None,
    };

    // Integer-count reductions and an ordered float sum keep the report
    // independent of scheduling.
    let mean_width = widths.iter().sum::<f64>() / reps as f64;
    let report = SimReport {
        procedure: s.procedure,
        reps,
        seed: s.seed,
        surrogate_coverage: Estimate::from_count(count(&|o| o.surrogate), reps),
        true_coverage: Estimate::from_count(count(&|o| o.truth), reps),
        mean_width,
        width_quantiles,
        width_threshold,
        prob_width_le: width_threshold.map(|w| Estimate::from_count(count(&|o| o.width <= w), reps)),
        level_histogram,
        surrogate_set_size: set.len(),
    };
    (report, widths)
}

/// A spoiler for `(space, ε₂, ε∞)`: `h · r` where `r = (I - Π) e_{i₀}` scaled
/// to unit sup-norm and `i₀` is the coordinate attaining `Ω`.
///
/// `h = ε∞ + margin (h_max - ε∞)` with `h_max = ε₂ / ||r||`, so the residual
/// satisfies `||f - Πf|| ≤ ε₂` and `||f - Πf||_∞ = h > ε∞` exactly. Adding
/// any element of `space` gives another spoiler.
pub fn make_spoiler(space: &Subspace, eps2: f64, eps_inf: f64, margin: f64) -> Result<Vec<f64>> {
    if !(margin > 0.0 && margin < 1.0) {
        return domain(format!("0 < margin < 1 (got {margin})"));
    }
    let n = space.n();
    let i0 = space.omega_argmax();
    let mut e = vec![0.0; n];
    e[i0] = 1.0;
    let r = space.residual(&e)?;
    let sup = norm_inf(&r);
    if !(sup > 1e-12) {
        return domain("e_{i₀} not in the space (Ω < 1)");
    }
    let r: Vec<f64> = r.iter().map(|x| x / sup).collect();
    let h_max = eps2 / norm2(&r);
    if !(eps_inf < h_max) {
        return domain(format!(
            "ε∞ < ε₂/||r|| for a nonempty spoiler construction (ε∞={eps_inf}, bound={h_max})"
        ));
    }
    let h = eps_inf + margin * (h_max - eps_inf);
    Ok(r.iter().map(|x| h * x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::{classify, optimal_tuning, Classification, SurrogateTuning, TuningRule};


    #[test]
    fn gen_data_is_replayable() {
        let f = [1.0, -2.0, 0.5];
        assert_eq!(gen_data(&f, 1.0, 7, 3), gen_data(&f, 1.0, 7, 3));
        assert_ne!(gen_data(&f, 1.0, 7, 3), gen_data(&f, 1.0, 7, 4));
        assert_ne!(gen_data(&f, 1.0, 7, 3), gen_data(&f, 1.0, 8, 3));
        let y = gen_data(&f, 1e-300, 1, 0);
        assert_eq!(y, f);
    }

    #[test]
    fn gen_data_moments() {
        let n = 100_000;
        let f = vec![0.5; 1];
        let draws: Vec<f64> = (0..n).map(|r| gen_data(&f, 2.0, 11, r)[0]).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = 2.0 / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se, "mean {mean}");
        assert!((var / 4.0 - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn spoiler_construction() {
        let s = Subspace::blocks(64, 4).unwrap();
        let (eps2, eps_inf) = (0.5, 0.3);
        for &margin in &[1e-6, 0.5, 1.0 - 1e-9] {
            let f = make_spoiler(&s, eps2, eps_inf, margin).unwrap();
            let res = s.residual(&f).unwrap();
            assert!(norm2(&res) <= eps2 * (1.0 + 1e-12));
            assert!(norm_inf(&res) > eps_inf);
            if margin > 0.9 {
                assert!((norm2(&res) - eps2).abs() < 1e-8);
            }
        }
        let f = make_spoiler(&s, eps2, eps_inf, 0.5).unwrap();
        assert_eq!(classify(&f, &s, eps2, eps_inf).unwrap(), Classification::Spoiler);
        assert!(make_spoiler(&s, 0.01, 5.0, 0.5).is_err());
        assert!(make_spoiler(&s, eps2, eps_inf, 1.0).is_err());
    }

    fn scenario(reps: u64) -> Scenario {
        let scale = NestedScale::dyadic(32, &[4]).unwrap();
        let t = optimal_tuning(&scale.levels()[0], 0.1, 0.1, 1.0, TuningRule::Achievable).unwrap();
        Scenario {
            truth: (0..32).map(|i| (i / 8) as f64).collect(),
            sigma: 1.0,
            procedure: Procedure::AdaptiveSingle,
            scale: Some(scale),
            params: BandParams { alpha: 0.1, gamma: 0.1, sigma: 1.0, alpha_split: vec![], tuning: t },
            reps,
            seed: 42,
        }
    }

    #[test]
    fn coverage_at_least_nominal() {
        let r = run(&scenario(2000), None, 1).unwrap();
        assert!(r.surrogate_coverage.p >= 0.9 - 3.0 * r.surrogate_coverage.se, "{r:?}");
        assert_eq!(r.surrogate_set_size, 1);
    }

    #[test]
    fn serial_equals_parallel() {
        let s = scenario(300);
        let a = run(&s, Some(1.0), 1).unwrap();
        let b = run(&s, Some(1.0), 4).unwrap();
        assert_eq!(a, b);
        assert!(a.surrogate_coverage.p >= a.true_coverage.p);
        assert_eq!(a.level_histogram.as_ref().unwrap().iter().sum::<u64>(), 300);
    }

    #[test]
    fn validation_before_running() {
        assert!(run(&scenario(0), None, 1).is_err());
        let mut s = scenario(10);
        s.params.tuning = SurrogateTuning::single(1e-3, 0.1).unwrap();
        assert!(matches!(run(&s, None, 1), Err(Error::Infeasible { .. })));
        let mut s = scenario(10);
        s.scale = None;
        assert!(matches!(run(&s, None, 1), Err(Error::Config(_))));
    }
}
