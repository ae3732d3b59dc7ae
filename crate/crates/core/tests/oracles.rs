mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use surrband::specfun::{chi2_cdf, chi2_quantile, normal_cdf, tau, tau_inv, z_upper, NoncentralChi2};
use surrband::Subspace;

#[test]
fn oracle_self_check() {
    assert!((common::ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    assert!((common::ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    // P(1, x) = 1 - e^{-x}
    for &x in &[0.1, 1.0, 3.0, 20.0] {
        assert!((common::gamma_p(1.0, x) - (1.0 - (-x).exp())).abs() < 1e-14);
    }
    // chi2_1 CDF at z² equals 2Φ(z) - 1
    assert!((common::gamma_p(0.5, 0.5) - 0.682_689_492_137_085_9).abs() < 1e-13);
}

#[test]
fn central_cdf_matches_series() {
    for &df in &[1usize, 2, 3, 10, 57, 252, 1000] {
        for &q in &[0.05, 0.3, 0.5, 0.9, 0.999] {
            let x = df as f64 * (0.2 + 2.0 * q);
            let lib = chi2_cdf(x, NoncentralChi2::central(df).unwrap());
            let oracle = common::gamma_p(df as f64 / 2.0, x / 2.0);
            assert!((lib - oracle).abs() < 1e-11, "df={df} x={x}: {lib} vs {oracle}");
        }
    }
}

#[test]
fn noncentral_cdf_matches_mixture() {
    for &(df, ncp) in &[(1usize, 0.5), (4, 3.0), (10, 25.0), (252, 100.0), (50, 800.0)] {
        let mean = df as f64 + ncp;
        let sd = (2.0 * (df as f64 + 2.0 * ncp)).sqrt();
        for &k in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
            let x = (mean + k * sd).max(1e-3);
            let lib = chi2_cdf(x, NoncentralChi2::new(df, ncp).unwrap());
            let oracle = common::ncx2_cdf(x, df as f64, ncp);
            assert!((lib - oracle).abs() < 1e-10, "df={df} ncp={ncp} x={x}: {lib} vs {oracle}");
        }
    }
}

#[test]
fn noncentral_cdf_matches_simulation() {
    let (df, ncp, x) = (5usize, 4.0, 9.0);
    let lib = chi2_cdf(x, NoncentralChi2::new(df, ncp).unwrap());
    let (p, se) = common::ncx2_cdf_mc(x, df, ncp, 200_000, 5);
    assert!((lib - p).abs() <= 3.0 * se, "{lib} vs {p} ± {se}");
}

#[test]
fn quantiles_invert_oracle_cdf() {
    for &(df, ncp) in &[(3usize, 0.0), (30, 0.0), (30, 12.0), (252, 60.0)] {
        for &u in &[0.01, 0.5, 0.95] {
            let q = chi2_quantile(u, NoncentralChi2::new(df, ncp).unwrap()).unwrap();
            let back = common::ncx2_cdf(q, df as f64, ncp);
            assert!((back - u).abs() < 1e-8, "df={df} ncp={ncp} u={u}");
        }
    }
}

#[test]
fn gaussian_quantities_against_closed_forms() {
    // τ(ε) = P(|Z| ≤ ε/2)
    for &e in &[0.1, 1.0, 2.879_062_941_876_912_6, 6.0] {
        let direct = normal_cdf(e / 2.0) - normal_cdf(-e / 2.0);
        assert!((tau(e).unwrap() - direct).abs() < 1e-14);
    }
    assert!((tau_inv(0.85).unwrap() - 2.0 * 1.439_531_470_938_456_3).abs() < 1e-9);
    assert!((z_upper(0.075).unwrap() - 1.439_531_470_938_456_3).abs() < 1e-9);
}

fn random_subspace(rng: &mut ChaCha20Rng, n: usize, d: usize) -> Subspace {
    let raw: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
        .collect();
    Subspace::orthonormalize(&raw, n).unwrap()
}

#[test]
fn extremal_norms_match_search() {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for trial in 0..30 {
        let n = 3 + trial % 4;
        let d = 1 + trial % 2;
        let s = random_subspace(&mut rng, n, d);
        let brute = common::brute_max_inf_unit(s.basis());
        assert!((s.max_inf_given_two_norm(1.0) - brute).abs() < 1e-6, "n={n} d={d}");
        let eps = 0.7;
        assert!((s.min_two_norm_given_inf(eps).unwrap() - eps / brute).abs() < 1e-6);
    }
}
