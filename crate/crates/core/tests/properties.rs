use proptest::prelude::*;
use surrband::bands::{adaptive_band_nested, bonferroni_band, subspace_band, AdaptiveProcedure, CoordinateWidth};
use surrband::subspace::{inner, norm2};
use surrband::surrogate::{optimal_tuning_nested, surrogate_levels, surrogate_single};
use surrband::{BandParams, NestedScale, Subspace, SurrogateTuning, TuningRule};

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

fn raw_basis(n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(vector(n), d)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

fn params(scale: &NestedScale, gamma: f64) -> BandParams {
    let split = BandParams::equal_split(0.1, scale.len());
    let tuning = optimal_tuning_nested(scale, 0.1, &split, 0.05, 1.0, TuningRule::Achievable).unwrap();
    BandParams { alpha: 0.1, gamma, sigma: 1.0, alpha_split: split, tuning }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn projector_symmetric_and_idempotent(raw in raw_basis(12, 3), y in vector(12), z in vector(12)) {
        let s = match Subspace::orthonormalize(&raw, 12) { Ok(s) => s, Err(_) => return Ok(()) };
        let py = s.project(&y).unwrap();
        let pz = s.project(&z).unwrap();
        prop_assert!((inner(&py, &z) - inner(&y, &pz)).abs() < 1e-9 * (1.0 + norm2(&y) * norm2(&z)));
        let ppy = s.project(&py).unwrap();
        prop_assert!(close(&ppy, &py, 1e-10));
    }

    #[test]
    fn pythagoras(raw in raw_basis(10, 4), y in vector(10)) {
        let s = match Subspace::orthonormalize(&raw, 10) { Ok(s) => s, Err(_) => return Ok(()) };
        let p = s.project(&y).unwrap();
        let r = s.residual(&y).unwrap();
        let lhs = norm2(&y).powi(2);
        let rhs = norm2(&p).powi(2) + norm2(&r).powi(2);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs));
        prop_assert!(inner(&p, &r).abs() < 1e-9 * (1.0 + lhs));
    }

    #[test]
    fn omega_depends_only_on_span(raw in raw_basis(9, 2), theta in 0.0..std::f64::consts::TAU) {
        let a = match Subspace::orthonormalize(&raw, 9) { Ok(s) => s, Err(_) => return Ok(()) };
        let (c, s) = (theta.cos(), theta.sin());
        let rotated: Vec<Vec<f64>> = vec![
            raw[0].iter().zip(&raw[1]).map(|(x, y)| c * x - s * y).collect(),
            raw[0].iter().zip(&raw[1]).map(|(x, y)| s * x + 3.0 * c * y).collect(),
        ];
        let b = match Subspace::orthonormalize(&rotated, 9) { Ok(s) => s, Err(_) => return Ok(()) };
        prop_assert!((a.omega() - b.omega()).abs() < 1e-8);
        let lev_a = a.leverages();
        let lev_b = b.leverages();
        prop_assert!(close(&lev_a, &lev_b, 1e-8));
    }

    #[test]
    fn nested_projections_compose(y in vector(32)) {
        let scale = NestedScale::dyadic(32, &[1, 2, 8]).unwrap();
        let lv = scale.levels();
        for j in 0..lv.len() - 1 {
            let outer = lv[j + 1].project(&y).unwrap();
            prop_assert!(close(&lv[j].project(&outer).unwrap(), &lv[j].project(&y).unwrap(), 1e-10));
        }
    }

    #[test]
    fn surrogate_is_idempotent(y in vector(16), e2 in 0.0..3.0f64, einf in 0.0..3.0f64) {
        let s = Subspace::blocks(16, 4).unwrap();
        let once = surrogate_single(&y, &s, e2, einf).unwrap();
        let twice = surrogate_single(&once, &s, e2, einf).unwrap();
        prop_assert!(close(&once, &twice, 1e-10));
    }

    #[test]
    fn surrogate_levels_shrink_with_tolerance(y in vector(16), e2 in 0.0..3.0f64, einf in 0.0..3.0f64, k in 1.0..3.0f64) {
        // raising ε∞ can only remove spoiler levels
        let scale = NestedScale::dyadic(16, &[1, 4]).unwrap();
        let lo = SurrogateTuning::new(vec![e2; 2], vec![einf; 2]).unwrap();
        let hi = SurrogateTuning::new(vec![e2; 2], vec![einf * k; 2]).unwrap();
        let a = surrogate_levels(&y, &scale, &lo).unwrap();
        let b = surrogate_levels(&y, &scale, &hi).unwrap();
        prop_assert!(b.iter().all(|j| a.contains(j)));
    }

    #[test]
    fn bands_are_ordered(y in vector(32), gamma in 0.05..0.6f64) {
        let scale = NestedScale::dyadic(32, &[1, 4]).unwrap();
        let p = params(&scale, gamma);
        let s = &scale.levels()[1];
        for band in [
            bonferroni_band(&y, 1.0, 0.1).unwrap(),
            subspace_band(&y, s, 1.0, 0.1, CoordinateWidth::PerCoordinate).unwrap(),
            adaptive_band_nested(&y, &scale, &p).unwrap(),
        ] {
            let gaps: Vec<f64> = band.lower.iter().zip(&band.upper).map(|(l, u)| u - l).collect();
            prop_assert!(band.lower.iter().zip(&band.center).all(|(l, c)| l <= c));
            prop_assert!(band.center.iter().zip(&band.upper).all(|(c, u)| c <= u));
            prop_assert_eq!(band.width, gaps.iter().cloned().fold(0.0, f64::max));
        }
    }

    #[test]
    fn scale_equivariance(y in vector(32)) {
        let c = 2.0;
        let scale = NestedScale::dyadic(32, &[1, 4]).unwrap();
        let p = params(&scale, 0.3);
        let mut q = p.clone();
        q.sigma = c;
        q.tuning = SurrogateTuning::new(
            p.tuning.eps2.iter().map(|e| c * e).collect(),
            p.tuning.eps_inf.iter().map(|e| c * e).collect(),
        ).unwrap();
        let cy: Vec<f64> = y.iter().map(|v| c * v).collect();
        let a = adaptive_band_nested(&y, &scale, &p).unwrap();
        let b = adaptive_band_nested(&cy, &scale, &q).unwrap();
        prop_assert_eq!(a.selected_level, b.selected_level);
        let sl: Vec<f64> = a.lower.iter().map(|v| c * v).collect();
        let su: Vec<f64> = a.upper.iter().map(|v| c * v).collect();
        prop_assert_eq!(sl, b.lower);
        prop_assert_eq!(su, b.upper);
    }

    #[test]
    fn selected_level_monotone_in_gamma(y in vector(32), g1 in 0.05..0.6f64, g2 in 0.05..0.6f64) {
        let scale = NestedScale::dyadic(32, &[1, 4]).unwrap();
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let a = adaptive_band_nested(&y, &scale, &params(&scale, lo)).unwrap();
        let b = adaptive_band_nested(&y, &scale, &params(&scale, hi)).unwrap();
        prop_assert!(a.selected_level <= b.selected_level);
    }

    #[test]
    fn full_level_matches_bonferroni(y in vector(32)) {
        let scale = NestedScale::dyadic(32, &[1, 4]).unwrap();
        let p = params(&scale, 0.3);
        let proc_ = AdaptiveProcedure::nested(&scale, &p).unwrap();
        let band = proc_.fit(&y).unwrap();
        if band.selected_level == Some(3) {
            let b = bonferroni_band(&y, 1.0, p.alpha_split[2]).unwrap();
            prop_assert_eq!(band.lower, b.lower);
            prop_assert_eq!(band.upper, b.upper);
        }
    }
}
