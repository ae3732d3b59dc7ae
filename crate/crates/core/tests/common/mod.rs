//! Reference implementations used only as test oracles. None of these share
//! code with the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// `ln Γ(x)` by the Lanczos approximation (g = 7, 9 terms), x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`: power series below `a + 1`,
/// Lentz continued fraction for the complement above.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lead = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut k = a;
        for _ in 0..10_000 {
            k += 1.0;
            term *= x / k;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        (sum * lead.exp()).min(1.0)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 - lead.exp() * h
    }
}

/// Noncentral chi-square CDF as a Poisson(λ/2) mixture of central CDFs,
/// summed from zero.
pub fn ncx2_cdf(x: f64, df: f64, ncp: f64) -> f64 {
    if ncp == 0.0 {
        return gamma_p(df / 2.0, x / 2.0);
    }
    let mu = ncp / 2.0;
    let kmax = (mu + 40.0 * mu.sqrt() + 60.0) as usize;
    let mut total = 0.0;
    for k in 0..=kmax {
        let lw = -mu + k as f64 * mu.ln() - ln_gamma(k as f64 + 1.0);
        total += lw.exp() * gamma_p(df / 2.0 + k as f64, x / 2.0);
    }
    total
}

/// Box-Muller standard normal pair.
pub fn box_muller(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}

/// Monte Carlo estimate of `P(χ²_{df}(ncp) ≤ x)` and its standard error.
pub fn ncx2_cdf_mc(x: f64, df: usize, ncp: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let shift = ncp.sqrt();
    let mut hits = 0usize;
    let mut buf = Vec::with_capacity(df + 1);
    for _ in 0..draws {
        buf.clear();
        while buf.len() < df {
            let (a, b) = box_muller(&mut rng);
            buf.push(a);
            buf.push(b);
        }
        let mut s = (buf[0] + shift).powi(2);
        for z in &buf[1..df] {
            s += z * z;
        }
        if s <= x {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

/// `max { ||v||_∞ : v ∈ span(basis), ||v|| = 1 }` by dense search over the
/// unit sphere of coefficients (dimension 1 or 2), with local refinement.
/// `basis` is orthonormal under the normalized inner product.
pub fn brute_max_inf_unit(basis: &[Vec<f64>]) -> f64 {
    let sup = |c: &[f64]| -> f64 {
        let n = basis[0].len();
        (0..n)
            .map(|i| c.iter().zip(basis).map(|(ck, q)| ck * q[i]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    };
    match basis.len() {
        1 => sup(&[1.0]),
        2 => {
            let eval = |t: f64| sup(&[t.cos(), t.sin()]);
            let steps = 20_000;
            let mut best_t = 0.0;
            let mut best = 0.0;
            for k in 0..steps {
                let t = std::f64::consts::PI * k as f64 / steps as f64;
                let v = eval(t);
                if v > best {
                    best = v;
                    best_t = t;
                }
            }
            let mut h = std::f64::consts::PI / steps as f64;
            for _ in 0..40 {
                for t in [best_t - h, best_t + h] {
                    let v = eval(t);
                    if v > best {
                        best = v;
                        best_t = t;
                    }
                }
                h *= 0.5;
            }
            best
        }
        d => panic!("brute force supports dimension 1 or 2, got {d}"),
    }
}

/// Brute-force `ω(u, V)` for `Tf = f_1` on `R^4` with `F` the constants.
///
/// `V - V = F + K(2ε₂, 2ε∞)` with `K` the intersection of the two balls in
/// `F^⊥`, so the modulus is `sup { g_1 : g = aφ + δ, a² + ||δ||² ≤ u² }` over
/// `δ ∈ K(2ε₂, 2ε∞)`. For fixed `δ` the best `a` is `√(u² - ||δ||²)`; `δ` is
/// searched on a grid in an orthonormal basis of `F^⊥`, then refined.
pub fn brute_modulus_constants_n4(u: f64, eps2: f64, eps_inf: f64) -> f64 {
    let n = 4.0f64;
    // Helmert basis, orthonormal under <a,b> = (1/n) Σ a_i b_i
    let h: [[f64; 4]; 3] = [
        [1.0, -1.0, 0.0, 0.0],
        [1.0, 1.0, -2.0, 0.0],
        [1.0, 1.0, 1.0, -3.0],
    ];
    let h: Vec<Vec<f64>> = h
        .iter()
        .map(|v| {
            let s = (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
            v.iter().map(|x| x / s).collect()
        })
        .collect();
    let r2 = 2.0 * eps2;
    let rinf = 2.0 * eps_inf;
    let value = |b: [f64; 3]| -> Option<f64> {
        let nb2 = b.iter().map(|x| x * x).sum::<f64>();
        if nb2 > u * u || nb2 > r2 * r2 {
            return None;
        }
        let mut delta = [0.0; 4];
        for (bk, hk) in b.iter().zip(&h) {
            for i in 0..4 {
                delta[i] += bk * hk[i];
            }
        }
        if delta.iter().any(|d| d.abs() > rinf) {
            return None;
        }
        Some((u * u - nb2).sqrt() + delta[0])
    };
    let radius = u.min(r2);
    let mut center = [0.0; 3];
    let mut half = radius;
    let mut best = value(center).unwrap_or(f64::NEG_INFINITY);
    let steps = 60i32;
    for _ in 0..8 {
        let mut next = center;
        for i in -steps..=steps {
            for j in -steps..=steps {
                for k in -steps..=steps {
                    let s = half / steps as f64;
                    let b = [
                        center[0] + i as f64 * s,
                        center[1] + j as f64 * s,
                        center[2] + k as f64 * s,
                    ];
                    if let Some(v) = value(b) {
                        if v > best {
                            best = v;
                            next = b;
                        }
                    }
                }
            }
        }
        center = next;
        half *= 0.1;
    }
    best
}
