//! Monte-Carlo inner products ⟨z₁ʲz₂ᵏ, z₁ʲ'z₂ᵏ'⟩ of monomials under h_m.
//!
//! With X = |z₁|², Y = |z₂|² and phases φ₁, φ₂ the measure dλ/π² on C² is
//! dX dY dφ₁ dφ₂ / (4π²), which matches the normalization of
//! `moments::norm_squared`. X and Y are drawn from an exponential law and the
//! phases uniformly, so the estimator of the inner product is
//! X^{(j+j')/2} Y^{(k+k')/2} w_m(X+Y) e^{i((j−j')φ₁ + (k−k')φ₂)} / pdf(X, Y).

use std::f64::consts::TAU;

use ehbal_core::geometry::HermitianWeight;
use ehbal_core::moments::{log_norm_squared, MonomialIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

pub const DEFAULT_SEED: u64 = 0x5eed_e4a1;
pub const DEFAULT_SAMPLES: usize = 40_000;

/// Inner product of two monomials divided by the product of their norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub a: MonomialIndex,
    pub b: MonomialIndex,
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

impl PairEstimate {
    /// Both parts within `k` standard errors of zero.
    pub fn is_zero_within(&self, k: f64) -> bool {
        self.re.abs() <= k * self.se_re && self.im.abs() <= k * self.se_im
    }
}

struct Moments {
    mean_re: f64,
    mean_im: f64,
    se_re: f64,
    se_im: f64,
}

fn estimate(a: MonomialIndex, b: MonomialIndex, samples: usize, rng: &mut ChaCha8Rng) -> Moments {
    let w = HermitianWeight::new(a.m()).expect("validated index");
    let lambda = 0.75 * a.m() as f64;
    let px = 0.5 * (a.j() + b.j()) as f64;
    let py = 0.5 * (a.k() + b.k()) as f64;
    let dj = a.j() as f64 - b.j() as f64;
    let dk = a.k() as f64 - b.k() as f64;
    let (mut s_re, mut s_im, mut q_re, mut q_im) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let x = -(1.0 - rng.random::<f64>()).ln() / lambda;
        let y = -(1.0 - rng.random::<f64>()).ln() / lambda;
        let phase = dj * TAU * rng.random::<f64>() + dk * TAU * rng.random::<f64>();
        let log_mag = px * x.ln() + py * y.ln() + w.log_radial(x + y) + lambda * (x + y) - 2.0 * lambda.ln();
        let mag = log_mag.exp();
        let (re, im) = (mag * phase.cos(), mag * phase.sin());
        s_re += re;
        s_im += im;
        q_re += re * re;
        q_im += im * im;
    }
    let n = samples as f64;
    let (mean_re, mean_im) = (s_re / n, s_im / n);
    let var = |q: f64, mean: f64| ((q / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Moments { mean_re, mean_im, se_re: (var(q_re, mean_re) / n).sqrt(), se_im: (var(q_im, mean_im) / n).sqrt() }
}

/// Monte-Carlo estimate of ‖z₁ʲz₂ᵏ‖² with its standard error.
pub fn norm_estimate(idx: MonomialIndex, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = estimate(idx, idx, samples, &mut rng);
    (m.mean_re, m.se_re)
}

pub fn pair_estimate(a: MonomialIndex, b: MonomialIndex, samples: usize, rng: &mut ChaCha8Rng) -> Result<PairEstimate> {
    let scale = (-0.5 * (log_norm_squared(a)? + log_norm_squared(b)?)).exp();
    let m = estimate(a, b, samples, rng);
    Ok(PairEstimate { a, b, re: m.mean_re * scale, im: m.mean_im * scale, se_re: m.se_re * scale, se_im: m.se_im * scale })
}

/// `pairs` random distinct monomial pairs of degree m..=m+4 at level `m`.
pub fn orthogonality_check(m: u32, pairs: usize, samples: usize, seed: u64) -> Result<Vec<PairEstimate>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let d = rng.random_range(m..=m + 4);
        let j = rng.random_range(0..=d);
        MonomialIndex::new(j, d - j, m)
    };
    let mut out = Vec::with_capacity(pairs);
    while out.len() < pairs {
        let a = draw(&mut rng)?;
        let b = draw(&mut rng)?;
        if a == b {
            continue;
        }
        out.push(pair_estimate(a, b, samples, &mut rng)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ehbal_core::moments::norm_squared;

    #[test]
    fn diagonal_matches_norm() {
        let idx = MonomialIndex::new(2, 1, 2).unwrap();
        let (v, se) = norm_estimate(idx, 200_000, 7);
        let exact = norm_squared(idx).unwrap();
        assert!((v - exact).abs() < 4.0 * se, "{v} ± {se} vs {exact}");
        assert!(se < 0.05 * exact);
    }

    #[test]
    fn same_seed_same_estimates() {
        let a = orthogonality_check(2, 3, 2000, 11).unwrap();
        let b = orthogonality_check(2, 3, 2000, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.a != p.b));
    }
}
