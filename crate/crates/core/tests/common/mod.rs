//! Oracles shared by the integration tests. Nothing here calls the library's
//! numerical code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Asymptotic Kolmogorov-Smirnov critical value at level 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Two-sided KS statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Per-meter intensities from per-km ones.
pub fn per_m(km: f64) -> f64 {
    km / 1000.0
}

/// Coverage probability of the origin with RSUs only, written out from the
/// void probability of the line process and of the per-line Boolean model.
pub fn rsu_fraction_oracle(lambda_km: f64, mu_km: f64, gamma: f64, eta: f64) -> f64 {
    let per_line = 1.0 - (-2.0 * per_m(mu_km) * gamma).exp();
    1.0 - (-per_m(lambda_km) * eta * per_line).exp()
}

/// RSU-plus-relay coverage with the per-line coverage integral equal to
/// `3γ`, the value the relay construction integrates to.
pub fn relay_fraction_oracle(lambda_km: f64, mu_km: f64, gamma: f64, eta: f64) -> f64 {
    let per_line = 1.0 - (-3.0 * per_m(mu_km) * gamma).exp();
    1.0 - (-per_m(lambda_km) * eta * per_line).exp()
}

/// Brute-force estimate of the per-line coverage integral in units of `γ`:
/// the expected length of the union of an RSU segment and its relay's
/// segment. Returns `(mean, std_error)`.
pub fn union_length_mc(n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = |rng: &mut ChaCha8Rng| -(1.0 - rng.random::<f64>()).ln();
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let (w, v) = (exp(&mut rng), exp(&mut rng));
        let y = -w + rng.random::<f64>() * (w + v);
        let (w2, v2) = (exp(&mut rng), exp(&mut rng));
        let (a0, a1) = (-w, v);
        let (b0, b1) = (y - w2, y + v2);
        let overlap = (a1.min(b1) - a0.max(b0)).max(0.0);
        let len = (a1 - a0) + (b1 - b0) - overlap;
        sum += len;
        sum2 += len * len;
    }
    let mean = sum / n as f64;
    let var = sum2 / n as f64 - mean * mean;
    (mean, (var / n as f64).sqrt())
}
