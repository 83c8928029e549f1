//! Seeded sampling of the road line process, per-line Poisson points and
//! exponential LOS distances.
//!
//! All lengths are meters and all intensities are per meter. Randomness is
//! drawn from ChaCha8 generators whose keys are derived from a
//! [`RandomSeed`], a line index and a [`Role`], so every (scene, line, role)
//! triple has its own stream. Enabling relays or vehicles never perturbs the
//! RSU draws of a scene.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Line;

/// Scale factor between per-kilometer and per-meter intensities.
pub const PER_KM: f64 = 1e-3;

/// Parameter vector of a network scenario, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Line (road) intensity, per meter.
    pub lambda_l: f64,
    /// RSU intensity on each line, per meter.
    pub mu: f64,
    /// Vehicle intensity on each line, per meter.
    pub mu_v: f64,
    /// Mean LOS distance, meters.
    pub gamma: f64,
    /// Road width, meters.
    pub eta: f64,
    /// Vehicle speed, m/s. Metadata only.
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{field}`: {value} ({reason})")]
pub struct ParamError {
    pub field: &'static str,
    pub value: f64,
    pub reason: &'static str,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            lambda_l: 5.0 * PER_KM,
            mu: 2.0 * PER_KM,
            mu_v: 25.0 * PER_KM,
            gamma: 100.0,
            eta: 100.0,
            speed: 10.0,
        }
    }
}

impl ScenarioParams {
    /// Builds parameters from per-km intensities; `gamma` and `eta` in meters.
    pub fn from_per_km(lambda_l_km: f64, mu_km: f64, mu_v_km: f64, gamma: f64, eta: f64) -> Self {
        Self {
            lambda_l: lambda_l_km * PER_KM,
            mu: mu_km * PER_KM,
            mu_v: mu_v_km * PER_KM,
            gamma,
            eta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let fields = [
            ("lambda_l", self.lambda_l),
            ("mu", self.mu),
            ("mu_v", self.mu_v),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("speed", self.speed),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(ParamError {
                    field,
                    value,
                    reason: "must be finite",
                });
            }
            if value < 0.0 {
                return Err(ParamError {
                    field,
                    value,
                    reason: "must be nonnegative",
                });
            }
        }
        Ok(())
    }
}

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Lines = 1,
    Rsu = 2,
    RsuLos = 3,
    Vehicle = 4,
    Relay = 5,
    RelayLos = 6,
}

/// Line index used for streams that are not tied to a particular line.
pub const SCENE_LEVEL: u64 = u64::MAX;

/// A 64-bit seed plus a stream index (the scene number in Monte Carlo runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RandomSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    /// Generator for `(line, role)` within this seed and stream.
    pub fn rng(&self, line: u64, role: Role) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        key[16..24].copy_from_slice(&line.to_le_bytes());
        key[24..32].copy_from_slice(&(role as u64).to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Poisson-distributed count; zero mean gives zero.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    dist.sample(rng) as usize
}

/// Exponential draw with the given mean, by inverting the CDF.
pub fn exponential<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let u: f64 = rng.random();
    // 1 - u lies in (0, 1]
    -mean * (1.0 - u).ln()
}

/// Lines of the isotropic process that meet the disk of radius `radius`.
///
/// The count is Poisson with mean `2 λ_l radius`; offsets are uniform on
/// `(-radius, radius)` and angles uniform on `[0, π)`.
pub fn sample_lines_disk<R: Rng + ?Sized>(params: &ScenarioParams, radius: f64, rng: &mut R) -> Vec<Line> {
    sample_lines(params.lambda_l, radius, rng, |rng| rng.random::<f64>() * PI)
}

/// Manhattan variant: same offsets, angles `0` or `π/2` with equal odds.
pub fn sample_lines_manhattan<R: Rng + ?Sized>(
    params: &ScenarioParams,
    radius: f64,
    rng: &mut R,
) -> Vec<Line> {
    sample_lines(params.lambda_l, radius, rng, |rng| {
        if rng.random::<bool>() {
            FRAC_PI_2
        } else {
            0.0
        }
    })
}

fn sample_lines<R, F>(lambda_l: f64, radius: f64, rng: &mut R, mut angle: F) -> Vec<Line>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> f64,
{
    debug_assert!(radius > 0.0);
    let n = poisson_count(2.0 * lambda_l * radius, rng);
    (0..n)
        .map(|_| {
            let offset = (2.0 * rng.random::<f64>() - 1.0) * radius;
            let theta = angle(rng);
            Line::new(offset, theta)
        })
        .collect()
}

/// One-dimensional Poisson process of `intensity` on `[a, b]`, returned in
/// increasing order.
pub fn sample_points_on_line<R: Rng + ?Sized>(intensity: f64, a: f64, b: f64, rng: &mut R) -> Vec<f64> {
    debug_assert!(a <= b);
    let len = b - a;
    let n = poisson_count(intensity * len, rng);
    let mut pts: Vec<f64> = (0..n).map(|_| a + rng.random::<f64>() * len).collect();
    pts.sort_by(f64::total_cmp);
    pts
}

/// Left and right LOS distances `(W, V)`, i.i.d. exponential with mean `gamma`.
pub fn sample_los_extents<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> (f64, f64) {
    let w = exponential(gamma, rng);
    let v = exponential(gamma, rng);
    (w, v)
}

/// Length of `line` inside the disk of radius `radius` around the origin.
pub fn chord_half_length(line: &Line, radius: f64) -> f64 {
    let r = line.distance_to_origin();
    if r >= radius {
        0.0
    } else {
        (radius * radius - r * r).sqrt()
    }
}
