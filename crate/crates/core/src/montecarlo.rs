//! Seeded Monte Carlo estimation of coverage area fractions.
//!
//! The coverage sets are stationary, so the area fraction equals the
//! probability that the origin is covered. Each scene is sampled
//! independently from stream `scene index` of the run seed, and the estimator
//! counts covered scenes. Counts are integers, so the result does not depend
//! on how scenes are spread across threads.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{
    additive_error_gamma, additive_rsu_fraction, theorem1_area_fraction, theorem2_area_fraction, ErrorVariant,
    QuadratureSettings,
};
use crate::coverage::{build_scene, RelayMode, RoadLayout, SceneConfig, SceneRegion};
use crate::sampling::{RandomSeed, ScenarioParams};

pub const DEFAULT_DISK_RADIUS: f64 = 10_000.0;
pub const DEFAULT_N_SCENES: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    RsuOnly,
    RsuPlusRelay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimRegion {
    Disk,
    OriginWindow,
}

/// Inputs of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub params: ScenarioParams,
    pub relay_mode: RelayMode,
    pub region: SimRegion,
    /// Radius of the simulation disk when `region` is `Disk`.
    pub disk_radius: f64,
    pub layout: RoadLayout,
    pub n_scenes: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn new(params: ScenarioParams, n_scenes: u64, seed: u64) -> Self {
        Self {
            params,
            relay_mode: RelayMode::ApproximateUniform,
            region: SimRegion::OriginWindow,
            disk_radius: DEFAULT_DISK_RADIUS,
            layout: RoadLayout::Isotropic,
            n_scenes,
            seed,
            threads: None,
        }
    }

    pub fn with_region(mut self, region: SimRegion) -> Self {
        self.region = region;
        self
    }

    pub fn with_relay_mode(mut self, mode: RelayMode) -> Self {
        self.relay_mode = mode;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    fn scene_config(&self, with_relays: bool) -> SceneConfig {
        let region = match self.region {
            SimRegion::Disk => SceneRegion::Disk {
                radius: self.disk_radius,
            },
            SimRegion::OriginWindow => SceneRegion::OriginWindow,
        };
        let cfg = SceneConfig::new(self.params, region).with_layout(self.layout);
        if with_relays {
            cfg.with_relays(self.relay_mode)
        } else {
            cfg
        }
    }
}

/// Bernoulli estimate of an area fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_scenes: u64,
    pub covered: u64,
    pub seed: RandomSeed,
    pub mode: CoverageMode,
    pub relay_mode: RelayMode,
    pub sim_region: SimRegion,
}

impl CoverageEstimate {
    fn from_count(covered: u64, cfg: &SimulationConfig, mode: CoverageMode) -> Self {
        let n = cfg.n_scenes.max(1);
        let mean = covered as f64 / n as f64;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / n as f64).sqrt(),
            n_scenes: cfg.n_scenes,
            covered,
            seed: RandomSeed::new(cfg.seed),
            mode,
            relay_mode: cfg.relay_mode,
            sim_region: cfg.region,
        }
    }
}

/// Ratio of two paired means with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub rsu: CoverageEstimate,
    pub rsu_relay: CoverageEstimate,
    /// `None` when no scene had RSU coverage.
    pub ratio: Option<RatioEstimate>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    rsu: u64,
    union: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            rsu: self.rsu + o.rsu,
            union: self.union + o.union,
        }
    }
}

fn run_in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

fn count_scenes(cfg: &SimulationConfig, scenes: Range<u64>, with_relays: bool) -> Counts {
    let scene_cfg = cfg.scene_config(with_relays);
    let base = RandomSeed::new(cfg.seed);
    run_in_pool(cfg.threads, || {
        scenes
            .into_par_iter()
            .map(|i| {
                let scene = build_scene(&scene_cfg, base.with_stream(i));
                let rsu = scene.rsu_covers_origin();
                let union = rsu || scene.relay_covers_origin();
                Counts {
                    rsu: rsu as u64,
                    union: union as u64,
                }
            })
            .reduce(Counts::default, |a, b| a + b)
    })
}

/// Fraction of scenes whose origin is covered under `mode`.
pub fn estimate_area_fraction(cfg: &SimulationConfig, mode: CoverageMode) -> CoverageEstimate {
    let with_relays = mode == CoverageMode::RsuPlusRelay;
    let counts = count_scenes(cfg, 0..cfg.n_scenes, with_relays);
    let covered = if with_relays { counts.union } else { counts.rsu };
    CoverageEstimate::from_count(covered, cfg, mode)
}

/// RSU-only and RSU-plus-relay estimates on the same scenes.
pub fn paired_gain_estimate(cfg: &SimulationConfig) -> PairedEstimate {
    let counts = count_scenes(cfg, 0..cfg.n_scenes, true);
    let rsu = CoverageEstimate::from_count(counts.rsu, cfg, CoverageMode::RsuOnly);
    let rsu_relay = CoverageEstimate::from_count(counts.union, cfg, CoverageMode::RsuPlusRelay);
    PairedEstimate {
        rsu,
        rsu_relay,
        ratio: paired_ratio(rsu.mean, rsu_relay.mean, cfg.n_scenes),
    }
}

/// Delta-method ratio `b/a` for paired indicators with `a ≤ b` per scene,
/// which gives `Cov(a, b) = A (1 - B)`.
fn paired_ratio(a: f64, b: f64, n: u64) -> Option<RatioEstimate> {
    if a <= 0.0 {
        return None;
    }
    let var_a = a * (1.0 - a);
    let var_b = b * (1.0 - b);
    let cov = a * (1.0 - b);
    let var = (var_b / (a * a) - 2.0 * b * cov / a.powi(3) + b * b * var_a / a.powi(4)) / n as f64;
    Some(RatioEstimate {
        value: b / a,
        std_error: var.max(0.0).sqrt(),
    })
}

/// Means of `n_batches` consecutive, equally sized blocks of scenes.
pub fn batch_means(cfg: &SimulationConfig, mode: CoverageMode, n_batches: u64) -> Vec<f64> {
    let with_relays = mode == CoverageMode::RsuPlusRelay;
    let size = cfg.n_scenes / n_batches.max(1);
    (0..n_batches)
        .map(|b| {
            let c = count_scenes(cfg, b * size..(b + 1) * size, with_relays);
            let k = if with_relays { c.union } else { c.rsu };
            k as f64 / size as f64
        })
        .collect()
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    LambdaL,
    Mu,
    MuV,
    Gamma,
    Eta,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::LambdaL => "lambda_l",
            Self::Mu => "mu",
            Self::MuV => "mu_v",
            Self::Gamma => "gamma",
            Self::Eta => "eta",
        }
    }

    pub fn apply(self, base: &ScenarioParams, value: f64) -> ScenarioParams {
        let mut p = *base;
        match self {
            Self::LambdaL => p.lambda_l = value,
            Self::Mu => p.mu = value,
            Self::MuV => p.mu_v = value,
            Self::Gamma => p.gamma = value,
            Self::Eta => p.eta = value,
        }
        p
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "lambda_l" => Ok(Self::LambdaL),
            "mu" => Ok(Self::Mu),
            "mu_v" => Ok(Self::MuV),
            "gamma" => Ok(Self::Gamma),
            "eta" => Ok(Self::Eta),
            other => Err(format!("unknown sweep axis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Base run; row `i` uses seed `base.seed + i`.
    pub base: SimulationConfig,
    pub axis: SweepAxis,
    /// Axis values in SI units.
    pub values: Vec<f64>,
    pub quadrature: QuadratureSettings,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep has no axis values")]
    EmptyAxis,
    #[error("sweep value {0} is negative or not finite")]
    BadValue(f64),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::EmptyAxis);
        }
        if let Some(&v) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(SweepError::BadValue(v));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub params: ScenarioParams,
    pub mc: PairedEstimate,
    pub thm1: f64,
    /// `None` when quadrature failed; see `thm2_error`.
    pub thm2: Option<f64>,
    pub thm2_error: Option<String>,
    pub additive: f64,
    pub gamma_err: f64,
    /// Analytic gain `thm2 / thm1`.
    pub ratio: Option<f64>,
}

/// One row per axis value: paired Monte Carlo estimates and analytic values.
/// A quadrature failure is recorded in its row and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let rows = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let params = spec.axis.apply(&spec.base.params, value);
            let cfg = SimulationConfig {
                params,
                seed: spec.base.seed.wrapping_add(i as u64),
                ..spec.base
            };
            let mc = paired_gain_estimate(&cfg);
            let thm1 = theorem1_area_fraction(&params).value;
            let (thm2, thm2_error) = match theorem2_area_fraction(&params, &spec.quadrature) {
                Ok(f) => (Some(f.value), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let ratio = match thm2 {
                Some(t2) if thm1 > 0.0 => Some(t2 / thm1),
                _ => None,
            };
            SweepRow {
                axis_value: value,
                params,
                mc,
                thm1,
                thm2,
                thm2_error,
                additive: additive_rsu_fraction(&params),
                gamma_err: additive_error_gamma(&params, ErrorVariant::Theorem1Consistent),
                ratio,
            }
        })
        .collect();
    Ok(rows)
}
