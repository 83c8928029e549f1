//! Command-line front end.
//!
//! Parameters resolve in the order built-in defaults, preset, config file,
//! flags; later sources win. Intensities are read per km and converted to
//! per meter before anything else sees them.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{
    additive_error_gamma, additive_rsu_fraction, relay_gain_ratio, road_area_fraction, theorem1_area_fraction,
    theorem2_area_fraction, theorem2_printed_display, AnalyticError, ErrorVariant, QuadratureSettings,
};
use crate::coverage::{build_scene, export_scene, RelayMode, RoadLayout, SceneConfig, SceneFormat, SceneRegion, TOOL_NAME};
use crate::montecarlo::{
    estimate_area_fraction, paired_gain_estimate, run_sweep, CoverageEstimate, CoverageMode, SimRegion,
    SimulationConfig, SweepAxis, SweepRow, SweepSpec, DEFAULT_DISK_RADIUS, DEFAULT_N_SCENES,
};
use crate::sampling::{RandomSeed, ScenarioParams, PER_KM};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "LOSCOV_THREADS";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SCENE_RADIUS: f64 = 1_000.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "loscov", version, about = "LOS coverage of RSUs and vehicle relays on Poisson road networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and quadrature area fractions.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Also evaluate the displayed relay expression taken literally.
        #[arg(long)]
        printed_display: bool,
    },
    /// Monte Carlo estimate of the coverage fraction.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = SimMode::Paired)]
        mode: SimMode,
    },
    /// One row of Monte Carlo and analytic values per axis value.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values (per km for intensities, meters otherwise).
        #[arg(long, value_delimiter = ',', num_args = 0.., conflicts_with_all = ["from", "to", "step"])]
        values: Option<Vec<String>>,
        #[arg(long, requires_all = ["to", "step"])]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Sample and export one scene.
    Scene {
        #[command(flatten)]
        common: CommonArgs,
        /// Radius of the sampling disk in meters.
        #[arg(long, default_value_t = DEFAULT_SCENE_RADIUS)]
        radius: f64,
        #[arg(long)]
        manhattan: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Rsu,
    Relay,
    Paired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum Preset {
    #[value(name = "3gpp-urban-a")]
    #[serde(rename = "3gpp-urban-a")]
    UrbanA,
    #[value(name = "3gpp-urban-b")]
    #[serde(rename = "3gpp-urban-b")]
    UrbanB,
    #[value(name = "dense-urban")]
    #[serde(rename = "dense-urban")]
    DenseUrban,
}

impl Preset {
    pub fn params(self) -> ScenarioParams {
        let (l, mu, mu_v) = match self {
            Self::UrbanA => (5.0, 2.0, 25.0),
            Self::UrbanB => (5.0, 4.0, 50.0),
            Self::DenseUrban => (15.0, 2.0, 25.0),
        };
        ScenarioParams::from_per_km(l, mu, mu_v, 100.0, 100.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelayModeArg {
    Approx,
    Exact,
}

impl From<RelayModeArg> for RelayMode {
    fn from(m: RelayModeArg) -> Self {
        match m {
            RelayModeArg::Approx => RelayMode::ApproximateUniform,
            RelayModeArg::Exact => RelayMode::ExactVehicle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionArg {
    Disk,
    Window,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Ndjson,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Flat TOML file of `key = value` settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Road intensity, per km.
    #[arg(long)]
    pub lambda_l: Option<f64>,
    /// RSU intensity per road, per km.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Vehicle intensity per road, per km.
    #[arg(long)]
    pub mu_v: Option<f64>,
    /// Mean LOS distance, m.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Road width, m.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Vehicle speed, m/s.
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_scenes: Option<u64>,
    #[arg(long, value_enum)]
    pub relay_mode: Option<RelayModeArg>,
    #[arg(long, value_enum)]
    pub region: Option<RegionArg>,
    /// Simulation disk radius in meters for `--region disk`.
    #[arg(long)]
    pub disk_radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
}

/// Contents of a `--config` file. Intensities are per km.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub lambda_l: Option<f64>,
    pub mu: Option<f64>,
    pub mu_v: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub speed: Option<f64>,
    pub seed: Option<u64>,
    pub n_scenes: Option<u64>,
    pub relay_mode: Option<RelayModeArg>,
    pub region: Option<RegionArg>,
    pub disk_radius: Option<f64>,
    pub threads: Option<usize>,
    pub format: Option<OutputFormat>,
    pub x_cutoff_multiplier: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }
}

/// Fully resolved settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ScenarioParams,
    pub seed: u64,
    pub n_scenes: u64,
    pub relay_mode: RelayMode,
    pub region: SimRegion,
    pub disk_radius: f64,
    pub threads: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub quadrature: QuadratureSettings,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                ConfigFile::parse(&text)?
            }
            None => ConfigFile::default(),
        };
        Self::from_sources(args, &file)
    }

    pub fn from_sources(args: &CommonArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let mut p = args.preset.or(file.preset).map(Preset::params).unwrap_or_default();
        let km = |v: Option<f64>| v.map(|x| x * PER_KM);
        let overrides = [
            (&mut p.lambda_l, km(file.lambda_l), km(args.lambda_l)),
            (&mut p.mu, km(file.mu), km(args.mu)),
            (&mut p.mu_v, km(file.mu_v), km(args.mu_v)),
            (&mut p.gamma, file.gamma, args.gamma),
            (&mut p.eta, file.eta, args.eta),
            (&mut p.speed, file.speed, args.speed),
        ];
        for (slot, from_file, from_flag) in overrides {
            if let Some(v) = from_flag.or(from_file) {
                *slot = v;
            }
        }
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        let mut quadrature = QuadratureSettings::default();
        if let Some(v) = file.x_cutoff_multiplier {
            quadrature.x_cutoff_multiplier = v;
        }
        if let Some(v) = file.rel_tol {
            quadrature.rel_tol = v;
        }
        if let Some(v) = file.abs_tol {
            quadrature.abs_tol = v;
        }
        if let Some(v) = file.max_subdivisions {
            quadrature.max_subdivisions = v;
        }
        quadrature.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        let disk_radius = args.disk_radius.or(file.disk_radius).unwrap_or(DEFAULT_DISK_RADIUS);
        if !(disk_radius > 0.0 && disk_radius.is_finite()) {
            return Err(CliError::Usage(format!("invalid parameter `disk_radius`: {disk_radius}")));
        }
        let threads = args.threads.or(file.threads);
        if threads == Some(0) {
            return Err(CliError::Usage("invalid parameter `threads`: 0".into()));
        }
        Ok(Self {
            params: p,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            n_scenes: args.n_scenes.or(file.n_scenes).unwrap_or(DEFAULT_N_SCENES),
            relay_mode: args.relay_mode.or(file.relay_mode).unwrap_or(RelayModeArg::Approx).into(),
            region: match args.region.or(file.region).unwrap_or(RegionArg::Window) {
                RegionArg::Disk => SimRegion::Disk,
                RegionArg::Window => SimRegion::OriginWindow,
            },
            disk_radius,
            threads,
            format: args.format.or(file.format),
            out: args.out.clone(),
            quadrature,
        })
    }

    pub fn simulation(&self) -> SimulationConfig {
        let mut cfg = SimulationConfig::new(self.params, self.n_scenes, self.seed)
            .with_region(self.region)
            .with_relay_mode(self.relay_mode)
            .with_threads(self.threads);
        cfg.disk_radius = self.disk_radius;
        cfg
    }

    fn header(&self, command: &'static str) -> Header {
        Header {
            tool: TOOL_NAME,
            version: VERSION,
            command,
            seed: self.seed,
            params: self.params,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub params: ScenarioParams,
}

impl Header {
    fn csv_lines(&self, out: &mut String) {
        let p = &self.params;
        let lines: [(&str, String); 10] = [
            ("tool", self.tool.to_string()),
            ("version", self.version.to_string()),
            ("command", self.command.to_string()),
            ("seed", self.seed.to_string()),
            ("lambda_l", p.lambda_l.to_string()),
            ("mu", p.mu.to_string()),
            ("mu_v", p.mu_v.to_string()),
            ("gamma", p.gamma.to_string()),
            ("eta", p.eta.to_string()),
            ("speed", p.speed.to_string()),
        ];
        for (k, v) in lines {
            out.push_str(&format!("# {k}={v}\n"));
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResult {
    pub theorem1: f64,
    pub theorem2: f64,
    pub theorem2_error_bound: f64,
    pub road_fraction: f64,
    pub additive: f64,
    pub gamma_err_as_printed: f64,
    pub gamma_err_theorem1_consistent: f64,
    pub gain_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_display: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateResult {
    pub n_scenes: u64,
    pub relay_mode: RelayMode,
    pub region: SimRegion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disk_radius: Option<f64>,
    pub rsu: Option<EstimateSummary>,
    pub rsu_relay: Option<EstimateSummary>,
    pub ratio: Option<f64>,
    pub ratio_std_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateSummary {
    pub mean: f64,
    pub std_error: f64,
    pub covered: u64,
}

impl From<CoverageEstimate> for EstimateSummary {
    fn from(e: CoverageEstimate) -> Self {
        Self {
            mean: e.mean,
            std_error: e.std_error,
            covered: e.covered,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Document<'a, T: Serialize> {
    #[serde(flatten)]
    header: &'a Header,
    result: &'a T,
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_body(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn json_document<T: Serialize>(header: &Header, result: &T, format: OutputFormat) -> Result<String, CliError> {
    let doc = Document { header, result };
    let text = match format {
        OutputFormat::Ndjson => serde_json::to_string(&doc),
        _ => serde_json::to_string_pretty(&doc),
    }
    .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(text + "\n")
}

fn emit(cfg: &RunConfig, text: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => Ok(stdout.write_all(text)?),
    }
}

fn numerical(e: AnalyticError) -> CliError {
    CliError::Numerical(e.to_string())
}

fn cmd_eval(cfg: &RunConfig, printed_display: bool) -> Result<String, CliError> {
    let p = &cfg.params;
    let thm2 = theorem2_area_fraction(p, &cfg.quadrature).map_err(numerical)?;
    let gain_ratio = match relay_gain_ratio(p, &cfg.quadrature) {
        Ok(r) => Some(r),
        Err(AnalyticError::UndefinedRatio) => None,
        Err(e) => return Err(numerical(e)),
    };
    let printed = if printed_display {
        Some(theorem2_printed_display(p, &cfg.quadrature).map_err(numerical)?)
    } else {
        None
    };
    let r = EvalResult {
        theorem1: theorem1_area_fraction(p).value,
        theorem2: thm2.value,
        theorem2_error_bound: thm2.error_bound,
        road_fraction: road_area_fraction(p.lambda_l, p.eta).value,
        additive: additive_rsu_fraction(p),
        gamma_err_as_printed: additive_error_gamma(p, ErrorVariant::AsPrinted),
        gamma_err_theorem1_consistent: additive_error_gamma(p, ErrorVariant::Theorem1Consistent),
        gain_ratio,
        printed_display: printed,
    };
    let header = cfg.header("eval");
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Csv => {
            let mut out = String::new();
            header.csv_lines(&mut out);
            let mut cols = vec![
                "theorem1",
                "theorem2",
                "theorem2_error_bound",
                "road_fraction",
                "additive",
                "gamma_err_as_printed",
                "gamma_err_theorem1_consistent",
                "gain_ratio",
            ];
            let mut row = vec![
                r.theorem1.to_string(),
                r.theorem2.to_string(),
                r.theorem2_error_bound.to_string(),
                r.road_fraction.to_string(),
                r.additive.to_string(),
                r.gamma_err_as_printed.to_string(),
                r.gamma_err_theorem1_consistent.to_string(),
                opt(r.gain_ratio),
            ];
            if let Some(d) = r.printed_display {
                cols.push("printed_display");
                row.push(d.to_string());
            }
            out.push_str(&csv_body(&cols, &[row])?);
            Ok(out)
        }
        f => json_document(&header, &r, f),
    }
}

fn cmd_simulate(cfg: &RunConfig, mode: SimMode) -> Result<String, CliError> {
    let sim = cfg.simulation();
    let (rsu, rsu_relay, ratio) = match mode {
        SimMode::Rsu => (Some(estimate_area_fraction(&sim, CoverageMode::RsuOnly)), None, None),
        SimMode::Relay => (None, Some(estimate_area_fraction(&sim, CoverageMode::RsuPlusRelay)), None),
        SimMode::Paired => {
            let e = paired_gain_estimate(&sim);
            (Some(e.rsu), Some(e.rsu_relay), e.ratio)
        }
    };
    let r = SimulateResult {
        n_scenes: cfg.n_scenes,
        relay_mode: cfg.relay_mode,
        region: cfg.region,
        disk_radius: (cfg.region == SimRegion::Disk).then_some(cfg.disk_radius),
        rsu: rsu.map(Into::into),
        rsu_relay: rsu_relay.map(Into::into),
        ratio: ratio.map(|r| r.value),
        ratio_std_error: ratio.map(|r| r.std_error),
    };
    let header = cfg.header("simulate");
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Csv => {
            let mut out = String::new();
            header.csv_lines(&mut out);
            let relay = match cfg.relay_mode {
                RelayMode::ApproximateUniform => "approx",
                RelayMode::ExactVehicle => "exact",
            };
            let region = match cfg.region {
                SimRegion::Disk => "disk",
                SimRegion::OriginWindow => "window",
            };
            out.push_str(&format!("# n_scenes={}\n# relay_mode={relay}\n# region={region}\n", cfg.n_scenes));
            let row = vec![
                opt(r.rsu.map(|e| e.mean)),
                opt(r.rsu.map(|e| e.std_error)),
                opt(r.rsu_relay.map(|e| e.mean)),
                opt(r.rsu_relay.map(|e| e.std_error)),
                opt(r.ratio),
                opt(r.ratio_std_error),
            ];
            let cols = ["mc_rsu", "mc_rsu_se", "mc_rsu_relay", "mc_rsu_relay_se", "ratio", "ratio_se"];
            out.push_str(&csv_body(&cols, &[row])?);
            Ok(out)
        }
        f => json_document(&header, &r, f),
    }
}

/// Axis values in user units from either an explicit list or a range.
fn axis_values(values: &Option<Vec<String>>, range: (Option<f64>, Option<f64>, Option<f64>)) -> Result<Vec<f64>, CliError> {
    match (values, range) {
        (Some(list), _) => list
            .iter()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad axis value `{s}`"))))
            .collect(),
        (None, (Some(from), Some(to), Some(step))) => {
            if !(step > 0.0 && step.is_finite() && from.is_finite() && to.is_finite()) {
                return Err(CliError::Usage("range needs finite bounds and a positive step".into()));
            }
            if to < from {
                return Ok(Vec::new());
            }
            let n = ((to - from) / step + 1e-9).floor() as usize + 1;
            Ok((0..n).map(|i| from + i as f64 * step).collect())
        }
        _ => Err(CliError::Usage("sweep needs --values or --from/--to/--step".into())),
    }
}

fn axis_to_si(axis: SweepAxis, v: f64) -> f64 {
    match axis {
        SweepAxis::LambdaL | SweepAxis::Mu | SweepAxis::MuV => v * PER_KM,
        SweepAxis::Gamma | SweepAxis::Eta => v,
    }
}

#[derive(Debug, Clone, Serialize)]
struct SweepDocumentRow<'a> {
    /// Axis value in the units it was given in.
    value: f64,
    #[serde(flatten)]
    row: &'a SweepRow,
}

fn cmd_sweep(cfg: &RunConfig, axis: SweepAxis, user_values: &[f64]) -> Result<String, CliError> {
    let spec = SweepSpec {
        base: cfg.simulation(),
        axis,
        values: user_values.iter().map(|&v| axis_to_si(axis, v)).collect(),
        quadrature: cfg.quadrature,
    };
    let rows = run_sweep(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let header = cfg.header("sweep");
    match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out = String::new();
            header.csv_lines(&mut out);
            let units = match axis {
                SweepAxis::LambdaL | SweepAxis::Mu | SweepAxis::MuV => "per_km",
                SweepAxis::Gamma | SweepAxis::Eta => "m",
            };
            out.push_str(&format!("# n_scenes={}\n# axis_units={units}\n", cfg.n_scenes));
            let cols = [
                axis.name(),
                "mc_rsu",
                "mc_rsu_relay",
                "thm1",
                "thm2",
                "additive",
                "gamma_err",
                "ratio",
                "mc_rsu_se",
                "mc_rsu_relay_se",
                "mc_ratio",
                "mc_ratio_se",
                "seed",
                "thm2_ok",
            ];
            let table: Vec<Vec<String>> = rows
                .iter()
                .zip(user_values)
                .map(|(r, v)| {
                    vec![
                        v.to_string(),
                        r.mc.rsu.mean.to_string(),
                        r.mc.rsu_relay.mean.to_string(),
                        r.thm1.to_string(),
                        opt(r.thm2),
                        r.additive.to_string(),
                        r.gamma_err.to_string(),
                        opt(r.ratio),
                        r.mc.rsu.std_error.to_string(),
                        r.mc.rsu_relay.std_error.to_string(),
                        opt(r.mc.ratio.map(|x| x.value)),
                        opt(r.mc.ratio.map(|x| x.std_error)),
                        r.mc.rsu.seed.seed.to_string(),
                        r.thm2.is_some().to_string(),
                    ]
                })
                .collect();
            out.push_str(&csv_body(&cols, &table)?);
            Ok(out)
        }
        f => {
            let doc_rows: Vec<SweepDocumentRow> =
                rows.iter().zip(user_values).map(|(row, &value)| SweepDocumentRow { value, row }).collect();
            if f == OutputFormat::Ndjson {
                let mut out = serde_json::to_string(&header).map_err(|e| CliError::Io(e.to_string()))? + "\n";
                for r in &doc_rows {
                    out += &(serde_json::to_string(r).map_err(|e| CliError::Io(e.to_string()))? + "\n");
                }
                Ok(out)
            } else {
                #[derive(Serialize)]
                struct SweepResult<'a> {
                    axis: SweepAxis,
                    rows: &'a [SweepDocumentRow<'a>],
                }
                json_document(&header, &SweepResult { axis, rows: &doc_rows }, f)
            }
        }
    }
}

fn cmd_scene(cfg: &RunConfig, radius: f64, manhattan: bool) -> Result<Vec<u8>, CliError> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(CliError::Usage(format!("invalid parameter `radius`: {radius}")));
    }
    let format = match cfg.format.unwrap_or(OutputFormat::Ndjson) {
        OutputFormat::Ndjson => SceneFormat::Ndjson,
        OutputFormat::Csv => SceneFormat::Csv,
        OutputFormat::Json => return Err(CliError::Usage("scene output supports ndjson and csv".into())),
    };
    let layout = if manhattan { RoadLayout::Manhattan } else { RoadLayout::Isotropic };
    let scene_cfg = SceneConfig::new(cfg.params, SceneRegion::Disk { radius })
        .with_layout(layout)
        .with_relays(cfg.relay_mode)
        .with_vehicles(true);
    let scene = build_scene(&scene_cfg, RandomSeed::new(cfg.seed));
    let mut buf = Vec::new();
    export_scene(&scene, format, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(buf)
}

/// Executes a parsed command, writing to `--out` or `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval { common, printed_display } => {
            let cfg = RunConfig::resolve(common)?;
            emit(&cfg, cmd_eval(&cfg, *printed_display)?.as_bytes(), stdout)
        }
        Command::Simulate { common, mode } => {
            let cfg = RunConfig::resolve(common)?;
            emit(&cfg, cmd_simulate(&cfg, *mode)?.as_bytes(), stdout)
        }
        Command::Sweep {
            common,
            axis,
            values,
            from,
            to,
            step,
        } => {
            let cfg = RunConfig::resolve(common)?;
            let vals = axis_values(values, (*from, *to, *step))?;
            emit(&cfg, cmd_sweep(&cfg, *axis, &vals)?.as_bytes(), stdout)
        }
        Command::Scene {
            common,
            radius,
            manhattan,
        } => {
            let cfg = RunConfig::resolve(common)?;
            emit(&cfg, &cmd_scene(&cfg, *radius, *manhattan)?, stdout)
        }
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("loscov: {e}");
            e.exit_code()
        }
    }
}
