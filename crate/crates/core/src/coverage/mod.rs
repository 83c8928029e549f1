//! LOS segments, relay selection and origin coverage for a sampled scene.
//!
//! Positions on a line are abscissas in the frame of [`crate::geometry`]:
//! the foot point of each line sits at abscissa 0, so the origin is covered
//! by a segment on a line iff the line lies within `η/2` of the origin and
//! the segment's interval contains 0.

mod export;

pub use export::{
    export_scene, parse_scene_csv, parse_scene_ndjson, scene_records, ExportError, PerKmIntensities, SceneFormat,
    SceneRecord, SegmentRole, TOOL_NAME,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{CoverageRect, Line};
use crate::sampling::{
    chord_half_length, sample_lines_disk, sample_lines_manhattan, sample_los_extents,
    sample_points_on_line, RandomSeed, Role, ScenarioParams, SCENE_LEVEL,
};

/// RSU abscissas are sampled within `±RSU_WINDOW_MULTIPLIER · γ` of the
/// foot point in origin-window scenes. Half of it is the RSU's own reach,
/// the other half the reach of its relay.
pub const RSU_WINDOW_MULTIPLIER: f64 = 24.0;

/// A one-dimensional LOS interval `[anchor - left_extent, anchor + right_extent]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosSegment {
    pub line: Line,
    /// Index of `line` in the owning scene.
    pub line_index: usize,
    pub anchor: f64,
    pub left_extent: f64,
    pub right_extent: f64,
}

impl LosSegment {
    pub fn lo(&self) -> f64 {
        self.anchor - self.left_extent
    }

    pub fn hi(&self) -> f64 {
        self.anchor + self.right_extent
    }

    pub fn length(&self) -> f64 {
        self.left_extent + self.right_extent
    }

    pub fn contains(&self, s: f64) -> bool {
        self.lo() <= s && s <= self.hi()
    }

    /// The coverage rectangle `segment × [-η/2, η/2]`.
    pub fn rect(&self, eta: f64) -> CoverageRect {
        CoverageRect {
            line: self.line,
            lo: self.lo(),
            hi: self.hi(),
            half_width: eta / 2.0,
        }
    }

    pub fn covers_origin(&self, eta: f64) -> bool {
        self.line.distance_to_origin() <= eta / 2.0 && self.contains(0.0)
    }
}

/// How an RSU picks its relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayMode {
    /// A point uniform on the RSU's LOS segment (dense-vehicle limit).
    ApproximateUniform,
    /// A vehicle chosen uniformly among those inside the segment.
    ExactVehicle,
}

/// Road layout of the line process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoadLayout {
    #[default]
    Isotropic,
    Manhattan,
}

/// The region a scene is sampled on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SceneRegion {
    /// All lines meeting the disk; points on the chord inside the disk.
    Disk { radius: f64 },
    /// Only lines within `η/2` of the origin, with RSUs restricted to
    /// `±RSU_WINDOW_MULTIPLIER · γ` around each foot point.
    OriginWindow,
}

/// Everything needed to build a scene besides the seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConfig {
    pub params: ScenarioParams,
    pub layout: RoadLayout,
    pub region: SceneRegion,
    /// `None` builds an RSU-only scene.
    pub relay_mode: Option<RelayMode>,
    /// Sample vehicles even when the relay mode does not need them.
    pub sample_vehicles: bool,
}

impl SceneConfig {
    pub fn new(params: ScenarioParams, region: SceneRegion) -> Self {
        Self {
            params,
            layout: RoadLayout::Isotropic,
            region,
            relay_mode: None,
            sample_vehicles: false,
        }
    }

    pub fn with_relays(mut self, mode: RelayMode) -> Self {
        self.relay_mode = Some(mode);
        self
    }

    pub fn with_layout(mut self, layout: RoadLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn with_vehicles(mut self, yes: bool) -> Self {
        self.sample_vehicles = yes;
        self
    }

    fn needs_vehicles(&self) -> bool {
        self.sample_vehicles || self.relay_mode == Some(RelayMode::ExactVehicle)
    }
}

/// A selected relay: its position and the RSU segment it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayAnchor {
    pub line_index: usize,
    pub abscissa: f64,
    /// Index into [`Scene::rsu_segments`].
    pub parent: usize,
}

/// One sampled realization of roads, RSUs, vehicles and relays.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub params: ScenarioParams,
    pub seed: RandomSeed,
    pub region: SceneRegion,
    pub relay_mode: Option<RelayMode>,
    pub lines: Vec<Line>,
    /// Sorted RSU abscissas per line.
    pub rsus: Vec<Vec<f64>>,
    /// Sorted vehicle abscissas per line; empty when vehicles were skipped.
    pub vehicles: Vec<Vec<f64>>,
    /// One segment per RSU, grouped by line in line order.
    pub rsu_segments: Vec<LosSegment>,
    pub relay_anchors: Vec<RelayAnchor>,
    /// `relay_segments[k]` belongs to `relay_anchors[k]`.
    pub relay_segments: Vec<LosSegment>,
}

impl Scene {
    pub fn rsu_covers_origin(&self) -> bool {
        origin_covered(&self.rsu_segments, self.params.eta)
    }

    pub fn relay_covers_origin(&self) -> bool {
        origin_covered(&self.relay_segments, self.params.eta)
    }

    /// Coverage of the origin by the union of RSU and relay segments.
    pub fn union_covers_origin(&self) -> bool {
        self.rsu_covers_origin() || self.relay_covers_origin()
    }

    pub fn rsu_count(&self) -> usize {
        self.rsus.iter().map(Vec::len).sum()
    }

    pub fn vehicle_count(&self) -> usize {
        self.vehicles.iter().map(Vec::len).sum()
    }

    /// Every relay lies inside the segment of its parent RSU, on the same line.
    pub fn relays_within_parents(&self) -> bool {
        self.relay_anchors.iter().all(|r| {
            let parent = &self.rsu_segments[r.parent];
            parent.line_index == r.line_index && parent.contains(r.abscissa)
        })
    }

    /// Every relay sits exactly on a vehicle of its line.
    pub fn relays_on_vehicles(&self) -> bool {
        self.relay_anchors.iter().all(|r| {
            self.vehicles
                .get(r.line_index)
                .is_some_and(|v| v.binary_search_by(|x| x.total_cmp(&r.abscissa)).is_ok())
        })
    }
}

/// Abscissa interval on which points of `line` are sampled.
fn point_window(config: &SceneConfig, line: &Line) -> (f64, f64) {
    match config.region {
        SceneRegion::Disk { radius } => {
            let c = chord_half_length(line, radius);
            (-c, c)
        }
        SceneRegion::OriginWindow => {
            let c = RSU_WINDOW_MULTIPLIER * config.params.gamma;
            (-c, c)
        }
    }
}

/// Samples the lines of a scene.
pub fn sample_scene_lines(config: &SceneConfig, seed: &RandomSeed) -> Vec<Line> {
    let radius = match config.region {
        SceneRegion::Disk { radius } => radius,
        // lines within η/2 of the origin are the lines meeting B(0, η/2)
        SceneRegion::OriginWindow => config.params.eta / 2.0,
    };
    if radius <= 0.0 {
        return Vec::new();
    }
    let mut rng = seed.rng(SCENE_LEVEL, Role::Lines);
    match config.layout {
        RoadLayout::Isotropic => sample_lines_disk(&config.params, radius, &mut rng),
        RoadLayout::Manhattan => sample_lines_manhattan(&config.params, radius, &mut rng),
    }
}

/// One segment per RSU with independent `(W, V)`. `rsus[i]` are the RSU
/// abscissas on `lines[i]`.
pub fn build_rsu_segments(lines: &[Line], rsus: &[Vec<f64>], gamma: f64, seed: &RandomSeed) -> Vec<LosSegment> {
    build_segments(lines, rsus, gamma, seed, Role::RsuLos)
}

fn build_segments(
    lines: &[Line],
    anchors: &[Vec<f64>],
    gamma: f64,
    seed: &RandomSeed,
    role: Role,
) -> Vec<LosSegment> {
    let mut out = Vec::with_capacity(anchors.iter().map(Vec::len).sum());
    for (i, (line, points)) in lines.iter().zip(anchors).enumerate() {
        if points.is_empty() {
            continue;
        }
        let mut rng = seed.rng(i as u64, role);
        for &anchor in points {
            let (w, v) = sample_los_extents(gamma, &mut rng);
            out.push(LosSegment {
                line: *line,
                line_index: i,
                anchor,
                left_extent: w,
                right_extent: v,
            });
        }
    }
    out
}

/// Picks at most one relay per RSU segment.
///
/// One uniform draw is consumed per RSU in either mode, so both modes see
/// the same random numbers. In exact mode an RSU whose segment holds no
/// vehicle gets no relay, and two RSUs may pick the same vehicle.
pub fn select_relays(
    rsu_segments: &[LosSegment],
    vehicles: &[Vec<f64>],
    mode: RelayMode,
    seed: &RandomSeed,
) -> Vec<RelayAnchor> {
    let mut out = Vec::with_capacity(rsu_segments.len());
    let mut rng_line = usize::MAX;
    let mut rng = seed.rng(SCENE_LEVEL, Role::Relay);
    for (parent, seg) in rsu_segments.iter().enumerate() {
        if seg.line_index != rng_line {
            rng_line = seg.line_index;
            rng = seed.rng(seg.line_index as u64, Role::Relay);
        }
        let u: f64 = rng.random();
        let abscissa = match mode {
            RelayMode::ApproximateUniform => Some(seg.lo() + u * seg.length()),
            RelayMode::ExactVehicle => {
                let on_line = vehicles.get(seg.line_index).map_or(&[][..], Vec::as_slice);
                let start = on_line.partition_point(|&x| x < seg.lo());
                let end = on_line.partition_point(|&x| x <= seg.hi());
                let n = end.saturating_sub(start);
                if n == 0 {
                    None
                } else {
                    let k = ((u * n as f64) as usize).min(n - 1);
                    Some(on_line[start + k])
                }
            }
        };
        if let Some(abscissa) = abscissa {
            // u * length can round just past hi
            let abscissa = abscissa.clamp(seg.lo(), seg.hi());
            out.push(RelayAnchor {
                line_index: seg.line_index,
                abscissa,
                parent,
            });
        }
    }
    out
}

/// One segment per relay with fresh `(W', V')`, unclipped.
///
/// Extents are drawn per parent RSU, including RSUs without a relay, so a
/// relay's extents do not depend on whether other RSUs found relays.
pub fn build_relay_segments(
    lines: &[Line],
    rsu_segments: &[LosSegment],
    anchors: &[RelayAnchor],
    gamma: f64,
    seed: &RandomSeed,
) -> Vec<LosSegment> {
    let mut extents = Vec::with_capacity(rsu_segments.len());
    let mut rng_line = usize::MAX;
    let mut rng = seed.rng(SCENE_LEVEL, Role::RelayLos);
    for seg in rsu_segments {
        if seg.line_index != rng_line {
            rng_line = seg.line_index;
            rng = seed.rng(seg.line_index as u64, Role::RelayLos);
        }
        extents.push(sample_los_extents(gamma, &mut rng));
    }
    anchors
        .iter()
        .map(|a| {
            let (w, v) = extents[a.parent];
            LosSegment {
                line: lines[a.line_index],
                line_index: a.line_index,
                anchor: a.abscissa,
                left_extent: w,
                right_extent: v,
            }
        })
        .collect()
}

/// True iff some segment's coverage rectangle contains the origin.
pub fn origin_covered(segments: &[LosSegment], eta: f64) -> bool {
    segments.iter().any(|s| s.covers_origin(eta))
}

/// Samples a full scene from `config` and `seed`.
pub fn build_scene(config: &SceneConfig, seed: RandomSeed) -> Scene {
    let params = config.params;
    let lines = sample_scene_lines(config, &seed);

    let rsus: Vec<Vec<f64>> = lines
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let (a, b) = point_window(config, line);
            let mut rng = seed.rng(i as u64, Role::Rsu);
            sample_points_on_line(params.mu, a, b, &mut rng)
        })
        .collect();
    let rsu_segments = build_rsu_segments(&lines, &rsus, params.gamma, &seed);

    let vehicles: Vec<Vec<f64>> = if config.needs_vehicles() {
        lines
            .iter()
            .enumerate()
            .map(|(i, line)| {
                let (a, b) = vehicle_window(config, line, i, &rsu_segments);
                let mut rng = seed.rng(i as u64, Role::Vehicle);
                if a <= b {
                    sample_points_on_line(params.mu_v, a, b, &mut rng)
                } else {
                    Vec::new()
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let (relay_anchors, relay_segments) = match config.relay_mode {
        Some(mode) => {
            let anchors = select_relays(&rsu_segments, &vehicles, mode, &seed);
            let segs = build_relay_segments(&lines, &rsu_segments, &anchors, params.gamma, &seed);
            (anchors, segs)
        }
        None => (Vec::new(), Vec::new()),
    };

    Scene {
        params,
        seed,
        region: config.region,
        relay_mode: config.relay_mode,
        lines,
        rsus,
        vehicles,
        rsu_segments,
        relay_anchors,
        relay_segments,
    }
}

/// Window for vehicles: the chord in disk scenes; in window scenes the hull
/// of the RSU segments on the line, which is all relay selection can see.
/// An empty window is returned as `(1, 0)`.
fn vehicle_window(config: &SceneConfig, line: &Line, index: usize, segments: &[LosSegment]) -> (f64, f64) {
    match config.region {
        SceneRegion::Disk { .. } => point_window(config, line),
        SceneRegion::OriginWindow => segments
            .iter()
            .filter(|s| s.line_index == index)
            .fold((1.0, 0.0), |(a, b): (f64, f64), s| {
                if a > b {
                    (s.lo(), s.hi())
                } else {
                    (a.min(s.lo()), b.max(s.hi()))
                }
            }),
    }
}
