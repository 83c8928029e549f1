//! Scene export as newline-delimited JSON or flat CSV.
//!
//! Both formats start with a header carrying the tool version, the seed and
//! the scenario parameters. NDJSON writes it as a `{"kind":"header",...}`
//! record; CSV writes it as `# key=value` comment lines above the table.

use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{RelayMode, Scene, SceneRegion};
use crate::geometry::{foot_point, LineFrame};
use crate::sampling::{RandomSeed, ScenarioParams, PER_KM};

pub const TOOL_NAME: &str = "loscov";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unsupported scene format `{0}` (expected ndjson or csv)")]
    UnsupportedFormat(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed scene document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneFormat {
    Ndjson,
    Csv,
}

impl FromStr for SceneFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ndjson" => Ok(Self::Ndjson),
            "csv" => Ok(Self::Csv),
            other => Err(ExportError::UnsupportedFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentRole {
    Rsu,
    Relay,
}

impl SegmentRole {
    fn as_str(self) -> &'static str {
        match self {
            Self::Rsu => "rsu",
            Self::Relay => "relay",
        }
    }
}

/// Intensities in the per-km units used by presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerKmIntensities {
    pub lambda_l: f64,
    pub mu: f64,
    pub mu_v: f64,
}

/// One record of an exported scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneRecord {
    Header {
        tool: String,
        version: String,
        seed: RandomSeed,
        region: SceneRegion,
        relay_mode: Option<RelayMode>,
        params: ScenarioParams,
        per_km: PerKmIntensities,
    },
    Line {
        index: usize,
        offset: f64,
        angle: f64,
        foot_x: f64,
        foot_y: f64,
    },
    Rsu {
        line: usize,
        s: f64,
        x: f64,
        y: f64,
    },
    Vehicle {
        line: usize,
        s: f64,
        x: f64,
        y: f64,
    },
    Relay {
        line: usize,
        parent: usize,
        s: f64,
        x: f64,
        y: f64,
    },
    Segment {
        role: SegmentRole,
        index: usize,
        line: usize,
        anchor: f64,
        lo: f64,
        hi: f64,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    },
    Rect {
        role: SegmentRole,
        index: usize,
        line: usize,
        corners: [[f64; 2]; 4],
    },
}

/// Flattens a scene into records: header, lines, points, segments, rects.
pub fn scene_records(scene: &Scene) -> Vec<SceneRecord> {
    let p = scene.params;
    let mut out = vec![SceneRecord::Header {
        tool: TOOL_NAME.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: scene.seed,
        region: scene.region,
        relay_mode: scene.relay_mode,
        params: p,
        per_km: PerKmIntensities {
            lambda_l: p.lambda_l / PER_KM,
            mu: p.mu / PER_KM,
            mu_v: p.mu_v / PER_KM,
        },
    }];

    let frames: Vec<LineFrame> = scene.lines.iter().map(|l| l.frame()).collect();
    for (index, line) in scene.lines.iter().enumerate() {
        let foot = foot_point(line);
        out.push(SceneRecord::Line {
            index,
            offset: line.offset(),
            angle: line.angle(),
            foot_x: foot.x,
            foot_y: foot.y,
        });
    }
    for (line, pts) in scene.rsus.iter().enumerate() {
        for &s in pts {
            let q = frames[line].to_plane(s);
            out.push(SceneRecord::Rsu { line, s, x: q.x, y: q.y });
        }
    }
    for (line, pts) in scene.vehicles.iter().enumerate() {
        for &s in pts {
            let q = frames[line].to_plane(s);
            out.push(SceneRecord::Vehicle { line, s, x: q.x, y: q.y });
        }
    }
    for r in &scene.relay_anchors {
        let q = frames[r.line_index].to_plane(r.abscissa);
        out.push(SceneRecord::Relay {
            line: r.line_index,
            parent: r.parent,
            s: r.abscissa,
            x: q.x,
            y: q.y,
        });
    }
    let groups = [
        (SegmentRole::Rsu, &scene.rsu_segments),
        (SegmentRole::Relay, &scene.relay_segments),
    ];
    for (role, segs) in groups {
        for (index, seg) in segs.iter().enumerate() {
            let frame = &frames[seg.line_index];
            let a = frame.to_plane(seg.lo());
            let b = frame.to_plane(seg.hi());
            out.push(SceneRecord::Segment {
                role,
                index,
                line: seg.line_index,
                anchor: seg.anchor,
                lo: seg.lo(),
                hi: seg.hi(),
                x0: a.x,
                y0: a.y,
                x1: b.x,
                y1: b.y,
            });
        }
    }
    for (role, segs) in groups {
        for (index, seg) in segs.iter().enumerate() {
            let corners = seg.rect(p.eta).corners().map(|c| [c.x, c.y]);
            out.push(SceneRecord::Rect {
                role,
                index,
                line: seg.line_index,
                corners,
            });
        }
    }
    out
}

/// Writes `scene` to `out` in the given format.
pub fn export_scene<W: Write>(scene: &Scene, format: SceneFormat, out: W) -> Result<(), ExportError> {
    let records = scene_records(scene);
    match format {
        SceneFormat::Ndjson => write_ndjson(&records, out),
        SceneFormat::Csv => write_csv(&records, out),
    }
}

fn write_ndjson<W: Write>(records: &[SceneRecord], mut out: W) -> Result<(), ExportError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn parse_scene_ndjson<R: BufRead>(input: R) -> Result<Vec<SceneRecord>, ExportError> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Flat CSV row; unused columns stay empty.
#[derive(Debug, Default, Serialize, Deserialize)]
struct CsvRow {
    kind: String,
    role: Option<String>,
    index: Option<usize>,
    line: Option<usize>,
    parent: Option<usize>,
    s: Option<f64>,
    anchor: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    offset: Option<f64>,
    angle: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    x1: Option<f64>,
    y1: Option<f64>,
    x2: Option<f64>,
    y2: Option<f64>,
    x3: Option<f64>,
    y3: Option<f64>,
}

fn point_row(kind: &str, line: usize, parent: Option<usize>, s: f64, x: f64, y: f64) -> CsvRow {
    CsvRow {
        kind: kind.into(),
        line: Some(line),
        parent,
        s: Some(s),
        x0: Some(x),
        y0: Some(y),
        ..Default::default()
    }
}

fn write_csv<W: Write>(records: &[SceneRecord], mut out: W) -> Result<(), ExportError> {
    for r in records {
        if let SceneRecord::Header {
            tool,
            version,
            seed,
            region,
            relay_mode,
            params,
            per_km,
        } = r
        {
            writeln!(out, "# tool={tool}")?;
            writeln!(out, "# version={version}")?;
            writeln!(out, "# seed={}", seed.seed)?;
            writeln!(out, "# stream={}", seed.stream)?;
            match region {
                SceneRegion::Disk { radius } => {
                    writeln!(out, "# region=disk")?;
                    writeln!(out, "# disk_radius={radius}")?;
                }
                SceneRegion::OriginWindow => writeln!(out, "# region=window")?,
            }
            let mode = match relay_mode {
                None => "none",
                Some(RelayMode::ApproximateUniform) => "approx",
                Some(RelayMode::ExactVehicle) => "exact",
            };
            writeln!(out, "# relay_mode={mode}")?;
            writeln!(out, "# lambda_l={}", params.lambda_l)?;
            writeln!(out, "# mu={}", params.mu)?;
            writeln!(out, "# mu_v={}", params.mu_v)?;
            writeln!(out, "# gamma={}", params.gamma)?;
            writeln!(out, "# eta={}", params.eta)?;
            writeln!(out, "# speed={}", params.speed)?;
            writeln!(out, "# lambda_l_per_km={}", per_km.lambda_l)?;
            writeln!(out, "# mu_per_km={}", per_km.mu)?;
            writeln!(out, "# mu_v_per_km={}", per_km.mu_v)?;
        }
    }
    let mut w = csv::Writer::from_writer(&mut out);
    for r in records {
        let row = match *r {
            SceneRecord::Header { .. } => continue,
            SceneRecord::Line {
                index,
                offset,
                angle,
                foot_x,
                foot_y,
            } => CsvRow {
                kind: "line".into(),
                index: Some(index),
                offset: Some(offset),
                angle: Some(angle),
                x0: Some(foot_x),
                y0: Some(foot_y),
                ..Default::default()
            },
            SceneRecord::Rsu { line, s, x, y } => point_row("rsu", line, None, s, x, y),
            SceneRecord::Vehicle { line, s, x, y } => point_row("vehicle", line, None, s, x, y),
            SceneRecord::Relay { line, parent, s, x, y } => point_row("relay", line, Some(parent), s, x, y),
            SceneRecord::Segment {
                role,
                index,
                line,
                anchor,
                lo,
                hi,
                x0,
                y0,
                x1,
                y1,
            } => CsvRow {
                kind: "segment".into(),
                role: Some(role.as_str().into()),
                index: Some(index),
                line: Some(line),
                anchor: Some(anchor),
                lo: Some(lo),
                hi: Some(hi),
                x0: Some(x0),
                y0: Some(y0),
                x1: Some(x1),
                y1: Some(y1),
                ..Default::default()
            },
            SceneRecord::Rect {
                role,
                index,
                line,
                corners,
            } => CsvRow {
                kind: "rect".into(),
                role: Some(role.as_str().into()),
                index: Some(index),
                line: Some(line),
                x0: Some(corners[0][0]),
                y0: Some(corners[0][1]),
                x1: Some(corners[1][0]),
                y1: Some(corners[1][1]),
                x2: Some(corners[2][0]),
                y2: Some(corners[2][1]),
                x3: Some(corners[3][0]),
                y3: Some(corners[3][1]),
                ..Default::default()
            },
        };
        w.serialize(row)?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

fn need<T>(v: Option<T>, kind: &str, field: &str) -> Result<T, ExportError> {
    v.ok_or_else(|| ExportError::Malformed(format!("{kind} row missing `{field}`")))
}

fn parse_role(role: Option<String>) -> Result<SegmentRole, ExportError> {
    match role.as_deref() {
        Some("rsu") => Ok(SegmentRole::Rsu),
        Some("relay") => Ok(SegmentRole::Relay),
        other => Err(ExportError::Malformed(format!("bad segment role {other:?}"))),
    }
}

fn parse_csv_header(lines: &[(String, String)]) -> Result<SceneRecord, ExportError> {
    let get = |k: &str| {
        lines
            .iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| ExportError::Malformed(format!("header missing `{k}`")))
    };
    let num = |k: &str| -> Result<f64, ExportError> {
        get(k)?
            .parse()
            .map_err(|_| ExportError::Malformed(format!("header `{k}` is not a number")))
    };
    let int = |k: &str| -> Result<u64, ExportError> {
        get(k)?
            .parse()
            .map_err(|_| ExportError::Malformed(format!("header `{k}` is not an integer")))
    };
    let region = match get("region")? {
        "disk" => SceneRegion::Disk {
            radius: num("disk_radius")?,
        },
        "window" => SceneRegion::OriginWindow,
        other => return Err(ExportError::Malformed(format!("unknown region `{other}`"))),
    };
    let relay_mode = match get("relay_mode")? {
        "none" => None,
        "approx" => Some(RelayMode::ApproximateUniform),
        "exact" => Some(RelayMode::ExactVehicle),
        other => return Err(ExportError::Malformed(format!("unknown relay mode `{other}`"))),
    };
    Ok(SceneRecord::Header {
        tool: get("tool")?.to_string(),
        version: get("version")?.to_string(),
        seed: RandomSeed {
            seed: int("seed")?,
            stream: int("stream")?,
        },
        region,
        relay_mode,
        params: ScenarioParams {
            lambda_l: num("lambda_l")?,
            mu: num("mu")?,
            mu_v: num("mu_v")?,
            gamma: num("gamma")?,
            eta: num("eta")?,
            speed: num("speed")?,
        },
        per_km: PerKmIntensities {
            lambda_l: num("lambda_l_per_km")?,
            mu: num("mu_per_km")?,
            mu_v: num("mu_v_per_km")?,
        },
    })
}

pub fn parse_scene_csv<R: BufRead>(input: R) -> Result<Vec<SceneRecord>, ExportError> {
    let mut header = Vec::new();
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once('=')
                .ok_or_else(|| ExportError::Malformed(format!("bad header line `{line}`")))?;
            header.push((k.to_string(), v.to_string()));
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut out = vec![parse_csv_header(&header)?];
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    for row in reader.deserialize::<CsvRow>() {
        let row = row?;
        let k = row.kind.as_str();
        let rec = match k {
            "line" => SceneRecord::Line {
                index: need(row.index, k, "index")?,
                offset: need(row.offset, k, "offset")?,
                angle: need(row.angle, k, "angle")?,
                foot_x: need(row.x0, k, "x0")?,
                foot_y: need(row.y0, k, "y0")?,
            },
            "rsu" => SceneRecord::Rsu {
                line: need(row.line, k, "line")?,
                s: need(row.s, k, "s")?,
                x: need(row.x0, k, "x0")?,
                y: need(row.y0, k, "y0")?,
            },
            "vehicle" => SceneRecord::Vehicle {
                line: need(row.line, k, "line")?,
                s: need(row.s, k, "s")?,
                x: need(row.x0, k, "x0")?,
                y: need(row.y0, k, "y0")?,
            },
            "relay" => SceneRecord::Relay {
                line: need(row.line, k, "line")?,
                parent: need(row.parent, k, "parent")?,
                s: need(row.s, k, "s")?,
                x: need(row.x0, k, "x0")?,
                y: need(row.y0, k, "y0")?,
            },
            "segment" => SceneRecord::Segment {
                role: parse_role(row.role)?,
                index: need(row.index, k, "index")?,
                line: need(row.line, k, "line")?,
                anchor: need(row.anchor, k, "anchor")?,
                lo: need(row.lo, k, "lo")?,
                hi: need(row.hi, k, "hi")?,
                x0: need(row.x0, k, "x0")?,
                y0: need(row.y0, k, "y0")?,
                x1: need(row.x1, k, "x1")?,
                y1: need(row.y1, k, "y1")?,
            },
            "rect" => SceneRecord::Rect {
                role: parse_role(row.role)?,
                index: need(row.index, k, "index")?,
                line: need(row.line, k, "line")?,
                corners: [
                    [need(row.x0, k, "x0")?, need(row.y0, k, "y0")?],
                    [need(row.x1, k, "x1")?, need(row.y1, k, "y1")?],
                    [need(row.x2, k, "x2")?, need(row.y2, k, "y2")?],
                    [need(row.x3, k, "x3")?, need(row.y3, k, "y3")?],
                ],
            },
            other => return Err(ExportError::Malformed(format!("unknown record kind `{other}`"))),
        };
        out.push(rec);
    }
    Ok(out)
}
