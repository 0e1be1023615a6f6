//! Motion-capture traces: parsing, base-frame alignment and LED repair.
//!
//! Trace files are flat CSV with the header `time,led_id,x,y,z,visible`,
//! one row per marker sample, coordinates in metres and `visible` in {0, 1}.
//! Rows sharing a timestamp form one frame.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{PointMass, ShapeTrace, TraceSample, DEFAULT_LED_MASS};

pub const TRACE_HEADER: [&str; 6] = ["time", "led_id", "x", "y", "z", "visible"];

/// Height of the coordinate-axis LEDs above the robot LEDs (m).
pub const DEFAULT_VERTICAL_OFFSET: f64 = 0.11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub led_id: u32,
    pub position: [f64; 3],
    pub visible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFrame {
    pub time: f64,
    pub markers: Vec<Marker>,
}

impl RawFrame {
    pub fn marker(&self, led_id: u32) -> Option<&Marker> {
        self.markers.iter().find(|m| m.led_id == led_id)
    }

    fn visible_position(&self, led_id: u32) -> Option<Vector3<f64>> {
        self.marker(led_id)
            .filter(|m| m.visible)
            .map(|m| Vector3::from(m.position))
    }
}

fn default_vertical_offset() -> f64 {
    DEFAULT_VERTICAL_OFFSET
}

fn default_led_mass() -> f64 {
    DEFAULT_LED_MASS
}

/// How to turn one recorded frame into a [`ShapeTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    /// Origin LED, LED on the +z (growth) axis, LED on the +x side.
    pub axis_led_ids: [u32; 3],
    /// Robot LEDs ordered from base to tip.
    pub robot_led_ids: Vec<u32>,
    /// LED marking the last point of support. Defaults to the first robot LED.
    #[serde(default)]
    pub base_led_id: Option<u32>,
    /// Subtracted from every aligned height (m).
    #[serde(default = "default_vertical_offset")]
    pub vertical_offset: f64,
    /// Mass of each robot LED with its cable, placed at the LED (kg).
    #[serde(default = "default_led_mass")]
    pub led_mass: f64,
    /// Additional concentrated masses, e.g. a microdriver.
    #[serde(default)]
    pub point_masses: Vec<PointMass>,
    /// Additional line densities spread along every segment (kg/m).
    #[serde(default)]
    pub distributed_masses: Vec<f64>,
}

impl FrameConfig {
    pub fn new(axis_led_ids: [u32; 3], robot_led_ids: Vec<u32>) -> Self {
        FrameConfig {
            axis_led_ids,
            robot_led_ids,
            base_led_id: None,
            vertical_offset: DEFAULT_VERTICAL_OFFSET,
            led_mass: DEFAULT_LED_MASS,
            point_masses: Vec::new(),
            distributed_masses: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b, c] = self.axis_led_ids;
        if a == b || b == c || a == c {
            return Err(Error::config("frame.axis_led_ids", "axis LED ids must be distinct"));
        }
        if self.robot_led_ids.len() < 2 {
            return Err(Error::config(
                "frame.robot_led_ids",
                "at least two robot LEDs are required",
            ));
        }
        if !self.vertical_offset.is_finite() {
            return Err(Error::config("frame.vertical_offset", "must be finite"));
        }
        if !(self.led_mass.is_finite() && self.led_mass >= 0.0) {
            return Err(Error::config("frame.led_mass", "must be non-negative"));
        }
        for (i, pm) in self.point_masses.iter().enumerate() {
            if !(pm.mass.is_finite() && pm.mass >= 0.0 && pm.arm.is_finite()) {
                return Err(Error::config(
                    format!("frame.point_masses[{i}]"),
                    "mass must be non-negative and arm finite",
                ));
            }
        }
        for (i, &ld) in self.distributed_masses.iter().enumerate() {
            if !(ld.is_finite() && ld >= 0.0) {
                return Err(Error::config(
                    format!("frame.distributed_masses[{i}]"),
                    "must be non-negative",
                ));
            }
        }
        Ok(())
    }
}

fn parse_field<T: FromStr>(field: &str, name: &str, line: u64) -> Result<T> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {name} `{field}`"),
    })
}

/// Reads trace CSV into frames sorted by time. Marker order within a frame
/// follows the file.
pub fn parse_trace<R: Read>(reader: R) -> Result<Vec<RawFrame>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = csv.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(e, 1))?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    if header.len() != TRACE_HEADER.len() || header.iter().zip(TRACE_HEADER).any(|(a, b)| a != b)
    {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                TRACE_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut rows: Vec<(u64, f64, Marker)> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != TRACE_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected 6 fields, found {}", rec.len()),
            });
        }
        let time: f64 = parse_field(&rec[0], "time", line)?;
        let led_id: u32 = parse_field(&rec[1], "led_id", line)?;
        let mut position = [0.0_f64; 3];
        for (k, name) in ["x", "y", "z"].iter().enumerate() {
            position[k] = parse_field(&rec[2 + k], name, line)?;
        }
        if !time.is_finite() || position.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                message: "time and coordinates must be finite".into(),
            });
        }
        let visible = match &rec[5] {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("invalid visible flag `{other}` (expected 0 or 1)"),
                })
            }
        };
        rows.push((
            line,
            time,
            Marker {
                led_id,
                position,
                visible,
            },
        ));
    }

    rows.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut frames: Vec<RawFrame> = Vec::new();
    let mut seen: HashMap<u32, u64> = HashMap::new();
    for (line, time, marker) in rows {
        if frames.last().is_none_or(|f| f.time != time) {
            frames.push(RawFrame {
                time,
                markers: Vec::new(),
            });
            seen.clear();
        }
        if let Some(first) = seen.insert(marker.led_id, line) {
            return Err(Error::Parse {
                line,
                message: format!(
                    "duplicate led_id {} at time {time} (first on line {first})",
                    marker.led_id
                ),
            });
        }
        frames.last_mut().expect("frame pushed").markers.push(marker);
    }
    Ok(frames)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> Error {
    let line = err.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        message: err.to_string(),
    }
}

pub fn read_trace_file(path: impl AsRef<Path>) -> Result<Vec<RawFrame>> {
    parse_trace(File::open(path)?)
}

/// Writes frames in the trace CSV format. Numbers use the shortest
/// representation that parses back to the same value.
pub fn write_trace<W: Write>(frames: &[RawFrame], mut writer: W) -> Result<()> {
    writeln!(writer, "{}", TRACE_HEADER.join(","))?;
    for frame in frames {
        for m in &frame.markers {
            writeln!(
                writer,
                "{},{},{},{},{},{}",
                frame.time,
                m.led_id,
                m.position[0],
                m.position[1],
                m.position[2],
                u8::from(m.visible)
            )?;
        }
    }
    Ok(())
}

/// Picks the instant of interest by frame index or by timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameSelector {
    Index(usize),
    /// The frame whose timestamp is nearest (earlier on ties).
    Time(f64),
}

impl FrameSelector {
    pub fn resolve(&self, frames: &[RawFrame]) -> Result<usize> {
        if frames.is_empty() {
            return Err(Error::domain("the trace contains no frames"));
        }
        match *self {
            FrameSelector::Index(i) if i < frames.len() => Ok(i),
            FrameSelector::Index(i) => Err(Error::domain(format!(
                "frame index {i} out of range (trace has {} frames)",
                frames.len()
            ))),
            FrameSelector::Time(t) => {
                let mut best = 0;
                for (i, f) in frames.iter().enumerate() {
                    if (f.time - t).abs() < (frames[best].time - t).abs() {
                        best = i;
                    }
                }
                Ok(best)
            }
        }
    }
}

impl FromStr for FrameSelector {
    type Err = Error;

    /// `12` selects frame index 12; `t=3.5` selects the frame nearest 3.5 s.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(t) = s.strip_prefix("t=") {
            let t: f64 = t
                .parse()
                .map_err(|_| Error::domain(format!("invalid frame time `{t}`")))?;
            if !t.is_finite() {
                return Err(Error::domain("frame time must be finite"));
            }
            Ok(FrameSelector::Time(t))
        } else {
            s.parse()
                .map(FrameSelector::Index)
                .map_err(|_| Error::domain(format!("invalid frame selector `{s}`")))
        }
    }
}

impl fmt::Display for FrameSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameSelector::Index(i) => write!(f, "{i}"),
            FrameSelector::Time(t) => write!(f, "t={t}"),
        }
    }
}

/// Right-handed frame built from three markers: origin, a point on +z and a
/// point fixing the x-z plane on the +x side. `y = z × x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseFrame {
    origin: Vector3<f64>,
    /// Rows are the x, y and z axes expressed in room coordinates.
    rotation: Matrix3<f64>,
}

impl BaseFrame {
    pub fn from_markers(origin: [f64; 3], on_z: [f64; 3], in_xz: [f64; 3]) -> Result<Self> {
        let origin = Vector3::from(origin);
        let z = Vector3::from(on_z) - origin;
        let z_norm = z.norm();
        if !(z_norm > 0.0) {
            return Err(Error::Alignment("z-axis LED coincides with the origin LED".into()));
        }
        let z = z / z_norm;
        let planar = Vector3::from(in_xz) - origin;
        let x = planar - z * planar.dot(&z);
        let x_norm = x.norm();
        if !(x_norm > 1e-9 * planar.norm().max(f64::MIN_POSITIVE)) {
            return Err(Error::Alignment("axis LEDs are collinear".into()));
        }
        let x = x / x_norm;
        let y = z.cross(&x);
        Ok(BaseFrame {
            origin,
            rotation: Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]),
        })
    }

    pub fn to_local(&self, room: [f64; 3]) -> [f64; 3] {
        (self.rotation * (Vector3::from(room) - self.origin)).into()
    }

    pub fn to_room(&self, local: [f64; 3]) -> [f64; 3] {
        (self.rotation.transpose() * Vector3::from(local) + self.origin).into()
    }
}

/// Aligns frame `frame_index` to the base frame and assembles a shape trace.
///
/// Robot LEDs that are hidden or missing are filled by linear interpolation
/// in LED order between the nearest visible neighbours, or extrapolated from
/// the nearest two visible LEDs at either end. Each robot LED carries
/// `led_mass` at its own position.
pub fn align_and_clean(
    frames: &[RawFrame],
    config: &FrameConfig,
    frame_index: usize,
) -> Result<ShapeTrace> {
    config.validate()?;
    let frame = frames.get(frame_index).ok_or_else(|| {
        Error::domain(format!(
            "frame index {frame_index} out of range (trace has {} frames)",
            frames.len()
        ))
    })?;

    let axis: Vec<[f64; 3]> = config
        .axis_led_ids
        .iter()
        .map(|&id| {
            frame.visible_position(id).map(Into::into).ok_or_else(|| {
                Error::Alignment(format!("axis LED {id} is not visible at t={}", frame.time))
            })
        })
        .collect::<Result<_>>()?;
    let base_frame = BaseFrame::from_markers(axis[0], axis[1], axis[2])?;
    let align = |room: Vector3<f64>| -> Vector3<f64> {
        let mut p = Vector3::from(base_frame.to_local(room.into()));
        p.y -= config.vertical_offset;
        p
    };

    let observed: Vec<Option<Vector3<f64>>> = config
        .robot_led_ids
        .iter()
        .map(|&id| frame.visible_position(id).map(align))
        .collect();
    let positions = fill_missing(&observed)?;

    let base_point = match config.base_led_id {
        Some(id) => frame.visible_position(id).map(align).ok_or_else(|| {
            Error::Alignment(format!("base LED {id} is not visible at t={}", frame.time))
        })?,
        None => positions[0],
    };

    let samples: Vec<TraceSample> = config
        .robot_led_ids
        .iter()
        .zip(&positions)
        .map(|(&led_id, p)| TraceSample {
            led_id,
            position: (*p).into(),
        })
        .collect();

    let mut point_masses: Vec<PointMass> = if config.led_mass > 0.0 {
        positions
            .iter()
            .map(|p| PointMass {
                mass: config.led_mass,
                arm: p.z - base_point.z,
            })
            .collect()
    } else {
        Vec::new()
    };
    point_masses.extend(config.point_masses.iter().copied());

    Ok(ShapeTrace {
        samples,
        base_point: base_point.into(),
        point_masses,
        distributed_masses: config.distributed_masses.clone(),
    })
}

/// Linear fill in index space; visible entries are returned untouched.
fn fill_missing(observed: &[Option<Vector3<f64>>]) -> Result<Vec<Vector3<f64>>> {
    let visible: Vec<usize> = observed
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|_| i))
        .collect();
    if visible.is_empty() {
        return Err(Error::Alignment("no robot LEDs are visible".into()));
    }
    if visible.len() < 2 {
        return Err(Error::Alignment(
            "at least two robot LEDs must be visible to repair the rest".into(),
        ));
    }
    let at = |i: usize| observed[i].expect("visible index");
    let lerp = |i0: usize, i1: usize, i: usize| {
        let t = (i as f64 - i0 as f64) / (i1 as f64 - i0 as f64);
        at(i0) + (at(i1) - at(i0)) * t
    };
    Ok((0..observed.len())
        .map(|i| match observed[i] {
            Some(p) => p,
            None => {
                let next = visible.partition_point(|&v| v < i);
                if next == 0 {
                    lerp(visible[0], visible[1], i)
                } else if next == visible.len() {
                    lerp(visible[next - 2], visible[next - 1], i)
                } else {
                    lerp(visible[next - 1], visible[next], i)
                }
            }
        })
        .collect())
}
