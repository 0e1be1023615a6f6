//! Shape-aware collapse analysis for steered and unsteered robots.
//!
//! A measured shape is a polyline of LED positions in the base frame, where
//! `z` is horizontal along the growth direction, `y` is vertical and `x` is
//! lateral. Each polyline segment is a two-layer cylinder whose weight acts
//! at its midpoint; the current gravity moment about the last point of
//! support is compared with the restoring moment of the cross-section there.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::statics::{tension_adjusted_collapse_moment, RobotSpec, TensionMode};

/// Half-width of the agreement band around 100% (percentage points).
pub const GUIDELINE_BAND: f64 = 15.0;

/// Key metric at or above which collapse is expected.
pub const COLLAPSE_THRESHOLD: f64 = 100.0 - GUIDELINE_BAND;

/// Key metric at or above which a non-collapsing shape is flagged borderline.
pub const BORDERLINE_THRESHOLD: f64 = COLLAPSE_THRESHOLD - GUIDELINE_BAND;

/// Mass of one motion-capture LED with its cable (kg).
pub const DEFAULT_LED_MASS: f64 = 0.0036;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActuatorKind {
    CircularTube,
    SpmRect,
}

/// One pneumatic actuator or support running along the robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Actuator {
    pub kind: ActuatorKind,
    /// Inflated tube diameter, used for fabric mass (m).
    pub inflated_diameter: f64,
    /// Gauge pressure (Pa).
    pub pressure: f64,
    /// Radial height of the pouch at the fold point (m). Defaults to the
    /// tube diameter for circular tubes and zero for uninflated SPMs.
    #[serde(default)]
    pub pouch_height: Option<f64>,
    /// Pressurised cross-sectional area (m^2). Same defaults as the height.
    #[serde(default)]
    pub pouch_area: Option<f64>,
    /// Angle about the growth axis: 0 on the side, pi/2 on top (rad).
    pub angle: f64,
    /// Attachment tape mass per unit length (kg/m).
    #[serde(default)]
    pub tape_line_density: f64,
}

impl Actuator {
    pub fn circular_tube(diameter: f64, pressure: f64, angle: f64) -> Self {
        Actuator {
            kind: ActuatorKind::CircularTube,
            inflated_diameter: diameter,
            pressure,
            pouch_height: None,
            pouch_area: None,
            angle,
            tape_line_density: 0.0,
        }
    }

    pub fn spm(inflated_diameter: f64, pressure: f64, height: f64, area: f64, angle: f64) -> Self {
        Actuator {
            kind: ActuatorKind::SpmRect,
            inflated_diameter,
            pressure,
            pouch_height: Some(height),
            pouch_area: Some(area),
            angle,
            tape_line_density: 0.0,
        }
    }

    pub fn with_tape(mut self, line_density: f64) -> Self {
        self.tape_line_density = line_density;
        self
    }

    pub fn height(&self) -> f64 {
        self.pouch_height.unwrap_or(match self.kind {
            ActuatorKind::CircularTube => self.inflated_diameter,
            ActuatorKind::SpmRect => 0.0,
        })
    }

    pub fn area(&self) -> f64 {
        self.pouch_area.unwrap_or(match self.kind {
            ActuatorKind::CircularTube => PI * self.inflated_diameter.powi(2) / 4.0,
            ActuatorKind::SpmRect => 0.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative(self.inflated_diameter, "actuator inflated diameter")?;
        check_non_negative(self.pressure, "actuator pressure")?;
        check_non_negative(self.tape_line_density, "actuator tape line density")?;
        if !self.angle.is_finite() {
            return Err(Error::domain("actuator angle must be finite"));
        }
        if let Some(h) = self.pouch_height {
            check_non_negative(h, "actuator pouch height")?;
        }
        if let Some(a) = self.pouch_area {
            check_non_negative(a, "actuator pouch area")?;
        }
        if self.kind == ActuatorKind::SpmRect
            && self.pressure > 0.0
            && (self.pouch_height.is_none() || self.pouch_area.is_none())
        {
            return Err(Error::domain(
                "a pressurised SPM needs a measured pouch height and area",
            ));
        }
        Ok(())
    }

    /// Height of the pouch center above the robot axis.
    fn center_height(&self, robot_diameter: f64) -> f64 {
        0.5 * (robot_diameter + self.height()) * self.angle.sin()
    }

    fn top_height(&self, robot_diameter: f64) -> f64 {
        self.center_height(robot_diameter) + 0.5 * self.height()
    }

    /// Drop from a collapse point at height `k` to the pouch center.
    fn arm_below(&self, robot_diameter: f64, k: f64) -> f64 {
        if k == self.top_height(robot_diameter) {
            0.5 * self.height()
        } else {
            k - self.center_height(robot_diameter)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActuatorSet {
    pub actuators: Vec<Actuator>,
}

impl ActuatorSet {
    pub fn new(actuators: Vec<Actuator>) -> Self {
        ActuatorSet { actuators }
    }

    pub fn count(&self) -> usize {
        self.actuators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actuators.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.actuators.iter().try_for_each(Actuator::validate)
    }

    fn total_diameter(&self) -> f64 {
        self.actuators.iter().map(|a| a.inflated_diameter).sum()
    }

    fn tape_line_density(&self) -> f64 {
        self.actuators.iter().map(|a| a.tape_line_density).sum()
    }

    pub fn any_pressurised(&self) -> bool {
        self.actuators.iter().any(|a| a.pressure > 0.0 && a.area() > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub led_id: u32,
    /// Position in the base frame (m).
    pub position: [f64; 3],
}

/// A concentrated mass at horizontal distance `arm` beyond the base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub mass: f64,
    pub arm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeTrace {
    /// Samples ordered from base to tip.
    pub samples: Vec<TraceSample>,
    /// Last point of support on top of the robot; all arms are measured from it.
    pub base_point: [f64; 3],
    #[serde(default)]
    pub point_masses: Vec<PointMass>,
    /// Extra masses spread along every segment (kg/m), e.g. tape strips.
    #[serde(default)]
    pub distributed_masses: Vec<f64>,
}

impl ShapeTrace {
    pub fn new(samples: Vec<TraceSample>, base_point: [f64; 3]) -> Self {
        ShapeTrace {
            samples,
            base_point,
            point_masses: Vec::new(),
            distributed_masses: Vec::new(),
        }
    }

    /// Builds a trace from bare positions, numbering LEDs from zero.
    pub fn from_points(points: &[[f64; 3]], base_point: [f64; 3]) -> Self {
        let samples = points
            .iter()
            .enumerate()
            .map(|(i, &position)| TraceSample {
                led_id: i as u32,
                position,
            })
            .collect();
        Self::new(samples, base_point)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::domain(format!(
                "a shape trace needs at least 2 samples (got {})",
                self.samples.len()
            )));
        }
        let finite = |p: &[f64; 3]| p.iter().all(|v| v.is_finite());
        if !finite(&self.base_point) || !self.samples.iter().all(|s| finite(&s.position)) {
            return Err(Error::domain("trace coordinates must be finite"));
        }
        for pm in &self.point_masses {
            check_non_negative(pm.mass, "point mass")?;
            if !pm.arm.is_finite() {
                return Err(Error::domain("point mass arm must be finite"));
            }
        }
        for &ld in &self.distributed_masses {
            check_non_negative(ld, "distributed line density")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub length: f64,
    pub center: [f64; 3],
    /// Horizontal (z) distance from the base point to the segment center.
    pub arm: f64,
    /// Lateral (x) offset of the segment center from the base point.
    pub lateral_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedShape {
    pub segments: Vec<Segment>,
}

impl SegmentedShape {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }
}

pub fn segment_trace(trace: &ShapeTrace) -> Result<SegmentedShape> {
    trace.validate()?;
    let base = trace.base_point;
    let segments = trace
        .samples
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let (a, b) = (pair[0].position, pair[1].position);
            let delta = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let length = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(length > 0.0) {
                return Err(Error::domain(format!(
                    "samples {i} and {} coincide; segments must have positive length",
                    i + 1
                )));
            }
            let center = [
                0.5 * (a[0] + b[0]),
                0.5 * (a[1] + b[1]),
                0.5 * (a[2] + b[2]),
            ];
            Ok(Segment {
                length,
                center,
                arm: center[2] - base[2],
                lateral_offset: center[0] - base[0],
            })
        })
        .collect::<Result<_>>()?;
    Ok(SegmentedShape { segments })
}

/// Mass per unit length of the robot with its actuators and any tape (kg/m).
fn shape_line_density(robot: &RobotSpec, actuators: &ActuatorSet, trace: &ShapeTrace) -> f64 {
    let perimeter = PI * (robot.diameter + actuators.total_diameter()) + robot.flap_width;
    2.0 * perimeter * robot.material.areal_density()
        + actuators.tape_line_density()
        + trace.distributed_masses.iter().sum::<f64>()
}

/// Gravity moment about the lateral (x) axis through the base point.
pub fn current_moment(
    shape: &SegmentedShape,
    robot: &RobotSpec,
    actuators: &ActuatorSet,
    trace: &ShapeTrace,
    gravity: f64,
) -> Result<f64> {
    robot.validate()?;
    actuators.validate()?;
    check_positive(gravity, "gravity")?;
    let line_density = shape_line_density(robot, actuators, trace);
    let distributed: f64 = shape.segments.iter().map(|s| s.length * s.arm).sum();
    let points: f64 = trace.point_masses.iter().map(|p| p.mass * p.arm).sum();
    Ok(gravity * (line_density * distributed + points))
}

/// Twisting moment about the growth axis from lateral offsets. Reported only;
/// it never drives the verdict.
pub fn out_of_plane_moment(
    shape: &SegmentedShape,
    robot: &RobotSpec,
    actuators: &ActuatorSet,
    trace: &ShapeTrace,
    gravity: f64,
) -> f64 {
    let line_density = shape_line_density(robot, actuators, trace);
    gravity
        * line_density
        * shape
            .segments
            .iter()
            .map(|s| s.length * s.lateral_offset)
            .sum::<f64>()
}

/// Geometry of one actuator relative to the collapse point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorArm {
    /// Vertical drop from the collapse point to the actuator center (m).
    pub r_act: f64,
    /// Height of the collapse point above the robot axis (m).
    pub k: f64,
}

/// The pouch center sits at radius `(D + h) / 2` and angle `xi`; its top is
/// `h / 2` above that. The collapse point is the highest of the body top and
/// the pouch top.
pub fn actuator_arm(xi: f64, diameter: f64, height: f64) -> Result<ActuatorArm> {
    check_positive(diameter, "robot diameter")?;
    check_non_negative(height, "actuator height")?;
    let center = 0.5 * (diameter + height) * xi.sin();
    let top = center + 0.5 * height;
    Ok(if top > 0.5 * diameter {
        ActuatorArm {
            r_act: 0.5 * height,
            k: top,
        }
    } else {
        ActuatorArm {
            r_act: 0.5 * diameter - center,
            k: 0.5 * diameter,
        }
    })
}

/// Height of the topmost point of the cross-section above the robot axis.
pub fn collapse_point_height(robot_diameter: f64, actuators: &ActuatorSet) -> f64 {
    actuators
        .actuators
        .iter()
        .map(|a| a.top_height(robot_diameter))
        .fold(0.5 * robot_diameter, f64::max)
}

/// Restoring moment about the topmost point of the cross-section, with
/// pressure and tail tension acting on the body axis at arm `K` and each
/// actuator's pressure force at its own arm.
pub fn comprehensive_collapse_moment(
    robot: &RobotSpec,
    actuators: &ActuatorSet,
    fe: f64,
    mode: TensionMode,
) -> Result<f64> {
    robot.validate()?;
    actuators.validate()?;
    check_non_negative(fe, "eversion force")?;
    mode.validate()?;
    let d = robot.diameter;
    let k = collapse_point_height(d, actuators);
    let body = if k == 0.5 * d {
        tension_adjusted_collapse_moment(robot.pressure, d, fe, mode)?
    } else {
        let pressure_force = robot.pressure * PI * d * d / 4.0;
        match mode {
            TensionMode::NoTension => pressure_force * k,
            TensionMode::Eversion => 0.5 * pressure_force * k + 0.5 * fe * k,
            TensionMode::Average => 0.5 * pressure_force * k,
            TensionMode::Inversion => 0.5 * pressure_force * k - 0.5 * fe * k,
            TensionMode::Measured(t) => pressure_force * k - t * k,
        }
    };
    let actuator_terms: f64 = actuators
        .actuators
        .iter()
        .map(|a| a.pressure * a.area() * a.arm_below(d, k))
        .sum();
    Ok(body + actuator_terms)
}

/// Collapse moment with the fold at a flat seal between pouches, where the
/// actuators add weight but no pressure.
pub fn between_pouch_collapse_moment(robot: &RobotSpec, fe: f64, mode: TensionMode) -> Result<f64> {
    robot.validate()?;
    tension_adjusted_collapse_moment(robot.pressure, robot.diameter, fe, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CollapseExpected,
    Borderline,
    NoCollapse,
}

impl Verdict {
    pub fn from_metric(key_metric: f64) -> Self {
        if key_metric >= COLLAPSE_THRESHOLD {
            Verdict::CollapseExpected
        } else if key_metric >= BORDERLINE_THRESHOLD {
            Verdict::Borderline
        } else {
            Verdict::NoCollapse
        }
    }

    pub fn predicts_collapse(self) -> bool {
        self == Verdict::CollapseExpected
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::CollapseExpected => "collapse_expected",
            Verdict::Borderline => "borderline",
            Verdict::NoCollapse => "no_collapse",
        }
    }
}

/// One collapse-moment model to compare the current moment against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseVariant {
    /// Whether actuator pressure contributes to the restoring moment.
    pub with_actuator_pressure: bool,
    pub mode: TensionMode,
    pub collapse_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub with_actuator_pressure: bool,
    pub mode: TensionMode,
    pub collapse_moment: f64,
    /// `100 * current / collapse` (%).
    pub key_metric: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub current_moment: f64,
    pub variants: Vec<VariantResult>,
    /// Index into `variants` of the variant that decides the verdict.
    pub governing: usize,
    pub verdict: Verdict,
    /// Moment about the growth axis; diagnostic only.
    #[serde(default)]
    pub out_of_plane_moment: f64,
}

impl MomentReport {
    pub fn governing_variant(&self) -> &VariantResult {
        &self.variants[self.governing]
    }

    pub fn find(&self, with_actuator_pressure: bool, mode: TensionMode) -> Option<&VariantResult> {
        self.variants
            .iter()
            .find(|v| v.with_actuator_pressure == with_actuator_pressure && v.mode == mode)
    }
}

/// Key metric and verdict for every variant.
///
/// The verdict follows a measured-tension variant when present, otherwise
/// the eversion variants, otherwise the first variant's mode. Within that
/// mode the smallest collapse moment governs, since a flat seal between
/// pouches may sit at the support.
pub fn key_metric_and_verdict(
    current_moment: f64,
    variants: &[CollapseVariant],
) -> Result<MomentReport> {
    if variants.is_empty() {
        return Err(Error::domain("at least one collapse variant is required"));
    }
    if !current_moment.is_finite() {
        return Err(Error::domain("current moment must be finite"));
    }
    let results: Vec<VariantResult> = variants
        .iter()
        .map(|v| {
            check(v.collapse_moment)?;
            let key_metric = 100.0 * current_moment / v.collapse_moment;
            Ok(VariantResult {
                with_actuator_pressure: v.with_actuator_pressure,
                mode: v.mode,
                collapse_moment: v.collapse_moment,
                key_metric,
                verdict: Verdict::from_metric(key_metric),
            })
        })
        .collect::<Result<_>>()?;

    let governs = |m: &TensionMode| -> bool {
        let measured = results.iter().any(|r| matches!(r.mode, TensionMode::Measured(_)));
        let eversion = results.iter().any(|r| r.mode == TensionMode::Eversion);
        if measured {
            matches!(m, TensionMode::Measured(_))
        } else if eversion {
            *m == TensionMode::Eversion
        } else {
            *m == results[0].mode
        }
    };
    let governing = results
        .iter()
        .enumerate()
        .filter(|(_, r)| governs(&r.mode))
        .min_by(|a, b| a.1.collapse_moment.total_cmp(&b.1.collapse_moment))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(MomentReport {
        current_moment,
        verdict: results[governing].verdict,
        variants: results,
        governing,
        out_of_plane_moment: 0.0,
    })
}

fn check(collapse_moment: f64) -> Result<()> {
    if collapse_moment.is_finite() && collapse_moment > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "collapse moment must be positive to form a key metric (got {collapse_moment})"
        )))
    }
}

/// Which of the with/without actuator-pressure models called the outcome right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMatch {
    Both,
    WithoutActuatorPressure,
    WithActuatorPressure,
    Neither,
}

/// A model matches when it predicts collapse exactly when collapse was observed.
pub fn matching_models(metric_without: f64, metric_with: f64, collapsed: bool) -> ModelMatch {
    let without = Verdict::from_metric(metric_without).predicts_collapse() == collapsed;
    let with = Verdict::from_metric(metric_with).predicts_collapse() == collapsed;
    match (without, with) {
        (true, true) => ModelMatch::Both,
        (true, false) => ModelMatch::WithoutActuatorPressure,
        (false, true) => ModelMatch::WithActuatorPressure,
        (false, false) => ModelMatch::Neither,
    }
}

/// Full shape pipeline: segments, current moment, and both pressure models
/// for each requested tension mode.
pub fn analyze_shape(
    trace: &ShapeTrace,
    robot: &RobotSpec,
    actuators: &ActuatorSet,
    fe: f64,
    modes: &[TensionMode],
    gravity: f64,
) -> Result<MomentReport> {
    let shape = segment_trace(trace)?;
    let current = current_moment(&shape, robot, actuators, trace, gravity)?;
    let mut variants = Vec::with_capacity(2 * modes.len());
    for &mode in modes {
        variants.push(CollapseVariant {
            with_actuator_pressure: false,
            mode,
            collapse_moment: between_pouch_collapse_moment(robot, fe, mode)?,
        });
        variants.push(CollapseVariant {
            with_actuator_pressure: true,
            mode,
            collapse_moment: comprehensive_collapse_moment(robot, actuators, fe, mode)?,
        });
    }
    let mut report = key_metric_and_verdict(current, &variants)?;
    report.out_of_plane_moment = out_of_plane_moment(&shape, robot, actuators, trace, gravity);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statics::{weight_moment, GrowthScenario};
    use approx::assert_relative_eq;

    fn straight_trace(angle: f64, length: f64, diameter: f64, n: usize) -> ShapeTrace {
        let (s, c) = angle.sin_cos();
        let axis0 = [0.0, -0.5 * diameter * c, 0.5 * diameter * s];
        let points: Vec<_> = (0..n)
            .map(|i| {
                let along = length * i as f64 / (n - 1) as f64;
                [0.0, axis0[1] + along * s, axis0[2] + along * c]
            })
            .collect();
        ShapeTrace::from_points(&points, [0.0; 3])
    }

    #[test]
    fn single_vertical_segment() {
        let trace = ShapeTrace::from_points(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.2]], [0.0; 3]);
        let shape = segment_trace(&trace).unwrap();
        assert_eq!(shape.segments.len(), 1);
        assert_relative_eq!(shape.segments[0].length, 0.2);
        assert_relative_eq!(shape.segments[0].arm, 0.1);
    }

    #[test]
    fn straight_45_degree_arms_are_arithmetic() {
        let trace = straight_trace(PI / 4.0, 0.7, 0.0, 8);
        let shape = segment_trace(&trace).unwrap();
        assert_eq!(shape.segments.len(), 7);
        let step = shape.segments[1].arm - shape.segments[0].arm;
        for w in shape.segments.windows(2) {
            assert_relative_eq!(w[1].arm - w[0].arm, step, max_relative = 1e-12);
        }
    }

    #[test]
    fn chords_are_shorter_than_the_arc() {
        let radius = 0.5;
        let sweep = PI / 2.0;
        let points: Vec<_> = (0..6)
            .map(|i| {
                let t = sweep * i as f64 / 5.0;
                [0.0, radius * (1.0 - t.cos()), radius * t.sin()]
            })
            .collect();
        let shape = segment_trace(&ShapeTrace::from_points(&points, [0.0; 3])).unwrap();
        assert!(shape.total_length() < radius * sweep);
    }

    #[test]
    fn too_few_or_coincident_samples() {
        let one = ShapeTrace::from_points(&[[0.0; 3]], [0.0; 3]);
        assert!(matches!(segment_trace(&one), Err(Error::Domain(_))));
        let dup = ShapeTrace::from_points(&[[0.0; 3], [0.0; 3]], [0.0; 3]);
        assert!(segment_trace(&dup).is_err());
    }

    #[test]
    fn horizontal_segment_moment_fixture() {
        let trace = ShapeTrace::from_points(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.2]], [0.0; 3]);
        let shape = segment_trace(&trace).unwrap();
        let robot = RobotSpec::new(0.04, 0.0);
        let m = current_moment(&shape, &robot, &ActuatorSet::default(), &trace, 9.81).unwrap();
        assert_relative_eq!(m, 3.362_971_891_428_836e-3, max_relative = 1e-12);
    }

    #[test]
    fn straight_trace_matches_closed_form_weight_moment() {
        let robot = RobotSpec::new(0.0243, 3450.0).with_flap(0.03);
        for deg in [-40.0, 0.0, 20.0, 45.0, 65.0] {
            let angle: f64 = f64::to_radians(deg);
            let trace = straight_trace(angle, 0.8, robot.diameter, 9);
            let shape = segment_trace(&trace).unwrap();
            let m = current_moment(&shape, &robot, &ActuatorSet::default(), &trace, 9.81).unwrap();
            let closed = weight_moment(&robot, &GrowthScenario::new(angle), 0.8).unwrap();
            assert_relative_eq!(m, closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn extras_add_linearly() {
        let robot = RobotSpec::new(0.04, 0.0);
        let mut trace = ShapeTrace::from_points(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.2]], [0.0; 3]);
        let shape = segment_trace(&trace).unwrap();
        let bare = current_moment(&shape, &robot, &ActuatorSet::default(), &trace, 9.81).unwrap();
        trace.point_masses.push(PointMass { mass: 0.016, arm: 0.59 });
        trace.distributed_masses.push(0.0073);
        let loaded = current_moment(&shape, &robot, &ActuatorSet::default(), &trace, 9.81).unwrap();
        let expected = bare + 9.81 * (0.016 * 0.59 + 0.0073 * 0.2 * 0.1);
        assert_relative_eq!(loaded, expected, max_relative = 1e-12);
    }

    #[test]
    fn one_half_diameter_actuator_triples_perimeter() {
        let d = 0.0404;
        let robot = RobotSpec::new(d, 0.0);
        let trace = ShapeTrace::from_points(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.3]], [0.0; 3]);
        let shape = segment_trace(&trace).unwrap();
        let acts = ActuatorSet::new(vec![Actuator::spm(d / 2.0, 0.0, 0.0, 0.0, 0.0)]);
        let m = current_moment(&shape, &robot, &acts, &trace, 9.81).unwrap();
        let t = robot.material.thickness;
        let rho = robot.material.density;
        assert_relative_eq!(m, 3.0 * PI * d * t * 0.3 * rho * 9.81 * 0.15, max_relative = 1e-12);
    }

    #[test]
    fn arm_special_geometries() {
        let (d, h) = (0.0404, 0.011);
        let side = actuator_arm(0.0, d, h).unwrap();
        assert_eq!(side.r_act, d / 2.0);
        assert_eq!(side.k, d / 2.0);
        let top = actuator_arm(PI / 2.0, d, h).unwrap();
        assert_relative_eq!(top.r_act, h / 2.0, max_relative = 1e-14);
        assert_relative_eq!(top.k, d / 2.0 + h, max_relative = 1e-15);
        let upper = actuator_arm(PI / 6.0, 0.081, 0.02).unwrap();
        assert_relative_eq!(upper.r_act, (0.081 - 0.02) / 4.0, max_relative = 1e-14);
        assert_eq!(upper.k, 0.081 / 2.0);
    }

    #[test]
    fn no_actuators_reduce_to_tension_adjusted() {
        let robot = RobotSpec::new(0.0404, 3450.0);
        for mode in TensionMode::QUASISTATIC {
            assert_eq!(
                comprehensive_collapse_moment(&robot, &ActuatorSet::default(), 4.5, mode).unwrap(),
                tension_adjusted_collapse_moment(3450.0, 0.0404, 4.5, mode).unwrap()
            );
        }
    }

    #[test]
    fn with_pressure_never_below_without() {
        let robot = RobotSpec::new(0.0404, 3450.0);
        for xi in [0.0, PI / 4.0, PI / 2.0, -PI / 2.0, 2.0] {
            let acts = ActuatorSet::new(vec![Actuator::spm(0.0202, 17240.0, 0.011, 2.8e-4, xi)]);
            for mode in TensionMode::QUASISTATIC {
                let with = comprehensive_collapse_moment(&robot, &acts, 4.5, mode).unwrap();
                let without = between_pouch_collapse_moment(&robot, 4.5, mode).unwrap();
                assert!(with >= without, "xi {xi} mode {mode}: {with} < {without}");
            }
        }
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::from_metric(100.0), Verdict::CollapseExpected);
        assert_eq!(Verdict::from_metric(85.0), Verdict::CollapseExpected);
        assert_eq!(Verdict::from_metric(130.0), Verdict::CollapseExpected);
        assert_eq!(Verdict::from_metric(84.9), Verdict::Borderline);
        assert_eq!(Verdict::from_metric(70.0), Verdict::Borderline);
        assert_eq!(Verdict::from_metric(69.9), Verdict::NoCollapse);
    }

    #[test]
    fn equal_moments_give_100_percent() {
        let report = key_metric_and_verdict(
            0.2,
            &[CollapseVariant {
                with_actuator_pressure: false,
                mode: TensionMode::Eversion,
                collapse_moment: 0.2,
            }],
        )
        .unwrap();
        assert_eq!(report.variants[0].key_metric, 100.0);
        assert_eq!(report.verdict, Verdict::CollapseExpected);
    }

    #[test]
    fn non_positive_collapse_moment_is_rejected() {
        let bad = [CollapseVariant {
            with_actuator_pressure: true,
            mode: TensionMode::Inversion,
            collapse_moment: -0.1,
        }];
        assert!(key_metric_and_verdict(0.1, &bad).is_err());
        assert!(key_metric_and_verdict(0.1, &[]).is_err());
    }

    #[test]
    fn governing_variant_prefers_eversion_and_smaller_moment() {
        let variants = [
            CollapseVariant {
                with_actuator_pressure: false,
                mode: TensionMode::Average,
                collapse_moment: 0.05,
            },
            CollapseVariant {
                with_actuator_pressure: false,
                mode: TensionMode::Eversion,
                collapse_moment: 0.2,
            },
            CollapseVariant {
                with_actuator_pressure: true,
                mode: TensionMode::Eversion,
                collapse_moment: 0.3,
            },
        ];
        let report = key_metric_and_verdict(0.18, &variants).unwrap();
        assert_eq!(report.governing, 1);
        assert_eq!(report.verdict, Verdict::CollapseExpected);
    }

    #[test]
    fn spm_without_measurements_is_invalid_when_pressurised() {
        let mut a = Actuator::spm(0.02, 1000.0, 0.01, 1e-4, 0.0);
        a.pouch_area = None;
        assert!(a.validate().is_err());
        a.pressure = 0.0;
        assert!(a.validate().is_ok());
    }
}
