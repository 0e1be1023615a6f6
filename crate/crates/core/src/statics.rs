//! Closed-form collapse models for straight, unsteered robots.
//!
//! The robot is a two-layer fabric cylinder of diameter `D` growing at angle
//! `gamma` above horizontal from its last point of support. Gravity acting at
//! the center of mass produces a moment about the top of the tube at the
//! support; collapse happens when that moment reaches the pressure-derived
//! restoring moment, reduced or increased by tail tension.
//!
//! All quantities are SI: metres, pascals, kilograms, newtons, radians.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check, check_non_negative, check_positive, Error, Result};

/// Default gravitational acceleration in m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Steepest downward growth angle for which the model has been checked
/// against experiments (-65 degrees).
pub const MIN_VALIDATED_ANGLE: f64 = -65.0 * PI / 180.0;

/// Upper bound on the search interval of the numeric root finder, in metres.
pub const NUMERIC_LENGTH_CAP: f64 = 1.0e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Single-layer thickness (m).
    pub thickness: f64,
    /// Density (kg/m^3).
    pub density: f64,
}

impl Material {
    /// 40 denier TPU-coated ripstop nylon: 0.031 mm thick, 2200 kg/m^3.
    pub const RIPSTOP_NYLON: Material = Material {
        thickness: 3.1e-5,
        density: 2200.0,
    };

    pub fn new(thickness: f64, density: f64) -> Result<Self> {
        let material = Material { thickness, density };
        material.validate()?;
        Ok(material)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(self.thickness, "material thickness")?;
        check_positive(self.density, "material density")
    }

    /// Mass per unit area of one layer (kg/m^2).
    pub fn areal_density(&self) -> f64 {
        self.thickness * self.density
    }
}

impl Default for Material {
    fn default() -> Self {
        Material::RIPSTOP_NYLON
    }
}

/// Source of the eversion force `Fe`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EversionForce {
    /// Force given directly (N).
    Force(f64),
    /// Minimum pressure at which the robot starts to grow (Pa).
    PressureToGrow(f64),
}

impl Default for EversionForce {
    fn default() -> Self {
        EversionForce::Force(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    /// Inflated body diameter (m).
    pub diameter: f64,
    /// Internal body pressure, gauge (Pa).
    pub pressure: f64,
    pub material: Material,
    /// Total doubled seam-flap height per cross-section (m).
    pub flap_width: f64,
    pub eversion_force: EversionForce,
}

impl RobotSpec {
    /// A flapless ripstop-nylon robot with zero eversion force.
    pub fn new(diameter: f64, pressure: f64) -> Self {
        RobotSpec {
            diameter,
            pressure,
            material: Material::default(),
            flap_width: 0.0,
            eversion_force: EversionForce::default(),
        }
    }

    pub fn with_material(mut self, material: Material) -> Self {
        self.material = material;
        self
    }

    pub fn with_flap(mut self, flap_width: f64) -> Self {
        self.flap_width = flap_width;
        self
    }

    pub fn with_eversion_force(mut self, force: f64) -> Self {
        self.eversion_force = EversionForce::Force(force);
        self
    }

    pub fn with_pressure_to_grow(mut self, pressure: f64) -> Self {
        self.eversion_force = EversionForce::PressureToGrow(pressure);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(self.diameter, "robot diameter")?;
        check_non_negative(self.pressure, "internal pressure")?;
        self.material.validate()?;
        check_non_negative(self.flap_width, "flap width")?;
        match self.eversion_force {
            EversionForce::Force(f) => check_non_negative(f, "eversion force"),
            EversionForce::PressureToGrow(p) => check_non_negative(p, "pressure to grow"),
        }
    }

    /// Eversion force in newtons, converting from pressure-to-grow if needed.
    pub fn eversion_force(&self) -> f64 {
        match self.eversion_force {
            EversionForce::Force(f) => f,
            EversionForce::PressureToGrow(p) => p * cross_section_area(self.diameter),
        }
    }

    /// Mass of both fabric layers plus seam flap per unit length (kg/m).
    pub fn line_density(&self) -> f64 {
        2.0 * (PI * self.diameter + self.flap_width) * self.material.areal_density()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthScenario {
    /// Growth angle above horizontal (rad).
    pub angle: f64,
    /// Gravitational acceleration (m/s^2).
    pub gravity: f64,
}

impl GrowthScenario {
    pub fn new(angle: f64) -> Self {
        GrowthScenario {
            angle,
            gravity: STANDARD_GRAVITY,
        }
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::new(degrees.to_radians())
    }

    pub fn with_gravity(mut self, gravity: f64) -> Self {
        self.gravity = gravity;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check(
            self.angle,
            self.angle.abs() < PI / 2.0,
            "growth angle",
            "strictly between -pi/2 and pi/2",
        )?;
        check_positive(self.gravity, "gravity")
    }

    /// False for downward angles steeper than the experimentally checked range.
    pub fn within_validated_range(&self) -> bool {
        self.angle >= MIN_VALIDATED_ANGLE - 1e-12
    }
}

impl Default for GrowthScenario {
    fn default() -> Self {
        GrowthScenario::new(0.0)
    }
}

/// How tail tension enters the collapse moment.
///
/// Eversion is the minimum quasistatic tension and therefore the largest
/// restoring moment; inversion is the maximum tension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensionMode {
    NoTension,
    Eversion,
    Average,
    Inversion,
    /// Measured tail tension (N).
    Measured(f64),
}

impl TensionMode {
    /// The four modes with a closed-form collapse length.
    pub const ANALYTIC: [TensionMode; 4] = [
        TensionMode::NoTension,
        TensionMode::Eversion,
        TensionMode::Average,
        TensionMode::Inversion,
    ];

    /// The quasistatic tension band.
    pub const QUASISTATIC: [TensionMode; 3] = [
        TensionMode::Eversion,
        TensionMode::Average,
        TensionMode::Inversion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TensionMode::NoTension => "no_tension",
            TensionMode::Eversion => "eversion",
            TensionMode::Average => "average",
            TensionMode::Inversion => "inversion",
            TensionMode::Measured(_) => "measured",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TensionMode::Measured(t) => check_non_negative(t, "measured tail tension"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for TensionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensionMode::Measured(t) => write!(f, "measured({t} N)"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for TensionMode {
    type Err = Error;

    /// Parses `no_tension`/`none`, `eversion`, `average`, `inversion`, or
    /// `measured:<newtons>`. Dashes and underscores are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        match s.as_str() {
            "no_tension" | "none" | "notension" => Ok(TensionMode::NoTension),
            "eversion" => Ok(TensionMode::Eversion),
            "average" => Ok(TensionMode::Average),
            "inversion" => Ok(TensionMode::Inversion),
            _ => {
                if let Some(value) = s.strip_prefix("measured:") {
                    let t: f64 = value
                        .parse()
                        .map_err(|_| Error::domain(format!("bad measured tension `{value}`")))?;
                    let mode = TensionMode::Measured(t);
                    mode.validate()?;
                    Ok(mode)
                } else {
                    Err(Error::domain(format!("unknown tension mode `{s}`")))
                }
            }
        }
    }
}

/// Quasistatic tail tension band (N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTension {
    /// Eversion bound; may be negative for large `Fe`.
    pub min: f64,
    pub average: f64,
    /// Inversion bound.
    pub max: f64,
}

/// Result of a bracketed root search that may not terminate at finite length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericCollapse {
    Length(f64),
    NoFiniteCollapse,
}

impl NumericCollapse {
    pub fn length(self) -> Option<f64> {
        match self {
            NumericCollapse::Length(l) => Some(l),
            NumericCollapse::NoFiniteCollapse => None,
        }
    }
}

pub fn cross_section_area(diameter: f64) -> f64 {
    PI * diameter * diameter / 4.0
}

fn check_length(length: f64) -> Result<()> {
    check_non_negative(length, "length")
}

/// Two-layer tube mass including the seam flap: `2 (pi D + f) t L rho`.
pub fn robot_mass(robot: &RobotSpec, length: f64) -> Result<f64> {
    robot.validate()?;
    check_length(length)?;
    Ok(robot.line_density() * length)
}

/// Gravity moment about the fold point for a straight robot of `length`.
pub fn weight_moment(robot: &RobotSpec, scenario: &GrowthScenario, length: f64) -> Result<f64> {
    scenario.validate()?;
    let mass = robot_mass(robot, length)?;
    Ok(mass * scenario.gravity * center_of_mass_arm(robot.diameter, scenario.angle, length))
}

/// Horizontal arm from the fold point to the center of mass.
pub(crate) fn center_of_mass_arm(diameter: f64, angle: f64, length: f64) -> f64 {
    0.5 * diameter * angle.sin() + 0.5 * length * angle.cos()
}

/// Transverse collapse moment of an inflated beam: `P pi D^3 / 8`.
pub fn beam_collapse_moment(pressure: f64, diameter: f64) -> Result<f64> {
    check_non_negative(pressure, "pressure")?;
    check_positive(diameter, "diameter")?;
    Ok(pressure * PI * diameter.powi(3) / 8.0)
}

/// `Fe = P_e pi D^2 / 4`.
pub fn eversion_force(pressure_to_grow: f64, diameter: f64) -> Result<f64> {
    check_non_negative(pressure_to_grow, "pressure to grow")?;
    check_positive(diameter, "diameter")?;
    Ok(pressure_to_grow * cross_section_area(diameter))
}

pub fn tail_tension_bounds(pressure: f64, diameter: f64, fe: f64) -> Result<TailTension> {
    check_non_negative(pressure, "pressure")?;
    check_positive(diameter, "diameter")?;
    check_non_negative(fe, "eversion force")?;
    let average = 0.5 * pressure * cross_section_area(diameter);
    Ok(TailTension {
        min: average - 0.5 * fe,
        average,
        max: average + 0.5 * fe,
    })
}

/// Restoring moment at the fold point with tail tension acting on the
/// central axis, `D/2` below the fold point.
pub fn tension_adjusted_collapse_moment(
    pressure: f64,
    diameter: f64,
    fe: f64,
    mode: TensionMode,
) -> Result<f64> {
    let full = beam_collapse_moment(pressure, diameter)?;
    check_non_negative(fe, "eversion force")?;
    mode.validate()?;
    let half = 0.5 * full;
    let tension_arm = 0.25 * fe * diameter;
    Ok(match mode {
        TensionMode::NoTension => full,
        TensionMode::Eversion => half + tension_arm,
        TensionMode::Average => half,
        TensionMode::Inversion => half - tension_arm,
        TensionMode::Measured(t) => full - 0.5 * t * diameter,
    })
}

fn analytic_collapse_moment(robot: &RobotSpec, mode: TensionMode) -> Result<f64> {
    if let TensionMode::Measured(_) = mode {
        return Err(Error::UnsupportedMode(mode.to_string()));
    }
    tension_adjusted_collapse_moment(
        robot.pressure,
        robot.diameter,
        robot.eversion_force(),
        mode,
    )
}

/// Length at which the straight robot's weight moment reaches the collapse
/// moment for `mode`, from the quadratic moment balance.
///
/// A non-positive collapse moment means the robot folds at any length, so the
/// result is clamped to zero. `Measured` is rejected because a fixed measured
/// tension has no length-independent meaning here.
pub fn collapse_length(
    robot: &RobotSpec,
    scenario: &GrowthScenario,
    mode: TensionMode,
) -> Result<f64> {
    robot.validate()?;
    scenario.validate()?;
    let moment = analytic_collapse_moment(robot, mode)?;
    let line_weight = robot.line_density() * scenario.gravity;
    Ok(solve_straight_balance(
        line_weight,
        robot.diameter,
        scenario.angle,
        moment,
    ))
}

/// Positive root of `w L (D/2 sin g + L/2 cos g) = M`, or zero if `M <= 0`.
///
/// Written as `a L^2 + b L - M = 0` with `a = w cos g / 2`, `b = w D sin g / 2`.
pub(crate) fn solve_straight_balance(
    line_weight: f64,
    diameter: f64,
    angle: f64,
    moment: f64,
) -> f64 {
    if moment <= 0.0 || line_weight <= 0.0 {
        return if moment <= 0.0 { 0.0 } else { f64::INFINITY };
    }
    let a = 0.5 * line_weight * angle.cos();
    let b = 0.5 * line_weight * diameter * angle.sin();
    let root = (b * b + 4.0 * a * moment).sqrt();
    // Pick the form without cancellation.
    if b >= 0.0 {
        2.0 * moment / (b + root)
    } else {
        (root - b) / (2.0 * a)
    }
}

/// Independent numeric route to [`collapse_length`]: bisection on
/// `weight_moment(L) - collapse_moment` with a doubling bracket capped at
/// [`NUMERIC_LENGTH_CAP`].
pub fn collapse_length_numeric(
    robot: &RobotSpec,
    scenario: &GrowthScenario,
    mode: TensionMode,
) -> Result<NumericCollapse> {
    robot.validate()?;
    scenario.validate()?;
    let moment = analytic_collapse_moment(robot, mode)?;
    let residual = |length: f64| {
        weight_moment(robot, scenario, length).expect("validated inputs") - moment
    };
    Ok(bisect_collapse_length(residual))
}

/// Smallest-bracket bisection for the first length where `residual` turns
/// positive. A residual already non-negative at zero length means immediate
/// collapse. Iterates until the bracket cannot shrink in double precision.
pub(crate) fn bisect_collapse_length(residual: impl Fn(f64) -> f64) -> NumericCollapse {
    if residual(0.0) >= 0.0 {
        return NumericCollapse::Length(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        if residual(hi) > 0.0 {
            break;
        }
        if hi >= NUMERIC_LENGTH_CAP {
            return NumericCollapse::NoFiniteCollapse;
        }
        lo = hi;
        hi = (2.0 * hi).min(NUMERIC_LENGTH_CAP);
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    NumericCollapse::Length(0.5 * (lo + hi))
}
