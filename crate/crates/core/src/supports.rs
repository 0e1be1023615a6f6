//! Straight robots stiffened by three inflated circular support tubes.
//!
//! One support runs along the bottom of the body and the other two sit 120
//! degrees to either side of it. Each support adds its own fabric and tape
//! mass and a restoring moment `P_s A_s R_s` about the fold point at the top
//! of the main body.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, Error, Result};
use crate::statics::{
    bisect_collapse_length, center_of_mass_arm, tension_adjusted_collapse_moment,
    GrowthScenario, NumericCollapse, RobotSpec, TensionMode,
};

pub const SUPPORT_COUNT: usize = 3;

/// Tape holding the supports on: three strips of 0.0073 kg/m, inside and out.
pub const DEFAULT_TAPE_LINE_DENSITY: f64 = 0.044;

/// Eversion force (N) against support pressure (Pa), linear between the ends
/// of the tested range.
pub const DEFAULT_FE_ANCHORS: [(f64, f64); 2] = [(0.0, 8.0), (3450.0, 11.0)];

/// Angular position of each support axis, measured from the top of the body.
pub const SUPPORT_ANGLES_FROM_TOP: [f64; SUPPORT_COUNT] = [PI, PI / 3.0, -PI / 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    /// Common gauge pressure of the supports (Pa).
    pub pressure: f64,
    /// Inflated diameter of each support (m).
    pub diameter: f64,
    /// Total attachment tape mass per unit length (kg/m).
    pub tape_line_density: f64,
    /// `(support pressure, Fe)` pairs sorted by pressure. Empty means the
    /// robot's own eversion force is used.
    pub fe_anchors: Vec<(f64, f64)>,
}

impl SupportSet {
    /// Supports half the body diameter, default tape and eversion-force anchors.
    pub fn for_robot(robot_diameter: f64, pressure: f64) -> Self {
        SupportSet {
            pressure,
            diameter: 0.5 * robot_diameter,
            tape_line_density: DEFAULT_TAPE_LINE_DENSITY,
            fe_anchors: DEFAULT_FE_ANCHORS.to_vec(),
        }
    }

    pub fn with_pressure(mut self, pressure: f64) -> Self {
        self.pressure = pressure;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative(self.pressure, "support pressure")?;
        check_non_negative(self.diameter, "support diameter")?;
        check_non_negative(self.tape_line_density, "support tape line density")?;
        if self.fe_anchors.len() == 1 {
            return Err(Error::domain("eversion force interpolation needs at least two anchors"));
        }
        for w in self.fe_anchors.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::domain(
                    "eversion force anchors must be strictly increasing in pressure",
                ));
            }
        }
        Ok(())
    }

    /// Cross-sectional area of one support (m^2).
    pub fn area(&self) -> f64 {
        PI * self.diameter * self.diameter / 4.0
    }
}

/// An interpolated value tagged when it lies outside the anchor range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interpolated {
    pub value: f64,
    pub extrapolated: bool,
}

/// Piecewise-linear eversion force at `pressure`, extrapolating the end
/// segments linearly outside the anchor hull.
pub fn interpolate_fe(pressure: f64, anchors: &[(f64, f64)]) -> Result<Interpolated> {
    if anchors.len() < 2 {
        return Err(Error::domain("eversion force interpolation needs at least two anchors"));
    }
    if !pressure.is_finite() {
        return Err(Error::domain(format!("support pressure must be finite (got {pressure})")));
    }
    let first = anchors[0].0;
    let last = anchors[anchors.len() - 1].0;
    let extrapolated = pressure < first || pressure > last;
    let idx = anchors
        .windows(2)
        .position(|w| pressure <= w[1].0)
        .unwrap_or(anchors.len() - 2);
    let (p0, f0) = anchors[idx];
    let (p1, f1) = anchors[idx + 1];
    let frac = (pressure - p0) / (p1 - p0);
    Ok(Interpolated {
        value: f0 + frac * (f1 - f0),
        extrapolated,
    })
}

/// Body, supports and tape; the seam flap is assumed trimmed off.
pub fn supported_mass(robot: &RobotSpec, supports: &SupportSet, length: f64) -> Result<f64> {
    robot.validate()?;
    supports.validate()?;
    check_non_negative(length, "length")?;
    Ok(supported_line_density(robot, supports) * length)
}

/// Gravity moment of a straight supported robot about the fold point.
pub fn supported_weight_moment(
    robot: &RobotSpec,
    supports: &SupportSet,
    scenario: &GrowthScenario,
    length: f64,
) -> Result<f64> {
    scenario.validate()?;
    let mass = supported_mass(robot, supports, length)?;
    Ok(mass * scenario.gravity * center_of_mass_arm(robot.diameter, scenario.angle, length))
}

fn supported_line_density(robot: &RobotSpec, supports: &SupportSet) -> f64 {
    let perimeter = PI * robot.diameter + SUPPORT_COUNT as f64 * PI * supports.diameter;
    2.0 * perimeter * robot.material.areal_density() + supports.tape_line_density
}

/// Vertical drop from the top of the body to each support axis, taking
/// each axis to lie on the body wall.
pub fn support_arms(robot_diameter: f64) -> [f64; SUPPORT_COUNT] {
    let radius = 0.5 * robot_diameter;
    SUPPORT_ANGLES_FROM_TOP.map(|theta| radius - radius * theta.cos())
}

/// Per-support restoring moments `P_s A_s R_s`.
pub fn support_moments(supports: &SupportSet, robot_diameter: f64) -> [f64; SUPPORT_COUNT] {
    let force = supports.pressure * supports.area();
    support_arms(robot_diameter).map(|arm| force * arm)
}

pub fn support_restoring_moment(supports: &SupportSet, robot_diameter: f64) -> Result<f64> {
    supports.validate()?;
    crate::error::check_positive(robot_diameter, "robot diameter")?;
    Ok(support_moments(supports, robot_diameter).iter().sum())
}

/// Eversion force for the supported robot: anchors if present, else the robot's own.
pub fn supported_eversion_force(robot: &RobotSpec, supports: &SupportSet) -> Result<Interpolated> {
    if supports.fe_anchors.is_empty() {
        Ok(Interpolated {
            value: robot.eversion_force(),
            extrapolated: false,
        })
    } else {
        interpolate_fe(supports.pressure, &supports.fe_anchors)
    }
}

fn require_quasistatic(mode: TensionMode) -> Result<()> {
    match mode {
        TensionMode::Eversion | TensionMode::Average | TensionMode::Inversion => Ok(()),
        other => Err(Error::UnsupportedMode(other.to_string())),
    }
}

pub fn supported_collapse_moment(
    robot: &RobotSpec,
    supports: &SupportSet,
    fe: f64,
    mode: TensionMode,
) -> Result<f64> {
    require_quasistatic(mode)?;
    robot.validate()?;
    let body = tension_adjusted_collapse_moment(robot.pressure, robot.diameter, fe, mode)?;
    Ok(body + support_restoring_moment(supports, robot.diameter)?)
}

/// Numeric collapse length of the supported robot (clamped at zero).
pub fn supported_collapse_length(
    robot: &RobotSpec,
    supports: &SupportSet,
    scenario: &GrowthScenario,
    mode: TensionMode,
) -> Result<NumericCollapse> {
    require_quasistatic(mode)?;
    robot.validate()?;
    supports.validate()?;
    scenario.validate()?;
    let fe = supported_eversion_force(robot, supports)?.value;
    let moment = supported_collapse_moment(robot, supports, fe, mode)?;
    let line_weight = supported_line_density(robot, supports) * scenario.gravity;
    let residual = |length: f64| {
        line_weight * length * center_of_mass_arm(robot.diameter, scenario.angle, length) - moment
    };
    Ok(bisect_collapse_length(residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statics::{collapse_length, Material};
    use approx::assert_relative_eq;

    #[test]
    fn weight_balances_moment_at_supported_root() {
        let robot = RobotSpec::new(0.0849, 3450.0);
        let supports = SupportSet::for_robot(robot.diameter, 1380.0);
        let scenario = GrowthScenario::from_degrees(30.0);
        let mode = TensionMode::Eversion;
        let length = supported_collapse_length(&robot, &supports, &scenario, mode)
            .unwrap()
            .length()
            .unwrap();
        let fe = supported_eversion_force(&robot, &supports).unwrap().value;
        let moment = supported_collapse_moment(&robot, &supports, fe, mode).unwrap();
        let weight = supported_weight_moment(&robot, &supports, &scenario, length).unwrap();
        assert_relative_eq!(weight, moment, max_relative = 1e-12);
    }

    #[test]
    fn zero_length_has_zero_mass() {
        let robot = RobotSpec::new(0.0849, 3450.0);
        let supports = SupportSet::for_robot(0.0849, 0.0);
        assert_eq!(supported_mass(&robot, &supports, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn tape_constant_matches_strip_weight() {
        assert_relative_eq!(3.0 * 0.0073 * 2.0, DEFAULT_TAPE_LINE_DENSITY, epsilon = 5e-4);
    }

    #[test]
    fn supported_mass_fixture() {
        // 2 (pi D + 3 pi D / 2) t rho + 0.044 at D = 0.0849.
        let robot = RobotSpec::new(0.0849, 3450.0);
        let supports = SupportSet::for_robot(0.0849, 0.0);
        assert_relative_eq!(
            supported_mass(&robot, &supports, 1.0).unwrap(),
            0.134_951_934_754_812_75,
            max_relative = 1e-12
        );
    }

    #[test]
    fn arms_are_full_diameter_and_quarter_diameters() {
        let d = 0.08;
        let arms = support_arms(d);
        assert_relative_eq!(arms[0], d, max_relative = 1e-15);
        assert_relative_eq!(arms[1], d / 4.0, max_relative = 1e-14);
        assert_relative_eq!(arms[2], d / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn aggregate_support_moment() {
        let d = 0.0849;
        let supports = SupportSet::for_robot(d, 1380.0);
        let total = support_restoring_moment(&supports, d).unwrap();
        assert_relative_eq!(total, 3.0 * 1380.0 * PI * d.powi(3) / 32.0, max_relative = 1e-14);
        assert_relative_eq!(total, 0.248_727_214_503_357_46, max_relative = 1e-12);
        let parts = support_moments(&supports, d);
        assert_eq!(total, parts.iter().sum::<f64>());
        let none = SupportSet::for_robot(d, 0.0);
        assert_eq!(support_restoring_moment(&none, d).unwrap(), 0.0);
    }

    #[test]
    fn interpolation_anchors() {
        let a = DEFAULT_FE_ANCHORS;
        assert_eq!(interpolate_fe(0.0, &a).unwrap().value, 8.0);
        assert_eq!(interpolate_fe(3450.0, &a).unwrap().value, 11.0);
        assert_eq!(interpolate_fe(1725.0, &a).unwrap().value, 9.5);
        assert!(!interpolate_fe(1725.0, &a).unwrap().extrapolated);

        let measured = [(0.0, 7.9), (1380.0, 7.9), (2760.0, 11.1)];
        for &(p, f) in &measured {
            assert_eq!(interpolate_fe(p, &measured).unwrap().value, f);
        }

        let beyond = interpolate_fe(6900.0, &a).unwrap();
        assert!(beyond.extrapolated);
        assert_relative_eq!(beyond.value, 14.0, max_relative = 1e-14);
        assert!(interpolate_fe(-10.0, &a).unwrap().extrapolated);
        assert!(interpolate_fe(10.0, &a[..1]).is_err());
    }

    #[test]
    fn collapse_moment_reduces_without_support_pressure() {
        let robot = RobotSpec::new(0.0849, 3450.0);
        let supports = SupportSet::for_robot(0.0849, 0.0);
        for mode in TensionMode::QUASISTATIC {
            assert_eq!(
                supported_collapse_moment(&robot, &supports, 11.1, mode).unwrap(),
                tension_adjusted_collapse_moment(3450.0, 0.0849, 11.1, mode).unwrap()
            );
        }
    }

    #[test]
    fn collapse_moment_fixture() {
        let robot = RobotSpec::new(0.0849, 3450.0);
        let supports = SupportSet::for_robot(0.0849, 2760.0);
        assert_relative_eq!(
            supported_collapse_moment(&robot, &supports, 11.1, TensionMode::Eversion).unwrap(),
            1.147_597_286_512_310_7,
            max_relative = 1e-12
        );
        assert!(matches!(
            supported_collapse_moment(&robot, &supports, 11.1, TensionMode::NoTension),
            Err(Error::UnsupportedMode(_))
        ));
    }

    #[test]
    fn zero_support_pressure_matches_heavier_straight_robot() {
        let d = 0.0849;
        let robot = RobotSpec::new(d, 3450.0).with_eversion_force(8.0);
        let mut supports = SupportSet::for_robot(d, 0.0);
        supports.tape_line_density = 0.0;
        supports.fe_anchors.clear();
        // Three half-diameter supports multiply the fabric perimeter by 2.5.
        let heavy = robot.with_material(
            Material::new(robot.material.thickness, 2.5 * robot.material.density).unwrap(),
        );
        let scenario = GrowthScenario::new(0.0);
        for mode in TensionMode::QUASISTATIC {
            let supported = supported_collapse_length(&robot, &supports, &scenario, mode)
                .unwrap()
                .length()
                .unwrap();
            let straight = collapse_length(&heavy, &scenario, mode).unwrap();
            assert_relative_eq!(supported, straight, max_relative = 1e-12);
        }
    }

    #[test]
    fn validation_rejects_unsorted_anchors() {
        let mut s = SupportSet::for_robot(0.08, 0.0);
        s.fe_anchors = vec![(100.0, 1.0), (50.0, 2.0)];
        assert!(s.validate().is_err());
        s.fe_anchors = vec![(100.0, 1.0)];
        assert!(s.validate().is_err());
    }
}
