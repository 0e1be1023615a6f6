//! TOML analysis configuration. All quantities are SI; angles are radians.
//!
//! ```toml
//! [robot]
//! diameter = 0.0485
//! pressure = 3450.0
//! flap_width = 0.03
//! eversion_force = 1.4
//!
//! [scenario]
//! angle = 0.0
//!
//! [analysis]
//! modes = ["eversion", "average", "inversion"]
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::Actuator;
use crate::statics::{
    EversionForce, GrowthScenario, Material, RobotSpec, TensionMode, STANDARD_GRAVITY,
};
use crate::supports::{SupportSet, DEFAULT_FE_ANCHORS, DEFAULT_TAPE_LINE_DENSITY};
use crate::trace::FrameConfig;

fn default_thickness() -> f64 {
    Material::RIPSTOP_NYLON.thickness
}

fn default_density() -> f64 {
    Material::RIPSTOP_NYLON.density
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

fn default_tape() -> f64 {
    DEFAULT_TAPE_LINE_DENSITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSection {
    pub diameter: f64,
    pub pressure: f64,
    #[serde(default = "default_thickness")]
    pub thickness: f64,
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default)]
    pub flap_width: f64,
    /// Eversion force (N). Mutually exclusive with `pressure_to_grow`.
    #[serde(default)]
    pub eversion_force: Option<f64>,
    /// Pressure at which growth starts (Pa).
    #[serde(default)]
    pub pressure_to_grow: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default)]
    pub angle: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            angle: 0.0,
            gravity: STANDARD_GRAVITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportsSection {
    pub pressure: f64,
    /// Defaults to half the robot diameter.
    #[serde(default)]
    pub diameter: Option<f64>,
    #[serde(default = "default_tape")]
    pub tape_line_density: f64,
    /// `[pressure, Fe]` pairs. Omitted means the built-in anchors; an empty
    /// list means the robot's own eversion force.
    #[serde(default)]
    pub fe_anchors: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Tension mode names; defaults to the quasistatic band.
    #[serde(default)]
    pub modes: Option<Vec<String>>,
    /// Measured tail tension (N), appended as an extra mode.
    #[serde(default)]
    pub measured_tension: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub robot: RobotSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub supports: Option<SupportsSection>,
    #[serde(default)]
    pub actuators: Vec<Actuator>,
    #[serde(default)]
    pub frame: Option<FrameConfig>,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

fn require(path: &str, value: f64, ok: bool, requirement: &str) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be {requirement} (got {value})")))
    }
}

fn positive(path: &str, value: f64) -> Result<()> {
    require(path, value, value > 0.0, "positive")
}

fn non_negative(path: &str, value: f64) -> Result<()> {
    require(path, value, value >= 0.0, "non-negative")
}

/// Re-labels a domain error with the dotted path of the field that caused it.
fn at<T>(path: &str, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Domain(message) => Error::config(path, message),
        other => other,
    })
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config = Self::parse_toml(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses without range validation, e.g. to apply overrides first.
    pub fn parse_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() as u64 + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.robot;
        positive("robot.diameter", r.diameter)?;
        non_negative("robot.pressure", r.pressure)?;
        positive("robot.thickness", r.thickness)?;
        positive("robot.density", r.density)?;
        non_negative("robot.flap_width", r.flap_width)?;
        match (r.eversion_force, r.pressure_to_grow) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "robot.eversion_force",
                    "give either eversion_force or pressure_to_grow, not both",
                ))
            }
            (Some(f), None) => non_negative("robot.eversion_force", f)?,
            (None, Some(p)) => non_negative("robot.pressure_to_grow", p)?,
            (None, None) => {}
        }

        let s = &self.scenario;
        require(
            "scenario.angle",
            s.angle,
            s.angle.abs() < std::f64::consts::FRAC_PI_2,
            "strictly between -pi/2 and pi/2 rad",
        )?;
        positive("scenario.gravity", s.gravity)?;

        if let Some(sup) = &self.supports {
            non_negative("supports.pressure", sup.pressure)?;
            if let Some(d) = sup.diameter {
                non_negative("supports.diameter", d)?;
            }
            non_negative("supports.tape_line_density", sup.tape_line_density)?;
            if let Some(anchors) = &sup.fe_anchors {
                for (i, [p, f]) in anchors.iter().enumerate() {
                    non_negative(&format!("supports.fe_anchors[{i}]"), *p)?;
                    non_negative(&format!("supports.fe_anchors[{i}]"), *f)?;
                }
            }
            at("supports.fe_anchors", self.support_set().unwrap().validate())?;
        }

        for (i, a) in self.actuators.iter().enumerate() {
            at(&format!("actuators[{i}]"), a.validate())?;
        }
        if let Some(frame) = &self.frame {
            frame.validate()?;
        }
        if let Some(t) = self.analysis.measured_tension {
            non_negative("analysis.measured_tension", t)?;
        }
        at("analysis.modes", self.modes())?;
        Ok(())
    }

    pub fn robot_spec(&self) -> RobotSpec {
        let r = &self.robot;
        let eversion_force = match (r.eversion_force, r.pressure_to_grow) {
            (_, Some(p)) => EversionForce::PressureToGrow(p),
            (Some(f), None) => EversionForce::Force(f),
            (None, None) => EversionForce::default(),
        };
        RobotSpec {
            diameter: r.diameter,
            pressure: r.pressure,
            material: Material {
                thickness: r.thickness,
                density: r.density,
            },
            flap_width: r.flap_width,
            eversion_force,
        }
    }

    pub fn scenario(&self) -> GrowthScenario {
        GrowthScenario::new(self.scenario.angle).with_gravity(self.scenario.gravity)
    }

    pub fn support_set(&self) -> Option<SupportSet> {
        self.supports.as_ref().map(|s| SupportSet {
            pressure: s.pressure,
            diameter: s.diameter.unwrap_or(0.5 * self.robot.diameter),
            tape_line_density: s.tape_line_density,
            fe_anchors: match &s.fe_anchors {
                Some(a) => a.iter().map(|&[p, f]| (p, f)).collect(),
                None => DEFAULT_FE_ANCHORS.to_vec(),
            },
        })
    }

    /// Configured tension modes, with the measured mode appended when a
    /// measured tension is given.
    pub fn modes(&self) -> Result<Vec<TensionMode>> {
        let mut modes = match &self.analysis.modes {
            Some(names) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<Vec<TensionMode>>>()?,
            None => TensionMode::QUASISTATIC.to_vec(),
        };
        if let Some(t) = self.analysis.measured_tension {
            modes.retain(|m| !matches!(m, TensionMode::Measured(_)));
            modes.push(TensionMode::Measured(t));
        }
        if modes.is_empty() {
            return Err(Error::domain("at least one tension mode is required"));
        }
        Ok(modes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[robot]\ndiameter = 0.0485\npressure = 3450.0\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = Config::from_toml_str(MINIMAL).unwrap();
        let robot = c.robot_spec();
        assert_eq!(robot.material, Material::RIPSTOP_NYLON);
        assert_eq!(robot.flap_width, 0.0);
        assert_eq!(c.scenario().gravity, STANDARD_GRAVITY);
        assert_eq!(c.modes().unwrap(), TensionMode::QUASISTATIC.to_vec());
        assert!(c.support_set().is_none());
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
[robot]
diameter = 0.0485
pressure = 3450.0
flap_width = 0.03
pressure_to_grow = 750.0

[scenario]
angle = 0.5

[supports]
pressure = 2760.0

[[actuators]]
kind = "spm_rect"
inflated_diameter = 0.0243
pressure = 3450.0
pouch_height = 0.012
pouch_area = 2.0e-4
angle = 1.5707963267948966

[frame]
axis_led_ids = [100, 101, 102]
robot_led_ids = [1, 2, 3]

[analysis]
modes = ["eversion", "no-tension"]
measured_tension = 4.5
"#;
        let c = Config::from_toml_str(text).unwrap();
        assert_eq!(
            c.modes().unwrap(),
            vec![
                TensionMode::Eversion,
                TensionMode::NoTension,
                TensionMode::Measured(4.5)
            ]
        );
        let sup = c.support_set().unwrap();
        assert_eq!(sup.diameter, 0.02425);
        assert_eq!(sup.fe_anchors, DEFAULT_FE_ANCHORS.to_vec());
        assert_eq!(c.frame.as_ref().unwrap().vertical_offset, 0.11);
        let again = Config::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(again, c);
    }

    fn path_of(text: &str) -> String {
        match Config::from_toml_str(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn validation_errors_name_the_field() {
        assert_eq!(path_of("[robot]\ndiameter = -1.0\npressure = 1.0\n"), "robot.diameter");
        assert_eq!(
            path_of(&format!("{MINIMAL}[scenario]\nangle = 2.0\n")),
            "scenario.angle"
        );
        assert_eq!(
            path_of(&format!("{MINIMAL}[supports]\npressure = 1.0\nfe_anchors = [[1.0, 2.0]]\n")),
            "supports.fe_anchors"
        );
        assert_eq!(
            path_of(&format!(
                "{MINIMAL}[[actuators]]\nkind = \"spm_rect\"\ninflated_diameter = 0.02\npressure = 10.0\nangle = 0.0\n"
            )),
            "actuators[0]"
        );
        assert_eq!(
            path_of(&format!("{MINIMAL}[analysis]\nmodes = [\"sideways\"]\n")),
            "analysis.modes"
        );
        assert_eq!(
            path_of(&format!("{MINIMAL}eversion_force = 1.0\npressure_to_grow = 2.0\n")),
            "robot.eversion_force"
        );
    }

    #[test]
    fn syntax_errors_report_a_line() {
        match Config::from_toml_str("[robot]\ndiameter = 0.05\npressure = \n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Config::from_toml_str("[robot]\ndiameter = 0.05\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Config::from_toml_str(&format!("{MINIMAL}colour = 3\n")),
            Err(Error::Parse { .. })
        ));
    }
}
