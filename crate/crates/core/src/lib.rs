//! Statics of everting vine robots growing unsupported from a ledge: when the
//! body buckles at its last point of support under its own weight.
//!
//! * [`statics`]: straight cantilever robot, closed-form and numeric collapse
//!   lengths under several tail-tension modes.
//! * [`eversion`]: eversion force from pressure-to-grow measurements.
//! * [`supports`]: robots stiffened by three pressurised supports.
//! * [`shape`]: arbitrary measured shapes with actuators and the key metric.
//! * [`trace`]: motion-capture trace files and base-frame alignment.
//! * [`config`]: TOML analysis configuration.

pub mod config;
pub mod error;
pub mod eversion;
pub mod shape;
pub mod statics;
pub mod supports;
pub mod trace;

pub use config::Config;
pub use error::{Error, Result};
pub use eversion::{fit_eversion_force, fit_eversion_force_report, FeFit, FeSample};
pub use shape::{
    analyze_shape, comprehensive_collapse_moment, current_moment, segment_trace, Actuator,
    ActuatorKind, ActuatorSet, ModelMatch, MomentReport, ShapeTrace, Verdict,
};
pub use statics::{
    beam_collapse_moment, collapse_length, collapse_length_numeric, tail_tension_bounds,
    tension_adjusted_collapse_moment, weight_moment, GrowthScenario, Material, NumericCollapse,
    RobotSpec, TensionMode,
};
pub use supports::{supported_collapse_length, supported_collapse_moment, SupportSet};
pub use trace::{align_and_clean, parse_trace, write_trace, FrameConfig, FrameSelector, RawFrame};
