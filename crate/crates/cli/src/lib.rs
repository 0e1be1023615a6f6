//! Command-line driver for the vine-robot collapse model.
//!
//! Flags take friendly units (cm, kPa, degrees); configuration files and
//! every number past the argument parser are SI.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use vine_collapse::config::{
    AnalysisSection, Config, RobotSection, ScenarioSection, SupportsSection,
};
use vine_collapse::statics::Material;
use vine_collapse::supports::DEFAULT_TAPE_LINE_DENSITY;
use vine_collapse::trace::FrameSelector;
use vine_collapse::TensionMode;

pub mod commands;
pub mod units;

pub use commands::{
    AnalyzeReport, FitFeReport, GapOutcome, GapReport, PredictReport, SweepReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NO_FINITE_COLLAPSE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] vine_collapse::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub(crate) fn file(path: &Path, source: io::Error) -> Self {
        CliError::File {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "vine-collapse",
    version,
    about = "Predict when a vine robot growing off a ledge folds under its own weight"
)]
pub struct Cli {
    /// TOML configuration in SI units; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Print a JSON report instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collapse length of a straight robot for each tension mode.
    #[command(allow_negative_numbers = true)]
    Predict(PredictArgs),
    /// Collapse length curves over a swept parameter, as CSV.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Fit the eversion force to pressure-to-grow samples.
    FitFe(FitFeArgs),
    /// Key metric and verdict for a recorded robot shape.
    #[command(allow_negative_numbers = true)]
    Analyze(AnalyzeArgs),
    /// Whether a straight robot can bridge a gap before collapsing.
    #[command(allow_negative_numbers = true)]
    Gap(GapArgs),
}

/// Robot and scenario overrides. Each replaces the configuration value.
/// Values are stored in SI units after parsing.
#[derive(Debug, Clone, Default, Args)]
pub struct RobotArgs {
    /// Body diameter (cm).
    #[arg(long = "diameter-cm", value_name = "CM", value_parser = units::parse_cm)]
    pub diameter: Option<f64>,
    /// Internal pressure (kPa).
    #[arg(long = "pressure-kpa", value_name = "KPA", value_parser = units::parse_kpa)]
    pub pressure: Option<f64>,
    /// Seam flap height (cm).
    #[arg(long = "flap-cm", value_name = "CM", value_parser = units::parse_cm)]
    pub flap_width: Option<f64>,
    /// Single-layer fabric thickness (mm).
    #[arg(long = "thickness-mm", value_name = "MM", value_parser = units::parse_mm)]
    pub thickness: Option<f64>,
    /// Fabric density (kg/m^3).
    #[arg(long, value_name = "KG_M3")]
    pub density: Option<f64>,
    /// Eversion force (N).
    #[arg(long, value_name = "N", conflicts_with = "pressure_to_grow")]
    pub fe: Option<f64>,
    /// Pressure at which growth starts (kPa); sets Fe = P_e * A.
    #[arg(long = "pressure-to-grow-kpa", value_name = "KPA", value_parser = units::parse_kpa)]
    pub pressure_to_grow: Option<f64>,
    /// Growth angle above horizontal (degrees).
    #[arg(long = "angle-deg", value_name = "DEG", value_parser = units::parse_deg)]
    pub angle: Option<f64>,
    /// Gravitational acceleration (m/s^2).
    #[arg(long, value_name = "M_S2")]
    pub gravity: Option<f64>,
    /// Support tube pressure (kPa); adds three supports.
    #[arg(long = "support-pressure-kpa", value_name = "KPA", value_parser = units::parse_kpa)]
    pub support_pressure: Option<f64>,
    /// Tension modes: no_tension, eversion, average, inversion, measured:<N>.
    #[arg(long, value_delimiter = ',', value_name = "MODES")]
    pub modes: Option<Vec<String>>,
    /// Measured tail tension (N); used by analyze, and elsewhere only through --modes.
    #[arg(long, value_name = "N")]
    pub measured_tension: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub robot: RobotArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Growth angle, degrees.
    Gamma,
    /// Body pressure, kPa.
    Pressure,
    /// Body diameter, cm.
    Diameter,
    /// Support tube pressure, kPa.
    SupportPressure,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma_deg",
            SweepParam::Pressure => "pressure_kpa",
            SweepParam::Diameter => "diameter_cm",
            SweepParam::SupportPressure => "support_pressure_kpa",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// First value, in the parameter's display unit.
    #[arg(long)]
    pub min: f64,
    /// Last value, inclusive.
    #[arg(long)]
    pub max: f64,
    #[arg(long)]
    pub step: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "CSV")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub robot: RobotArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitFeArgs {
    /// CSV with `pressure_to_grow_pa` and either `area_m2` or `diameter_m`.
    pub samples: PathBuf,
}

fn parse_frame(s: &str) -> Result<FrameSelector, String> {
    s.parse().map_err(|e: vine_collapse::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Trace CSV (`time,led_id,x,y,z,visible`).
    #[arg(long, value_name = "FILE")]
    pub trace: PathBuf,
    /// Frame index, or `t=<seconds>` for the nearest timestamp.
    #[arg(long, default_value = "0", value_parser = parse_frame)]
    pub frame: FrameSelector,
    #[command(flatten)]
    pub robot: RobotArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    /// Gap width (m).
    #[arg(long, value_name = "M", required_unless_present = "gap_cm_as_m", conflicts_with = "gap_cm_as_m")]
    pub gap_m: Option<f64>,
    /// Gap width (cm).
    #[arg(long = "gap-cm", value_name = "CM", value_parser = units::parse_cm)]
    pub gap_cm_as_m: Option<f64>,
    #[command(flatten)]
    pub robot: RobotArgs,
}

/// Loads the configuration file, if any, and applies flag overrides.
pub fn resolve_config(path: Option<&Path>, args: &RobotArgs) -> Result<Config, CliError> {
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::file(p, e))?;
            Config::parse_toml(&text)?
        }
        None => {
            let diameter = args.diameter.ok_or_else(|| {
                CliError::usage("robot.diameter is required: pass --diameter-cm or --config")
            })?;
            let pressure = args.pressure.ok_or_else(|| {
                CliError::usage("robot.pressure is required: pass --pressure-kpa or --config")
            })?;
            Config {
                robot: RobotSection {
                    diameter,
                    pressure,
                    thickness: Material::RIPSTOP_NYLON.thickness,
                    density: Material::RIPSTOP_NYLON.density,
                    flap_width: 0.0,
                    eversion_force: None,
                    pressure_to_grow: None,
                },
                scenario: ScenarioSection::default(),
                supports: None,
                actuators: Vec::new(),
                frame: None,
                analysis: AnalysisSection::default(),
            }
        }
    };
    apply_overrides(&mut config, args);
    config.validate()?;
    Ok(config)
}

fn apply_overrides(config: &mut Config, args: &RobotArgs) {
    let robot = &mut config.robot;
    let set = |slot: &mut f64, value: Option<f64>| {
        if let Some(v) = value {
            *slot = v;
        }
    };
    set(&mut robot.diameter, args.diameter);
    set(&mut robot.pressure, args.pressure);
    set(&mut robot.flap_width, args.flap_width);
    set(&mut robot.thickness, args.thickness);
    set(&mut robot.density, args.density);
    if let Some(fe) = args.fe {
        robot.eversion_force = Some(fe);
        robot.pressure_to_grow = None;
    }
    if let Some(p) = args.pressure_to_grow {
        robot.pressure_to_grow = Some(p);
        robot.eversion_force = None;
    }
    set(&mut config.scenario.angle, args.angle);
    set(&mut config.scenario.gravity, args.gravity);
    if let Some(pressure) = args.support_pressure {
        match &mut config.supports {
            Some(s) => s.pressure = pressure,
            None => {
                config.supports = Some(SupportsSection {
                    pressure,
                    diameter: None,
                    tape_line_density: DEFAULT_TAPE_LINE_DENSITY,
                    fe_anchors: None,
                })
            }
        }
    }
    if let Some(m) = &args.modes {
        config.analysis.modes = Some(m.clone());
    }
    if let Some(t) = args.measured_tension {
        config.analysis.measured_tension = Some(t);
    }
}

/// Configured modes, or `default` plus any measured tension when the
/// configuration names none.
pub fn resolve_modes(config: &Config, default: &[TensionMode]) -> Result<Vec<TensionMode>, CliError> {
    if config.analysis.modes.is_some() {
        return Ok(config.modes()?);
    }
    let mut modes = default.to_vec();
    if let Some(t) = config.analysis.measured_tension {
        modes.push(TensionMode::Measured(t));
    }
    Ok(modes)
}

/// Runs one invocation, writing the report to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let config_path = cli.config.as_deref();
    let finite = match &cli.command {
        Command::Predict(args) => {
            let config = resolve_config(config_path, &args.robot)?;
            let report = commands::predict(&config)?;
            emit(out, cli.json, &report, |w| report.write_table(w))?;
            report.all_finite()
        }
        Command::Sweep(args) => {
            // The swept quantity need not be given separately.
            let mut robot = args.robot.clone();
            let first = args.min.to_string();
            match args.param {
                SweepParam::Pressure if robot.pressure.is_none() => {
                    robot.pressure = units::parse_kpa(&first).ok()
                }
                SweepParam::Diameter if robot.diameter.is_none() => {
                    robot.diameter = units::parse_cm(&first).ok()
                }
                _ => {}
            }
            let config = resolve_config(config_path, &robot)?;
            let report = commands::sweep(&config, args.param, args.min, args.max, args.step)?;
            if let Some(path) = &args.out {
                let file = std::fs::File::create(path).map_err(|e| CliError::file(path, e))?;
                report.write_csv(file)?;
            }
            if cli.json {
                serde_json::to_writer_pretty(&mut *out, &report)?;
                writeln!(out)?;
            } else if args.out.is_none() {
                report.write_csv(&mut *out)?;
            } else {
                writeln!(out, "wrote {} rows to {}", report.rows.len(), args.out.as_ref().unwrap().display())?;
            }
            report.all_finite()
        }
        Command::FitFe(args) => {
            let report = commands::fit_fe(&args.samples)?;
            emit(out, cli.json, &report, |w| report.write_table(w))?;
            true
        }
        Command::Analyze(args) => {
            let config = resolve_config(config_path, &args.robot)?;
            let report = commands::analyze(&config, &args.trace, args.frame)?;
            emit(out, cli.json, &report, |w| report.write_table(w))?;
            true
        }
        Command::Gap(args) => {
            let config = resolve_config(config_path, &args.robot)?;
            let gap = match (args.gap_m, args.gap_cm_as_m) {
                (Some(m), _) => m,
                (None, Some(m)) => m,
                (None, None) => return Err(CliError::usage("pass --gap-m or --gap-cm")),
            };
            let report = commands::gap(&config, gap)?;
            emit(out, cli.json, &report, |w| report.write_table(w))?;
            report.all_finite()
        }
    };
    Ok(if finite { EXIT_OK } else { EXIT_NO_FINITE_COLLAPSE })
}

fn emit<T: serde::Serialize>(
    out: &mut dyn Write,
    json: bool,
    report: &T,
    table: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    if json {
        serde_json::to_writer_pretty(&mut *out, report)?;
        writeln!(out)?;
    } else {
        table(out)?;
    }
    Ok(())
}
