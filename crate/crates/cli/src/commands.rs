use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use vine_collapse::config::{Config, SupportsSection};
use vine_collapse::eversion::{fit_eversion_force_report, FeSample};
use vine_collapse::shape::{analyze_shape, ActuatorSet, MomentReport, Verdict, GUIDELINE_BAND};
use vine_collapse::statics::{
    collapse_length, tension_adjusted_collapse_moment, weight_moment, NumericCollapse,
};
use vine_collapse::supports::{
    supported_collapse_length, supported_collapse_moment, supported_eversion_force,
    supported_weight_moment, DEFAULT_TAPE_LINE_DENSITY,
};
use vine_collapse::trace::{align_and_clean, read_trace_file, FrameSelector};
use vine_collapse::{Error, TensionMode};

use crate::units::{deg_to_rad, parse_cm, parse_kpa, rad_to_deg};
use crate::{resolve_modes, CliError, SweepParam};

/// Largest number of rows a sweep may produce.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeLength {
    pub mode: String,
    /// `None` when the robot never collapses within the search cap.
    pub collapse_length_m: Option<f64>,
    pub collapse_moment_nm: f64,
    /// Weight moment evaluated at the predicted length.
    pub weight_moment_at_root_nm: Option<f64>,
    /// The collapse moment is not positive, so the length was clamped to 0.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictReport {
    pub diameter_m: f64,
    pub pressure_pa: f64,
    pub angle_deg: f64,
    pub eversion_force_n: f64,
    /// Support tube pressure when the robot carries supports.
    pub support_pressure_pa: Option<f64>,
    pub eversion_force_extrapolated: bool,
    pub outside_validated_range: bool,
    pub modes: Vec<ModeLength>,
}

impl PredictReport {
    pub fn all_finite(&self) -> bool {
        self.modes.iter().all(|m| m.collapse_length_m.is_some())
    }

    pub fn write_table(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "D = {} m, P = {} Pa, gamma = {} deg, Fe = {} N",
            self.diameter_m, self.pressure_pa, self.angle_deg, self.eversion_force_n
        )?;
        if let Some(ps) = self.support_pressure_pa {
            writeln!(w, "supports at {ps} Pa")?;
        }
        if self.eversion_force_extrapolated {
            writeln!(w, "warning: eversion force extrapolated beyond the anchors")?;
        }
        if self.outside_validated_range {
            writeln!(w, "warning: growth angle outside the validated range")?;
        }
        writeln!(
            w,
            "{:<12} {:>12} {:>18} {:>18} {:>8}",
            "mode", "length_m", "collapse_moment_nm", "weight_moment_nm", "clamped"
        )?;
        for m in &self.modes {
            writeln!(
                w,
                "{:<12} {:>12} {:>18.6e} {:>18} {:>8}",
                m.mode,
                fmt_opt(m.collapse_length_m, 4),
                m.collapse_moment_nm,
                m.weight_moment_at_root_nm
                    .map_or("-".to_string(), |v| format!("{v:.6e}")),
                m.clamped
            )?;
        }
        Ok(())
    }
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    match v {
        Some(x) => format!("{x:.digits$}"),
        None => "no-collapse".into(),
    }
}

/// Modes for a straight robot. A configured measured tension belongs to a
/// recorded shape, so it is only used here when modes are listed explicitly.
pub(crate) fn straight_modes(config: &Config) -> Result<Vec<TensionMode>, CliError> {
    if config.analysis.modes.is_some() {
        return Ok(config.modes()?);
    }
    Ok(if config.supports.is_some() {
        TensionMode::QUASISTATIC.to_vec()
    } else {
        TensionMode::ANALYTIC.to_vec()
    })
}

fn mode_length(config: &Config, mode: TensionMode) -> Result<ModeLength, CliError> {
    let robot = config.robot_spec();
    let scenario = config.scenario();
    let (length, moment, weight) = match config.support_set() {
        None => {
            let moment =
                tension_adjusted_collapse_moment(robot.pressure, robot.diameter, robot.eversion_force(), mode)?;
            let length = collapse_length(&robot, &scenario, mode)?;
            (
                Some(length),
                moment,
                Some(weight_moment(&robot, &scenario, length)?),
            )
        }
        Some(supports) => {
            let fe = supported_eversion_force(&robot, &supports)?.value;
            let moment = supported_collapse_moment(&robot, &supports, fe, mode)?;
            match supported_collapse_length(&robot, &supports, &scenario, mode)? {
                NumericCollapse::Length(l) => (
                    Some(l),
                    moment,
                    Some(supported_weight_moment(&robot, &supports, &scenario, l)?),
                ),
                NumericCollapse::NoFiniteCollapse => (None, moment, None),
            }
        }
    };
    Ok(ModeLength {
        mode: mode.name().to_string(),
        collapse_length_m: length,
        collapse_moment_nm: moment,
        weight_moment_at_root_nm: weight,
        clamped: moment <= 0.0,
    })
}

pub fn predict(config: &Config) -> Result<PredictReport, CliError> {
    let modes = straight_modes(config)?;
    let robot = config.robot_spec();
    let scenario = config.scenario();
    let supports = config.support_set();
    let (fe, extrapolated) = match &supports {
        Some(s) => {
            let i = supported_eversion_force(&robot, s)?;
            (i.value, i.extrapolated)
        }
        None => (robot.eversion_force(), false),
    };
    Ok(PredictReport {
        diameter_m: robot.diameter,
        pressure_pa: robot.pressure,
        angle_deg: rad_to_deg(scenario.angle),
        eversion_force_n: fe,
        support_pressure_pa: supports.as_ref().map(|s| s.pressure),
        eversion_force_extrapolated: extrapolated,
        outside_validated_range: !scenario.within_validated_range(),
        modes: modes
            .into_iter()
            .map(|m| mode_length(config, m))
            .collect::<Result<_, _>>()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// One entry per mode, `None` where no finite collapse was found.
    pub lengths_m: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub column: String,
    pub modes: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.lengths_m.iter().all(Option::is_some))
    }

    /// Plot-ready CSV: the swept value, then a length column per mode.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut csv = csv::Writer::from_writer(w);
        let mut header = vec![self.column.clone()];
        header.extend(self.modes.iter().map(|m| format!("{m}_m")));
        csv.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![row.value.to_string()];
            record.extend(
                row.lengths_m
                    .iter()
                    .map(|l| l.map_or(String::new(), |v| v.to_string())),
            );
            csv.write_record(&record)?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Inclusive grid `min, min + step, ...` up to `max`.
pub fn sweep_values(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) {
        return Err(CliError::usage("sweep bounds and step must be finite"));
    }
    if step <= 0.0 {
        return Err(CliError::usage("sweep step must be positive"));
    }
    if max < min {
        return Err(CliError::usage(format!("empty sweep range: max {max} < min {min}")));
    }
    let span = (max - min) / step;
    let count = (span + 1e-9 * span.max(1.0)).floor() as usize + 1;
    if count > MAX_SWEEP_POINTS {
        return Err(CliError::usage(format!(
            "sweep would produce {count} points (limit {MAX_SWEEP_POINTS})"
        )));
    }
    // Snap to 12 significant digits so 2.1 + 3 * 2.57 prints as 9.81.
    let snap = |v: f64| format!("{v:.11e}").parse::<f64>().expect("formatted float");
    Ok((0..count).map(|k| snap(min + step * k as f64)).collect())
}

pub fn sweep(
    config: &Config,
    param: SweepParam,
    min: f64,
    max: f64,
    step: f64,
) -> Result<SweepReport, CliError> {
    let values = sweep_values(min, max, step)?;
    let mut base = config.clone();
    if param == SweepParam::SupportPressure && base.supports.is_none() {
        base.supports = Some(SupportsSection {
            pressure: 0.0,
            diameter: None,
            tape_line_density: DEFAULT_TAPE_LINE_DENSITY,
            fe_anchors: None,
        });
    }
    let modes = straight_modes(&base)?;
    if let Some(m) = modes.iter().find(|m| matches!(m, TensionMode::Measured(_))) {
        return Err(Error::UnsupportedMode(m.to_string()).into());
    }

    let mut rows = Vec::with_capacity(values.len());
    for &value in &values {
        let mut point = base.clone();
        // Convert the value as printed so the CSV row and the model agree.
        let printed = value.to_string();
        let si = |parse: fn(&str) -> Result<f64, String>| parse(&printed).map_err(CliError::Usage);
        match param {
            SweepParam::Gamma => point.scenario.angle = deg_to_rad(value),
            SweepParam::Pressure => point.robot.pressure = si(parse_kpa)?,
            SweepParam::Diameter => point.robot.diameter = si(parse_cm)?,
            SweepParam::SupportPressure => {
                point.supports.as_mut().expect("supports added above").pressure = si(parse_kpa)?
            }
        }
        point.validate()?;
        let lengths_m = modes
            .iter()
            .map(|&m| Ok(mode_length(&point, m)?.collapse_length_m))
            .collect::<Result<_, CliError>>()?;
        rows.push(SweepRow { value, lengths_m });
    }
    Ok(SweepReport {
        column: param.column().to_string(),
        modes: modes.iter().map(|m| m.name().to_string()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSampleRow {
    pub area_m2: f64,
    pub pressure_to_grow_pa: f64,
    pub implied_force_n: f64,
    pub residual_pa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitFeReport {
    pub eversion_force_n: f64,
    pub samples: Vec<FitSampleRow>,
    /// Diagnostic fit `P_e = slope / A + intercept`.
    pub unconstrained_slope_n: Option<f64>,
    pub unconstrained_intercept_pa: Option<f64>,
}

impl FitFeReport {
    pub fn write_table(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "Fe = {} N ({} samples)", self.eversion_force_n, self.samples.len())?;
        if let (Some(s), Some(i)) = (self.unconstrained_slope_n, self.unconstrained_intercept_pa) {
            writeln!(w, "unconstrained fit: slope {s} N, intercept {i} Pa")?;
        }
        writeln!(
            w,
            "{:>14} {:>20} {:>16} {:>14}",
            "area_m2", "pressure_to_grow_pa", "implied_force_n", "residual_pa"
        )?;
        for s in &self.samples {
            writeln!(
                w,
                "{:>14.6e} {:>20.3} {:>16.6} {:>14.6}",
                s.area_m2, s.pressure_to_grow_pa, s.implied_force_n, s.residual_pa
            )?;
        }
        Ok(())
    }
}

/// Reads samples with a `pressure_to_grow_pa` column and either `area_m2`
/// or `diameter_m`.
pub fn read_fe_samples(path: &Path) -> Result<Vec<FeSample>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::file(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let pressure_col = column("pressure_to_grow_pa").ok_or_else(|| {
        CliError::usage(format!("{}: missing column pressure_to_grow_pa", path.display()))
    })?;
    let (size_col, is_area) = match (column("area_m2"), column("diameter_m")) {
        (Some(c), _) => (c, true),
        (None, Some(c)) => (c, false),
        (None, None) => {
            return Err(CliError::usage(format!(
                "{}: need an area_m2 or diameter_m column",
                path.display()
            )))
        }
    };
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, CliError> {
            record
                .get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse { line, message: format!("invalid {name}") }.into())
        };
        let size = field(size_col, if is_area { "area_m2" } else { "diameter_m" })?;
        let pressure = field(pressure_col, "pressure_to_grow_pa")?;
        let sample = if is_area {
            FeSample::new(size, pressure)
        } else {
            FeSample::from_diameter(size, pressure)
        }
        .map_err(|e| Error::Parse { line, message: e.to_string() })?;
        samples.push(sample);
    }
    Ok(samples)
}

pub fn fit_fe(path: &Path) -> Result<FitFeReport, CliError> {
    let samples = read_fe_samples(path)?;
    let fit = fit_eversion_force_report(&samples)?;
    Ok(FitFeReport {
        eversion_force_n: fit.force,
        samples: samples
            .iter()
            .zip(fit.residuals.iter().zip(&fit.implied_forces))
            .map(|(s, (&residual_pa, &implied_force_n))| FitSampleRow {
                area_m2: s.area,
                pressure_to_grow_pa: s.pressure_to_grow,
                implied_force_n,
                residual_pa,
            })
            .collect(),
        unconstrained_slope_n: fit.unconstrained.map(|u| u.slope),
        unconstrained_intercept_pa: fit.unconstrained.map(|u| u.intercept),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub frame_index: usize,
    pub time_s: f64,
    pub eversion_force_n: f64,
    #[serde(flatten)]
    pub moments: MomentReport,
}

impl AnalyzeReport {
    pub fn write_table(&self, w: &mut dyn Write) -> io::Result<()> {
        let m = &self.moments;
        writeln!(w, "frame {} at t = {} s", self.frame_index, self.time_s)?;
        writeln!(w, "current moment {:.6e} N·m", m.current_moment)?;
        writeln!(w, "out-of-plane moment {:.6e} N·m", m.out_of_plane_moment)?;
        writeln!(
            w,
            "{:<14} {:<10} {:>18} {:>12} {:<18}",
            "mode", "actuators", "collapse_moment_nm", "key_metric", "verdict"
        )?;
        for (i, v) in m.variants.iter().enumerate() {
            writeln!(
                w,
                "{:<14} {:<10} {:>18.6e} {:>11.2}% {:<18}{}",
                v.mode.to_string(),
                if v.with_actuator_pressure { "with" } else { "without" },
                v.collapse_moment,
                v.key_metric,
                v.verdict.name(),
                if i == m.governing { " <- governing" } else { "" }
            )?;
        }
        writeln!(w, "verdict: {}", m.verdict.name())
    }

    pub fn verdict(&self) -> Verdict {
        self.moments.verdict
    }
}

pub fn analyze(
    config: &Config,
    trace_path: &Path,
    selector: FrameSelector,
) -> Result<AnalyzeReport, CliError> {
    let frame_config = config.frame.as_ref().ok_or_else(|| Error::Config {
        path: "frame".into(),
        message: "a [frame] section is required to analyze a trace".into(),
    })?;
    let frames = read_trace_file(trace_path).map_err(|e| match e {
        Error::Io(io) => CliError::file(trace_path, io),
        other => other.into(),
    })?;
    let index = selector.resolve(&frames)?;
    let trace = align_and_clean(&frames, frame_config, index)?;
    let robot = config.robot_spec();
    let actuators = ActuatorSet::new(config.actuators.clone());
    let fe = robot.eversion_force();
    let modes = resolve_modes(config, &TensionMode::QUASISTATIC)?;
    let moments = analyze_shape(&trace, &robot, &actuators, fe, &modes, config.scenario.gravity)?;
    Ok(AnalyzeReport {
        frame_index: index,
        time_s: frames[index].time,
        eversion_force_n: fe,
        moments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapOutcome {
    Pass,
    /// Short of the gap by less than the guideline band.
    BorderlinePass,
    Fail,
}

impl GapOutcome {
    pub fn classify(collapse_length: Option<f64>, gap: f64) -> Self {
        match collapse_length {
            None => GapOutcome::Pass,
            Some(l) if l >= gap => GapOutcome::Pass,
            Some(l) if l >= (1.0 - GUIDELINE_BAND / 100.0) * gap => GapOutcome::BorderlinePass,
            Some(_) => GapOutcome::Fail,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GapOutcome::Pass => "pass",
            GapOutcome::BorderlinePass => "borderline-pass",
            GapOutcome::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub mode: String,
    pub collapse_length_m: Option<f64>,
    /// `collapse length / gap`; `None` for no finite collapse.
    pub reach_ratio: Option<f64>,
    pub outcome: GapOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gap_m: f64,
    pub modes: Vec<GapRow>,
}

impl GapReport {
    pub fn all_finite(&self) -> bool {
        self.modes.iter().all(|m| m.collapse_length_m.is_some())
    }

    pub fn write_table(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "gap {} m", self.gap_m)?;
        writeln!(w, "{:<12} {:>12} {:>12} {:<16}", "mode", "length_m", "reach_ratio", "outcome")?;
        for r in &self.modes {
            writeln!(
                w,
                "{:<12} {:>12} {:>12} {:<16}",
                r.mode,
                fmt_opt(r.collapse_length_m, 4),
                r.reach_ratio.map_or("-".into(), |v| format!("{v:.3}")),
                r.outcome.name()
            )?;
        }
        Ok(())
    }
}

pub fn gap(config: &Config, gap_m: f64) -> Result<GapReport, CliError> {
    if !(gap_m.is_finite() && gap_m > 0.0) {
        return Err(Error::Config {
            path: "gap".into(),
            message: format!("gap width must be positive (got {gap_m})"),
        }
        .into());
    }
    let modes = straight_modes(config)?;
    let rows = modes
        .into_iter()
        .map(|m| {
            let l = mode_length(config, m)?.collapse_length_m;
            Ok(GapRow {
                mode: m.name().to_string(),
                collapse_length_m: l,
                reach_ratio: l.map(|v| v / gap_m),
                outcome: GapOutcome::classify(l, gap_m),
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(GapReport { gap_m, modes: rows })
}
