//! Browser bindings. Every entry point takes a JSON object in display units
//! and returns JSON, so the page needs no generated TypeScript glue.

use serde::{Deserialize, Serialize};
use vine_collapse::shape::between_pouch_collapse_moment;
use vine_collapse::{
    analyze_shape, collapse_length, comprehensive_collapse_moment, supported_collapse_length,
    Actuator, ActuatorSet, GrowthScenario, MomentReport, RobotSpec, ShapeTrace, SupportSet,
    TensionMode,
};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gamma,
    Pressure,
    Diameter,
    SupportPressure,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    pub diameter_cm: f64,
    pub pressure_kpa: f64,
    #[serde(default)]
    pub flap_cm: f64,
    #[serde(default)]
    pub fe: f64,
    #[serde(default)]
    pub angle_deg: f64,
    #[serde(default)]
    pub support_pressure_kpa: Option<f64>,
    pub sweep: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub mode: &'static str,
    /// `None` where no finite collapse length exists.
    pub lengths_m: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub series: Vec<Series>,
}

fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(min.is_finite() && max.is_finite()) || max < min {
        return Err(format!("invalid range [{min}, {max}]"));
    }
    if points == 0 || points > MAX_POINTS {
        return Err(format!("points must be in 1..={MAX_POINTS}"));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points).map(|i| min + step * i as f64).collect())
}

pub fn curve(p: &CurveParams) -> Result<Curve, String> {
    let x = grid(p.min, p.max, p.points)?;
    let supported = p.support_pressure_kpa.is_some() || p.sweep == SweepParam::SupportPressure;
    let modes: &[TensionMode] = if supported {
        &TensionMode::QUASISTATIC
    } else {
        &TensionMode::ANALYTIC
    };
    let mut series: Vec<Series> = modes
        .iter()
        .map(|m| Series {
            mode: m.name(),
            lengths_m: Vec::with_capacity(x.len()),
        })
        .collect();
    for &v in &x {
        let (mut d, mut pr, mut gamma) = (p.diameter_cm, p.pressure_kpa, p.angle_deg);
        let mut ps = p.support_pressure_kpa.unwrap_or(0.0);
        match p.sweep {
            SweepParam::Gamma => gamma = v,
            SweepParam::Pressure => pr = v,
            SweepParam::Diameter => d = v,
            SweepParam::SupportPressure => ps = v,
        }
        let robot = RobotSpec::new(d / 100.0, pr * 1e3)
            .with_flap(p.flap_cm / 100.0)
            .with_eversion_force(p.fe);
        let scenario = GrowthScenario::from_degrees(gamma);
        for (s, &mode) in series.iter_mut().zip(modes) {
            let length = if supported {
                let supports = SupportSet::for_robot(robot.diameter, ps * 1e3);
                supported_collapse_length(&robot, &supports, &scenario, mode)
                    .map_err(|e| e.to_string())?
                    .length()
            } else {
                Some(collapse_length(&robot, &scenario, mode).map_err(|e| e.to_string())?)
            };
            s.lengths_m.push(length);
        }
    }
    Ok(Curve { x, series })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorParams {
    pub diameter_cm: f64,
    pub pressure_kpa: f64,
    #[serde(default)]
    pub fe: f64,
    pub actuator_pressure_kpa: f64,
    pub height_cm: f64,
    pub area_cm2: f64,
    pub mode: TensionMode,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActuatorCurve {
    pub xi_deg: Vec<f64>,
    pub moment_nm: Vec<f64>,
    /// Moment with the fold at a seal between pouches.
    pub between_pouch_nm: f64,
}

/// Collapse moment of a robot with one actuator as it is moved from the
/// underside (-90 deg) to the top (90 deg).
pub fn actuator_curve(p: &ActuatorParams) -> Result<ActuatorCurve, String> {
    let xi_deg = grid(-90.0, 90.0, p.points)?;
    let robot = RobotSpec::new(p.diameter_cm / 100.0, p.pressure_kpa * 1e3);
    let moment_nm = xi_deg
        .iter()
        .map(|&xi| {
            let a = Actuator::spm(
                p.height_cm / 100.0,
                p.actuator_pressure_kpa * 1e3,
                p.height_cm / 100.0,
                p.area_cm2 * 1e-4,
                xi.to_radians(),
            );
            comprehensive_collapse_moment(&robot, &ActuatorSet::new(vec![a]), p.fe, p.mode)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let between_pouch_nm =
        between_pouch_collapse_moment(&robot, p.fe, p.mode).map_err(|e| e.to_string())?;
    Ok(ActuatorCurve {
        xi_deg,
        moment_nm,
        between_pouch_nm,
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcParams {
    pub diameter_cm: f64,
    pub pressure_kpa: f64,
    #[serde(default)]
    pub fe: f64,
    pub length_m: f64,
    /// Launch angle above horizontal at the base.
    pub angle_deg: f64,
    /// Total downward turning from base to tip.
    pub bend_deg: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcResult {
    /// `[z, y]` pairs from base to tip (m).
    pub points: Vec<[f64; 2]>,
    pub report: MomentReport,
}

/// Points on a constant-curvature arc, base at the origin.
pub fn arc_points(length: f64, angle: f64, bend: f64, points: usize) -> Vec<[f64; 2]> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let s = length * i as f64 / (n - 1) as f64;
            if bend.abs() < 1e-12 {
                [s * angle.cos(), s * angle.sin()]
            } else {
                // Heading falls linearly with arc length.
                let kappa = bend / length;
                let heading = angle - kappa * s;
                [
                    (angle.sin() - heading.sin()) / kappa,
                    (heading.cos() - angle.cos()) / kappa,
                ]
            }
        })
        .collect()
}

pub fn arc(p: &ArcParams) -> Result<ArcResult, String> {
    if !(p.length_m > 0.0 && p.length_m.is_finite()) {
        return Err("length_m must be positive".into());
    }
    if p.points < 2 || p.points > MAX_POINTS {
        return Err(format!("points must be in 2..={MAX_POINTS}"));
    }
    let robot = RobotSpec::new(p.diameter_cm / 100.0, p.pressure_kpa * 1e3).with_eversion_force(p.fe);
    let points = arc_points(
        p.length_m,
        p.angle_deg.to_radians(),
        p.bend_deg.to_radians(),
        p.points,
    );
    let positions: Vec<[f64; 3]> = points.iter().map(|&[z, y]| [0.0, y, z]).collect();
    let trace = ShapeTrace::from_points(&positions, [0.0; 3]);
    let report = analyze_shape(
        &trace,
        &robot,
        &ActuatorSet::default(),
        p.fe,
        &TensionMode::QUASISTATIC,
        vine_collapse::statics::STANDARD_GRAVITY,
    )
    .map_err(|e| e.to_string())?;
    Ok(ArcResult { points, report })
}

fn call<P, R>(json: &str, f: impl Fn(&P) -> Result<R, String>) -> Result<String, JsValue>
where
    P: for<'de> Deserialize<'de>,
    R: Serialize,
{
    let params: P = serde_json::from_str(json).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let out = f(&params).map_err(|e| JsValue::from_str(&e))?;
    serde_json::to_string(&out).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = collapseCurve)]
pub fn collapse_curve_js(params: &str) -> Result<String, JsValue> {
    call(params, curve)
}

#[wasm_bindgen(js_name = actuatorCurve)]
pub fn actuator_curve_js(params: &str) -> Result<String, JsValue> {
    call(params, actuator_curve)
}

#[wasm_bindgen(js_name = arcMetric)]
pub fn arc_metric_js(params: &str) -> Result<String, JsValue> {
    call(params, arc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_curve_matches_closed_form() {
        let p: CurveParams = serde_json::from_str(
            r#"{"diameter_cm": 3.24, "pressure_kpa": 4.14, "flap_cm": 3, "fe": 1.4,
                "sweep": "gamma", "min": -60, "max": 80, "points": 8}"#,
        )
        .unwrap();
        let c = curve(&p).unwrap();
        assert_eq!(c.x.len(), 8);
        assert_eq!(c.series.len(), 4);
        let robot = RobotSpec::new(0.0324, 4140.0).with_flap(0.03).with_eversion_force(1.4);
        let expected =
            collapse_length(&robot, &GrowthScenario::from_degrees(20.0), TensionMode::Eversion).unwrap();
        assert!((c.series[1].lengths_m[4].unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn support_curve_rises() {
        let p: CurveParams = serde_json::from_str(
            r#"{"diameter_cm": 8.49, "pressure_kpa": 3.45, "sweep": "support_pressure",
                "min": 0, "max": 2.76, "points": 5}"#,
        )
        .unwrap();
        let c = curve(&p).unwrap();
        assert_eq!(c.series.len(), 3);
        let l: Vec<f64> = c.series[0].lengths_m.iter().map(|v| v.unwrap()).collect();
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn actuator_on_top_beats_actuator_below() {
        let p: ActuatorParams = serde_json::from_str(
            r#"{"diameter_cm": 4.85, "pressure_kpa": 3.45, "fe": 1.4, "actuator_pressure_kpa": 10,
                "height_cm": 1, "area_cm2": 1.5, "mode": "eversion", "points": 19}"#,
        )
        .unwrap();
        let c = actuator_curve(&p).unwrap();
        assert!(c.moment_nm[18] < c.moment_nm[0]);
        assert!(c.moment_nm.iter().all(|&m| m >= c.between_pouch_nm));
    }

    #[test]
    fn straight_arc_matches_weight_moment() {
        let p = ArcParams {
            diameter_cm: 2.43,
            pressure_kpa: 3.45,
            fe: 1.4,
            length_m: 0.6,
            angle_deg: 0.0,
            bend_deg: 0.0,
            points: 31,
        };
        let r = arc(&p).unwrap();
        let robot = RobotSpec::new(0.0243, 3450.0);
        let w = vine_collapse::weight_moment(&robot, &GrowthScenario::new(0.0), 0.6).unwrap();
        assert!((r.report.current_moment / w - 1.0).abs() < 1e-9);
    }

    #[test]
    fn arc_endpoint_has_right_chord() {
        let pts = arc_points(1.0, 0.0, std::f64::consts::PI, 101);
        let [z, y] = pts[100];
        // A half circle of length 1 ends two radii straight below the base.
        assert!(z.abs() < 1e-12);
        assert!((y + 2.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(grid(1.0, 0.0, 5).is_err());
        assert!(grid(0.0, 1.0, 0).is_err());
        assert!(arc(&ArcParams {
            diameter_cm: 2.43,
            pressure_kpa: 3.45,
            fe: 0.0,
            length_m: 0.0,
            angle_deg: 0.0,
            bend_deg: 0.0,
            points: 10,
        })
        .is_err());
    }
}
