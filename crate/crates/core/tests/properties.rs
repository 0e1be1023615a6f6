use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;
use vine_collapse::eversion::{fit_eversion_force, FeSample};
use vine_collapse::shape::{between_pouch_collapse_moment, key_metric_and_verdict, CollapseVariant};
use vine_collapse::statics::cross_section_area;
use vine_collapse::trace::{Marker, RawFrame};
use vine_collapse::*;

/// Plain bisection on the straight-robot moment balance, written from scratch
/// so it shares nothing with the library's solver.
fn oracle_length(robot: &RobotSpec, angle: f64, gravity: f64, moment: f64) -> f64 {
    if moment <= 0.0 {
        return 0.0;
    }
    let w = gravity * 2.0 * (PI * robot.diameter + robot.flap_width) * robot.material.thickness
        * robot.material.density;
    let f = |l: f64| w * l * (0.5 * robot.diameter * angle.sin() + 0.5 * l * angle.cos()) - moment;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn robot_strategy() -> impl Strategy<Value = RobotSpec> {
    (0.01..0.09f64, 2_000.0..28_000.0f64, 0.0..0.04f64, 0.0..10.0f64).prop_map(|(d, p, f, fe)| {
        RobotSpec::new(d, p).with_flap(f).with_eversion_force(fe)
    })
}

fn angle_strategy() -> impl Strategy<Value = f64> {
    (-65.0..85.0f64).prop_map(f64::to_radians)
}

fn mode_strategy() -> impl Strategy<Value = TensionMode> {
    prop::sample::select(TensionMode::ANALYTIC.to_vec())
}

proptest! {
    #[test]
    fn closed_form_matches_independent_bisection(
        robot in robot_strategy(),
        angle in angle_strategy(),
        mode in mode_strategy(),
    ) {
        let scenario = GrowthScenario::new(angle);
        let closed = collapse_length(&robot, &scenario, mode).unwrap();
        let moment = tension_adjusted_collapse_moment(
            robot.pressure, robot.diameter, robot.eversion_force(), mode).unwrap();
        let oracle = oracle_length(&robot, angle, scenario.gravity, moment);
        prop_assert!((closed - oracle).abs() / oracle.max(1e-6) < 1e-9, "{closed} vs {oracle}");
    }

    #[test]
    fn weight_balances_collapse_moment_at_collapse(
        robot in robot_strategy(),
        angle in angle_strategy(),
        mode in mode_strategy(),
    ) {
        let scenario = GrowthScenario::new(angle);
        let length = collapse_length(&robot, &scenario, mode).unwrap();
        prop_assume!(length > 0.0);
        let moment = tension_adjusted_collapse_moment(
            robot.pressure, robot.diameter, robot.eversion_force(), mode).unwrap();
        let weight = weight_moment(&robot, &scenario, length).unwrap();
        prop_assert!((weight - moment).abs() <= 1e-9 * moment.abs(), "{weight} vs {moment}");
    }

    #[test]
    fn tension_modes_are_ordered(robot in robot_strategy(), angle in angle_strategy()) {
        let scenario = GrowthScenario::new(angle);
        let l = |m| collapse_length(&robot, &scenario, m).unwrap();
        let (ev, avg, inv) = (l(TensionMode::Eversion), l(TensionMode::Average), l(TensionMode::Inversion));
        prop_assert!(ev >= avg && avg >= inv && inv >= 0.0);
        if robot.eversion_force() > 0.0 {
            prop_assert!(ev > avg);
            if inv > 0.0 {
                prop_assert!(avg > inv);
            }
        }
        let no_fe = robot.with_eversion_force(0.0);
        let l0 = |m| collapse_length(&no_fe, &scenario, m).unwrap();
        prop_assert_eq!(l0(TensionMode::Eversion), l0(TensionMode::Average));
        prop_assert_eq!(l0(TensionMode::Inversion), l0(TensionMode::Average));
    }

    #[test]
    fn eversion_minus_inversion_is_fe_d_over_2(
        p in 0.0..30_000.0f64, d in 0.005..0.1f64, fe in 0.0..20.0f64,
    ) {
        let m = |mode| tension_adjusted_collapse_moment(p, d, fe, mode).unwrap();
        let diff = m(TensionMode::Eversion) - m(TensionMode::Inversion);
        prop_assert!((diff - fe * d / 2.0).abs() <= 4.0 * f64::EPSILON * m(TensionMode::Eversion));
    }

    #[test]
    fn flat_flapless_reduction(d in 0.005..0.1f64, p in 100.0..30_000.0f64) {
        let robot = RobotSpec::new(d, p);
        let l = collapse_length(&robot, &GrowthScenario::new(0.0), TensionMode::NoTension).unwrap();
        let rho = robot.material.density;
        let t = robot.material.thickness;
        let expected = 0.5 * d * (p / (2.0 * rho * 9.81 * t)).sqrt();
        prop_assert!((l - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn longer_with_more_pressure_or_diameter(
        robot in robot_strategy(),
        angle in angle_strategy(),
        mode in mode_strategy(),
        dp in 0.0..5_000.0f64,
        scale in 1.0..1.5f64,
    ) {
        let scenario = GrowthScenario::new(angle);
        let base = collapse_length(&robot, &scenario, mode).unwrap();
        let mut pumped = robot;
        pumped.pressure += dp;
        prop_assert!(collapse_length(&pumped, &scenario, mode).unwrap() >= base);
        let mut wider = robot;
        wider.diameter *= scale;
        prop_assert!(collapse_length(&wider, &scenario, mode).unwrap() >= base * (1.0 - 1e-12));
    }

    #[test]
    fn fit_recovers_noiseless_force(
        fe in 0.1..30.0f64,
        diameters in prop::collection::vec(0.005..0.1f64, 1..8),
    ) {
        let samples: Vec<FeSample> = diameters
            .iter()
            .map(|&d| {
                let area = cross_section_area(d);
                FeSample::new(area, fe / area).unwrap()
            })
            .collect();
        let got = fit_eversion_force(&samples).unwrap();
        prop_assert!((got - fe).abs() <= 16.0 * f64::EPSILON * fe, "{got} vs {fe}");
    }

    #[test]
    fn actuator_pressure_only_adds_restoring_moment(
        robot in robot_strategy(),
        mode in mode_strategy(),
        pressure in 0.0..20_000.0f64,
        height in 0.0..0.03f64,
        area in 0.0..1e-3f64,
        angle in (-PI / 2.0)..(PI / 2.0),
    ) {
        let fe = robot.eversion_force();
        let spm = Actuator::spm(0.5 * robot.diameter, pressure, height, area, angle);
        let with = comprehensive_collapse_moment(&robot, &ActuatorSet::new(vec![spm]), fe, mode).unwrap();
        let without = between_pouch_collapse_moment(&robot, fe, mode).unwrap();
        // A negative body moment has no key metric; a longer lever only deepens it.
        prop_assume!(without > 0.0);
        prop_assert!(with >= without - 1e-12 * without.abs());
    }

    #[test]
    fn key_metric_ignores_common_scale(
        current in 1e-4..10.0f64,
        collapse in 1e-4..10.0f64,
        scale in 1e-3..1e3f64,
    ) {
        let metric = |c: f64, m: f64| {
            let variant = CollapseVariant {
                with_actuator_pressure: false,
                mode: TensionMode::Eversion,
                collapse_moment: m,
            };
            key_metric_and_verdict(c, &[variant]).unwrap().governing_variant().key_metric
        };
        let a = metric(current, collapse);
        let b = metric(current * scale, collapse * scale);
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn straight_traces_match_weight_moment(
        robot in robot_strategy(),
        angle in angle_strategy(),
        length in 0.05..2.0f64,
        cuts in prop::collection::vec(0.01..1.0f64, 1..30),
    ) {
        let mut stations: Vec<f64> = cuts.iter().map(|c| c * length).collect();
        stations.push(0.0);
        stations.push(length);
        stations.sort_by(f64::total_cmp);
        stations.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let (s, c) = angle.sin_cos();
        let d = robot.diameter;
        let points: Vec<[f64; 3]> = stations
            .iter()
            .map(|&a| [0.0, -0.5 * d * c + a * s, 0.5 * d * s + a * c])
            .collect();
        let trace = ShapeTrace::from_points(&points, [0.0; 3]);
        let shape = segment_trace(&trace).unwrap();
        let scenario = GrowthScenario::new(angle);
        let m = current_moment(&shape, &robot, &ActuatorSet::default(), &trace, scenario.gravity).unwrap();
        let analytic = weight_moment(&robot, &scenario, stations[stations.len() - 1]).unwrap();
        assert_relative_eq!(m, analytic, max_relative = 1e-10, epsilon = 1e-15);
    }

    #[test]
    fn trace_csv_round_trips(
        frames in prop::collection::vec(
            prop::collection::vec((any::<bool>(), -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64), 1..6),
            0..5,
        )
    ) {
        let frames: Vec<RawFrame> = frames
            .into_iter()
            .enumerate()
            .map(|(i, markers)| RawFrame {
                time: i as f64 * 0.0125,
                markers: markers
                    .into_iter()
                    .enumerate()
                    .map(|(id, (visible, x, y, z))| Marker {
                        led_id: id as u32,
                        position: [x, y, z],
                        visible,
                    })
                    .collect(),
            })
            .collect();
        let mut buffer = Vec::new();
        write_trace(&frames, &mut buffer).unwrap();
        prop_assert_eq!(parse_trace(buffer.as_slice()).unwrap(), frames);
    }

    #[test]
    fn alignment_undoes_rigid_motion(
        roll in -PI..PI, pitch in -1.5..1.5f64, yaw in -PI..PI,
        shift in prop::array::uniform3(-5.0..5.0f64),
        hidden in 1usize..5,
    ) {
        let rotation = Rotation3::from_euler_angles(roll, pitch, yaw);
        let shift = Vector3::from(shift);
        let offset = 0.11;
        let room = |p: [f64; 3], lift: f64| -> [f64; 3] {
            (rotation * Vector3::new(p[0], p[1] + lift, p[2]) + shift).into()
        };
        let truth: Vec<[f64; 3]> = (0..6).map(|i| [0.02, -0.05 + 0.03 * i as f64, 0.1 * i as f64]).collect();
        let mut markers = vec![
            Marker { led_id: 50, position: room([0.0; 3], 0.0), visible: true },
            Marker { led_id: 51, position: room([0.0, 0.0, 0.5], 0.0), visible: true },
            Marker { led_id: 52, position: room([0.3, 0.0, -0.1], 0.0), visible: true },
        ];
        for (i, p) in truth.iter().enumerate() {
            markers.push(Marker {
                led_id: i as u32,
                position: room(*p, offset),
                visible: i != hidden,
            });
        }
        let config = FrameConfig::new([50, 51, 52], (0..6).collect());
        let trace = align_and_clean(&[RawFrame { time: 0.0, markers }], &config, 0).unwrap();
        for (sample, want) in trace.samples.iter().zip(&truth) {
            for k in 0..3 {
                prop_assert!((sample.position[k] - want[k]).abs() < 1e-9);
            }
        }
    }
}
