use pneusoft::config::Config;
use pneusoft::pneumatics::PneumaticPlant;
use pneusoft::robots::*;
use proptest::prelude::*;

fn spec_grid() -> Vec<f64> {
    parse_grid("0.2:1.6:0.1").unwrap()
}

/// Sign changes of the discrete derivative, ignoring flat steps.
fn slope_sign_changes(values: &[f64]) -> usize {
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > 1e-12)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

#[test]
fn earthworm_curve_rises_peaks_and_stalls() {
    let cfg = Config::default();
    let sweep = earthworm_speed_sweep(&cfg.earthworm().unwrap(), &cfg.plant().unwrap(), &spec_grid(), 40.0).unwrap();
    let speeds: Vec<f64> = sweep.iter().map(|s| s.1).collect();
    assert!(speeds.iter().all(|&v| v >= 0.0));
    assert_eq!(slope_sign_changes(&speeds), 1);
    let (f, v) = speed_peak(&sweep).unwrap();
    assert!((f - 0.8).abs() <= 0.1 + 1e-12, "peak at {f} Hz");
    assert!((v - 16.0).abs() <= 0.2 * 16.0, "peak {v} mm/s");
    assert!(sweep.iter().filter(|s| s.0 >= 1.3 - 1e-9).all(|s| s.1 == 0.0));
}

#[test]
fn ideal_venting_gives_monotone_speed() {
    let cfg = Config::default();
    let model = cfg.earthworm().unwrap();
    let plant = PneumaticPlant::new(40.0, cfg.f64("pneumatics.tau_fill_s").unwrap(), 1e-9).unwrap();
    let sweep = earthworm_speed_sweep(&model, &plant, &spec_grid(), 40.0).unwrap();
    assert!(sweep.windows(2).all(|w| w[1].1 >= w[0].1), "{sweep:?}");
}

#[test]
fn stall_mass_reproduces_the_loaded_walk() {
    let cfg = Config::default();
    let model = cfg.quadruped().unwrap();
    let v = quad_walk(&model, 50.0, 80.0, 9.0).unwrap().mean_speed;
    assert!((v - 10.0).abs() <= 0.3 * 10.0, "{v} mm/s");
}

#[test]
fn quad_speed_strictly_increases_with_pressure_unloaded() {
    let model = Config::default().quadruped().unwrap();
    let grid = parse_grid("10:50:5").unwrap();
    let v: Vec<f64> = grid.iter().map(|&p| model.speed(p, 0.0)).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
}

#[test]
fn gripper_tape_ratio_and_limits() {
    let g = Config::default().gripper().unwrap();
    let d = g.reference_diameter;
    for m in [50.0, 100.0, 150.0, 200.0] {
        let plain = min_grasp_pressure(&g.with_tape(false), m, d).unwrap().kpa().unwrap();
        let tape = min_grasp_pressure(&g.with_tape(true), m, d).unwrap().kpa().unwrap();
        assert!((tape / plain - 0.35).abs() <= 0.10, "{m} g: ratio {}", tape / plain);
    }
    let plain_max = max_liftable_mass(&g.with_tape(false), 40.0).unwrap();
    assert!((plain_max - 200.0).abs() <= 0.05 * 200.0, "{plain_max} g");
    assert!(max_liftable_mass(&g.with_tape(true), 40.0).unwrap() >= 267.0);
    assert_eq!(min_grasp_pressure(&g.with_tape(false), 267.0, d).unwrap(), GraspPressure::Infeasible);
    assert!(min_grasp_pressure(&g.with_tape(false), 200.0, d).unwrap().kpa().is_some());
    let p = min_grasp_pressure(&g.with_tape(true), 267.0, d).unwrap().kpa().unwrap();
    assert!(p <= 40.0);
}

#[test]
fn gripper_csv_marks_infeasible_rows() {
    let g = Config::default().gripper().unwrap();
    let csv = grasp_pressure_csv(&g, &[0.0, 300.0], 70.0).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "mass_g,p_min_plain_kPa,p_min_tape_kPa");
    assert_eq!(rows[1], "0.0000,1.750000,1.750000");
    assert!(rows[2].starts_with("300.0000,nan,"));
}

fn earthworm(mu_high: f64, mu_low: f64, stiffness: f64) -> EarthwormModel {
    let mut m = Config::default().earthworm().unwrap();
    m.mu_high = mu_high;
    m.mu_low = mu_low;
    m.actuator_stiffness = stiffness;
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_friction_never_moves(mu in 0.05..1.5f64, f in 0.05..3.0f64, k in 0.05..2.0f64) {
        let m = earthworm(mu, mu, k);
        prop_assert_eq!(earthworm_cycle(&m, &PneumaticPlant::default(), f, 40.0).unwrap(), 0.0);
    }

    #[test]
    fn reversing_one_friction_rule_reverses_motion(
        hi in 0.2..1.5f64,
        lo in 0.05..0.2f64,
        f in 0.05..3.0f64,
    ) {
        let m = earthworm(hi, lo, 0.16);
        let plant = PneumaticPlant::default();
        let d = earthworm_cycle(&m, &plant, f, 40.0).unwrap();
        prop_assert_eq!(earthworm_cycle(&m.mirrored(), &plant, f, 40.0).unwrap(), -d);
        let flipped = EarthwormModel { switch: m.switch.reversed(), ..m.clone() };
        prop_assert_eq!(earthworm_cycle(&flipped, &plant, f, 40.0).unwrap(), -d);
        let both = EarthwormModel { switch: m.switch.reversed(), ..m.mirrored() };
        prop_assert_eq!(earthworm_cycle(&both, &plant, f, 40.0).unwrap(), d);
    }

    #[test]
    fn earthworm_speed_is_unimodal(
        tf in 0.05..0.5f64,
        extra in 0.01..0.5f64,
        k in 0.05..2.0f64,
    ) {
        let plant = PneumaticPlant::new(40.0, tf, tf + extra).unwrap();
        let m = earthworm(0.8, 0.3, k);
        let speeds: Vec<f64> = earthworm_speed_sweep(&m, &plant, &spec_grid(), 40.0)
            .unwrap()
            .iter()
            .map(|s| s.1)
            .collect();
        prop_assert!(speeds.iter().all(|&v| v >= 0.0));
        prop_assert!(slope_sign_changes(&speeds) <= 1, "{:?}", speeds);
    }

    #[test]
    fn quad_speed_monotone_in_pressure_and_load(
        p in 0.0..60.0f64,
        dp in 0.0..20.0f64,
        m in 0.0..300.0f64,
        dm in 0.0..100.0f64,
    ) {
        let model = Config::default().quadruped().unwrap();
        prop_assert!(model.speed(p + dp, m) >= model.speed(p, m));
        prop_assert!(model.speed(p, m + dm) <= model.speed(p, m));
        prop_assert!(model.speed(p, m) >= 0.0);
    }

    #[test]
    fn quad_derating_bounds(m in 0.0..1e4f64) {
        let model = Config::default().quadruped().unwrap();
        let d = model.load_derating(m);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(model.load_derating(0.0), 1.0);
    }

    #[test]
    fn grasp_pressure_is_affine_in_mass(
        m1 in 0.0..150.0f64,
        m2 in 0.0..150.0f64,
        tape in any::<bool>(),
        d in 30.0..90.0f64,
    ) {
        let g = Config::default().gripper().unwrap().with_tape(tape);
        let p = |m: f64| min_grasp_pressure(&g, m, d).unwrap().kpa().unwrap();
        let mid = p(0.5 * (m1 + m2));
        prop_assert!((mid - 0.5 * (p(m1) + p(m2))).abs() <= 1e-9 * (1.0 + mid));
    }

    #[test]
    fn feasible_at_forty_stays_feasible_above(
        m in 0.0..400.0f64,
        tape in any::<bool>(),
        extra in 0.0..60.0f64,
    ) {
        let g = Config::default().gripper().unwrap().with_tape(tape);
        let d = g.reference_diameter;
        let held_at = |p: f64| g.holding_force(p, d) >= m * 1e-3 * GRAVITY;
        if held_at(40.0) {
            prop_assert!(held_at(40.0 + extra));
        }
        prop_assert!(max_liftable_mass(&g, 40.0 + extra).unwrap() >= max_liftable_mass(&g, 40.0).unwrap());
    }

    #[test]
    fn table_eval_is_monotone(a in 0.0..100.0f64, b in 0.0..100.0f64) {
        let t = LookupTable::parse("0:0, 6:0, 12:23.7").unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(t.eval(lo) <= t.eval(hi));
    }
}
