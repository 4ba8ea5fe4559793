mod common;

use nalgebra::{Matrix3, Rotation3, Vector3};
use pneusoft::material::*;
use pneusoft::verify::cylinder_bore_fea;
use proptest::prelude::*;

fn params() -> HyperelasticParams {
    HyperelasticParams::with_kappa_ratio(0.24, 1000.0)
}

fn energy(p: &HyperelasticParams, f: &Matrix3<f64>) -> f64 {
    strain_energy(p, &DeformationState::new(*f).unwrap()).unwrap()
}

/// Deformation gradient with `J` drawn from roughly `[0.8, 1.2]`.
fn gradient() -> impl Strategy<Value = Matrix3<f64>> {
    (prop::array::uniform9(-0.25..0.25f64), 0.8..1.2f64).prop_filter_map("inverted", |(a, j)| {
        let f = Matrix3::identity() + Matrix3::from_row_slice(&a);
        let det = f.determinant();
        (det > 0.2).then(|| f * (j / det).cbrt())
    })
}

fn rotation() -> impl Strategy<Value = Matrix3<f64>> {
    (prop::array::uniform3(-1.0..1.0f64), 0.0..std::f64::consts::PI).prop_filter_map("axis", |(a, ang)| {
        let axis = Vector3::from(a);
        (axis.norm() > 1e-3).then(|| *Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), ang).matrix())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cauchy_stress_is_the_pushed_forward_energy_gradient(f in gradient()) {
        let p = params();
        let h = 1e-6;
        let mut dwdf = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let (mut a, mut b) = (f, f);
                a[(i, j)] += h;
                b[(i, j)] -= h;
                dwdf[(i, j)] = (energy(&p, &a) - energy(&p, &b)) / (2.0 * h);
            }
        }
        let sigma_fd = dwdf * f.transpose() / f.determinant();
        let sigma = cauchy_stress(&p, &DeformationState::new(f).unwrap()).unwrap();
        let scale = sigma.abs().max().max(p.c10);
        prop_assert!((sigma - sigma_fd).abs().max() <= 1e-6 * scale);
    }

    #[test]
    fn tangent_is_the_stress_derivative(f in gradient(), dir in prop::array::uniform9(-1.0..1.0f64)) {
        // dS along a random symmetric direction of E, via F(t) = F + t·F·A
        // with A chosen so that dE = sym(Fᵀ F A) is the probe direction.
        let p = params();
        let a = Matrix3::from_row_slice(&dir);
        let state = DeformationState::new(f).unwrap();
        let h = 1e-6;
        let s_at = |t: f64| pk2_stress(&p, &DeformationState::new(f + f * a * t).unwrap()).unwrap();
        let ds_fd = (s_at(h) - s_at(-h)) / (2.0 * h);
        let c = f.transpose() * f;
        let de = (c * a + a.transpose() * c) * 0.5;
        let ds = material_tangent(&p, &state).unwrap().contract(&de);
        let scale = ds.abs().max().max(1e-3);
        prop_assert!((ds - ds_fd).abs().max() <= 1e-5 * scale, "{ds} vs {ds_fd}");
    }

    #[test]
    fn energy_is_isotropic_and_objective(f in gradient(), q in rotation()) {
        let p = params();
        let w = energy(&p, &f);
        prop_assert!((energy(&p, &(f * q)) - w).abs() <= 1e-12 * (1.0 + w.abs()));
        prop_assert!((energy(&p, &(q * f)) - w).abs() <= 1e-12 * (1.0 + w.abs()));
        let s = pk2_stress(&p, &DeformationState::new(f).unwrap()).unwrap();
        let s_rot = pk2_stress(&p, &DeformationState::new(q * f).unwrap()).unwrap();
        prop_assert!((s - s_rot).abs().max() <= 1e-9 * (1.0 + s.abs().max()));
    }

    #[test]
    fn tangent_has_major_and_minor_symmetry(f in gradient()) {
        let d = material_tangent(&params(), &DeformationState::new(f).unwrap()).unwrap();
        let v = d.voigt();
        prop_assert!((v - v.transpose()).abs().max() <= 1e-9 * v.abs().max());
    }
}

/// Axial Cauchy stress under uniaxial tension with free lateral faces.
fn uniaxial_axial_stress(p: &HyperelasticParams, lambda: f64) -> f64 {
    let lateral = |s: f64| {
        let f = Matrix3::from_diagonal(&Vector3::new(lambda, s, s));
        cauchy_stress(p, &DeformationState::new(f).unwrap()).unwrap()
    };
    let (mut lo, mut hi) = (0.1, 1.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lateral(mid)[(1, 1)] > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lateral(0.5 * (lo + hi))[(0, 0)]
}

#[test]
fn penalty_limit_approaches_incompressible_uniaxial_stress() {
    for lambda in [1.2, 1.5, 2.0] {
        let exact = 2.0 * 0.24 * (lambda * lambda - 1.0 / lambda);
        let mut prev = f64::INFINITY;
        for ratio in [10.0, 100.0, 1000.0, 10000.0] {
            let s = uniaxial_axial_stress(&HyperelasticParams::with_kappa_ratio(0.24, ratio), lambda);
            let err = (s - exact).abs() / exact;
            assert!(err < prev, "λ {lambda}, ratio {ratio}: error {err} did not shrink");
            prev = err;
            if ratio == 1000.0 {
                assert!(err < 0.01, "λ {lambda}: {err}");
            }
        }
    }
}

#[test]
fn calibration_recovers_synthetic_c10() {
    // Forward model: FEA bore expansion of the plane-strain cylinder.
    let forward = |c10: f64, p: f64| -> Result<f64, String> {
        let rows = cylinder_bore_fea(&HyperelasticParams::with_kappa_ratio(c10, 1000.0), 1.0, p, 3)
            .map_err(|e| e.to_string())?;
        Ok(rows.last().unwrap().1 - 5.0)
    };
    let obs: Vec<(f64, f64)> = [50.0, 100.0]
        .iter()
        .map(|&p| (p, forward(0.30, p).unwrap()))
        .collect();
    let fit = calibrate_c10(&obs, forward, CalibrationBounds::default()).unwrap();
    assert!((fit.c10 - 0.30).abs() <= 0.003, "{fit:?}");
    assert!(!fit.bound_hit);
}

#[test]
fn closed_form_cylinder_calibrates_to_the_generating_value() {
    // Independent route: the incompressible closed form as forward model.
    let forward = |c10: f64, p: f64| -> Result<f64, String> {
        Ok(common::cylinder_bore_radius(2.0 * c10, 5.0, 10.0, p * 1e-3) - 5.0)
    };
    let obs = [(60.0, forward(0.24, 60.0).unwrap())];
    let fit = calibrate_c10(&obs, forward, CalibrationBounds::default()).unwrap();
    assert!((fit.c10 - 0.24).abs() <= 1e-3);
    assert!(fit.residual < 1e-8);
}
