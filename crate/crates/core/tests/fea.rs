use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use pneusoft::fea::*;
use pneusoft::material::{pk2_stress, DeformationState, HyperelasticParams};
use pneusoft::mesh::template::block_mesh;
use pneusoft::mesh::{generate_mesh, ActuatorSpec, Mesh, Point, CAVITY_SET};
use proptest::prelude::*;

fn params() -> HyperelasticParams {
    HyperelasticParams::default()
}

/// Smooth field `u(X) = A X + b sin(X·k)` sampled at the nodes.
fn smooth_field(mesh: &Mesh, a: &Matrix3<f64>, b: &Vector3<f64>, k: &Vector3<f64>) -> Vec<f64> {
    let mut u = vec![0.0; 3 * mesh.node_count()];
    for (n, x) in mesh.nodes.iter().enumerate() {
        let d = a * x + b * x.dot(k).sin();
        u[3 * n..3 * n + 3].copy_from_slice(d.as_slice());
    }
    u
}

fn rel_max(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

#[test]
fn internal_force_is_the_energy_gradient() {
    let mesh = block_mesh(2.0, 1.0, 3.0, 1.0).unwrap();
    let u = smooth_field(
        &mesh,
        &Matrix3::new(0.05, 0.02, 0.0, -0.01, 0.03, 0.02, 0.01, 0.0, -0.04),
        &Vector3::new(0.02, -0.01, 0.03),
        &Vector3::new(0.7, 0.3, 0.5),
    );
    let f = internal_force(&mesh, &params(), &u).unwrap();
    let h = 1e-7;
    let mut fd = vec![0.0; u.len()];
    for d in 0..u.len() {
        let (mut up, mut um) = (u.clone(), u.clone());
        up[d] += h;
        um[d] -= h;
        fd[d] = (total_energy(&mesh, &params(), &up).unwrap() - total_energy(&mesh, &params(), &um).unwrap()) / (2.0 * h);
    }
    assert!(rel_max(&f, &fd) < 1e-5, "{}", rel_max(&f, &fd));
}

#[test]
fn tangent_is_the_force_derivative() {
    let mesh = block_mesh(2.0, 1.0, 3.0, 1.0).unwrap();
    let u = smooth_field(
        &mesh,
        &Matrix3::new(0.1, 0.0, 0.05, 0.02, -0.05, 0.0, 0.0, 0.03, 0.08),
        &Vector3::new(0.05, 0.02, -0.02),
        &Vector3::new(0.4, 0.9, 0.2),
    );
    let k = tangent_stiffness(&mesh, &params(), &u).unwrap();
    let dir: Vec<f64> = (0..u.len()).map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.5).collect();
    let h = 1e-6;
    let shifted = |s: f64| -> Vec<f64> { u.iter().zip(&dir).map(|(a, b)| a + s * b).collect() };
    let fp = internal_force(&mesh, &params(), &shifted(h)).unwrap();
    let fm = internal_force(&mesh, &params(), &shifted(-h)).unwrap();
    let fd: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
    assert!(rel_max(&k.matvec(&dir), &fd) < 1e-5);
}

#[test]
fn rigid_motion_is_force_free() {
    let mesh = block_mesh(2.0, 1.0, 3.0, 0.5).unwrap();
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(1.0, 2.0, -0.5)), 1.1);
    let t = Vector3::new(3.0, -1.0, 2.0);
    let mut u = vec![0.0; 3 * mesh.node_count()];
    for (n, x) in mesh.nodes.iter().enumerate() {
        let d = r * x + t - x;
        u[3 * n..3 * n + 3].copy_from_slice(d.as_slice());
    }
    let f = internal_force(&mesh, &params(), &u).unwrap();
    assert!(f.iter().all(|v| v.abs() < 1e-10), "{:e}", f.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    assert!(total_energy(&mesh, &params(), &u).unwrap().abs() < 1e-10);
}

#[test]
fn patch_test_reproduces_homogeneous_stress() {
    let mesh = block_mesh(2.0, 2.0, 2.0, 1.0).unwrap();
    let f = Matrix3::new(1.08, -0.03, 0.02, 0.04, 0.97, -0.05, 0.01, 0.06, 1.03);
    let mut lc = LoadCase::new(0.0).with_increments(3).with_fixed_set(None);
    let boundary = mesh.node_set("boundary").unwrap();
    assert!(boundary.len() < mesh.node_count(), "the patch needs free interior nodes");
    for &n in boundary {
        let d = (f - Matrix3::identity()) * mesh.nodes[n];
        for k in 0..3 {
            lc = lc.prescribe(3 * n + k, d[k]);
        }
    }
    let tight = NewtonSettings {
        rel_tol: 1e-12,
        abs_tol: 1e-11,
        ..NewtonSettings::default()
    };
    let sol = solve_with(&mesh, &params(), &lc, &tight).unwrap();
    let u = &sol.last().displacement;
    // Interior nodes land on the affine map.
    for n in 0..mesh.node_count() {
        let exact = (f - Matrix3::identity()) * mesh.nodes[n];
        for k in 0..3 {
            assert!((u[3 * n + k] - exact[k]).abs() < 1e-12);
        }
    }
    let model = Model::new(&mesh, params()).unwrap();
    let s_ref = pk2_stress(&params(), &DeformationState::new(f).unwrap()).unwrap();
    for e in 0..mesh.element_count() {
        for q in 0..4 {
            let s = pk2_stress(&params(), &DeformationState::new(model.deformation_gradient(e, q, u)).unwrap()).unwrap();
            assert!((s - s_ref).abs().max() <= 1e-10 * s_ref.abs().max());
        }
    }
}

#[test]
fn zero_pressure_gives_one_zero_row() {
    let mesh = generate_mesh(&ActuatorSpec::bending2(), 4.0).unwrap();
    let sol = solve(&mesh, &params(), &LoadCase::new(0.0)).unwrap();
    let csv = solution_csv(&mesh, &sol).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows, [CSV_HEADER, "0,0.000000,0.000000,0.000000,0.000000"]);
}

#[test]
fn invalid_load_cases_are_rejected() {
    let mesh = block_mesh(1.0, 1.0, 1.0, 1.0).unwrap();
    assert!(matches!(
        solve(&mesh, &params(), &LoadCase::new(10.0)),
        Err(FeaError::Mesh(_))
    ));
    assert!(matches!(
        solve(&mesh, &params(), &LoadCase::new(-1.0)),
        Err(FeaError::InvalidLoadCase(_))
    ));
    assert!(matches!(
        solve(&mesh, &params(), &LoadCase::new(1.0).with_increments(0)),
        Err(FeaError::InvalidLoadCase(_))
    ));
}

fn cavity_mesh() -> Mesh {
    generate_mesh(&ActuatorSpec::bending2(), 4.0).unwrap()
}

fn deformed(mesh: &Mesh, u: &[f64]) -> Vec<Point> {
    mesh.nodes
        .iter()
        .enumerate()
        .map(|(n, x)| x + Vector3::new(u[3 * n], u[3 * n + 1], u[3 * n + 2]))
        .collect()
}

#[test]
fn pressure_force_does_virtual_work_on_the_cavity_volume() {
    // f · δu = p δV for a follower pressure on a closed cavity.
    let mesh = cavity_mesh();
    let u = smooth_field(
        &mesh,
        &Matrix3::new(0.05, 0.0, 0.02, 0.01, 0.1, 0.0, -0.02, 0.03, 0.04),
        &Vector3::new(0.3, -0.2, 0.4),
        &Vector3::new(0.1, 0.2, 0.15),
    );
    let p_kpa = 30.0;
    let f = pressure_force(&mesh, CAVITY_SET, p_kpa, &u).unwrap();
    let dir: Vec<f64> = (0..u.len()).map(|i| ((i * 104729) % 17) as f64 / 17.0 - 0.5).collect();
    // The volume is a cubic in the step, so this stencil is exact and h can
    // be large enough to keep roundoff out.
    let h = 0.1;
    let vol = |s: f64| {
        let v: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + s * b).collect();
        mesh.enclosed_volume(CAVITY_SET, Some(&deformed(&mesh, &v))).unwrap()
    };
    let dv = (8.0 * (vol(h) - vol(-h)) - (vol(2.0 * h) - vol(-2.0 * h))) / (12.0 * h);
    let work: f64 = f.iter().zip(&dir).map(|(a, b)| a * b).sum();
    assert!((work - p_kpa * KPA * dv).abs() <= 1e-6 * work.abs(), "{work} vs {}", p_kpa * KPA * dv);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_cavity_pressure_has_no_resultant(
        a in prop::array::uniform9(-0.15..0.15f64),
        b in prop::array::uniform3(-1.0..1.0f64),
        k in prop::array::uniform3(-0.3..0.3f64),
        p in 1.0..100.0f64,
    ) {
        let mesh = cavity_mesh();
        let u = smooth_field(&mesh, &Matrix3::from_row_slice(&a), &Vector3::from(b), &Vector3::from(k));
        let f = pressure_force(&mesh, CAVITY_SET, p, &u).unwrap();
        let x = deformed(&mesh, &u);
        let (mut total, mut moment) = (Vector3::zeros(), Vector3::zeros());
        for (n, xn) in x.iter().enumerate() {
            let fn_ = Vector3::new(f[3 * n], f[3 * n + 1], f[3 * n + 2]);
            total += fn_;
            moment += xn.cross(&fn_);
        }
        let area = mesh.face_set_normal_sum(CAVITY_SET, Some(&x)).unwrap().1;
        let pa = p * KPA * area;
        let (lo, hi) = mesh.bounding_box();
        prop_assert!(total.norm() < 1e-8 * pa);
        prop_assert!(moment.norm() < 1e-8 * pa * (hi - lo).norm());
    }
}
