//! Built-in oracle suite run by `pneusoft verify`.
//!
//! Each check is self-contained and reports a pass flag with a one-line
//! detail. The quick subset skips the cylinder solve.

use nalgebra::{Cholesky, Matrix3, Vector3, Vector6};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::fea::{pressure_force, pressure_resultant, solve_with, FeaError, LoadCase, Model, NewtonSettings};
use crate::material::{material_tangent, pk2_stress, strain_energy, DeformationState, HyperelasticParams, VOIGT};
use crate::mesh::template::{block_mesh, cylinder_slab_mesh};
use crate::mesh::{generate_mesh, ActuatorSpec, Mesh, CAVITY_SET};

/// Closed-form bore radius of the thick-walled cylinder, `pressure_kPa,bore_radius_mm`.
pub const CYLINDER_ORACLE: &str = include_str!("../fixtures/cylinder_oracle.csv");

/// Reference bore and outer radii of the cylinder fixture, mm.
pub const CYLINDER_RADII: (f64, f64) = (5.0, 10.0);

pub const GRADIENT_STATES: usize = 100;
pub const STRESS_TOL: f64 = 1e-6;
pub const TANGENT_TOL: f64 = 1e-5;
pub const PATCH_TOL: f64 = 1e-10;
pub const RESULTANT_TOL: f64 = 1e-8;
/// Largest `|J − 1|` accepted under a 1.5 uniaxial stretch.
pub const VOLUME_TOL: f64 = 1e-2;
/// Relative tolerance on the bore expansion.
pub const CYLINDER_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }

    fn failed(name: &'static str, e: impl std::fmt::Display) -> Self {
        CheckResult::new(name, false, format!("error: {e}"))
    }
}

/// Runs the suite with the given material. `quick` skips the checks that
/// need a full nonlinear solve.
pub fn run_verify(params: &HyperelasticParams, quick: bool) -> Vec<CheckResult> {
    let mut out = vec![
        gradient_check(params, GRADIENT_STATES, 7),
        patch_check(params),
        resultant_check(),
        incompressibility_check(params),
    ];
    if !quick {
        out.push(cylinder_check(params));
    }
    out
}

fn random_f(rng: &mut StdRng) -> Matrix3<f64> {
    loop {
        let f = Matrix3::identity() + Matrix3::from_fn(|_, _| rng.random_range(-0.3..0.3));
        if f.determinant() > 0.3 {
            return f;
        }
    }
}

/// Largest relative error of stress against a central difference of the
/// energy, and of the tangent against a central difference of the stress,
/// over `states` random deformations.
pub fn gradient_errors(params: &HyperelasticParams, states: usize, seed: u64) -> Result<(f64, f64), FeaError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut es, mut et) = (0.0f64, 0.0f64);
    for _ in 0..states {
        let f = random_f(&mut rng);
        let state = DeformationState::new(f)?;
        let s = pk2_stress(params, &state)?;
        let p = f * s;
        let h = 1e-6;
        let mut p_fd = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut fp = f;
                let mut fm = f;
                fp[(i, j)] += h;
                fm[(i, j)] -= h;
                let wp = strain_energy(params, &DeformationState::new(fp)?)?;
                let wm = strain_energy(params, &DeformationState::new(fm)?)?;
                p_fd[(i, j)] = (wp - wm) / (2.0 * h);
            }
        }
        es = es.max((p - p_fd).abs().max() / p.abs().max().max(params.c10));

        let d = material_tangent(params, &state)?;
        let c = f.transpose() * f;
        let mut d_fd = nalgebra::Matrix6::zeros();
        let h = 1e-6;
        for (col, &(a, b)) in VOIGT.iter().enumerate() {
            let mut dc = Matrix3::zeros();
            if a == b {
                dc[(a, a)] = 2.0 * h;
            } else {
                dc[(a, b)] = h;
                dc[(b, a)] = h;
            }
            let sp = stress_of_c(params, &(c + dc))?;
            let sm = stress_of_c(params, &(c - dc))?;
            d_fd.set_column(col, &((to_voigt(&sp) - to_voigt(&sm)) / (2.0 * h)));
        }
        let dv = d.voigt();
        et = et.max((dv - d_fd).abs().max() / dv.abs().max());
    }
    Ok((es, et))
}

fn stress_of_c(params: &HyperelasticParams, c: &Matrix3<f64>) -> Result<Matrix3<f64>, FeaError> {
    let l = Cholesky::new(*c)
        .ok_or_else(|| FeaError::Measurement("perturbed C is not positive definite".into()))?
        .l();
    Ok(pk2_stress(params, &DeformationState::new(l.transpose())?)?)
}

fn to_voigt(s: &Matrix3<f64>) -> Vector6<f64> {
    Vector6::from_fn(|a, _| s[VOIGT[a]])
}

fn gradient_check(params: &HyperelasticParams, states: usize, seed: u64) -> CheckResult {
    const NAME: &str = "constitutive gradients";
    match gradient_errors(params, states, seed) {
        Ok((es, et)) => CheckResult::new(
            NAME,
            es <= STRESS_TOL && et <= TANGENT_TOL,
            format!("{states} states, stress err {es:.2e} (tol {STRESS_TOL:e}), tangent err {et:.2e} (tol {TANGENT_TOL:e})"),
        ),
        Err(e) => CheckResult::failed(NAME, e),
    }
}

/// Largest relative deviation of the quadrature-point stress from the
/// homogeneous stress after solving a two-cell block whose boundary follows
/// the affine map `x = F X`.
pub fn patch_error(params: &HyperelasticParams, f: &Matrix3<f64>) -> Result<f64, FeaError> {
    let mesh = block_mesh(2.0, 2.0, 2.0, 1.0)?;
    let mut lc = LoadCase::new(0.0).with_increments(4).with_fixed_set(None);
    for &n in mesh.node_set("boundary")? {
        let u = (f - Matrix3::identity()) * mesh.nodes[n];
        for k in 0..3 {
            lc = lc.prescribe(3 * n + k, u[k]);
        }
    }
    let settings = NewtonSettings {
        rel_tol: 1e-12,
        abs_tol: 1e-11,
        ..NewtonSettings::default()
    };
    let sol = solve_with(&mesh, params, &lc, &settings)?;
    let u = &sol.last().displacement;
    let s_ref = pk2_stress(params, &DeformationState::new(*f)?)?;
    let model = Model::new(&mesh, *params)?;
    let mut err = 0.0f64;
    for e in 0..mesh.element_count() {
        for q in 0..4 {
            let fq = model.deformation_gradient(e, q, u);
            let s = pk2_stress(params, &DeformationState::new(fq)?)?;
            err = err.max((s - s_ref).abs().max() / s_ref.abs().max());
        }
    }
    Ok(err)
}

fn patch_check(params: &HyperelasticParams) -> CheckResult {
    const NAME: &str = "patch test";
    let f = Matrix3::new(1.10, 0.05, -0.02, 0.03, 0.95, 0.04, -0.01, 0.02, 1.02);
    match patch_error(params, &f) {
        Ok(err) => CheckResult::new(NAME, err <= PATCH_TOL, format!("stress deviation {err:.2e} (tol {PATCH_TOL:e})")),
        Err(e) => CheckResult::failed(NAME, e),
    }
}

/// Smooth non-affine displacement used to deform a cavity before
/// integrating the pressure over it.
pub fn wavy_displacement(mesh: &Mesh, amplitude: f64) -> Vec<f64> {
    let mut u = vec![0.0; 3 * mesh.node_count()];
    for (n, x) in mesh.nodes.iter().enumerate() {
        let d = Vector3::new(
            (x.z / 9.0).sin() + 0.3 * x.y,
            (x.x / 5.0).cos() * (x.z / 13.0).sin(),
            0.2 * x.x - (x.y / 7.0).sin(),
        ) * amplitude;
        u[3 * n..3 * n + 3].copy_from_slice(d.as_slice());
    }
    u
}

/// Resultant force and moment of the cavity pressure on a deformed actuator,
/// each relative to `p·A` (moment additionally divided by the mesh size).
pub fn cavity_resultant(mesh: &Mesh, p_kpa: f64, u: &[f64]) -> Result<(f64, f64), FeaError> {
    let f = pressure_force(mesh, CAVITY_SET, p_kpa, u)?;
    let (total, moment) = pressure_resultant(mesh, &f, u);
    let area = crate::fea::pressure::face_set_area(mesh, CAVITY_SET, u)?;
    let (lo, hi) = mesh.bounding_box();
    let scale = p_kpa * crate::fea::KPA * area;
    Ok((total.norm() / scale, moment.norm() / (scale * (hi - lo).norm())))
}

fn resultant_check() -> CheckResult {
    const NAME: &str = "closed-cavity resultant";
    let run = || -> Result<(f64, f64), FeaError> {
        let mesh = generate_mesh(&ActuatorSpec::bending2(), 2.0)?;
        let u = wavy_displacement(&mesh, 1.5);
        cavity_resultant(&mesh, 60.0, &u)
    };
    match run() {
        Ok((f, m)) => CheckResult::new(
            NAME,
            f <= RESULTANT_TOL && m <= RESULTANT_TOL,
            format!("|F|/pA {f:.2e}, |M|/pAL {m:.2e} (tol {RESULTANT_TOL:e})"),
        ),
        Err(e) => CheckResult::failed(NAME, e),
    }
}

/// Volume ratio of a material point stretched by `stretch` along x with
/// traction-free lateral faces.
pub fn uniaxial_volume_ratio(params: &HyperelasticParams, stretch: f64) -> Result<f64, FeaError> {
    let lateral_stress = |s: f64| -> Result<f64, FeaError> {
        let f = Matrix3::from_diagonal(&Vector3::new(stretch, s, s));
        Ok(pk2_stress(params, &DeformationState::new(f)?)?[(1, 1)])
    };
    // Lateral PK2 stress grows with the lateral stretch; bracket and bisect.
    let (mut lo, mut hi) = (1e-3, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lateral_stress(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok(stretch * s * s)
}

fn incompressibility_check(params: &HyperelasticParams) -> CheckResult {
    const NAME: &str = "incompressibility";
    match uniaxial_volume_ratio(params, 1.5) {
        Ok(j) => CheckResult::new(
            NAME,
            (j - 1.0).abs() <= VOLUME_TOL,
            format!(
                "J = {j:.5} at 1.5 uniaxial stretch, kappa/c10 = {:.0} (tol |J-1| <= {VOLUME_TOL})",
                params.kappa / params.c10
            ),
        ),
        Err(e) => CheckResult::failed(NAME, e),
    }
}

/// Parses the cylinder oracle fixture into `(pressure kPa, bore radius mm)`.
pub fn cylinder_oracle() -> Vec<(f64, f64)> {
    CYLINDER_ORACLE
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (p, a) = l.split_once(',').expect("fixture rows have two columns");
            (p.trim().parse().expect("numeric"), a.trim().parse().expect("numeric"))
        })
        .collect()
}

/// FEA bore radius of the plane-strain cylinder slab at each increment of
/// a ramp to `p_max`, as `(pressure kPa, bore radius mm)`.
pub fn cylinder_bore_fea(
    params: &HyperelasticParams,
    element_size: f64,
    p_max: f64,
    increments: usize,
) -> Result<Vec<(f64, f64)>, FeaError> {
    let (ra, rb) = CYLINDER_RADII;
    let mesh = cylinder_slab_mesh(ra, rb, element_size)?;
    let lc = LoadCase::new(p_max)
        .with_increments(increments)
        .with_fixed_set(None)
        .with_pressure_set("inner")
        .constrain("ends", [false, false, true])
        .constrain("sym_y", [false, true, false])
        .constrain("sym_x", [true, false, false]);
    let sol = solve_with(&mesh, params, &lc, &NewtonSettings::default())?;
    let bore: Vec<usize> = mesh
        .node_set("inner")?
        .iter()
        .copied()
        .filter(|&n| mesh.nodes[n].z == 0.0)
        .collect();
    Ok(sol
        .increments
        .iter()
        .map(|inc| {
            let u = &inc.displacement;
            // Mid-edge nodes sit on chords inside the circle, so the radius
            // is taken as `ra` plus the mean radial growth of the bore nodes.
            let growth = bore
                .iter()
                .map(|&n| {
                    let x = mesh.nodes[n];
                    (x.x + u[3 * n]).hypot(x.y + u[3 * n + 1]) - x.x.hypot(x.y)
                })
                .sum::<f64>()
                / bore.len() as f64;
            (inc.pressure_kpa, ra + growth)
        })
        .collect())
}

/// Largest relative error of the FEA bore expansion against the fixture.
pub fn cylinder_error(params: &HyperelasticParams, element_size: f64) -> Result<f64, FeaError> {
    let oracle = cylinder_oracle();
    let p_max = oracle.iter().map(|r| r.0).fold(0.0, f64::max);
    let step = oracle[0].0;
    let fea = cylinder_bore_fea(params, element_size, p_max, (p_max / step).round() as usize)?;
    let ra = CYLINDER_RADII.0;
    let mut err = 0.0f64;
    for &(p, a) in &oracle {
        let (_, r) = fea
            .iter()
            .copied()
            .find(|q| (q.0 - p).abs() < 1e-9)
            .ok_or_else(|| FeaError::Measurement(format!("no increment at {p} kPa")))?;
        err = err.max(((r - ra) - (a - ra)).abs() / (a - ra));
    }
    Ok(err)
}

fn cylinder_check(params: &HyperelasticParams) -> CheckResult {
    const NAME: &str = "cylinder inflation";
    match cylinder_error(params, 1.0) {
        Ok(err) => CheckResult::new(
            NAME,
            err <= CYLINDER_TOL,
            format!("bore expansion error {:.3}% at 1 mm (tol {}%)", 100.0 * err, 100.0 * CYLINDER_TOL),
        ),
        Err(e) => CheckResult::failed(NAME, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_penalty_fails_incompressibility() {
        let stiff = HyperelasticParams::default();
        let soft = HyperelasticParams::with_kappa_ratio(0.24, 1.0);
        assert!(incompressibility_check(&stiff).passed);
        assert!(!incompressibility_check(&soft).passed);
    }

    #[test]
    fn quick_suite_passes_with_defaults() {
        let r = run_verify(&HyperelasticParams::default(), true);
        assert_eq!(r.len(), 4);
        for c in r {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
