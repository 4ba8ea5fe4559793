//! Nearly incompressible Neo-Hookean solid.
//!
//! The stored energy is split into an isochoric and a volumetric part,
//!
//! ```text
//! W(F) = c10 (Ī₁ − 3) + κ/2 (J − 1)²,   Ī₁ = J^(-2/3) tr(FᵀF)
//! ```
//!
//! Stresses are reported both as the second Piola-Kirchhoff tensor (used by
//! the total-Lagrangian residual) and as the Cauchy tensor. The tangent is
//! `dS/dE` in Voigt form with the ordering `11, 22, 33, 12, 23, 13`; shear
//! strains are engineering strains.

use nalgebra::{Matrix3, Matrix6};
use thiserror::Error;

/// Minimum allowed ratio between the volumetric penalty and `c10`.
pub const MIN_KAPPA_RATIO: f64 = 100.0;

/// Default `κ / c10`.
pub const DEFAULT_KAPPA_RATIO: f64 = 1000.0;

/// Calibrated silicone constant, MPa.
pub const DEFAULT_C10: f64 = 0.24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("invalid deformation: det(F) = {0} must be positive")]
    InvalidDeformation(f64),
    #[error("invalid material parameters: {0}")]
    InvalidParams(String),
}

/// Constitutive constants, MPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperelasticParams {
    pub c10: f64,
    pub kappa: f64,
}

impl HyperelasticParams {
    /// Checked constructor; enforces `κ/c10 ≥ 100`.
    pub fn new(c10: f64, kappa: f64) -> Result<Self, MaterialError> {
        let params = Self { c10, kappa };
        params.validate()?;
        Ok(params)
    }

    /// `κ = ratio · c10`. Ratios below [`MIN_KAPPA_RATIO`] are accepted here so
    /// that deliberately compressible configurations can be exercised; call
    /// [`validate`](Self::validate) to enforce the incompressibility bound.
    pub fn with_kappa_ratio(c10: f64, ratio: f64) -> Self {
        Self {
            c10,
            kappa: ratio * c10,
        }
    }

    pub fn shear_modulus(&self) -> f64 {
        2.0 * self.c10
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        self.validate_positive()?;
        if self.kappa / self.c10 < MIN_KAPPA_RATIO {
            return Err(MaterialError::InvalidParams(format!(
                "kappa/c10 = {} is below the near-incompressibility bound {}",
                self.kappa / self.c10,
                MIN_KAPPA_RATIO
            )));
        }
        Ok(())
    }

    /// Positivity only; the solver accepts compressible ratios.
    pub fn validate_positive(&self) -> Result<(), MaterialError> {
        if !(self.c10 > 0.0 && self.c10.is_finite()) {
            return Err(MaterialError::InvalidParams(format!(
                "c10 must be positive, got {}",
                self.c10
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(MaterialError::InvalidParams(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

impl Default for HyperelasticParams {
    fn default() -> Self {
        Self::with_kappa_ratio(DEFAULT_C10, DEFAULT_KAPPA_RATIO)
    }
}

/// Silicone datasheet values. Carried for reference only; none of these enter
/// the constitutive model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasheetProperties {
    pub shore_a: f64,
    pub modulus_100_mpa: f64,
    pub tensile_strength_mpa: f64,
}

impl Default for DatasheetProperties {
    fn default() -> Self {
        Self {
            shore_a: 40.0,
            modulus_100_mpa: 1.38,
            tensile_strength_mpa: 4.14,
        }
    }
}

/// Kinematic state at a material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationState {
    pub f: Matrix3<f64>,
    pub j: f64,
    pub i1bar: f64,
}

impl DeformationState {
    pub fn new(f: Matrix3<f64>) -> Result<Self, MaterialError> {
        let j = f.determinant();
        if !(j > 0.0) || !j.is_finite() {
            return Err(MaterialError::InvalidDeformation(j));
        }
        let i1 = (f.transpose() * f).trace();
        let i1bar = j.powf(-2.0 / 3.0) * i1;
        Ok(Self { f, j, i1bar })
    }

    pub fn identity() -> Self {
        Self {
            f: Matrix3::identity(),
            j: 1.0,
            i1bar: 3.0,
        }
    }

    /// Right Cauchy-Green tensor `FᵀF`.
    pub fn right_cauchy_green(&self) -> Matrix3<f64> {
        self.f.transpose() * self.f
    }
}

/// Fourth-order material tangent `dS/dE` stored in Voigt form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityTensor(pub Matrix6<f64>);

/// Voigt index pairs, `11, 22, 33, 12, 23, 13`.
pub const VOIGT: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

/// Voigt slot of a symmetric index pair.
pub fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (1, 2) => 4,
        (0, 2) => 5,
        _ => unreachable!("index out of range"),
    }
}

impl ElasticityTensor {
    /// Component `C_ijkl`.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[(voigt_index(i, j), voigt_index(k, l))]
    }

    pub fn voigt(&self) -> &Matrix6<f64> {
        &self.0
    }

    /// Contracts the tangent with a symmetric strain increment, `C : dE`.
    pub fn contract(&self, de: &Matrix3<f64>) -> Matrix3<f64> {
        let mut v = nalgebra::Vector6::zeros();
        for (a, &(i, j)) in VOIGT.iter().enumerate() {
            v[a] = if i == j { de[(i, j)] } else { de[(i, j)] + de[(j, i)] };
        }
        voigt_to_tensor(&(self.0 * v))
    }
}

/// Symmetric 3×3 tensor from a stress-like Voigt vector.
pub fn voigt_to_tensor(v: &nalgebra::Vector6<f64>) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for (a, &(i, j)) in VOIGT.iter().enumerate() {
        m[(i, j)] = v[a];
        m[(j, i)] = v[a];
    }
    m
}

/// Stored energy density, MPa.
pub fn strain_energy(params: &HyperelasticParams, state: &DeformationState) -> Result<f64, MaterialError> {
    check(state)?;
    let dj = state.j - 1.0;
    Ok(params.c10 * (state.i1bar - 3.0) + 0.5 * params.kappa * dj * dj)
}

/// Second Piola-Kirchhoff stress, MPa.
pub fn pk2_stress(params: &HyperelasticParams, state: &DeformationState) -> Result<Matrix3<f64>, MaterialError> {
    check(state)?;
    let c = state.right_cauchy_green();
    let cinv = c
        .try_inverse()
        .ok_or(MaterialError::InvalidDeformation(state.j))?;
    Ok(pk2_from_parts(params, state.j, &c, &cinv))
}

fn pk2_from_parts(params: &HyperelasticParams, j: f64, c: &Matrix3<f64>, cinv: &Matrix3<f64>) -> Matrix3<f64> {
    let i1 = c.trace();
    let a = j.powf(-2.0 / 3.0);
    let iso = (Matrix3::identity() - cinv * (i1 / 3.0)) * (2.0 * params.c10 * a);
    let vol = cinv * (params.kappa * (j - 1.0) * j);
    iso + vol
}

/// Cauchy stress `σ = J⁻¹ F S Fᵀ`, MPa.
pub fn cauchy_stress(params: &HyperelasticParams, state: &DeformationState) -> Result<Matrix3<f64>, MaterialError> {
    let s = pk2_stress(params, state)?;
    let sigma = state.f * s * state.f.transpose() / state.j;
    Ok((sigma + sigma.transpose()) * 0.5)
}

/// Material tangent `dS/dE = 2 dS/dC`.
pub fn material_tangent(params: &HyperelasticParams, state: &DeformationState) -> Result<ElasticityTensor, MaterialError> {
    check(state)?;
    let c = state.right_cauchy_green();
    let cinv = c
        .try_inverse()
        .ok_or(MaterialError::InvalidDeformation(state.j))?;
    Ok(tangent_from_parts(params, state.j, &c, &cinv))
}

fn tangent_from_parts(params: &HyperelasticParams, j: f64, c: &Matrix3<f64>, cinv: &Matrix3<f64>) -> ElasticityTensor {
    let i1 = c.trace();
    let a = j.powf(-2.0 / 3.0);
    let iso = 4.0 * params.c10 * a;
    let k = params.kappa;
    let vol_outer = k * (2.0 * j * j - j);
    let vol_sym = k * (j * j - j);
    let delta = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
    let mut d = Matrix6::zeros();
    for (row, &(i, jj)) in VOIGT.iter().enumerate() {
        for (col, &(kk, l)) in VOIGT.iter().enumerate() {
            let sym = 0.5 * (cinv[(i, kk)] * cinv[(jj, l)] + cinv[(i, l)] * cinv[(jj, kk)]);
            let outer = cinv[(i, jj)] * cinv[(kk, l)];
            let iso_term = -delta(i, jj) * cinv[(kk, l)] / 3.0 - cinv[(i, jj)] * delta(kk, l) / 3.0
                + i1 / 9.0 * outer
                + i1 / 3.0 * sym;
            d[(row, col)] = iso * iso_term + vol_outer * outer - 2.0 * vol_sym * sym;
        }
    }
    ElasticityTensor(d)
}

/// Stress and tangent together; the element loop calls this once per
/// quadrature point.
pub fn stress_and_tangent(
    params: &HyperelasticParams,
    f: &Matrix3<f64>,
) -> Result<(f64, Matrix3<f64>, ElasticityTensor), MaterialError> {
    let state = DeformationState::new(*f)?;
    let c = state.right_cauchy_green();
    let cinv = c
        .try_inverse()
        .ok_or(MaterialError::InvalidDeformation(state.j))?;
    let w = strain_energy(params, &state)?;
    Ok((
        w,
        pk2_from_parts(params, state.j, &c, &cinv),
        tangent_from_parts(params, state.j, &c, &cinv),
    ))
}

fn check(state: &DeformationState) -> Result<(), MaterialError> {
    if !(state.j > 0.0) || !state.j.is_finite() {
        return Err(MaterialError::InvalidDeformation(state.j));
    }
    Ok(())
}

/// Outcome of a `c10` fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub c10: f64,
    pub residual: f64,
    pub evaluations: usize,
    /// The optimum sits on a search bound; the true minimizer may lie outside.
    pub bound_hit: bool,
}

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("calibration needs at least one observation")]
    NoObservations,
    #[error("invalid search bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),
    #[error("forward model returned a non-finite displacement at c10 = {c10} MPa, p = {pressure} kPa")]
    NonFinite { c10: f64, pressure: f64 },
    #[error("forward model failed at c10 = {c10} MPa: {message}")]
    Forward { c10: f64, message: String },
}

/// Search settings for [`calibrate_c10`].
#[derive(Debug, Clone, Copy)]
pub struct CalibrationBounds {
    pub lower: f64,
    pub upper: f64,
    pub bracket_tol: f64,
}

impl Default for CalibrationBounds {
    fn default() -> Self {
        Self {
            lower: 0.01,
            upper: 2.0,
            bracket_tol: 1e-3,
        }
    }
}

/// Fits `c10` to `(pressure kPa, displacement mm)` observations by golden
/// section search on the sum of squared displacement errors.
///
/// `forward` maps `(c10, pressure)` to a predicted displacement and may fail;
/// its errors are propagated.
pub fn calibrate_c10<F, E>(
    observations: &[(f64, f64)],
    mut forward: F,
    bounds: CalibrationBounds,
) -> Result<Calibration, CalibrationError>
where
    F: FnMut(f64, f64) -> Result<f64, E>,
    E: std::fmt::Display,
{
    if observations.is_empty() {
        return Err(CalibrationError::NoObservations);
    }
    if !(bounds.lower > 0.0 && bounds.upper > bounds.lower && bounds.bracket_tol > 0.0) {
        return Err(CalibrationError::InvalidBounds(bounds.lower, bounds.upper));
    }
    let mut evaluations = 0;
    let mut objective = |c10: f64| -> Result<f64, CalibrationError> {
        evaluations += 1;
        let mut sum = 0.0;
        for &(p, measured) in observations {
            let predicted = forward(c10, p).map_err(|e| CalibrationError::Forward {
                c10,
                message: e.to_string(),
            })?;
            if !predicted.is_finite() {
                return Err(CalibrationError::NonFinite { c10, pressure: p });
            }
            sum += (predicted - measured).powi(2);
        }
        Ok(sum)
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (bounds.lower, bounds.upper);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > bounds.bracket_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2)?;
        }
    }
    let mid = 0.5 * (a + b);
    let f_mid = objective(mid)?;
    // the bracket midpoint is the estimate; compare against the interior probes
    let (c10, residual) = [(mid, f_mid), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((mid, f_mid), |best, cand| if cand.1 < best.1 { cand } else { best });
    let bound_hit = (c10 - bounds.lower) < 2.0 * bounds.bracket_tol
        || (bounds.upper - c10) < 2.0 * bounds.bracket_tol;
    if bound_hit {
        log::warn!(
            "c10 calibration optimum {c10:.4} MPa lies on the search bound [{}, {}]",
            bounds.lower,
            bounds.upper
        );
    }
    Ok(Calibration {
        c10,
        residual,
        evaluations,
        bound_hit,
    })
}
