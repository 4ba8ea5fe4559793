//! Incremental Newton continuation in the load factor.

use log::{debug, info, trace};

use super::assembly::Model;
use super::pressure::pressure_force_and_stiffness;
use super::sparse::{DirectSolver, Pattern, SparseMatrix};
use super::FeaError;
use crate::material::HyperelasticParams;
use crate::mesh::{Mesh, CAVITY_SET, FIXED_SET};

/// Default number of load increments.
/// Halvings of a Newton update tried before the step is rejected.
const MAX_STEP_CUTS: usize = 6;

pub const DEFAULT_INCREMENTS: usize = 300;

/// Restrains selected displacement components of every node in a set.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisConstraint {
    pub set: String,
    pub axes: [bool; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase {
    /// Gauge pressure at load factor 1, kPa.
    pub target_pressure: f64,
    pub increments: usize,
    /// Node set with all components fixed; `None` when only axis
    /// constraints are used.
    pub fixed_set: Option<String>,
    pub pressure_set: String,
    pub constraints: Vec<AxisConstraint>,
    /// Prescribed `(dof, value)` pairs, ramped with the load factor.
    pub prescribed: Vec<(usize, f64)>,
}

impl LoadCase {
    pub fn new(target_pressure: f64) -> Self {
        LoadCase {
            target_pressure,
            increments: DEFAULT_INCREMENTS,
            fixed_set: Some(FIXED_SET.to_string()),
            pressure_set: CAVITY_SET.to_string(),
            constraints: Vec::new(),
            prescribed: Vec::new(),
        }
    }

    pub fn with_increments(mut self, increments: usize) -> Self {
        self.increments = increments;
        self
    }

    pub fn with_fixed_set(mut self, set: Option<&str>) -> Self {
        self.fixed_set = set.map(str::to_string);
        self
    }

    pub fn with_pressure_set(mut self, set: &str) -> Self {
        self.pressure_set = set.to_string();
        self
    }

    pub fn constrain(mut self, set: &str, axes: [bool; 3]) -> Self {
        self.constraints.push(AxisConstraint {
            set: set.to_string(),
            axes,
        });
        self
    }

    pub fn prescribe(mut self, dof: usize, value: f64) -> Self {
        self.prescribed.push((dof, value));
        self
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<(), FeaError> {
        if !(self.target_pressure >= 0.0 && self.target_pressure.is_finite()) {
            return Err(FeaError::InvalidLoadCase(format!(
                "target pressure must be >= 0, got {}",
                self.target_pressure
            )));
        }
        if self.increments < 1 {
            return Err(FeaError::InvalidLoadCase("increments must be >= 1".into()));
        }
        if let Some(set) = &self.fixed_set {
            mesh.node_set(set)?;
        }
        for c in &self.constraints {
            mesh.node_set(&c.set)?;
        }
        if self.target_pressure > 0.0 {
            mesh.face_set(&self.pressure_set)?;
        }
        let ndof = 3 * mesh.nodes.len();
        if let Some(&(dof, _)) = self.prescribed.iter().find(|(d, _)| *d >= ndof) {
            return Err(FeaError::InvalidLoadCase(format!(
                "prescribed dof {dof} out of range ({ndof} dofs)"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    pub rel_tol: f64,
    /// Absolute residual tolerance, N.
    pub abs_tol: f64,
    pub max_iterations: usize,
    /// Halvings of the nominal increment before giving up.
    pub max_bisections: u32,
    /// Start each step from a linear extrapolation of the last two states.
    pub extrapolate: bool,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_iterations: 30,
            max_bisections: 5,
            extrapolate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Increment {
    pub pressure_kpa: f64,
    pub load_factor: f64,
    pub displacement: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncrementLog {
    pub pressure_kpa: f64,
    /// Newton iterations summed over all sub-steps of the increment.
    pub iterations: usize,
    pub substeps: usize,
    /// Residual history of the final sub-step.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Starts with the unloaded reference state.
    pub increments: Vec<Increment>,
    pub log: Vec<IncrementLog>,
}

impl Solution {
    pub fn last(&self) -> &Increment {
        self.increments.last().expect("solution holds the reference state")
    }

    pub fn converged(&self) -> bool {
        self.log.iter().all(|l| l.converged)
    }

    pub fn total_iterations(&self) -> usize {
        self.log.iter().map(|l| l.iterations).sum()
    }
}

pub fn solve(mesh: &Mesh, params: &HyperelasticParams, loadcase: &LoadCase) -> Result<Solution, FeaError> {
    solve_with(mesh, params, loadcase, &NewtonSettings::default())
}

struct System<'a> {
    model: Model<'a>,
    pattern: Pattern,
    loadcase: &'a LoadCase,
    faces: Vec<[usize; 6]>,
    face_slots: Vec<[u32; 36]>,
    constrained: Vec<bool>,
    prescribed: Vec<f64>,
    zero_positions: Vec<usize>,
    diag_positions: Vec<usize>,
    settings: NewtonSettings,
    linear: DirectSolver,
}

struct StepOutcome {
    u: Vec<f64>,
    iterations: usize,
    residuals: Vec<f64>,
}

enum StepFailure {
    Reject { iterations: usize, residual: f64 },
    Fatal(FeaError),
}

impl<'a> System<'a> {
    fn new(
        mesh: &'a Mesh,
        params: &HyperelasticParams,
        loadcase: &'a LoadCase,
        settings: NewtonSettings,
    ) -> Result<Self, FeaError> {
        loadcase.validate(mesh)?;
        let model = Model::new(mesh, *params)?;
        let pattern = Pattern::new(mesh);
        let ndof = 3 * mesh.nodes.len();
        let mut constrained = vec![false; ndof];
        if let Some(set) = &loadcase.fixed_set {
            for &n in mesh.node_set(set)? {
                constrained[3 * n..3 * n + 3].fill(true);
            }
        }
        for c in &loadcase.constraints {
            for &n in mesh.node_set(&c.set)? {
                for (i, &on) in c.axes.iter().enumerate() {
                    constrained[3 * n + i] |= on;
                }
            }
        }
        let mut prescribed = vec![0.0; ndof];
        for &(dof, v) in &loadcase.prescribed {
            constrained[dof] = true;
            prescribed[dof] = v;
        }
        // nodes outside every element carry no stiffness
        let mut used = vec![false; mesh.nodes.len()];
        for conn in &mesh.elements {
            for &n in conn {
                used[n] = true;
            }
        }
        for (n, &u) in used.iter().enumerate() {
            if !u {
                constrained[3 * n..3 * n + 3].fill(true);
            }
        }
        if constrained.iter().all(|&c| c) && !mesh.elements.is_empty() {
            debug!("every dof is constrained");
        }
        let mut zero_positions = Vec::new();
        let mut diag_positions = Vec::new();
        for (d, &c) in constrained.iter().enumerate() {
            if c {
                zero_positions.extend(pattern.col_range(d));
                zero_positions.extend(pattern.row_positions(d));
                diag_positions.push(pattern.diagonal_position(d));
            }
        }
        let (faces, face_slots) = match mesh.face_set(&loadcase.pressure_set) {
            Ok(f) if loadcase.target_pressure > 0.0 => (f.to_vec(), pattern.face_slots(f)),
            _ => (Vec::new(), Vec::new()),
        };
        Ok(System {
            model,
            pattern,
            loadcase,
            faces,
            face_slots,
            constrained,
            prescribed,
            zero_positions,
            diag_positions,
            settings,
            linear: DirectSolver::new(),
        })
    }

    fn apply_constraints(&self, k: &mut SparseMatrix, r: &mut [f64]) {
        for &p in &self.zero_positions {
            k.values[p] = 0.0;
        }
        for &p in &self.diag_positions {
            k.values[p] = 1.0;
        }
        for (d, &c) in self.constrained.iter().enumerate() {
            if c {
                r[d] = 0.0;
            }
        }
    }

    /// Residual `f_int − f_ext` with constrained entries zeroed, the
    /// constrained tangent, and the norm of the free external load.
    fn residual_and_tangent(&self, u: &[f64], p_kpa: f64) -> Result<(Vec<f64>, SparseMatrix, f64), FeaError> {
        let (mut r, mut k) = self.model.force_and_tangent(&self.pattern, u)?;
        let fext = pressure_force_and_stiffness(
            self.model.mesh,
            &self.loadcase.pressure_set,
            &self.faces,
            &self.face_slots,
            p_kpa,
            u,
            &self.pattern,
            &mut k,
        )?;
        let mut fext_norm2 = 0.0;
        for d in 0..r.len() {
            r[d] -= fext[d];
            if !self.constrained[d] {
                fext_norm2 += fext[d] * fext[d];
            }
        }
        self.apply_constraints(&mut k, &mut r);
        Ok((r, k, fext_norm2.sqrt()))
    }

    fn newton(&mut self, start: &[f64], lambda: f64) -> Result<StepOutcome, StepFailure> {
        let p_kpa = lambda * self.loadcase.target_pressure;
        let mut u = start.to_vec();
        for (d, &c) in self.constrained.iter().enumerate() {
            if c {
                u[d] = lambda * self.prescribed[d];
            }
        }
        let reject = |iterations, residual| StepFailure::Reject { iterations, residual };
        let mut state = match self.residual_and_tangent(&u, p_kpa) {
            Ok(v) => v,
            Err(e) if e.is_step_rejection() => return Err(reject(0, f64::INFINITY)),
            Err(e) => return Err(StepFailure::Fatal(e)),
        };
        let mut residuals = Vec::new();
        let mut r0 = 0.0;
        for it in 0..=self.settings.max_iterations {
            let (r, k, fext_norm) = state;
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            trace!("  iteration {it}: residual {rn:e}");
            residuals.push(rn);
            if !rn.is_finite() {
                return Err(reject(it, rn));
            }
            if it == 0 {
                r0 = rn;
            }
            let reference = fext_norm.max(r0);
            if rn <= self.settings.abs_tol || rn <= self.settings.rel_tol * reference {
                return Ok(StepOutcome {
                    u,
                    iterations: it,
                    residuals,
                });
            }
            if it == self.settings.max_iterations {
                return Err(reject(it, rn));
            }
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let du = self.linear.solve(&k, &rhs).map_err(|_| reject(it, rn))?;
            // Shorten the update while it turns an element inside out.
            let mut alpha = 1.0;
            let mut cuts = 0;
            state = loop {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(ui, di)| ui + alpha * di).collect();
                match self.residual_and_tangent(&trial, p_kpa) {
                    Ok(v) => {
                        u = trial;
                        break v;
                    }
                    Err(e) if e.is_step_rejection() && cuts < MAX_STEP_CUTS => {
                        alpha *= 0.5;
                        cuts += 1;
                    }
                    Err(e) if e.is_step_rejection() => return Err(reject(it + 1, f64::INFINITY)),
                    Err(e) => return Err(StepFailure::Fatal(e)),
                }
            };
            if cuts > 0 {
                trace!("  update shortened to {alpha} to keep elements valid");
            }
        }
        unreachable!("loop returns on its last iteration")
    }
}

/// Solves the load case with explicit Newton settings.
pub fn solve_with(
    mesh: &Mesh,
    params: &HyperelasticParams,
    loadcase: &LoadCase,
    settings: &NewtonSettings,
) -> Result<Solution, FeaError> {
    let mut sys = System::new(mesh, params, loadcase, *settings)?;
    let ndof = 3 * mesh.nodes.len();
    let mut solution = Solution {
        increments: vec![Increment {
            pressure_kpa: 0.0,
            load_factor: 0.0,
            displacement: vec![0.0; ndof],
        }],
        log: Vec::new(),
    };
    let trivial = loadcase.target_pressure == 0.0 && loadcase.prescribed.iter().all(|&(_, v)| v == 0.0);
    if trivial {
        return Ok(solution);
    }
    let n = loadcase.increments;
    let nominal = 1.0 / n as f64;
    let floor = nominal / f64::powi(2.0, settings.max_bisections as i32);
    let mut u = vec![0.0; ndof];
    let mut u_prev = u.clone();
    let mut lambda = 0.0;
    let mut last_step = 0.0;
    for inc in 1..=n {
        let target = inc as f64 / n as f64;
        let mut step = target - lambda;
        let mut iterations = 0;
        let mut substeps = 0;
        let mut bisections = 0;
        let mut residuals = Vec::new();
        while lambda < target - 1e-14 {
            let trial = (lambda + step).min(target);
            let dl = trial - lambda;
            let mut start = u.clone();
            if settings.extrapolate && last_step > 0.0 {
                let s = dl / last_step;
                for d in 0..ndof {
                    start[d] += s * (u[d] - u_prev[d]);
                }
            }
            match sys.newton(&start, trial) {
                Ok(out) => {
                    iterations += out.iterations;
                    substeps += 1;
                    residuals = out.residuals;
                    u_prev = std::mem::replace(&mut u, out.u);
                    last_step = dl;
                    lambda = trial;
                    if bisections > 0 {
                        step = (2.0 * step).min(target - lambda);
                    }
                }
                Err(StepFailure::Fatal(e)) => return Err(e),
                Err(StepFailure::Reject {
                    iterations: it,
                    residual,
                }) => {
                    iterations += it;
                    step *= 0.5;
                    bisections += 1;
                    debug!(
                        "step to {:.6} kPa rejected after {it} iterations (residual {residual:e}); bisecting",
                        trial * loadcase.target_pressure
                    );
                    if step < floor * (1.0 - 1e-9) {
                        return Err(FeaError::NoConvergence {
                            converged_kpa: lambda * loadcase.target_pressure,
                            attempted_kpa: trial * loadcase.target_pressure,
                            bisections,
                            iterations: it,
                            residual,
                        });
                    }
                }
            }
        }
        lambda = target;
        let pressure = target * loadcase.target_pressure;
        debug!("increment {inc}/{n}: {pressure:.4} kPa, {iterations} iterations, {substeps} sub-steps");
        solution.log.push(IncrementLog {
            pressure_kpa: pressure,
            iterations,
            substeps,
            residuals,
            converged: true,
        });
        solution.increments.push(Increment {
            pressure_kpa: pressure,
            load_factor: target,
            displacement: u.clone(),
        });
    }
    info!(
        "solved {} increments to {} kPa in {} Newton iterations",
        n,
        loadcase.target_pressure,
        solution.total_iterations()
    );
    Ok(solution)
}
