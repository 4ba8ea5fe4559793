//! Command-line front end: argument parsing and command dispatch.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::fea::{self, solve_with, FeaError, LoadCase, Solution};
use crate::material::{calibrate_c10, CalibrationError, HyperelasticParams};
use crate::mesh::{self, generate_mesh, mesh_quality, ActuatorKind, ActuatorSpec, Mesh, MeshError, WallProfile};
use crate::pneumatics::{self, ControlMode, OnOffController, PneumaticError};
use crate::robots::{self, parse_grid, RobotError};
use crate::verify;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration or input files (exit code 2).
    #[error("{0}")]
    Usage(String),
    /// A check or solve failed (exit code 1).
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FeaError> for CliError {
    fn from(e: FeaError) -> Self {
        match e {
            FeaError::Mesh(m) => m.into(),
            FeaError::InvalidLoadCase(_) | FeaError::Material(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<RobotError> for CliError {
    fn from(e: RobotError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PneumaticError> for CliError {
    fn from(e: PneumaticError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CalibrationError> for CliError {
    fn from(e: CalibrationError) -> Self {
        match e {
            CalibrationError::NonFinite { .. } | CalibrationError::Forward { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pneusoft", version, about = "Pneumatic soft actuator and robot simulator")]
pub struct Cli {
    /// Config file applied over the shipped calibration (default: $PNEUSOFT_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. `--set material.c10=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Worker threads for sweeps and assembly (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an actuator mesh and print its quality report.
    Mesh(MeshArgs),
    /// Solve a pressure ramp on a mesh and write one CSV row per increment.
    Solve(SolveArgs),
    /// Fit c10 to measured displacements of an actuator archetype.
    Calibrate(CalibrateArgs),
    /// Robot simulations producing figure-data CSV.
    Robot(RobotArgs),
    /// Pressure-controller and bath-thermostat traces.
    Control(ControlArgs),
    /// Run the built-in oracle suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: ActuatorKind,
    /// Uniform side/top wall thickness, mm.
    #[arg(long)]
    pub wall: Option<f64>,
    /// Bottom (strain-limiting) wall thickness, mm.
    #[arg(long)]
    pub strain_limiting_wall: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long)]
    pub bellows: Option<usize>,
    #[arg(long)]
    pub bellows_depth: Option<f64>,
    /// Target element size, mm (default: config `mesh.element_size`).
    #[arg(long)]
    pub element_size: Option<f64>,
}

impl SpecArgs {
    fn spec(&self, cfg: &Config) -> Result<ActuatorSpec, CliError> {
        let mut s = ActuatorSpec::default_for(self.kind);
        if let Some(w) = self.wall {
            s.wall_thickness = WallProfile::uniform(w);
        }
        if let Some(w) = self.strain_limiting_wall {
            s.strain_limiting_wall_thickness = Some(w);
        }
        if let Some(v) = self.length {
            s.length = v;
        }
        if let Some(v) = self.width {
            s.outer_width = v;
        }
        if let Some(v) = self.height {
            s.outer_height = v;
        }
        if let Some(v) = self.bellows {
            s.bellows_count = v;
        }
        if let Some(v) = self.bellows_depth {
            s.bellows_depth = v;
        }
        s.axial_aspect = cfg.f64("mesh.axial_aspect")?;
        Ok(s)
    }

    fn mesh(&self, cfg: &Config) -> Result<Mesh, CliError> {
        let spec = self.spec(cfg)?;
        let h = match self.element_size {
            Some(h) => h,
            None => cfg.f64("mesh.element_size")?,
        };
        Ok(generate_mesh(&spec, h)?)
    }
}

fn parse_kind(s: &str) -> Result<ActuatorKind, String> {
    s.parse::<ActuatorKind>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Elongation,
    Bend,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Mesh file written by `mesh`.
    #[arg(long, required_unless_present = "cylinder", conflicts_with = "cylinder")]
    pub mesh: Option<PathBuf>,
    /// Solve the plane-strain cylinder fixture at this element size instead
    /// of a mesh file; writes `pressure_kPa,bore_radius_mm`.
    #[arg(long, value_name = "ELEMENT_SIZE")]
    pub cylinder: Option<f64>,
    /// Final cavity pressure, kPa.
    #[arg(long)]
    pub pressure: f64,
    /// Load increments (default: config `fea.increments`).
    #[arg(long)]
    pub increments: Option<usize>,
    /// Also print the response as a `pressure:value` lookup table, sampled
    /// every `--table-step` kPa, for the robot config.
    #[arg(long, value_enum)]
    pub table: Option<TableKind>,
    #[arg(long, default_value_t = 10.0)]
    pub table_step: f64,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Elongation,
    Bend,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// CSV with columns `pressure_kPa,displacement_mm`.
    #[arg(long)]
    pub observations: PathBuf,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Response compared with the observations.
    #[arg(long, value_enum, default_value_t = Measure::Elongation)]
    pub measure: Measure,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RobotArgs {
    #[command(subcommand)]
    pub robot: Robot,
}

#[derive(Debug, Subcommand)]
pub enum Robot {
    /// Speed against valve frequency.
    Earthworm {
        /// Frequency grid `start:stop:step`, Hz.
        #[arg(long, default_value = "0.2:1.6:0.1")]
        sweep: String,
        /// Supply pressure, kPa (default: config `pneumatics.supply_kPa`).
        #[arg(long)]
        supply: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walking speed for one operating point, or a sweep over pressure or load.
    Quad {
        #[arg(long, default_value_t = 50.0)]
        pressure: f64,
        /// Added load, g.
        #[arg(long, default_value_t = 0.0)]
        load: f64,
        /// Pressure grid `start:stop:step`, kPa, at `--load`.
        #[arg(long, conflicts_with = "sweep_load")]
        sweep_pressure: Option<String>,
        /// Load grid `start:stop:step`, g, at `--pressure`.
        #[arg(long)]
        sweep_load: Option<String>,
        /// Write the body trajectory over this many seconds instead.
        #[arg(long, conflicts_with_all = ["sweep_pressure", "sweep_load"])]
        duration: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum grasp pressures with and without tape.
    Gripper {
        /// Single object mass, g.
        #[arg(long, conflicts_with = "masses")]
        mass: Option<f64>,
        /// Mass grid `start:stop:step`, g.
        #[arg(long)]
        masses: Option<String>,
        /// Object diameter, mm (default: config reference diameter).
        #[arg(long)]
        diameter: Option<f64>,
        /// Also report the heaviest liftable mass at this pressure, kPa.
        #[arg(long)]
        p_cap: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ControlArgs {
    #[command(subcommand)]
    pub loop_kind: ControlLoop,
}

#[derive(Debug, Subcommand)]
pub enum ControlLoop {
    /// On-off chamber pressure control.
    Pressure {
        /// Hysteresis mode setpoint, kPa.
        #[arg(long, conflicts_with = "frequency")]
        setpoint: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        hysteresis: f64,
        /// Duty-cycle mode frequency, Hz.
        #[arg(long)]
        frequency: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heated-bath thermostat with the config's bath settings.
    Bath {
        #[arg(long, default_value_t = 7200.0)]
        duration: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only the sub-second checks.
    #[arg(long)]
    pub quick: bool,
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut cfg = Config::load(cli.config.as_deref())?;
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    info!("resolved config:\n{}", cfg.to_text().trim_end());
    match &cli.command {
        Command::Mesh(a) => cmd_mesh(&cfg, a),
        Command::Solve(a) => cmd_solve(&cfg, a),
        Command::Calibrate(a) => cmd_calibrate(&cfg, a),
        Command::Robot(a) => cmd_robot(&cfg, &a.robot),
        Command::Control(a) => cmd_control(&cfg, &a.loop_kind),
        Command::Verify(a) => cmd_verify(&cfg, a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn material(cfg: &Config) -> Result<HyperelasticParams, CliError> {
    let m = cfg.material()?;
    m.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(m)
}

fn cmd_mesh(cfg: &Config, a: &MeshArgs) -> Result<(), CliError> {
    let m = a.spec.mesh(cfg)?;
    mesh::save_mesh(&m, &a.out)?;
    let q = mesh_quality(&m);
    println!("{}: {} nodes, {q}", a.out.display(), m.node_count());
    Ok(())
}

fn solve_ramp(cfg: &Config, m: &Mesh, pressure: f64, increments: usize) -> Result<Solution, CliError> {
    let lc = LoadCase::new(pressure).with_increments(increments);
    Ok(solve_with(m, &material(cfg)?, &lc, &cfg.newton()?)?)
}

fn cmd_solve(cfg: &Config, a: &SolveArgs) -> Result<(), CliError> {
    let increments = match a.increments {
        Some(n) => n,
        None => cfg.usize("fea.increments")?,
    };
    if let Some(h) = a.cylinder {
        let rows = verify::cylinder_bore_fea(&material(cfg)?, h, a.pressure, increments)?;
        let mut text = String::from("pressure_kPa,bore_radius_mm\n");
        for (p, r) in rows {
            text.push_str(&format!("{p:.6},{r:.9}\n"));
        }
        return emit(a.out.as_deref(), &text);
    }
    let path = a.mesh.as_ref().expect("clap enforces --mesh or --cylinder");
    let m = mesh::load_mesh(path)?;
    let sol = solve_ramp(cfg, &m, a.pressure, increments)?;
    emit(a.out.as_deref(), &fea::solution_csv(&m, &sol)?)?;
    if let Some(kind) = a.table {
        let values = match kind {
            TableKind::Elongation => fea::measure_elongation(&m, &sol)?,
            TableKind::Bend => fea::measure_bend_angle(&m, &sol)?,
        };
        let table = sample_table(&sol, &values, a.table_step);
        eprintln!("table: {table}");
    }
    Ok(())
}

/// Samples a response at multiples of `step` kPa, forcing it
/// non-decreasing so it forms a valid lookup table.
fn sample_table(sol: &Solution, values: &[f64], step: f64) -> String {
    let mut parts = Vec::new();
    let mut last = 0.0f64;
    let mut next = 0.0;
    for (inc, &v) in sol.increments.iter().zip(values) {
        if inc.pressure_kpa + 1e-9 >= next {
            last = last.max(v.abs());
            let value = if parts.is_empty() { 0.0 } else { last };
            parts.push(format!("{}:{:.3}", inc.pressure_kpa, value));
            next = inc.pressure_kpa + step;
        }
    }
    parts.join(", ")
}

fn read_observations(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let usage = |e: String| CliError::Usage(format!("{}: {e}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| usage(e.to_string()))?;
    let mut obs = Vec::new();
    for rec in rdr.deserialize::<(f64, f64)>() {
        obs.push(rec.map_err(|e| usage(e.to_string()))?);
    }
    Ok(obs)
}

/// Linear interpolation of `(pressure, value)` samples at `p`.
fn interpolate(samples: &[(f64, f64)], p: f64) -> f64 {
    let k = samples.partition_point(|s| s.0 < p).clamp(1, samples.len() - 1);
    let (a, b) = (samples[k - 1], samples[k]);
    a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0)
}

fn cmd_calibrate(cfg: &Config, a: &CalibrateArgs) -> Result<(), CliError> {
    let obs = read_observations(&a.observations)?;
    if obs.iter().any(|o| !(o.0 > 0.0)) {
        return Err(CliError::Usage("observation pressures must be > 0".into()));
    }
    let m = a.spec.mesh(cfg)?;
    let p_max = obs.iter().map(|o| o.0).fold(0.0, f64::max);
    let increments = cfg.usize("calibration.increments")?;
    let kappa_ratio = cfg.f64("material.kappa_ratio")?;
    let newton = cfg.newton()?;
    let measure = a.measure;
    // One ramp per trial c10 serves every observation.
    let mut cache: Option<(f64, Vec<(f64, f64)>)> = None;
    let forward = |c10: f64, p: f64| -> Result<f64, FeaError> {
        if cache.as_ref().map(|c| c.0) != Some(c10) {
            let params = HyperelasticParams::with_kappa_ratio(c10, kappa_ratio);
            let sol = solve_with(&m, &params, &LoadCase::new(p_max).with_increments(increments), &newton)?;
            let values = match measure {
                Measure::Elongation => fea::measure_elongation(&m, &sol)?,
                Measure::Bend => fea::measure_bend_angle(&m, &sol)?,
            };
            let samples = sol.increments.iter().map(|i| i.pressure_kpa).zip(values).collect();
            info!("c10 = {c10:.6} MPa solved");
            cache = Some((c10, samples));
        }
        Ok(interpolate(&cache.as_ref().expect("filled above").1, p))
    };
    let fit = calibrate_c10(&obs, forward, cfg.calibration_bounds()?)?;
    let report = format!(
        "c10_MPa,residual_mm2,evaluations,bound_hit\n{:.6},{:.6e},{},{}\n",
        fit.c10, fit.residual, fit.evaluations, fit.bound_hit
    );
    emit(a.out.as_deref(), &report)
}

fn cmd_robot(cfg: &Config, r: &Robot) -> Result<(), CliError> {
    match r {
        Robot::Earthworm { sweep, supply, out } => {
            let model = cfg.earthworm()?;
            let plant = cfg.plant()?;
            let supply = supply.map_or_else(|| cfg.f64("pneumatics.supply_kPa"), Ok)?;
            let freqs = parse_grid(sweep)?;
            let rows = robots::earthworm_speed_sweep(&model, &plant, &freqs, supply)?;
            if let Some((f, v)) = robots::speed_peak(&rows) {
                info!("peak speed {v:.3} mm/s at {f} Hz");
            }
            emit(out.as_deref(), &robots::speed_sweep_csv(&rows))
        }
        Robot::Quad {
            pressure,
            load,
            sweep_pressure,
            sweep_load,
            duration,
            out,
        } => {
            let model = cfg.quadruped()?;
            let text = if let Some(g) = sweep_pressure {
                robots::pressure_sweep_csv(&model, &parse_grid(g)?, *load)
            } else if let Some(g) = sweep_load {
                robots::load_sweep_csv(&model, &parse_grid(g)?, *pressure)
            } else if let Some(d) = duration {
                let walk = robots::quad_walk(&model, *pressure, *load, *d)?;
                info!("mean speed {:.4} mm/s", walk.mean_speed);
                let mut t = String::from("time_s,position_mm\n");
                for (time, x) in &walk.trajectory {
                    t.push_str(&format!("{time:.4},{x:.6}\n"));
                }
                t
            } else {
                let walk = robots::quad_walk(&model, *pressure, *load, model.cycle_period)?;
                format!("pressure_kPa,load_g,speed_mm_s\n{pressure:.4},{load:.4},{:.6}\n", walk.mean_speed)
            };
            emit(out.as_deref(), &text)
        }
        Robot::Gripper {
            mass,
            masses,
            diameter,
            p_cap,
            out,
        } => {
            let model = cfg.gripper()?;
            let d = diameter.unwrap_or(model.reference_diameter);
            let grid = match (mass, masses) {
                (Some(m), _) => vec![*m],
                (None, Some(g)) => parse_grid(g)?,
                (None, None) => parse_grid("0:300:25")?,
            };
            if let Some(cap) = p_cap {
                for tape in [false, true] {
                    let m = robots::max_liftable_mass(&model.with_tape(tape), *cap)?;
                    info!("max liftable mass at {cap} kPa, tape {tape}: {m:.2} g");
                }
            }
            emit(out.as_deref(), &robots::grasp_pressure_csv(&model, &grid, d)?)
        }
    }
}

fn cmd_control(cfg: &Config, l: &ControlLoop) -> Result<(), CliError> {
    match l {
        ControlLoop::Pressure {
            setpoint,
            hysteresis,
            frequency,
            duration,
            out,
        } => {
            let mode = match (setpoint, frequency) {
                (Some(s), _) => ControlMode::Hysteresis {
                    setpoint: *s,
                    hysteresis: *hysteresis,
                },
                (None, Some(f)) => ControlMode::DutyCycle {
                    frequency: *f,
                    duty: cfg.f64("pneumatics.duty")?,
                },
                (None, None) => return Err(CliError::Usage("give --setpoint or --frequency".into())),
            };
            let controller = OnOffController {
                sample_rate: cfg.f64("pneumatics.sample_rate_Hz")?,
                mode,
                noise: None,
            };
            let trace = pneumatics::run_controller(&controller, &cfg.plant()?, *duration)?;
            emit(out.as_deref(), &pneumatics::trace_csv(&trace))
        }
        ControlLoop::Bath { duration, out } => {
            let trace = pneumatics::run_bath(
                &cfg.bath()?,
                cfg.f64("bath.setpoint_C")?,
                cfg.f64("bath.hysteresis_C")?,
                *duration,
                cfg.f64("bath.dt_s")?,
            )?;
            emit(out.as_deref(), &pneumatics::bath_csv(&trace))
        }
    }
}

fn cmd_verify(cfg: &Config, a: &VerifyArgs) -> Result<(), CliError> {
    // Deliberately unvalidated so that soft penalty settings can be checked.
    let params = cfg.material()?;
    if !(params.c10 > 0.0 && params.kappa > 0.0) {
        return Err(CliError::Usage("c10 and kappa must be > 0".into()));
    }
    let results = verify::run_verify(&params, a.quick);
    let mut failed = 0;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} of {} checks failed", results.len())));
    }
    println!("all {} checks passed", results.len());
    Ok(())
}
