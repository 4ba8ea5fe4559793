//! Sampled on/off pressure controller.

use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use super::{positive, step_plant, PneumaticError, PneumaticPlant};

/// Default controller sampling rate, Hz.
pub const DEFAULT_SAMPLE_RATE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlMode {
    /// Fill below `setpoint − hysteresis`, vent above `setpoint + hysteresis`,
    /// hold in between.
    Hysteresis { setpoint: f64, hysteresis: f64 },
    /// Fill for the first `duty` fraction of each period, vent for the rest.
    DutyCycle { frequency: f64, duty: f64 },
}

/// Additive Gaussian noise on the sensed pressure, kPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorNoise {
    pub std_dev: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffController {
    pub sample_rate: f64,
    pub mode: ControlMode,
    pub noise: Option<SensorNoise>,
}

impl OnOffController {
    pub fn hysteresis(setpoint: f64, hysteresis: f64) -> Self {
        OnOffController {
            sample_rate: DEFAULT_SAMPLE_RATE,
            mode: ControlMode::Hysteresis { setpoint, hysteresis },
            noise: None,
        }
    }

    pub fn duty_cycle(frequency: f64, duty: f64) -> Self {
        OnOffController {
            sample_rate: DEFAULT_SAMPLE_RATE,
            mode: ControlMode::DutyCycle { frequency, duty },
            noise: None,
        }
    }

    pub fn with_sample_rate(mut self, rate: f64) -> Self {
        self.sample_rate = rate;
        self
    }

    pub fn with_noise(mut self, noise: SensorNoise) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn validate(&self) -> Result<(), PneumaticError> {
        positive("sample_rate", self.sample_rate)?;
        match self.mode {
            ControlMode::Hysteresis { hysteresis, .. } if !(hysteresis >= 0.0) => Err(
                PneumaticError::InvalidParameter(format!("hysteresis must be >= 0, got {hysteresis}")),
            ),
            ControlMode::DutyCycle { frequency, duty } => {
                positive("frequency", frequency)?;
                if duty > 0.0 && duty < 1.0 {
                    Ok(())
                } else {
                    Err(PneumaticError::InvalidParameter(format!("duty must be in (0, 1), got {duty}")))
                }
            }
            _ => Ok(()),
        }
    }

    /// Valve command `(inlet, vent)` for the sensed pressure at sample `k`.
    fn decide(&self, k: u64, sensed: f64) -> (bool, bool) {
        match self.mode {
            ControlMode::Hysteresis { setpoint, hysteresis } => {
                if sensed < setpoint - hysteresis {
                    (true, false)
                } else if sensed > setpoint + hysteresis {
                    (false, true)
                } else {
                    (false, false)
                }
            }
            ControlMode::DutyCycle { frequency, duty } => {
                let t = k as f64 / self.sample_rate;
                let phase = (t * frequency).fract();
                if phase < duty {
                    (true, false)
                } else {
                    (false, true)
                }
            }
        }
    }
}

/// State at a sample instant; valve flags are the command issued there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub time: f64,
    pub pressure: f64,
    pub inlet: bool,
    pub vent: bool,
}

/// Simulates `duration` seconds. One decision is made per sample period;
/// the plant is advanced exactly between decisions.
pub fn run_controller(
    controller: &OnOffController,
    plant: &PneumaticPlant,
    duration: f64,
) -> Result<Vec<TraceSample>, PneumaticError> {
    controller.validate()?;
    plant.validate()?;
    positive("duration", duration)?;
    let dt = 1.0 / controller.sample_rate;
    let samples = (duration * controller.sample_rate + 1e-9).floor() as u64;
    let mut noise = controller.noise.map(|n| {
        (
            StdRng::seed_from_u64(n.seed),
            Normal::new(0.0, n.std_dev.max(0.0)).expect("non-negative std dev"),
        )
    });
    let mut state = *plant;
    let mut trace = Vec::with_capacity(samples as usize);
    for k in 0..samples {
        let sensed = match noise.as_mut() {
            Some((rng, dist)) => state.chamber_pressure + dist.sample(rng),
            None => state.chamber_pressure,
        };
        let (inlet, vent) = controller.decide(k, sensed);
        state.set_valves(inlet, vent)?;
        trace.push(TraceSample {
            time: k as f64 * dt,
            pressure: state.chamber_pressure,
            inlet,
            vent,
        });
        state = step_plant(&state, dt)?;
    }
    Ok(trace)
}

pub fn trace_csv(trace: &[TraceSample]) -> String {
    let mut out = String::from("time_s,pressure_kPa,inlet,vent\n");
    for s in trace {
        let _ = writeln!(
            out,
            "{:.4},{:.6},{},{}",
            s.time,
            s.pressure,
            u8::from(s.inlet),
            u8::from(s.vent)
        );
    }
    out
}
