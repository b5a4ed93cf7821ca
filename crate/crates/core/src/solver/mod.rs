//! Split-step pseudospectral integration of the scaled Lugiato-Lefever
//! equation on a periodic grid.

mod forcing;
mod step;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use forcing::{Drive, Modulation, ObstacleSpec, Potential};
pub use step::{Integrator, StepStats, MAX_LINEAR_PHASE, MAX_NONLINEAR_PHASE};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, RealField};
use crate::meanfield::{scaled_sound_speed, ScaledParams};
use crate::par;
use crate::spectral::Fft2;

/// Everything needed to reproduce one time integration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub snapshot_every: usize,
    pub params: ScaledParams,
    pub potential: Option<Potential>,
    pub drive: Option<Drive>,
    pub initial: ComplexField,
    /// Zero the outer third of the spectrum on every linear step.
    pub dealias: bool,
}

impl RunConfig {
    pub fn new(initial: ComplexField, params: ScaledParams, dt: f64, n_steps: usize) -> Self {
        RunConfig {
            dt,
            n_steps,
            snapshot_every: n_steps.max(1),
            params,
            potential: None,
            drive: None,
            initial,
            dealias: false,
        }
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn with_drive(mut self, drive: Drive) -> Self {
        self.drive = Some(drive);
        self
    }

    pub fn grid(&self) -> &GridSpec {
        self.initial.grid()
    }

    /// No loss, drive or explicit time dependence: norm and energy are invariants.
    pub fn is_conservative(&self) -> bool {
        self.params.gamma == 0.0 && !self.potential.as_ref().is_some_and(|p| p.is_time_dependent())
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.initial.grid();
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::StepSize(format!("dt must be positive, got {}", self.dt)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every", "must be ≥ 1"));
        }
        if !self.initial.all_finite() {
            return Err(Error::Blowup {
                step: 0,
                min_abs: f64::NAN,
                max_abs: f64::NAN,
            });
        }
        if !(self.params.gamma >= 0.0) {
            return Err(Error::domain(format!("loss γ must be non-negative, got {}", self.params.gamma)));
        }
        if let Some(Potential::Static(v)) = &self.potential {
            grid.check_same(v.grid())?;
        }
        if let Some(d) = &self.drive {
            d.check_grid(grid)?;
        }
        step::check_step_size(grid, self.dt, &self.params, self.initial.max_abs_sqr())
    }
}

/// Norm and (for conservative runs) energy at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub time: f64,
    pub norm: f64,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: ComplexField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn final_field(&self) -> &ComplexField {
        &self.snapshots.last().expect("trajectory always holds the initial snapshot").field
    }
}

/// Returned by run observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Energy functional
/// `∬ |∇ψ|² − (s/2)|ψ|⁴ − δ|ψ|² + V|ψ|²` whose Hamiltonian flow is the
/// conservative part of the scaled equation.
pub fn energy(field: &ComplexField, params: &ScaledParams, potential: Option<&RealField>, fft: &mut Fft2) -> f64 {
    let s = params.sign.coefficient();
    let data = field.data();
    let v = potential.map(|p| p.data());
    let local = par::pairwise_sum(data.len(), &|i| {
        let rho = data[i].norm_sqr();
        -0.5 * s * rho * rho - params.delta * rho + v.map_or(0.0, |v| v[i]) * rho
    }) * field.grid().cell_area();
    fft.gradient_energy(field) + local
}

/// Advances the initial field by one time step.
pub fn step(field: &ComplexField, config: &RunConfig) -> Result<ComplexField> {
    let mut integrator = Integrator::new(config)?;
    field.grid().check_same(integrator.grid())?;
    let mut out = field.clone();
    integrator.step(&mut out, 0)?;
    Ok(out)
}

/// Runs the configuration and keeps every snapshot.
pub fn run(config: &RunConfig) -> Result<Trajectory> {
    let mut snapshots = Vec::new();
    let diagnostics = run_with(config, |time, field, _| {
        snapshots.push(Snapshot {
            time,
            field: field.clone(),
        });
        Control::Continue
    })?;
    Ok(Trajectory {
        snapshots,
        diagnostics,
    })
}

/// Runs the configuration, calling `observer(time, field, diagnostics)` at
/// `t = 0` and after every `snapshot_every` steps. The observer may stop the
/// run early. Returns the diagnostics series.
pub fn run_with<F>(config: &RunConfig, mut observer: F) -> Result<Vec<Diagnostics>>
where
    F: FnMut(f64, &ComplexField, &Diagnostics) -> Control,
{
    let mut integrator = Integrator::new(config)?;
    let conservative = config.is_conservative();
    let mut field = config.initial.clone();
    let mut series = Vec::new();

    let mut observe = |integrator: &mut Integrator, field: &ComplexField, step: usize| -> Result<Control> {
        let time = step as f64 * config.dt;
        let energy = if conservative {
            let v = integrator.potential_at(time)?;
            Some(energy(field, &config.params, v.as_ref(), integrator.fft_mut()))
        } else {
            None
        };
        let d = Diagnostics {
            time,
            norm: field.norm(),
            energy,
        };
        series.push(d);
        Ok(observer(time, field, &d))
    };

    if observe(&mut integrator, &field, 0)? == Control::Stop {
        return Ok(series);
    }
    for n in 0..config.n_steps {
        integrator.step(&mut field, n)?;
        let done = n + 1;
        if done % config.snapshot_every == 0 || done == config.n_steps {
            if observe(&mut integrator, &field, done)? == Control::Stop {
                break;
            }
        }
    }
    Ok(series)
}

/// Uniform fluid of amplitude `ψ₀` flowing along `+x` at `speed_ratio · v_s`.
///
/// A plane wave `e^{ikx}` moves at `2k` in scaled units, so the flow
/// wavenumber is `k = speed_ratio · √2ψ₀ / 2`. It must fit a whole number of
/// wavelengths into the periodic domain.
pub fn flowing_background(grid: &GridSpec, speed_ratio: f64, amplitude: f64) -> Result<ComplexField> {
    let k_flow = flow_wavenumber(grid, speed_ratio, amplitude)?;
    Ok(ComplexField::from_fn(*grid, |x, _| Complex64::from_polar(amplitude, k_flow * x)))
}

/// Quantized flow wavenumber for `speed_ratio`, or a commensurability error.
pub fn flow_wavenumber(grid: &GridSpec, speed_ratio: f64, amplitude: f64) -> Result<f64> {
    if speed_ratio == 0.0 {
        return Ok(0.0);
    }
    let vs = scaled_sound_speed(amplitude);
    if !(vs > 0.0) {
        return Err(Error::domain("a flowing background needs a nonzero amplitude"));
    }
    let dk = 2.0 * PI / grid.lx();
    let k_flow = speed_ratio * vs / 2.0;
    let cycles = k_flow / dk;
    let nearest = cycles.round();
    if (cycles - nearest).abs() > 1e-9 * nearest.abs().max(1.0) {
        return Err(Error::Commensurability {
            k_flow,
            nearest_speed_ratio: speed_ratio_quantum(grid, amplitude) * nearest,
        });
    }
    Ok(nearest * dk)
}

/// Smallest nonzero speed ratio representable on the grid.
pub fn speed_ratio_quantum(grid: &GridSpec, amplitude: f64) -> f64 {
    2.0 * (2.0 * PI / grid.lx()) / scaled_sound_speed(amplitude)
}

#[cfg(test)]
mod tests;
