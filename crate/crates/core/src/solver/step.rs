use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::forcing::{relaxation_coefficients, Drive, Potential};
use super::RunConfig;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, RealField};
use crate::meanfield::ScaledParams;
use crate::par;
use crate::spectral::Fft2;

/// Bound on `dt · |ψ|²_max` for the nonlinear sub-step.
pub const MAX_NONLINEAR_PHASE: f64 = 0.1;

/// Bound on `dt · max|K² − δ|` for the linear sub-step.
pub const MAX_LINEAR_PHASE: f64 = FRAC_PI_4;

/// Pointwise extrema seen during the last nonlinear sub-step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub max_abs_sqr: f64,
    pub min_abs_sqr: f64,
}

/// Second-order Strang integrator for the scaled Lugiato-Lefever equation.
///
/// One step of length `h` is
///
/// ```text
/// N(h/2)[t] · D(h/2) · L(h) · D(h/2) · N(h/2)[t+h]
/// ```
///
/// where `N` is the exact local phase rotation (Kerr, detuning and potential),
/// `D` the exact relaxation toward the drive, and `L` the exact diffraction
/// propagator applied in Fourier space. Every sub-step is an exact flow, and
/// the composition is symmetric. Keeping the detuning next to the Kerr phase
/// makes uniform steady states exact fixed points of the step, which matters
/// for driven states sitting close to a bistability fold.
#[derive(Debug)]
pub struct Integrator {
    grid: GridSpec,
    fft: Fft2,
    dt: f64,
    params: ScaledParams,
    propagator: Vec<Complex64>,
    potential: Option<Potential>,
    static_potential: Option<RealField>,
    drive: Option<Drive>,
}

impl Integrator {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let grid = *config.initial.grid();
        config.validate()?;
        let k2 = grid.k_squared();
        let dt = config.dt;
        let kx = grid.wavenumbers_x();
        let ky = grid.wavenumbers_y();
        // 2/3-rule mask for cubic nonlinearities
        let kx_cut = 2.0 / 3.0 * std::f64::consts::PI / grid.dx();
        let ky_cut = 2.0 / 3.0 * std::f64::consts::PI / grid.dy();
        let propagator = k2
            .iter()
            .enumerate()
            .map(|(i, &k2)| {
                let keep = !config.dealias || (kx[i % grid.nx()].abs() < kx_cut && ky[i / grid.nx()].abs() < ky_cut);
                if keep {
                    Complex64::from_polar(1.0, -k2 * dt)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let static_potential = match &config.potential {
            Some(p) if !p.is_time_dependent() => Some(p.sample(&grid, 0.0)?),
            _ => None,
        };
        Ok(Integrator {
            grid,
            fft: Fft2::new(grid),
            dt,
            params: config.params,
            propagator,
            potential: config.potential.clone(),
            static_potential,
            drive: config.drive.clone(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn fft_mut(&mut self) -> &mut Fft2 {
        &mut self.fft
    }

    /// Potential at time `t`, or `None` without one.
    pub fn potential_at(&self, t: f64) -> Result<Option<RealField>> {
        match (&self.static_potential, &self.potential) {
            (Some(v), _) => Ok(Some(v.clone())),
            (None, Some(p)) => Ok(Some(p.sample(&self.grid, t)?)),
            (None, None) => Ok(None),
        }
    }

    /// Advances `field` from `step_index·dt` to `(step_index+1)·dt`.
    pub fn step(&mut self, field: &mut ComplexField, step_index: usize) -> Result<StepStats> {
        let t0 = step_index as f64 * self.dt;
        let t1 = t0 + self.dt;
        let half = 0.5 * self.dt;

        let v0 = self.time_dependent_potential(t0)?;
        self.nonlinear(field, half, v0.as_ref().or(self.static_potential.as_ref()));
        self.relax(field, t0, t0 + half);
        self.linear(field);
        self.relax(field, t0 + half, t1);
        let v1 = self.time_dependent_potential(t1)?;
        let stats = self.nonlinear(field, half, v1.as_ref().or(self.static_potential.as_ref()));

        if !(stats.max_abs_sqr.is_finite()) {
            return Err(Error::Blowup {
                step: step_index,
                min_abs: stats.min_abs_sqr.sqrt(),
                max_abs: stats.max_abs_sqr.sqrt(),
            });
        }
        if self.dt * stats.max_abs_sqr >= MAX_NONLINEAR_PHASE {
            return Err(Error::StepSize(format!(
                "step {step_index}: dt·|ψ|²max = {:.3e} ≥ {MAX_NONLINEAR_PHASE}",
                self.dt * stats.max_abs_sqr
            )));
        }
        Ok(stats)
    }

    fn time_dependent_potential(&self, t: f64) -> Result<Option<RealField>> {
        match &self.potential {
            Some(p) if p.is_time_dependent() => Ok(Some(p.sample(&self.grid, t)?)),
            _ => Ok(None),
        }
    }

    fn nonlinear(&self, field: &mut ComplexField, h: f64, potential: Option<&RealField>) -> StepStats {
        const CHUNK: usize = 4096;
        let s = self.params.sign.coefficient();
        let delta = self.params.delta;
        let v = potential.map(|p| p.data());
        let extrema = par::map_chunks_mut(field.data_mut(), CHUNK, |ci, chunk| {
            let base = ci * CHUNK;
            let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
            let mut finite = true;
            for (j, z) in chunk.iter_mut().enumerate() {
                let rho = z.norm_sqr();
                finite &= rho.is_finite();
                let pot = v.map_or(0.0, |v| v[base + j]);
                *z *= Complex64::from_polar(1.0, (s * rho + delta - pot) * h);
                hi = hi.max(rho);
                lo = lo.min(rho);
            }
            (if finite { hi } else { f64::NAN }, lo)
        });
        let mut stats = StepStats {
            max_abs_sqr: 0.0,
            min_abs_sqr: f64::INFINITY,
        };
        for (hi, lo) in extrema {
            stats.max_abs_sqr = if hi.is_nan() { f64::NAN } else { stats.max_abs_sqr.max(hi) };
            stats.min_abs_sqr = stats.min_abs_sqr.min(lo);
        }
        stats
    }

    fn relax(&self, field: &mut ComplexField, ta: f64, tb: f64) {
        let gamma = self.params.gamma;
        if gamma == 0.0 {
            return;
        }
        let uniform = Complex64::new(self.params.drive, 0.0);
        let base = self.drive.as_ref().and_then(|d| d.base.as_ref()).map(|b| b.data());
        let modulation = self.drive.as_ref().and_then(|d| d.modulation.as_ref());
        let (decay, mod_coeff) = relaxation_coefficients(gamma, modulation.map_or(0.0, |m| m.frequency), ta, tb);
        let profile = modulation.map(|m| m.profile.data());
        par::for_each_indexed_mut(field.data_mut(), |i, z| {
            let b = base.map_or(uniform, |b| b[i]);
            let mut next = b + (*z - b) * decay;
            if let Some(p) = profile {
                next += p[i] * mod_coeff;
            }
            *z = next;
        });
    }

    fn linear(&mut self, field: &mut ComplexField) {
        let data = field.data_mut();
        self.fft.forward(data);
        let prop = &self.propagator;
        par::for_each_indexed_mut(data, |i, z| *z *= prop[i]);
        self.fft.inverse(data);
    }
}

/// Checks the step-size contract for a configuration.
pub(crate) fn check_step_size(grid: &GridSpec, dt: f64, params: &ScaledParams, initial_max_sqr: f64) -> Result<()> {
    let kx = std::f64::consts::PI / grid.dx();
    let ky = std::f64::consts::PI / grid.dy();
    let k2_max = kx * kx + ky * ky;
    let linear = dt * (k2_max - params.delta).abs().max(params.delta.abs());
    if !(linear < MAX_LINEAR_PHASE) {
        return Err(Error::StepSize(format!(
            "dt·max|K²−δ| = {linear:.4} ≥ π/4; reduce dt below {:.4e}",
            MAX_LINEAR_PHASE / (k2_max - params.delta).abs().max(params.delta.abs())
        )));
    }
    if !(dt * initial_max_sqr < MAX_NONLINEAR_PHASE) {
        return Err(Error::StepSize(format!(
            "dt·|ψ|²max = {:.4} ≥ {MAX_NONLINEAR_PHASE}",
            dt * initial_max_sqr
        )));
    }
    Ok(())
}
