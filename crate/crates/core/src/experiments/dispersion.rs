use std::f64::consts::PI;

use num_complex::Complex64;

use super::fit::fit_sinusoid;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::meanfield::{scaled_dispersion, ScaledParams};
use crate::par;
use crate::solver::{run_with, Control, RunConfig, MAX_LINEAR_PHASE, MAX_NONLINEAR_PHASE};

/// One measured point of the excitation spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub k: f64,
    pub omega_measured: f64,
    pub omega_theory: f64,
    pub rel_err: f64,
    pub fit_residual: f64,
}

/// Measured dispersion curve, sorted by strictly increasing `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub amplitude: f64,
    pub rows: Vec<DispersionRow>,
}

impl DispersionCurve {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    /// Measured frequency at `k` by linear interpolation between rows.
    pub fn interpolate(&self, k: f64) -> Option<f64> {
        let i = self.rows.windows(2).position(|w| w[0].k <= k && k <= w[1].k)?;
        let (a, b) = (self.rows[i], self.rows[i + 1]);
        let u = (k - a.k) / (b.k - a.k);
        Some(a.omega_measured + u * (b.omega_measured - a.omega_measured))
    }
}

/// Knobs of the dispersion measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSetup {
    /// Background amplitude `ψ₀`.
    pub amplitude: f64,
    /// Relative seed modulation `ε`.
    pub seed: f64,
    /// Oscillation periods in the fit window.
    pub periods: f64,
    /// Minimum time steps per expected period.
    pub steps_per_period: f64,
    /// Largest fit residual accepted.
    pub max_residual: f64,
}

impl Default for DispersionSetup {
    fn default() -> Self {
        DispersionSetup {
            amplitude: 1.0,
            seed: 1e-3,
            periods: 5.0,
            steps_per_period: 40.0,
            max_residual: 1e-3,
        }
    }
}

/// Measures the small-amplitude excitation frequency at each wavenumber.
///
/// Each `K` gets its own conservative run seeded with
/// `ψ₀(1 + ε cos Kx)`. The `K` Fourier component of `|ψ|²` is recorded every
/// step and fitted with a single sinusoid. Runs are independent jobs.
pub fn measure_dispersion(k_list: &[f64], grid: &GridSpec, setup: &DispersionSetup) -> Result<DispersionCurve> {
    let psi0 = setup.amplitude;
    if !(psi0 > 0.0) || !psi0.is_finite() {
        return Err(Error::domain(format!("amplitude must be positive, got {psi0}")));
    }
    if !(setup.seed > 0.0 && setup.seed <= 1e-3) {
        return Err(Error::domain(format!("seed ε must lie in (0, 1e-3], got {}", setup.seed)));
    }
    if !(setup.periods >= 5.0) {
        return Err(Error::domain("the fit window must hold at least 5 periods"));
    }
    if k_list.is_empty() || k_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("K list must be non-empty and strictly increasing"));
    }
    let dk = 2.0 * PI / grid.lx();
    for &k in k_list {
        let m = k / dk;
        if !(k > 0.0) || (m - m.round()).abs() > 1e-9 * m.max(1.0) {
            return Err(Error::domain(format!(
                "K = {k} is not a positive multiple of the grid wavenumber {dk}"
            )));
        }
        if k >= PI / grid.dx() {
            return Err(Error::domain(format!("K = {k} is beyond the grid Nyquist wavenumber")));
        }
    }
    let rows = par::map(k_list, |&k| measure_one(k, grid, setup));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DispersionCurve { amplitude: psi0, rows })
}

/// Largest stable time step for a conservative run at amplitude `ψ₀`, with
/// a safety margin on both step-size bounds.
pub(crate) fn stable_dt(grid: &GridSpec, peak_sqr: f64) -> f64 {
    let kx = PI / grid.dx();
    let ky = PI / grid.dy();
    let linear = MAX_LINEAR_PHASE / (kx * kx + ky * ky);
    let nonlinear = MAX_NONLINEAR_PHASE / peak_sqr;
    0.95 * linear.min(nonlinear)
}

fn measure_one(k: f64, grid: &GridSpec, setup: &DispersionSetup) -> Result<DispersionRow> {
    let psi0 = setup.amplitude;
    let eps = setup.seed;
    let omega_theory = scaled_dispersion(k, psi0);
    let period = 2.0 * PI / omega_theory;
    let peak = (psi0 * (1.0 + eps)).powi(2);
    let dt_max = stable_dt(grid, peak).min(period / setup.steps_per_period);
    let n_steps = (setup.periods * period / dt_max).ceil() as usize;
    let dt = setup.periods * period / n_steps as f64;

    let initial = ComplexField::from_fn(*grid, |x, _| Complex64::new(psi0 * (1.0 + eps * (k * x).cos()), 0.0));
    let config = RunConfig::new(initial, ScaledParams::conservative(), dt, n_steps).with_snapshot_every(1);
    let basis: Vec<f64> = (0..grid.nx()).map(|ix| (k * grid.x(ix)).cos()).collect();
    let nx = grid.nx();
    let norm = 2.0 / grid.len() as f64;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut values = Vec::with_capacity(n_steps + 1);
    run_with(&config, |t, field, _| {
        let data = field.data();
        let c = par::pairwise_sum(data.len(), &|i| data[i].norm_sqr() * basis[i % nx]) * norm;
        times.push(t);
        values.push(c);
        Control::Continue
    })?;

    let fit = fit_sinusoid(&times, &values)?;
    if fit.residual > setup.max_residual {
        return Err(Error::MeasurementQuality(format!(
            "K = {k}: fit residual {:.3e} exceeds {:.1e}; shorten dt or lengthen the window",
            fit.residual, setup.max_residual
        )));
    }
    Ok(DispersionRow {
        k,
        omega_measured: fit.omega,
        omega_theory,
        rel_err: (fit.omega - omega_theory).abs() / omega_theory,
        fit_residual: fit.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_points_follow_the_scaled_curve() {
        let grid = GridSpec::new(64, 16, 40.0 * PI, 40.0 * PI).unwrap();
        let ks = [0.1, 0.5, 1.5];
        let curve = measure_dispersion(&ks, &grid, &DispersionSetup::default()).unwrap();
        assert_eq!(curve.rows.len(), 3);
        for r in &curve.rows {
            assert!(r.rel_err < 1e-2, "{r:?}");
            assert!(r.fit_residual < 1e-3);
        }
        assert!((curve.rows[0].omega_theory - 0.14177).abs() < 1e-5);
    }

    #[test]
    fn free_particle_limit() {
        let grid = GridSpec::new(32, 16, 40.0 * PI, 40.0 * PI).unwrap();
        let setup = DispersionSetup {
            amplitude: 1e-4,
            ..Default::default()
        };
        let curve = measure_dispersion(&[0.5], &grid, &setup).unwrap();
        assert!((curve.rows[0].omega_measured - 0.25).abs() / 0.25 < 1e-3);
    }

    #[test]
    fn rejects_incommensurate_and_unordered_wavenumbers() {
        let grid = GridSpec::square(32, 40.0 * PI).unwrap();
        let s = DispersionSetup::default();
        assert!(measure_dispersion(&[0.11], &grid, &s).is_err());
        assert!(measure_dispersion(&[0.2, 0.1], &grid, &s).is_err());
        assert!(measure_dispersion(&[], &grid, &s).is_err());
        let loud = DispersionSetup { seed: 0.1, ..s };
        assert!(measure_dispersion(&[0.1], &grid, &loud).is_err());
    }

    #[test]
    fn interpolation_between_rows() {
        let row = |k: f64, w: f64| DispersionRow {
            k,
            omega_measured: w,
            omega_theory: w,
            rel_err: 0.0,
            fit_residual: 0.0,
        };
        let c = DispersionCurve {
            amplitude: 1.0,
            rows: vec![row(1.0, 2.0), row(2.0, 4.0)],
        };
        assert_eq!(c.interpolate(1.5), Some(3.0));
        assert_eq!(c.interpolate(3.0), None);
    }
}
