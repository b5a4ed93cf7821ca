use std::f64::consts::PI;

use num_complex::Complex64;

use super::dispersion::stable_dt;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::meanfield::{scaled_dispersion, scaled_sound_speed, scaled_wavenumber_for, KerrSign, ScaledParams};
use crate::solver::{run_with, Control, Drive, Modulation, RunConfig};

/// Settings of the point-source probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSetup {
    /// Background amplitude `ψ₀`, held by a uniform pump.
    pub amplitude: f64,
    /// Loss rate; it also absorbs waves before they wrap around the domain.
    pub gamma: f64,
    /// Peak of the modulated pump term, relative to `ψ₀`.
    pub strength: f64,
    /// Source position.
    pub source: (f64, f64),
    /// Lock-in window length in periods.
    pub lock_periods: usize,
}

impl ProbeSetup {
    /// Defaults for `grid`, with the source at the domain centre and a loss
    /// rate that damps periodic images by about `e⁻⁴` across the fit range.
    pub fn for_grid(grid: &GridSpec) -> Self {
        let psi0 = 1.0;
        let side = grid.lx().min(grid.ly());
        ProbeSetup {
            amplitude: psi0,
            gamma: 16.0 * scaled_sound_speed(psi0) / side,
            strength: 1e-2,
            source: (0.5 * grid.lx(), 0.5 * grid.ly()),
            lock_periods: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub omega: f64,
    /// Mean of the four scan-line wavenumbers.
    pub k_measured: f64,
    /// Wavenumbers along `+x`, `−x`, `+y`, `−y`.
    pub line_wavenumbers: [f64; 4],
    /// Closed-form frequency at the measured wavenumber.
    pub omega_at_k: f64,
    /// `|Ω(K_meas) − Ω_mod| / Ω_mod`.
    pub rel_mismatch: f64,
    /// Response power at the antipodal lines relative to the peak.
    pub boundary_ratio: f64,
}

impl ProbeResult {
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k_measured
    }
}

/// Drives the background at one point with a pump modulated at `omega` and
/// measures the wavelength of the outgoing density ripples.
///
/// After the transients have decayed, the complex response
/// `A(x) = ⟨|ψ|² e^{iΩt}⟩` is accumulated over whole periods. Its phase is
/// unwrapped along the four grid lines through the source and fitted
/// linearly over radii `[L/16, 3L/8]`.
pub fn sound_wave_probe(omega: f64, grid: &GridSpec, setup: &ProbeSetup) -> Result<ProbeResult> {
    let psi0 = setup.amplitude;
    if !(psi0 > 0.0) || !(setup.gamma > 0.0) || !(setup.strength > 0.0) || setup.lock_periods == 0 {
        return Err(Error::domain("probe needs positive amplitude, loss, strength and lock window"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::MeasurementQuality(format!(
            "modulation frequency {omega} is out of band: the wavelength diverges"
        )));
    }
    let k_expected = scaled_wavenumber_for(omega, psi0);
    let side = grid.lx().min(grid.ly());
    if 2.0 * PI / k_expected > side / 4.0 {
        return Err(Error::MeasurementQuality(format!(
            "out of band: expected wavelength {:.3} exceeds a quarter of the domain ({:.3})",
            2.0 * PI / k_expected,
            side / 4.0
        )));
    }
    let k_limit = 2.0 / 3.0 * PI / grid.dx().max(grid.dy());
    if k_expected >= k_limit {
        return Err(Error::domain(format!(
            "expected wavenumber {k_expected:.4} is above the grid resolution limit {k_limit:.4}"
        )));
    }

    let params = ScaledParams::dimensionless(psi0 * psi0, setup.gamma, psi0, KerrSign::Defocusing);
    let sigma = grid.dx().max(grid.dy());
    let (sx, sy) = setup.source;
    let (lx, ly) = (grid.lx(), grid.ly());
    let wrap = |d: f64, l: f64| d - l * (d / l).round();
    let profile = ComplexField::from_fn(*grid, |x, y| {
        let r2 = wrap(x - sx, lx).powi(2) + wrap(y - sy, ly).powi(2);
        Complex64::new(setup.strength * psi0 * (-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
    });
    let drive = Drive {
        base: None,
        modulation: Some(Modulation {
            profile,
            frequency: omega,
        }),
    };

    let period = 2.0 * PI / omega;
    let per_period = (period / stable_dt(grid, 1.2 * psi0 * psi0)).ceil().max(40.0) as usize;
    let dt = period / per_period as f64;
    let settle = 0.375 * side / scaled_sound_speed(psi0) + 8.0 / setup.gamma;
    let settle_steps = (settle / period).ceil() as usize * per_period;
    let lock_steps = setup.lock_periods * per_period;
    let config = RunConfig::new(ComplexField::uniform(*grid, Complex64::new(psi0, 0.0)), params, dt, settle_steps + lock_steps)
        .with_snapshot_every(1)
        .with_drive(drive);

    let mut response = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut step = 0usize;
    run_with(&config, |t, field, _| {
        if step >= settle_steps && step < settle_steps + lock_steps {
            let phase = Complex64::from_polar(1.0, omega * t);
            for (a, z) in response.iter_mut().zip(field.data()) {
                *a += z.norm_sqr() * phase;
            }
        }
        step += 1;
        Control::Continue
    })?;

    let (nx, ny) = grid.shape();
    let isx = ((sx / grid.dx()).round() as isize).rem_euclid(nx as isize) as usize;
    let isy = ((sy / grid.dy()).round() as isize).rem_euclid(ny as isize) as usize;
    let peak = response.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let far_x = (isx + nx / 2) % nx;
    let far_y = (isy + ny / 2) % ny;
    let far = (0..ny)
        .map(|iy| response[iy * nx + far_x].norm_sqr())
        .chain((0..nx).map(|ix| response[far_y * nx + ix].norm_sqr()))
        .fold(0.0, f64::max);
    let boundary_ratio = far / peak;
    if boundary_ratio > 1e-2 {
        return Err(Error::DomainTooSmall(format!(
            "response at the domain boundary is {:.2}% of the peak; enlarge the domain or raise the loss",
            100.0 * boundary_ratio
        )));
    }

    let line = |dir: (isize, isize), n: usize, h: f64, l: f64| {
        let at = |j: usize| {
            let ix = (isx as isize + dir.0 * j as isize).rem_euclid(nx as isize) as usize;
            let iy = (isy as isize + dir.1 * j as isize).rem_euclid(ny as isize) as usize;
            response[iy * nx + ix]
        };
        phase_slope(&(0..n / 2).map(at).collect::<Vec<_>>(), h, l / 16.0, 3.0 * l / 8.0)
    };
    let line_wavenumbers = [
        line((1, 0), nx, grid.dx(), lx),
        line((-1, 0), nx, grid.dx(), lx),
        line((0, 1), ny, grid.dy(), ly),
        line((0, -1), ny, grid.dy(), ly),
    ];
    let k_measured = line_wavenumbers.iter().sum::<f64>() / 4.0;
    let omega_at_k = scaled_dispersion(k_measured, psi0);
    Ok(ProbeResult {
        omega,
        k_measured,
        line_wavenumbers,
        omega_at_k,
        rel_mismatch: (omega_at_k - omega).abs() / omega,
        boundary_ratio,
    })
}

/// Magnitude of the least-squares slope of the unwrapped phase of `samples`
/// (spaced by `h` from the source) over radii `[r0, r1]`.
fn phase_slope(samples: &[Complex64], h: f64, r0: f64, r1: f64) -> f64 {
    let mut unwrapped = Vec::with_capacity(samples.len());
    let mut acc = samples[0].arg();
    unwrapped.push(acc);
    for w in samples.windows(2) {
        acc += (w[1] * w[0].conj()).arg();
        unwrapped.push(acc);
    }
    let pts: Vec<(f64, f64)> = unwrapped
        .iter()
        .enumerate()
        .map(|(j, &p)| (j as f64 * h, p))
        .filter(|&(r, _)| r >= r0 && r <= r1)
        .collect();
    let n = pts.len() as f64;
    let mr = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mp = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mr) * (p.1 - mp)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mr) * (p.0 - mr)).sum();
    (sxy / sxx).abs()
}
