use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, RealField};

/// Cylindrical obstacle `V(r) = height · exp(−(r/radius)⁸)`, optionally
/// moving at constant velocity and switched on smoothly over `ramp_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleSpec {
    pub center: (f64, f64),
    pub radius: f64,
    pub height: f64,
    pub velocity: (f64, f64),
    pub ramp_time: f64,
}

/// Beyond this many radii the super-Gaussian is below 1e-300.
const OBSTACLE_SUPPORT: f64 = 2.5;

impl ObstacleSpec {
    pub fn fixed(center: (f64, f64), radius: f64, height: f64) -> Self {
        ObstacleSpec {
            center,
            radius,
            height,
            velocity: (0.0, 0.0),
            ramp_time: 0.0,
        }
    }

    pub fn with_ramp(mut self, ramp_time: f64) -> Self {
        self.ramp_time = ramp_time;
        self
    }

    pub fn with_velocity(mut self, velocity: (f64, f64)) -> Self {
        self.velocity = velocity;
        self
    }

    pub fn is_moving(&self) -> bool {
        self.velocity != (0.0, 0.0)
    }

    /// Smoothstep switch-on factor in [0, 1].
    pub fn ramp(&self, t: f64) -> f64 {
        if self.ramp_time <= 0.0 || t >= self.ramp_time {
            return 1.0;
        }
        let u = (t / self.ramp_time).max(0.0);
        u * u * (3.0 - 2.0 * u)
    }

    pub fn center_at(&self, t: f64) -> (f64, f64) {
        (self.center.0 + self.velocity.0 * t, self.center.1 + self.velocity.1 * t)
    }

    /// Unramped profile at time `t`, using minimum-image distances.
    pub fn profile(&self, grid: &GridSpec, t: f64) -> RealField {
        let mut out = RealField::zeros(*grid);
        self.add_profile(grid, t, 1.0, &mut out);
        out
    }

    fn add_profile(&self, grid: &GridSpec, t: f64, scale: f64, out: &mut RealField) {
        let (cx, cy) = self.center_at(t);
        let reach = OBSTACLE_SUPPORT * self.radius;
        let (dx, dy) = (grid.dx(), grid.dy());
        let (nx, ny) = grid.shape();
        let span_x = ((reach / dx).ceil() as isize).min(nx as isize / 2);
        let span_y = ((reach / dy).ceil() as isize).min(ny as isize / 2);
        let ix0 = (cx / dx).round() as isize;
        let iy0 = (cy / dy).round() as isize;
        let data = out.data_mut();
        for jy in (iy0 - span_y)..(iy0 + span_y) {
            let y = jy as f64 * dy - cy;
            let iy = jy.rem_euclid(ny as isize) as usize;
            for jx in (ix0 - span_x)..(ix0 + span_x) {
                let x = jx as f64 * dx - cx;
                let ix = jx.rem_euclid(nx as isize) as usize;
                let r2 = (x * x + y * y) / (self.radius * self.radius);
                data[iy * nx + ix] += scale * self.height * (-(r2 * r2 * r2 * r2)).exp();
            }
        }
    }
}

/// Real potential `V(x, y, t)` entering as `−iVψ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Static(RealField),
    Obstacle(ObstacleSpec),
}

impl Potential {
    pub fn is_time_dependent(&self) -> bool {
        match self {
            Potential::Static(_) => false,
            Potential::Obstacle(o) => o.is_moving() || o.ramp_time > 0.0,
        }
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> Result<RealField> {
        match self {
            Potential::Static(v) => {
                grid.check_same(v.grid())?;
                Ok(v.clone())
            }
            Potential::Obstacle(o) => {
                let mut out = RealField::zeros(*grid);
                o.add_profile(grid, t, o.ramp(t), &mut out);
                Ok(out)
            }
        }
    }
}

/// Sinusoidally modulated drive component `profile · cos(frequency·t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulation {
    pub profile: ComplexField,
    pub frequency: f64,
}

/// External pump `ψ_d(x, y, t) = base(x, y) + profile(x, y) cos(Ωt)`.
///
/// A missing `base` means the uniform `ScaledParams::drive`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drive {
    pub base: Option<ComplexField>,
    pub modulation: Option<Modulation>,
}

impl Drive {
    pub(crate) fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if let Some(b) = &self.base {
            grid.check_same(b.grid())?;
        }
        if let Some(m) = &self.modulation {
            grid.check_same(m.profile.grid())?;
            if !m.frequency.is_finite() {
                return Err(Error::domain("modulation frequency must be finite"));
            }
        }
        Ok(())
    }
}

/// Exact solution of `dψ/dt = −γ(ψ − b − g cos Ωt)` from `t0` to `t1`,
/// returned as the pair of coefficients `(e^{−γh}, c)` such that
/// `ψ(t1) = b + (ψ(t0) − b) e^{−γh} + g c`.
pub(crate) fn relaxation_coefficients(gamma: f64, omega: f64, t0: f64, t1: f64) -> (f64, f64) {
    let h = t1 - t0;
    let decay = (-gamma * h).exp();
    // γ ∫ e^{−γ(t1−s)} cos(Ωs) ds
    let z = Complex64::new(gamma, omega);
    let integral = (Complex64::from_polar(1.0, omega * t1) - decay * Complex64::from_polar(1.0, omega * t0)) / z;
    (decay, gamma * integral.re)
}
