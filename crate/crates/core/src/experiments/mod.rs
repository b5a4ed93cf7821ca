//! In-silico versions of the dispersion and obstacle-flow experiments, plus
//! the dense linearized-operator oracle.
//!
//! Everything here works in scaled units with a uniform background of
//! amplitude `ψ₀`; the healing length is `1/ψ₀` and the healing time `1/ψ₀²`.

mod dispersion;
mod fit;
mod flow;
mod oracle;
mod probe;
mod vortex;

pub use dispersion::{measure_dispersion, DispersionCurve, DispersionRow, DispersionSetup};
pub use fit::{fit_sinusoid, SinusoidFit};
pub use flow::{
    critical_velocity_scan, obstacle_flow_experiment, CriticalVelocityResult, DragSample, FlowResult, FlowSetup,
    SpeedTrial, DEFAULT_WINDOW,
};
pub use oracle::{dense_bdg_oracle, BdgSpectrum};
pub use probe::{sound_wave_probe, ProbeResult, ProbeSetup};
pub use vortex::{boundary_winding, core_radius, detect_vortices, detect_vortices_masked, Vortex, VortexSet};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Scaled transition wavelength `2π√2/ψ₀`, the scaled image of `λ/√Δn`.
pub fn scaled_transition_wavelength(psi0: f64) -> f64 {
    2.0 * PI * 2f64.sqrt() / psi0
}

/// Smallest domain side the experiments accept, in transition wavelengths.
pub const MIN_DOMAIN_WAVELENGTHS: f64 = 8.0;

/// Rejects domains too small to hold several transition wavelengths.
pub fn check_domain(grid: &GridSpec, psi0: f64) -> Result<()> {
    let need = MIN_DOMAIN_WAVELENGTHS * scaled_transition_wavelength(psi0);
    let side = grid.lx().min(grid.ly());
    if side < need {
        return Err(Error::DomainTooSmall(format!(
            "domain side {side:.3} is below {MIN_DOMAIN_WAVELENGTHS} transition wavelengths ({need:.3})"
        )));
    }
    Ok(())
}
