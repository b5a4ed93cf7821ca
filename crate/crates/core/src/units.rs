//! CGS constants and the handful of lab-unit conversions used at the boundary.

use std::f64::consts::PI;

/// Reduced Planck constant, erg·s.
pub const HBAR: f64 = 1.054_571_817e-27;

/// Speed of light in vacuum, cm/s.
pub const C_LIGHT: f64 = 2.997_924_58e10;

/// 1 W = 10⁷ erg/s.
pub const ERG_PER_JOULE: f64 = 1.0e7;

pub fn watts_per_cm2_to_cgs(intensity: f64) -> f64 {
    intensity * ERG_PER_JOULE
}

pub fn mhz_to_rad_per_s(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1.0e6
}

pub fn rad_per_s_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1.0e6)
}

pub fn nm_to_cm(nm: f64) -> f64 {
    nm * 1.0e-7
}

/// Optical angular frequency for a vacuum wavelength in cm.
pub fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * C_LIGHT / wavelength
}

/// Relative difference `|a-b| / max(|a|,|b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
