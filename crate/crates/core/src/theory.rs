//! Bogoliubov theory of the weakly interacting two-dimensional photon gas.
//!
//! Everything here is a closed-form scalar function in CGS units. Photons
//! confined between two planar mirrors acquire an effective mass
//! `m = ħnπ/(Lc) ≈ ħω/c²`; with a repulsive pair potential `V(κ)` and a
//! macroscopically occupied zero-momentum mode of `N₀` photons, the
//! elementary excitations obey
//!
//! ```text
//! ω̃(κ)² = κ²N₀V(κ)/m + κ⁴/4m²
//! ```
//!
//! which is linear (phonon-like) below the transition momentum `κ_c` and
//! free-particle-like above it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::meanfield::PhysicalParams;
use crate::units::{angular_frequency, C_LIGHT, HBAR};

/// Constants of the quantum description of the cavity photon gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumParams {
    pub hbar: f64,
    pub c: f64,
    pub omega: f64,
    pub mass: f64,
    pub n_condensate: f64,
    pub v_cav: f64,
}

impl QuantumParams {
    /// Builds the parameter set with the paraxial mass `ħω/c²`.
    ///
    /// `n_condensate` may be zero (empty condensate); every other field
    /// must be strictly positive.
    pub fn from_wavelength(wavelength: f64, n_condensate: f64, v_cav: f64) -> Result<Self> {
        if !(wavelength > 0.0) {
            return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
        }
        let omega = angular_frequency(wavelength);
        Self::new(HBAR, C_LIGHT, omega, HBAR * omega / (C_LIGHT * C_LIGHT), n_condensate, v_cav)
    }

    pub fn new(hbar: f64, c: f64, omega: f64, mass: f64, n_condensate: f64, v_cav: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("c", c), ("omega", omega), ("mass", mass), ("v_cav", v_cav)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::domain(format!("{name} must be positive and finite, got {value}")));
            }
        }
        if !(n_condensate >= 0.0) || !n_condensate.is_finite() {
            return Err(Error::domain(format!(
                "condensate number must be non-negative, got {n_condensate}"
            )));
        }
        Ok(QuantumParams {
            hbar,
            c,
            omega,
            mass,
            n_condensate,
            v_cav,
        })
    }

    pub fn with_condensate(self, n_condensate: f64) -> Result<Self> {
        Self::new(self.hbar, self.c, self.omega, self.mass, n_condensate, self.v_cav)
    }
}

/// Pair interaction `V(κ)` between photons, a function of `|κ|` only.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionKernel {
    /// Contact interaction, `V(κ) = V₀` (erg).
    Constant(f64),
    /// Samples `(κ, V)` with `κ` strictly increasing from zero, linearly
    /// interpolated and held flat beyond the last sample.
    Tabulated(Vec<(f64, f64)>),
}

impl InteractionKernel {
    pub fn constant(v0: f64) -> Result<Self> {
        if !(v0 >= 0.0) || !v0.is_finite() {
            return Err(Error::domain(format!("kernel strength must be non-negative, got {v0}")));
        }
        Ok(InteractionKernel::Constant(v0))
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        let Some(&(k0, _)) = samples.first() else {
            return Err(Error::domain("tabulated kernel needs at least one sample"));
        };
        if k0 != 0.0 {
            return Err(Error::domain(format!("tabulated kernel must start at κ=0, starts at {k0}")));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::domain("tabulated kernel momenta must be strictly increasing"));
            }
        }
        if let Some(&(k, v)) = samples.iter().find(|(_, v)| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!(
                "kernel must be repulsive (V ≥ 0), found V({k}) = {v}"
            )));
        }
        Ok(InteractionKernel::Tabulated(samples))
    }

    pub fn eval(&self, kappa: f64) -> f64 {
        let k = kappa.abs();
        match self {
            InteractionKernel::Constant(v0) => *v0,
            InteractionKernel::Tabulated(samples) => {
                let idx = samples.partition_point(|&(ks, _)| ks <= k);
                if idx == 0 {
                    return samples[0].1;
                }
                if idx == samples.len() {
                    return samples[samples.len() - 1].1;
                }
                let (k0, v0) = samples[idx - 1];
                let (k1, v1) = samples[idx];
                v0 + (v1 - v0) * (k - k0) / (k1 - k0)
            }
        }
    }
}

/// One Bogoliubov quasiparticle mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiparticleMode {
    pub kappa: f64,
    pub energy: f64,
    pub u: f64,
    pub v: f64,
}

/// Both forms of the photon mass: from the longitudinal mode number and
/// from the optical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMass {
    /// `ħnπ/(Lc)`.
    pub longitudinal: f64,
    /// `ħω/c²` with `ω = 2πc/λ`.
    pub paraxial: f64,
}

pub fn effective_mass(n_longitudinal: u64, cavity_length: f64, wavelength: f64) -> Result<EffectiveMass> {
    if n_longitudinal == 0 {
        return Err(Error::domain("longitudinal mode index must be ≥ 1"));
    }
    if !(cavity_length > 0.0) || !(wavelength > 0.0) {
        return Err(Error::domain(format!(
            "lengths must be positive (L={cavity_length}, λ={wavelength})"
        )));
    }
    let longitudinal = HBAR * n_longitudinal as f64 * PI / (cavity_length * C_LIGHT);
    let paraxial = HBAR * angular_frequency(wavelength) / (C_LIGHT * C_LIGHT);
    Ok(EffectiveMass {
        longitudinal,
        paraxial,
    })
}

/// Kinetic energy `p²/2m` of a free transverse photon.
pub fn free_dispersion(p_perp: f64, mass: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    Ok(p_perp * p_perp / (2.0 * mass))
}

/// `μ ≈ N₀V(0)`.
pub fn chemical_potential(params: &QuantumParams, kernel: &InteractionKernel) -> f64 {
    params.n_condensate * kernel.eval(0.0)
}

/// Single-particle energy in the Hartree approximation, `ε(p) + N₀V(p)`.
pub fn hartree_energy(p: f64, params: &QuantumParams, kernel: &InteractionKernel) -> f64 {
    p * p / (2.0 * params.mass) + params.n_condensate * kernel.eval(p)
}

pub fn bogoliubov_dispersion(kappa: f64, params: &QuantumParams, kernel: &InteractionKernel) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::domain(format!("momentum must be non-negative, got {kappa}")));
    }
    Ok(dispersion_unchecked(kappa, params, kernel))
}

fn dispersion_unchecked(kappa: f64, params: &QuantumParams, kernel: &InteractionKernel) -> f64 {
    let m = params.mass;
    let k2 = kappa * kappa;
    (k2 * params.n_condensate * kernel.eval(kappa) / m + k2 * k2 / (4.0 * m * m)).sqrt()
}

/// Bogoliubov amplitudes `u_κ`, `v_κ` (both taken positive).
///
/// `v²` is evaluated as `(N₀V)² / (2ω̃(ε'+ω̃))`, which equals
/// `½(ε'/ω̃ − 1)` but avoids the cancellation at large κ.
pub fn bogoliubov_coefficients(
    kappa: f64,
    params: &QuantumParams,
    kernel: &InteractionKernel,
) -> Result<QuasiparticleMode> {
    if kappa == 0.0 {
        return Err(Error::Singularity {
            what: "κ = 0",
            detail: "u and v diverge as κ → 0 (infrared divergence of the phonon branch)".into(),
        });
    }
    if !(kappa > 0.0) {
        return Err(Error::domain(format!("momentum must be positive, got {kappa}")));
    }
    let energy = dispersion_unchecked(kappa, params, kernel);
    let interaction = params.n_condensate * kernel.eval(kappa);
    let eps_prime = hartree_energy(kappa, params, kernel);
    let v2 = interaction * interaction / (2.0 * energy * (eps_prime + energy));
    let u2 = 1.0 + v2;
    Ok(QuasiparticleMode {
        kappa,
        energy,
        u: u2.sqrt(),
        v: v2.sqrt(),
    })
}

/// `v_s = √(N₀V(0)/m)`.
pub fn sound_speed(params: &QuantumParams, kernel: &InteractionKernel) -> f64 {
    (chemical_potential(params, kernel) / params.mass).sqrt()
}

const FIXED_POINT_MAX_ITER: usize = 100;
const FIXED_POINT_RTOL: f64 = 1e-12;
const FIXED_POINT_DAMPING: f64 = 0.5;

/// Momentum `κ_c = 2√(mN₀V(κ_c))` at which both terms of the dispersion
/// are equal.
pub fn transition_momentum(params: &QuantumParams, kernel: &InteractionKernel) -> Result<f64> {
    let target = |k: f64| 2.0 * (params.mass * params.n_condensate * kernel.eval(k)).sqrt();
    let start = target(0.0);
    if !(start > 0.0) {
        return Err(Error::DegenerateKernel(
            "N₀V(0) = 0: no interaction scale to define κ_c".into(),
        ));
    }
    match kernel {
        InteractionKernel::Constant(_) => Ok(start),
        InteractionKernel::Tabulated(_) => {
            let mut kappa = start;
            let mut trace = vec![kappa];
            for _ in 0..FIXED_POINT_MAX_ITER {
                let next = (1.0 - FIXED_POINT_DAMPING) * kappa + FIXED_POINT_DAMPING * target(kappa);
                trace.push(next);
                if !(next > 0.0) {
                    return Err(Error::DegenerateKernel(format!(
                        "fixed-point iterate collapsed to {next}"
                    )));
                }
                if (next - kappa).abs() <= FIXED_POINT_RTOL * next {
                    return Ok(next);
                }
                kappa = next;
            }
            Err(Error::NonConvergence {
                iterations: FIXED_POINT_MAX_ITER,
                trace,
            })
        }
    }
}

/// `λ_c = 2πħ/κ_c`, equal to `πħ/(m v_s)` for a contact interaction.
pub fn healing_length(params: &QuantumParams, kernel: &InteractionKernel) -> Result<f64> {
    if !(sound_speed(params, kernel) > 0.0) {
        return Err(Error::domain("sound speed vanishes; healing length undefined"));
    }
    Ok(2.0 * PI * params.hbar / transition_momentum(params, kernel)?)
}

/// Contact strength `V₀ = 8π(ħω)²|n₂|/V_cav`.
///
/// This is the kernel for which the Bogoliubov sound speed matches
/// `c√(|n₂|ℰ₀²)` once `ℰ₀² = 8πN₀ħω/V_cav`.
pub fn interaction_from_kerr(physical: &PhysicalParams, quantum: &QuantumParams) -> Result<InteractionKernel> {
    if physical.n2 == 0.0 {
        return Err(Error::DegenerateKernel("n₂ = 0 gives no photon-photon interaction".into()));
    }
    let hw = quantum.hbar * quantum.omega;
    InteractionKernel::constant(8.0 * PI * hw * hw * physical.n2.abs() / quantum.v_cav)
}

/// Condensate number from the intracavity energy density, `N₀ = ℰ₀²V_cav/(8πħω)`.
pub fn condensate_number(field_sq: f64, v_cav: f64, omega: f64) -> f64 {
    field_sq * v_cav / (8.0 * PI * HBAR * omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const RB_D2: f64 = 780.24e-7;

    fn section_six() -> (QuantumParams, InteractionKernel) {
        let q = QuantumParams::from_wavelength(RB_D2, 8.0e11, 152.7).unwrap();
        (q, InteractionKernel::Constant(6.4e-30))
    }

    #[test]
    fn paraxial_mass_of_rubidium_photon() {
        let m = effective_mass(1, 2.0, RB_D2).unwrap();
        assert_relative_eq!(m.paraxial, 2.83e-33, max_relative = 2e-3);
    }

    #[test]
    fn longitudinal_mass_matches_paraxial_on_resonance() {
        let length = 2.0;
        let n = (2.0 * length / RB_D2).round() as u64;
        let lambda = 2.0 * length / n as f64;
        let m = effective_mass(n, length, lambda).unwrap();
        assert_relative_eq!(m.longitudinal, m.paraxial, max_relative = 1e-12);
        let inv = m.longitudinal * length * C_LIGHT / (HBAR * PI);
        assert_relative_eq!(inv, n as f64, max_relative = 1e-12);
        let doubled = effective_mass(n, 2.0 * length, lambda).unwrap();
        assert_relative_eq!(doubled.longitudinal, 0.5 * m.longitudinal, max_relative = 1e-15);
    }

    #[test]
    fn effective_mass_rejects_bad_input() {
        assert!(effective_mass(0, 1.0, 1e-4).is_err());
        assert!(effective_mass(1, -1.0, 1e-4).is_err());
        assert!(effective_mass(1, 1.0, 0.0).is_err());
    }

    #[test]
    fn free_dispersion_scaling() {
        assert_eq!(free_dispersion(0.0, 1.0).unwrap(), 0.0);
        let e1 = free_dispersion(3.0e-25, 2.83e-33).unwrap();
        let e2 = free_dispersion(6.0e-25, 2.83e-33).unwrap();
        assert_relative_eq!(e2, 4.0 * e1, max_relative = 1e-15);
        // p²/2m = (2.4e-25)² / 5.66e-33
        assert_relative_eq!(free_dispersion(2.4e-25, 2.83e-33).unwrap(), 1.0177e-17, max_relative = 1e-3);
        assert!(free_dispersion(1.0, 0.0).is_err());
    }

    #[test]
    fn chemical_potential_and_sound_speed() {
        let (q, k) = section_six();
        assert_relative_eq!(chemical_potential(&q, &k), 5.12e-18, max_relative = 1e-12);
        assert_relative_eq!(sound_speed(&q, &k), 4.24e7, max_relative = 0.01);
        let empty = q.with_condensate(0.0).unwrap();
        assert_eq!(chemical_potential(&empty, &k), 0.0);
        assert_eq!(sound_speed(&empty, &k), 0.0);
        let doubled = q.with_condensate(1.6e12).unwrap();
        assert_relative_eq!(chemical_potential(&doubled, &k), 2.0 * chemical_potential(&q, &k));
    }

    #[test]
    fn hartree_energy_limits() {
        let (q, k) = section_six();
        let free = InteractionKernel::Constant(0.0);
        assert_eq!(hartree_energy(1e-25, &q, &free), free_dispersion(1e-25, q.mass).unwrap());
        assert_eq!(hartree_energy(0.0, &q, &k), chemical_potential(&q, &k));
        let shift = |p: f64| hartree_energy(p, &q, &k) - free_dispersion(p, q.mass).unwrap();
        assert_relative_eq!(shift(1e-26), shift(1e-24), max_relative = 1e-10);
    }

    #[test]
    fn dispersion_limits() {
        let (q, k) = section_six();
        assert_eq!(bogoliubov_dispersion(0.0, &q, &k).unwrap(), 0.0);
        assert!(bogoliubov_dispersion(-1.0, &q, &k).is_err());
        let free = InteractionKernel::Constant(0.0);
        let p = 3.0e-25;
        assert_relative_eq!(
            bogoliubov_dispersion(p, &q, &free).unwrap(),
            p * p / (2.0 * q.mass),
            max_relative = 1e-15
        );
        let kc = transition_momentum(&q, &k).unwrap();
        assert_relative_eq!(
            bogoliubov_dispersion(kc, &q, &k).unwrap(),
            kc * kc / (2f64.sqrt() * q.mass),
            max_relative = 1e-12
        );
    }

    #[test]
    fn transition_momentum_closed_form() {
        let (q, k) = section_six();
        let kc = transition_momentum(&q, &k).unwrap();
        assert_relative_eq!(kc, 2.0 * q.mass * sound_speed(&q, &k), max_relative = 1e-12);
        assert_relative_eq!(kc, 2.40e-25, max_relative = 5e-3);
        let q4 = q.with_condensate(4.0 * q.n_condensate).unwrap();
        assert_relative_eq!(transition_momentum(&q4, &k).unwrap(), 2.0 * kc, max_relative = 1e-14);
        let phonon = kc * kc * q.n_condensate * 6.4e-30 / q.mass;
        let particle = kc.powi(4) / (4.0 * q.mass * q.mass);
        assert_relative_eq!(phonon, particle, max_relative = 1e-10);
    }

    #[test]
    fn transition_momentum_tabulated_fixed_point() {
        let (q, _) = section_six();
        let kc0 = 2.4e-25;
        let kernel = InteractionKernel::tabulated(vec![(0.0, 6.4e-30), (2.0 * kc0, 3.2e-30)]).unwrap();
        let kc = transition_momentum(&q, &kernel).unwrap();
        let rhs = 2.0 * (q.mass * q.n_condensate * kernel.eval(kc)).sqrt();
        assert_relative_eq!(kc, rhs, max_relative = 1e-11);
        assert!(kc < 2.0 * (q.mass * q.n_condensate * 6.4e-30).sqrt());
    }

    #[test]
    fn transition_momentum_reports_degenerate_kernel() {
        let (q, _) = section_six();
        let err = transition_momentum(&q, &InteractionKernel::Constant(0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateKernel(_)));
    }

    #[test]
    fn healing_length_values() {
        let (q, k) = section_six();
        let lc = healing_length(&q, &k).unwrap();
        assert_relative_eq!(lc, PI * HBAR / (q.mass * sound_speed(&q, &k)), max_relative = 1e-12);
        assert_relative_eq!(lc, 2.76e-2, max_relative = 1e-2);
        let kc = transition_momentum(&q, &k).unwrap();
        assert_relative_eq!(lc * kc, 2.0 * PI * HBAR, max_relative = 1e-15);
        let empty = q.with_condensate(0.0).unwrap();
        assert!(healing_length(&empty, &k).is_err());
    }

    #[test]
    fn coefficients_without_interaction() {
        let (q, _) = section_six();
        let mode = bogoliubov_coefficients(1e-25, &q, &InteractionKernel::Constant(0.0)).unwrap();
        assert_eq!(mode.u, 1.0);
        assert_eq!(mode.v, 0.0);
    }

    #[test]
    fn coefficients_free_particle_recovery() {
        let (q, k) = section_six();
        let kc = transition_momentum(&q, &k).unwrap();
        let mode = bogoliubov_coefficients(1e4 * kc, &q, &k).unwrap();
        assert!(mode.v < 1e-7);
        assert_relative_eq!(mode.u, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn coefficients_satisfy_diagonalization_at_tenth_kc() {
        let (q, k) = section_six();
        let kc = transition_momentum(&q, &k).unwrap();
        let mode = bogoliubov_coefficients(0.1 * kc, &q, &k).unwrap();
        assert!((mode.u * mode.u - mode.v * mode.v - 1.0).abs() < 1e-12);
        let residual = (mode.energy * mode.u * mode.v - 0.5 * q.n_condensate * 6.4e-30).abs();
        assert!(residual < 1e-10 * mode.energy);
        // independent route: ½[±1 + ε'/ω̃]
        let ratio = hartree_energy(mode.kappa, &q, &k) / mode.energy;
        assert_relative_eq!(mode.u * mode.u, 0.5 * (1.0 + ratio), max_relative = 1e-12);
        assert_relative_eq!(mode.v * mode.v, 0.5 * (ratio - 1.0), max_relative = 1e-10);
    }

    #[test]
    fn coefficients_reject_zero_momentum() {
        let (q, k) = section_six();
        assert!(matches!(
            bogoliubov_coefficients(0.0, &q, &k),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn sound_speed_is_the_long_wavelength_slope() {
        let (q, k) = section_six();
        let kc = transition_momentum(&q, &k).unwrap();
        let kappa = 1e-3 * kc;
        let slope = bogoliubov_dispersion(kappa, &q, &k).unwrap() / kappa;
        assert_relative_eq!(slope, sound_speed(&q, &k), max_relative = 1e-5);
    }

    #[test]
    fn tabulated_kernel_validation_and_symmetry() {
        assert!(InteractionKernel::tabulated(vec![]).is_err());
        assert!(InteractionKernel::tabulated(vec![(1.0, 1.0)]).is_err());
        assert!(InteractionKernel::tabulated(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(InteractionKernel::tabulated(vec![(0.0, 1.0), (1.0, -2.0)]).is_err());
        let k = InteractionKernel::tabulated(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(k.eval(1.0), 2.0);
        assert_eq!(k.eval(-1.0), 2.0);
        assert_eq!(k.eval(10.0), 3.0);
    }
}
