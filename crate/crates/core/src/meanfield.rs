//! Classical mean-field model of the Kerr cavity.
//!
//! The intracavity envelope obeys the driven, damped Lugiato-Lefever equation
//!
//! ```text
//! ∂ℰ/∂t = (ic/2k)∇⊥²ℰ + iωn₂|ℰ|²ℰ + iΔωℰ − Γ(ℰ − ℰ_d)
//! ```
//!
//! Internally everything runs in scaled units: time in `t₀ = 1/(ω|n₂|ℰ₀²)`,
//! length in `x₀ = √(c t₀/2k)` and field in `ℰ₀`, which turns the equation
//! into
//!
//! ```text
//! ∂ψ/∂τ = i∇²ψ ∓ i|ψ|²ψ + iδψ − iVψ − γ(ψ − ψ_d)
//! ```
//!
//! with the upper sign for a self-defocusing medium. `V` is an optional
//! static potential (an obstacle), equivalent to a local detuning shift `−V`.
//! Small fluctuations on the uniform state then follow
//! `Ω'(K') = √(K'⁴ + 2|ψ₀|²K'²)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, RealField};
use crate::special::bessel_j0;
use crate::spectral::Fft2;
use crate::units::C_LIGHT;

/// Upper bound on the Kerr index change for the weak-nonlinearity model.
pub const MAX_DELTA_N: f64 = 1e-2;

/// Above this value of `Γt₀` the cavity loss is no longer negligible on the
/// nonlinear time scale.
pub const NEGLIGIBLE_LOSS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KerrSign {
    /// `n₂ < 0`: repulsive photon-photon interaction, a stable photon fluid.
    Defocusing,
    /// `n₂ > 0`: attractive; the uniform state is modulationally unstable.
    Focusing,
}

impl KerrSign {
    pub fn of(n2: f64) -> Self {
        if n2 > 0.0 {
            KerrSign::Focusing
        } else {
            KerrSign::Defocusing
        }
    }

    /// Coefficient `s` of the scaled nonlinear term `i s |ψ|²ψ`.
    pub fn coefficient(self) -> f64 {
        match self {
            KerrSign::Defocusing => -1.0,
            KerrSign::Focusing => 1.0,
        }
    }
}

/// Cavity, laser and medium constants in CGS units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Vacuum wavelength, cm.
    pub wavelength: f64,
    /// Mirror separation, cm.
    pub cavity_length: f64,
    /// Intensity reflectivity of each mirror, in (0, 1).
    pub mirror_reflectivity: f64,
    /// Kerr coefficient, cm³/erg; negative is self-defocusing.
    pub n2: f64,
    /// Intracavity intensity, erg/(s·cm²).
    pub background_intensity: f64,
    /// Laser detuning from the linear cavity resonance, rad/s.
    pub detuning: f64,
    /// Transverse area of the quantization volume, cm².
    pub beam_area: f64,
}

impl PhysicalParams {
    pub fn new(
        wavelength: f64,
        cavity_length: f64,
        mirror_reflectivity: f64,
        n2: f64,
        background_intensity: f64,
        detuning: f64,
        beam_area: f64,
    ) -> Result<Self> {
        let p = PhysicalParams {
            wavelength,
            cavity_length,
            mirror_reflectivity,
            n2,
            background_intensity,
            detuning,
            beam_area,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds the parameter set from the index change `Δn = |n₂|ℰ₀²` instead
    /// of `n₂`, with the given sign of the nonlinearity.
    #[allow(clippy::too_many_arguments)]
    pub fn from_delta_n(
        wavelength: f64,
        cavity_length: f64,
        mirror_reflectivity: f64,
        delta_n: f64,
        sign: KerrSign,
        background_intensity: f64,
        detuning: f64,
        beam_area: f64,
    ) -> Result<Self> {
        if !(background_intensity > 0.0) {
            return Err(Error::domain("deriving n₂ from Δn needs a positive intensity"));
        }
        let field_sq = energy_density_field_sq(background_intensity);
        let n2 = sign.coefficient() * delta_n / field_sq;
        Self::new(
            wavelength,
            cavity_length,
            mirror_reflectivity,
            n2,
            background_intensity,
            detuning,
            beam_area,
        )
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("cavity_length", self.cavity_length),
            ("beam_area", self.beam_area),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.mirror_reflectivity > 0.0 && self.mirror_reflectivity < 1.0) {
            return Err(Error::domain(format!(
                "mirror reflectivity must lie in (0, 1), got {}",
                self.mirror_reflectivity
            )));
        }
        if !(self.background_intensity >= 0.0) || !self.background_intensity.is_finite() {
            return Err(Error::domain("background intensity must be non-negative"));
        }
        if !self.n2.is_finite() || !self.detuning.is_finite() {
            return Err(Error::domain("n₂ and detuning must be finite"));
        }
        if self.delta_n() >= MAX_DELTA_N {
            return Err(Error::ModelValidity(format!(
                "Δn = {:e} exceeds the weak-nonlinearity bound {MAX_DELTA_N:e}",
                self.delta_n()
            )));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * C_LIGHT / self.wavelength
    }

    /// Longitudinal wavenumber `k = 2π/λ`.
    pub fn k(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn transmission(&self) -> f64 {
        1.0 - self.mirror_reflectivity
    }

    /// Cavity decay rate `Γ = cT/2L`.
    pub fn loss_rate(&self) -> f64 {
        C_LIGHT * self.transmission() / (2.0 * self.cavity_length)
    }

    /// `ℰ₀²` from the intensity, erg/cm³.
    pub fn field_sq(&self) -> f64 {
        energy_density_field_sq(self.background_intensity)
    }

    pub fn delta_n(&self) -> f64 {
        self.n2.abs() * self.field_sq()
    }

    pub fn sign(&self) -> KerrSign {
        KerrSign::of(self.n2)
    }

    /// Quantization volume `V_cav = beam_area · L`.
    pub fn v_cav(&self) -> f64 {
        self.beam_area * self.cavity_length
    }

    /// Nonlinear rotation rate `ω|n₂|ℰ₀²`, rad/s.
    pub fn nonlinear_rate(&self) -> f64 {
        self.omega() * self.delta_n()
    }
}

/// Field amplitude squared for a travelling wave of the given intensity:
/// energy density `u = I/c` and `ℰ₀² = 8πu`.
pub fn energy_density_field_sq(intensity: f64) -> f64 {
    8.0 * PI * intensity / C_LIGHT
}

/// Dimensionless constants of the scaled equation plus the factors that map
/// scaled quantities back to CGS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    pub delta: f64,
    pub gamma: f64,
    /// Uniform drive amplitude `ψ_d`.
    pub drive: f64,
    /// cm per scaled length unit.
    pub x_scale: f64,
    /// s per scaled time unit.
    pub t_scale: f64,
    /// `ℰ₀` in (erg/cm³)^½ per scaled field unit.
    pub field_scale: f64,
    pub sign: KerrSign,
}

impl ScaledParams {
    pub fn from_physical(p: &PhysicalParams) -> Result<Self> {
        let rate = p.nonlinear_rate();
        if !(rate > 0.0) {
            return Err(Error::domain(
                "scaling needs a nonzero Kerr index change (n₂ ≠ 0 and I > 0)",
            ));
        }
        let t_scale = 1.0 / rate;
        let x_scale = (C_LIGHT * t_scale / (2.0 * p.k())).sqrt();
        Ok(ScaledParams {
            delta: p.detuning * t_scale,
            gamma: p.loss_rate() * t_scale,
            drive: 0.0,
            x_scale,
            t_scale,
            field_scale: p.field_sq().sqrt(),
            sign: p.sign(),
        })
    }

    /// Purely dimensionless parameters with unit scale factors.
    pub fn dimensionless(delta: f64, gamma: f64, drive: f64, sign: KerrSign) -> Self {
        ScaledParams {
            delta,
            gamma,
            drive,
            x_scale: 1.0,
            t_scale: 1.0,
            field_scale: 1.0,
            sign,
        }
    }

    /// Conservative defocusing fluid: no detuning, loss or drive.
    pub fn conservative() -> Self {
        Self::dimensionless(0.0, 0.0, 0.0, KerrSign::Defocusing)
    }

    pub fn wavenumber_to_cgs(&self, k_scaled: f64) -> f64 {
        k_scaled / self.x_scale
    }
    pub fn wavenumber_from_cgs(&self, k: f64) -> f64 {
        k * self.x_scale
    }
    pub fn frequency_to_cgs(&self, omega_scaled: f64) -> f64 {
        omega_scaled / self.t_scale
    }
    pub fn frequency_from_cgs(&self, omega: f64) -> f64 {
        omega * self.t_scale
    }
    pub fn length_to_cgs(&self, x_scaled: f64) -> f64 {
        x_scaled * self.x_scale
    }
    pub fn length_from_cgs(&self, x: f64) -> f64 {
        x / self.x_scale
    }
    pub fn time_to_cgs(&self, t_scaled: f64) -> f64 {
        t_scaled * self.t_scale
    }
    pub fn time_from_cgs(&self, t: f64) -> f64 {
        t / self.t_scale
    }
    pub fn speed_to_cgs(&self, v_scaled: f64) -> f64 {
        v_scaled * self.x_scale / self.t_scale
    }
}

/// Uniform rotating solution `ℰ₀ exp[i(ωn₂ℰ₀² + Δω)t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// `ℰ₀`, (erg/cm³)^½.
    pub amplitude: f64,
    /// `ωn₂ℰ₀² + Δω`, rad/s.
    pub rotation_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossPolicy {
    /// Refuse when `Γ` is not small against the nonlinear rate.
    RequireNegligible,
    /// The caller accepts that the plane wave ignores the cavity loss.
    Acknowledged,
}

pub fn plane_wave_state(params: &PhysicalParams, policy: LossPolicy) -> Result<SteadyState> {
    let rate = params.nonlinear_rate();
    let ratio = params.loss_rate() / rate;
    if policy == LossPolicy::RequireNegligible && !(ratio <= NEGLIGIBLE_LOSS) {
        return Err(Error::ModelValidity(format!(
            "Γt₀ = {ratio:e} > {NEGLIGIBLE_LOSS:e}: cavity loss is not negligible for the plane-wave solution"
        )));
    }
    Ok(SteadyState {
        amplitude: params.field_sq().sqrt(),
        rotation_rate: params.omega() * params.n2 * params.field_sq() + params.detuning,
    })
}

/// Time derivative of the scaled Lugiato-Lefever equation.
///
/// `drive` overrides the uniform `params.drive` when present.
pub fn lle_rhs(
    field: &ComplexField,
    params: &ScaledParams,
    potential: Option<&RealField>,
    drive: Option<&ComplexField>,
) -> Result<ComplexField> {
    if let Some(v) = potential {
        field.grid().check_same(v.grid())?;
    }
    if let Some(d) = drive {
        field.grid().check_same(d.grid())?;
    }
    let mut out = Fft2::new(*field.grid()).laplacian(field);
    let s = params.sign.coefficient();
    let i = Complex64::i();
    for (idx, (o, &psi)) in out.data_mut().iter_mut().zip(field.data()).enumerate() {
        let v = potential.map_or(0.0, |p| p.data()[idx]);
        let psi_d = drive.map_or(Complex64::new(params.drive, 0.0), |d| d.data()[idx]);
        *o = i * *o + i * (s * psi.norm_sqr() + params.delta - v) * psi - params.gamma * (psi - psi_d);
    }
    Ok(out)
}

/// Right-hand side of the linearized fluctuation equation about a real
/// background `e0`: `i∇²a + i s e0² (a + a*)`.
pub fn linearized_rhs(a: &ComplexField, e0: f64, params: &ScaledParams) -> Result<ComplexField> {
    let mut out = Fft2::new(*a.grid()).laplacian(a);
    let coupling = params.sign.coefficient() * e0 * e0;
    let i = Complex64::i();
    for (o, &z) in out.data_mut().iter_mut().zip(a.data()) {
        *o = i * *o + i * coupling * (z + z.conj());
    }
    Ok(out)
}

/// `Ω(K) = √(c²K²|n₂|ℰ₀² + c⁴K⁴/4ω²)` in rad/s for `K` in 1/cm.
pub fn classical_dispersion(k: f64, params: &PhysicalParams) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::domain(format!("wavenumber must be non-negative, got {k}")));
    }
    let c2k2 = C_LIGHT * C_LIGHT * k * k;
    let w = params.omega();
    Ok((c2k2 * params.delta_n() + c2k2 * c2k2 / (4.0 * w * w)).sqrt())
}

/// Scaled dispersion `Ω'(K') = √(K'⁴ + 2|ψ₀|²K'²)`.
pub fn scaled_dispersion(k: f64, psi0: f64) -> f64 {
    let k2 = k * k;
    (k2 * k2 + 2.0 * psi0 * psi0 * k2).sqrt()
}

/// Scaled sound speed `√2 |ψ₀|`.
pub fn scaled_sound_speed(psi0: f64) -> f64 {
    2f64.sqrt() * psi0.abs()
}

/// Inverse of [`scaled_dispersion`]: the `K' ≥ 0` with `Ω'(K') = omega`.
pub fn scaled_wavenumber_for(omega: f64, psi0: f64) -> f64 {
    // K'² solves K'⁴ + 2ψ₀²K'² − Ω'² = 0.
    let a = psi0 * psi0;
    let k2 = omega * omega / (a + (a * a + omega * omega).sqrt());
    k2.sqrt()
}

/// `c√(|n₂|ℰ₀²)`, defined only for a self-defocusing medium.
pub fn classical_sound_speed(params: &PhysicalParams) -> Result<f64> {
    if params.sign() == KerrSign::Focusing {
        return Err(Error::ModulationalInstability(
            "n₂ > 0: Ω(K) is imaginary at small K, no sound branch".into(),
        ));
    }
    Ok(C_LIGHT * params.delta_n().sqrt())
}

/// `Λ_c = λ/√Δn`.
pub fn transition_wavelength(params: &PhysicalParams) -> Result<f64> {
    let dn = params.delta_n();
    if !(dn > 0.0) {
        return Err(Error::domain("Δn = 0: no transition wavelength"));
    }
    Ok(params.wavelength / dn.sqrt())
}

/// Cylindrical fluctuation `αJ₀(Kρ)e^{iΩt} + βJ₀(Kρ)e^{−iΩt}` with `Ω`
/// from [`classical_dispersion`]. Loss is ignored so `Ω` is real.
pub fn bessel_probe(
    rho: f64,
    t: f64,
    k: f64,
    alpha: Complex64,
    beta: Complex64,
    params: &PhysicalParams,
) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("probe wavenumber must be positive, got {k}")));
    }
    let omega = classical_dispersion(k, params)?;
    let radial = bessel_j0(k * rho);
    Ok(radial * (alpha * Complex64::from_polar(1.0, omega * t) + beta * Complex64::from_polar(1.0, -omega * t)))
}
