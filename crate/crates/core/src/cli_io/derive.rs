use std::fmt::Write as _;

use super::config::Config;
use crate::error::{Error, Result};
use crate::meanfield::{classical_sound_speed, transition_wavelength, KerrSign, PhysicalParams, ScaledParams};
use crate::theory::{
    condensate_number, effective_mass, healing_length, interaction_from_kerr, sound_speed, InteractionKernel,
    QuantumParams,
};
use crate::units::{mhz_to_rad_per_s, nm_to_cm, rel_diff, watts_per_cm2_to_cgs};

/// Name of the field-energy convention used to turn intensity into `ℰ₀²`.
pub const ENERGY_CONVENTION: &str = "traveling wave: energy density u = I/c, E0^2 = 8 pi I / c";

/// Largest tolerated disagreement between `delta_n` and `|n₂|ℰ₀²`.
const OVERCONSTRAINED_RTOL: f64 = 1e-6;

/// Physical, quantum and scaled parameter sets derived from one config,
/// with a flat key-value report.
#[derive(Debug, Clone)]
pub struct Derived {
    pub physical: PhysicalParams,
    pub quantum: QuantumParams,
    pub kernel: InteractionKernel,
    pub scaled: ScaledParams,
    pub report: Vec<(String, String)>,
}

impl Derived {
    pub fn report_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.report {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn report_value(&self, key: &str) -> Option<&str> {
        self.report.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Converts the lab inputs of `[physical]` to CGS and derives everything
/// the theory and the scaled solver need.
pub fn derive_parameters(config: &Config) -> Result<Derived> {
    let s = "physical";
    let positive = |key: &str| -> Result<f64> {
        let v: f64 = config.require(s, key)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::config(format!("{s}.{key}"), format!("must be positive, got {v}")));
        }
        Ok(v)
    };
    let wavelength = nm_to_cm(positive("wavelength_nm")?);
    let length = positive("cavity_length_cm")?;
    let mirror: f64 = config.require(s, "mirror_R")?;
    if !(mirror > 0.0 && mirror < 1.0) {
        return Err(Error::config("physical.mirror_R", format!("must lie in (0, 1), got {mirror}")));
    }
    let intensity = watts_per_cm2_to_cgs(positive("intensity_W_per_cm2")?);
    let detuning = mhz_to_rad_per_s(config.get_or(s, "detuning_MHz", 0.0)?);
    let area = positive("beam_area_cm2")?;
    let n2: Option<f64> = config.get(s, "n2_cm3_per_erg")?;
    let delta_n: Option<f64> = config.get(s, "delta_n")?;

    let physical = match (n2, delta_n) {
        (None, None) => {
            return Err(Error::config("physical.delta_n", "give delta_n or n2_cm3_per_erg"));
        }
        (Some(n2), given) => {
            let p = PhysicalParams::new(wavelength, length, mirror, n2, intensity, detuning, area)
                .map_err(|e| Error::config("physical.n2_cm3_per_erg", e.to_string()))?;
            if let Some(dn) = given {
                if rel_diff(p.delta_n(), dn) > OVERCONSTRAINED_RTOL {
                    return Err(Error::config(
                        "physical.delta_n",
                        format!(
                            "conflicts with |n2|·E0² = {:.6e} from n2_cm3_per_erg and intensity_W_per_cm2",
                            p.delta_n()
                        ),
                    ));
                }
            }
            p
        }
        (None, Some(dn)) => {
            let sign = match config.raw(s, "kerr_sign").unwrap_or("defocusing") {
                "defocusing" => KerrSign::Defocusing,
                "focusing" => KerrSign::Focusing,
                other => {
                    return Err(Error::config(
                        "physical.kerr_sign",
                        format!("expected `defocusing` or `focusing`, got `{other}`"),
                    ))
                }
            };
            PhysicalParams::from_delta_n(wavelength, length, mirror, dn, sign, intensity, detuning, area)
                .map_err(|e| Error::config("physical.delta_n", e.to_string()))?
        }
    };

    let n0 = condensate_number(physical.field_sq(), physical.v_cav(), physical.omega());
    let mass = match config.get::<u64>(s, "longitudinal_index")? {
        Some(n) => effective_mass(n, length, wavelength)
            .map_err(|e| Error::config("physical.longitudinal_index", e.to_string()))?
            .longitudinal,
        None => effective_mass(1, length, wavelength)?.paraxial,
    };
    let quantum = QuantumParams::new(crate::units::HBAR, crate::units::C_LIGHT, physical.omega(), mass, n0, physical.v_cav())?;
    let kernel = interaction_from_kerr(&physical, &quantum)?;
    let scaled = ScaledParams::from_physical(&physical)?;

    let mut report: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| report.push((k.to_string(), v));
    put("energy_convention", ENERGY_CONVENTION.to_string());
    // the lab description never states the beam area behind N0
    put("beam_area_cm2", format!("{area} (assumed; cavity volume = beam_area x L)"));
    put("cavity_volume_cm3", format!("{:.6e}", physical.v_cav()));
    put("omega_rad_s", format!("{:.6e}", physical.omega()));
    put("loss_rate_Gamma_per_s", format!("{:.6e}", physical.loss_rate()));
    put("delta_n", format!("{:.6e}", physical.delta_n()));
    put("n2_cm3_per_erg", format!("{:.6e}", physical.n2));
    put("kerr_sign", format!("{:?}", physical.sign()).to_lowercase());
    match classical_sound_speed(&physical) {
        Ok(v) => put("sound_speed_cm_s", format!("{v:.6e}")),
        Err(e) => put("sound_speed_cm_s", format!("none ({e})")),
    }
    put("transition_wavelength_Lambda_c_cm", format!("{:.6e}", transition_wavelength(&physical)?));
    if let Ok(lc) = healing_length(&quantum, &kernel) {
        put("healing_length_lambda_c_cm", format!("{lc:.6e}"));
    }
    put("photon_mass_g", format!("{mass:.6e}"));
    put("condensate_number_N0", format!("{n0:.6e}"));
    put("interaction_V0_erg", format!("{:.6e}", kernel.eval(0.0)));
    put("quantum_sound_speed_cm_s", format!("{:.6e}", sound_speed(&quantum, &kernel)));
    put("scaled_length_unit_cm", format!("{:.6e}", scaled.x_scale));
    put("scaled_time_unit_s", format!("{:.6e}", scaled.t_scale));
    put("scaled_detuning", format!("{:.6e}", scaled.delta));
    put("scaled_loss", format!("{:.6e}", scaled.gamma));

    Ok(Derived {
        physical,
        quantum,
        kernel,
        scaled,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const LAB: &str = "[physical]\nwavelength_nm = 780.24\ncavity_length_cm = 2\nmirror_R = 0.997\n\
        delta_n = 2e-6\nintensity_W_per_cm2 = 40\nbeam_area_cm2 = 76.3\n";

    fn value(d: &Derived, key: &str) -> f64 {
        d.report_value(key).unwrap().split_whitespace().next().unwrap().parse().unwrap()
    }

    #[test]
    fn lab_numbers() {
        let d = derive_parameters(&Config::parse(LAB).unwrap()).unwrap();
        assert!(rel_diff(value(&d, "loss_rate_Gamma_per_s"), 2.25e7) < 1e-3);
        assert!(rel_diff(value(&d, "sound_speed_cm_s"), 4.24e7) < 1e-3);
        assert!(rel_diff(value(&d, "sound_speed_cm_s"), 4.2e7) < 1e-2);
        assert!(rel_diff(value(&d, "condensate_number_N0"), 8e11) < 0.01);
        assert!(rel_diff(value(&d, "transition_wavelength_Lambda_c_cm"), 0.0552) < 1e-3);
        assert!(d.report_value("energy_convention").unwrap().contains("I/c"));
        assert!(d.report_value("beam_area_cm2").unwrap().contains("assumed"));
    }

    #[test]
    fn consistent_overconstrained_input_is_accepted() {
        let base = derive_parameters(&Config::parse(LAB).unwrap()).unwrap();
        let text = format!("{LAB}n2_cm3_per_erg = {:e}\n", base.physical.n2);
        let both = derive_parameters(&Config::parse(&text).unwrap()).unwrap();
        assert!(rel_diff(both.physical.delta_n(), 2e-6) < 1e-12);
    }

    #[test]
    fn conflicting_overconstrained_input_is_a_config_error() {
        let text = format!("{LAB}n2_cm3_per_erg = -1e-15\n");
        let err = derive_parameters(&Config::parse(&text).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "physical.delta_n"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_inputs_name_their_key() {
        let bad = LAB.replace("mirror_R = 0.997", "mirror_R = 1.2");
        assert!(matches!(derive_parameters(&Config::parse(&bad).unwrap()),
            Err(Error::Config { key, .. }) if key == "physical.mirror_R"));
        let missing = LAB.replace("delta_n = 2e-6\n", "");
        assert!(matches!(derive_parameters(&Config::parse(&missing).unwrap()),
            Err(Error::Config { key, .. }) if key == "physical.delta_n"));
        let neg = LAB.replace("intensity_W_per_cm2 = 40", "intensity_W_per_cm2 = -4");
        assert!(derive_parameters(&Config::parse(&neg).unwrap()).is_err());
    }

    #[test]
    fn scaled_round_trips_are_identities() {
        let d = derive_parameters(&Config::parse(LAB).unwrap()).unwrap();
        let s = &d.scaled;
        for v in [1e-3, 0.7, 12.0, 3e4] {
            assert!(rel_diff(s.wavenumber_from_cgs(s.wavenumber_to_cgs(v)), v) < 1e-12);
            assert!(rel_diff(s.frequency_from_cgs(s.frequency_to_cgs(v)), v) < 1e-12);
            assert!(rel_diff(s.length_from_cgs(s.length_to_cgs(v)), v) < 1e-12);
            assert!(rel_diff(s.time_from_cgs(s.time_to_cgs(v)), v) < 1e-12);
        }
        // scaled sound speed √2 maps to c√Δn
        assert!(rel_diff(s.speed_to_cgs(2f64.sqrt()), value(&d, "sound_speed_cm_s")) < 1e-6);
        // scaled transition wavelength 2π√2 maps to λ/√Δn
        assert!(rel_diff(s.length_to_cgs(2.0 * std::f64::consts::PI * 2f64.sqrt()), 780.24e-7 / 2e-6f64.sqrt()) < 1e-12);
    }
}
