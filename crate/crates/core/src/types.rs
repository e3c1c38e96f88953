//! Shared domain types: sample and apparatus parameter records, the
//! fluorescence-collection model and values with propagated uncertainty.
//!
//! All types are immutable after construction and validate their invariants
//! in the constructor.

use crate::error::{Error, Result};
use crate::units::AVOGADRO;

/// Number density (fluorophores·cm⁻³) of a solution with the given molar
/// concentration (mol·L⁻¹).
pub fn number_density(concentration_mol_per_l: f64) -> Result<f64> {
    if !(concentration_mol_per_l > 0.0) {
        return Err(Error::Domain(format!(
            "concentration must be positive, got {concentration_mol_per_l} mol/L"
        )));
    }
    // mol/L × N_A / (1000 cm³/L)
    Ok(concentration_mol_per_l * AVOGADRO / 1000.0)
}

/// Per-fluorophore parameters of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub name: String,
    /// Molar concentration, mol·L⁻¹.
    pub concentration_mol_per_l: f64,
    /// Fluorophores·cm⁻³, derived from the concentration.
    pub number_density_per_cm3: f64,
    /// Total fluorescence quantum yield, photons·excitation⁻¹, in (0, 1].
    pub quantum_yield: f64,
    /// ∫γ(λ)Φ(λ)dλ / Φ — overlap of the emission spectrum with the
    /// collection system's transmission, in (0, 1).
    pub spectral_overlap_ratio: f64,
    /// Classical two-photon cross-section, GM. Optional: absent until a
    /// measurement or literature value supplies it.
    pub sigma_c_gm: Option<f64>,
    /// Extinction coefficient at the one-photon calibration wavelength,
    /// L·mol⁻¹·cm⁻¹. Only used by the 1PEF collection calibration.
    pub extinction_l_per_mol_cm: Option<f64>,
}

impl SampleSpec {
    pub fn new(
        name: impl Into<String>,
        concentration_mol_per_l: f64,
        quantum_yield: f64,
        spectral_overlap_ratio: f64,
        sigma_c_gm: Option<f64>,
        extinction_l_per_mol_cm: Option<f64>,
    ) -> Result<Self> {
        let number_density_per_cm3 = number_density(concentration_mol_per_l)?;
        if !(quantum_yield > 0.0 && quantum_yield <= 1.0) {
            return Err(Error::Domain(format!(
                "quantum yield must be in (0, 1], got {quantum_yield}"
            )));
        }
        if !(spectral_overlap_ratio > 0.0 && spectral_overlap_ratio < 1.0) {
            return Err(Error::Domain(format!(
                "spectral overlap ratio must be in (0, 1), got {spectral_overlap_ratio}"
            )));
        }
        if let Some(s) = sigma_c_gm {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("sigma_C must be positive, got {s} GM")));
            }
        }
        if let Some(e) = extinction_l_per_mol_cm {
            if !(e > 0.0) {
                return Err(Error::Domain(format!("extinction coefficient must be positive, got {e}")));
            }
        }
        Ok(Self {
            name: name.into(),
            concentration_mol_per_l,
            number_density_per_cm3,
            quantum_yield,
            spectral_overlap_ratio,
            sigma_c_gm,
            extinction_l_per_mol_cm,
        })
    }

    /// ∫γ(λ)Φ(λ)dλ — the overlap ratio times the total quantum yield.
    pub fn overlap_integral(&self) -> f64 {
        self.spectral_overlap_ratio * self.quantum_yield
    }
}

/// Parametric model of the geometrical collection efficiency along the
/// excitation axis: K(z) = (κ_max/2)·erfc(α(|z| − z₀)) with z in mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionModel {
    /// Peak collection efficiency at the cuvette center, in (0, 1).
    pub kappa_max: f64,
    /// Transition sharpness, mm⁻¹.
    pub alpha_per_mm: f64,
    /// Half-length of the well-collected region, mm.
    pub z0_mm: f64,
}

impl CollectionModel {
    pub fn new(kappa_max: f64, alpha_per_mm: f64, z0_mm: f64) -> Result<Self> {
        if !(kappa_max > 0.0 && kappa_max < 1.0) {
            return Err(Error::Domain(format!("kappa_max must be in (0, 1), got {kappa_max}")));
        }
        if !(alpha_per_mm > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha_per_mm} /mm")));
        }
        if !(z0_mm > 0.0) {
            return Err(Error::Domain(format!("z0 must be positive, got {z0_mm} mm")));
        }
        Ok(Self { kappa_max, alpha_per_mm, z0_mm })
    }
}

/// Apparatus parameters shared by a measurement campaign. The beam-geometry
/// fields describe the entangled (SPDC) arm; the classical arm carries its
/// own `BeamProfile`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApparatusSpec {
    /// Pulse repetition rate, pulses·s⁻¹.
    pub rep_rate_hz: f64,
    /// Pulse FWHM of the entangled beam at the sample, fs.
    pub pulse_fwhm_fs: f64,
    /// Beam FWHM at focus, µm.
    pub beam_fwhm_x0_um: f64,
    pub beam_fwhm_y0_um: f64,
    /// Rayleigh range of the entangled beam, mm.
    pub rayleigh_range_mm: f64,
    /// Mean photon energy, J.
    pub photon_energy_j: f64,
    /// Cuvette path length, cm.
    pub cuvette_length_cm: f64,
    pub collection: CollectionModel,
    /// Transmittance from crystal center to sample center, in (0, 1].
    pub path_transmittance: f64,
    /// Average photon rate delivered to the sample, photons·s⁻¹. Optional:
    /// only the entangled arm has a fixed rate.
    pub photon_rate_per_s: Option<f64>,
    /// Measurable fluorescence lower bound, counts·s⁻¹.
    pub f_lb_cps: f64,
}

impl ApparatusSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rep_rate_hz: f64,
        pulse_fwhm_fs: f64,
        beam_fwhm_x0_um: f64,
        beam_fwhm_y0_um: f64,
        rayleigh_range_mm: f64,
        photon_energy_j: f64,
        cuvette_length_cm: f64,
        collection: CollectionModel,
        path_transmittance: f64,
        photon_rate_per_s: Option<f64>,
        f_lb_cps: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("rep_rate", rep_rate_hz),
            ("pulse_fwhm", pulse_fwhm_fs),
            ("beam_fwhm_x0", beam_fwhm_x0_um),
            ("beam_fwhm_y0", beam_fwhm_y0_um),
            ("rayleigh_range", rayleigh_range_mm),
            ("photon_energy", photon_energy_j),
            ("cuvette_length", cuvette_length_cm),
            ("F_LB", f_lb_cps),
        ] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(path_transmittance > 0.0 && path_transmittance <= 1.0) {
            return Err(Error::Domain(format!(
                "path transmittance must be in (0, 1], got {path_transmittance}"
            )));
        }
        if let Some(q) = photon_rate_per_s {
            if !(q > 0.0) {
                return Err(Error::Domain(format!("photon rate must be positive, got {q}")));
            }
        }
        Ok(Self {
            rep_rate_hz,
            pulse_fwhm_fs,
            beam_fwhm_x0_um,
            beam_fwhm_y0_um,
            rayleigh_range_mm,
            photon_energy_j,
            cuvette_length_cm,
            collection,
            path_transmittance,
            photon_rate_per_s,
            f_lb_cps,
        })
    }
}

/// A value with a standard (k = 1) uncertainty and the coverage factor used
/// when reporting the expanded uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainValue {
    pub value: f64,
    /// Standard uncertainty (one sigma), ≥ 0.
    pub std_uncertainty: f64,
    /// Coverage factor for the expanded uncertainty, ≥ 1.
    pub coverage_k: f64,
}

impl UncertainValue {
    pub fn new(value: f64, std_uncertainty: f64, coverage_k: f64) -> Result<Self> {
        if !(std_uncertainty >= 0.0) {
            return Err(Error::Domain(format!(
                "standard uncertainty must be non-negative, got {std_uncertainty}"
            )));
        }
        if !(coverage_k >= 1.0) {
            return Err(Error::Domain(format!("coverage factor must be >= 1, got {coverage_k}")));
        }
        Ok(Self { value, std_uncertainty, coverage_k })
    }

    /// An exact value: zero uncertainty, default coverage factor 2.
    pub fn exact(value: f64) -> Self {
        Self { value, std_uncertainty: 0.0, coverage_k: 2.0 }
    }

    /// Builds from a relative standard uncertainty.
    pub fn from_relative(value: f64, rel_std: f64, coverage_k: f64) -> Result<Self> {
        Self::new(value, rel_std.abs() * value.abs(), coverage_k)
    }

    /// Expanded uncertainty, k·σ.
    pub fn expanded(&self) -> f64 {
        self.coverage_k * self.std_uncertainty
    }

    /// Relative standard uncertainty. `None` when the value is zero, where
    /// a relative uncertainty is undefined.
    pub fn relative(&self) -> Option<f64> {
        if self.value == 0.0 {
            None
        } else {
            Some(self.std_uncertainty / self.value.abs())
        }
    }

    /// Returns a copy scaled by the exact factor `c` (uncertainty scales too).
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            value: self.value * c,
            std_uncertainty: self.std_uncertainty * c.abs(),
            coverage_k: self.coverage_k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn number_density_of_table_concentration() {
        // 1100 µmol/L, the fluorescein row
        let n = number_density(1100e-6).unwrap();
        assert_relative_eq!(n, 6.624e17, max_relative = 1e-3);
    }

    #[test]
    fn number_density_unit_definition() {
        let n = number_density(1.0).unwrap();
        assert_relative_eq!(n, 6.02214076e20, max_relative = 1e-9);
    }

    #[test]
    fn number_density_rejects_nonpositive() {
        assert!(number_density(0.0).is_err());
        assert!(number_density(-1e-6).is_err());
    }

    #[test]
    fn sample_derives_density_consistently() {
        let s = SampleSpec::new("fluorescein", 1100e-6, 0.93, 0.0789, Some(13.0), None).unwrap();
        let direct = number_density(1100e-6).unwrap();
        assert!((s.number_density_per_cm3 - direct).abs() / direct < 1e-9);
        assert_relative_eq!(s.overlap_integral(), 0.0789 * 0.93, max_relative = 1e-12);
    }

    #[test]
    fn sample_rejects_bad_yield() {
        assert!(SampleSpec::new("x", 1e-3, 1.5, 0.1, None, None).is_err());
        assert!(SampleSpec::new("x", 1e-3, 0.0, 0.1, None, None).is_err());
        assert!(SampleSpec::new("x", 1e-3, 0.9, 1.0, None, None).is_err());
    }

    #[test]
    fn uncertain_value_expanded_and_relative() {
        let u = UncertainValue::new(10.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(u.expanded(), 2.0);
        assert_relative_eq!(u.relative().unwrap(), 0.1);
        assert!(UncertainValue::new(0.0, 1.0, 2.0).unwrap().relative().is_none());
    }
}
