//! Gaussian-beam geometry, photon flux and the geometrical
//! fluorescence-collection model, plus the one-photon calibration chain
//! that pins the collection efficiency to measured count rates.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::types::CollectionModel;
use crate::units::{CM_PER_MM, CM_PER_UM, MM_PER_CM, S_PER_FS};
use statrs::function::erf::erfc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransverseAxis {
    X,
    Y,
}

/// Focused pulsed Gaussian beam delivering a known photon rate or average
/// power to the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamProfile {
    /// FWHM at focus, µm.
    pub fwhm_x0_um: f64,
    pub fwhm_y0_um: f64,
    /// Rayleigh range, mm.
    pub rayleigh_range_mm: f64,
    /// Pulse FWHM, fs.
    pub pulse_fwhm_fs: f64,
    /// Repetition rate, pulses·s⁻¹.
    pub rep_rate_hz: f64,
    /// Average power at the sample, W.
    pub avg_power_w: Option<f64>,
    /// Average photon rate at the sample, photons·s⁻¹.
    pub photon_rate_per_s: Option<f64>,
    /// Mean photon energy, J.
    pub photon_energy_j: f64,
}

impl BeamProfile {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        fwhm_x0_um: f64,
        fwhm_y0_um: f64,
        rayleigh_range_mm: f64,
        pulse_fwhm_fs: f64,
        rep_rate_hz: f64,
        avg_power_w: Option<f64>,
        photon_rate_per_s: Option<f64>,
        photon_energy_j: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("fwhm_x0", fwhm_x0_um),
            ("fwhm_y0", fwhm_y0_um),
            ("rayleigh_range", rayleigh_range_mm),
            ("pulse_fwhm", pulse_fwhm_fs),
            ("rep_rate", rep_rate_hz),
            ("photon_energy", photon_energy_j),
        ] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if let (Some(w), Some(q)) = (avg_power_w, photon_rate_per_s) {
            let implied = w / photon_energy_j;
            if (implied - q).abs() > 1e-6 * q {
                return Err(Error::Domain(format!(
                    "power {w} W implies {implied:.6e} photons/s but {q:.6e} was given"
                )));
            }
        }
        Ok(Self {
            fwhm_x0_um,
            fwhm_y0_um,
            rayleigh_range_mm,
            pulse_fwhm_fs,
            rep_rate_hz,
            avg_power_w,
            photon_rate_per_s,
            photon_energy_j,
        })
    }

    /// Average photon rate Q = W/hν, photons·s⁻¹.
    pub fn photon_rate(&self) -> Result<f64> {
        if let Some(q) = self.photon_rate_per_s {
            return Ok(q);
        }
        if let Some(w) = self.avg_power_w {
            return Ok(w / self.photon_energy_j);
        }
        Err(Error::Domain("beam has neither an average power nor a photon rate".into()))
    }

    /// Mean photon number per pulse, μ = Q/g.
    pub fn mean_photons_per_pulse(&self) -> Result<f64> {
        Ok(self.photon_rate()? / self.rep_rate_hz)
    }

    /// Copy of this beam with the average power replaced.
    pub fn with_power_w(&self, avg_power_w: f64) -> Result<Self> {
        Self::new(
            self.fwhm_x0_um,
            self.fwhm_y0_um,
            self.rayleigh_range_mm,
            self.pulse_fwhm_fs,
            self.rep_rate_hz,
            Some(avg_power_w),
            None,
            self.photon_energy_j,
        )
    }
}

/// FWHM at distance `z_mm` from the focus: Δx₀√(1 + (z/z_R)²), µm.
pub fn beam_fwhm_at_um(beam: &BeamProfile, z_mm: f64, axis: TransverseAxis) -> f64 {
    let w0 = match axis {
        TransverseAxis::X => beam.fwhm_x0_um,
        TransverseAxis::Y => beam.fwhm_y0_um,
    };
    let zr = z_mm / beam.rayleigh_range_mm;
    w0 * (1.0 + zr * zr).sqrt()
}

/// Effective beam area A(z) = πΔx(z)Δy(z)/(2 ln 2), cm².
pub fn effective_area_cm2(beam: &BeamProfile, z_mm: f64) -> f64 {
    let dx = beam_fwhm_at_um(beam, z_mm, TransverseAxis::X) * CM_PER_UM;
    let dy = beam_fwhm_at_um(beam, z_mm, TransverseAxis::Y) * CM_PER_UM;
    std::f64::consts::PI * dx * dy / (2.0 * std::f64::consts::LN_2)
}

/// Peak photon flux along the beam,
/// φ₀(z) = Q (4 ln 2 / π)^{3/2} / (Δx(z) Δy(z) g τ), photons·cm⁻²·s⁻¹.
///
/// This is the form obtained by carrying out the Gaussian space-time
/// integral of the pulse train; see `peak_flux_mu_form_cm2_s` for the
/// alternative mean-photon-number expression and its known discrepancy.
pub fn peak_flux_cm2_s(beam: &BeamProfile, z_mm: f64) -> Result<f64> {
    let q = beam.photon_rate()?;
    let dx = beam_fwhm_at_um(beam, z_mm, TransverseAxis::X) * CM_PER_UM;
    let dy = beam_fwhm_at_um(beam, z_mm, TransverseAxis::Y) * CM_PER_UM;
    let tau_s = beam.pulse_fwhm_fs * S_PER_FS;
    let shape = (4.0 * std::f64::consts::LN_2 / std::f64::consts::PI).powf(1.5);
    Ok(q * shape / (dx * dy * beam.rep_rate_hz * tau_s))
}

/// Alternative peak-flux expression φ₀ = 2√2 μ / (T A(z)) with
/// T = τ/√(2 ln 2) and A(z) the effective area.
///
/// Under those definitions of T and A this form is larger than the Gaussian
/// space-time integral (`peak_flux_cm2_s`) by exactly √π; it is kept only as
/// a cross-check that makes the discrepancy visible, and is not used by any
/// forward model.
pub fn peak_flux_mu_form_cm2_s(beam: &BeamProfile, z_mm: f64) -> Result<f64> {
    let mu = beam.mean_photons_per_pulse()?;
    let t_s = beam.pulse_fwhm_fs * S_PER_FS / (2.0 * std::f64::consts::LN_2).sqrt();
    Ok(2.0 * std::f64::consts::SQRT_2 * mu / (t_s * effective_area_cm2(beam, z_mm)))
}

/// Conversion factor from mean photon number per pulse to peak photon flux
/// at the focus, (photons·cm⁻²·s⁻¹) per (photons·pulse⁻¹).
pub fn mu_to_peak_flux_factor(beam: &BeamProfile) -> f64 {
    let dx = beam.fwhm_x0_um * CM_PER_UM;
    let dy = beam.fwhm_y0_um * CM_PER_UM;
    let tau_s = beam.pulse_fwhm_fs * S_PER_FS;
    let shape = (4.0 * std::f64::consts::LN_2 / std::f64::consts::PI).powf(1.5);
    shape / (dx * dy * tau_s)
}

/// Geometrical collection efficiency at position `z_mm` along the cuvette,
/// K(z) = (κ_max/2)·erfc(α(|z| − z₀)).
pub fn collection_k(model: &CollectionModel, z_mm: f64) -> f64 {
    0.5 * model.kappa_max * erfc(model.alpha_per_mm * (z_mm.abs() - model.z0_mm))
}

/// ∫ K(z) dz over z ∈ [−half_extent, half_extent], returned in cm so it can
/// enter the fluorescence models directly.
pub fn collection_integral_cm(model: &CollectionModel, half_extent_mm: f64) -> f64 {
    // even integrand
    2.0 * adaptive_simpson(|z| collection_k(model, z), 0.0, half_extent_mm, 1e-10) * CM_PER_MM
}

/// Line average of K(z) over ±half_extent: the collection efficiency of a
/// uniform line source spanning the cuvette.
pub fn collection_line_average(model: &CollectionModel, half_extent_mm: f64) -> f64 {
    collection_integral_cm(model, half_extent_mm) * MM_PER_CM / (2.0 * half_extent_mm)
}

/// Fraction of incident photons absorbed in a path of optical density
/// OD = εcl: N₁ = 1 − 10^(−εcl).
pub fn excitations_per_photon(
    extinction_l_per_mol_cm: f64,
    concentration_mol_per_l: f64,
    path_cm: f64,
) -> Result<f64> {
    for (name, v) in [
        ("extinction", extinction_l_per_mol_cm),
        ("concentration", concentration_mol_per_l),
        ("path length", path_cm),
    ] {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    let od = extinction_l_per_mol_cm * concentration_mol_per_l * path_cm;
    Ok(1.0 - 10f64.powf(-od))
}

/// Minimum (line-source) collection efficiency from a measured one-photon
/// fluorescence rate: κ'_min = F₁ / [(1 − 10^(−OD)) (W/hν) ∫γΦdλ].
pub fn calibrate_kappa_min(
    f1_cps: f64,
    od: f64,
    power_w: f64,
    photon_energy_j: f64,
    overlap_integral: f64,
) -> Result<f64> {
    for (name, v) in [
        ("F1", f1_cps),
        ("OD", od),
        ("power", power_w),
        ("photon energy", photon_energy_j),
        ("overlap integral", overlap_integral),
    ] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let denom = (1.0 - 10f64.powf(-od)) * (power_w / photon_energy_j) * overlap_integral;
    if denom <= 0.0 {
        return Err(Error::Singularity("1PEF calibration denominator is zero".into()));
    }
    Ok(f1_cps / denom)
}

/// Rescales a simulated collection model to measurement:
/// κ'_max = κ'_min / κ_min_sim × κ_max_sim, with α and z₀ unchanged.
pub fn rescale_collection(
    sim_model: &CollectionModel,
    kappa_prime_min: f64,
    kappa_min_sim: f64,
) -> Result<CollectionModel> {
    if !(kappa_prime_min > 0.0) || !(kappa_min_sim > 0.0) {
        return Err(Error::Domain(format!(
            "collection efficiencies must be positive, got {kappa_prime_min} and {kappa_min_sim}"
        )));
    }
    CollectionModel::new(
        kappa_prime_min / kappa_min_sim * sim_model.kappa_max,
        sim_model.alpha_per_mm,
        sim_model.z0_mm,
    )
}
