//! Forward fluorescence models for classical and entangled two-photon
//! excitation, cross-section extraction and upper bounds, and the
//! quantum-advantage bound.
//!
//! The classical forward model integrates the squared Gaussian flux over
//! the focused beam and the cuvette length, weighted by the position-
//! dependent collection efficiency K(z). The entangled model is linear in
//! photon flux, so only ∫K(z)dz over the region of nearly constant
//! entanglement area (±z_R of the entangled beam) enters.

use crate::error::{Error, Result};
use crate::optics::{beam_fwhm_at_um, collection_integral_cm, collection_k, BeamProfile, TransverseAxis};
use crate::quad::adaptive_simpson;
use crate::types::{ApparatusSpec, SampleSpec, UncertainValue};
use crate::units::{CM_PER_UM, GM_IN_CM4_S, MM_PER_CM, S_PER_FS, UM2_PER_CM2, W_PER_UW};

/// Result of a classical cross-section extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct C2paResult {
    /// Classical two-photon cross-section, GM.
    pub sigma_c_gm: UncertainValue,
    /// Fitted quadratic slope, counts·s⁻¹·µW⁻².
    pub fit_slope: UncertainValue,
    /// Exponent of the free power-law fit; 2.0 when only a slope was given.
    pub fit_exponent: f64,
}

impl C2paResult {
    /// True when the free-fit exponent sits inside the accepted quadratic
    /// window [1.95, 2.05].
    pub fn accepted_quadratic(&self) -> bool {
        (1.95..=2.05).contains(&self.fit_exponent)
    }
}

/// Upper-bound summary for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct E2paBound {
    /// Measured upper bound on the entangled cross-section, cm²·fluorophore⁻¹.
    pub sigma_e_ub: UncertainValue,
    /// Probabilistic estimate σ_C/(T_e A_e), cm²·fluorophore⁻¹, when σ_C is known.
    pub sigma_e_est: Option<f64>,
    /// Quantum-advantage upper bound, when σ_C is known.
    pub qa_ub: Option<UncertainValue>,
}

impl E2paBound {
    pub fn new(
        sigma_e_ub: UncertainValue,
        sigma_e_est: Option<f64>,
        qa_ub: Option<UncertainValue>,
    ) -> Result<Self> {
        if !(sigma_e_ub.value > 0.0) {
            return Err(Error::Domain(format!(
                "cross-section upper bound must be positive, got {}",
                sigma_e_ub.value
            )));
        }
        if let Some(qa) = &qa_ub {
            if !(qa.value > 0.0) {
                return Err(Error::Domain(format!(
                    "quantum-advantage bound must be positive, got {}",
                    qa.value
                )));
            }
        }
        Ok(Self { sigma_e_ub, sigma_e_est, qa_ub })
    }
}

/// Spatio-temporal correlation scales of the entangled source at the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementParams {
    /// Entanglement time, fs.
    pub te_fs: f64,
    /// Entanglement area, cm².
    pub ae_cm2: f64,
    /// Documented bracket [min, max] for the area, cm².
    pub ae_bracket_cm2: Option<(f64, f64)>,
}

impl EntanglementParams {
    pub fn new(te_fs: f64, ae_cm2: f64, ae_bracket_cm2: Option<(f64, f64)>) -> Result<Self> {
        if !(te_fs > 0.0) || !(ae_cm2 > 0.0) {
            return Err(Error::Domain(format!(
                "entanglement time and area must be positive, got {te_fs} fs, {ae_cm2} cm2"
            )));
        }
        if let Some((lo, hi)) = ae_bracket_cm2 {
            if !(lo <= ae_cm2 && ae_cm2 <= hi) {
                return Err(Error::Domain(format!(
                    "entanglement area {ae_cm2} cm2 outside its bracket [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { te_fs, ae_cm2, ae_bracket_cm2 })
    }
}

/// Instantaneous entangled 2PA rate per fluorophore,
/// R = ½(σ_E φ + 3 σ_C φ²), excitations·s⁻¹·fluorophore⁻¹.
pub fn e2pa_rate(sigma_e_cm2: f64, sigma_c_gm: f64, flux_cm2_s: f64) -> Result<f64> {
    for (name, v) in [("sigma_E", sigma_e_cm2), ("sigma_C", sigma_c_gm), ("flux", flux_cm2_s)] {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    Ok(0.5 * (sigma_e_cm2 * flux_cm2_s + 3.0 * sigma_c_gm * GM_IN_CM4_S * flux_cm2_s * flux_cm2_s))
}

/// ∫ K(z) / (Δx(z)Δy(z)) dz over the cuvette, in cm⁻¹. The collection model
/// works in mm while beam widths and the cuvette length are CGS.
fn c2pef_z_integral_per_cm(app: &ApparatusSpec, beam: &BeamProfile) -> f64 {
    let half_cm = 0.5 * app.cuvette_length_cm;
    let integrand = |z_cm: f64| {
        let z_mm = z_cm * MM_PER_CM;
        let dx = beam_fwhm_at_um(beam, z_mm, TransverseAxis::X) * CM_PER_UM;
        let dy = beam_fwhm_at_um(beam, z_mm, TransverseAxis::Y) * CM_PER_UM;
        collection_k(&app.collection, z_mm) / (dx * dy)
    };
    // even in z
    2.0 * adaptive_simpson(integrand, 0.0, half_cm, 1e-6)
}

/// Classical two-photon-excited fluorescence rate per squared watt:
/// F_C/W² = √2 (ln2/π)^{3/2} σ_C n / (τ g (hν)²) × ∫K/(ΔxΔy)dz × ∫γΦdλ,
/// counts·s⁻¹·W⁻².
pub fn c2pef_slope_per_w2(
    sample: &SampleSpec,
    app: &ApparatusSpec,
    beam: &BeamProfile,
) -> Result<f64> {
    let sigma_c = sample
        .sigma_c_gm
        .ok_or_else(|| Error::Domain(format!("sample '{}' has no sigma_C", sample.name)))?;
    let zint = c2pef_z_integral_per_cm(app, beam);
    if zint <= 0.0 {
        return Err(Error::Singularity("collection z-integral is zero".into()));
    }
    let overlap = sample.overlap_integral();
    if overlap <= 0.0 {
        return Err(Error::Singularity("spectral overlap integral is zero".into()));
    }
    let shape = std::f64::consts::SQRT_2 * (std::f64::consts::LN_2 / std::f64::consts::PI).powf(1.5);
    let tau_s = beam.pulse_fwhm_fs * S_PER_FS;
    let hnu = app.photon_energy_j;
    Ok(shape * sigma_c * GM_IN_CM4_S * sample.number_density_per_cm3
        / (tau_s * beam.rep_rate_hz * hnu * hnu)
        * zint
        * overlap)
}

/// Classical fluorescence rate at average power `power_w`, counts·s⁻¹.
pub fn c2pef_forward(
    sample: &SampleSpec,
    app: &ApparatusSpec,
    beam: &BeamProfile,
    power_w: f64,
) -> Result<f64> {
    if !(power_w >= 0.0) {
        return Err(Error::Domain(format!("power must be non-negative, got {power_w} W")));
    }
    Ok(c2pef_slope_per_w2(sample, app, beam)? * power_w * power_w)
}

/// Inverts the classical forward model: the cross-section whose quadratic
/// slope (counts·s⁻¹·µW⁻²) matches the fitted one. Exact inverse of
/// `c2pef_forward` because the model is linear in σ_C.
pub fn extract_sigma_c(
    fit_slope_per_uw2: UncertainValue,
    sample: &SampleSpec,
    app: &ApparatusSpec,
    beam: &BeamProfile,
) -> Result<C2paResult> {
    if !(fit_slope_per_uw2.value > 0.0) {
        return Err(Error::Domain(format!(
            "fit slope must be positive, got {}",
            fit_slope_per_uw2.value
        )));
    }
    let unit_sample = SampleSpec { sigma_c_gm: Some(1.0), ..sample.clone() };
    let slope_per_gm = c2pef_slope_per_w2(&unit_sample, app, beam)? * W_PER_UW * W_PER_UW;
    let sigma_c = fit_slope_per_uw2.scaled(1.0 / slope_per_gm);
    Ok(C2paResult { sigma_c_gm: sigma_c, fit_slope: fit_slope_per_uw2, fit_exponent: 2.0 })
}

/// ∫K(z)dz over ±z_R of the entangled beam, cm. This is the region of
/// nearly constant entanglement area that the linear model integrates over.
fn e2pef_collection_integral_cm(app: &ApparatusSpec) -> f64 {
    collection_integral_cm(&app.collection, app.rayleigh_range_mm)
}

fn e2pef_denominator(sample: &SampleSpec, app: &ApparatusSpec) -> Result<f64> {
    let q = app.photon_rate_per_s.ok_or_else(|| {
        Error::Domain("apparatus has no entangled-arm photon rate Q".into())
    })?;
    let kint = e2pef_collection_integral_cm(app);
    let overlap = sample.overlap_integral();
    for (name, v) in [
        ("path transmittance", app.path_transmittance),
        ("photon rate Q", q),
        ("number density n", sample.number_density_per_cm3),
        ("collection integral", kint),
        ("overlap integral", overlap),
    ] {
        if !(v > 0.0) {
            return Err(Error::Singularity(format!("{name} is zero in the E2PEF model")));
        }
    }
    Ok(app.path_transmittance * q * sample.number_density_per_cm3 * kint * overlap)
}

/// Upper bound on the entangled cross-section from the measurable
/// fluorescence lower bound:
/// σ_E^UB = 2 F^LB / (𝒯 Q n ∫K(z)dz ∫γΦdλ), cm²·fluorophore⁻¹.
pub fn sigma_e_upper_bound(sample: &SampleSpec, app: &ApparatusSpec) -> Result<f64> {
    Ok(2.0 * app.f_lb_cps / e2pef_denominator(sample, app)?)
}

/// Expected entangled fluorescence rate for a hypothetical cross-section:
/// F_E = ½ σ_E 𝒯 Q n ∫K(z)dz ∫γΦdλ, counts·s⁻¹.
pub fn expected_e2pef(sigma_e_cm2: f64, sample: &SampleSpec, app: &ApparatusSpec) -> Result<f64> {
    if !(sigma_e_cm2 >= 0.0) {
        return Err(Error::Domain(format!("sigma_E must be non-negative, got {sigma_e_cm2}")));
    }
    Ok(0.5 * sigma_e_cm2 * e2pef_denominator(sample, app)?)
}

/// One row of a fluorescence-versus-photon-number diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalPoint {
    /// Mean photon number per pulse.
    pub mu: f64,
    /// Peak photon flux at the focus, photons·cm⁻²·s⁻¹.
    pub peak_flux_cm2_s: f64,
    /// Expected entangled fluorescence rate, counts·s⁻¹.
    pub f_e_cps: f64,
}

/// The linear E2PEF diagonal: expected count rate and peak flux for each
/// requested mean photon number, at a fixed candidate cross-section.
pub fn e2pef_diagonal(
    sigma_e_cm2: f64,
    sample: &SampleSpec,
    app: &ApparatusSpec,
    beam: &BeamProfile,
    mu_values: &[f64],
) -> Result<Vec<DiagonalPoint>> {
    let q_ref = app
        .photon_rate_per_s
        .ok_or_else(|| Error::Domain("apparatus has no entangled-arm photon rate Q".into()))?;
    let f_e_at_q = expected_e2pef(sigma_e_cm2, sample, app)?;
    let flux_per_mu = crate::optics::mu_to_peak_flux_factor(beam);
    Ok(mu_values
        .iter()
        .map(|&mu| {
            let q = mu * app.rep_rate_hz;
            DiagonalPoint {
                mu,
                peak_flux_cm2_s: mu * flux_per_mu,
                f_e_cps: f_e_at_q * q / q_ref,
            }
        })
        .collect())
}

/// Probabilistic estimate σ_E ≈ σ_C / (T_e A_e), cm²·fluorophore⁻¹.
pub fn sigma_e_estimate(sigma_c_gm: f64, te_fs: f64, ae_cm2: f64) -> Result<f64> {
    if !(sigma_c_gm > 0.0) {
        return Err(Error::Domain(format!("sigma_C must be positive, got {sigma_c_gm} GM")));
    }
    if !(te_fs > 0.0) || !(ae_cm2 > 0.0) {
        return Err(Error::Singularity(format!(
            "sigma_E estimate diverges for T_e = {te_fs} fs, A_e = {ae_cm2} cm2"
        )));
    }
    Ok(sigma_c_gm * GM_IN_CM4_S / (te_fs * S_PER_FS * ae_cm2))
}

/// Entanglement area (µm²) a reported cross-section pair would require
/// under the probabilistic model: A_e = σ_C / (σ_E T_e).
pub fn required_entanglement_area_um2(
    sigma_c_gm: f64,
    sigma_e_cm2: f64,
    te_fs: f64,
) -> Result<f64> {
    if !(sigma_c_gm > 0.0) || !(sigma_e_cm2 > 0.0) || !(te_fs > 0.0) {
        return Err(Error::Domain(format!(
            "all inputs must be positive, got sigma_C = {sigma_c_gm} GM, \
             sigma_E = {sigma_e_cm2} cm2, T_e = {te_fs} fs"
        )));
    }
    Ok(sigma_c_gm * GM_IN_CM4_S / (sigma_e_cm2 * te_fs * S_PER_FS) * UM2_PER_CM2)
}

/// The minimum classical peak flux at which the fluorescence crosses the
/// measurable lower bound, via the pure quadratic law.
pub fn min_classical_flux_cm2_s(
    sample: &SampleSpec,
    app: &ApparatusSpec,
    beam_laser: &BeamProfile,
) -> Result<f64> {
    let slope = c2pef_slope_per_w2(sample, app, beam_laser)?;
    let w_min = (app.f_lb_cps / slope).sqrt();
    crate::optics::peak_flux_cm2_s(&beam_laser.with_power_w(w_min)?, 0.0)
}

/// Quantum-advantage upper bound: the ratio of the minimum classical peak
/// flux needed to see fluorescence to the maximum available entangled flux.
pub fn quantum_advantage_ub(
    sample: &SampleSpec,
    app: &ApparatusSpec,
    beam_laser: &BeamProfile,
    phi_spdc_max_cm2_s: f64,
) -> Result<f64> {
    if !(phi_spdc_max_cm2_s > 0.0) {
        return Err(Error::Domain(format!(
            "entangled peak flux must be positive, got {phi_spdc_max_cm2_s}"
        )));
    }
    Ok(min_classical_flux_cm2_s(sample, app, beam_laser)? / phi_spdc_max_cm2_s)
}

/// Linear/quadratic decomposition of the loss-scaled entangled rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossScaledRate {
    /// ½ σ_E 𝒯 φ_sample — scales with the transmittance because losses act
    /// on correlated pairs, not independent photons.
    pub linear: f64,
    /// (3/2) σ_C φ_sample² — uncorrelated accidental pairs, no extra 𝒯.
    pub quadratic: f64,
}

impl LossScaledRate {
    pub fn total(&self) -> f64 {
        self.linear + self.quadratic
    }
}

/// Entangled rate seen through linear loss of transmittance 𝒯 between the
/// crystal and the sample: R = ½(σ_E 𝒯 φ_sample + 3 σ_C φ_sample²).
pub fn loss_scaled_rate(
    sigma_e_cm2: f64,
    sigma_c_gm: f64,
    transmittance: f64,
    flux_sample_cm2_s: f64,
) -> Result<LossScaledRate> {
    if !(transmittance > 0.0 && transmittance <= 1.0) {
        return Err(Error::Domain(format!("transmittance must be in (0, 1], got {transmittance}")));
    }
    for (name, v) in [("sigma_E", sigma_e_cm2), ("sigma_C", sigma_c_gm), ("flux", flux_sample_cm2_s)] {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    Ok(LossScaledRate {
        linear: 0.5 * sigma_e_cm2 * transmittance * flux_sample_cm2_s,
        quadratic: 1.5 * sigma_c_gm * GM_IN_CM4_S * flux_sample_cm2_s * flux_sample_cm2_s,
    })
}
