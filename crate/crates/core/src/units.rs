//! Physical constants and unit conversions.
//!
//! Internally all computation is carried out in CGS lengths plus seconds, so
//! that the Göppert-Mayer unit (1 GM = 1e-50 cm⁴·s) plugs into rate formulas
//! without hidden powers of ten. Energies stay in joules: they only ever
//! appear in the ratio W/hν, which is unit-system independent.

/// Avogadro constant, mol⁻¹ (exact, 2019 SI).
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// Speed of light, cm·s⁻¹ (exact).
pub const SPEED_OF_LIGHT_CM_PER_S: f64 = 2.997_924_58e10;

/// Speed of light, nm·fs⁻¹ (exact). Convenient for spectral/temporal grids.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792_458;

/// Planck constant, J·s (exact, 2019 SI).
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// One Göppert-Mayer in cm⁴·s·photon⁻¹·fluorophore⁻¹.
pub const GM_IN_CM4_S: f64 = 1e-50;

/// FWHM of a Gaussian divided by its standard deviation, 2√(2 ln 2).
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

pub const FS_PER_S: f64 = 1e15;
pub const S_PER_FS: f64 = 1e-15;
pub const S_PER_NS: f64 = 1e-9;
pub const CM_PER_UM: f64 = 1e-4;
pub const CM_PER_MM: f64 = 1e-1;
pub const MM_PER_CM: f64 = 10.0;
pub const UM2_PER_CM2: f64 = 1e8;
pub const CM2_PER_UM2: f64 = 1e-8;
pub const W_PER_UW: f64 = 1e-6;

/// Energy of a photon of the given vacuum wavelength, in joules.
pub fn photon_energy_j(wavelength_nm: f64) -> f64 {
    // hc/λ with hc in J·nm
    PLANCK_J_S * SPEED_OF_LIGHT_NM_PER_FS * FS_PER_S / wavelength_nm
}

/// Angular frequency (rad·fs⁻¹) of the given vacuum wavelength.
pub fn omega_rad_per_fs(wavelength_nm: f64) -> f64 {
    std::f64::consts::TAU * SPEED_OF_LIGHT_NM_PER_FS / wavelength_nm
}

/// Converts a wavelength FWHM at a given center into an angular-frequency
/// FWHM (rad·fs⁻¹), first order in Δλ/λ.
pub fn wavelength_fwhm_to_omega(center_nm: f64, fwhm_nm: f64) -> f64 {
    std::f64::consts::TAU * SPEED_OF_LIGHT_NM_PER_FS * fwhm_nm / (center_nm * center_nm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn photon_energy_810nm() {
        // hc/λ at the experiment's excitation wavelength
        assert_relative_eq!(photon_energy_j(810.0), 2.4524e-19, max_relative = 1e-4);
    }

    #[test]
    fn omega_of_810nm() {
        assert_relative_eq!(omega_rad_per_fs(810.0), 2.3255, max_relative = 1e-4);
    }
}
