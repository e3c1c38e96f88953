//! Joint spectral intensity ingestion and synthesis, dispersion-phase
//! application, the transform to the joint temporal intensity, and the
//! entanglement-time and coincidence-ratio metrics.
//!
//! Conventions: angular frequencies are rad·fs⁻¹ and times fs, so a group
//! delay dispersion β in fs² enters the spectral phase β(ω − ω_P/2)²/2
//! without conversion factors. The joint temporal amplitude is the 2-D DFT
//! of the joint spectral amplitude JSA = √JSI · e^{iβΩ_s²/2} e^{iβΩ_i²/2},
//! scaled so that Parseval holds between Σ JSI Δω² and Σ JTI Δt².

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::units::{omega_rad_per_fs, wavelength_fwhm_to_omega, FWHM_PER_SIGMA};

/// Maps a time-of-flight fiber-spectrometer arrival delay to wavelength:
/// λ = λ_ref + delay / (dispersion × length).
pub fn tof_wavelength_map(
    arrival_delay_ns: f64,
    fiber_dispersion_ns_per_nm_km: f64,
    fiber_length_km: f64,
    ref_wavelength_nm: f64,
) -> Result<f64> {
    if fiber_dispersion_ns_per_nm_km == 0.0 {
        return Err(Error::Singularity(
            "fiber dispersion is zero; arrival time carries no wavelength information".into(),
        ));
    }
    if !(fiber_length_km > 0.0) {
        return Err(Error::Domain(format!("fiber length must be positive, got {fiber_length_km} km")));
    }
    Ok(ref_wavelength_nm + arrival_delay_ns / (fiber_dispersion_ns_per_nm_km * fiber_length_km))
}

/// Joint spectral intensity on uniform angular-frequency grids (rad·fs⁻¹).
/// Rows index the signal axis, columns the idler axis.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub omega_s: Vec<f64>,
    pub omega_i: Vec<f64>,
    pub intensity: Array2<f64>,
    /// Degenerate frequency ω_P/2 the dispersion phase is referenced to.
    pub center_omega: f64,
}

impl JointSpectrum {
    /// Grid spacing, validated uniform and equal on both axes.
    pub fn grid_spacing(&self) -> Result<f64> {
        let ds = uniform_spacing(&self.omega_s).ok_or_else(|| {
            Error::Grid("signal frequency grid is not uniform; resample to a uniform grid first".into())
        })?;
        let di = uniform_spacing(&self.omega_i).ok_or_else(|| {
            Error::Grid("idler frequency grid is not uniform; resample to a uniform grid first".into())
        })?;
        if (ds - di).abs() > 1e-9 * ds {
            return Err(Error::Grid(format!(
                "signal and idler grid spacings differ ({ds} vs {di} rad/fs); resample to a common grid"
            )));
        }
        Ok(ds)
    }

    /// Σ JSI Δω², the total spectral mass.
    pub fn total_mass(&self) -> Result<f64> {
        let d = self.grid_spacing()?;
        Ok(self.intensity.sum() * d * d)
    }

    /// Marginal projection onto one frequency axis (integrating out the
    /// other), as (grid, values).
    pub fn marginal(&self, axis: JointAxis) -> (Vec<f64>, Vec<f64>) {
        match axis {
            JointAxis::Signal => {
                let vals = self.intensity.rows().into_iter().map(|r| r.sum()).collect();
                (self.omega_s.clone(), vals)
            }
            JointAxis::Idler => {
                let vals = self.intensity.columns().into_iter().map(|c| c.sum()).collect();
                (self.omega_i.clone(), vals)
            }
        }
    }

    /// Exports onto wavelength grids (descending ω → ascending λ) with the
    /// inverse Jacobian weight, for plotting and grid files. Round-trips
    /// with `WavelengthGridJsi::to_frequency` up to interpolation error.
    pub fn to_wavelength_grid(&self) -> Result<WavelengthGridJsi> {
        let tau_c = std::f64::consts::TAU * crate::units::SPEED_OF_LIGHT_NM_PER_FS;
        let to_lambda = |omega: &[f64]| -> Vec<f64> {
            omega.iter().rev().map(|&w| tau_c / w).collect()
        };
        let lambda_s = to_lambda(&self.omega_s);
        let lambda_i = to_lambda(&self.omega_i);
        let (ns, ni) = self.intensity.dim();
        let intensity = Array2::from_shape_fn((ns, ni), |(j, k)| {
            let (js, ks) = (ns - 1 - j, ni - 1 - k);
            let jac = (tau_c / (lambda_s[j] * lambda_s[j])) * (tau_c / (lambda_i[k] * lambda_i[k]));
            self.intensity[[js, ks]] * jac
        });
        WavelengthGridJsi::new(lambda_s, lambda_i, intensity)
    }

    /// Projection onto the sum-frequency (diagonal) coordinate ω_s + ω_i,
    /// as (coordinate, values). Exposes the pump-linewidth ridge width.
    pub fn sum_frequency_projection(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.grid_spacing()?;
        let (ns, ni) = self.intensity.dim();
        let mut vals = vec![0.0; ns + ni - 1];
        for j in 0..ns {
            for k in 0..ni {
                vals[j + k] += self.intensity[[j, k]];
            }
        }
        let coords: Vec<f64> =
            (0..vals.len()).map(|m| self.omega_s[0] + self.omega_i[0] + m as f64 * d).collect();
        Ok((coords, vals))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointAxis {
    Signal,
    Idler,
}

fn uniform_spacing(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let d = grid[1] - grid[0];
    if d <= 0.0 {
        return None;
    }
    let ok = grid.windows(2).all(|w| ((w[1] - w[0]) - d).abs() <= 1e-9 * d);
    ok.then_some(d)
}

/// Grid geometry for synthesized joint spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per axis.
    pub points: usize,
    /// Half-extent of the grid in units of the larger marginal FWHM.
    pub span_fwhms: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: 1024, span_fwhms: 4.0 }
    }
}

/// Synthesizes an anticorrelated Gaussian joint spectrum with the requested
/// marginal FWHMs.
///
/// `anticorrelation` in [0, 1] is minus the frequency correlation
/// coefficient: 0 gives a separable product of two Gaussians, 1 collapses
/// the sum-frequency (diagonal) width to one grid cell above zero. The
/// marginals are invariant under the correlation, so they match the
/// requested FWHMs by construction (within grid sampling).
pub fn synthesize_gaussian_jsi(
    center_nm: f64,
    marginal_fwhm_s_nm: f64,
    marginal_fwhm_i_nm: f64,
    anticorrelation: f64,
    grid: GridSpec,
) -> Result<JointSpectrum> {
    if !(center_nm > 0.0) || !(marginal_fwhm_s_nm > 0.0) || !(marginal_fwhm_i_nm > 0.0) {
        return Err(Error::Domain("center and marginal FWHMs must be positive".into()));
    }
    if !(0.0..=1.0).contains(&anticorrelation) {
        return Err(Error::Domain(format!(
            "anticorrelation must be in [0, 1], got {anticorrelation}"
        )));
    }
    if grid.points < 16 {
        return Err(Error::Grid(format!("grid of {} points is too small", grid.points)));
    }
    let omega0 = omega_rad_per_fs(center_nm);
    let fwhm_s = wavelength_fwhm_to_omega(center_nm, marginal_fwhm_s_nm);
    let fwhm_i = wavelength_fwhm_to_omega(center_nm, marginal_fwhm_i_nm);
    let half_span = grid.span_fwhms * fwhm_s.max(fwhm_i);
    let d_omega = 2.0 * half_span / grid.points as f64;

    let points_per_fwhm = fwhm_s.min(fwhm_i) / d_omega;
    if points_per_fwhm < 16.0 {
        return Err(Error::Grid(format!(
            "grid resolves the narrower marginal with only {points_per_fwhm:.1} points per FWHM \
             (need >= 16); increase points or decrease span"
        )));
    }

    let sigma_s = fwhm_s / FWHM_PER_SIGMA;
    let sigma_i = fwhm_i / FWHM_PER_SIGMA;

    // Correlation ρ = −a, clamped so the narrow principal axis of the
    // joint Gaussian never collapses below half a grid cell: the smallest
    // covariance eigenvalue [S − √(D² + 4ρ²P²)]/2 must stay ≥ (Δω/2)².
    let s_sum = sigma_s * sigma_s + sigma_i * sigma_i;
    let d_diff = sigma_s * sigma_s - sigma_i * sigma_i;
    let p_prod = sigma_s * sigma_i;
    let eps2 = 0.25 * d_omega * d_omega;
    let rho_floor = {
        let lhs = s_sum - 2.0 * eps2;
        let num = (lhs * lhs - d_diff * d_diff).max(0.0);
        -(num.sqrt() / (2.0 * p_prod)).min(1.0)
    };
    let rho = (-anticorrelation).max(rho_floor);
    let one_minus_rho2 = 1.0 - rho * rho;
    if one_minus_rho2 < 1e-12 {
        return Err(Error::Grid("requested correlation degenerates the joint Gaussian".into()));
    }

    let n = grid.points;
    let axis: Vec<f64> = (0..n).map(|k| omega0 + (k as f64 - n as f64 / 2.0) * d_omega).collect();
    let mut intensity = Array2::zeros((n, n));
    for (j, &ws) in axis.iter().enumerate() {
        let x = (ws - omega0) / sigma_s;
        for (k, &wi) in axis.iter().enumerate() {
            let y = (wi - omega0) / sigma_i;
            let q = (x * x - 2.0 * rho * x * y + y * y) / one_minus_rho2;
            intensity[[j, k]] = (-0.5 * q).exp();
        }
    }
    Ok(JointSpectrum { omega_s: axis.clone(), omega_i: axis, intensity, center_omega: omega0 })
}

/// Quadratic spectral phase accumulated by each photon, fs².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSpec {
    pub gdd_fs2: f64,
}

impl DispersionSpec {
    pub fn new(gdd_fs2: f64) -> Result<Self> {
        if !gdd_fs2.is_finite() {
            return Err(Error::Domain(format!("group delay dispersion must be finite, got {gdd_fs2}")));
        }
        Ok(Self { gdd_fs2 })
    }

    pub fn transform_limited() -> Self {
        Self { gdd_fs2: 0.0 }
    }
}

/// Joint temporal intensity on uniform, centered time grids (fs).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTemporal {
    pub t_s: Vec<f64>,
    pub t_i: Vec<f64>,
    pub intensity: Array2<f64>,
}

impl JointTemporal {
    pub fn grid_spacing(&self) -> f64 {
        self.t_s[1] - self.t_s[0]
    }

    /// Σ JTI Δt², the total temporal mass. Equals the spectral mass of the
    /// source spectrum (Parseval).
    pub fn total_mass(&self) -> f64 {
        let d = self.grid_spacing();
        self.intensity.sum() * d * d
    }

    /// Projection onto the arrival-time difference t_s − t_i, as
    /// (difference values, projected intensity).
    pub fn antidiagonal_projection(&self) -> (Vec<f64>, Vec<f64>) {
        let (ns, ni) = self.intensity.dim();
        let dt = self.grid_spacing();
        let mut vals = vec![0.0; ns + ni - 1];
        for j in 0..ns {
            for k in 0..ni {
                // j - k + (ni - 1) ∈ [0, ns + ni - 2]
                vals[j + (ni - 1) - k] += self.intensity[[j, k]];
            }
        }
        let offset = self.t_s[0] - self.t_i[ni - 1];
        let coords: Vec<f64> = (0..vals.len()).map(|m| offset + m as f64 * dt).collect();
        (coords, vals)
    }

    /// Marginal projection onto one time axis.
    pub fn marginal(&self, axis: JointAxis) -> (Vec<f64>, Vec<f64>) {
        match axis {
            JointAxis::Signal => {
                let vals = self.intensity.rows().into_iter().map(|r| r.sum()).collect();
                (self.t_s.clone(), vals)
            }
            JointAxis::Idler => {
                let vals = self.intensity.columns().into_iter().map(|c| c.sum()).collect();
                (self.t_i.clone(), vals)
            }
        }
    }
}

/// Applies the quadratic dispersion phase to √JSI and Fourier-transforms to
/// the joint temporal intensity, zero-padding by the given factor to refine
/// the temporal sampling.
pub fn transform_with_padding(
    jsi: &JointSpectrum,
    disp: &DispersionSpec,
    pad_factor: usize,
) -> Result<JointTemporal> {
    let d_omega = jsi.grid_spacing()?;
    let (ns, ni) = jsi.intensity.dim();
    if ns != ni {
        return Err(Error::Grid(format!(
            "transform needs a square grid, got {ns} x {ni}; resample to a common grid"
        )));
    }
    if pad_factor == 0 {
        return Err(Error::Domain("pad factor must be at least 1".into()));
    }
    let n = ns;
    let n_fft = n * pad_factor;

    // JSA = √JSI · e^{iβΩ_s²/2} · e^{iβΩ_i²/2}
    let beta = disp.gdd_fs2;
    let phase_1d = |omega: f64| {
        let det = omega - jsi.center_omega;
        Complex64::from_polar(1.0, 0.5 * beta * det * det)
    };
    let row_phase: Vec<Complex64> = jsi.omega_s.iter().map(|&w| phase_1d(w)).collect();
    let col_phase: Vec<Complex64> = jsi.omega_i.iter().map(|&w| phase_1d(w)).collect();

    let mut jsa = Array2::<Complex64>::zeros((n_fft, n_fft));
    for j in 0..n {
        for k in 0..n {
            jsa[[j, k]] = row_phase[j] * col_phase[k] * jsi.intensity[[j, k]].sqrt();
        }
    }

    fft2_in_place(&mut jsa);

    // Centered time grid: after an fftshift, index m carries
    // t = (m − ⌊N/2⌋)·Δt with Δt = 2π/(N·Δω).
    let dt = std::f64::consts::TAU / (n_fft as f64 * d_omega);
    let c = n_fft / 2;
    let scale = d_omega * d_omega / std::f64::consts::TAU;
    let mut intensity = Array2::<f64>::zeros((n_fft, n_fft));
    for m in 0..n_fft {
        let src_m = (m + n_fft - c) % n_fft;
        for p in 0..n_fft {
            let src_p = (p + n_fft - c) % n_fft;
            intensity[[m, p]] = (scale * jsa[[src_m, src_p]]).norm_sqr();
        }
    }
    let t_axis: Vec<f64> = (0..n_fft).map(|m| (m as i64 - c as i64) as f64 * dt).collect();
    Ok(JointTemporal { t_s: t_axis.clone(), t_i: t_axis, intensity })
}

/// `transform_with_padding` with the default zero-padding factor of 2.
pub fn apply_dispersion_and_transform(
    jsi: &JointSpectrum,
    disp: &DispersionSpec,
) -> Result<JointTemporal> {
    transform_with_padding(jsi, disp, 2)
}

/// Unnormalized in-place 2-D FFT (rows, then columns).
fn fft2_in_place(a: &mut Array2<Complex64>) {
    let (rows, cols) = a.dim();
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft_forward(cols);
    for mut r in a.rows_mut() {
        row_fft.process(r.as_slice_mut().expect("row not contiguous"));
    }
    let col_fft = planner.plan_fft_forward(rows);
    let mut buf = vec![Complex64::default(); rows];
    for k in 0..cols {
        for j in 0..rows {
            buf[j] = a[[j, k]];
        }
        col_fft.process(&mut buf);
        for j in 0..rows {
            a[[j, k]] = buf[j];
        }
    }
}

/// FWHM of a sampled profile by linear interpolation between the half-max
/// crossings on either side of the global maximum.
pub fn fwhm_of_profile(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Grid("profile needs at least 3 samples".into()));
    }
    let (peak_idx, &peak) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    if !(peak > 0.0) {
        return Err(Error::Domain("profile has no positive maximum".into()));
    }
    let half = 0.5 * peak;

    let crossing = |mut i: usize, step: i64| -> Option<f64> {
        loop {
            let next = i as i64 + step;
            if next < 0 || next as usize >= y.len() {
                return None;
            }
            let j = next as usize;
            if y[j] < half {
                let frac = (y[i] - half) / (y[i] - y[j]);
                return Some(x[i] + frac * (x[j] - x[i]));
            }
            i = j;
        }
    };
    let left = crossing(peak_idx, -1).ok_or_else(|| {
        Error::Domain("profile never falls below half maximum on the left; FWHM undefined".into())
    })?;
    let right = crossing(peak_idx, 1).ok_or_else(|| {
        Error::Domain("profile never falls below half maximum on the right; FWHM undefined".into())
    })?;
    Ok(right - left)
}

/// Entanglement time: FWHM (fs) of the projection of the joint temporal
/// intensity onto the arrival-time difference t_s − t_i.
pub fn entanglement_time_fs(jti: &JointTemporal) -> Result<f64> {
    let (d, proj) = jti.antidiagonal_projection();
    fwhm_of_profile(&d, &proj)
}

/// FWHM (fs) of the single-axis projection of the joint temporal intensity;
/// a good estimate of the pulse duration of that beam when it exceeds the
/// pump pulse duration.
pub fn marginal_pulse_fwhm_fs(jti: &JointTemporal, axis: JointAxis) -> Result<f64> {
    let (t, proj) = jti.marginal(axis);
    fwhm_of_profile(&t, &proj)
}

/// Ratio of the joint-temporal mass inside |t_s − t_i| ≤ Δt for the
/// reference (transform-limited) distribution over the dispersed one.
pub fn coincidence_ratio(
    jti_ref: &JointTemporal,
    jti_disp: &JointTemporal,
    delta_t_fs: f64,
) -> Result<f64> {
    let same_axis = |a: &[f64], b: &[f64]| {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs()))
    };
    if !same_axis(&jti_ref.t_s, &jti_disp.t_s) || !same_axis(&jti_ref.t_i, &jti_disp.t_i) {
        return Err(Error::Grid("coincidence ratio needs both JTIs on the same time grid".into()));
    }
    let dt = jti_ref.grid_spacing();
    if delta_t_fs < dt * (1.0 - 1e-9) {
        return Err(Error::Domain(format!(
            "time window {delta_t_fs} fs is below the grid resolution {dt} fs"
        )));
    }
    let band_mass = |jti: &JointTemporal| -> f64 {
        let (d, proj) = jti.antidiagonal_projection();
        d.iter().zip(&proj).filter(|(dd, _)| dd.abs() <= delta_t_fs).map(|(_, v)| v).sum()
    };
    let disp = band_mass(jti_disp);
    if disp <= 0.0 {
        return Err(Error::Domain("dispersed distribution has no mass in the window".into()));
    }
    Ok(band_mass(jti_ref) / disp)
}

/// Joint intensity tabulated on (possibly non-uniform) wavelength grids,
/// the form measured spectrometers deliver and grid files store.
#[derive(Debug, Clone, PartialEq)]
pub struct WavelengthGridJsi {
    pub lambda_s_nm: Vec<f64>,
    pub lambda_i_nm: Vec<f64>,
    pub intensity: Array2<f64>,
}

impl WavelengthGridJsi {
    pub fn new(lambda_s_nm: Vec<f64>, lambda_i_nm: Vec<f64>, intensity: Array2<f64>) -> Result<Self> {
        if lambda_s_nm.len() != intensity.dim().0 || lambda_i_nm.len() != intensity.dim().1 {
            return Err(Error::Grid(format!(
                "intensity is {} x {} but grids have {} and {} points",
                intensity.dim().0,
                intensity.dim().1,
                lambda_s_nm.len(),
                lambda_i_nm.len()
            )));
        }
        for grid in [&lambda_s_nm, &lambda_i_nm] {
            if grid.len() < 2 || !grid.windows(2).all(|w| w[1] > w[0]) {
                return Err(Error::Grid("wavelength grids must be strictly ascending".into()));
            }
        }
        if intensity.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("joint intensity must be non-negative and finite".into()));
        }
        Ok(Self { lambda_s_nm, lambda_i_nm, intensity })
    }

    fn interp(&self, ls: f64, li: f64) -> f64 {
        let locate = |grid: &[f64], x: f64| -> Option<(usize, f64)> {
            if x < grid[0] || x > *grid.last().unwrap() {
                return None;
            }
            let i = grid.partition_point(|&g| g < x).clamp(1, grid.len() - 1);
            Some((i - 1, (x - grid[i - 1]) / (grid[i] - grid[i - 1])))
        };
        match (locate(&self.lambda_s_nm, ls), locate(&self.lambda_i_nm, li)) {
            (Some((j, fs)), Some((k, fi))) => {
                let a = self.intensity[[j, k]];
                let b = self.intensity[[j + 1, k]];
                let c = self.intensity[[j, k + 1]];
                let d = self.intensity[[j + 1, k + 1]];
                a * (1.0 - fs) * (1.0 - fi) + b * fs * (1.0 - fi) + c * (1.0 - fs) * fi + d * fs * fi
            }
            _ => 0.0,
        }
    }

    /// Resamples onto a square uniform angular-frequency grid with
    /// Jacobian-weighted intensity, I(ω) ∝ I(λ)·λ_s²λ_i², so the spectral
    /// mass is conserved under the change of variable.
    pub fn to_frequency(&self, center_nm: f64, points: usize) -> Result<JointSpectrum> {
        if points < 16 {
            return Err(Error::Grid(format!("resample grid of {points} points is too small")));
        }
        let omega0 = omega_rad_per_fs(center_nm);
        let bounds = |grid: &[f64]| {
            (omega_rad_per_fs(*grid.last().unwrap()), omega_rad_per_fs(grid[0]))
        };
        let (lo_s, hi_s) = bounds(&self.lambda_s_nm);
        let (lo_i, hi_i) = bounds(&self.lambda_i_nm);
        let lo = lo_s.min(lo_i);
        let hi = hi_s.max(hi_i);
        let d_omega = (hi - lo) / (points - 1) as f64;
        let axis: Vec<f64> = (0..points).map(|k| lo + k as f64 * d_omega).collect();

        let tau_c = std::f64::consts::TAU * crate::units::SPEED_OF_LIGHT_NM_PER_FS;
        let mut intensity = Array2::zeros((points, points));
        for (j, &ws) in axis.iter().enumerate() {
            let ls = tau_c / ws;
            for (k, &wi) in axis.iter().enumerate() {
                let li = tau_c / wi;
                let jac = (ls * ls / tau_c) * (li * li / tau_c);
                intensity[[j, k]] = self.interp(ls, li) * jac;
            }
        }
        Ok(JointSpectrum { omega_s: axis.clone(), omega_i: axis, intensity, center_omega: omega0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Closed-form standard deviation (fs) of the temporal intensity of a
    /// chirped Gaussian whose spectral intensity has standard deviation
    /// `sigma_omega` (rad/fs): σ_t = √(1/(4σ²) + β²σ²).
    fn chirped_sigma_t(sigma_omega: f64, beta_fs2: f64) -> f64 {
        (1.0 / (4.0 * sigma_omega * sigma_omega)
            + beta_fs2 * beta_fs2 * sigma_omega * sigma_omega)
            .sqrt()
    }

    fn weighted_sigma(x: &[f64], w: &[f64]) -> f64 {
        let total: f64 = w.iter().sum();
        let mean: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / total;
        let var: f64 = x.iter().zip(w).map(|(a, b)| (a - mean) * (a - mean) * b).sum::<f64>() / total;
        var.sqrt()
    }

    #[test]
    fn tof_map_points() {
        assert_relative_eq!(tof_wavelength_map(0.0, -0.114, 0.5, 810.0).unwrap(), 810.0);
        assert_relative_eq!(
            tof_wavelength_map(-0.57, -0.114, 0.5, 810.0).unwrap(),
            820.0,
            max_relative = 1e-12
        );
        assert!(tof_wavelength_map(1.0, 0.0, 0.5, 810.0).is_err());
    }

    #[test]
    fn synthesized_marginals_match_request() {
        let jsi = synthesize_gaussian_jsi(810.0, 79.0, 72.0, 0.9998, GridSpec { points: 512, span_fwhms: 4.0 })
            .unwrap();
        for (axis, nm) in [(JointAxis::Signal, 79.0), (JointAxis::Idler, 72.0)] {
            let (w, v) = jsi.marginal(axis);
            let fwhm = fwhm_of_profile(&w, &v).unwrap();
            let want = wavelength_fwhm_to_omega(810.0, nm);
            assert!((fwhm - want).abs() / want < 0.02, "marginal {fwhm} vs {want}");
        }
    }

    #[test]
    fn zero_anticorrelation_is_separable() {
        let jsi = synthesize_gaussian_jsi(810.0, 40.0, 40.0, 0.0, GridSpec { points: 128, span_fwhms: 3.0 })
            .unwrap();
        // weighted covariance of (Ω_s, Ω_i) vanishes for a product state
        let omega0 = jsi.center_omega;
        let mut cov = 0.0;
        let mut var = 0.0;
        let mut total = 0.0;
        for (j, &ws) in jsi.omega_s.iter().enumerate() {
            for (k, &wi) in jsi.omega_i.iter().enumerate() {
                let w = jsi.intensity[[j, k]];
                cov += w * (ws - omega0) * (wi - omega0);
                var += w * (ws - omega0) * (ws - omega0);
                total += w;
            }
        }
        assert!((cov / total).abs() < 1e-6 * (var / total), "cov {cov} var {var}");
    }

    #[test]
    fn full_anticorrelation_collapses_sum_frequency_ridge() {
        let jsi = synthesize_gaussian_jsi(810.0, 76.0, 76.0, 1.0, GridSpec { points: 256, span_fwhms: 4.0 })
            .unwrap();
        let d_omega = jsi.grid_spacing().unwrap();
        let (coords, vals) = jsi.sum_frequency_projection().unwrap();
        let fwhm = fwhm_of_profile(&coords, &vals).unwrap();
        assert!(fwhm <= 2.0 * d_omega, "sum-frequency FWHM {fwhm} vs cell {d_omega}");
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let err = synthesize_gaussian_jsi(810.0, 76.0, 76.0, 0.5, GridSpec { points: 64, span_fwhms: 8.0 })
            .unwrap_err();
        assert!(matches!(err, Error::Grid(_)), "{err}");
    }

    #[test]
    fn transform_limited_gaussian_fourier_pair() {
        // Separable Gaussian, β = 0: each temporal marginal has
        // FWHM_t = 4 ln 2 / FWHM_ω.
        let jsi = synthesize_gaussian_jsi(810.0, 40.0, 40.0, 0.0, GridSpec { points: 256, span_fwhms: 4.0 })
            .unwrap();
        let jti = apply_dispersion_and_transform(&jsi, &DispersionSpec::transform_limited()).unwrap();
        let fwhm_omega = wavelength_fwhm_to_omega(810.0, 40.0);
        let want = 4.0 * std::f64::consts::LN_2 / fwhm_omega;
        for axis in [JointAxis::Signal, JointAxis::Idler] {
            let got = marginal_pulse_fwhm_fs(&jti, axis).unwrap();
            assert!((got - want).abs() / want < 0.02, "axis {axis:?}: {got} vs {want}");
        }
    }

    #[test]
    fn parseval_mass_is_conserved() {
        let jsi = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.8, GridSpec { points: 256, span_fwhms: 4.0 })
            .unwrap();
        let spectral = jsi.total_mass().unwrap();
        for beta in [0.0, 2200.0] {
            let jti = apply_dispersion_and_transform(&jsi, &DispersionSpec::new(beta).unwrap()).unwrap();
            assert_relative_eq!(jti.total_mass(), spectral, max_relative = 1e-6);
        }
    }

    #[test]
    fn chirp_dominated_widths_match_closed_form() {
        // The rotated coordinates decouple: the (t_s − t_i)/√2 width is the
        // chirped transform of the difference-frequency Gaussian. Compare
        // the DFT pipeline against the closed form within 3%.
        let (fwhm_nm, beta, anticorr) = (76.0, 3700.0, 0.9998);
        let jsi = synthesize_gaussian_jsi(810.0, fwhm_nm, fwhm_nm, anticorr, GridSpec { points: 1024, span_fwhms: 3.0 })
            .unwrap();
        let jti = apply_dispersion_and_transform(&jsi, &DispersionSpec::new(beta).unwrap()).unwrap();

        let sigma_m = wavelength_fwhm_to_omega(810.0, fwhm_nm) / FWHM_PER_SIGMA;
        let sigma_v = (sigma_m * sigma_m * (1.0 + anticorr)).sqrt();
        let te_closed = std::f64::consts::SQRT_2 * FWHM_PER_SIGMA * chirped_sigma_t(sigma_v, beta);
        let te_dft = entanglement_time_fs(&jti).unwrap();
        assert!((te_dft - te_closed).abs() / te_closed < 0.03, "{te_dft} vs {te_closed}");
    }

    #[test]
    fn dispersion_broadens_the_difference_time() {
        let jsi = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.999, GridSpec { points: 512, span_fwhms: 3.0 })
            .unwrap();
        let te0 = entanglement_time_fs(
            &apply_dispersion_and_transform(&jsi, &DispersionSpec::transform_limited()).unwrap(),
        )
        .unwrap();
        let te = entanglement_time_fs(
            &apply_dispersion_and_transform(&jsi, &DispersionSpec::new(1500.0).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(te0 < te, "TL {te0} fs vs dispersed {te} fs");
    }

    #[test]
    fn entanglement_time_invariant_under_time_reversal() {
        let jsi = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.99, GridSpec { points: 256, span_fwhms: 3.0 })
            .unwrap();
        let jti = apply_dispersion_and_transform(&jsi, &DispersionSpec::new(800.0).unwrap()).unwrap();
        let te = entanglement_time_fs(&jti).unwrap();
        let reversed = JointTemporal {
            t_s: jti.t_s.iter().rev().map(|t| -t).collect(),
            t_i: jti.t_i.iter().rev().map(|t| -t).collect(),
            intensity: {
                let (n, m) = jti.intensity.dim();
                Array2::from_shape_fn((n, m), |(j, k)| jti.intensity[[n - 1 - j, m - 1 - k]])
            },
        };
        let te_rev = entanglement_time_fs(&reversed).unwrap();
        assert_relative_eq!(te, te_rev, max_relative = 1e-9);
    }

    #[test]
    fn grid_refinement_converges_te() {
        // Moderate chirp so the 512-point window already contains the
        // dispersed distribution; doubling the resolution must then move
        // the entanglement time by < 2%.
        let jti_at = |points: usize| {
            let jsi = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.999, GridSpec { points, span_fwhms: 3.0 })
                .unwrap();
            apply_dispersion_and_transform(&jsi, &DispersionSpec::new(1500.0).unwrap()).unwrap()
        };
        let te_coarse = entanglement_time_fs(&jti_at(512)).unwrap();
        let te_fine = entanglement_time_fs(&jti_at(1024)).unwrap();
        assert!((te_coarse - te_fine).abs() / te_fine < 0.02, "{te_coarse} vs {te_fine}");
    }

    #[test]
    fn coincidence_ratio_identity_and_monotonicity() {
        let jsi = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.999, GridSpec { points: 512, span_fwhms: 3.0 })
            .unwrap();
        let tl = apply_dispersion_and_transform(&jsi, &DispersionSpec::transform_limited()).unwrap();
        let disp = apply_dispersion_and_transform(&jsi, &DispersionSpec::new(1500.0).unwrap()).unwrap();

        // identical inputs → 1 for every window
        let dt = tl.grid_spacing();
        for k in [1.0, 4.0, 16.0] {
            assert_relative_eq!(coincidence_ratio(&tl, &tl, k * dt).unwrap(), 1.0, max_relative = 1e-12);
        }
        // monotone non-increasing toward 1 at the full window
        let windows: Vec<f64> = (0..10).map(|i| dt * 2f64.powi(i)).collect();
        let ratios: Vec<f64> =
            windows.iter().map(|&w| coincidence_ratio(&tl, &disp, w).unwrap()).collect();
        for pair in ratios.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-9), "ratios not monotone: {ratios:?}");
        }
        let full = coincidence_ratio(&tl, &disp, *tl.t_s.last().unwrap() * 2.0).unwrap();
        assert_relative_eq!(full, 1.0, max_relative = 1e-6);
        // window below resolution is rejected
        assert!(coincidence_ratio(&tl, &disp, 0.1 * dt).is_err());
    }

    #[test]
    fn non_uniform_grid_is_rejected_with_resample_hint() {
        let mut jsi = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.5, GridSpec { points: 64, span_fwhms: 1.5 })
            .unwrap();
        jsi.omega_s[10] += 1e-4;
        let err = apply_dispersion_and_transform(&jsi, &DispersionSpec::transform_limited())
            .unwrap_err();
        assert!(err.to_string().contains("resample"), "{err}");
    }

    #[test]
    fn flat_profile_has_no_fwhm() {
        let x: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let flat = vec![1.0; 32];
        assert!(fwhm_of_profile(&x, &flat).is_err());
        let zero = vec![0.0; 32];
        assert!(fwhm_of_profile(&x, &zero).is_err());
    }

    #[test]
    fn coincidence_ratio_rejects_mismatched_grids() {
        let jsi_a = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.9, GridSpec { points: 128, span_fwhms: 3.0 })
            .unwrap();
        let jsi_b = synthesize_gaussian_jsi(810.0, 60.0, 60.0, 0.9, GridSpec { points: 256, span_fwhms: 3.0 })
            .unwrap();
        let a = apply_dispersion_and_transform(&jsi_a, &DispersionSpec::transform_limited()).unwrap();
        let b = apply_dispersion_and_transform(&jsi_b, &DispersionSpec::transform_limited()).unwrap();
        assert!(coincidence_ratio(&a, &b, 10.0).is_err());
    }

    #[test]
    fn wavelength_export_round_trips() {
        let jsi = synthesize_gaussian_jsi(810.0, 50.0, 50.0, 0.7, GridSpec { points: 128, span_fwhms: 3.0 })
            .unwrap();
        let grid = jsi.to_wavelength_grid().unwrap();
        let back = grid.to_frequency(810.0, 128).unwrap();
        let mass_a = jsi.total_mass().unwrap();
        let mass_b = back.total_mass().unwrap();
        assert!((mass_a - mass_b).abs() / mass_a < 0.02, "{mass_a} vs {mass_b}");
    }

    #[test]
    fn wavelength_resample_conserves_mass() {
        // Build a wavelength-gridded Gaussian directly, resample to ω with
        // the Jacobian weight, and compare the mass against the λ-space
        // trapezoidal mass.
        let n = 101;
        let lam: Vec<f64> = (0..n).map(|i| 700.0 + 2.2 * i as f64).collect();
        let center = 810.0;
        let sig = 30.0;
        let mut intensity = Array2::zeros((n, n));
        for (j, &ls) in lam.iter().enumerate() {
            for (k, &li) in lam.iter().enumerate() {
                let x = (ls - center) / sig;
                let y = (li - center) / sig;
                intensity[[j, k]] = (-0.5 * (x * x + y * y)).exp();
            }
        }
        let grid = WavelengthGridJsi::new(lam.clone(), lam.clone(), intensity).unwrap();

        let dl = lam[1] - lam[0];
        let mass_lambda: f64 = grid.intensity.sum() * dl * dl;

        let jsi = grid.to_frequency(center, 256).unwrap();
        let mass_omega = jsi.total_mass().unwrap();
        assert!((mass_omega - mass_lambda).abs() / mass_lambda < 0.01, "{mass_omega} vs {mass_lambda}");
    }

    #[test]
    fn marginal_sigma_matches_rotated_construction() {
        // The u/v decomposition behind the closed-form oracles: check that
        // the synthesized joint Gaussian has the intended difference-axis
        // width (variance σ_m²(1 + a)).
        let (fwhm_nm, a) = (76.0, 0.9998);
        let jsi = synthesize_gaussian_jsi(810.0, fwhm_nm, fwhm_nm, a, GridSpec { points: 512, span_fwhms: 4.0 })
            .unwrap();
        let sigma_m = wavelength_fwhm_to_omega(810.0, fwhm_nm) / FWHM_PER_SIGMA;
        // build the difference-frequency projection
        let (ns, ni) = jsi.intensity.dim();
        let d = jsi.grid_spacing().unwrap();
        let mut vals = vec![0.0; ns + ni - 1];
        for j in 0..ns {
            for k in 0..ni {
                vals[j + (ni - 1) - k] += jsi.intensity[[j, k]];
            }
        }
        let coords: Vec<f64> = (0..vals.len())
            .map(|m| (m as i64 - (ni as i64 - 1)) as f64 * d)
            .collect();
        let got = weighted_sigma(&coords, &vals);
        // Var(Ω_s − Ω_i) = 2σ_m²(1 + a) for correlation −a
        let want_diff = sigma_m * (2.0 * (1.0 + a)).sqrt();
        assert!((got - want_diff).abs() / want_diff < 0.01, "{got} vs {want_diff}");
    }
}
