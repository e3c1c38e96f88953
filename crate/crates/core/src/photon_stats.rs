//! Photon-number statistics of the excitation sources and the
//! click-detector model used to infer mean photon numbers from measured
//! count rates.
//!
//! A degenerate single-mode SPDC source is modeled as a single-mode squeezed
//! vacuum (SMSV): only even photon numbers are populated and
//! g⁽²⁾ = 3 + 1/μ. Real sources occupy several modes; those are modeled as
//! independent, equally populated SMSVs whose photon-number distributions
//! convolve.

use crate::error::{Error, Result};
use crate::units::{GM_IN_CM4_S, S_PER_FS, S_PER_NS};

/// Photon statistics of an excitation source, as far as two-photon rates
/// are concerned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceStats {
    Coherent,
    Thermal,
    /// Single-mode squeezed vacuum with the given mean photon number.
    Smsv { mean_photons: f64 },
}

/// Second-order coherence g⁽²⁾ of the source.
pub fn g2(source: SourceStats) -> Result<f64> {
    match source {
        SourceStats::Coherent => Ok(1.0),
        SourceStats::Thermal => Ok(2.0),
        SourceStats::Smsv { mean_photons } => {
            if !(mean_photons > 0.0) {
                return Err(Error::Domain(format!(
                    "SMSV mean photon number must be positive, got {mean_photons}"
                )));
            }
            Ok(3.0 + 1.0 / mean_photons)
        }
    }
}

/// Two-photon absorption rate R = κ₂ μ² g⁽²⁾, excitations·s⁻¹.
pub fn tpa_rate(kappa2_per_s: f64, mean_photons: f64, g2: f64) -> Result<f64> {
    for (name, v) in [("kappa2", kappa2_per_s), ("mu", mean_photons), ("g2", g2)] {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    Ok(kappa2_per_s * mean_photons * mean_photons * g2)
}

/// Interaction-strength constant κ₂ = σ_C / (2 T² A²) in s⁻¹, from a
/// classical cross-section in GM, an effective pulse duration in fs and an
/// effective beam area in cm².
pub fn kappa2_from_sigma_c(sigma_c_gm: f64, t_eff_fs: f64, a_eff_cm2: f64) -> Result<f64> {
    if !(sigma_c_gm > 0.0) {
        return Err(Error::Domain(format!("sigma_C must be positive, got {sigma_c_gm} GM")));
    }
    if !(t_eff_fs > 0.0) || !(a_eff_cm2 > 0.0) {
        return Err(Error::Singularity(format!(
            "kappa2 diverges for T = {t_eff_fs} fs, A = {a_eff_cm2} cm2"
        )));
    }
    let t_s = t_eff_fs * S_PER_FS;
    Ok(sigma_c_gm * GM_IN_CM4_S / (2.0 * t_s * t_s * a_eff_cm2 * a_eff_cm2))
}

/// A truncated photon-number distribution per pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDist {
    probs: Vec<f64>,
    mean: f64,
    mode_count: u32,
}

impl PhotonNumberDist {
    /// P(n) for n = 0..=n_max.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Mean photon number the distribution was built to represent.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn mode_count(&self) -> u32 {
        self.mode_count
    }

    /// Mean of the truncated distribution, Σ n P(n).
    pub fn sample_mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Probability mass beyond the truncation point.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.probs.iter().sum::<f64>()).max(0.0)
    }
}

const TAIL_TOLERANCE: f64 = 1e-9;

/// Un-truncated SMSV photon-number probabilities up to `n_max`, without the
/// tail check. P(n) vanishes for odd n; even terms follow the stable
/// recursion P(2k+2)/P(2k) = μ(2k+1) / (2(k+1)(1+μ)).
fn smsv_probs(mu: f64, n_max: usize) -> Vec<f64> {
    let mut probs = vec![0.0; n_max + 1];
    let mut p = 1.0 / (1.0 + mu).sqrt();
    probs[0] = p;
    let mut k = 0usize;
    while 2 * (k + 1) <= n_max {
        p *= mu * (2.0 * k as f64 + 1.0) / (2.0 * (k as f64 + 1.0) * (1.0 + mu));
        probs[2 * (k + 1)] = p;
        k += 1;
    }
    probs
}

/// Photon-number distribution of a single-mode squeezed vacuum with mean
/// photon number `mu`, truncated at `n_max`.
///
/// Errors if the truncated tail carries more than 1e-9 of the mass.
pub fn smsv_distribution(mu: f64, n_max: usize) -> Result<PhotonNumberDist> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mean photon number must be positive, got {mu}")));
    }
    let probs = smsv_probs(mu, n_max);
    let tail = 1.0 - probs.iter().sum::<f64>();
    if tail > TAIL_TOLERANCE {
        return Err(Error::Convergence(format!(
            "cutoff n_max = {n_max} leaves tail mass {tail:.3e} > {TAIL_TOLERANCE:.0e} for mu = {mu}"
        )));
    }
    Ok(PhotonNumberDist { probs, mean: mu, mode_count: 1 })
}

/// As `smsv_distribution`, choosing the cutoff by doubling until the tail
/// mass falls below 1e-9.
pub fn smsv_distribution_adaptive(mu: f64) -> Result<PhotonNumberDist> {
    let mut n_max = 16usize;
    loop {
        match smsv_distribution(mu, n_max) {
            Ok(d) => return Ok(d),
            Err(Error::Convergence(_)) if n_max < (1 << 26) => n_max *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn convolve_capped(a: &[f64], b: &[f64], cap: usize) -> Vec<f64> {
    let n = (a.len() + b.len() - 1).min(cap + 1);
    let mut out = vec![0.0; n];
    for (i, &pa) in a.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (j, &pb) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] += pa * pb;
        }
    }
    out
}

/// Trims trailing probabilities below f64 noise to keep convolutions cheap.
fn trim(mut v: Vec<f64>) -> Vec<f64> {
    while v.len() > 1 && *v.last().unwrap() < 1e-18 {
        v.pop();
    }
    v
}

/// Photon-number distribution of `modes` independent, equally populated
/// SMSVs carrying `mu_total` photons per pulse in total: the `modes`-fold
/// convolution of a single-mode distribution with mean `mu_total/modes`.
///
/// Every mode emits photons in pairs, so the total stays supported on even
/// n for any mode count; what changes with `modes` is how the mass spreads
/// over the even terms (and hence the click probability at fixed mean).
pub fn multimode_distribution(mu_total: f64, modes: u32, n_max: usize) -> Result<PhotonNumberDist> {
    if modes == 0 {
        return Err(Error::Domain("mode count must be at least 1".into()));
    }
    if !(mu_total > 0.0) {
        return Err(Error::Domain(format!("mean photon number must be positive, got {mu_total}")));
    }
    let per_mode = smsv_probs(mu_total / modes as f64, n_max);

    // modes-fold convolution by binary exponentiation, truncating at n_max
    let mut result: Vec<f64> = vec![1.0];
    let mut base = trim(per_mode);
    let mut m = modes;
    while m > 0 {
        if m & 1 == 1 {
            result = trim(convolve_capped(&result, &base, n_max));
        }
        m >>= 1;
        if m > 0 {
            base = trim(convolve_capped(&base, &base, n_max));
        }
    }
    result.resize(n_max + 1, 0.0);

    let tail = 1.0 - result.iter().sum::<f64>();
    if tail > TAIL_TOLERANCE {
        return Err(Error::Convergence(format!(
            "cutoff n_max = {n_max} leaves tail mass {tail:.3e} > {TAIL_TOLERANCE:.0e} \
             for mu = {mu_total}, M = {modes}"
        )));
    }
    Ok(PhotonNumberDist { probs: result, mean: mu_total, mode_count: modes })
}

/// Adaptive-cutoff variant of `multimode_distribution`.
pub fn multimode_distribution_adaptive(mu_total: f64, modes: u32) -> Result<PhotonNumberDist> {
    let mut n_max = 16usize;
    loop {
        match multimode_distribution(mu_total, modes, n_max) {
            Ok(d) => return Ok(d),
            Err(Error::Convergence(_)) if n_max < (1 << 26) => n_max *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Probability that a detector with efficiency `eta` registers at least one
/// photon from a pulse: Σₙ [1 − (1−η)ⁿ] P(n).
pub fn click_probability(dist: &PhotonNumberDist, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("detector efficiency must be in (0, 1], got {eta}")));
    }
    let miss = 1.0 - eta;
    let mut pow = 1.0; // (1-eta)^n
    let mut p_click = 0.0;
    for &p in dist.probs() {
        p_click += (1.0 - pow) * p;
        pow *= miss;
    }
    Ok(p_click)
}

/// A non-paralyzing click detector in a pulsed experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    /// System detection efficiency, in (0, 1].
    pub efficiency: f64,
    /// Dead time after a detection, ns.
    pub dead_time_ns: f64,
    /// Pulse repetition rate, pulses·s⁻¹.
    pub rep_rate_hz: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, dead_time_ns: f64, rep_rate_hz: f64) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::Domain(format!("efficiency must be in (0, 1], got {efficiency}")));
        }
        if !(dead_time_ns >= 0.0) {
            return Err(Error::Domain(format!("dead time must be non-negative, got {dead_time_ns} ns")));
        }
        if !(rep_rate_hz > 0.0) {
            return Err(Error::Domain(format!("repetition rate must be positive, got {rep_rate_hz}")));
        }
        Ok(Self { efficiency, dead_time_ns, rep_rate_hz })
    }

    /// Number of whole pulses the detector is dead for after a detection.
    pub fn n_dead(&self) -> u32 {
        (self.dead_time_ns * S_PER_NS * self.rep_rate_hz).floor() as u32
    }
}

/// Corrects a measured per-pulse click probability for a non-paralyzing
/// dead time spanning `n_dead` pulses: P_corr = P_meas / (1 − N·P_meas).
pub fn dead_time_correct(p_meas: f64, n_dead: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&p_meas) {
        return Err(Error::Domain(format!("click probability must be in [0, 1), got {p_meas}")));
    }
    let denom = 1.0 - n_dead as f64 * p_meas;
    if denom <= 0.0 {
        return Err(Error::Saturation(format!(
            "P_meas = {p_meas} is at or beyond the dead-time pole 1/N_dead = {}",
            1.0 / n_dead as f64
        )));
    }
    Ok(p_meas / denom)
}

/// Exact inverse of `dead_time_correct`: the click probability a detector
/// with the given dead time would measure.
pub fn dead_time_apply(p_corr: f64, n_dead: u32) -> f64 {
    p_corr / (1.0 + n_dead as f64 * p_corr)
}

const MU_BRACKET: (f64, f64) = (1e-6, 1e3);

/// Solves `click_probability(multimode_distribution(mu, modes), eta) =
/// p_click_corr` for the mean photon number by bisection. The click
/// probability is strictly increasing in μ, so the root is unique.
pub fn invert_mu(p_click_corr: f64, eta: f64, modes: u32) -> Result<f64> {
    if !(p_click_corr > 0.0 && p_click_corr < 1.0) {
        return Err(Error::Domain(format!(
            "corrected click probability must be in (0, 1), got {p_click_corr}"
        )));
    }
    let p_of = |mu: f64| -> Result<f64> {
        click_probability(&multimode_distribution_adaptive(mu, modes)?, eta)
    };
    let (mut lo, mut hi) = MU_BRACKET;
    if p_of(lo)? > p_click_corr {
        return Err(Error::Domain(format!(
            "click probability {p_click_corr} implies mu below the solver bracket ({} photons/pulse)",
            MU_BRACKET.0
        )));
    }
    if p_of(hi)? < p_click_corr {
        return Err(Error::Convergence(format!(
            "click probability {p_click_corr} is unreachable at eta = {eta}: the click \
             probability saturates below it for any mean photon number up to {}",
            MU_BRACKET.1
        )));
    }
    while (hi - lo) / hi > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if p_of(mid)? < p_click_corr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least-squares line through (pump power, μ) calibration points, evaluated
/// at `target_power`. Slope and intercept are both free.
pub fn extrapolate_mu(points: &[(f64, f64)], target_power_uw: f64) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::SingularFit(format!(
            "extrapolation needs at least 2 calibration points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() <= 1e-12 * n * sxx.max(1e-300) {
        return Err(Error::SingularFit(
            "calibration powers are all identical; the line is undetermined".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    Ok(intercept + slope * target_power_uw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent closed form for the click probability of M equally
    /// populated SMSVs via the probability generating function:
    /// P = 1 − [1 + qμ/M]^(−M/2) with q = 1 − (1−η)².
    fn click_probability_pgf(mu: f64, modes: u32, eta: f64) -> f64 {
        let q = 1.0 - (1.0 - eta) * (1.0 - eta);
        1.0 - (1.0 + q * mu / modes as f64).powf(-(modes as f64) / 2.0)
    }

    #[test]
    fn g2_of_sources() {
        assert_relative_eq!(g2(SourceStats::Coherent).unwrap(), 1.0);
        assert_relative_eq!(g2(SourceStats::Thermal).unwrap(), 2.0);
        assert_relative_eq!(g2(SourceStats::Smsv { mean_photons: 1.0 }).unwrap(), 4.0);
        assert!(g2(SourceStats::Smsv { mean_photons: 0.0 }).is_err());
    }

    #[test]
    fn tpa_rate_cases() {
        assert_relative_eq!(tpa_rate(1.0, 2.0, 1.0).unwrap(), 4.0);
        // thermal doubles the coherent rate at equal mean photon number
        let coherent = tpa_rate(0.7, 1.3, 1.0).unwrap();
        let thermal = tpa_rate(0.7, 1.3, 2.0).unwrap();
        assert_relative_eq!(thermal / coherent, 2.0);
        // SMSV: κ₂ μ² (3 + 1/μ) = κ₂ (μ + 3μ²)
        let mu = 0.37;
        let smsv = tpa_rate(2.0, mu, g2(SourceStats::Smsv { mean_photons: mu }).unwrap()).unwrap();
        assert_relative_eq!(smsv, 2.0 * (mu + 3.0 * mu * mu), max_relative = 1e-12);
    }

    #[test]
    fn kappa2_unit_plug_in() {
        // 2 GM, T = 1 s, A = 1 cm² → 1e-50 s⁻¹
        assert_relative_eq!(kappa2_from_sigma_c(2.0, 1e15, 1.0).unwrap(), 1e-50, max_relative = 1e-12);
        assert!(kappa2_from_sigma_c(2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn kappa2_reproduces_classical_rate() {
        // R = κ₂ μ² with φ = μ/(TA) must equal ½ σ_C φ² for coherent light.
        // Fixture: the strongest sample and the classical beam (111 fs
        // pulse, 49 µm circular focus).
        let sigma_c = 660.0;
        let t_fs = 111.0 / (2.0 * std::f64::consts::LN_2).sqrt();
        let d_cm = 49.0e-4;
        let a_cm2 = std::f64::consts::PI * d_cm * d_cm / (2.0 * std::f64::consts::LN_2);
        let kappa2 = kappa2_from_sigma_c(sigma_c, t_fs, a_cm2).unwrap();
        assert!(kappa2.is_finite() && kappa2 > 0.0);
        let mu = 3.2;
        let phi = mu / (t_fs * S_PER_FS * a_cm2);
        let via_kappa = tpa_rate(kappa2, mu, 1.0).unwrap();
        let classical = 0.5 * sigma_c * GM_IN_CM4_S * phi * phi;
        assert_relative_eq!(via_kappa, classical, max_relative = 1e-12);
    }

    #[test]
    fn smsv_leading_term_and_odd_rule() {
        let d = smsv_distribution(0.22, 64).unwrap();
        // P(0) = 1/√(1+μ)
        assert_relative_eq!(d.probs()[0], 1.0 / 1.22_f64.sqrt(), max_relative = 1e-12);
        assert_eq!(d.probs()[1], 0.0);
        assert_eq!(d.probs()[3], 0.0);
        // compare P(2) against the explicit formula
        assert_relative_eq!(d.probs()[2], 0.22 * 2.0 / (4.0 * 1.22_f64.powf(1.5)), max_relative = 1e-12);
    }

    #[test]
    fn smsv_mean_is_preserved() {
        for mu in [0.05, 0.22, 1.7, 12.0] {
            let d = smsv_distribution_adaptive(mu).unwrap();
            assert_relative_eq!(d.sample_mean(), mu, max_relative = 1e-6);
        }
    }

    #[test]
    fn smsv_small_cutoff_reports_tail() {
        let err = smsv_distribution(5.0, 4).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)), "{err}");
        assert!(err.to_string().contains("tail mass"));
    }

    #[test]
    fn multimode_degenerate_case_matches_single_mode() {
        let single = smsv_distribution(0.3, 64).unwrap();
        let multi = multimode_distribution(0.3, 1, 64).unwrap();
        for (a, b) in single.probs().iter().zip(multi.probs()) {
            assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-16);
        }
    }

    #[test]
    fn mode_splitting_spreads_mass_over_even_terms() {
        // Each mode emits pairs, so the total photon number stays even for
        // any mode count. Splitting the mean across modes de-bunches the
        // light: less vacuum and less high-n mass, more in the middle —
        // which is why the same click probability maps to a smaller μ.
        let one = multimode_distribution(0.2, 1, 64).unwrap();
        let two = multimode_distribution(0.2, 2, 64).unwrap();
        assert_eq!(two.probs()[1], 0.0);
        assert_eq!(two.probs()[3], 0.0);
        assert!(two.probs()[2] > one.probs()[2]);
        assert!(two.probs()[0] < one.probs()[0]);
        assert!(two.probs()[4] < one.probs()[4]);
    }

    #[test]
    fn multimode_mean_preserved_for_all_mode_counts() {
        for modes in [1, 2, 7, 100] {
            let d = multimode_distribution_adaptive(0.22, modes).unwrap();
            assert_relative_eq!(d.sample_mean(), 0.22, max_relative = 1e-6);
        }
    }

    #[test]
    fn click_probability_limits() {
        let d = smsv_distribution_adaptive(0.5).unwrap();
        // η = 1 → 1 − P(0)
        assert_relative_eq!(
            click_probability(&d, 1.0).unwrap(),
            1.0 - d.probs()[0],
            max_relative = 1e-12
        );
        assert!(click_probability(&d, 0.0).is_err());
        // η → 0⁺ limit is 0
        assert!(click_probability(&d, 1e-12).unwrap() < 1e-11);
    }

    #[test]
    fn click_probability_matches_pgf_closed_form() {
        for (mu, modes, eta) in [(0.22, 1, 0.46), (0.22, 100, 0.46), (3.0, 4, 0.8), (0.05, 2, 0.1)] {
            let d = multimode_distribution_adaptive(mu, modes).unwrap();
            let got = click_probability(&d, eta).unwrap();
            let want = click_probability_pgf(mu, modes, eta);
            assert_relative_eq!(got, want, max_relative = 1e-8);
        }
    }

    #[test]
    fn paper_operating_point_clicks_at_seven_percent() {
        let d = smsv_distribution_adaptive(0.22).unwrap();
        let p = click_probability(&d, 0.46).unwrap();
        assert!((p - 0.071).abs() < 2e-3, "P_click = {p}");
    }

    #[test]
    fn monte_carlo_click_oracle() {
        // Sample pulses from the distribution, then Bernoulli-thin each
        // photon; the click fraction must agree within 3 standard errors.
        let (mu, eta) = (0.22, 0.46);
        let d = smsv_distribution_adaptive(mu).unwrap();
        let analytic = click_probability(&d, eta).unwrap();

        let mut rng = StdRng::seed_from_u64(0x5eed);
        let cdf: Vec<f64> = d
            .probs()
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let pulses = 1_000_000usize;
        let mut clicks = 0usize;
        for _ in 0..pulses {
            let u: f64 = rng.gen();
            let n = cdf.partition_point(|&c| c < u);
            let clicked = (0..n).any(|_| rng.gen::<f64>() < eta);
            if clicked {
                clicks += 1;
            }
        }
        let observed = clicks as f64 / pulses as f64;
        let se = (analytic * (1.0 - analytic) / pulses as f64).sqrt();
        assert!(
            (observed - analytic).abs() < 3.0 * se,
            "MC {observed} vs analytic {analytic} (3se = {:.2e})",
            3.0 * se
        );
    }

    #[test]
    fn detector_n_dead_floor() {
        let det = DetectorModel::new(0.46, 52.0, 8e7).unwrap();
        assert_eq!(det.n_dead(), 4);
        let det0 = DetectorModel::new(0.46, 1.0, 8e7).unwrap();
        assert_eq!(det0.n_dead(), 0);
    }

    #[test]
    fn dead_time_chain_from_measured_rate() {
        // Q_meas = 4.4e6 cnt/s at g = 8e7 → P_meas = 0.055 → P_corr = 0.0705
        let p_meas = 4.4e6 / 8e7;
        assert_relative_eq!(p_meas, 0.055, max_relative = 1e-12);
        let p_corr = dead_time_correct(p_meas, 4).unwrap();
        assert_relative_eq!(p_corr, 0.055 / (1.0 - 4.0 * 0.055), max_relative = 1e-12);
        assert!((p_corr - 0.071).abs() < 5e-4);
    }

    #[test]
    fn dead_time_identity_and_pole() {
        assert_relative_eq!(dead_time_correct(0.3, 0).unwrap(), 0.3);
        assert!(matches!(dead_time_correct(0.25, 4), Err(Error::Saturation(_))));
    }

    #[test]
    fn dead_time_round_trip() {
        for p in [0.01, 0.055, 0.1] {
            let corr = dead_time_correct(p, 4).unwrap();
            assert_relative_eq!(dead_time_apply(corr, 4), p, max_relative = 1e-12);
        }
    }

    #[test]
    fn invert_mu_at_paper_operating_point() {
        let mu1 = invert_mu(0.071, 0.46, 1).unwrap();
        assert!((mu1 - 0.22).abs() <= 0.005, "single mode mu = {mu1}");
        let mu100 = invert_mu(0.071, 0.46, 100).unwrap();
        assert!((mu100 - 0.21).abs() <= 0.005, "100 modes mu = {mu100}");
        assert!(mu100 < mu1);
    }

    #[test]
    fn invert_mu_round_trip() {
        for (mu, modes, eta) in [(0.1, 1, 0.46), (0.22, 100, 0.46), (2.0, 3, 0.7)] {
            let d = multimode_distribution_adaptive(mu, modes).unwrap();
            let p = click_probability(&d, eta).unwrap();
            let back = invert_mu(p, eta, modes).unwrap();
            assert_relative_eq!(back, mu, max_relative = 1e-6);
        }
    }

    #[test]
    fn invert_mu_unreachable_probability() {
        // With any dead-time-corrected probability this close to 1 the
        // solver bracket cannot reach it at low efficiency.
        let err = invert_mu(0.999999, 0.01, 1).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)), "{err}");
    }

    #[test]
    fn extrapolation_on_exact_line() {
        let points = [(50.0, 0.22), (75.0, 0.33), (100.0, 0.44)];
        let mu = extrapolate_mu(&points, 30_000.0).unwrap();
        assert_relative_eq!(mu, 132.0, max_relative = 1e-9);
    }

    #[test]
    fn extrapolation_rejects_degenerate_powers() {
        assert!(extrapolate_mu(&[(50.0, 0.2), (50.0, 0.3)], 100.0).is_err());
        assert!(extrapolate_mu(&[(50.0, 0.2)], 100.0).is_err());
    }

    #[test]
    fn sample_loss_scaling_matches_paper() {
        // 147 photons/pulse at the crystal, 24% path loss → ≈112 at the sample
        let mu_sample: f64 = 147.0 * (1.0 - 0.24);
        assert!((mu_sample - 112.0).abs() < 0.8);
    }

    proptest! {
        #[test]
        fn click_probability_increases_with_mu(
            mu1 in 0.01f64..2.0, dmu in 0.05f64..2.0, eta in 0.05f64..1.0
        ) {
            let a = click_probability(&smsv_distribution_adaptive(mu1).unwrap(), eta).unwrap();
            let b = click_probability(&smsv_distribution_adaptive(mu1 + dmu).unwrap(), eta).unwrap();
            prop_assert!(b > a);
        }

        #[test]
        fn click_probability_increases_with_eta(
            mu in 0.01f64..5.0, eta in 0.05f64..0.9, deta in 0.01f64..0.1
        ) {
            let d = smsv_distribution_adaptive(mu).unwrap();
            let a = click_probability(&d, eta).unwrap();
            let b = click_probability(&d, eta + deta).unwrap();
            prop_assert!(b > a);
        }

        #[test]
        fn multimode_mean_is_mu(mu in 0.01f64..5.0, modes in 1u32..40) {
            let d = multimode_distribution_adaptive(mu, modes).unwrap();
            prop_assert!((d.sample_mean() - mu).abs() / mu < 1e-6);
        }

        #[test]
        fn dead_time_inverse_pair(p in 0.0001f64..0.19, n_dead in 0u32..5) {
            let corr = dead_time_correct(p, n_dead).unwrap();
            let back = dead_time_apply(corr, n_dead);
            prop_assert!((back - p).abs() < 1e-12);
        }
    }
}
