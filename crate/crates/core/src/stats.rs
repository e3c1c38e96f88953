//! Chopper background subtraction, power-law fitting, Allan-deviation
//! stability analysis, the error-bar policy and first-order uncertainty
//! propagation.

use crate::error::{Error, Result};
use crate::types::UncertainValue;

/// Chopper state during one histogram bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChopperPhase {
    /// Beam passing: fluorescence plus background.
    Signal,
    /// Beam blocked: background only.
    Background,
    /// Blade edge crossing the beam; discarded.
    Transition,
}

impl ChopperPhase {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChopperPhase::Signal => "signal",
            ChopperPhase::Background => "background",
            ChopperPhase::Transition => "transition",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "signal" => Ok(ChopperPhase::Signal),
            "background" => Ok(ChopperPhase::Background),
            "transition" => Ok(ChopperPhase::Transition),
            other => Err(Error::Domain(format!("unknown chopper phase label '{other}'"))),
        }
    }
}

/// Binned detector counts with a chopper-phase label per bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    /// Bin boundaries in seconds, length = counts + 1, strictly ascending.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub phases: Vec<ChopperPhase>,
}

impl CountSeries {
    pub fn new(bin_edges: Vec<f64>, counts: Vec<u64>, phases: Vec<ChopperPhase>) -> Result<Self> {
        if bin_edges.len() != counts.len() + 1 || counts.len() != phases.len() {
            return Err(Error::Grid(format!(
                "count series needs edges = counts + 1 = phases + 1; got {} edges, {} counts, {} phases",
                bin_edges.len(),
                counts.len(),
                phases.len()
            )));
        }
        if counts.is_empty() {
            return Err(Error::Grid("count series is empty".into()));
        }
        if !bin_edges.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Grid("bin edges must be strictly ascending".into()));
        }
        Ok(Self { bin_edges, counts, phases })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn bin_duration(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    /// Total counts and live time in bins of the given phase.
    pub fn phase_totals(&self, phase: ChopperPhase) -> (u64, f64) {
        let mut counts = 0u64;
        let mut time = 0.0;
        for i in 0..self.len() {
            if self.phases[i] == phase {
                counts += self.counts[i];
                time += self.bin_duration(i);
            }
        }
        (counts, time)
    }
}

/// Background-subtracted rate with its Poisson uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractedRate {
    pub rate_cps: f64,
    pub poisson_sigma_cps: f64,
    pub signal_counts: u64,
    pub signal_live_s: f64,
    pub background_counts: u64,
    pub background_live_s: f64,
    /// Runtime fraction discarded as transition.
    pub discarded_fraction: f64,
}

/// Subtracts the chopper-closed background from the chopper-open signal:
/// rate = S/t_S − B/t_B with Poisson σ = √(S/t_S² + B/t_B²).
///
/// Bins labeled `Transition` are discarded. If the series carries no
/// transition labels at all (a raw import), bins whose rate falls between
/// 20% and 80% of the way from the closed-phase mean to the open-phase mean
/// are treated as blade-edge bins and discarded; `transition_fraction`
/// (default 0.05) is the runtime fraction the acquisition is expected to
/// lose that way and is only validated, not enforced.
pub fn background_subtract(
    series: &CountSeries,
    transition_fraction: Option<f64>,
) -> Result<SubtractedRate> {
    let expected_fraction = transition_fraction.unwrap_or(0.05);
    if !(0.0..0.5).contains(&expected_fraction) {
        return Err(Error::Domain(format!(
            "transition fraction must be in [0, 0.5), got {expected_fraction}"
        )));
    }

    let has_transition_labels = series.phases.contains(&ChopperPhase::Transition);
    let mut effective = series.phases.clone();
    if !has_transition_labels && expected_fraction > 0.0 {
        mark_edge_bins(series, &mut effective);
    }

    let mut sums = [(0u64, 0.0f64); 2]; // signal, background
    let mut discarded_time = 0.0;
    let total_time = *series.bin_edges.last().unwrap() - series.bin_edges[0];
    for (i, phase) in effective.iter().enumerate() {
        match phase {
            ChopperPhase::Signal => {
                sums[0].0 += series.counts[i];
                sums[0].1 += series.bin_duration(i);
            }
            ChopperPhase::Background => {
                sums[1].0 += series.counts[i];
                sums[1].1 += series.bin_duration(i);
            }
            ChopperPhase::Transition => discarded_time += series.bin_duration(i),
        }
    }
    let [(s, t_s), (b, t_b)] = sums;
    if t_s == 0.0 {
        return Err(Error::Domain("series has no usable signal bins".into()));
    }
    if t_b == 0.0 {
        return Err(Error::Domain("series has no usable background bins".into()));
    }
    let rate = s as f64 / t_s - b as f64 / t_b;
    let sigma = (s as f64 / (t_s * t_s) + b as f64 / (t_b * t_b)).sqrt();
    Ok(SubtractedRate {
        rate_cps: rate,
        poisson_sigma_cps: sigma,
        signal_counts: s,
        signal_live_s: t_s,
        background_counts: b,
        background_live_s: t_b,
        discarded_fraction: discarded_time / total_time,
    })
}

/// Rate-threshold heuristic for unlabeled imports: bins between 20% and 80%
/// of the open-phase excess rate are blade-edge bins.
fn mark_edge_bins(series: &CountSeries, effective: &mut [ChopperPhase]) {
    let mean_rate = |phase: ChopperPhase| -> Option<f64> {
        let (c, t) = series.phase_totals(phase);
        (t > 0.0).then(|| c as f64 / t)
    };
    let (Some(open), Some(closed)) = (mean_rate(ChopperPhase::Signal), mean_rate(ChopperPhase::Background))
    else {
        return;
    };
    if open <= closed {
        return;
    }
    let lo = closed + 0.2 * (open - closed);
    let hi = closed + 0.8 * (open - closed);
    for (i, slot) in effective.iter_mut().enumerate() {
        let rate = series.counts[i] as f64 / series.bin_duration(i);
        if rate > lo && rate < hi {
            *slot = ChopperPhase::Transition;
        }
    }
}

/// Weighted power-law fit F = a·W^b in log-log space.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    /// Amplitude, counts·s⁻¹·µW⁻ᵇ.
    pub amplitude: f64,
    pub exponent: f64,
    /// Covariance of (ln a, b).
    pub covariance: [[f64; 2]; 2],
    /// Standardized log-space residuals of the points used.
    pub residuals: Vec<f64>,
    /// Indices of input points excluded for non-positive rate or sigma.
    pub excluded: Vec<usize>,
    /// True when the exponent sits in the accepted quadratic window
    /// [1.95, 2.05].
    pub accepted_quadratic: bool,
}

impl PowerLawFit {
    pub fn exponent_std(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }

    pub fn amplitude_std(&self) -> f64 {
        self.amplitude * self.covariance[0][0].sqrt()
    }
}

pub const QUADRATIC_EXPONENT_WINDOW: (f64, f64) = (1.95, 2.05);

/// Fits rate = a·W^b by weighted least squares of ln rate against ln W,
/// with weights (rate/σ)². Points with non-positive rate or σ are excluded;
/// fewer than 3 usable points is an error.
pub fn fit_power_law(points: &[(f64, f64, f64)]) -> Result<PowerLawFit> {
    let mut excluded = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for (i, &(power, rate, sigma)) in points.iter().enumerate() {
        if !(power > 0.0) {
            return Err(Error::Domain(format!("power must be positive, got {power} uW")));
        }
        if rate > 0.0 && sigma > 0.0 {
            xs.push(power.ln());
            ys.push(rate.ln());
            ws.push((rate / sigma) * (rate / sigma));
        } else {
            excluded.push(i);
        }
    }
    if xs.len() < 3 {
        return Err(Error::SingularFit(format!(
            "power-law fit needs at least 3 usable points, got {} ({} excluded)",
            xs.len(),
            excluded.len()
        )));
    }
    let sw: f64 = ws.iter().sum();
    let swx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x).sum();
    let swxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x * x).sum();
    let swy: f64 = ws.iter().zip(&ys).map(|(w, y)| w * y).sum();
    let swxy: f64 = ws.iter().zip(&xs).zip(&ys).map(|((w, x), y)| w * x * y).sum();
    let det = sw * swxx - swx * swx;
    if det <= 1e-12 * sw * swxx.max(1e-300) {
        return Err(Error::SingularFit(
            "all usable points share one power; the exponent is undetermined".into(),
        ));
    }
    let ln_a = (swxx * swy - swx * swxy) / det;
    let b = (sw * swxy - swx * swy) / det;
    let covariance = [[swxx / det, -swx / det], [-swx / det, sw / det]];
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .zip(&ws)
        .map(|((x, y), w)| (y - (ln_a + b * x)) * w.sqrt())
        .collect();
    Ok(PowerLawFit {
        amplitude: ln_a.exp(),
        exponent: b,
        covariance,
        residuals,
        excluded,
        accepted_quadratic: (QUADRATIC_EXPONENT_WINDOW.0..=QUADRATIC_EXPONENT_WINDOW.1).contains(&b),
    })
}

/// Weighted one-parameter fit of rate = a·W², returning the slope a with
/// its standard uncertainty. This is the F/W² slope the cross-section
/// extraction consumes once the free-exponent fit has passed the quadratic
/// acceptance gate.
pub fn quadratic_slope(points: &[(f64, f64, f64)]) -> Result<UncertainValue> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut usable = 0usize;
    for &(power, rate, sigma) in points {
        if !(power > 0.0) {
            return Err(Error::Domain(format!("power must be positive, got {power} uW")));
        }
        if sigma > 0.0 {
            let w = 1.0 / (sigma * sigma);
            let w2 = power * power;
            num += w * rate * w2;
            den += w * w2 * w2;
            usable += 1;
        }
    }
    if usable == 0 || den <= 0.0 {
        return Err(Error::SingularFit("no usable points for the quadratic slope".into()));
    }
    UncertainValue::new(num / den, (1.0 / den).sqrt(), 2.0)
}

/// Error-bar policy: the larger of the scatter of repeated measurements
/// (standard deviation of the mean) and the Poisson uncertainty of the
/// pooled counts, multiplied by the coverage factor.
pub fn error_bar(
    measurements_cps: &[f64],
    total_counts: u64,
    live_time_s: f64,
    coverage_k: f64,
) -> Result<f64> {
    if measurements_cps.is_empty() {
        return Err(Error::Domain("error bar needs at least one measurement".into()));
    }
    if !(live_time_s > 0.0) {
        return Err(Error::Domain(format!("live time must be positive, got {live_time_s}")));
    }
    let n = measurements_cps.len() as f64;
    let mean = measurements_cps.iter().sum::<f64>() / n;
    let scatter = if measurements_cps.len() > 1 {
        let var =
            measurements_cps.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let poisson = (total_counts as f64).sqrt() / live_time_s;
    Ok(scatter.max(poisson) * coverage_k)
}

/// Allan deviations at the requested integration times.
#[derive(Debug, Clone, PartialEq)]
pub struct AllanResult {
    /// (realized tau, deviation) pairs, ascending in tau.
    pub points: Vec<(f64, f64)>,
    /// Requested taus dropped because they exceed half the record.
    pub dropped: Vec<f64>,
}

/// Non-overlapping Allan deviation σ_A(τ) = √(½⟨(ȳ_{k+1} − ȳ_k)²⟩) of an
/// evenly spaced rate series with sample spacing `tau0_s`.
pub fn allan_deviation(rates: &[f64], tau0_s: f64, taus_s: &[f64]) -> Result<AllanResult> {
    if !(tau0_s > 0.0) {
        return Err(Error::Domain(format!("sample spacing must be positive, got {tau0_s}")));
    }
    if rates.len() < 2 {
        return Err(Error::Domain("Allan deviation needs at least two samples".into()));
    }
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for &tau in taus_s {
        let m = ((tau / tau0_s).round() as usize).max(1);
        let clusters = rates.len() / m;
        if clusters < 2 {
            dropped.push(tau);
            continue;
        }
        let means: Vec<f64> = (0..clusters)
            .map(|k| rates[k * m..(k + 1) * m].iter().sum::<f64>() / m as f64)
            .collect();
        let sq_sum: f64 = means.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
        let var = 0.5 * sq_sum / (clusters - 1) as f64;
        points.push((m as f64 * tau0_s, var.sqrt()));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    points.dedup_by(|a, b| a.0 == b.0);
    Ok(AllanResult { points, dropped })
}

/// First-order propagation through a product of powers: value = Π vᵢ^pᵢ
/// with relative variance Σ (pᵢ σᵢ/vᵢ)². The coverage factor is attached to
/// the result and applied once, at reporting time.
pub fn propagate(terms: &[(UncertainValue, f64)], coverage_k: f64) -> Result<UncertainValue> {
    let mut value = 1.0;
    let mut rel_var = 0.0;
    for (term, power) in terms {
        if *power == 0.0 {
            continue;
        }
        if term.value == 0.0 {
            return Err(Error::Singularity(format!(
                "cannot propagate through a zero value raised to power {power}"
            )));
        }
        value *= term.value.powf(*power);
        let rel = term.std_uncertainty / term.value.abs();
        rel_var += power * power * rel * rel;
    }
    UncertainValue::new(value, rel_var.sqrt() * value.abs(), coverage_k)
}
