//! `flux`: beam geometry and peak-photon-flux table for both excitation
//! arms, including the mean-photon-number conversion factors.

use std::path::PathBuf;

use clap::Args;
use e2pa_core::optics::{
    beam_fwhm_at_um, effective_area_cm2, mu_to_peak_flux_factor, peak_flux_cm2_s, BeamProfile,
    TransverseAxis,
};
use e2pa_core::units::W_PER_UW;

use crate::config;
use crate::error::Result;
use crate::report::Report;

#[derive(Debug, Args)]
pub struct FluxArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Mean photon number per pulse for the entangled arm (otherwise the
    /// configured photon rate is used).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Average laser power for the classical arm, µW.
    #[arg(long)]
    pub power_uw: Option<f64>,
}

fn beam_block(report: &mut Report, label: &str, beam: &BeamProfile) {
    report.line(format!("[{label}]"));
    report.line(format!(
        "  focus_fwhm_um = {:.1} x {:.1}",
        beam_fwhm_at_um(beam, 0.0, TransverseAxis::X),
        beam_fwhm_at_um(beam, 0.0, TransverseAxis::Y)
    ));
    report.line(format!("  effective_area_cm2 = {:.4e}", effective_area_cm2(beam, 0.0)));
    report.line(format!("  mu_to_peak_flux = {:.4e}", mu_to_peak_flux_factor(beam)));
    if let Ok(q) = beam.photon_rate() {
        report.line(format!("  photon_rate_per_s = {q:.4e}"));
        if let Ok(phi) = peak_flux_cm2_s(beam, 0.0) {
            report.line(format!("  peak_flux_cm2_s = {phi:.4e}"));
        }
    }
}

pub fn run(args: &FluxArgs) -> Result<()> {
    let cfg = config::load(&args.config)?;
    let mut report = Report::new("flux");
    report.input("config", args.config.display());

    let mut spdc = cfg.beam_spdc.clone();
    if let Some(mu) = args.mu {
        report.input("mu", mu);
        spdc.photon_rate_per_s = Some(mu * spdc.rep_rate_hz);
        spdc.avg_power_w = None;
    }
    let mut laser = cfg.beam_laser.clone();
    if let Some(p_uw) = args.power_uw {
        report.input("power_uw", p_uw);
        laser = laser.with_power_w(p_uw * W_PER_UW)?;
    }

    beam_block(&mut report, "beam.laser", &laser);
    report.blank();
    beam_block(&mut report, "beam.spdc", &spdc);
    report.blank();
    let ratio = mu_to_peak_flux_factor(&laser) / mu_to_peak_flux_factor(&spdc);
    report.line(format!("conversion_ratio_laser_over_spdc = {ratio:.3}"));
    report.print();
    Ok(())
}
