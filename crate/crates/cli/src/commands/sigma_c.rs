//! `sigma-c`: classical cross-section from a fitted quadratic slope.

use std::path::PathBuf;

use clap::Args;
use e2pa_core::xsection::extract_sigma_c;
use e2pa_core::UncertainValue;

use crate::config;
use crate::error::Result;
use crate::report::Report;

#[derive(Debug, Args)]
pub struct SigmaCArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Sample name (matching a [sample.NAME] section).
    #[arg(long)]
    pub sample: String,
    /// Fitted quadratic slope F/W², counts·s⁻¹·µW⁻².
    #[arg(long)]
    pub slope_cps_per_uw2: f64,
    /// Relative standard uncertainty of the slope.
    #[arg(long, default_value_t = 0.0)]
    pub slope_rel_unc: f64,
    /// Exponent of the free power-law fit, for the acceptance gate.
    #[arg(long, default_value_t = 2.0)]
    pub exponent: f64,
}

pub fn run(args: &SigmaCArgs) -> Result<()> {
    let cfg = config::load(&args.config)?;
    let entry = cfg.sample(&args.sample)?;

    let mut report = Report::new("sigma-c");
    report.input("config", args.config.display());
    report.input("sample", &args.sample);
    report.input_sci("slope_cps_per_uw2", args.slope_cps_per_uw2);
    report.input("slope_rel_unc", args.slope_rel_unc);
    report.input("fit_exponent", args.exponent);

    let slope = UncertainValue::from_relative(args.slope_cps_per_uw2, args.slope_rel_unc, 2.0)?;
    let mut result = extract_sigma_c(slope, &entry.spec, &cfg.apparatus, &cfg.beam_laser)?;
    result.fit_exponent = args.exponent;

    report.line(format!("sigma_c_gm = {:.4e}", result.sigma_c_gm.value));
    report.line(format!("sigma_c_expanded_unc_gm = {:.4e}", result.sigma_c_gm.expanded()));
    report.line(format!("quadratic_gate_accepted = {}", result.accepted_quadratic()));
    report.print();
    Ok(())
}
