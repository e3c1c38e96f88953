//! `fit`: background-subtract a set of series files, fit the power law,
//! gate on the quadratic exponent and extract the classical cross-section.

use std::path::{Path, PathBuf};

use clap::Args;
use e2pa_core::stats::{background_subtract, fit_power_law, quadratic_slope};
use e2pa_core::units::W_PER_UW;
use e2pa_core::xsection::extract_sigma_c;

use crate::config;
use crate::error::{CliError, Result};
use crate::io;
use crate::report::Report;

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Sample name (matching a [sample.NAME] section).
    #[arg(long)]
    pub sample: String,
    /// Series files named `..._W<power>uW.csv`; a single argument may
    /// contain one `*` wildcard.
    #[arg(required = true)]
    pub series: Vec<String>,
}

/// Power encoded in the series filename, `..._W<value>uW.csv`.
fn power_from_name(path: &Path) -> Result<f64> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let start = name.rfind("_W").ok_or_else(|| {
        CliError::Config(format!("cannot read the power from '{name}': no '_W<power>uW' tag"))
    })?;
    let rest = &name[start + 2..];
    let end = rest.find("uW").ok_or_else(|| {
        CliError::Config(format!("cannot read the power from '{name}': no 'uW' suffix"))
    })?;
    rest[..end].parse::<f64>().map_err(|_| {
        CliError::Config(format!("cannot read the power from '{name}': '{}'", &rest[..end]))
    })
}

/// Expands a single `*` wildcard against the containing directory.
fn expand(pattern: &str) -> Result<Vec<PathBuf>> {
    if !pattern.contains('*') {
        return Ok(vec![PathBuf::from(pattern)]);
    }
    let path = Path::new(pattern);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::Config(format!("bad pattern '{pattern}'")))?;
    let (prefix, suffix) = name.split_once('*').ok_or_else(|| {
        CliError::Config(format!("wildcard must be in the file name: '{pattern}'"))
    })?;
    if suffix.contains('*') {
        return Err(CliError::Config(format!("only one '*' is supported: '{pattern}'")));
    }
    let mut matches: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with(prefix) && n.ends_with(suffix) && n.len() >= prefix.len() + suffix.len())
                .unwrap_or(false)
        })
        .collect();
    matches.sort();
    if matches.is_empty() {
        return Err(CliError::Config(format!("pattern '{pattern}' matched no files")));
    }
    Ok(matches)
}

pub fn run(args: &FitArgs) -> Result<()> {
    let cfg = config::load(&args.config)?;
    let entry = cfg.sample(&args.sample)?;

    let mut files = Vec::new();
    for pattern in &args.series {
        files.extend(expand(pattern)?);
    }

    let mut report = Report::new("fit");
    report.input("config", args.config.display());
    report.input("sample", &args.sample);
    report.input("series_files", files.len());

    let mut points = Vec::new();
    report.line("power_uW,rate_cps,sigma_cps,discarded_fraction".to_string());
    for path in &files {
        let series = io::read_count_series(path)?;
        let sub = background_subtract(&series, None)?;
        let power = power_from_name(path)?;
        report.line(format!(
            "{power},{:.6e},{:.6e},{:.4}",
            sub.rate_cps, sub.poisson_sigma_cps, sub.discarded_fraction
        ));
        points.push((power, sub.rate_cps, sub.poisson_sigma_cps));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let fit = fit_power_law(&points)?;
    report.blank();
    report.line(format!("fit_amplitude_cps_per_uw_b = {:.6e}", fit.amplitude));
    report.line(format!("fit_exponent = {:.4}", fit.exponent));
    report.line(format!("fit_exponent_std = {:.4}", fit.exponent_std()));
    report.line(format!("quadratic_gate_accepted = {}", fit.accepted_quadratic));
    if !fit.excluded.is_empty() {
        report.line(format!("excluded_points = {:?}", fit.excluded));
    }

    let slope = quadratic_slope(&points)?;
    report.line(format!(
        "quadratic_slope_cps_per_uw2 = {:.6e} +- {:.3e}",
        slope.value, slope.std_uncertainty
    ));

    let mut result = extract_sigma_c(slope, &entry.spec, &cfg.apparatus, &cfg.beam_laser)?;
    result.fit_exponent = fit.exponent;
    report.blank();
    report.line(format!("sigma_c_gm = {:.4e}", result.sigma_c_gm.value));
    report.line(format!("sigma_c_expanded_unc_gm = {:.4e}", result.sigma_c_gm.expanded()));
    let slope_w2 = slope.value / (W_PER_UW * W_PER_UW);
    report.line(format!("quadratic_slope_cps_per_w2 = {slope_w2:.6e}"));
    report.print();
    Ok(())
}
