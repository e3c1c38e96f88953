//! `allan`: stability analysis of a count series — Allan deviation as a
//! function of integration time, to pick the optimal averaging duration.

use std::path::PathBuf;

use clap::Args;
use e2pa_core::stats::{allan_deviation, ChopperPhase};

use crate::error::{CliError, Result};
use crate::io;
use crate::report::Report;

#[derive(Debug, Args)]
pub struct AllanArgs {
    /// Count-series file (uniform bins).
    #[arg(long)]
    pub series: PathBuf,
    /// Integration times to evaluate, s (comma separated). Defaults to a
    /// doubling ladder from the bin duration to half the record.
    #[arg(long, value_delimiter = ',')]
    pub taus_s: Vec<f64>,
}

pub fn run(args: &AllanArgs) -> Result<()> {
    let series = io::read_count_series(&args.series)?;
    let tau0 = series.bin_duration(0);

    // Use the chopper-open bins when both phases are present, otherwise the
    // whole record (a plain stability run has a single phase).
    let has_background = series.phases.contains(&ChopperPhase::Background);
    let rates: Vec<f64> = (0..series.len())
        .filter(|&i| !has_background || series.phases[i] == ChopperPhase::Signal)
        .map(|i| series.counts[i] as f64 / series.bin_duration(i))
        .collect();
    if rates.len() < 4 {
        return Err(CliError::Config(format!(
            "{}: too few usable bins for a stability analysis",
            args.series.display()
        )));
    }

    let taus: Vec<f64> = if args.taus_s.is_empty() {
        let mut t = tau0;
        let mut ladder = Vec::new();
        while t <= 0.5 * tau0 * rates.len() as f64 {
            ladder.push(t);
            t *= 2.0;
        }
        ladder
    } else {
        args.taus_s.clone()
    };

    let result = allan_deviation(&rates, tau0, &taus)?;

    let mut report = Report::new("allan");
    report.input("series", args.series.display());
    report.input("bin_duration_s", tau0);
    report.input("usable_bins", rates.len());
    report.line("tau_s,allan_deviation_cps".to_string());
    for (tau, dev) in &result.points {
        report.line(format!("{tau:.3},{dev:.6e}"));
    }
    if let Some((best_tau, best_dev)) = result
        .points
        .iter()
        .copied()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
    {
        report.blank();
        report.line(format!("minimum_at_tau_s = {best_tau:.3}"));
        report.line(format!("minimum_deviation_cps = {best_dev:.6e}"));
    }
    for tau in &result.dropped {
        report.line(format!("dropped_tau_s = {tau} (longer than half the record)"));
    }
    report.print();
    Ok(())
}
