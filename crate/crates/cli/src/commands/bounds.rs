//! `bounds`: per-sample entangled cross-section upper bounds, probabilistic
//! estimates, quantum-advantage bounds and fluorescence diagonals.

use std::path::PathBuf;

use clap::Args;
use e2pa_core::optics::peak_flux_cm2_s;
use e2pa_core::units::CM2_PER_UM2;
use e2pa_core::xsection::{
    e2pef_diagonal, expected_e2pef, quantum_advantage_ub, sigma_e_estimate, sigma_e_upper_bound,
    E2paBound, EntanglementParams,
};
use e2pa_core::UncertainValue;

use crate::config;
use crate::error::{CliError, Result};
use crate::report::Report;

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Write one machine-readable record per sample to this CSV file.
    #[arg(long)]
    pub records_csv: Option<PathBuf>,
    /// Write a fluorescence-vs-photon-number diagonal table per sample
    /// (at the sample's cross-section upper bound) into this directory.
    #[arg(long)]
    pub diagonals_dir: Option<PathBuf>,
}

pub fn run(args: &BoundsArgs) -> Result<()> {
    let cfg = config::load(&args.config)?;
    let mut report = Report::new("bounds");
    report.input("config", args.config.display());
    report.input_sci("f_lb_cps", cfg.apparatus.f_lb_cps);
    report.input("path_transmittance", cfg.apparatus.path_transmittance);
    if let Some(q) = cfg.apparatus.photon_rate_per_s {
        report.input_sci("photon_rate_q_per_s", q);
    }
    let entanglement = match &cfg.entanglement {
        Some(e) => {
            report.input("te_fs", e.te_fs);
            report.input("ae_um2", e.ae_um2);
            let bracket = e.ae_max_um2.map(|hi| {
                report.input("ae_max_um2", hi);
                (e.ae_um2 * CM2_PER_UM2, hi * CM2_PER_UM2)
            });
            Some(EntanglementParams::new(e.te_fs, e.ae_um2 * CM2_PER_UM2, bracket)?)
        }
        None => None,
    };

    let phi_spdc = peak_flux_cm2_s(&cfg.beam_spdc, 0.0).ok();
    if let Some(phi) = phi_spdc {
        report.input_sci("peak_flux_spdc_cm2_s", phi);
    }

    let mut records = vec![
        "sample,sigma_e_ub_cm2,sigma_e_est_cm2,qa_ub,expected_f_e_lit_cps".to_string(),
    ];
    if cfg.samples.is_empty() {
        report.line("no samples configured".to_string());
    }
    for entry in &cfg.samples {
        let sample = &entry.spec;
        report.line(format!("[sample.{}]", sample.name));
        report.line(format!(
            "  inputs: c = {:.4e} mol/L, yield = {}, overlap_ratio = {}, sigma_c_gm = {}",
            sample.concentration_mol_per_l,
            sample.quantum_yield,
            sample.spectral_overlap_ratio,
            sample.sigma_c_gm.map_or("none".to_string(), |v| format!("{v}")),
        ));
        let mut rec = vec![sample.name.clone()];

        // assemble the three bound quantities; each may fail or be skipped
        // without stopping the run
        let ub = sigma_e_upper_bound(sample, &cfg.apparatus);
        let est = match (entanglement.as_ref(), sample.sigma_c_gm) {
            (Some(ent), Some(sigma_c)) => Some(sigma_e_estimate(sigma_c, ent.te_fs, ent.ae_cm2)?),
            _ => None,
        };
        let qa = match (sample.sigma_c_gm, phi_spdc) {
            (Some(_), Some(phi)) => {
                Some(quantum_advantage_ub(sample, &cfg.apparatus, &cfg.beam_laser, phi))
            }
            _ => None,
        };

        match ub {
            Ok(ub) => {
                let bound = E2paBound::new(
                    UncertainValue::exact(ub),
                    est,
                    qa.as_ref().and_then(|q| q.as_ref().ok()).map(|&q| UncertainValue::exact(q)),
                )?;
                report.line(format!("  sigma_e_ub_cm2 = {:.3e}", bound.sigma_e_ub.value));
                rec.push(format!("{:.9e}", bound.sigma_e_ub.value));

                if let Some(dir) = &args.diagonals_dir {
                    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                    let mus: Vec<f64> =
                        (0..=50).map(|i| 10f64.powf(-2.0 + 5.0 * i as f64 / 50.0)).collect();
                    let pts = e2pef_diagonal(ub, sample, &cfg.apparatus, &cfg.beam_spdc, &mus)?;
                    let mut out = String::from("mu,peak_flux_cm2_s,f_e_cps\n");
                    for p in pts {
                        out.push_str(&format!(
                            "{:.6e},{:.6e},{:.6e}\n",
                            p.mu, p.peak_flux_cm2_s, p.f_e_cps
                        ));
                    }
                    let path = dir.join(format!("diagonal_{}.csv", sample.name));
                    std::fs::write(&path, out).map_err(|e| CliError::io(&path, e))?;
                    report.line(format!("  wrote_diagonal = {}", path.display()));
                }
            }
            Err(e) => {
                report.line(format!("  sigma_e_ub_failed = {e}"));
                rec.push(String::new());
            }
        }

        match est {
            Some(est) => {
                report.line(format!("  sigma_e_est_cm2 = {est:.3e}"));
                rec.push(format!("{est:.9e}"));
            }
            None if entanglement.is_none() => {
                report.line("  sigma_e_est skipped: no [entanglement] section".to_string());
                rec.push(String::new());
            }
            None => {
                report.line("  sigma_e_est skipped: sample has no sigma_c_gm".to_string());
                rec.push(String::new());
            }
        }

        match qa {
            Some(Ok(qa)) => {
                report.line(format!("  qa_ub = {qa:.0}"));
                rec.push(format!("{qa:.6e}"));
            }
            Some(Err(e)) => {
                report.line(format!("  qa_ub_failed = {e}"));
                rec.push(String::new());
            }
            None if sample.sigma_c_gm.is_none() => {
                report.line("  qa_ub skipped: sample has no sigma_c_gm".to_string());
                rec.push(String::new());
            }
            None => {
                report.line("  qa_ub skipped: no entangled photon rate configured".to_string());
                rec.push(String::new());
            }
        }

        if let Some(lit) = entry.sigma_e_lit_cm2 {
            let f_e = expected_e2pef(lit, sample, &cfg.apparatus)?;
            report.line(format!("  expected_f_e_at_lit_cps = {f_e:.3e}"));
            rec.push(format!("{f_e:.9e}"));
        } else {
            rec.push(String::new());
        }
        records.push(rec.join(","));
        report.blank();
    }

    if let Some(path) = &args.records_csv {
        std::fs::write(path, records.join("\n") + "\n").map_err(|e| CliError::io(path, e))?;
        report.line(format!("wrote_records = {}", path.display()));
    }
    report.print();
    Ok(())
}
