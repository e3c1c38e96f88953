//! `te`: entanglement time, marginal pulse widths and the coincidence-ratio
//! table from a measured or synthesized joint spectrum.

use std::path::PathBuf;

use clap::Args;
use e2pa_core::jsi::{
    coincidence_ratio, entanglement_time_fs, marginal_pulse_fwhm_fs, synthesize_gaussian_jsi,
    transform_with_padding, DispersionSpec, GridSpec, JointAxis, JointSpectrum,
};

use crate::error::Result;
use crate::io;
use crate::report::Report;

#[derive(Debug, Args)]
pub struct TeArgs {
    /// Joint-spectral-intensity grid file; synthesized when absent.
    #[arg(long)]
    pub jsi: Option<PathBuf>,
    /// Degenerate center wavelength, nm.
    #[arg(long, default_value_t = 810.0)]
    pub center_nm: f64,
    /// Group delay dispersion per photon, fs².
    #[arg(long, default_value_t = 3700.0)]
    pub beta_fs2: f64,
    /// Synthesized signal-marginal FWHM, nm.
    #[arg(long, default_value_t = 76.0)]
    pub fwhm_s_nm: f64,
    /// Synthesized idler-marginal FWHM, nm.
    #[arg(long, default_value_t = 76.0)]
    pub fwhm_i_nm: f64,
    /// Frequency anticorrelation of the synthesized spectrum, in [0, 1].
    #[arg(long, default_value_t = 0.9998)]
    pub anticorrelation: f64,
    /// Grid points per axis (synthesis or resampling).
    #[arg(long, default_value_t = 1024)]
    pub grid_points: usize,
    /// Synthesized grid half-extent in marginal FWHMs.
    #[arg(long, default_value_t = 3.5)]
    pub span_fwhms: f64,
    /// Zero-padding factor before the transform.
    #[arg(long, default_value_t = 2)]
    pub pad_factor: usize,
    /// Write the dispersed joint temporal intensity to this grid file.
    #[arg(long)]
    pub out_jti: Option<PathBuf>,
    /// Write the (synthesized or resampled) joint spectral intensity back
    /// out as a wavelength grid file.
    #[arg(long)]
    pub out_jsi: Option<PathBuf>,
}

pub fn run(args: &TeArgs) -> Result<()> {
    let mut report = Report::new("te");
    report.input("beta_fs2", args.beta_fs2);
    report.input("center_nm", args.center_nm);
    report.input("grid_points", args.grid_points);
    report.input("pad_factor", args.pad_factor);

    let jsi: JointSpectrum = match &args.jsi {
        Some(path) => {
            report.input("jsi_file", path.display());
            let grid = io::read_jsi_grid(path)?;
            grid.to_frequency(args.center_nm, args.grid_points)?
        }
        None => {
            report.input("synthesized_fwhm_s_nm", args.fwhm_s_nm);
            report.input("synthesized_fwhm_i_nm", args.fwhm_i_nm);
            report.input("anticorrelation", args.anticorrelation);
            report.input("span_fwhms", args.span_fwhms);
            synthesize_gaussian_jsi(
                args.center_nm,
                args.fwhm_s_nm,
                args.fwhm_i_nm,
                args.anticorrelation,
                GridSpec { points: args.grid_points, span_fwhms: args.span_fwhms },
            )?
        }
    };

    let dispersed =
        transform_with_padding(&jsi, &DispersionSpec::new(args.beta_fs2)?, args.pad_factor)?;
    let limited =
        transform_with_padding(&jsi, &DispersionSpec::transform_limited(), args.pad_factor)?;

    let te = entanglement_time_fs(&dispersed)?;
    let te0 = entanglement_time_fs(&limited)?;
    let tau_s = marginal_pulse_fwhm_fs(&dispersed, JointAxis::Signal)?;
    let tau_i = marginal_pulse_fwhm_fs(&dispersed, JointAxis::Idler)?;
    let mass_ratio = dispersed.total_mass() / jsi.total_mass()?;

    report.line(format!("entanglement_time_fs = {te:.1}"));
    report.line(format!("entanglement_time_transform_limited_fs = {te0:.2}"));
    report.line(format!("marginal_pulse_fwhm_signal_fs = {tau_s:.1}"));
    report.line(format!("marginal_pulse_fwhm_idler_fs = {tau_i:.1}"));
    report.line(format!("parseval_mass_ratio = {mass_ratio:.9}"));
    report.blank();

    report.line("coincidence ratio (transform-limited over dispersed)".to_string());
    report.line("delta_t_fs,ratio".to_string());
    let dt = dispersed.grid_spacing();
    let mut window = dt;
    let t_max = dispersed.t_s.last().copied().unwrap_or(0.0);
    while window <= 2.0 * t_max {
        let r = coincidence_ratio(&limited, &dispersed, window)?;
        report.line(format!("{window:.2},{r:.3}"));
        window *= 2.0;
    }

    if args.out_jti.is_some() || args.out_jsi.is_some() {
        report.blank();
    }
    if let Some(path) = &args.out_jti {
        io::write_jti_grid(path, &dispersed)?;
        report.line(format!("wrote_jti = {}", path.display()));
    }
    if let Some(path) = &args.out_jsi {
        io::write_jsi_grid(path, &jsi.to_wavelength_grid()?)?;
        report.line(format!("wrote_jsi = {}", path.display()));
    }
    report.print();
    Ok(())
}
