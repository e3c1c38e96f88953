//! `mu`: mean photon number from a measured count rate — per-pulse click
//! probability, dead-time correction, photon-statistics inversion, and the
//! linear extrapolation to an operating pump power.

use clap::Args;
use e2pa_core::photon_stats::{dead_time_correct, extrapolate_mu, invert_mu, DetectorModel};

use crate::error::{CliError, Result};
use crate::report::Report;

#[derive(Debug, Args)]
pub struct MuArgs {
    /// Single measured count rate, counts·s⁻¹.
    #[arg(long, conflicts_with = "point")]
    pub rate_cps: Option<f64>,
    /// Calibration point `pump_uW:rate_cps`; repeat for the power series.
    #[arg(long)]
    pub point: Vec<String>,
    /// Extrapolation target pump power, µW (needs at least two points).
    #[arg(long)]
    pub target_uw: Option<f64>,
    /// Transmission loss from source to sample, applied to the
    /// extrapolated result (0.24 means 24% loss).
    #[arg(long)]
    pub path_loss: Option<f64>,
    /// System detection efficiency.
    #[arg(long)]
    pub eta: f64,
    /// Detector dead time, ns.
    #[arg(long)]
    pub dead_time_ns: f64,
    /// Pulse repetition rate, s⁻¹.
    #[arg(long, default_value_t = 8e7)]
    pub rep_rate_hz: f64,
    /// Number of equally populated source modes.
    #[arg(long, default_value_t = 1)]
    pub modes: u32,
}

fn chain(rate_cps: f64, detector: &DetectorModel, modes: u32) -> Result<(f64, f64, f64)> {
    let p_meas = rate_cps / detector.rep_rate_hz;
    let p_corr = dead_time_correct(p_meas, detector.n_dead())?;
    let mu = invert_mu(p_corr, detector.efficiency, modes)?;
    Ok((p_meas, p_corr, mu))
}

pub fn run(args: &MuArgs) -> Result<()> {
    let detector = DetectorModel::new(args.eta, args.dead_time_ns, args.rep_rate_hz)?;
    let mut report = Report::new("mu");
    report.input("eta", args.eta);
    report.input("dead_time_ns", args.dead_time_ns);
    report.input_sci("rep_rate_hz", args.rep_rate_hz);
    report.input("n_dead_pulses", detector.n_dead());
    report.input("modes", args.modes);

    if let Some(rate) = args.rate_cps {
        report.input_sci("rate_cps", rate);
        let (p_meas, p_corr, mu) = chain(rate, &detector, args.modes)?;
        report.line(format!("p_click_meas = {p_meas:.6}"));
        report.line(format!("p_click_corr = {p_corr:.6}"));
        report.line(format!("mu_photons_per_pulse = {mu:.6}"));
        report.print();
        return Ok(());
    }

    if args.point.is_empty() {
        return Err(CliError::Config(
            "provide either --rate-cps or at least one --point pump_uW:rate_cps".into(),
        ));
    }
    let mut points = Vec::new();
    report.line("pump_uW,rate_cps,p_click_meas,p_click_corr,mu".to_string());
    for raw in &args.point {
        let (p, r) = raw.split_once(':').ok_or_else(|| {
            CliError::Config(format!("--point '{raw}' is not of the form pump_uW:rate_cps"))
        })?;
        let pump: f64 = p.parse().map_err(|_| {
            CliError::Config(format!("--point '{raw}': '{p}' is not a number"))
        })?;
        let rate: f64 = r.parse().map_err(|_| {
            CliError::Config(format!("--point '{raw}': '{r}' is not a number"))
        })?;
        let (p_meas, p_corr, mu) = chain(rate, &detector, args.modes)?;
        report.line(format!("{pump},{rate:.6e},{p_meas:.6},{p_corr:.6},{mu:.6}"));
        points.push((pump, mu));
    }

    if let Some(target) = args.target_uw {
        report.input("target_uw", target);
        let mu_source = extrapolate_mu(&points, target)?;
        report.blank();
        report.line(format!("mu_source_at_target = {mu_source:.3}"));
        if let Some(loss) = args.path_loss {
            if !(0.0..1.0).contains(&loss) {
                return Err(CliError::Config(format!("path loss must be in [0, 1), got {loss}")));
            }
            report.input("path_loss", loss);
            report.line(format!("mu_sample_at_target = {:.3}", mu_source * (1.0 - loss)));
        }
    }
    report.print();
    Ok(())
}
