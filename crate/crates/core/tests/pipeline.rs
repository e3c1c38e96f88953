//! Cross-module integration checks that exercise the simulator against the
//! statistics chain the way a real acquisition campaign would.

use e2pa_core::optics::BeamProfile;
use e2pa_core::sim::{simulate_e2pef_run, SimPlan};
use e2pa_core::stats::{background_subtract, error_bar};
use e2pa_core::units::photon_energy_j;
use e2pa_core::xsection::sigma_e_upper_bound;
use e2pa_core::{ApparatusSpec, CollectionModel, SampleSpec};

fn fluorescein() -> SampleSpec {
    SampleSpec::new("fluorescein", 1100e-6, 0.93, 0.0789, Some(13.0), None).unwrap()
}

fn apparatus() -> ApparatusSpec {
    ApparatusSpec::new(
        8e7,
        1040.0,
        51.0,
        84.0,
        0.4,
        photon_energy_j(810.0),
        1.0,
        CollectionModel::new(0.154, 2.78, 1.51).unwrap(),
        0.76,
        Some(8.9e9),
        0.22,
    )
    .unwrap()
}

fn laser() -> BeamProfile {
    BeamProfile::new(49.0, 49.0, 5.1, 111.0, 8e7, None, None, photon_energy_j(810.0)).unwrap()
}

fn plan(seed: u64, integration_s: f64, background_cps: f64) -> SimPlan {
    SimPlan {
        sample: fluorescein(),
        apparatus: apparatus(),
        beam: laser(),
        powers_uw: vec![],
        integration_s,
        chopper_hz: 5.0,
        background_cps,
        rng_seed: seed,
        transition_fraction: 0.05,
    }
}

/// Nine simulated 45-minute blocks with the beam blocked: the error-bar
/// policy must land on a 2σ bound consistent with the measurable
/// fluorescence lower bound of 0.22 cnt/s, and the mean must sit inside it.
#[test]
fn zero_signal_campaign_reproduces_f_lb() {
    let blocks = 9;
    let mut rates = Vec::with_capacity(blocks);
    let mut total_counts = 0u64;
    let mut live = 0.0;
    for seed in 0..blocks {
        let p = plan(1000 + seed as u64, 45.0 * 60.0, 70.0);
        let series = simulate_e2pef_run(&p, 0.0).unwrap();
        let sub = background_subtract(&series, None).unwrap();
        rates.push(sub.rate_cps);
        total_counts += sub.signal_counts + sub.background_counts;
        live += sub.signal_live_s;
    }
    let bound = error_bar(&rates, total_counts, live, 2.0).unwrap();
    assert!(
        (0.17..0.30).contains(&bound),
        "2-sigma bound {bound:.3} cnt/s not consistent with 0.22"
    );
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    assert!(mean.abs() < bound, "zero-signal mean {mean:.3} outside the bound {bound:.3}");
}

/// A cross-section exactly at the upper bound produces a signal that a
/// single 45-minute dark-background block distinguishes from zero at
/// 2σ in at least 90 of 100 seeds.
#[test]
fn bound_level_signal_is_detectable() {
    let sample = fluorescein();
    let app = apparatus();
    let sigma_ub = sigma_e_upper_bound(&sample, &app).unwrap();
    let mut detections = 0;
    for seed in 0..100 {
        let p = plan(seed, 45.0 * 60.0, 2.0);
        let series = simulate_e2pef_run(&p, sigma_ub).unwrap();
        let sub = background_subtract(&series, None).unwrap();
        if sub.rate_cps > 2.0 * sub.poisson_sigma_cps {
            detections += 1;
        }
    }
    assert!(detections >= 90, "bound-level signal detected in only {detections}/100 blocks");
}

/// The null scenario: with the cross-section at zero the subtracted rate is
/// statistically zero in nearly every block.
#[test]
fn null_signal_stays_null() {
    let mut false_positives = 0;
    for seed in 0..50 {
        let p = plan(40_000 + seed, 45.0 * 60.0, 2.0);
        let series = simulate_e2pef_run(&p, 0.0).unwrap();
        let sub = background_subtract(&series, None).unwrap();
        if sub.rate_cps.abs() > 3.0 * sub.poisson_sigma_cps {
            false_positives += 1;
        }
    }
    assert!(false_positives <= 2, "{false_positives}/50 null blocks outside 3 sigma");
}
