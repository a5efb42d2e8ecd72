//! Monte Carlo harness invariants.

use sparse_meta::simulation::{
    event_rates, run_experiment, run_replicate, simulation_fit_options, Estimator, Experiment,
    SimConfig,
};

#[test]
fn published_fraction_tracks_target() {
    let cfg = SimConfig::new(Experiment::Bn1, -3.0, 0.15, 25, 0.6, 400, 17);
    let r = event_rates(&cfg).unwrap();
    let sd = (0.6_f64 * 0.4 / (400.0 * 25.0)).sqrt();
    assert!(
        (r.published_fraction - 0.6).abs() < 3.0 * sd,
        "{}",
        r.published_fraction
    );
}

#[test]
fn without_selection_proposed_equals_mle() {
    let mut cfg = SimConfig::new(Experiment::Bn1, -3.0, 0.15, 15, 1.0, 3, 4);
    cfg.beta = 0.0;
    for k in 0..3 {
        let rep = run_replicate(&cfg, f64::INFINITY, k).unwrap();
        assert_eq!(rep.n_published, 15);
        let (prop, mle) = (rep.estimates[0].unwrap(), rep.estimates[2].unwrap());
        assert_eq!(prop, mle);
    }
}

#[test]
fn replicates_are_reproducible() {
    let cfg = SimConfig::new(Experiment::Hn, -2.0, 0.05, 15, 0.6, 2, 8);
    let alpha = sparse_meta::simulation::calibrate_alpha_population(&cfg).unwrap();
    let a = run_replicate(&cfg, alpha, 1).unwrap();
    let b = run_replicate(&cfg, alpha, 1).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn fit_options_follow_selection_direction() {
    let mut cfg = SimConfig::new(Experiment::Bn2, -2.0, 0.15, 25, 0.6, 1, 1);
    assert_eq!(simulation_fit_options(&cfg).beta_range, Some([0.0, 10.0]));
    cfg.beta = -2.0;
    let o = simulation_fit_options(&cfg);
    assert_eq!(o.beta_range, Some([-10.0, 0.0]));
    assert!(o.beta_starts.iter().all(|&b| b < 0.0));
}

#[test]
fn mirrored_experiment_negates_estimates() {
    // θ = +2 with selection favouring negative t is the mirror image of
    // θ = −2 with selection favouring positive t.
    let base = SimConfig::new(Experiment::Bn2, -2.0, 0.15, 15, 0.6, 30, 3);
    let mut mirror = base.clone();
    mirror.theta = 2.0;
    mirror.beta = -2.0;
    let (a, b) = (
        run_experiment(&base).unwrap(),
        run_experiment(&mirror).unwrap(),
    );
    for e in Estimator::ALL {
        let (x, y) = (a.method(e), b.method(e));
        let se = (x.sd.unwrap().powi(2) / x.successes as f64
            + y.sd.unwrap().powi(2) / y.successes as f64)
            .sqrt();
        assert!(
            (x.ave + y.ave).abs() < 4.0 * se,
            "{e:?}: {} vs {}",
            x.ave,
            y.ave
        );
    }
    assert!((a.published_fraction - b.published_fraction).abs() < 0.05);
}
