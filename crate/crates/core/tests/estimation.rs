//! Fits on the bundled dataset beyond the acceptance targets.

use sparse_meta::dataset::cvc_trials;
use sparse_meta::estimation::{fit_conditional, fit_mle, FitOptions, FitResult};
use sparse_meta::models::{Family, Model, ModelSpec};
use sparse_meta::sensitivity::{default_grid, sensitivity_scan};

fn model(f: Family) -> Model {
    Model::new(ModelSpec::new(f)).unwrap()
}

fn negative_beta() -> FitOptions {
    FitOptions {
        beta_range: Some([-10.0, 0.0]),
        ..FitOptions::default()
    }
}

#[test]
fn nn_negative_slope_branch_values() {
    let ds = cvc_trials();
    let m = model(Family::Nn);
    for (p, want) in [(0.7, -0.698), (0.4, -0.452)] {
        let neg = fit_conditional(&m, &ds, p, &negative_beta()).unwrap();
        assert!(neg.converged);
        assert!((neg.theta - want).abs() < 0.02, "p={p}: {}", neg.theta);
        assert!(neg.beta.unwrap() < 0.0);
        // The unrestricted optimum is a different, higher mode.
        let free = fit_conditional(&m, &ds, p, &FitOptions::default()).unwrap();
        assert!(free.loglik >= neg.loglik - 1e-9);
    }
}

#[test]
fn beta_range_is_respected() {
    let ds = cvc_trials();
    let opts = FitOptions {
        beta_range: Some([0.0, 3.0]),
        ..FitOptions::default()
    };
    let fit = fit_conditional(&model(Family::Hn), &ds, 0.6, &opts).unwrap();
    let b = fit.beta.unwrap();
    assert!((0.0..=3.0).contains(&b), "{b}");
}

#[test]
fn hn_interval_widens_as_p_falls() {
    let ds = cvc_trials();
    let table = sensitivity_scan(
        &model(Family::Hn),
        &ds,
        &default_grid(),
        &FitOptions::default(),
    )
    .unwrap();
    let widths: Vec<f64> = table
        .rows
        .iter()
        .map(|r| r.fit.as_ref().unwrap().ci.theta.width())
        .collect();
    for w in widths.windows(2) {
        assert!(w[1] >= w[0] - 1e-6, "{widths:?}");
    }
}

#[test]
fn swapping_groups_negates_the_adjusted_effect() {
    let ds = cvc_trials();
    let m = model(Family::Hn);
    let opts = FitOptions::default();
    let a = fit_conditional(&m, &ds, 0.7, &opts).unwrap();
    let b = fit_conditional(&m, &ds.swap_groups(), 0.7, &opts).unwrap();
    assert!(
        (a.theta + b.theta).abs() < 1e-3,
        "{} vs {}",
        a.theta,
        b.theta
    );
    assert!((a.beta.unwrap() + b.beta.unwrap()).abs() < 1e-2);
    assert!((a.loglik - b.loglik).abs() < 1e-6);
}

#[test]
fn fit_results_roundtrip_through_json() {
    let ds = cvc_trials();
    let fit = fit_conditional(&model(Family::Bn2), &ds, 0.8, &FitOptions::default()).unwrap();
    let back: FitResult = serde_json::from_str(&fit.to_json()).unwrap();
    assert_eq!(back, fit);
    assert_eq!(fit.covariance.len(), 3);
    let mle = fit_mle(&model(Family::Bn2), &ds, &FitOptions::default()).unwrap();
    assert_eq!(mle.covariance.len(), 2);
    assert!(mle.beta.is_none() && mle.alpha.is_none());
}

#[test]
fn double_zero_study_is_not_informative() {
    let ds = cvc_trials();
    let hn = fit_mle(&model(Family::Hn), &ds, &FitOptions::default()).unwrap();
    assert_eq!((hn.n_studies, hn.n_effective), (18, 17));
    let nn = fit_mle(&model(Family::Nn), &ds, &FitOptions::default()).unwrap();
    assert_eq!(nn.n_effective, 18);
}
