//! Unadjusted and selection-adjusted fits on the bundled dataset.
//!
//! `cargo run --release --example fit_bundled -- 0.7` fits at p = 0.7
//! (default 0.6).

use sparse_meta::dataset::cvc_trials;
use sparse_meta::estimation::{fit_conditional, fit_mle, FitOptions, FitResult};
use sparse_meta::models::{Family, Model, ModelSpec};

fn show(label: &str, f: &FitResult) {
    print!(
        "{label:<10} theta {:>7.3} ({:>6.3}, {:>6.3})  tau {:.3}",
        f.theta, f.ci.theta.lo, f.ci.theta.hi, f.tau
    );
    if let (Some(b), Some(a)) = (f.beta, f.alpha) {
        print!("  beta {b:.3}  alpha {a:.3}");
    }
    println!(
        "  loglik {:.4}{}",
        f.loglik,
        if f.converged { "" } else { "  (not converged)" }
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0.6);
    let ds = cvc_trials();
    let opts = FitOptions::default();
    println!("{} studies from `{}`", ds.len(), ds.source);
    for family in [Family::Hn, Family::Bn2, Family::Nn] {
        let model = Model::new(ModelSpec::new(family))?;
        let mle = fit_mle(&model, &ds, &opts)?;
        show(&format!("{family} MLE"), &mle);
        let adj = fit_conditional(&model, &ds, p, &opts)?;
        show(&format!("{family} p={p}"), &adj);
        if adj.diagnostics.beta_boundary {
            println!("           |beta| is large; the optimum may sit on a boundary");
        }
    }

    // The NN likelihood has two modes at small p; restricting the slope's
    // sign picks the one where smaller t is more publishable.
    let model = Model::new(ModelSpec::new(Family::Nn))?;
    let neg = FitOptions {
        beta_range: Some([-10.0, 0.0]),
        ..FitOptions::default()
    };
    show(
        &format!("NN b<0 p={p}"),
        &fit_conditional(&model, &ds, p, &neg)?,
    );
    Ok(())
}
