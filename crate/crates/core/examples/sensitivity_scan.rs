//! Sensitivity of the pooled log odds ratio to unpublished studies on the
//! bundled dataset, for the HN, BN2 and NN models.

use std::time::Instant;

use sparse_meta::dataset::cvc_trials;
use sparse_meta::estimation::FitOptions;
use sparse_meta::models::{Family, Model, ModelSpec};
use sparse_meta::sensitivity::{default_grid, sensitivity_scan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = cvc_trials();
    for family in [Family::Hn, Family::Bn2, Family::Nn] {
        let start = Instant::now();
        let model = Model::new(ModelSpec::new(family))?;
        let table = sensitivity_scan(&model, &ds, &default_grid(), &FitOptions::default())?;
        println!("{family}  ({:.1?})", start.elapsed());
        println!("  p     #    theta   (95% CI)            tau    beta");
        for row in &table.rows {
            let f = row.fit.as_ref().expect("fit");
            println!(
                "  {:.1} {:>4}  {:>6.2}  ({:>6.2}, {:>6.2})  {:>6.3}  {}",
                row.p,
                row.unpublished,
                f.theta,
                f.ci.theta.lo,
                f.ci.theta.hi,
                f.tau,
                f.beta.map_or("-".to_string(), |b| format!("{b:.3}")),
            );
        }
    }
    Ok(())
}
