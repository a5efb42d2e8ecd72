//! A small Monte Carlo run: generated event rates and the three estimators.
//!
//! `cargo run --release --example simulate_experiment -- hn 40` runs 40
//! replicates of the HN experiment (default: bn2, 20 replicates).

use std::time::Instant;

use sparse_meta::simulation::{event_rates, run_experiment, Experiment, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let experiment = match args.next().as_deref() {
        None | Some("bn2") => Experiment::Bn2,
        Some("bn1") => Experiment::Bn1,
        Some("hn") => Experiment::Hn,
        Some("pn1") => Experiment::Pn1,
        Some("pn2") => Experiment::Pn2,
        Some(other) => return Err(format!("unknown experiment `{other}`").into()),
    };
    let replicates: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let theta = if experiment == Experiment::Bn1 {
        -3.0
    } else {
        -2.0
    };
    let cfg = SimConfig::new(experiment, theta, 0.15, 25, 0.6, replicates, 2024);

    let rates = event_rates(&SimConfig {
        replicates: 500,
        ..cfg.clone()
    })?;
    println!(
        "alpha {:.3}; event rate {:.2}% full, {:.2}% published; published fraction {:.3}",
        rates.alpha, rates.full, rates.published, rates.published_fraction
    );

    let start = Instant::now();
    let summary = run_experiment(&cfg)?;
    println!("{replicates} replicates in {:.1?}", start.elapsed());
    summary.write_summary(std::io::stdout().lock())?;
    Ok(())
}
