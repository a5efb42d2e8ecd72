//! Empirical effects, t-statistics and funnel-plot points.
//!
//! `cargo run --example funnel_export -- data.csv two-group-binary` reads a
//! file; without arguments the bundled dataset is used.

use sparse_meta::dataset::{
    cvc_trials, empirical_effect, funnel_points, parse_dataset, write_funnel_csv, Design,
    ZeroCellPolicy,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ds = match args.as_slice() {
        [path, design] => {
            parse_dataset(&std::fs::read_to_string(path)?, design.parse::<Design>()?)?
        }
        [] => cvc_trials(),
        _ => return Err("usage: funnel_export [FILE DESIGN]".into()),
    };

    println!("study  effect     se       t  corrected");
    for s in ds.studies() {
        match empirical_effect(s, ZeroCellPolicy::AddHalf) {
            Ok(e) => println!(
                "{:<5} {:>7.3} {:>6.3} {:>7.3}  {}",
                s.id, e.theta_hat, e.se, e.t, e.corrected
            ),
            Err(err) => println!("{:<5} {err}", s.id),
        }
    }
    // Rejecting zero cells instead of correcting them:
    let rejected = ds
        .studies()
        .iter()
        .filter(|s| empirical_effect(s, ZeroCellPolicy::Reject).is_err())
        .count();
    println!("{rejected} studies need the 0.5 correction\n");

    write_funnel_csv(&funnel_points(&ds)?, std::io::stdout().lock())?;
    Ok(())
}
