//! Marginal outcome distributions of the within-study families for one
//! sparse two-arm study, and how closely BN2 tracks HN.

use sparse_meta::models::{nchg_pmf, Family, Margins, Model, ModelSpec, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let margins = Margins::TwoGroupBinary {
        n1: 300,
        n0: 300,
        total: 20,
    };
    let params = Params::new(-2.0, 0.15);
    let hn = Model::new(ModelSpec::new(Family::Hn))?;
    let bn2 = Model::new(ModelSpec::new(Family::Bn2))?;
    println!("y1 of 20 events, n1 = n0 = 300, theta = -2, tau = 0.15");
    println!(" y1       HN        BN2    NCHG(theta)");
    let mut worst: f64 = 0.0;
    for y1 in 0..=20 {
        let a = hn.marginal_pmf(y1, &margins, &params)?;
        let b = bn2.marginal_pmf(y1, &margins, &params)?;
        worst = worst.max((a - b).abs());
        if y1 <= 8 {
            println!(
                "{y1:>3}  {a:.6}  {b:.6}  {:.6}",
                nchg_pmf(y1, &margins, -2.0)?
            );
        }
    }
    println!("max |HN - BN2| = {worst:.4}");

    let count = Margins::OneGroupCount { t: 250.0 };
    let pn1 = Model::new(ModelSpec::new(Family::Pn1))?;
    let support = pn1.support(&count, &Params::new(-3.0, 0.3))?;
    println!("\nPN1 with exposure 250, theta = -3, tau = 0.3: support {support:?}");
    let mass: f64 = support
        .map(|y| {
            pn1.marginal_pmf(y, &count, &Params::new(-3.0, 0.3))
                .unwrap()
        })
        .sum();
    println!("total mass on the truncated support {mass:.12}");
    Ok(())
}
