//! Gauss–Hermite rules: moments of the normal and order stability of a
//! binomial–normal marginal probability.

use sparse_meta::models::{Family, Margins, Model, ModelSpec, Params};
use sparse_meta::quadrature::{gh_rule, DEFAULT_ORDER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rule = gh_rule(DEFAULT_ORDER)?;
    let sw: f64 = rule.weights().iter().sum();
    println!(
        "K={}: sum of weights {sw:.15} (sqrt(pi) = {:.15})",
        rule.order(),
        std::f64::consts::PI.sqrt()
    );
    let (theta, tau) = (-1.0, 0.7);
    let m2 = rule.integrate_re(|x| (x - theta).powi(2), theta, tau)?;
    let m4 = rule.integrate_re(|x| (x - theta).powi(4), theta, tau)?;
    println!(
        "N({theta}, {tau}^2): E(X-mu)^2 = {m2:.12}, E(X-mu)^4 = {m4:.12} (exact {:.12}, {:.12})",
        tau * tau,
        3.0 * tau.powi(4)
    );

    println!("\nBN1 marginal P(y = 15 | n = 300), theta = -3");
    println!("   tau      K=21               K=41               K=81");
    for tau in [0.05, 0.15, 0.3, 1.0, 2.0] {
        let vals: Vec<f64> = [21, 41, 81]
            .iter()
            .map(|&k| {
                let m = Model::new(ModelSpec::new(Family::Bn1).with_order(k)).unwrap();
                m.marginal_pmf(
                    15,
                    &Margins::OneGroupBinary { n: 300 },
                    &Params::new(-3.0, tau),
                )
                .unwrap()
            })
            .collect();
        println!(
            "  {tau:>4}  {:.15}  {:.15}  {:.15}",
            vals[0], vals[1], vals[2]
        );
    }
    Ok(())
}
