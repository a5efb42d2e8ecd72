//! Exact versus normal-approximation selection probabilities for one-group
//! binary studies with the selection intercept calibrated per cell.

use std::time::Instant;

use sparse_meta::models::{Family, Margins, Model, ModelSpec, Params};
use sparse_meta::selection::{
    approximation_check, SelectionKernel, SelectionMethod, SelectionParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::new(ModelSpec::new(Family::Bn1))?;
    let params = Params::new(-3.0, 0.15);
    let start = Instant::now();
    println!("  n    p    alpha     exact    approx   rel.err");
    for n in [100u64, 200, 300, 400] {
        for p in [0.1, 0.3, 0.6, 0.9] {
            let c = approximation_check(&model, &Margins::OneGroupBinary { n }, &params, 2.0, p)?;
            println!(
                "{n:>4}  {p:.1}  {:>7.3}  {:.5}  {:.5}  {:>6.2}%",
                c.alpha,
                c.exact,
                c.approx,
                100.0 * c.rel_error()
            );
        }
    }
    println!("({:.1?})", start.elapsed());

    // Kernel sizes behind the two methods for one study.
    let pm = model.prepare_margins(&Margins::OneGroupBinary { n: 300 })?;
    let e: SelectionKernel =
        sparse_meta::selection::selection_kernel(&model, &pm, &params, SelectionMethod::ExactSum);
    let a = sparse_meta::selection::selection_kernel(
        &model,
        &pm,
        &params,
        SelectionMethod::NormalApprox,
    );
    let s = SelectionParams::new(22.0, 2.0);
    println!(
        "n=300: {} exact terms, {} approximation terms; P = {:.5} vs {:.5}",
        e.len(),
        a.len(),
        e.prob(&s),
        a.prob(&s)
    );
    Ok(())
}
