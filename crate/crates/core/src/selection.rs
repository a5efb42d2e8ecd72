//! Probit selection on the t-statistic and the marginal-probability
//! constraint that pins down the selection intercept.
//!
//! Every study-level selection probability is represented as a finite
//! mixture of probit terms,
//!
//! ```text
//! P(select | margins) = Σ_a w_a Φ((α + β t_a) / sqrt(1 + β² v_a)),
//! ```
//!
//! which covers exact summation over the outcome support (`v = 0`), the
//! normal approximation (`v = 0`, continuous `t` on an inner Gauss–Hermite
//! grid) and the closed form of the NN model (one atom with `v > 0`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{MetaError, Result};
use crate::models::{Margins, Model, Params, PreparedMargins, StudyTerm};
use crate::quadrature::GhRule;
use crate::special::{norm_cdf, norm_pdf};

/// Lower clamp for study-level selection probabilities.
pub const PROB_MIN: f64 = 1e-12;

/// Order of the inner rule over the approximate outcome distribution.
/// Approximation atoms with a smaller fixed weight are skipped.
const ATOM_MIN: f64 = 1e-16;

pub const INNER_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub alpha: f64,
    pub beta: f64,
}

impl SelectionParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        SelectionParams { alpha, beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    /// Sum over the whole outcome support.
    #[default]
    #[serde(rename = "exact")]
    ExactSum,
    /// Normal approximation of the outcome at each quadrature node.
    #[serde(rename = "approx")]
    NormalApprox,
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMethod::ExactSum => "exact",
            SelectionMethod::NormalApprox => "approx",
        })
    }
}

impl FromStr for SelectionMethod {
    type Err = MetaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SelectionMethod::ExactSum),
            "approx" => Ok(SelectionMethod::NormalApprox),
            _ => Err(MetaError::Config(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionContext {
    pub p: f64,
    pub method: SelectionMethod,
}

impl SelectionContext {
    pub fn new(p: f64, method: SelectionMethod) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(MetaError::InvalidProbability(p));
        }
        Ok(SelectionContext { p, method })
    }
}

/// `Φ(α + β t)`.
#[inline]
pub fn a_probit(t: f64, s: &SelectionParams) -> f64 {
    norm_cdf(s.alpha + s.beta * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Atom {
    w: f64,
    t: f64,
    v: f64,
}

/// Distribution of the selection driver for one study at fixed `(θ, τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionKernel {
    atoms: Vec<Atom>,
}

impl SelectionKernel {
    /// Number of probit terms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Unclamped selection probability.
    pub fn raw_prob(&self, s: &SelectionParams) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                a.w * norm_cdf((s.alpha + s.beta * a.t) / (1.0 + s.beta * s.beta * a.v).sqrt())
            })
            .sum()
    }

    /// Selection probability clamped to `[PROB_MIN, 1]`.
    pub fn prob(&self, s: &SelectionParams) -> f64 {
        self.raw_prob(s).clamp(PROB_MIN, 1.0)
    }

    /// Kernel from `(weight, t)` pairs with no extra variance.
    pub fn from_points<I: IntoIterator<Item = (f64, f64)>>(points: I) -> Self {
        SelectionKernel {
            atoms: points
                .into_iter()
                .map(|(w, t)| Atom { w, t, v: 0.0 })
                .collect(),
        }
    }

    /// `(weight, t)` pairs of the atoms without extra variance.
    pub(crate) fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().filter(|a| a.v == 0.0).map(|a| (a.w, a.t))
    }

    fn scaled(&self, beta: f64) -> Scaled {
        let mut out = Scaled {
            w: Vec::with_capacity(self.atoms.len()),
            s: Vec::with_capacity(self.atoms.len()),
            b: Vec::with_capacity(self.atoms.len()),
        };
        for a in &self.atoms {
            let s = if a.v == 0.0 {
                1.0
            } else {
                1.0 / (1.0 + beta * beta * a.v).sqrt()
            };
            out.w.push(a.w);
            out.s.push(s);
            out.b.push(beta * a.t * s);
        }
        out
    }
}

/// Kernel with `β` folded in: `P(α) = Σ w Φ(s α + b)`.
struct Scaled {
    w: Vec<f64>,
    s: Vec<f64>,
    b: Vec<f64>,
}

impl Scaled {
    fn prob_and_slope(&self, alpha: f64) -> (f64, f64) {
        let (mut p, mut d) = (0.0, 0.0);
        for i in 0..self.w.len() {
            let z = self.s[i] * alpha + self.b[i];
            p += self.w[i] * norm_cdf(z);
            d += self.w[i] * self.s[i] * norm_pdf(z);
        }
        (p, d)
    }
}

/// Builds the selection kernel of one study.
pub fn selection_kernel(
    model: &Model,
    pm: &PreparedMargins,
    params: &Params,
    method: SelectionMethod,
) -> SelectionKernel {
    if let Margins::Precision { x } = pm.margins {
        return SelectionKernel {
            atoms: vec![Atom {
                w: 1.0,
                t: params.theta * x,
                v: 1.0 + params.tau * params.tau * x * x,
            }],
        };
    }
    let atoms = match method {
        SelectionMethod::ExactSum => {
            let (lo, probs) = model.marginal_pmf_vec(pm, params);
            probs
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(i, &w)| Atom {
                    w,
                    t: pm.t_at(lo + i as u64),
                    v: 0.0,
                })
                .collect()
        }
        SelectionMethod::NormalApprox => {
            let inner = inner_rule();
            let mut atoms = Vec::with_capacity(model.rule().order() * INNER_ORDER);
            for (x, w) in model.re_nodes(params) {
                let (m, var) = model.outcome_moments(pm, x);
                if var < 1e-12 {
                    atoms.push(Atom {
                        w,
                        t: model.t_continuous(pm, m),
                        v: 0.0,
                    });
                    continue;
                }
                let sd = var.sqrt();
                for &(u, wu) in inner {
                    if w * wu < ATOM_MIN {
                        continue;
                    }
                    atoms.push(Atom {
                        w: w * wu,
                        t: model.t_continuous(pm, m + sd * u),
                        v: 0.0,
                    });
                }
            }
            atoms
        }
    };
    SelectionKernel { atoms }
}

/// Inner rule for `E[g(Z)]`, `Z ~ N(0, 1)`: pairs `(z, weight)`.
fn inner_rule() -> &'static [(f64, f64)] {
    static RULE: std::sync::OnceLock<Vec<(f64, f64)>> = std::sync::OnceLock::new();
    RULE.get_or_init(|| {
        GhRule::new(INNER_ORDER)
            .expect("valid order")
            .re_nodes(0.0, 1.0)
    })
}

/// Selection probability of a study with the given margins.
pub fn select_prob_margins(
    model: &Model,
    m: &Margins,
    params: &Params,
    s: &SelectionParams,
    method: SelectionMethod,
) -> Result<f64> {
    let pm = model.prepare_margins(m)?;
    let kernel = selection_kernel(model, &pm, params, method);
    if kernel.is_empty() {
        return Err(MetaError::EmptySupport);
    }
    Ok(kernel.prob(s))
}

/// Kernels of the informative studies among `terms`.
pub fn study_kernels(
    model: &Model,
    terms: &[StudyTerm],
    params: &Params,
    method: SelectionMethod,
) -> Vec<SelectionKernel> {
    terms
        .iter()
        .filter(|t| t.informative())
        .map(|t| selection_kernel(model, &t.prepared, params, method))
        .collect()
}

/// `g(α) = mean_i 1/P_i(α) − 1/p`.
pub fn constraint_residual(kernels: &[SelectionKernel], s: &SelectionParams, p: f64) -> f64 {
    let n = kernels.len() as f64;
    kernels.iter().map(|k| 1.0 / k.prob(s)).sum::<f64>() / n - 1.0 / p
}

struct Constraint {
    scaled: Vec<Scaled>,
    inv_p: f64,
}

impl Constraint {
    fn eval(&self, alpha: f64) -> (f64, f64) {
        let n = self.scaled.len() as f64;
        let (mut g, mut dg) = (0.0, 0.0);
        for k in &self.scaled {
            let (p, d) = k.prob_and_slope(alpha);
            if p > PROB_MIN {
                let p = p.min(1.0);
                g += 1.0 / p;
                dg -= d / (p * p);
            } else {
                g += 1.0 / PROB_MIN;
            }
        }
        (g / n - self.inv_p, dg / n)
    }
}

/// Solves the marginal-probability constraint for `α` given kernels built
/// at the current `(θ, τ)`. `guess` seeds the bracket search.
pub fn solve_alpha_kernels(
    kernels: &[SelectionKernel],
    beta: f64,
    p: f64,
    guess: Option<f64>,
) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(MetaError::InvalidProbability(p));
    }
    if p == 1.0 || kernels.is_empty() || !beta.is_finite() {
        return Err(MetaError::Unattainable(p));
    }
    let c = Constraint {
        scaled: kernels.iter().map(|k| k.scaled(beta)).collect(),
        inv_p: 1.0 / p,
    };
    const LIMIT: f64 = 30.0 * 32.0;

    // Near a warm start plain Newton usually converges in a few steps.
    if let Some(x0) = guess.filter(|g| g.is_finite() && g.abs() < LIMIT) {
        if let Some(x) = newton_only(&c, x0) {
            return Ok(x);
        }
    }

    // Bracket: g(a) > 0 > g(b).
    let (mut a, mut b, mut ga, mut gb);
    match guess.filter(|g| g.is_finite() && g.abs() < LIMIT) {
        Some(x0) => {
            let mut step = 0.125;
            a = x0 - step;
            b = x0 + step;
            ga = c.eval(a).0;
            gb = c.eval(b).0;
            while ga <= 0.0 {
                step *= 2.0;
                b = a;
                gb = ga;
                a -= step;
                if a < -LIMIT {
                    return Err(MetaError::Unattainable(p));
                }
                ga = c.eval(a).0;
            }
            while gb > 0.0 {
                step *= 2.0;
                a = b;
                b += step;
                if b > LIMIT {
                    return Err(MetaError::Unattainable(p));
                }
                gb = c.eval(b).0;
            }
        }
        None => {
            a = -30.0;
            b = 30.0;
            ga = c.eval(a).0;
            gb = c.eval(b).0;
            while !(ga > 0.0 && gb <= 0.0) {
                if a < -LIMIT || b > LIMIT {
                    return Err(MetaError::Unattainable(p));
                }
                if ga <= 0.0 {
                    a *= 2.0;
                    ga = c.eval(a).0;
                }
                if gb > 0.0 {
                    b *= 2.0;
                    gb = c.eval(b).0;
                }
            }
        }
    }
    if gb == 0.0 {
        return Ok(b);
    }

    // Safeguarded Newton inside the bracket.
    let mut x = match guess {
        Some(g) if g > a && g < b => g,
        _ => 0.5 * (a + b),
    };
    for _ in 0..200 {
        let (g, dg) = c.eval(x);
        if g == 0.0 {
            return Ok(x);
        }
        if g > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - g / dg;
        let next = if dg < 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
        if (next - x).abs() <= tol || b - a <= tol {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Unguarded Newton from `x0`; `None` when a step misbehaves.
fn newton_only(c: &Constraint, x0: f64) -> Option<f64> {
    let mut x = x0;
    for _ in 0..8 {
        let (g, dg) = c.eval(x);
        if g == 0.0 {
            return Some(x);
        }
        if !(dg < 0.0) || !g.is_finite() {
            return None;
        }
        let step = g / dg;
        if step.abs() > 0.5 {
            return None;
        }
        let next = x - step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Some(next);
        }
        x = next;
    }
    None
}

/// Exact and approximate selection probability of one study at the `α`
/// that makes its exact probability equal `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxCheck {
    pub alpha: f64,
    pub exact: f64,
    pub approx: f64,
}

impl ApproxCheck {
    /// `|approx − exact| / exact`.
    pub fn rel_error(&self) -> f64 {
        (self.approx - self.exact).abs() / self.exact
    }
}

pub fn approximation_check(
    model: &Model,
    m: &Margins,
    params: &Params,
    beta: f64,
    p: f64,
) -> Result<ApproxCheck> {
    let pm = model.prepare_margins(m)?;
    let exact = selection_kernel(model, &pm, params, SelectionMethod::ExactSum);
    let approx = selection_kernel(model, &pm, params, SelectionMethod::NormalApprox);
    if exact.is_empty() || approx.is_empty() {
        return Err(MetaError::EmptySupport);
    }
    let alpha = solve_alpha_kernels(std::slice::from_ref(&exact), beta, p, None)?;
    let s = SelectionParams::new(alpha, beta);
    Ok(ApproxCheck {
        alpha,
        exact: exact.prob(&s),
        approx: approx.prob(&s),
    })
}

/// Solves the constraint for a whole dataset.
pub fn solve_alpha(
    model: &Model,
    ds: &Dataset,
    params: &Params,
    beta: f64,
    ctx: &SelectionContext,
) -> Result<f64> {
    let terms = model.prepare(ds)?;
    let kernels = study_kernels(model, &terms, params, ctx.method);
    if kernels.is_empty() {
        return Err(MetaError::TooFewStudies(0));
    }
    solve_alpha_kernels(&kernels, beta, ctx.p, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::cvc_trials;
    use crate::models::{Family, ModelSpec};
    use crate::special::norm_quantile;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn model(f: Family) -> Model {
        Model::new(ModelSpec::new(f)).unwrap()
    }

    const METHODS: [SelectionMethod; 2] =
        [SelectionMethod::ExactSum, SelectionMethod::NormalApprox];

    #[test]
    fn probit_examples() {
        let s = SelectionParams::new(0.0, 2.0);
        assert_eq!(a_probit(0.0, &s), 0.5);
        assert_abs_diff_eq!(
            a_probit(-1.0, &SelectionParams::new(1.0, 2.0)),
            0.158_655_253_931_457_05,
            epsilon = 1e-15
        );
        let flat = SelectionParams::new(0.3, 0.0);
        assert_eq!(a_probit(-7.0, &flat), a_probit(9.0, &flat));
    }

    fn all_margins() -> Vec<(Family, Margins)> {
        vec![
            (Family::Nn, Margins::Precision { x: 1.7 }),
            (Family::Bn1, Margins::OneGroupBinary { n: 300 }),
            (
                Family::Bn2,
                Margins::TwoGroupBinary {
                    n1: 116,
                    n0: 117,
                    total: 3,
                },
            ),
            (
                Family::Hn,
                Margins::TwoGroupBinary {
                    n1: 300,
                    n0: 280,
                    total: 20,
                },
            ),
            (Family::Pn1, Margins::OneGroupCount { t: 250.0 }),
            (
                Family::Pn2,
                Margins::TwoGroupCount {
                    t1: 90.0,
                    t0: 110.0,
                    total: 14,
                },
            ),
        ]
    }

    #[test]
    fn flat_selection_is_phi_alpha() {
        let p = Params::new(-2.0, 0.3);
        for (f, m) in all_margins() {
            for method in METHODS {
                for alpha in [-1.2, 0.0, 0.8] {
                    let s = SelectionParams::new(alpha, 0.0);
                    let got = select_prob_margins(&model(f), &m, &p, &s, method).unwrap();
                    assert_abs_diff_eq!(got, norm_cdf(alpha), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn extreme_intercepts() {
        let p = Params::new(-2.0, 0.3);
        for (f, m) in all_margins() {
            for method in METHODS {
                let md = model(f);
                let hi = select_prob_margins(&md, &m, &p, &SelectionParams::new(60.0, 2.0), method)
                    .unwrap();
                let lo =
                    select_prob_margins(&md, &m, &p, &SelectionParams::new(-60.0, 2.0), method)
                        .unwrap();
                assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
                assert_eq!(lo, PROB_MIN);
            }
        }
    }

    #[test]
    fn flat_selection_solves_in_closed_form() {
        let ds = cvc_trials();
        let md = model(Family::Hn);
        for p in [0.2, 0.6, 0.95] {
            let ctx = SelectionContext::new(p, SelectionMethod::ExactSum).unwrap();
            let a = solve_alpha(&md, &ds, &Params::new(-1.0, 0.2), 0.0, &ctx).unwrap();
            assert_abs_diff_eq!(a, norm_quantile(p), epsilon = 1e-10);
        }
    }

    #[test]
    fn unattainable_at_one() {
        let ds = cvc_trials();
        let md = model(Family::Hn);
        let ctx = SelectionContext::new(1.0, SelectionMethod::ExactSum).unwrap();
        assert!(matches!(
            solve_alpha(&md, &ds, &Params::new(-1.0, 0.2), 1.0, &ctx),
            Err(MetaError::Unattainable(_))
        ));
        assert!(SelectionContext::new(0.0, SelectionMethod::ExactSum).is_err());
    }

    #[test]
    fn table_margins_constraint_and_grid_oracle() {
        let ds = cvc_trials();
        let md = model(Family::Hn);
        let params = Params::new(-1.0, 0.2);
        let ctx = SelectionContext::new(0.6, SelectionMethod::ExactSum).unwrap();
        let alpha = solve_alpha(&md, &ds, &params, 1.0, &ctx).unwrap();
        let terms = md.prepare(&ds).unwrap();
        let kernels = study_kernels(&md, &terms, &params, ctx.method);
        assert_eq!(kernels.len(), 17);
        let res = constraint_residual(&kernels, &SelectionParams::new(alpha, 1.0), 0.6);
        assert!(res.abs() < 1e-8, "{res}");
        // Grid scan: the sign change of g on a 1e-3 grid brackets alpha.
        let g = |a: f64| constraint_residual(&kernels, &SelectionParams::new(a, 1.0), 0.6);
        let cross = (-5000..5000)
            .map(|i| i as f64 * 1e-3)
            .find(|&a| g(a) > 0.0 && g(a + 1e-3) <= 0.0)
            .unwrap();
        assert!(alpha >= cross && alpha <= cross + 1e-3);
        // Warm start lands on the same root.
        let warm = solve_alpha_kernels(&kernels, 1.0, 0.6, Some(alpha + 3.0)).unwrap();
        assert_abs_diff_eq!(warm, alpha, epsilon = 1e-12);
    }

    #[test]
    fn approximation_close_for_moderate_margins() {
        let md = model(Family::Bn1);
        let params = Params::new(-3.0, 0.15);
        let m = Margins::OneGroupBinary { n: 300 };
        let pm = md.prepare_margins(&m).unwrap();
        let exact = selection_kernel(&md, &pm, &params, SelectionMethod::ExactSum);
        let alpha = solve_alpha_kernels(std::slice::from_ref(&exact), 2.0, 0.6, None).unwrap();
        let s = SelectionParams::new(alpha, 2.0);
        let e = exact.prob(&s);
        let a = selection_kernel(&md, &pm, &params, SelectionMethod::NormalApprox).prob(&s);
        assert_abs_diff_eq!(e, 0.6, epsilon = 1e-12);
        assert!(((a - e) / e).abs() < 0.01, "{a} {e}");
    }

    #[test]
    fn summation_order_does_not_matter() {
        let md = model(Family::Bn1);
        let pm = md
            .prepare_margins(&Margins::OneGroupBinary { n: 250 })
            .unwrap();
        let k = selection_kernel(&md, &pm, &Params::new(-2.5, 0.4), SelectionMethod::ExactSum);
        let s = SelectionParams::new(1.1, 1.5);
        let mut rev = k.clone();
        rev.atoms.reverse();
        let (a, b) = k.atoms.split_at(k.atoms.len() / 3);
        let chunked = SelectionKernel { atoms: a.to_vec() }.raw_prob(&s)
            + SelectionKernel { atoms: b.to_vec() }.raw_prob(&s);
        assert!((k.raw_prob(&s) - rev.raw_prob(&s)).abs() < 1e-14);
        assert!((k.raw_prob(&s) - chunked).abs() < 1e-14);
    }

    #[test]
    fn larger_effects_are_more_publishable() {
        let md = model(Family::Bn1);
        let m = Margins::OneGroupBinary { n: 200 };
        let s = SelectionParams::new(-1.0, 1.0);
        // Holds away from the rare-event regime, where the t-statistic of a
        // log odds falls as events accumulate.
        let mut prev = 0.0;
        for k in 0..=15 {
            let th = -1.0 + 0.2 * k as f64;
            let v = select_prob_margins(
                &md,
                &m,
                &Params::new(th, 0.2),
                &s,
                SelectionMethod::ExactSum,
            )
            .unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn nn_closed_form() {
        let md = model(Family::Nn);
        let (x, th, tau) = (2.0, -0.5, 0.4);
        let s = SelectionParams::new(0.3, 1.2);
        let got = select_prob_margins(
            &md,
            &Margins::Precision { x },
            &Params::new(th, tau),
            &s,
            SelectionMethod::ExactSum,
        )
        .unwrap();
        let want = norm_cdf((0.3 + 1.2 * th * x) / (1.0 + 1.44 * (1.0 + tau * tau * x * x)).sqrt());
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn constraint_decreasing(a1 in -6.0f64..6.0, gap in 0.01f64..3.0, beta in -3.0f64..3.0, th in -4.0f64..0.0) {
            let md = model(Family::Bn1);
            let kernels: Vec<_> = [120u64, 250, 390].iter().map(|&n| {
                let pm = md.prepare_margins(&Margins::OneGroupBinary { n }).unwrap();
                selection_kernel(&md, &pm, &Params::new(th, 0.2), SelectionMethod::ExactSum)
            }).collect();
            let g1 = constraint_residual(&kernels, &SelectionParams::new(a1, beta), 0.5);
            let g2 = constraint_residual(&kernels, &SelectionParams::new(a1 + gap, beta), 0.5);
            prop_assert!(g1 >= g2);
        }

        #[test]
        fn residual_always_small(p in 0.05f64..0.99, beta in -3.0f64..3.0, th in -3.0f64..1.0, tau in 0.0f64..1.0) {
            let md = model(Family::Hn);
            let ds = cvc_trials();
            let terms = md.prepare(&ds).unwrap();
            let kernels = study_kernels(&md, &terms, &Params::new(th, tau), SelectionMethod::ExactSum);
            let a = solve_alpha_kernels(&kernels, beta, p, None).unwrap();
            let r = constraint_residual(&kernels, &SelectionParams::new(a, beta), p);
            prop_assert!(r.abs() < 1e-8, "{}", r);
        }
    }
}
