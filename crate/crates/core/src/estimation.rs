//! Maximum likelihood with and without selection adjustment.
//!
//! The adjusted fit maximises the log-likelihood of the published studies
//! conditional on publication, with the marginal publication probability
//! `p` held fixed and the selection intercept `α` profiled out through the
//! constraint in [`crate::selection`].

use std::cell::Cell;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{MetaError, Result};
use crate::models::{Family, Model, Params, StudyTerm};
use crate::optimize::{covariance_from_hessian, hessian, nelder_mead, NelderMeadOptions};
use crate::selection::{
    a_probit, solve_alpha_kernels, study_kernels, SelectionMethod, SelectionParams,
};
use crate::special::{ln_norm_cdf, norm_quantile};

/// Value handed to the optimiser when `α` cannot be solved for.
const PENALTY: f64 = 1e10;

/// `|β̂|` above this is reported as a likely boundary solution.
const BETA_BOUNDARY: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Extra starting points `(θ, ln τ, β)`; `β` is ignored by the MLE.
    pub starts: Vec<[f64; 3]>,
    /// Also try the built-in starting points: the MLE `(θ, τ)` paired with
    /// each of `beta_starts`, plus a moment start at `β = 1`.
    pub default_starts: bool,
    pub beta_starts: Vec<f64>,
    /// Optional closed range for `β`; points outside it are rejected.
    pub beta_range: Option<[f64; 2]>,
    pub max_iter: usize,
    pub ftol: f64,
    /// Relative finite-difference step of the Hessian.
    pub hessian_step: f64,
    pub ci_level: f64,
    pub method: SelectionMethod,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            starts: Vec::new(),
            default_starts: true,
            beta_starts: vec![0.5, -0.5, 2.0, -2.0],
            beta_range: None,
            max_iter: 2000,
            ftol: 1e-9,
            hessian_step: 1e-4,
            ci_level: 0.95,
            method: SelectionMethod::ExactSum,
        }
    }
}

impl FitOptions {
    fn validate(&self) -> Result<()> {
        if !(self.ftol > 0.0) {
            return Err(MetaError::Config("ftol must be positive".into()));
        }
        if !self.default_starts && self.starts.is_empty() {
            return Err(MetaError::Config("no starting points".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(MetaError::Config("ci_level must lie in (0, 1)".into()));
        }
        if !(self.hessian_step > 0.0) {
            return Err(MetaError::Config("hessian_step must be positive".into()));
        }
        Ok(())
    }

    fn nm(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            ftol: self.ftol,
            xtol: 1e-6,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intervals {
    pub level: f64,
    pub theta: Interval,
    pub tau: Interval,
    pub beta: Option<Interval>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Covariance came from the positive part of an indefinite information matrix.
    pub pseudo_inverse: bool,
    /// `|β̂|` is implausibly large.
    pub beta_boundary: bool,
    /// Objective evaluations where `α` could not be solved for.
    pub penalized: usize,
    pub evaluations: usize,
    pub starts: usize,
    /// Largest asymmetry of the Hessian, relative to its largest entry.
    pub hessian_asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    /// Marginal publication probability assumed by the fit (1 = unadjusted).
    pub p: f64,
    pub theta: f64,
    pub tau: f64,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub loglik: f64,
    /// Over `(θ, τ)` or `(θ, τ, β)` on the natural scale.
    pub covariance: Vec<Vec<f64>>,
    pub ci: Intervals,
    pub converged: bool,
    pub n_studies: usize,
    /// Studies that carry likelihood information.
    pub n_effective: usize,
    pub diagnostics: Diagnostics,
}

impl FitResult {
    pub fn se(&self) -> Vec<f64> {
        (0..self.covariance.len())
            .map(|i| self.covariance[i][i].max(0.0).sqrt())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit results serialize")
    }

    pub const CSV_HEADER: &'static str =
        "model,p,theta,theta_lo,theta_hi,tau,tau_lo,tau_hi,beta,alpha,loglik,converged,n_effective";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family.name(),
            self.p,
            self.theta,
            self.ci.theta.lo,
            self.ci.theta.hi,
            self.tau,
            self.ci.tau.lo,
            self.ci.tau.hi,
            opt(self.beta),
            opt(self.alpha),
            self.loglik,
            self.converged,
            self.n_effective
        )
    }
}

/// Wald intervals `estimate ± z·se`; the τ interval is cut at zero.
pub fn wald_ci(fit: &FitResult, level: f64) -> Intervals {
    let z = norm_quantile(0.5 + 0.5 * level);
    let se = fit.se();
    let iv = |x: f64, s: f64| Interval {
        lo: x - z * s,
        hi: x + z * s,
    };
    let mut tau = iv(fit.tau, se[1]);
    tau.lo = tau.lo.max(0.0);
    Intervals {
        level,
        theta: iv(fit.theta, se[0]),
        tau,
        beta: fit.beta.map(|b| iv(b, se[2])),
    }
}

/// Prepared data for repeated objective evaluation.
pub struct Problem<'a> {
    model: &'a Model,
    terms: Vec<StudyTerm>,
    n_studies: usize,
    method: SelectionMethod,
}

impl<'a> Problem<'a> {
    pub fn new(model: &'a Model, ds: &Dataset, method: SelectionMethod) -> Result<Self> {
        let all = model.prepare(ds)?;
        let n_studies = all.len();
        let terms: Vec<StudyTerm> = all.into_iter().filter(|t| t.informative()).collect();
        Ok(Problem {
            model,
            terms,
            n_studies,
            method,
        })
    }

    pub fn n_effective(&self) -> usize {
        self.terms.len()
    }

    pub fn loglik(&self, p: &Params) -> f64 {
        self.model.loglik_terms(&self.terms, p)
    }

    /// Conditional log-likelihood at a given `α`.
    pub fn conditional_at(&self, p: &Params, s: &SelectionParams) -> f64 {
        let kernels = study_kernels(self.model, &self.terms, p, self.method);
        let sel: f64 = self
            .terms
            .iter()
            .map(|t| ln_norm_cdf(s.alpha + s.beta * t.t_obs))
            .sum();
        let norm: f64 = kernels.iter().map(|k| k.prob(s).ln()).sum();
        self.loglik(p) + sel - norm
    }

    /// Conditional log-likelihood with `α` profiled out; returns `(ℓ, α̂)`.
    pub fn profiled(
        &self,
        p: &Params,
        beta: f64,
        prob: f64,
        guess: Option<f64>,
    ) -> Result<(f64, f64)> {
        let kernels = study_kernels(self.model, &self.terms, p, self.method);
        let alpha = solve_alpha_kernels(&kernels, beta, prob, guess)?;
        let s = SelectionParams::new(alpha, beta);
        let sel: f64 = self
            .terms
            .iter()
            .map(|t| ln_norm_cdf(alpha + beta * t.t_obs))
            .sum();
        let norm: f64 = kernels.iter().map(|k| k.prob(&s).ln()).sum();
        Ok((self.loglik(p) + sel - norm, alpha))
    }

    /// Inverse-variance moment estimates `(θ, τ)` from the empirical effects.
    fn moment_start(&self) -> (f64, f64) {
        let (mut sw, mut swy, mut sw2) = (0.0, 0.0, 0.0);
        for t in &self.terms {
            let w = 1.0 / (t.effect.se * t.effect.se);
            sw += w;
            swy += w * t.effect.theta_hat;
            sw2 += w * w;
        }
        let fixed = swy / sw;
        let q: f64 = self
            .terms
            .iter()
            .map(|t| ((t.effect.theta_hat - fixed) / t.effect.se).powi(2))
            .sum();
        let k = self.terms.len() as f64;
        let tau2 = ((q - (k - 1.0)) / (sw - sw2 / sw)).max(0.0);
        let (mut sw, mut swy) = (0.0, 0.0);
        for t in &self.terms {
            let w = 1.0 / (t.effect.se * t.effect.se + tau2);
            sw += w;
            swy += w * t.effect.theta_hat;
        }
        (swy / sw, tau2.sqrt())
    }
}

// The optimiser works on a signed τ: every likelihood here depends on τ only
// through τ², so the objective is smooth through zero and τ̂ = |τ|.
fn tau_of(z: f64) -> f64 {
    z.abs()
}

fn check_size(pr: &Problem) -> Result<()> {
    if pr.n_effective() < 2 {
        return Err(MetaError::TooFewStudies(pr.n_effective()));
    }
    Ok(())
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn asymmetry(h: &DMatrix<f64>) -> f64 {
    let scale = h
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    (h - h.transpose())
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        / scale
}

/// Conditional-on-publication log-likelihood at explicit `(θ, τ, α, β)`.
/// The parameter-free term of the margins is omitted.
pub fn conditional_loglik(
    model: &Model,
    ds: &Dataset,
    p: &Params,
    s: &SelectionParams,
    method: SelectionMethod,
) -> Result<f64> {
    Ok(Problem::new(model, ds, method)?.conditional_at(p, s))
}

/// Selection term `Σ ln a(t_i)` alone, handy for checks.
pub fn selection_term(model: &Model, ds: &Dataset, s: &SelectionParams) -> Result<f64> {
    let pr = Problem::new(model, ds, SelectionMethod::ExactSum)?;
    Ok(pr.terms.iter().map(|t| a_probit(t.t_obs, s).ln()).sum())
}

/// Unadjusted maximum likelihood over `(θ, τ)`.
pub fn fit_mle(model: &Model, ds: &Dataset, opts: &FitOptions) -> Result<FitResult> {
    opts.validate()?;
    let pr = Problem::new(model, ds, opts.method)?;
    check_size(&pr)?;
    Ok(fit_mle_problem(&pr, opts))
}

fn fit_mle_problem(pr: &Problem, opts: &FitOptions) -> FitResult {
    let objective = |z: &[f64]| -pr.loglik(&Params::new(z[0], tau_of(z[1])));
    let mut starts: Vec<[f64; 2]> = opts.starts.iter().map(|s| [s[0], s[1].exp()]).collect();
    if opts.default_starts {
        let (th, tau) = pr.moment_start();
        starts.push([th, tau.max(0.1)]);
        starts.push([th, 1.0]);
    }
    let nm = opts.nm();
    let steps = [0.25, 0.25];
    let mut evaluations = 0;
    let mut best: Option<crate::optimize::Minimum> = None;
    for s in &starts {
        let m = nelder_mead(objective, s, &steps, &nm);
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    // One restart from the optimum guards against a collapsed simplex.
    let again = nelder_mead(objective, &best.x, &steps, &nm);
    evaluations += again.evaluations;
    if again.value <= best.value {
        best = crate::optimize::Minimum {
            converged: again.converged,
            ..again
        };
    }

    let theta = best.x[0];
    let tau = tau_of(best.x[1]);
    let natural = |x: &[f64]| pr.loglik(&Params::new(x[0], x[1].abs()));
    let h = hessian(natural, &[theta, tau], opts.hessian_step);
    let (cov, pinv) = covariance_from_hessian(&h);
    let mut fit = FitResult {
        family: pr.model.family(),
        p: 1.0,
        theta,
        tau,
        beta: None,
        alpha: None,
        loglik: -best.value,
        covariance: to_rows(&cov),
        ci: Intervals {
            level: opts.ci_level,
            theta: Interval {
                lo: theta,
                hi: theta,
            },
            tau: Interval { lo: tau, hi: tau },
            beta: None,
        },
        converged: best.converged,
        n_studies: pr.n_studies,
        n_effective: pr.n_effective(),
        diagnostics: Diagnostics {
            pseudo_inverse: pinv,
            beta_boundary: false,
            penalized: 0,
            evaluations,
            starts: starts.len(),
            hessian_asymmetry: asymmetry(&h),
        },
    };
    fit.ci = wald_ci(&fit, opts.ci_level);
    fit
}

/// Selection-adjusted fit at marginal publication probability `p`.
/// `p = 1` is the unadjusted MLE.
pub fn fit_conditional(
    model: &Model,
    ds: &Dataset,
    p: f64,
    opts: &FitOptions,
) -> Result<FitResult> {
    opts.validate()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(MetaError::InvalidProbability(p));
    }
    let pr = Problem::new(model, ds, opts.method)?;
    check_size(&pr)?;
    let mle = fit_mle_problem(&pr, opts);
    if p == 1.0 {
        return Ok(mle);
    }
    Ok(fit_conditional_problem(&pr, p, opts, &mle))
}

pub(crate) fn fit_conditional_problem(
    pr: &Problem,
    p: f64,
    opts: &FitOptions,
    mle: &FitResult,
) -> FitResult {
    let guess = Cell::new(None::<f64>);
    let penalized = Cell::new(0usize);
    let objective = |z: &[f64]| {
        if let Some([lo, hi]) = opts.beta_range {
            if !(z[2] >= lo && z[2] <= hi) {
                return PENALTY;
            }
        }
        let params = Params::new(z[0], tau_of(z[1]));
        match pr.profiled(&params, z[2], p, guess.get()) {
            Ok((ll, a)) => {
                guess.set(Some(a));
                -ll
            }
            Err(_) => {
                penalized.set(penalized.get() + 1);
                PENALTY
            }
        }
    };

    let mut starts: Vec<[f64; 3]> = opts
        .starts
        .iter()
        .map(|s| [s[0], s[1].exp(), s[2]])
        .collect();
    if opts.default_starts {
        let tau = mle.tau.max(0.05);
        for &beta in &opts.beta_starts {
            starts.push([mle.theta, tau, beta]);
        }
        let (th, tau) = pr.moment_start();
        starts.push([th, tau.max(0.1), 1.0]);
    }
    if let Some([lo, hi]) = opts.beta_range {
        for s in &mut starts {
            s[2] = s[2].clamp(lo, hi);
        }
    }
    let nm = opts.nm();
    let steps = [0.25, 0.25, 0.5];
    let mut evaluations = 0;
    let mut best: Option<crate::optimize::Minimum> = None;
    for s in &starts {
        guess.set(None);
        let m = nelder_mead(objective, s, &steps, &nm);
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    guess.set(None);
    let again = nelder_mead(objective, &best.x, &steps, &nm);
    evaluations += again.evaluations;
    if again.value <= best.value {
        best = again;
    }

    let (theta, tau, beta) = (best.x[0], tau_of(best.x[1]), best.x[2]);
    let alpha = pr
        .profiled(&Params::new(theta, tau), beta, p, None)
        .map(|(_, a)| a)
        .ok();
    let natural = |x: &[f64]| match pr.profiled(&Params::new(x[0], x[1].abs()), x[2], p, alpha) {
        Ok((ll, _)) => ll,
        Err(_) => f64::NAN,
    };
    let h = hessian(natural, &[theta, tau, beta], opts.hessian_step);
    let (cov, pinv) = covariance_from_hessian(&h);
    let mut fit = FitResult {
        family: pr.model.family(),
        p,
        theta,
        tau,
        beta: Some(beta),
        alpha,
        loglik: -best.value,
        covariance: to_rows(&cov),
        ci: mle.ci,
        converged: best.converged && alpha.is_some() && best.value < PENALTY,
        n_studies: pr.n_studies,
        n_effective: pr.n_effective(),
        diagnostics: Diagnostics {
            pseudo_inverse: pinv,
            beta_boundary: beta.abs() > BETA_BOUNDARY,
            penalized: penalized.get(),
            evaluations,
            starts: starts.len(),
            hessian_asymmetry: asymmetry(&h),
        },
    };
    fit.ci = wald_ci(&fit, opts.ci_level);
    fit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{cvc_trials, StudyData, StudyRecord};
    use crate::models::ModelSpec;
    use approx::assert_abs_diff_eq;

    fn model(f: Family) -> Model {
        Model::new(ModelSpec::new(f)).unwrap()
    }

    #[test]
    fn flat_selection_cancels() {
        let ds = cvc_trials();
        for f in [Family::Hn, Family::Bn2, Family::Nn] {
            let m = model(f);
            let p = Params::new(-1.1, 0.6);
            let base = m.loglik_unconditional(&ds, &p).unwrap();
            for alpha in [-1.0, 0.2, 1.7] {
                for method in [SelectionMethod::ExactSum, SelectionMethod::NormalApprox] {
                    let c =
                        conditional_loglik(&m, &ds, &p, &SelectionParams::new(alpha, 0.0), method)
                            .unwrap();
                    assert_abs_diff_eq!(c, base, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_study_three_terms() {
        let rec = StudyRecord::new("a", StudyData::OneGroupBinary { y: 9, n: 210 }).unwrap();
        let ds = Dataset::new(vec![rec], "one").unwrap();
        let m = model(Family::Bn1);
        let p = Params::new(-3.0, 0.2);
        let s = SelectionParams::new(0.4, 1.5);
        let margins = crate::models::Margins::OneGroupBinary { n: 210 };
        let f = m.marginal_pmf(9, &margins, &p).unwrap().ln();
        let t = crate::dataset::t_one_group_binary(9, 210);
        let a = a_probit(t, &s).ln();
        let sel =
            crate::selection::select_prob_margins(&m, &margins, &p, &s, SelectionMethod::ExactSum)
                .unwrap()
                .ln();
        let got = conditional_loglik(&m, &ds, &p, &s, SelectionMethod::ExactSum).unwrap();
        assert_abs_diff_eq!(got, f + a - sel, epsilon = 1e-12);
    }

    #[test]
    fn hn_mle_on_bundled_table() {
        let fit = fit_mle(&model(Family::Hn), &cvc_trials(), &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.n_effective, 17);
        assert_eq!(fit.n_studies, 18);
        // Values from an independent SciPy implementation.
        assert_abs_diff_eq!(fit.theta, -1.3532, epsilon = 2e-3);
        assert_abs_diff_eq!(fit.tau, 0.8327, epsilon = 5e-3);
        assert_abs_diff_eq!(fit.ci.theta.lo, -2.0412, epsilon = 5e-3);
        assert_abs_diff_eq!(fit.ci.theta.hi, -0.6651, epsilon = 5e-3);
        assert!(fit.diagnostics.hessian_asymmetry < 1e-6);
        let json = fit.to_json();
        assert!(json.contains("\"theta\""));
    }

    #[test]
    fn unit_probability_is_plain_mle() {
        let m = model(Family::Bn2);
        let ds = cvc_trials();
        let a = fit_mle(&m, &ds, &FitOptions::default()).unwrap();
        let b = fit_conditional(&m, &ds, 1.0, &FitOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(b.beta.is_none() && b.alpha.is_none());
    }

    #[test]
    fn label_swap_negates_mle() {
        let m = model(Family::Hn);
        let ds = cvc_trials();
        let a = fit_mle(&m, &ds, &FitOptions::default()).unwrap();
        let b = fit_mle(&m, &ds.swap_groups(), &FitOptions::default()).unwrap();
        assert_abs_diff_eq!(a.theta, -b.theta, epsilon = 1e-5);
        assert_abs_diff_eq!(a.tau, b.tau, epsilon = 1e-4);
    }

    #[test]
    fn nn_fit_and_interval() {
        let fit = fit_mle(&model(Family::Nn), &cvc_trials(), &FitOptions::default()).unwrap();
        assert_eq!(fit.n_effective, 18);
        assert_abs_diff_eq!(fit.theta, -0.9548, epsilon = 2e-3);
        assert_abs_diff_eq!(fit.ci.theta.lo, -1.4146, epsilon = 3e-3);
        assert_abs_diff_eq!(fit.ci.theta.hi, -0.4949, epsilon = 3e-3);
        assert!(fit.tau < 1e-3);
        assert!(fit.ci.tau.lo >= 0.0);
    }

    #[test]
    fn wald_interval_degenerate_and_level() {
        let mut fit = fit_mle(&model(Family::Nn), &cvc_trials(), &FitOptions::default()).unwrap();
        fit.covariance = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let ci = wald_ci(&fit, 0.95);
        assert_eq!(ci.theta.lo, fit.theta);
        assert_eq!(ci.theta.hi, fit.theta);
        fit.covariance = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        let ci = wald_ci(&fit, 0.95);
        assert_abs_diff_eq!(ci.theta.hi - fit.theta, 1.959964, epsilon = 1e-6);
    }

    #[test]
    fn too_few_studies() {
        let rec = StudyRecord::new("a", StudyData::OneGroupBinary { y: 9, n: 210 }).unwrap();
        let ds = Dataset::new(vec![rec], "one").unwrap();
        assert_eq!(
            fit_mle(&model(Family::Bn1), &ds, &FitOptions::default()).unwrap_err(),
            MetaError::TooFewStudies(1)
        );
    }

    #[test]
    fn adjusted_hn_is_local_optimum() {
        let m = model(Family::Hn);
        let ds = cvc_trials();
        let fit = fit_conditional(&m, &ds, 0.7, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.theta, -0.845, epsilon = 0.01);
        let beta = fit.beta.unwrap();
        assert!(beta < 0.0);
        let pr = Problem::new(&m, &ds, SelectionMethod::ExactSum).unwrap();
        let at =
            |th: f64, tau: f64, b: f64| pr.profiled(&Params::new(th, tau), b, 0.7, None).unwrap().0;
        let top = at(fit.theta, fit.tau, beta);
        assert_abs_diff_eq!(top, fit.loglik, epsilon = 1e-8);
        for (dt, du, db) in [
            (0.05, 0.0, 0.0),
            (-0.05, 0.0, 0.0),
            (0.0, 0.05, 0.0),
            (0.0, -0.05, 0.0),
            (0.0, 0.0, 0.1),
            (0.0, 0.0, -0.1),
        ] {
            assert!(at(fit.theta + dt, fit.tau + du, beta + db) < top);
        }
        let ci = fit.ci.theta;
        assert!(ci.contains(0.0));
        assert!(fit.diagnostics.hessian_asymmetry < 1e-6);
    }
}
