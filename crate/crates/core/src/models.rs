//! Within-study likelihoods and their normal random-effect mixtures.
//!
//! Supported families:
//!
//! * `NN`  – normal-normal model on `(x, y) = (1/se, effect/se)`.
//! * `BN1` – one-group binomial: `y | θi ~ Bin(n, expit(θi))`.
//! * `BN2` – two-group binomial conditional on the total events:
//!   `y1 | θi ~ Bin(y, expit(ln(n1/n0) + θi))`.
//! * `HN`  – Fisher's noncentral hypergeometric law of `y1` given the
//!   margins `(n1, n0, y)` with log odds ratio `θi`.
//! * `PN1` – one-group Poisson: `y | θi ~ Poisson(T exp(θi))`.
//! * `PN2` – two-group Poisson conditional on the total events:
//!   `y1 | θi ~ Bin(y, T1 exp(θi) / (T1 exp(θi) + T0))`.
//!
//! In every family `θi ~ N(θ, τ²)` and the mixture integral is evaluated with
//! a fixed Gauss–Hermite rule.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    self, empirical_effect, Dataset, Design, EffectSummary, StudyData, StudyRecord, ZeroCellPolicy,
};
use crate::error::{MetaError, Result};
use crate::quadrature::{GhRule, DEFAULT_ORDER};
use crate::special::{ln_choose, ln_factorial, log1p_exp, log_sum_exp};

/// Probabilities are floored here before taking logs.
pub const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Nn,
    Bn1,
    Bn2,
    Hn,
    Pn1,
    Pn2,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Nn,
        Family::Bn1,
        Family::Bn2,
        Family::Hn,
        Family::Pn1,
        Family::Pn2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Nn => "nn",
            Family::Bn1 => "bn1",
            Family::Bn2 => "bn2",
            Family::Hn => "hn",
            Family::Pn1 => "pn1",
            Family::Pn2 => "pn2",
        }
    }

    pub fn compatible(self, design: Design) -> bool {
        match self {
            Family::Nn => true,
            Family::Bn1 => design == Design::OneGroupBinary,
            Family::Bn2 | Family::Hn => design == Design::TwoGroupBinary,
            Family::Pn1 => design == Design::OneGroupCount,
            Family::Pn2 => design == Design::TwoGroupCount,
        }
    }

    pub fn check(self, design: Design) -> Result<()> {
        if self.compatible(design) {
            Ok(())
        } else {
            Err(MetaError::Incompatible {
                family: self.to_string(),
                design: design.to_string(),
            })
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().to_uppercase())
    }
}

impl FromStr for Family {
    type Err = MetaError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| MetaError::Config(format!("unknown model `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub quad_order: usize,
    /// Tail mass dropped when truncating the unbounded PN1 support.
    pub pn_tail: f64,
}

impl ModelSpec {
    pub fn new(family: Family) -> Self {
        ModelSpec {
            family,
            quad_order: DEFAULT_ORDER,
            pn_tail: 1e-10,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.quad_order = order;
        self
    }
}

/// The conditioning statistics of one study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Margins {
    /// Precision `x = 1/se` (NN).
    Precision { x: f64 },
    /// Group size (BN1).
    OneGroupBinary { n: u64 },
    /// Group sizes and total events (BN2, HN).
    TwoGroupBinary { n1: u64, n0: u64, total: u64 },
    /// Exposure (PN1).
    OneGroupCount { t: f64 },
    /// Exposures and total events (PN2).
    TwoGroupCount { t1: f64, t0: f64, total: u64 },
}

impl Margins {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| {
            Err(MetaError::InvalidStudy {
                study: "margins".into(),
                msg: msg.into(),
            })
        };
        match *self {
            Margins::Precision { x } if !(x.is_finite() && x > 0.0) => {
                bad("precision must be positive")
            }
            Margins::OneGroupBinary { n: 0 } => bad("group size must be positive"),
            Margins::TwoGroupBinary { n1, n0, total } if n1 == 0 || n0 == 0 || total > n1 + n0 => {
                bad("invalid two-group margins")
            }
            Margins::OneGroupCount { t } if !(t.is_finite() && t > 0.0) => {
                bad("exposure must be positive")
            }
            Margins::TwoGroupCount { t1, t0, .. }
                if !(t1.is_finite() && t1 > 0.0 && t0.is_finite() && t0 > 0.0) =>
            {
                bad("exposure must be positive")
            }
            _ => Ok(()),
        }
    }

    fn family_matches(&self, family: Family) -> bool {
        matches!(
            (self, family),
            (Margins::Precision { .. }, Family::Nn)
                | (Margins::OneGroupBinary { .. }, Family::Bn1)
                | (Margins::TwoGroupBinary { .. }, Family::Bn2 | Family::Hn)
                | (Margins::OneGroupCount { .. }, Family::Pn1)
                | (Margins::TwoGroupCount { .. }, Family::Pn2)
        )
    }

    fn kind(&self) -> &'static str {
        match self {
            Margins::Precision { .. } => "precision",
            Margins::OneGroupBinary { .. } => "one-group-binary",
            Margins::TwoGroupBinary { .. } => "two-group-binary",
            Margins::OneGroupCount { .. } => "one-group-count",
            Margins::TwoGroupCount { .. } => "two-group-count",
        }
    }
}

/// Common effect and heterogeneity standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub theta: f64,
    pub tau: f64,
}

impl Params {
    pub fn new(theta: f64, tau: f64) -> Self {
        Params { theta, tau }
    }
}

/// Support bounds of the conditioned outcome for the two-group binary margins.
fn two_group_bounds(n1: u64, n0: u64, total: u64) -> (u64, u64) {
    (total.saturating_sub(n0), total.min(n1))
}

/// Fisher's noncentral hypergeometric pmf of `y1` given `(n1, n0, y)` at log
/// odds ratio `theta_i`.
pub fn nchg_pmf(y1: u64, m: &Margins, theta_i: f64) -> Result<f64> {
    let Margins::TwoGroupBinary { n1, n0, total } = *m else {
        return Err(MetaError::Config(format!(
            "noncentral hypergeometric pmf needs two-group binary margins, got {}",
            m.kind()
        )));
    };
    m.validate()?;
    let (lo, hi) = two_group_bounds(n1, n0, total);
    if y1 < lo || y1 > hi {
        return Err(MetaError::OutsideSupport {
            outcome: y1,
            lo,
            hi,
        });
    }
    let logs: Vec<f64> = (lo..=hi)
        .map(|j| ln_choose(n1, j) + ln_choose(n0, total - j) + theta_i * j as f64)
        .collect();
    let norm = log_sum_exp(&logs);
    Ok((logs[(y1 - lo) as usize] - norm).exp())
}

/// Margins with the parameter-free pieces of the likelihood precomputed:
/// log combinatorial coefficients and t-statistics across the support.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedMargins {
    pub margins: Margins,
    family: Family,
    lo: u64,
    /// Static upper bound (PN1 grows its support on demand).
    hi: u64,
    ln_coef: Vec<f64>,
    t_support: Vec<f64>,
}

impl PreparedMargins {
    pub fn family(&self) -> Family {
        self.family
    }

    /// Studies whose outcome has a single possible value carry no
    /// information about `(θ, τ)`.
    pub fn informative(&self) -> bool {
        match self.family {
            Family::Nn | Family::Pn1 => true,
            _ => self.lo < self.hi,
        }
    }

    pub(crate) fn t_at(&self, j: u64) -> f64 {
        match self.margins {
            Margins::OneGroupCount { t } if j > self.hi || self.t_support.is_empty() => {
                dataset::t_one_group_count(j, t)
            }
            _ => self.t_support[(j - self.lo) as usize],
        }
    }

    fn ln_coef_at(&self, j: u64) -> f64 {
        match self.family {
            Family::Pn1 => {
                if (j as usize) < self.ln_coef.len() {
                    self.ln_coef[j as usize]
                } else {
                    -ln_factorial(j)
                }
            }
            _ => self.ln_coef[(j - self.lo) as usize],
        }
    }
}

/// One study ready for likelihood evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTerm {
    pub id: String,
    pub prepared: PreparedMargins,
    /// Observed outcome on the support (`y` or `y1`); zero for NN.
    pub outcome: u64,
    /// Observed t-statistic under the zero-cell policy.
    pub t_obs: f64,
    pub effect: EffectSummary,
}

impl StudyTerm {
    pub fn informative(&self) -> bool {
        self.prepared.informative()
    }
}

/// NN coordinates `(x, y) = (1/se, effect/se)`.
pub fn nn_components(effect: &EffectSummary) -> (f64, f64) {
    (1.0 / effect.se, effect.theta_hat / effect.se)
}

/// A likelihood family with its quadrature rule.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    rule: GhRule,
}

impl Model {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let rule = GhRule::new(spec.quad_order)?;
        if !(spec.pn_tail > 0.0 && spec.pn_tail < 1.0) {
            return Err(MetaError::Config("pn_tail must lie in (0, 1)".into()));
        }
        Ok(Model { spec, rule })
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn rule(&self) -> &GhRule {
        &self.rule
    }

    /// Quadrature nodes and normalised weights for `θi ~ N(θ, τ²)`.
    pub fn re_nodes(&self, p: &Params) -> Vec<(f64, f64)> {
        self.rule.re_nodes(p.theta, p.tau)
    }

    fn check_margins(&self, m: &Margins) -> Result<()> {
        if !m.family_matches(self.family()) {
            return Err(MetaError::Incompatible {
                family: self.family().to_string(),
                design: m.kind().into(),
            });
        }
        m.validate()
    }

    pub fn prepare_margins(&self, m: &Margins) -> Result<PreparedMargins> {
        self.check_margins(m)?;
        let family = self.family();
        let (lo, hi, ln_coef, t_support) = match *m {
            Margins::Precision { .. } => (0, 0, vec![], vec![]),
            Margins::OneGroupBinary { n } => (
                0,
                n,
                (0..=n).map(|j| ln_choose(n, j)).collect(),
                (0..=n).map(|j| dataset::t_one_group_binary(j, n)).collect(),
            ),
            Margins::TwoGroupBinary { n1, n0, total } => {
                let (lo, hi) = two_group_bounds(n1, n0, total);
                let coef = (lo..=hi)
                    .map(|j| match family {
                        Family::Hn => ln_choose(n1, j) + ln_choose(n0, total - j),
                        _ => ln_choose(total, j),
                    })
                    .collect();
                let ts = (lo..=hi)
                    .map(|j| dataset::t_two_group_binary(j, n1, total - j, n0))
                    .collect();
                (lo, hi, coef, ts)
            }
            Margins::OneGroupCount { t } => {
                // Cache a generous prefix; anything beyond is computed on demand.
                let cap = (4.0 * t).min(4096.0) as u64 + 16;
                (
                    0,
                    cap,
                    (0..=cap).map(|j| -ln_factorial(j)).collect(),
                    (0..=cap)
                        .map(|j| dataset::t_one_group_count(j, t))
                        .collect(),
                )
            }
            Margins::TwoGroupCount { t1, t0, total } => (
                0,
                total,
                (0..=total).map(|j| ln_choose(total, j)).collect(),
                (0..=total)
                    .map(|j| dataset::t_two_group_count(j, t1, total - j, t0))
                    .collect(),
            ),
        };
        Ok(PreparedMargins {
            margins: *m,
            family,
            lo,
            hi,
            ln_coef,
            t_support,
        })
    }

    /// Outcome support for the given margins. Only PN1 depends on `p`: its
    /// support is cut where the mixture tail mass at the widest quadrature
    /// node falls below `pn_tail`.
    pub fn support(&self, m: &Margins, p: &Params) -> Result<RangeInclusive<u64>> {
        self.check_margins(m)?;
        Ok(match *m {
            Margins::Precision { .. } => 0..=0,
            Margins::OneGroupBinary { n } => 0..=n,
            Margins::TwoGroupBinary { n1, n0, total } => {
                let (lo, hi) = two_group_bounds(n1, n0, total);
                lo..=hi
            }
            Margins::OneGroupCount { t } => 0..=self.poisson_cut(t, p),
            Margins::TwoGroupCount { total, .. } => 0..=total,
        })
    }

    fn poisson_cut(&self, t: f64, p: &Params) -> u64 {
        let widest = self
            .re_nodes(p)
            .iter()
            .map(|&(x, _)| x)
            .fold(f64::NEG_INFINITY, f64::max);
        let lambda = t * widest.exp();
        let eps = self.spec.pn_tail;
        // Walk the pmf from the mode outwards in log space.
        let ln_lambda = lambda.ln();
        let mut cdf = 0.0;
        let mut j: u64 = 0;
        loop {
            let lp = j as f64 * ln_lambda - lambda - ln_factorial(j);
            cdf += lp.exp();
            if (j as f64) >= lambda && 1.0 - cdf < eps {
                return j;
            }
            if j > 10_000_000 {
                return j;
            }
            j += 1;
        }
    }

    fn support_of(&self, pm: &PreparedMargins, p: &Params) -> (u64, u64) {
        match pm.margins {
            Margins::OneGroupCount { t } => (0, self.poisson_cut(t, p)),
            _ => (pm.lo, pm.hi),
        }
    }

    /// Within-study log pmf over `lo..=hi` at `θi = x`, written into `out`.
    fn within_log_pmf(&self, pm: &PreparedMargins, x: f64, lo: u64, hi: u64, out: &mut Vec<f64>) {
        out.clear();
        match pm.margins {
            Margins::Precision { .. } => out.push(0.0),
            Margins::OneGroupBinary { n } => {
                let lnorm = n as f64 * log1p_exp(x);
                out.extend((lo..=hi).map(|j| pm.ln_coef_at(j) + j as f64 * x - lnorm));
            }
            Margins::TwoGroupBinary { n1, n0, total } => match pm.family {
                Family::Hn => {
                    out.extend((lo..=hi).map(|j| pm.ln_coef_at(j) + j as f64 * x));
                    let norm = log_sum_exp(out);
                    out.iter_mut().for_each(|v| *v -= norm);
                }
                _ => {
                    let eta = (n1 as f64 / n0 as f64).ln() + x;
                    binomial_logits(pm, eta, total, lo, hi, out);
                }
            },
            Margins::OneGroupCount { t } => {
                let ln_mu = t.ln() + x;
                let mu = ln_mu.exp();
                out.extend((lo..=hi).map(|j| pm.ln_coef_at(j) + j as f64 * ln_mu - mu));
            }
            Margins::TwoGroupCount { t1, t0, total } => {
                let eta = (t1 / t0).ln() + x;
                binomial_logits(pm, eta, total, lo, hi, out);
            }
        }
    }

    /// Marginal pmf over the whole support: `(lo, probabilities)`.
    pub fn marginal_pmf_vec(&self, pm: &PreparedMargins, p: &Params) -> (u64, Vec<f64>) {
        let (lo, hi) = self.support_of(pm, p);
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        let mut buf = Vec::with_capacity(probs.len());
        for (x, w) in self.re_nodes(p) {
            self.within_log_pmf(pm, x, lo, hi, &mut buf);
            for (acc, lp) in probs.iter_mut().zip(&buf) {
                *acc += w * lp.exp();
            }
        }
        (lo, probs)
    }

    /// `ln f_P(y | margins)`, floored at `ln(PROB_FLOOR)`.
    pub fn ln_marginal_at(&self, pm: &PreparedMargins, y: u64, p: &Params) -> f64 {
        let mut buf = Vec::new();
        let mut terms = Vec::with_capacity(self.rule.order());
        for (x, w) in self.re_nodes(p) {
            let lp = match (pm.margins, pm.family) {
                (Margins::TwoGroupBinary { .. }, Family::Hn) => {
                    self.within_log_pmf(pm, x, pm.lo, pm.hi, &mut buf);
                    buf[(y - pm.lo) as usize]
                }
                _ => {
                    self.within_log_pmf(pm, x, y, y, &mut buf);
                    buf[0]
                }
            };
            terms.push(w.ln() + lp);
        }
        log_sum_exp(&terms).max(PROB_FLOOR.ln())
    }

    /// Marginal (population) probability of outcome `y` given the margins.
    pub fn marginal_pmf(&self, y: u64, m: &Margins, p: &Params) -> Result<f64> {
        if self.family() == Family::Nn {
            return Err(MetaError::Config("NN has a density, not a pmf".into()));
        }
        let pm = self.prepare_margins(m)?;
        let range = self.support(m, p)?;
        if !range.contains(&y) {
            return Err(MetaError::OutsideSupport {
                outcome: y,
                lo: *range.start(),
                hi: *range.end(),
            });
        }
        let (lo, probs) = self.marginal_pmf_vec(&pm, p);
        Ok(probs[(y - lo) as usize])
    }

    /// Builds likelihood terms for every study; checks family/design compatibility.
    pub fn prepare(&self, ds: &Dataset) -> Result<Vec<StudyTerm>> {
        self.family().check(ds.design())?;
        ds.studies().iter().map(|s| self.prepare_study(s)).collect()
    }

    pub fn prepare_study(&self, s: &StudyRecord) -> Result<StudyTerm> {
        let effect = empirical_effect(s, ZeroCellPolicy::AddHalf)?;
        let (margins, outcome) = match (self.family(), s.data) {
            (Family::Nn, _) => (Margins::Precision { x: 1.0 / effect.se }, 0),
            (Family::Bn1, StudyData::OneGroupBinary { y, n }) => (Margins::OneGroupBinary { n }, y),
            (Family::Bn2 | Family::Hn, StudyData::TwoGroupBinary { y0, n0, y1, n1 }) => (
                Margins::TwoGroupBinary {
                    n1,
                    n0,
                    total: y0 + y1,
                },
                y1,
            ),
            (Family::Pn1, StudyData::OneGroupCount { y, t }) => (Margins::OneGroupCount { t }, y),
            (Family::Pn2, StudyData::TwoGroupCount { y0, t0, y1, t1 }) => (
                Margins::TwoGroupCount {
                    t1,
                    t0,
                    total: y0 + y1,
                },
                y1,
            ),
            (f, d) => {
                return Err(MetaError::Incompatible {
                    family: f.to_string(),
                    design: d.design().to_string(),
                })
            }
        };
        Ok(StudyTerm {
            id: s.id.clone(),
            prepared: self.prepare_margins(&margins)?,
            outcome,
            t_obs: effect.t,
            effect,
        })
    }

    /// Log-likelihood contribution of one study (zero for single-point supports).
    /// The NN term drops the constant `-ln(2π)/2`.
    pub fn term_loglik(&self, term: &StudyTerm, p: &Params) -> f64 {
        if !term.informative() {
            return 0.0;
        }
        match term.prepared.margins {
            Margins::Precision { x } => {
                let (_, y) = nn_components(&term.effect);
                let v = 1.0 + p.tau * p.tau * x * x;
                -0.5 * v.ln() - 0.5 * (y - p.theta * x).powi(2) / v
            }
            _ => self.ln_marginal_at(&term.prepared, term.outcome, p),
        }
    }

    /// Unconditional log-likelihood of prepared terms.
    pub fn loglik_terms(&self, terms: &[StudyTerm], p: &Params) -> f64 {
        terms.iter().map(|t| self.term_loglik(t, p)).sum()
    }

    /// Unconditional (no selection) log-likelihood of a dataset.
    pub fn loglik_unconditional(&self, ds: &Dataset, p: &Params) -> Result<f64> {
        let terms = self.prepare(ds)?;
        Ok(self.loglik_terms(&terms, p))
    }

    /// Mean of the conditioned outcome at `θi = x`, plus its variance, under
    /// the within-study law. HN uses Cornfield's approximation.
    pub(crate) fn outcome_moments(&self, pm: &PreparedMargins, x: f64) -> (f64, f64) {
        match pm.margins {
            Margins::Precision { .. } => (0.0, 0.0),
            Margins::OneGroupBinary { n } => {
                let pi = crate::special::expit(x);
                (n as f64 * pi, n as f64 * pi * (1.0 - pi))
            }
            Margins::TwoGroupBinary { n1, n0, total } => match pm.family {
                Family::Hn => cornfield_moments(n1 as f64, n0 as f64, total as f64, x),
                _ => {
                    let pi = crate::special::expit((n1 as f64 / n0 as f64).ln() + x);
                    (total as f64 * pi, total as f64 * pi * (1.0 - pi))
                }
            },
            Margins::OneGroupCount { t } => {
                let mu = t * x.exp();
                (mu, mu)
            }
            Margins::TwoGroupCount { t1, t0, total } => {
                let pi = crate::special::expit((t1 / t0).ln() + x);
                (total as f64 * pi, total as f64 * pi * (1.0 - pi))
            }
        }
    }

    /// t-statistic as a smooth function of a continuous outcome value,
    /// clamped half a unit inside the support.
    pub(crate) fn t_continuous(&self, pm: &PreparedMargins, y: f64) -> f64 {
        match pm.margins {
            Margins::Precision { .. } => 0.0,
            Margins::OneGroupBinary { n } => {
                let n = n as f64;
                let y = y.clamp(0.5, n - 0.5);
                let (th, se) = dataset::log_odds(y, n);
                th / se
            }
            Margins::TwoGroupBinary { n1, n0, total } => {
                let (lo, hi) = (pm.lo as f64 + 0.5, pm.hi as f64 - 0.5);
                let y1 = y.clamp(lo, hi.max(lo));
                let y0 = total as f64 - y1;
                let (th, se) = dataset::log_odds_ratio(y1, n1 as f64, y0, n0 as f64);
                th / se
            }
            Margins::OneGroupCount { t } => {
                let (th, se) = dataset::log_rate(y.max(0.5), t);
                th / se
            }
            Margins::TwoGroupCount { t1, t0, total } => {
                let total = total as f64;
                let y1 = y.clamp(0.5, (total - 0.5).max(0.5));
                let (th, se) = dataset::log_rate_ratio(y1, t1, total - y1, t0);
                th / se
            }
        }
    }
}

fn binomial_logits(
    pm: &PreparedMargins,
    eta: f64,
    size: u64,
    lo: u64,
    hi: u64,
    out: &mut Vec<f64>,
) {
    let lnorm = size as f64 * log1p_exp(eta);
    out.extend((lo..=hi).map(|j| pm.ln_coef_at(j) + j as f64 * eta - lnorm));
}

/// Approximate mean and variance of Fisher's noncentral hypergeometric law.
fn cornfield_moments(n1: f64, n0: f64, y: f64, log_or: f64) -> (f64, f64) {
    let lo = (y - n0).max(0.0);
    let hi = y.min(n1);
    if hi <= lo {
        return (lo, 0.0);
    }
    // m (n0 - y + m) = e^θ (y - m)(n1 - m)
    let r = log_or.exp();
    let a = 1.0 - r;
    let b = n0 - y + r * (y + n1);
    let c = -r * y * n1;
    let m = if a.abs() < 1e-12 {
        -c / b
    } else {
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        // Numerically stable root choice.
        let q = -0.5 * (b + b.signum() * disc);
        let r1 = q / a;
        let r2 = c / q;
        if (lo..=hi).contains(&r2) {
            r2
        } else {
            r1
        }
    };
    let m = m.clamp(lo, hi);
    let inv = 1.0 / m.max(1e-12)
        + 1.0 / (y - m).max(1e-12)
        + 1.0 / (n1 - m).max(1e-12)
        + 1.0 / (n0 - y + m).max(1e-12);
    (m, 1.0 / inv)
}
