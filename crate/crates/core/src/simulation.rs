//! Monte Carlo experiments: generate meta-analyses subject to selective
//! publication and score the adjusted estimator against the NN-based
//! adjustment and the naive MLE on published studies.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{empirical_effect, Dataset, StudyData, StudyRecord, ZeroCellPolicy};
use crate::error::{MetaError, Result};
use crate::estimation::{fit_conditional, fit_mle, FitOptions, FitResult};
use crate::models::{nchg_pmf, Family, Margins, Model, ModelSpec, Params};
use crate::quadrature::DEFAULT_ORDER;
use crate::selection::{
    a_probit, selection_kernel, solve_alpha_kernels, SelectionKernel, SelectionMethod,
    SelectionParams,
};
use crate::special::{expit, norm_quantile};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SPARSE_META_THREADS";

/// Width of the t-statistic bins used to compress the population kernel.
const T_BIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Bn1,
    Bn2,
    Hn,
    Pn1,
    Pn2,
}

impl Experiment {
    pub fn family(self) -> Family {
        match self {
            Experiment::Bn1 => Family::Bn1,
            Experiment::Bn2 => Family::Bn2,
            Experiment::Hn => Family::Hn,
            Experiment::Pn1 => Family::Pn1,
            Experiment::Pn2 => Family::Pn2,
        }
    }

    fn two_group(self) -> bool {
        matches!(self, Experiment::Bn2 | Experiment::Hn | Experiment::Pn2)
    }
}

fn default_beta() -> f64 {
    2.0
}
fn default_n_range() -> [u64; 2] {
    [200, 400]
}
fn default_y_range() -> [u64; 2] {
    [15, 25]
}
fn default_quad() -> usize {
    DEFAULT_ORDER
}
fn default_method() -> SelectionMethod {
    SelectionMethod::NormalApprox
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub theta: f64,
    pub tau: f64,
    /// Studies per meta-analysis before selection.
    pub studies: usize,
    /// Marginal publication probability.
    pub p: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Group size range (exposure range for count designs), inclusive.
    #[serde(default = "default_n_range")]
    pub n_range: [u64; 2],
    /// Total-event range for two-group designs, inclusive.
    #[serde(default = "default_y_range")]
    pub y_range: [u64; 2],
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_quad")]
    pub quad_order: usize,
    /// Selection probabilities inside the adjusted fits.
    #[serde(default = "default_method")]
    pub method: SelectionMethod,
}

impl SimConfig {
    pub fn new(
        experiment: Experiment,
        theta: f64,
        tau: f64,
        studies: usize,
        p: f64,
        replicates: usize,
        seed: u64,
    ) -> Self {
        SimConfig {
            experiment,
            theta,
            tau,
            studies,
            p,
            beta: default_beta(),
            n_range: default_n_range(),
            y_range: default_y_range(),
            replicates,
            seed,
            quad_order: DEFAULT_ORDER,
            method: default_method(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| MetaError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MetaError::Config(m.into()));
        if self.studies < 2 {
            return bad("studies must be at least 2");
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(MetaError::InvalidProbability(self.p));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1");
        }
        if !(self.theta.is_finite()
            && self.tau.is_finite()
            && self.tau >= 0.0
            && self.beta.is_finite())
        {
            return bad("theta, tau and beta must be finite with tau >= 0");
        }
        let [lo, hi] = self.n_range;
        if lo == 0 || lo > hi {
            return bad("n_range must be a positive, ordered pair");
        }
        let [ylo, yhi] = self.y_range;
        if self.experiment.two_group() && (ylo > yhi || yhi > lo) {
            return bad("y_range must be ordered and not exceed the smallest group");
        }
        Ok(())
    }

    fn model(&self) -> Result<Model> {
        Model::new(ModelSpec::new(self.experiment.family()).with_order(self.quad_order))
    }

    fn params(&self) -> Params {
        Params::new(self.theta, self.tau)
    }

    /// All margins with their probability under the uniform design.
    fn margin_grid(&self) -> Vec<Margins> {
        let [lo, hi] = self.n_range;
        let [ylo, yhi] = self.y_range;
        let ns = lo..=hi;
        match self.experiment {
            Experiment::Bn1 => ns.map(|n| Margins::OneGroupBinary { n }).collect(),
            Experiment::Pn1 => ns.map(|n| Margins::OneGroupCount { t: n as f64 }).collect(),
            Experiment::Bn2 | Experiment::Hn | Experiment::Pn2 => {
                let mut out = Vec::new();
                for n1 in lo..=hi {
                    for n0 in lo..=hi {
                        for total in ylo..=yhi {
                            out.push(if self.experiment == Experiment::Pn2 {
                                Margins::TwoGroupCount {
                                    t1: n1 as f64,
                                    t0: n0 as f64,
                                    total,
                                }
                            } else {
                                Margins::TwoGroupBinary { n1, n0, total }
                            });
                        }
                    }
                }
                out
            }
        }
    }
}

/// Population distribution of the t-statistic, averaged exactly over the
/// margin design and compressed into narrow bins (weighted mean `t` per bin).
pub fn population_kernel(cfg: &SimConfig) -> Result<SelectionKernel> {
    cfg.validate()?;
    let model = cfg.model()?;
    let params = cfg.params();
    let grid = cfg.margin_grid();
    let weight = 1.0 / grid.len() as f64;
    let bins = grid
        .par_chunks(512)
        .map(
            |chunk| -> Result<std::collections::BTreeMap<i64, (f64, f64)>> {
                let mut acc = std::collections::BTreeMap::new();
                for m in chunk {
                    let pm = model.prepare_margins(m)?;
                    let k = selection_kernel(&model, &pm, &params, SelectionMethod::ExactSum);
                    for (w, t) in k.points() {
                        let e = acc.entry((t / T_BIN).round() as i64).or_insert((0.0, 0.0));
                        e.0 += w * weight;
                        e.1 += w * weight * t;
                    }
                }
                Ok(acc)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut merged = std::collections::BTreeMap::new();
    for b in bins {
        for (key, (w, wt)) in b {
            let e = merged.entry(key).or_insert((0.0, 0.0));
            e.0 += w;
            e.1 += wt;
        }
    }
    Ok(SelectionKernel::from_points(
        merged
            .into_values()
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, wt)| (w, wt / w)),
    ))
}

/// Selection intercept giving the target marginal publication probability
/// in the study population.
pub fn calibrate_alpha_population(cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.p >= 1.0 {
        return Err(MetaError::Unattainable(cfg.p));
    }
    if cfg.beta == 0.0 {
        return Ok(norm_quantile(cfg.p));
    }
    let k = population_kernel(cfg)?;
    solve_alpha_kernels(std::slice::from_ref(&k), cfg.beta, cfg.p, None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMeta {
    pub full: Dataset,
    pub published: Dataset,
    /// Study draws repeated because the outcome carried no information.
    pub study_redraws: usize,
    /// Whole meta-analyses redrawn because fewer than two studies were published.
    pub meta_redraws: usize,
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [u64; 2]) -> u64 {
    rng.gen_range(lo..=hi)
}

fn draw_nchg(rng: &mut ChaCha8Rng, m: &Margins, theta_i: f64) -> Result<u64> {
    let Margins::TwoGroupBinary { n1, n0, total } = *m else {
        unreachable!("two-group margins")
    };
    let lo = total.saturating_sub(n0);
    let hi = total.min(n1);
    let u: f64 = rng.gen();
    let mut cdf = 0.0;
    for j in lo..=hi {
        cdf += nchg_pmf(j, m, theta_i)?;
        if u < cdf {
            return Ok(j);
        }
    }
    Ok(hi)
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    Binomial::new(n, p.clamp(0.0, 1.0))
        .expect("valid binomial")
        .sample(rng)
}

fn draw_study(cfg: &SimConfig, rng: &mut ChaCha8Rng, theta_i: f64) -> Result<StudyData> {
    Ok(match cfg.experiment {
        Experiment::Bn1 => {
            let n = uniform(rng, cfg.n_range);
            StudyData::OneGroupBinary {
                y: binomial(rng, n, expit(theta_i)),
                n,
            }
        }
        Experiment::Pn1 => {
            let t = uniform(rng, cfg.n_range) as f64;
            let y = Poisson::new(t * theta_i.exp())
                .expect("positive rate")
                .sample(rng) as u64;
            StudyData::OneGroupCount { y, t }
        }
        Experiment::Bn2 | Experiment::Hn => {
            let n1 = uniform(rng, cfg.n_range);
            let n0 = uniform(rng, cfg.n_range);
            let total = uniform(rng, cfg.y_range);
            let y1 = if cfg.experiment == Experiment::Hn {
                draw_nchg(rng, &Margins::TwoGroupBinary { n1, n0, total }, theta_i)?
            } else {
                binomial(rng, total, expit((n1 as f64 / n0 as f64).ln() + theta_i))
            };
            StudyData::TwoGroupBinary {
                y0: total - y1,
                n0,
                y1,
                n1,
            }
        }
        Experiment::Pn2 => {
            let t1 = uniform(rng, cfg.n_range) as f64;
            let t0 = uniform(rng, cfg.n_range) as f64;
            let total = uniform(rng, cfg.y_range);
            let y1 = binomial(rng, total, expit((t1 / t0).ln() + theta_i));
            StudyData::TwoGroupCount {
                y0: total - y1,
                t0,
                y1,
                t1,
            }
        }
    })
}

fn informative(d: &StudyData) -> bool {
    match *d {
        StudyData::TwoGroupBinary { y0, y1, .. } | StudyData::TwoGroupCount { y0, y1, .. } => {
            y0 + y1 > 0
        }
        _ => true,
    }
}

/// Draws one meta-analysis of `cfg.studies` studies and its published subset.
pub fn generate_meta(cfg: &SimConfig, alpha: f64, rng: &mut ChaCha8Rng) -> Result<GeneratedMeta> {
    let normal = Normal::new(cfg.theta, cfg.tau).map_err(|e| MetaError::Config(e.to_string()))?;
    let sel = SelectionParams::new(alpha, cfg.beta);
    let mut study_redraws = 0;
    let mut meta_redraws = 0;
    loop {
        let mut full = Vec::with_capacity(cfg.studies);
        let mut published = Vec::new();
        for i in 0..cfg.studies {
            let theta_i = normal.sample(rng);
            let mut data = draw_study(cfg, rng, theta_i)?;
            while !informative(&data) {
                study_redraws += 1;
                data = draw_study(cfg, rng, theta_i)?;
            }
            let rec = StudyRecord::new(format!("s{}", i + 1), data)?;
            let t = empirical_effect(&rec, ZeroCellPolicy::AddHalf)?.t;
            if rng.gen::<f64>() < a_probit(t, &sel) {
                published.push(rec.clone());
            }
            full.push(rec);
        }
        if published.len() >= 2 {
            return Ok(GeneratedMeta {
                full: Dataset::new(full, "simulated")?,
                published: Dataset::new(published, "simulated-published")?,
                study_redraws,
                meta_redraws,
            });
        }
        meta_redraws += 1;
    }
}

/// Per-arm event rates `(group 1, group 0)`, averaged over studies; one-group
/// designs report the same rate twice.
pub fn arm_event_rates(ds: &Dataset) -> (f64, f64) {
    let n = ds.len() as f64;
    let (mut a, mut b) = (0.0, 0.0);
    for s in ds.studies() {
        let (r1, r0) = match s.data {
            StudyData::OneGroupBinary { y, n } => (y as f64 / n as f64, y as f64 / n as f64),
            StudyData::OneGroupCount { y, t } => (y as f64 / t, y as f64 / t),
            StudyData::TwoGroupBinary { y0, n0, y1, n1 } => {
                (y1 as f64 / n1 as f64, y0 as f64 / n0 as f64)
            }
            StudyData::TwoGroupCount { y0, t0, y1, t1 } => (y1 as f64 / t1, y0 as f64 / t0),
            StudyData::EffectSe { .. } => (f64::NAN, f64::NAN),
        };
        a += r1;
        b += r0;
    }
    (a / n, b / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Selection-adjusted fit under the generating family.
    Proposed,
    /// Selection-adjusted NN fit on empirical effects.
    NnSelection,
    /// Unadjusted fit under the generating family, published studies only.
    MlePublished,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [
        Estimator::Proposed,
        Estimator::NnSelection,
        Estimator::MlePublished,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Estimator::Proposed => "proposed",
            Estimator::NnSelection => "nn-selection",
            Estimator::MlePublished => "mle-published",
        }
    }
}

/// Outcome of one estimator on one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub theta: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    pub index: usize,
    pub n_published: usize,
    pub rates_full: (f64, f64),
    pub rates_published: (f64, f64),
    /// In `Estimator::ALL` order; `None` marks a failed or non-converged fit.
    pub estimates: [Option<Estimate>; 3],
    pub study_redraws: usize,
    pub meta_redraws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Estimator,
    pub ave: f64,
    /// Absent with fewer than two successful replicates.
    pub sd: Option<f64>,
    pub cp: f64,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub config: SimConfig,
    pub alpha: f64,
    pub methods: Vec<MethodSummary>,
    /// Smaller of the two arm-average event rates, in percent.
    pub event_rate_full: f64,
    pub event_rate_published: f64,
    pub published_fraction: f64,
    pub study_redraws: usize,
    pub meta_redraws: usize,
}

impl SimSummary {
    pub fn method(&self, e: Estimator) -> &MethodSummary {
        self.methods
            .iter()
            .find(|m| m.method == e)
            .expect("all estimators summarised")
    }

    pub const SUMMARY_HEADER: &'static str =
        "experiment,tau,studies,method,true_value,ave,sd,cp,failures";

    pub fn write_summary<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::SUMMARY_HEADER)?;
        for m in &self.methods {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.config.experiment.family().name(),
                self.config.tau,
                self.config.studies,
                m.method.label(),
                self.config.theta,
                m.ave,
                m.sd.map(|v| v.to_string()).unwrap_or_default(),
                m.cp,
                m.failures
            )?;
        }
        Ok(())
    }

    pub const RATES_HEADER: &'static str = "experiment,tau,studies,full,published";

    pub fn write_event_rates<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::RATES_HEADER)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            self.config.experiment.family().name(),
            self.config.tau,
            self.config.studies,
            self.event_rate_full,
            self.event_rate_published
        )?;
        Ok(())
    }
}

/// Upper end of the `β` range used when fitting simulated data.
pub const SIM_BETA_MAX: f64 = 10.0;

/// Fit options for simulated data. The selection function is monotone in
/// `t` in the direction of the generating slope, so `β` is kept in
/// `[0, SIM_BETA_MAX]` (or its mirror image when `cfg.beta < 0`).
pub fn simulation_fit_options(cfg: &SimConfig) -> FitOptions {
    let sign = if cfg.beta < 0.0 { -1.0 } else { 1.0 };
    let range = if sign > 0.0 {
        [0.0, SIM_BETA_MAX]
    } else {
        [-SIM_BETA_MAX, 0.0]
    };
    FitOptions {
        method: cfg.method,
        beta_starts: vec![0.5 * sign, 2.0 * sign],
        beta_range: Some(range),
        ..FitOptions::default()
    }
}

fn estimate(fit: Result<FitResult>) -> Option<Estimate> {
    match fit {
        Ok(f) if f.converged && f.theta.is_finite() && f.ci.theta.lo.is_finite() => {
            Some(Estimate {
                theta: f.theta,
                lo: f.ci.theta.lo,
                hi: f.ci.theta.hi,
            })
        }
        _ => None,
    }
}

/// RNG for replicate `k`: the configured seed with stream `k`.
pub fn replicate_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Generates and scores replicate `k`.
pub fn run_replicate(cfg: &SimConfig, alpha: f64, k: usize) -> Result<Replicate> {
    let mut rng = replicate_rng(cfg.seed, k);
    let meta = generate_meta(cfg, alpha, &mut rng)?;
    let opts = simulation_fit_options(cfg);
    let own = cfg.model()?;
    let nn = Model::new(ModelSpec::new(Family::Nn).with_order(cfg.quad_order))?;
    let pubd = &meta.published;
    let estimates = [
        estimate(fit_conditional(&own, pubd, cfg.p, &opts)),
        estimate(fit_conditional(&nn, pubd, cfg.p, &opts)),
        estimate(fit_mle(&own, pubd, &opts)),
    ];
    Ok(Replicate {
        index: k,
        n_published: pubd.len(),
        rates_full: arm_event_rates(&meta.full),
        rates_published: arm_event_rates(pubd),
        estimates,
        study_redraws: meta.study_redraws,
        meta_redraws: meta.meta_redraws,
    })
}

/// Worker count from `SPARSE_META_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
}

/// Runs all replicates (in parallel, capped by `SPARSE_META_THREADS`) and
/// aggregates them in replicate order.
pub fn run_experiment(cfg: &SimConfig) -> Result<SimSummary> {
    cfg.validate()?;
    let alpha = if cfg.p >= 1.0 {
        // Publish everything.
        f64::INFINITY
    } else {
        calibrate_alpha_population(cfg)?
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| MetaError::Config(e.to_string()))?;
    let reps: Vec<Replicate> = pool.install(|| {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|k| run_replicate(cfg, alpha, k))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(summarise(cfg, alpha, &reps))
}

/// Aggregates replicate results.
pub fn summarise(cfg: &SimConfig, alpha: f64, reps: &[Replicate]) -> SimSummary {
    let methods = Estimator::ALL
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let ok: Vec<Estimate> = reps.iter().filter_map(|r| r.estimates[i]).collect();
            let n = ok.len();
            let ave = ok.iter().map(|e| e.theta).sum::<f64>() / n as f64;
            let sd = (n >= 2).then(|| {
                (ok.iter().map(|e| (e.theta - ave).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            });
            let cp = ok
                .iter()
                .filter(|e| e.lo <= cfg.theta && cfg.theta <= e.hi)
                .count() as f64
                / n as f64;
            MethodSummary {
                method,
                ave,
                sd,
                cp,
                successes: n,
                failures: reps.len() - n,
            }
        })
        .collect();
    let r = reps.len() as f64;
    SimSummary {
        config: cfg.clone(),
        alpha,
        methods,
        event_rate_full: smaller_rate_pct(reps.iter().map(|x| x.rates_full)),
        event_rate_published: smaller_rate_pct(reps.iter().map(|x| x.rates_published)),
        published_fraction: reps.iter().map(|x| x.n_published).sum::<usize>() as f64
            / (r * cfg.studies as f64),
        study_redraws: reps.iter().map(|x| x.study_redraws).sum(),
        meta_redraws: reps.iter().map(|x| x.meta_redraws).sum(),
    }
}

/// Averages per-replicate arm rates and returns the smaller arm, in percent.
fn smaller_rate_pct<I: Iterator<Item = (f64, f64)>>(rates: I) -> f64 {
    let (mut a, mut b, mut r) = (0.0, 0.0, 0.0);
    for (u, v) in rates {
        a += u;
        b += v;
        r += 1.0;
    }
    100.0 * (a / r).min(b / r)
}

/// Event rates of generated data alone (no fitting).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRates {
    pub alpha: f64,
    /// Smaller arm-average event rate in percent, all studies.
    pub full: f64,
    /// Same, published studies only.
    pub published: f64,
    pub published_fraction: f64,
}

/// Generates `cfg.replicates` meta-analyses and summarises their event
/// rates and published fraction.
pub fn event_rates(cfg: &SimConfig) -> Result<EventRates> {
    cfg.validate()?;
    let alpha = if cfg.p >= 1.0 {
        f64::INFINITY
    } else {
        calibrate_alpha_population(cfg)?
    };
    let metas: Vec<GeneratedMeta> = (0..cfg.replicates)
        .map(|k| generate_meta(cfg, alpha, &mut replicate_rng(cfg.seed, k)))
        .collect::<Result<_>>()?;
    let published: usize = metas.iter().map(|m| m.published.len()).sum();
    Ok(EventRates {
        alpha,
        full: smaller_rate_pct(metas.iter().map(|m| arm_event_rates(&m.full))),
        published: smaller_rate_pct(metas.iter().map(|m| arm_event_rates(&m.published))),
        published_fraction: published as f64 / (cfg.replicates * cfg.studies) as f64,
    })
}
