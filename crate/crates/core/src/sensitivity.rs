//! Fits over a grid of assumed marginal publication probabilities.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{MetaError, Result};
use crate::estimation::{fit_conditional_problem, FitOptions, FitResult, Problem};
use crate::models::{Family, Model};

/// `p = 1.0, 0.9, …, 0.1`.
pub fn default_grid() -> Vec<f64> {
    (1..=10).rev().map(|k| k as f64 / 10.0).collect()
}

/// Expected number of unpublished studies, `round(N (1 − p) / p)`, with
/// ties to even.
pub fn expected_unpublished(n: usize, p: f64) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(MetaError::InvalidProbability(p));
    }
    Ok((n as f64 * (1.0 - p) / p).round_ties_even() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub p: f64,
    pub unpublished: u64,
    /// Missing when the fit failed outright; see `error`.
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub family: Family,
    pub dataset: String,
    pub rows: Vec<SensitivityRow>,
}

impl SensitivityTable {
    pub fn all_converged(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.fit.as_ref().is_some_and(|f| f.converged))
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.fit.as_ref().map_or(f64::NAN, |f| f.theta))
            .collect()
    }

    pub const CSV_HEADER: &'static str =
        "p,unpublished,theta,theta_lo,theta_hi,tau,beta,alpha,converged";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            match &r.fit {
                Some(f) => writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.p,
                    r.unpublished,
                    f.theta,
                    f.ci.theta.lo,
                    f.ci.theta.hi,
                    f.tau,
                    opt(f.beta),
                    opt(f.alpha),
                    f.converged
                )?,
                None => writeln!(out, "{},{},,,,,,,false", r.p, r.unpublished)?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

/// One fit per grid value, each warm-started from the previous optimum in
/// addition to the default starts. Failed rows are recorded, not fatal.
pub fn sensitivity_scan(
    model: &Model,
    ds: &Dataset,
    grid: &[f64],
    opts: &FitOptions,
) -> Result<SensitivityTable> {
    if grid.is_empty() {
        return Err(MetaError::Config("empty grid".into()));
    }
    for &p in grid {
        if !(p > 0.0 && p <= 1.0) {
            return Err(MetaError::InvalidProbability(p));
        }
    }
    let pr = Problem::new(model, ds, opts.method)?;
    if pr.n_effective() < 2 {
        return Err(MetaError::TooFewStudies(pr.n_effective()));
    }
    let mle = crate::estimation::fit_mle(model, ds, opts)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut warm: Option<[f64; 3]> = None;
    for &p in grid {
        let fit = if p == 1.0 {
            mle.clone()
        } else {
            let mut o = opts.clone();
            if let Some(w) = warm {
                o.starts.push(w);
            }
            fit_conditional_problem(&pr, p, &o, &mle)
        };
        if let Some(beta) = fit.beta {
            if fit.converged {
                warm = Some([fit.theta, fit.tau.max(1e-8).ln(), beta]);
            }
        }
        rows.push(SensitivityRow {
            p,
            unpublished: expected_unpublished(ds.len(), p)?,
            fit: Some(fit),
            error: None,
        });
    }
    Ok(SensitivityTable {
        family: model.family(),
        dataset: ds.source.clone(),
        rows,
    })
}
