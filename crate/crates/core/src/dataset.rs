//! Study records, CSV ingestion and empirical effect sizes.
//!
//! Every design has a fixed CSV header:
//!
//! | design            | header               |
//! |-------------------|----------------------|
//! | two-group binary  | `study,y0,n0,y1,n1`  |
//! | one-group binary  | `study,y,n`          |
//! | two-group count   | `study,y0,t0,y1,t1`  |
//! | one-group count   | `study,y,t`          |
//! | effect + SE       | `study,theta,se`     |
//!
//! Group 1 is the treatment arm, so two-group effects are treatment versus
//! control (log odds ratio or log rate ratio).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MetaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    OneGroupBinary,
    TwoGroupBinary,
    OneGroupCount,
    TwoGroupCount,
    EffectSe,
}

impl Design {
    pub const ALL: [Design; 5] = [
        Design::OneGroupBinary,
        Design::TwoGroupBinary,
        Design::OneGroupCount,
        Design::TwoGroupCount,
        Design::EffectSe,
    ];

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Design::TwoGroupBinary => &["study", "y0", "n0", "y1", "n1"],
            Design::OneGroupBinary => &["study", "y", "n"],
            Design::TwoGroupCount => &["study", "y0", "t0", "y1", "t1"],
            Design::OneGroupCount => &["study", "y", "t"],
            Design::EffectSe => &["study", "theta", "se"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Design::OneGroupBinary => "one-group-binary",
            Design::TwoGroupBinary => "two-group-binary",
            Design::OneGroupCount => "one-group-count",
            Design::TwoGroupCount => "two-group-count",
            Design::EffectSe => "effect-se",
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Design {
    type Err = MetaError;

    fn from_str(s: &str) -> Result<Self> {
        Design::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| MetaError::Config(format!("unknown design `{s}`")))
    }
}

/// Per-design study payload. Counts are event counts, `n*` group sizes and
/// `t*` person-time exposures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "design", rename_all = "kebab-case")]
pub enum StudyData {
    OneGroupBinary { y: u64, n: u64 },
    TwoGroupBinary { y0: u64, n0: u64, y1: u64, n1: u64 },
    OneGroupCount { y: u64, t: f64 },
    TwoGroupCount { y0: u64, t0: f64, y1: u64, t1: f64 },
    EffectSe { theta: f64, se: f64 },
}

impl StudyData {
    pub fn design(&self) -> Design {
        match self {
            StudyData::OneGroupBinary { .. } => Design::OneGroupBinary,
            StudyData::TwoGroupBinary { .. } => Design::TwoGroupBinary,
            StudyData::OneGroupCount { .. } => Design::OneGroupCount,
            StudyData::TwoGroupCount { .. } => Design::TwoGroupCount,
            StudyData::EffectSe { .. } => Design::EffectSe,
        }
    }

    /// Swaps treatment and control arms. One-group and effect designs are
    /// returned unchanged except that `EffectSe` negates its effect.
    pub fn swap_groups(&self) -> StudyData {
        match *self {
            StudyData::TwoGroupBinary { y0, n0, y1, n1 } => StudyData::TwoGroupBinary {
                y0: y1,
                n0: n1,
                y1: y0,
                n1: n0,
            },
            StudyData::TwoGroupCount { y0, t0, y1, t1 } => StudyData::TwoGroupCount {
                y0: y1,
                t0: t1,
                y1: y0,
                t1: t0,
            },
            StudyData::EffectSe { theta, se } => StudyData::EffectSe { theta: -theta, se },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub id: String,
    pub data: StudyData,
}

impl StudyRecord {
    pub fn new(id: impl Into<String>, data: StudyData) -> Result<Self> {
        let rec = StudyRecord {
            id: id.into(),
            data,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn design(&self) -> Design {
        self.data.design()
    }

    fn invalid(&self, msg: &str) -> MetaError {
        MetaError::InvalidStudy {
            study: self.id.clone(),
            msg: msg.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let exceed = || MetaError::EventsExceedSize {
            study: self.id.clone(),
        };
        match self.data {
            StudyData::OneGroupBinary { y, n } => {
                if n == 0 {
                    return Err(self.invalid("group size must be positive"));
                }
                if y > n {
                    return Err(exceed());
                }
            }
            StudyData::TwoGroupBinary { y0, n0, y1, n1 } => {
                if n0 == 0 || n1 == 0 {
                    return Err(self.invalid("group size must be positive"));
                }
                if y0 > n0 || y1 > n1 {
                    return Err(exceed());
                }
            }
            StudyData::OneGroupCount { t, .. } => {
                if !(t.is_finite() && t > 0.0) {
                    return Err(self.invalid("exposure must be positive"));
                }
            }
            StudyData::TwoGroupCount { t0, t1, .. } => {
                if !(t0.is_finite() && t0 > 0.0 && t1.is_finite() && t1 > 0.0) {
                    return Err(self.invalid("exposure must be positive"));
                }
            }
            StudyData::EffectSe { theta, se } => {
                if !theta.is_finite() {
                    return Err(self.invalid("effect must be finite"));
                }
                if !(se.is_finite() && se > 0.0) {
                    return Err(self.invalid("standard error must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// A homogeneous, ordered collection of studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    studies: Vec<StudyRecord>,
    design: Design,
    pub source: String,
}

impl Dataset {
    pub fn new(studies: Vec<StudyRecord>, source: impl Into<String>) -> Result<Self> {
        let first = studies.first().ok_or(MetaError::NoStudies)?;
        let design = first.design();
        for s in &studies {
            if s.design() != design {
                return Err(MetaError::MixedDesigns);
            }
            s.validate()?;
        }
        Ok(Dataset {
            studies,
            design,
            source: source.into(),
        })
    }

    pub fn studies(&self) -> &[StudyRecord] {
        &self.studies
    }

    pub fn len(&self) -> usize {
        self.studies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.studies.is_empty()
    }

    pub fn design(&self) -> Design {
        self.design
    }

    /// Dataset with treatment and control arms exchanged in every study.
    pub fn swap_groups(&self) -> Dataset {
        Dataset {
            studies: self
                .studies
                .iter()
                .map(|s| StudyRecord {
                    id: s.id.clone(),
                    data: s.data.swap_groups(),
                })
                .collect(),
            design: self.design,
            source: self.source.clone(),
        }
    }
}

fn parse_count(field: &str, line: usize, name: &str) -> Result<u64> {
    let v: f64 = field.trim().parse().map_err(|_| MetaError::Parse {
        line,
        msg: format!("column `{name}`: `{field}` is not a number"),
    })?;
    if v < 0.0 {
        return Err(MetaError::Parse {
            line,
            msg: format!("column `{name}`: negative value {v}"),
        });
    }
    if v.fract() != 0.0 || !v.is_finite() {
        return Err(MetaError::Parse {
            line,
            msg: format!("column `{name}`: `{field}` is not an integer"),
        });
    }
    Ok(v as u64)
}

fn parse_real(field: &str, line: usize, name: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| MetaError::Parse {
        line,
        msg: format!("column `{name}`: `{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(MetaError::Parse {
            line,
            msg: format!("column `{name}`: non-finite value"),
        });
    }
    Ok(v)
}

fn parse_positive(field: &str, line: usize, name: &str) -> Result<f64> {
    let v = parse_real(field, line, name)?;
    if v < 0.0 {
        return Err(MetaError::Parse {
            line,
            msg: format!("column `{name}`: negative value {v}"),
        });
    }
    Ok(v)
}

/// Parses CSV text for `design`. Row order is preserved and every row is
/// validated; errors carry the 1-based line number of the offending row.
pub fn parse_dataset(text: &str, design: Design) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let expected = design.header();
    let headers = reader.headers().map_err(|e| MetaError::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(MetaError::Header {
            design: design.to_string(),
            expected: expected.join(","),
            found: found.join(","),
        });
    }

    let mut studies = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| MetaError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != expected.len() {
            return Err(MetaError::Parse {
                line,
                msg: format!("expected {} fields, found {}", expected.len(), rec.len()),
            });
        }
        let id = rec[0].to_string();
        let data = match design {
            Design::TwoGroupBinary => StudyData::TwoGroupBinary {
                y0: parse_count(&rec[1], line, "y0")?,
                n0: parse_count(&rec[2], line, "n0")?,
                y1: parse_count(&rec[3], line, "y1")?,
                n1: parse_count(&rec[4], line, "n1")?,
            },
            Design::OneGroupBinary => StudyData::OneGroupBinary {
                y: parse_count(&rec[1], line, "y")?,
                n: parse_count(&rec[2], line, "n")?,
            },
            Design::TwoGroupCount => StudyData::TwoGroupCount {
                y0: parse_count(&rec[1], line, "y0")?,
                t0: parse_positive(&rec[2], line, "t0")?,
                y1: parse_count(&rec[3], line, "y1")?,
                t1: parse_positive(&rec[4], line, "t1")?,
            },
            Design::OneGroupCount => StudyData::OneGroupCount {
                y: parse_count(&rec[1], line, "y")?,
                t: parse_positive(&rec[2], line, "t")?,
            },
            Design::EffectSe => StudyData::EffectSe {
                theta: parse_real(&rec[1], line, "theta")?,
                se: parse_positive(&rec[2], line, "se")?,
            },
        };
        let study = StudyRecord { id, data };
        study.validate().map_err(|e| MetaError::Parse {
            line,
            msg: e.to_string(),
        })?;
        studies.push(study);
    }
    Dataset::new(studies, "csv")
}

/// The bundled 18-trial central venous catheter dataset.
pub fn cvc_trials() -> Dataset {
    let mut ds = parse_dataset(include_str!("../data/niel2007.csv"), Design::TwoGroupBinary)
        .expect("bundled dataset is valid");
    ds.source = "niel2007".into();
    ds
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroCellPolicy {
    /// Add 0.5 to every cell of a study with a zero cell.
    #[default]
    AddHalf,
    Reject,
}

/// Empirical effect, its standard error and the t-statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSummary {
    pub theta_hat: f64,
    pub se: f64,
    pub t: f64,
    pub corrected: bool,
}

impl EffectSummary {
    fn from_parts(theta_hat: f64, se: f64, corrected: bool) -> Self {
        EffectSummary {
            theta_hat,
            se,
            t: theta_hat / se,
            corrected,
        }
    }
}

// Continuous-valued formulas, shared with the normal approximation of the
// selection probability which evaluates them off the integer lattice.

pub(crate) fn log_odds(y: f64, n: f64) -> (f64, f64) {
    ((y / (n - y)).ln(), (1.0 / y + 1.0 / (n - y)).sqrt())
}

pub(crate) fn log_odds_ratio(y1: f64, n1: f64, y0: f64, n0: f64) -> (f64, f64) {
    let theta = ((y1 / (n1 - y1)) / (y0 / (n0 - y0))).ln();
    let var = 1.0 / y1 + 1.0 / (n1 - y1) + 1.0 / y0 + 1.0 / (n0 - y0);
    (theta, var.sqrt())
}

pub(crate) fn log_rate(y: f64, t: f64) -> (f64, f64) {
    ((y / t).ln(), (1.0 / y).sqrt())
}

pub(crate) fn log_rate_ratio(y1: f64, t1: f64, y0: f64, t0: f64) -> (f64, f64) {
    (((y1 / t1) / (y0 / t0)).ln(), (1.0 / y1 + 1.0 / y0).sqrt())
}

/// t-statistic of a one-group binary outcome with the 0.5 correction.
pub(crate) fn t_one_group_binary(y: u64, n: u64) -> f64 {
    let (y, n, _) = corrected_one_group(y, n);
    let (th, se) = log_odds(y, n);
    th / se
}

/// t-statistic of a two-group binary outcome with the 0.5 correction.
pub(crate) fn t_two_group_binary(y1: u64, n1: u64, y0: u64, n0: u64) -> f64 {
    let (y1, n1, y0, n0, _) = corrected_two_group(y1, n1, y0, n0);
    let (th, se) = log_odds_ratio(y1, n1, y0, n0);
    th / se
}

pub(crate) fn t_one_group_count(y: u64, t: f64) -> f64 {
    let y = if y == 0 { 0.5 } else { y as f64 };
    let (th, se) = log_rate(y, t);
    th / se
}

pub(crate) fn t_two_group_count(y1: u64, t1: f64, y0: u64, t0: f64) -> f64 {
    let (y1, y0) = if y1 == 0 || y0 == 0 {
        (y1 as f64 + 0.5, y0 as f64 + 0.5)
    } else {
        (y1 as f64, y0 as f64)
    };
    let (th, se) = log_rate_ratio(y1, t1, y0, t0);
    th / se
}

fn corrected_one_group(y: u64, n: u64) -> (f64, f64, bool) {
    if y == 0 || y == n {
        (y as f64 + 0.5, n as f64 + 1.0, true)
    } else {
        (y as f64, n as f64, false)
    }
}

fn corrected_two_group(y1: u64, n1: u64, y0: u64, n0: u64) -> (f64, f64, f64, f64, bool) {
    if y1 == 0 || y0 == 0 || y1 == n1 || y0 == n0 {
        (
            y1 as f64 + 0.5,
            n1 as f64 + 1.0,
            y0 as f64 + 0.5,
            n0 as f64 + 1.0,
            true,
        )
    } else {
        (y1 as f64, n1 as f64, y0 as f64, n0 as f64, false)
    }
}

/// Empirical effect size and t-statistic of one study. Zero cells are
/// handled by `policy`; the correction only ever feeds the t-statistic and
/// the normal-normal path, never the exact likelihoods.
pub fn empirical_effect(study: &StudyRecord, policy: ZeroCellPolicy) -> Result<EffectSummary> {
    study.validate()?;
    let reject = |corrected: bool| -> Result<()> {
        if corrected && policy == ZeroCellPolicy::Reject {
            Err(MetaError::ZeroCells {
                study: study.id.clone(),
            })
        } else {
            Ok(())
        }
    };
    let out = match study.data {
        StudyData::OneGroupBinary { y, n } => {
            let (y, n, c) = corrected_one_group(y, n);
            reject(c)?;
            let (th, se) = log_odds(y, n);
            EffectSummary::from_parts(th, se, c)
        }
        StudyData::TwoGroupBinary { y0, n0, y1, n1 } => {
            let (y1, n1, y0, n0, c) = corrected_two_group(y1, n1, y0, n0);
            reject(c)?;
            let (th, se) = log_odds_ratio(y1, n1, y0, n0);
            EffectSummary::from_parts(th, se, c)
        }
        StudyData::OneGroupCount { y, t } => {
            let c = y == 0;
            reject(c)?;
            let y = if c { 0.5 } else { y as f64 };
            let (th, se) = log_rate(y, t);
            EffectSummary::from_parts(th, se, c)
        }
        StudyData::TwoGroupCount { y0, t0, y1, t1 } => {
            let c = y0 == 0 || y1 == 0;
            reject(c)?;
            let (y1, y0) = if c {
                (y1 as f64 + 0.5, y0 as f64 + 0.5)
            } else {
                (y1 as f64, y0 as f64)
            };
            let (th, se) = log_rate_ratio(y1, t1, y0, t0);
            EffectSummary::from_parts(th, se, c)
        }
        StudyData::EffectSe { theta, se } => EffectSummary::from_parts(theta, se, false),
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunnelPoint {
    pub study: String,
    pub effect: f64,
    pub se: f64,
}

/// One `(effect, se)` point per study, in dataset order, using the default
/// zero-cell policy.
pub fn funnel_points(ds: &Dataset) -> Result<Vec<FunnelPoint>> {
    ds.studies()
        .iter()
        .map(|s| {
            let e = empirical_effect(s, ZeroCellPolicy::AddHalf)?;
            Ok(FunnelPoint {
                study: s.id.clone(),
                effect: e.theta_hat,
                se: e.se,
            })
        })
        .collect()
}

/// Writes funnel points as `study,effect,se`.
pub fn write_funnel_csv<W: std::io::Write>(points: &[FunnelPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| MetaError::Io(e.to_string());
    w.write_record(["study", "effect", "se"]).map_err(io)?;
    for p in points {
        w.write_record([p.study.clone(), p.effect.to_string(), p.se.to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn two(y0: u64, n0: u64, y1: u64, n1: u64) -> StudyRecord {
        StudyRecord::new("s", StudyData::TwoGroupBinary { y0, n0, y1, n1 }).unwrap()
    }

    #[test]
    fn bundled_table() {
        let ds = cvc_trials();
        assert_eq!(ds.len(), 18);
        assert_eq!(ds.design(), Design::TwoGroupBinary);
        assert_eq!(
            ds.studies()[0].data,
            StudyData::TwoGroupBinary {
                y0: 3,
                n0: 117,
                y1: 0,
                n1: 116
            }
        );
    }

    #[test]
    fn empty_body_is_rejected() {
        let err = parse_dataset("study,y0,n0,y1,n1\n", Design::TwoGroupBinary).unwrap_err();
        assert_eq!(err, MetaError::NoStudies);
        assert_eq!(err.to_string(), "no studies");
    }

    #[test]
    fn events_exceed_size() {
        let err =
            parse_dataset("study,y0,n0,y1,n1\na,1,10,5,4\n", Design::TwoGroupBinary).unwrap_err();
        assert!(
            err.to_string().contains("events exceed group size"),
            "{err}"
        );
        assert!(err.to_string().starts_with("line 2"), "{err}");
    }

    #[test]
    fn malformed_rows_report_line() {
        let text = "study,y,n\na,1,10\nb,x,10\n";
        match parse_dataset(text, Design::OneGroupBinary).unwrap_err() {
            MetaError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        let text = "study,y,n\na,-1,10\n";
        assert!(parse_dataset(text, Design::OneGroupBinary)
            .unwrap_err()
            .to_string()
            .contains("negative"));
    }

    #[test]
    fn header_must_match_design() {
        let err = parse_dataset("study,y,n\na,1,10\n", Design::TwoGroupBinary).unwrap_err();
        assert!(matches!(err, MetaError::Header { .. }));
    }

    #[test]
    fn mixed_designs_rejected() {
        let a = StudyRecord::new("a", StudyData::OneGroupBinary { y: 1, n: 10 }).unwrap();
        let b = StudyRecord::new(
            "b",
            StudyData::EffectSe {
                theta: 0.1,
                se: 1.0,
            },
        )
        .unwrap();
        assert_eq!(
            Dataset::new(vec![a, b], "x").unwrap_err(),
            MetaError::MixedDesigns
        );
    }

    #[test]
    fn one_group_effect() {
        let s = StudyRecord::new("s", StudyData::OneGroupBinary { y: 3, n: 117 }).unwrap();
        let e = empirical_effect(&s, ZeroCellPolicy::AddHalf).unwrap();
        // log(3/114), sqrt(1/3 + 1/114)
        assert_abs_diff_eq!(e.theta_hat, -3.637586159726386, epsilon = 1e-12);
        assert_abs_diff_eq!(e.se, 0.5848976518656017, epsilon = 1e-12);
        assert_abs_diff_eq!(e.t, -6.219184071134266, epsilon = 1e-10);
        assert!(!e.corrected);
    }

    #[test]
    fn two_group_effect() {
        let e = empirical_effect(&two(6, 157, 5, 151), ZeroCellPolicy::AddHalf).unwrap();
        assert_abs_diff_eq!(e.theta_hat, -0.14864834168736676, epsilon = 1e-12);
        assert_abs_diff_eq!(e.se, 0.6165537270112404, epsilon = 1e-12);
        assert_abs_diff_eq!(e.t, -0.2410955204308687, epsilon = 1e-12);
    }

    #[test]
    fn zero_cell_correction() {
        let e = empirical_effect(&two(3, 117, 0, 116), ZeroCellPolicy::AddHalf).unwrap();
        let expect = ((0.5 / 116.5) / (3.5 / 114.5f64)).ln();
        assert_abs_diff_eq!(e.theta_hat, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(e.theta_hat, -1.963, epsilon = 1e-3);
        assert_abs_diff_eq!(e.se, 1.518, epsilon = 1e-3);
        assert!(e.corrected);
        assert!(matches!(
            empirical_effect(&two(0, 105, 0, 118), ZeroCellPolicy::Reject),
            Err(MetaError::ZeroCells { .. })
        ));
    }

    #[test]
    fn funnel_points_follow_studies() {
        let pts = funnel_points(&cvc_trials()).unwrap();
        assert_eq!(pts.len(), 18);
        assert_abs_diff_eq!(pts[4].effect, -0.149, epsilon = 1e-3);
        assert_abs_diff_eq!(pts[4].se, 0.617, epsilon = 1e-3);

        let one = Dataset::new(vec![two(2, 50, 1, 50)], "one").unwrap();
        assert_eq!(funnel_points(&one).unwrap().len(), 1);

        let ds =
            parse_dataset("study,theta,se\na,-0.25,0.4\nb,0.1,0.2\n", Design::EffectSe).unwrap();
        let pts = funnel_points(&ds).unwrap();
        assert_eq!((pts[0].effect, pts[0].se), (-0.25, 0.4));
        assert_eq!((pts[1].effect, pts[1].se), (0.1, 0.2));
    }

    proptest! {
        #[test]
        fn t_times_se_is_effect(y0 in 1u64..50, y1 in 1u64..50, e0 in 1u64..300, e1 in 1u64..300) {
            let e = empirical_effect(&two(y0, y0 + e0, y1, y1 + e1), ZeroCellPolicy::AddHalf).unwrap();
            prop_assert!(!e.corrected);
            prop_assert!((e.t * e.se - e.theta_hat).abs() <= 1e-12 * (1.0 + e.theta_hat.abs()));
        }

        #[test]
        fn label_swap_negates_effect(y0 in 0u64..30, y1 in 0u64..30, e0 in 0u64..200, e1 in 0u64..200) {
            let s = two(y0, y0 + e0 + 1, y1, y1 + e1 + 1);
            let swapped = StudyRecord { id: "s".into(), data: s.data.swap_groups() };
            let a = empirical_effect(&s, ZeroCellPolicy::AddHalf).unwrap();
            let b = empirical_effect(&swapped, ZeroCellPolicy::AddHalf).unwrap();
            prop_assert!((a.theta_hat + b.theta_hat).abs() < 1e-12);
            prop_assert!((a.se - b.se).abs() < 1e-12);
            prop_assert_eq!(a.corrected, b.corrected);
        }

        #[test]
        fn correction_iff_zero_cell(y in 0u64..20, extra in 0u64..20) {
            let n = y + extra + 1;
            let s = StudyRecord::new("s", StudyData::OneGroupBinary { y, n }).unwrap();
            let e = empirical_effect(&s, ZeroCellPolicy::AddHalf).unwrap();
            prop_assert_eq!(e.corrected, y == 0 || y == n);
        }
    }
}
