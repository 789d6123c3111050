//! Post-factorization forensics: diagonal magnitude profiles,
//! predicted-vs-observed censuses, and report emission.

use crate::cholesky::{CholeskyFactor, FactorMode, FactorStats};
use crate::error::{Error, Result};
use crate::fill_model::{cumulative_count, FillPrediction};
use crate::mesh::MeshKind;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Maximum absolute entry per sub-diagonal distance `d = 0..=bandwidth`;
/// distances whose entries are all zero (or missing) are absent.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalProfile<T> {
    max_abs: Vec<Option<T>>,
}

impl<T: Scalar> DiagonalProfile<T> {
    /// Number of recorded distances, `bandwidth + 1`.
    pub fn len(&self) -> usize {
        self.max_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.max_abs.is_empty()
    }

    /// Maximum absolute value on sub-diagonal `d`, `None` when absent.
    pub fn max_abs(&self, d: usize) -> Option<T> {
        self.max_abs.get(d).copied().flatten()
    }

    /// First distance whose maximum lies strictly below `threshold`
    /// (absent diagonals count as below every positive threshold).
    pub fn first_below(&self, threshold: T) -> Option<usize> {
        self.max_abs
            .iter()
            .position(|v| v.is_none_or(|m| m < threshold))
    }

    /// Rows for serialization and CSV emission.
    pub fn rows(&self) -> Vec<ProfileRow> {
        self.max_abs
            .iter()
            .enumerate()
            .map(|(d, v)| {
                let max_abs = v.and_then(|m| m.to_f64());
                ProfileRow {
                    distance: d as u64,
                    max_abs,
                    log2_max_abs: max_abs.map(f64::log2),
                }
            })
            .collect()
    }
}

/// Scan the factor and record the largest magnitude on every sub-diagonal.
pub fn diagonal_profile<T: Scalar>(l: &CholeskyFactor<T>) -> DiagonalProfile<T> {
    let bw = l.bandwidth();
    let mut max_abs = vec![T::zero(); bw + 1];
    for i in 0..l.n() {
        let row = l.storage().row(i);
        let first = bw.saturating_sub(i);
        for (o, &v) in row.iter().enumerate().skip(first) {
            let d = bw - o;
            let mag = v.abs();
            if mag > max_abs[d] {
                max_abs[d] = mag;
            }
        }
    }
    DiagonalProfile {
        max_abs: max_abs
            .into_iter()
            .map(|m| (m > T::zero()).then_some(m))
            .collect(),
    }
}

/// One line of the profile in report form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub distance: u64,
    pub max_abs: Option<f64>,
    pub log2_max_abs: Option<f64>,
}

/// Outcome of a predicted-vs-observed comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Observed counts lie within one level of the prediction.
    Match,
    /// At least one observed count falls outside its bracket.
    Mismatch,
    /// Non-uniform mesh: the uniform-mesh prediction is reported for
    /// orientation only and not asserted.
    Qualitative,
}

/// Observed and predicted value of one census column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountComparison {
    pub observed: u64,
    pub predicted: u64,
    pub difference: i64,
    pub relative: f64,
    pub within_bracket: bool,
}

fn compare_counts(observed: u64, predicted: u64, bracket: (u64, u64)) -> CountComparison {
    let difference = observed as i64 - predicted as i64;
    let denom = predicted.max(1) as f64;
    CountComparison {
        observed,
        predicted,
        difference,
        relative: difference as f64 / denom,
        within_bracket: observed >= bracket.0 && observed <= bracket.1,
    }
}

/// Problem parameters echoed into a report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEcho {
    #[serde(rename = "N")]
    pub n_intervals: u64,
    pub epsilon: f64,
    pub mesh: MeshKind,
    pub mode: FactorMode,
}

/// Predicted-vs-observed census report for one factorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub echo: RunEcho,
    pub observed: FactorStats,
    pub predicted: Option<FillPrediction>,
    pub nonzeros: Option<CountComparison>,
    pub subnormals: Option<CountComparison>,
    pub underflow_zeros: Option<CountComparison>,
    pub verdict: Verdict,
    /// First sub-diagonal whose maximum drops below the smallest normal
    /// number (profile required).
    pub first_subnormal_distance: Option<u64>,
    /// First sub-diagonal that is entirely flushed (profile required).
    pub first_flushed_distance: Option<u64>,
    /// Observed underflow zeros relative to the uniform-mesh prediction;
    /// reported for non-uniform meshes.
    pub underflow_ratio_vs_uniform_prediction: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<ProfileRow>,
}

/// Bracket `[cumulative(k + 1), cumulative(k - 1)]` around the crossing level
/// `k`; `None` levels bracket to `[0, 0]`.
fn level_bracket(n_intervals: usize, k: Option<u32>) -> (u64, u64) {
    let m = (n_intervals - 1) as i64;
    let cum = |p: i64| -> u64 {
        if p > m {
            0
        } else {
            cumulative_count(n_intervals, p.max(1) as u32).unwrap_or(0)
        }
    };
    match k {
        None => (0, 0),
        Some(k) => (cum(k as i64 + 1), cum(k as i64 - 1)),
    }
}

/// Compare an observed census against the analytic prediction for the same
/// uniform-mesh problem. The verdict is `Match` when the underflow-zero count
/// and the total count below the smallest normal number both lie within one
/// level of the predicted crossing.
pub fn compare(observed: &FactorStats, predicted: &FillPrediction) -> Result<AnalysisReport> {
    if observed.bandwidth + 1 != predicted.n_intervals || observed.n != predicted.n {
        return Err(Error::InvalidArgument(format!(
            "mismatched problem sizes: observed N = {}, predicted N = {}",
            observed.bandwidth + 1,
            predicted.n_intervals
        )));
    }
    let n_intervals = predicted.n_intervals as usize;

    let zero_bracket = level_bracket(n_intervals, predicted.k_zero);
    let sub_bracket = level_bracket(n_intervals, predicted.k_subnormal);

    let underflow_zeros = compare_counts(
        observed.underflow_zeros,
        predicted.underflow_zeros,
        zero_bracket,
    );
    let below_normal = compare_counts(
        observed.subnormals + observed.underflow_zeros,
        predicted.subnormals + predicted.underflow_zeros,
        sub_bracket,
    );
    let subnormals = CountComparison {
        observed: observed.subnormals,
        predicted: predicted.subnormals,
        difference: observed.subnormals as i64 - predicted.subnormals as i64,
        relative: (observed.subnormals as i64 - predicted.subnormals as i64) as f64
            / predicted.subnormals.max(1) as f64,
        within_bracket: below_normal.within_bracket,
    };
    // nonzeros are tied to the zeros through the exact-arithmetic total
    let nonzeros = CountComparison {
        observed: observed.nonzeros,
        predicted: predicted.nonzeros,
        difference: observed.nonzeros as i64 - predicted.nonzeros as i64,
        relative: (observed.nonzeros as i64 - predicted.nonzeros as i64) as f64
            / predicted.nonzeros.max(1) as f64,
        within_bracket: underflow_zeros.within_bracket,
    };

    let verdict = if underflow_zeros.within_bracket && below_normal.within_bracket {
        Verdict::Match
    } else {
        Verdict::Mismatch
    };

    Ok(AnalysisReport {
        echo: RunEcho {
            n_intervals: predicted.n_intervals,
            epsilon: predicted.epsilon,
            mesh: MeshKind::Uniform,
            mode: observed.mode,
        },
        observed: observed.clone(),
        predicted: Some(predicted.clone()),
        nonzeros: Some(nonzeros),
        subnormals: Some(subnormals),
        underflow_zeros: Some(underflow_zeros),
        verdict,
        first_subnormal_distance: None,
        first_flushed_distance: None,
        underflow_ratio_vs_uniform_prediction: None,
        profile: Vec::new(),
    })
}

/// Report for a non-uniform mesh: the uniform-mesh prediction at the same
/// `(N, epsilon)` is attached for orientation, the verdict is qualitative.
pub fn qualitative_report(
    echo: RunEcho,
    observed: &FactorStats,
    uniform_prediction: Option<FillPrediction>,
) -> AnalysisReport {
    let ratio = uniform_prediction.as_ref().and_then(|p| {
        (p.underflow_zeros > 0).then(|| observed.underflow_zeros as f64 / p.underflow_zeros as f64)
    });
    AnalysisReport {
        echo,
        observed: observed.clone(),
        predicted: uniform_prediction,
        nonzeros: None,
        subnormals: None,
        underflow_zeros: None,
        verdict: Verdict::Qualitative,
        first_subnormal_distance: None,
        first_flushed_distance: None,
        underflow_ratio_vs_uniform_prediction: ratio,
        profile: Vec::new(),
    }
}

impl AnalysisReport {
    /// Attach a diagonal profile and its threshold crossings.
    pub fn with_profile<T: Scalar>(mut self, profile: &DiagonalProfile<T>) -> Self {
        self.first_subnormal_distance = profile
            .first_below(T::min_positive_normal())
            .map(|d| d as u64);
        self.first_flushed_distance = profile
            .first_below(T::min_positive_subnormal())
            .map(|d| d as u64);
        self.profile = profile.rows();
        self
    }
}

/// Output format for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    TextTable,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::TextTable),
            other => Err(Error::InvalidArgument(format!(
                "unknown format {other:?} (expected json, csv, or table)"
            ))),
        }
    }
}

/// Render a report. JSON carries the full report; CSV emits the diagonal
/// profile (`distance,max_abs,log2_max_abs`); the text table mirrors the
/// census rows of a sweep column.
pub fn emit_report(report: &AnalysisReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))
        }
        ReportFormat::Csv => Ok(profile_csv(&report.profile)),
        ReportFormat::TextTable => {
            let runs = [SweepRun {
                epsilon: report.echo.epsilon,
                observed: Some(report.observed.clone()),
                predicted: report.predicted.clone(),
                verdict: Some(report.verdict),
                error: None,
            }];
            Ok(sweep_table(&report.echo, &runs))
        }
    }
}

/// CSV of a diagonal profile; absent diagonals leave their fields empty.
pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from("distance,max_abs,log2_max_abs\n");
    for row in rows {
        match (row.max_abs, row.log2_max_abs) {
            (Some(v), Some(l)) => {
                let _ = writeln!(out, "{},{v:e},{l}", row.distance);
            }
            _ => {
                let _ = writeln!(out, "{},,", row.distance);
            }
        }
    }
    out
}

/// One column of an epsilon sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub epsilon: f64,
    pub observed: Option<FactorStats>,
    pub predicted: Option<FillPrediction>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

/// Aggregated sweep over a list of epsilons at fixed `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub echo: RunEcho,
    pub runs: Vec<SweepRun>,
}

impl SweepReport {
    pub fn all_succeeded(&self) -> bool {
        self.runs.iter().all(|r| r.error.is_none())
    }

    pub fn emit(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => {
                serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
            }
            ReportFormat::Csv => Ok(self.csv()),
            ReportFormat::TextTable => Ok(sweep_table(&self.echo, &self.runs)),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::from(
            "epsilon,elapsed_seconds,nonzeros,subnormals,underflow_zeros,\
             predicted_subnormals,predicted_underflow_zeros,verdict,error\n",
        );
        for run in &self.runs {
            let _ = write!(out, "{:e},", run.epsilon);
            match &run.observed {
                Some(s) => {
                    let _ = write!(
                        out,
                        "{},{},{},{},",
                        s.elapsed_seconds, s.nonzeros, s.subnormals, s.underflow_zeros
                    );
                }
                None => out.push_str(",,,,"),
            }
            match &run.predicted {
                Some(p) => {
                    let _ = write!(out, "{},{},", p.subnormals, p.underflow_zeros);
                }
                None => out.push_str(",,"),
            }
            let verdict = run
                .verdict
                .map(|v| {
                    serde_json::to_string(&v)
                        .unwrap()
                        .trim_matches('"')
                        .to_string()
                })
                .unwrap_or_default();
            let error = run.error.clone().unwrap_or_default();
            let _ = writeln!(out, "{verdict},{error}");
        }
        out
    }
}

/// Text table with one column per epsilon and the census rows
/// `Time (s)`, `Nonzeros`, `Subnormals`, `Underflow zeros`.
fn sweep_table(echo: &RunEcho, runs: &[SweepRun]) -> String {
    const LABEL_WIDTH: usize = 16;
    let width = runs
        .iter()
        .flat_map(|r| {
            r.observed.iter().flat_map(|s| {
                [
                    s.nonzeros.to_string().len(),
                    format!("{:.3}", s.elapsed_seconds).len(),
                ]
            })
        })
        .chain(std::iter::once(12))
        .max()
        .unwrap_or(12)
        + 2;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "N = {}, {} mesh, {} mode",
        echo.n_intervals, echo.mesh, echo.mode
    );
    let _ = write!(out, "{:<LABEL_WIDTH$}", "epsilon");
    for run in runs {
        let _ = write!(out, "{:>width$}", format!("{:e}", run.epsilon));
    }
    out.push('\n');

    let mut row = |label: &str, value: &dyn Fn(&SweepRun) -> String| {
        let _ = write!(out, "{label:<LABEL_WIDTH$}");
        for run in runs {
            let _ = write!(out, "{:>width$}", value(run));
        }
        out.push('\n');
    };
    row("Time (s)", &|r| {
        r.observed
            .as_ref()
            .map(|s| format!("{:.3}", s.elapsed_seconds))
            .unwrap_or_else(|| "-".to_string())
    });
    row("Nonzeros", &|r| {
        r.observed
            .as_ref()
            .map(|s| s.nonzeros.to_string())
            .unwrap_or_else(|| "-".to_string())
    });
    row("Subnormals", &|r| {
        r.observed
            .as_ref()
            .map(|s| s.subnormals.to_string())
            .unwrap_or_else(|| "-".to_string())
    });
    row("Underflow zeros", &|r| {
        r.observed
            .as_ref()
            .map(|s| s.underflow_zeros.to_string())
            .unwrap_or_else(|| "-".to_string())
    });
    for run in runs.iter().filter(|r| r.error.is_some()) {
        let _ = writeln!(
            out,
            "error at epsilon = {:e}: {}",
            run.epsilon,
            run.error.as_deref().unwrap_or("")
        );
    }
    out
}
