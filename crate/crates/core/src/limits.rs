//! Sweeps of a quantity along a chain of algebras, the Cauchy verdict that decides
//! whether its limit is well-defined, and convergence-order estimates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{principal_module, AlgebraicHilbertSpace};
use crate::linalg::C64;
use crate::weyl::LimitChain;

pub const DEFAULT_CAUCHY_TOL: f64 = 1e-3;
pub const DEFAULT_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub cauchy_tol: f64,
    /// Number of trailing differences that must stay below the tolerance.
    pub window: usize,
    /// Evaluate entries concurrently; only for pure callbacks.
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cauchy_tol: DEFAULT_CAUCHY_TOL,
            window: DEFAULT_WINDOW,
            parallel: true,
        }
    }
}

impl SweepOptions {
    pub fn with_tol(tol: f64) -> Self {
        SweepOptions {
            cauchy_tol: tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSummary {
    pub schedule: String,
    pub depth: usize,
    pub h_ratio: String,
}

impl ChainSummary {
    pub fn of(chain: &LimitChain) -> Self {
        ChainSummary {
            schedule: chain.schedule_name.clone(),
            depth: chain.len(),
            h_ratio: crate::rational::format_rational(&chain.h_ratio),
        }
    }

    /// Label for synthetic sequences that do not come from a chain.
    pub fn synthetic(depth: usize) -> Self {
        ChainSummary {
            schedule: "synthetic".into(),
            depth,
            h_ratio: "1/1".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportPoint {
    pub n: u64,
    pub value: Option<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryError {
    pub index: usize,
    pub n: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub chain: ChainSummary,
    pub points: Vec<ReportPoint>,
    pub lim_value: Option<C64>,
    pub well_defined: bool,
    pub cauchy_tol: f64,
    pub window: usize,
    pub est_order: Option<f64>,
    pub oracle_value: Option<C64>,
    pub oracle_name: String,
    /// Aitken Δ² estimate from the last three values; reported, never used as `lim`.
    pub extrapolated: Option<C64>,
    pub errors: Vec<EntryError>,
}

/// `|v_n − v_{n+1}| / max(1, |v_{n+1}|)`: relative above magnitude one, absolute below.
pub fn cauchy_differences(points: &[ReportPoint]) -> Vec<f64> {
    points
        .windows(2)
        .map(|w| match (w[0].value, w[1].value) {
            (Some(x), Some(y)) => (x - y).norm() / y.norm().max(1.0),
            _ => f64::INFINITY,
        })
        .collect()
}

fn aitken(points: &[ReportPoint]) -> Option<C64> {
    let tail: Vec<C64> = points.iter().rev().take(3).map(|p| p.value).collect::<Option<Vec<_>>>()?;
    if tail.len() < 3 {
        return None;
    }
    let (v2, v1, v0) = (tail[0], tail[1], tail[2]);
    let denom = (v2 - v1) - (v1 - v0);
    if denom.norm() <= 1e-14 * v2.norm().max(1.0) {
        return Some(v2);
    }
    let est = v2 - (v2 - v1) * (v2 - v1) / denom;
    (est.re.is_finite() && est.im.is_finite()).then_some(est)
}

impl ConvergenceReport {
    /// Applies the Cauchy verdict to an evaluated sequence.
    pub fn from_points(chain: ChainSummary, points: Vec<ReportPoint>, errors: Vec<EntryError>, options: &SweepOptions) -> Self {
        let window = options.window.max(1);
        let diffs = cauchy_differences(&points);
        let well_defined = diffs.len() >= window
            && diffs[diffs.len() - window..]
                .iter()
                .all(|d| d.is_finite() && *d < options.cauchy_tol);
        let lim_value = if well_defined { points.last().and_then(|p| p.value) } else { None };
        ConvergenceReport {
            chain,
            extrapolated: aitken(&points),
            points,
            lim_value,
            well_defined,
            cauchy_tol: options.cauchy_tol,
            window,
            est_order: None,
            oracle_value: None,
            oracle_name: String::new(),
            errors,
        }
    }

    /// Reference value for the order estimate and error columns.
    pub fn with_oracle(mut self, name: &str, value: C64) -> Self {
        self.oracle_name = name.to_string();
        self.oracle_value = Some(value);
        self.est_order = estimate_order(&self, value).ok();
        self
    }

    /// Trailing Cauchy differences, as carried by the not-well-defined error.
    pub fn tail(&self) -> Vec<f64> {
        let d = cauchy_differences(&self.points);
        let start = d.len().saturating_sub(self.window);
        d[start..].to_vec()
    }

    pub fn values(&self) -> Vec<Option<C64>> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// `|value − oracle| / |oracle|` per point.
    pub fn relative_errors(&self) -> Vec<Option<f64>> {
        let Some(o) = self.oracle_value else {
            return vec![None; self.points.len()];
        };
        self.points
            .iter()
            .map(|p| p.value.map(|v| (v - o).norm() / o.norm().max(f64::MIN_POSITIVE)))
            .collect()
    }

    /// Re-runs the verdict at another tolerance.
    pub fn at_tolerance(&self, tol: f64) -> Self {
        let opts = SweepOptions {
            cauchy_tol: tol,
            window: self.window,
            parallel: false,
        };
        let mut r = Self::from_points(self.chain.clone(), self.points.clone(), self.errors.clone(), &opts);
        r.oracle_name = self.oracle_name.clone();
        r.oracle_value = self.oracle_value;
        r.est_order = self.est_order;
        r
    }

    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .zip(self.relative_errors())
            .map(|(p, rel)| {
                serde_json::json!({
                    "N": p.n,
                    "value_re": p.value.map(|v| v.re),
                    "value_im": p.value.map(|v| v.im),
                    "rel_err": rel,
                })
            })
            .collect();
        let complex = |z: Option<C64>| z.map(|v| serde_json::json!({ "re": v.re, "im": v.im }));
        serde_json::json!({
            "chain": self.chain,
            "points": points,
            "well_defined": self.well_defined,
            "cauchy_tol": self.cauchy_tol,
            "lim": complex(self.lim_value),
            "est_order": self.est_order,
            "oracle": {
                "name": self.oracle_name,
                "value": complex(self.oracle_value),
            },
            "extrapolated_aitken": complex(self.extrapolated),
            "errors": self.errors,
        })
    }
}

/// Evaluates `quantity` on the principal module of every chain entry and applies the verdict.
///
/// A failing entry is recorded in `errors` and leaves a gap in `points`.
pub fn sweep<F>(chain: &LimitChain, quantity: F, options: &SweepOptions) -> ConvergenceReport
where
    F: Fn(&AlgebraicHilbertSpace) -> Result<C64> + Sync,
{
    let eval = |(i, d): (usize, &crate::weyl::AlgebraDescriptor)| {
        let n = d.n().to_string();
        let res = principal_module(d).and_then(|s| quantity(&s));
        (i, n, res)
    };
    let results: Vec<(usize, String, Result<C64>)> = if options.parallel {
        chain.entries.par_iter().enumerate().map(eval).collect()
    } else {
        chain.entries.iter().enumerate().map(eval).collect()
    };
    let mut points = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for (index, n, res) in results {
        let n_num = n.parse::<u64>().unwrap_or(u64::MAX);
        match res {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => points.push(ReportPoint { n: n_num, value: Some(v) }),
            Ok(v) => {
                errors.push(EntryError {
                    index,
                    n,
                    message: format!("non-finite value {v}"),
                });
                points.push(ReportPoint { n: n_num, value: None });
            }
            Err(e) => {
                errors.push(EntryError {
                    index,
                    n,
                    message: e.to_string(),
                });
                points.push(ReportPoint { n: n_num, value: None });
            }
        }
    }
    ConvergenceReport::from_points(ChainSummary::of(chain), points, errors, options)
}

/// Least-squares slope of `log|v_n − reference|` against `log N_n`.
pub fn estimate_order(report: &ConvergenceReport, reference: C64) -> Result<f64> {
    if !reference.re.is_finite() || !reference.im.is_finite() {
        return Err(Error::InvalidParameter("reference must be finite".into()));
    }
    let pts: Vec<(f64, f64)> = report
        .points
        .iter()
        .filter_map(|p| {
            let v = p.value?;
            let err = (v - reference).norm();
            (err > 0.0 && p.n > 0).then(|| ((p.n as f64).ln(), err.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, have: pts.len() });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { needed: 3, have: 1 });
    }
    Ok(sxy / sxx)
}

/// The limit of a well-defined report.
pub fn lim_value(report: &ConvergenceReport) -> Result<C64> {
    match (report.well_defined, report.lim_value) {
        (true, Some(v)) => Ok(v),
        _ => Err(Error::NotWellDefined { tail: report.tail() }),
    }
}
