//! Subcommand implementations behind the `dirac` binary.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::calculus::{ccr_residual, gaussian_state, uniform_state, HamiltonianKind};
use crate::continuum::{free_kernel, harmonic_kernel, harmonic_trace, harmonic_trace_printed};
use crate::dsl::{self, Bindings};
use crate::error::{Error, Result};
use crate::gauss::{gauss_closed, gauss_closed_quadratic, gauss_direct, landsberg_schaar_residual, GaussSumSpec};
use crate::hilbert::{principal_module, restrict_module};
use crate::limits::{estimate_order, sweep, ConvergenceReport, SweepOptions, DEFAULT_CAUCHY_TOL};
use crate::linalg::C64;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::sector::{damped_trace, full_space_damped_trace, ObservableSector};
use crate::weyl::{build_chain, make_algebra, ChainSpec, LimitChain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hbar_over_2pi: Rational,
    pub h_ratio: Rational,
    pub chain: ChainSpec,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hbar_over_2pi: parse_rational("1/6").expect("literal"),
            h_ratio: parse_rational("1").expect("literal"),
            chain: ChainSpec::default(),
            tol: DEFAULT_CAUCHY_TOL,
            format: Format::Json,
            out: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Sets one `key = value` entry; keys accept `-` or `_` as separators.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "hbar_over_2pi" => self.hbar_over_2pi = positive_rational(value)?,
            "h_ratio" => self.h_ratio = positive_rational(value)?,
            "chain" => self.chain = value.parse()?,
            "tol" => {
                self.tol = value
                    .parse()
                    .ok()
                    .filter(|t: &f64| t.is_finite() && *t > 0.0)
                    .ok_or_else(|| Error::InvalidParameter(format!("tolerance must be a positive number, got '{value}'")))?
            }
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("seed must be a non-negative integer, got '{value}'")))?
            }
            other => return Err(Error::InvalidParameter(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key = value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    pub fn build_chain(&self) -> Result<LimitChain> {
        build_chain(&self.h_ratio, self.chain.depth, &self.hbar_over_2pi, self.chain.schedule)
    }

    fn options(&self) -> SweepOptions {
        SweepOptions::with_tol(self.tol)
    }

    fn to_json(&self) -> Value {
        json!({
            "hbar_over_2pi": format_rational(&self.hbar_over_2pi),
            "h_ratio": format_rational(&self.h_ratio),
            "chain": self.chain.to_string(),
            "tol": self.tol,
            "seed": self.seed,
        })
    }
}

fn positive_rational(text: &str) -> Result<Rational> {
    let r = parse_rational(text)?;
    if r <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidParameter(format!("expected a positive rational, got '{text}'")));
    }
    Ok(r)
}

/// `2` for bad input, `1` for failed computations.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::IncompatiblePlanck(..)
        | Error::NotSubalgebra { .. }
        | Error::NotAUnit { .. }
        | Error::OutOfRange { .. }
        | Error::Syntax { .. }
        | Error::UnknownIdentifier { .. }
        | Error::UnboundSymbol(_)
        | Error::IllTyped(_)
        | Error::NotExponentiable(_) => 2,
        _ => 1,
    }
}

/// A finished computation: its JSON document, a flat table, and the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub exit_code: i32,
}

impl CommandOutput {
    fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        CommandOutput {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            exit_code: 0,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| Error::Internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Internal(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
            }
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn report_rows(label: &str, r: &ConvergenceReport) -> Vec<Vec<String>> {
    r.points
        .iter()
        .zip(r.relative_errors())
        .map(|(p, e)| {
            vec![
                label.to_string(),
                p.n.to_string(),
                opt(p.value.map(|v| v.re)),
                opt(p.value.map(|v| v.im)),
                opt(e),
            ]
        })
        .collect()
}

const REPORT_HEADER: [&str; 5] = ["series", "N", "value_re", "value_im", "rel_err"];

fn report_output(label: &str, config: &RunConfig, report: &ConvergenceReport, extra: Value) -> CommandOutput {
    let mut doc = json!({ "command": label, "config": config.to_json(), "report": report.to_json() });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    CommandOutput::new(doc, &REPORT_HEADER, report_rows(label, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Gaussian,
    Uniform,
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(StateKind::Gaussian),
            "uniform" => Ok(StateKind::Uniform),
            other => Err(Error::InvalidParameter(format!("unknown state '{other}'"))),
        }
    }
}

pub fn ccr_report(config: &RunConfig, state: StateKind) -> Result<ConvergenceReport> {
    let chain = config.build_chain()?;
    let mut report = sweep(
        &chain,
        |s| {
            let psi = match state {
                StateKind::Gaussian => gaussian_state(s)?,
                StateKind::Uniform => uniform_state(s),
            };
            ccr_residual(s, &psi).map(|r| C64::new(r, 0.0))
        },
        &config.options(),
    );
    report.est_order = estimate_order(&report, C64::new(0.0, 0.0)).ok();
    Ok(report)
}

/// True when every value is present and each is below the previous one.
pub fn strictly_decreasing(report: &ConvergenceReport) -> bool {
    let v: Option<Vec<f64>> = report.points.iter().map(|p| p.value.map(|z| z.norm())).collect();
    v.is_some_and(|v| v.windows(2).all(|w| w[1] < w[0]))
}

pub fn cmd_ccr(config: &RunConfig, state: StateKind) -> Result<CommandOutput> {
    let report = ccr_report(config, state)?;
    let decreasing = strictly_decreasing(&report);
    let mut out = report_output("ccr", config, &report, json!({ "state": format!("{state:?}").to_lowercase(), "strictly_decreasing": decreasing }));
    if state == StateKind::Gaussian && !decreasing {
        out.exit_code = 1;
    }
    Ok(out)
}

/// The DSL text of the delta-normalized propagator for `kind`.
pub fn propagator_expression(kind: HamiltonianKind) -> &'static str {
    match kind {
        HamiltonianKind::Free => "<x| exp(-i*t*Hfree/hbar) |y>",
        HamiltonianKind::Harmonic => "<x| exp(-i*t*Hho/hbar) |y>",
    }
}

pub fn propagator_report(config: &RunConfig, kind: HamiltonianKind, x: f64, y: f64, t: f64) -> Result<ConvergenceReport> {
    let chain = config.build_chain()?;
    let expr = dsl::parse(propagator_expression(kind))?;
    let b = dsl::bindings(&[("x", x), ("y", y), ("t", t)]);
    let report = sweep(&chain, |s| dsl::evaluate(&expr, s, &b), &config.options());
    let hbar = std::f64::consts::TAU * crate::rational::to_f64(&config.hbar_over_2pi);
    let oracle = match kind {
        HamiltonianKind::Free if t != 0.0 => Some(("free continuum kernel", free_kernel(x, y, t, hbar))),
        HamiltonianKind::Harmonic if t.sin().abs() > 1e-9 => Some(("Mehler kernel", harmonic_kernel(x, y, t, hbar))),
        _ => None,
    };
    Ok(match oracle {
        Some((name, v)) => report.with_oracle(name, v),
        None => report,
    })
}

pub fn cmd_propagator(config: &RunConfig, kind: HamiltonianKind, x: f64, y: f64, t: f64) -> Result<CommandOutput> {
    let report = propagator_report(config, kind, x, y, t)?;
    Ok(report_output(
        "propagator",
        config,
        &report,
        json!({ "kind": kind.name(), "x": x, "y": y, "t": t, "expression": propagator_expression(kind) }),
    ))
}

pub const DEFAULT_EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];

fn check_trace_args(t: f64, epsilons: &[f64]) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    damped_trace(&[], t, 1.0, epsilons).map(|_| ())
}

/// Regularized oscillator trace over the observable sector, against the spectral oracle.
pub fn sector_trace_report(config: &RunConfig, t: f64, epsilons: &[f64]) -> Result<ConvergenceReport> {
    check_trace_args(t, epsilons)?;
    let chain = config.build_chain()?;
    let report = sweep(
        &chain,
        |s| {
            let sec = ObservableSector::new(s.descriptor(), HamiltonianKind::Harmonic)?;
            if t == 0.0 {
                return Ok(C64::new(sec.sites() as f64, 0.0));
            }
            sec.trace_with(t, epsilons)
        },
        &config.options(),
    );
    Ok(if (t / 2.0).sin().abs() > 1e-9 {
        report.with_oracle("spectral sum 1/(2i sin(t/2))", harmonic_trace(t))
    } else {
        report
    })
}

/// The same trace over all `N` levels; exactly `N` at `t = 0`.
pub fn full_space_trace_report(config: &RunConfig, t: f64, epsilons: &[f64]) -> Result<ConvergenceReport> {
    check_trace_args(t, epsilons)?;
    let chain = config.build_chain()?;
    let kind = HamiltonianKind::Harmonic;
    Ok(sweep(
        &chain,
        |s| {
            if t == 0.0 {
                return crate::calculus::trace_evolution(s, kind, 0.0, 0.0);
            }
            full_space_damped_trace(&crate::calculus::GridGeometry::new(s.descriptor())?, kind, t, epsilons)
        },
        &config.options(),
    ))
}

/// Which closed form the limit agrees with, within `tol` relative.
pub fn trace_comparison(limit: Option<C64>, t: f64, tol: f64) -> Value {
    let spectral = harmonic_trace(t);
    let printed = harmonic_trace_printed(t);
    let rel = |v: C64, o: C64| (v - o).norm() / o.norm();
    let row = |v: Option<C64>, o: C64| {
        json!({
            "value": { "re": o.re, "im": o.im },
            "rel_err": v.map(|v| rel(v, o)),
        })
    };
    let matches = match limit {
        Some(v) if rel(v, spectral) < tol => "spectral",
        Some(v) if rel(v, printed) < tol => "printed",
        Some(_) => "neither",
        None => "undetermined",
    };
    let ratio = limit.map(|v| {
        let r = printed / v;
        json!({ "re": r.re, "im": r.im })
    });
    json!({
        "spectral_formula": row(limit, spectral),
        "printed_formula": row(limit, printed),
        "printed_over_computed": ratio,
        "matches": matches,
    })
}

pub fn cmd_trace(config: &RunConfig, t: f64, epsilons: &[f64]) -> Result<CommandOutput> {
    let sector = sector_trace_report(config, t, epsilons)?;
    let full = full_space_trace_report(config, t, epsilons)?;
    let comparison = if t.is_finite() && (t / 2.0).sin().abs() > 1e-9 {
        trace_comparison(sector.lim_value, t, 1e-2)
    } else {
        Value::Null
    };
    let doc = json!({
        "command": "trace",
        "config": config.to_json(),
        "t": t,
        "epsilons": epsilons,
        "report": sector.to_json(),
        "full_space": full.to_json(),
        "comparison": comparison,
    });
    let mut rows = report_rows("sector", &sector);
    rows.extend(report_rows("full_space", &full));
    Ok(CommandOutput::new(doc, &REPORT_HEADER, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussRequest {
    Quadratic(i64),
    Reciprocity { p: i64, q: i64 },
    /// `count` random `(p, q) ≤ 500` drawn from the configured seed.
    Random(usize),
}

fn reciprocity_row(p: i64, q: i64) -> Result<Vec<String>> {
    let r = landsberg_schaar_residual(p, q)?;
    Ok(vec!["reciprocity".into(), p.to_string(), q.to_string(), String::new(), String::new(), num(r), String::new()])
}

pub fn cmd_gauss(config: &RunConfig, request: GaussRequest) -> Result<CommandOutput> {
    let header = ["kind", "N_or_p", "q", "value_re", "value_im", "abs_diff", "closed_form_used"];
    match request {
        GaussRequest::Quadratic(n) => {
            let spec = GaussSumSpec::quadratic(n)?;
            let direct = gauss_direct(spec)?;
            let closed = gauss_closed(spec)?;
            let formula = gauss_closed_quadratic(n as u64)?;
            let diff = (closed.value - direct).norm();
            let doc = json!({
                "command": "gauss",
                "config": config.to_json(),
                "N": n,
                "direct": { "re": direct.re, "im": direct.im },
                "closed": { "re": closed.value.re, "im": closed.value.im },
                "closed_form_used": closed.closed_form_used,
                "mod4_formula": { "re": formula.re, "im": formula.im },
                "abs_diff": diff,
            });
            let row = vec![
                "quadratic".into(),
                n.to_string(),
                String::new(),
                num(closed.value.re),
                num(closed.value.im),
                num(diff),
                closed.closed_form_used.to_string(),
            ];
            Ok(CommandOutput::new(doc, &header, vec![row]))
        }
        GaussRequest::Reciprocity { p, q } => {
            let r = landsberg_schaar_residual(p, q)?;
            let doc = json!({ "command": "gauss", "config": config.to_json(), "p": p, "q": q, "residual": r });
            Ok(CommandOutput::new(doc, &header, vec![reciprocity_row(p, q)?]))
        }
        GaussRequest::Random(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut rows = Vec::with_capacity(count);
            let mut entries = Vec::with_capacity(count);
            let mut worst = 0.0f64;
            for _ in 0..count {
                let (p, q) = (rng.random_range(1..=500), rng.random_range(1..=500));
                let r = landsberg_schaar_residual(p, q)?;
                worst = worst.max(r);
                entries.push(json!({ "p": p, "q": q, "residual": r }));
                rows.push(reciprocity_row(p, q)?);
            }
            let doc = json!({
                "command": "gauss",
                "config": config.to_json(),
                "samples": entries,
                "max_residual": worst,
            });
            Ok(CommandOutput::new(doc, &header, rows))
        }
    }
}

pub fn cmd_restrict(config: &RunConfig, parent: (&Rational, &Rational), sub: (&Rational, &Rational)) -> Result<CommandOutput> {
    let pd = make_algebra(parent.0, parent.1, &config.hbar_over_2pi)?;
    let sd = make_algebra(sub.0, sub.1, &config.hbar_over_2pi)?;
    let dec = restrict_module(&principal_module(&pd)?, &sd)?;
    let defect = dec.verify()?;
    let blocks = dec.summary();
    let doc = json!({
        "command": "restrict",
        "config": config.to_json(),
        "parent": { "a": format_rational(parent.0), "b": format_rational(parent.1), "N": pd.n().to_string() },
        "sub": { "a": format_rational(sub.0), "b": format_rational(sub.1), "N": sd.n().to_string() },
        "blocks": blocks,
        "block_count": dec.block_count(),
        "total_dimension": dec.total_dimension(),
        "intertwiner_defect": defect,
    });
    let rows = blocks
        .iter()
        .map(|b| {
            vec![
                num(b.character.theta_u.to_f64()),
                num(b.character.theta_v.to_f64()),
                b.multiplicity.to_string(),
                b.dimension.to_string(),
            ]
        })
        .collect();
    Ok(CommandOutput::new(doc, &["theta_u", "theta_v", "multiplicity", "dimension"], rows))
}

pub fn eval_report(config: &RunConfig, text: &str, bindings: &Bindings) -> Result<ConvergenceReport> {
    let expr = dsl::parse(text)?;
    let chain = config.build_chain()?;
    // Catch type and binding errors once instead of on every entry.
    let first = principal_module(&chain.entries[0])?;
    if let Err(e) = dsl::compile(&expr, &first, bindings) {
        if exit_code(&e) == 2 {
            return Err(e);
        }
    }
    Ok(dsl::evaluate_limit(&expr, &chain, bindings, config.tol))
}

pub fn cmd_eval(config: &RunConfig, text: &str, bindings: &Bindings) -> Result<CommandOutput> {
    let report = eval_report(config, text, bindings)?;
    Ok(report_output("eval", config, &report, json!({ "expression": text, "bindings": bindings })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_file_text("# comment\nhbar_over_2pi = 1/3\nchain = lcm:4\ntol = 1e-2 # inline\nseed=7\n")
            .unwrap();
        assert_eq!(c.hbar_over_2pi, parse_rational("1/3").unwrap());
        assert_eq!(c.chain.to_string(), "lcm:4");
        assert_eq!((c.tol, c.seed), (1e-2, 7));
        assert!(c.apply_file_text("nonsense").is_err());
        assert_eq!(exit_code(&c.set("h-ratio", "1/0").unwrap_err()), 2);
        assert_eq!(exit_code(&c.set("h_ratio", "-1").unwrap_err()), 2);
    }

    #[test]
    fn csv_rendering_has_header_and_rows() {
        let c = RunConfig::default();
        let out = cmd_gauss(&c, GaussRequest::Quadratic(12)).unwrap();
        let text = out.render(Format::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("kind,N_or_p,q,value_re,value_im,abs_diff,closed_form_used"));
        assert!(lines.next().unwrap().starts_with("quadratic,12,"));
    }

    #[test]
    fn random_reciprocity_is_seeded() {
        let c = RunConfig { seed: 3, ..RunConfig::default() };
        let a = cmd_gauss(&c, GaussRequest::Random(5)).unwrap();
        let b = cmd_gauss(&c, GaussRequest::Random(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.json["max_residual"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn restriction_of_twelve_dimensional_module() {
        let c = RunConfig {
            hbar_over_2pi: parse_rational("1/3").unwrap(),
            ..RunConfig::default()
        };
        let half = parse_rational("1/2").unwrap();
        let one = parse_rational("1").unwrap();
        let out = cmd_restrict(&c, (&half, &half), (&one, &one)).unwrap();
        assert_eq!(out.json["block_count"], 4);
        assert_eq!(out.json["total_dimension"], 12);
        let err = cmd_restrict(&c, (&one, &one), (&half, &half)).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn trace_at_zero_counts_dimensions() {
        let c = RunConfig {
            chain: "doubling:3".parse().unwrap(),
            ..RunConfig::default()
        };
        let full = full_space_trace_report(&c, 0.0, &DEFAULT_EPSILONS).unwrap();
        let chain = c.build_chain().unwrap();
        for (p, n) in full.points.iter().zip(chain.dims()) {
            assert_eq!(p.value, Some(C64::new(n.to_string().parse().unwrap(), 0.0)));
        }
    }
}
