use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirac_calculus::app::{self, CommandOutput, Format, GaussRequest, RunConfig, StateKind, DEFAULT_EPSILONS};
use dirac_calculus::calculus::HamiltonianKind;
use dirac_calculus::dsl::Bindings;
use dirac_calculus::rational::parse_rational;
use dirac_calculus::{Error, Result};

#[derive(Parser)]
#[command(name = "dirac", version, about = "Finite Weyl algebras, discrete propagators and continuum-limit sweeps")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Flat `key = value` file, overridden by flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "hbar-over-2pi", global = true, value_name = "P/Q")]
    hbar_over_2pi: Option<String>,
    #[arg(long = "h-ratio", global = true, value_name = "P/Q")]
    h_ratio: Option<String>,
    /// Chain as `<factorial|lcm|doubling>:<depth>`
    #[arg(long, global = true)]
    chain: Option<String>,
    /// Cauchy tolerance of the limit verdict
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true, value_name = "json|csv")]
    format: Option<String>,
    /// Shorthand for `--format json`
    #[arg(long, global = true, conflicts_with = "format")]
    json: bool,
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Residual of QP − PQ = iħ along the chain
    Ccr {
        #[arg(long, default_value = "gaussian", value_name = "gaussian|uniform")]
        state: String,
    },
    /// Delta-normalized propagator ⟨x|e^{−iHt/ħ}|y⟩ along the chain
    Propagator {
        #[arg(long, default_value = "free", value_name = "free|harmonic")]
        kind: String,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        x: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        y: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        t: f64,
    },
    /// Regularized oscillator trace against both closed forms
    Trace {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        t: f64,
        /// Comma-separated damping values extrapolated to zero
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
    },
    /// Gauss sums: closed form against direct summation, or reciprocity residuals
    Gauss {
        #[arg(long, conflicts_with_all = ["p", "q", "random"])]
        n: Option<i64>,
        #[arg(long, requires = "q")]
        p: Option<i64>,
        #[arg(long, requires = "p")]
        q: Option<i64>,
        /// Number of seeded random (p, q) pairs
        #[arg(long, conflicts_with_all = ["p", "q"])]
        random: Option<usize>,
    },
    /// Decomposition of a principal module restricted to a subalgebra
    Restrict {
        #[arg(long = "parent-a")]
        parent_a: String,
        #[arg(long = "parent-b")]
        parent_b: String,
        #[arg(long = "sub-a")]
        sub_a: String,
        #[arg(long = "sub-b")]
        sub_b: String,
    },
    /// Evaluate a Dirac-notation expression along the chain
    Eval {
        #[arg(long, conflicts_with = "expr_file", required_unless_present = "expr_file")]
        expr: Option<String>,
        #[arg(long = "expr-file")]
        expr_file: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
    },
}

fn config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    if let Some(path) = &g.config {
        c.apply_file(path)?;
    }
    let flags = [
        ("hbar_over_2pi", &g.hbar_over_2pi),
        ("h_ratio", &g.h_ratio),
        ("chain", &g.chain),
        ("tol", &g.tol),
        ("format", &g.format),
        ("seed", &g.seed),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            c.set(key, v)?;
        }
    }
    if g.json {
        c.format = Format::Json;
    }
    if let Some(out) = &g.out {
        c.out = Some(out.clone());
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<(CommandOutput, RunConfig)> {
    let c = config(&cli.global)?;
    let out = match cli.command {
        Command::Ccr { state } => app::cmd_ccr(&c, state.parse::<StateKind>()?)?,
        Command::Propagator { kind, x, y, t } => app::cmd_propagator(&c, kind.parse::<HamiltonianKind>()?, x, y, t)?,
        Command::Trace { t, epsilons } => app::cmd_trace(&c, t, &epsilons.unwrap_or(DEFAULT_EPSILONS.to_vec()))?,
        Command::Gauss { n, p, q, random } => {
            let request = match (n, p, q, random) {
                (Some(n), ..) => GaussRequest::Quadratic(n),
                (_, Some(p), Some(q), _) => GaussRequest::Reciprocity { p, q },
                (.., Some(k)) => GaussRequest::Random(k),
                _ => return Err(Error::InvalidParameter("gauss needs --n, --p with --q, or --random".into())),
            };
            app::cmd_gauss(&c, request)?
        }
        Command::Restrict { parent_a, parent_b, sub_a, sub_b } => {
            let r = |s: &str| parse_rational(s);
            let (pa, pb, sa, sb) = (r(&parent_a)?, r(&parent_b)?, r(&sub_a)?, r(&sub_b)?);
            app::cmd_restrict(&c, (&pa, &pb), (&sa, &sb))?
        }
        Command::Eval { expr, expr_file, x, y, t } => {
            let text = match (expr, expr_file) {
                (Some(e), _) => e,
                (None, Some(path)) => std::fs::read_to_string(&path)
                    .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?,
                (None, None) => return Err(Error::InvalidParameter("eval needs --expr or --expr-file".into())),
            };
            let mut b = Bindings::new();
            for (k, v) in [("x", x), ("y", y), ("t", t)] {
                if let Some(v) = v {
                    b.insert(k.to_string(), v);
                }
            }
            app::cmd_eval(&c, &text, &b)?
        }
    };
    Ok((out, c))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(out, c)| {
        let text = out.render(c.format)?;
        match &c.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Error::Numeric(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(out.exit_code)
    }) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dirac: {e}");
            ExitCode::from(app::exit_code(&e) as u8)
        }
    }
}
