//! The canonical commutation relation on Gaussian and uniform states along a chain.

use dirac_calculus::app::{ccr_report, strictly_decreasing, RunConfig, StateKind};

fn main() -> dirac_calculus::Result<()> {
    let config = RunConfig::default();
    let hbar = std::f64::consts::TAU / 6.0;
    for state in [StateKind::Gaussian, StateKind::Uniform] {
        let report = ccr_report(&config, state)?;
        println!("{state:?} state on {}:", config.chain);
        for p in &report.points {
            println!("  N = {:>6}  ‖[Q,P]ψ − iħψ‖/ħ = {:.3e}", p.n, p.value.unwrap_or_default().re / hbar);
        }
        println!(
            "  decreasing: {}  order: {}",
            strictly_decreasing(&report),
            report.est_order.map_or("n/a".into(), |o| format!("{o:.3}"))
        );
    }
    Ok(())
}
