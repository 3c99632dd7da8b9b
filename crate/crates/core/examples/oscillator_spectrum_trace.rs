//! Low oscillator levels and the regularized trace of the evolution operator.

use dirac_calculus::app::{full_space_trace_report, sector_trace_report, trace_comparison, RunConfig, DEFAULT_EPSILONS};
use dirac_calculus::calculus::HamiltonianKind;
use dirac_calculus::sector::ObservableSector;

fn main() -> dirac_calculus::Result<()> {
    let mut config = RunConfig {
        chain: "doubling:7".parse()?,
        ..RunConfig::default()
    };
    let chain = config.build_chain()?;
    let deepest = chain.entries.last().expect("non-empty chain");
    let sector = ObservableSector::new(deepest, HamiltonianKind::Harmonic)?;
    let hbar = sector.geometry().hbar;
    println!("lowest levels at N = {}:", deepest.n());
    for (n, e) in sector.spectrum()?.iter().take(10).enumerate() {
        println!("  E_{n}/ħ = {:.5}  (exact {})", e / hbar, n as f64 + 0.5);
    }

    let t = 1.0;
    config.chain = "doubling:8".parse()?;
    let report = sector_trace_report(&config, t, &DEFAULT_EPSILONS)?;
    println!("sector trace at t = {t}:");
    for p in &report.points {
        println!("  N = {:>6}  {:.6}", p.n, p.value.unwrap_or_default());
    }
    println!("  well-defined: {}", report.well_defined);
    println!("{:#}", trace_comparison(report.lim_value, t, 1e-2));

    // Every sector level recurs four times in the full space.
    config.chain = "doubling:6".parse()?;
    let full = full_space_trace_report(&config, t, &DEFAULT_EPSILONS)?;
    if let Some(Some(v)) = full.values().last() {
        println!("full-space trace at N = {}: {v:.6}, ratio to oracle {:.4}", full.points.last().map_or(0, |p| p.n), v / report.oracle_value.unwrap_or_default());
    }
    Ok(())
}
