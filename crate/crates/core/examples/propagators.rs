//! Free and harmonic propagators swept along a doubling chain against their continuum kernels.

use std::time::Instant;

use dirac_calculus::app::{propagator_report, RunConfig};
use dirac_calculus::calculus::HamiltonianKind;

fn main() -> dirac_calculus::Result<()> {
    let config = RunConfig {
        chain: "doubling:7".parse()?,
        ..RunConfig::default()
    };
    let (x, y, t) = (0.5, 0.0, 1.0);
    for kind in [HamiltonianKind::Free, HamiltonianKind::Harmonic] {
        let start = Instant::now();
        let report = propagator_report(&config, kind, x, y, t)?;
        println!("{} kernel at (x, y, t) = ({x}, {y}, {t}), {}:", kind.name(), report.oracle_name);
        println!("  oracle  {:.6}", report.oracle_value.unwrap_or_default());
        for (p, e) in report.points.iter().zip(report.relative_errors()) {
            match p.value {
                Some(v) => println!("  N = {:>6}  K = {v:.6}  rel. error {:.2e}", p.n, e.unwrap_or(f64::NAN)),
                None => println!("  N = {:>6}  failed", p.n),
            }
        }
        println!("  well-defined: {}  ({:.1?})", report.well_defined, start.elapsed());
    }
    Ok(())
}
