//! Prints the minimum gain of every scheme on the default configuration.

use squintless_core::composite::AngularRange;
use squintless_core::geometry::ArrayConfig;
use squintless_core::orchestrator::{run_benchmark, Scheme, SolveParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ArrayConfig::new(32, 1e12, 1e11)?;
    let range = AngularRange::from_degrees(0.0, 60.0)?;
    let params = SolveParams::default();
    for scheme in Scheme::ALL {
        let t = std::time::Instant::now();
        let r = run_benchmark(scheme, &config, &range, &params)?;
        println!(
            "{:>8}  mu {:+.6}  min gain {:8.4} dB  ({:.1?})",
            scheme.id(),
            r.report.mu,
            r.report.min_gain_db,
            t.elapsed()
        );
    }
    Ok(())
}
