//! Subcommand implementations.

use std::path::Path;
use std::thread;

use anyhow::{bail, Context, Result};
use log::info;

use squintless_core::beam::gain_heatmap;
use squintless_core::composite::composite_grid;
use squintless_core::geometry::steering_vector;
use squintless_core::orchestrator::{alternating_optimize, run_benchmark};
use squintless_core::rotation::reconstruct_angles;
use squintless_core::{AngularRange, ArrayConfig, BeamformerWeights, BenchmarkResult, RotationAngles, Scheme};

use crate::config::{Command, RunConfig};
use crate::export::{export_heatmap_csv, export_report_json, ConfigEcho, DesignEcho, ReportDocument, SchemeEntry};
use crate::validate::run_checks;

/// Narrowband beam pointed at the middle of the range, without rotation.
pub fn center_pointed_weights(array: &ArrayConfig, range: &AngularRange) -> Result<BeamformerWeights> {
    let a = steering_vector(array, array.carrier_freq, range.center(), &RotationAngles::zero())?;
    Ok(BeamformerWeights::matched(&a))
}

fn config_echo(cfg: &RunConfig) -> ConfigEcho {
    ConfigEcho::new(&cfg.array, cfg.theta_min_deg, cfg.theta_max_deg, &cfg.params)
}

fn write_heatmap(cfg: &RunConfig, weights: &BeamformerWeights, angles: &RotationAngles, name: &str) -> Result<()> {
    let (nf, na) = cfg.heatmap_res;
    let map = gain_heatmap(weights, angles, &cfg.array, &cfg.range, nf, na)?;
    let path = cfg.out_dir.join(name);
    export_heatmap_csv(&map, &path)?;
    println!("wrote {} (min {:.4} dB, max {:.4} dB)", path.display(), map.min_db(), map.max_db());
    Ok(())
}

fn solve(cfg: &RunConfig) -> Result<()> {
    let report = alternating_optimize(&cfg.array, &cfg.range, &cfg.params).context("solve failed")?;
    let grid = composite_grid(&cfg.array, &cfg.range, cfg.params.samples)?;
    let design = DesignEcho::for_scheme(Scheme::Proposed, &cfg.array, cfg.theta_min_deg, cfg.theta_max_deg);
    let entry = SchemeEntry::new(Scheme::Proposed.id(), design, &report, &grid);
    let doc = ReportDocument::new(cfg.params.seed, config_echo(cfg), vec![entry]);
    let path = cfg.out_dir.join("report.json");
    export_report_json(&doc, &path)?;
    println!(
        "mu = {:.6} (gamma = {:.4} deg), min gain = {:.4} dB after {} AO rounds{}",
        report.mu,
        report.angles.gamma.to_degrees(),
        report.min_gain_db,
        report.ao_trace.len() - 1,
        if report.converged { "" } else { " (iteration limit)" }
    );
    println!("wrote {}", path.display());
    write_heatmap(cfg, &report.weights, &report.angles, "heatmap.csv")
}

/// Runs the requested schemes concurrently; results keep the scheme order.
pub fn run_schemes(cfg: &RunConfig, schemes: &[Scheme]) -> Result<Vec<BenchmarkResult>> {
    thread::scope(|s| {
        let handles: Vec<_> = schemes
            .iter()
            .map(|&scheme| s.spawn(move || run_benchmark(scheme, &cfg.array, &cfg.range, &cfg.params)))
            .collect();
        handles
            .into_iter()
            .zip(schemes)
            .map(|(h, scheme)| {
                let r = h.join().map_err(|_| anyhow::anyhow!("scheme {scheme} panicked"))?;
                r.with_context(|| format!("scheme {scheme} failed"))
            })
            .collect()
    })
}

pub fn benchmark_document(cfg: &RunConfig, results: &[BenchmarkResult]) -> ReportDocument {
    let entries = results
        .iter()
        .map(|r| SchemeEntry::from_benchmark(r, &cfg.array, cfg.theta_min_deg, cfg.theta_max_deg))
        .collect();
    ReportDocument::new(cfg.params.seed, config_echo(cfg), entries)
}

fn benchmark(cfg: &RunConfig) -> Result<()> {
    let schemes: Vec<Scheme> = match cfg.scheme {
        Some(s) => vec![s],
        None => Scheme::ALL.to_vec(),
    };
    let results = run_schemes(cfg, &schemes)?;
    let doc = benchmark_document(cfg, &results);
    let path = cfg.out_dir.join("benchmark.json");
    export_report_json(&doc, &path)?;
    println!("{:<10} {:>10} {:>14}  description", "scheme", "mu", "min gain (dB)");
    for r in &results {
        println!(
            "{:<10} {:>10.6} {:>14.4}  {}",
            r.scheme.id(),
            r.report.mu,
            r.report.min_gain_db,
            r.scheme.description()
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn sweep(cfg: &RunConfig, from: Option<&Path>, mu: Option<f64>) -> Result<()> {
    if let Some(path) = from {
        let doc = ReportDocument::read(path)?;
        let wanted = cfg.scheme.map_or(Scheme::Proposed.id(), Scheme::id);
        let entry = doc
            .schemes
            .iter()
            .find(|e| e.id == wanted)
            .or(doc.schemes.first())
            .with_context(|| format!("{} contains no schemes", path.display()))?;
        if entry.phases_rad.len() != cfg.array.num_antennas {
            bail!(
                "{} holds {} phases but --num-antennas is {}",
                path.display(),
                entry.phases_rad.len(),
                cfg.array.num_antennas
            );
        }
        let r = &entry.rotation;
        let angles = RotationAngles::new(r.alpha_rad, r.beta_rad, r.gamma_rad)?;
        let weights = BeamformerWeights::new(entry.phases_rad.clone());
        return write_heatmap(cfg, &weights, &angles, &format!("heatmap_{}.csv", entry.id));
    }
    if let Some(mu) = mu {
        let angles = reconstruct_angles(mu)?;
        return write_heatmap(cfg, &BeamformerWeights::uniform(cfg.array.num_antennas), &angles, "heatmap_uniform.csv");
    }
    let baseline = center_pointed_weights(&cfg.array, &cfg.range)?;
    write_heatmap(cfg, &baseline, &RotationAngles::zero(), "heatmap_baseline.csv")?;
    info!("solving for the rotated heatmap");
    let report = alternating_optimize(&cfg.array, &cfg.range, &cfg.params).context("solve failed")?;
    write_heatmap(cfg, &report.weights, &report.angles, "heatmap_solved.csv")
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let checks = run_checks(&cfg.array, &cfg.range, cfg.params.seed);
    let mut failed = 0;
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", checks.len());
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Solve => solve(cfg),
        Command::Benchmark => benchmark(cfg),
        Command::Sweep { from, mu } => sweep(cfg, from.as_deref(), *mu),
        Command::Validate => validate(cfg),
    }
}
