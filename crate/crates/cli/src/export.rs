//! CSV and JSON result files. Output bytes depend only on the inputs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use squintless_core::beam::{composite_gain_curve, DB_FLOOR};
use squintless_core::num::to_db;
use squintless_core::{ArrayConfig, BenchmarkResult, CompositeGrid, GainMap, Scheme, ScaTrace, SolveParams, SolveReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Label in the top-left cell of a heatmap CSV.
pub const CSV_CORNER: &str = "freq_ghz\\angle_deg";

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create directory {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write to {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Fixed-point formatting without a negative zero.
fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Gain cell: truncated toward zero at 4 decimals.
fn gain_cell(g: f64) -> String {
    fixed((g.max(DB_FLOOR) * 1e4).trunc() / 1e4, 4)
}

/// CSV text of a gain map: angles (degrees) across, frequencies (GHz) down,
/// gains in dB floored at -120.
pub fn heatmap_csv(map: &GainMap) -> String {
    let mut out = String::new();
    out.push_str(CSV_CORNER);
    for &a in &map.angle_axis {
        out.push(',');
        out.push_str(&fixed(a.to_degrees(), 6));
    }
    out.push('\n');
    for (f, row) in map.freq_axis.iter().zip(&map.gains_db) {
        out.push_str(&fixed(f / 1e9, 6));
        for &g in row {
            let _ = write!(out, ",{}", gain_cell(g));
        }
        out.push('\n');
    }
    out
}

pub fn export_heatmap_csv(map: &GainMap, path: &Path) -> Result<()> {
    write_atomic(path, heatmap_csv(map).as_bytes())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub num_antennas: usize,
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub spacing_m: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub samples: usize,
    pub penalty_rho: f64,
    pub randomizations: usize,
    pub mu_candidates: usize,
    pub ao_tol: f64,
    pub ao_max_iter: usize,
    pub sca_tol: f64,
    pub sca_max_iter: usize,
    pub rotation_tol: f64,
    pub rotation_max_iter: usize,
}

impl ConfigEcho {
    pub fn new(array: &ArrayConfig, theta_min_deg: f64, theta_max_deg: f64, params: &SolveParams) -> Self {
        Self {
            num_antennas: array.num_antennas,
            carrier_freq_hz: array.carrier_freq,
            bandwidth_hz: array.bandwidth,
            spacing_m: array.spacing,
            theta_min_deg,
            theta_max_deg,
            samples: params.samples,
            penalty_rho: params.rho,
            randomizations: params.n_randomizations,
            mu_candidates: params.mu_candidates,
            ao_tol: params.ao_tol,
            ao_max_iter: params.ao_max_iter,
            sca_tol: params.sca_tol,
            sca_max_iter: params.sca_max_iter,
            rotation_tol: params.rotation_tol,
            rotation_max_iter: params.rotation_max_iter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationEcho {
    pub alpha_rad: f64,
    pub beta_rad: f64,
    pub gamma_rad: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub gamma_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEcho {
    pub objective_values: Vec<f64>,
    pub rank_one_gaps: Vec<f64>,
    pub solver_gaps: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub rho: f64,
    pub escalated: bool,
}

impl From<&ScaTrace> for TraceEcho {
    fn from(t: &ScaTrace) -> Self {
        Self {
            objective_values: t.objective_values.clone(),
            rank_one_gaps: t.rank_one_gaps.clone(),
            solver_gaps: t.solver_gaps.clone(),
            converged: t.converged,
            iterations: t.iterations,
            rho: t.rho,
            escalated: t.escalated,
        }
    }
}

/// How a scheme was set up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignEcho {
    pub description: String,
    /// Bandwidth of the grid the weights were designed on.
    pub design_bandwidth_hz: f64,
    /// Rotation coefficient held fixed during the design, if any.
    pub fixed_mu: Option<f64>,
    pub rotation_optimized: bool,
}

impl DesignEcho {
    pub fn for_scheme(scheme: Scheme, array: &ArrayConfig, theta_min_deg: f64, theta_max_deg: f64) -> Self {
        let center = 0.5 * (theta_min_deg + theta_max_deg);
        let (bw, fixed_mu, rot) = match scheme {
            Scheme::NarrowbandFixed => (0.0, Some(1.0), false),
            Scheme::WidebandFixed => (array.bandwidth, Some(1.0), false),
            Scheme::NarrowbandRotated => (0.0, None, true),
            Scheme::CenterAngle => (array.bandwidth, Some(center.to_radians().cos()), false),
            Scheme::Proposed => (array.bandwidth, None, true),
        };
        let mut description = scheme.description().to_string();
        if scheme == Scheme::CenterAngle {
            let _ = write!(description, " (mu = cos({center} deg))");
        }
        Self {
            description,
            design_bandwidth_hz: bw,
            fixed_mu,
            rotation_optimized: rot,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeEntry {
    pub id: String,
    pub design: DesignEcho,
    pub mu: f64,
    pub rotation: RotationEcho,
    pub phases_rad: Vec<f64>,
    pub min_gain: f64,
    pub min_gain_db: f64,
    /// Relaxation value of the initialization problem.
    pub sdr_bound: f64,
    pub converged: bool,
    pub composite_grid: Vec<f64>,
    pub gain_curve: Vec<f64>,
    pub gain_curve_db: Vec<f64>,
    pub ao_trace: Vec<f64>,
    pub beamforming_traces: Vec<TraceEcho>,
    pub rotation_traces: Vec<TraceEcho>,
}

impl SchemeEntry {
    pub fn new(id: &str, design: DesignEcho, report: &SolveReport, grid: &CompositeGrid) -> Self {
        let curve = composite_gain_curve(&report.weights, report.mu, grid);
        let a = &report.angles;
        Self {
            id: id.to_string(),
            design,
            mu: report.mu,
            rotation: RotationEcho {
                alpha_rad: a.alpha,
                beta_rad: a.beta,
                gamma_rad: a.gamma,
                alpha_deg: a.alpha.to_degrees(),
                beta_deg: a.beta.to_degrees(),
                gamma_deg: a.gamma.to_degrees(),
            },
            phases_rad: report.weights.phases.clone(),
            min_gain: report.min_gain,
            min_gain_db: report.min_gain_db,
            sdr_bound: report.sdr_bound,
            converged: report.converged,
            composite_grid: grid.samples().to_vec(),
            gain_curve_db: curve.iter().map(|&g| to_db(g, DB_FLOOR)).collect(),
            gain_curve: curve,
            ao_trace: report.ao_trace.clone(),
            beamforming_traces: report.beamforming_traces.iter().map(TraceEcho::from).collect(),
            rotation_traces: report.rotation_traces.iter().map(TraceEcho::from).collect(),
        }
    }

    pub fn from_benchmark(result: &BenchmarkResult, array: &ArrayConfig, theta_min_deg: f64, theta_max_deg: f64) -> Self {
        Self::new(
            result.scheme.id(),
            DesignEcho::for_scheme(result.scheme, array, theta_min_deg, theta_max_deg),
            &result.report,
            &result.grid,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub schemes: Vec<SchemeEntry>,
}

impl ReportDocument {
    pub fn new(seed: u64, config: ConfigEcho, schemes: Vec<SchemeEntry>) -> Self {
        Self {
            version: VERSION.to_string(),
            seed,
            config,
            schemes,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a report file", path.display()))
    }
}

pub fn export_report_json(doc: &ReportDocument, path: &Path) -> Result<()> {
    write_atomic(path, doc.to_json()?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_drops_negative_zero() {
        assert_eq!(fixed(-0.00001, 4), "0.0000");
        assert_eq!(fixed(-1.5, 4), "-1.5000");
        assert_eq!(fixed(15.05149978, 4), "15.0515");
    }

    #[test]
    fn gain_cells_truncate() {
        assert_eq!(gain_cell(10.0 * 32f64.log10()), "15.0514");
        assert_eq!(gain_cell(-3.00009), "-3.0000");
        assert_eq!(gain_cell(-0.00004), "0.0000");
        assert_eq!(gain_cell(-500.0), "-120.0000");
        assert_eq!(gain_cell(f64::NEG_INFINITY), "-120.0000");
    }

    #[test]
    fn small_map_layout() {
        let map = GainMap {
            freq_axis: vec![0.95e12, 1.05e12],
            angle_axis: vec![0.0, std::f64::consts::FRAC_PI_3],
            gains_db: vec![vec![1.0, -200.0], vec![2.5, 3.25]],
        };
        let csv = heatmap_csv(&map);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "freq_ghz\\angle_deg,0.000000,60.000000");
        assert_eq!(lines[1], "950.000000,1.0000,-120.0000");
        assert_eq!(lines[2], "1050.000000,2.5000,3.2500");
    }
}
