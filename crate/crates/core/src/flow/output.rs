//! Trajectory CSV, verdict sidecar and long-format plot data.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{FlowResult, Verdict};
use crate::error::Result;

/// Header row: `t`, the row-major upper triangle of `P`, then the monitors.
pub fn csv_header(dim: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for i in 0..dim {
        for j in i..dim {
            cols.push(format!("p_{}{}", i + 1, j + 1));
        }
    }
    cols.extend(["lambda_min", "lambda_max", "scalar", "k_fiber", "ric_norm"].map(String::from));
    cols.join(",")
}

/// Writes one row per sample. Floats use the shortest round-trip form;
/// a missing `k_fiber` is left empty.
pub fn write_trajectory_csv<W: Write>(mut w: W, result: &FlowResult) -> Result<()> {
    let dim = result.samples.first().map_or(0, |s| s.metric.nrows());
    writeln!(w, "{}", csv_header(dim))?;
    for s in &result.samples {
        let mut row = vec![s.t.to_string()];
        for i in 0..dim {
            for j in i..dim {
                row.push(s.metric[(i, j)].to_string());
            }
        }
        row.push(s.eigenvalues[0].to_string());
        row.push(s.eigenvalues[dim - 1].to_string());
        row.push(s.scalar.to_string());
        row.push(s.k_fiber.map(|k| k.to_string()).unwrap_or_default());
        row.push(s.ric_norm.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub space: String,
    pub seed: Option<u64>,
    pub verdict: Verdict,
    pub extinction_bound: Option<f64>,
    pub killing_bound: Option<f64>,
    pub within_bound: Option<bool>,
    pub slope_violations: usize,
    pub scalar_violations: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub max_equivariance_defect: f64,
    pub failure: Option<String>,
}

/// Long-format series `t,series,value` for plotting: eigenvalues, scalar
/// curvature, `k` and (when available) the linear bound `k(0) + b t / 2`.
pub fn write_plot_data<W: Write>(mut w: W, result: &FlowResult, killing_bound: Option<f64>) -> Result<()> {
    writeln!(w, "t,series,value")?;
    let k0 = result.samples.first().and_then(|s| s.k_fiber);
    for s in &result.samples {
        for (i, l) in s.eigenvalues.iter().enumerate() {
            writeln!(w, "{},lambda_{},{}", s.t, i + 1, l)?;
        }
        writeln!(w, "{},scalar,{}", s.t, s.scalar)?;
        if let Some(k) = s.k_fiber {
            writeln!(w, "{},k_fiber,{}", s.t, k)?;
        }
        if let (Some(k0), Some(b)) = (k0, killing_bound) {
            writeln!(w, "{},k_bound,{}", s.t, k0 + 0.5 * b * s.t)?;
        }
    }
    Ok(())
}
