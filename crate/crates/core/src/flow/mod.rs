//! Homogeneous Ricci flow `dP/dt = -2 ric(P)` on invariant metrics, with
//! monitors for the fiber sup `k(t)`, scalar curvature and extinction.

pub mod dini;
pub mod output;
mod rk;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bochner::BochnerData;
use crate::curvature::ricci_tensor;
use crate::error::{Error, Result};
use crate::linalg::{from_upper_triangle, upper_triangle};
use crate::presentation::{Metric, Presentation};
use crate::tol::{COMPARISON_TOL, SCALAR_MONOTONE_TOL, SLOPE_TOL};

pub use dini::{dini_upper_left, sup_function, SupTable};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    pub t_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_dt: f64,
    /// Extinction is declared once `λ_min(P) < extinction_eps · λ_min(P(0))`.
    pub extinction_eps: f64,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { t_max: 100.0, rel_tol: 1e-8, abs_tol: 1e-10, sample_dt: 0.1, extinction_eps: 1e-6, max_steps: 1_000_000 }
    }
}

impl FlowOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_max", self.t_max),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("sample_dt", self.sample_dt),
            ("extinction_eps", self.extinction_eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidOptions(format!("{name} must be positive and finite")));
            }
        }
        if self.extinction_eps >= 1.0 {
            return Err(Error::InvalidOptions("extinction_eps must be below 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidOptions("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Extinct { t: f64 },
    ReachedHorizon { t: f64 },
    StepFailure { t: f64 },
}

impl Verdict {
    pub fn extinction_time(&self) -> Option<f64> {
        match self {
            Verdict::Extinct { t } => Some(*t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub metric: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    pub scalar: f64,
    pub k_fiber: Option<f64>,
    /// Largest absolute eigenvalue of the Ricci operator.
    pub ric_norm: f64,
}

/// Per-accepted-step trace of the monitored scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub lambda_min: f64,
    pub scalar: f64,
    pub k_fiber: Option<f64>,
    pub ric_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub samples: Vec<Sample>,
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
    /// Indices `i` into `steps` where the secant slope of `k` on
    /// `[t_i, t_{i+1}]` exceeds `b/2 + SLOPE_TOL`.
    pub slope_violations: Vec<usize>,
    /// Indices `i` into `steps` where scalar curvature decreased on `[t_i, t_{i+1}]`.
    pub scalar_violations: Vec<usize>,
    pub max_equivariance_defect: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub failure: Option<String>,
}

impl FlowResult {
    pub fn k_trace(&self) -> Vec<(f64, f64)> {
        self.steps.iter().filter_map(|s| s.k_fiber.map(|k| (s.t, k))).collect()
    }

    pub fn scalar_trace(&self) -> Vec<(f64, f64)> {
        self.steps.iter().map(|s| (s.t, s.scalar)).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("at least the initial sample")
    }
}

/// Right-hand side `-2 ric(P)` in background coordinates of `m`.
pub fn flow_rhs(p: &Presentation, metric: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g = p.metric(metric.clone())?;
    Ok(ricci_tensor(p, &g).tensor * -2.0)
}

struct Observation {
    eigenvalues: DVector<f64>,
    scalar: f64,
    k_fiber: Option<f64>,
    ric_norm: f64,
}

fn observe(p: &Presentation, g: &Metric, bochner: Option<&BochnerData>) -> Observation {
    let ric = ricci_tensor(p, g);
    Observation {
        eigenvalues: g.eigenvalues().clone(),
        scalar: ric.scalar,
        k_fiber: bochner.map(|b| b.fiber_sup(g.matrix())),
        ric_norm: ric.operator_norm(g),
    }
}

/// Integrates the flow from `g0` with an adaptive Dormand–Prince 5(4) pair.
///
/// Steps are rejected when the local error is too large or the trial metric
/// is not positive definite. The error test uses both the componentwise norm
/// and the metric-relative norm `‖L⁻¹ E L⁻ᵀ‖` with `P = L Lᵀ`, so accuracy
/// stays relative while an eigenvalue collapses. Extinction is declared when the smallest
/// eigenvalue drops below `extinction_eps` times its initial value, or when
/// the step size underflows while curvature has grown.
pub fn integrate(p: &Presentation, g0: &Metric, opts: &FlowOptions, bochner: Option<&BochnerData>) -> Result<FlowResult> {
    opts.validate()?;
    let d = p.dim_m();
    if g0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g0.dim() });
    }
    let b = bochner.map(|bd| bd.killing_bound);
    let mut rhs = |y: &[f64]| -> Option<Vec<f64>> {
        let g = Metric::new(from_upper_triangle(d, y)).ok()?;
        let r = ricci_tensor(p, &g).tensor * -2.0;
        let v = upper_triangle(&r);
        v.iter().all(|x| x.is_finite()).then_some(v)
    };

    let mut y = upper_triangle(g0.matrix());
    let mut dy = rhs(&y).ok_or(Error::DegenerateMetric { min_eigenvalue: g0.eigenvalues()[0] })?;
    let lambda0 = g0.eigenvalues()[0];
    let floor = opts.extinction_eps * lambda0;

    let obs0 = observe(p, g0, bochner);
    let ric_norm0 = obs0.ric_norm;
    let mut t = 0.0_f64;
    let mut samples = vec![Sample {
        t,
        metric: g0.matrix().clone(),
        eigenvalues: obs0.eigenvalues.clone(),
        scalar: obs0.scalar,
        k_fiber: obs0.k_fiber,
        ric_norm: obs0.ric_norm,
    }];
    let mut steps = vec![StepRecord {
        t,
        lambda_min: lambda0,
        scalar: obs0.scalar,
        k_fiber: obs0.k_fiber,
        ric_norm: obs0.ric_norm,
    }];
    let mut slope_violations = Vec::new();
    let mut scalar_violations = Vec::new();
    let mut max_equivariance_defect = p.equivariance_defect(g0.matrix());
    let (mut accepted, mut rejected) = (0usize, 0usize);

    let scale = 1.0 + g0.matrix().amax();
    let rate = 1.0 + dy.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut h_prop = (0.01 * scale / rate).min(opts.t_max).min(opts.sample_dt);
    let mut sample_index = 1usize;
    let mut failure = None;

    let verdict = loop {
        if t >= opts.t_max {
            break Verdict::ReachedHorizon { t };
        }
        if accepted + rejected >= opts.max_steps {
            failure = Some(format!("step budget of {} exhausted", opts.max_steps));
            break Verdict::StepFailure { t };
        }
        let next_sample = (sample_index as f64 * opts.sample_dt).min(opts.t_max);
        let remaining = next_sample - t;
        let clipped = h_prop >= remaining;
        let h = if clipped { remaining } else { h_prop };
        if h <= 1e-14 * t.abs().max(1.0) && !clipped {
            let last = steps.last().expect("initial record");
            if last.ric_norm > 10.0 * ric_norm0.max(1e-300) || last.lambda_min < 1e-3 * lambda0 {
                break Verdict::Extinct { t };
            }
            failure = Some("step size underflow".into());
            break Verdict::StepFailure { t };
        }

        let Some(step) = rk::dopri_step(&mut rhs, &y, &dy, h) else {
            rejected += 1;
            h_prop = h * 0.25;
            continue;
        };
        let p_new = from_upper_triangle(d, &step.y);
        let Some(chol) = Cholesky::new(p_new.clone()) else {
            rejected += 1;
            h_prop = h * 0.5;
            continue;
        };
        let err = rk::error_norm(&step.error, &y, &step.y, opts.rel_tol, opts.abs_tol)
            .max(rk::relative_metric_error(&chol, &from_upper_triangle(d, &step.error), opts.rel_tol));
        if !err.is_finite() || err > 1.0 {
            rejected += 1;
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h_prop = h * factor;
            continue;
        }
        let Ok(g_new) = Metric::new(p_new) else {
            rejected += 1;
            h_prop = h * 0.5;
            continue;
        };

        accepted += 1;
        let t_new = if clipped { next_sample } else { t + h };
        let obs = observe(p, &g_new, bochner);
        let lambda_min = obs.eigenvalues[0];
        let prev = *steps.last().expect("initial record");
        let record = StepRecord { t: t_new, lambda_min, scalar: obs.scalar, k_fiber: obs.k_fiber, ric_norm: obs.ric_norm };
        if let (Some(b), Some(k0), Some(k1)) = (b, prev.k_fiber, record.k_fiber) {
            if (k1 - k0) / (t_new - prev.t) > 0.5 * b + SLOPE_TOL {
                slope_violations.push(steps.len() - 1);
            }
        }
        if record.scalar < prev.scalar - SCALAR_MONOTONE_TOL * (1.0 + prev.scalar.abs()) {
            scalar_violations.push(steps.len() - 1);
        }
        max_equivariance_defect = max_equivariance_defect.max(p.equivariance_defect(g_new.matrix()));
        steps.push(record);
        t = t_new;
        y = step.y;
        dy = step.dy;

        let extinct = lambda_min < floor;
        if clipped || extinct {
            samples.push(Sample {
                t,
                metric: g_new.matrix().clone(),
                eigenvalues: obs.eigenvalues,
                scalar: obs.scalar,
                k_fiber: obs.k_fiber,
                ric_norm: obs.ric_norm,
            });
            if clipped {
                sample_index += 1;
            }
        }
        if extinct {
            break Verdict::Extinct { t };
        }
        let growth = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h_prop = if clipped { h_prop.max(h * growth) } else { h * growth };
    };

    if samples.last().map(|s| s.t) != Some(t) {
        let g = Metric::new(from_upper_triangle(d, &y))?;
        let obs = observe(p, &g, bochner);
        samples.push(Sample {
            t,
            metric: g.matrix().clone(),
            eigenvalues: obs.eigenvalues,
            scalar: obs.scalar,
            k_fiber: obs.k_fiber,
            ric_norm: obs.ric_norm,
        });
    }

    Ok(FlowResult {
        samples,
        steps,
        verdict,
        slope_violations,
        scalar_violations,
        max_equivariance_defect,
        accepted,
        rejected,
        failure,
    })
}

/// `k(P)`: the largest eigenvalue of `P` compressed to the fiber `m_k`.
pub fn fiber_sup(bochner: &BochnerData, metric: &DMatrix<f64>) -> f64 {
    bochner.fiber_sup(metric)
}

/// Indices `i` with `(k_{i+1} - k_i) / (t_{i+1} - t_i) > b/2 + tol`.
pub fn slope_violations(trace: &[(f64, f64)], b: f64, tol: f64) -> Vec<usize> {
    trace
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) > 0.5 * b + tol)
        .map(|(i, _)| i)
        .collect()
}

/// Slope-bound check over the per-step `k` trace of a flow result.
pub fn check_slope_bound(result: &FlowResult, b: f64) -> Vec<usize> {
    slope_violations(&result.k_trace(), b, SLOPE_TOL)
}

/// Linear-shrinking bound on the extinction time: `2 k(0) / |b|`.
pub fn extinction_bound(bochner: &BochnerData, g0: &Metric) -> f64 {
    2.0 * bochner.fiber_sup(g0.matrix()) / bochner.killing_bound.abs()
}

/// Discrete comparison: `k(t_i) ≤ k(t_0) + slope (t_i - t_0) + COMPARISON_TOL` for all `i`.
pub fn comparison_check(samples: &[(f64, f64)], slope: f64) -> bool {
    let Some(&(t0, k0)) = samples.first() else {
        return true;
    };
    samples.iter().all(|&(t, k)| k <= k0 + slope * (t - t0) + COMPARISON_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn rhs_fixtures() {
        let p = catalog::get("abelian_3").unwrap().presentation;
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.1, 0.0, 0.1, 1.0, 0.0, 0.0, 0.0, 3.0]);
        assert_eq!(flow_rhs(&p, &m).unwrap().amax(), 0.0);

        let p = catalog::get("su2").unwrap().presentation;
        for c in [0.3, 1.0, 7.0] {
            let r = flow_rhs(&p, &(DMatrix::identity(3, 3) * c)).unwrap();
            assert!((r + DMatrix::identity(3, 3)).amax() < 1e-13);
        }

        let p = catalog::get("heisenberg").unwrap().presentation;
        let r = flow_rhs(&p, &DMatrix::identity(3, 3)).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0]));
        assert!((r - expected).amax() < 1e-14);
    }

    #[test]
    fn degenerate_rhs_is_an_error() {
        let p = catalog::get("su2").unwrap().presentation;
        assert!(flow_rhs(&p, &DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn options_validation() {
        let bad = FlowOptions { extinction_eps: 1.5, ..FlowOptions::default() };
        assert!(bad.validate().is_err());
        let bad = FlowOptions { t_max: -1.0, ..FlowOptions::default() };
        assert!(bad.validate().is_err());
        assert!(FlowOptions::default().validate().is_ok());
    }

    #[test]
    fn abelian_fixed_point() {
        let p = catalog::get("abelian_3").unwrap().presentation;
        let g0 = catalog::random_metric(&catalog::get("abelian_3").unwrap(), 4);
        let opts = FlowOptions { t_max: 5.0, sample_dt: 1.0, ..FlowOptions::default() };
        let r = integrate(&p, &g0, &opts, None).unwrap();
        assert_eq!(r.verdict, Verdict::ReachedHorizon { t: 5.0 });
        for s in &r.samples {
            assert_eq!(&s.metric, g0.matrix());
        }
        let times: Vec<f64> = r.samples.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn fake_bound_flags_every_step() {
        let trace: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0)).collect();
        assert_eq!(slope_violations(&trace, -2.0, SLOPE_TOL), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn comparison_cases() {
        let lin: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 1.0 - i as f64 * 0.1)).collect();
        assert!(comparison_check(&lin, -1.0));
        let flat: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0)).collect();
        assert!(comparison_check(&flat, 0.0));
        let up: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, i as f64)).collect();
        assert!(!comparison_check(&up, -0.5));
    }
}
