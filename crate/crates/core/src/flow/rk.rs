//! Dormand–Prince 5(4) embedded pair for autonomous systems.

use nalgebra::{Cholesky, DMatrix, Dyn};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// 5th-order weights (equal to the last row of `A`, so the pair is FSAL).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub struct StepOutcome {
    pub y: Vec<f64>,
    /// Derivative at the new point (reusable as the next first stage).
    pub dy: Vec<f64>,
    pub error: Vec<f64>,
}

/// One trial step of size `h` from `y` with known derivative `dy0`.
///
/// Returns `None` when the right-hand side cannot be evaluated at some stage.
pub fn dopri_step<F>(f: &mut F, y: &[f64], dy0: &[f64], h: f64) -> Option<StepOutcome>
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(dy0.to_vec());
    let mut stage = vec![0.0; n];
    for s in 1..7 {
        debug_assert!(C[s] > 0.0);
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += A[s][j] * kj[i];
            }
            stage[i] = y[i] + h * acc;
        }
        k.push(f(&stage)?);
    }
    // stage 7 is evaluated at y + h Σ B5 k, i.e. the new point
    let y_new = stage;
    let mut error = vec![0.0; n];
    for i in 0..n {
        let mut e = 0.0;
        for s in 0..7 {
            e += (B5[s] - B4[s]) * k[s][i];
        }
        error[i] = h * e;
    }
    let dy = k.pop().expect("seven stages");
    Some(StepOutcome { y: y_new, dy, error })
}

/// Weighted RMS error norm used by the step controller.
pub fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], rel_tol: f64, abs_tol: f64) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = abs_tol + rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// RMS size of `L⁻¹ E L⁻ᵀ` over `rel_tol`, where `P = L Lᵀ`: the local error
/// measured in the metric itself.
pub fn relative_metric_error(chol: &Cholesky<f64, Dyn>, error: &DMatrix<f64>, rel_tol: f64) -> f64 {
    let l = chol.l();
    let Some(x) = l.solve_lower_triangular(error) else {
        return f64::INFINITY;
    };
    let Some(m) = l.solve_lower_triangular(&x.transpose()) else {
        return f64::INFINITY;
    };
    m.norm() / (rel_tol * (error.nrows().max(1) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fifth_order() {
        let mut f = |y: &[f64]| Some(vec![-y[0]]);
        let err_at = |h: f64| {
            let mut f = |y: &[f64]| Some(vec![-y[0]]);
            let out = dopri_step(&mut f, &[1.0], &[-1.0], h).unwrap();
            (out.y[0] - (-h).exp()).abs()
        };
        let (e1, e2) = (err_at(0.2), err_at(0.1));
        // local error O(h^6)
        assert!(e1 / e2 > 40.0, "{e1} {e2}");
        let out = dopri_step(&mut f, &[1.0], &[-1.0], 0.1).unwrap();
        assert!((out.dy[0] + out.y[0]).abs() < 1e-15);
    }

    #[test]
    fn metric_error_is_scale_free() {
        let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let e = DMatrix::from_row_slice(2, 2, &[1e-9, 2e-10, 2e-10, -5e-10]);
        let a = relative_metric_error(&Cholesky::new(p.clone()).unwrap(), &e, 1e-8);
        let b = relative_metric_error(&Cholesky::new(p * 1e-6).unwrap(), &(e * 1e-6), 1e-8);
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn linear_rhs_is_exact() {
        let mut f = |_y: &[f64]| Some(vec![-1.0, 2.0]);
        let out = dopri_step(&mut f, &[3.0, 0.0], &[-1.0, 2.0], 0.5).unwrap();
        assert!((out.y[0] - 2.5).abs() < 1e-15);
        assert!((out.y[1] - 1.0).abs() < 1e-15);
        assert!(out.error.iter().all(|e| e.abs() < 1e-15));
    }
}
