//! Discrete versions of the one-sided derivative tools used to control the
//! supremum of a smooth family: left difference quotients of sampled
//! functions and sup-over-a-finite-set tables with their argmax sets.

use crate::error::{Error, Result};

/// Left difference quotient at every sample after the first:
/// entry `i` is `(v_{i+1} - v_i) / (t_{i+1} - t_i)`, the estimate at `t_{i+1}`.
pub fn dini_upper_left(samples: &[(f64, f64)]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::DegenerateGrid("need at least two samples".into()));
    }
    samples
        .windows(2)
        .map(|w| {
            let dt = w[1].0 - w[0].0;
            if !(dt > 0.0) {
                return Err(Error::DegenerateGrid("sample times must be strictly increasing".into()));
            }
            Ok((w[1].1 - w[0].1) / dt)
        })
        .collect()
}

/// `φ(t) = max_x g(t, x)` on a finite set, with the argmax set at each time.
#[derive(Debug, Clone, PartialEq)]
pub struct SupTable {
    pub times: Vec<f64>,
    pub phi: Vec<f64>,
    /// Indices into the point set attaining the max (within the tolerance).
    pub argmax: Vec<Vec<usize>>,
}

/// Tabulates `φ` over `times`. Points within `tol · (1 + |φ|)` of the max
/// count as maximizers.
pub fn sup_function<X, G>(points: &[X], times: &[f64], g: G, tol: f64) -> Result<SupTable>
where
    G: Fn(f64, &X) -> f64,
{
    if points.is_empty() {
        return Err(Error::DegenerateGrid("empty point set".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DegenerateGrid("times must be strictly increasing".into()));
    }
    let mut phi = Vec::with_capacity(times.len());
    let mut argmax = Vec::with_capacity(times.len());
    for &t in times {
        let vals: Vec<f64> = points.iter().map(|x| g(t, x)).collect();
        let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let thresh = m - tol * (1.0 + m.abs());
        argmax.push(vals.iter().enumerate().filter(|(_, &v)| v >= thresh).map(|(i, _)| i).collect());
        phi.push(m);
    }
    Ok(SupTable { times: times.to_vec(), phi, argmax })
}

/// `min_{x ∈ argmax} ∂g/∂t (t, x)` for a given argmax set.
pub fn argmax_min_rate<X, D>(points: &[X], argmax: &[usize], t: f64, dg_dt: D) -> f64
where
    D: Fn(f64, &X) -> f64,
{
    argmax.iter().map(|&i| dg_dt(t, &points[i])).fold(f64::INFINITY, f64::min)
}

/// Left quotient of `φ` at `t` with step `h`: `(φ(t) - φ(t - h)) / h`.
pub fn left_quotient_of_sup<X, G>(points: &[X], t: f64, h: f64, g: G) -> Result<f64>
where
    G: Fn(f64, &X) -> f64,
{
    let table = sup_function(points, &[t - h, t], g, 0.0)?;
    let q = dini_upper_left(&[(table.times[0], table.phi[0]), (table.times[1], table.phi[1])])?;
    Ok(q[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(dini_upper_left(&[(0.0, 1.0)]).is_err());
        assert!(dini_upper_left(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(sup_function::<f64, _>(&[], &[0.0], |t, x| t * x, 0.0).is_err());
    }

    #[test]
    fn linear_family_at_zero() {
        let xs: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let table = sup_function(&xs, &[0.0], |t, x| x * t, 1e-12).unwrap();
        assert_eq!(table.argmax[0].len(), xs.len());
        let rate = argmax_min_rate(&xs, &table.argmax[0], 0.0, |_, x| *x);
        assert!((rate + 1.0).abs() < 1e-12);
        let q = left_quotient_of_sup(&xs, 0.0, 1e-3, |t, x| x * t).unwrap();
        assert!((q + 1.0).abs() < 1e-9);
    }

    #[test]
    fn moving_peak_has_zero_quotient() {
        // g(t, x) = -(x - t)^2 with the grid containing every sampled t
        let xs: Vec<f64> = (0..=40).map(|i| -1.0 + 0.05 * i as f64).collect();
        let table = sup_function(&xs, &[0.45, 0.5], |t, x| -(x - t).powi(2), 1e-12).unwrap();
        assert!(table.phi.iter().all(|v| v.abs() < 1e-30));
        let q = dini_upper_left(&[(0.45, table.phi[0]), (0.5, table.phi[1])]).unwrap();
        assert!(q[0].abs() < 1e-28);
        let rate = argmax_min_rate(&xs, &table.argmax[1], 0.5, |t, x| 2.0 * (x - t));
        assert!(rate.abs() < 1e-12);
    }
}
