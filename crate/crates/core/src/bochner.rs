//! Positive Ricci direction along the fibers of a compact semisimple ideal.
//!
//! Given a compact semisimple ideal `k ⊲ g`, split `k = k' ⊕ m_k` with
//! `k' = k ∩ h`, restrict the metric operator to `m_k`, and take `X` a
//! background-unit eigenvector for its largest eigenvalue. Then
//! `ric(X, X) ≥ -B(X, X)/4 > 0`, uniformly in the metric.

use nalgebra::{DMatrix, DVector};

use crate::algebra::Subspace;
use crate::curvature::{mean_curvature, ricci_terms, RicciTerms};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, null_space, sym_eigen, symmetrize};
use crate::presentation::{Metric, Presentation};
use crate::tol::{AUDIT_TOL, BOCHNER_TOL, IDEAL_TOL};

/// Iterates the derived series of an ideal until it stabilizes and certifies
/// the limit as compact semisimple.
pub fn reduce_to_semisimple(p: &Presentation, k: &Subspace) -> Result<Subspace> {
    let algebra = p.algebra();
    let residual = algebra.is_ideal(k);
    if residual > IDEAL_TOL {
        return Err(Error::NotAnIdeal { residual });
    }
    let mut current = k.clone();
    let mut steps = 0;
    loop {
        let next = algebra.derived_subalgebra(&current);
        steps += 1;
        if next.is_zero() {
            return Err(Error::NoSemisimplePart { steps });
        }
        if next.dim() == current.dim() {
            break;
        }
        current = next;
    }
    let cert = algebra.is_compact_semisimple(&current);
    if !cert.compact_semisimple {
        return Err(Error::NotCompactSemisimple { eigenvalues: cert.eigenvalues });
    }
    Ok(current)
}

#[derive(Debug, Clone)]
pub struct BochnerData {
    pub ideal: Subspace,
    /// `k' = k ∩ h`.
    pub fiber_isotropy: Subspace,
    /// `m_k`, the background-orthogonal complement of `k'` in `k`.
    pub fiber: Subspace,
    /// Background-orthonormal basis of `m_k` in `m` coordinates (columns).
    pub fiber_basis: DMatrix<f64>,
    /// `P_{m_k}` in the `fiber_basis` coordinates.
    pub restricted: DMatrix<f64>,
    /// `0 < p_1 ≤ … ≤ p_n`.
    pub eigenvalues: DVector<f64>,
    /// Matching eigenvectors (columns, `fiber_basis` coordinates).
    pub eigenvectors: DMatrix<f64>,
    /// Background-unit top eigenvector, `m` coordinates.
    pub top_direction: DVector<f64>,
    /// Largest eigenvalue of `B|_{m_k}`; strictly negative.
    pub killing_bound: f64,
}

impl BochnerData {
    /// `k(P) = max ⟨P V, V⟩` over background-unit `V ∈ m_k`.
    pub fn fiber_sup(&self, metric: &DMatrix<f64>) -> f64 {
        let r = symmetrize(&(self.fiber_basis.transpose() * metric * &self.fiber_basis));
        let (vals, _) = sym_eigen(&r);
        vals[vals.len() - 1]
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_basis.ncols()
    }
}

/// Builds the fiber splitting and diagonalizes the restricted operator.
pub fn build_bochner(p: &Presentation, g: &Metric, k: &Subspace) -> Result<BochnerData> {
    let algebra = p.algebra();
    let residual = algebra.is_ideal(k);
    if residual > IDEAL_TOL {
        return Err(Error::NotAnIdeal { residual });
    }
    let cert = algebra.is_compact_semisimple(k);
    if !cert.compact_semisimple {
        return Err(Error::NotCompactSemisimple { eigenvalues: cert.eigenvalues });
    }
    fiber_splitting(p, g, k)
}

/// The splitting and diagonalization of [`build_bochner`] without the ideal
/// and compactness checks, for diagnosing candidates that fail them.
pub fn fiber_splitting(p: &Presentation, g: &Metric, k: &Subspace) -> Result<BochnerData> {
    let n = p.dim_g();
    let bg = p.background();
    let fiber_isotropy = k.intersection(p.isotropy());
    let kp = gram_schmidt(&fiber_isotropy.orthonormal(), bg, 1e-8);
    let kq = k.orthonormal();
    let projected = &kq - &kp * (kp.transpose() * bg * &kq);
    let mk = gram_schmidt(&projected, bg, 1e-8);
    if mk.ncols() == 0 {
        return Err(Error::EmptyFiber);
    }
    let mut outside = 0.0_f64;
    for c in mk.column_iter() {
        outside = outside.max(p.project_h(&c.into_owned()).norm());
    }
    if outside > IDEAL_TOL {
        return Err(Error::FiberNotInComplement { residual: outside });
    }
    let fiber_basis = DMatrix::from_columns(
        &mk.column_iter().map(|c| p.to_m_coords(&c.into_owned())).collect::<Vec<_>>(),
    );
    let restricted = symmetrize(&(fiber_basis.transpose() * g.matrix() * &fiber_basis));
    let (eigenvalues, eigenvectors) = sym_eigen(&restricted);
    let top_direction = top_eigendirection(&fiber_basis, &eigenvalues, &eigenvectors);
    let killing_fiber = symmetrize(&(fiber_basis.transpose() * p.killing_m() * &fiber_basis));
    let kvals = sym_eigen(&killing_fiber).0;
    Ok(BochnerData {
        ideal: k.clone(),
        fiber_isotropy,
        fiber: Subspace::span(n, &mk),
        fiber_basis,
        restricted,
        eigenvalues,
        eigenvectors,
        top_direction,
        killing_bound: kvals[kvals.len() - 1],
    })
}

/// Unit vector in the top eigenspace, chosen as the normalized projection of
/// the first `m` coordinate axis that is not orthogonal to the eigenspace.
fn top_eigendirection(basis: &DMatrix<f64>, vals: &DVector<f64>, vecs: &DMatrix<f64>) -> DVector<f64> {
    let q = vals.len();
    let top = vals[q - 1];
    let tol = 1e-9 * top.abs().max(1.0);
    let cols: Vec<DVector<f64>> = (0..q)
        .filter(|&i| top - vals[i] <= tol)
        .map(|i| basis * vecs.column(i))
        .collect();
    let e = DMatrix::from_columns(&cols);
    let proj = &e * e.transpose();
    for a in 0..proj.ncols() {
        let v = proj.column(a).into_owned();
        let nv = v.norm();
        if nv > 1e-6 {
            return v / nv;
        }
    }
    cols[0].clone()
}

/// The selected direction and its certified lower bound.
#[derive(Debug, Clone)]
pub struct PositiveDirection {
    pub data: BochnerData,
    /// `X` in `m` coordinates (background-unit).
    pub direction: DVector<f64>,
    /// `X` in ambient coordinates.
    pub direction_ambient: DVector<f64>,
    pub ric_value: f64,
    /// `-B(X, X) / 4`.
    pub bound: f64,
    pub terms: RicciTerms,
}

/// Evaluates `ric(X, X)` along the top fiber eigendirection and checks it
/// against `-B(X, X)/4`. A violation is a hard error.
pub fn positive_direction(p: &Presentation, g: &Metric, k: &Subspace) -> Result<PositiveDirection> {
    let data = build_bochner(p, g, k)?;
    let x = data.top_direction.clone();
    let terms = ricci_terms(p, g, &x);
    let ric_value = terms.total();
    let bound = -0.25 * x.dot(&(p.killing_m() * &x));
    if !(bound > 0.0) || ric_value < bound - BOCHNER_TOL {
        return Err(Error::BoundViolated { ric: ric_value, bound });
    }
    let direction_ambient = p.from_m_coords(&x);
    Ok(PositiveDirection { data, direction: x, direction_ambient, ric_value, bound, terms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// `g([H, X]_m, X)`.
    pub mean_term: f64,
    /// `Σ g([U_i, V_j]_m, X)²`
    pub cross_squares: f64,
    /// `Σ ‖[X, V_i]_m‖²_g`
    pub transverse_norms: f64,
    /// `cross_squares - transverse_norms`, expected non-negative.
    pub mixed_term: f64,
    pub passed: bool,
}

/// Recomputes the mean-curvature cancellation and the sign of the mixed
/// fiber/transverse term at the selected direction.
pub fn mixed_term_audit(p: &Presentation, g: &Metric, k: &Subspace) -> Result<AuditReport> {
    let data = build_bochner(p, g, k)?;
    Ok(audit_with(p, g, &data))
}

pub fn audit_with(p: &Presentation, g: &Metric, data: &BochnerData) -> AuditReport {
    let x = &data.top_direction;
    let h = mean_curvature(p, g);
    let mean_term = g.inner(&p.bracket_m(&h, x), x);

    let us: Vec<DVector<f64>> = (0..data.fiber_dim())
        .map(|i| &data.fiber_basis * data.eigenvectors.column(i) / data.eigenvalues[i].sqrt())
        .collect();
    // g-orthogonal complement of m_k inside m
    let constraint = data.fiber_basis.transpose() * g.matrix();
    let vs_raw = null_space(&constraint, 1e-12);
    let vs_frame = gram_schmidt(&vs_raw, g.matrix(), 1e-8);
    let vs: Vec<DVector<f64>> = vs_frame.column_iter().map(|c| c.into_owned()).collect();

    let cross_squares: f64 = us
        .iter()
        .flat_map(|u| vs.iter().map(move |v| (u, v)))
        .map(|(u, v)| g.inner(&p.bracket_m(u, v), x).powi(2))
        .sum();
    let transverse_norms: f64 = vs.iter().map(|v| g.norm_sq(&p.bracket_m(x, v))).sum();
    let mixed_term = cross_squares - transverse_norms;
    AuditReport {
        mean_term,
        cross_squares,
        transverse_norms,
        mixed_term,
        passed: mean_term.abs() <= AUDIT_TOL && mixed_term >= -AUDIT_TOL,
    }
}
