//! Reductive presentations `g = h ⊕ m` with an invariant background inner
//! product, and invariant metrics as operators on `m`.
//!
//! Coordinates on `m` are always taken with respect to a background-orthonormal
//! basis of `m` (the columns of [`Presentation::m_frame`]). A metric is the
//! symmetric positive-definite matrix `P` with `g(x, y) = xᵀ P y` in those
//! coordinates.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{LieAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{commutator, gram_schmidt, max_abs, null_space, sym_apply, sym_eigen, symmetrize};
use crate::tol::{IDEAL_TOL, RANK_TOL, SKEW_TOL};

/// The largest ideal of `g` contained in `h`.
///
/// Iterates `S₀ = h`, `S_{t+1} = {X ∈ S_t : [g, X] ⊂ S_t}` until the
/// dimension stops dropping.
pub fn effectiveness_kernel(algebra: &LieAlgebra, isotropy: &Subspace) -> Subspace {
    let n = algebra.dim();
    let ads: Vec<DMatrix<f64>> = (0..n).map(|i| algebra.ad_basis(i)).collect();
    let scale = 1.0 + algebra.max_structure();
    let mut current = Subspace::span(n, &isotropy.orthonormal());
    loop {
        let q = current.orthonormal();
        let r = q.ncols();
        if r == 0 {
            return current;
        }
        let outside = DMatrix::identity(n, n) - &q * q.transpose();
        let mut stacked = DMatrix::zeros(n * n, r);
        for (i, ad) in ads.iter().enumerate() {
            stacked.view_mut((i * n, 0), (n, r)).copy_from(&(&outside * ad * &q));
        }
        let coeffs = null_space(&stacked, IDEAL_TOL * scale);
        if coeffs.ncols() == r {
            return current;
        }
        current = Subspace::span(n, &(&q * coeffs));
    }
}

/// A homogeneous presentation with background-orthogonal complement `m = h^⊥`.
#[derive(Debug, Clone)]
pub struct Presentation {
    algebra: LieAlgebra,
    isotropy: Subspace,
    background: DMatrix<f64>,
    m_frame: DMatrix<f64>,
    h_frame: DMatrix<f64>,
    // [e_a, e_b]_m in m coordinates, indexed a * d + b
    m_brackets: Vec<DVector<f64>>,
    // [e_a, e_b]_h in h coordinates
    h_brackets: Vec<DVector<f64>>,
    killing_m: DMatrix<f64>,
    trace_form: DVector<f64>,
    isotropy_action: Vec<DMatrix<f64>>,
}

impl Presentation {
    /// Validates the data and builds `m` as the background-orthogonal
    /// complement of `h`.
    pub fn new(algebra: LieAlgebra, isotropy: Subspace, background: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        if isotropy.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: isotropy.ambient_dim() });
        }
        if background.nrows() != n || background.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: background.nrows() });
        }
        if max_abs(&(&background - background.transpose())) > SKEW_TOL * (1.0 + max_abs(&background)) {
            return Err(Error::InvalidInput("background is not symmetric".into()));
        }
        let background = symmetrize(&background);
        let (bvals, _) = sym_eigen(&background);
        if bvals[0] <= RANK_TOL * bvals[n - 1].abs().max(1.0) {
            return Err(Error::BackgroundNotPositive { min_eigenvalue: bvals[0] });
        }
        let residual = algebra.is_subalgebra(&isotropy);
        if residual > IDEAL_TOL {
            return Err(Error::NotSubalgebra { residual });
        }

        let h_frame = gram_schmidt(&isotropy.orthonormal(), &background, 1e-8);
        // Project the coordinate axes onto h^⊥ and orthonormalize in order, so
        // that coordinate-aligned isotropy leaves the remaining axes untouched.
        let proj_h = &h_frame * h_frame.transpose() * &background;
        let projected = DMatrix::identity(n, n) - proj_h;
        let m_frame = gram_schmidt(&projected, &background, 1e-8);
        if m_frame.ncols() + h_frame.ncols() != n {
            return Err(Error::InvalidInput("failed to build a complement of the isotropy".into()));
        }

        let mut p = Self {
            algebra,
            isotropy,
            background,
            m_frame,
            h_frame,
            m_brackets: Vec::new(),
            h_brackets: Vec::new(),
            killing_m: DMatrix::zeros(0, 0),
            trace_form: DVector::zeros(0),
            isotropy_action: Vec::new(),
        };
        p.precompute();

        let reductive = p.reductivity_residual();
        if reductive > IDEAL_TOL {
            return Err(Error::NotReductive { residual: reductive });
        }
        let defect = p.skewness_defect();
        if defect > SKEW_TOL {
            return Err(Error::BackgroundNotInvariant { defect });
        }
        let kernel = effectiveness_kernel(&p.algebra, &p.isotropy);
        if !kernel.is_zero() {
            return Err(Error::NotAlmostEffective { kernel: kernel.vectors() });
        }
        Ok(p)
    }

    fn precompute(&mut self) {
        let d = self.m_frame.ncols();
        let to_m = self.m_frame.transpose() * &self.background;
        let to_h = self.h_frame.transpose() * &self.background;
        let cols: Vec<DVector<f64>> = (0..d).map(|a| self.m_frame.column(a).into_owned()).collect();
        self.m_brackets = vec![DVector::zeros(d); d * d];
        self.h_brackets = vec![DVector::zeros(self.h_frame.ncols()); d * d];
        for a in 0..d {
            for b in (a + 1)..d {
                let z = self.algebra.bracket_vec(&cols[a], &cols[b]);
                let zm = &to_m * &z;
                let zh = &to_h * &z;
                self.m_brackets[b * d + a] = -&zm;
                self.h_brackets[b * d + a] = -&zh;
                self.m_brackets[a * d + b] = zm;
                self.h_brackets[a * d + b] = zh;
            }
        }
        self.killing_m = symmetrize(&(self.m_frame.transpose() * self.algebra.killing_form() * &self.m_frame));
        self.trace_form = self.m_frame.transpose() * self.algebra.unimodularity_defect();
        self.isotropy_action = (0..self.h_frame.ncols())
            .map(|s| {
                let ad = self.algebra.ad(&self.h_frame.column(s).into_owned());
                &to_m * ad * &self.m_frame
            })
            .collect();
    }

    /// Largest component of `[h, m]` along `h`.
    pub fn reductivity_residual(&self) -> f64 {
        let to_h = self.h_frame.transpose() * &self.background;
        let mut worst = 0.0_f64;
        for s in 0..self.h_frame.ncols() {
            let ad = self.algebra.ad(&self.h_frame.column(s).into_owned());
            worst = worst.max(max_abs(&(&to_h * ad * &self.m_frame)));
        }
        worst
    }

    /// Largest `|⟨[Z,X],Y⟩ + ⟨X,[Z,Y]⟩|` over orthonormal `Z ∈ h`, `X, Y ∈ m`.
    pub fn skewness_defect(&self) -> f64 {
        self.isotropy_action
            .iter()
            .map(|a| max_abs(&(a + a.transpose())))
            .fold(0.0, f64::max)
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn isotropy(&self) -> &Subspace {
        &self.isotropy
    }

    pub fn background(&self) -> &DMatrix<f64> {
        &self.background
    }

    /// Background-orthonormal basis of `m` (columns, ambient coordinates).
    pub fn m_frame(&self) -> &DMatrix<f64> {
        &self.m_frame
    }

    /// Background-orthonormal basis of `h` (columns, ambient coordinates).
    pub fn h_frame(&self) -> &DMatrix<f64> {
        &self.h_frame
    }

    pub fn complement(&self) -> Subspace {
        Subspace::span(self.algebra.dim(), &self.m_frame)
    }

    pub fn dim_g(&self) -> usize {
        self.algebra.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.h_frame.ncols()
    }

    pub fn dim_m(&self) -> usize {
        self.m_frame.ncols()
    }

    /// Component of `X` along `m` (ambient coordinates).
    pub fn project_m(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m_frame * self.to_m_coords(x)
    }

    /// Component of `X` along `h`, defined as `X - project_m(X)`.
    pub fn project_h(&self, x: &DVector<f64>) -> DVector<f64> {
        x - self.project_m(x)
    }

    /// Coordinates of the `m` component of an ambient vector.
    pub fn to_m_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        self.m_frame.transpose() * (&self.background * x)
    }

    pub fn from_m_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m_frame * x
    }

    /// `[X, Y]_m` for `X, Y` in `m` coordinates.
    pub fn bracket_m(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim_m();
        let mut out = DVector::zeros(d);
        for a in 0..d {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..d {
                let w = x[a] * y[b];
                if w != 0.0 {
                    out.axpy(w, &self.m_brackets[a * d + b], 1.0);
                }
            }
        }
        out
    }

    /// `[X, Y]_h` in `h` coordinates for `X, Y` in `m` coordinates.
    pub fn bracket_h(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim_m();
        let mut out = DVector::zeros(self.dim_h());
        for a in 0..d {
            for b in 0..d {
                let w = x[a] * y[b];
                if w != 0.0 {
                    out.axpy(w, &self.h_brackets[a * d + b], 1.0);
                }
            }
        }
        out
    }

    /// Killing form of `g` restricted to `m`, in `m` coordinates.
    pub fn killing_m(&self) -> &DMatrix<f64> {
        &self.killing_m
    }

    /// `τ_a = Tr(ad_{e_a})` for the `m` basis.
    pub fn trace_form(&self) -> &DVector<f64> {
        &self.trace_form
    }

    /// `ad(Z)|_m` for each background-orthonormal basis vector `Z` of `h`.
    pub fn isotropy_action(&self) -> &[DMatrix<f64>] {
        &self.isotropy_action
    }

    /// `ad(Z)|_m` for `Z ∈ h` given in `h` coordinates.
    pub fn isotropy_action_of(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim_m();
        let mut out = DMatrix::zeros(d, d);
        for (s, a) in self.isotropy_action.iter().enumerate() {
            out += a * z[s];
        }
        out
    }

    /// Largest `‖[ad(Z)|_m, P]‖_max` over the isotropy basis.
    pub fn equivariance_defect(&self, p: &DMatrix<f64>) -> f64 {
        self.isotropy_action.iter().map(|a| max_abs(&commutator(a, p))).fold(0.0, f64::max)
    }

    /// Validates a metric matrix in `m` coordinates (symmetric positive definite).
    pub fn metric(&self, matrix: DMatrix<f64>) -> Result<Metric> {
        let d = self.dim_m();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        Metric::new(matrix)
    }

    /// Like [`metric`](Self::metric) but also rejects non-equivariant operators.
    pub fn equivariant_metric(&self, matrix: DMatrix<f64>) -> Result<Metric> {
        let g = self.metric(matrix)?;
        let defect = self.equivariance_defect(g.matrix());
        if defect > SKEW_TOL * (1.0 + max_abs(g.matrix())) {
            return Err(Error::InvalidInput(format!("metric is not Ad(H)-equivariant (defect {defect:.3e})")));
        }
        Ok(g)
    }

    pub fn identity_metric(&self) -> Metric {
        Metric::new(DMatrix::identity(self.dim_m(), self.dim_m())).expect("identity is positive definite")
    }
}

/// Invariant metric `g(x, y) = xᵀ P y` in background coordinates of `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl Metric {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("metric has non-finite entries".into()));
        }
        let scale = max_abs(&matrix).max(f64::MIN_POSITIVE);
        if max_abs(&(&matrix - matrix.transpose())) > 1e-10 * scale {
            return Err(Error::InvalidInput("metric is not symmetric".into()));
        }
        let matrix = symmetrize(&matrix);
        let (eigenvalues, _) = sym_eigen(&matrix);
        if !eigenvalues.is_empty() && eigenvalues[0] <= 0.0 {
            return Err(Error::DegenerateMetric { min_eigenvalue: eigenvalues[0] });
        }
        Ok(Self { matrix, eigenvalues })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigenvalues of `P`.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.matrix * y))
    }

    pub fn norm_sq(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x)
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        sym_apply(&self.matrix, |l| 1.0 / l)
    }

    pub fn scaled(&self, c: f64) -> Result<Metric> {
        Metric::new(&self.matrix * c)
    }

    /// A `g`-orthonormal frame: the columns of `P^{-1/2}`.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        sym_apply(&self.matrix, |l| 1.0 / l.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::catalog::algebras::su2;

    fn su2_r() -> Presentation {
        catalog::get("su2_r").unwrap().presentation
    }

    #[test]
    fn trivial_isotropy_gives_everything() {
        let p = su2_r();
        assert_eq!(p.dim_m(), 4);
        assert_eq!(p.m_frame(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn su2_r2_over_so2_has_four_dim_complement() {
        let p = catalog::get("su2_r2_so2").unwrap().presentation;
        assert_eq!(p.dim_m(), 4);
        let expected = Subspace::coordinate(5, &[0, 1, 3, 4]);
        assert!(p.complement().same_span(&expected, 1e-14));
    }

    #[test]
    fn isotropy_ideal_is_rejected() {
        let g = LieAlgebra::direct_sum(&su2(), &su2());
        let h = Subspace::coordinate(6, &[0, 1, 2]);
        match Presentation::new(g, h, DMatrix::identity(6, 6)) {
            Err(Error::NotAlmostEffective { kernel }) => {
                let k = Subspace::new(6, &kernel).unwrap();
                assert!(k.same_span(&Subspace::coordinate(6, &[0, 1, 2]), 1e-12));
            }
            other => panic!("expected effectiveness failure, got {other:?}"),
        }
    }

    #[test]
    fn effectiveness_kernels_on_su2_su2() {
        let g = LieAlgebra::direct_sum(&su2(), &su2());
        let diag = Subspace::new(6, &[
            vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(effectiveness_kernel(&g, &diag).is_zero());
        let first = Subspace::coordinate(6, &[0, 1, 2]);
        assert!(effectiveness_kernel(&g, &first).same_span(&first, 1e-12));
        let g = LieAlgebra::direct_sum(&su2(), &LieAlgebra::abelian(1));
        assert!(effectiveness_kernel(&g, &Subspace::zero(4)).is_zero());
    }

    #[test]
    fn non_invariant_background_is_rejected() {
        let mut bg = DMatrix::identity(3, 3);
        bg[(0, 0)] = 2.0;
        let err = Presentation::new(su2(), Subspace::coordinate(3, &[2]), bg).unwrap_err();
        assert!(matches!(err, Error::BackgroundNotInvariant { .. }), "{err:?}");
    }

    #[test]
    fn non_subalgebra_isotropy_is_rejected() {
        let err = Presentation::new(su2(), Subspace::coordinate(3, &[0, 1]), DMatrix::identity(3, 3)).unwrap_err();
        assert!(matches!(err, Error::NotSubalgebra { .. }));
    }

    #[test]
    fn projections() {
        let p = catalog::get("so3_e2").unwrap().presentation;
        let mut x = DVector::zeros(6);
        x[2] = 1.0;
        assert!(p.project_m(&x).amax() < 1e-15);
        let y = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.7, 0.1, -0.4]);
        let sum = p.project_m(&y) + p.project_h(&y);
        assert!((sum - &y).amax() < 1e-15);
        let pm = p.project_m(&y);
        assert!((p.project_m(&pm) - &pm).amax() < 1e-14);
        let ph = p.project_h(&y);
        assert!((p.project_h(&ph) - &ph).amax() < 1e-14);
    }

    #[test]
    fn bracket_m_drops_isotropy() {
        let p = catalog::get("s2").unwrap().presentation;
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0]);
        assert_eq!(p.bracket_m(&e1, &e2).amax(), 0.0);
        assert_eq!(p.bracket_h(&e1, &e2).as_slice(), &[1.0]);
    }

    #[test]
    fn frames() {
        let p = catalog::get("su2").unwrap().presentation;
        let id = p.identity_metric();
        assert!((id.orthonormal_frame() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let g = p.metric(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0, 1.0]))).unwrap();
        let f = g.orthonormal_frame();
        assert!((f - DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.0, 1.0]))).amax() < 1e-15);
    }

    #[test]
    fn degenerate_metric_rejected() {
        let p = catalog::get("su2").unwrap().presentation;
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 1.0]));
        assert!(matches!(p.metric(m), Err(Error::DegenerateMetric { .. })));
    }

    #[test]
    fn equivariance_checked_on_request() {
        let p = catalog::get("su2_r2_so2").unwrap().presentation;
        let mut m = DMatrix::identity(4, 4);
        m[(0, 0)] = 2.0;
        assert!(p.metric(m.clone()).is_ok());
        assert!(p.equivariant_metric(m).is_err());
    }
}
