//! Finite-dimensional real Lie algebras stored as dense structure-constant
//! tensors, together with subspaces of them.
//!
//! The coefficient `c[i][j][k]` is the `e_k` component of `[e_i, e_j]`.
//! Antisymmetry is structural: only pairs `i < j` are ever written and the
//! mirror entry is set to the exact negation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{column_span, max_abs, singular_values, sym_eigenvalues, symmetrize};
use crate::tol::{DEFINITENESS_TOL, IDEAL_TOL, JACOBI_TOL, RANK_TOL};

/// A linear subspace of `R^n`, given by linearly independent column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Builds a subspace from basis vectors, rejecting dependent families.
    pub fn new(ambient_dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut basis = DMatrix::zeros(ambient_dim, vectors.len());
        for (c, v) in vectors.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: v.len() });
            }
            basis.set_column(c, &DVector::from_column_slice(v));
        }
        Self::from_columns(basis)
    }

    pub fn from_columns(basis: DMatrix<f64>) -> Result<Self> {
        let s = singular_values(&basis);
        if let (Some(&smax), Some(&smin)) = (s.first(), s.last()) {
            if s.len() < basis.ncols() || smin <= RANK_TOL * smax || smax == 0.0 {
                return Err(Error::DependentBasis { sigma_min: smin });
            }
        }
        Ok(Self { ambient_dim: basis.nrows(), basis })
    }

    /// The span of arbitrary (possibly dependent) vectors; rank decided by SVD.
    pub fn span(ambient_dim: usize, vectors: &DMatrix<f64>) -> Self {
        debug_assert_eq!(vectors.nrows(), ambient_dim);
        Self { ambient_dim, basis: column_span(vectors, 1e-300) }
    }

    pub fn zero(n: usize) -> Self {
        Self { ambient_dim: n, basis: DMatrix::zeros(n, 0) }
    }

    pub fn whole(n: usize) -> Self {
        Self { ambient_dim: n, basis: DMatrix::identity(n, n) }
    }

    /// Span of the listed coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let mut basis = DMatrix::zeros(n, axes.len());
        for (c, &i) in axes.iter().enumerate() {
            basis[(i, c)] = 1.0;
        }
        Self { ambient_dim: n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Basis vectors as columns, as supplied.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.basis.column_iter().map(|c| c.iter().copied().collect()).collect()
    }

    /// Euclidean-orthonormal basis of the same span.
    pub fn orthonormal(&self) -> DMatrix<f64> {
        column_span(&self.basis, 0.0)
    }

    /// Euclidean orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        let q = self.orthonormal();
        &q * q.transpose()
    }

    /// Euclidean norm of the component of `v` outside the subspace.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - self.projector() * v).norm()
    }

    /// Largest distance of any orthonormal basis vector of `other` from `self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        let p = self.projector();
        let q = other.orthonormal();
        let outside = &q - &p * &q;
        outside.column_iter().fold(0.0_f64, |m, c| m.max(c.norm()))
    }

    /// Same span, up to `tol` in projector max-norm.
    pub fn same_span(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim() && max_abs(&(self.projector() - other.projector())) <= tol
    }

    /// Intersection of two subspaces of the same ambient space.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let (a, b) = (self.orthonormal(), other.orthonormal());
        let n = self.ambient_dim;
        if a.ncols() == 0 || b.ncols() == 0 {
            return Subspace::zero(n);
        }
        let mut stacked = DMatrix::zeros(n, a.ncols() + b.ncols());
        stacked.view_mut((0, 0), (n, a.ncols())).copy_from(&a);
        stacked.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(&(-&b));
        let ns = crate::linalg::null_space(&stacked, IDEAL_TOL);
        let coeffs = ns.rows(0, a.ncols()).into_owned();
        Subspace::span(n, &(a * coeffs))
    }
}

/// Certificate returned by [`LieAlgebra::is_compact_semisimple`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompactCertificate {
    pub compact_semisimple: bool,
    pub subalgebra_residual: f64,
    /// Eigenvalues of the Killing form restricted to the subspace
    /// (orthonormal basis), ascending.
    pub eigenvalues: Vec<f64>,
}

/// A real Lie algebra given by structure constants on a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<f64>,
    labels: Vec<String>,
}

impl LieAlgebra {
    /// Builds an algebra from bracket entries `(i, j, k, coeff)` meaning
    /// `[e_i, e_j]` has `coeff` along `e_k`, and validates the Jacobi identity.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let a = Self::from_brackets_unchecked(labels, brackets)?;
        a.validate()?;
        Ok(a)
    }

    /// Same as [`from_brackets`](Self::from_brackets) without the Jacobi check.
    pub fn from_brackets_unchecked(
        labels: Vec<String>,
        brackets: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidInput("algebra dimension must be positive".into()));
        }
        let mut a = Self { dim: n, c: vec![0.0; n * n * n], labels };
        let mut seen = std::collections::HashSet::new();
        for &(i, j, k, v) in brackets {
            if i >= n || j >= n || k >= n {
                return Err(Error::InvalidInput(format!("bracket index out of range in ({i}, {j}, {k})")));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("bracket [e{i}, e{i}] must vanish")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient in ({i}, {j}, {k})")));
            }
            let (lo, hi, v) = if i < j { (i, j, v) } else { (j, i, -v) };
            if !seen.insert((lo, hi, k)) {
                return Err(Error::InvalidInput(format!("duplicate bracket entry ({lo}, {hi}, {k})")));
            }
            a.set(lo, hi, k, v);
        }
        Ok(a)
    }

    /// Dense constructor from a full tensor; only the `i < j` half is read.
    fn from_tensor(labels: Vec<String>, tensor: impl Fn(usize, usize, usize) -> f64) -> Self {
        let n = labels.len();
        let mut a = Self { dim: n, c: vec![0.0; n * n * n], labels };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = tensor(i, j, k);
                    if v != 0.0 {
                        a.set(i, j, k, v);
                    }
                }
            }
        }
        a
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.dim;
        self.c[(i * n + j) * n + k] = v;
        self.c[(j * n + i) * n + k] = -v;
    }

    /// The abelian algebra `R^n`.
    pub fn abelian(n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("t{i}")).collect();
        Self { dim: n, c: vec![0.0; n * n * n], labels }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coefficient of `e_k` in `[e_i, e_j]`.
    #[inline]
    pub fn structure(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.c[(i * n + j) * n + k]
    }

    /// Nonzero entries with `i < j`, in lexicographic order.
    pub fn bracket_entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.structure(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn max_structure(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `[X, Y]` with a dimension check.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<DVector<f64>> {
        for v in [x, y] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        Ok(self.bracket_vec(&DVector::from_column_slice(x), &DVector::from_column_slice(y)))
    }

    /// `[X, Y]` for vectors known to have the right length.
    pub fn bracket_vec(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.c[(i * n + j) * n..(i * n + j + 1) * n];
                for k in 0..n {
                    out[k] += w * row[k];
                }
            }
        }
        out
    }

    /// Matrix of `ad_X` (column `j` is `[X, e_j]`).
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.structure(i, j, k);
                }
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let mut e = DVector::zeros(self.dim);
        e[i] = 1.0;
        self.ad(&e)
    }

    /// Max-norm of the Jacobi sum over all basis triples and output components.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.structure(i, j, m) * self.structure(m, k, l)
                                + self.structure(j, k, m) * self.structure(m, i, l)
                                + self.structure(k, i, m) * self.structure(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Checks the Jacobi residual against `JACOBI_TOL * (1 + max|c|)^2`.
    pub fn validate(&self) -> Result<()> {
        let r = self.jacobi_residual();
        let scale = 1.0 + self.max_structure();
        if r > JACOBI_TOL * scale * scale {
            return Err(Error::JacobiViolation { residual: r });
        }
        Ok(())
    }

    /// Killing form `B(e_i, e_j) = tr(ad_{e_i} ad_{e_j})`, exactly symmetric.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        s += self.structure(i, k, l) * self.structure(j, l, k);
                    }
                }
                b[(i, j)] = s;
                b[(j, i)] = s;
            }
        }
        b
    }

    /// `(Tr ad_{e_1}, …, Tr ad_{e_n})`; zero iff the algebra is unimodular.
    pub fn unimodularity_defect(&self) -> DVector<f64> {
        let n = self.dim;
        DVector::from_iterator(n, (0..n).map(|i| (0..n).map(|k| self.structure(i, k, k)).sum()))
    }

    /// Largest norm of the component of `[e_i, s]` outside `S`.
    pub fn is_ideal(&self, s: &Subspace) -> f64 {
        let q = s.orthonormal();
        let p = &q * q.transpose();
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            let ad = self.ad_basis(i);
            let image = &ad * &q;
            let outside = &image - &p * &image;
            for c in outside.column_iter() {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Largest norm of the component of `[s_a, s_b]` outside `S`.
    pub fn is_subalgebra(&self, s: &Subspace) -> f64 {
        let q = s.orthonormal();
        let p = &q * q.transpose();
        let mut worst = 0.0_f64;
        for a in 0..q.ncols() {
            let x = q.column(a).into_owned();
            for b in (a + 1)..q.ncols() {
                let y = q.column(b).into_owned();
                let z = self.bracket_vec(&x, &y);
                worst = worst.max((&z - &p * &z).norm());
            }
        }
        worst
    }

    /// Certifies that `S` is a subalgebra on which the Killing form of the
    /// ambient algebra is negative definite.
    pub fn is_compact_semisimple(&self, s: &Subspace) -> CompactCertificate {
        let subalgebra_residual = self.is_subalgebra(s);
        let q = s.orthonormal();
        let restricted = q.transpose() * self.killing_form() * &q;
        let eigenvalues: Vec<f64> = sym_eigenvalues(&restricted).iter().copied().collect();
        let definite = !eigenvalues.is_empty() && eigenvalues.iter().all(|&l| l < -DEFINITENESS_TOL);
        CompactCertificate {
            compact_semisimple: subalgebra_residual <= IDEAL_TOL && definite,
            subalgebra_residual,
            eigenvalues,
        }
    }

    /// Span of all brackets of pairs of basis vectors of `S`.
    pub fn derived_subalgebra(&self, s: &Subspace) -> Subspace {
        let q = s.orthonormal();
        let r = q.ncols();
        let mut cols = Vec::new();
        for a in 0..r {
            for b in (a + 1)..r {
                cols.push(self.bracket_vec(&q.column(a).into_owned(), &q.column(b).into_owned()));
            }
        }
        if cols.is_empty() {
            return Subspace::zero(self.dim);
        }
        let m = DMatrix::from_columns(&cols);
        let scale = 1.0 + self.max_structure();
        Subspace { ambient_dim: self.dim, basis: column_span(&m, RANK_TOL * scale) }
    }

    /// Structure constants of the algebra in a new basis whose vectors are the
    /// columns of the invertible matrix `t`.
    pub fn change_basis(&self, t: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim;
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.nrows() });
        }
        let tinv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("basis change is singular".into()))?;
        let cols: Vec<DVector<f64>> = (0..n).map(|j| t.column(j).into_owned()).collect();
        let mut table = vec![DVector::zeros(n); n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                table[a * n + b] = &tinv * self.bracket_vec(&cols[a], &cols[b]);
            }
        }
        let labels = (1..=n).map(|i| format!("f{i}")).collect();
        Ok(Self::from_tensor(labels, |a, b, k| table[a * n + b][k]))
    }

    /// Intrinsic structure constants of a subalgebra, expressed in the
    /// Euclidean-orthonormal basis returned by [`Subspace::orthonormal`].
    pub fn restrict(&self, s: &Subspace) -> Result<Self> {
        let residual = self.is_subalgebra(s);
        if residual > IDEAL_TOL {
            return Err(Error::NotSubalgebra { residual });
        }
        let q = s.orthonormal();
        let r = q.ncols();
        if r == 0 {
            return Err(Error::InvalidInput("cannot restrict to the zero subspace".into()));
        }
        let mut table = vec![DVector::zeros(r); r * r];
        for a in 0..r {
            for b in (a + 1)..r {
                let z = self.bracket_vec(&q.column(a).into_owned(), &q.column(b).into_owned());
                table[a * r + b] = q.transpose() * z;
            }
        }
        let labels = (1..=r).map(|i| format!("s{i}")).collect();
        Ok(Self::from_tensor(labels, |a, b, k| table[a * r + b][k]))
    }

    /// `A ⊕ B` with `A`'s basis first.
    pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
        let (na, nb) = (a.dim, b.dim);
        let labels = a.labels.iter().chain(b.labels.iter()).cloned().collect();
        Self::from_tensor(labels, |i, j, k| {
            if i < na && j < na && k < na {
                a.structure(i, j, k)
            } else if i >= na && j >= na && k >= na {
                b.structure(i - na, j - na, k - na)
            } else {
                0.0
            }
        })
        .with_dim_check(na + nb)
    }

    fn with_dim_check(self, n: usize) -> Self {
        debug_assert_eq!(self.dim, n);
        self
    }

    /// `A ⋉_ρ N`: `action[i]` is the derivation of `N` by which `e_i ∈ A` acts
    /// (column `k` is `ρ(e_i) n_k`). The basis is `A`'s followed by `N`'s.
    pub fn semidirect_sum(a: &LieAlgebra, ideal: &LieAlgebra, action: &[DMatrix<f64>]) -> Result<Self> {
        let (na, nm) = (a.dim, ideal.dim);
        if action.len() != na {
            return Err(Error::DimensionMismatch { expected: na, got: action.len() });
        }
        for rho in action {
            if rho.nrows() != nm || rho.ncols() != nm {
                return Err(Error::DimensionMismatch { expected: nm, got: rho.nrows() });
            }
        }
        // ρ(X)[u, v] = [ρ(X)u, v] + [u, ρ(X)v]
        let mut defect = 0.0_f64;
        for rho in action {
            for u in 0..nm {
                for v in 0..nm {
                    let mut eu = DVector::zeros(nm);
                    eu[u] = 1.0;
                    let mut ev = DVector::zeros(nm);
                    ev[v] = 1.0;
                    let lhs = rho * ideal.bracket_vec(&eu, &ev);
                    let rhs = ideal.bracket_vec(&(rho * &eu), &ev) + ideal.bracket_vec(&eu, &(rho * &ev));
                    defect = defect.max((lhs - rhs).amax());
                }
            }
        }
        if defect > JACOBI_TOL * (1.0 + ideal.max_structure()).powi(2) {
            return Err(Error::NotDerivation { defect });
        }
        let labels = a.labels.iter().chain(ideal.labels.iter()).cloned().collect();
        let g = Self::from_tensor(labels, |i, j, k| match (i < na, j < na, k < na) {
            (true, true, true) => a.structure(i, j, k),
            (true, false, false) => action[i][(k - na, j - na)],
            (false, false, false) => ideal.structure(i - na, j - na, k - na),
            _ => 0.0,
        });
        g.validate()?;
        Ok(g)
    }
}

/// Symmetric part of the Killing form restricted to a subspace, in the given
/// column basis.
pub fn killing_restricted(a: &LieAlgebra, basis: &DMatrix<f64>) -> DMatrix<f64> {
    symmetrize(&(basis.transpose() * a.killing_form() * basis))
}
