//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::tol::RANK_TOL;

/// `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Largest absolute entry, 0 for empty matrices.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Symmetric eigendecomposition with eigenvalues in ascending order.
///
/// Each eigenvector is sign-normalized so that its largest-magnitude
/// component (first one on ties) is positive.
pub fn sym_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = symmetrize(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let mut pivot = 0;
        for r in 1..n {
            if v[r].abs() > v[pivot].abs() + 1e-12 {
                pivot = r;
            }
        }
        if v[pivot] < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

pub fn sym_eigenvalues(a: &DMatrix<f64>) -> DVector<f64> {
    sym_eigen(a).0
}

/// Applies `f` spectrally to a symmetric matrix.
pub fn sym_apply(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(a);
    let d = DMatrix::from_diagonal(&vals.map(f));
    symmetrize(&(&vecs * d * vecs.transpose()))
}

/// Singular values of `a` in descending order (empty if `a` has no columns or rows).
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Euclidean-orthonormal basis (as columns) of the column span of `a`.
///
/// Rank is decided from singular values: anything below
/// `RANK_TOL * sigma_max` (and below `abs_floor`) is discarded.
pub fn column_span(a: &DMatrix<f64>, abs_floor: f64) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 || a.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &x| m.max(x));
    let cutoff = (RANK_TOL * smax).max(abs_floor);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

/// Orthonormal basis (columns) of the null space of `a`.
///
/// A right singular vector belongs to the null space when its singular value
/// is at most `max(RANK_TOL * sigma_max, abs_tol)`.
pub fn null_space(a: &DMatrix<f64>, abs_tol: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &x| m.max(x));
    let cutoff = (RANK_TOL * smax).max(abs_tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    let mut out = DMatrix::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &vt.row(i).transpose());
    }
    out
}

/// Modified Gram–Schmidt in the inner product `gram`, dropping columns whose
/// residual norm falls below `drop_tol` times their original norm.
pub fn gram_schmidt(vectors: &DMatrix<f64>, gram: &DMatrix<f64>, drop_tol: f64) -> DMatrix<f64> {
    let n = vectors.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..vectors.ncols() {
        let orig = vectors.column(j).into_owned();
        let orig_norm = orig.dot(&(gram * &orig)).max(0.0).sqrt();
        if orig_norm == 0.0 {
            continue;
        }
        let mut v = orig;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&(gram * &v));
                v -= b * c;
            }
        }
        let norm = v.dot(&(gram * &v)).max(0.0).sqrt();
        if norm > drop_tol * orig_norm {
            basis.push(v / norm);
        }
    }
    let mut out = DMatrix::zeros(n, basis.len());
    for (c, b) in basis.iter().enumerate() {
        out.set_column(c, b);
    }
    out
}

/// Matrix commutator `AB - BA`.
pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Row-major upper triangle (including the diagonal) of a square matrix.
pub fn upper_triangle(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Inverse of [`upper_triangle`]: rebuilds the symmetric matrix.
pub fn from_upper_triangle(n: usize, v: &[f64]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            a[(i, j)] = v[idx];
            a[(j, i)] = v[idx];
            idx += 1;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_ascending() {
        let a = DMatrix::from_row_slice(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, vecs) = sym_eigen(&a);
        assert_eq!(vals.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(vecs[(1, 0)], 1.0);
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!((a * ns).norm() < 1e-12);
    }

    #[test]
    fn span_drops_dependent_columns() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(column_span(&a, 0.0).ncols(), 2);
    }

    #[test]
    fn upper_triangle_round_trip() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 5.0]);
        let v = upper_triangle(&a);
        assert_eq!(v, vec![1.0, 2.0, 5.0]);
        assert_eq!(from_upper_triangle(2, &v), a);
    }
}
