//! Ricci curvature of invariant metrics on reductive homogeneous spaces.
//!
//! The primary path evaluates the homogeneous Ricci formula
//!
//! ```text
//! ric(X,X) = -½ B(X,X) - ½ Σ_i |[X,X_i]_m|²_g + ¼ Σ_{i,j} g([X_i,X_j]_m, X)² - g([H,X]_m, X)
//! ```
//!
//! over a `g`-orthonormal frame `{X_i}` and polarizes it. The oracle path
//! builds the Levi-Civita connection of the invariant metric and contracts its
//! curvature operator; the two agree on every valid input.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::linalg::{sym_eigenvalues, symmetrize};
use crate::presentation::{Metric, Presentation};

/// The four contributions to `ric(X, X)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RicciTerms {
    /// `-½ B(X,X)`
    pub killing: f64,
    /// `-½ Σ |[X,X_i]_m|²`
    pub derivation: f64,
    /// `¼ Σ g([X_i,X_j]_m, X)²`
    pub squares: f64,
    /// `-g([H,X]_m, X)`
    pub mean_curvature: f64,
}

impl RicciTerms {
    pub fn total(&self) -> f64 {
        self.killing + self.derivation + self.squares + self.mean_curvature
    }
}

/// Polarized term-by-term breakdown of the Ricci tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciBreakdown {
    pub killing: DMatrix<f64>,
    pub derivation: DMatrix<f64>,
    pub squares: DMatrix<f64>,
    pub mean_curvature: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciData {
    /// `ric(e_a, e_b)` in background coordinates of `m`.
    pub tensor: DMatrix<f64>,
    /// `Ric = P⁻¹ ric`, so that `g(Ric X, Y) = ric(X, Y)`.
    pub operator: DMatrix<f64>,
    pub scalar: f64,
    /// `H` with `g(H, X) = Tr(ad_X)`, in `m` coordinates.
    pub mean_curvature: DVector<f64>,
    pub terms: Option<RicciBreakdown>,
}

impl RicciData {
    /// Eigenvalues of the Ricci operator (ascending).
    pub fn operator_eigenvalues(&self, g: &Metric) -> DVector<f64> {
        let s = g.orthonormal_frame();
        sym_eigenvalues(&(&s * &self.tensor * &s))
    }

    /// Largest absolute eigenvalue of the Ricci operator.
    pub fn operator_norm(&self, g: &Metric) -> f64 {
        self.operator_eigenvalues(g).iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Mean curvature vector: solves `P H = τ` with `τ_a = Tr(ad_{e_a})`.
pub fn mean_curvature(p: &Presentation, g: &Metric) -> DVector<f64> {
    let tau = p.trace_form();
    if tau.iter().all(|&t| t == 0.0) {
        return DVector::zeros(tau.len());
    }
    g.inverse() * tau
}

/// Frame-dependent pieces of the Ricci formula, shared across evaluations.
struct FormulaContext<'a> {
    p: &'a Presentation,
    g: &'a Metric,
    frame: Vec<DVector<f64>>,
    // P [X_i, X_j]_m for all i < j (the i > j terms are the same squares)
    lowered_brackets: Vec<DVector<f64>>,
    mean: DVector<f64>,
}

impl<'a> FormulaContext<'a> {
    fn new(p: &'a Presentation, g: &'a Metric, frame: &DMatrix<f64>) -> Self {
        let frame: Vec<DVector<f64>> = frame.column_iter().map(|c| c.into_owned()).collect();
        let mut lowered_brackets = Vec::new();
        for i in 0..frame.len() {
            for j in (i + 1)..frame.len() {
                lowered_brackets.push(g.matrix() * p.bracket_m(&frame[i], &frame[j]));
            }
        }
        Self { p, g, frame, lowered_brackets, mean: mean_curvature(p, g) }
    }

    fn terms(&self, x: &DVector<f64>) -> RicciTerms {
        let killing = -0.5 * x.dot(&(self.p.killing_m() * x));
        let derivation = -0.5
            * self
                .frame
                .iter()
                .map(|f| self.g.norm_sq(&self.p.bracket_m(x, f)))
                .sum::<f64>();
        // each unordered pair appears twice in Σ_{i,j}
        let squares = 0.5 * self.lowered_brackets.iter().map(|w| w.dot(x).powi(2)).sum::<f64>();
        let mean_curvature = if self.mean.iter().all(|&h| h == 0.0) {
            0.0
        } else {
            -self.g.inner(&self.p.bracket_m(&self.mean, x), x)
        };
        RicciTerms { killing, derivation, squares, mean_curvature }
    }
}

/// Term breakdown of `ric(X, X)` using the inverse-square-root frame.
pub fn ricci_terms(p: &Presentation, g: &Metric, x: &DVector<f64>) -> RicciTerms {
    FormulaContext::new(p, g, &g.orthonormal_frame()).terms(x)
}

/// `ric(X, X)` for `X` in `m` coordinates.
pub fn ricci_quadratic(p: &Presentation, g: &Metric, x: &DVector<f64>) -> f64 {
    ricci_terms(p, g, x).total()
}

/// `ric(X, X)` evaluated with a caller-supplied `g`-orthonormal frame (columns).
pub fn ricci_quadratic_in_frame(p: &Presentation, g: &Metric, frame: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    FormulaContext::new(p, g, frame).terms(x).total()
}

/// Ricci tensor by polarization of the quadratic formula.
pub fn ricci_tensor(p: &Presentation, g: &Metric) -> RicciData {
    let d = p.dim_m();
    let ctx = FormulaContext::new(p, g, &g.orthonormal_frame());
    let basis = |a: usize| {
        let mut e = DVector::zeros(d);
        e[a] = 1.0;
        e
    };
    let diag: Vec<RicciTerms> = (0..d).map(|a| ctx.terms(&basis(a))).collect();
    let mut parts = [DMatrix::zeros(d, d), DMatrix::zeros(d, d), DMatrix::zeros(d, d), DMatrix::zeros(d, d)];
    let split = |t: &RicciTerms| [t.killing, t.derivation, t.squares, t.mean_curvature];
    for a in 0..d {
        for (m, v) in parts.iter_mut().zip(split(&diag[a])) {
            m[(a, a)] = v;
        }
        for b in (a + 1)..d {
            let both = ctx.terms(&(basis(a) + basis(b)));
            let (sa, sb, sab) = (split(&diag[a]), split(&diag[b]), split(&both));
            for (k, m) in parts.iter_mut().enumerate() {
                let v = 0.5 * (sab[k] - sa[k] - sb[k]);
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
    }
    let [killing, derivation, squares, mean_part] = parts;
    let tensor = symmetrize(&(&killing + &derivation + &squares + &mean_part));
    finish(g, tensor, ctx.mean.clone(), Some(RicciBreakdown { killing, derivation, squares, mean_curvature: mean_part }))
}

fn finish(g: &Metric, tensor: DMatrix<f64>, mean: DVector<f64>, terms: Option<RicciBreakdown>) -> RicciData {
    let operator = g.inverse() * &tensor;
    let scalar = operator.trace();
    RicciData { tensor, operator, scalar, mean_curvature: mean, terms }
}

/// Scalar curvature (trace of the Ricci operator).
pub fn scalar_curvature(p: &Presentation, g: &Metric) -> f64 {
    ricci_tensor(p, g).scalar
}

/// Ricci tensor from the Levi-Civita connection of the invariant metric.
///
/// With `Λ(X)Y = ½[X,Y]_m + U(X,Y)` and
/// `2g(U(X,Y),Z) = g([Z,X]_m,Y) + g(X,[Z,Y]_m)`, the curvature at the base
/// point is `R(X,Y) = [Λ(X),Λ(Y)] - Λ([X,Y]_m) - ad([X,Y]_h)|_m` and
/// `ric(Y,Z) = tr(X ↦ R(X,Y)Z)`.
pub fn ricci_oracle(p: &Presentation, g: &Metric) -> Result<RicciData> {
    let d = p.dim_m();
    let pm = g.matrix();
    let pinv = g.inverse();
    let e = |a: usize| {
        let mut v = DVector::zeros(d);
        v[a] = 1.0;
        v
    };
    // U(e_a, e_b)
    let mut u = vec![DVector::zeros(d); d * d];
    for a in 0..d {
        for b in a..d {
            let mut w = DVector::zeros(d);
            for c in 0..d {
                let zx = p.bracket_m(&e(c), &e(a));
                let zy = p.bracket_m(&e(c), &e(b));
                w[c] = (pm * zx).dot(&e(b)) + (pm * e(a)).dot(&zy);
            }
            let v = &pinv * w * 0.5;
            u[b * d + a] = v.clone();
            u[a * d + b] = v;
        }
    }
    // Λ(e_a) as a matrix: column b is Λ(e_a) e_b
    let lambda: Vec<DMatrix<f64>> = (0..d)
        .map(|a| {
            let mut m = DMatrix::zeros(d, d);
            for b in 0..d {
                let col = p.bracket_m(&e(a), &e(b)) * 0.5 + &u[a * d + b];
                m.set_column(b, &col);
            }
            m
        })
        .collect();
    let lambda_of = |x: &DVector<f64>| {
        let mut m = DMatrix::zeros(d, d);
        for a in 0..d {
            if x[a] != 0.0 {
                m += &lambda[a] * x[a];
            }
        }
        m
    };
    let curvature = |a: usize, b: usize| -> DMatrix<f64> {
        let (la, lb) = (&lambda[a], &lambda[b]);
        let xy_m = p.bracket_m(&e(a), &e(b));
        let xy_h = p.bracket_h(&e(a), &e(b));
        la * lb - lb * la - lambda_of(&xy_m) - p.isotropy_action_of(&xy_h)
    };
    let mut tensor = DMatrix::zeros(d, d);
    for a in 0..d {
        for y in 0..d {
            let r = curvature(a, y);
            // row a of R(e_a, e_y) gives the e_a-coordinate of R(e_a, e_y) e_z
            for z in 0..d {
                tensor[(y, z)] += r[(a, z)];
            }
        }
    }
    Ok(finish(g, symmetrize(&tensor), mean_curvature(p, g), None))
}
