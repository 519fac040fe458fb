//! JSON documents for algebras, presentations and metrics.
//!
//! Algebra: `{"dim": 3, "labels": [...], "brackets": [[i, j, k, c], ...]}` with
//! zero-based indices and `i < j`.
//!
//! Presentation: `{"algebra": <path or inline algebra>, "isotropy_basis": [[...]],
//! "background": "identity" | [[...]], "compact_ideal": [[...]]?}`.
//!
//! Metric: `{"matrix": [[...]]}` in background-orthonormal coordinates of `m`.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, Subspace};
use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::presentation::{Metric, Presentation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub brackets: Vec<(usize, usize, usize, f64)>,
}

impl AlgebraDoc {
    pub fn from_algebra(a: &LieAlgebra) -> Self {
        Self { dim: a.dim(), labels: Some(a.labels().to_vec()), brackets: a.bracket_entries() }
    }

    pub fn to_algebra(&self) -> Result<LieAlgebra> {
        let a = self.to_algebra_unchecked()?;
        a.validate()?;
        Ok(a)
    }

    /// Parses indices and coefficients without checking the Jacobi identity.
    pub fn to_algebra_unchecked(&self) -> Result<LieAlgebra> {
        let labels = match &self.labels {
            Some(l) if l.len() != self.dim => {
                return Err(Error::DimensionMismatch { expected: self.dim, got: l.len() });
            }
            Some(l) => l.clone(),
            None => (1..=self.dim).map(|i| format!("e{i}")).collect(),
        };
        if let Some(&(i, j, _, _)) = self.brackets.iter().find(|(i, j, _, _)| i >= j) {
            return Err(Error::InvalidInput(format!("bracket entries need i < j, found ({i}, {j})")));
        }
        LieAlgebra::from_brackets_unchecked(labels, &self.brackets)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Path(String),
    Inline(AlgebraDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BackgroundDoc {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub algebra: AlgebraRef,
    #[serde(default)]
    pub isotropy_basis: Vec<Vec<f64>>,
    #[serde(default = "identity_background")]
    pub background: BackgroundDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact_ideal: Option<Vec<Vec<f64>>>,
}

fn identity_background() -> BackgroundDoc {
    BackgroundDoc::Named("identity".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    pub matrix: Vec<Vec<f64>>,
}

/// A presentation together with an optional user-supplied compact ideal.
#[derive(Debug, Clone)]
pub struct LoadedSpace {
    pub presentation: Presentation,
    pub compact_ideal: Option<Subspace>,
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: bad.len() });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Parsed but unvalidated pieces of a presentation document.
#[derive(Debug, Clone)]
pub struct RawSpace {
    pub algebra: LieAlgebra,
    pub isotropy: Subspace,
    pub background: DMatrix<f64>,
    pub compact_ideal: Option<Subspace>,
}

impl RawSpace {
    pub fn into_loaded(self) -> Result<LoadedSpace> {
        self.algebra.validate()?;
        let presentation = Presentation::new(self.algebra, self.isotropy, self.background)?;
        Ok(LoadedSpace { presentation, compact_ideal: self.compact_ideal })
    }
}

impl PresentationDoc {
    /// Parses the document without structural checks; a relative algebra path
    /// is taken relative to `base`.
    pub fn parts(&self, base: Option<&Path>) -> Result<RawSpace> {
        let algebra = match &self.algebra {
            AlgebraRef::Inline(doc) => doc.to_algebra_unchecked()?,
            AlgebraRef::Path(path) => {
                let mut full = PathBuf::from(path);
                if full.is_relative() {
                    if let Some(b) = base {
                        full = b.join(full);
                    }
                }
                let doc: AlgebraDoc = serde_json::from_str(&fs::read_to_string(&full)?)?;
                doc.to_algebra_unchecked()?
            }
        };
        let n = algebra.dim();
        let isotropy = Subspace::new(n, &self.isotropy_basis)?;
        let background = match &self.background {
            BackgroundDoc::Named(s) if s == "identity" => DMatrix::identity(n, n),
            BackgroundDoc::Named(s) => return Err(Error::InvalidInput(format!("unknown background `{s}`"))),
            BackgroundDoc::Matrix(rows) => matrix_from_rows(rows)?,
        };
        let compact_ideal = self.compact_ideal.as_ref().map(|v| Subspace::new(n, v)).transpose()?;
        Ok(RawSpace { algebra, isotropy, background, compact_ideal })
    }

    pub fn resolve(&self, base: Option<&Path>) -> Result<LoadedSpace> {
        self.parts(base)?.into_loaded()
    }

    /// Self-contained document describing a catalog entry.
    pub fn from_entry(entry: &CatalogEntry) -> Self {
        let p = &entry.presentation;
        Self {
            algebra: AlgebraRef::Inline(AlgebraDoc::from_algebra(p.algebra())),
            isotropy_basis: p.isotropy().vectors(),
            background: BackgroundDoc::Matrix(matrix_to_rows(p.background())),
            compact_ideal: entry.compact_ideal.as_ref().map(Subspace::vectors),
        }
    }
}

pub fn read_algebra(path: &Path) -> Result<LieAlgebra> {
    let doc: AlgebraDoc = serde_json::from_str(&fs::read_to_string(path)?)?;
    doc.to_algebra()
}

pub fn read_presentation(path: &Path) -> Result<LoadedSpace> {
    read_presentation_parts(path)?.into_loaded()
}

pub fn read_presentation_parts(path: &Path) -> Result<RawSpace> {
    let doc: PresentationDoc = serde_json::from_str(&fs::read_to_string(path)?)?;
    doc.parts(path.parent())
}

/// Reads a metric and checks it is a positive definite, isotropy-invariant
/// form on `m`.
pub fn read_metric(path: &Path, p: &Presentation) -> Result<Metric> {
    let doc: MetricDoc = serde_json::from_str(&fs::read_to_string(path)?)?;
    let m = matrix_from_rows(&doc.matrix)?;
    if m.nrows() != p.dim_m() || m.ncols() != p.dim_m() {
        return Err(Error::DimensionMismatch { expected: p.dim_m(), got: m.nrows() });
    }
    p.equivariant_metric(m)
}

pub fn metric_doc(g: &Metric) -> MetricDoc {
    MetricDoc { matrix: matrix_to_rows(g.matrix()) }
}
