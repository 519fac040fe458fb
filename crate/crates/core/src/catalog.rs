//! Built-in presentations used as fixtures and as CLI targets.
//!
//! Conventions:
//! - `su2` uses the cyclic basis `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`,
//!   so its Killing form is `-2·I`.
//! - `sl2r` uses `[X1,X2] = -X3`, `[X2,X3] = X1`, `[X3,X1] = X2`; `X3` spans the
//!   compact `so(2)` and `B = diag(2, 2, -2)`.
//! - Every `so(2)` isotropy is the rotation generator on the last axis of its
//!   block (`e3` in `su2`/`so3`, `X3` in `sl2r`, `r` in `e(2)`).
//! - Backgrounds are the coordinate identity, which is `-B/2` on `su2` blocks
//!   and makes every isotropy generator act skew-symmetrically.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{null_space, sym_apply};
use crate::presentation::{Metric, Presentation};

/// Qualitative flow behaviour expected for every invariant initial metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    FiniteExtinction,
    ImmortalDiagnostic,
    FlatFixedPoint,
    /// No compact semisimple ideal, but not contractible either.
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub presentation: Presentation,
    pub compact_ideal: Option<Subspace>,
    pub expected: Expected,
    pub notes: &'static str,
}

pub mod algebras {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn su2() -> LieAlgebra {
        LieAlgebra::from_brackets(labels(&["e1", "e2", "e3"]), &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)])
            .expect("su(2) satisfies Jacobi")
    }

    pub fn sl2r() -> LieAlgebra {
        LieAlgebra::from_brackets(labels(&["X1", "X2", "X3"]), &[(0, 1, 2, -1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)])
            .expect("sl(2,R) satisfies Jacobi")
    }

    pub fn heisenberg() -> LieAlgebra {
        LieAlgebra::from_brackets(labels(&["e1", "e2", "e3"]), &[(0, 1, 2, 1.0)]).expect("heisenberg")
    }

    /// `e(2) = so(2) ⋉ R²` with basis `(r, f1, f2)`.
    pub fn e2() -> LieAlgebra {
        let so2 = LieAlgebra::from_brackets(labels(&["r"]), &[]).expect("so(2)");
        let plane = LieAlgebra::from_brackets(labels(&["f1", "f2"]), &[]).expect("R^2");
        let rotation = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        LieAlgebra::semidirect_sum(&so2, &plane, &[rotation]).expect("e(2)")
    }

    /// `e(2)` in a basis `(f1, f2, r)` where `ad_r` is not orthogonal, so the
    /// identity metric is not flat: `[r,f1] = f2`, `[r,f2] = -2 f1`.
    pub fn e2_nonflat() -> LieAlgebra {
        LieAlgebra::from_brackets(labels(&["f1", "f2", "r"]), &[(1, 2, 0, 2.0), (0, 2, 1, -1.0)]).expect("e(2)")
    }

    /// `su(2) ⋉ R³` with the standard (adjoint) action.
    pub fn su2_semidirect_r3() -> LieAlgebra {
        let s = su2();
        let action: Vec<_> = (0..3).map(|i| s.ad_basis(i)).collect();
        let r3 = LieAlgebra::from_brackets(labels(&["f1", "f2", "f3"]), &[]).expect("R^3");
        LieAlgebra::semidirect_sum(&s, &r3, &action).expect("su(2) acts by derivations")
    }

    pub fn abelian(n: usize) -> LieAlgebra {
        LieAlgebra::abelian(n)
    }
}

const NAMES: &[&str] = &[
    "su2",
    "s2",
    "su2_r",
    "su2_r2_so2",
    "so3_e2",
    "so3_sl2r",
    "su2_su2_r_diag",
    "su2_semidirect_r3",
    "heisenberg",
    "e2",
    "e2_nonflat",
    "sl2r",
    "abelian_3",
];

/// Names of all built-in entries. `abelian_<n>` is accepted by [`get`] for any `n ≥ 1`.
pub fn list() -> Vec<&'static str> {
    NAMES.to_vec()
}

fn entry(
    name: &str,
    algebra: LieAlgebra,
    isotropy: Subspace,
    compact_ideal: Option<Subspace>,
    expected: Expected,
    notes: &'static str,
) -> CatalogEntry {
    let n = algebra.dim();
    let presentation =
        Presentation::new(algebra, isotropy, DMatrix::identity(n, n)).expect("catalog presentations are valid");
    CatalogEntry { name: name.to_string(), presentation, compact_ideal, expected, notes }
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    use algebras::*;
    use Expected::*;
    let r = |n| LieAlgebra::abelian(n);
    let e = match name {
        "su2" => entry(name, su2(), Subspace::zero(3), Some(Subspace::whole(3)), FiniteExtinction, "S^3 = SU(2)"),
        "s2" => entry(
            name,
            su2(),
            Subspace::coordinate(3, &[2]),
            Some(Subspace::whole(3)),
            FiniteExtinction,
            "S^2 = SO(3)/SO(2)",
        ),
        "su2_r" => entry(
            name,
            LieAlgebra::direct_sum(&su2(), &r(1)),
            Subspace::zero(4),
            Some(Subspace::coordinate(4, &[0, 1, 2])),
            FiniteExtinction,
            "S^3 x R as SU(2) x R; all left-invariant metrics, including non-products",
        ),
        "su2_r2_so2" => entry(
            name,
            LieAlgebra::direct_sum(&su2(), &r(2)),
            Subspace::coordinate(5, &[2]),
            Some(Subspace::coordinate(5, &[0, 1, 2])),
            FiniteExtinction,
            "S^2 x R^2 as (SU(2) x R^2)/(SO(2) x {e})",
        ),
        "so3_e2" => entry(
            name,
            LieAlgebra::direct_sum(&su2(), &e2()),
            Subspace::coordinate(6, &[2, 3]),
            Some(Subspace::coordinate(6, &[0, 1, 2])),
            FiniteExtinction,
            "S^2 x E^2 with g = so(3) + e(2), h = so(2) + so(2)",
        ),
        "so3_sl2r" => entry(
            name,
            LieAlgebra::direct_sum(&su2(), &sl2r()),
            Subspace::coordinate(6, &[2, 5]),
            Some(Subspace::coordinate(6, &[0, 1, 2])),
            FiniteExtinction,
            "S^2 x H^2 with g = so(3) + sl(2,R), h = so(2) + so(2)",
        ),
        "su2_su2_r_diag" => {
            let g = LieAlgebra::direct_sum(&LieAlgebra::direct_sum(&su2(), &su2()), &r(1));
            let diag = Subspace::new(
                7,
                &[
                    vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                    vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                    vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
                ],
            )
            .expect("independent");
            entry(
                name,
                g,
                diag,
                Some(Subspace::coordinate(7, &[0, 1, 2, 3, 4, 5])),
                FiniteExtinction,
                "S^3 x R with h = su(2) embedded diagonally in su(2) + su(2)",
            )
        }
        "su2_semidirect_r3" => entry(
            name,
            su2_semidirect_r3(),
            Subspace::coordinate(6, &[2]),
            None,
            Undetermined,
            "S^2 x R^3 as (SU(2) x| R^3)/SO(2); no compact semisimple normal subgroup",
        ),
        "heisenberg" => entry(name, heisenberg(), Subspace::zero(3), None, ImmortalDiagnostic, "Nil^3"),
        "e2" => entry(name, e2(), Subspace::zero(3), None, ImmortalDiagnostic, "E(2); identity metric is flat"),
        "e2_nonflat" => entry(
            name,
            e2_nonflat(),
            Subspace::zero(3),
            None,
            ImmortalDiagnostic,
            "E(2) with a non-flat identity metric",
        ),
        "sl2r" => entry(name, sl2r(), Subspace::zero(3), None, ImmortalDiagnostic, "universal cover of SL(2,R)"),
        other => {
            let n = other
                .strip_prefix("abelian_")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::UnknownEntry(other.to_string()))?;
            entry(other, abelian(n), Subspace::zero(n), None, FlatFixedPoint, "flat torus / Euclidean space")
        }
    };
    Ok(e)
}

/// Frobenius-orthonormal basis of symmetric matrices commuting with every
/// isotropy generator, as flattened `d*d` column vectors.
pub fn equivariant_basis(p: &Presentation) -> Vec<DMatrix<f64>> {
    let d = p.dim_m();
    let mut sym_basis = Vec::new();
    for i in 0..d {
        for j in i..d {
            let mut s = DMatrix::zeros(d, d);
            if i == j {
                s[(i, i)] = 1.0;
            } else {
                s[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
                s[(j, i)] = std::f64::consts::FRAC_1_SQRT_2;
            }
            sym_basis.push(s);
        }
    }
    let actions = p.isotropy_action();
    if actions.is_empty() {
        return sym_basis;
    }
    let rows = actions.len() * d * d;
    let mut map = DMatrix::zeros(rows, sym_basis.len());
    for (c, s) in sym_basis.iter().enumerate() {
        for (k, a) in actions.iter().enumerate() {
            let comm = a * s - s * a;
            for (idx, v) in comm.iter().enumerate() {
                map[(k * d * d + idx, c)] = *v;
            }
        }
    }
    let ns = null_space(&map, 1e-10);
    ns.column_iter()
        .map(|coef| {
            let mut m = DMatrix::zeros(d, d);
            for (c, s) in sym_basis.iter().enumerate() {
                m += s * coef[c];
            }
            m
        })
        .collect()
}

/// Seeded random equivariant metric: exponential of a Gaussian symmetric
/// matrix projected onto the isotropy commutant, with eigenvalues clamped to
/// `[0.1, 10]`. The generator is `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_metric_for(p: &Presentation, seed: u64) -> Metric {
    let d = p.dim_m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.6).expect("valid normal");
    let mut s = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = normal.sample(&mut rng);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let mut projected = DMatrix::zeros(d, d);
    for b in equivariant_basis(p) {
        projected += &b * b.dot(&s);
    }
    let m = sym_apply(&projected, |l| l.exp().clamp(0.1, 10.0));
    Metric::new(m).expect("clamped spectrum is positive")
}

pub fn random_metric(entry: &CatalogEntry, seed: u64) -> Metric {
    random_metric_for(&entry.presentation, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads() {
        for name in list() {
            let e = get(name).unwrap();
            assert_eq!(e.presentation.algebra().jacobi_residual(), 0.0, "{name}");
            if let Some(k) = &e.compact_ideal {
                let cert = e.presentation.algebra().is_compact_semisimple(k);
                assert!(cert.compact_semisimple, "{name}");
                assert!(e.presentation.algebra().is_ideal(k) < 1e-12, "{name}");
            }
            match e.expected {
                Expected::FiniteExtinction => assert!(e.compact_ideal.is_some(), "{name}"),
                _ => assert!(e.compact_ideal.is_none(), "{name}"),
            }
        }
    }

    #[test]
    fn su2_r_ideal() {
        let e = get("su2_r").unwrap();
        let k = e.compact_ideal.unwrap();
        assert_eq!(k.dim(), 3);
        assert!(e.presentation.algebra().is_compact_semisimple(&k).compact_semisimple);
    }

    #[test]
    fn so3_e2_dimensions() {
        let e = get("so3_e2").unwrap();
        assert_eq!(e.presentation.dim_g(), 6);
        assert_eq!(e.presentation.dim_h(), 2);
        assert_eq!(e.presentation.dim_m(), 4);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(get("su3").unwrap_err(), Error::UnknownEntry("su3".into()));
        assert!(get("abelian_0").is_err());
        assert_eq!(get("abelian_5").unwrap().presentation.dim_m(), 5);
    }

    #[test]
    fn random_metrics_are_equivariant_spd() {
        for name in list() {
            let e = get(name).unwrap();
            for seed in [0, 7, 123] {
                let g = random_metric(&e, seed);
                assert!(g.eigenvalues()[0] >= 0.1 - 1e-12);
                assert!(g.eigenvalues()[g.dim() - 1] <= 10.0 + 1e-12);
                assert!(e.presentation.equivariance_defect(g.matrix()) < 1e-9, "{name}");
            }
        }
        let a = random_metric(&get("su2_r").unwrap(), 7);
        let b = random_metric(&get("su2_r").unwrap(), 7);
        assert_eq!(a, b);
    }

    #[test]
    fn commutant_dimensions() {
        // trivial isotropy: all symmetric matrices
        assert_eq!(equivariant_basis(&get("su2_r").unwrap().presentation).len(), 10);
        // diagonal su(2): scalar on the 3-dim fiber plus the line
        assert_eq!(equivariant_basis(&get("su2_su2_r_diag").unwrap().presentation).len(), 2);
        // so(2) rotating (e1, e2), trivial on R^2
        assert_eq!(equivariant_basis(&get("su2_r2_so2").unwrap().presentation).len(), 4);
    }
}
