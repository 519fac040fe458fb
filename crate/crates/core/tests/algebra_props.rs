use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use homflow::algebra::{killing_restricted, LieAlgebra, Subspace};
use homflow::catalog::{self, algebras};
use homflow::presentation::effectiveness_kernel;

fn invertible(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, d * d).prop_map(move |v| DMatrix::from_vec(d, d, v) + DMatrix::identity(d, d) * 2.0)
}

fn named_algebra(name: &str) -> LieAlgebra {
    match name {
        "su2" => algebras::su2(),
        "sl2r" => algebras::sl2r(),
        "heisenberg" => algebras::heisenberg(),
        "e2" => algebras::e2(),
        _ => unreachable!(),
    }
}

/// Killing form straight from the definition `tr(ad_x ad_y)`.
fn killing_by_traces(a: &LieAlgebra) -> DMatrix<f64> {
    let n = a.dim();
    let ads: Vec<DMatrix<f64>> = (0..n).map(|i| a.ad(&DVector::from_fn(n, |k, _| f64::from(k == i)))).collect();
    DMatrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_change_keeps_jacobi_and_transforms_killing(
        name in prop::sample::select(vec!["su2", "sl2r", "heisenberg", "e2"]),
        t in invertible(3),
    ) {
        let a = named_algebra(name);
        let b = a.change_basis(&t).unwrap();
        let scale = 1.0 + b.max_structure();
        prop_assert!(b.jacobi_residual() <= 1e-10 * scale * scale);
        let expected = t.transpose() * a.killing_form() * &t;
        prop_assert!((b.killing_form() - &expected).amax() <= 1e-9 * (1.0 + expected.amax()));
    }

    #[test]
    fn killing_matches_trace_definition(t in invertible(3)) {
        let a = algebras::sl2r().change_basis(&t).unwrap();
        let k = killing_by_traces(&a);
        prop_assert!((a.killing_form() - &k).amax() <= 1e-10 * (1.0 + k.amax()));
    }

    #[test]
    fn killing_of_an_ideal_is_intrinsic(t in invertible(3)) {
        // su2 is an ideal of su2 ⊕ sl2r; restrict both in a scrambled basis of su2
        let g = LieAlgebra::direct_sum(&algebras::su2(), &algebras::sl2r());
        let mut basis = DMatrix::zeros(6, 3);
        basis.view_mut((0, 0), (3, 3)).copy_from(&t);
        let ideal = Subspace::span(6, &basis);
        prop_assert!(g.is_ideal(&ideal) <= 1e-10);
        let intrinsic = g.restrict(&ideal).unwrap().killing_form();
        let q = ideal.orthonormal();
        let ambient = killing_restricted(&g, &q);
        prop_assert!((intrinsic - &ambient).amax() <= 1e-10);
    }

    #[test]
    fn bracket_is_bilinear_and_antisymmetric(
        x in prop::collection::vec(-2.0f64..2.0, 6),
        y in prop::collection::vec(-2.0f64..2.0, 6),
        s in -3.0f64..3.0,
    ) {
        let a = algebras::su2_semidirect_r3();
        let xy = a.bracket(&x, &y).unwrap();
        let yx = a.bracket(&y, &x).unwrap();
        prop_assert!((&xy + &yx).amax() <= 1e-12);
        let sx: Vec<f64> = x.iter().map(|v| v * s).collect();
        prop_assert!((a.bracket(&sx, &y).unwrap() - &xy * s).amax() <= 1e-11);
    }
}

#[test]
fn kernels_are_ideals_inside_isotropy() {
    for name in catalog::list() {
        let p = catalog::get(name).unwrap().presentation;
        let k = effectiveness_kernel(p.algebra(), p.isotropy());
        assert!(k.is_zero(), "{name}");
    }
    let g = LieAlgebra::direct_sum(&LieAlgebra::direct_sum(&algebras::su2(), &algebras::su2()), &LieAlgebra::abelian(1));
    // the first factor plus the center is itself an ideal
    let h = Subspace::coordinate(7, &[0, 1, 2, 6]);
    let k = effectiveness_kernel(&g, &h);
    assert!(k.same_span(&h, 1e-10));
    assert!(g.is_ideal(&k) <= 1e-12);
}
