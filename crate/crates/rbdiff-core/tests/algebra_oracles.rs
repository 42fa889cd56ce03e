//! Frozen oracles for the base layer: divided-power structure constants,
//! operator-law verdicts on the canonical fixture operators, and the
//! operator-relation predicate. Every expected value below was derived by
//! hand and is asserted exactly.

use rbdiff_core::{
    divided_power_suite, is_diff_operator, is_rb_operator, make_divided_power, omega_holds,
    op_polynomial, AlgElem, LinearOperator, OmegaConstraint, OperatorDefect, Scalar,
};

fn int(c: i64) -> Scalar {
    Scalar::from_int(c)
}

#[test]
fn divided_power_products_match_hand_values() {
    // z_i z_j = Σ_{l ≤ min(i,j)} C(i+j−l, j) C(j, l) λ^l z_{i+j−l}, truncated
    // at the depth.
    for lam in [int(0), int(1), int(2), int(-1)] {
        let fx = make_divided_power(4, &lam).unwrap();
        let alg = &fx.algebra;
        let z = |i: usize| AlgElem::basis(alg, i);
        // z_1·z_1 = 2 z_2 + λ z_1
        let mut expect = z(2).scale(&int(2));
        expect.add_scaled(&z(1), &lam);
        assert_eq!(z(1).mul(&z(1)), expect);
        // z_1·z_2 = 3 z_3 + 2 λ z_2
        let mut expect = z(3).scale(&int(3));
        expect.add_scaled(&z(2), &(&int(2) * &lam));
        assert_eq!(z(1).mul(&z(2)), expect);
        // z_2·z_2 = 6 z_4 + 6 λ z_3 + λ² z_2, and z_4 ≡ 0 at depth 4.
        let mut expect = z(3).scale(&(&int(6) * &lam));
        expect.add_scaled(&z(2), &lam.pow(2));
        assert_eq!(z(2).mul(&z(2)), expect);
    }
}

#[test]
fn shift_operator_is_rota_baxter_for_every_weight() {
    for lam in [int(0), int(1), int(-1), int(2)] {
        for fx in divided_power_suite(5, &lam).unwrap() {
            let check = is_rb_operator(&fx.p, &lam);
            assert!(check.holds, "depth {} λ = {lam}", fx.depth);
        }
    }
}

#[test]
fn down_operator_fails_rota_baxter_at_weight_zero() {
    // The index-lowering operator violates the weight-0 Rota-Baxter law on
    // the depth-3 fixture. Two independent hand computations:
    //  * row-major first failure at (0,2): d(1)d(z_2) = 0 while
    //    d(d(1)z_2) + d(1·d(z_2)) = d(z_1) = z_0, defect −z_0;
    //  * pair (1,1): d(z_1)d(z_1) = z_0 while d(d(z_1)z_1) + d(z_1 d(z_1))
    //    = 2 z_0, defect −z_0 as well.
    let fx = make_divided_power(3, &int(0)).unwrap();
    let check = is_rb_operator(&fx.d, &int(0));
    assert!(!check.holds);
    match check.witness.unwrap() {
        OperatorDefect::BasisPair { i, j, defect } => {
            assert_eq!((i, j), (0, 2));
            assert_eq!(defect, AlgElem::basis(&fx.algebra, 0).scale(&int(-1)));
        }
        other => panic!("unexpected witness {other:?}"),
    }
    // Direct expansion of the (1,1) instance.
    let z1 = AlgElem::basis(&fx.algebra, 1);
    let d = &fx.d;
    let lhs = d.apply(&z1).mul(&d.apply(&z1));
    let rhs = d.apply(&d.apply(&z1).mul(&z1)).add(&d.apply(&z1.mul(&d.apply(&z1))));
    assert_eq!(lhs.sub(&rhs), AlgElem::basis(&fx.algebra, 0).scale(&int(-1)));
}

#[test]
fn down_operator_fails_leibniz_on_truncated_fixtures() {
    // The index-lowering operator is a weight-λ differential on the full
    // divided-power algebra but NOT on its depth-m truncations: the first
    // failure at depth 3 is the pair (1,2) with defect −3 z_2 for every
    // weight, because z_1 z_2 = 3 z_3 + 2λ z_2 collapses under truncation.
    for lam in [int(0), int(1), int(-1), int(2)] {
        let fx = make_divided_power(3, &lam).unwrap();
        let check = is_diff_operator(&fx.d, &lam);
        assert!(!check.holds, "λ = {lam}");
        match check.witness.unwrap() {
            OperatorDefect::BasisPair { i, j, defect } => {
                assert_eq!((i, j), (1, 2), "λ = {lam}");
                assert_eq!(defect, AlgElem::basis(&fx.algebra, 2).scale(&int(-3)), "λ = {lam}");
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }
    // At depth 2 and weight 0 the failure appears already at (1,1) with
    // defect −2 z_1.
    let fx = make_divided_power(2, &int(0)).unwrap();
    let check = is_diff_operator(&fx.d, &int(0));
    assert!(!check.holds);
    match check.witness.unwrap() {
        OperatorDefect::BasisPair { i, j, defect } => {
            assert_eq!((i, j), (1, 1));
            assert_eq!(defect, AlgElem::basis(&fx.algebra, 1).scale(&int(-2)));
        }
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn operator_relation_examples() {
    // d∘P = id fails on every truncated fixture (the top basis vector is
    // sent to 0 by P, then to 0 by d), so the flat constraint's relation
    // does not hold for the canonical pair.
    for depth in 1..=4 {
        let fx = make_divided_power(depth, &int(0)).unwrap();
        assert!(!omega_holds(&fx.d, &fx.p, &OmegaConstraint::fftc()));
    }
    // The Euler/shift pair satisfies the relation for ω = x·y − (y + y·x):
    // d∘P = P∘d + P, i.e. ψ = 1 + x with φ = 0.
    let (_, d, p) = rbdiff_core::euler_shift_triple(4).unwrap();
    let omega = OmegaConstraint::new(vec![], vec![int(1), int(1)]);
    assert!(omega_holds(&d, &p, &omega));
    // And it fails for the flat constraint.
    assert!(!omega_holds(&d, &p, &OmegaConstraint::fftc()));
}

#[test]
fn operator_polynomials_compose_correctly() {
    let fx = make_divided_power(4, &int(0)).unwrap();
    let d = &fx.d;
    // φ(d) for φ = 2 + x²: acts as 2·id + d² on each basis vector.
    let poly = op_polynomial(d, &[int(2), int(0), int(1)]);
    for i in 0..4 {
        let e = AlgElem::basis(&fx.algebra, i);
        let expect = e.scale(&int(2)).add(&d.apply(&d.apply(&e)));
        assert_eq!(poly.apply(&e), expect);
    }
    // The empty polynomial is the zero operator.
    let zero = op_polynomial(d, &[]);
    assert_eq!(zero.apply(&AlgElem::basis(&fx.algebra, 2)), AlgElem::zero(&fx.algebra));
}

#[test]
fn nilpotent_derivation_fixtures_validate() {
    for fx in rbdiff_core::nilpotent_derivation_fixtures().unwrap() {
        let check = is_diff_operator(&fx.d, &int(0));
        assert!(check.holds, "{} must carry a weight-0 derivation", fx.name);
        assert_eq!(fx.d.apply(&AlgElem::unit(&fx.algebra)), AlgElem::zero(&fx.algebra));
    }
}

#[test]
fn constraint_display_round_trips_by_eye() {
    let omega = OmegaConstraint::new(vec![int(-2), int(0), int(1)], vec![int(3)]);
    assert_eq!(omega.to_string(), "x*y - (- 2 + x^2 + 3*y)");
    assert_eq!(OmegaConstraint::fftc().to_string(), "x*y - 1");
    assert_eq!(OmegaConstraint::commutator().to_string(), "x*y - y*x");
    assert_eq!(OmegaConstraint::xy().to_string(), "x*y");
}

#[test]
fn zero_operator_is_a_differential_but_not_surjective_after_composition() {
    // Degenerate sanity: the zero operator satisfies the Leibniz law for
    // every weight and composes to zero with anything.
    let fx = make_divided_power(3, &int(1)).unwrap();
    let zero = LinearOperator::zero(&fx.algebra);
    assert!(is_diff_operator(&zero, &int(1)).holds);
    assert!(is_diff_operator(&zero, &int(0)).holds);
    assert_eq!(
        zero.compose(&fx.p).apply(&AlgElem::basis(&fx.algebra, 1)),
        AlgElem::zero(&fx.algebra)
    );
}
