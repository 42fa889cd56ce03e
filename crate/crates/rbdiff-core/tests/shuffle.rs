//! Oracles for the word layer: the weighted shuffle product against the
//! closed-form one-dimensional coefficients, the free-operator fold, the
//! universal lift, and the word-level extension of a derivation.

use rbdiff_core::{
    binomial, extend, free_lift, is_rb_operator, make_divided_power, nilpotent_derivation_fixtures,
    rb_epsilon, tensor_context, AlgElem, AlgebraHom, Extension, OmegaConstraint, Scalar,
    TensorAlgebra, TensorElem,
};

fn int(c: i64) -> Scalar {
    Scalar::from_int(c)
}

/// Over a one-dimensional base, the product of the grade-(m+1) and
/// grade-(n+1) pure unit words carries coefficient
/// `λ^j · C(m+n−j, j) · C(m+n−2j, m−j)` on the grade-(m+n+1−j) word —
/// equivalently `C(m+n−j, n) · C(n, j) · λ^j`, which is the classical
/// two-parameter family. Checked here in the second form for all m+n ≤ 8.
#[test]
fn one_dimensional_products_match_the_closed_coefficients() {
    let base = make_divided_power(1, &int(0)).unwrap().algebra.clone();
    for lam in [int(0), int(1), int(-1), int(2)] {
        let ctx = tensor_context(&base, &lam, 10).unwrap();
        for m in 0usize..=8 {
            for n in 0usize..=(8 - m) {
                let u = TensorElem::from_word(&ctx, vec![0; m + 1]).unwrap();
                let v = TensorElem::from_word(&ctx, vec![0; n + 1]).unwrap();
                let prod = u.mul(&v);
                for j in 0..=m.min(n) {
                    let mut coeff = binomial(m + n - j, n);
                    coeff *= &binomial(n, j);
                    coeff *= &lam.pow(j);
                    let word = vec![0u16; m + n + 1 - j];
                    let got = prod.terms().get(&word).cloned().unwrap_or_else(Scalar::zero);
                    assert_eq!(got, coeff, "m={m} n={n} j={j} λ={lam}");
                }
                // At weight 0 the product is a single term: C(m+n, n) times
                // the grade-(m+n+1) word.
                if lam.is_zero() {
                    assert_eq!(prod.terms().len(), usize::from(!prod.is_zero()));
                }
            }
        }
    }
}

#[test]
fn single_letter_products_multiply_in_the_base() {
    let fx = make_divided_power(3, &int(1)).unwrap();
    let ctx = tensor_context(&fx.algebra, &int(1), 4).unwrap();
    let u = TensorElem::from_word(&ctx, vec![1]).unwrap();
    let prod = u.mul(&u);
    // z_1·z_1 = 2 z_2 + λ z_1 in the base, so the product of the two
    // single-letter words is the corresponding combination of letters.
    let mut expect = TensorElem::from_word(&ctx, vec![2]).unwrap().scale(&int(2));
    expect = expect.add(&TensorElem::from_word(&ctx, vec![1]).unwrap());
    assert_eq!(prod, expect);
}

#[test]
fn free_operator_prepends_and_satisfies_rb_on_the_flattened_algebra() {
    let fx = make_divided_power(2, &int(1)).unwrap();
    let ctx = tensor_context(&fx.algebra, &int(1), 3).unwrap();
    let w = TensorElem::from_word(&ctx, vec![1, 0]).unwrap();
    let expect = TensorElem::from_word(&ctx, vec![0, 1, 0]).unwrap();
    assert_eq!(w.p_free(), expect);
    // Flatten the cap-2 word algebra and check the matrix form of the free
    // operator is Rota-Baxter of matching weight.
    let ctx2 = tensor_context(&fx.algebra, &int(1), 2).unwrap();
    let flat = TensorAlgebra::materialize(&ctx2).unwrap();
    let p = flat.p_free_operator().unwrap();
    assert!(is_rb_operator(&p, &int(1)).holds);
}

#[test]
fn evaluation_fold_matches_hand_values() {
    // ε(u_0 ⊗ u_1 ⊗ u_2) = u_0·P(u_1·P(u_2)) with the fixture shift:
    // ε(z_0 ⊗ z_0 ⊗ z_0) = P(P(1)) = z_2, and
    // ε(z_1 ⊗ z_1) = z_1·P(z_1) = z_1·z_2 = 3 z_3 + 2λ z_2.
    let lam = int(1);
    let fx = make_divided_power(4, &lam).unwrap();
    let ctx = tensor_context(&fx.algebra, &lam, 4).unwrap();
    let w = TensorElem::from_word(&ctx, vec![0, 0, 0]).unwrap();
    assert_eq!(rb_epsilon(&w, &fx.p).unwrap(), AlgElem::basis(&fx.algebra, 2));
    let w = TensorElem::from_word(&ctx, vec![1, 1]).unwrap();
    let mut expect = AlgElem::basis(&fx.algebra, 3).scale(&int(3));
    expect.add_scaled(&AlgElem::basis(&fx.algebra, 2), &(&int(2) * &lam));
    assert_eq!(rb_epsilon(&w, &fx.p).unwrap(), expect);
}

#[test]
fn universal_lift_factors_through_the_hom() {
    // Lift out of words over the one-dimensional base into the depth-3
    // fixture along the unit hom: the grade-k pure word goes to P^(k−1)(1).
    let lam = int(0);
    let base = make_divided_power(1, &lam).unwrap().algebra.clone();
    let fx = make_divided_power(3, &lam).unwrap();
    let unit_hom = AlgebraHom::new(&base, &fx.algebra, vec![vec![int(1), int(0), int(0)]]).unwrap();
    let ctx = tensor_context(&base, &lam, 4).unwrap();
    for k in 1..=3usize {
        let w = TensorElem::from_word(&ctx, vec![0; k]).unwrap();
        let lifted = free_lift(&fx.p, &unit_hom, &w).unwrap();
        assert_eq!(lifted, AlgElem::basis(&fx.algebra, k - 1), "k = {k}");
    }
    // Lifting along the identity hom is exactly the evaluation fold.
    let ctx3 = tensor_context(&fx.algebra, &lam, 3).unwrap();
    let id = AlgebraHom::identity(&fx.algebra);
    let w = TensorElem::from_word(&ctx3, vec![1, 2]).unwrap();
    assert_eq!(
        free_lift(&fx.p, &id, &w).unwrap(),
        rb_epsilon(&w, &fx.p).unwrap()
    );
}

#[test]
fn extension_seeds_letters_and_respects_grade_filtration() {
    // d̃ of a single letter is the seeded derivation; on longer words each
    // term keeps grade ≤ the original.
    let fixtures = nilpotent_derivation_fixtures().unwrap();
    let t4 = fixtures.iter().find(|f| f.name == "t4").unwrap();
    let ctx = tensor_context(&t4.algebra, &int(0), 4).unwrap();
    let ext = Extension::new(&ctx, &t4.d, &OmegaConstraint::fftc()).unwrap();
    let letter = TensorElem::from_word(&ctx, vec![1]).unwrap();
    assert_eq!(
        ext.apply(&letter).unwrap(),
        TensorElem::from_word(&ctx, vec![2]).unwrap()
    );
    for word in [vec![1u16, 1], vec![0, 1, 2], vec![1, 2, 3, 1]] {
        let grade = word.len();
        let w = TensorElem::from_word(&ctx, word).unwrap();
        let image = ext.apply(&w).unwrap();
        if !image.is_zero() {
            assert!(image.max_grade().unwrap() <= grade);
        }
    }
    // One-shot helper agrees with the memoized object.
    let w = TensorElem::from_word(&ctx, vec![1, 1]).unwrap();
    assert_eq!(
        extend(&t4.d, &OmegaConstraint::fftc(), &w).unwrap(),
        ext.apply(&w).unwrap()
    );
}

#[test]
fn flattened_word_algebra_has_the_expected_dimension_and_labels() {
    let fx = make_divided_power(2, &int(0)).unwrap();
    let ctx = tensor_context(&fx.algebra, &int(0), 2).unwrap();
    let flat = TensorAlgebra::materialize(&ctx).unwrap();
    // Grades 1 and 2 over a 2-dimensional base: 2 + 4 words.
    assert_eq!(flat.dim(), 6);
    assert!(flat.algebra().labels().iter().any(|l| l == "z0⊗z1"));
    // Encode/decode round-trips an arbitrary combination.
    let x = TensorElem::from_word(&ctx, vec![1, 0])
        .unwrap()
        .scale(&int(3))
        .add(&TensorElem::from_word(&ctx, vec![1]).unwrap());
    let coords = flat.encode(&x).unwrap();
    assert_eq!(flat.decode(&coords).unwrap(), x);
}
