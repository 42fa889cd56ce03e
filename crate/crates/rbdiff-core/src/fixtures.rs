//! Stock test fixtures: the divided-power quotient family and small nilpotent
//! derivation algebras, with process-wide caching so repeated sweeps do not
//! rebuild (and re-validate) the same structure tables thousands of times.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{
    divided_power_algebra, divided_power_down, divided_power_euler, divided_power_shift,
    make_truncated_poly, truncated_poly_derivation, FinAlgebra, LinearOperator,
};
use crate::error::Result;
use crate::scalar::Scalar;

/// A depth-`m` divided-power quotient with its two canonical operators.
///
/// * `p` — the shift `z_i ↦ z_{i+1}` (top basis vector killed): a Rota-Baxter
///   operator of weight `lambda` on the quotient.
/// * `d` — the downward shift `z_0 ↦ 0`, `z_i ↦ z_{i−1}`: the weight-λ
///   differential of the *untruncated* algebra, which on the quotient fails
///   the Leibniz law at the boundary. It is carried as raw data; checks that
///   need a valid differential must validate (and will reject it).
#[derive(Clone)]
pub struct Fixture {
    /// Human-readable id, e.g. `"I_3"`.
    pub name: String,
    /// Quotient depth `m` (= dimension).
    pub depth: usize,
    /// Weight of both the product and the operators.
    pub lambda: Scalar,
    /// The algebra with basis `z0, …, z{m−1}`.
    pub algebra: Arc<FinAlgebra>,
    /// Upward shift (Rota-Baxter of weight `lambda`).
    pub p: LinearOperator,
    /// Downward shift (differential only before truncation).
    pub d: LinearOperator,
}

/// Builds the depth-`m` weight-λ divided-power fixture: the algebra together
/// with the shift `P(z̄_i) = z̄_{i+1}` (with `z̄_m ≡ 0`) and the downward map
/// `d(z̄_0) = 0`, `d(z̄_i) = z̄_{i−1}`. Cached per `(m, λ)`.
pub fn make_divided_power(m: usize, lambda: &Scalar) -> Result<Fixture> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Scalar), Fixture>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (m, lambda.clone());
    if let Some(hit) = cache.lock().expect("fixture cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let algebra = divided_power_algebra(m, lambda)?;
    let fixture = Fixture {
        name: format!("I_{m}"),
        depth: m,
        lambda: lambda.clone(),
        algebra: Arc::clone(&algebra),
        p: divided_power_shift(&algebra),
        d: divided_power_down(&algebra),
    };
    cache
        .lock()
        .expect("fixture cache poisoned")
        .insert(key, fixture.clone());
    Ok(fixture)
}

/// The standard fixture suite `I_1, …, I_max_depth` at one weight.
pub fn divided_power_suite(max_depth: usize, lambda: &Scalar) -> Result<Vec<Fixture>> {
    (1..=max_depth).map(|m| make_divided_power(m, lambda)).collect()
}

/// An algebra carrying a *validated* weight-0 differential, for checks that
/// extend differentials to word algebras.
#[derive(Clone)]
pub struct DiffFixture {
    /// Human-readable id, e.g. `"t3"`.
    pub name: String,
    /// The base algebra.
    pub algebra: Arc<FinAlgebra>,
    /// A weight-0 differential on it (validated by construction in the suite).
    pub d: LinearOperator,
}

/// The nilpotent-derivation suite used by cross-direction checks:
/// `k[t]/(t^n)` for `n = 3, 4, 7` with `δ(t) = t²`, plus `k[t]/(t^5)` with
/// the steeper `δ(t) = t³`. Every `δ` is nilpotent, so polynomials in the
/// extended operator terminate exactly, but the suite must also keep *enough*
/// nonzero powers alive: constraints whose coefficients only enter at degree
/// 3 leave their first visible Leibniz trace in `t⁶` (e.g. `x*y - x^3` has
/// defect `120·t⁶` on the pair `1⊗1, 1⊗t`), so the suite needs a quotient of
/// depth ≥ 7 — the shallower members have `δ³ ≡ 0` or kill `t⁶` and cannot
/// tell such a constraint from `x*y`. Cached process-wide.
pub fn nilpotent_derivation_fixtures() -> Result<Vec<DiffFixture>> {
    static CACHE: OnceLock<Vec<DiffFixture>> = OnceLock::new();
    if let Some(hit) = CACHE.get() {
        return Ok(hit.clone());
    }
    let mut out = Vec::new();
    for n in [3usize, 4, 7] {
        let algebra = make_truncated_poly(n)?;
        let d = truncated_poly_derivation(&algebra);
        out.push(DiffFixture { name: format!("t{n}"), algebra, d });
    }
    // k[t]/(t^5) with δ(t^k) = k·t^{k+2}: the Leibniz-compatible extension of t ↦ t³.
    let algebra = make_truncated_poly(5)?;
    let n = algebra.dim();
    let cols = (0..n)
        .map(|k| {
            let mut col = vec![Scalar::zero(); n];
            if k >= 1 && k + 2 < n {
                col[k + 2] = Scalar::from_int(k as i64);
            }
            col
        })
        .collect();
    let d = LinearOperator::from_columns(&algebra, cols);
    out.push(DiffFixture { name: "t5-cubic".into(), algebra, d });
    let _ = CACHE.set(out.clone());
    Ok(out)
}

/// A fully valid weight-0 triple `(R, d, P)` with `d∘P = P∘ψ(d)` for
/// `ψ(x) = 1 + x` (i.e. the constraint `x*y - (y + y*x)`): the depth-`m`
/// divided-power algebra at weight 0 with the Euler operator `z_i ↦ i·z_i`
/// as differential and the shift as Rota-Baxter operator. Used wherever a
/// *valid* operator pair satisfying a constraint is required.
pub fn euler_shift_triple(m: usize) -> Result<(Arc<FinAlgebra>, LinearOperator, LinearOperator)> {
    let algebra = divided_power_algebra(m, &Scalar::zero())?;
    let d = divided_power_euler(&algebra);
    let p = divided_power_shift(&algebra);
    Ok((algebra, d, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_diff_operator, is_rb_operator, omega_holds, OmegaConstraint};

    #[test]
    fn fixture_cache_returns_same_algebra() {
        let a = make_divided_power(3, &Scalar::one()).unwrap();
        let b = make_divided_power(3, &Scalar::one()).unwrap();
        assert_eq!(a.algebra.id(), b.algebra.id());
        let c = make_divided_power(3, &Scalar::zero()).unwrap();
        assert_ne!(a.algebra.id(), c.algebra.id());
    }

    #[test]
    fn nilpotent_fixtures_all_validate() {
        for fx in nilpotent_derivation_fixtures().unwrap() {
            assert!(
                is_diff_operator(&fx.d, &Scalar::zero()).holds,
                "{} carries an invalid differential",
                fx.name
            );
        }
    }

    #[test]
    fn euler_shift_triple_satisfies_its_constraint() {
        let omega = OmegaConstraint::new(vec![], vec![Scalar::one(), Scalar::one()]);
        for m in 1..=4 {
            let (_, d, p) = euler_shift_triple(m).unwrap();
            assert!(is_diff_operator(&d, &Scalar::zero()).holds);
            assert!(is_rb_operator(&p, &Scalar::zero()).holds);
            assert!(omega_holds(&d, &p, &omega), "constraint fails at depth {m}");
        }
    }
}
