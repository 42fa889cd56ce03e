//! λ-Hurwitz series: sequences `f : ℕ → A` over a finite-dimensional algebra,
//! with the binomially weighted product
//!
//! ```text
//! (f·g)_n = Σ_{k=0}^{n} Σ_{j=0}^{n−k} C(n,k)·C(n−k,j)·λ^k · f_{n−j}·g_{k+j}
//! ```
//!
//! the shift derivation `∂(f)_n = f_{n+1}`, the counit `ε(f) = f_0`, and the
//! two structure maps `η` (iterated-operator series `n ↦ d^n(x)`) and `δ`
//! (component bookkeeping `δ(f)_{n,m} = f_{n+m}`).
//!
//! The centrepiece is [`coextend`]: given an operator `Q` on `A` and a
//! constraint `ω = x·y − (φ(x) + y·ψ(x))`, it produces the unique sequence
//! operator `P̃` with seed `P̃_0(f) = Q(f_0)` satisfying
//! `∂∘P̃ = φ(∂) + P̃∘ψ(∂)`, via the memoized recurrence
//!
//! ```text
//! V(n, t) := P̃_n(∂^t f),   V(0, t) = Q(f_t),
//! V(n, t) = Σ_i a_i · f_{n−1+i+t} + Σ_j b_j · V(n−1, t+j).
//! ```
//!
//! Horizon discipline: every series knows how many components it can produce.
//! Derived series (products, shifts, coextensions) compute their own horizon
//! from their inputs' horizons; demanding a component past the horizon is a
//! hard [`Error::HorizonExceeded`], never a silent zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rand::Rng;

use crate::algebra::{AlgElem, AlgebraHom, FinAlgebra, LinearOperator, OmegaConstraint};
use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

// --- horizon ---------------------------------------------------------------------

/// How many components of a series are defined: `Finite(h)` makes indices
/// `0..h` available, `Infinite` makes all of ℕ available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Finite(usize),
    Infinite,
}

impl Horizon {
    /// Is component `n` available?
    pub fn allows(&self, n: usize) -> bool {
        match self {
            Horizon::Finite(h) => n < *h,
            Horizon::Infinite => true,
        }
    }

    /// The more restrictive of two horizons.
    pub fn min(self, other: Horizon) -> Horizon {
        match (self, other) {
            (Horizon::Infinite, h) | (h, Horizon::Infinite) => h,
            (Horizon::Finite(a), Horizon::Finite(b)) => Horizon::Finite(a.min(b)),
        }
    }
}

// --- series ----------------------------------------------------------------------

type Gen = Box<dyn Fn(usize) -> Result<AlgElem> + Send + Sync>;

enum SeriesKind {
    /// Finitely many nonzero components; everything else is zero. Horizon ∞.
    Support(BTreeMap<usize, AlgElem>),
    /// An explicit prefix; horizon = its length.
    Prefix(Vec<AlgElem>),
    /// Demand-driven components with an internal memo table.
    Lazy { gen: Gen, memo: Mutex<HashMap<usize, AlgElem>> },
}

struct SeriesBody {
    id: u64,
    alg: Arc<FinAlgebra>,
    lambda: Scalar,
    horizon: Horizon,
    kind: SeriesKind,
}

/// A λ-Hurwitz series over a [`FinAlgebra`]. Cheap to clone (shared body);
/// immutable apart from append-only memoization, so safe to share across
/// threads.
#[derive(Clone)]
pub struct HurwitzSeries(Arc<SeriesBody>);

static NEXT_SERIES_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_SERIES_ID.fetch_add(1, Ordering::Relaxed)
}

impl HurwitzSeries {
    /// Series with the given nonzero components (zero entries are dropped);
    /// all other components are zero. Horizon ∞.
    pub fn from_support(alg: &Arc<FinAlgebra>, lambda: &Scalar, entries: BTreeMap<usize, AlgElem>) -> Self {
        let entries: BTreeMap<usize, AlgElem> = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        HurwitzSeries(Arc::new(SeriesBody {
            id: fresh_id(),
            alg: Arc::clone(alg),
            lambda: lambda.clone(),
            horizon: Horizon::Infinite,
            kind: SeriesKind::Support(entries),
        }))
    }

    /// Series defined only on the prefix `0..components.len()`.
    pub fn from_prefix(alg: &Arc<FinAlgebra>, lambda: &Scalar, components: Vec<AlgElem>) -> Self {
        HurwitzSeries(Arc::new(SeriesBody {
            id: fresh_id(),
            alg: Arc::clone(alg),
            lambda: lambda.clone(),
            horizon: Horizon::Finite(components.len()),
            kind: SeriesKind::Prefix(components),
        }))
    }

    /// Lazily generated series with the stated horizon; components are
    /// memoized, and the generator must be deterministic.
    pub fn lazy(alg: &Arc<FinAlgebra>, lambda: &Scalar, horizon: Horizon, gen: Gen) -> Self {
        HurwitzSeries(Arc::new(SeriesBody {
            id: fresh_id(),
            alg: Arc::clone(alg),
            lambda: lambda.clone(),
            horizon,
            kind: SeriesKind::Lazy { gen, memo: Mutex::new(HashMap::new()) },
        }))
    }

    /// The multiplicative unit of the series algebra: `(1_A, 0, 0, …)`.
    pub fn unit(alg: &Arc<FinAlgebra>, lambda: &Scalar) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(0, AlgElem::unit(alg));
        HurwitzSeries::from_support(alg, lambda, entries)
    }

    /// The delta series with `value` at index `k` and zero elsewhere.
    pub fn delta(alg: &Arc<FinAlgebra>, lambda: &Scalar, k: usize, value: AlgElem) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(k, value);
        HurwitzSeries::from_support(alg, lambda, entries)
    }

    /// Unique id of this series value (diagnostics, memo keys).
    pub fn id(&self) -> u64 {
        self.0.id
    }

    /// The coefficient algebra.
    pub fn algebra(&self) -> &Arc<FinAlgebra> {
        &self.0.alg
    }

    /// The weight.
    pub fn lambda(&self) -> &Scalar {
        &self.0.lambda
    }

    /// How many components are available.
    pub fn horizon(&self) -> Horizon {
        self.0.horizon
    }

    /// Component `f_n`, exactly. Errors with [`Error::HorizonExceeded`] when
    /// `n` is past the horizon.
    pub fn component(&self, n: usize) -> Result<AlgElem> {
        if let Horizon::Finite(h) = self.0.horizon {
            if n >= h {
                return Err(Error::HorizonExceeded { demanded: n, horizon: h });
            }
        }
        match &self.0.kind {
            SeriesKind::Support(map) => Ok(map
                .get(&n)
                .cloned()
                .unwrap_or_else(|| AlgElem::zero(&self.0.alg))),
            SeriesKind::Prefix(v) => Ok(v[n].clone()),
            SeriesKind::Lazy { gen, memo } => {
                if let Some(hit) = memo.lock().expect("series memo poisoned").get(&n) {
                    return Ok(hit.clone());
                }
                // Compute without holding the lock: generators may demand
                // components of other (shared) series.
                let value = gen(n)?;
                memo.lock()
                    .expect("series memo poisoned")
                    .insert(n, value.clone());
                Ok(value)
            }
        }
    }

    /// Largest index of a nonzero stored component, when the representation
    /// makes that finite and explicit (`Support` only).
    fn support_bound(&self) -> Option<usize> {
        match &self.0.kind {
            SeriesKind::Support(map) => Some(map.keys().next_back().copied().unwrap_or(0)),
            _ => None,
        }
    }
}

impl fmt::Debug for HurwitzSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HurwitzSeries#{}(λ={}, horizon={:?})", self.0.id, self.0.lambda, self.0.horizon)
    }
}

fn require_context(f: &HurwitzSeries, g: &HurwitzSeries, what: &str) -> Result<()> {
    if f.algebra().id() != g.algebra().id() {
        return Err(Error::ContextMismatch(format!("{what}: series over different algebras")));
    }
    if f.lambda() != g.lambda() {
        return Err(Error::ContextMismatch(format!(
            "{what}: series of different weights ({} vs {})",
            f.lambda(),
            g.lambda()
        )));
    }
    Ok(())
}

// --- the product and pointwise structure maps -----------------------------------

/// One component of the λ-weighted product, computed directly from the
/// defining double sum. Shared by [`h_mul`] and the independent re-evaluator.
pub(crate) fn product_component(
    lambda: &Scalar,
    f: &dyn Fn(usize) -> Result<AlgElem>,
    g: &dyn Fn(usize) -> Result<AlgElem>,
    alg: &Arc<FinAlgebra>,
    n: usize,
) -> Result<AlgElem> {
    let mut acc = AlgElem::zero(alg);
    let mut lam_pow = Scalar::one();
    for k in 0..=n {
        if k > 0 {
            if lambda.is_zero() {
                break;
            }
            lam_pow *= lambda;
        }
        for j in 0..=(n - k) {
            let fv = f(n - j)?;
            if fv.is_zero() {
                continue;
            }
            let gv = g(k + j)?;
            if gv.is_zero() {
                continue;
            }
            let mut c = binomial(n, k);
            c *= &binomial(n - k, j);
            c *= &lam_pow;
            acc.add_scaled(&fv.mul(&gv), &c);
        }
    }
    Ok(acc)
}

/// Product of two λ-Hurwitz series. When both factors have finite support the
/// result is materialized with support bound `K_f + K_g`; otherwise the result
/// is lazy with horizon `min(horizon f, horizon g)`.
pub fn h_mul(f: &HurwitzSeries, g: &HurwitzSeries) -> Result<HurwitzSeries> {
    require_context(f, g, "series product")?;
    let alg = Arc::clone(f.algebra());
    let lambda = f.lambda().clone();

    if let (Some(kf), Some(kg)) = (f.support_bound(), g.support_bound()) {
        let mut entries = BTreeMap::new();
        for n in 0..=(kf + kg) {
            let fc = |i: usize| f.component(i);
            let gc = |i: usize| g.component(i);
            let v = product_component(&lambda, &fc, &gc, &alg, n)?;
            if !v.is_zero() {
                entries.insert(n, v);
            }
        }
        return Ok(HurwitzSeries::from_support(&alg, &lambda, entries));
    }

    let horizon = f.horizon().min(g.horizon());
    let (fc, gc) = (f.clone(), g.clone());
    let alg_for_gen = Arc::clone(&alg);
    let lam_for_gen = lambda.clone();
    Ok(HurwitzSeries::lazy(
        &alg,
        &lambda,
        horizon,
        Box::new(move |n| {
            let fcomp = |i: usize| fc.component(i);
            let gcomp = |i: usize| gc.component(i);
            product_component(&lam_for_gen, &fcomp, &gcomp, &alg_for_gen, n)
        }),
    ))
}

/// The shift derivation `∂(f)_n = f_{n+1}`. Horizon drops by one for finite
/// horizons.
pub fn h_partial(f: &HurwitzSeries) -> HurwitzSeries {
    let alg = Arc::clone(f.algebra());
    let lambda = f.lambda().clone();
    match &f.0.kind {
        SeriesKind::Support(map) => {
            let entries = map
                .iter()
                .filter(|(k, _)| **k >= 1)
                .map(|(k, v)| (k - 1, v.clone()))
                .collect();
            HurwitzSeries::from_support(&alg, &lambda, entries)
        }
        _ => {
            let horizon = match f.horizon() {
                Horizon::Finite(h) => Horizon::Finite(h.saturating_sub(1)),
                Horizon::Infinite => Horizon::Infinite,
            };
            let parent = f.clone();
            HurwitzSeries::lazy(&alg, &lambda, horizon, Box::new(move |n| parent.component(n + 1)))
        }
    }
}

/// The counit `ε(f) = f_0`.
pub fn h_epsilon(f: &HurwitzSeries) -> Result<AlgElem> {
    f.component(0)
}

/// The comonoid bookkeeping map: `δ(f)_{n,m} = f_{n+m}` (the `n`-th component
/// of the series-of-series `δ(f)` evaluated at inner index `m`).
pub fn h_delta(f: &HurwitzSeries, n: usize, m: usize) -> Result<AlgElem> {
    f.component(n + m)
}

/// The iterated-operator series `η_{(R,d)}(x) : n ↦ d^n(x)`. `d` is used as
/// raw data; callers that need a validated differential must check it
/// themselves. Powers of `d` are cached inside the series.
pub fn h_eta(d: &LinearOperator, x: &AlgElem, lambda: &Scalar) -> HurwitzSeries {
    let alg = Arc::clone(x.algebra());
    assert_eq!(
        d.algebra().id(),
        alg.id(),
        "iterated-operator series: operator and element from different algebras"
    );
    let d = d.clone();
    let powers: Mutex<Vec<AlgElem>> = Mutex::new(vec![x.clone()]);
    HurwitzSeries::lazy(
        &alg,
        lambda,
        Horizon::Infinite,
        Box::new(move |n| {
            let mut cache = powers.lock().expect("power cache poisoned");
            while cache.len() <= n {
                let next = d.apply(cache.last().expect("power cache never empty"));
                cache.push(next);
            }
            Ok(cache[n].clone())
        }),
    )
}

/// The cofree lift of an algebra homomorphism `hom : R → A` against a
/// differential-like operator `d` on `R`: the series `n ↦ hom(d^n(x))`.
/// Satisfies `ε ∘ lift = hom` and `lift ∘ d = ∂ ∘ lift` when `d` is a genuine
/// differential (asserted by tests, not here).
pub fn cofree_lift(d: &LinearOperator, hom: &AlgebraHom, x: &AlgElem, lambda: &Scalar) -> Result<HurwitzSeries> {
    if d.algebra().id() != hom.source().id() {
        return Err(Error::ContextMismatch(
            "cofree lift: operator acts on a different algebra than the homomorphism's source".into(),
        ));
    }
    if x.algebra().id() != hom.source().id() {
        return Err(Error::ContextMismatch(
            "cofree lift: element lives in a different algebra than the homomorphism's source".into(),
        ));
    }
    let target = Arc::clone(hom.target());
    let d = d.clone();
    let hom_cols: Vec<Vec<Scalar>> = (0..hom.source().dim())
        .map(|j| hom.apply(&AlgElem::basis(hom.source(), j)).coords().to_vec())
        .collect();
    let source = Arc::clone(hom.source());
    let powers: Mutex<Vec<AlgElem>> = Mutex::new(vec![x.clone()]);
    let target_for_gen = Arc::clone(&target);
    Ok(HurwitzSeries::lazy(
        &target,
        lambda,
        Horizon::Infinite,
        Box::new(move |n| {
            let power = {
                let mut cache = powers.lock().expect("power cache poisoned");
                while cache.len() <= n {
                    let next = d.apply(cache.last().expect("power cache never empty"));
                    cache.push(next);
                }
                cache[n].clone()
            };
            let _ = &source;
            let mut out = AlgElem::zero(&target_for_gen);
            for (j, c) in power.coords().iter().enumerate() {
                if !c.is_zero() {
                    let col = AlgElem::from_coords(&target_for_gen, hom_cols[j].clone());
                    out.add_scaled(&col, c);
                }
            }
            Ok(out)
        }),
    ))
}

// --- coextension -------------------------------------------------------------------

/// Largest `f`-index that computing coextension component `n` can demand,
/// `None` when component `n` reads no `f`-component at all (possible only for
/// `n ≥ 1` with φ = ψ = 0). Exact, read off the closed-form expansion: the
/// candidates are `n−1+r` (top-level φ-term), `r+(n−1)s` (φ-term under a full
/// ψ-chain), and `n·s` (pure ψ-chain ending in the seed `Q(f_t)`).
pub fn coextension_demand(omega: &OmegaConstraint, n: usize) -> Option<usize> {
    if n == 0 {
        return Some(0);
    }
    let mut best: Option<usize> = None;
    let mut push = |v: usize| best = Some(best.map_or(v, |b: usize| b.max(v)));
    if let Some(r) = omega.deg_phi() {
        push(n - 1 + r);
        if let Some(s) = omega.deg_psi() {
            push(r + (n - 1) * s);
        }
    }
    if let Some(s) = omega.deg_psi() {
        push(n * s);
    }
    best
}

/// Horizon of a coextension output given the input horizon.
fn coextension_horizon(omega: &OmegaConstraint, input: Horizon) -> Horizon {
    let h = match input {
        Horizon::Infinite => return Horizon::Infinite,
        Horizon::Finite(h) => h,
    };
    if h == 0 {
        return Horizon::Finite(0);
    }
    // When neither polynomial can push the demand upward, every component is
    // computable from f_0 alone (φ = 0 and deg ψ ≤ 0, or φ = ψ = 0).
    let phi_grows = omega.deg_phi().is_some();
    let psi_grows = omega.deg_psi().is_some_and(|s| s >= 1);
    if !phi_grows && !psi_grows {
        return Horizon::Infinite;
    }
    let mut n = 0usize;
    loop {
        match coextension_demand(omega, n) {
            Some(d) if d >= h => return Horizon::Finite(n),
            _ => n += 1,
        }
    }
}

struct CoextState {
    q: LinearOperator,
    omega: OmegaConstraint,
    f: HurwitzSeries,
    memo: Mutex<HashMap<(usize, usize), AlgElem>>,
}

impl CoextState {
    /// `V(n, t) = P̃_n(∂^t f)`, memoized.
    fn v(&self, n: usize, t: usize) -> Result<AlgElem> {
        if let Some(hit) = self.memo.lock().expect("coextension memo poisoned").get(&(n, t)) {
            return Ok(hit.clone());
        }
        let value = if n == 0 {
            self.q.apply(&self.f.component(t)?)
        } else {
            let mut acc = AlgElem::zero(self.f.algebra());
            for (i, a) in self.omega.phi().iter().enumerate() {
                if !a.is_zero() {
                    acc.add_scaled(&self.f.component(n - 1 + i + t)?, a);
                }
            }
            for (j, b) in self.omega.psi().iter().enumerate() {
                if !b.is_zero() {
                    let sub = self.v(n - 1, t + j)?;
                    acc.add_scaled(&sub, b);
                }
            }
            acc
        };
        self.memo
            .lock()
            .expect("coextension memo poisoned")
            .insert((n, t), value.clone());
        Ok(value)
    }
}

/// Coextends the operator `Q` along the constraint ω to a sequence operator:
/// the returned series is `P̃(f)` with `P̃_0(f) = Q(f_0)` and
///
/// ```text
/// P̃_{n+1}(f) = Σ_i a_i·f_{n+i} + Σ_j b_j·P̃_n(∂^j f).
/// ```
///
/// The output horizon is computed from the exact per-component demand bound;
/// demanding past it surfaces the offending index in the error.
pub fn coextend(q: &LinearOperator, omega: &OmegaConstraint, f: &HurwitzSeries) -> Result<HurwitzSeries> {
    if q.algebra().id() != f.algebra().id() {
        return Err(Error::ContextMismatch(
            "coextension: operator acts on a different algebra than the series".into(),
        ));
    }
    let alg = Arc::clone(f.algebra());
    let lambda = f.lambda().clone();
    let horizon = coextension_horizon(omega, f.horizon());
    let state = Arc::new(CoextState {
        q: q.clone(),
        omega: omega.clone(),
        f: f.clone(),
        memo: Mutex::new(HashMap::new()),
    });
    Ok(HurwitzSeries::lazy(
        &alg,
        &lambda,
        horizon,
        Box::new(move |n| state.v(n, 0)),
    ))
}

// --- named sequence operators -------------------------------------------------------

/// A named operator on series, applied componentwise with internal
/// memoization. Concretely one of the shift derivation or a coextension.
pub struct SeqOperator {
    name: String,
    op: SeqOpKind,
}

enum SeqOpKind {
    Partial,
    Coextension { q: LinearOperator, omega: OmegaConstraint },
}

impl SeqOperator {
    /// The shift derivation ∂.
    pub fn partial() -> Self {
        SeqOperator { name: "partial".into(), op: SeqOpKind::Partial }
    }

    /// The coextension `P̃` of `q` along ω.
    pub fn coextension(q: LinearOperator, omega: OmegaConstraint) -> Self {
        SeqOperator {
            name: format!("coextension of an operator along {omega}"),
            op: SeqOpKind::Coextension { q, omega },
        }
    }

    /// Operator name for reports.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Applies the operator, producing a (lazy, memoized) series.
    pub fn apply(&self, f: &HurwitzSeries) -> Result<HurwitzSeries> {
        match &self.op {
            SeqOpKind::Partial => Ok(h_partial(f)),
            SeqOpKind::Coextension { q, omega } => coextend(q, omega, f),
        }
    }
}

// --- witness descriptions -------------------------------------------------------------

/// A finite, serializable description of a finite-support witness series:
/// either the unit series or an explicit list of `(index, basis, coefficient)`
/// entries. Keeping witnesses as data (rather than opaque closures) lets
/// failure reports reproduce the exact inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesSpec {
    /// `(1_A, 0, 0, …)`.
    Unit,
    /// `Σ entries`: coefficient × basis vector placed at a component index.
    Entries(Vec<(usize, usize, Scalar)>),
}

impl SeriesSpec {
    /// The delta witness: basis vector `basis` at component `k`.
    pub fn delta(k: usize, basis: usize) -> Self {
        SeriesSpec::Entries(vec![(k, basis, Scalar::one())])
    }

    /// Materializes the description over a concrete algebra.
    pub fn build(&self, alg: &Arc<FinAlgebra>, lambda: &Scalar) -> HurwitzSeries {
        match self {
            SeriesSpec::Unit => HurwitzSeries::unit(alg, lambda),
            SeriesSpec::Entries(entries) => {
                let mut map: BTreeMap<usize, AlgElem> = BTreeMap::new();
                for (k, basis, coeff) in entries {
                    let term = AlgElem::basis(alg, *basis).scale(coeff);
                    map.entry(*k)
                        .and_modify(|v| *v = v.add(&term))
                        .or_insert(term);
                }
                HurwitzSeries::from_support(alg, lambda, map)
            }
        }
    }

    /// A reproducible random witness: 1–3 entries with small indices, basis
    /// vectors below `dim`, and coefficients from a small exact pool.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, max_index: usize) -> Self {
        let pool = [
            Scalar::one(),
            Scalar::from_int(-1),
            Scalar::from_int(2),
            Scalar::ratio(1, 2).expect("static ratio"),
            Scalar::from_int(-3),
        ];
        let count = rng.gen_range(1..=3);
        let entries = (0..count)
            .map(|_| {
                (
                    rng.gen_range(0..=max_index),
                    rng.gen_range(0..dim),
                    pool[rng.gen_range(0..pool.len())].clone(),
                )
            })
            .collect();
        SeriesSpec::Entries(entries)
    }

    /// Largest component index carrying data (0 for the unit series).
    pub fn max_index(&self) -> usize {
        match self {
            SeriesSpec::Unit => 0,
            SeriesSpec::Entries(entries) => entries.iter().map(|(k, _, _)| *k).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSpec::Unit => write!(f, "unit"),
            SeriesSpec::Entries(entries) => {
                if entries.is_empty() {
                    return write!(f, "0");
                }
                let terms: Vec<String> = entries
                    .iter()
                    .map(|(k, b, c)| {
                        if c.is_one() {
                            format!("e{b}@{k}")
                        } else {
                            format!("{c}*e{b}@{k}")
                        }
                    })
                    .collect();
                write!(f, "{}", terms.join(" + "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::make_divided_power;

    fn fixture(m: usize, lambda: i64) -> crate::fixtures::Fixture {
        make_divided_power(m, &Scalar::from_int(lambda)).unwrap()
    }

    #[test]
    fn component_access_and_horizon() {
        let fx = fixture(3, 0);
        let z0 = AlgElem::basis(&fx.algebra, 0);
        let f = HurwitzSeries::delta(&fx.algebra, &fx.lambda, 1, z0.clone());
        assert_eq!(f.component(1).unwrap(), z0);
        assert!(f.component(5).unwrap().is_zero());

        let g = HurwitzSeries::from_prefix(&fx.algebra, &fx.lambda, vec![z0.clone(), z0.clone(), z0]);
        match g.component(3) {
            Err(Error::HorizonExceeded { demanded: 3, horizon: 3 }) => {}
            other => panic!("expected horizon error, got {other:?}"),
        }
    }

    #[test]
    fn unit_series_is_neutral() {
        let fx = fixture(3, 1);
        let one = HurwitzSeries::unit(&fx.algebra, &fx.lambda);
        let f = HurwitzSeries::delta(&fx.algebra, &fx.lambda, 2, AlgElem::basis(&fx.algebra, 1));
        let prod = h_mul(&f, &one).unwrap();
        for n in 0..6 {
            assert_eq!(prod.component(n).unwrap(), f.component(n).unwrap());
        }
    }

    #[test]
    fn partial_shifts_support() {
        let fx = fixture(2, 0);
        let x = AlgElem::basis(&fx.algebra, 1);
        let f = HurwitzSeries::delta(&fx.algebra, &fx.lambda, 3, x.clone());
        let df = h_partial(&f);
        assert_eq!(df.component(2).unwrap(), x);
        assert!(df.component(3).unwrap().is_zero());
        assert!(h_partial(&HurwitzSeries::unit(&fx.algebra, &fx.lambda))
            .component(0)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn delta_bookkeeping() {
        let fx = fixture(2, 0);
        let x = AlgElem::basis(&fx.algebra, 1);
        let f = HurwitzSeries::delta(&fx.algebra, &fx.lambda, 5, x.clone());
        assert_eq!(h_delta(&f, 2, 3).unwrap(), x);
        assert_eq!(h_delta(&f, 0, 5).unwrap(), x);
        assert!(h_delta(&f, 2, 2).unwrap().is_zero());
    }

    #[test]
    fn coextension_demand_matches_hand_values() {
        // φ of degree r with ψ = 0: component n reads up to f_{n−1+r}.
        let w = OmegaConstraint::new(vec![Scalar::zero(), Scalar::one()], vec![]);
        assert_eq!(coextension_demand(&w, 3), Some(3));
        // φ = 0, ψ of degree 2: pure chains read up to f_{2n}.
        let w = OmegaConstraint::new(vec![], vec![Scalar::one(), Scalar::zero(), Scalar::one()]);
        assert_eq!(coextension_demand(&w, 3), Some(6));
        // φ = ψ = 0: components past 0 read nothing.
        assert_eq!(coextension_demand(&OmegaConstraint::xy(), 4), None);
        assert_eq!(coextension_demand(&OmegaConstraint::xy(), 0), Some(0));
    }

    #[test]
    fn coextension_horizon_from_prefix_input() {
        let fx = fixture(2, 0);
        let comps = vec![AlgElem::unit(&fx.algebra); 4];
        let f = HurwitzSeries::from_prefix(&fx.algebra, &fx.lambda, comps);
        // ω = xy−1: component n reads f_{n−1}, so 5 components are available.
        let pf = coextend(&fx.p, &OmegaConstraint::fftc(), &f).unwrap();
        assert_eq!(pf.horizon(), Horizon::Finite(5));
        assert!(pf.component(4).is_ok());
        assert!(matches!(pf.component(5), Err(Error::HorizonExceeded { .. })));
        // ω = xy − b_0·y keeps demanding only f_0: infinite horizon.
        let w = OmegaConstraint::new(vec![], vec![Scalar::from_int(2)]);
        let pf = coextend(&fx.p, &w, &f).unwrap();
        assert_eq!(pf.horizon(), Horizon::Infinite);
        assert!(pf.component(40).is_ok());
    }

    #[test]
    fn series_spec_build_and_display() {
        let fx = fixture(3, 0);
        let spec = SeriesSpec::Entries(vec![(2, 1, Scalar::from_int(2)), (0, 0, Scalar::one())]);
        let f = spec.build(&fx.algebra, &fx.lambda);
        assert_eq!(f.component(0).unwrap(), AlgElem::basis(&fx.algebra, 0));
        assert_eq!(
            f.component(2).unwrap(),
            AlgElem::basis(&fx.algebra, 1).scale(&Scalar::from_int(2))
        );
        assert_eq!(spec.to_string(), "2*e1@2 + e0@0");
        assert_eq!(SeriesSpec::Unit.to_string(), "unit");
    }
}
