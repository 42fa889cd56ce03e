//! Truncated tensor algebras with the λ-mixable-shuffle product — the free
//! commutative Rota-Baxter algebra of weight λ on a base algebra, cut off at
//! a grade cap.
//!
//! Elements are linear combinations of *words*: tuples `(b_0, …, b_{k−1})` of
//! base-algebra basis indices, standing for `e_{b_0} ⊗ … ⊗ e_{b_{k−1}}`. The
//! grade of a word is its length; grades run `1..=cap`, and words longer than
//! the cap are quotiented away (the span of long words is an ideal closed
//! under the Rota-Baxter operator, so the quotient is again a Rota-Baxter
//! algebra and the truncation is exact, not an approximation).
//!
//! The product multiplies the head letters in the base algebra and
//! quasi-shuffles the tails:
//!
//! ```text
//! (x_0 ⊗ u')·(y_0 ⊗ v') = (x_0·y_0) ⊗ (u' ⧢_λ v'),
//! (a⊗u) ⧢ (b⊗v) = a⊗(u ⧢ (b⊗v)) + b⊗((a⊗u) ⧢ v) + λ·(a·b)⊗(u ⧢ v),
//! ∅ ⧢ w = w = w ⧢ ∅.
//! ```
//!
//! On top of that sit the free Rota-Baxter operator `P(w) = 1_A ⊗ w`
//! ([`TensorElem::p_free`]), the evaluation fold `ε_{(R,P)}` ([`rb_epsilon`],
//! [`free_lift`]) and the differential-side [`Extension`] of a seed operator
//! `q` along a constraint `ω = x·y − (φ(x) + y·ψ(x))`:
//!
//! ```text
//! d̃(u_0 ⊗ u') = q(u_0) ⊗ u' + (u_0 + λ·q(u_0)) · (φ(d̃) + P∘ψ(d̃))(u'),
//! d̃(u_0)      = q(u_0)                      (single-letter words),
//! ```
//!
//! which is filtration-preserving: the image of a grade-`k` word has grade
//! at most `k`, so applying it inside the cap never touches the quotient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{
    is_rb_operator, AlgElem, AlgebraHom, FinAlgebra, LinearOperator, OmegaConstraint,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A basis word: base-algebra basis indices, one per tensor factor.
pub type Word = Vec<u16>;

// --- context -------------------------------------------------------------------------

/// Shared state for a truncated tensor algebra: the base algebra, the weight,
/// the grade cap, and a memo table for tail quasi-shuffles. Obtained through
/// [`tensor_context`], which caches contexts process-wide so that repeated
/// work over the same `(algebra, λ, cap)` shares one shuffle memo.
pub struct TensorContext {
    id: u64,
    alg: Arc<FinAlgebra>,
    lambda: Scalar,
    cap: usize,
    shuffle_memo: Mutex<HashMap<(Word, Word), Arc<Vec<(Word, Scalar)>>>>,
}

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

type ContextCache = Mutex<HashMap<(u64, Scalar, usize), Arc<TensorContext>>>;

fn context_cache() -> &'static ContextCache {
    static CACHE: OnceLock<ContextCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The tensor context over `alg` with weight `lambda`, truncated at grade
/// `cap` (must be ≥ 2). Cached: equal keys return the same context.
pub fn tensor_context(alg: &Arc<FinAlgebra>, lambda: &Scalar, cap: usize) -> Result<Arc<TensorContext>> {
    if cap < 2 {
        return Err(Error::InvalidInput(format!(
            "tensor context needs a grade cap of at least 2, got {cap}"
        )));
    }
    let key = (alg.id(), lambda.clone(), cap);
    let mut cache = context_cache().lock().expect("tensor context cache poisoned");
    if let Some(hit) = cache.get(&key) {
        return Ok(Arc::clone(hit));
    }
    let ctx = Arc::new(TensorContext {
        id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
        alg: Arc::clone(alg),
        lambda: lambda.clone(),
        cap,
        shuffle_memo: Mutex::new(HashMap::new()),
    });
    cache.insert(key, Arc::clone(&ctx));
    Ok(ctx)
}

impl TensorContext {
    pub fn algebra(&self) -> &Arc<FinAlgebra> {
        &self.alg
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// λ-quasi-shuffle of two tail words, memoized. Results may be longer
    /// than the cap; truncation happens when heads are prepended.
    fn shuffle(&self, u: &[u16], v: &[u16]) -> Arc<Vec<(Word, Scalar)>> {
        if u.is_empty() {
            return Arc::new(vec![(v.to_vec(), Scalar::one())]);
        }
        if v.is_empty() {
            return Arc::new(vec![(u.to_vec(), Scalar::one())]);
        }
        let key = (u.to_vec(), v.to_vec());
        if let Some(hit) = self.shuffle_memo.lock().expect("shuffle memo poisoned").get(&key) {
            return Arc::clone(hit);
        }
        let (a, u_rest) = (u[0], &u[1..]);
        let (b, v_rest) = (v[0], &v[1..]);
        let mut acc: BTreeMap<Word, Scalar> = BTreeMap::new();
        let mut push = |word: Word, coeff: Scalar| {
            if coeff.is_zero() {
                return;
            }
            let entry = acc.entry(word).or_insert_with(Scalar::zero);
            *entry += &coeff;
        };
        for (w, c) in self.shuffle(u_rest, v).iter() {
            let mut word = Vec::with_capacity(w.len() + 1);
            word.push(a);
            word.extend_from_slice(w);
            push(word, c.clone());
        }
        for (w, c) in self.shuffle(u, v_rest).iter() {
            let mut word = Vec::with_capacity(w.len() + 1);
            word.push(b);
            word.extend_from_slice(w);
            push(word, c.clone());
        }
        if !self.lambda.is_zero() {
            let merged = self.alg.basis_product(a as usize, b as usize).to_vec();
            for (w, c) in self.shuffle(u_rest, v_rest).iter() {
                for (idx, ab) in &merged {
                    let mut word = Vec::with_capacity(w.len() + 1);
                    word.push(*idx as u16);
                    word.extend_from_slice(w);
                    let mut coeff = self.lambda.clone();
                    coeff *= ab;
                    coeff *= c;
                    push(word, coeff);
                }
            }
        }
        let result: Arc<Vec<(Word, Scalar)>> =
            Arc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        self.shuffle_memo
            .lock()
            .expect("shuffle memo poisoned")
            .insert(key, Arc::clone(&result));
        result
    }
}

impl fmt::Debug for TensorContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TensorContext#{}(dim {}, λ={}, cap {})",
            self.id,
            self.alg.dim(),
            self.lambda,
            self.cap
        )
    }
}

fn require_ctx(a: &TensorElem, b: &TensorElem, what: &str) -> Result<()> {
    if a.ctx.id != b.ctx.id {
        return Err(Error::ContextMismatch(format!(
            "{what}: elements from different tensor contexts"
        )));
    }
    Ok(())
}

// --- elements ------------------------------------------------------------------------

/// An element of the truncated tensor algebra: a finite linear combination of
/// words, kept in a sorted map for canonical form.
#[derive(Clone)]
pub struct TensorElem {
    ctx: Arc<TensorContext>,
    terms: BTreeMap<Word, Scalar>,
}

impl TensorElem {
    pub fn zero(ctx: &Arc<TensorContext>) -> Self {
        TensorElem { ctx: Arc::clone(ctx), terms: BTreeMap::new() }
    }

    /// A single basis word. Errors if the length is outside `1..=cap` or a
    /// letter is not a valid basis index.
    pub fn from_word(ctx: &Arc<TensorContext>, word: Word) -> Result<Self> {
        if word.is_empty() || word.len() > ctx.cap {
            return Err(Error::InvalidInput(format!(
                "word length {} outside 1..={}",
                word.len(),
                ctx.cap
            )));
        }
        let dim = ctx.alg.dim();
        if let Some(bad) = word.iter().find(|b| **b as usize >= dim) {
            return Err(Error::InvalidInput(format!(
                "letter {bad} is not a basis index of a dimension-{dim} algebra"
            )));
        }
        let mut terms = BTreeMap::new();
        terms.insert(word, Scalar::one());
        Ok(TensorElem { ctx: Arc::clone(ctx), terms })
    }

    /// The base algebra embedded in grade 1: `x ↦ (x)`.
    pub fn embed(ctx: &Arc<TensorContext>, x: &AlgElem) -> Self {
        assert_eq!(
            x.algebra().id(),
            ctx.alg.id(),
            "embedding an element of a different algebra"
        );
        let mut terms = BTreeMap::new();
        for (b, c) in x.coords().iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![b as u16], c.clone());
            }
        }
        TensorElem { ctx: Arc::clone(ctx), terms }
    }

    /// The multiplicative unit: the embedded base unit.
    pub fn unit(ctx: &Arc<TensorContext>) -> Self {
        TensorElem::embed(ctx, &AlgElem::unit(&ctx.alg))
    }

    /// The pure tensor of the given factors (each a base-algebra element),
    /// expanded into basis words. Errors if the factor count is outside
    /// `1..=cap`.
    pub fn pure_tensor(ctx: &Arc<TensorContext>, factors: &[AlgElem]) -> Result<Self> {
        if factors.is_empty() || factors.len() > ctx.cap {
            return Err(Error::InvalidInput(format!(
                "pure tensor with {} factors outside 1..={}",
                factors.len(),
                ctx.cap
            )));
        }
        for x in factors {
            if x.algebra().id() != ctx.alg.id() {
                return Err(Error::ContextMismatch(
                    "pure tensor factor from a different algebra".into(),
                ));
            }
        }
        let mut terms: BTreeMap<Word, Scalar> = BTreeMap::new();
        terms.insert(Vec::new(), Scalar::one());
        for x in factors {
            let mut next: BTreeMap<Word, Scalar> = BTreeMap::new();
            for (word, c) in &terms {
                for (b, xc) in x.coords().iter().enumerate() {
                    if xc.is_zero() {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(b as u16);
                    let mut coeff = c.clone();
                    coeff *= xc;
                    let entry = next.entry(w).or_insert_with(Scalar::zero);
                    *entry += &coeff;
                }
            }
            terms = next;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(TensorElem { ctx: Arc::clone(ctx), terms })
    }

    pub fn context(&self) -> &Arc<TensorContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest grade present, `None` for zero.
    pub fn min_grade(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }

    /// Largest grade present, `None` for zero.
    pub fn max_grade(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    pub fn add(&self, other: &TensorElem) -> TensorElem {
        require_ctx(self, other, "tensor sum").expect("tensor sum across contexts");
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let entry = terms.entry(w.clone()).or_insert_with(Scalar::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        TensorElem { ctx: Arc::clone(&self.ctx), terms }
    }

    pub fn sub(&self, other: &TensorElem) -> TensorElem {
        require_ctx(self, other, "tensor difference").expect("tensor difference across contexts");
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let entry = terms.entry(w.clone()).or_insert_with(Scalar::zero);
            *entry -= c;
        }
        terms.retain(|_, c| !c.is_zero());
        TensorElem { ctx: Arc::clone(&self.ctx), terms }
    }

    pub fn scale(&self, c: &Scalar) -> TensorElem {
        if c.is_zero() {
            return TensorElem::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, v)| {
                let mut out = v.clone();
                out *= c;
                (w.clone(), out)
            })
            .collect();
        TensorElem { ctx: Arc::clone(&self.ctx), terms }
    }

    fn add_scaled_word(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(word.clone()).or_insert_with(Scalar::zero);
        *entry += &coeff;
        if entry.is_zero() {
            self.terms.remove(&word);
        }
    }

    /// The mixable-shuffle product; words exceeding the cap are dropped
    /// (quotient by the cap ideal).
    pub fn mul(&self, other: &TensorElem) -> TensorElem {
        require_ctx(self, other, "tensor product").expect("tensor product across contexts");
        let ctx = &self.ctx;
        let mut out = TensorElem::zero(ctx);
        for (u, cu) in &self.terms {
            let (u0, u_rest) = (u[0] as usize, &u[1..]);
            for (v, cv) in &other.terms {
                let (v0, v_rest) = (v[0] as usize, &v[1..]);
                let mut pair_coeff = cu.clone();
                pair_coeff *= cv;
                let heads = ctx.alg.basis_product(u0, v0);
                if heads.is_empty() {
                    continue;
                }
                let tails = ctx.shuffle(u_rest, v_rest);
                for (head_idx, head_c) in heads {
                    for (tail, tail_c) in tails.iter() {
                        if tail.len() + 1 > ctx.cap {
                            continue;
                        }
                        let mut word = Vec::with_capacity(tail.len() + 1);
                        word.push(*head_idx as u16);
                        word.extend_from_slice(tail);
                        let mut coeff = pair_coeff.clone();
                        coeff *= head_c;
                        coeff *= tail_c;
                        out.add_scaled_word(word, coeff);
                    }
                }
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// The free Rota-Baxter operator: prepend a unit letter,
    /// `P(u_0 ⊗ … ⊗ u_n) = 1_A ⊗ u_0 ⊗ … ⊗ u_n`, dropping words that leave
    /// the cap.
    pub fn p_free(&self) -> TensorElem {
        let ctx = &self.ctx;
        let mut out = TensorElem::zero(ctx);
        for (w, c) in &self.terms {
            if w.len() + 1 > ctx.cap {
                continue;
            }
            for (b, u) in ctx.alg.unit_coords().iter().enumerate() {
                if u.is_zero() {
                    continue;
                }
                let mut word = Vec::with_capacity(w.len() + 1);
                word.push(b as u16);
                word.extend_from_slice(w);
                let mut coeff = c.clone();
                coeff *= u;
                out.add_scaled_word(word, coeff);
            }
        }
        out
    }
}

impl PartialEq for TensorElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id == other.ctx.id && self.terms == other.terms
    }
}

impl Eq for TensorElem {}

impl fmt::Display for TensorElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let labels = self.ctx.alg.labels();
        let mut first = true;
        for (w, c) in &self.terms {
            let word_str = w
                .iter()
                .map(|b| labels[*b as usize].clone())
                .collect::<Vec<_>>()
                .join("⊗");
            if first {
                first = false;
                if c.is_one() {
                    write!(f, "{word_str}")?;
                } else {
                    write!(f, "{c}·{word_str}")?;
                }
            } else if c.is_one() {
                write!(f, " + {word_str}")?;
            } else {
                write!(f, " + {c}·{word_str}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TensorElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// --- evaluation folds ------------------------------------------------------------------

/// The evaluation fold of a word algebra into its base:
/// `u_0 ⊗ … ⊗ u_n ↦ u_0·P(u_1·P(… P(u_n) …))`, extended linearly. When `P`
/// is a Rota-Baxter operator of the context weight this is the couniversal
/// algebra map out of the free object.
pub fn rb_epsilon(x: &TensorElem, p: &LinearOperator) -> Result<AlgElem> {
    if p.algebra().id() != x.ctx.alg.id() {
        return Err(Error::ContextMismatch(
            "evaluation fold: operator acts on a different algebra than the words".into(),
        ));
    }
    let alg = &x.ctx.alg;
    let mut out = AlgElem::zero(alg);
    for (w, c) in &x.terms {
        let mut acc = AlgElem::basis(alg, *w.last().expect("words are nonempty") as usize);
        for b in w[..w.len() - 1].iter().rev() {
            acc = AlgElem::basis(alg, *b as usize).mul(&p.apply(&acc));
        }
        out.add_scaled(&acc, c);
    }
    Ok(out)
}

/// The couniversal lift against a Rota-Baxter algebra `(R, P)` and an algebra
/// map `hom` from the base into `R`: words map to
/// `hom(u_0)·P(hom(u_1)·P(…))`. Validates that `P` is Rota-Baxter of the
/// context weight on `hom`'s target.
pub fn free_lift(p: &LinearOperator, hom: &AlgebraHom, x: &TensorElem) -> Result<AlgElem> {
    if hom.source().id() != x.ctx.alg.id() {
        return Err(Error::ContextMismatch(
            "free lift: homomorphism source differs from the word base algebra".into(),
        ));
    }
    if p.algebra().id() != hom.target().id() {
        return Err(Error::ContextMismatch(
            "free lift: operator acts on a different algebra than the homomorphism target".into(),
        ));
    }
    let check = is_rb_operator(p, &x.ctx.lambda);
    if !check.holds {
        return Err(Error::Precondition(format!(
            "free lift target operator is not Rota-Baxter of weight {}",
            x.ctx.lambda
        )));
    }
    let target = hom.target();
    let mut out = AlgElem::zero(target);
    for (w, c) in &x.terms {
        let mut acc = hom.apply(&AlgElem::basis(hom.source(), *w.last().expect("nonempty") as usize));
        for b in w[..w.len() - 1].iter().rev() {
            let letter = hom.apply(&AlgElem::basis(hom.source(), *b as usize));
            acc = letter.mul(&p.apply(&acc));
        }
        out.add_scaled(&acc, c);
    }
    Ok(out)
}

// --- extension of a seed operator ------------------------------------------------------

/// The extension of a seed operator `q` (with `q(1) = 0`) on the base algebra
/// to an operator `d̃` on the word algebra, along a constraint ω:
///
/// ```text
/// d̃(u_0)      = q(u_0),
/// d̃(u_0 ⊗ u') = q(u_0) ⊗ u' + (u_0 + λ·q(u_0)) · (φ(d̃) + P∘ψ(d̃))(u').
/// ```
///
/// Images of basis words are memoized per extension.
pub struct Extension {
    ctx: Arc<TensorContext>,
    q: LinearOperator,
    omega: OmegaConstraint,
    memo: Mutex<HashMap<Word, TensorElem>>,
}

impl Extension {
    /// Errors with [`Error::UnitNotAnnihilated`] when `q(1) ≠ 0` (the
    /// extension formula demands a seed that kills the unit).
    pub fn new(ctx: &Arc<TensorContext>, q: &LinearOperator, omega: &OmegaConstraint) -> Result<Self> {
        if q.algebra().id() != ctx.alg.id() {
            return Err(Error::ContextMismatch(
                "extension seed acts on a different algebra than the word base".into(),
            ));
        }
        let unit_image = q.apply(&AlgElem::unit(&ctx.alg));
        if !unit_image.is_zero() {
            return Err(Error::UnitNotAnnihilated(format!("{unit_image}")));
        }
        Ok(Extension {
            ctx: Arc::clone(ctx),
            q: q.clone(),
            omega: omega.clone(),
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn context(&self) -> &Arc<TensorContext> {
        &self.ctx
    }

    pub fn omega(&self) -> &OmegaConstraint {
        &self.omega
    }

    /// Applies `d̃` (linear extension of the word images).
    pub fn apply(&self, x: &TensorElem) -> Result<TensorElem> {
        if x.ctx.id != self.ctx.id {
            return Err(Error::ContextMismatch(
                "extension applied to an element of a different context".into(),
            ));
        }
        let mut out = TensorElem::zero(&self.ctx);
        for (w, c) in &x.terms {
            let image = self.apply_word(w)?;
            out = out.add(&image.scale(c));
        }
        Ok(out)
    }

    /// `d̃` iterated `k` times.
    pub fn apply_power(&self, x: &TensorElem, k: usize) -> Result<TensorElem> {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = self.apply(&acc)?;
        }
        Ok(acc)
    }

    fn apply_word(&self, w: &Word) -> Result<TensorElem> {
        if let Some(hit) = self.memo.lock().expect("extension memo poisoned").get(w) {
            return Ok(hit.clone());
        }
        let image = if w.len() == 1 {
            let seed = self.q.apply(&AlgElem::basis(&self.ctx.alg, w[0] as usize));
            TensorElem::embed(&self.ctx, &seed)
        } else {
            let head = w[0] as usize;
            let tail = TensorElem::from_word(&self.ctx, w[1..].to_vec())?;
            // Iterated images d̃^k(tail) up to the largest power either
            // polynomial demands.
            let deg = self
                .omega
                .deg_phi()
                .unwrap_or(0)
                .max(self.omega.deg_psi().unwrap_or(0));
            let mut powers: Vec<TensorElem> = Vec::with_capacity(deg + 1);
            powers.push(tail);
            for _ in 0..deg {
                let next = self.apply(powers.last().expect("nonempty"))?;
                powers.push(next);
            }
            let mut rec = TensorElem::zero(&self.ctx);
            for (i, a) in self.omega.phi().iter().enumerate() {
                if !a.is_zero() {
                    rec = rec.add(&powers[i].scale(a));
                }
            }
            let mut psi_acc = TensorElem::zero(&self.ctx);
            for (j, b) in self.omega.psi().iter().enumerate() {
                if !b.is_zero() {
                    psi_acc = psi_acc.add(&powers[j].scale(b));
                }
            }
            if !psi_acc.is_zero() {
                rec = rec.add(&psi_acc.p_free());
            }
            let head_elem = AlgElem::basis(&self.ctx.alg, head);
            let q_head = self.q.apply(&head_elem);
            // q(u_0) ⊗ u' — prepend each component of q(u_0) as a letter.
            let mut first = TensorElem::zero(&self.ctx);
            for (b, c) in q_head.coords().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut word = Vec::with_capacity(w.len());
                word.push(b as u16);
                word.extend_from_slice(&w[1..]);
                first.add_scaled_word(word, c.clone());
            }
            let multiplier =
                TensorElem::embed(&self.ctx, &head_elem.add(&q_head.scale(&self.ctx.lambda)));
            first.add(&multiplier.mul(&rec))
        };
        // The extension is filtration-preserving; anything else means the
        // recursion itself is broken, so fail loudly.
        assert!(
            image.max_grade().map_or(true, |g| g <= w.len()),
            "extension image of a grade-{} word has grade {:?}",
            w.len(),
            image.max_grade()
        );
        self.memo
            .lock()
            .expect("extension memo poisoned")
            .insert(w.clone(), image.clone());
        Ok(image)
    }
}

/// One-shot extension application: builds the extension of `q` along ω and
/// applies it to `x`.
pub fn extend(q: &LinearOperator, omega: &OmegaConstraint, x: &TensorElem) -> Result<TensorElem> {
    Extension::new(x.context(), q, omega)?.apply(x)
}

// --- materialization --------------------------------------------------------------------

/// The truncated tensor algebra flattened into a [`FinAlgebra`]: one basis
/// vector per word of grade `1..=cap`, ordered by grade then lexicographically.
/// Used where the word algebra must itself serve as the base of a further
/// tensor construction.
pub struct TensorAlgebra {
    ctx: Arc<TensorContext>,
    algebra: Arc<FinAlgebra>,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl TensorAlgebra {
    pub fn materialize(ctx: &Arc<TensorContext>) -> Result<Self> {
        let dim = ctx.alg.dim();
        let mut words: Vec<Word> = Vec::new();
        for len in 1..=ctx.cap {
            let mut word = vec![0u16; len];
            loop {
                words.push(word.clone());
                // Advance the odometer.
                let mut pos = len;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if (word[pos] as usize) + 1 < dim {
                        word[pos] += 1;
                        for slot in word.iter_mut().skip(pos + 1) {
                            *slot = 0;
                        }
                        break;
                    }
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
        }
        let index: HashMap<Word, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let labels: Vec<String> = words
            .iter()
            .map(|w| {
                w.iter()
                    .map(|b| ctx.alg.labels()[*b as usize].clone())
                    .collect::<Vec<_>>()
                    .join("⊗")
            })
            .collect();
        let n = words.len();
        let mut table = vec![vec![vec![Scalar::zero(); n]; n]; n];
        for i in 0..n {
            let wi = TensorElem::from_word(ctx, words[i].clone())?;
            for (j, row) in table[i].iter_mut().enumerate().take(n) {
                let wj = TensorElem::from_word(ctx, words[j].clone())?;
                let prod = wi.mul(&wj);
                for (w, c) in prod.terms() {
                    row[index[w]] = c.clone();
                }
            }
        }
        let unit = {
            let mut coords = vec![Scalar::zero(); n];
            for (w, c) in TensorElem::unit(ctx).terms() {
                coords[index[w]] = c.clone();
            }
            coords
        };
        let algebra = FinAlgebra::new(labels, table, unit)?;
        Ok(TensorAlgebra { ctx: Arc::clone(ctx), algebra, words, index })
    }

    pub fn context(&self) -> &Arc<TensorContext> {
        &self.ctx
    }

    /// The flattened algebra.
    pub fn algebra(&self) -> &Arc<FinAlgebra> {
        &self.algebra
    }

    /// Word for a flattened basis index.
    pub fn word(&self, idx: usize) -> &Word {
        &self.words[idx]
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// Flattened coordinates of a word-algebra element.
    pub fn encode(&self, x: &TensorElem) -> Result<AlgElem> {
        if x.context().id != self.ctx.id {
            return Err(Error::ContextMismatch(
                "encoding an element of a different tensor context".into(),
            ));
        }
        let mut coords = vec![Scalar::zero(); self.words.len()];
        for (w, c) in x.terms() {
            coords[self.index[w]] = c.clone();
        }
        Ok(AlgElem::from_coords(&self.algebra, coords))
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(&self, x: &AlgElem) -> Result<TensorElem> {
        if x.algebra().id() != self.algebra.id() {
            return Err(Error::ContextMismatch(
                "decoding an element of a different algebra".into(),
            ));
        }
        let mut out = TensorElem::zero(&self.ctx);
        for (i, c) in x.coords().iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled_word(self.words[i].clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// The free Rota-Baxter operator as a matrix on the flattened algebra.
    pub fn p_free_operator(&self) -> Result<LinearOperator> {
        let cols = (0..self.words.len())
            .map(|j| {
                let w = TensorElem::from_word(&self.ctx, self.words[j].clone())?;
                Ok(self.encode(&w.p_free())?.coords().to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearOperator::from_columns(&self.algebra, cols))
    }
}
