//! Exact-arithmetic engine for transporting Rota-Baxter and differential
//! operator structure along polynomial operator constraints.
//!
//! The central objects:
//!
//! * [`algebra`] — finite-dimensional commutative unital algebras over ℚ with
//!   exact rational coordinates, linear operators on them, and the two
//!   operator laws (Rota-Baxter of weight λ, differential of weight λ).
//! * [`hurwitz`] — λ-Hurwitz series (sequences valued in an algebra) with the
//!   binomially weighted product, and the coextension of an algebra operator
//!   to a sequence operator along a constraint `ω = x·y − (φ(x) + y·ψ(x))`.
//! * [`shuffle`] — truncated mixable-shuffle/tensor algebras carrying the free
//!   Rota-Baxter structure, and the extension of a seed operator to a
//!   derivation-like operator along a constraint.
//! * [`laws`] — executable checks: does a transported operator satisfy the
//!   target law, with an explicit witness when it does not.
//! * [`classify`] — the symbolic trichotomy for constraints (transport to
//!   both structures / to weight-zero only / to neither), with certified
//!   counterexample witnesses for the negative cases.
//! * [`fixtures`] — small exact test algebras: truncated divided-power
//!   algebras with their shift and down operators, and nilpotent-derivation
//!   algebras.
//!
//! All arithmetic is exact ([`scalar::Scalar`] wraps arbitrary-precision
//! rationals); every equality check in the engine is literal equality of
//! canonical forms, never a tolerance.

pub mod algebra;
pub mod classify;
pub mod error;
pub mod fixtures;
pub mod hurwitz;
pub mod laws;
pub mod scalar;
pub mod shuffle;

pub use algebra::{
    is_diff_operator, is_rb_operator, omega_holds, op_polynomial, AlgElem, AlgebraHom, FinAlgebra,
    LinearOperator, OmegaConstraint, OperatorCheck, OperatorDefect,
};
pub use classify::{
    classify_omega, default_grid, find_counterexample, sweep, verify_positive,
    verify_positive_with, CaseId, CounterexampleWitness, OmegaClass, SweepRow, T0Shape, TkShape,
    Verdict, WeightMode, WitnessSource, DEFAULT_SEED,
};
pub use error::{Error, Result};
pub use fixtures::{
    divided_power_suite, euler_shift_triple, make_divided_power, nilpotent_derivation_fixtures,
    DiffFixture, Fixture,
};
pub use hurwitz::{
    coextend, coextension_demand, cofree_lift, h_delta, h_epsilon, h_eta, h_mul, h_partial,
    Horizon, HurwitzSeries, SeqOperator, SeriesSpec,
};
pub use laws::{
    check_coextension_rb, check_comonad_laws, check_extension_diff, check_lemma_eps,
    check_lemma_eta, check_monad_laws, default_pairs, default_specs, probe_extension_diff,
    search_fftc_triple, CheckReport, FailWitness, TripleSearch,
};
pub use scalar::{binomial, Scalar};
pub use shuffle::{
    extend, free_lift, rb_epsilon, tensor_context, Extension, TensorAlgebra, TensorContext,
    TensorElem, Word,
};
