//! Finite-dimensional commutative algebras, linear operators on them, and the
//! two operator laws the engine revolves around.
//!
//! An operator `P` on a commutative algebra is **Rota-Baxter of weight λ** when
//!
//! ```text
//! P(x)·P(y) = P(P(x)·y) + P(x·P(y)) + λ·P(x·y)
//! ```
//!
//! and `d` is a **differential of weight λ** when `d(1) = 0` and
//!
//! ```text
//! d(x·y) = d(x)·y + x·d(y) + λ·d(x)·d(y)
//! ```
//!
//! Both laws are bilinear, so they are checked exactly on basis pairs; a check
//! reports the first failing pair together with the exact defect, oriented as
//! (left-hand side) − (right-hand side) of the displayed identity.
//!
//! A constraint `ω = x·y − (φ(x) + y·ψ(x))` with polynomials φ, ψ links the two
//! worlds: a pair of operators `(d, Q)` satisfies ω when `d∘Q = φ(d) + Q∘ψ(d)`
//! as linear operators ([`omega_holds`]).

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

// --- algebras ----------------------------------------------------------------

/// A finite-dimensional commutative unital associative algebra over the exact
/// rationals, presented by structure constants on a distinguished basis.
///
/// Construction validates commutativity, unitality and associativity of the
/// presented table exactly and rejects anything that fails. Each validated
/// algebra gets a process-unique id; element/operator operations insist that
/// both operands come from the same id, so cross-algebra arithmetic is a
/// programming error caught immediately.
pub struct FinAlgebra {
    id: u64,
    labels: Vec<String>,
    /// `rows[i][j]` = sparse coordinate list of the product `e_i · e_j`.
    rows: Vec<Vec<Vec<(usize, Scalar)>>>,
    unit: Vec<Scalar>,
}

static NEXT_ALGEBRA_ID: AtomicU64 = AtomicU64::new(1);

impl FinAlgebra {
    /// Builds and validates an algebra from a dense structure-constant table:
    /// `table[i][j]` is the coordinate vector of `e_i · e_j`, and `unit` is the
    /// coordinate vector of the multiplicative identity.
    pub fn new(labels: Vec<String>, table: Vec<Vec<Vec<Scalar>>>, unit: Vec<Scalar>) -> Result<Arc<Self>> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::InvalidAlgebra("dimension must be at least 1".into()));
        }
        if table.len() != d
            || table.iter().any(|r| r.len() != d)
            || table.iter().flatten().any(|v| v.len() != d)
            || unit.len() != d
        {
            return Err(Error::InvalidAlgebra(format!(
                "structure table must be {d}x{d} with {d}-dimensional entries"
            )));
        }

        // Commutativity.
        for i in 0..d {
            for j in (i + 1)..d {
                if table[i][j] != table[j][i] {
                    return Err(Error::InvalidAlgebra(format!(
                        "not commutative: {} * {} differs from {} * {}",
                        labels[i], labels[j], labels[j], labels[i]
                    )));
                }
            }
        }

        // Unitality: unit * e_j = e_j.
        for j in 0..d {
            let mut prod = vec![Scalar::zero(); d];
            for (i, u) in unit.iter().enumerate() {
                if u.is_zero() {
                    continue;
                }
                for (k, c) in table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        prod[k] += &(u * c);
                    }
                }
            }
            for (k, entry) in prod.iter().enumerate() {
                let expected = if k == j { Scalar::one() } else { Scalar::zero() };
                if *entry != expected {
                    return Err(Error::InvalidAlgebra(format!(
                        "claimed unit does not fix basis vector {}",
                        labels[j]
                    )));
                }
            }
        }

        // Associativity: (e_i e_j) e_k = e_i (e_j e_k), expanded through the table.
        let mul_vec_basis = |x: &[Scalar], k: usize, side_left: bool| -> Vec<Scalar> {
            let mut out = vec![Scalar::zero(); d];
            for (t, c) in x.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let row = if side_left { &table[t][k] } else { &table[k][t] };
                for (idx, s) in row.iter().enumerate() {
                    if !s.is_zero() {
                        out[idx] += &(c * s);
                    }
                }
            }
            out
        };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let left = mul_vec_basis(&table[i][j], k, true);
                    let right = mul_vec_basis(&table[j][k], i, false);
                    if left != right {
                        return Err(Error::InvalidAlgebra(format!(
                            "not associative at ({}, {}, {})",
                            labels[i], labels[j], labels[k]
                        )));
                    }
                }
            }
        }

        let rows = table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| {
                        v.into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .collect::<Vec<_>>()
                    })
                    .collect()
            })
            .collect();

        Ok(Arc::new(FinAlgebra {
            id: NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed),
            labels,
            rows,
            unit,
        }))
    }

    /// Dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Process-unique identity of this validated algebra.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Basis labels, in order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Sparse coordinates of the basis product `e_i · e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.rows[i][j]
    }

    /// Coordinates of the multiplicative unit.
    pub fn unit_coords(&self) -> &[Scalar] {
        &self.unit
    }
}

impl fmt::Debug for FinAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAlgebra(dim {}, basis {:?})", self.dim(), self.labels)
    }
}

/// Panics unless the two handles point at the same validated algebra.
fn require_same(a: &Arc<FinAlgebra>, b: &Arc<FinAlgebra>, what: &str) {
    assert_eq!(
        a.id(),
        b.id(),
        "{what}: operands belong to different algebras ({:?} vs {:?})",
        a,
        b
    );
}

// --- elements ------------------------------------------------------------------

/// An element of a [`FinAlgebra`], stored as a dense coordinate vector on the
/// distinguished basis.
#[derive(Clone)]
pub struct AlgElem {
    alg: Arc<FinAlgebra>,
    coords: Vec<Scalar>,
}

impl AlgElem {
    /// Element from explicit coordinates (length must match the dimension).
    pub fn from_coords(alg: &Arc<FinAlgebra>, coords: Vec<Scalar>) -> Self {
        assert_eq!(coords.len(), alg.dim(), "coordinate vector has wrong length");
        AlgElem { alg: Arc::clone(alg), coords }
    }

    /// The zero element.
    pub fn zero(alg: &Arc<FinAlgebra>) -> Self {
        AlgElem { alg: Arc::clone(alg), coords: vec![Scalar::zero(); alg.dim()] }
    }

    /// The `i`-th basis vector.
    pub fn basis(alg: &Arc<FinAlgebra>, i: usize) -> Self {
        let mut coords = vec![Scalar::zero(); alg.dim()];
        coords[i] = Scalar::one();
        AlgElem { alg: Arc::clone(alg), coords }
    }

    /// The multiplicative unit.
    pub fn unit(alg: &Arc<FinAlgebra>) -> Self {
        AlgElem { alg: Arc::clone(alg), coords: alg.unit_coords().to_vec() }
    }

    /// The owning algebra.
    pub fn algebra(&self) -> &Arc<FinAlgebra> {
        &self.alg
    }

    /// Coordinates on the distinguished basis.
    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    /// Sum of two elements of the same algebra.
    pub fn add(&self, other: &AlgElem) -> AlgElem {
        require_same(&self.alg, &other.alg, "element addition");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        AlgElem { alg: Arc::clone(&self.alg), coords }
    }

    /// Difference of two elements of the same algebra.
    pub fn sub(&self, other: &AlgElem) -> AlgElem {
        require_same(&self.alg, &other.alg, "element subtraction");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        AlgElem { alg: Arc::clone(&self.alg), coords }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Scalar) -> AlgElem {
        if c.is_zero() {
            return AlgElem::zero(&self.alg);
        }
        let coords = self.coords.iter().map(|a| a * c).collect();
        AlgElem { alg: Arc::clone(&self.alg), coords }
    }

    /// In-place `self += c · other`, the workhorse of every accumulation loop.
    pub fn add_scaled(&mut self, other: &AlgElem, c: &Scalar) {
        require_same(&self.alg, &other.alg, "element accumulation");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            if !b.is_zero() {
                *a += &(b * c);
            }
        }
    }

    /// Product in the algebra, expanded through the structure constants.
    pub fn mul(&self, other: &AlgElem) -> AlgElem {
        require_same(&self.alg, &other.alg, "element multiplication");
        let mut out = vec![Scalar::zero(); self.alg.dim()];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.alg.basis_product(i, j) {
                    out[*k] += &(&ab * c);
                }
            }
        }
        AlgElem { alg: Arc::clone(&self.alg), coords: out }
    }
}

impl PartialEq for AlgElem {
    fn eq(&self, other: &Self) -> bool {
        self.alg.id() == other.alg.id() && self.coords == other.coords
    }
}
impl Eq for AlgElem {}

impl fmt::Display for AlgElem {
    /// Renders nonzero terms as `c·label` joined by ` + `, e.g. `2·z1 + -1/2·z2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_one() {
                    self.alg.labels()[i].clone()
                } else {
                    format!("{}·{}", c, self.alg.labels()[i])
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// --- linear operators ----------------------------------------------------------

/// A linear operator on a [`FinAlgebra`], stored column-wise: `cols[j]` is the
/// coordinate vector of the image of the `j`-th basis vector.
#[derive(Clone)]
pub struct LinearOperator {
    alg: Arc<FinAlgebra>,
    cols: Vec<Vec<Scalar>>,
}

impl LinearOperator {
    /// Operator from basis images.
    pub fn from_columns(alg: &Arc<FinAlgebra>, cols: Vec<Vec<Scalar>>) -> Self {
        assert_eq!(cols.len(), alg.dim(), "operator must have one column per basis vector");
        for col in &cols {
            assert_eq!(col.len(), alg.dim(), "operator column has wrong length");
        }
        LinearOperator { alg: Arc::clone(alg), cols }
    }

    /// The zero operator.
    pub fn zero(alg: &Arc<FinAlgebra>) -> Self {
        let d = alg.dim();
        LinearOperator { alg: Arc::clone(alg), cols: vec![vec![Scalar::zero(); d]; d] }
    }

    /// The identity operator.
    pub fn identity(alg: &Arc<FinAlgebra>) -> Self {
        let d = alg.dim();
        let cols = (0..d)
            .map(|j| {
                let mut col = vec![Scalar::zero(); d];
                col[j] = Scalar::one();
                col
            })
            .collect();
        LinearOperator { alg: Arc::clone(alg), cols }
    }

    /// The owning algebra.
    pub fn algebra(&self) -> &Arc<FinAlgebra> {
        &self.alg
    }

    /// Image of the `j`-th basis vector.
    pub fn column(&self, j: usize) -> AlgElem {
        AlgElem::from_coords(&self.alg, self.cols[j].clone())
    }

    /// Applies the operator to an element.
    pub fn apply(&self, x: &AlgElem) -> AlgElem {
        require_same(&self.alg, &x.alg, "operator application");
        let mut out = AlgElem::zero(&self.alg);
        for (j, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, entry) in self.cols[j].iter().enumerate() {
                if !entry.is_zero() {
                    out.coords[k] += &(entry * c);
                }
            }
        }
        out
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LinearOperator) -> LinearOperator {
        require_same(&self.alg, &other.alg, "operator composition");
        let cols = (0..self.alg.dim())
            .map(|j| self.apply(&other.column(j)).coords)
            .collect();
        LinearOperator { alg: Arc::clone(&self.alg), cols }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &LinearOperator) -> LinearOperator {
        require_same(&self.alg, &other.alg, "operator addition");
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        LinearOperator { alg: Arc::clone(&self.alg), cols }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Scalar) -> LinearOperator {
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|x| x * c).collect())
            .collect();
        LinearOperator { alg: Arc::clone(&self.alg), cols }
    }
}

impl PartialEq for LinearOperator {
    fn eq(&self, other: &Self) -> bool {
        self.alg.id() == other.alg.id() && self.cols == other.cols
    }
}
impl Eq for LinearOperator {}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LinearOperator on {:?}:", self.alg)?;
        for j in 0..self.alg.dim() {
            writeln!(f, "  {} ↦ {}", self.alg.labels()[j], self.column(j))?;
        }
        Ok(())
    }
}

/// Evaluates a polynomial at an operator: `poly(op) = Σ_k coeffs[k] · op^k`,
/// with `op^0` the identity. An empty coefficient list gives the zero operator.
pub fn op_polynomial(op: &LinearOperator, coeffs: &[Scalar]) -> LinearOperator {
    let mut acc = LinearOperator::zero(&op.alg);
    let mut power = LinearOperator::identity(&op.alg);
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = op.compose(&power);
        }
        if !c.is_zero() {
            acc = acc.add(&power.scale(c));
        }
    }
    acc
}

// --- algebra homomorphisms -------------------------------------------------------

/// A validated homomorphism of unital algebras, stored column-wise like an
/// operator but allowed to change algebras.
pub struct AlgebraHom {
    src: Arc<FinAlgebra>,
    dst: Arc<FinAlgebra>,
    cols: Vec<Vec<Scalar>>,
}

impl AlgebraHom {
    /// Builds a homomorphism from basis images and verifies unitality
    /// (`φ(1) = 1`) and multiplicativity (`φ(e_i e_j) = φ(e_i) φ(e_j)`).
    pub fn new(src: &Arc<FinAlgebra>, dst: &Arc<FinAlgebra>, cols: Vec<Vec<Scalar>>) -> Result<Self> {
        if cols.len() != src.dim() || cols.iter().any(|c| c.len() != dst.dim()) {
            return Err(Error::NotAHomomorphism(format!(
                "map must have {} columns of length {}",
                src.dim(),
                dst.dim()
            )));
        }
        let hom = AlgebraHom { src: Arc::clone(src), dst: Arc::clone(dst), cols };
        let unit_src = AlgElem::unit(src);
        if hom.apply(&unit_src) != AlgElem::unit(dst) {
            return Err(Error::NotAHomomorphism("does not preserve the unit".into()));
        }
        for i in 0..src.dim() {
            for j in i..src.dim() {
                let lhs = hom.apply(&AlgElem::basis(src, i).mul(&AlgElem::basis(src, j)));
                let rhs = hom.apply(&AlgElem::basis(src, i)).mul(&hom.apply(&AlgElem::basis(src, j)));
                if lhs != rhs {
                    return Err(Error::NotAHomomorphism(format!(
                        "not multiplicative at basis pair ({}, {})",
                        src.labels()[i],
                        src.labels()[j]
                    )));
                }
            }
        }
        Ok(hom)
    }

    /// The identity homomorphism of an algebra.
    pub fn identity(alg: &Arc<FinAlgebra>) -> Self {
        let d = alg.dim();
        let cols = (0..d)
            .map(|j| {
                let mut col = vec![Scalar::zero(); d];
                col[j] = Scalar::one();
                col
            })
            .collect();
        AlgebraHom { src: Arc::clone(alg), dst: Arc::clone(alg), cols }
    }

    /// Source algebra.
    pub fn source(&self) -> &Arc<FinAlgebra> {
        &self.src
    }

    /// Target algebra.
    pub fn target(&self) -> &Arc<FinAlgebra> {
        &self.dst
    }

    /// Applies the homomorphism.
    pub fn apply(&self, x: &AlgElem) -> AlgElem {
        require_same(&self.src, &x.alg, "homomorphism application");
        let mut out = AlgElem::zero(&self.dst);
        for (j, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, entry) in self.cols[j].iter().enumerate() {
                if !entry.is_zero() {
                    out.coords[k] += &(entry * c);
                }
            }
        }
        out
    }
}

// --- constraint polynomials ------------------------------------------------------

/// The two-variable constraint `ω = x·y − (φ(x) + y·ψ(x))`, stored as the
/// coefficient lists of φ and ψ with trailing zeros trimmed.
///
/// Reading `x` as an operator `d` and `y` as an operator `Q`, the constraint
/// asserts the operator relation `d∘Q = φ(d) + Q∘ψ(d)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OmegaConstraint {
    phi: Vec<Scalar>,
    psi: Vec<Scalar>,
}

/// Drops trailing zero coefficients so the degree is canonical.
fn trim(mut v: Vec<Scalar>) -> Vec<Scalar> {
    while v.last().is_some_and(Scalar::is_zero) {
        v.pop();
    }
    v
}

impl OmegaConstraint {
    /// Constraint from coefficient lists `φ = Σ phi[i]·x^i`, `ψ = Σ psi[j]·x^j`.
    pub fn new(phi: Vec<Scalar>, psi: Vec<Scalar>) -> Self {
        OmegaConstraint { phi: trim(phi), psi: trim(psi) }
    }

    /// `ω = x·y` (φ = ψ = 0).
    pub fn xy() -> Self {
        OmegaConstraint { phi: vec![], psi: vec![] }
    }

    /// `ω = x·y − 1`, the fundamental-theorem constraint.
    pub fn fftc() -> Self {
        OmegaConstraint { phi: vec![Scalar::one()], psi: vec![] }
    }

    /// `ω = x·y − y·x`, the commutator constraint.
    pub fn commutator() -> Self {
        OmegaConstraint { phi: vec![], psi: vec![Scalar::zero(), Scalar::one()] }
    }

    /// Coefficients of φ (trailing zeros trimmed; empty = zero polynomial).
    pub fn phi(&self) -> &[Scalar] {
        &self.phi
    }

    /// Coefficients of ψ (trailing zeros trimmed; empty = zero polynomial).
    pub fn psi(&self) -> &[Scalar] {
        &self.psi
    }

    /// Degree of φ, `None` for the zero polynomial.
    pub fn deg_phi(&self) -> Option<usize> {
        self.phi.len().checked_sub(1)
    }

    /// Degree of ψ, `None` for the zero polynomial.
    pub fn deg_psi(&self) -> Option<usize> {
        self.psi.len().checked_sub(1)
    }

    /// Coefficient `a_i` of φ (zero beyond the stored degree).
    pub fn a(&self, i: usize) -> Scalar {
        self.phi.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient `b_j` of ψ (zero beyond the stored degree).
    pub fn b(&self, j: usize) -> Scalar {
        self.psi.get(j).cloned().unwrap_or_else(Scalar::zero)
    }
}

impl fmt::Display for OmegaConstraint {
    /// Canonical form, chosen so that parsing the output reproduces the
    /// constraint exactly:
    /// * `x*y` when φ = ψ = 0,
    /// * `x*y - c` for a bare positive constant φ = c with ψ = 0,
    /// * `x*y - y*x` for the commutator,
    /// * otherwise `x*y - (a0 + a1*x + … + b0*y + b1*y*x + …)` with zero
    ///   coefficients skipped and unit coefficients left implicit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phi.is_empty() && self.psi.is_empty() {
            return write!(f, "x*y");
        }
        if self.psi.is_empty() && self.phi.len() == 1 && self.phi[0] > Scalar::zero() {
            return write!(f, "x*y - {}", self.phi[0]);
        }
        if self.phi.is_empty() && self.psi.len() == 2 && self.psi[0].is_zero() && self.psi[1].is_one() {
            return write!(f, "x*y - y*x");
        }
        let mut parts: Vec<(Scalar, String)> = Vec::new();
        for (i, c) in self.phi.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            parts.push((c.clone(), var));
        }
        for (j, c) in self.psi.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = match j {
                0 => "y".into(),
                1 => "y*x".into(),
                _ => format!("y*x^{j}"),
            };
            parts.push((c.clone(), var));
        }
        let mut body = String::new();
        for (idx, (c, var)) in parts.iter().enumerate() {
            let mag = c.abs();
            let neg = *c < Scalar::zero();
            if idx == 0 {
                if neg {
                    body.push_str("- ");
                }
            } else {
                body.push_str(if neg { " - " } else { " + " });
            }
            if var.is_empty() {
                body.push_str(&mag.to_string());
            } else if mag.is_one() {
                body.push_str(var);
            } else {
                body.push_str(&format!("{mag}*{var}"));
            }
        }
        write!(f, "x*y - ({body})")
    }
}

impl fmt::Debug for OmegaConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// --- operator-law checks ---------------------------------------------------------

/// Where an operator-law check failed, with the exact defect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorDefect {
    /// The operator fails to annihilate the unit (differentials only);
    /// carries the image of 1.
    UnitImage(AlgElem),
    /// The law fails on the basis pair `(i, j)`; `defect` is oriented
    /// (left-hand side) − (right-hand side) of the displayed identity.
    BasisPair { i: usize, j: usize, defect: AlgElem },
}

/// Outcome of an exact operator-law check.
#[derive(Debug, Clone)]
pub struct OperatorCheck {
    /// True when the law holds on every basis pair (and on the unit, where required).
    pub holds: bool,
    /// First failure in row-major basis order, if any.
    pub witness: Option<OperatorDefect>,
}

impl OperatorCheck {
    fn pass() -> Self {
        OperatorCheck { holds: true, witness: None }
    }

    fn fail(witness: OperatorDefect) -> Self {
        OperatorCheck { holds: false, witness: Some(witness) }
    }
}

/// Checks the weight-λ Rota-Baxter law `P(x)P(y) = P(P(x)y) + P(xP(y)) + λP(xy)`
/// on all basis pairs, row-major; reports the first failing pair with defect
/// `P(e_i)P(e_j) − [P(P(e_i)e_j) + P(e_iP(e_j)) + λP(e_ie_j)]`.
pub fn is_rb_operator(p: &LinearOperator, lambda: &Scalar) -> OperatorCheck {
    let alg = p.algebra();
    let d = alg.dim();
    let images: Vec<AlgElem> = (0..d).map(|j| p.column(j)).collect();
    for i in 0..d {
        let ei = AlgElem::basis(alg, i);
        for j in 0..d {
            let ej = AlgElem::basis(alg, j);
            let lhs = images[i].mul(&images[j]);
            let mut rhs = p.apply(&images[i].mul(&ej));
            rhs = rhs.add(&p.apply(&ei.mul(&images[j])));
            if !lambda.is_zero() {
                rhs = rhs.add(&p.apply(&ei.mul(&ej)).scale(lambda));
            }
            let defect = lhs.sub(&rhs);
            if !defect.is_zero() {
                return OperatorCheck::fail(OperatorDefect::BasisPair { i, j, defect });
            }
        }
    }
    OperatorCheck::pass()
}

/// Checks that `d(1) = 0` and the weight-λ Leibniz law
/// `d(xy) = d(x)y + xd(y) + λd(x)d(y)` holds on all basis pairs, row-major;
/// reports the first failure with defect
/// `d(e_ie_j) − [d(e_i)e_j + e_id(e_j) + λd(e_i)d(e_j)]`.
pub fn is_diff_operator(d_op: &LinearOperator, lambda: &Scalar) -> OperatorCheck {
    let alg = d_op.algebra();
    let unit_image = d_op.apply(&AlgElem::unit(alg));
    if !unit_image.is_zero() {
        return OperatorCheck::fail(OperatorDefect::UnitImage(unit_image));
    }
    let d = alg.dim();
    let images: Vec<AlgElem> = (0..d).map(|j| d_op.column(j)).collect();
    for i in 0..d {
        let ei = AlgElem::basis(alg, i);
        for j in 0..d {
            let ej = AlgElem::basis(alg, j);
            let lhs = d_op.apply(&ei.mul(&ej));
            let mut rhs = images[i].mul(&ej);
            rhs = rhs.add(&ei.mul(&images[j]));
            if !lambda.is_zero() {
                rhs = rhs.add(&images[i].mul(&images[j]).scale(lambda));
            }
            let defect = lhs.sub(&rhs);
            if !defect.is_zero() {
                return OperatorCheck::fail(OperatorDefect::BasisPair { i, j, defect });
            }
        }
    }
    OperatorCheck::pass()
}

/// Does the operator pair `(d, q)` satisfy the constraint ω, i.e. does
/// `d∘q = φ(d) + q∘ψ(d)` hold as an exact identity of linear operators?
pub fn omega_holds(d: &LinearOperator, q: &LinearOperator, omega: &OmegaConstraint) -> bool {
    require_same(d.algebra(), q.algebra(), "constraint check");
    let lhs = d.compose(q);
    let rhs = op_polynomial(d, omega.phi()).add(&q.compose(&op_polynomial(d, omega.psi())));
    lhs == rhs
}

// --- stock algebras ---------------------------------------------------------------

/// The divided-power algebra of weight λ truncated at depth `m`: basis
/// `z0, …, z{m−1}` with `z0` the unit and
///
/// ```text
/// z_i · z_j = Σ_{l=0}^{min(i,j)} C(i+j−l, j) · C(j, l) · λ^l · z_{i+j−l}
/// ```
///
/// where terms with `i+j−l ≥ m` are cut off. At λ = 0 this is the classical
/// divided-power product `z_i z_j = C(i+j, i) z_{i+j}`.
pub fn divided_power_algebra(m: usize, lambda: &Scalar) -> Result<Arc<FinAlgebra>> {
    if m == 0 {
        return Err(Error::InvalidAlgebra("depth must be at least 1".into()));
    }
    let labels = (0..m).map(|i| format!("z{i}")).collect::<Vec<_>>();
    let mut table = vec![vec![vec![Scalar::zero(); m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            for l in 0..=i.min(j) {
                let target = i + j - l;
                if target >= m {
                    continue;
                }
                let mut c = binomial(i + j - l, j);
                c *= &binomial(j, l);
                c *= &lambda.pow(l);
                table[i][j][target] += &c;
            }
        }
    }
    let mut unit = vec![Scalar::zero(); m];
    unit[0] = Scalar::one();
    FinAlgebra::new(labels, table, unit)
}

/// The shift operator `z_i ↦ z_{i+1}` (with `z_{m−1} ↦ 0`) on a depth-`m`
/// divided-power algebra: a Rota-Baxter operator of the algebra's weight.
pub fn divided_power_shift(alg: &Arc<FinAlgebra>) -> LinearOperator {
    let m = alg.dim();
    let cols = (0..m)
        .map(|i| {
            let mut col = vec![Scalar::zero(); m];
            if i + 1 < m {
                col[i + 1] = Scalar::one();
            }
            col
        })
        .collect();
    LinearOperator::from_columns(alg, cols)
}

/// The downward shift `z_0 ↦ 0`, `z_n ↦ z_{n−1}` on a depth-`m` divided-power
/// algebra. On the *untruncated* algebra this is a weight-λ differential
/// inverting the shift; on the truncation it fails the Leibniz law at the
/// boundary, which several checks rely on as a negative example.
pub fn divided_power_down(alg: &Arc<FinAlgebra>) -> LinearOperator {
    let m = alg.dim();
    let cols = (0..m)
        .map(|i| {
            let mut col = vec![Scalar::zero(); m];
            if i > 0 {
                col[i - 1] = Scalar::one();
            }
            col
        })
        .collect();
    LinearOperator::from_columns(alg, cols)
}

/// The truncated polynomial algebra `k[t]/(t^n)`: basis `1, t, …, t^{n−1}`.
pub fn make_truncated_poly(n: usize) -> Result<Arc<FinAlgebra>> {
    if n == 0 {
        return Err(Error::InvalidAlgebra("truncation order must be at least 1".into()));
    }
    let labels = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        })
        .collect::<Vec<_>>();
    let mut table = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                table[i][j][i + j] = Scalar::one();
            }
        }
    }
    let mut unit = vec![Scalar::zero(); n];
    unit[0] = Scalar::one();
    FinAlgebra::new(labels, table, unit)
}

/// The derivation `t^k ↦ k·t^{k+1}` (i.e. `t ↦ t²` extended by Leibniz) on
/// `k[t]/(t^n)` — a weight-0 differential that is nilpotent, so all of its
/// polynomial expressions are exactly computable.
pub fn truncated_poly_derivation(alg: &Arc<FinAlgebra>) -> LinearOperator {
    let n = alg.dim();
    let cols = (0..n)
        .map(|k| {
            let mut col = vec![Scalar::zero(); n];
            if k >= 1 && k + 1 < n {
                col[k + 1] = Scalar::from_int(k as i64);
            }
            col
        })
        .collect();
    LinearOperator::from_columns(alg, cols)
}

/// The Euler-style operator `z_i ↦ i·z_i` on a depth-`m` divided-power
/// algebra: a genuine weight-0 differential on the truncation (diagonal, so no
/// boundary leakage), used wherever a *valid* differential is needed alongside
/// the shift.
pub fn divided_power_euler(alg: &Arc<FinAlgebra>) -> LinearOperator {
    let m = alg.dim();
    let cols = (0..m)
        .map(|i| {
            let mut col = vec![Scalar::zero(); m];
            if i > 0 {
                col[i] = Scalar::from_int(i as i64);
            }
            col
        })
        .collect();
    LinearOperator::from_columns(alg, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divided_power_product_weight_zero() {
        let alg = divided_power_algebra(5, &Scalar::zero()).unwrap();
        let z1 = AlgElem::basis(&alg, 1);
        let z2 = AlgElem::basis(&alg, 2);
        // z1·z2 = C(3,1)·z3 = 3·z3
        let expect = AlgElem::basis(&alg, 3).scale(&Scalar::from_int(3));
        assert_eq!(z1.mul(&z2), expect);
        // z2·z2 = C(4,2)·z4 = 6·z4
        let expect = AlgElem::basis(&alg, 4).scale(&Scalar::from_int(6));
        assert_eq!(z2.mul(&z2), expect);
    }

    #[test]
    fn divided_power_product_weight_lambda() {
        let lambda = Scalar::from_int(2);
        let alg = divided_power_algebra(4, &lambda).unwrap();
        // z1·z1 = 2·z2 + λ·z1
        let got = AlgElem::basis(&alg, 1).mul(&AlgElem::basis(&alg, 1));
        let expect = AlgElem::basis(&alg, 2)
            .scale(&Scalar::from_int(2))
            .add(&AlgElem::basis(&alg, 1).scale(&lambda));
        assert_eq!(got, expect);
    }

    #[test]
    fn invalid_table_rejected() {
        // A 2-dimensional "algebra" with a non-associative table: e1·e1 = e0,
        // but break commutativity so validation trips early.
        let labels = vec!["a".into(), "b".into()];
        let zero = Scalar::zero();
        let one = Scalar::one();
        let mut table = vec![vec![vec![zero.clone(); 2]; 2]; 2];
        table[0][0][0] = one.clone();
        table[0][1][1] = one.clone();
        table[1][0][0] = one.clone(); // ≠ table[0][1] — not commutative
        let unit = vec![one.clone(), zero.clone()];
        let err = FinAlgebra::new(labels, table, unit).unwrap_err();
        assert!(err.to_string().contains("not commutative"));
    }

    #[test]
    fn shift_is_rota_baxter_all_weights() {
        for lam in [Scalar::zero(), Scalar::one(), Scalar::from_int(-1), Scalar::from_int(2)] {
            let alg = divided_power_algebra(5, &lam).unwrap();
            let p = divided_power_shift(&alg);
            assert!(is_rb_operator(&p, &lam).holds, "shift fails at weight {lam}");
        }
    }

    #[test]
    fn euler_is_differential_at_weight_zero() {
        let alg = divided_power_algebra(4, &Scalar::zero()).unwrap();
        let d = divided_power_euler(&alg);
        assert!(is_diff_operator(&d, &Scalar::zero()).holds);
    }

    #[test]
    fn truncated_poly_derivation_is_differential() {
        for n in 2..=5 {
            let alg = make_truncated_poly(n).unwrap();
            let d = truncated_poly_derivation(&alg);
            assert!(is_diff_operator(&d, &Scalar::zero()).holds);
        }
    }

    #[test]
    fn omega_display_roundtrip_forms() {
        assert_eq!(OmegaConstraint::xy().to_string(), "x*y");
        assert_eq!(OmegaConstraint::fftc().to_string(), "x*y - 1");
        assert_eq!(OmegaConstraint::commutator().to_string(), "x*y - y*x");
        let w = OmegaConstraint::new(
            vec![Scalar::from_int(-2), Scalar::zero(), Scalar::one()],
            vec![Scalar::from_int(3)],
        );
        assert_eq!(w.to_string(), "x*y - (- 2 + x^2 + 3*y)");
    }

    #[test]
    fn omega_trims_trailing_zeros() {
        let w = OmegaConstraint::new(vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero()]);
        assert_eq!(w.deg_phi(), Some(0));
        assert_eq!(w.deg_psi(), None);
        assert_eq!(w, OmegaConstraint::fftc());
    }

    #[test]
    fn op_polynomial_constant_and_linear() {
        let alg = divided_power_algebra(3, &Scalar::zero()).unwrap();
        let p = divided_power_shift(&alg);
        // poly = 2 + x  evaluated at P: 2·id + P
        let q = op_polynomial(&p, &[Scalar::from_int(2), Scalar::one()]);
        let x = AlgElem::basis(&alg, 1);
        let expect = x.scale(&Scalar::from_int(2)).add(&AlgElem::basis(&alg, 2));
        assert_eq!(q.apply(&x), expect);
    }
}
