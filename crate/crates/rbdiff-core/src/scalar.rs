//! Exact scalar arithmetic.
//!
//! Every number in the engine is a [`Scalar`]: an arbitrary-precision rational
//! kept in lowest terms with positive denominator. There is no floating point
//! anywhere; equality of scalars is therefore decidable and is used as-is by
//! every checker. Binomial coefficients come from a process-wide memoized
//! Pascal triangle, so C(n, k) costs one table lookup after first use.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational scalar (reduced, positive denominator — canonical form
/// is maintained by the underlying rational type on every operation).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigRational);

impl Scalar {
    /// Additive identity.
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    /// Multiplicative identity.
    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    /// The integer `n` as a scalar.
    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// The fraction `num / den`. Errors on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Scalar(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Exact test against 1.
    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `self^exp` by repeated multiplication (exponents here are tiny).
    pub fn pow(&self, exp: usize) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc *= self;
        }
        acc
    }

    /// Numerator (in lowest terms, sign carried here).
    pub fn numer(&self) -> BigInt {
        self.0.numer().clone()
    }

    /// Denominator (in lowest terms, always positive).
    pub fn denom(&self) -> BigInt {
        self.0.denom().clone()
    }

    /// True when the scalar is a (possibly negative) integer.
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Absolute value.
    pub fn abs(&self) -> Scalar {
        Scalar(self.0.abs())
    }
}

/// Binomial coefficient C(n, k) as a scalar, from a process-wide Pascal table.
/// Returns 0 when `k > n`, matching the combinatorial convention used by the
/// sequence-product formulas.
pub fn binomial(n: usize, k: usize) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    static PASCAL: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();
    let table = PASCAL.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]));
    let mut rows = table.lock().expect("pascal table poisoned");
    while rows.len() <= n {
        let prev = rows.last().expect("pascal table never empty");
        let mut row = Vec::with_capacity(prev.len() + 1);
        row.push(BigInt::one());
        for w in prev.windows(2) {
            row.push(&w[0] + &w[1]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    Scalar(BigRational::from_integer(rows[n][k].clone()))
}

// --- operator plumbing -------------------------------------------------------

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 + &rhs.0)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 - &rhs.0)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 * &rhs.0)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl fmt::Display for Scalar {
    /// `p` for integers, `p/q` otherwise (q > 0, fraction reduced).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `p` or `p/q` with an optional leading sign, e.g. `-3`, `7/2`, `-1/4`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num = BigInt::from_str(num_str)
            .map_err(|_| Error::InvalidInput(format!("bad integer `{num_str}` in scalar `{s}`")))?;
        let den = match den_str {
            Some(d) => BigInt::from_str(d)
                .map_err(|_| Error::InvalidInput(format!("bad integer `{d}` in scalar `{s}`")))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in scalar `{s}`")));
        }
        Ok(Scalar(BigRational::new(num, den)))
    }
}
