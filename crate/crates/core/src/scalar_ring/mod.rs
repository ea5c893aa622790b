//! Coefficient rings: high-precision complex numbers, exact rational
//! functions in (q, t, c, d), Laurent polynomials and truncated p-series.

mod hp;
mod laurent;
pub mod poly;
mod ratfn;
mod series;

use rug::Integer;
use thiserror::Error;

pub use hp::{HPComplex, HPComplexJson, DEFAULT_PRECISION, MIN_PRECISION};
pub use laurent::{LaurentPoly, Mono, MAX_VARS};
pub use poly::{IntPoly, Var};
pub use ratfn::RationalFn;
pub use series::PSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("constant term of the series is not invertible")]
    NotInvertible,
    #[error("series order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
}

/// Commutative ring with an element-carried context (precision for
/// `HPComplex`, variable count for `LaurentPoly`).
///
/// Series and polynomial containers are generic over this trait, so mixing
/// coefficient worlds is rejected at compile time.
pub trait Ring: Clone + std::fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_int_like(&self, v: &Integer) -> Self;
    fn from_i64_like(&self, v: i64) -> Self {
        self.from_int_like(&Integer::from(v))
    }
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        self.minus(&self.one_like()).is_zero()
    }
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    /// Multiplicative inverse when one exists in the ring.
    fn inverse(&self) -> Option<Self>;

    /// Zero test relative to `scale`; exact rings use `is_zero`.
    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    /// log2 of a size measure, used to pick a scale among numeric coefficients.
    fn magnitude_log2(&self) -> f64 {
        0.0
    }

    fn pow_i(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = self.one_like();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.times(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.times(&b);
            }
        }
        Some(acc)
    }

    fn div_int(&self, d: i64) -> Option<Self> {
        self.from_i64_like(d).inverse().map(|i| self.times(&i))
    }
}

/// Ring in which every nonzero element is invertible.
pub trait Field: Ring {
    fn divide(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|i| self.times(&i))
    }
}

/// Values of the parameters (q, t) in a field, with cached powers.
///
/// Every q/t dependent coefficient in the symbolic layers is produced through
/// this type, so the same code runs over ℚ(q,t) and at numeric (q, t).
#[derive(Clone, Debug)]
pub struct QtField<F: Field> {
    pub q: F,
    pub t: F,
}

impl QtField<RationalFn> {
    pub fn symbolic() -> Self {
        QtField { q: RationalFn::q(), t: RationalFn::t() }
    }
}

impl QtField<HPComplex> {
    pub fn numeric(q: HPComplex, t: HPComplex) -> Self {
        QtField { q, t }
    }
}

impl<F: Field> QtField<F> {
    pub fn one(&self) -> F {
        self.q.one_like()
    }

    pub fn zero(&self) -> F {
        self.q.zero_like()
    }

    pub fn int(&self, v: i64) -> F {
        self.q.from_i64_like(v)
    }

    /// q^a t^b.
    pub fn mono(&self, a: i64, b: i64) -> F {
        let x = self.q.pow_i(a).expect("q invertible");
        let y = self.t.pow_i(b).expect("t invertible");
        x.times(&y)
    }

    /// Maps an exact rational function in q, t into this field.
    pub fn eval(&self, r: &RationalFn) -> Option<F> {
        let one = self.one();
        let vals = [self.q.clone(), self.t.clone(), self.zero(), self.zero()];
        r.eval(&vals, &one)
    }
}
