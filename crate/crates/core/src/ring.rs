//! Commutative rings used by the hafnian routines.
//!
//! Two concrete rings are provided: arbitrary-precision integers
//! ([`BigInt`]) and sparse bivariate integer polynomials in the formal
//! symbols `a` and `b` ([`BiPoly`]). [`RingElement`] is a tagged union of
//! the two that promotes to a polynomial whenever an operand is symbolic.
//!
//! Every ring uses the convention `0^0 = 1` for powers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// A commutative ring with identity.
///
/// The arithmetic methods take references so that big-integer and
/// polynomial values are not cloned on every operation.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn from_int(v: &BigInt) -> Self;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;

    fn ring_neg(&self) -> Self {
        Self::ring_zero().ring_sub(self)
    }

    /// `self^exp` by repeated squaring; `x^0 = 1` for every `x`, zero included.
    fn ring_pow(&self, exp: u32) -> Self {
        let mut result = Self::ring_one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.ring_mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.ring_mul(&base);
            }
        }
        result
    }
}

impl Ring for BigInt {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn ring_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_int(v: &BigInt) -> Self {
        v.clone()
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
}

/// Counts scalar work performed by the instrumented formula evaluations.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    /// Ring additions, subtractions and multiplications.
    pub ring_ops: u64,
    /// Multiply/divide steps spent computing binomial coefficients.
    pub binomial_steps: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.ring_ops + self.binomial_steps
    }
}

/// Binomial coefficient `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    binomial_counted(n, k, &mut OpCounter::default())
}

pub(crate) fn binomial_counted(n: u64, k: i64, ops: &mut OpCounter) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        // exact at every step: acc is C(n, i) before, C(n, i + 1) after
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    ops.binomial_steps += k;
    acc
}

/// `C(n, k)` extended to negative `n` by zero.
pub(crate) fn binomial_signed(n: i64, k: i64, ops: &mut OpCounter) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    binomial_counted(n as u64, k, ops)
}

/// Number of perfect pairings of a `2k`-element set, `(2k)! / (k! 2^k) = (2k-1)!!`.
pub fn pairing_count(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(2 * j - 1))
}

/// `floor(x / 2)` with mathematical rounding for negative `x`.
pub(crate) fn floor_half(x: i64) -> i64 {
    x.div_euclid(2)
}

/// `ceil(x / 2)` with mathematical rounding for negative `x`.
pub(crate) fn ceil_half(x: i64) -> i64 {
    -(-x).div_euclid(2)
}

/// Sparse bivariate polynomial `sum c_ij a^i b^j` with integer coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c · a^i · b^j`.
    pub fn monomial(c: impl Into<BigInt>, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((i, j), c.into());
        p
    }

    /// The formal symbol `a`.
    pub fn a() -> Self {
        Self::monomial(1, 1, 0)
    }

    /// The formal symbol `b`.
    pub fn b() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `((deg_a, deg_b), coefficient)` in display order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (*e, c)).collect();
        v.sort_by(|x, y| display_order(x.0, y.0));
        v.into_iter()
    }

    /// The constant term when the polynomial has no symbolic part.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, exp: (u32, u32), c: BigInt) {
        if Zero::is_zero(&c) {
            return;
        }
        let slot = self.terms.entry(exp).or_default();
        *slot += c;
        if Zero::is_zero(slot) {
            self.terms.remove(&exp);
        }
    }

    /// Substitutes integer values for `a` and `b`.
    pub fn eval(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.terms.iter().fold(BigInt::zero(), |acc, ((i, j), c)| {
            acc + c * Ring::ring_pow(a, *i) * Ring::ring_pow(b, *j)
        })
    }
}

/// Graded lexicographic order, highest first: larger total degree, then larger degree in `a`.
fn display_order(x: (u32, u32), y: (u32, u32)) -> Ordering {
    (y.0 + y.1, y.0).cmp(&(x.0 + x.1, x.0))
}

/// Substitutes numeric values for the formal symbols of `p`.
pub fn poly_eval(p: &BiPoly, a: &BigInt, b: &BigInt) -> BigInt {
    p.eval(a, b)
}

impl<'a> Add<&'a BiPoly> for &'a BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BiPoly> for &'a BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a> Mul<&'a BiPoly> for &'a BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Ring for BiPoly {
    fn ring_zero() -> Self {
        BiPoly::zero()
    }
    fn ring_one() -> Self {
        BiPoly::constant(1)
    }
    fn ring_is_zero(&self) -> bool {
        BiPoly::is_zero(self)
    }
    fn from_int(v: &BigInt) -> Self {
        BiPoly::constant(v.clone())
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, ((i, j), c)) in self.terms().enumerate() {
            let mag = c.abs();
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let symbolic = i > 0 || j > 0;
            if !symbolic || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            for (sym, e) in [("a", i), ("b", j)] {
                match e {
                    0 => {}
                    1 => f.write_str(sym)?,
                    _ => write!(f, "{sym}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

/// Either an integer or a polynomial in `a`, `b`.
///
/// Integers embed into polynomials as constants; mixed arithmetic promotes
/// to [`RingElement::Poly`]. Equality compares values, so `Int(5)` equals
/// the constant polynomial `Poly(5)`.
#[derive(Clone, Debug)]
pub enum RingElement {
    Int(BigInt),
    Poly(BiPoly),
}

impl RingElement {
    pub fn to_poly(&self) -> BiPoly {
        match self {
            RingElement::Int(v) => BiPoly::constant(v.clone()),
            RingElement::Poly(p) => p.clone(),
        }
    }

    /// Integer value, if the element carries no symbols.
    pub fn to_int(&self) -> Option<BigInt> {
        match self {
            RingElement::Int(v) => Some(v.clone()),
            RingElement::Poly(p) => p.as_constant(),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        self.to_int().is_none()
    }

    fn combine(
        &self,
        rhs: &Self,
        int_op: impl Fn(&BigInt, &BigInt) -> BigInt,
        poly_op: impl Fn(&BiPoly, &BiPoly) -> BiPoly,
    ) -> Self {
        match (self, rhs) {
            (RingElement::Int(x), RingElement::Int(y)) => RingElement::Int(int_op(x, y)),
            _ => RingElement::Poly(poly_op(&self.to_poly(), &rhs.to_poly())),
        }
    }
}

impl From<BigInt> for RingElement {
    fn from(v: BigInt) -> Self {
        RingElement::Int(v)
    }
}

impl From<i64> for RingElement {
    fn from(v: i64) -> Self {
        RingElement::Int(BigInt::from(v))
    }
}

impl From<BiPoly> for RingElement {
    fn from(p: BiPoly) -> Self {
        RingElement::Poly(p)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (RingElement::Int(x), RingElement::Int(y)) => x == y,
            _ => self.to_poly() == other.to_poly(),
        }
    }
}

impl Eq for RingElement {}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Int(v) => write!(f, "{v}"),
            RingElement::Poly(p) => write!(f, "{p}"),
        }
    }
}

impl Ring for RingElement {
    fn ring_zero() -> Self {
        RingElement::Int(BigInt::zero())
    }
    fn ring_one() -> Self {
        RingElement::Int(BigInt::one())
    }
    fn ring_is_zero(&self) -> bool {
        match self {
            RingElement::Int(v) => Zero::is_zero(v),
            RingElement::Poly(p) => p.is_zero(),
        }
    }
    fn from_int(v: &BigInt) -> Self {
        RingElement::Int(v.clone())
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self.combine(rhs, |x, y| x + y, |x, y| x + y)
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, |x, y| x - y, |x, y| x - y)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self.combine(rhs, |x, y| x * y, |x, y| x * y)
    }
}
