//! Scalar arithmetic over the exact rationals, prime fields GF(p) and `f64`.
//!
//! Public code talks in [`Scalar`] values tagged with their [`FieldKind`].
//! Dense kernels elsewhere in the crate use the crate-private [`Ring`] trait,
//! which works on untagged element types and is dispatched once per tensor.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Which field a scalar or tensor lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    /// Arbitrary-precision rationals.
    Rational,
    /// Integers modulo a prime `p < 2^64`.
    Prime(u64),
    /// IEEE doubles. Only for benchmarking; rank is refused.
    Float64,
}

/// Errors raised by scalar arithmetic and parsing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("field kind mismatch: {0} vs {1}")]
    KindMismatch(FieldKind, FieldKind),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("no element of order {order} in GF({modulus})")]
    NoRoot { modulus: u64, order: u64 },
    #[error("cannot parse {0:?} as a scalar or field")]
    Parse(String),
}

/// The four field operations accepted by [`arithmetic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element tagged with its field.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
    Float(f64),
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

fn reduce_i64(v: i64, p: u64) -> u64 {
    let r = (v as i128).rem_euclid(p as i128);
    r as u64
}

impl FieldKind {
    /// GF(p), checking that `p` is prime.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(FieldKind::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    /// The default exact DFT field GF(65537).
    pub const DFT_DEFAULT: FieldKind = FieldKind::Prime(65537);

    pub fn is_exact(self) -> bool {
        !matches!(self, FieldKind::Float64)
    }

    /// Characteristic of the field (0 for rationals and floats).
    pub fn characteristic(self) -> u64 {
        match self {
            FieldKind::Prime(p) => p,
            _ => 0,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    /// The image of an integer in this field.
    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            FieldKind::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldKind::Prime(p) => Scalar::Prime {
                value: reduce_i64(v, p),
                modulus: p,
            },
            FieldKind::Float64 => Scalar::Float(v as f64),
        }
    }

    /// Parses a scalar literal in this field.
    pub fn parse_scalar(self, text: &str) -> Result<Scalar, FieldError> {
        let bad = || FieldError::Parse(text.to_string());
        let text = text.trim();
        match self {
            FieldKind::Rational => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (text, "1"),
                };
                let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
            FieldKind::Prime(p) => {
                let v = BigInt::from_str(text).map_err(|_| bad())?;
                let r = ((v % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                Ok(Scalar::Prime {
                    value: r.to_u64().ok_or_else(bad)?,
                    modulus: p,
                })
            }
            FieldKind::Float64 => text.parse::<f64>().map(Scalar::Float).map_err(|_| bad()),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "rational"),
            FieldKind::Prime(p) => write!(f, "gf:{p}"),
            FieldKind::Float64 => write!(f, "f64"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = FieldError;

    /// Accepts `rational`, `gf:p` and `f64`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rational" | "q" | "Q" => Ok(FieldKind::Rational),
            "f64" | "float" => Ok(FieldKind::Float64),
            other => {
                let p = other
                    .strip_prefix("gf:")
                    .or_else(|| other.strip_prefix("GF:"))
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| FieldError::Parse(s.to_string()))?;
                FieldKind::prime(p)
            }
        }
    }
}

impl Serialize for FieldKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Scalar {
    pub fn kind(&self) -> FieldKind {
        match self {
            Scalar::Rational(_) => FieldKind::Rational,
            Scalar::Prime { modulus, .. } => FieldKind::Prime(*modulus),
            Scalar::Float(_) => FieldKind::Float64,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
            Scalar::Float(x) => *x == 1.0,
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), FieldError> {
        if self.kind() == other.kind() {
            Ok(())
        } else {
            Err(FieldError::KindMismatch(self.kind(), other.kind()))
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        arithmetic(self, other, ArithOp::Add)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        arithmetic(self, other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        arithmetic(self, other, ArithOp::Mul)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        arithmetic(self, other, ArithOp::Div)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: sub_mod(0, *value, *modulus),
                modulus: *modulus,
            },
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        self.kind().one().div(self)
    }

    /// `self^e` for a non-negative exponent.
    pub fn pow(&self, e: u64) -> Scalar {
        match self {
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: pow_mod(*value, e, *modulus),
                modulus: *modulus,
            },
            Scalar::Rational(r) => {
                let mut acc = BigRational::one();
                let mut base = r.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= &base;
                    }
                    base = &base * &base;
                    e >>= 1;
                }
                Scalar::Rational(acc)
            }
            Scalar::Float(x) => Scalar::Float(x.powf(e as f64)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// Applies `op` to two scalars of the same field.
pub fn arithmetic(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, FieldError> {
    a.check(b)?;
    Ok(match (a, b) {
        (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(match op {
            ArithOp::Add => x + y,
            ArithOp::Sub => x - y,
            ArithOp::Mul => x * y,
            ArithOp::Div => {
                if y.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                x / y
            }
        }),
        (Scalar::Prime { value: x, modulus }, Scalar::Prime { value: y, .. }) => {
            let p = *modulus;
            let value = match op {
                ArithOp::Add => add_mod(*x, *y, p),
                ArithOp::Sub => sub_mod(*x, *y, p),
                ArithOp::Mul => mul_mod(*x, *y, p),
                ArithOp::Div => mul_mod(*x, inv_mod(*y, p).ok_or(FieldError::DivisionByZero)?, p),
            };
            Scalar::Prime { value, modulus: p }
        }
        (Scalar::Float(x), Scalar::Float(y)) => Scalar::Float(match op {
            ArithOp::Add => x + y,
            ArithOp::Sub => x - y,
            ArithOp::Mul => x * y,
            ArithOp::Div => {
                if *y == 0.0 {
                    return Err(FieldError::DivisionByZero);
                }
                x / y
            }
        }),
        _ => unreachable!("kinds checked above"),
    })
}

/// The smallest residue of multiplicative order exactly `order` in GF(`modulus`).
///
/// `order` must be a power of two dividing `modulus - 1`.
pub fn primitive_root_of_unity(modulus: u64, order: u64) -> Result<Scalar, FieldError> {
    if !is_prime(modulus) {
        return Err(FieldError::NotPrime(modulus));
    }
    if order == 0 || !order.is_power_of_two() || (modulus - 1) % order != 0 {
        return Err(FieldError::NoRoot { modulus, order });
    }
    let found = (1..modulus).find(|&g| {
        pow_mod(g, order, modulus) == 1 && (order == 1 || pow_mod(g, order / 2, modulus) != 1)
    });
    match found {
        Some(value) => Ok(Scalar::Prime { value, modulus }),
        None => Err(FieldError::NoRoot { modulus, order }),
    }
}

/// Untagged arithmetic used by dense kernels.
pub(crate) trait Ring: Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn to_scalar(&self, a: &Self::Elem) -> Scalar;
    /// Unwraps a scalar already known to belong to this ring.
    fn from_scalar(&self, s: &Scalar) -> Self::Elem;

    fn add_assign(&self, acc: &mut Self::Elem, x: &Self::Elem) {
        *acc = self.add(acc, x);
    }
}

pub(crate) struct Rationals;
pub(crate) struct PrimeRing(pub u64);
pub(crate) struct Floats;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Rational(a.clone())
    }
    fn from_scalar(&self, s: &Scalar) -> BigRational {
        match s {
            Scalar::Rational(r) => r.clone(),
            other => panic!("expected a rational, got {other:?}"),
        }
    }
    fn add_assign(&self, acc: &mut BigRational, x: &BigRational) {
        *acc += x;
    }
}

impl Ring for PrimeRing {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.0)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.0)
    }
    fn to_scalar(&self, a: &u64) -> Scalar {
        Scalar::Prime {
            value: *a,
            modulus: self.0,
        }
    }
    fn from_scalar(&self, s: &Scalar) -> u64 {
        match s {
            Scalar::Prime { value, .. } => *value,
            other => panic!("expected a residue, got {other:?}"),
        }
    }
}

impl Ring for Floats {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn inv(&self, a: &f64) -> Option<f64> {
        (*a != 0.0).then(|| 1.0 / a)
    }
    fn to_scalar(&self, a: &f64) -> Scalar {
        Scalar::Float(*a)
    }
    fn from_scalar(&self, s: &Scalar) -> f64 {
        match s {
            Scalar::Float(x) => *x,
            other => panic!("expected a float, got {other:?}"),
        }
    }
}

/// Runs `$body` with `$r` bound to the ring implementation for `$kind`.
macro_rules! dispatch {
    ($kind:expr, $r:ident => $body:expr) => {
        match $kind {
            $crate::field::FieldKind::Rational => {
                let $r = &$crate::field::Rationals;
                $body
            }
            $crate::field::FieldKind::Prime(p) => {
                let $r = &$crate::field::PrimeRing(p);
                $body
            }
            $crate::field::FieldKind::Float64 => {
                let $r = &$crate::field::Floats;
                $body
            }
        }
    };
}
pub(crate) use dispatch;
