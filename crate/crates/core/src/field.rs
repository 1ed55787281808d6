//! Exact scalar fields: the rationals and prime fields of odd characteristic.
//!
//! Heavy code is generic over [`Field`]. [`FieldSpec`] and [`FieldElement`]
//! are the runtime, type-erased counterparts used at API boundaries (the CLI,
//! certificates), and [`with_field!`](crate::with_field) bridges the two.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Image of a rational number; `None` when the denominator vanishes.
    fn from_rational(&self, r: &BigRational) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// A random element. Uniform over 𝔽p; over ℚ a small fraction.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// `a - c * b`, the elimination step.
    fn sub_mul(&self, a: &Self::Elem, c: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(c, b))
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }
}

/// The field ℚ with arbitrary-precision reduced fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(&self, r: &BigRational) -> Option<BigRational> {
        Some(r.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
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
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = if rng.gen_bool(0.25) { rng.gen_range(2..=5) } else { 1 };
        BigRational::new(num.into(), den.into())
    }
}

/// The prime field 𝔽p for an odd prime p below 2³¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        match FieldSpec::new(p)? {
            FieldSpec::Prime(p) => Ok(PrimeField { p }),
            FieldSpec::Rationals => Err(Error::InvalidCharacteristic(p)),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        v.mod_floor(&m).to_u64().expect("residue fits in u64")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn from_rational(&self, r: &BigRational) -> Option<u64> {
        let num = self.reduce_big(r.numer());
        let den = self.reduce_big(r.denom());
        self.inv(&den).map(|d| self.mul(&num, &d))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i64) as u64)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// Which field a computation runs over: ℚ (characteristic 0) or 𝔽p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// Characteristic 2 is refused, as are composites and primes that do not
    /// fit the single-word residue arithmetic.
    pub fn new(characteristic: u64) -> Result<Self> {
        match characteristic {
            0 => Ok(FieldSpec::Rationals),
            2 => Err(Error::CharacteristicTwo),
            p if !(2..1 << 31).contains(&p) || !is_prime(p) => Err(Error::InvalidCharacteristic(p)),
            p => Ok(FieldSpec::Prime(p)),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        match *self {
            FieldSpec::Rationals => FieldElement::Rational(Rationals.from_i64(v)),
            FieldSpec::Prime(p) => FieldElement::Residue {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<FieldElement> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let r = BigRational::new(num.into(), den.into());
        match *self {
            FieldSpec::Rationals => Ok(FieldElement::Rational(r)),
            FieldSpec::Prime(p) => PrimeField { p }
                .from_rational(&r)
                .map(|value| FieldElement::Residue { value, modulus: p })
                .ok_or(Error::DivisionByZero),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl TryFrom<u64> for FieldSpec {
    type Error = Error;
    fn try_from(c: u64) -> Result<Self> {
        FieldSpec::new(c)
    }
}

impl From<FieldSpec> for u64 {
    fn from(s: FieldSpec) -> u64 {
        s.characteristic()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Runs `$body` with `$f` bound to the concrete field selected by a
/// [`FieldSpec`].
#[macro_export]
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            $crate::field::FieldSpec::Rationals => {
                let $f = $crate::field::Rationals;
                $body
            }
            $crate::field::FieldSpec::Prime(p) => {
                let $f = $crate::field::PrimeField::new(p).expect("FieldSpec holds a valid prime");
                $body
            }
        }
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element tagged with its field, for type-erased arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl FieldElement {
    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldElement::Rational(_) => FieldSpec::Rationals,
            FieldElement::Residue { modulus, .. } => FieldSpec::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Residue { value, .. } => *value == 0,
        }
    }

    /// Exact arithmetic; both operands must come from the same field.
    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => {
                Ok(FieldElement::Rational(apply(&Rationals, a, b, op)?))
            }
            (
                FieldElement::Residue { value: a, modulus: p },
                FieldElement::Residue { value: b, modulus: q },
            ) if p == q => {
                let f = PrimeField { p: *p };
                Ok(FieldElement::Residue {
                    value: apply(&f, a, b, op)?,
                    modulus: *p,
                })
            }
            _ => Err(Error::MixedFields(
                self.spec().characteristic(),
                other.spec().characteristic(),
            )),
        }
    }

    /// Re-derives the canonical representative. Values built through this
    /// module are already canonical, so this is idempotent.
    pub fn normalized(&self) -> FieldElement {
        match self {
            FieldElement::Rational(r) => {
                FieldElement::Rational(BigRational::new(r.numer().clone(), r.denom().clone()))
            }
            FieldElement::Residue { value, modulus } => FieldElement::Residue {
                value: value % modulus,
                modulus: *modulus,
            },
        }
    }
}

fn apply<F: Field>(f: &F, a: &F::Elem, b: &F::Elem, op: ArithOp) -> Result<F::Elem> {
    Ok(match op {
        ArithOp::Add => f.add(a, b),
        ArithOp::Sub => f.sub(a, b),
        ArithOp::Mul => f.mul(a, b),
        ArithOp::Div => f.div(a, b).ok_or(Error::DivisionByZero)?,
    })
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses `a` or `a/b` with optional sign into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}
