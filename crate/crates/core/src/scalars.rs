//! Exact scalar fields: arbitrary-precision rationals and prime fields `F_p`.
//!
//! Containers (tensors, matrices, binary forms) carry a [`FieldTag`] and store
//! [`Scalar`] values that belong to it. Mixing fields inside one arithmetic
//! operation is a programming error and panics; everything that accepts
//! outside input validates membership with [`FieldTag::contains`] first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exclusive upper bound on prime moduli, so products fit in `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Certification primes used when no override is given: `2^61 - 1` and the
/// next two primes below it.
pub const DEFAULT_PRIMES: [u64; 3] =
    [2_305_843_009_213_693_951, 2_305_843_009_213_693_921, 2_305_843_009_213_693_907];

/// Canonical rational number: positive denominator, reduced, zero is `0/1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    /// Smallest integer not below this value.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Image under the reduction map `Z_(p) -> F_p`.
    pub fn reduce_mod(&self, field: PrimeField) -> Result<u64> {
        let p = BigInt::from(field.modulus());
        let den = self.denominator().mod_floor(&p).to_u64().unwrap();
        if den == 0 {
            return Err(Error::BadPrime(field.modulus()));
        }
        let num = self.numerator().mod_floor(&p).to_u64().unwrap();
        Ok(field.mul(num, field.inv(den)?))
    }
}

/// Builds `n/d` in canonical form.
pub fn normalize(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Rational> {
    let d = d.into();
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational(BigRational::new(n.into(), d)))
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse =
            |t: &str| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad rational {s:?}")));
        match s.split_once('/') {
            Some((n, d)) => normalize(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
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

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
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

/// The first `k` certification primes: [`DEFAULT_PRIMES`], then further
/// primes searched downward from the last of them.
pub fn default_primes(k: usize) -> Vec<PrimeField> {
    let mut out: Vec<PrimeField> =
        DEFAULT_PRIMES.iter().take(k).map(|&p| PrimeField { modulus: p }).collect();
    let mut candidate = DEFAULT_PRIMES[2];
    while out.len() < k {
        candidate -= 2;
        if is_prime(candidate) {
            out.push(PrimeField { modulus: candidate });
        }
    }
    out
}

/// A validated prime modulus `2 <= p < 2^62`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus >= MAX_MODULUS || !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn element(self, value: i64) -> PrimeFieldElement {
        let p = self.modulus as i128;
        let v = (value as i128).rem_euclid(p) as u64;
        PrimeFieldElement { value: v, field: self }
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.modulus)
    }

    pub fn inv(self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.modulus) {
            return Err(Error::DivisionByZero);
        }
        Ok(pow_mod(a, self.modulus - 2, self.modulus))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PrimeFieldElement {
    value: u64,
    field: PrimeField,
}

impl PrimeFieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    fn with(self, value: u64) -> Self {
        PrimeFieldElement { value, field: self.field }
    }
}

/// Which field a container's scalars live in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FieldTag {
    Rationals,
    PrimeField(PrimeField),
}

impl FieldTag {
    pub fn prime(p: u64) -> Result<Self> {
        Ok(FieldTag::PrimeField(PrimeField::new(p)?))
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rational(Rational::from(n)),
            FieldTag::PrimeField(f) => Scalar::Prime(f.element(n)),
        }
    }

    /// Maps a rational into this field (reduction mod p for prime fields).
    pub fn from_rational(self, r: &Rational) -> Result<Scalar> {
        match self {
            FieldTag::Rationals => Ok(Scalar::Rational(r.clone())),
            FieldTag::PrimeField(f) => {
                Ok(Scalar::Prime(PrimeFieldElement { value: r.reduce_mod(f)?, field: f }))
            }
        }
    }

    pub fn contains(self, x: &Scalar) -> bool {
        match (self, x) {
            (FieldTag::Rationals, Scalar::Rational(_)) => true,
            (FieldTag::PrimeField(f), Scalar::Prime(e)) => e.field == f,
            _ => false,
        }
    }

    /// Parses a serialized scalar; prime-field values may be any integer
    /// (or rational with invertible denominator) and are reduced.
    pub fn parse_scalar(self, s: &str) -> Result<Scalar> {
        self.from_rational(&s.parse::<Rational>()?)
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => write!(f, "Q"),
            FieldTag::PrimeField(p) => write!(f, "Fp:{}", p.modulus),
        }
    }
}

impl FromStr for FieldTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldTag::Rationals);
        }
        match s.strip_prefix("Fp:") {
            Some(p) => FieldTag::prime(
                p.parse().map_err(|_| Error::Parse(format!("bad modulus in field tag {s:?}")))?,
            ),
            None => Err(Error::Parse(format!("unknown field tag {s:?}"))),
        }
    }
}

impl Serialize for FieldTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of some exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    Prime(PrimeFieldElement),
}

impl Scalar {
    pub fn field(&self) -> FieldTag {
        match self {
            Scalar::Rational(_) => FieldTag::Rationals,
            Scalar::Prime(e) => FieldTag::PrimeField(e.field),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime(e) => e.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.as_big_rational().is_one(),
            Scalar::Prime(e) => e.value == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Prime(_) => None,
        }
    }

    /// Integer-valued: a rational with denominator 1. Prime-field elements are
    /// never called integers here.
    pub fn is_integer(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_integer())
    }

    pub fn inverse(&self) -> Result<Scalar> {
        field_inverse(self)
    }

    /// True when the value is `-1` in its field.
    pub fn is_minus_one(&self) -> bool {
        (-self).is_one()
    }

    pub fn abs_rational(&self) -> Option<Rational> {
        self.as_rational().map(|r| Rational(r.0.abs()))
    }
}

pub fn field_inverse(x: &Scalar) -> Result<Scalar> {
    match x {
        Scalar::Rational(r) => Ok(Scalar::Rational(r.inverse()?)),
        Scalar::Prime(e) => Ok(Scalar::Prime(e.with(e.field.inv(e.value)?))),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Prime(e) => write!(f, "{}", e.value),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Prime(e) => write!(f, "{} (mod {})", e.value, e.field.modulus),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime(a), Scalar::Prime(b)) if a.field == b.field => {
                Scalar::Prime(a.with(a.field.add(a.value, b.value)))
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime(a), Scalar::Prime(b)) if a.field == b.field => {
                Scalar::Prime(a.with(a.field.mul(a.value, b.value)))
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime(a) => Scalar::Prime(a.with(a.field.neg(a.value))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        normalize(n, d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(q(2, -4).to_string(), "-1/2");
        let z = q(0, 7);
        assert_eq!(z.numerator(), &BigInt::from(0));
        assert_eq!(z.denominator(), &BigInt::from(1));
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(q(6, 3).denominator(), &BigInt::from(1));
        assert_eq!(normalize(1, 0), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_examples() {
        let three_quarters = Scalar::Rational(q(3, 4));
        assert_eq!(field_inverse(&three_quarters).unwrap(), Scalar::Rational(q(4, 3)));

        let f5 = PrimeField::new(5).unwrap();
        let two = Scalar::Prime(f5.element(2));
        assert_eq!(field_inverse(&two).unwrap(), Scalar::Prime(f5.element(3)));

        for field in
            [FieldTag::Rationals, FieldTag::prime(7).unwrap(), FieldTag::prime(DEFAULT_PRIMES[0]).unwrap()]
        {
            assert_eq!(field_inverse(&field.one()).unwrap(), field.one());
            assert_eq!(field_inverse(&field.zero()), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn serialization() {
        assert_eq!("4/6".parse::<Rational>().unwrap().to_string(), "2/3");
        assert_eq!("-5".parse::<Rational>().unwrap().to_string(), "-5");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!("Fp:65521".parse::<FieldTag>().unwrap().to_string(), "Fp:65521");
        assert_eq!("Q".parse::<FieldTag>().unwrap(), FieldTag::Rationals);
        assert_eq!("Fp:65520".parse::<FieldTag>(), Err(Error::NotPrime(65520)));
        let f = FieldTag::prime(7).unwrap();
        assert_eq!(f.parse_scalar("-1").unwrap().to_string(), "6");
        assert_eq!(f.parse_scalar("1/2").unwrap().to_string(), "4");
    }

    #[test]
    fn primes() {
        for p in DEFAULT_PRIMES {
            assert!(is_prime(p));
            assert!(p < MAX_MODULUS);
        }
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(!is_prime(561));
        assert!(!is_prime(DEFAULT_PRIMES[0] - 2));
        let five = default_primes(5);
        assert_eq!(five.len(), 5);
        assert!(five[4].modulus() < five[3].modulus());
        assert!(PrimeField::new(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn reduction_rejects_bad_denominator() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(q(1, 10).reduce_mod(f), Err(Error::BadPrime(5)));
        assert_eq!(q(1, 3).reduce_mod(f), Ok(2));
    }

    fn small_q() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    fn check_axioms(a: &Scalar, b: &Scalar, c: &Scalar) {
        assert_eq!(&(a + b) + c, a + &(b + c));
        assert_eq!(&(a * b) * c, a * &(b * c));
        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        assert_eq!(a + b, b + a);
        assert_eq!(a * b, b * a);
        assert!((a + &-a).is_zero());
        assert_eq!(a - b, a + &-b);
        if !a.is_zero() {
            assert!((a * &field_inverse(a).unwrap()).is_one());
        }
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in small_q(), b in small_q(), c in small_q()) {
            check_axioms(&Scalar::Rational(a), &Scalar::Rational(b), &Scalar::Rational(c));
        }

        #[test]
        fn prime_field_axioms(a in any::<i64>(), b in any::<i64>(), c in any::<i64>(), which in 0usize..4) {
            let p = [2u64, 65521, DEFAULT_PRIMES[0], DEFAULT_PRIMES[2]][which];
            let f = FieldTag::prime(p).unwrap();
            check_axioms(&f.from_i64(a), &f.from_i64(b), &f.from_i64(c));
        }

        #[test]
        fn reduction_is_ring_homomorphism(a in -1_000_000_000i64..1_000_000_000, b in -1_000_000_000i64..1_000_000_000) {
            let f = FieldTag::prime(DEFAULT_PRIMES[1]).unwrap();
            let (ra, rb) = (Rational::from(a), Rational::from(b));
            let red = |r: &Rational| f.from_rational(r).unwrap();
            prop_assert_eq!(red(&(&ra + &rb)), &red(&ra) + &red(&rb));
            prop_assert_eq!(red(&(&ra * &rb)), &red(&ra) * &red(&rb));
        }
    }
}
