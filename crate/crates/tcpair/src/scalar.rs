//! Coefficient fields for the ring engine.
//!
//! Fields are small value objects that know how to operate on their
//! elements, in the style of ring-object libraries: `Rationals` works on
//! exact `BigRational` values, `PrimeField` on `u64` residues. All ring,
//! cup-length, and bound computations are generic over [`Field`].

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Parse a rational literal such as `3`, `-2`, `1/2` or `-7/3`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => {
            let n = BigInt::from_str(s).ok()?;
            Some(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n = BigInt::from_str(num.trim()).ok()?;
            let d = BigInt::from_str(den.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
    }
}

/// Runtime description of a coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSpec {
    Q,
    F2,
    Fp(u64),
}

impl FieldSpec {
    pub fn parse(s: &str) -> Option<FieldSpec> {
        match s.trim() {
            "Q" => Some(FieldSpec::Q),
            "F2" => Some(FieldSpec::F2),
            other => {
                let p = other.strip_prefix("Fp:")?.parse::<u64>().ok()?;
                if p == 2 {
                    Some(FieldSpec::F2)
                } else if is_prime(p) {
                    Some(FieldSpec::Fp(p))
                } else {
                    None
                }
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Q => 0,
            FieldSpec::F2 => 2,
            FieldSpec::Fp(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Q => write!(f, "Q"),
            FieldSpec::F2 => write!(f, "F2"),
            FieldSpec::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A coefficient field, presented as an object operating on plain elements.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn characteristic(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Maps an exact rational into the field; `None` if the denominator
    /// vanishes in the field's characteristic.
    fn from_rational(&self, q: &Rational) -> Option<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Canonical textual form, used for JSON coefficients.
    fn render(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Option<Self::Elem> {
        self.from_rational(&parse_rational(s)?)
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        Some(self.mul(a, &self.inv(b)?))
    }

    fn sign_elem(&self, negative: bool) -> Self::Elem {
        if negative {
            self.from_i64(-1)
        } else {
            self.one()
        }
    }
}

/// The field of rational numbers with exact big-integer arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Q
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_rational(&self, q: &Rational) -> Option<BigRational> {
        Some(q.clone())
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

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// The prime field `F_p` with elements stored as reduced `u64` residues.
///
/// `PrimeField::new(2)` is the `F2` used for real projective pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Panics if `p` is not prime; construction from user input goes
    /// through [`FieldSpec::parse`], which rejects composites first.
    pub fn new(p: u64) -> PrimeField {
        assert!(is_prime(p), "modulus {p} is not prime");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        let (_, digits) = r.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        if self.p == 2 {
            FieldSpec::F2
        } else {
            FieldSpec::Fp(self.p)
        }
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn from_i64(&self, n: i64) -> u64 {
        let r = n.rem_euclid(self.p as i64);
        r as u64
    }

    fn from_rational(&self, q: &Rational) -> Option<u64> {
        let num = self.reduce_bigint(q.numer());
        let den = self.reduce_bigint(q.denom());
        let den_inv = self.inv(&den)?;
        Some(self.mul(&num, &den_inv))
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
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
        // Fermat: a^(p-2) mod p.
        let mut base = *a;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        Some(acc)
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), Rationals.from_i64(3));
        assert_eq!(
            parse_rational("1/2").unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
        assert_eq!(
            parse_rational("-7/3").unwrap(),
            BigRational::new(BigInt::from(-7), BigInt::from(3))
        );
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn field_spec_roundtrip() {
        assert_eq!(FieldSpec::parse("Q"), Some(FieldSpec::Q));
        assert_eq!(FieldSpec::parse("F2"), Some(FieldSpec::F2));
        assert_eq!(FieldSpec::parse("Fp:5"), Some(FieldSpec::Fp(5)));
        assert_eq!(FieldSpec::parse("Fp:2"), Some(FieldSpec::F2));
        assert_eq!(FieldSpec::parse("Fp:6"), None);
        assert_eq!(FieldSpec::Fp(7).to_string(), "Fp:7");
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = PrimeField::new(5);
        assert_eq!(f5.add(&3, &4), 2);
        assert_eq!(f5.mul(&3, &4), 2);
        assert_eq!(f5.inv(&3), Some(2));
        assert_eq!(f5.inv(&0), None);
        assert_eq!(f5.from_i64(-1), 4);
        // 1/2 = 3 mod 5
        let half = parse_rational("1/2").unwrap();
        assert_eq!(f5.from_rational(&half), Some(3));
        // denominators divisible by p are rejected
        let f2 = PrimeField::new(2);
        assert_eq!(f2.from_rational(&half), None);
    }
}
