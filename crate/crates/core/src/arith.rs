//! Exact scalars.
//!
//! Everything geometric or polynomial is carried in [`Q`] (big rationals).
//! Matrix work is generic over [`Field`] so the same assembly and elimination
//! code runs either over the rationals or over a 62-bit prime field.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a plain JSON integer rendered as text.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders as `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

/// Rescales a nonzero vector by a positive rational so that it becomes a
/// primitive integer vector. Direction and orientation are preserved.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Small random rational with numerator in `[-bound, bound]` and denominator in `[1, bound]`.
pub fn random_q<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Q {
    let n = rng.random_range(-bound..=bound);
    let d = rng.random_range(1..=bound);
    qr(n, d)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// A field the linear algebra can run over.
pub trait Field: Sync + Send {
    type Elem: Clone + PartialEq + Send + Sync + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn int(&self, v: i64) -> Self::Elem;
    /// `None` when the rational has no image (denominator divisible by the characteristic).
    fn image(&self, v: &Q) -> Option<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Q;

    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn int(&self, v: i64) -> Q {
        q(v)
    }
    fn image(&self, v: &Q) -> Option<Q> {
        Some(v.clone())
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn sub(&self, a: &Q, b: &Q) -> Q {
        a - b
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
    fn neg(&self, a: &Q) -> Q {
        -a
    }
    fn inv(&self, a: &Q) -> Option<Q> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
}

/// Integers modulo a prime below 2^63.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..1 << 63).contains(&p) || !primal_check::miller_rabin(p) {
            return Err(Error::Precondition(format!("{p} is not an odd prime below 2^63")));
        }
        Ok(Self { p })
    }

    /// A uniformly drawn prime in `[2^61, 2^62)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let cand = rng.random_range((1u64 << 61)..(1u64 << 62)) | 1;
            if primal_check::miller_rabin(cand) {
                return Self { p: cand };
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = v.mod_floor(&m);
        r.to_u64().expect("residue fits in u64")
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn int(&self, v: i64) -> u64 {
        let p = self.p as i128;
        ((v as i128).rem_euclid(p)) as u64
    }
    fn image(&self, v: &Q) -> Option<u64> {
        let n = self.reduce_big(v.numer());
        let d = self.reduce_big(v.denom());
        self.inv(&d).map(|id| self.mul(&n, &id))
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
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
        (*a != 0).then(|| self.pow(*a, self.p - 2))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Absolute value helper used when reporting determinant sizes.
pub fn bit_length(v: &Q) -> u64 {
    v.numer().abs().bits() + v.denom().bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "-3", "7/2", "-1/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("4/8").unwrap(), qr(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn primitive_keeps_direction() {
        let v = vec![qr(1, 2), qr(-3, 4), q(0)];
        assert_eq!(primitive(&v), vec![q(2), q(-3), q(0)]);
    }

    #[test]
    fn prime_field_inverse_and_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = PrimeField::random(&mut rng);
        assert!(f.modulus() >= 1 << 61 && f.modulus() < 1 << 62);
        let a = f.image(&qr(-5, 7)).unwrap();
        let seven = f.int(7);
        assert_eq!(f.mul(&a, &seven), f.int(-5));
        assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        assert!(PrimeField::new(15).is_err());
    }
}
