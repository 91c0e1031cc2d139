//! Exact rational arithmetic: square classes, primes, polynomials.
//!
//! A [`SquareClass`] is a nonzero rational modulo squares, stored as a
//! sign and a sorted set of distinct primes; the canonical representative
//! is their squarefree product. All the d_i, datum components a, and
//! discriminant values downstream live here.

mod poly;
mod primes;

pub use poly::IntPolynomial;
pub(crate) use primes::legendre_unchecked;
pub use primes::{factorize, is_prime, is_prime_u64, legendre, PrimeWalk};

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A nonzero rational modulo squares.
///
/// Two nonzero rationals r, s have the same class iff r/s is a square.
/// The canonical representative is sign * product of the primes, which
/// is squarefree by construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass {
    negative: bool,
    primes: Vec<BigUint>,
}

impl SquareClass {
    /// The class of 1.
    pub fn one() -> Self {
        SquareClass { negative: false, primes: Vec::new() }
    }

    /// The class of -1.
    pub fn minus_one() -> Self {
        SquareClass { negative: true, primes: Vec::new() }
    }

    /// The class of a nonzero integer.
    pub fn from_integer(n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::ZeroInput);
        }
        let negative = n.is_negative();
        let mag = n.magnitude().clone();
        let mut primes = Vec::new();
        for (p, e) in factorize(&mag)? {
            if e % 2 == 1 {
                primes.push(p);
            }
        }
        Ok(SquareClass { negative, primes })
    }

    /// The class of a nonzero rational; n/d and n*d land in the same class.
    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::ZeroInput);
        }
        Self::from_integer(&(r.numer() * r.denom()))
    }

    pub fn from_i64(n: i64) -> Result<Self> {
        Self::from_integer(&BigInt::from(n))
    }

    /// Product of classes: symmetric difference of prime sets, sign product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut primes = Vec::with_capacity(self.primes.len() + other.primes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.primes.len() && j < other.primes.len() {
            match self.primes[i].cmp(&other.primes[j]) {
                std::cmp::Ordering::Less => {
                    primes.push(self.primes[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    primes.push(other.primes[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        primes.extend_from_slice(&self.primes[i..]);
        primes.extend_from_slice(&other.primes[j..]);
        SquareClass { negative: self.negative ^ other.negative, primes }
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Sorted distinct primes of the squarefree representative.
    pub fn primes(&self) -> &[BigUint] {
        &self.primes
    }

    /// Valuation of the representative at p, as a parity bit.
    pub fn has_prime(&self, p: &BigUint) -> bool {
        self.primes.binary_search(p).is_ok()
    }

    /// The canonical squarefree representative.
    pub fn representative(&self) -> BigInt {
        let mut mag = BigUint::one();
        for p in &self.primes {
            mag *= p;
        }
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }

    /// Representative with the factor p removed (the unit part at p).
    pub fn unit_part(&self, p: &BigUint) -> BigInt {
        let mut mag = BigUint::one();
        for q in &self.primes {
            if q != p {
                mag *= q;
            }
        }
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }
}

/// The canonical squarefree class of a nonzero rational.
///
/// square_class(r * s^2) = square_class(r) for every nonzero rational s.
pub fn square_class(r: &BigRational) -> Result<SquareClass> {
    SquareClass::from_rational(r)
}

impl fmt::Debug for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SquareClass({})", self.representative())
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}
