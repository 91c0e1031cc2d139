//! Places of Q, local square classes and Hilbert-symbol invariants.
//!
//! The local square-class group Q_v^x / Q_v^x2 is an F_2 vector space of
//! dimension 1 at the real place (sign), 2 at an odd prime (non-residue
//! unit, uniformizer) and 3 at p = 2 (valuation parity plus the unit
//! class mod 8 split into a (-1)-bit and a 5-bit). Hilbert symbols are
//! evaluated by the standard closed forms; the bounded modular search
//! used to cross-check them lives in test code only.

use crate::arith::{is_prime, SquareClass};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A place of Q: the archimedean place or a finite prime.
///
/// Total order: inf < 2 < 3 < 5 < ...
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Infinite,
    Finite(BigUint),
}

impl Place {
    /// A finite place; the primality of p is verified.
    pub fn finite(p: BigUint) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Place::Finite(p))
    }

    /// Finite place from a prime already proven elsewhere.
    pub(crate) fn finite_unchecked(p: BigUint) -> Self {
        debug_assert!(is_prime(&p));
        Place::Finite(p)
    }

    pub fn finite_u64(p: u64) -> Result<Self> {
        Self::finite(BigUint::from(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Place::Finite(p) if p == &BigUint::from(2u32))
    }

    pub fn prime(&self) -> Option<&BigUint> {
        match self {
            Place::Infinite => None,
            Place::Finite(p) => Some(p),
        }
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinite, Place::Infinite) => Ordering::Equal,
            (Place::Infinite, Place::Finite(_)) => Ordering::Less,
            (Place::Finite(_), Place::Infinite) => Ordering::Greater,
            (Place::Finite(p), Place::Finite(q)) => p.cmp(q),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Place({self})")
    }
}

impl FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(Place::Infinite);
        }
        let p = BigUint::from_str(s)
            .map_err(|_| Error::NotPrime(s.to_string()))?;
        Place::finite(p)
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of the order-2 subgroup {0, 1/2} of Q/Z.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BrauerInvariant(bool);

impl BrauerInvariant {
    pub const ZERO: Self = BrauerInvariant(false);
    pub const HALF: Self = BrauerInvariant(true);

    pub fn is_zero(self) -> bool {
        !self.0
    }

    pub fn from_bool(half: bool) -> Self {
        BrauerInvariant(half)
    }
}

impl std::ops::Add for BrauerInvariant {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        BrauerInvariant(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for BrauerInvariant {
    fn add_assign(&mut self, rhs: Self) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for BrauerInvariant {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(BrauerInvariant::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for BrauerInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { "1/2" } else { "0" })
    }
}

impl fmt::Debug for BrauerInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for BrauerInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(if self.0 { "1/2" } else { "0" })
    }
}

impl<'de> Deserialize<'de> for BrauerInvariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "0" => Ok(BrauerInvariant::ZERO),
            "1/2" => Ok(BrauerInvariant::HALF),
            other => Err(serde::de::Error::custom(format!(
                "invariant must be \"0\" or \"1/2\", got {other:?}"
            ))),
        }
    }
}

/// Image of a square class in the F_2 space Q_v^x / Q_v^x2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LocalSquareClassVector {
    dim: u8,
    bits: u8,
}

impl LocalSquareClassVector {
    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Zero iff the represented rational is a square in Q_v.
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        LocalSquareClassVector { dim: self.dim, bits: self.bits ^ other.bits }
    }

    pub fn coords(&self) -> Vec<bool> {
        (0..self.dim).map(|i| self.bits >> i & 1 == 1).collect()
    }
}

fn mod8(n: &BigInt) -> u8 {
    let r = n.mod_floor(&BigInt::from(8));
    *r.to_u64_digits().1.first().unwrap_or(&0) as u8
}

/// The (-1)-exponent of an odd residue mod 8 written as (-1)^a * 5^b.
fn dyadic_minus_bit(u_mod8: u8) -> bool {
    u_mod8 == 3 || u_mod8 == 7
}

/// The 5-exponent of an odd residue mod 8 written as (-1)^a * 5^b.
fn dyadic_five_bit(u_mod8: u8) -> bool {
    u_mod8 == 3 || u_mod8 == 5
}

/// Image of c in Q_v^x / Q_v^x2.
pub fn local_vector(c: &SquareClass, v: &Place) -> LocalSquareClassVector {
    match v {
        Place::Infinite => LocalSquareClassVector {
            dim: 1,
            bits: c.is_negative() as u8,
        },
        Place::Finite(p) if v.is_dyadic() => {
            let val = c.has_prime(p);
            let u = mod8(&c.unit_part(p));
            let bits = (val as u8)
                | (dyadic_minus_bit(u) as u8) << 1
                | (dyadic_five_bit(u) as u8) << 2;
            LocalSquareClassVector { dim: 3, bits }
        }
        Place::Finite(p) => {
            let nonresidue =
                crate::arith::legendre_unchecked(&c.unit_part(p), p) == -1;
            let val = c.has_prime(p);
            LocalSquareClassVector {
                dim: 2,
                bits: (nonresidue as u8) | (val as u8) << 1,
            }
        }
    }
}

/// An F_2 subspace of the local square-class space, kept in reduced form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSubspace {
    dim: u8,
    basis: Vec<u8>,
}

impl LocalSubspace {
    pub fn zero(dim: u8) -> Self {
        LocalSubspace { dim, basis: Vec::new() }
    }

    pub fn span(vectors: &[LocalSquareClassVector]) -> Self {
        let dim = vectors.first().map(|v| v.dim).unwrap_or(0);
        let mut space = LocalSubspace::zero(dim);
        for v in vectors {
            space.insert(v);
        }
        space
    }

    /// Insert a vector; returns true if the rank grew.
    pub fn insert(&mut self, v: &LocalSquareClassVector) -> bool {
        debug_assert!(self.dim == 0 || v.dim == self.dim);
        self.dim = v.dim;
        let mut x = v.bits;
        for b in &self.basis {
            let lead = 1 << (7 - b.leading_zeros());
            if x & lead != 0 {
                x ^= b;
            }
        }
        if x == 0 {
            return false;
        }
        self.basis.push(x);
        self.basis.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn contains(&self, v: &LocalSquareClassVector) -> bool {
        let mut x = v.bits;
        for b in &self.basis {
            let lead = 1 << (7 - b.leading_zeros());
            if x & lead != 0 {
                x ^= b;
            }
        }
        x == 0
    }

    pub fn rank(&self) -> u32 {
        self.basis.len() as u32
    }
}

/// Hilbert-symbol invariant of the quaternion class (a, b) over Q_v:
/// 0 iff a x^2 + b y^2 = z^2 has a nontrivial solution over Q_v.
pub fn hilbert_inv(a: &SquareClass, b: &SquareClass, v: &Place) -> BrauerInvariant {
    match v {
        Place::Infinite => {
            BrauerInvariant::from_bool(a.is_negative() && b.is_negative())
        }
        Place::Finite(p) if v.is_dyadic() => {
            let alpha = a.has_prime(p);
            let beta = b.has_prime(p);
            let ua = mod8(&a.unit_part(p));
            let ub = mod8(&b.unit_part(p));
            let eps = |u: u8| u == 3 || u == 7; // u = 3 mod 4
            let omega = |u: u8| u == 3 || u == 5; // u = +-3 mod 8
            let e = (eps(ua) && eps(ub)) ^ (alpha && omega(ub)) ^ (beta && omega(ua));
            BrauerInvariant::from_bool(e)
        }
        Place::Finite(p) => {
            let alpha = a.has_prime(p);
            let beta = b.has_prime(p);
            let mut sign = 1i8;
            if alpha && beta {
                sign *= crate::arith::legendre_unchecked(&BigInt::from(-1), p);
            }
            if beta {
                sign *= crate::arith::legendre_unchecked(&a.unit_part(p), p);
            }
            if alpha {
                sign *= crate::arith::legendre_unchecked(&b.unit_part(p), p);
            }
            BrauerInvariant::from_bool(sign == -1)
        }
    }
}

/// All places with nonzero invariant of (a, b), in canonical order.
///
/// The support is contained in {inf, 2} plus the primes of a and b, and
/// must sum to zero by Hilbert reciprocity; a nonzero sum is an internal
/// bug, not an input error.
pub fn symbol_support(
    a: &SquareClass,
    b: &SquareClass,
) -> Result<Vec<(Place, BrauerInvariant)>> {
    let mut places = vec![Place::Infinite, Place::finite_unchecked(BigUint::from(2u32))];
    for p in a.primes().iter().chain(b.primes().iter()) {
        places.push(Place::finite_unchecked(p.clone()));
    }
    places.sort();
    places.dedup();
    let mut out = Vec::new();
    let mut total = BrauerInvariant::ZERO;
    for v in places {
        let inv = hilbert_inv(a, b, &v);
        total += inv;
        if !inv.is_zero() {
            out.push((v, inv));
        }
    }
    if !total.is_zero() {
        return Err(Error::Internal(format!(
            "Hilbert reciprocity violated for ({a}, {b})"
        )));
    }
    Ok(out)
}
