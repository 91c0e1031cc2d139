//! F_2 linear algebra on square-class exponent vectors.
//!
//! A square class is encoded over a fixed coordinate system (sign bit,
//! then one bit per prime of a chosen list); spans and membership reduce
//! to Gaussian elimination on bit rows.

use crate::arith::SquareClass;
use num_bigint::BigUint;

/// Coordinate system: bit 0 is the sign, bit i+1 the i-th listed prime.
#[derive(Clone, Debug)]
pub(crate) struct ExponentContext {
    primes: Vec<BigUint>,
}

impl ExponentContext {
    pub fn new<'a>(classes: impl IntoIterator<Item = &'a SquareClass>) -> Self {
        let mut primes: Vec<BigUint> = classes
            .into_iter()
            .flat_map(|c| c.primes().iter().cloned())
            .collect();
        primes.sort();
        primes.dedup();
        ExponentContext { primes }
    }

    pub fn dim(&self) -> usize {
        self.primes.len() + 1
    }

    /// Exponent vector of c; every prime of c must be in the context.
    pub fn vector(&self, c: &SquareClass) -> F2Vec {
        let mut v = F2Vec::zero(self.dim());
        if c.is_negative() {
            v.set(0);
        }
        for p in c.primes() {
            let i = self
                .primes
                .binary_search(p)
                .expect("class prime outside exponent context");
            v.set(i + 1);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct F2Vec {
    words: Vec<u64>,
}

impl F2Vec {
    pub fn zero(dim: usize) -> Self {
        F2Vec { words: vec![0; dim.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn leading(&self) -> Option<usize> {
        for (k, w) in self.words.iter().enumerate().rev() {
            if *w != 0 {
                return Some(k * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    fn xor_assign(&mut self, other: &F2Vec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// A subspace kept as rows reduced against each other by leading bit.
#[derive(Clone, Debug, Default)]
pub(crate) struct F2Span {
    rows: Vec<F2Vec>,
}

impl F2Span {
    pub fn new() -> Self {
        F2Span { rows: Vec::new() }
    }

    fn reduce(&self, v: &F2Vec) -> F2Vec {
        let mut x = v.clone();
        for row in &self.rows {
            let lead = row.leading().unwrap();
            if x.words[lead / 64] >> (lead % 64) & 1 == 1 {
                x.xor_assign(row);
            }
        }
        x
    }

    /// Insert a vector; returns true if the rank grew.
    pub fn insert(&mut self, v: &F2Vec) -> bool {
        let x = self.reduce(v);
        if x.is_zero() {
            return false;
        }
        self.rows.push(x);
        self.rows
            .sort_unstable_by(|a, b| b.leading().cmp(&a.leading()));
        true
    }

    pub fn contains(&self, v: &F2Vec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}
