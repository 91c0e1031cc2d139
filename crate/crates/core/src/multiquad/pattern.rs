//! Frobenius patterns and effective witness-prime search.
//!
//! At an odd prime p dividing no generator, the local behaviour of every
//! relevant square class is determined by the residue signs of the
//! generators at p. Each assignment of signs is realized by infinitely
//! many primes (a union of arithmetic progressions, nonempty by quadratic
//! reciprocity and Dirichlet), so exhausting the finitely many patterns
//! decides emptiness questions about V-sets exactly.

use super::StableFactor;
use crate::arith::{legendre_unchecked, SquareClass};
use crate::local::Place;
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

/// The fixed generator list of a configuration: the class of -1 (when
/// tracked) followed by the primes supporting the field generators and
/// the d values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorList {
    include_minus_one: bool,
    primes: Vec<BigUint>,
}

impl GeneratorList {
    /// Generator list covering a set of stable factors; always tracks -1.
    pub fn for_factors<'a>(factors: impl IntoIterator<Item = &'a StableFactor>) -> Self {
        let mut primes = Vec::new();
        for f in factors {
            for c in f.field().basis().iter().chain(std::iter::once(f.d())) {
                primes.extend(c.primes().iter().cloned());
            }
        }
        primes.sort();
        primes.dedup();
        GeneratorList { include_minus_one: true, primes }
    }

    /// Free-standing list over the given primes only.
    pub fn over_primes(mut primes: Vec<BigUint>, include_minus_one: bool) -> Self {
        primes.sort();
        primes.dedup();
        GeneratorList { include_minus_one, primes }
    }

    /// Number of generators (domain size of a pattern).
    pub fn len(&self) -> usize {
        self.primes.len() + usize::from(self.include_minus_one)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn primes(&self) -> &[BigUint] {
        &self.primes
    }

    /// Exponents of c over the generators, aligned with pattern slots.
    ///
    /// Panics if c involves a prime outside the list or a sign the list
    /// does not track; callers build the list from the same classes.
    fn exponents(&self, c: &SquareClass) -> Vec<bool> {
        let mut out = vec![false; self.len()];
        let offset = usize::from(self.include_minus_one);
        if c.is_negative() {
            assert!(self.include_minus_one, "sign outside generator list");
            out[0] = true;
        }
        for p in c.primes() {
            let i = self
                .primes
                .binary_search(p)
                .expect("class prime outside generator list");
            out[offset + i] = true;
        }
        out
    }
}

/// An assignment of quadratic-residue signs to the generator list;
/// true means non-residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusPattern {
    list: GeneratorList,
    nonresidue: Vec<bool>,
}

impl FrobeniusPattern {
    pub fn new(list: GeneratorList, nonresidue: Vec<bool>) -> Self {
        assert_eq!(list.len(), nonresidue.len(), "pattern domain mismatch");
        FrobeniusPattern { list, nonresidue }
    }

    pub fn list(&self) -> &GeneratorList {
        &self.list
    }

    pub fn assignment(&self) -> &[bool] {
        &self.nonresidue
    }

    /// All 2^len patterns over a list, in mask order.
    pub fn enumerate(list: &GeneratorList) -> impl Iterator<Item = FrobeniusPattern> + '_ {
        let n = list.len();
        assert!(n < 64, "generator list too large to enumerate");
        (0u64..1 << n).map(move |mask| {
            let bits = (0..n).map(|i| mask >> i & 1 == 1).collect();
            FrobeniusPattern::new(list.clone(), bits)
        })
    }

    /// The residue sign of a class at any prime realizing this pattern.
    pub fn class_is_nonresidue(&self, c: &SquareClass) -> bool {
        self.list
            .exponents(c)
            .iter()
            .zip(&self.nonresidue)
            .fold(false, |acc, (e, b)| acc ^ (e & b))
    }

    /// Whether a prime realizing this pattern lies in V of the factor.
    ///
    /// At an unramified odd prime all local vectors have zero valuation
    /// coordinate, so membership reduces to: d is a non-residue while
    /// every field generator is a residue.
    pub fn in_v(&self, factor: &StableFactor) -> bool {
        self.class_is_nonresidue(factor.d())
            && factor
                .field()
                .basis()
                .iter()
                .all(|b| !self.class_is_nonresidue(b))
    }
}

/// Least prime <= bound realizing the pattern: coprime to every listed
/// generator, with matching residue signs (the sign of -1 is read off
/// p mod 4). Patterns range over odd primes only.
pub fn witness_prime(pattern: &FrobeniusPattern, bound: u64) -> Option<BigUint> {
    let list = &pattern.list;
    let listed: Vec<u64> = list
        .primes
        .iter()
        .filter_map(|p| p.to_u64())
        .collect();
    let mut p = 3u64;
    while p <= bound {
        if crate::arith::is_prime_u64(p) && !listed.contains(&p) {
            if pattern_matches_at(pattern, p) {
                return Some(BigUint::from(p));
            }
        }
        p += 2;
    }
    None
}

fn pattern_matches_at(pattern: &FrobeniusPattern, p: u64) -> bool {
    let list = &pattern.list;
    let pb = BigUint::from(p);
    let mut slot = 0;
    if list.include_minus_one {
        let nonres = p % 4 == 3;
        if nonres != pattern.nonresidue[0] {
            return false;
        }
        slot = 1;
    }
    for q in &list.primes {
        let nonres = legendre_unchecked(&BigInt::from(q.clone()), &pb) == -1;
        if nonres != pattern.nonresidue[slot] {
            return false;
        }
        slot += 1;
    }
    true
}

/// Evidence that a place with the required V-memberships exists.
#[derive(Clone, Debug)]
pub(crate) enum NonemptyEvidence {
    Special(Place),
    Pattern(FrobeniusPattern),
}

/// Per-factor V-membership over the special places and over every
/// Frobenius pattern, precomputed once so that many union queries against
/// the same factor set stay cheap.
pub(crate) struct VProfiles {
    pub special: Vec<(Place, Vec<bool>)>,
    pub patterns: Vec<(FrobeniusPattern, Vec<bool>)>,
}

impl VProfiles {
    pub fn new(factors: &[StableFactor]) -> Self {
        let list = GeneratorList::for_factors(factors.iter());
        let mut places = vec![
            Place::Infinite,
            Place::finite_unchecked(BigUint::from(2u32)),
        ];
        for p in list.primes() {
            places.push(Place::finite_unchecked(p.clone()));
        }
        places.sort();
        places.dedup();
        let special = places
            .into_iter()
            .map(|v| {
                let bits = factors.iter().map(|f| super::in_v(f, &v)).collect();
                (v, bits)
            })
            .collect();
        let patterns = FrobeniusPattern::enumerate(&list)
            .map(|pat| {
                let bits = factors.iter().map(|f| pat.in_v(f)).collect();
                (pat, bits)
            })
            .collect();
        VProfiles { special, patterns }
    }

    /// Decide whether (union of V_i over `left`) meets (union of V_j over
    /// `right`), exactly: special places (infinity, 2, generator primes)
    /// are tested directly, all other places are covered by the patterns.
    pub fn evidence(&self, left: &[usize], right: &[usize]) -> Option<NonemptyEvidence> {
        let hit = |bits: &[bool], side: &[usize]| side.iter().any(|&i| bits[i]);
        for (v, bits) in &self.special {
            if hit(bits, left) && hit(bits, right) {
                return Some(NonemptyEvidence::Special(v.clone()));
            }
        }
        for (pat, bits) in &self.patterns {
            if hit(bits, left) && hit(bits, right) {
                return Some(NonemptyEvidence::Pattern(pat.clone()));
            }
        }
        None
    }
}

pub(crate) fn union_intersection_evidence(
    factors: &[StableFactor],
    left: &[usize],
    right: &[usize],
) -> Option<NonemptyEvidence> {
    VProfiles::new(factors).evidence(left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(primes: &[u64]) -> GeneratorList {
        GeneratorList::over_primes(primes.iter().map(|&p| BigUint::from(p)).collect(), false)
    }

    #[test]
    fn witness_prime_spec_values() {
        // {2 -> non-residue, 5 -> non-residue} is realized first by 3.
        let pat = FrobeniusPattern::new(list(&[2, 5]), vec![true, true]);
        assert_eq!(witness_prime(&pat, 1000), Some(BigUint::from(3u32)));

        // {2 -> residue} skips 3 and 5.
        let pat = FrobeniusPattern::new(list(&[2]), vec![false]);
        assert_eq!(witness_prime(&pat, 1000), Some(BigUint::from(7u32)));

        // Empty domain: the least odd prime.
        let pat = FrobeniusPattern::new(list(&[]), vec![]);
        assert_eq!(witness_prime(&pat, 1000), Some(BigUint::from(3u32)));
    }

    #[test]
    fn witness_prime_minus_one_slot() {
        let l = GeneratorList::over_primes(vec![BigUint::from(2u32)], true);
        // -1 non-residue (p = 3 mod 4), 2 residue: first is 7.
        let pat = FrobeniusPattern::new(l.clone(), vec![true, false]);
        assert_eq!(witness_prime(&pat, 1000), Some(BigUint::from(7u32)));
        // -1 residue (p = 1 mod 4), 2 residue: first is 17.
        let pat = FrobeniusPattern::new(l, vec![false, false]);
        assert_eq!(witness_prime(&pat, 1000), Some(BigUint::from(17u32)));
    }

    #[test]
    fn every_pattern_is_realized() {
        // Chebotarev stress test on a 3-generator list.
        let l = GeneratorList::over_primes(
            vec![BigUint::from(2u32), BigUint::from(3u32), BigUint::from(7u32)],
            true,
        );
        for pat in FrobeniusPattern::enumerate(&l) {
            let p = witness_prime(&pat, 1_000_000);
            assert!(p.is_some(), "unrealized pattern {:?}", pat.assignment());
        }
    }
}
