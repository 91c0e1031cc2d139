//! Multiquadratic fields F, stable factors E = F(sqrt d), and V-sets.
//!
//! The exactness domain is: F multiquadratic over Q and d rational. All
//! places of F above a place v of Q then have the same completion, so
//! "some place of F above v is inert or ramified in E" is a single F_2
//! test against the local subspace spanned by the field generators, and
//! emptiness of intersections of V-sets is decidable by finite pattern
//! enumeration.

mod f2;
mod pattern;

pub use pattern::{witness_prime, FrobeniusPattern, GeneratorList};
pub(crate) use pattern::{union_intersection_evidence, NonemptyEvidence, VProfiles};

use crate::arith::{PrimeWalk, SquareClass};
use crate::error::{Error, Result};
use crate::local::{local_vector, LocalSubspace, Place};
use f2::{ExponentContext, F2Span};
use num_bigint::BigUint;

/// A multiquadratic extension of Q given by independent square classes;
/// rank 0 is Q itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiquadraticField {
    basis: Vec<SquareClass>,
}

impl MultiquadraticField {
    /// Validates F_2 independence of the generators in Q^x / Q^x2.
    pub fn new(basis: Vec<SquareClass>) -> Result<Self> {
        let ctx = ExponentContext::new(basis.iter());
        let mut span = F2Span::new();
        for c in &basis {
            if !span.insert(&ctx.vector(c)) {
                let gens = basis
                    .iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(Error::DependentBasis(gens));
            }
        }
        Ok(MultiquadraticField { basis })
    }

    /// The rationals.
    pub fn rationals() -> Self {
        MultiquadraticField { basis: Vec::new() }
    }

    pub fn rank(&self) -> u32 {
        self.basis.len() as u32
    }

    /// Degree over Q.
    pub fn degree(&self) -> u64 {
        1u64 << self.rank()
    }

    pub fn basis(&self) -> &[SquareClass] {
        &self.basis
    }

    pub fn is_rationals(&self) -> bool {
        self.basis.is_empty()
    }
}

/// A sigma-stable field factor E = F(sqrt d) with fixed field F.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableFactor {
    field: MultiquadraticField,
    d: SquareClass,
}

impl StableFactor {
    /// Requires d outside the span of the field generators, so that E is
    /// a field of degree 2 over F.
    pub fn new(field: MultiquadraticField, d: SquareClass) -> Result<Self> {
        let ctx = ExponentContext::new(field.basis.iter().chain(std::iter::once(&d)));
        let mut span = F2Span::new();
        for c in &field.basis {
            span.insert(&ctx.vector(c));
        }
        if span.contains(&ctx.vector(&d)) {
            return Err(Error::NotAField(d.to_string()));
        }
        Ok(StableFactor { field, d })
    }

    pub fn field(&self) -> &MultiquadraticField {
        &self.field
    }

    pub fn d(&self) -> &SquareClass {
        &self.d
    }

    /// Degree of E over Q.
    pub fn degree(&self) -> u64 {
        2 * self.field.degree()
    }
}

/// Shape of F tensor Q_v: g places of equal local degree f, g f = 2^r.
#[derive(Clone, Debug)]
pub struct CompletionProfile {
    pub place_count: u64,
    pub local_degree: u64,
    pub local_subspace: LocalSubspace,
}

/// Completion shape of F at v. All places of F above v have the same
/// completion, of degree 2^(dim W_v) where W_v is the local span of the
/// generators.
pub fn completion_profile(field: &MultiquadraticField, v: &Place) -> CompletionProfile {
    let vectors: Vec<_> = field.basis.iter().map(|b| local_vector(b, v)).collect();
    let w = if vectors.is_empty() {
        LocalSubspace::zero(dim_at(v))
    } else {
        LocalSubspace::span(&vectors)
    };
    let f = 1u64 << w.rank();
    CompletionProfile {
        place_count: field.degree() / f,
        local_degree: f,
        local_subspace: w,
    }
}

fn dim_at(v: &Place) -> u8 {
    if v.is_infinite() {
        1
    } else if v.is_dyadic() {
        3
    } else {
        2
    }
}

/// Whether v lies in V of the factor: some (equivalently, every) place of
/// F above v is inert or ramified in E, i.e. d is not a local square in
/// the completion of F.
pub fn in_v(factor: &StableFactor, v: &Place) -> bool {
    let profile = completion_profile(&factor.field, v);
    !profile.local_subspace.contains(&local_vector(&factor.d, v))
}

/// Kummer-theoretic linear disjointness: E_a tensor E_b is a field iff
/// the spans of (generators, d) on the two sides meet trivially.
pub fn is_linearly_disjoint(a: &StableFactor, b: &StableFactor) -> bool {
    let all = a
        .field
        .basis
        .iter()
        .chain(std::iter::once(&a.d))
        .chain(b.field.basis.iter())
        .chain(std::iter::once(&b.d));
    let ctx = ExponentContext::new(all.clone());
    let mut span_a = F2Span::new();
    for c in a.field.basis.iter().chain(std::iter::once(&a.d)) {
        span_a.insert(&ctx.vector(c));
    }
    let mut span_b = F2Span::new();
    let mut joint = span_a.clone();
    for c in b.field.basis.iter().chain(std::iter::once(&b.d)) {
        span_b.insert(&ctx.vector(c));
        joint.insert(&ctx.vector(c));
    }
    span_a.rank() + span_b.rank() == joint.rank()
}

/// Certificate that V_a and V_b are disjoint: the named special places
/// all fail the conjunction, and so does every Frobenius pattern.
#[derive(Clone, Debug)]
pub struct EmptyCertificate {
    pub special_places: Vec<Place>,
    pub patterns_checked: u64,
}

/// Result of the V_a intersect V_b search.
#[derive(Clone, Debug)]
pub enum VIntersection {
    Empty(EmptyCertificate),
    Witness(Place),
}

impl VIntersection {
    pub fn witness(&self) -> Option<&Place> {
        match self {
            VIntersection::Witness(v) => Some(v),
            VIntersection::Empty(_) => None,
        }
    }
}

/// Find the least place of V_a intersect V_b under the canonical order,
/// or certify emptiness exactly.
pub fn v_intersection(
    a: &StableFactor,
    b: &StableFactor,
    prime_bound: u64,
) -> Result<VIntersection> {
    let factors = [a.clone(), b.clone()];
    match union_intersection_evidence(&factors, &[0], &[1]) {
        None => {
            let list = GeneratorList::for_factors(factors.iter());
            let mut special = vec![
                Place::Infinite,
                Place::finite_unchecked(BigUint::from(2u32)),
            ];
            for p in list.primes() {
                special.push(Place::finite_unchecked(p.clone()));
            }
            special.sort();
            special.dedup();
            Ok(VIntersection::Empty(EmptyCertificate {
                special_places: special,
                patterns_checked: 1 << list.len(),
            }))
        }
        Some(evidence) => {
            if in_v(a, &Place::Infinite) && in_v(b, &Place::Infinite) {
                return Ok(VIntersection::Witness(Place::Infinite));
            }
            // The evidence bounds the walk: a special witness place is a
            // hit itself, and a witnessing pattern is realized first (any
            // realizing prime satisfies the conjunction). The walk still
            // scans every smaller place so the returned witness is least.
            let guaranteed: Option<BigUint> = match &evidence {
                NonemptyEvidence::Special(v) => v.prime().cloned(),
                NonemptyEvidence::Pattern(pat) => match witness_prime(pat, prime_bound) {
                    Some(p) => Some(p),
                    None => return Err(Error::WitnessSearchExhausted(prime_bound)),
                },
            };
            for p in PrimeWalk::new() {
                let pb = BigUint::from(p);
                if p > prime_bound && guaranteed.as_ref().map_or(true, |g| &pb > g) {
                    return Err(Error::WitnessSearchExhausted(prime_bound));
                }
                let v = Place::finite_unchecked(pb);
                if in_v(a, &v) && in_v(b, &v) {
                    return Ok(VIntersection::Witness(v));
                }
            }
            unreachable!("PrimeWalk is infinite")
        }
    }
}

pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;
