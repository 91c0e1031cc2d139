//! Shared test support: independent oracles and seeded generators.
//!
//! Everything here recomputes from first principles (bounded modular
//! search, direct residue tests) and must stay independent of the
//! closed-form production paths it cross-checks.

#![allow(dead_code)]

use hasse_embed::arith::SquareClass;
use hasse_embed::involution::{AlgebraDescriptor, AlgebraKind, Configuration, EtaleConfig};
use hasse_embed::local::Place;
use hasse_embed::multiquad::{MultiquadraticField, StableFactor};
use rand::rngs::StdRng;
use rand::Rng;

pub fn sc(n: i64) -> SquareClass {
    SquareClass::from_i64(n).unwrap()
}

pub fn factor(gens: &[i64], d: i64) -> StableFactor {
    let field = MultiquadraticField::new(gens.iter().map(|&g| sc(g)).collect()).unwrap();
    StableFactor::new(field, sc(d)).unwrap()
}

pub fn fp(p: u64) -> Place {
    Place::finite_u64(p).unwrap()
}

/// Configuration over a split symplectic algebra (no orientation rules).
pub fn split_config(factors: Vec<StableFactor>) -> Configuration {
    let degree = factors.iter().map(|f| f.degree()).sum();
    Configuration::new(
        EtaleConfig::of_factors(factors),
        AlgebraDescriptor::split(AlgebraKind::Symplectic, degree),
    )
    .unwrap()
}

/// The spec's running order-2 fixture over a nonsplit orthogonal algebra.
pub fn oriented_order_two() -> Configuration {
    let etale = EtaleConfig::of_factors(vec![factor(&[2], 17), factor(&[5], 2)]);
    let alg = AlgebraDescriptor {
        kind: AlgebraKind::Orthogonal,
        degree: 8,
        ramified_places: [fp(2), fp(5)].into_iter().collect(),
        hyperbolic_at: Default::default(),
    };
    Configuration::new(etale, alg).unwrap()
}

/// p-adic valuation of a nonzero integer.
fn vp(mut n: i64, p: u64) -> u32 {
    let mut v = 0;
    n = n.abs();
    while n % p as i64 == 0 {
        n /= p as i64;
        v += 1;
    }
    v
}

/// Iteration cap for the modular oracle; cases above it are infeasible
/// for a brute search and get resampled by the caller.
pub const ORACLE_BUDGET: u128 = 16_000_000;

/// Bounded modular-solution oracle for the Hilbert symbol at a finite
/// prime: a x^2 + b y^2 = z^2 is solvable over Q_p iff it has a solution
/// mod p^k with (x, y, z) not all divisible by p, where k = 2 v_p(4ab) + 3.
/// Returns None when the search would exceed the budget.
pub fn hilbert_oracle_finite(a: i64, b: i64, p: u64) -> Option<bool> {
    assert!(a != 0 && b != 0);
    let k = 2 * vp(4 * a * b, p) + 3;
    let modulus = (p as u128).checked_pow(k)?;
    if modulus.checked_mul(modulus)? > ORACLE_BUDGET {
        return None;
    }
    let m = modulus as u64;
    // squares[t]: t is z^2 mod p^k for some z; unit_squares additionally
    // requires z to be a unit (needed when x and y are both non-units).
    let mut squares = vec![false; m as usize];
    let mut unit_squares = vec![false; m as usize];
    for z in 0..m {
        let t = (z as u128 * z as u128 % m as u128) as usize;
        squares[t] = true;
        if z % p != 0 {
            unit_squares[t] = true;
        }
    }
    let am = (a.rem_euclid(m as i64)) as u64;
    let bm = (b.rem_euclid(m as i64)) as u64;
    for x in 0..m {
        let ax2 = (am as u128 * (x as u128 * x as u128 % m as u128)) % m as u128;
        let x_unit = x % p != 0;
        for y in 0..m {
            let by2 = (bm as u128 * (y as u128 * y as u128 % m as u128)) % m as u128;
            let t = ((ax2 + by2) % m as u128) as usize;
            if x_unit || y % p != 0 {
                if squares[t] {
                    return Some(true);
                }
            } else if unit_squares[t] {
                return Some(true);
            }
        }
    }
    Some(false)
}

/// Hilbert oracle over all places: sign analysis at infinity, bounded
/// modular search at finite primes.
pub fn hilbert_oracle(a: i64, b: i64, v: &Place) -> Option<bool> {
    match v {
        Place::Infinite => Some(!(a < 0 && b < 0)),
        Place::Finite(p) => {
            let p: u64 = p.to_string().parse().ok()?;
            hilbert_oracle_finite(a, b, p)
        }
    }
}

pub fn nonzero_in(rng: &mut StdRng, bound: i64) -> i64 {
    loop {
        let x = rng.gen_range(-bound..=bound);
        if x != 0 {
            return x;
        }
    }
}

/// Random square class with support in the given generator primes, with
/// an optional sign flip.
pub fn random_class(rng: &mut StdRng, gens: &[i64]) -> SquareClass {
    loop {
        let mut c = if rng.gen_bool(0.3) { sc(-1) } else { sc(1) };
        for &g in gens {
            if rng.gen_bool(0.4) {
                c = c.mul(&sc(g));
            }
        }
        if !c.is_one() {
            return c;
        }
    }
}

/// Random stable factor over the generator primes: fixed field of rank
/// up to max_rank, d outside its span.
pub fn random_factor(rng: &mut StdRng, gens: &[i64], max_rank: u32) -> StableFactor {
    loop {
        let rank = rng.gen_range(0..=max_rank);
        let mut basis = Vec::new();
        for _ in 0..rank {
            basis.push(random_class(rng, gens));
        }
        let Ok(field) = MultiquadraticField::new(basis) else {
            continue;
        };
        let d = random_class(rng, gens);
        if let Ok(f) = StableFactor::new(field, d) {
            return f;
        }
    }
}

/// Random validated configuration over a split symplectic algebra.
pub fn random_config(
    rng: &mut StdRng,
    gens: &[i64],
    max_factors: usize,
    max_rank: u32,
) -> Configuration {
    let m = rng.gen_range(1..=max_factors);
    let factors: Vec<StableFactor> =
        (0..m).map(|_| random_factor(rng, gens, max_rank)).collect();
    split_config(factors)
}
