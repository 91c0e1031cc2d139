//! Primality testing, factorization and Legendre symbols.
//!
//! Factorization is desk-scale by design: trial division up to 10^6
//! followed by Pollard-Brent rho with a hard iteration budget. An input
//! that survives the budget is reported as an error, never silently
//! approximated.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::OnceLock;

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_BUDGET: u64 = 1 << 22;

fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut p = 2usize;
        while p * p <= n {
            if sieve[p] {
                let mut q = p * p;
                while q <= n {
                    sieve[q] = false;
                    q += p;
                }
            }
            p += 1;
        }
        (2..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, a, m);
        }
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin below 2^64 (fixed witness set), strong
/// probable prime test above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    // Above 2^64: strong probable prime with a fixed witness set.
    if n.is_even() {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    miller_rabin_big(n, &BASES)
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // Deterministic for all n < 2^64 with this witness set.
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigUint, bases: &[u64]) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in bases {
        let a = BigUint::from(a) % n;
        if a.is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> Option<BigUint> {
    // Brent's cycle variant of Pollard rho; n must be odd, composite,
    // and not a perfect power of a small prime (trial division ran first).
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    for c in 1u64..20 {
        let c = BigUint::from(c);
        let mut y = two.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut steps = 0u64;
        while g.is_one() && steps < RHO_BUDGET {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let m = 128.min(r - k);
                for _ in 0..m {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * &diff) % n;
                }
                g = q.gcd(n);
                k += m;
                steps += m;
            }
            r *= 2;
        }
        if g == *n {
            // Backtrack one step at a time.
            loop {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Factor `n >= 1` into primes with multiplicity.
///
/// Errors with [`Error::Unfactorable`] once the rho budget is exhausted.
pub fn factorize(n: &BigUint) -> Result<BTreeMap<BigUint, u32>> {
    let mut out = BTreeMap::new();
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut rest = n.clone();
    for &p in small_primes() {
        if rest.is_one() {
            return Ok(out);
        }
        let p = BigUint::from(p);
        if &p * &p > rest {
            break;
        }
        while (&rest % &p).is_zero() {
            *out.entry(p.clone()).or_insert(0) += 1;
            rest /= &p;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        match pollard_brent(&m) {
            Some(d) => {
                let q = &m / &d;
                stack.push(d);
                stack.push(q);
            }
            None => return Err(Error::Unfactorable(m.to_string())),
        }
    }
    Ok(out)
}

/// Legendre symbol (a | p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigUint) -> Result<i8> {
    if p == &BigUint::from(2u32) || !is_prime(p) {
        return Err(Error::OddPrimeRequired(p.to_string()));
    }
    Ok(legendre_unchecked(a, p))
}

/// Legendre symbol when p is already known to be an odd prime.
pub(crate) fn legendre_unchecked(a: &BigInt, p: &BigUint) -> i8 {
    let pi = BigInt::from(p.clone());
    let r = a.mod_floor(&pi);
    if r.is_zero() {
        return 0;
    }
    let r = r.to_biguint().expect("mod_floor of positive modulus");
    let e = (p - BigUint::one()) >> 1;
    let s = r.modpow(&e, p);
    if s.is_one() {
        1
    } else {
        -1
    }
}

/// Iterator over primes in ascending order, for witness walks.
pub struct PrimeWalk {
    next: u64,
}

impl PrimeWalk {
    pub fn new() -> Self {
        PrimeWalk { next: 2 }
    }
}

impl Default for PrimeWalk {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimeWalk {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        let mut n = self.next;
        while !is_prime_u64(n) {
            n += 1;
        }
        self.next = if n == 2 { 3 } else { n + 2 };
        Some(n)
    }
}
