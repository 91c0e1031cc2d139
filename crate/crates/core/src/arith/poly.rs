//! Integer polynomials: discriminants, distinct-degree splitting, Sturm.

use super::primes::{factorize, is_prime, PrimeWalk};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A univariate polynomial with arbitrary-precision integer coefficients,
/// stored constant-first with a nonzero leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Build from constant-first coefficients. Trailing zeros are trimmed;
    /// the result must have degree >= 1.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::BadDegree(
                coeffs.len().saturating_sub(1),
                ">= 1".to_string(),
            ));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn derivative_coeffs(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect()
    }

    /// Discriminant via the resultant of g and g'.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        let deriv = self.derivative_coeffs();
        let res = resultant(&self.coeffs, &deriv);
        let lc = self.coeffs.last().unwrap();
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let (q, r) = (res * BigInt::from(sign)).div_rem(lc);
        debug_assert!(r.is_zero(), "lc divides the resultant");
        q
    }

    /// Multiset of residue degrees of the places of Q[x]/(g) above p,
    /// computed by distinct-degree splitting of g mod p. Requires g monic
    /// and irreducible over Q, and p not dividing disc(g).
    pub fn split_degrees(&self, p: &BigUint) -> Result<Vec<u32>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        if self.degree() == 1 {
            return Ok(vec![1]);
        }
        let disc = self.discriminant();
        if (disc.magnitude() % p).is_zero() {
            return Err(Error::RamifiedPrime(p.to_string()));
        }
        // Opportunistic reducibility rejection: a monic integer polynomial
        // with a rational root has an integer root.
        if !self.integer_roots()?.is_empty() {
            return Err(Error::ReduciblePolynomial);
        }
        let f = ModPoly::reduce(&self.coeffs, p);
        Ok(distinct_degrees(f, p))
    }

    /// Integer roots of a monic polynomial (divisors of the constant term).
    pub fn integer_roots(&self) -> Result<Vec<BigInt>> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        let mut roots = Vec::new();
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            roots.push(BigInt::zero());
            return Ok(roots);
        }
        let mut divisors = vec![BigUint::one()];
        for (q, e) in factorize(a0.magnitude())? {
            let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
            for d in &divisors {
                let mut qk = BigUint::one();
                for _ in 0..=e {
                    next.push(d * &qk);
                    qk *= &q;
                }
            }
            divisors = next;
        }
        for d in divisors {
            let d = BigInt::from(d);
            if self.eval(&d).is_zero() {
                roots.push(d.clone());
            }
            let neg = -d;
            if self.eval(&neg).is_zero() {
                roots.push(neg);
            }
        }
        roots.sort();
        Ok(roots)
    }

    /// Number of real roots, via a Sturm sequence over Q.
    pub fn real_root_count(&self) -> usize {
        let to_q = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::from(c.clone())).collect()
        };
        let mut chain: Vec<Vec<BigRational>> = vec![to_q(&self.coeffs)];
        let deriv = self.derivative_coeffs();
        if !deriv.is_empty() {
            chain.push(to_q(&deriv));
        }
        loop {
            let k = chain.len();
            if k < 2 || chain[k - 1].iter().all(|c| c.is_zero()) {
                break;
            }
            let r = poly_rem_q(&chain[k - 2], &chain[k - 1]);
            if r.iter().all(|c| c.is_zero()) {
                break;
            }
            chain.push(r.iter().map(|c| -c).collect());
        }
        let sign_at = |coeffs: &[BigRational], at_plus_infinity: bool| -> i8 {
            let d = coeffs.len() - 1;
            let lc = &coeffs[d];
            let mut s = if lc.is_positive() {
                1i8
            } else if lc.is_negative() {
                -1
            } else {
                0
            };
            if !at_plus_infinity && d % 2 == 1 {
                s = -s;
            }
            s
        };
        let variations = |at_plus_infinity: bool| -> usize {
            let mut count = 0;
            let mut prev = 0i8;
            for c in &chain {
                let trimmed: Vec<BigRational> = {
                    let mut t = c.clone();
                    while t.last().map(|x| x.is_zero()).unwrap_or(false) {
                        t.pop();
                    }
                    t
                };
                if trimmed.is_empty() {
                    continue;
                }
                let s = sign_at(&trimmed, at_plus_infinity);
                if s != 0 && prev != 0 && s != prev {
                    count += 1;
                }
                if s != 0 {
                    prev = s;
                }
            }
            count
        };
        variations(false) - variations(true)
    }

    /// Certify irreducibility over Q.
    ///
    /// Degree 1 is trivially irreducible; an integer root certifies
    /// reducibility; for degree 3 absence of roots suffices. Above that a
    /// modular witness is searched: a prime p with a single splitting
    /// degree equal to deg(g) proves irreducibility.
    pub fn certify_irreducible(&self) -> Result<()> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = self.degree();
        if n == 1 {
            return Ok(());
        }
        if !self.integer_roots()?.is_empty() {
            return Err(Error::ReduciblePolynomial);
        }
        if n <= 3 {
            return Ok(());
        }
        let disc = self.discriminant();
        if disc.is_zero() {
            return Err(Error::ReduciblePolynomial);
        }
        for p in PrimeWalk::new().take(200) {
            let p = BigUint::from(p);
            if (disc.magnitude() % &p).is_zero() {
                continue;
            }
            let f = ModPoly::reduce(&self.coeffs, &p);
            if distinct_degrees(f, &p) == vec![n as u32] {
                return Ok(());
            }
        }
        Err(Error::IrreducibilityUnverified)
    }
}

fn poly_rem_q(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
    let mut num: Vec<BigRational> = num.to_vec();
    let dd = den.len() - 1;
    let lc = den[dd].clone();
    while num.len() > dd && !num.iter().all(|c| c.is_zero()) {
        while num.last().map(|c| c.is_zero()).unwrap_or(false) {
            num.pop();
        }
        if num.len() <= dd {
            break;
        }
        let shift = num.len() - 1 - dd;
        let q = num.last().unwrap() / &lc;
        for i in 0..=dd {
            let t = &den[i] * &q;
            num[shift + i] -= t;
        }
        num.pop();
    }
    num
}

/// Resultant of two integer polynomials (constant-first coefficient
/// slices) via fraction-free Bareiss elimination of the Sylvester matrix.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let trim = |v: &[BigInt]| -> Vec<BigInt> {
        let mut t = v.to_vec();
        while t.last().map(|c| c.is_zero()).unwrap_or(false) {
            t.pop();
        }
        t
    };
    let f = trim(f);
    let g = trim(g);
    if f.is_empty() || g.is_empty() {
        return BigInt::zero();
    }
    let n = f.len() - 1;
    let m = g.len() - 1;
    if n == 0 {
        return f[0].pow(m as u32);
    }
    if m == 0 {
        return g[0].pow(n as u32);
    }
    let size = n + m;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..m {
        for (k, c) in f.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..n {
        for (k, c) in g.iter().rev().enumerate() {
            mat[m + row][row + k] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division is exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].clone() * BigInt::from(sign)
}

/// Dense polynomial over GF(p), constant-first, trimmed.
#[derive(Clone, Debug, PartialEq)]
struct ModPoly {
    c: Vec<BigUint>,
}

impl ModPoly {
    fn reduce(coeffs: &[BigInt], p: &BigUint) -> Self {
        let pi = BigInt::from(p.clone());
        let mut c: Vec<BigUint> = coeffs
            .iter()
            .map(|x| x.mod_floor(&pi).to_biguint().unwrap())
            .collect();
        while c.last().map(|x| x.is_zero()).unwrap_or(false) {
            c.pop();
        }
        ModPoly { c }
    }

    fn x() -> Self {
        ModPoly { c: vec![BigUint::zero(), BigUint::one()] }
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn trim(mut self, p: &BigUint) -> Self {
        let _ = p;
        while self.c.last().map(|x| x.is_zero()).unwrap_or(false) {
            self.c.pop();
        }
        self
    }

    fn sub(&self, other: &Self, p: &BigUint) -> Self {
        let len = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.c.get(i).cloned().unwrap_or_default();
            let b = other.c.get(i).cloned().unwrap_or_default();
            c.push((a + p - (b % p)) % p);
        }
        ModPoly { c }.trim(p)
    }

    fn mul(&self, other: &Self, p: &BigUint) -> Self {
        if self.is_zero() || other.is_zero() {
            return ModPoly { c: vec![] };
        }
        let mut c = vec![BigUint::zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = (&c[i + j] + a * b) % p;
            }
        }
        ModPoly { c }.trim(p)
    }

    /// Remainder modulo a monic divisor.
    fn rem(&self, div: &Self, p: &BigUint) -> Self {
        let mut r = self.clone().trim(p);
        let d = div.deg();
        while !r.is_zero() && r.deg() >= d {
            let shift = r.deg() - d;
            let q = r.c.last().unwrap().clone();
            for i in 0..=d {
                let t = (&div.c[i] * &q) % p;
                r.c[shift + i] = (&r.c[shift + i] + p - t) % p;
            }
            r = r.trim(p);
        }
        r
    }

    fn make_monic(self, p: &BigUint) -> Self {
        if self.is_zero() {
            return self;
        }
        let lc = self.c.last().unwrap().clone();
        if lc.is_one() {
            return self;
        }
        let inv = lc.modpow(&(p - BigUint::from(2u32)), p);
        let c = self.c.iter().map(|x| (x * &inv) % p).collect();
        ModPoly { c }
    }

    fn gcd(a: Self, b: Self, p: &BigUint) -> Self {
        let (mut a, mut b) = (a.trim(p), b.trim(p));
        while !b.is_zero() {
            let bm = b.clone().make_monic(p);
            let r = a.rem(&bm, p);
            a = bm;
            b = r;
        }
        a.make_monic(p)
    }

    /// self^p mod f, by square-and-multiply over the bits of p.
    fn pow_p_mod(&self, f: &Self, p: &BigUint) -> Self {
        let mut base = self.rem(f, p);
        let mut acc = ModPoly { c: vec![BigUint::one()] };
        let bits = p.bits();
        for i in 0..bits {
            if p.bit(i) {
                acc = acc.mul(&base, p).rem(f, p);
            }
            base = base.mul(&base, p).rem(f, p);
        }
        acc
    }
}

/// Degrees of the distinct-degree components of a squarefree monic f over
/// GF(p), expanded to the multiset of irreducible-factor degrees.
fn distinct_degrees(f: ModPoly, p: &BigUint) -> Vec<u32> {
    let mut f = f.make_monic(p);
    let mut out = Vec::new();
    let x = ModPoly::x();
    let mut h = x.rem(&f, p);
    let mut d = 0u32;
    while 2 * (d + 1) as usize <= f.deg() {
        d += 1;
        h = h.pow_p_mod(&f, p);
        let g = ModPoly::gcd(f.clone(), h.sub(&x, p), p);
        if g.deg() > 0 {
            for _ in 0..(g.deg() as u32 / d) {
                out.push(d);
            }
            // Divide out the degree-d part: f / g via repeated gcd-free rem.
            f = poly_div_exact(&f, &g, p);
            h = h.rem(&f, p);
        }
        if f.deg() == 0 {
            break;
        }
    }
    if f.deg() > 0 {
        out.push(f.deg() as u32);
    }
    out.sort_unstable();
    out
}

fn poly_div_exact(num: &ModPoly, den: &ModPoly, p: &BigUint) -> ModPoly {
    let mut r = num.clone().trim(p);
    let d = den.deg();
    let mut q = vec![BigUint::zero(); r.deg() - d + 1];
    while !r.is_zero() && r.deg() >= d {
        let shift = r.deg() - d;
        let coef = r.c.last().unwrap().clone();
        q[shift] = coef.clone();
        for i in 0..=d {
            let t = (&den.c[i] * &coef) % p;
            r.c[shift + i] = (&r.c[shift + i] + p - t) % p;
        }
        r = r.trim(p);
    }
    debug_assert!(r.is_zero(), "exact division");
    ModPoly { c: q }.trim(p)
}
