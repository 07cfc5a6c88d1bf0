//! Arithmetic in GF(p^e).
//!
//! Elements are stored as their integer representation: the residue
//! polynomial `c_0 + c_1 x + ... + c_{e-1} x^{e-1}` packed little-endian in
//! base `p`, so `0` and `1` are the field's zero and one. Multiplication uses
//! log/antilog tables built once at construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Fields up to this order get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { p: u32, e: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element {0} is not a square")]
    NotSquare(u32),
    #[error("GF({0}) has no nonsquares")]
    NoNonsquare(u32),
    #[error("element rep {rep} out of range for GF({q})")]
    OutOfRange { rep: u64, q: u32 },
    #[error("modulus {0:?} does not match the canonical modulus for this field")]
    ModulusMismatch(Vec<u32>),
}

/// A field element, identified by its base-`p` little-endian representation.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn rep(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serialized identity of a field: characteristic, degree and modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

/// The finite field GF(p^e) together with its lookup tables.
///
/// Immutable once built; share it behind an `Arc`.
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, coefficients low degree first (length `e + 1`).
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u16>>,
    sqrt: Vec<Option<u32>>,
    nonsquare: Option<Elem>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // q itself is prime
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return None;
    }
    Some((u32::try_from(p).ok()?, e))
}

// Dense polynomials over GF(p), coefficients low degree first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = pow_mod(m[dm], p - 2, p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = dr - dm + i;
            r[idx] = (r[idx] + p - c * mi % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn pow_mod(b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = u64::from(b % p);
    let pm = u64::from(p);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % pm;
        }
        base = base * base % pm;
        e >>= 1;
    }
    acc as u32
}

fn digits(rep: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    let mut r = rep;
    for _ in 0..e {
        out.push(r % p);
        r /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Irreducibility by trial division against every monic polynomial of
/// degree `1..=deg/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = u64::from(p).pow(d as u32);
        for low in 0..count {
            let mut divisor = digits(low as u32, p, d as u32);
            divisor.push(1);
            if poly_rem(m, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `e`, comparing coefficient tuples
/// `(c_0, c_1, ..., c_{e-1})` lexicographically.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = p.pow(e);
    for idx in 0..count {
        // c_0 is the most significant digit of idx
        let mut coeffs = digits(idx, p, e);
        coeffs.reverse();
        coeffs.push(1);
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

impl FieldCtx {
    /// Builds GF(p^e).
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        if !is_prime(u64::from(p)) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = u64::from(p)
            .checked_pow(e)
            .filter(|&q| q <= u64::from(MAX_ORDER))
            .ok_or(FieldError::TooLarge { p, e })? as u32;

        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, e)
        };

        let slow_mul = |a: u32, b: u32| -> u32 {
            if e == 1 {
                return ((u64::from(a) * u64::from(b)) % u64::from(p)) as u32;
            }
            let da = digits(a, p, e);
            let db = digits(b, p, e);
            let mut prod = vec![0u32; (2 * e - 1) as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(e as usize, 0);
            undigits(&r, p)
        };

        // primitive element by brute force
        let order = q - 1;
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp.push(1);
        } else {
            'cand: for g in 2..q {
                exp.clear();
                let mut x = 1u32;
                for i in 0..order {
                    if i > 0 && x == 1 {
                        continue 'cand;
                    }
                    exp.push(x);
                    x = slow_mul(x, g);
                }
                if x == 1 {
                    break;
                }
            }
        }
        debug_assert_eq!(exp.len(), order as usize);
        for i in 0..order {
            log[exp[i as usize] as usize] = i;
        }
        let first: Vec<u32> = exp.clone();
        exp.extend_from_slice(&first);

        let neg: Vec<u32> = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, e).into_iter().map(|c| (p - c) % p).collect();
                undigits(&d, p)
            })
            .collect();

        let mut ctx = FieldCtx {
            p,
            e,
            q,
            modulus,
            exp,
            log,
            neg,
            add: None,
            sqrt: Vec::new(),
            nonsquare: None,
        };

        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = ctx.add_digits(a, b) as u16;
                }
            }
            ctx.add = Some(table);
        }

        let mut sqrt = vec![None; q as usize];
        for b in 0..q {
            let sq = ctx.mul(Elem(b), Elem(b)).0 as usize;
            // ascending scan keeps the smaller root
            if sqrt[sq].is_none() {
                sqrt[sq] = Some(b);
            }
        }
        ctx.sqrt = sqrt;
        if p != 2 {
            ctx.nonsquare = (0..q).map(Elem).find(|&a| !ctx.is_square(a));
        }
        Ok(ctx)
    }

    /// Builds GF(q) from its order.
    pub fn with_order(q: u64) -> Result<Self, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, e)
    }

    /// Rebuilds a field from its serialized spec, rejecting foreign moduli.
    pub fn from_spec(spec: &FieldSpec) -> Result<Self, FieldError> {
        let ctx = Self::new(spec.p, spec.e)?;
        if ctx.modulus != spec.modulus {
            return Err(FieldError::ModulusMismatch(spec.modulus.clone()));
        }
        Ok(ctx)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            e: self.e,
            modulus: self.modulus.clone(),
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn is_even(&self) -> bool {
        self.p == 2
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    pub fn elem(&self, rep: u64) -> Result<Elem, FieldError> {
        if rep < u64::from(self.q) {
            Ok(Elem(rep as u32))
        } else {
            Err(FieldError::OutOfRange { rep, q: self.q })
        }
    }

    /// The image of an integer under `Z -> GF(p) ⊂ GF(q)`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(i64::from(self.p)) as u32)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.add {
            Some(t) => Elem(u32::from(t[(a.0 * self.q + b.0) as usize])),
            None => Elem(self.add_digits(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        Elem(self.exp[i as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(Elem(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, n: u64) -> Elem {
        if n == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let order = u64::from(self.q - 1);
        let l = u64::from(self.log[a.0 as usize]);
        Elem(self.exp[((l * (n % order)) % order) as usize])
    }

    /// Euler's criterion for odd `q`; every element is a square when `q` is even.
    pub fn is_square(&self, a: Elem) -> bool {
        if self.is_even() || a.is_zero() {
            return true;
        }
        self.pow(a, u64::from((self.q - 1) / 2)) == Elem::ONE
    }

    /// A square root of `a`. For odd `q` the smaller of `±b` is returned.
    pub fn sqrt(&self, a: Elem) -> Result<Elem, FieldError> {
        if self.is_even() {
            // Frobenius inverse
            return Ok(self.pow(a, u64::from(self.q / 2)));
        }
        self.sqrt[a.0 as usize]
            .map(Elem)
            .ok_or(FieldError::NotSquare(a.0))
    }

    /// The smallest-rep nonsquare. Odd `q` only.
    pub fn find_nonsquare(&self) -> Result<Elem, FieldError> {
        self.nonsquare.ok_or(FieldError::NoNonsquare(self.q))
    }

    /// `(c, d)` with `c² + d² = nu`, scanning `c` in rep order.
    pub fn sum_of_two_squares(&self, nu: Elem) -> Result<(Elem, Elem), FieldError> {
        if self.is_even() {
            return Err(FieldError::NoNonsquare(self.q));
        }
        for c in self.elements() {
            let rest = self.sub(nu, self.mul(c, c));
            if self.is_square(rest) {
                return Ok((c, self.sqrt(rest)?));
            }
        }
        unreachable!("every element of an odd-order field is a sum of two squares")
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }
}
