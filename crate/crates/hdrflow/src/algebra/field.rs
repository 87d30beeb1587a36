//! Finite fields F_q, q = p^s, p odd.
//!
//! An element is stored as the base-p integer whose digits are its
//! coefficients in the power basis 1, t, ..., t^{s-1}, so equal elements have
//! identical encodings. Fields of order up to 2^20 carry exp/log tables.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TABLE_LIMIT: u64 = 1 << 20;

/// Canonical encoding of an element of some `Field`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The base-p index of the element, in `0..q`.
    pub fn index(self) -> u32 {
        self.0
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub struct FieldCtx {
    p: u32,
    s: u32,
    q: u64,
    seed: u64,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    tables: Option<Tables>,
}

/// Shared handle to a finite field.
#[derive(Clone)]
pub struct Field(Arc<FieldCtx>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[{}]", self.0.p, self.0.s, self.modulus_string())
    }
}

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

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

// Dense polynomials over F_p as coefficient vectors, low degree first.
mod fp {
    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        pow(a, p as u64 - 2, p)
    }

    pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        a = r as u32;
        a
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        trim(&mut v);
        v
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let linv = inv(m[dm], p) as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] as u64 * linv % p as u64;
            if c != 0 {
                for i in 0..=dm {
                    let idx = top - dm + i;
                    r[idx] = ((r[idx] as u64 + (p as u64 - c) * m[i] as u64) % p as u64) as u32;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut v: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut v);
        v
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut r = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mul(&r, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        r
    }

    /// Irreducibility of a monic polynomial of degree s via gcd with x^{p^k} - x.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let s = f.len() - 1;
        if s == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x = vec![0u32, 1];
        let mut xp = x.clone();
        for _ in 1..s {
            xp = powmod(&xp, p as u64, f, p);
            let g = gcd(f, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        // x^{p^s} = x mod f is then automatic for a squarefree f of degree s
        // with no factor of lower degree; check it explicitly anyway.
        xp = powmod(&xp, p as u64, f, p);
        sub(&xp, &x, p).is_empty()
    }
}

impl Field {
    /// Prime field F_p.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, 0)
    }

    /// Deterministic construction of F_{p^s}: the modulus is the first
    /// irreducible monic polynomial met when walking the monic polynomials of
    /// degree s from a seed-dependent starting index.
    pub fn new(p: u32, s: u32, seed: u64) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(Error::CharacteristicTwo(2));
        }
        if s == 0 {
            return Err(Error::InvalidModulus("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(s).filter(|&q| q < (1u64 << 32));
        let q = q.ok_or(Error::FieldTooLarge { p, s })?;
        if s == 1 {
            return Field::with_modulus_seed(p, vec![0, 1], seed);
        }
        let count = q; // monic polynomials of degree s
        let start = if seed == 0 { 0 } else { splitmix(seed) % count };
        for off in 0..count {
            let idx = (start + off) % count;
            let mut f = Vec::with_capacity(s as usize + 1);
            let mut r = idx;
            for _ in 0..s {
                f.push((r % p as u64) as u32);
                r /= p as u64;
            }
            f.push(1);
            if fp::is_irreducible(&f, p) {
                return Field::with_modulus_seed(p, f, seed);
            }
        }
        Err(Error::InvalidModulus("no irreducible polynomial found".into()))
    }

    /// Field defined by an explicit monic modulus (low degree first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Field> {
        Field::with_modulus_seed(p, modulus, 0)
    }

    fn with_modulus_seed(p: u32, modulus: Vec<u32>, seed: u64) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(Error::CharacteristicTwo(2));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is not a reduced monic polynomial")));
        }
        if !fp::is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible")));
        }
        let s = (modulus.len() - 1) as u32;
        let q = (p as u64).checked_pow(s).filter(|&q| q < (1u64 << 32));
        let q = q.ok_or(Error::FieldTooLarge { p, s })?;
        let pow_p = (0..=s).map(|i| (p as u64).pow(i) as u32).collect();
        let mut ctx = FieldCtx { p, s, q, seed, modulus, pow_p, tables: None };
        if q <= TABLE_LIMIT && q > 2 {
            ctx.tables = Some(build_tables(&ctx));
        }
        Ok(Field(Arc::new(ctx)))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn s(&self) -> u32 {
        self.0.s
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn seed(&self) -> u64 {
        self.0.seed
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_string(&self) -> String {
        let m = &self.0.modulus;
        let mut terms = Vec::new();
        for (i, &c) in m.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// The class of t in F_p[t]/(modulus).
    pub fn generator(&self) -> FieldElem {
        if self.0.s == 1 {
            FieldElem((self.0.p - self.0.modulus[0]) % self.0.p)
        } else {
            FieldElem(self.0.p)
        }
    }

    pub fn from_i64(&self, n: i64) -> FieldElem {
        let p = self.0.p as i64;
        FieldElem(n.rem_euclid(p) as u32)
    }

    pub fn from_digits(&self, d: &[u32]) -> FieldElem {
        let p = self.0.p;
        let mut v = 0u32;
        for i in (0..(self.0.s as usize)).rev() {
            v = v * p + d.get(i).copied().unwrap_or(0) % p;
        }
        FieldElem(v)
    }

    pub fn from_index(&self, i: u64) -> FieldElem {
        assert!(i < self.0.q, "index out of range");
        FieldElem(i as u32)
    }

    pub fn digits(&self, a: FieldElem) -> Vec<u32> {
        let p = self.0.p;
        let mut v = a.0;
        (0..self.0.s)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    /// Whether the element lies in the prime field.
    pub fn in_prime_field(&self, a: FieldElem) -> bool {
        a.0 < self.0.p
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.0.q).map(|i| FieldElem(i as u32))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.0.q) as u32)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(1..self.0.q) as u32)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let c = &*self.0;
        if c.s == 1 {
            let r = a.0 + b.0;
            return FieldElem(if r >= c.p { r - c.p } else { r });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        for i in 0..c.s as usize {
            let mut d = x % c.p + y % c.p;
            if d >= c.p {
                d -= c.p;
            }
            out += d * c.pow_p[i];
            x /= c.p;
            y /= c.p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let c = &*self.0;
        if c.s == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { c.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        for i in 0..c.s as usize {
            let d = x % c.p;
            if d != 0 {
                out += (c.p - d) * c.pow_p[i];
            }
            x /= c.p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let c = &*self.0;
        if c.s == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % c.p as u64) as u32);
        }
        match &c.tables {
            Some(t) => {
                let n = c.q as u32 - 1;
                let mut e = t.log[a.0 as usize] + t.log[b.0 as usize];
                if e >= n {
                    e -= n;
                }
                FieldElem(t.exp[e as usize])
            }
            None => slow_mul(c, a, b),
        }
    }

    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn mul_int(&self, a: FieldElem, n: i64) -> FieldElem {
        self.mul(a, self.from_i64(n))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem(1);
        }
        if a.0 == 0 {
            return FieldElem(0);
        }
        let c = &*self.0;
        if let (Some(t), true) = (&c.tables, c.s > 1) {
            let n = c.q - 1;
            let idx = (t.log[a.0 as usize] as u64 * (e % n)) % n;
            return FieldElem(t.exp[idx as usize]);
        }
        let mut r = FieldElem(1);
        let mut b = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        let c = &*self.0;
        if c.s == 1 {
            return Some(FieldElem(fp::inv(a.0, c.p)));
        }
        match &c.tables {
            Some(t) => {
                let n = c.q as u32 - 1;
                let l = t.log[a.0 as usize];
                Some(FieldElem(t.exp[((n - l) % n) as usize]))
            }
            None => Some(self.pow(a, c.q - 2)),
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        let bi = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    /// σ^k(c) = c^{p^k}, with k taken modulo s; negative k gives the inverse
    /// automorphism.
    pub fn frobenius_pow(&self, a: FieldElem, k: i64) -> FieldElem {
        let s = self.0.s as i64;
        let k = k.rem_euclid(s) as u32;
        if k == 0 || a.0 < self.0.p {
            return a;
        }
        self.pow(a, (self.0.p as u64).pow(k))
    }

    /// Square root, if one exists (Tonelli-Shanks).
    pub fn sqrt(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return Some(a);
        }
        let q = self.0.q;
        if self.pow(a, (q - 1) / 2) != self.one() {
            return None;
        }
        let mut e = 0;
        let mut m = q - 1;
        while m.is_multiple_of(2) {
            m /= 2;
            e += 1;
        }
        let mut z = FieldElem(2);
        for i in 2..q {
            z = FieldElem(i as u32);
            if self.pow(z, (q - 1) / 2) != self.one() {
                break;
            }
        }
        let mut c = self.pow(z, m);
        let mut x = self.pow(a, m.div_ceil(2));
        let mut t = self.pow(a, m);
        let mut r = e;
        while t != self.one() {
            let mut i = 0;
            let mut tt = t;
            while tt != self.one() {
                tt = self.square(tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(r - i - 1) {
                b = self.square(b);
            }
            x = self.mul(x, b);
            c = self.square(b);
            t = self.mul(t, c);
            r = i;
        }
        Some(x)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElem) -> u64 {
        assert!(!a.is_zero());
        let mut n = self.0.q - 1;
        for l in prime_factors(n) {
            while n.is_multiple_of(l) && self.pow(a, n / l) == self.one() {
                n /= l;
            }
        }
        n
    }

    /// Polynomial-in-t rendering such as `2*t+1`.
    pub fn format(&self, a: FieldElem) -> String {
        let d = self.digits(a);
        let mut terms = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Parses sums of terms `c`, `t`, `c*t`, `t^k`, `c*t^k`, with optional
    /// leading minus signs. Integers are reduced mod p.
    pub fn parse(&self, s: &str) -> Result<FieldElem> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty field element".into()));
        }
        let mut acc = self.zero();
        let mut rest = src.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1i64, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            acc = self.add(acc, self.mul_int(self.parse_term(term)?, sign));
        }
        Ok(acc)
    }

    fn parse_term(&self, term: &str) -> Result<FieldElem> {
        let bad = || Error::Parse(format!("bad field term '{term}'"));
        let (coef, mono) = match term.split_once('*') {
            Some((c, m)) => (Some(c), Some(m)),
            None if term.starts_with('t') => (None, Some(term)),
            None => (Some(term), None),
        };
        let c = match coef {
            Some(c) => self.from_i64(c.parse::<i64>().map_err(|_| bad())?),
            None => self.one(),
        };
        let m = match mono {
            None => self.one(),
            Some(m) => {
                let e = match m.strip_prefix('t').ok_or_else(bad)? {
                    "" => 1,
                    r => r.strip_prefix('^').ok_or_else(bad)?.parse::<u64>().map_err(|_| bad())?,
                };
                self.pow(self.generator(), e)
            }
        };
        Ok(self.mul(c, m))
    }
}

fn slow_mul(c: &FieldCtx, a: FieldElem, b: FieldElem) -> FieldElem {
    let da = digits_of(c, a.0);
    let db = digits_of(c, b.0);
    let r = fp::rem(&fp::mul(&da, &db, c.p), &c.modulus, c.p);
    let mut v = 0u32;
    for i in (0..r.len()).rev() {
        v = v * c.p + r[i];
    }
    FieldElem(v)
}

fn digits_of(c: &FieldCtx, mut v: u32) -> Vec<u32> {
    let mut d: Vec<u32> = (0..c.s)
        .map(|_| {
            let x = v % c.p;
            v /= c.p;
            x
        })
        .collect();
    fp::trim(&mut d);
    d
}

fn build_tables(c: &FieldCtx) -> Tables {
    let n = c.q - 1;
    let factors = prime_factors(n);
    let slow_pow = |a: FieldElem, mut e: u64| {
        let mut r = FieldElem(1);
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = slow_mul(c, r, b);
            }
            b = slow_mul(c, b, b);
            e >>= 1;
        }
        r
    };
    let g = (1..c.q as u32)
        .map(FieldElem)
        .find(|&g| factors.iter().all(|&l| slow_pow(g, n / l) != FieldElem(1)))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; n as usize];
    let mut log = vec![0u32; c.q as usize];
    let mut x = FieldElem(1);
    for i in 0..n as usize {
        exp[i] = x.0;
        log[x.0 as usize] = i as u32;
        x = slow_mul(c, x, g);
    }
    Tables { exp, log }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_frobenius_inverse_of_t() {
        let k = Field::with_modulus(3, vec![1, 0, 1]).unwrap();
        let t = k.generator();
        let r = k.frobenius_pow(t, -1);
        assert_eq!(k.format(r), "2*t");
        assert_eq!(k.frobenius_pow(r, 1), t);
    }

    #[test]
    fn prime_field_is_frobenius_fixed() {
        let k = Field::new(7, 3, 0).unwrap();
        for c in 0..7 {
            let a = k.from_i64(c);
            assert_eq!(k.frobenius_pow(a, 2), a);
        }
    }

    #[test]
    fn x_power_q_is_identity() {
        let k = Field::new(5, 2, 3).unwrap();
        for a in k.elements() {
            assert_eq!(k.frobenius_pow(a, 2), a);
        }
    }

    #[test]
    fn seeded_modulus_is_reproducible() {
        let a = Field::new(3, 2, 0).unwrap();
        let b = Field::new(3, 2, 0).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        // no root in F_3
        let m = a.modulus();
        for x in 0..3u32 {
            let v = (m[0] + m[1] * x + m[2] * x * x) % 3;
            assert_ne!(v, 0);
        }
    }

    #[test]
    fn rejects_characteristic_two() {
        assert_eq!(Field::new(2, 3, 0).unwrap_err(), Error::CharacteristicTwo(2));
        assert!(matches!(Field::new(9, 1, 0), Err(Error::NotPrime(9))));
    }

    #[test]
    fn slow_and_table_multiplication_agree() {
        let k = Field::new(5, 3, 1).unwrap();
        for a in k.elements().step_by(7) {
            for b in k.elements().step_by(11) {
                assert_eq!(k.mul(a, b), slow_mul(&k.0, a, b));
            }
        }
    }

    #[test]
    fn format_parse_roundtrip() {
        let k = Field::new(7, 3, 5).unwrap();
        for a in k.elements() {
            assert_eq!(k.parse(&k.format(a)).unwrap(), a);
        }
        assert_eq!(k.parse("-1").unwrap(), k.from_i64(6));
    }

    #[test]
    fn square_roots() {
        let k = Field::new(13, 2, 0).unwrap();
        for a in k.elements() {
            let sq = k.square(a);
            let r = k.sqrt(sq).unwrap();
            assert_eq!(k.square(r), sq);
        }
    }
}
