//! Dense univariate polynomials over a `Field`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::field::{Field, FieldElem};
use crate::error::{Error, Result};

/// Coefficients low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    k: Field,
    c: Vec<FieldElem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state)
    }
}

impl Poly {
    pub fn new(k: &Field, mut c: Vec<FieldElem>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { k: k.clone(), c }
    }

    pub fn zero(k: &Field) -> Poly {
        Poly { k: k.clone(), c: Vec::new() }
    }

    pub fn one(k: &Field) -> Poly {
        Poly::constant(k, k.one())
    }

    pub fn constant(k: &Field, a: FieldElem) -> Poly {
        Poly::new(k, vec![a])
    }

    pub fn x(k: &Field) -> Poly {
        Poly::new(k, vec![k.zero(), k.one()])
    }

    pub fn monomial(k: &Field, a: FieldElem, e: usize) -> Poly {
        let mut c = vec![k.zero(); e + 1];
        c[e] = a;
        Poly::new(k, c)
    }

    /// x - a
    pub fn linear(k: &Field, a: FieldElem) -> Poly {
        Poly::new(k, vec![k.neg(a), k.one()])
    }

    pub fn from_ints(k: &Field, c: &[i64]) -> Poly {
        Poly::new(k, c.iter().map(|&n| k.from_i64(n)).collect())
    }

    pub fn from_roots(k: &Field, roots: &[FieldElem]) -> Poly {
        roots.iter().fold(Poly::one(k), |acc, &r| &acc * &Poly::linear(k, r))
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.c.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -1.
    pub fn degree_i(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> FieldElem {
        self.c.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == self.k.one()
    }

    pub fn monic(&self) -> Poly {
        match self.k.inv(self.lc()) {
            Some(i) => self.scale(i),
            None => self.clone(),
        }
    }

    pub fn scale(&self, a: FieldElem) -> Poly {
        Poly::new(&self.k, self.c.iter().map(|&x| self.k.mul(x, a)).collect())
    }

    pub fn shift(&self, e: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.k.zero(); e];
        c.extend_from_slice(&self.c);
        Poly::new(&self.k, c)
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        let k = &self.k;
        self.c.iter().rev().fold(k.zero(), |acc, &a| k.add(k.mul(acc, x), a))
    }

    pub fn derivative(&self) -> Poly {
        let k = &self.k;
        let c = self.c.iter().enumerate().skip(1).map(|(i, &a)| k.mul_int(a, i as i64)).collect();
        Poly::new(k, c)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut r = Poly::one(&self.k);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        r
    }

    /// Euclidean division.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = &self.k;
        if self.c.len() < d.c.len() {
            return Ok((Poly::zero(k), self.clone()));
        }
        let dl = d.c.len() - 1;
        let linv = k.inv(d.lc()).unwrap();
        let mut r = self.c.clone();
        let mut qc = vec![k.zero(); r.len() - dl];
        for i in (0..qc.len()).rev() {
            let c = k.mul(r[i + dl], linv);
            qc[i] = c;
            if !c.is_zero() {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[i + j] = k.sub(r[i + j], k.mul(c, dj));
                }
            }
        }
        r.truncate(dl);
        Ok((Poly::new(k, qc), Poly::new(k, r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn exact_div(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::Precondition(format!("{d} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, t) with s*self + t*other = g monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let k = &self.k;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(k), Poly::zero(k));
        let (mut t0, mut t1) = (Poly::zero(k), Poly::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match k.inv(r0.lc()) {
            Some(i) => (r0.scale(i), s0.scale(i), t0.scale(i)),
            None => (r0, s0, t0),
        }
    }

    pub fn powmod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut r = Poly::one(&self.k).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = (&r * &b).rem(m);
            }
            e >>= 1;
            if e > 0 {
                b = (&b * &b).rem(m);
            }
        }
        r
    }

    /// f(g(x)).
    pub fn compose(&self, g: &Poly) -> Poly {
        let k = &self.k;
        self.c.iter().rev().fold(Poly::zero(k), |acc, &a| &(&acc * g) + &Poly::constant(k, a))
    }

    /// f(x^e).
    pub fn inflate(&self, e: usize) -> Poly {
        let k = &self.k;
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![k.zero(); (self.c.len() - 1) * e + 1];
        for (i, &a) in self.c.iter().enumerate() {
            c[i * e] = a;
        }
        Poly::new(k, c)
    }

    /// Inverse of `inflate`, when every exponent is divisible by e.
    pub fn deflate(&self, e: usize) -> Option<Poly> {
        if self.c.iter().enumerate().any(|(i, a)| i % e != 0 && !a.is_zero()) {
            return None;
        }
        Some(Poly::new(&self.k, self.c.iter().step_by(e).copied().collect()))
    }

    /// Applies a field map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem) -> Poly {
        Poly::new(&self.k, self.c.iter().map(|&a| f(a)).collect())
    }

    /// Coefficients of f(y + a) as a polynomial in y.
    pub fn taylor_shift(&self, a: FieldElem) -> Poly {
        let k = &self.k;
        let mut c = self.c.clone();
        let n = c.len();
        if a.is_zero() {
            return self.clone();
        }
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] = k.add(c[j], k.mul(a, c[j + 1]));
            }
        }
        Poly::new(k, c)
    }

    /// Multiplicity of the root a.
    pub fn valuation_at(&self, a: FieldElem) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let sh = self.taylor_shift(a);
        sh.c.iter().position(|x| !x.is_zero()).unwrap()
    }

    /// Largest power of x dividing f.
    pub fn valuation_at_zero(&self) -> usize {
        self.c.iter().position(|x| !x.is_zero()).unwrap_or(usize::MAX)
    }

    /// Truncation modulo x^n.
    pub fn truncate(&self, n: usize) -> Poly {
        Poly::new(&self.k, self.c.iter().take(n).copied().collect())
    }

    /// Power-series inverse modulo x^n; requires a nonzero constant term.
    pub fn inv_series(&self, n: usize) -> Result<Poly> {
        let k = &self.k;
        let c0 = k.inv(self.coeff(0)).ok_or(Error::DivisionByZero)?;
        let mut out = vec![k.zero(); n];
        for i in 0..n {
            let mut acc = if i == 0 { k.one() } else { k.zero() };
            for j in 1..=i.min(self.c.len().saturating_sub(1)) {
                acc = k.sub(acc, k.mul(self.c[j], out[i - j]));
            }
            out[i] = k.mul(acc, c0);
        }
        Ok(Poly::new(k, out))
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let k = &self.k;
        let mut out = String::new();
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let cs = k.format(a);
            let coef = if cs.contains('+') { format!("({cs})") } else { cs };
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if i == 0 {
                coef
            } else if a == k.one() {
                mono
            } else {
                format!("{coef}*{mono}")
            };
            if !out.is_empty() {
                out.push('+');
            }
            out.push_str(&term);
        }
        out
    }

    /// Parses sums of `c*x^e` terms; coefficients use the field syntax and may
    /// be parenthesized.
    pub fn parse(k: &Field, s: &str) -> Result<Poly> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        let mut neg = false;
        for ch in src.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch)
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch)
                }
                '+' | '-' if depth == 0 => {
                    if !cur.is_empty() {
                        terms.push((neg, std::mem::take(&mut cur)));
                    }
                    neg = ch == '-';
                }
                _ => cur.push(ch),
            }
        }
        if !cur.is_empty() {
            terms.push((neg, cur));
        }
        let mut acc = Poly::zero(k);
        for (neg, t) in terms {
            let bad = || Error::Parse(format!("bad polynomial term '{t}'"));
            let (coef, mono) = if let Some(pos) = t.find('x') {
                let c = t[..pos].trim_end_matches('*');
                (c.to_string(), Some(t[pos..].to_string()))
            } else {
                (t.clone(), None)
            };
            let coef = coef.trim_start_matches('(').trim_end_matches(')');
            let c = if coef.is_empty() { k.one() } else { k.parse(coef)? };
            let e = match mono {
                None => 0,
                Some(m) => match &m[1..] {
                    "" => 1,
                    r => r.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?,
                },
            };
            let c = if neg { k.neg(c) } else { c };
            acc = &acc + &Poly::monomial(k, c, e);
        }
        Ok(acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let k = &self.k;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| k.add(self.coeff(i), o.coeff(i))).collect();
        Poly::new(k, c)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let k = &self.k;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| k.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::new(k, c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(&self.k, self.c.iter().map(|&a| self.k.neg(a)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let k = &self.k;
        if self.is_zero() || o.is_zero() {
            return Poly::zero(k);
        }
        let mut c = vec![k.zero(); self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = k.add(c[i + j], k.mul(a, b));
            }
        }
        Poly::new(k, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_roundtrip() {
        let k = Field::new(7, 2, 0).unwrap();
        let a = Poly::from_ints(&k, &[1, 2, 3, 4, 5, 6]);
        let b = Poly::from_ints(&k, &[3, 0, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.deg().unwrap() < 2);
    }

    #[test]
    fn derivative_of_x_to_the_p_vanishes() {
        let k = Field::prime(5).unwrap();
        assert!(Poly::x(&k).pow(5).derivative().is_zero());
    }

    #[test]
    fn taylor_shift_matches_compose() {
        let k = Field::new(5, 2, 0).unwrap();
        let f = Poly::from_ints(&k, &[2, 0, 1, 4, 3]);
        let a = k.generator();
        let g = f.compose(&Poly::new(&k, vec![a, k.one()]));
        assert_eq!(f.taylor_shift(a), g);
    }

    #[test]
    fn xgcd_identity() {
        let k = Field::prime(11).unwrap();
        let a = Poly::from_ints(&k, &[1, 3, 0, 2]);
        let b = Poly::from_ints(&k, &[5, 1, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn parse_render_roundtrip() {
        let k = Field::new(3, 2, 0).unwrap();
        let f = Poly::new(&k, vec![k.generator(), k.zero(), k.from_i64(2), k.add(k.one(), k.generator())]);
        assert_eq!(Poly::parse(&k, &f.to_string()).unwrap(), f);
        assert_eq!(Poly::parse(&k, "x^2-1").unwrap(), Poly::from_ints(&k, &[-1, 0, 1]));
    }
}
