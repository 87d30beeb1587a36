//! Rational functions in one variable with monic, coprime denominators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::field::{Field, FieldElem};
use crate::algebra::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// A truncated Laurent expansion `sum_i coeffs[i] * y^(val + i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub val: i64,
    pub coeffs: Vec<FieldElem>,
}

impl Laurent {
    /// Coefficient of y^e, when inside the computed window.
    pub fn coeff(&self, e: i64) -> FieldElem {
        if e < self.val {
            return FieldElem::ZERO;
        }
        self.coeffs.get((e - self.val) as usize).copied().unwrap_or(FieldElem::ZERO)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RatFunc {
    /// Normalizes num/den; errors on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = num.field().clone();
        if num.is_zero() {
            return Ok(RatFunc::zero(&k));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        let l = k.inv(d.lc()).unwrap();
        if l != k.one() {
            n = n.scale(l);
            d = d.scale(l);
        }
        Ok(RatFunc { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let k = p.field().clone();
        RatFunc { num: p, den: Poly::one(&k) }
    }

    pub fn zero(k: &Field) -> RatFunc {
        RatFunc { num: Poly::zero(k), den: Poly::one(k) }
    }

    pub fn one(k: &Field) -> RatFunc {
        RatFunc::constant(k, k.one())
    }

    pub fn constant(k: &Field, a: FieldElem) -> RatFunc {
        RatFunc::from_poly(Poly::constant(k, a))
    }

    pub fn x(k: &Field) -> RatFunc {
        RatFunc::from_poly(Poly::x(k))
    }

    /// 1/(x - a)
    pub fn simple_pole(k: &Field, a: FieldElem) -> RatFunc {
        RatFunc { num: Poly::one(k), den: Poly::linear(k, a) }
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_constant() && self.num.is_constant()
    }

    /// deg num - deg den; `i64::MIN` for zero.
    pub fn degree(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.num.degree_i() - self.den.degree_i()
    }

    pub fn scale(&self, a: FieldElem) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero(self.field());
        }
        RatFunc { num: self.num.scale(a), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).unwrap()
    }

    /// Substitution x -> g(x).
    pub fn compose(&self, g: &RatFunc) -> Result<RatFunc> {
        let (a, b) = (&g.num, &g.den);
        let dn = self.num.deg().unwrap_or(0);
        let dd = self.den.deg().unwrap_or(0);
        let homog = |f: &Poly, n: usize| -> Poly {
            let k = f.field();
            let mut acc = Poly::zero(k);
            for (i, &c) in f.coeffs().iter().enumerate() {
                let t = &(&a.pow(i as u64) * &b.pow((n - i) as u64)).scale(c);
                acc = &acc + t;
            }
            acc
        };
        let mut n = homog(&self.num, dn);
        let mut d = homog(&self.den, dd);
        if dd > dn {
            n = &n * &b.pow((dd - dn) as u64);
        } else if dn > dd {
            d = &d * &b.pow((dn - dd) as u64);
        }
        RatFunc::new(n, d)
    }

    /// Substitution x -> x^e, done coefficientwise.
    pub fn inflate(&self, e: usize) -> RatFunc {
        RatFunc::new(self.num.inflate(e), self.den.inflate(e)).unwrap()
    }

    /// Inverse of `inflate` when both parts only involve powers of x^e.
    pub fn deflate(&self, e: usize) -> Option<RatFunc> {
        Some(RatFunc::new(self.num.deflate(e)?, self.den.deflate(e)?).unwrap())
    }

    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem) -> RatFunc {
        RatFunc::new(self.num.map_coeffs(&f), self.den.map_coeffs(&f)).unwrap()
    }

    /// Value at a, or `None` at a pole.
    pub fn eval(&self, a: FieldElem) -> Option<FieldElem> {
        let k = self.field();
        let d = self.den.eval(a);
        k.inv(d).map(|i| k.mul(self.num.eval(a), i))
    }

    /// Order of vanishing at a finite point (negative for poles).
    pub fn valuation_at(&self, a: FieldElem) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        self.num.valuation_at(a) as i64 - self.den.valuation_at(a) as i64
    }

    /// Order of vanishing at infinity, in the coordinate 1/x.
    pub fn valuation_at_infinity(&self) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        -self.degree()
    }

    /// Laurent expansion in y = x - a with `n` terms starting at the valuation.
    pub fn laurent_at(&self, a: FieldElem, n: usize) -> Laurent {
        if self.is_zero() {
            return Laurent { val: i64::MAX, coeffs: Vec::new() };
        }
        let ns = self.num.taylor_shift(a);
        let ds = self.den.taylor_shift(a);
        laurent_from_shifted(&ns, &ds, n)
    }

    /// Laurent expansion in u = 1/x at infinity.
    pub fn laurent_at_infinity(&self, n: usize) -> Laurent {
        if self.is_zero() {
            return Laurent { val: i64::MAX, coeffs: Vec::new() };
        }
        let k = self.field();
        let rev = |p: &Poly| Poly::new(k, p.coeffs().iter().rev().copied().collect());
        let nr = rev(&self.num);
        let dr = rev(&self.den);
        let mut l = laurent_from_shifted(&nr, &dr, n);
        l.val += self.den.degree_i() - self.num.degree_i();
        l
    }

    /// Coefficient of 1/(x - a) in the expansion at a.
    pub fn residue_at(&self, a: FieldElem) -> FieldElem {
        let v = self.valuation_at(a);
        if v >= 0 {
            return FieldElem::ZERO;
        }
        self.laurent_at(a, (-v) as usize).coeff(-1)
    }

    /// Coefficients of (x-a)^{-1}, ..., (x-a)^{-order}.
    pub fn principal_part(&self, a: FieldElem, order: usize) -> Vec<FieldElem> {
        let v = self.valuation_at(a);
        if v >= 0 {
            return vec![FieldElem::ZERO; order];
        }
        let l = self.laurent_at(a, (-v) as usize);
        (1..=order as i64).map(|j| l.coeff(-j)).collect()
    }

    pub fn parse(k: &Field, s: &str) -> Result<RatFunc> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut depth = 0;
        let mut split = None;
        for (i, ch) in src.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let strip = |t: &str| -> String {
            let t = t.trim();
            if t.starts_with('(') && t.ends_with(')') && balanced(&t[1..t.len() - 1]) {
                t[1..t.len() - 1].to_string()
            } else {
                t.to_string()
            }
        };
        match split {
            None => Ok(RatFunc::from_poly(Poly::parse(k, &strip(&src))?)),
            Some(i) => {
                let n = Poly::parse(k, &strip(&src[..i]))?;
                let d = Poly::parse(k, &strip(&src[i + 1..]))?;
                RatFunc::new(n, d)
            }
        }
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

fn laurent_from_shifted(ns: &Poly, ds: &Poly, n: usize) -> Laurent {
    let vn = ns.valuation_at_zero();
    let vd = ds.valuation_at_zero();
    let k = ns.field();
    let nn = Poly::new(k, ns.coeffs()[vn..].to_vec());
    let dd = Poly::new(k, ds.coeffs()[vd..].to_vec());
    let series = (&nn.truncate(n) * &dd.inv_series(n).unwrap()).truncate(n);
    let mut coeffs = series.coeffs().to_vec();
    coeffs.resize(n, FieldElem::ZERO);
    Laurent { val: vn as i64 - vd as i64, coeffs }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        let g = self.den.gcd(&o.den);
        let a = self.den.exact_div(&g).unwrap();
        let b = o.den.exact_div(&g).unwrap();
        let n = &(&self.num * &b) + &(&o.num * &a);
        RatFunc::new(n, &a * &o.den).unwrap()
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero(self.field());
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = o.den.exact_div(&g1).unwrap();
        let n2 = o.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        RatFunc::new(&n1 * &n2, &d1 * &d2).unwrap()
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_of_simple_pole() {
        let k = Field::new(7, 2, 0).unwrap();
        let a = k.generator();
        assert_eq!(RatFunc::simple_pole(&k, a).residue_at(a), k.one());
    }

    #[test]
    fn compose_with_frobenius_gives_pth_power_denominator() {
        let k = Field::new(5, 2, 0).unwrap();
        let a = k.add(k.generator(), k.one());
        let f = RatFunc::simple_pole(&k, a);
        let xp = RatFunc::from_poly(Poly::x(&k).pow(5));
        let g = f.compose(&xp).unwrap();
        let root = k.frobenius_pow(a, -1);
        assert_eq!(g.den(), &Poly::linear(&k, root).pow(5));
        assert_eq!(g, f.inflate(5));
    }

    #[test]
    fn product_rule() {
        let k = Field::prime(11).unwrap();
        let f = RatFunc::parse(&k, "(x^2+3)/(x-2)").unwrap();
        let g = RatFunc::parse(&k, "(2*x+1)/(x^2+x+1)").unwrap();
        let lhs = (&f * &g).derivative();
        let rhs = &(&f.derivative() * &g) + &(&f * &g.derivative());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn laurent_at_infinity() {
        let k = Field::prime(7).unwrap();
        let f = RatFunc::parse(&k, "(3*x+1)/(x^2+1)").unwrap();
        let l = f.laurent_at_infinity(3);
        assert_eq!(l.val, 1);
        assert_eq!(l.coeff(1), k.from_i64(3));
        assert_eq!(l.coeff(2), k.from_i64(1));
        assert_eq!(l.coeff(3), k.from_i64(-3));
    }

    #[test]
    fn parse_display_roundtrip() {
        let k = Field::new(3, 2, 0).unwrap();
        let f = RatFunc::parse(&k, "((t+1)*x+2)/(x^2+t)").unwrap();
        assert_eq!(RatFunc::parse(&k, &f.to_string()).unwrap(), f);
        assert!(f.den().is_monic());
    }
}
