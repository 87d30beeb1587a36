//! Length-two Witt vectors over F_q.

use serde::{Deserialize, Serialize};

use crate::algebra::field::{Field, FieldElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct W2Elem {
    pub a0: FieldElem,
    pub a1: FieldElem,
}

/// Binomial coefficient C(p, i) / p reduced mod p, for 0 < i < p.
fn binom_over_p(p: u32, i: u32) -> i64 {
    // C(p, i)/p = (p-1)! / (i! (p-i)!) computed exactly in u128 for small p.
    let mut num: u128 = 1;
    for j in 0..i {
        num = num * (p - j) as u128 / (j + 1) as u128;
    }
    ((num / p as u128) % p as u128) as i64
}

/// Arithmetic on `W2Elem` values over a fixed field.
#[derive(Clone)]
pub struct W2 {
    k: Field,
    carry: Vec<i64>,
}

impl W2 {
    pub fn new(k: &Field) -> W2 {
        let p = k.p();
        // (X^p + Y^p - (X+Y)^p)/p = -sum_{0<i<p} C(p,i)/p X^i Y^{p-i}
        let carry = (0..p).map(|i| if i == 0 { 0 } else { -binom_over_p(p, i) }).collect();
        W2 { k: k.clone(), carry }
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn zero(&self) -> W2Elem {
        W2Elem { a0: FieldElem::ZERO, a1: FieldElem::ZERO }
    }

    pub fn one(&self) -> W2Elem {
        self.teich(self.k.one())
    }

    pub fn teich(&self, c: FieldElem) -> W2Elem {
        W2Elem { a0: c, a1: FieldElem::ZERO }
    }

    /// Image of an integer under Z -> W2(F_p) = Z/p^2.
    pub fn from_int(&self, n: i64) -> W2Elem {
        let p = self.k.p() as i64;
        let m = n.rem_euclid(p * p);
        let n0 = m % p;
        let n0p = (0..p).fold(1i128, |acc, _| acc * n0 as i128 % (p * p) as i128) as i64;
        let a1 = (m - n0p).rem_euclid(p * p) / p;
        W2Elem { a0: self.k.from_i64(n0), a1: self.k.from_i64(a1) }
    }

    fn carry(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let k = &self.k;
        let p = k.p() as usize;
        let mut acc = k.zero();
        if x.is_zero() || y.is_zero() {
            return acc;
        }
        let mut xi = k.one();
        let mut ypow = vec![k.one(); p + 1];
        for i in 1..=p {
            ypow[i] = k.mul(ypow[i - 1], y);
        }
        for i in 1..p {
            xi = k.mul(xi, x);
            let t = k.mul(xi, ypow[p - i]);
            acc = k.add(acc, k.mul_int(t, self.carry[i]));
        }
        acc
    }

    pub fn add(&self, a: W2Elem, b: W2Elem) -> W2Elem {
        let k = &self.k;
        W2Elem { a0: k.add(a.a0, b.a0), a1: k.add(k.add(a.a1, b.a1), self.carry(a.a0, b.a0)) }
    }

    pub fn neg(&self, a: W2Elem) -> W2Elem {
        W2Elem { a0: self.k.neg(a.a0), a1: self.k.neg(a.a1) }
    }

    pub fn sub(&self, a: W2Elem, b: W2Elem) -> W2Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: W2Elem, b: W2Elem) -> W2Elem {
        let k = &self.k;
        let p = k.p() as u64;
        let t1 = k.mul(k.pow(a.a0, p), b.a1);
        let t2 = k.mul(a.a1, k.pow(b.a0, p));
        W2Elem { a0: k.mul(a.a0, b.a0), a1: k.add(t1, t2) }
    }

    pub fn pow(&self, a: W2Elem, mut e: u64) -> W2Elem {
        let mut r = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn reduce(&self, a: W2Elem) -> FieldElem {
        a.a0
    }

    /// The unique c with p * [c] = a, defined when a reduces to zero. Since
    /// p * (c, 0) = (0, c^p), this is the p-th root of the second component.
    pub fn divide_by_p(&self, a: W2Elem) -> Result<FieldElem> {
        if !a.a0.is_zero() {
            return Err(Error::NotDivisibleByP);
        }
        Ok(self.k.frobenius_pow(a.a1, -1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_times_one_is_v_of_one() {
        for p in [3u32, 5, 7, 11] {
            let k = Field::prime(p).unwrap();
            let w = W2::new(&k);
            let mut acc = w.zero();
            for _ in 0..p {
                acc = w.add(acc, w.one());
            }
            assert_eq!(acc, W2Elem { a0: k.zero(), a1: k.one() });
            assert_eq!(w.divide_by_p(acc).unwrap(), k.one());
            assert_eq!(w.from_int(p as i64), acc);
        }
    }

    #[test]
    fn integer_embedding_is_a_ring_map() {
        let k = Field::prime(5).unwrap();
        let w = W2::new(&k);
        for a in -30..30i64 {
            for b in [-7i64, 3, 11, 24] {
                assert_eq!(w.add(w.from_int(a), w.from_int(b)), w.from_int(a + b));
                assert_eq!(w.mul(w.from_int(a), w.from_int(b)), w.from_int(a * b));
            }
        }
    }

    #[test]
    fn divide_by_p_inverts_multiplication_by_p() {
        let k = Field::new(5, 2, 3).unwrap();
        let w = W2::new(&k);
        let p = w.from_int(5);
        for c in k.elements() {
            assert_eq!(w.divide_by_p(w.mul(p, w.teich(c))).unwrap(), c);
        }
    }

    #[test]
    fn divide_by_p_requires_zero_reduction() {
        let k = Field::prime(7).unwrap();
        let w = W2::new(&k);
        assert_eq!(w.divide_by_p(w.one()), Err(Error::NotDivisibleByP));
    }
}
