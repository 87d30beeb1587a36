//! Legendre curves y^2 = x(x-1)(x-lambda), division polynomials, brute-force
//! torsion, and the torsion/periodicity experiment on the N = 2 component.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{roots, Field, FieldElem, Poly};
use crate::error::{Error, Result};
use crate::flow::{embed_line, orbit, ModuliPoint, TwistMode};
use crate::parabolic::{MarkedLine, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EcPoint {
    Zero,
    Affine(FieldElem, FieldElem),
}

#[derive(Clone, Debug)]
pub struct LegendreCurve {
    pub field: Field,
    pub lambda: FieldElem,
}

/// f * (2y)^e, with e in {0, 1}.
#[derive(Clone, Debug)]
struct YPoly {
    f: Poly,
    e: u8,
}

impl LegendreCurve {
    pub fn new(k: &Field, lambda: FieldElem) -> Result<LegendreCurve> {
        if lambda.is_zero() || lambda == k.one() {
            return Err(Error::Precondition("lambda must differ from 0 and 1".into()));
        }
        Ok(LegendreCurve { field: k.clone(), lambda })
    }

    /// The same curve over another field of the same characteristic.
    pub fn base_change(&self, k: &Field) -> Result<LegendreCurve> {
        if !self.field.in_prime_field(self.lambda) && &self.field != k {
            return Err(Error::Precondition("only prime-field parameters can be moved".into()));
        }
        let l = if &self.field == k { self.lambda } else { k.from_i64(self.field.digits(self.lambda).first().copied().unwrap_or(0) as i64) };
        LegendreCurve::new(k, l)
    }

    /// x(x - 1)(x - lambda).
    pub fn cubic(&self) -> Poly {
        let k = &self.field;
        Poly::from_roots(k, &[k.zero(), k.one(), self.lambda])
    }

    fn a2(&self) -> FieldElem {
        self.field.neg(self.field.add(self.field.one(), self.lambda))
    }

    fn a4(&self) -> FieldElem {
        self.lambda
    }

    pub fn is_on_curve(&self, p: EcPoint) -> bool {
        match p {
            EcPoint::Zero => true,
            EcPoint::Affine(x, y) => self.field.square(y) == self.cubic().eval(x),
        }
    }

    pub fn neg(&self, p: EcPoint) -> EcPoint {
        match p {
            EcPoint::Zero => EcPoint::Zero,
            EcPoint::Affine(x, y) => EcPoint::Affine(x, self.field.neg(y)),
        }
    }

    pub fn add(&self, p: EcPoint, q: EcPoint) -> EcPoint {
        let k = &self.field;
        let (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) = (p, q) else {
            return if p == EcPoint::Zero { q } else { p };
        };
        let s = if x1 == x2 {
            if k.add(y1, y2).is_zero() {
                return EcPoint::Zero;
            }
            let num = k.add(k.add(k.mul_int(k.square(x1), 3), k.mul(k.mul_int(self.a2(), 2), x1)), self.a4());
            k.div(num, k.mul_int(y1, 2)).unwrap()
        } else {
            k.div(k.sub(y2, y1), k.sub(x2, x1)).unwrap()
        };
        let x3 = k.sub(k.sub(k.sub(k.square(s), self.a2()), x1), x2);
        let y3 = k.sub(k.mul(s, k.sub(x1, x3)), y1);
        EcPoint::Affine(x3, y3)
    }

    pub fn mul(&self, n: u64, p: EcPoint) -> EcPoint {
        let mut acc = EcPoint::Zero;
        let mut b = p;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(acc, b);
            }
            b = self.add(b, b);
            e >>= 1;
        }
        acc
    }

    /// Exact order if at most `limit`.
    pub fn order_upto(&self, p: EcPoint, limit: u64) -> Option<u64> {
        let mut acc = p;
        for n in 1..=limit {
            if acc == EcPoint::Zero {
                return Some(n);
            }
            acc = self.add(acc, p);
        }
        None
    }

    /// All points over the field of the curve, the zero point first.
    pub fn points(&self) -> Vec<EcPoint> {
        let k = &self.field;
        let f = self.cubic();
        let mut out = vec![EcPoint::Zero];
        for x in k.elements() {
            let v = f.eval(x);
            if v.is_zero() {
                out.push(EcPoint::Affine(x, v));
            } else if let Some(y) = k.sqrt(v) {
                out.push(EcPoint::Affine(x, y));
                out.push(EcPoint::Affine(x, k.neg(y)));
            }
        }
        out
    }

    /// #C(F_p) = p + 1.
    pub fn is_supersingular(&self) -> Result<bool> {
        let k = &self.field;
        let kp = Field::prime(k.p())?;
        let c = self.base_change(&kp)?;
        Ok(c.points().len() as u64 == k.p() as u64 + 1)
    }

    fn ymul(&self, a: &YPoly, b: &YPoly) -> YPoly {
        let f = &a.f * &b.f;
        if a.e + b.e == 2 {
            let k = &self.field;
            YPoly { f: &f * &self.cubic().scale(k.from_i64(4)), e: 0 }
        } else {
            YPoly { f, e: a.e + b.e }
        }
    }

    fn psi(&self, n: usize, memo: &mut Vec<Option<YPoly>>) -> YPoly {
        if let Some(v) = &memo[n] {
            return v.clone();
        }
        let k = &self.field;
        let (b2, b4, b8) = {
            let a2 = self.a2();
            let a4 = self.a4();
            (k.mul_int(a2, 4), k.mul_int(a4, 2), k.neg(k.square(a4)))
        };
        let v = match n {
            0 => YPoly { f: Poly::zero(k), e: 0 },
            1 => YPoly { f: Poly::one(k), e: 0 },
            2 => YPoly { f: Poly::one(k), e: 1 },
            3 => YPoly {
                f: Poly::new(k, vec![b8, k.zero(), k.mul_int(b4, 3), b2, k.from_i64(3)]),
                e: 0,
            },
            4 => YPoly {
                f: Poly::new(
                    k,
                    vec![k.mul(b4, b8), k.mul(b2, b8), k.mul_int(b8, 10), k.zero(), k.mul_int(b4, 5), b2, k.from_i64(2)],
                ),
                e: 1,
            },
            _ if n % 2 == 1 => {
                let m = n / 2;
                let t1 = self.ymul(&self.psi(m + 2, memo), &self.cube(&self.psi(m, memo)));
                let t2 = self.ymul(&self.psi(m - 1, memo), &self.cube(&self.psi(m + 1, memo)));
                YPoly { f: &t1.f - &t2.f, e: t1.e }
            }
            _ => {
                let m = n / 2;
                let sq = |a: &YPoly| self.ymul(a, a);
                let t1 = self.ymul(&self.psi(m + 2, memo), &sq(&self.psi(m - 1, memo)));
                let t2 = self.ymul(&self.psi(m - 2, memo), &sq(&self.psi(m + 1, memo)));
                let inner = YPoly { f: &t1.f - &t2.f, e: t1.e };
                let full = self.ymul(&self.psi(m, memo), &inner);
                let f = full.f.exact_div(&self.cubic().scale(k.from_i64(4))).expect("psi_2 divides psi_2m");
                YPoly { f, e: 1 }
            }
        };
        memo[n] = Some(v.clone());
        v
    }

    fn cube(&self, a: &YPoly) -> YPoly {
        self.ymul(&self.ymul(a, a), a)
    }

    /// Polynomial in x vanishing exactly at x-coordinates of nonzero
    /// n-torsion points; for even n the cubic factor accounts for 2-torsion.
    pub fn division_polynomial(&self, n: usize) -> Poly {
        let k = &self.field;
        if n == 0 {
            return Poly::zero(k);
        }
        let mut memo = vec![None; n + 3];
        let v = self.psi(n, &mut memo);
        if v.e == 1 {
            &v.f * &self.cubic()
        } else {
            v.f
        }
    }

    /// x-coordinates of points of order 2..=n_max, from division polynomials.
    pub fn torsion_x_from_division(&self, n_max: usize) -> BTreeSet<FieldElem> {
        let f = self.cubic();
        let mut out = BTreeSet::new();
        for n in 2..=n_max {
            let psi = self.division_polynomial(n);
            if psi.is_zero() {
                continue;
            }
            for x in roots(&psi, 0) {
                let v = f.eval(x);
                if v.is_zero() || self.field.sqrt(v).is_some() {
                    out.insert(x);
                }
            }
        }
        out
    }

    /// x-coordinates of rational points of order 2..=n_max, by enumeration.
    pub fn torsion_x_brute(&self, n_max: usize) -> BTreeSet<FieldElem> {
        self.points()
            .into_iter()
            .filter_map(|p| match p {
                EcPoint::Affine(x, _) => self.order_upto(p, n_max as u64).map(|_| x),
                EcPoint::Zero => None,
            })
            .collect()
    }
}

/// x-coordinates of points of order 2..=n_max rational over F_{p^e}.
pub fn torsion_x_set(curve: &LegendreCurve, n_max: usize, e: u32) -> Result<Vec<FieldElem>> {
    let k0 = &curve.field;
    let k = if k0.s() == e { k0.clone() } else { Field::new(k0.p(), e, k0.seed())? };
    let c = curve.base_change(&k)?;
    Ok(c.torsion_x_from_division(n_max).into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionRow {
    pub z: String,
    pub order: Option<u64>,
    pub period: Option<usize>,
    pub preperiod: Option<usize>,
    pub notes: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionReport {
    pub p: u32,
    pub e: u32,
    pub lambda: String,
    pub supersingular: bool,
    pub torsion: Vec<TorsionRow>,
    pub complement: Vec<TorsionRow>,
}

impl TorsionReport {
    pub fn all_torsion_periodic(&self) -> bool {
        self.torsion.iter().all(|r| r.period.is_some())
    }
}

fn run_orbit(line: &MarkedLine, z: FieldElem, budget: usize, mode: TwistMode) -> (Option<usize>, Option<usize>, String) {
    let pt = match ModuliPoint::from_p1(line, 1, Point::Finite(z)) {
        Ok(pt) => pt,
        Err(e) => return (None, None, e.to_string()),
    };
    match orbit(&pt, budget, mode) {
        Ok(rec) if rec.period.is_some() => (rec.period, rec.preperiod, String::new()),
        Ok(_) => (None, None, "budget exhausted".into()),
        Err(e) => (None, None, e.to_string()),
    }
}

/// For each z among the torsion x-coordinates over F_{p^e}, runs the orbit
/// of the N = 2 point whose Higgs field vanishes at z.
pub fn torsion_periodicity_check(
    line: &MarkedLine,
    n_max: usize,
    e: u32,
    budget: usize,
    complement: usize,
    mode: TwistMode,
) -> Result<TorsionReport> {
    let k0 = line.field();
    if line.n() != 2 || line.m() != 4 {
        return Err(Error::Precondition("torsion check needs N = 2 and four marked points".into()));
    }
    let fin = line.finite_points();
    let lambda = fin
        .iter()
        .copied()
        .find(|&a| !a.is_zero() && a != k0.one())
        .ok_or_else(|| Error::Precondition("line must be {0, 1, lambda, inf}".into()))?;
    let curve0 = LegendreCurve::new(k0, lambda)?;
    let k = if k0.s() == e { k0.clone() } else { Field::new(k0.p(), e, k0.seed())? };
    let curve = curve0.base_change(&k)?;
    let line_e = embed_line(line, &k)?;
    let pts = curve.points();
    let order_of = |x: FieldElem| {
        pts.iter()
            .find(|p| matches!(p, EcPoint::Affine(px, _) if *px == x))
            .and_then(|&p| curve.order_upto(p, n_max as u64))
    };
    let tors = curve.torsion_x_from_division(n_max);
    let mut rows = Vec::new();
    for &z in &tors {
        let (period, preperiod, notes) = run_orbit(&line_e, z, budget, mode);
        rows.push(TorsionRow { z: k.format(z), order: order_of(z), period, preperiod, notes });
    }
    let mut others: Vec<FieldElem> = k.elements().filter(|z| !tors.contains(z)).collect();
    others.shuffle(&mut ChaCha8Rng::seed_from_u64(k.seed() ^ 0x7045));
    let mut comp = Vec::new();
    for &z in others.iter().take(complement) {
        let (period, preperiod, notes) = run_orbit(&line_e, z, budget, mode);
        comp.push(TorsionRow { z: k.format(z), order: None, period, preperiod, notes });
    }
    Ok(TorsionReport {
        p: k.p(),
        e,
        lambda: k0.format(lambda),
        supersingular: curve0.is_supersingular()?,
        torsion: rows,
        complement: comp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_torsion() {
        let k = Field::prime(7).unwrap();
        let c = LegendreCurve::new(&k, k.from_i64(3)).unwrap();
        let mut r = roots(&c.division_polynomial(2), 0);
        r.sort();
        assert_eq!(r, vec![k.zero(), k.one(), k.from_i64(3)]);
        assert!(c.division_polynomial(1).is_constant());
    }

    #[test]
    fn group_law_on_all_points() {
        let k = Field::prime(11).unwrap();
        let c = LegendreCurve::new(&k, k.from_i64(5)).unwrap();
        let pts = c.points();
        for &p in &pts {
            for &q in pts.iter().step_by(3) {
                assert!(c.is_on_curve(c.add(p, q)));
                assert_eq!(c.add(p, q), c.add(q, p));
            }
            assert_eq!(c.mul(pts.len() as u64, p), EcPoint::Zero);
        }
    }

    #[test]
    fn division_matches_brute_force() {
        for p in [5u32, 7, 11, 13] {
            for e in [1u32, 2] {
                let k = Field::new(p, e, 0).unwrap();
                for l in [2i64, 3] {
                    let c = LegendreCurve::new(&k, k.from_i64(l)).unwrap();
                    for n in 2..=7 {
                        assert_eq!(c.torsion_x_from_division(n), c.torsion_x_brute(n), "p={p} e={e} l={l} n={n}");
                    }
                }
            }
        }
    }
}
