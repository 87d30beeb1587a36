//! Split-form parabolic bundles on the marked projective line and the cyclic
//! cover u -> u^N branched over 0 and infinity.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, FieldElem, Poly};
use crate::error::{Error, Result};

/// A point of P^1 over the base field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Point {
    Finite(FieldElem),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<FieldElem> {
        match self {
            Point::Finite(a) => Some(a),
            Point::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        self == Point::Infinity
    }

    pub fn format(self, k: &Field) -> String {
        match self {
            Point::Finite(a) => k.format(a),
            Point::Infinity => "inf".into(),
        }
    }

    pub fn parse(k: &Field, s: &str) -> Result<Point> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Point::Infinity),
            t => Ok(Point::Finite(k.parse(t)?)),
        }
    }

    /// Applies a field automorphism to a finite point.
    pub fn map(self, f: impl Fn(FieldElem) -> FieldElem) -> Point {
        match self {
            Point::Finite(a) => Point::Finite(f(a)),
            Point::Infinity => Point::Infinity,
        }
    }
}

/// P^1 with m marked points and weight denominator N. The weighted point is
/// always infinity after normalization.
#[derive(Clone, PartialEq, Eq)]
pub struct MarkedLine {
    field: Field,
    points: Vec<Point>,
    n: u32,
    weight_point: usize,
}

impl fmt::Debug for MarkedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| p.format(&self.field)).collect();
        write!(f, "MarkedLine(N={}, points=[{}], weighted={})", self.n, pts.join(", "), self.weight_point)
    }
}

impl MarkedLine {
    pub fn new(field: &Field, points: Vec<Point>, n: u32, weight_point: usize) -> Result<MarkedLine> {
        if points.len() < 3 {
            return Err(Error::Precondition("at least three marked points are required".into()));
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::Precondition("marked points must be distinct".into()));
                }
            }
        }
        if n == 0 || (n as u64).gcd(&(field.p() as u64)) != 1 {
            return Err(Error::Precondition(format!("N = {n} must be prime to p = {}", field.p())));
        }
        if weight_point >= points.len() {
            return Err(Error::Precondition("weight point index out of range".into()));
        }
        Ok(MarkedLine { field: field.clone(), points, n, weight_point })
    }

    /// Moves the weighted point to infinity by x -> 1/(x - x_1) when needed.
    pub fn normalized(&self) -> MarkedLine {
        let Point::Finite(c) = self.points[self.weight_point] else {
            return self.clone();
        };
        let k = &self.field;
        let points = self
            .points
            .iter()
            .map(|&pt| match pt {
                Point::Infinity => Point::Finite(k.zero()),
                Point::Finite(a) if a == c => Point::Infinity,
                Point::Finite(a) => Point::Finite(k.inv(k.sub(a, c)).unwrap()),
            })
            .collect();
        MarkedLine { field: k.clone(), points, n: self.n, weight_point: self.weight_point }
    }

    /// The line with D = {inf, 0, 1, lambda}, weights at infinity.
    pub fn legendre(field: &Field, lambda: FieldElem, n: u32) -> Result<MarkedLine> {
        let pts = vec![Point::Infinity, Point::Finite(field.zero()), Point::Finite(field.one()), Point::Finite(lambda)];
        MarkedLine::new(field, pts, n, 0)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn weight_point(&self) -> usize {
        self.weight_point
    }

    pub fn is_marked(&self, pt: Point) -> bool {
        self.points.contains(&pt)
    }

    pub fn has_infinity(&self) -> bool {
        self.points.contains(&Point::Infinity)
    }

    pub fn finite_points(&self) -> Vec<FieldElem> {
        self.points.iter().filter_map(|p| p.finite()).collect()
    }

    /// prod (x - a) over the finite marked points.
    pub fn finite_divisor_poly(&self) -> Poly {
        Poly::from_roots(&self.field, &self.finite_points())
    }

    /// Applies a field automorphism to all points.
    pub fn map_points(&self, f: impl Fn(FieldElem) -> FieldElem) -> MarkedLine {
        MarkedLine {
            field: self.field.clone(),
            points: self.points.iter().map(|p| p.map(&f)).collect(),
            n: self.n,
            weight_point: self.weight_point,
        }
    }

    /// Same marked set with a different weight denominator.
    pub fn with_n(&self, n: u32) -> Result<MarkedLine> {
        MarkedLine::new(&self.field, self.points.clone(), n, self.weight_point)
    }

    /// Equality of marked sets, ignoring the order of the points.
    pub fn same_points(&self, other: &MarkedLine) -> bool {
        let mut a = self.points.clone();
        let mut b = other.points.clone();
        a.sort();
        b.sort();
        a == b
    }
}

fn frac(r: Rational64) -> Rational64 {
    r - r.floor()
}

/// A parabolic line bundle: the lattice O(deg) with weights in (0,1) at some
/// marked points. Zero weights are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParLine {
    pub deg: i64,
    pub weights: BTreeMap<Point, Rational64>,
}

impl ParLine {
    /// Canonical form: weights are reduced into [0,1) and integer parts are
    /// carried into the degree.
    pub fn new(deg: i64, weights: impl IntoIterator<Item = (Point, Rational64)>) -> ParLine {
        let mut d = deg;
        let mut w = BTreeMap::new();
        for (pt, r) in weights {
            let entry: &mut Rational64 = w.entry(pt).or_insert_with(Rational64::zero);
            *entry += r;
        }
        let mut out = BTreeMap::new();
        for (pt, r) in w {
            d += r.floor().to_integer();
            let f = frac(r);
            if !f.is_zero() {
                out.insert(pt, f);
            }
        }
        ParLine { deg: d, weights: out }
    }

    pub fn trivial() -> ParLine {
        ParLine { deg: 0, weights: BTreeMap::new() }
    }

    /// O(r * pt) for a rational r.
    pub fn at_point(pt: Point, r: Rational64) -> ParLine {
        ParLine::new(0, [(pt, r)])
    }

    /// O(r * inf).
    pub fn at_infinity(r: Rational64) -> ParLine {
        ParLine::at_point(Point::Infinity, r)
    }

    pub fn weight(&self, pt: Point) -> Rational64 {
        self.weights.get(&pt).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn par_degree(&self) -> Rational64 {
        self.weights.values().fold(Rational64::from_integer(self.deg), |acc, w| acc + w)
    }

    pub fn dual(&self) -> ParLine {
        ParLine::new(-self.deg, self.weights.iter().map(|(&p, &w)| (p, -w)))
    }

    /// Twist of the lattice by an integer degree.
    pub fn twist(&self, k: i64) -> ParLine {
        ParLine { deg: self.deg + k, weights: self.weights.clone() }
    }
}

/// Direct sum of parabolic lines.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParBundle {
    pub summands: Vec<ParLine>,
}

impl ParBundle {
    pub fn new(summands: Vec<ParLine>) -> ParBundle {
        ParBundle { summands }
    }

    pub fn trivial(rank: usize) -> ParBundle {
        ParBundle { summands: vec![ParLine::trivial(); rank] }
    }

    /// O(lambda inf) + O(-lambda inf).
    pub fn component(lambda: Rational64) -> ParBundle {
        ParBundle { summands: vec![ParLine::at_infinity(lambda), ParLine::at_infinity(-lambda)] }
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    /// Summands sorted, for comparisons up to reordering.
    pub fn sorted(&self) -> ParBundle {
        let mut s = self.summands.clone();
        s.sort();
        ParBundle { summands: s }
    }
}

pub fn par_degree(v: &ParBundle) -> Rational64 {
    v.summands.iter().fold(Rational64::zero(), |acc, l| acc + l.par_degree())
}

pub fn par_tensor(a: &ParLine, b: &ParLine) -> ParLine {
    let ws = a.weights.iter().chain(b.weights.iter()).map(|(&p, &w)| (p, w));
    ParLine::new(a.deg + b.deg, ws)
}

/// Tensor of a bundle with a line, summandwise.
pub fn par_tensor_bundle(v: &ParBundle, l: &ParLine) -> ParBundle {
    ParBundle { summands: v.summands.iter().map(|s| par_tensor(s, l)).collect() }
}

/// Degree of the lattice of parabolic morphisms a -> b: a local section may
/// only be nonzero at a point where the source weight exceeds the target
/// weight if it vanishes there.
pub fn par_hom_degree(a: &ParLine, b: &ParLine) -> i64 {
    let mut d = b.deg - a.deg;
    let pts: std::collections::BTreeSet<Point> = a.weights.keys().chain(b.weights.keys()).copied().collect();
    for pt in pts {
        if a.weight(pt) > b.weight(pt) {
            d -= 1;
        }
    }
    d
}

/// Dimension of the space of parabolic morphisms a -> b.
pub fn par_hom_dim(a: &ParLine, b: &ParLine) -> usize {
    (par_hom_degree(a, b) + 1).max(0) as usize
}

/// Omega^1(log D) on the line with m marked points, as a line bundle.
pub fn log_forms(line: &MarkedLine) -> ParLine {
    ParLine { deg: line.m() as i64 - 2, weights: BTreeMap::new() }
}

/// A mu_N-linearized line bundle O(inf_order inf' + zero_order 0') on the
/// cover, with the standard linearization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquivLine {
    pub inf_order: i64,
    pub zero_order: i64,
}

impl EquivLine {
    pub fn degree(&self) -> i64 {
        self.inf_order + self.zero_order
    }
}

/// Equivariant split bundle on the cover.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoverBundle {
    pub n: u32,
    pub summands: Vec<EquivLine>,
}

impl CoverBundle {
    /// The underlying bundle on the cover; its parabolic structure is trivial.
    pub fn underlying(&self) -> ParBundle {
        ParBundle { summands: self.summands.iter().map(|l| ParLine { deg: l.degree(), weights: BTreeMap::new() }).collect() }
    }
}

fn check_cover_weights(line: &MarkedLine, v: &ParBundle, n: u32) -> Result<()> {
    let zero = Point::Finite(line.field().zero());
    for l in &v.summands {
        for (&pt, w) in &l.weights {
            if pt != Point::Infinity && pt != zero {
                return Err(Error::InvalidWeights("weights must sit over the branch points 0 and infinity".into()));
            }
            if !line.is_marked(pt) {
                return Err(Error::InvalidWeights(format!("weight at unmarked point {}", pt.format(line.field()))));
            }
            if (w * Rational64::from_integer(n as i64)).denom() != &1 {
                return Err(Error::InvalidWeights(format!("weight {w} does not have denominator dividing {n}")));
            }
        }
    }
    Ok(())
}

/// Pullback along u -> u^N: O(r inf) goes to O(N r inf'), and likewise over 0.
pub fn cyclic_pullback_bundle(line: &MarkedLine, v: &ParBundle, n: u32) -> Result<CoverBundle> {
    check_cover_weights(line, v, n)?;
    let zero = Point::Finite(line.field().zero());
    let nn = Rational64::from_integer(n as i64);
    let summands = v
        .summands
        .iter()
        .map(|l| {
            let inf = (Rational64::from_integer(l.deg) + l.weight(Point::Infinity)) * nn;
            let z = l.weight(zero) * nn;
            EquivLine { inf_order: inf.to_integer(), zero_order: z.to_integer() }
        })
        .collect();
    Ok(CoverBundle { n, summands })
}

/// The kernel-filtration construction of the parabolic pullback. Starting
/// from f^*(V_0(D)) for the branch part D of the weighted divisor, each
/// weight in increasing order cuts the summands carrying it by the quotient
/// of length N - N*weight at the preimage point.
pub fn biswas_pullback(line: &MarkedLine, v: &ParBundle, n: u32) -> Result<CoverBundle> {
    check_cover_weights(line, v, n)?;
    let zero = Point::Finite(line.field().zero());
    let nn = n as i64;
    let branch: Vec<Point> = [Point::Infinity, zero].into_iter().filter(|p| line.is_marked(*p)).collect();
    // local pole orders allowed at (infinity', 0') for each summand in E^0
    let mut orders: Vec<[i64; 2]> = v
        .summands
        .iter()
        .map(|l| {
            let mut o = [nn * l.deg, 0];
            for (i, pt) in [Point::Infinity, zero].iter().enumerate() {
                if branch.contains(pt) {
                    o[i] += nn; // f^*O(D) has order k N = N at the ramified point
                }
            }
            o
        })
        .collect();
    for (i, pt) in [Point::Infinity, zero].iter().enumerate() {
        if !branch.contains(pt) {
            continue;
        }
        let mut alphas: Vec<Rational64> = v.summands.iter().map(|l| l.weight(*pt)).collect();
        alphas.sort();
        alphas.dedup();
        for alpha in alphas {
            let m_j = (alpha * Rational64::from_integer(nn)).to_integer();
            let quotient_len = nn - m_j;
            for (s, l) in v.summands.iter().enumerate() {
                if l.weight(*pt) == alpha {
                    orders[s][i] -= quotient_len;
                }
            }
        }
    }
    let summands = orders.into_iter().map(|o| EquivLine { inf_order: o[0], zero_order: o[1] }).collect();
    Ok(CoverBundle { n, summands })
}

/// mu_N-invariant pushforward, quasi-inverse to `cyclic_pullback_bundle`.
pub fn cyclic_pushforward(line: &MarkedLine, w: &CoverBundle) -> Result<ParBundle> {
    let n = w.n as i64;
    let zero = Point::Finite(line.field().zero());
    let summands = w
        .summands
        .iter()
        .map(|l| {
            if l.zero_order.rem_euclid(n) != 0 && !line.is_marked(zero) {
                return Err(Error::NonEquivariant("nontrivial isotropy at an unmarked branch point".into()));
            }
            if !line.has_infinity() && l.inf_order.rem_euclid(n) != 0 {
                return Err(Error::NonEquivariant("nontrivial isotropy at an unmarked branch point".into()));
            }
            Ok(ParLine::new(
                0,
                [(Point::Infinity, Rational64::new(l.inf_order, n)), (zero, Rational64::new(l.zero_order, n))],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParBundle { summands })
}

/// The weight pair rule helper: fractional part.
pub fn fractional(r: Rational64) -> Rational64 {
    frac(r)
}

/// Whether r lies in (1/N)Z.
pub fn in_lattice(r: Rational64, n: u32) -> bool {
    (r * Rational64::from_integer(n as i64)).is_integer()
}

#[allow(dead_code)]
fn one() -> Rational64 {
    Rational64::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn degree_with_weight() {
        let l = ParLine::new(2, [(Point::Infinity, r(1, 5))]);
        assert_eq!(par_degree(&ParBundle::new(vec![l])), r(11, 5));
    }

    #[test]
    fn component_has_degree_zero() {
        let v = ParBundle::component(r(1, 5));
        assert_eq!(v.summands[1], ParLine::new(-1, [(Point::Infinity, r(4, 5))]));
        assert_eq!(par_degree(&v), r(0, 1));
    }

    #[test]
    fn tensor_carries() {
        let a = ParLine::at_infinity(r(3, 5));
        let b = ParLine::at_infinity(r(4, 5));
        assert_eq!(par_tensor(&a, &b), ParLine::new(1, [(Point::Infinity, r(2, 5))]));
    }

    #[test]
    fn hom_dimensions_for_n5() {
        let k = Field::prime(11).unwrap();
        let line = MarkedLine::legendre(&k, k.from_i64(3), 5).unwrap();
        let omega = log_forms(&line);
        for (d, dim) in [(1, 2), (2, 2), (3, 1), (4, 1)] {
            let lam = r(d, 5);
            let src = ParLine::at_infinity(lam);
            let dst = par_tensor(&ParLine::at_infinity(-lam), &omega);
            assert_eq!(par_hom_dim(&src, &dst), dim, "d = {d}");
        }
    }

    #[test]
    fn pullback_of_fractional_twist() {
        let k = Field::prime(7).unwrap();
        let line = MarkedLine::legendre(&k, k.from_i64(3), 5).unwrap();
        let v = ParBundle::new(vec![ParLine::at_infinity(r(2, 5))]);
        let up = cyclic_pullback_bundle(&line, &v, 5).unwrap();
        assert_eq!(up.summands, vec![EquivLine { inf_order: 2, zero_order: 0 }]);
        assert_eq!(biswas_pullback(&line, &v, 5).unwrap(), up);
        assert_eq!(cyclic_pushforward(&line, &up).unwrap(), v);
    }
}
