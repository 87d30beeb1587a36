//! The mod-p inverse Cartier transform for nilpotent Higgs fields of rank at
//! most two on the marked line.
//!
//! The transform takes data on the marked set P to data on sigma^-1(P): the
//! Higgs matrix is pulled back along the relative Frobenius x -> x^p without
//! touching coefficients, and the charts sit at the p-th roots of the marked
//! points. With `sigma_transport` every coefficient of the result is pushed
//! through sigma, which lands back on P and amounts to the absolute Frobenius
//! pullback.
//!
//! Each finite chart center a carries the lift [a]^p + (x - [a])^p of
//! Frobenius, written as x^p + p S_a(x), and infinity carries x^p (S = 0).
//! The local connection on chart a is Theta(x^p) (x - a)^(p-1) dx and chart
//! coordinates are related by s_a = (1 + (S_b - S_a) Theta(x^p)) s_b.
//!
//! The p-curvature of the result, as a function of d/dx, is -Theta(x^p) in
//! the reference frame.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Mat, Poly, RatFunc, W2Elem, W2};
use crate::connections::{
    find_gauge, pullback_conn_cyclic, pullback_higgs_cyclic, residue, splitting_type, ChartTransition, CyclicCover,
    Gluing, HiggsField, LogConn, Splitting,
};
use crate::error::{Error, Result};
use crate::parabolic::{MarkedLine, ParBundle, ParLine, Point};

/// Frobenius lift x -> x^p + p S(x) attached to a chart center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobLiftChart {
    pub center: Point,
    pub s: Poly,
}

fn binom_mod(n: u64, r: u64, m: u64) -> i64 {
    let mut c: u128 = 1;
    for j in 0..r {
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    (c % m as u128) as i64
}

impl FrobLiftChart {
    pub fn new(w2: &W2, center: Point) -> FrobLiftChart {
        let k = w2.field();
        let p = k.p() as u64;
        let Point::Finite(a) = center else {
            return FrobLiftChart { center, s: Poly::zero(k) };
        };
        let ta = w2.teich(k.neg(a));
        let mut c = vec![k.zero(); p as usize];
        for (i, ci) in c.iter_mut().enumerate().skip(1) {
            let b = w2.from_int(binom_mod(p, i as u64, p * p));
            let t = w2.mul(b, w2.pow(ta, p - i as u64));
            *ci = w2.divide_by_p(t).expect("binomial coefficient divisible by p");
        }
        FrobLiftChart { center, s: Poly::new(k, c) }
    }

    /// The lift evaluated on a Witt vector.
    pub fn lift_value(&self, w2: &W2, x: W2Elem) -> W2Elem {
        let p = w2.field().p() as u64;
        match self.center {
            Point::Infinity => w2.pow(x, p),
            Point::Finite(a) => {
                let ta = w2.teich(a);
                w2.add(w2.pow(ta, p), w2.pow(w2.sub(x, ta), p))
            }
        }
    }

    /// The derivative of the lift divided by p, reduced mod p.
    pub fn dlift_over_p(&self, k: &crate::algebra::Field) -> Poly {
        let p = k.p() as u64;
        match self.center {
            Point::Infinity => Poly::monomial(k, k.one(), p as usize - 1),
            Point::Finite(a) => Poly::linear(k, a).pow(p - 1),
        }
    }
}

/// Chart-wise description of the transform before splitting.
#[derive(Clone, Debug)]
pub struct GluedConn {
    pub line: MarkedLine,
    /// Finite centers first, infinity last.
    pub charts: Vec<FrobLiftChart>,
    pub theta_frob: Mat,
    pub degrees: Vec<Rational64>,
    pub step: u32,
}

impl GluedConn {
    /// `degrees` are the real degrees at infinity of the Frobenius pullback.
    pub fn build(h: &HiggsField, degrees: Vec<Rational64>, step: u32) -> Result<GluedConn> {
        let k = h.line.field().clone();
        let p = k.p() as usize;
        if !h.theta.mul(&h.theta).is_zero() {
            return Err(Error::Precondition("Higgs field is not nilpotent of order two".into()));
        }
        let line = h.line.map_points(|a| k.frobenius_pow(a, -1));
        let w2 = W2::new(&k);
        let mut charts: Vec<FrobLiftChart> =
            line.finite_points().into_iter().map(|a| FrobLiftChart::new(&w2, Point::Finite(a))).collect();
        charts.push(FrobLiftChart::new(&w2, Point::Infinity));
        let theta_frob = h.theta.map(|f| f.inflate(p));
        Ok(GluedConn { line, charts, theta_frob, degrees, step })
    }

    pub fn infinity_index(&self) -> usize {
        self.charts.len() - 1
    }

    /// G_ab with s_a = G_ab s_b.
    pub fn transition(&self, a: usize, b: usize) -> Mat {
        let k = self.line.field();
        let d = &self.charts[b].s - &self.charts[a].s;
        let n = self.theta_frob.dim();
        Mat::identity(k, n).add(&self.theta_frob.scale(&RatFunc::from_poly(d)))
    }

    pub fn local_matrix(&self, a: usize) -> Mat {
        let k = self.line.field();
        self.theta_frob.scale(&RatFunc::from_poly(self.charts[a].dlift_over_p(k)))
    }

    /// Connection matrix on the chart at infinity, which is also the global
    /// reference frame.
    pub fn reference_matrix(&self) -> Mat {
        self.local_matrix(self.infinity_index())
    }

    pub fn check_cocycle(&self) -> Result<()> {
        let m = self.charts.len();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if self.transition(a, b).mul(&self.transition(b, c)) != self.transition(a, c) {
                        return Err(Error::Verification(format!("cocycle fails on charts {a},{b},{c}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// A_a = G A_b G^-1 - G' G^-1 for G = G_ab, on every pair of charts.
    pub fn check_compatibility(&self) -> Result<()> {
        let m = self.charts.len();
        for a in 0..m {
            for b in 0..m {
                let g = self.transition(a, b);
                let gi = g.inv()?;
                let lhs = g.mul(&self.local_matrix(b)).mul(&gi).sub(&g.derivative().mul(&gi));
                if lhs != self.local_matrix(a) {
                    return Err(Error::Verification(format!("local connections disagree on charts {a},{b}")));
                }
            }
        }
        Ok(())
    }

    pub fn gluing(&self, invariant: u32) -> Gluing {
        let inf = self.infinity_index();
        let charts = (0..inf)
            .filter_map(|a| {
                let c = self.charts[a].center.finite()?;
                Some(ChartTransition { center: c, g: self.transition(a, inf) })
            })
            .collect();
        Gluing {
            field: self.line.field().clone(),
            degrees: self.degrees.clone(),
            charts,
            step: self.step,
            invariant,
        }
    }
}

/// Result of the transform: the connection in a split frame together with the
/// data needed to check it.
#[derive(Clone, Debug)]
pub struct CartierOutput {
    pub conn: LogConn,
    /// Columns are reference coordinates of the split frame.
    pub frame: Mat,
    pub theta_frob: Mat,
    pub splitting: Option<Splitting>,
    pub transported: bool,
}

impl CartierOutput {
    /// -T^-1 Theta(x^p) T, with coefficients moved by sigma when transported.
    pub fn expected_p_curvature(&self) -> Result<Mat> {
        let k = self.conn.line.field().clone();
        let mut psi = self.frame.inv()?.mul(&self.theta_frob).mul(&self.frame);
        psi = psi.map(|f| -f);
        if self.transported {
            psi = psi.map(|f| f.map_coeffs(|c| k.frobenius_pow(c, 1)));
        }
        Ok(psi)
    }

    pub fn degrees(&self) -> Vec<Rational64> {
        crate::connections::real_degrees(&self.conn.base)
    }
}

fn check_input(h: &HiggsField) -> Result<()> {
    let k = h.line.field();
    if k.p() <= 3 {
        return Err(Error::Precondition(format!("the transform needs p > 3, got {}", k.p())));
    }
    if h.rank() == 0 || h.rank() > 2 {
        return Err(Error::Precondition("rank must be one or two".into()));
    }
    if !h.is_nilpotent() {
        return Err(Error::Precondition("Higgs field is not nilpotent".into()));
    }
    if h.line.points()[h.line.weight_point()] != Point::Infinity {
        return Err(Error::Precondition("the weighted point must be infinity".into()));
    }
    Ok(())
}

fn twist_bound(h: &HiggsField) -> Rational64 {
    let p = Rational64::from_integer(h.line.field().p() as i64);
    let lam = h.real_degrees().iter().map(|d| d.abs()).max().unwrap_or_else(Rational64::zero);
    p * (lam + Rational64::from_integer(h.line.m() as i64))
}

fn split_conn(line: &MarkedLine, a_ref: &Mat, frame: &Mat, degrees: &[Rational64]) -> Result<LogConn> {
    let ti = frame.inv()?;
    let a = ti.mul(a_ref).mul(frame).add(&ti.mul(&frame.derivative()));
    let base = ParBundle::new(degrees.iter().map(|&d| ParLine::at_infinity(d)).collect());
    LogConn::new(line, base, a)
}

fn transport(out: CartierOutput, target: &MarkedLine) -> CartierOutput {
    let k = target.field().clone();
    let s = |m: &Mat| m.map(|f| f.map_coeffs(|c| k.frobenius_pow(c, 1)));
    CartierOutput {
        conn: LogConn { line: target.clone(), base: out.conn.base.clone(), a: s(&out.conn.a) },
        frame: s(&out.frame),
        theta_frob: out.theta_frob,
        splitting: out.splitting,
        transported: true,
    }
}

fn core(h: &HiggsField, step: u32, sigma_transport: bool) -> Result<CartierOutput> {
    check_input(h)?;
    let k = h.line.field().clone();
    let p = Rational64::from_integer(k.p() as i64);
    let degrees: Vec<Rational64> = h.real_degrees().iter().map(|d| d * p).collect();
    let glued = GluedConn::build(h, degrees.clone(), step)?;
    let out = if h.rank() == 1 {
        let conn = split_conn(&glued.line, &glued.reference_matrix(), &Mat::identity(&k, 1), &degrees)?;
        CartierOutput { conn, frame: Mat::identity(&k, 1), theta_frob: glued.theta_frob, splitting: None, transported: false }
    } else {
        let sp = splitting_type(&glued.gluing(1), twist_bound(h))?;
        let conn = split_conn(&glued.line, &glued.reference_matrix(), &sp.frame, &sp.degrees)?;
        CartierOutput { conn, frame: sp.frame.clone(), theta_frob: glued.theta_frob, splitting: Some(sp), transported: false }
    };
    Ok(if sigma_transport { transport(out, &h.line) } else { out })
}

/// Inverse Cartier transform of a Higgs field with trivial parabolic
/// structure.
pub fn inv_cartier_triv(h: &HiggsField, sigma_transport: bool) -> Result<CartierOutput> {
    if h.base.summands.iter().any(|l| !l.weights.is_empty()) {
        return Err(Error::InvalidWeights("trivial parabolic structure expected".into()));
    }
    core(h, 1, sigma_transport)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Direct,
    Cover,
}

fn check_par_weights(h: &HiggsField) -> Result<()> {
    let n = h.line.n() as i64;
    for l in &h.base.summands {
        for (&pt, w) in &l.weights {
            if pt != Point::Infinity {
                return Err(Error::InvalidWeights("weights are only allowed at infinity".into()));
            }
            if (w * Rational64::from_integer(n)).denom() != &1 {
                return Err(Error::InvalidWeights(format!("weight {w} has denominator not dividing {n}")));
            }
        }
    }
    Ok(())
}

/// Inverse Cartier transform of a Higgs field with weights at infinity.
///
/// The direct route treats each summand through its real degree, so the
/// Frobenius pullback has real degrees p times the input ones. The cover
/// route pulls back along u -> u^N, where all weights become integral,
/// transforms there and keeps the mu_N-invariant sections.
pub fn inv_cartier_par(h: &HiggsField, route: Route) -> Result<CartierOutput> {
    check_par_weights(h)?;
    match route {
        Route::Direct => core(h, h.line.n(), false),
        Route::Cover => cover_route(h),
    }
}

fn cover_route(h: &HiggsField) -> Result<CartierOutput> {
    check_input(h)?;
    let k = h.line.field().clone();
    let n = h.line.n();
    let (cover, hu) = pullback_higgs_cyclic(h, n)?;
    let p = Rational64::from_integer(k.p() as i64);
    let up_degrees: Vec<Rational64> = hu.real_degrees().iter().map(|d| d * p).collect();
    let glued = GluedConn::build(&hu, up_degrees, 1)?;
    let nn = Rational64::from_integer(n as i64);
    let sp = splitting_type(&glued.gluing(n), twist_bound(h) * nn)?;
    let ti = sp.frame.inv()?;
    let a_up = ti.mul(&glued.reference_matrix()).mul(&sp.frame).add(&ti.mul(&sp.frame.derivative()));
    let line = h.line.map_points(|a| k.frobenius_pow(a, -1));
    let down_cover = CyclicCover { down: line.clone(), up: glued.line.clone(), n, zeta: cover.zeta };
    let fail = || Error::NonEquivariant("cover route produced a non-invariant frame".into());
    let frame_rows = (0..2)
        .map(|i| (0..2).map(|j| sp.frame[(i, j)].deflate(n as usize).ok_or_else(fail)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let frame = Mat::from_rows(frame_rows);
    let a_rows = (0..2)
        .map(|i| (0..2).map(|j| down_cover.pushdown_form(&a_up[(i, j)]).ok_or_else(fail)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let degrees: Vec<Rational64> = sp.degrees.iter().map(|d| d / nn).collect();
    let base = ParBundle::new(degrees.iter().map(|&d| ParLine::at_infinity(d)).collect());
    let conn = LogConn::new(&line, base, Mat::from_rows(a_rows))?;
    let theta_frob = h.theta.map(|f| f.inflate(k.p() as usize));
    Ok(CartierOutput { conn, frame, theta_frob, splitting: Some(sp), transported: false })
}

fn residues_agree(a: &LogConn, b: &LogConn) -> Result<bool> {
    if !a.line.same_points(&b.line) {
        return Ok(false);
    }
    for &pt in a.line.points() {
        if residue(a, pt)?.charpoly != residue(b, pt)?.charpoly {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sorted(mut v: Vec<Rational64>) -> Vec<Rational64> {
    v.sort();
    v
}

/// Both routes of `inv_cartier_par` with the gauge identifying them.
#[derive(Clone, Debug)]
pub struct RouteComparison {
    pub direct: CartierOutput,
    pub cover: CartierOutput,
    pub gauge: Mat,
}

/// Runs both routes; any disagreement in splitting type, residue
/// eigenvalues or the existence of a gauge is an error.
pub fn compare_routes(h: &HiggsField) -> Result<RouteComparison> {
    let direct = inv_cartier_par(h, Route::Direct)?;
    let cover = inv_cartier_par(h, Route::Cover)?;
    if direct.degrees() != cover.degrees() {
        return Err(Error::RouteDisagreement(format!(
            "splitting types {:?} and {:?}",
            direct.degrees(),
            cover.degrees()
        )));
    }
    if !residues_agree(&direct.conn, &cover.conn)? {
        return Err(Error::RouteDisagreement("residue eigenvalues differ".into()));
    }
    let Some(gauge) = find_gauge(&direct.conn, &cover.conn)? else {
        return Err(Error::RouteDisagreement("no gauge between the two outputs".into()));
    };
    Ok(RouteComparison { direct, cover, gauge })
}

/// Pullback of the direct output to the cover against the transform of the
/// pulled back Higgs field.
#[derive(Clone, Debug)]
pub struct UpstairsComparison {
    pub pulled: LogConn,
    pub transformed: CartierOutput,
    pub gauge: Mat,
}

pub fn compare_upstairs(h: &HiggsField) -> Result<UpstairsComparison> {
    let n = h.line.n();
    let direct = inv_cartier_par(h, Route::Direct)?;
    let (_, pulled) = pullback_conn_cyclic(&direct.conn, n)?;
    let (_, hu) = pullback_higgs_cyclic(h, n)?;
    let transformed = inv_cartier_triv(&hu, false)?;
    if sorted(pulled.real_degrees()) != sorted(transformed.degrees()) {
        return Err(Error::RouteDisagreement(format!(
            "upstairs splitting types {:?} and {:?}",
            pulled.real_degrees(),
            transformed.degrees()
        )));
    }
    if !residues_agree(&pulled, &transformed.conn)? {
        return Err(Error::RouteDisagreement("upstairs residue eigenvalues differ".into()));
    }
    let Some(gauge) = find_gauge(&pulled, &transformed.conn)? else {
        return Err(Error::RouteDisagreement("no upstairs gauge".into()));
    };
    Ok(UpstairsComparison { pulled, transformed, gauge })
}

/// Weights of the transform of the component (N, d) and the smaller
/// numerator d' among them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTransition {
    pub pair: (Rational64, Rational64),
    pub d_prime: u32,
}

pub fn weight_transition(n: u32, d: u32, p: u32) -> Result<WeightTransition> {
    if d == 0 || d >= n || d.gcd(&n) != 1 || p.is_multiple_of(n) {
        return Err(Error::Precondition(format!("weight transition needs 0 < d < N coprime and p prime to N (N={n}, d={d}, p={p})")));
    }
    let (n64, d64, p64) = (n as i64, d as i64, p as i64);
    let a = (p64 * d64).rem_euclid(n64);
    let b = (p64 * (n64 - d64)).rem_euclid(n64);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(WeightTransition { pair: (Rational64::new(lo, n64), Rational64::new(hi, n64)), d_prime: lo as u32 })
}

/// Output weight at infinity of a rank one input of weight w.
pub fn transformed_weight(w: Rational64, p: u32) -> Rational64 {
    let r = w * Rational64::from_integer(p as i64);
    r - r.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn lift_matches_witt_arithmetic() {
        let k = Field::new(5, 2, 3).unwrap();
        let w2 = W2::new(&k);
        for a in [k.zero(), k.one(), k.generator(), k.from_i64(3)] {
            let ch = FrobLiftChart::new(&w2, Point::Finite(a));
            for x in k.elements().step_by(3) {
                let v = ch.lift_value(&w2, w2.teich(x));
                assert_eq!(v.a0, k.pow(x, 5));
                let diff = w2.sub(v, w2.teich(k.pow(x, 5)));
                assert_eq!(w2.divide_by_p(diff).unwrap(), ch.s.eval(x));
            }
            assert!(ch.s.eval(a).is_zero());
        }
    }

    #[test]
    fn transitions() {
        assert_eq!(weight_transition(5, 1, 11).unwrap(), WeightTransition { pair: (r(1, 5), r(4, 5)), d_prime: 1 });
        assert_eq!(weight_transition(5, 1, 7).unwrap(), WeightTransition { pair: (r(2, 5), r(3, 5)), d_prime: 2 });
        assert_eq!(weight_transition(2, 1, 13).unwrap(), WeightTransition { pair: (r(1, 2), r(1, 2)), d_prime: 1 });
        assert!(weight_transition(5, 5, 7).is_err());
        assert_eq!(transformed_weight(r(1, 5), 3), r(3, 5));
    }

    fn higgs(k: &Field, lam: i64, n: u32, lambda: Rational64, g: &str) -> HiggsField {
        let line = MarkedLine::legendre(k, k.from_i64(lam), n).unwrap();
        let mut theta = Mat::zero(k, 2);
        theta[(1, 0)] = RatFunc::parse(k, g).unwrap();
        HiggsField::new(&line, ParBundle::component(lambda), theta).unwrap()
    }

    #[test]
    fn charts_glue() {
        let k = Field::prime(7).unwrap();
        let h = higgs(&k, 3, 1, r(1, 1), "1/(x^3-4*x^2+3*x)");
        let g = GluedConn::build(&h, vec![r(7, 1), r(-7, 1)], 1).unwrap();
        g.check_cocycle().unwrap();
        g.check_compatibility().unwrap();
    }

    #[test]
    fn trivial_weights_output() {
        let k = Field::prime(7).unwrap();
        let h = higgs(&k, 3, 1, r(1, 1), "1/(x^3-4*x^2+3*x)");
        for transport in [false, true] {
            let out = inv_cartier_triv(&h, transport).unwrap();
            assert!(crate::connections::validate_log(&out.conn).is_valid());
            assert_eq!(crate::connections::p_curvature(&out.conn).unwrap(), out.expected_p_curvature().unwrap());
            let d = out.degrees();
            assert_eq!(d[0] + d[1], r(0, 1));
            assert!(d[0] >= d[1]);
        }
    }

    #[test]
    fn routes_agree_for_fifths() {
        let k = Field::prime(11).unwrap();
        let h = higgs(&k, 10, 5, r(1, 5), "(x+2)/(x^3-11*x^2+10*x)");
        let cmp = compare_routes(&h).unwrap();
        assert_eq!(cmp.direct.degrees(), cmp.cover.degrees());
        assert!(cmp.gauge.det().is_constant());
        let up = compare_upstairs(&h).unwrap();
        assert!(up.gauge.det().is_constant());
    }

    #[test]
    fn small_characteristic_rejected() {
        let k = Field::prime(3).unwrap();
        let line = MarkedLine::legendre(&k, k.from_i64(2), 1).unwrap();
        let h = HiggsField::new(&line, ParBundle::trivial(1), Mat::zero(&k, 1)).unwrap();
        assert!(matches!(inv_cartier_triv(&h, false), Err(Error::Precondition(_))));
    }
}
