//! The Higgs-de Rham flow on rank two graded Higgs fields: stability, the
//! Hodge filtration of the transformed connection, grading, and the induced
//! selfmap of the moduli components.
//!
//! A point of the component (N, d) on a normalized line is a Higgs field
//! theta: O(lambda inf) -> O(-lambda inf) (x) Omega(log D) with lambda = d/N,
//! written theta = P(x) dx / prod (x - a) over the finite marked points, and
//! recorded by the coefficient vector of P up to scaling. P has degree at
//! most floor(m - 2 - 2 lambda).

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_rational::Rational64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{poly_factor, Field, FieldElem, Mat, Poly, RatFunc};
use crate::cartier::{inv_cartier_par, transformed_weight, Route};
use crate::connections::{validate_log, FiltConn, HiggsField, LogConn};
use crate::error::{Error, Result};
use crate::parabolic::{par_degree, MarkedLine, ParBundle, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistMode {
    /// Coefficients are moved back by sigma, so the map stays on the input
    /// marked set and is sigma-semilinear.
    Strict,
    /// Output lives on sigma^-1 of the marked set; the map is algebraic.
    Twisted,
}

/// Projective dimension of the component (N, d), if nonempty.
pub fn component_dim(m: usize, n: u32, d: u32) -> Option<usize> {
    let b = Rational64::from_integer(m as i64 - 2) - Rational64::new(2 * d as i64, n as i64);
    let f = b.floor().to_integer();
    (f >= 0).then_some(f as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliPoint {
    pub line: MarkedLine,
    pub d: u32,
    pub coeffs: Vec<FieldElem>,
}

impl Hash for ModuliPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.line.points().hash(state);
        self.line.n().hash(state);
        self.d.hash(state);
        self.coeffs.hash(state);
    }
}

fn canonicalize(k: &Field, v: &mut [FieldElem]) -> bool {
    let Some(&lead) = v.iter().find(|c| !c.is_zero()) else {
        return false;
    };
    let inv = k.inv(lead).unwrap();
    for c in v.iter_mut() {
        *c = k.mul(*c, inv);
    }
    true
}

impl ModuliPoint {
    pub fn new(line: &MarkedLine, d: u32, mut coeffs: Vec<FieldElem>) -> Result<ModuliPoint> {
        let n = line.n();
        if line.points()[line.weight_point()] != Point::Infinity {
            return Err(Error::Precondition("moduli points need the weighted point at infinity".into()));
        }
        if d == 0 || d.is_multiple_of(n) {
            return Err(Error::Precondition(format!("d = {d} must be positive and prime to N = {n}")));
        }
        let Some(dim) = component_dim(line.m(), n, d) else {
            return Err(Error::Precondition(format!("component ({n}, {d}) is empty for m = {}", line.m())));
        };
        if coeffs.len() != dim + 1 {
            return Err(Error::Precondition(format!("expected {} coefficients, got {}", dim + 1, coeffs.len())));
        }
        if !canonicalize(line.field(), &mut coeffs) {
            return Err(Error::Precondition("coefficients are all zero".into()));
        }
        Ok(ModuliPoint { line: line.clone(), d, coeffs })
    }

    /// On a one-dimensional component, the point whose Higgs field vanishes
    /// at z.
    pub fn from_p1(line: &MarkedLine, d: u32, z: Point) -> Result<ModuliPoint> {
        let k = line.field();
        let coeffs = match z {
            Point::Infinity => vec![k.one(), k.zero()],
            Point::Finite(a) => vec![k.neg(a), k.one()],
        };
        ModuliPoint::new(line, d, coeffs)
    }

    pub fn n(&self) -> u32 {
        self.line.n()
    }

    pub fn lambda(&self) -> Rational64 {
        Rational64::new(self.d as i64, self.n() as i64)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Zero of P on a one-dimensional component.
    pub fn p1_coordinate(&self) -> Option<Point> {
        if self.dim() != 1 {
            return None;
        }
        let k = self.line.field();
        let (c0, c1) = (self.coeffs[0], self.coeffs[1]);
        Some(if c1.is_zero() { Point::Infinity } else { Point::Finite(k.neg(k.div(c0, c1).unwrap())) })
    }

    pub fn poly(&self) -> Poly {
        Poly::new(self.line.field(), self.coeffs.clone())
    }

    pub fn decode(&self) -> Result<HiggsField> {
        let k = self.line.field();
        let g = RatFunc::new(self.poly(), self.line.finite_divisor_poly())?;
        let mut theta = Mat::zero(k, 2);
        theta[(1, 0)] = g;
        HiggsField::new(&self.line, ParBundle::component(self.lambda()), theta)
    }

    pub fn label(&self) -> String {
        format!("({}, {})", self.n(), self.d)
    }

    pub fn format(&self) -> String {
        let k = self.line.field();
        match self.p1_coordinate() {
            Some(z) => z.format(k),
            None => {
                let c: Vec<String> = self.coeffs.iter().map(|&c| k.format(c)).collect();
                format!("[{}]", c.join(":"))
            }
        }
    }
}

/// All points of the component (N, d) over the field of the line.
pub fn enumerate_component(line: &MarkedLine, d: u32) -> Result<Vec<ModuliPoint>> {
    let k = line.field();
    let Some(dim) = component_dim(line.m(), line.n(), d) else {
        return Ok(Vec::new());
    };
    let q = k.q();
    let mut out = Vec::new();
    for lead in 0..=dim {
        let free = dim - lead;
        let count = q.checked_pow(free as u32).ok_or_else(|| Error::Precondition("component too large".into()))?;
        for idx in 0..count {
            let mut c = vec![k.zero(); dim + 1];
            c[lead] = k.one();
            let mut r = idx;
            for slot in c.iter_mut().skip(lead + 1) {
                *slot = k.from_index(r % q);
                r /= q;
            }
            out.push(ModuliPoint::new(line, d, c)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Semistable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub verdict: Stability,
    /// Summand index and slope of an invariant sub-line of maximal slope.
    pub witness: Option<(usize, Rational64)>,
}

impl StabilityReport {
    pub fn is_semistable(&self) -> bool {
        self.verdict != Stability::Unstable
    }
}

/// Stability of a rank two graded Higgs field of degree zero.
pub fn stability_check(h: &HiggsField) -> StabilityReport {
    let mu = h.real_degrees();
    let invariant: Vec<usize> =
        (0..h.rank()).filter(|&j| (0..h.rank()).all(|i| i == j || h.theta[(i, j)].is_zero())).collect();
    let best = if h.theta.is_zero() {
        (0..h.rank()).max_by_key(|&i| mu[i])
    } else {
        invariant.iter().copied().max_by_key(|&i| mu[i])
    };
    let Some(i) = best else {
        return StabilityReport { verdict: Stability::Stable, witness: None };
    };
    let slope = mu[i];
    let verdict = if slope > Rational64::zero() {
        Stability::Unstable
    } else if slope.is_zero() || h.theta.is_zero() {
        Stability::Semistable
    } else {
        Stability::Stable
    };
    StabilityReport { verdict, witness: Some((i, slope)) }
}

/// The sub-line of maximal degree of a split rank two connection.
pub fn simpson_filtration(conn: &LogConn) -> Result<FiltConn> {
    if conn.rank() != 2 {
        return Err(Error::Precondition("filtration needs rank two".into()));
    }
    let k = conn.line.field();
    let mu = conn.real_degrees();
    if mu[0] == mu[1] {
        return Err(Error::OutOfTheory(format!("balanced splitting type ({}, {}) has no destabilizing line", mu[0], mu[1])));
    }
    let i = if mu[0] > mu[1] { 0 } else { 1 };
    let mut fil = vec![RatFunc::zero(k); 2];
    fil[i] = RatFunc::one(k);
    Ok(FiltConn { conn: conn.clone(), fil, fil_line: conn.base.summands[i].clone() })
}

/// Associated graded Higgs field: the map Fil -> V/Fil (x) Omega(log D)
/// induced by the connection, with Fil first.
pub fn grade(fc: &FiltConn) -> Result<HiggsField> {
    let k = fc.conn.line.field();
    let i = match fc.fil.iter().position(|f| !f.is_zero()) {
        Some(i) if fc.fil[i] == RatFunc::one(k) && fc.fil.iter().filter(|f| !f.is_zero()).count() == 1 => i,
        _ => return Err(Error::Precondition("filtration must be a summand of the split frame".into())),
    };
    let j = 1 - i;
    let mut theta = Mat::zero(k, 2);
    theta[(1, 0)] = fc.conn.a[(j, i)].clone();
    let base = ParBundle::new(vec![fc.conn.base.summands[i].clone(), fc.conn.base.summands[j].clone()]);
    HiggsField::new(&fc.conn.line, base, theta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepChecks {
    pub log_valid: bool,
    pub semistable: bool,
    pub degree_zero: bool,
    pub weights_match: bool,
    pub lambda_bound: bool,
}

impl StepChecks {
    pub fn all(&self) -> bool {
        self.log_valid && self.semistable && self.degree_zero && self.weights_match && self.lambda_bound
    }
}

/// One application of the selfmap with its intermediate data.
#[derive(Clone, Debug)]
pub struct SelfmapStep {
    pub image: ModuliPoint,
    /// Splitting type of the transformed bundle, larger first.
    pub de_rham_degrees: (Rational64, Rational64),
    /// Output weights at infinity, ascending.
    pub weights: (Rational64, Rational64),
    /// Prediction from the input weights.
    pub predicted: (Rational64, Rational64),
    pub graded: HiggsField,
    pub checks: StepChecks,
}

fn frac(r: Rational64) -> Rational64 {
    r - r.floor()
}

fn sorted_pair(a: Rational64, b: Rational64) -> (Rational64, Rational64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn selfmap_step(pt: &ModuliPoint, mode: TwistMode) -> Result<SelfmapStep> {
    let h = pt.decode()?;
    if !stability_check(&h).is_semistable() {
        return Err(Error::OutOfTheory("input Higgs field is unstable".into()));
    }
    let k = pt.line.field().clone();
    let p = k.p();
    let out = inv_cartier_par(&h, Route::Direct)?;
    let fc = simpson_filtration(&out.conn)?;
    let graded = grade(&fc)?;
    let mu = graded.real_degrees();
    let lam2 = mu[0];
    let g = &graded.theta[(1, 0)];
    if g.is_zero() {
        return Err(Error::Indeterminacy("the connection preserves the filtration".into()));
    }
    let m = pt.line.m();
    let lambda_bound = lam2 <= Rational64::new(m as i64 - 2, 2);
    let nn = Rational64::from_integer(pt.n() as i64);
    let d2 = lam2 * nn;
    if !d2.is_integer() || d2 <= Rational64::zero() {
        return Err(Error::Verification(format!("output degree {lam2} is not a positive multiple of 1/N")));
    }
    let d2 = d2.to_integer() as u32;
    let Some(dim) = component_dim(m, pt.n(), d2) else {
        return Err(Error::Verification(format!("output lands in the empty component (N, {d2})")));
    };
    let pf = g * &RatFunc::from_poly(out.conn.line.finite_divisor_poly());
    if !pf.is_poly() || pf.num().degree_i() > dim as i64 {
        return Err(Error::Verification(format!("graded Higgs field {g} is outside the component (N, {d2})")));
    }
    let mut coeffs: Vec<FieldElem> = (0..=dim).map(|i| pf.num().coeff(i)).collect();
    let line = match mode {
        TwistMode::Twisted => out.conn.line.clone(),
        TwistMode::Strict => {
            for c in coeffs.iter_mut() {
                *c = k.frobenius_pow(*c, 1);
            }
            pt.line.clone()
        }
    };
    let image = ModuliPoint::new(&line, d2, coeffs)?;
    let weights = sorted_pair(frac(mu[0]), frac(mu[1]));
    let lam = pt.lambda();
    let predicted = sorted_pair(transformed_weight(lam, p), transformed_weight(-lam, p));
    let checks = StepChecks {
        log_valid: validate_log(&graded).is_valid(),
        semistable: stability_check(&graded).is_semistable(),
        degree_zero: par_degree(&graded.base).is_zero(),
        weights_match: weights == predicted,
        lambda_bound,
    };
    Ok(SelfmapStep { image, de_rham_degrees: (mu[0], mu[1]), weights, predicted, graded, checks })
}

/// phi = Gr o C^-1 at a point.
pub fn selfmap_eval(pt: &ModuliPoint, mode: TwistMode) -> Result<ModuliPoint> {
    let step = selfmap_step(pt, mode)?;
    if !step.checks.all() {
        return Err(Error::Verification(format!("step checks failed: {:?}", step.checks)));
    }
    Ok(step.image)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowStep {
    pub point: String,
    pub component: (u32, u32),
    pub de_rham_degrees: (Rational64, Rational64),
    pub weights: (Rational64, Rational64),
    pub checks: StepChecks,
    pub digest: String,
}

#[derive(Clone, Debug)]
pub struct FlowRecord {
    pub mode: TwistMode,
    pub start: ModuliPoint,
    pub steps: Vec<FlowStep>,
    pub points: Vec<ModuliPoint>,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
}

fn digest(pt: &ModuliPoint, step: &SelfmapStep) -> String {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    pt.hash(&mut h);
    step.image.hash(&mut h);
    step.de_rham_degrees.hash(&mut h);
    format!("{:016x}", h.finish())
}

/// Iterates the selfmap until a point repeats or `max_iter` steps are done.
pub fn orbit(pt: &ModuliPoint, max_iter: usize, mode: TwistMode) -> Result<FlowRecord> {
    if max_iter == 0 {
        return Err(Error::Precondition("max_iter must be at least one".into()));
    }
    let mut seen: HashMap<ModuliPoint, usize> = HashMap::new();
    let mut rec = FlowRecord { mode, start: pt.clone(), steps: Vec::new(), points: Vec::new(), preperiod: None, period: None };
    let mut cur = pt.clone();
    for i in 0..=max_iter {
        if let Some(&j) = seen.get(&cur) {
            rec.preperiod = Some(j);
            rec.period = Some(i - j);
            break;
        }
        if i == max_iter {
            break;
        }
        seen.insert(cur.clone(), i);
        let step = selfmap_step(&cur, mode)?;
        if !step.checks.all() {
            return Err(Error::Verification(format!("step {i} checks failed: {:?}", step.checks)));
        }
        rec.steps.push(FlowStep {
            point: cur.format(),
            component: (cur.n(), cur.d),
            de_rham_degrees: step.de_rham_degrees,
            weights: step.weights,
            checks: step.checks.clone(),
            digest: digest(&cur, &step),
        });
        rec.points.push(cur);
        cur = step.image;
    }
    Ok(rec)
}

/// Copy of a line with prime-field points over another field of the same
/// characteristic.
pub fn embed_line(line: &MarkedLine, k: &Field) -> Result<MarkedLine> {
    let k0 = line.field();
    if k0 == k {
        return Ok(line.clone());
    }
    if k0.p() != k.p() {
        return Err(Error::Precondition("characteristics differ".into()));
    }
    let mut pts = Vec::new();
    for &pt in line.points() {
        pts.push(match pt {
            Point::Infinity => Point::Infinity,
            Point::Finite(a) if k0.in_prime_field(a) => Point::Finite(k.from_i64(k0.digits(a).first().copied().unwrap_or(0) as i64)),
            Point::Finite(_) => return Err(Error::Precondition("only prime-field points can be moved to another field".into())),
        });
    }
    MarkedLine::new(k, pts, line.n(), line.weight_point())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Enumerate,
    PolySolve,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    /// P^1 coordinate, a coefficient vector, or a factor of the fixed-point
    /// polynomial in poly_solve mode.
    pub point: String,
    pub field_degree: u32,
    pub period: u32,
}

/// phi as a rational function of the P^1 coordinate.
#[derive(Clone, Debug)]
pub struct InterpolatedMap {
    pub source: (u32, u32),
    pub target: (u32, u32),
    pub phi: RatFunc,
    pub degree: usize,
    pub bound: usize,
    pub samples: usize,
    pub field: Field,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub mode: ScanMode,
    pub twist: TwistMode,
    pub component: (u32, u32),
    pub ext_degree: u32,
    pub k: Option<u32>,
    pub examined: usize,
    pub indeterminate: usize,
    pub leaving: usize,
    pub image_size: usize,
    pub rows: Vec<ScanRow>,
    pub map: Option<InterpolatedMap>,
}

fn scan_field(k0: &Field, e: u32) -> Result<Field> {
    if k0.s() == e {
        Ok(k0.clone())
    } else {
        Field::new(k0.p(), e, k0.seed())
    }
}

/// Periodic points of the component (N, d) over F_{p^e}. With `k`, only
/// points whose exact period divides k are kept.
pub fn periodic_scan(line: &MarkedLine, d: u32, e: u32, mode: ScanMode, k: Option<u32>, twist: TwistMode) -> Result<ScanReport> {
    match mode {
        ScanMode::Enumerate => scan_enumerate(line, d, e, k, twist),
        ScanMode::PolySolve => scan_poly_solve(line, d, e, k.unwrap_or(1), twist),
    }
}

fn scan_enumerate(line: &MarkedLine, d: u32, e: u32, k: Option<u32>, twist: TwistMode) -> Result<ScanReport> {
    let field = scan_field(line.field(), e)?;
    let line = embed_line(line, &field)?;
    let pts = enumerate_component(&line, d)?;
    let index: HashMap<&ModuliPoint, usize> = pts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut next = vec![None; pts.len()];
    let (mut indeterminate, mut leaving) = (0, 0);
    let mut image = std::collections::BTreeSet::new();
    for (i, pt) in pts.iter().enumerate() {
        match selfmap_eval(pt, twist) {
            Ok(img) => match index.get(&img) {
                Some(&j) => {
                    next[i] = Some(j);
                    image.insert(j);
                }
                None => leaving += 1,
            },
            Err(Error::Indeterminacy(_)) | Err(Error::OutOfTheory(_)) => indeterminate += 1,
            Err(err) => return Err(err),
        }
    }
    let period = cycle_periods(&next);
    let rows = pts
        .iter()
        .zip(&period)
        .filter_map(|(pt, per)| {
            let per = (*per)?;
            if let Some(kk) = k {
                if kk % per != 0 {
                    return None;
                }
            }
            Some(ScanRow { point: pt.format(), field_degree: degree_over_prime(&field, pt), period: per })
        })
        .collect();
    Ok(ScanReport {
        mode: ScanMode::Enumerate,
        twist,
        component: (line.n(), d),
        ext_degree: e,
        k,
        examined: pts.len(),
        indeterminate,
        leaving,
        image_size: image.len(),
        rows,
        map: None,
    })
}

/// Smallest r such that all coordinates lie in F_{p^r}.
fn degree_over_prime(k: &Field, pt: &ModuliPoint) -> u32 {
    let vals: Vec<FieldElem> = pt.coeffs.clone();
    (1..=k.s()).find(|r| k.s().is_multiple_of(*r) && vals.iter().all(|&c| k.frobenius_pow(c, *r as i64) == c)).unwrap_or(k.s())
}

/// Exact period of every point lying on a cycle of the partial map.
pub fn cycle_periods(next: &[Option<usize>]) -> Vec<Option<u32>> {
    let n = next.len();
    let mut state = vec![0u8; n];
    let mut period = vec![None; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut cur = Some(s);
        while let Some(c) = cur {
            if state[c] == 2 {
                break;
            }
            if let Some(&at) = pos.get(&c) {
                let len = (path.len() - at) as u32;
                for &x in &path[at..] {
                    period[x] = Some(len);
                }
                break;
            }
            pos.insert(c, path.len());
            path.push(c);
            state[c] = 1;
            cur = next[c];
        }
        for x in path {
            state[x] = 2;
        }
    }
    period
}

fn sample_field(p: u32) -> Result<Field> {
    let need = 4 * (2 * (p as u64).pow(2) + 12);
    let mut e = 2;
    while (p as u64).pow(e) < need {
        e += 1;
    }
    Field::new(p, e, 0)
}

fn solve_rational(k: &Field, samples: &[(FieldElem, Point)], bound: usize) -> Option<RatFunc> {
    let cols = 2 * (bound + 1);
    let rows: Vec<Vec<FieldElem>> = samples
        .iter()
        .map(|&(z, w)| {
            let mut r = vec![k.zero(); cols];
            let mut zp = k.one();
            for i in 0..=bound {
                match w {
                    Point::Finite(w) => {
                        r[i] = zp;
                        r[bound + 1 + i] = k.neg(k.mul(w, zp));
                    }
                    Point::Infinity => r[bound + 1 + i] = zp,
                }
                zp = k.mul(zp, z);
            }
            r
        })
        .collect();
    let ker = crate::algebra::kernel(k, &rows, cols);
    let v = ker.first()?;
    let a = Poly::new(k, v[..=bound].to_vec());
    let b = Poly::new(k, v[bound + 1..].to_vec());
    if b.is_zero() {
        return None;
    }
    RatFunc::new(a, b).ok()
}

fn eval_p1(f: &RatFunc, z: FieldElem) -> Point {
    match f.eval(z) {
        Some(v) => Point::Finite(v),
        None => Point::Infinity,
    }
}

/// Interpolates phi on a one-dimensional component over an extension of the
/// base field. The degree bound starts at p + 1 and doubles up to p^2.
pub fn interpolate_selfmap(line: &MarkedLine, d: u32, seed: u64) -> Result<InterpolatedMap> {
    let k0 = line.field();
    if line.m() != 4 || component_dim(4, line.n(), d) != Some(1) {
        return Err(Error::Precondition("interpolation needs m = 4 and a one-dimensional component".into()));
    }
    let p = k0.p() as usize;
    let field = sample_field(k0.p())?;
    let line = embed_line(line, &field)?;
    let mut elems: Vec<FieldElem> = field.elements().collect();
    elems.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut cache: Vec<(FieldElem, Option<(u32, Point)>)> = Vec::new();
    let mut it = elems.into_iter();
    let mut eval_next = |cache: &mut Vec<(FieldElem, Option<(u32, Point)>)>| -> Result<bool> {
        let Some(z) = it.next() else { return Ok(false) };
        let pt = ModuliPoint::from_p1(&line, d, Point::Finite(z))?;
        let v = match selfmap_eval(&pt, TwistMode::Twisted) {
            Ok(img) if img.line == line => img.p1_coordinate().map(|w| (img.d, w)),
            Ok(_) => None,
            Err(Error::Indeterminacy(_)) | Err(Error::OutOfTheory(_)) => None,
            Err(e) => return Err(e),
        };
        cache.push((z, v));
        Ok(true)
    };
    while cache.len() < 16 {
        if !eval_next(&mut cache)? {
            break;
        }
    }
    let mut votes: HashMap<u32, usize> = HashMap::new();
    for (_, v) in &cache {
        if let Some((d2, _)) = v {
            *votes.entry(*d2).or_default() += 1;
        }
    }
    let Some((&target, _)) = votes.iter().max_by_key(|(d2, c)| (**c, std::cmp::Reverse(**d2))) else {
        return Err(Error::Indeterminacy("no sample point has an image on a one-dimensional component".into()));
    };
    let mut bound = p + 1;
    loop {
        let need = 2 * bound + 2 + 10;
        let usable = |cache: &Vec<(FieldElem, Option<(u32, Point)>)>| {
            cache.iter().filter_map(|(z, v)| v.filter(|(d2, _)| *d2 == target).map(|(_, w)| (*z, w))).collect::<Vec<_>>()
        };
        while usable(&cache).len() < need {
            if !eval_next(&mut cache)? {
                return Err(Error::InterpolationBound { bound, detail: "ran out of sample points".into() });
            }
        }
        let s = usable(&cache);
        let (fit, held) = s[..need].split_at(2 * bound + 2);
        if let Some(phi) = solve_rational(&field, fit, bound) {
            if held.iter().all(|&(z, w)| eval_p1(&phi, z) == w) && !phi.is_constant() {
                let degree = phi.num().degree_i().max(phi.den().degree_i()) as usize;
                return Ok(InterpolatedMap {
                    source: (line.n(), d),
                    target: (line.n(), target),
                    phi,
                    degree,
                    bound,
                    samples: cache.len(),
                    field,
                });
            }
        }
        if bound >= p * p {
            return Err(Error::InterpolationBound { bound, detail: format!("held-out evaluations disagree; degree exceeds {bound}") });
        }
        bound = (2 * bound).min(p * p);
    }
}

fn scan_poly_solve(line: &MarkedLine, d: u32, e: u32, k: u32, twist: TwistMode) -> Result<ScanReport> {
    if twist != TwistMode::Twisted {
        return Err(Error::Precondition("poly_solve interpolates the twisted map only".into()));
    }
    let map = interpolate_selfmap(line, d, line.field().seed())?;
    let mut rows = Vec::new();
    if map.target == map.source {
        let kf = &map.field;
        let mut it = RatFunc::x(kf);
        let mut fixed_by_iter: Vec<Vec<(Poly, bool)>> = Vec::new();
        for _ in 0..k {
            it = map.phi.compose(&it)?;
            let num = (&it.num().clone() - &(&Poly::x(kf) * it.den())).clone();
            let infinity_fixed = it.num().degree_i() > it.den().degree_i();
            let facs = if num.is_zero() { Vec::new() } else { poly_factor(&num, kf.seed()) };
            let mut v: Vec<(Poly, bool)> = facs.into_iter().map(|(f, _)| (f, false)).collect();
            if infinity_fixed {
                v.push((Poly::one(kf), true));
            }
            fixed_by_iter.push(v);
        }
        let last = fixed_by_iter.last().cloned().unwrap_or_default();
        for (f, inf) in last {
            let period = (1..=k).find(|&j| fixed_by_iter[j as usize - 1].iter().any(|(g, i)| *g == f && *i == inf)).unwrap_or(k);
            let field_degree = if inf { 1 } else { f.deg().unwrap_or(1) as u32 };
            if e > 0 && !e.is_multiple_of(field_degree) {
                continue;
            }
            let point = if inf { "inf".to_string() } else { f.render("z") };
            rows.push(ScanRow { point, field_degree, period });
        }
    }
    Ok(ScanReport {
        mode: ScanMode::PolySolve,
        twist,
        component: map.source,
        ext_degree: e,
        k: Some(k),
        examined: map.samples,
        indeterminate: 0,
        leaving: 0,
        image_size: 0,
        rows,
        map: Some(map),
    })
}
