//! Logarithmic Higgs fields and connections on split bundles over the marked
//! line.
//!
//! Matrices are written in the standard frame of the split bundle, trivialized
//! over the affine x-chart: entry (i, j) is the dx-coefficient of the map from
//! summand j to summand i. At infinity the lattice frame of a summand of
//! degree d is x^d times the affine frame.
//!
//! Conventions:
//! - the residue at a finite point a is the coefficient of dx/(x-a);
//! - the residue at infinity is minus the coefficient of du/u, u = 1/x;
//! - for connections the parabolic weight of each summand is added to the
//!   diagonal of the residue, so the residues of a rank one connection sum to
//!   its parabolic degree;
//! - a gauge g acts by A -> g A g^-1 - g' g^-1, new coordinates being g times
//!   old ones.

use num_rational::Rational64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::mat::rref;
use crate::algebra::{kernel, poly_factor, roots, Field, FieldElem, Mat, Poly, RatFunc};
use crate::error::{Error, Result};
use crate::parabolic::{cyclic_pullback_bundle, par_hom_degree, MarkedLine, ParBundle, ParLine, Point};

/// Image of a rational number with denominator prime to p.
pub fn rational_to_field(k: &Field, r: Rational64) -> FieldElem {
    let num = k.from_i64(*r.numer());
    let den = k.from_i64(*r.denom());
    k.div(num, den).expect("denominator divisible by p")
}

/// Graded Higgs field: theta maps summand j to summand i only for j < i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiggsField {
    pub line: MarkedLine,
    pub base: ParBundle,
    pub theta: Mat,
}

/// Connection d + A dx on a split parabolic bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogConn {
    pub line: MarkedLine,
    pub base: ParBundle,
    pub a: Mat,
}

/// A connection with a line subbundle spanned by the saturated section `fil`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltConn {
    pub conn: LogConn,
    pub fil: Vec<RatFunc>,
    pub fil_line: ParLine,
}

/// Read access shared by Higgs fields and connections.
pub trait LogData {
    fn line(&self) -> &MarkedLine;
    fn base(&self) -> &ParBundle;
    fn matrix(&self) -> &Mat;
    fn is_connection(&self) -> bool;
}

impl LogData for HiggsField {
    fn line(&self) -> &MarkedLine {
        &self.line
    }
    fn base(&self) -> &ParBundle {
        &self.base
    }
    fn matrix(&self) -> &Mat {
        &self.theta
    }
    fn is_connection(&self) -> bool {
        false
    }
}

impl LogData for LogConn {
    fn line(&self) -> &MarkedLine {
        &self.line
    }
    fn base(&self) -> &ParBundle {
        &self.base
    }
    fn matrix(&self) -> &Mat {
        &self.a
    }
    fn is_connection(&self) -> bool {
        true
    }
}

impl HiggsField {
    pub fn new(line: &MarkedLine, base: ParBundle, theta: Mat) -> Result<HiggsField> {
        if base.rank() != theta.dim() {
            return Err(Error::Precondition("rank of base and Higgs matrix differ".into()));
        }
        Ok(HiggsField { line: line.clone(), base, theta })
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn is_nilpotent(&self) -> bool {
        let mut m = self.theta.clone();
        for _ in 1..self.rank() {
            m = m.mul(&self.theta);
        }
        m.is_zero()
    }

    /// deg + weight at infinity for each summand.
    pub fn real_degrees(&self) -> Vec<Rational64> {
        real_degrees(&self.base)
    }
}

impl LogConn {
    pub fn new(line: &MarkedLine, base: ParBundle, a: Mat) -> Result<LogConn> {
        if base.rank() != a.dim() {
            return Err(Error::Precondition("rank of base and connection matrix differ".into()));
        }
        Ok(LogConn { line: line.clone(), base, a })
    }

    /// The trivial connection d on O(deg_1) + ... with the given weights.
    pub fn trivial(line: &MarkedLine, base: ParBundle) -> LogConn {
        let a = Mat::zero(line.field(), base.rank());
        LogConn { line: line.clone(), base, a }
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn real_degrees(&self) -> Vec<Rational64> {
        real_degrees(&self.base)
    }
}

pub fn real_degrees(base: &ParBundle) -> Vec<Rational64> {
    base.summands.iter().map(|l| Rational64::from_integer(l.deg) + l.weight(Point::Infinity)).collect()
}

/// Outcome of `validate_log`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub violations: Vec<String>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn x_pow(k: &Field, e: i64) -> RatFunc {
    if e >= 0 {
        RatFunc::from_poly(Poly::monomial(k, k.one(), e as usize))
    } else {
        RatFunc::new(Poly::one(k), Poly::monomial(k, k.one(), (-e) as usize)).unwrap()
    }
}

/// Entry (i, j) written in the lattice frames at infinity, dx-coefficient.
fn entry_at_infinity(obj: &dyn LogData, i: usize, j: usize) -> RatFunc {
    let k = obj.line().field();
    let s = &obj.base().summands;
    let mut e = &obj.matrix()[(i, j)] * &x_pow(k, s[j].deg - s[i].deg);
    if obj.is_connection() && i == j && s[i].deg != 0 {
        e = &e + &x_pow(k, -1).scale(k.from_i64(s[i].deg));
    }
    e
}

/// Checks simple poles along the marked points only, the growth bound at
/// infinity, the parabolic condition where weights drop, and for Higgs
/// fields the grading.
pub fn validate_log(obj: &dyn LogData) -> Diagnostics {
    let line = obj.line();
    let k = line.field();
    let m = obj.matrix();
    let s = &obj.base().summands;
    let n = m.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let e = &m[(i, j)];
            if !obj.is_connection() && j >= i && !e.is_zero() {
                out.push(format!("entry ({i},{j}) breaks the grading"));
            }
            if !e.is_zero() {
                let mut rest = e.den().clone();
                for a in line.finite_points() {
                    let v = e.valuation_at(a);
                    if v < 0 {
                        rest = rest.exact_div(&Poly::linear(k, a).pow((-v) as u64)).unwrap();
                    }
                    let pt = Point::Finite(a);
                    let min = if s[j].weight(pt) > s[i].weight(pt) { 0 } else { -1 };
                    if v < min {
                        out.push(format!("entry ({i},{j}) has a pole of order {} at {}", -v, k.format(a)));
                    }
                }
                if !rest.is_constant() {
                    out.push(format!("entry ({i},{j}) has a pole off the marked divisor"));
                }
            }
            let einf = entry_at_infinity(obj, i, j);
            if einf.is_zero() {
                continue;
            }
            let bound = if line.has_infinity() {
                let drop = s[j].weight(Point::Infinity) > s[i].weight(Point::Infinity);
                -1 - drop as i64
            } else {
                -2
            };
            if einf.degree() > bound {
                out.push(format!("entry ({i},{j}) grows too fast at infinity"));
            }
        }
    }
    Diagnostics { violations: out }
}

/// Residue matrix at a marked point with its characteristic polynomial and
/// the eigenvalues lying in the base field, sorted, with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residue {
    pub point: Point,
    pub matrix: Vec<Vec<FieldElem>>,
    pub charpoly: Poly,
    pub eigenvalues: Vec<FieldElem>,
}

pub fn charpoly(k: &Field, m: &[Vec<FieldElem>]) -> Poly {
    let n = m.len();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = RatFunc::constant(k, k.neg(m[i][j]));
                    if i == j {
                        &c + &RatFunc::x(k)
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    Mat::from_rows(rows).det().num().clone()
}

pub fn eigenvalues(k: &Field, cp: &Poly) -> Vec<FieldElem> {
    let mut out = Vec::new();
    for (f, mult) in poly_factor(cp, 0) {
        if f.deg() == Some(1) {
            out.extend(std::iter::repeat_n(k.neg(f.coeff(0)), mult));
        }
    }
    out.sort();
    out
}

pub fn residue(obj: &dyn LogData, pt: Point) -> Result<Residue> {
    let line = obj.line();
    let k = line.field();
    if !line.is_marked(pt) {
        return Err(Error::UnmarkedPoint(pt.format(k)));
    }
    let n = obj.matrix().dim();
    let s = &obj.base().summands;
    let mut mat = vec![vec![k.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut r = match pt {
                Point::Finite(a) => obj.matrix()[(i, j)].residue_at(a),
                Point::Infinity => {
                    let e = entry_at_infinity(obj, i, j);
                    let v = e.valuation_at_infinity();
                    if v > 1 {
                        k.zero()
                    } else {
                        e.laurent_at_infinity((2 - v) as usize).coeff(1)
                    }
                }
            };
            if obj.is_connection() && i == j {
                r = k.add(r, rational_to_field(k, s[i].weight(pt)));
            }
            mat[i][j] = r;
        }
    }
    let cp = charpoly(k, &mat);
    let ev = eigenvalues(k, &cp);
    Ok(Residue { point: pt, matrix: mat, charpoly: cp, eigenvalues: ev })
}

fn apply_conn(a: &Mat, v: &[RatFunc]) -> Vec<RatFunc> {
    let av = a.mul_vec(v);
    v.iter().zip(av).map(|(x, y)| &x.derivative() + &y).collect()
}

/// (d/dx + A)^p applied to the frame vectors; the columns of the result are
/// the images. Function linearity is checked on a random multiple of each
/// frame vector.
pub fn p_curvature(conn: &LogConn) -> Result<Mat> {
    let k = conn.line.field().clone();
    let n = conn.rank();
    let p = k.p();
    let mut rng = ChaCha8Rng::seed_from_u64(0x70c0);
    let mut psi = Mat::zero(&k, n);
    for i in 0..n {
        let mut v: Vec<RatFunc> = (0..n).map(|j| if i == j { RatFunc::one(&k) } else { RatFunc::zero(&k) }).collect();
        for _ in 0..p {
            v = apply_conn(&conn.a, &v);
        }
        let num = Poly::new(&k, (0..4).map(|_| k.random(&mut rng)).collect());
        let f = RatFunc::new(&num + &Poly::monomial(&k, k.one(), 4), Poly::linear(&k, k.random(&mut rng))).unwrap();
        let mut w: Vec<RatFunc> = (0..n).map(|j| if i == j { f.clone() } else { RatFunc::zero(&k) }).collect();
        for _ in 0..p {
            w = apply_conn(&conn.a, &w);
        }
        for j in 0..n {
            if w[j] != &f * &v[j] {
                return Err(Error::Verification("p-curvature is not function linear".into()));
            }
            psi[(j, i)] = v[j].clone();
        }
    }
    Ok(psi)
}

/// Tensor with the rank one shift by `gamma`. At a finite point c the matrix
/// gains gamma/(x-c); at infinity the real degrees of all summands move by
/// gamma and the matrix is unchanged. Either way the residue at the point
/// gains gamma times the identity.
pub fn twist_by_shift(conn: &LogConn, gamma: &[(Point, Rational64)]) -> Result<LogConn> {
    let k = conn.line.field().clone();
    let mut a = conn.a.clone();
    let mut base = conn.base.clone();
    for &(pt, g) in gamma {
        if !conn.line.is_marked(pt) {
            return Err(Error::UnmarkedPoint(pt.format(&k)));
        }
        match pt {
            Point::Finite(c) => {
                let f = RatFunc::simple_pole(&k, c).scale(rational_to_field(&k, g));
                a = a.add(&Mat::scalar(&k, conn.rank(), &f));
            }
            Point::Infinity => {
                let shift = ParLine::at_infinity(g);
                base = ParBundle::new(base.summands.iter().map(|l| crate::parabolic::par_tensor(l, &shift)).collect());
            }
        }
    }
    Ok(LogConn { line: conn.line.clone(), base, a })
}

/// A -> g A g^-1 - g' g^-1.
pub fn gauge_transform(conn: &LogConn, g: &Mat) -> Result<LogConn> {
    let gi = g.inv()?;
    let a = g.mul(&conn.a).mul(&gi).sub(&g.derivative().mul(&gi));
    Ok(LogConn { line: conn.line.clone(), base: conn.base.clone(), a })
}

/// A gauge T with T' + A2 T - T A1 = 0 and nonzero constant determinant,
/// carrying `c1` to `c2`. Entry (i, j) is a polynomial of degree at most the
/// parabolic Hom degree from summand j of `c1` to summand i of `c2`.
pub fn find_gauge(c1: &LogConn, c2: &LogConn) -> Result<Option<Mat>> {
    let k = c1.line.field().clone();
    let n = c1.rank();
    if c2.rank() != n {
        return Ok(None);
    }
    let mut l = Poly::one(&k);
    for f in c1.a.entries().iter().chain(c2.a.entries()) {
        let g = l.gcd(f.den());
        l = (&l * f.den()).exact_div(&g)?;
    }
    let lr = RatFunc::from_poly(l.clone());
    let poly_of = |f: &RatFunc| -> Poly { (f * &lr).num().clone() };
    let a1: Vec<Poly> = c1.a.entries().iter().map(poly_of).collect();
    let a2: Vec<Poly> = c2.a.entries().iter().map(poly_of).collect();
    let mut unknowns = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = par_hom_degree(&c1.base.summands[j], &c2.base.summands[i]);
            for e in 0..=d.max(-1) {
                unknowns.push((i, j, e as usize));
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(None);
    }
    let contributions: Vec<Vec<(usize, Poly)>> = unknowns
        .iter()
        .map(|&(i, j, e)| {
            let xe = Poly::monomial(&k, k.one(), e);
            let mut out = Vec::new();
            if e > 0 {
                out.push((i * n + j, &l * &Poly::monomial(&k, k.from_i64(e as i64), e - 1)));
            }
            for r in 0..n {
                out.push((r * n + j, &a2[r * n + i] * &xe));
            }
            for c in 0..n {
                out.push((i * n + c, -&(&xe * &a1[j * n + c])));
            }
            out
        })
        .collect();
    let top = contributions.iter().flatten().map(|(_, p)| p.degree_i().max(0) as usize).max().unwrap_or(0) + 1;
    let mut rows = vec![vec![k.zero(); unknowns.len()]; n * n * top];
    for (col, cs) in contributions.iter().enumerate() {
        for (entry, p) in cs {
            for (e, &c) in p.coeffs().iter().enumerate() {
                let x = &mut rows[entry * top + e][col];
                *x = k.add(*x, c);
            }
        }
    }
    rows.retain(|r| r.iter().any(|c| !c.is_zero()));
    let ker = kernel(&k, &rows, unknowns.len());
    if ker.is_empty() {
        return Ok(None);
    }
    let to_mat = |v: &[FieldElem]| {
        let mut t = Mat::zero(&k, n);
        for (&(i, j, e), &c) in unknowns.iter().zip(v) {
            if !c.is_zero() {
                t[(i, j)] = &t[(i, j)] + &RatFunc::from_poly(Poly::monomial(&k, c, e));
            }
        }
        t
    };
    let good = |t: &Mat| {
        let d = t.det();
        !d.is_zero() && d.is_constant()
    };
    for v in &ker {
        let t = to_mat(v);
        if good(&t) {
            return Ok(Some(t));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a09);
    for _ in 0..64 {
        let mut v = vec![k.zero(); unknowns.len()];
        for b in &ker {
            let c = k.random(&mut rng);
            for (x, &y) in v.iter_mut().zip(b) {
                *x = k.add(*x, k.mul(c, y));
            }
        }
        let t = to_mat(&v);
        if good(&t) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// The cover u -> u^N of the normalized line, branched over 0 and infinity.
#[derive(Clone, Debug)]
pub struct CyclicCover {
    pub down: MarkedLine,
    pub up: MarkedLine,
    pub n: u32,
    pub zeta: FieldElem,
}

impl CyclicCover {
    pub fn new(down: &MarkedLine, n: u32) -> Result<CyclicCover> {
        let k = down.field().clone();
        if down.points()[down.weight_point()] != Point::Infinity {
            return Err(Error::Precondition("the weighted point must be infinity".into()));
        }
        if n == 0 || (k.p() as u64).is_multiple_of(n as u64) {
            return Err(Error::Precondition(format!("invalid cover degree {n}")));
        }
        let nn = n as usize;
        let unity = &Poly::monomial(&k, k.one(), nn) - &Poly::one(&k);
        let mu = roots(&unity, 0);
        if mu.len() != nn {
            return Err(Error::FieldTooSmall(format!("no primitive {n}-th root of unity in F_{}", k.q())));
        }
        let zeta = *mu.iter().find(|&&z| k.order(z) == n as u64).unwrap();
        let mut pts = vec![Point::Infinity];
        for c in down.finite_points() {
            if c.is_zero() {
                pts.push(Point::Finite(c));
                continue;
            }
            let f = &Poly::monomial(&k, k.one(), nn) - &Poly::constant(&k, c);
            let r = roots(&f, 0);
            if r.len() != nn {
                return Err(Error::FieldTooSmall(format!("{} has no {n}-th root in F_{}", k.format(c), k.q())));
            }
            pts.extend(r.into_iter().map(Point::Finite));
        }
        let up = MarkedLine::new(&k, pts, 1, 0)?;
        Ok(CyclicCover { down: down.clone(), up, n, zeta })
    }

    /// f(u^N).
    pub fn pullback_function(&self, f: &RatFunc) -> RatFunc {
        f.inflate(self.n as usize)
    }

    /// Coefficient of du in the pullback of f dx.
    pub fn pullback_form(&self, f: &RatFunc) -> RatFunc {
        let k = self.down.field();
        let du = RatFunc::from_poly(Poly::monomial(k, k.from_i64(self.n as i64), self.n as usize - 1));
        &f.inflate(self.n as usize) * &du
    }

    /// Inverse of `pullback_form` on invariant forms.
    pub fn pushdown_form(&self, g: &RatFunc) -> Option<RatFunc> {
        let k = self.down.field();
        let du = RatFunc::from_poly(Poly::monomial(k, k.from_i64(self.n as i64), self.n as usize - 1));
        g.div(&du).ok()?.deflate(self.n as usize)
    }

    fn pullback_data(&self, base: &ParBundle, m: &Mat, conn: bool) -> Result<(ParBundle, Mat)> {
        let k = self.down.field().clone();
        let eq = cyclic_pullback_bundle(&self.down, base, self.n)?;
        let up_base = ParBundle::new(eq.summands.iter().map(|l| ParLine::new(l.degree(), [])).collect());
        let mut up = m.map(|f| self.pullback_form(f));
        if eq.summands.iter().any(|l| l.zero_order != 0) {
            let rows = (0..m.dim())
                .map(|i| {
                    (0..m.dim())
                        .map(|j| if i == j { x_pow(&k, eq.summands[i].zero_order) } else { RatFunc::zero(&k) })
                        .collect()
                })
                .collect();
            let d = Mat::from_rows(rows);
            let di = d.inv()?;
            up = d.mul(&up).mul(&di);
            if conn {
                up = up.sub(&d.derivative().mul(&di));
            }
        }
        Ok((up_base, up))
    }
}

pub fn pullback_higgs_cyclic(h: &HiggsField, n: u32) -> Result<(CyclicCover, HiggsField)> {
    let cover = CyclicCover::new(&h.line, n)?;
    let (base, theta) = cover.pullback_data(&h.base, &h.theta, false)?;
    let up = HiggsField { line: cover.up.clone(), base, theta };
    Ok((cover, up))
}

pub fn pullback_conn_cyclic(c: &LogConn, n: u32) -> Result<(CyclicCover, LogConn)> {
    let cover = CyclicCover::new(&c.line, n)?;
    let (base, a) = cover.pullback_data(&c.base, &c.a, true)?;
    let up = LogConn { line: cover.up.clone(), base, a };
    Ok((cover, up))
}

/// Transition into the chart around `center`: chart coordinates are `g`
/// times reference coordinates.
#[derive(Clone, Debug)]
pub struct ChartTransition {
    pub center: FieldElem,
    pub g: Mat,
}

/// A bundle glued from the reference chart (the complement of the chart
/// centers, including infinity) and small charts around finite centers.
/// Reference frame vector i has real order `degrees[i]` at infinity.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub field: Field,
    pub degrees: Vec<Rational64>,
    pub charts: Vec<ChartTransition>,
    /// Twists run over (1/step)Z.
    pub step: u32,
    /// Restricts sections to functions of x^invariant; 1 for no restriction.
    pub invariant: u32,
}

/// Splitting type with a frame adapted to it: the columns of `frame` are
/// reference-chart coordinates of generators of the summands, in order of
/// decreasing degree.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub degrees: Vec<Rational64>,
    pub frame: Mat,
    pub section: Vec<RatFunc>,
    pub profile: Vec<(Rational64, usize)>,
}

struct CechSystem {
    q: Poly,
    cols: Vec<(usize, usize, Rational64)>,
    rows: Vec<Vec<FieldElem>>,
    pivots: Vec<usize>,
}

impl CechSystem {
    fn prefix(&self, t: Rational64) -> usize {
        self.cols.partition_point(|c| c.2 <= t)
    }

    fn h0(&self, t: Rational64) -> usize {
        let l = self.prefix(t);
        l - self.pivots.iter().filter(|&&c| c < l).count()
    }

    fn kernel(&self, t: Rational64) -> Vec<Vec<FieldElem>> {
        let k = self.q.field();
        let l = self.prefix(t);
        let mut pivot_row = vec![None; l];
        for (r, &c) in self.pivots.iter().enumerate() {
            if c < l {
                pivot_row[c] = Some(r);
            }
        }
        let mut out = Vec::new();
        for free in 0..l {
            if pivot_row[free].is_some() {
                continue;
            }
            let mut v = vec![k.zero(); l];
            v[free] = k.one();
            for (c, r) in pivot_row.iter().enumerate() {
                if let Some(r) = r {
                    v[c] = k.neg(self.rows[*r][free]);
                }
            }
            out.push(v);
        }
        out
    }

    fn section(&self, rank: usize, v: &[FieldElem]) -> Vec<RatFunc> {
        let k = self.q.field();
        let mut polys = vec![vec![k.zero(); 0]; rank];
        for (idx, &c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, e, _) = self.cols[idx];
            if polys[i].len() <= e {
                polys[i].resize(e + 1, k.zero());
            }
            polys[i][e] = k.add(polys[i][e], c);
        }
        polys.into_iter().map(|c| RatFunc::new(Poly::new(k, c), self.q.clone()).unwrap()).collect()
    }
}

fn floor_i(r: Rational64) -> i64 {
    r.floor().to_integer()
}

impl Gluing {
    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Sum of the reference degrees plus the orders of the transition
    /// determinants at the chart centers.
    pub fn total_degree(&self) -> Rational64 {
        let mut d = self.degrees.iter().fold(Rational64::zero(), |a, b| a + b);
        for ch in &self.charts {
            d += Rational64::from_integer(ch.g.det().valuation_at(ch.center));
        }
        d
    }

    fn system(&self, bound: Rational64) -> Result<CechSystem> {
        let k = &self.field;
        let n = self.rank();
        let inv = self.invariant.max(1) as usize;
        let mut poles = Vec::new();
        for ch in &self.charts {
            let gi = ch.g.inv()?;
            let pole = |m: &Mat| m.entries().iter().map(|e| if e.is_zero() { 0 } else { (-e.valuation_at(ch.center)).max(0) }).max().unwrap_or(0);
            poles.push((pole(&gi) as usize, pole(&ch.g) as usize));
        }
        if inv > 1 {
            let kmax = self.charts.iter().zip(&poles).filter(|(c, _)| !c.center.is_zero()).map(|(_, p)| p.0).max().unwrap_or(0);
            for (ch, p) in self.charts.iter().zip(poles.iter_mut()) {
                p.0 = if ch.center.is_zero() { p.0.div_ceil(inv) * inv } else { kmax };
            }
        }
        let mut q = Poly::one(k);
        for (ch, p) in self.charts.iter().zip(&poles) {
            q = &q * &Poly::linear(k, ch.center).pow(p.0 as u64);
        }
        let dq = q.degree_i();
        let mut cols = Vec::new();
        for (i, rho) in self.degrees.iter().enumerate() {
            let emax = floor_i(rho + bound) + dq;
            let mut e = 0i64;
            while e <= emax {
                cols.push((i, e as usize, Rational64::from_integer(e - dq) - rho));
                e += inv as i64;
            }
        }
        cols.sort_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        let emax_all = cols.iter().map(|c| c.1).max().unwrap_or(0);
        let mut by_e: Vec<Vec<usize>> = vec![Vec::new(); emax_all + 1];
        for (idx, c) in cols.iter().enumerate() {
            by_e[c.1].push(idx);
        }
        let mut rows: Vec<Vec<FieldElem>> = Vec::new();
        for (ch, p) in self.charts.iter().zip(&poles) {
            let kk = p.0 + p.1;
            if kk == 0 {
                continue;
            }
            let a = ch.center;
            // lc[j][i][s] = coefficient of y^-s in g_ji / Q at a, s = 1..=kk
            let mut lc = vec![vec![vec![k.zero(); kk + 1]; n]; n];
            let qr = RatFunc::from_poly(q.clone());
            for j in 0..n {
                for i in 0..n {
                    let f = ch.g[(j, i)].div(&qr)?;
                    if f.is_zero() {
                        continue;
                    }
                    let v = f.valuation_at(a);
                    if v >= 0 {
                        continue;
                    }
                    let l = f.laurent_at(a, (-v) as usize);
                    for s in 1..=kk {
                        lc[j][i][s] = l.coeff(-(s as i64));
                    }
                }
            }
            let base_row = rows.len();
            rows.extend(std::iter::repeat_n(vec![k.zero(); cols.len()], n * kk));
            let mut taylor = vec![k.zero(); kk];
            taylor[0] = k.one();
            for (e, idxs) in by_e.iter().enumerate() {
                if e > 0 {
                    for t in (0..kk).rev() {
                        let prev = if t > 0 { taylor[t - 1] } else { k.zero() };
                        taylor[t] = k.add(k.mul(a, taylor[t]), prev);
                    }
                }
                for &idx in idxs {
                    let i = cols[idx].0;
                    for j in 0..n {
                        for r in 1..=kk {
                            let mut acc = k.zero();
                            for (t, &tv) in taylor.iter().enumerate().take(kk - r + 1) {
                                let l = lc[j][i][r + t];
                                if !l.is_zero() && !tv.is_zero() {
                                    acc = k.add(acc, k.mul(l, tv));
                                }
                            }
                            rows[base_row + j * kk + r - 1][idx] = acc;
                        }
                    }
                }
            }
        }
        let pivots = rref(k, &mut rows, cols.len());
        Ok(CechSystem { q, cols, rows, pivots })
    }

    /// Dimension of the space of global sections of V(t inf).
    pub fn h0(&self, t: Rational64) -> Result<usize> {
        Ok(self.system(t)?.h0(t))
    }

    /// Basis of the global sections of V(t inf), in reference coordinates.
    pub fn sections(&self, t: Rational64) -> Result<Vec<Vec<RatFunc>>> {
        let sys = self.system(t)?;
        Ok(sys.kernel(t).iter().map(|v| sys.section(self.rank(), v)).collect())
    }
}

/// Expected h0 of O(d_1) + ... + O(d_n) twisted by t.
pub fn split_h0(degrees: &[Rational64], t: Rational64) -> usize {
    degrees.iter().map(|d| (floor_i(d + t) + 1).max(0) as usize).sum()
}

/// Splitting type of a glued bundle of rank at most two, from h0 of the
/// twists V(t inf) for t up to `bound`. The whole h0 profile up to `bound`
/// is checked against the one of the claimed split bundle. With an
/// invariance restriction of order N, degrees and twists are counted on the
/// cover, so a summand of degree D contributes floor((D + t)/N) + 1.
pub fn splitting_type(gl: &Gluing, bound: Rational64) -> Result<Splitting> {
    let k = gl.field.clone();
    let n = gl.rank();
    if n == 0 || n > 2 {
        return Err(Error::Precondition("splitting type needs rank one or two".into()));
    }
    let sys = gl.system(bound)?;
    let first_free = (0..sys.cols.len()).find(|c| !sys.pivots.contains(c));
    let Some(ff) = first_free else {
        return Err(Error::SplittingInconsistent("no global section below the twist bound".into()));
    };
    let t_min = sys.cols[ff].2;
    let total = gl.total_degree();
    let d1 = -t_min;
    let degrees = if n == 1 { vec![d1] } else { vec![d1, total - d1] };
    if n == 2 && degrees[1] > degrees[0] {
        return Err(Error::SplittingInconsistent("second degree exceeds the first".into()));
    }
    let step = Rational64::new(1, gl.step.max(1) as i64);
    let unit = Rational64::from_integer(gl.invariant.max(1) as i64);
    let mut checks: Vec<Rational64> = sys.cols.iter().map(|c| c.2).filter(|&t| t <= bound).collect();
    for d in &degrees {
        let mut t = -*d - unit;
        while t <= bound {
            checks.push(t);
            t += unit;
        }
    }
    let scaled: Vec<Rational64> = degrees.iter().map(|d| d / unit).collect();
    checks.push(t_min - step);
    checks.sort();
    checks.dedup();
    let mut profile = Vec::new();
    for &t in &checks {
        let got = sys.h0(t);
        let want = split_h0(&scaled, t / unit);
        if got != want {
            return Err(Error::SplittingInconsistent(format!("h0 at twist {t} is {got}, split type predicts {want}")));
        }
        profile.push((t, got));
    }
    let s = sys.section(n, &sys.kernel(t_min)[0]);
    if n == 1 {
        let frame = Mat::from_rows(vec![vec![s[0].clone()]]);
        return Ok(Splitting { degrees, frame, section: s, profile });
    }
    let mut det_fix = RatFunc::one(&k);
    for ch in &gl.charts {
        let v = ch.g.det().valuation_at(ch.center);
        det_fix = &det_fix * &RatFunc::from_poly(Poly::linear(&k, ch.center)).pow(v)?;
    }
    let t2 = -degrees[1];
    let basis = sys.kernel(t2);
    let good = |c: &[FieldElem]| -> Option<Vec<RatFunc>> {
        let t = sys.section(n, c);
        let d = &(&(&s[0] * &t[1]) - &(&s[1] * &t[0])) * &det_fix;
        (d.is_constant() && !d.is_zero()).then_some(t)
    };
    let mut found = basis.iter().find_map(|b| good(b));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5117);
    for _ in 0..64 {
        if found.is_some() || basis.is_empty() {
            break;
        }
        let mut c = vec![k.zero(); basis[0].len()];
        for b in &basis {
            let r = k.random(&mut rng);
            for (x, &y) in c.iter_mut().zip(b) {
                *x = k.add(*x, k.mul(r, y));
            }
        }
        found = good(&c);
    }
    let Some(t) = found else {
        return Err(Error::SplittingInconsistent("could not complete the destabilizing section to a frame".into()));
    };
    let frame = Mat::from_rows(vec![vec![s[0].clone(), t[0].clone()], vec![s[1].clone(), t[1].clone()]]);
    Ok(Splitting { degrees, frame, section: s, profile })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    fn rf(k: &Field, s: &str) -> RatFunc {
        RatFunc::parse(k, s).unwrap()
    }

    fn line7() -> MarkedLine {
        let k = Field::prime(7).unwrap();
        MarkedLine::legendre(&k, k.from_i64(3), 5).unwrap()
    }

    #[test]
    fn log_pole_checks() {
        let line = line7();
        let k = line.field().clone();
        let base = ParBundle::component(r(1, 5));
        let ok = HiggsField::new(&line, base.clone(), Mat::from_rows(vec![
            vec![RatFunc::zero(&k), RatFunc::zero(&k)],
            vec![rf(&k, "1/(x^2+6*x)"), RatFunc::zero(&k)],
        ]))
        .unwrap();
        assert!(validate_log(&ok).is_valid());
        let double = HiggsField { theta: ok.theta.map(|e| e * e), ..ok.clone() };
        assert!(!validate_log(&double).is_valid());
        let off = HiggsField { theta: ok.theta.map(|e| if e.is_zero() { e.clone() } else { rf(&k, "1/(x+5)") }), ..ok };
        assert!(!validate_log(&off).is_valid());
    }

    #[test]
    fn nilpotent_residue() {
        let line = line7();
        let k = line.field().clone();
        let a = Mat::from_rows(vec![vec![RatFunc::zero(&k), rf(&k, "1/x")], vec![RatFunc::zero(&k), RatFunc::zero(&k)]]);
        let c = LogConn::new(&line, ParBundle::trivial(2), a).unwrap();
        let res = residue(&c, Point::Finite(k.zero())).unwrap();
        assert_eq!(res.matrix, vec![vec![k.zero(), k.one()], vec![k.zero(), k.zero()]]);
        assert_eq!(res.eigenvalues, vec![k.zero(), k.zero()]);
    }

    #[test]
    fn shifted_line_residue() {
        let line = line7();
        let k = line.field().clone();
        let gamma = r(7, 5);
        let c = twist_by_shift(&LogConn::trivial(&line, ParBundle::trivial(1)), &[(Point::Infinity, gamma)]).unwrap();
        let res = residue(&c, Point::Infinity).unwrap();
        assert_eq!(res.matrix[0][0], rational_to_field(&k, gamma));
    }

    #[test]
    fn p_curvature_examples() {
        let line = line7();
        let k = line.field().clone();
        let z = RatFunc::zero(&k);
        for top in ["0", "1", "x"] {
            let a = Mat::from_rows(vec![vec![z.clone(), rf(&k, top)], vec![z.clone(), z.clone()]]);
            let c = LogConn::new(&line, ParBundle::trivial(2), a).unwrap();
            assert!(p_curvature(&c).unwrap().is_zero());
        }
    }

    #[test]
    fn splitting_of_standard_cocycles() {
        let k = Field::prime(7).unwrap();
        let z = RatFunc::zero(&k);
        let gl = |g: Mat| Gluing {
            field: k.clone(),
            degrees: vec![r(0, 1), r(0, 1)],
            charts: vec![ChartTransition { center: k.zero(), g }],
            step: 1,
            invariant: 1,
        };
        let diag = Mat::from_rows(vec![vec![rf(&k, "x^3"), z.clone()], vec![z.clone(), rf(&k, "1/x")]]);
        assert_eq!(splitting_type(&gl(diag), r(6, 1)).unwrap().degrees, vec![r(3, 1), r(-1, 1)]);
        let ext = Mat::from_rows(vec![vec![rf(&k, "x"), RatFunc::one(&k)], vec![z.clone(), rf(&k, "1/x")]]);
        assert_eq!(splitting_type(&gl(ext), r(6, 1)).unwrap().degrees, vec![r(1, 1), r(-1, 1)]);
        let triv = Mat::identity(&k, 2);
        assert_eq!(splitting_type(&gl(triv), r(6, 1)).unwrap().degrees, vec![r(0, 1), r(0, 1)]);
    }
}
