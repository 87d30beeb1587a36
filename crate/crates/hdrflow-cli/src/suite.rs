//! The invariant suite behind `hdrflow check`.

use std::time::Instant;

use hdrflow::algebra::factor::is_irreducible;
use hdrflow::algebra::{poly_factor, Field, FieldElem, Poly, W2};
use hdrflow::cartier::{inv_cartier_par, transformed_weight, GluedConn, Route};
use hdrflow::connections::{p_curvature, split_h0, splitting_type, HiggsField};
use hdrflow::flow::{component_dim, selfmap_step, ModuliPoint, TwistMode};
use hdrflow::parabolic::{par_degree, MarkedLine, ParBundle, ParLine};
use hdrflow::algebra::Mat;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    pub millis: u128,
}

type Outcome = Result<(usize, String), String>;

pub const SUITES: &[&str] = &["all", "algebra", "cartier", "flow"];

pub fn run(suite: &str, seed: u64) -> Vec<CheckResult> {
    let checks: Vec<(&'static str, &'static str, fn(&mut ChaCha8Rng) -> Outcome)> = vec![
        ("algebra", "field_axioms", field_axioms),
        ("algebra", "factor_roundtrip", factor_roundtrip),
        ("algebra", "w2_homomorphism", w2_homomorphism),
        ("cartier", "cocycle_identities", cocycle_identities),
        ("cartier", "p_curvature_identity", p_curvature_identity),
        ("cartier", "degree_scaling", degree_scaling),
        ("cartier", "cech_h0_consistency", cech_h0_consistency),
        ("flow", "lambda_bound", lambda_bound),
        ("flow", "semistability_preservation", semistability_preservation),
    ];
    let mut out = Vec::new();
    for (i, (group, name, f)) in checks.into_iter().enumerate() {
        if suite != "all" && suite != group {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64 * 0x9e37));
        let t = Instant::now();
        let (passed, cases, detail) = match f(&mut rng) {
            Ok((c, d)) => (true, c, d),
            Err(d) => (false, 0, d),
        };
        out.push(CheckResult { name, passed, cases, detail, millis: t.elapsed().as_millis() });
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field_axioms(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for (p, s) in [(5, 1), (7, 2), (3, 3), (11, 2), (13, 1)] {
        let k = Field::new(p, s, 0).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let (a, b, c) = (k.random(rng), k.random(rng), k.random(rng));
            ensure(k.add(k.add(a, b), c) == k.add(a, k.add(b, c)), || format!("additive associativity in F_{}", k.q()))?;
            ensure(k.mul(k.mul(a, b), c) == k.mul(a, k.mul(b, c)), || format!("multiplicative associativity in F_{}", k.q()))?;
            ensure(k.mul(a, k.add(b, c)) == k.add(k.mul(a, b), k.mul(a, c)), || format!("distributivity in F_{}", k.q()))?;
            if !a.is_zero() {
                ensure(k.mul(a, k.inv(a).unwrap()) == k.one(), || format!("inverse in F_{}", k.q()))?;
            }
            let fr = |x: FieldElem| k.frobenius_pow(x, 1);
            ensure(fr(k.add(a, b)) == k.add(fr(a), fr(b)) && fr(k.mul(a, b)) == k.mul(fr(a), fr(b)), || "frobenius is a ring map".into())?;
            ensure(k.frobenius_pow(fr(a), -1) == a && k.pow(a, k.q()) == a, || "frobenius order".into())?;
            n += 1;
        }
    }
    Ok((n, "5 fields x 200 random triples".into()))
}

fn random_poly(k: &Field, rng: &mut ChaCha8Rng, deg: usize) -> Poly {
    let mut c: Vec<FieldElem> = (0..deg).map(|_| k.random(rng)).collect();
    c.push(k.random_nonzero(rng));
    Poly::new(k, c)
}

fn factor_roundtrip(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for (p, s) in [(5, 1), (7, 2), (3, 3), (2 + 9, 1)] {
        let k = Field::new(p, s, 0).map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let deg = rng.gen_range(1..=12);
            let f = random_poly(&k, rng, deg);
            let facs = poly_factor(&f, rng.gen());
            let mut prod = Poly::constant(&k, f.lc());
            for (g, m) in &facs {
                ensure(is_irreducible(g) && g.is_monic(), || format!("reducible factor {g} of {f}"))?;
                prod = &prod * &g.pow(*m as u64);
            }
            ensure(prod == f, || format!("factorization of {f} does not multiply back"))?;
            n += 1;
        }
    }
    Ok((n, "random polynomials of degree <= 12".into()))
}

fn w2_homomorphism(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for (p, s) in [(5, 1), (7, 2), (11, 1)] {
        let k = Field::new(p, s, 0).map_err(|e| e.to_string())?;
        let w = W2::new(&k);
        for _ in 0..200 {
            let a = hdrflow::algebra::W2Elem { a0: k.random(rng), a1: k.random(rng) };
            let b = hdrflow::algebra::W2Elem { a0: k.random(rng), a1: k.random(rng) };
            ensure(w.reduce(w.add(a, b)) == k.add(a.a0, b.a0) && w.reduce(w.mul(a, b)) == k.mul(a.a0, b.a0), || "reduction".into())?;
            ensure(w.sub(w.add(a, b), b) == a, || "additive inverse".into())?;
            let (x, y) = (k.random(rng), k.random(rng));
            ensure(w.mul(w.teich(x), w.teich(y)) == w.teich(k.mul(x, y)), || "teichmuller multiplicativity".into())?;
            ensure(w.divide_by_p(w.mul(w.from_int(p as i64), w.teich(x))) == Ok(x), || "division by p".into())?;
            let (i, j) = (rng.gen_range(-500..500i64), rng.gen_range(-500..500i64));
            ensure(w.add(w.from_int(i), w.from_int(j)) == w.from_int(i + j), || "integer addition".into())?;
            ensure(w.mul(w.from_int(i), w.from_int(j)) == w.from_int(i * j), || "integer multiplication".into())?;
            n += 1;
        }
    }
    Ok((n, "W2 over F_5, F_49, F_11".into()))
}

/// A random point of a nonempty component on a Legendre line over F_p.
pub fn random_point(rng: &mut ChaCha8Rng, p: u32, n: u32, d: u32) -> Result<ModuliPoint, String> {
    let k = Field::prime(p).map_err(|e| e.to_string())?;
    let lam = k.from_i64(rng.gen_range(2..p as i64));
    let line = MarkedLine::legendre(&k, lam, n).map_err(|e| e.to_string())?;
    let dim = component_dim(4, n, d).ok_or("empty component")?;
    loop {
        let c: Vec<FieldElem> = (0..=dim).map(|_| k.random(rng)).collect();
        if c.iter().any(|x| !x.is_zero()) {
            return ModuliPoint::new(&line, d, c).map_err(|e| e.to_string());
        }
    }
}

fn random_trivial_higgs(rng: &mut ChaCha8Rng, p: u32) -> Result<HiggsField, String> {
    let k = Field::prime(p).map_err(|e| e.to_string())?;
    let lam = k.from_i64(rng.gen_range(2..p as i64));
    let line = MarkedLine::legendre(&k, lam, 1).map_err(|e| e.to_string())?;
    let l = rng.gen_range(0..=1i64);
    let deg = (2 - 2 * l) as usize;
    let pp = random_poly(&k, rng, deg);
    let mut theta = Mat::zero(&k, 2);
    theta[(1, 0)] = hdrflow::algebra::RatFunc::new(pp, line.finite_divisor_poly()).map_err(|e| e.to_string())?;
    HiggsField::new(&line, ParBundle::component(Rational64::from_integer(l)), theta).map_err(|e| e.to_string())
}

fn cocycle_identities(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for p in [5, 7, 11] {
        for _ in 0..4 {
            let h = random_trivial_higgs(rng, p)?;
            let degrees = h.real_degrees().iter().map(|d| d * Rational64::from_integer(p as i64)).collect();
            let g = GluedConn::build(&h, degrees, 1).map_err(|e| e.to_string())?;
            g.check_cocycle().map_err(|e| e.to_string())?;
            g.check_compatibility().map_err(|e| e.to_string())?;
            n += 1;
        }
    }
    Ok((n, "all chart triples, p in {5, 7, 11}".into()))
}

fn p_curvature_identity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for p in [5, 7] {
        for _ in 0..3 {
            let h = random_trivial_higgs(rng, p)?;
            let out = hdrflow::cartier::inv_cartier_triv(&h, false).map_err(|e| e.to_string())?;
            let psi = p_curvature(&out.conn).map_err(|e| e.to_string())?;
            ensure(psi == out.expected_p_curvature().map_err(|e| e.to_string())?, || format!("p-curvature mismatch for p = {p}"))?;
            n += 1;
        }
    }
    Ok((n, "psi = -F*theta in the split frame".into()))
}

fn degree_scaling(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for (p, nn) in [(7u32, 5u32), (11, 3), (13, 2), (11, 5)] {
        for d in 1..nn {
            if num_integer::gcd(d, nn) != 1 {
                continue;
            }
            let k = Field::prime(p).map_err(|e| e.to_string())?;
            let line = MarkedLine::legendre(&k, k.from_i64(rng.gen_range(2..p as i64)), nn).map_err(|e| e.to_string())?;
            let w = Rational64::new(d as i64, nn as i64);
            let base = ParBundle::new(vec![ParLine::at_infinity(w)]);
            let h = HiggsField::new(&line, base.clone(), Mat::zero(&k, 1)).map_err(|e| e.to_string())?;
            let out = inv_cartier_par(&h, Route::Direct).map_err(|e| e.to_string())?;
            let pr = Rational64::from_integer(p as i64);
            ensure(par_degree(&out.conn.base) == pr * par_degree(&base), || format!("rank one degree for w = {w}, p = {p}"))?;
            ensure(out.conn.base.summands[0].weight(hdrflow::parabolic::Point::Infinity) == transformed_weight(w, p), || "rank one weight".into())?;
            if component_dim(4, nn, d).is_some() {
                let pt = random_point(rng, p, nn, d)?;
                let h = pt.decode().map_err(|e| e.to_string())?;
                let out = inv_cartier_par(&h, Route::Direct).map_err(|e| e.to_string())?;
                ensure(par_degree(&out.conn.base) == Rational64::from_integer(0), || "rank two degree".into())?;
            }
            n += 1;
        }
    }
    Ok((n, "parabolic degree multiplies by p".into()))
}

fn cech_h0_consistency(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n = 0;
    for (p, nn, d) in [(7u32, 5u32, 1u32), (11, 2, 1), (13, 5, 2)] {
        let pt = random_point(rng, p, nn, d)?;
        let h = pt.decode().map_err(|e| e.to_string())?;
        let pr = Rational64::from_integer(p as i64);
        let degrees: Vec<Rational64> = h.real_degrees().iter().map(|x| x * pr).collect();
        let gl = GluedConn::build(&h, degrees, nn).map_err(|e| e.to_string())?.gluing(1);
        let bound = pr * Rational64::from_integer(5);
        let sp = splitting_type(&gl, bound).map_err(|e| e.to_string())?;
        let step = Rational64::new(1, nn as i64);
        let mut t = -sp.degrees[0] - Rational64::from_integer(2);
        while t <= sp.degrees[0] + Rational64::from_integer(2) {
            let got = gl.h0(t).map_err(|e| e.to_string())?;
            ensure(got == split_h0(&sp.degrees, t), || format!("h0 at {t} is {got} for splitting {:?}", sp.degrees))?;
            t += step;
            n += 1;
        }
    }
    Ok((n, "independent h0 solves against the split profile".into()))
}

fn flow_steps(rng: &mut ChaCha8Rng) -> Result<Vec<hdrflow::flow::StepChecks>, String> {
    let mut v = Vec::new();
    for (p, nn, d) in [(7u32, 2u32, 1u32), (11, 5, 1), (7, 5, 2), (13, 3, 1), (11, 4, 1), (13, 5, 3)] {
        for _ in 0..4 {
            let pt = random_point(rng, p, nn, d)?;
            match selfmap_step(&pt, TwistMode::Strict) {
                Ok(s) => v.push(s.checks),
                Err(hdrflow::Error::Indeterminacy(_)) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(v)
}

fn lambda_bound(rng: &mut ChaCha8Rng) -> Outcome {
    let v = flow_steps(rng)?;
    ensure(v.iter().all(|c| c.lambda_bound && c.weights_match), || "lambda exceeds m/2 - 1 or weights off".into())?;
    Ok((v.len(), "selfmap steps with lambda'' <= m/2 - 1".into()))
}

fn semistability_preservation(rng: &mut ChaCha8Rng) -> Outcome {
    let v = flow_steps(rng)?;
    ensure(v.iter().all(|c| c.semistable && c.log_valid && c.degree_zero), || "graded output not semistable".into())?;
    Ok((v.len(), "graded outputs are semistable, log and of degree zero".into()))
}
