use hdrflow::algebra::{poly_factor, Field, FieldElem, Mat, Poly, RatFunc, W2Elem, W2};
use hdrflow::cartier::{inv_cartier_par, inv_cartier_triv, transformed_weight, weight_transition, GluedConn, Route};
use hdrflow::connections::{p_curvature, HiggsField};
use hdrflow::flow::{component_dim, cycle_periods, selfmap_step, ModuliPoint, TwistMode};
use hdrflow::oracle::{torsion_x_set, LegendreCurve};
use hdrflow::parabolic::{biswas_pullback, cyclic_pullback_bundle, par_degree, MarkedLine, ParBundle, ParLine, Point};
use hdrflow::Error;
use num_rational::Rational64;
use proptest::prelude::*;

const FIELDS: [(u32, u32); 6] = [(5, 1), (7, 1), (3, 2), (5, 2), (7, 2), (2 + 9, 1)];

fn field(i: usize) -> Field {
    let (p, s) = FIELDS[i % FIELDS.len()];
    Field::new(p, s, 0).unwrap()
}

fn elem(k: &Field, i: u64) -> FieldElem {
    k.from_index(i % k.q())
}

fn poly(k: &Field, c: &[u64]) -> Poly {
    Poly::new(k, c.iter().map(|&i| elem(k, i)).collect())
}

fn legendre(p: u32, lam: u32, n: u32) -> MarkedLine {
    let k = Field::prime(p).unwrap();
    MarkedLine::legendre(&k, k.from_i64(2 + (lam % (p - 2)) as i64), n).unwrap()
}

fn graded_higgs(p: u32, lam: u32, l: i64, c: &[u64]) -> HiggsField {
    let line = legendre(p, lam, 1);
    let k = line.field().clone();
    let mut pp = poly(&k, &c[..(3 - 2 * l) as usize]);
    if pp.is_zero() {
        pp = Poly::one(&k);
    }
    let mut theta = Mat::zero(&k, 2);
    theta[(1, 0)] = RatFunc::new(pp, line.finite_divisor_poly()).unwrap();
    HiggsField::new(&line, ParBundle::component(Rational64::from_integer(l)), theta).unwrap()
}

proptest! {
    #[test]
    fn field_ring_laws(f in 0usize..6, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let k = field(f);
        let (a, b, c) = (elem(&k, a), elem(&k, b), elem(&k, c));
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.add(k.sub(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
        }
        prop_assert_eq!(k.frobenius_pow(k.mul(a, b), 1), k.mul(k.frobenius_pow(a, 1), k.frobenius_pow(b, 1)));
        prop_assert_eq!(k.parse(&k.format(a)).unwrap(), a);
    }

    #[test]
    fn division_with_remainder(f in 0usize..6, a in prop::collection::vec(any::<u64>(), 0..12), d in prop::collection::vec(any::<u64>(), 1..6)) {
        let k = field(f);
        let (a, d) = (poly(&k, &a), poly(&k, &d));
        prop_assume!(!d.is_zero());
        let (q, r) = a.divrem(&d).unwrap();
        prop_assert_eq!(&(&q * &d) + &r, a);
        prop_assert!(r.degree_i() < d.degree_i());
    }

    #[test]
    fn factorization_multiplies_back(f in 0usize..6, c in prop::collection::vec(any::<u64>(), 2..10), seed in any::<u64>()) {
        let k = field(f);
        let a = poly(&k, &c);
        prop_assume!(!a.is_zero());
        let mut prod = Poly::constant(&k, a.lc());
        for (g, m) in poly_factor(&a, seed) {
            prop_assert!(g.is_monic() && g.degree_i() >= 1);
            prod = &prod * &g.pow(m as u64);
        }
        prop_assert_eq!(prod, a);
    }

    #[test]
    fn rational_functions_form_a_differential_field(f in 0usize..6, n in prop::collection::vec(any::<u64>(), 1..5), d in prop::collection::vec(any::<u64>(), 1..5), g in prop::collection::vec(any::<u64>(), 1..5)) {
        let k = field(f);
        let (n, d, g) = (poly(&k, &n), poly(&k, &d), poly(&k, &g));
        prop_assume!(!d.is_zero() && !g.is_zero());
        let a = RatFunc::new(n, d).unwrap();
        let b = RatFunc::from_poly(g);
        prop_assert_eq!(&a.div(&b).unwrap() * &b, a.clone());
        prop_assert_eq!((&a * &b).derivative(), &(&a.derivative() * &b) + &(&a * &b.derivative()));
    }

    #[test]
    fn witt_reduction_is_a_ring_map(f in 0usize..6, a in any::<(u64, u64)>(), b in any::<(u64, u64)>()) {
        let k = field(f);
        let w = W2::new(&k);
        let a = W2Elem { a0: elem(&k, a.0), a1: elem(&k, a.1) };
        let b = W2Elem { a0: elem(&k, b.0), a1: elem(&k, b.1) };
        prop_assert_eq!(w.reduce(w.add(a, b)), k.add(a.a0, b.a0));
        prop_assert_eq!(w.reduce(w.mul(a, b)), k.mul(a.a0, b.a0));
        prop_assert_eq!(w.add(w.mul(a, b), w.mul(a, a)), w.mul(a, w.add(b, a)));
    }

    #[test]
    fn weight_pairs_sum_to_one(n in 2u32..12, d in 1u32..12, p in prop::sample::select(vec![5u32, 7, 11, 13, 17, 19, 23])) {
        prop_assume!(d < n && num_integer::gcd(d, n) == 1 && p % n != 0);
        let wt = weight_transition(n, d, p).unwrap();
        prop_assert_eq!(wt.pair.0 + wt.pair.1, Rational64::from_integer(1));
        let w = transformed_weight(Rational64::new(d as i64, n as i64), p);
        prop_assert!(w == wt.pair.0 || w == wt.pair.1);
        prop_assert_eq!(Rational64::new(wt.d_prime as i64, n as i64), wt.pair.0);
    }

    #[test]
    fn parlines_are_canonical(deg in -5i64..5, a in -20i64..20, b in 1i64..8) {
        let w = Rational64::new(a, b);
        let l = ParLine::new(deg, [(Point::Infinity, w)]);
        prop_assert_eq!(l.par_degree(), Rational64::from_integer(deg) + w);
        let v = l.weight(Point::Infinity);
        prop_assert!(v >= Rational64::from_integer(0) && v < Rational64::from_integer(1));
    }

    #[test]
    fn pullback_constructions_agree(n in prop::sample::select(vec![2u32, 3, 5]), spec in prop::collection::vec((-3i64..4, 0i64..5, 0i64..5), 1..4)) {
        let line = legendre(7, 1, n);
        let k = line.field().clone();
        let nn = n as i64;
        let v = ParBundle::new(spec.iter().map(|&(d, a, b)| ParLine::new(d, [
            (Point::Infinity, Rational64::new(a % nn, nn)),
            (Point::Finite(k.zero()), Rational64::new(b % nn, nn)),
        ])).collect());
        prop_assert_eq!(biswas_pullback(&line, &v, n).unwrap(), cyclic_pullback_bundle(&line, &v, n).unwrap());
    }

    #[test]
    fn moduli_points_are_projective(p in prop::sample::select(vec![7u32, 11]), lam in any::<u32>(), c in prop::collection::vec(any::<u64>(), 2), s in 1u64..100) {
        let line = legendre(p, lam, 2);
        let k = line.field().clone();
        let c: Vec<FieldElem> = c.iter().map(|&i| elem(&k, i)).collect();
        prop_assume!(c.iter().any(|x| !x.is_zero()));
        let a = elem(&k, s % (p as u64 - 1) + 1);
        let scaled: Vec<FieldElem> = c.iter().map(|&x| k.mul(a, x)).collect();
        let pt = ModuliPoint::new(&line, 1, c).unwrap();
        prop_assert_eq!(&pt, &ModuliPoint::new(&line, 1, scaled).unwrap());
        let z = pt.p1_coordinate().unwrap();
        prop_assert_eq!(ModuliPoint::from_p1(&line, 1, z).unwrap(), pt);
    }

    #[test]
    fn cycle_periods_match_iteration(next in prop::collection::vec(prop::option::weighted(0.9, 0usize..30), 30)) {
        let next: Vec<Option<usize>> = next.into_iter().map(|x| x.map(|j| j % 30)).collect();
        let per = cycle_periods(&next);
        for i in 0..30 {
            let mut j = Some(i);
            let mut found = None;
            for step in 1..=30u32 {
                j = j.and_then(|x| next[x]);
                if j == Some(i) {
                    found = Some(step);
                    break;
                }
            }
            prop_assert_eq!(per[i], found);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn torsion_sets_are_galois_stable(p in prop::sample::select(vec![5u32, 7, 11]), lam in any::<u32>(), n_max in 2usize..6) {
        let line = legendre(p, lam, 2);
        let k = line.field().clone();
        let lambda = line.finite_points().into_iter().find(|a| !a.is_zero() && *a != k.one()).unwrap();
        let c = LegendreCurve::new(&k, lambda).unwrap();
        let set = torsion_x_set(&c, n_max, 2).unwrap();
        let kk = Field::new(p, 2, 0).unwrap();
        for &z in &set {
            prop_assert!(set.contains(&kk.frobenius_pow(z, 1)));
        }
    }

    #[test]
    fn glued_charts_satisfy_cocycle(p in prop::sample::select(vec![5u32, 7, 11]), lam in any::<u32>(), l in 0i64..2, c in prop::collection::vec(any::<u64>(), 3)) {
        let h = graded_higgs(p, lam, l, &c);
        let pr = Rational64::from_integer(p as i64);
        let g = GluedConn::build(&h, h.real_degrees().iter().map(|d| d * pr).collect(), 1).unwrap();
        prop_assert!(g.check_cocycle().is_ok());
        prop_assert!(g.check_compatibility().is_ok());
    }

    #[test]
    fn p_curvature_is_minus_frobenius_theta(p in prop::sample::select(vec![5u32, 7]), lam in any::<u32>(), l in 0i64..2, c in prop::collection::vec(any::<u64>(), 3), transport in any::<bool>()) {
        let h = graded_higgs(p, lam, l, &c);
        let out = inv_cartier_triv(&h, transport).unwrap();
        prop_assert_eq!(p_curvature(&out.conn).unwrap(), out.expected_p_curvature().unwrap());
        prop_assert_eq!(par_degree(&out.conn.base), Rational64::from_integer(0));
    }

    #[test]
    fn degree_scales_by_p(p in prop::sample::select(vec![7u32, 11, 13]), n in prop::sample::select(vec![2u32, 3, 4, 5]), d in 1u32..5, lam in any::<u32>()) {
        prop_assume!(d < n && num_integer::gcd(d, n) == 1 && p % n != 0);
        let line = legendre(p, lam, n);
        let k = line.field().clone();
        let base = ParBundle::new(vec![ParLine::at_infinity(Rational64::new(d as i64, n as i64))]);
        let h = HiggsField::new(&line, base.clone(), Mat::zero(&k, 1)).unwrap();
        let out = inv_cartier_par(&h, Route::Direct).unwrap();
        prop_assert_eq!(par_degree(&out.conn.base), Rational64::from_integer(p as i64) * par_degree(&base));
    }

    #[test]
    fn selfmap_keeps_lambda_bounded(p in prop::sample::select(vec![7u32, 11, 13]), n in prop::sample::select(vec![2u32, 3, 5]), d in 1u32..5, lam in any::<u32>(), c in prop::collection::vec(any::<u64>(), 3)) {
        prop_assume!(d < n && num_integer::gcd(d, n) == 1 && p % n != 0);
        let line = legendre(p, lam, n);
        let k = line.field().clone();
        let dim = component_dim(4, n, d).unwrap();
        let c: Vec<FieldElem> = c[..=dim].iter().map(|&i| elem(&k, i)).collect();
        prop_assume!(c.iter().any(|x| !x.is_zero()));
        let pt = ModuliPoint::new(&line, d, c).unwrap();
        match selfmap_step(&pt, TwistMode::Strict) {
            Ok(step) => {
                prop_assert!(step.checks.all());
                prop_assert!(step.image.lambda() <= Rational64::from_integer(1));
                prop_assert_eq!(step.weights, weight_transition(n, d, p).unwrap().pair);
            }
            Err(Error::Indeterminacy(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
