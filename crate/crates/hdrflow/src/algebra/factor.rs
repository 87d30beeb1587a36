//! Factorization over F_q: squarefree split, distinct-degree split, then a
//! seeded Cantor-Zassenhaus equal-degree split.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::poly::Poly;
use crate::algebra::FieldElem;

/// Monic irreducible factors with multiplicities, sorted by (degree,
/// coefficients). The leading coefficient of `f` is dropped.
pub fn poly_factor(f: &Poly, seed: u64) -> Vec<(Poly, usize)> {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, m) in squarefree(&f.monic()) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, m));
            }
        }
    }
    out.sort_by(|a, b| {
        a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())).then(a.1.cmp(&b.1))
    });
    out
}

/// Distinct roots in F_q, sorted by encoding.
pub fn roots(f: &Poly, seed: u64) -> Vec<FieldElem> {
    if f.is_zero() {
        return Vec::new();
    }
    let k = f.field().clone();
    let m = f.monic();
    let x = Poly::x(&k);
    let xq = x.powmod(k.q(), &m);
    let g = m.gcd(&(&xq - &x));
    if g.is_constant() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r: Vec<FieldElem> =
        equal_degree(&g, 1, &mut rng).into_iter().map(|l| k.neg(l.coeff(0))).collect();
    r.sort();
    r
}

pub fn is_irreducible(f: &Poly) -> bool {
    match f.deg() {
        None | Some(0) => false,
        Some(1) => true,
        Some(n) => {
            let sq = squarefree(&f.monic());
            sq.len() == 1 && sq[0].1 == 1 && distinct_degree(&sq[0].0) == vec![(f.monic(), n)]
        }
    }
}

fn pth_root(f: &Poly) -> Poly {
    let k = f.field().clone();
    let p = k.p() as usize;
    let c = f.coeffs().iter().step_by(p).map(|&a| k.frobenius_pow(a, -1)).collect();
    Poly::new(&k, c)
}

/// Squarefree decomposition of a monic polynomial: pairs (g_i, i) with f =
/// prod g_i^i and each g_i squarefree.
pub fn squarefree(f: &Poly) -> Vec<(Poly, usize)> {
    let k = f.field().clone();
    let p = k.p() as usize;
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree(&pth_root(f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.exact_div(&c).unwrap();
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).unwrap();
        if !z.is_constant() {
            out.push((z.monic(), i));
        }
        i += 1;
        c = c.exact_div(&y).unwrap();
        w = y;
    }
    if !c.is_constant() {
        for (g, m) in squarefree(&pth_root(&c.monic())) {
            out.push((g, m * p));
        }
    }
    merge(out)
}

fn merge(mut v: Vec<(Poly, usize)>) -> Vec<(Poly, usize)> {
    v.sort_by_key(|a| a.1);
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for (g, m) in v {
        match out.last_mut() {
            Some(last) if last.1 == m => last.0 = &last.0 * &g,
            _ => out.push((g, m)),
        }
    }
    out
}

/// Splits a monic squarefree polynomial into products of irreducibles of
/// equal degree d.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let k = f.field().clone();
    let x = Poly::x(&k);
    let mut out = Vec::new();
    let mut rest = f.monic();
    let mut h = x.clone();
    let mut d = 0;
    while let Some(n) = rest.deg() {
        if n == 0 {
            break;
        }
        d += 1;
        if n < 2 * d {
            out.push((rest.clone(), n));
            break;
        }
        h = h.powmod(k.q(), &rest);
        let g = rest.gcd(&(&h - &x));
        if !g.is_constant() {
            rest = rest.exact_div(&g).unwrap();
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    out
}

/// Cantor-Zassenhaus for odd q.
pub fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let k = f.field().clone();
    let n = f.deg().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![f.monic()];
    }
    loop {
        let a = Poly::new(&k, (0..n).map(|_| k.random(rng)).collect());
        if a.is_constant() {
            continue;
        }
        let g = a.gcd(f);
        if !g.is_constant() && g.deg() != f.deg() {
            return split_pair(f, &g, d, rng);
        }
        // a^{(q^d - 1)/2} = (a^{1 + q + ... + q^{d-1}})^{(q-1)/2}
        let mut u = a.rem(f);
        let mut acc = u.clone();
        for _ in 1..d {
            u = u.powmod(k.q(), f);
            acc = (&acc * &u).rem(f);
        }
        let b = acc.powmod((k.q() - 1) / 2, f);
        let g = f.gcd(&(&b - &Poly::one(&k)));
        if !g.is_constant() && g.deg() != f.deg() {
            return split_pair(f, &g, d, rng);
        }
    }
}

fn split_pair(f: &Poly, g: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let h = f.exact_div(g).unwrap();
    let mut out = equal_degree(g, d, rng);
    out.extend(equal_degree(&h, d, rng));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Field;

    #[test]
    fn x2_plus_1_over_f3_is_irreducible() {
        let k = Field::prime(3).unwrap();
        let f = Poly::from_ints(&k, &[1, 0, 1]);
        assert_eq!(poly_factor(&f, 0), vec![(f.clone(), 1)]);
    }

    #[test]
    fn xq_minus_x_splits_completely() {
        let k = Field::new(3, 2, 0).unwrap();
        let x = Poly::x(&k);
        let f = &x.pow(9) - &x;
        let fac = poly_factor(&f, 7);
        assert_eq!(fac.len(), 9);
        assert!(fac.iter().all(|(g, m)| g.deg() == Some(1) && *m == 1));
    }

    #[test]
    fn repeated_linear_factor() {
        let k = Field::prime(5).unwrap();
        let l = Poly::linear(&k, k.one());
        assert_eq!(poly_factor(&l.pow(2), 1), vec![(l, 2)]);
    }

    #[test]
    fn pth_power_input() {
        let k = Field::new(3, 2, 0).unwrap();
        let l = Poly::linear(&k, k.generator());
        let f = &l.pow(3) * &Poly::from_ints(&k, &[2, 1]);
        let fac = poly_factor(&f, 2);
        let prod = fac.iter().fold(Poly::one(&k), |acc, (g, m)| &acc * &g.pow(*m as u64));
        assert_eq!(prod, f.monic());
    }

    #[test]
    fn roots_of_split_polynomial() {
        let k = Field::prime(13).unwrap();
        let rs: Vec<_> = [1, 4, 9].iter().map(|&c| k.from_i64(c)).collect();
        let f = &Poly::from_roots(&k, &rs) * &Poly::from_ints(&k, &[2, 0, 1]);
        assert_eq!(roots(&f, 0), rs);
    }
}
