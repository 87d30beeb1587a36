//! Small square matrices of rational functions, and dense linear algebra over
//! F_q.

use std::fmt;

use crate::algebra::field::{Field, FieldElem};
use crate::algebra::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Row-major n x n matrix of rational functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    n: usize,
    e: Vec<RatFunc>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = RatFunc;
    fn index(&self, (i, j): (usize, usize)) -> &RatFunc {
        &self.e[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RatFunc {
        &mut self.e[i * self.n + j]
    }
}

impl Mat {
    pub fn zero(k: &Field, n: usize) -> Mat {
        Mat { n, e: vec![RatFunc::zero(k); n * n] }
    }

    pub fn identity(k: &Field, n: usize) -> Mat {
        let mut m = Mat::zero(k, n);
        for i in 0..n {
            m[(i, i)] = RatFunc::one(k);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Mat {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Mat { n, e: rows.into_iter().flatten().collect() }
    }

    pub fn scalar(k: &Field, n: usize, f: &RatFunc) -> Mat {
        let mut m = Mat::zero(k, n);
        for i in 0..n {
            m[(i, i)] = f.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        self.e[0].field()
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, f: &RatFunc) -> Mat {
        self.map(|a| a * f)
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let k = self.field().clone();
        let mut out = Mat::zero(&k, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RatFunc::zero(&k);
                for l in 0..n {
                    let a = &self[(i, l)];
                    let b = &o[(l, j)];
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[RatFunc]) -> Vec<RatFunc> {
        let k = self.field().clone();
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(RatFunc::zero(&k), |acc, j| &acc + &(&self[(i, j)] * &v[j]))
            })
            .collect()
    }

    pub fn derivative(&self) -> Mat {
        self.map(|a| a.derivative())
    }

    pub fn transpose(&self) -> Mat {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].clone();
            }
        }
        out
    }

    pub fn det(&self) -> RatFunc {
        match self.n {
            1 => self.e[0].clone(),
            2 => &(&self[(0, 0)] * &self[(1, 1)]) - &(&self[(0, 1)] * &self[(1, 0)]),
            _ => {
                // cofactor expansion along the first row
                let k = self.field().clone();
                let mut acc = RatFunc::zero(&k);
                for j in 0..self.n {
                    let minor = self.minor(0, j);
                    let t = &self[(0, j)] * &minor.det();
                    acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
                }
                acc
            }
        }
    }

    fn minor(&self, r: usize, c: usize) -> Mat {
        let rows = (0..self.n)
            .filter(|&i| i != r)
            .map(|i| (0..self.n).filter(|&j| j != c).map(|j| self[(i, j)].clone()).collect())
            .collect();
        Mat::from_rows(rows)
    }

    pub fn inv(&self) -> Result<Mat> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::Singular);
        }
        let di = d.inv()?;
        let n = self.n;
        let k = self.field().clone();
        let mut out = Mat::zero(&k, n);
        if n == 1 {
            out[(0, 0)] = di;
            return Ok(out);
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(j, i).det();
                let c = if (i + j) % 2 == 0 { c } else { -&c };
                out[(i, j)] = &c * &di;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> RatFunc {
        let k = self.field().clone();
        (0..self.n).fold(RatFunc::zero(&k), |acc, i| &acc + &self[(i, i)])
    }

    /// Evaluates every entry at a point where all entries are regular.
    pub fn eval(&self, a: FieldElem) -> Option<Vec<Vec<FieldElem>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)].eval(a)).collect()).collect()
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(k: &Field, m: &mut [Vec<FieldElem>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = k.inv(m[r][c]).unwrap();
        for x in m[r].iter_mut().skip(c) {
            *x = k.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = k.sub(*x, k.mul(f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(k: &Field, rows: &[Vec<FieldElem>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(k, &mut m, ncols).len()
}

/// Basis of the right kernel {v : A v = 0}.
pub fn kernel(k: &Field, rows: &[Vec<FieldElem>], ncols: usize) -> Vec<Vec<FieldElem>> {
    let mut m = rows.to_vec();
    let pivots = rref(k, &mut m, ncols);
    let mut is_pivot = vec![None; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![k.zero(); ncols];
        v[free] = k.one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = k.neg(m[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Solutions of A v = b: a particular solution plus a kernel basis, or
/// `None` when inconsistent.
pub fn solve(
    k: &Field,
    rows: &[Vec<FieldElem>],
    rhs: &[FieldElem],
    ncols: usize,
) -> Option<(Vec<FieldElem>, Vec<Vec<FieldElem>>)> {
    let mut aug: Vec<Vec<FieldElem>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut r = r.clone();
            r.push(b);
            r
        })
        .collect();
    let pivots = rref(k, &mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![k.zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols];
    }
    Some((x, kernel(k, rows, ncols)))
}

pub fn mat_vec(k: &Field, rows: &[Vec<FieldElem>], v: &[FieldElem]) -> Vec<FieldElem> {
    rows.iter()
        .map(|r| r.iter().zip(v).fold(k.zero(), |acc, (&a, &b)| k.add(acc, k.mul(a, b))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn identity_kernel_is_trivial() {
        let k = Field::prime(5).unwrap();
        let id: Vec<Vec<FieldElem>> =
            (0..4).map(|i| (0..4).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect();
        assert!(kernel(&k, &id, 4).is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let k = Field::prime(5).unwrap();
        let z = vec![vec![k.zero(); 3]; 3];
        assert_eq!(kernel(&k, &z, 3).len(), 3);
    }

    #[test]
    fn random_3x5_rank_nullity() {
        let k = Field::prime(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a: Vec<Vec<FieldElem>> = (0..3).map(|_| (0..5).map(|_| k.random(&mut rng)).collect()).collect();
            let ker = kernel(&k, &a, 5);
            assert_eq!(ker.len() + rank(&k, &a, 5), 5);
            for v in &ker {
                assert!(mat_vec(&k, &a, v).iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn inverse_of_rational_matrix() {
        let k = Field::prime(7).unwrap();
        let m = Mat::from_rows(vec![
            vec![RatFunc::parse(&k, "x").unwrap(), RatFunc::one(&k)],
            vec![RatFunc::zero(&k), RatFunc::parse(&k, "1/x").unwrap()],
        ]);
        assert_eq!(m.mul(&m.inv().unwrap()), Mat::identity(&k, 2));
    }
}
