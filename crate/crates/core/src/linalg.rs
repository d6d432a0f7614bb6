//! Exact linear algebra.
//!
//! Matrices over K are eliminated fraction-free: rows are cleared of
//! denominators and reduced with Bareiss' exact-division recurrence over
//! F_p[t₁,…,t_r]. Matrices over the tower field L use plain Gauss–Jordan
//! through the [`Scalar`] trait.

use std::fmt::Debug;

use crate::field::{poly_gcd, FractionSum, MultiPoly, RatFunc};

/// Field operations needed by the generic elimination routines.
pub trait Scalar: Clone + PartialEq + Debug {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Inverse of a nonzero element.
    fn inverse(&self) -> Self;
    /// Σ aᵢ·bᵢ.
    fn dot<'a>(&self, pairs: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self
    where
        Self: 'a,
    {
        pairs.fold(self.zero_like(), |acc, (a, b)| acc.add(&a.mul(b)))
    }
}

impl Scalar for RatFunc {
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        RatFunc::zero_like(self)
    }
    fn one_like(&self) -> Self {
        RatFunc::one_like(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFunc::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFunc::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFunc::mul(self, other)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn inverse(&self) -> Self {
        self.inv().expect("pivot is nonzero")
    }
    fn dot<'a>(&self, pairs: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self {
        let mut sum = FractionSum::new(self.modulus(), self.nvars());
        for (a, b) in pairs {
            sum.add_product(a, b);
        }
        sum.finish()
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<T: Scalar>(rows: &mut [Vec<T>]) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].inverse();
        for x in rows[r].iter_mut().skip(c) {
            *x = x.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right null space `{x : A x = 0}`; `sample` supplies zero/one.
pub fn kernel<T: Scalar>(rows: &[Vec<T>], ncols: usize, sample: &T) -> Vec<Vec<T>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    null_space_from_rref(&m, &pivots, ncols, sample)
}

fn null_space_from_rref<T: Scalar>(
    m: &[Vec<T>],
    pivots: &[usize],
    ncols: usize,
    sample: &T,
) -> Vec<Vec<T>> {
    let zero = sample.zero_like();
    let one = sample.one_like();
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[f] = one.clone();
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = m[k][f].neg();
        }
        out.push(v);
    }
    out
}

/// Solves `A x = b` where `cols` are the columns of `A`.
pub fn solve_columns<T: Scalar>(cols: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let nrows = b.len();
    let ncols = cols.len();
    let mut m: Vec<Vec<T>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<T> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let zero = b.first().or_else(|| cols.first().and_then(|c| c.first()))?.zero_like();
    let mut x = vec![zero; ncols];
    for (k, &pc) in pivots.iter().enumerate() {
        x[pc] = m[k][ncols].clone();
    }
    Some(x)
}

// --- fraction-free elimination over K ---------------------------------

fn lcm(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    let g = poly_gcd(a, b).unwrap();
    a.div_exact(&g).unwrap().mul(b)
}

fn clear_denominators(row: &[RatFunc]) -> Vec<MultiPoly> {
    let Some(first) = row.first() else {
        return Vec::new();
    };
    let mut l = MultiPoly::one(first.modulus(), first.nvars());
    for x in row {
        if !x.is_zero() {
            l = lcm(&l, x.den());
        }
    }
    row.iter()
        .map(|x| {
            if x.is_zero() {
                x.num().clone()
            } else {
                x.num().mul(&l.div_exact(x.den()).unwrap())
            }
        })
        .collect()
}

/// Fraction-free row echelon form of a polynomial-cleared copy of `rows`.
pub struct FractionFreeEchelon {
    pub rows: Vec<Vec<MultiPoly>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl FractionFreeEchelon {
    pub fn new(rows: &[Vec<RatFunc>], ncols: usize) -> Self {
        let mut a: Vec<Vec<MultiPoly>> = rows
            .iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| clear_denominators(r))
            .collect();
        let nrows = a.len();
        let mut pivots = Vec::new();
        if nrows == 0 {
            return FractionFreeEchelon {
                rows: a,
                pivots,
                ncols,
            };
        }
        let md = a[0][0].modulus();
        let nv = a[0][0].nvars();
        let mut prev = MultiPoly::one(md, nv);
        let mut r = 0;
        for c in 0..ncols {
            if r == nrows {
                break;
            }
            let pr = (r..nrows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by_key(|&i| (a[i][c].total_degree(), a[i][c].num_terms()));
            let Some(pr) = pr else { continue };
            a.swap(r, pr);
            let (head, tail) = a.split_at_mut(r + 1);
            let prow = &head[r];
            let pivot = &prow[c];
            for row in tail.iter_mut() {
                let f = std::mem::replace(&mut row[c], MultiPoly::zero(md, nv));
                for j in c + 1..ncols {
                    let v = pivot.mul(&row[j]).sub(&f.mul(&prow[j]));
                    row[j] = if prev.is_one() {
                        v
                    } else {
                        v.div_exact(&prev).expect("Bareiss division is exact")
                    };
                }
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        FractionFreeEchelon {
            rows: a,
            pivots,
            ncols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Null space basis, back-substituted in K.
    pub fn kernel(&self, sample: &RatFunc) -> Vec<Vec<RatFunc>> {
        let zero = sample.zero_like();
        let one = sample.one_like();
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|c| !self.pivots.contains(c)) {
            let mut x = vec![zero.clone(); self.ncols];
            x[f] = one.clone();
            for (k, &pc) in self.pivots.iter().enumerate().rev() {
                let acc = x
                    .iter()
                    .zip(&self.rows[k])
                    .skip(pc + 1)
                    .filter(|(xj, a)| !xj.is_zero() && !a.is_zero())
                    .fold(zero.clone(), |acc, (xj, a)| acc.add(&RatFunc::from_poly(a.clone()).mul(xj)));
                if !acc.is_zero() {
                    let piv = RatFunc::from_poly(self.rows[k][pc].clone());
                    x[pc] = acc.neg().div(&piv).unwrap();
                }
            }
            out.push(x);
        }
        out
    }
}

/// Null space of a matrix over K via fraction-free elimination.
pub fn k_kernel(rows: &[Vec<RatFunc>], ncols: usize, sample: &RatFunc) -> Vec<Vec<RatFunc>> {
    FractionFreeEchelon::new(rows, ncols).kernel(sample)
}

pub fn k_rank(rows: &[Vec<RatFunc>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    FractionFreeEchelon::new(rows, ncols).rank()
}

/// Unique solution of the square system `A x = b` over K, if one exists.
pub fn k_solve(a: &[Vec<RatFunc>], b: &[RatFunc], sample: &RatFunc) -> Option<Vec<RatFunc>> {
    let n = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<RatFunc>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.neg());
            r
        })
        .collect();
    let ker = k_kernel(&aug, n + 1, sample);
    let v = ker.into_iter().find(|v| !v[n].is_zero())?;
    let scale = v[n].inv().unwrap();
    Some(v[..n].iter().map(|x| x.mul(&scale)).collect())
}

/// Matrix product over any scalar type.
pub fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>], sample: &T) -> Vec<Vec<T>> {
    let inner = b.len();
    let ncols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|j| {
                    sample.dot(
                        (0..inner)
                            .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                            .map(|k| (&row[k], &b[k][j])),
                    )
                })
                .collect()
        })
        .collect()
}

pub fn identity<T: Scalar>(n: usize, sample: &T) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { sample.one_like() } else { sample.zero_like() })
                .collect()
        })
        .collect()
}
