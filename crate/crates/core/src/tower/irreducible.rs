//! Bounded irreducibility test for monic polynomials of degree ≤ 4 over K.
//!
//! After the substitution `y = D·x` clearing denominators, any factor of a
//! monic integral polynomial is integral (Gauss), and its coefficients obey
//! Newton-polygon degree bounds, so candidate roots and quadratic factors
//! range over a finite set of polynomials with F_p coefficients.

use crate::error::TowerError;
use crate::field::{poly_gcd, Monomial, MultiPoly, PrimeModulus, RatFunc};

const SEARCH_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible(String),
}

/// `f` is monic over K, given low to high.
pub fn check_irreducible(f: &[RatFunc]) -> Result<Irreducibility, TowerError> {
    let d = f.len() - 1;
    if d <= 1 {
        return Ok(Irreducibility::Irreducible);
    }
    if d > 4 {
        return Err(TowerError::IrreducibilityUnchecked(d));
    }
    let md = f[0].modulus();
    let nv = f[0].nvars();
    let mut den = MultiPoly::one(md, nv);
    for c in f {
        if !c.is_zero() {
            let g = poly_gcd(&den, c.den()).unwrap();
            den = den.div_exact(&g).unwrap().mul(c.den());
        }
    }
    // g(y) = D^d f(y/D), coefficients b_j = c_j D^{d-j}
    let b: Vec<MultiPoly> = (0..=d)
        .map(|j| {
            let v = f[j].mul(&RatFunc::from_poly(den.pow((d - j) as u64)));
            debug_assert!(v.is_polynomial());
            v.num().clone()
        })
        .collect();

    if b[0].is_zero() {
        return Ok(Irreducibility::Reducible("root 0".into()));
    }
    let root_bound = newton_bound(&b, d, 1);
    if let Some(r) = search(md, nv, &root_bound, |y| eval(&b, y).is_zero())? {
        return Ok(Irreducibility::Reducible(format!("root {:?}", r)));
    }
    if d == 4 {
        let lin_bound = root_bound;
        let const_bound = newton_bound(&b, d, 2);
        let found = search(md, nv, &lin_bound, |a| {
            let c = b[3].sub(a);
            search(md, nv, &const_bound, |bb| {
                if bb.is_zero() {
                    return false;
                }
                let Some(e) = b[0].div_exact(bb) else {
                    return false;
                };
                bb.add(&e).add(&a.mul(&c)) == b[2] && a.mul(&e).add(&bb.mul(&c)) == b[1]
            })
            .ok()
            .flatten()
            .is_some()
        })?;
        if let Some(a) = found {
            return Ok(Irreducibility::Reducible(format!(
                "quadratic factor with linear coefficient {:?}",
                a
            )));
        }
    }
    Ok(Irreducibility::Irreducible)
}

fn eval(b: &[MultiPoly], y: &MultiPoly) -> MultiPoly {
    let mut acc = MultiPoly::zero(y.modulus(), y.nvars());
    for c in b.iter().rev() {
        acc = acc.mul(y).add(c);
    }
    acc
}

/// Degree bounds (per variable, then total) for symmetric functions of
/// `scale` roots: floor(scale · max_j deg(b_j)/(d-j)).
fn newton_bound(b: &[MultiPoly], d: usize, scale: u32) -> (Vec<u32>, u32) {
    let nv = b[0].nvars();
    let per_var = (0..nv)
        .map(|v| {
            (0..d)
                .filter(|&j| !b[j].is_zero())
                .map(|j| scale * b[j].degree_in(v) / (d - j) as u32)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let total = (0..d)
        .filter(|&j| !b[j].is_zero())
        .map(|j| scale * b[j].total_degree().unwrap_or(0) / (d - j) as u32)
        .max()
        .unwrap_or(0);
    (per_var, total)
}

fn monomials_within(nv: usize, bound: &(Vec<u32>, u32)) -> Vec<Monomial> {
    let mut out = vec![Monomial(Vec::new())];
    for v in 0..nv {
        let mut next = Vec::new();
        for m in &out {
            for e in 0..=bound.0[v] {
                let mut m2 = m.clone();
                m2.0.push(e);
                if m2.degree() <= bound.1 {
                    next.push(m2);
                }
            }
        }
        out = next;
    }
    out
}

fn search(
    md: PrimeModulus,
    nv: usize,
    bound: &(Vec<u32>, u32),
    mut pred: impl FnMut(&MultiPoly) -> bool,
) -> Result<Option<MultiPoly>, TowerError> {
    let monos = monomials_within(nv, bound);
    let p = md.get() as u64;
    let total = p
        .checked_pow(monos.len() as u32)
        .filter(|&n| n <= SEARCH_LIMIT)
        .ok_or(TowerError::IrreducibilityUnchecked(monos.len()))?;
    let mut digits = vec![0u32; monos.len()];
    for _ in 0..total {
        let cand = MultiPoly::from_terms(md, nv, monos.iter().cloned().zip(digits.iter().copied()));
        if pred(&cand) {
            return Ok(Some(cand));
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < md.get() {
                break;
            }
            *d = 0;
        }
    }
    Ok(None)
}
