//! Multivariate gcd over F_p.
//!
//! Polynomials are converted to a dense recursive form (a polynomial in
//! one variable whose coefficients are dense polynomials in the rest) and
//! reduced by primitive pseudo-remainder sequences, ending in plain
//! Euclid over F_p for the innermost variable.

use std::collections::BTreeMap;

use super::mpoly::{Monomial, MultiPoly};
use super::modulus::PrimeModulus;
use crate::error::FieldError;

/// Monic greatest common divisor.
pub fn poly_gcd(f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly, FieldError> {
    if f.modulus() != g.modulus() || f.nvars() != g.nvars() {
        return Err(FieldError::ContextMismatch);
    }
    if f.is_zero() && g.is_zero() {
        return Err(FieldError::BothZero);
    }
    Ok(gcd_inner(f, g))
}

fn gcd_inner(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let md = f.modulus();
    let nv = f.nvars();
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    if f.as_constant().is_some() || g.as_constant().is_some() {
        return MultiPoly::one(md, nv);
    }
    let (mf, f) = split_monomial(f);
    let (mg, g) = split_monomial(g);
    let common = Monomial(mf.0.iter().zip(&mg.0).map(|(a, b)| *a.min(b)).collect());
    if f.as_constant().is_some() || g.as_constant().is_some() {
        return MultiPoly::monomial(md, common, 1);
    }
    // Variables that occur, outermost first: highest degree outside keeps
    // the pseudo-remainder sequences short in the inner variables.
    let mut order: Vec<usize> = (0..nv)
        .filter(|&v| f.degree_in(v) > 0 || g.degree_in(v) > 0)
        .collect();
    order.sort_by_key(|&v| std::cmp::Reverse(f.degree_in(v).max(g.degree_in(v))));
    let a = to_dense(&f, &order);
    let b = to_dense(&g, &order);
    let d = Dense::gcd(&a, &b, order.len(), md);
    from_dense(&d, &order, md, nv).mul_term(&common, 1).monic()
}

/// Splits off the largest monomial dividing every term.
fn split_monomial(f: &MultiPoly) -> (Monomial, MultiPoly) {
    let mut m: Option<Vec<u32>> = None;
    for (t, _) in f.terms() {
        m = Some(match m {
            None => t.0.clone(),
            Some(acc) => acc.iter().zip(&t.0).map(|(a, b)| *a.min(b)).collect(),
        });
    }
    let m = Monomial(m.unwrap_or_else(|| vec![0; f.nvars()]));
    if m.is_one() {
        return (m, f.clone());
    }
    let rest = MultiPoly::from_terms(f.modulus(), f.nvars(), f.terms().map(|(t, &c)| (m.quotient(t), c)));
    (m, rest)
}

/// Dense recursive polynomial. `C` is a constant (no variables left);
/// `P` lists coefficients from degree 0 upward, with no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
enum Dense {
    C(u32),
    P(Vec<Dense>),
}

fn to_dense(f: &MultiPoly, order: &[usize]) -> Dense {
    fn build(terms: &[(Vec<u32>, u32)], order: &[usize]) -> Dense {
        let Some((&v, rest)) = order.split_first() else {
            return Dense::C(terms.iter().map(|t| t.1).next().unwrap_or(0));
        };
        let mut by_deg: BTreeMap<u32, Vec<(Vec<u32>, u32)>> = BTreeMap::new();
        for (e, c) in terms {
            by_deg.entry(e[v]).or_default().push((e.clone(), *c));
        }
        let top = by_deg.keys().next_back().copied().unwrap_or(0) as usize;
        let mut coeffs = vec![Dense::zero(rest.len()); if by_deg.is_empty() { 0 } else { top + 1 }];
        for (d, ts) in by_deg {
            coeffs[d as usize] = build(&ts, rest);
        }
        Dense::P(coeffs)
    }
    let terms: Vec<(Vec<u32>, u32)> = f.terms().map(|(m, &c)| (m.0.clone(), c)).collect();
    build(&terms, order)
}

fn from_dense(d: &Dense, order: &[usize], md: PrimeModulus, nv: usize) -> MultiPoly {
    fn walk(d: &Dense, order: &[usize], exps: &mut Vec<u32>, out: &mut Vec<(Monomial, u32)>) {
        match d {
            Dense::C(0) => {}
            Dense::C(c) => out.push((Monomial(exps.clone()), *c)),
            Dense::P(cs) => {
                for (k, c) in cs.iter().enumerate() {
                    exps[order[0]] = k as u32;
                    walk(c, &order[1..], exps, out);
                }
                exps[order[0]] = 0;
            }
        }
    }
    let mut out = Vec::new();
    walk(d, order, &mut vec![0; nv], &mut out);
    MultiPoly::from_terms(md, nv, out)
}

impl Dense {
    fn zero(level: usize) -> Dense {
        if level == 0 {
            Dense::C(0)
        } else {
            Dense::P(Vec::new())
        }
    }

    fn one(level: usize) -> Dense {
        if level == 0 {
            Dense::C(1)
        } else {
            Dense::P(vec![Dense::one(level - 1)])
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Dense::C(0)) || matches!(self, Dense::P(v) if v.is_empty())
    }

    fn coeffs(&self) -> &[Dense] {
        match self {
            Dense::P(v) => v,
            Dense::C(_) => panic!("constant has no coefficients"),
        }
    }

    /// Degree in the outer variable (zero polynomials report 0).
    fn deg(&self) -> usize {
        self.coeffs().len().saturating_sub(1)
    }

    fn trimmed(mut v: Vec<Dense>) -> Dense {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Dense::P(v)
    }

    fn add(&self, other: &Dense, md: PrimeModulus) -> Dense {
        match (self, other) {
            (Dense::C(a), Dense::C(b)) => Dense::C(md.add(*a, *b)),
            (Dense::P(a), Dense::P(b)) => {
                let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                let mut v = long.clone();
                for (x, y) in v.iter_mut().zip(short) {
                    *x = x.add(y, md);
                }
                Dense::trimmed(v)
            }
            _ => unreachable!("mixed levels"),
        }
    }

    fn neg(&self, md: PrimeModulus) -> Dense {
        match self {
            Dense::C(a) => Dense::C(md.neg(*a)),
            Dense::P(v) => Dense::P(v.iter().map(|c| c.neg(md)).collect()),
        }
    }

    fn sub(&self, other: &Dense, md: PrimeModulus) -> Dense {
        self.add(&other.neg(md), md)
    }

    fn mul(&self, other: &Dense, md: PrimeModulus) -> Dense {
        match (self, other) {
            (Dense::C(a), Dense::C(b)) => Dense::C(md.mul(*a, *b)),
            (Dense::P(a), Dense::P(b)) => {
                if a.is_empty() || b.is_empty() {
                    return Dense::P(Vec::new());
                }
                let level_zero = a[0].zero_like();
                let mut v = vec![level_zero; a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if !y.is_zero() {
                            v[i + j] = v[i + j].add(&x.mul(y, md), md);
                        }
                    }
                }
                Dense::trimmed(v)
            }
            _ => unreachable!("mixed levels"),
        }
    }

    fn zero_like(&self) -> Dense {
        match self {
            Dense::C(_) => Dense::C(0),
            Dense::P(_) => Dense::P(Vec::new()),
        }
    }

    /// Multiplies by a coefficient one level down.
    fn scale(&self, c: &Dense, md: PrimeModulus) -> Dense {
        Dense::trimmed(self.coeffs().iter().map(|x| x.mul(c, md)).collect())
    }

    fn shifted(&self, k: usize) -> Dense {
        let cs = self.coeffs();
        if cs.is_empty() {
            return self.clone();
        }
        let mut v = vec![cs[0].zero_like(); k];
        v.extend(cs.iter().cloned());
        Dense::P(v)
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    fn div_exact(&self, d: &Dense, md: PrimeModulus) -> Option<Dense> {
        match (self, d) {
            (Dense::C(a), Dense::C(b)) => Some(Dense::C(md.mul(*a, md.inv(*b)))),
            (Dense::P(_), Dense::P(dc)) => {
                if self.is_zero() {
                    return Some(self.clone());
                }
                let dl = dc.last().expect("nonzero divisor");
                if self.deg() < d.deg() {
                    return None;
                }
                let mut r = self.clone();
                let mut q = vec![dl.zero_like(); self.deg() - d.deg() + 1];
                while !r.is_zero() {
                    if r.deg() < d.deg() {
                        return None;
                    }
                    let k = r.deg() - d.deg();
                    let c = r.coeffs().last().unwrap().div_exact(dl, md)?;
                    r = r.sub(&d.scale(&c, md).shifted(k), md);
                    q[k] = c;
                }
                Some(Dense::trimmed(q))
            }
            _ => unreachable!("mixed levels"),
        }
    }

    /// Gcd of the coefficients, one level down.
    fn content(&self, level: usize, md: PrimeModulus) -> Dense {
        let mut acc = Dense::zero(level - 1);
        for c in self.coeffs() {
            acc = Dense::gcd(&acc, c, level - 1, md);
            if acc == Dense::one(level - 1) {
                break;
            }
        }
        acc
    }

    fn primitive(&self, level: usize, md: PrimeModulus) -> (Dense, Dense) {
        let c = self.content(level, md);
        let p = Dense::trimmed(
            self.coeffs()
                .iter()
                .map(|x| x.div_exact(&c, md).expect("content divides"))
                .collect(),
        );
        (c, p)
    }

    fn pseudo_rem(&self, b: &Dense, md: PrimeModulus) -> Dense {
        let lb = b.coeffs().last().unwrap().clone();
        let mut r = self.clone();
        while !r.is_zero() && r.deg() >= b.deg() {
            let k = r.deg() - b.deg();
            let lr = r.coeffs().last().unwrap().clone();
            r = r.scale(&lb, md).sub(&b.scale(&lr, md).shifted(k), md);
        }
        r
    }

    /// Normalizes the innermost leading coefficient to 1.
    fn normalized(&self, md: PrimeModulus) -> Dense {
        fn lead(d: &Dense) -> u32 {
            match d {
                Dense::C(c) => *c,
                Dense::P(v) => v.last().map_or(0, lead),
            }
        }
        fn scale_all(d: &Dense, k: u32, md: PrimeModulus) -> Dense {
            match d {
                Dense::C(c) => Dense::C(md.mul(*c, k)),
                Dense::P(v) => Dense::P(v.iter().map(|x| scale_all(x, k, md)).collect()),
            }
        }
        let l = lead(self);
        if l == 0 || l == 1 {
            self.clone()
        } else {
            scale_all(self, md.inv(l), md)
        }
    }

    /// Gcd up to a unit of two polynomials in `level` variables.
    fn gcd(a: &Dense, b: &Dense, level: usize, md: PrimeModulus) -> Dense {
        if a.is_zero() {
            return b.normalized(md);
        }
        if b.is_zero() {
            return a.normalized(md);
        }
        if level == 0 {
            return Dense::C(1);
        }
        let (ca, pa) = a.primitive(level, md);
        let (cb, pb) = b.primitive(level, md);
        let c = Dense::gcd(&ca, &cb, level - 1, md);
        let (mut x, mut y) = if pa.deg() >= pb.deg() { (pa, pb) } else { (pb, pa) };
        loop {
            if y.deg() == 0 {
                return Dense::P(vec![c]).normalized(md);
            }
            let r = if level == 1 { euclid_rem(&x, &y, md) } else { x.pseudo_rem(&y, md) };
            if r.is_zero() {
                break;
            }
            x = y;
            y = if level == 1 { r } else { r.primitive(level, md).1 };
        }
        y.scale(&c, md).normalized(md)
    }
}

/// Remainder of univariate polynomials over F_p.
fn euclid_rem(a: &Dense, b: &Dense, md: PrimeModulus) -> Dense {
    let Dense::C(lb) = b.coeffs().last().unwrap() else { unreachable!() };
    let inv = md.inv(*lb);
    let bc = b.coeffs();
    let mut r: Vec<u32> = a.coeffs().iter().map(|c| if let Dense::C(x) = c { *x } else { 0 }).collect();
    let bv: Vec<u32> = bc.iter().map(|c| if let Dense::C(x) = c { *x } else { 0 }).collect();
    while r.len() >= bv.len() {
        let top = *r.last().unwrap();
        if top != 0 {
            let f = md.mul(top, inv);
            let k = r.len() - bv.len();
            for (i, &x) in bv.iter().enumerate() {
                r[k + i] = md.sub(r[k + i], md.mul(f, x));
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    Dense::P(r.into_iter().map(Dense::C).collect())
}
