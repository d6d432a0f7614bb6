//! Polynomials over L in K-rational variables and Buchberger's algorithm
//! in graded-lex order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::EngineError;
use crate::field::Monomial;
use crate::tower::{Tower, TowerElement};

/// Sparse polynomial with coefficients in L.
#[derive(Clone)]
pub struct LPoly {
    tower: Arc<Tower>,
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, TowerElement>,
}

impl LPoly {
    pub fn zero(tower: &Arc<Tower>, vars: &Arc<[String]>) -> Self {
        LPoly {
            tower: tower.clone(),
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<[String]>, c: TowerElement) -> Self {
        let mut p = Self::zero(c.tower(), vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn var(tower: &Arc<Tower>, vars: &Arc<[String]>, i: usize) -> Self {
        let mut p = Self::zero(tower, vars);
        p.add_term(Monomial::var(vars.len(), i), TowerElement::one(tower));
        p
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &TowerElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: TowerElement) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &TowerElement)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &TowerElement) -> Self {
        let mut out = Self::zero(&self.tower, &self.vars);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul(c));
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &TowerElement) -> Self {
        let mut out = Self::zero(&self.tower, &self.vars);
        for (mm, x) in &self.terms {
            out.add_term(mm.mul(m), x.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.tower, &self.vars);
        for (m, c) in &other.terms {
            out = out.add(&self.mul_term(m, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(&self.vars, TowerElement::one(&self.tower));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&TowerElement) -> TowerElement) -> Self {
        let mut out = Self::zero(&self.tower, &self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inverse().expect("leading coefficient is nonzero")),
        }
    }

    pub fn is_k_rational(&self) -> bool {
        self.terms.values().all(|c| c.as_k().is_some())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[v].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[v], e)),
                }
            }
            let mono = factors.join("*");
            let coeff = c.render();
            parts.push(if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono
            } else if coeff.contains(" + ") {
                format!("({})*{}", coeff, mono)
            } else {
                format!("{}*{}", coeff, mono)
            });
        }
        parts.join(" + ")
    }
}

impl PartialEq for LPoly {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) && self.vars == other.vars && self.terms == other.terms
    }
}

impl Eq for LPoly {}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LPoly({})", self.render())
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// An affine L-algebra L[x₁,…,x_q]/I given by generators of I.
#[derive(Clone, Debug)]
pub struct PresentedAlgebraL {
    pub vars: Arc<[String]>,
    pub gens: Vec<LPoly>,
}

impl PresentedAlgebraL {
    pub fn new(vars: Arc<[String]>, gens: Vec<LPoly>) -> Result<Self, EngineError> {
        if gens.iter().any(|g| g.is_zero()) {
            return Err(EngineError::DimensionMismatch("ideal generators must be nonzero".into()));
        }
        if gens.iter().any(|g| g.vars != vars) {
            return Err(EngineError::DimensionMismatch("generators use different variables".into()));
        }
        Ok(PresentedAlgebraL { vars, gens })
    }
}

/// Fully reduced remainder of `f` on division by `basis`.
pub fn normal_form(f: &LPoly, basis: &[LPoly]) -> LPoly {
    let mut rem = LPoly::zero(&f.tower, &f.vars);
    let mut p = f.clone();
    while let Some((m, c)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = basis
            .iter()
            .find(|g| g.leading().is_some_and(|(lm, _)| lm.divides(&m)));
        match divisor {
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let q = lm.quotient(&m);
                let factor = c.mul(&lc.inverse().expect("nonzero"));
                p = p.sub(&g.mul_term(&q, &factor));
            }
            None => {
                p.terms.remove(&m);
                rem.add_term(m, c);
            }
        }
    }
    rem
}

fn s_polynomial(f: &LPoly, g: &LPoly) -> LPoly {
    let (fm, fc) = f.leading().unwrap();
    let (gm, gc) = g.leading().unwrap();
    let l = fm.lcm(gm);
    let a = f.mul_term(&fm.quotient(&l), &fc.inverse().unwrap());
    let b = g.mul_term(&gm.quotient(&l), &gc.inverse().unwrap());
    a.sub(&b)
}

/// Reduced Gröbner basis in graded-lex order, sorted by leading monomial.
pub fn groebner_basis(gens: &[LPoly]) -> Vec<LPoly> {
    let mut basis: Vec<LPoly> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic()).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let lcm_of = |b: &[LPoly], (i, j): (usize, usize)| b[i].leading().unwrap().0.lcm(b[j].leading().unwrap().0);
    while !pairs.is_empty() {
        // Normal strategy: smallest lcm first.
        let pos = (0..pairs.len())
            .min_by(|&x, &y| lcm_of(&basis, pairs[x]).cmp(&lcm_of(&basis, pairs[y])).then(pairs[x].cmp(&pairs[y])))
            .unwrap();
        let (i, j) = pairs.remove(pos);
        let (mi, mj) = (basis[i].leading().unwrap().0.clone(), basis[j].leading().unwrap().0.clone());
        if mi.lcm(&mj) == mi.mul(&mj) {
            continue;
        }
        let r = normal_form(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            basis.push(r.monic());
            let k = basis.len() - 1;
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    reduce_basis(basis)
}

fn reduce_basis(mut basis: Vec<LPoly>) -> Vec<LPoly> {
    // Drop elements whose leading monomial is divisible by another's.
    basis.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    let mut minimal: Vec<LPoly> = Vec::new();
    for g in basis {
        let lm = g.leading().unwrap().0.clone();
        if !minimal.iter().any(|h| h.leading().unwrap().0.divides(&lm)) {
            minimal.push(g);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<LPoly> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let (lm, _) = minimal[i].leading().unwrap();
        let lm = lm.clone();
        let tail = {
            let mut t = minimal[i].clone();
            let lc = t.terms.remove(&lm).unwrap();
            (t, lc)
        };
        let mut g = normal_form(&tail.0, &others);
        g.add_term(lm, tail.1);
        reduced.push(g.monic());
    }
    reduced.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    reduced
}

pub fn ideal_contains(basis: &[LPoly], f: &LPoly) -> bool {
    normal_form(f, basis).is_zero()
}
