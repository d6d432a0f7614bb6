//! The Hopf algebra K[G] ⊗ H₁ ⊗ … ⊗ Hₘ acting on L, where Hᵢ has K-basis
//! D_i^(k) for 0 ≤ k < p^{nᵢ} with divided-power structure.

mod action;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use action::{extract_from_hg, gha_invariants, natural_action, SemilinearGhaAction, TruncMatrix};

use crate::error::AlgebraError;
use crate::field::RatFunc;
use crate::hg::KMatrix;
use crate::report::ValidationReport;
use crate::tower::{Tower, TowerElement};

/// Basis element D_g · D_1^(k₁) ⋯ D_m^(kₘ).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GhaBasisIndex {
    pub g: usize,
    pub k: Vec<u32>,
}

impl GhaBasisIndex {
    pub fn unit(tower: &Tower) -> Self {
        GhaBasisIndex {
            g: tower.group().identity(),
            k: vec![0; tower.insep().len()],
        }
    }

    pub fn group(tower: &Tower, g: usize) -> Self {
        GhaBasisIndex {
            g,
            ..Self::unit(tower)
        }
    }

    /// D_i^(k) for 1-based `i`.
    pub fn divided(tower: &Tower, i: usize, k: u32) -> Self {
        let mut idx = Self::unit(tower);
        idx.k[i - 1] = k;
        idx
    }

    pub fn is_grouplike(&self) -> bool {
        self.k.iter().all(|&k| k == 0)
    }

    pub fn render(&self, tower: &Tower) -> String {
        let mut parts = Vec::new();
        if self.g != tower.group().identity() {
            parts.push(format!("D_{}", tower.group().name(self.g)));
        }
        for (i, &k) in self.k.iter().enumerate() {
            if k > 0 {
                parts.push(format!("D{}^({})", i + 1, k));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// All basis indices, in the same order as the tower monomial basis.
pub fn gha_basis(tower: &Tower) -> Vec<GhaBasisIndex> {
    (0..tower.degree())
        .map(|i| {
            let (g, k) = tower.split_index(i);
            GhaBasisIndex { g, k }
        })
        .collect()
}

/// The generating set {D_g : g ≠ id} ∪ {D_i^(k) : 1 ≤ k < p^{nᵢ}}.
pub fn gha_generators(tower: &Tower) -> Vec<GhaBasisIndex> {
    let group = tower.group();
    let mut out: Vec<_> = group
        .elements()
        .filter(|&g| g != group.identity())
        .map(|g| GhaBasisIndex::group(tower, g))
        .collect();
    for (i, gen) in tower.insep().iter().enumerate() {
        for k in 1..gen.order as u32 {
            out.push(GhaBasisIndex::divided(tower, i + 1, k));
        }
    }
    out
}

/// Product of two basis elements: a scalar in F_p and a basis index, or
/// zero.
pub fn basis_product(tower: &Tower, a: &GhaBasisIndex, b: &GhaBasisIndex) -> Option<(u32, GhaBasisIndex)> {
    let md = tower.modulus();
    let mut c = 1u32;
    let mut k = Vec::with_capacity(a.k.len());
    for ((&x, &y), gen) in a.k.iter().zip(&b.k).zip(tower.insep()) {
        let s = x + y;
        if s as usize >= gen.order {
            return None;
        }
        c = md.mul(c, md.binom(s as u64, x as u64));
        if c == 0 {
            return None;
        }
        k.push(s);
    }
    Some((
        c,
        GhaBasisIndex {
            g: tower.group().compose(a.g, b.g),
            k,
        },
    ))
}

/// K-linear combination of basis elements.
#[derive(Clone)]
pub struct GhaElement {
    tower: Arc<Tower>,
    coords: BTreeMap<GhaBasisIndex, RatFunc>,
}

impl GhaElement {
    pub fn zero(tower: &Arc<Tower>) -> Self {
        GhaElement {
            tower: tower.clone(),
            coords: BTreeMap::new(),
        }
    }

    pub fn basis(tower: &Arc<Tower>, idx: GhaBasisIndex) -> Self {
        Self::term(tower, idx, tower.k_one())
    }

    pub fn one(tower: &Arc<Tower>) -> Self {
        Self::basis(tower, GhaBasisIndex::unit(tower))
    }

    pub fn term(tower: &Arc<Tower>, idx: GhaBasisIndex, c: RatFunc) -> Self {
        let mut e = Self::zero(tower);
        e.add_term(idx, c);
        e
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GhaBasisIndex, &RatFunc)> {
        self.coords.iter()
    }

    pub fn coeff(&self, idx: &GhaBasisIndex) -> RatFunc {
        self.coords.get(idx).cloned().unwrap_or_else(|| self.tower.k_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn add_term(&mut self, idx: GhaBasisIndex, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(idx);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.coords {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&self.tower.k_one().neg()))
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        let mut out = Self::zero(&self.tower);
        for (i, x) in &self.coords {
            out.add_term(i.clone(), x.mul(c));
        }
        out
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.tower);
        for (a, x) in &self.coords {
            for (b, y) in &other.coords {
                if let Some((c, idx)) = basis_product(&self.tower, a, b) {
                    out.add_term(idx, x.mul(y).scale(c));
                }
            }
        }
        out
    }

    pub fn render(&self) -> String {
        if self.coords.is_empty() {
            return "0".into();
        }
        self.coords
            .iter()
            .map(|(i, c)| {
                let name = i.render(&self.tower);
                if c.is_one() {
                    name
                } else {
                    format!("({})*{}", c.render(self.tower.base_vars()), name)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl PartialEq for GhaElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) && self.coords == other.coords
    }
}

impl Eq for GhaElement {}

impl fmt::Debug for GhaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GhaElement({})", self.render())
    }
}

fn same_context(x: &GhaElement, y: &GhaElement) -> Result<(), AlgebraError> {
    if Arc::ptr_eq(&x.tower, &y.tower) {
        Ok(())
    } else {
        Err(AlgebraError::ContextMismatch)
    }
}

pub fn gha_mul(x: &GhaElement, y: &GhaElement) -> Result<GhaElement, AlgebraError> {
    same_context(x, y)?;
    Ok(x.mul_unchecked(y))
}

/// Element of GHA ⊗ GHA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhaTensor {
    pub coords: BTreeMap<(GhaBasisIndex, GhaBasisIndex), RatFunc>,
}

impl GhaTensor {
    fn add_term(&mut self, key: (GhaBasisIndex, GhaBasisIndex), c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let s = match self.coords.remove(&key) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !s.is_zero() {
            self.coords.insert(key, s);
        }
    }
}

/// Splittings k = h + (k − h) with 0 ≤ h ≤ k componentwise.
fn splittings(k: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for &ki in k {
        let mut next = Vec::new();
        for (h, r) in &out {
            for hi in 0..=ki {
                let mut h2 = h.clone();
                h2.push(hi);
                let mut r2 = r.clone();
                r2.push(ki - hi);
                next.push((h2, r2));
            }
        }
        out = next;
    }
    out
}

/// Δ(D_g D^(k)) = Σ_{h ≤ k} D_g D^(h) ⊗ D_g D^(k−h).
pub fn gha_comul(x: &GhaElement) -> GhaTensor {
    let mut t = GhaTensor {
        coords: BTreeMap::new(),
    };
    for (idx, c) in &x.coords {
        for (h, r) in splittings(&idx.k) {
            t.add_term(
                (
                    GhaBasisIndex { g: idx.g, k: h },
                    GhaBasisIndex { g: idx.g, k: r },
                ),
                c.clone(),
            );
        }
    }
    t
}

pub fn gha_counit(x: &GhaElement) -> RatFunc {
    x.coords
        .iter()
        .filter(|(i, _)| i.is_grouplike())
        .fold(x.tower.k_zero(), |acc, (_, c)| acc.add(c))
}

/// S(D_g D^(k)) = (−1)^{|k|} D_{g⁻¹} D^(k).
pub fn gha_antipode(x: &GhaElement) -> GhaElement {
    let t = &x.tower;
    let mut out = GhaElement::zero(t);
    for (idx, c) in &x.coords {
        let odd = idx.k.iter().map(|&k| k as u64).sum::<u64>() % 2 == 1;
        let c = if odd { c.neg() } else { c.clone() };
        out.add_term(
            GhaBasisIndex {
                g: t.group().inverse(idx.g),
                k: idx.k.clone(),
            },
            c,
        );
    }
    out
}

/// Checks associativity, coassociativity, the counit and antipode axioms
/// on every basis element.
pub fn check_hopf_axioms(tower: &Arc<Tower>) -> ValidationReport {
    let mut report = ValidationReport::new();
    let basis: Vec<GhaElement> = gha_basis(tower)
        .into_iter()
        .map(|i| GhaElement::basis(tower, i))
        .collect();
    let name = |e: &GhaElement| e.render();

    let mut assoc = true;
    let mut detail = String::from("all basis triples");
    'outer: for a in &basis {
        for b in &basis {
            let ab = a.mul_unchecked(b);
            for c in &basis {
                if ab.mul_unchecked(c) != a.mul_unchecked(&b.mul_unchecked(c)) {
                    assoc = false;
                    detail = format!("({})({})({})", name(a), name(b), name(c));
                    break 'outer;
                }
            }
        }
    }
    report.record("associativity", assoc, detail);

    let single = |i: &GhaBasisIndex| GhaElement::basis(tower, i.clone());
    let mut coassoc = Ok(());
    let mut counit = Ok(());
    let mut antipode = Ok(());
    for x in &basis {
        let d = gha_comul(x);
        // (Δ ⊗ id)Δ and (id ⊗ Δ)Δ as triple tensors.
        let mut lhs: BTreeMap<Vec<GhaBasisIndex>, RatFunc> = BTreeMap::new();
        let mut rhs: BTreeMap<Vec<GhaBasisIndex>, RatFunc> = BTreeMap::new();
        for ((a, b), c) in &d.coords {
            for ((a1, a2), ca) in gha_comul(&single(a)).coords {
                accumulate(&mut lhs, vec![a1, a2, b.clone()], c.mul(&ca));
            }
            for ((b1, b2), cb) in gha_comul(&single(b)).coords {
                accumulate(&mut rhs, vec![a.clone(), b1, b2], c.mul(&cb));
            }
        }
        if lhs != rhs && coassoc.is_ok() {
            coassoc = Err(name(x));
        }
        // (ε ⊗ id)Δ = id = (id ⊗ ε)Δ
        let mut left = GhaElement::zero(tower);
        let mut right = GhaElement::zero(tower);
        for ((a, b), c) in &d.coords {
            left = left.add(&single(b).scale(&gha_counit(&single(a)).mul(c)));
            right = right.add(&single(a).scale(&gha_counit(&single(b)).mul(c)));
        }
        if (left != *x || right != *x) && counit.is_ok() {
            counit = Err(name(x));
        }
        // m(S ⊗ id)Δ = η ε = m(id ⊗ S)Δ
        let expected = GhaElement::one(tower).scale(&gha_counit(x));
        let mut s_left = GhaElement::zero(tower);
        let mut s_right = GhaElement::zero(tower);
        for ((a, b), c) in &d.coords {
            s_left = s_left.add(&gha_antipode(&single(a)).mul_unchecked(&single(b)).scale(c));
            s_right = s_right.add(&single(a).mul_unchecked(&gha_antipode(&single(b))).scale(c));
        }
        if (s_left != expected || s_right != expected) && antipode.is_ok() {
            antipode = Err(name(x));
        }
    }
    for (label, res) in [("coassociativity", coassoc), ("counit", counit), ("antipode", antipode)] {
        match res {
            Ok(()) => report.record(label, true, "all basis elements"),
            Err(at) => report.record(label, false, format!("fails on {}", at)),
        }
    }
    report
}

fn accumulate(map: &mut BTreeMap<Vec<GhaBasisIndex>, RatFunc>, key: Vec<GhaBasisIndex>, v: RatFunc) {
    let s = match map.remove(&key) {
        Some(o) => o.add(&v),
        None => v,
    };
    if !s.is_zero() {
        map.insert(key, s);
    }
}

/// K-matrix of D_g D^(k) acting on L in the monomial basis.
pub fn operator_on_l(tower: &Arc<Tower>, idx: &GhaBasisIndex) -> KMatrix {
    let n = tower.degree();
    let md = tower.modulus();
    let d0 = tower.d0();
    let mut m = vec![vec![tower.k_zero(); n]; n];
    for col in 0..n {
        let mut column = vec![tower.k_zero(); n];
        let (j0, js) = tower.split_index(col);
        let mut c = 1u32;
        let mut target = Vec::with_capacity(js.len());
        for (&j, &k) in js.iter().zip(&idx.k) {
            c = md.mul(c, if k <= j { md.binom(j as u64, k as u64) } else { 0 });
            target.push(j.saturating_sub(k));
        }
        if c == 0 {
            continue;
        }
        let base = tower.join_index(0, &target);
        let sep: Vec<RatFunc> = if idx.g == tower.group().identity() {
            let mut v = vec![tower.k_zero(); d0];
            v[j0] = tower.k_one();
            v
        } else {
            TowerElement::basis(tower, j0).apply_sep_auto(idx.g).coords()[..d0].to_vec()
        };
        for (r, v) in sep.iter().enumerate() {
            if !v.is_zero() {
                column[base + r] = v.scale(c);
            }
        }
        for (row, x) in m.iter_mut().zip(column) {
            row[col] = x;
        }
    }
    m
}

/// D(x) for a basis element D.
pub fn act_on_l(idx: &GhaBasisIndex, x: &TowerElement) -> TowerElement {
    let t = x.tower();
    crate::hg::apply_k_matrix(t, &operator_on_l(t, idx), x)
}

/// D(x) for a general element of the algebra.
pub fn act_element_on_l(d: &GhaElement, x: &TowerElement) -> TowerElement {
    d.terms().fold(TowerElement::zero(x.tower()), |acc, (i, c)| {
        acc.add(&act_on_l(i, x).scale_k(c))
    })
}

#[cfg(test)]
mod tests;
