use std::collections::BTreeMap;
use std::sync::Arc;

use super::{l_rank, render_vector, DescentReport, KForm, LSpan, Witness};
use crate::error::EngineError;
use crate::field::RatFunc;
use crate::gha::{act_on_l, gha_generators, gha_invariants, SemilinearGhaAction};
use crate::hg::canonical_generators;
use crate::linalg::{k_rank, rref};
use crate::tower::{Tower, TowerElement};

/// An L-subspace of L^n given by an L-independent basis.
#[derive(Clone, Debug)]
pub struct SubspaceL {
    tower: Arc<Tower>,
    ambient: usize,
    basis: Vec<Vec<TowerElement>>,
}

impl SubspaceL {
    pub fn new(tower: &Arc<Tower>, ambient: usize, basis: Vec<Vec<TowerElement>>) -> Result<Self, EngineError> {
        if basis.iter().any(|v| v.len() != ambient) {
            return Err(EngineError::DimensionMismatch(format!(
                "basis vectors must have length {}",
                ambient
            )));
        }
        if basis.iter().flatten().any(|x| !Arc::ptr_eq(x.tower(), tower)) {
            return Err(EngineError::DimensionMismatch("vectors over a different tower".into()));
        }
        let r = l_rank(&basis);
        if r != basis.len() {
            return Err(EngineError::DimensionMismatch(format!(
                "basis of {} vectors has rank {}",
                basis.len(),
                r
            )));
        }
        Ok(SubspaceL {
            tower: tower.clone(),
            ambient,
            basis,
        })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<TowerElement>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn check_ambient(n: usize, w: &SubspaceL) -> Result<(), EngineError> {
    if w.ambient != n {
        return Err(EngineError::DimensionMismatch(format!(
            "subspace lives in dimension {}, expected {}",
            w.ambient, n
        )));
    }
    Ok(())
}

/// Stability of W under every GHA generator acting coordinatewise.
fn gha_criterion(w: &SubspaceL, span: &LSpan) -> Option<Witness> {
    let t = &w.tower;
    for d in gha_generators(t) {
        for v in &w.basis {
            let image: Vec<TowerElement> = v.iter().map(|x| act_on_l(&d, x)).collect();
            if !span.contains(&image) {
                return Some(Witness {
                    element: render_vector(v),
                    generator: d.render(t),
                    image: render_vector(&image),
                });
            }
        }
    }
    None
}

/// Stability of W ⊗ L[X̄] under every canonical automorphism.
fn hg_criterion(w: &SubspaceL, span: &LSpan) -> Option<Witness> {
    let t = &w.tower;
    for gen in canonical_generators(t) {
        for v in &w.basis {
            let image: Vec<_> = v.iter().map(|x| gen.element.apply_l(x)).collect();
            let stable = (0..t.truncation()).all(|k| {
                let coeff: Vec<TowerElement> = image.iter().map(|x| x.coeff(k).clone()).collect();
                span.contains(&coeff)
            });
            if !stable {
                return Some(Witness {
                    element: render_vector(v),
                    generator: gen.name.clone(),
                    image: super::render_trunc_vector(&image),
                });
            }
        }
    }
    None
}

/// Decides whether W ⊆ L^n is defined over K by both the Hopf-algebra and
/// the automorphism criteria, returning a verified K-basis on success.
pub fn check_subspace(n: usize, w: &SubspaceL) -> Result<DescentReport, EngineError> {
    check_ambient(n, w)?;
    let span = LSpan::new(&w.basis);
    let by_gha = gha_criterion(w, &span);
    let by_hg = hg_criterion(w, &span);
    if by_gha.is_some() != by_hg.is_some() {
        return Err(EngineError::InternalInconsistency(format!(
            "Hopf-algebra criterion says {}, automorphism criterion says {}",
            if by_gha.is_none() { "stable" } else { "unstable" },
            if by_hg.is_none() { "stable" } else { "unstable" },
        )));
    }
    if let Some(witness) = by_gha {
        let mut diagnostics = vec!["subspace is not stable under the Galois-Hopf action".to_string()];
        if let Some(h) = by_hg {
            diagnostics.push(format!("{} moves {} to {}", h.generator, h.element, h.image));
        }
        return Ok(DescentReport::not_defined(witness, diagnostics));
    }
    let form = invariant_basis(w)?;
    verify_k_form(w, &span, &form)?;
    Ok(DescentReport::defined(
        KForm::Vectors(form),
        vec![format!("dimension {} over L; K-form verified by rank", w.dim())],
    ))
}

/// Invariants of the action restricted to W, in canonical K-echelon form.
fn invariant_basis(w: &SubspaceL) -> Result<Vec<Vec<TowerElement>>, EngineError> {
    let t = &w.tower;
    let r = w.dim();
    if r == 0 {
        return Ok(Vec::new());
    }
    let span = LSpan::new(&w.basis);
    let basis = span.reduced_basis();
    let mut images = BTreeMap::new();
    for d in gha_generators(t) {
        let mut cols = Vec::with_capacity(r);
        for v in &basis {
            let image: Vec<TowerElement> = v.iter().map(|x| act_on_l(&d, x)).collect();
            let c: Vec<TowerElement> = span.pivots().iter().map(|&p| image[p].clone()).collect();
            let rebuilt = combine(t, &c, &basis, w.ambient);
            if rebuilt != image {
                return Err(EngineError::InternalInconsistency("stable image outside W".into()));
            }
            cols.push(c);
        }
        images.insert(d, cols);
    }
    let action = SemilinearGhaAction::from_basis_images(t, r, &images)?;
    let inv = gha_invariants(&action);
    let vectors: Vec<Vec<TowerElement>> = inv.iter().map(|lam| combine(t, lam, &basis, w.ambient)).collect();
    k_echelon(t, &vectors)
}

/// Σ cᵢ·vᵢ.
fn combine(t: &Arc<Tower>, c: &[TowerElement], vs: &[Vec<TowerElement>], n: usize) -> Vec<TowerElement> {
    (0..n)
        .map(|i| {
            c.iter()
                .zip(vs)
                .filter(|(x, v)| !x.is_zero() && !v[i].is_zero())
                .fold(TowerElement::zero(t), |acc, (x, v)| acc.add(&x.mul(&v[i])))
        })
        .collect()
}

/// Reduced echelon form over K of K-rational vectors.
pub(crate) fn k_echelon(tower: &Arc<Tower>, vectors: &[Vec<TowerElement>]) -> Result<Vec<Vec<TowerElement>>, EngineError> {
    let mut rows: Vec<Vec<RatFunc>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    x.as_k()
                        .cloned()
                        .ok_or_else(|| EngineError::InternalInconsistency(format!("invariant {} is not in K", x)))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let pivots = rref(&mut rows);
    rows.truncate(pivots.len());
    Ok(rows
        .into_iter()
        .map(|r| r.into_iter().map(|c| TowerElement::from_k(tower, c)).collect())
        .collect())
}

/// K-rational, L-independent, inside W, and of full size.
fn verify_k_form(w: &SubspaceL, span: &LSpan, form: &[Vec<TowerElement>]) -> Result<(), EngineError> {
    let fail = |m: String| Err(EngineError::InternalInconsistency(m));
    if form.len() != w.dim() {
        return fail(format!("{} invariant vectors for a subspace of dimension {}", form.len(), w.dim()));
    }
    if form.iter().flatten().any(|x| x.as_k().is_none()) {
        return fail("K-form vector has an entry outside K".into());
    }
    if form.iter().any(|v| !span.contains(v)) {
        return fail("K-form vector outside the subspace".into());
    }
    if l_rank(form) != w.dim() {
        return fail("K-form does not span the subspace".into());
    }
    Ok(())
}

/// Independent check: dim_K(W ∩ K^n) = dim_L W. A vector x ∈ K^n lies in
/// W exactly when every (d+1)-minor of the basis extended by x vanishes.
/// Those minors are L-linear in x, and their K-coordinates give a K-linear
/// system in n unknowns whose solution space is W ∩ K^n. The minors are
/// expanded by cofactors, so no elimination over L is involved.
pub fn oracle_subspace(n: usize, w: &SubspaceL) -> Result<bool, EngineError> {
    check_ambient(n, w)?;
    let t = &w.tower;
    let d = w.dim();
    if d == 0 {
        return Ok(true);
    }
    let mut memo = BTreeMap::new();
    let mut rows: Vec<Vec<RatFunc>> = Vec::new();
    for cols in column_subsets(n, d + 1) {
        let mut form = vec![TowerElement::zero(t); n];
        for (j, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let m = minor(&w.basis, 0, &rest, &mut memo);
            form[c] = if (d + j).is_multiple_of(2) { m } else { m.neg() };
        }
        for j in 0..t.degree() {
            rows.push(form.iter().map(|x| x.coords()[j].clone()).collect());
        }
    }
    let rank = if rows.is_empty() { 0 } else { k_rank(&rows) };
    Ok(n - rank == d)
}

fn column_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = column_subsets(n - 1, k);
    for mut s in column_subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Determinant of rows `first..` of `basis` on the columns `cols`, by
/// cofactor expansion along the first of those rows.
fn minor(
    basis: &[Vec<TowerElement>],
    first: usize,
    cols: &[usize],
    memo: &mut BTreeMap<(usize, Vec<usize>), TowerElement>,
) -> TowerElement {
    if cols.is_empty() {
        return TowerElement::one(basis[0][0].tower());
    }
    if let Some(m) = memo.get(&(first, cols.to_vec())) {
        return m.clone();
    }
    let t = basis[0][0].tower().clone();
    let mut acc = TowerElement::zero(&t);
    for (j, &c) in cols.iter().enumerate() {
        let x = &basis[first][c];
        if x.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&y| y != c).collect();
        let term = x.mul(&minor(basis, first + 1, &rest, memo));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    memo.insert((first, cols.to_vec()), acc.clone());
    acc
}
