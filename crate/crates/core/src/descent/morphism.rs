use std::sync::Arc;

use super::groebner::{groebner_basis, ideal_contains, normal_form, LPoly, PresentedAlgebraL};
use super::{DescentReport, KForm, Witness};
use crate::error::EngineError;
use crate::hg::canonical_generators;
use crate::tower::{Tower, TowerElement};

/// An algebra map between K-rational presentations, given by the images
/// of the source variables in the target.
#[derive(Clone, Debug)]
pub struct AlgebraMapData {
    pub source: PresentedAlgebraL,
    pub target: PresentedAlgebraL,
    pub images: Vec<LPoly>,
}

#[derive(Clone, Debug)]
pub enum MorphismData {
    /// An L-linear map L^n → L^m in the standard bases, as an m×n matrix.
    Matrix(Vec<Vec<TowerElement>>),
    AlgebraMap(AlgebraMapData),
}

/// Decides whether a morphism between base changes of K-objects is the
/// base change of a K-morphism, by equivariance under the canonical
/// automorphisms, and cross-checks against membership of the data in K.
pub fn check_morphism(tower: &Arc<Tower>, data: &MorphismData) -> Result<DescentReport, EngineError> {
    let (entries, labels, k_form) = match data {
        MorphismData::Matrix(m) => {
            let width = m.first().map_or(0, |r| r.len());
            if m.iter().any(|r| r.len() != width) {
                return Err(EngineError::InvalidMorphism("matrix rows have different lengths".into()));
            }
            let entries: Vec<TowerElement> = m.iter().flatten().cloned().collect();
            let labels = entries.iter().map(|x| x.render()).collect();
            (entries, labels, KForm::Matrix(m.clone()))
        }
        MorphismData::AlgebraMap(map) => {
            let reduced = reduce_algebra_map(map)?;
            let mut entries = Vec::new();
            let mut labels = Vec::new();
            for p in &reduced {
                for (_, c) in p.terms() {
                    entries.push(c.clone());
                    labels.push(p.render());
                }
            }
            (entries, labels, KForm::AlgebraMap(reduced))
        }
    };
    if entries.iter().any(|x| !Arc::ptr_eq(x.tower(), tower)) {
        return Err(EngineError::InvalidMorphism("data lives over another tower".into()));
    }

    let mut witness = None;
    'outer: for g in canonical_generators(tower) {
        for (x, label) in entries.iter().zip(&labels) {
            let img = g.element.apply_l(x);
            if img.coeffs()[1..].iter().any(|c| !c.is_zero()) || img.coeff(0) != x {
                let image = match data {
                    MorphismData::Matrix(_) => img.render(),
                    MorphismData::AlgebraMap(_) => format!("coefficient {} maps to {}", x.render(), img.render()),
                };
                witness = Some(Witness {
                    element: label.clone(),
                    generator: g.name.clone(),
                    image,
                });
                break 'outer;
            }
        }
    }
    let oracle = entries.iter().all(|x| x.as_k().is_some());
    if witness.is_none() != oracle {
        return Err(EngineError::InternalInconsistency(format!(
            "equivariance says {}, entries {} in K",
            if witness.is_none() { "equivariant" } else { "not equivariant" },
            if oracle { "lie" } else { "do not lie" }
        )));
    }
    Ok(match witness {
        Some(w) => DescentReport::not_defined(w, vec!["morphism does not commute with the canonical automorphisms".into()]),
        None => DescentReport::defined(k_form, vec!["morphism commutes with every canonical automorphism".into()]),
    })
}

/// Checks the presentations and the map, and returns the images in
/// normal form modulo the target ideal.
fn reduce_algebra_map(map: &AlgebraMapData) -> Result<Vec<LPoly>, EngineError> {
    let bad = |m: &str| Err(EngineError::InvalidMorphism(m.to_string()));
    if map.images.len() != map.source.vars.len() {
        return bad("one image is needed per source variable");
    }
    if map.images.iter().any(|p| *p.vars() != map.target.vars) {
        return bad("images must be polynomials in the target variables");
    }
    let src_basis = groebner_basis(&map.source.gens);
    let tgt_basis = groebner_basis(&map.target.gens);
    if !src_basis.iter().chain(&tgt_basis).all(|g| g.is_k_rational()) {
        return bad("source and target presentations must be K-rational");
    }
    for f in &map.source.gens {
        let pulled = substitute(f, &map.images, &map.target.vars);
        if !ideal_contains(&tgt_basis, &pulled) {
            return bad(&format!("relation {} does not map into the target ideal", f));
        }
    }
    Ok(map.images.iter().map(|p| normal_form(p, &tgt_basis)).collect())
}

/// f(images) in the target ring.
fn substitute(f: &LPoly, images: &[LPoly], vars: &Arc<[String]>) -> LPoly {
    let tower = f.tower();
    let mut out = LPoly::zero(tower, vars);
    for (m, c) in f.terms() {
        let mut term = LPoly::constant(vars, c.clone());
        for (img, &e) in images.iter().zip(&m.0) {
            term = term.mul(&img.pow(e));
        }
        out = out.add(&term);
    }
    out
}
