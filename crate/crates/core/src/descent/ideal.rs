use std::collections::BTreeSet;

use super::groebner::{groebner_basis, ideal_contains, LPoly, PresentedAlgebraL};
use super::subspace::{check_subspace, SubspaceL};
use super::{DescentReport, KForm, LSpan, Witness};
use crate::error::EngineError;
use crate::field::Monomial;
use crate::gha::{act_on_l, gha_basis, GhaBasisIndex};
use crate::tower::TowerElement;

/// D acting on the coefficients of a polynomial; the variables are
/// K-rational.
fn act_on_poly(d: &GhaBasisIndex, f: &LPoly) -> LPoly {
    f.map_coeffs(|c| act_on_l(d, c))
}

/// Decides whether the ideal is generated by polynomials with
/// coefficients in K, returning such generators on success.
pub fn check_ideal(alg: &PresentedAlgebraL) -> Result<DescentReport, EngineError> {
    let Some(first) = alg.gens.first() else {
        return Ok(DescentReport::defined(KForm::Polynomials(Vec::new()), vec!["zero ideal".into()]));
    };
    let tower = first.tower().clone();
    let basis = groebner_basis(&alg.gens);
    let ops: Vec<GhaBasisIndex> = gha_basis(&tower).into_iter().filter(|d| *d != GhaBasisIndex::unit(&tower)).collect();

    let mut witness = None;
    'outer: for d in &ops {
        for f in &alg.gens {
            let img = act_on_poly(d, f);
            if !ideal_contains(&basis, &img) {
                witness = Some(Witness {
                    element: f.render(),
                    generator: d.render(&tower),
                    image: img.render(),
                });
                break 'outer;
            }
        }
    }
    let oracle = basis.iter().all(|g| g.is_k_rational());
    if witness.is_none() != oracle {
        return Err(EngineError::InternalInconsistency(format!(
            "stability says {}, reduced Groebner basis {} K-rational",
            if witness.is_none() { "stable" } else { "unstable" },
            if oracle { "is" } else { "is not" }
        )));
    }
    if let Some(w) = witness {
        return Ok(DescentReport::not_defined(
            w,
            vec!["ideal is not stable under the Galois-Hopf action".into()],
        ));
    }

    let k_gens = invariant_generators(alg, &ops)?;
    let k_basis = groebner_basis(&k_gens);
    let forward = k_gens.iter().all(|g| ideal_contains(&basis, g));
    let backward = alg.gens.iter().all(|g| ideal_contains(&k_basis, g));
    if !(forward && backward) || k_basis != basis {
        return Err(EngineError::InternalInconsistency(
            "K-rational generators do not generate the ideal".into(),
        ));
    }
    Ok(DescentReport::defined(
        KForm::Polynomials(k_gens),
        vec![format!("{} K-rational generators; ideal equality verified both ways", k_basis.len())],
    ))
}

/// K-rational generators of I from the invariants of the L-span U of
/// all D(f).
fn invariant_generators(alg: &PresentedAlgebraL, ops: &[GhaBasisIndex]) -> Result<Vec<LPoly>, EngineError> {
    let tower = alg.gens[0].tower().clone();
    let mut polys: Vec<LPoly> = alg.gens.clone();
    for d in ops {
        polys.extend(alg.gens.iter().map(|f| act_on_poly(d, f)));
    }
    let monomials: Vec<Monomial> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .rev()
        .collect();
    let coords = |p: &LPoly| -> Vec<TowerElement> {
        monomials
            .iter()
            .map(|m| {
                p.terms()
                    .find(|(mm, _)| *mm == m)
                    .map_or_else(|| TowerElement::zero(&tower), |(_, c)| c.clone())
            })
            .collect()
    };
    let vectors: Vec<Vec<TowerElement>> = polys.iter().map(coords).filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    // An L-independent subfamily spanning U.
    let mut chosen: Vec<Vec<TowerElement>> = Vec::new();
    for v in vectors {
        if !LSpan::new(&chosen).contains(&v) {
            chosen.push(v);
        }
    }
    let u = SubspaceL::new(&tower, monomials.len(), chosen)?;
    let report = check_subspace(monomials.len(), &u)?;
    let Some(KForm::Vectors(form)) = report.k_form else {
        return Err(EngineError::InternalInconsistency(
            "stable span of derivatives has no K-form".into(),
        ));
    };
    Ok(form
        .into_iter()
        .map(|v| {
            let mut p = LPoly::zero(&tower, &alg.vars);
            for (m, c) in monomials.iter().zip(v) {
                p.add_term(m.clone(), c);
            }
            p
        })
        .collect())
}
