use std::sync::Arc;

use super::subspace::{check_subspace, SubspaceL};
use super::{l_rank, render_trunc_vector, render_vector, DescentReport, LSpan, Witness};
use crate::error::EngineError;
use crate::hg::canonical_generators;
use crate::linalg::kernel;
use crate::tower::{Tower, TowerElement};
use crate::trunc::TruncElement;

/// An L[X̄]-submodule of L[X̄]^n given by generators. Freeness is not
/// enforced here; `deformation_descent` checks it.
#[derive(Clone, Debug)]
pub struct FreeTruncModule {
    tower: Arc<Tower>,
    ambient: usize,
    basis: Vec<Vec<TruncElement>>,
}

impl FreeTruncModule {
    pub fn new(tower: &Arc<Tower>, ambient: usize, basis: Vec<Vec<TruncElement>>) -> Result<Self, EngineError> {
        if basis.iter().any(|v| v.len() != ambient) {
            return Err(EngineError::DimensionMismatch(format!(
                "generators must have length {}",
                ambient
            )));
        }
        if basis.iter().flatten().any(|x| !Arc::ptr_eq(x.tower(), tower)) {
            return Err(EngineError::DimensionMismatch("vectors over a different tower".into()));
        }
        Ok(FreeTruncModule {
            tower: tower.clone(),
            ambient,
            basis,
        })
    }

    /// (W₀ ⊗ L) ⊗ L[X̄] for vectors over L.
    pub fn constant(tower: &Arc<Tower>, ambient: usize, vectors: &[Vec<TowerElement>]) -> Result<Self, EngineError> {
        let basis = vectors
            .iter()
            .map(|v| v.iter().map(|x| TruncElement::constant(x.clone())).collect())
            .collect();
        Self::new(tower, ambient, basis)
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<TruncElement>] {
        &self.basis
    }

    pub fn closed_fiber(&self) -> Vec<Vec<TowerElement>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(|x| x.closed_fiber()).collect())
            .collect()
    }

    /// Coordinates over L: entry i, X̄-power k at position i·N + k.
    fn flatten(&self, v: &[TruncElement]) -> Vec<TowerElement> {
        v.iter().flat_map(|x| x.coeffs().iter().cloned()).collect()
    }

    /// L-spanning family of the module: X̄^k·w for every generator w.
    fn l_spanning(&self) -> Vec<Vec<TowerElement>> {
        let len = self.tower.truncation();
        (0..len)
            .flat_map(|k| self.basis.iter().map(move |w| (k, w)))
            .map(|(k, w)| {
                let shifted: Vec<TruncElement> = w.iter().map(|x| x.shift(k)).collect();
                self.flatten(&shifted)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub saturated: bool,
    /// A vector v with v·X̄^n in the module whose reduction lies outside
    /// the closed fiber.
    pub witness: Option<Vec<TowerElement>>,
}

pub fn is_xbar_saturated(w: &FreeTruncModule) -> Saturation {
    let t = &w.tower;
    let len = t.truncation();
    let n = w.ambient;
    let fiber = LSpan::new(&w.closed_fiber());
    let spanning = w.l_spanning();
    let zero = TowerElement::zero(t);
    for shift in 1..len {
        // Unknowns: v_k (entry i, k < len − shift), then coefficients on
        // the spanning family. Equations: coordinates of v·X̄^shift − Σ c·s.
        let free_len = len - shift;
        let nv = n * free_len;
        let ncols = nv + spanning.len();
        let mut rows = vec![vec![zero.clone(); ncols]; n * len];
        for i in 0..n {
            for k in 0..free_len {
                rows[i * len + k + shift][i * free_len + k] = TowerElement::one(t);
            }
        }
        for (c, s) in spanning.iter().enumerate() {
            for (r, x) in s.iter().enumerate() {
                rows[r][nv + c] = x.neg();
            }
        }
        for sol in kernel(&rows, ncols, &zero) {
            let reduction: Vec<TowerElement> = (0..n).map(|i| sol[i * free_len].clone()).collect();
            if !fiber.contains(&reduction) {
                return Saturation {
                    saturated: false,
                    witness: Some(reduction),
                };
            }
        }
    }
    Saturation {
        saturated: true,
        witness: None,
    }
}

/// Exponent-one deformation criterion: a free module stable under the
/// canonical automorphisms has a closed fiber defined over K, whose
/// K-form is then computed on the fiber.
pub fn deformation_descent(n: usize, w: &FreeTruncModule) -> Result<DescentReport, EngineError> {
    let t = &w.tower;
    if t.exponent() > 1 {
        return Err(EngineError::ExponentTooLarge(t.exponent()));
    }
    if w.ambient != n {
        return Err(EngineError::DimensionMismatch(format!(
            "module lives in dimension {}, expected {}",
            w.ambient, n
        )));
    }
    let fiber_vectors = w.closed_fiber();
    let rank = l_rank(&fiber_vectors);
    if rank != w.basis.len() {
        return Err(EngineError::NotFree {
            rank,
            len: w.basis.len(),
        });
    }

    let span = LSpan::new(&w.l_spanning());
    let mut instability = None;
    'outer: for g in canonical_generators(t) {
        for v in &w.basis {
            let img: Vec<TruncElement> = v.iter().map(|x| g.element.apply(x)).collect();
            if !span.contains(&w.flatten(&img)) {
                instability = Some(Witness {
                    element: render_trunc_vector(v),
                    generator: g.name.clone(),
                    image: render_trunc_vector(&img),
                });
                break 'outer;
            }
        }
    }

    let saturation = is_xbar_saturated(w);
    if !saturation.saturated {
        return Err(EngineError::InternalInconsistency(format!(
            "free module is not saturated at {}",
            render_vector(&saturation.witness.unwrap_or_default())
        )));
    }

    let fiber = SubspaceL::new(t, n, fiber_vectors)?;
    let mut report = check_subspace(n, &fiber)?;
    match instability {
        None => {
            if !report.is_defined() {
                return Err(EngineError::InternalInconsistency(
                    "invariant deformation over a fiber without K-form".into(),
                ));
            }
            report
                .diagnostics
                .insert(0, "deformation is free, saturated and stable".into());
        }
        Some(wit) => {
            let note = format!("deformation is not stable: {} moves {} to {}", wit.generator, wit.element, wit.image);
            if report.is_defined() {
                report.diagnostics.insert(0, note);
                report
                    .diagnostics
                    .insert(1, "the fiber is defined over K, so its constant deformation is stable".into());
            } else {
                report.witness = Some(wit);
                report.diagnostics.insert(0, note);
            }
        }
    }
    Ok(report)
}
