//! Decision procedures for whether objects over L come from objects over K.

mod action;
mod deform;
pub mod groebner;
mod ideal;
mod morphism;
mod subspace;

pub use action::{
    datum_from_form, enumerate_group, kform_from_action, validate_action, verify_descent_datum, FiniteHgGroup,
    SigmaLinearAction,
};
pub use deform::{deformation_descent, is_xbar_saturated, FreeTruncModule, Saturation};
pub use groebner::{groebner_basis, ideal_contains, normal_form, LPoly, PresentedAlgebraL};
pub use ideal::check_ideal;
pub use morphism::{check_morphism, AlgebraMapData, MorphismData};
pub use subspace::{check_subspace, oracle_subspace, SubspaceL};

use crate::field::{poly_gcd, MultiPoly, RatFunc};
use crate::tower::TowerElement;
use crate::trunc::TruncElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    DefinedOverK,
    NotDefinedOverK,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::DefinedOverK => "defined_over_K",
            Verdict::NotDefinedOverK => "not_defined_over_K",
        }
    }
}

/// A concrete certificate of failure: applying `generator` to `element`
/// gives `image`, which leaves the object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub element: String,
    pub generator: String,
    pub image: String,
}

/// The K-structure found on a positive verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KForm {
    /// K-rational vectors (entries lie in K) spanning the object over L.
    Vectors(Vec<Vec<TowerElement>>),
    /// Vectors of the module, not necessarily K-rational, fixed by the action.
    InvariantVectors(Vec<Vec<TowerElement>>),
    Polynomials(Vec<LPoly>),
    /// A matrix whose entries lie in K.
    Matrix(Vec<Vec<TowerElement>>),
    AlgebraMap(Vec<LPoly>),
}

impl KForm {
    pub fn render(&self) -> Vec<String> {
        match self {
            KForm::Vectors(v) | KForm::InvariantVectors(v) | KForm::Matrix(v) => {
                v.iter().map(|x| render_vector(x)).collect()
            }
            KForm::Polynomials(p) | KForm::AlgebraMap(p) => p.iter().map(|x| x.render()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentReport {
    pub verdict: Verdict,
    pub k_form: Option<KForm>,
    pub witness: Option<Witness>,
    pub diagnostics: Vec<String>,
}

impl DescentReport {
    pub fn defined(k_form: KForm, diagnostics: Vec<String>) -> Self {
        DescentReport {
            verdict: Verdict::DefinedOverK,
            k_form: Some(k_form),
            witness: None,
            diagnostics,
        }
    }

    pub fn not_defined(witness: Witness, diagnostics: Vec<String>) -> Self {
        DescentReport {
            verdict: Verdict::NotDefinedOverK,
            k_form: None,
            witness: Some(witness),
            diagnostics,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.verdict == Verdict::DefinedOverK
    }
}

pub fn render_vector(v: &[TowerElement]) -> String {
    format!("({})", v.iter().map(|x| x.render()).collect::<Vec<_>>().join(", "))
}

pub fn render_trunc_vector(v: &[TruncElement]) -> String {
    format!("({})", v.iter().map(|x| x.render()).collect::<Vec<_>>().join(", "))
}

/// Echelon form of the L-span of a list of vectors, for rank and
/// membership. Elimination cross-multiplies instead of dividing, on rows
/// whose coordinates are kept polynomial and content-free.
#[derive(Clone, Debug)]
pub(crate) struct LSpan {
    rows: Vec<Vec<TowerElement>>,
    pivots: Vec<usize>,
}

impl LSpan {
    pub fn new(vectors: &[Vec<TowerElement>]) -> Self {
        let ncols = vectors.first().map_or(0, |v| v.len());
        let mut pending: Vec<Vec<TowerElement>> = vectors
            .iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .map(|v| primitive_row(v))
            .collect();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..ncols {
            let Some(k) = (0..pending.len())
                .filter(|&i| !pending[i][c].is_zero())
                .min_by_key(|&i| element_size(&pending[i][c]))
            else {
                continue;
            };
            let prow = pending.swap_remove(k);
            for r in pending.iter_mut() {
                if !r[c].is_zero() {
                    *r = cross_eliminate(r, &prow, c);
                }
            }
            pending.retain(|r| r.iter().any(|x| !x.is_zero()));
            rows.push(prow);
            pivots.push(c);
        }
        LSpan { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The reduced echelon basis: the columns at the pivots form the
    /// identity, so the coordinates of a member are its pivot entries.
    pub fn reduced_basis(&self) -> Vec<Vec<TowerElement>> {
        let mut rows = self.rows.clone();
        for k in (0..rows.len()).rev() {
            let c = self.pivots[k];
            for i in 0..k {
                if !rows[i][c].is_zero() {
                    rows[i] = cross_eliminate(&rows[i], &rows[k], c);
                }
            }
        }
        rows.into_iter()
            .zip(&self.pivots)
            .map(|(row, &c)| TowerElement::div_all(&row, &row[c]).expect("pivots are nonzero"))
            .collect()
    }

    pub fn contains(&self, v: &[TowerElement]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let mut v = primitive_row(v);
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if !v[c].is_zero() {
                v = cross_eliminate(&v, row, c);
                if v.iter().all(|x| x.is_zero()) {
                    return true;
                }
            }
        }
        false
    }
}

/// pivot·r − r[c]·pivot_row, which vanishes in column c.
fn cross_eliminate(r: &[TowerElement], prow: &[TowerElement], c: usize) -> Vec<TowerElement> {
    let p = &prow[c];
    let f = &r[c];
    let out: Vec<TowerElement> = r
        .iter()
        .zip(prow)
        .map(|(x, y)| {
            let a = if x.is_zero() { x.clone() } else { x.mul(p) };
            if y.is_zero() {
                a
            } else {
                a.sub(&y.mul(f))
            }
        })
        .collect();
    if out.iter().all(|x| x.is_zero()) {
        out
    } else {
        primitive_row(&out)
    }
}

fn element_size(x: &TowerElement) -> usize {
    x.coords().iter().map(|c| c.num().num_terms() + c.den().num_terms()).sum()
}

/// The row rescaled by an element of K so that every coordinate is a
/// polynomial and the coordinates have no common factor.
fn primitive_row(v: &[TowerElement]) -> Vec<TowerElement> {
    let coords = v.iter().flat_map(|x| x.coords()).filter(|c| !c.is_zero());
    let mut den: Option<MultiPoly> = None;
    let mut num: Option<MultiPoly> = None;
    for c in coords {
        den = Some(match den {
            None => c.den().clone(),
            Some(d) => {
                let g = poly_gcd(&d, c.den()).expect("nonzero");
                d.div_exact(&g).expect("gcd divides").mul(c.den())
            }
        });
        num = Some(match num {
            None => c.num().monic(),
            Some(n) if n.as_constant().is_some() => n,
            Some(n) => poly_gcd(&n, c.num()).expect("nonzero"),
        });
    }
    let (Some(den), Some(num)) = (den, num) else {
        return v.to_vec();
    };
    if den.as_constant().is_some() && num.as_constant().is_some() {
        return v.to_vec();
    }
    let scale = RatFunc::new(den, num).expect("nonzero content");
    v.iter().map(|x| x.scale_k(&scale)).collect()
}

/// Dimension over L of the span of `vectors`.
pub fn l_rank(vectors: &[Vec<TowerElement>]) -> usize {
    LSpan::new(vectors).rank()
}
