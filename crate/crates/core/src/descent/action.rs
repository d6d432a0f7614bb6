use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use super::groebner::{groebner_basis, normal_form, LPoly, PresentedAlgebraL};
use super::{l_rank, DescentReport, KForm};
use crate::error::EngineError;
use crate::field::Monomial;
use crate::gha::{extract_from_hg, gha_invariants, TruncMatrix};
use crate::hg::{canonical_generators, HGElement, NamedHg};
use crate::linalg::rank;
use crate::report::ValidationReport;
use crate::tower::{Tower, TowerElement};
use crate::trunc::TruncElement;

/// Upper bound on the size of the automorphism group enumerated by
/// breadth-first search.
const MAX_GROUP_ORDER: usize = 4096;

/// A σ-linear action of the canonical automorphisms on L[X̄]^dim.
/// `mats[name]` is the matrix of ρ(φ) in the standard basis: its column
/// s holds ρ(φ)(v_s).
#[derive(Clone, Debug)]
pub struct SigmaLinearAction {
    tower: Arc<Tower>,
    dim: usize,
    mats: BTreeMap<String, TruncMatrix>,
}

impl SigmaLinearAction {
    pub fn new(tower: &Arc<Tower>, dim: usize, mats: BTreeMap<String, TruncMatrix>) -> Result<Self, EngineError> {
        let gens = canonical_generators(tower);
        for name in mats.keys() {
            if !gens.iter().any(|g| &g.name == name) {
                return Err(EngineError::InvalidAction(format!("unknown generator {}", name)));
            }
        }
        for g in &gens {
            let m = mats
                .get(&g.name)
                .ok_or_else(|| EngineError::InvalidAction(format!("no matrix for generator {}", g.name)))?;
            if m.len() != dim || m.iter().any(|r| r.len() != dim) {
                return Err(EngineError::InvalidAction(format!(
                    "matrix for {} is not {}x{}",
                    g.name, dim, dim
                )));
            }
            if m.iter().flatten().any(|x| !Arc::ptr_eq(x.tower(), tower)) {
                return Err(EngineError::InvalidAction(format!("matrix for {} uses another tower", g.name)));
            }
        }
        Ok(SigmaLinearAction {
            tower: tower.clone(),
            dim,
            mats,
        })
    }

    /// Every generator acts by the identity matrix.
    pub fn trivial(tower: &Arc<Tower>, dim: usize) -> Self {
        let mats = canonical_generators(tower)
            .into_iter()
            .map(|g| (g.name, trunc_identity(tower, dim)))
            .collect();
        SigmaLinearAction {
            tower: tower.clone(),
            dim,
            mats,
        }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &BTreeMap<String, TruncMatrix> {
        &self.mats
    }

    pub fn matrix(&self, name: &str) -> Option<&TruncMatrix> {
        self.mats.get(name)
    }

    /// ρ(φ)(v) = M·φ(v) for the named generator.
    pub fn apply(&self, name: &str, v: &[TruncElement]) -> Option<Vec<TruncElement>> {
        let m = self.mats.get(name)?;
        let phi = canonical_generators(&self.tower).into_iter().find(|g| g.name == name)?;
        let moved: Vec<TruncElement> = v.iter().map(|x| phi.element.apply(x)).collect();
        Some(trunc_mat_vec(&self.tower, m, &moved))
    }
}

pub(crate) fn trunc_identity(tower: &Arc<Tower>, n: usize) -> TruncMatrix {
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| if r == c { TruncElement::one(tower) } else { TruncElement::zero(tower) })
                .collect()
        })
        .collect()
}

pub(crate) fn trunc_mat_mul(tower: &Arc<Tower>, a: &TruncMatrix, b: &TruncMatrix) -> TruncMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    a[i].iter()
                        .zip(b)
                        .fold(TruncElement::zero(tower), |acc, (x, row)| acc.add(&x.mul(&row[j])))
                })
                .collect()
        })
        .collect()
}

fn trunc_mat_vec(tower: &Arc<Tower>, m: &TruncMatrix, v: &[TruncElement]) -> Vec<TruncElement> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(TruncElement::zero(tower), |acc, (x, y)| acc.add(&x.mul(y))))
        .collect()
}

fn apply_entrywise(phi: &HGElement, m: &TruncMatrix) -> TruncMatrix {
    m.iter().map(|r| r.iter().map(|x| phi.apply(x)).collect()).collect()
}

fn closed_fiber_rank(m: &TruncMatrix) -> usize {
    let rows: Vec<Vec<TowerElement>> = m.iter().map(|r| r.iter().map(|x| x.closed_fiber()).collect()).collect();
    if rows.is_empty() {
        0
    } else {
        rank(&rows)
    }
}

/// Gauss–Jordan inverse over the local ring L[X̄], pivoting on units.
pub(crate) fn trunc_inverse(tower: &Arc<Tower>, m: &TruncMatrix) -> Option<TruncMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<TruncElement>> = m.to_vec();
    let mut inv = trunc_identity(tower, n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].closed_fiber().is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let u = a[c][c].invert().ok()?;
        a[c] = a[c].iter().map(|x| x.mul(&u)).collect();
        inv[c] = inv[c].iter().map(|x| x.mul(&u)).collect();
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let s = a[r][j].sub(&f.mul(&a[c][j]));
                a[r][j] = s;
                let s = inv[r][j].sub(&f.mul(&inv[c][j]));
                inv[r][j] = s;
            }
        }
    }
    Some(inv)
}

fn is_identity_matrix(m: &TruncMatrix) -> bool {
    m.iter()
        .enumerate()
        .all(|(r, row)| row.iter().enumerate().all(|(c, x)| if r == c { x.is_one() } else { x.is_zero() }))
}

/// The finite group generated by the canonical automorphisms, listed in
/// breadth-first order from the identity.
#[derive(Clone, Debug)]
pub struct FiniteHgGroup {
    pub elements: Vec<HGElement>,
    /// Shortest word in the generators for each element, e.g. `phi1*phi_g`.
    pub words: Vec<String>,
    pub generators: Vec<NamedHg>,
    /// `right[a][g]` is the index of elements[a] ∘ generators[g].
    pub right: Vec<Vec<usize>>,
}

impl FiniteHgGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, phi: &HGElement) -> Option<usize> {
        self.elements.iter().position(|x| x == phi)
    }

    /// Index of elements[a] ∘ elements[b].
    pub fn product(&self, a: usize, b: usize) -> Result<usize, EngineError> {
        let c = self.elements[a].compose(&self.elements[b])?;
        self.index_of(&c)
            .ok_or_else(|| EngineError::InternalInconsistency("group is not closed under composition".into()))
    }
}

pub fn enumerate_group(tower: &Arc<Tower>) -> Result<FiniteHgGroup, EngineError> {
    let generators = canonical_generators(tower);
    let mut elements = vec![HGElement::identity(tower)];
    let mut words = vec!["id".to_string()];
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let mut row = Vec::with_capacity(generators.len());
        for g in &generators {
            let c = elements[a].compose(&g.element)?;
            let idx = match elements.iter().position(|x| *x == c) {
                Some(i) => i,
                None => {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(EngineError::InternalInconsistency(format!(
                            "automorphism group exceeds {} elements",
                            MAX_GROUP_ORDER
                        )));
                    }
                    elements.push(c);
                    words.push(if a == 0 { g.name.clone() } else { format!("{}*{}", words[a], g.name) });
                    queue.push_back(elements.len() - 1);
                    elements.len() - 1
                }
            };
            row.push(idx);
        }
        if right.len() <= a {
            right.resize(a + 1, Vec::new());
        }
        right[a] = row;
    }
    Ok(FiniteHgGroup {
        elements,
        words,
        generators,
        right,
    })
}

/// Extends ρ from generators to the whole group along the breadth-first
/// tree. Returns the matrices and the first inconsistency found.
fn extend_to_group(action: &SigmaLinearAction, group: &FiniteHgGroup) -> (Vec<TruncMatrix>, Option<String>) {
    let t = &action.tower;
    let mut rho: Vec<Option<TruncMatrix>> = vec![None; group.order()];
    rho[0] = Some(trunc_identity(t, action.dim));
    let mut conflict = None;
    for a in 0..group.order() {
        let base = rho[a].clone().expect("breadth-first order assigns parents first");
        for (gi, g) in group.generators.iter().enumerate() {
            let b = group.right[a][gi];
            let moved = apply_entrywise(&group.elements[a], &action.mats[&g.name]);
            let candidate = trunc_mat_mul(t, &base, &moved);
            match &rho[b] {
                None => rho[b] = Some(candidate),
                Some(existing) => {
                    if *existing != candidate && conflict.is_none() {
                        conflict = Some(format!(
                            "{} * {} reaches {} with a different matrix",
                            group.words[a], g.name, group.words[b]
                        ));
                    }
                }
            }
        }
    }
    (rho.into_iter().map(|m| m.expect("group is connected")).collect(), conflict)
}

/// Checks that the generator matrices define a σ-linear action of the
/// group they generate.
pub fn validate_action(action: &SigmaLinearAction) -> ValidationReport {
    let mut report = ValidationReport::new();
    let t = &action.tower;
    let gens = canonical_generators(t);
    for g in &gens {
        let r = closed_fiber_rank(&action.mats[&g.name]);
        report.record(
            format!("invertible {}", g.name),
            r == action.dim,
            format!("closed fiber has rank {} of {}", r, action.dim),
        );
    }
    // Twisted powers of the inseparable generators.
    for g in gens.iter().filter(|g| g.element.is_in_a0()) {
        let m = &action.mats[&g.name];
        let mut acc_phi = HGElement::identity(t);
        let mut acc = trunc_identity(t, action.dim);
        let mut steps = 0;
        loop {
            acc = trunc_mat_mul(t, &acc, &apply_entrywise(&acc_phi, m));
            acc_phi = match acc_phi.compose(&g.element) {
                Ok(x) => x,
                Err(e) => {
                    report.record(format!("order {}", g.name), false, e.to_string());
                    break;
                }
            };
            steps += 1;
            if acc_phi.is_identity() {
                report.record(
                    format!("order {}", g.name),
                    is_identity_matrix(&acc),
                    format!(
                        "twisted power of order {} {} the identity",
                        steps,
                        if is_identity_matrix(&acc) { "is" } else { "is not" }
                    ),
                );
                break;
            }
        }
    }
    match enumerate_group(t) {
        Err(e) => report.record("group", false, e.to_string()),
        Ok(group) => {
            report.record("group", true, format!("order {}", group.order()));
            let (_, conflict) = extend_to_group(action, &group);
            report.record(
                "consistency",
                conflict.is_none(),
                conflict.unwrap_or_else(|| "relations hold on the whole group".into()),
            );
        }
    }
    report
}

/// The module of invariants of a σ-linear action; a K-form when it has
/// full rank.
pub fn kform_from_action(action: &SigmaLinearAction) -> Result<DescentReport, EngineError> {
    let report = validate_action(action);
    if let Some(f) = report.failures().next() {
        return Err(EngineError::InvalidAction(format!("{}: {}", f.name, f.detail)));
    }
    let t = &action.tower;
    let gens = canonical_generators(t);
    let gha = extract_from_hg(t, action.dim, &gens, &action.mats)?;
    let inv = gha_invariants(&gha);
    let r = l_rank(&inv);
    if inv.len() != action.dim || r != action.dim {
        return Err(EngineError::NotAForm {
            found: r,
            expected: action.dim,
        });
    }
    for v in &inv {
        let lifted: Vec<TruncElement> = v.iter().map(|x| TruncElement::constant(x.clone())).collect();
        for g in &gens {
            if action.apply(&g.name, &lifted).as_deref() != Some(&lifted[..]) {
                return Err(EngineError::InternalInconsistency(format!(
                    "invariant {} is moved by {}",
                    super::render_vector(v),
                    g.name
                )));
            }
        }
    }
    Ok(DescentReport::defined(
        KForm::InvariantVectors(inv),
        vec![format!("{} invariant vectors span L^{}", action.dim, action.dim)],
    ))
}

/// The descent datum that fixes the columns of `form`:
/// ρ(σ) = P·σ(P)⁻¹.
pub fn datum_from_form(tower: &Arc<Tower>, form: &[Vec<TowerElement>]) -> Result<SigmaLinearAction, EngineError> {
    let n = form.len();
    if form.iter().any(|r| r.len() != n) {
        return Err(EngineError::DimensionMismatch("basis matrix must be square".into()));
    }
    if l_rank(form) != n {
        return Err(EngineError::DimensionMismatch("basis matrix is singular".into()));
    }
    let p: TruncMatrix = form
        .iter()
        .map(|r| r.iter().map(|x| TruncElement::constant(x.clone())).collect())
        .collect();
    let mut mats = BTreeMap::new();
    for g in canonical_generators(tower) {
        let moved: TruncMatrix = form
            .iter()
            .map(|r| r.iter().map(|x| g.element.apply_l(x)).collect())
            .collect();
        let inv = trunc_inverse(tower, &moved)
            .ok_or_else(|| EngineError::InternalInconsistency("conjugate basis matrix is singular".into()))?;
        mats.insert(g.name, trunc_mat_mul(tower, &p, &inv));
    }
    SigmaLinearAction::new(tower, n, mats)
}

/// Polynomial with coefficients in L[X̄], stored by X̄-degree.
type TruncPoly = Vec<LPoly>;

fn trunc_poly_mul(a: &TruncPoly, b: &TruncPoly) -> TruncPoly {
    let n = a.len();
    let mut out: TruncPoly = vec![LPoly::zero(a[0].tower(), a[0].vars()); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

/// Φ(f) where Φ acts on coefficients by φ and on variables by M.
fn transform_poly(phi: &HGElement, m: &TruncMatrix, f: &LPoly) -> TruncPoly {
    let t = f.tower();
    let vars = f.vars();
    let len = t.truncation();
    let q = vars.len();
    let images: Vec<TruncPoly> = (0..q)
        .map(|s| {
            (0..len)
                .map(|k| {
                    let mut p = LPoly::zero(t, vars);
                    for (r, row) in m.iter().enumerate() {
                        p.add_term(Monomial::var(q, r), row[s].coeff(k).clone());
                    }
                    p
                })
                .collect()
        })
        .collect();
    let mut out: TruncPoly = vec![LPoly::zero(t, vars); len];
    for (mono, c) in f.terms() {
        let cc = phi.apply_l(c);
        let mut term: TruncPoly = (0..len).map(|k| LPoly::constant(vars, cc.coeff(k).clone())).collect();
        for (s, &e) in mono.0.iter().enumerate() {
            for _ in 0..e {
                term = trunc_poly_mul(&term, &images[s]);
            }
        }
        for (o, x) in out.iter_mut().zip(term) {
            *o = o.add(&x);
        }
    }
    out
}

/// Checks that ρ extends to a σ-linear action of the whole group
/// satisfying the cocycle condition, and optionally that it preserves an
/// ideal in the variables it acts on.
pub fn verify_descent_datum(
    datum: &SigmaLinearAction,
    algebra: Option<&PresentedAlgebraL>,
) -> Result<ValidationReport, EngineError> {
    let t = &datum.tower;
    let mut report = ValidationReport::new();
    for (name, m) in &datum.mats {
        let r = closed_fiber_rank(m);
        report.record(
            format!("invertible {}", name),
            r == datum.dim,
            format!("closed fiber has rank {} of {}", r, datum.dim),
        );
    }
    let group = enumerate_group(t)?;
    report.record("group", true, format!("order {}", group.order()));
    let (rho, conflict) = extend_to_group(datum, &group);
    report.record(
        "well-defined",
        conflict.is_none(),
        conflict.unwrap_or_else(|| "generator matrices extend to the group".into()),
    );
    let mut bad_pair = None;
    'pairs: for a in 0..group.order() {
        for b in 0..group.order() {
            let ab = group.product(a, b)?;
            let lhs = trunc_mat_mul(t, &rho[a], &apply_entrywise(&group.elements[a], &rho[b]));
            if lhs != rho[ab] {
                bad_pair = Some((a, b));
                break 'pairs;
            }
        }
    }
    let pairs = group.order() * group.order();
    report.record(
        "cocycle",
        bad_pair.is_none(),
        match bad_pair {
            None => format!("{} pairs checked", pairs),
            Some((a, b)) => format!("fails for the pair ({}, {})", group.words[a], group.words[b]),
        },
    );
    if let Some(alg) = algebra {
        if alg.vars.len() != datum.dim {
            return Err(EngineError::DimensionMismatch(format!(
                "datum acts on {} variables, algebra has {}",
                datum.dim,
                alg.vars.len()
            )));
        }
        let basis = groebner_basis(&alg.gens);
        let mut failure = None;
        'gens: for g in canonical_generators(t) {
            for f in &alg.gens {
                let img = transform_poly(&g.element, &datum.mats[&g.name], f);
                if let Some(k) = img.iter().position(|c| !normal_form(c, &basis).is_zero()) {
                    failure = Some(format!("{} moves {} outside the ideal (X^{} coefficient)", g.name, f, k));
                    break 'gens;
                }
            }
        }
        report.record(
            "ideal compatibility",
            failure.is_none(),
            failure.unwrap_or_else(|| "every generator preserves the ideal".into()),
        );
    }
    Ok(report)
}
