use std::collections::BTreeMap;
use std::sync::Arc;

use super::{basis_product, gha_generators, operator_on_l, GhaBasisIndex, GhaElement};
use crate::error::AlgebraError;
use crate::field::RatFunc;
use crate::hg::{KMatrix, NamedHg};
use crate::linalg::{identity, k_kernel, mat_mul};
use crate::report::ValidationReport;
use crate::tower::{Tower, TowerElement};
use crate::trunc::TruncElement;

/// r×r matrix over L[X̄]; column s holds the image of the s-th basis vector.
pub type TruncMatrix = Vec<Vec<TruncElement>>;

/// Action of the generating set on V = L^r, each operator stored as a
/// K-matrix on the flattened coordinates (vector s, tower basis j) ↦
/// s·[L:K] + j.
#[derive(Clone, Debug)]
pub struct SemilinearGhaAction {
    tower: Arc<Tower>,
    dim: usize,
    ops: BTreeMap<GhaBasisIndex, KMatrix>,
}

fn scalar_times(a: &TowerElement, v: &[TowerElement]) -> Vec<TowerElement> {
    v.iter().map(|x| a.mul(x)).collect()
}

fn add_vec(a: &[TowerElement], b: &[TowerElement]) -> Vec<TowerElement> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

impl SemilinearGhaAction {
    /// Takes full K-operators for every generator.
    pub fn from_operators(
        tower: &Arc<Tower>,
        dim: usize,
        ops: BTreeMap<GhaBasisIndex, KMatrix>,
    ) -> Result<Self, AlgebraError> {
        let width = dim * tower.degree();
        for g in gha_generators(tower) {
            let m = ops
                .get(&g)
                .ok_or_else(|| AlgebraError::UnknownGenerator(g.render(tower)))?;
            if m.len() != width || m.iter().any(|r| r.len() != width) {
                return Err(AlgebraError::SpecMismatch);
            }
        }
        Ok(SemilinearGhaAction {
            tower: tower.clone(),
            dim,
            ops,
        })
    }

    /// Extends the images D(v_s) of the basis vectors semilinearly:
    /// D_g(a v) = g(a) D_g(v) and D_i^(k)(a v) = Σ_h D_i^(h)(a) D_i^(k−h)(v).
    pub fn from_basis_images(
        tower: &Arc<Tower>,
        dim: usize,
        images: &BTreeMap<GhaBasisIndex, Vec<Vec<TowerElement>>>,
    ) -> Result<Self, AlgebraError> {
        let n = tower.degree();
        let gens = gha_generators(tower);
        for g in &gens {
            let v = images
                .get(g)
                .ok_or_else(|| AlgebraError::UnknownGenerator(g.render(tower)))?;
            if v.len() != dim || v.iter().any(|col| col.len() != dim) {
                return Err(AlgebraError::SpecMismatch);
            }
        }
        let unit_images: Vec<Vec<TowerElement>> = (0..dim)
            .map(|s| {
                (0..dim)
                    .map(|t| if s == t { TowerElement::one(tower) } else { TowerElement::zero(tower) })
                    .collect()
            })
            .collect();
        let image_of = |idx: &GhaBasisIndex| -> &Vec<Vec<TowerElement>> {
            if idx.is_grouplike() && idx.g == tower.group().identity() {
                &unit_images
            } else {
                &images[idx]
            }
        };
        let mut ops = BTreeMap::new();
        for g in &gens {
            let mut cols = Vec::with_capacity(dim * n);
            for s in 0..dim {
                for j in 0..n {
                    let b = TowerElement::basis(tower, j);
                    let v = if g.is_grouplike() {
                        scalar_times(&b.apply_sep_auto(g.g), &image_of(g)[s])
                    } else {
                        let i = g.k.iter().position(|&k| k > 0).unwrap();
                        let k = g.k[i];
                        let mut acc = vec![TowerElement::zero(tower); dim];
                        for h in 0..=k {
                            let dh = GhaBasisIndex::divided(tower, i + 1, h);
                            let dr = GhaBasisIndex::divided(tower, i + 1, k - h);
                            let a = super::act_on_l(&dh, &b);
                            if a.is_zero() {
                                continue;
                            }
                            acc = add_vec(&acc, &scalar_times(&a, &image_of(&dr)[s]));
                        }
                        acc
                    };
                    cols.push(flatten_vec(&v));
                }
            }
            ops.insert(g.clone(), transpose(&cols));
        }
        Ok(SemilinearGhaAction {
            tower: tower.clone(),
            dim,
            ops,
        })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn width(&self) -> usize {
        self.dim * self.tower.degree()
    }

    /// K-operator of an arbitrary basis element, composed from generators.
    pub fn operator(&self, idx: &GhaBasisIndex) -> KMatrix {
        let t = &self.tower;
        let z = t.k_zero();
        let mut m = identity(self.width(), &z);
        if idx.g != t.group().identity() {
            m = self.ops[&GhaBasisIndex::group(t, idx.g)].clone();
        }
        for (i, &k) in idx.k.iter().enumerate() {
            if k > 0 {
                m = mat_mul(&m, &self.ops[&GhaBasisIndex::divided(t, i + 1, k)], &z);
            }
        }
        m
    }

    /// D(v) for a basis element D and a vector v ∈ L^r.
    pub fn apply(&self, idx: &GhaBasisIndex, v: &[TowerElement]) -> Vec<TowerElement> {
        let m = self.operator(idx);
        unflatten_vec(&self.tower, &mat_vec(&m, &flatten_vec(v)))
    }

    pub fn apply_element(&self, d: &GhaElement, v: &[TowerElement]) -> Vec<TowerElement> {
        let mut acc = vec![TowerElement::zero(&self.tower); self.dim];
        for (idx, c) in d.terms() {
            let w = self.apply(idx, v);
            acc = add_vec(&acc, &w.iter().map(|x| x.scale_k(c)).collect::<Vec<_>>());
        }
        acc
    }

    /// Images of the standard basis vectors under D, as columns.
    pub fn basis_images(&self, idx: &GhaBasisIndex) -> Vec<Vec<TowerElement>> {
        (0..self.dim)
            .map(|s| {
                let mut v = vec![TowerElement::zero(&self.tower); self.dim];
                v[s] = TowerElement::one(&self.tower);
                self.apply(idx, &v)
            })
            .collect()
    }

    pub fn generator_operators(&self) -> &BTreeMap<GhaBasisIndex, KMatrix> {
        &self.ops
    }
}

pub(crate) fn flatten_vec(v: &[TowerElement]) -> Vec<RatFunc> {
    v.iter().flat_map(|x| x.coords().iter().cloned()).collect()
}

pub(crate) fn unflatten_vec(tower: &Arc<Tower>, v: &[RatFunc]) -> Vec<TowerElement> {
    v.chunks(tower.degree())
        .map(|c| TowerElement::from_coords(tower, c.to_vec()).expect("sized to the tower"))
        .collect()
}

fn transpose(cols: &[Vec<RatFunc>]) -> KMatrix {
    let rows = cols.first().map_or(0, |c| c.len());
    (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

fn mat_vec(m: &KMatrix, v: &[RatFunc]) -> Vec<RatFunc> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(v[0].zero_like(), |acc, (a, b)| {
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    acc.add(&a.mul(b))
                }
            })
        })
        .collect()
}

fn scale_matrix(m: &KMatrix, c: u32) -> KMatrix {
    m.iter().map(|r| r.iter().map(|x| x.scale(c)).collect()).collect()
}

impl SemilinearGhaAction {
    /// Checks the module relations on all generator pairs and
    /// semilinearity on every (basis scalar, basis vector) pair.
    pub fn verify_semilinear(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let t = &self.tower;
        let z = t.k_zero();
        let width = self.width();
        let zero_m = vec![vec![z.clone(); width]; width];
        let group = t.group();
        let gens = gha_generators(t);

        let mut fail: Option<String> = None;
        for g in group.elements() {
            for h in group.elements() {
                let lhs = mat_mul(&self.operator(&GhaBasisIndex::group(t, g)), &self.operator(&GhaBasisIndex::group(t, h)), &z);
                let rhs = self.operator(&GhaBasisIndex::group(t, group.compose(g, h)));
                if lhs != rhs && fail.is_none() {
                    fail = Some(format!("D_{} D_{} != D_{}", group.name(g), group.name(h), group.name(group.compose(g, h))));
                }
            }
        }
        record(&mut report, "group law", fail);

        let mut fail = None;
        for a in gens.iter().filter(|x| !x.is_grouplike()) {
            for b in gens.iter().filter(|x| !x.is_grouplike()) {
                let ia = a.k.iter().position(|&k| k > 0).unwrap();
                let ib = b.k.iter().position(|&k| k > 0).unwrap();
                if ia != ib {
                    continue;
                }
                let lhs = mat_mul(&self.ops[a], &self.ops[b], &z);
                let rhs = match basis_product(t, a, b) {
                    Some((c, idx)) => scale_matrix(&self.operator(&idx), c),
                    None => zero_m.clone(),
                };
                if lhs != rhs && fail.is_none() {
                    fail = Some(format!("{} {}", a.render(t), b.render(t)));
                }
            }
        }
        record(&mut report, "divided power law", fail);

        let mut fail = None;
        for (x, a) in gens.iter().enumerate() {
            for b in gens.iter().skip(x + 1) {
                let same_factor = !a.is_grouplike()
                    && !b.is_grouplike()
                    && a.k.iter().position(|&k| k > 0) == b.k.iter().position(|&k| k > 0);
                if (a.is_grouplike() && b.is_grouplike()) || same_factor {
                    continue;
                }
                let ab = mat_mul(&self.ops[a], &self.ops[b], &z);
                let ba = mat_mul(&self.ops[b], &self.ops[a], &z);
                if ab != ba && fail.is_none() {
                    fail = Some(format!("[{}, {}] != 0", a.render(t), b.render(t)));
                }
            }
        }
        record(&mut report, "commutation", fail);

        let mut fail = None;
        let n = t.degree();
        'outer: for g in &gens {
            let op = &self.ops[g];
            for s in 0..self.dim {
                let image_of = |idx: &GhaBasisIndex| -> Vec<TowerElement> {
                    let m = self.operator(idx);
                    let col: Vec<RatFunc> = m.iter().map(|r| r[s * n].clone()).collect();
                    unflatten_vec(t, &col)
                };
                for j in 0..n {
                    let b = TowerElement::basis(t, j);
                    let col: Vec<RatFunc> = op.iter().map(|r| r[s * n + j].clone()).collect();
                    let lhs = unflatten_vec(t, &col);
                    let rhs = if g.is_grouplike() {
                        scalar_times(&b.apply_sep_auto(g.g), &image_of(g))
                    } else {
                        let i = g.k.iter().position(|&k| k > 0).unwrap();
                        let k = g.k[i];
                        let mut acc = vec![TowerElement::zero(t); self.dim];
                        for h in 0..=k {
                            let a = super::act_on_l(&GhaBasisIndex::divided(t, i + 1, h), &b);
                            if !a.is_zero() {
                                let w = image_of(&GhaBasisIndex::divided(t, i + 1, k - h));
                                acc = add_vec(&acc, &scalar_times(&a, &w));
                            }
                        }
                        acc
                    };
                    if lhs != rhs {
                        fail = Some(format!("{} on {}·v{}", g.render(t), t.monomial_name(j), s + 1));
                        break 'outer;
                    }
                }
            }
        }
        record(&mut report, "semilinearity", fail);
        report
    }
}

fn record(report: &mut ValidationReport, name: &str, fail: Option<String>) {
    match fail {
        None => report.record(name, true, "all pairs"),
        Some(f) => report.record(name, false, f),
    }
}

/// The action on V_L = V ⊗_K L through the second factor.
pub fn natural_action(tower: &Arc<Tower>, dim: usize) -> SemilinearGhaAction {
    let n = tower.degree();
    let z = tower.k_zero();
    let ops = gha_generators(tower)
        .into_iter()
        .map(|g| {
            let block = operator_on_l(tower, &g);
            let mut m = vec![vec![z.clone(); dim * n]; dim * n];
            for s in 0..dim {
                for i in 0..n {
                    for j in 0..n {
                        m[s * n + i][s * n + j] = block[i][j].clone();
                    }
                }
            }
            (g, m)
        })
        .collect();
    SemilinearGhaAction {
        tower: tower.clone(),
        dim,
        ops,
    }
}

/// K-basis of {v : D v = ε(D) v for every generator D}.
pub fn gha_invariants(action: &SemilinearGhaAction) -> Vec<Vec<TowerElement>> {
    let t = &action.tower;
    let width = action.width();
    if width == 0 {
        return Vec::new();
    }
    let mut rows = Vec::new();
    for (g, op) in &action.ops {
        for (i, row) in op.iter().enumerate() {
            let mut r = row.clone();
            if g.is_grouplike() {
                r[i] = r[i].sub(&t.k_one());
            }
            if r.iter().any(|c| !c.is_zero()) {
                rows.push(r);
            }
        }
    }
    let kernel = if rows.is_empty() {
        identity(width, &t.k_zero())
    } else {
        k_kernel(&rows, width, &t.k_zero())
    };
    kernel.into_iter().map(|v| unflatten_vec(t, &v)).collect()
}

/// Reads generator operators off a σ-linear action of the canonical
/// generators: D_g from the X̄⁰ block of ρ(φ_g), D_i^(k) from the
/// X̄^{k·p^{e−nᵢ}} block of ρ(φ_i).
pub fn extract_from_hg(
    tower: &Arc<Tower>,
    dim: usize,
    generators: &[NamedHg],
    rho: &BTreeMap<String, TruncMatrix>,
) -> Result<SemilinearGhaAction, AlgebraError> {
    for name in rho.keys() {
        if !generators.iter().any(|g| &g.name == name) {
            return Err(AlgebraError::UnknownGenerator(name.clone()));
        }
    }
    let n = tower.degree();
    let len = tower.truncation();
    let mut ops = BTreeMap::new();
    for gen in generators {
        let m = rho
            .get(&gen.name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(gen.name.clone()))?;
        if m.len() != dim || m.iter().any(|r| r.len() != dim) {
            return Err(AlgebraError::SpecMismatch);
        }
        let phi = &gen.element;
        // Block c: column (s, j) is the X̄^c coefficient of φ(b_j)·ρ(v_s).
        let images: Vec<&TruncElement> = (0..n).map(|j| phi.basis_image(j)).collect();
        let block = |c: usize| -> KMatrix {
            let mut cols = Vec::with_capacity(dim * n);
            for s in 0..dim {
                for img in &images {
                    let v: Vec<TowerElement> = m.iter().map(|row| img.mul(&row[s]).coeff(c).clone()).collect();
                    cols.push(flatten_vec(&v));
                }
            }
            transpose(&cols)
        };
        if !phi.is_in_a0() {
            ops.insert(GhaBasisIndex::group(tower, phi.sep_auto()), block(0));
            continue;
        }
        let i = gen
            .name
            .strip_prefix("phi")
            .and_then(|x| x.parse::<usize>().ok())
            .ok_or_else(|| AlgebraError::UnknownGenerator(gen.name.clone()))?;
        let order = tower.insep()[i - 1].order;
        let shift = len / order;
        for k in 1..order {
            ops.insert(GhaBasisIndex::divided(tower, i, k as u32), block(k * shift));
        }
    }
    let action = SemilinearGhaAction::from_operators(tower, dim, ops)?;
    let report = action.verify_semilinear();
    if let Some(f) = report.failures().next() {
        return Err(AlgebraError::SemilinearityFailure(format!("{}: {}", f.name, f.detail)));
    }
    Ok(action)
}
