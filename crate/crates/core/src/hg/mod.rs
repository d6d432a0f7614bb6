//! Higher derivations and automorphisms of L[X̄] over K[X̄].

mod derivation;
mod element;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use derivation::{apply_matrix as apply_k_matrix, hd_product, HigherDerivation, KMatrix};
pub use element::{delta, delta_inverse, HGElement};

use crate::field::RatFunc;
use crate::linalg::k_kernel;
use crate::tower::{Tower, TowerElement};
use crate::trunc::TruncElement;

/// An automorphism paired with the name it is referred to by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedHg {
    pub name: String,
    pub element: HGElement,
}

/// φ_g for every non-identity g ∈ G (named `phi_<g>`), followed by
/// φ_i for each inseparable generator (named `phi<i>`).
pub fn canonical_generators(tower: &Arc<Tower>) -> Vec<NamedHg> {
    let group = tower.group();
    let mut out: Vec<NamedHg> = group
        .elements()
        .filter(|&g| g != group.identity())
        .map(|g| NamedHg {
            name: format!("phi_{}", group.name(g)),
            element: HGElement::sep_automorphism(tower, g),
        })
        .collect();
    out.extend((1..=tower.insep().len()).map(|i| NamedHg {
        name: format!("phi{}", i),
        element: HGElement::shift_generator(tower, i),
    }));
    out
}

/// K-basis of {a ∈ L : φ(a) = a for all φ in `gens`}.
pub fn fixed_subfield(tower: &Arc<Tower>, gens: &[HGElement]) -> Vec<TowerElement> {
    let n = tower.degree();
    let mut rows = Vec::new();
    for phi in gens {
        for k in 0..tower.truncation() {
            let mut m = phi.coefficient_matrix(k);
            if k == 0 {
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = row[i].sub(&tower.k_one());
                }
            }
            rows.extend(m.into_iter().filter(|r| r.iter().any(|c| !c.is_zero())));
        }
    }
    kernel_elements(tower, &rows, n)
        .into_iter()
        .map(|v| TowerElement::from_coords(tower, v).expect("sized to the tower"))
        .collect()
}

/// K-basis of {x ∈ L[X̄] : φ(x) = x for all φ in `gens`}.
pub fn fixed_subring(tower: &Arc<Tower>, gens: &[HGElement]) -> Vec<TruncElement> {
    let n = tower.degree();
    let len = tower.truncation();
    let width = n * len;
    let mut rows = Vec::new();
    for phi in gens {
        // Column (k, j) is X̄^k b_j; its image shifts the cached image of b_j.
        let mut cols: Vec<Vec<RatFunc>> = Vec::with_capacity(width);
        for k in 0..len {
            for j in 0..n {
                let diff = phi
                    .basis_image(j)
                    .sub(&TruncElement::constant(TowerElement::basis(tower, j)))
                    .shift(k);
                cols.push(flatten(&diff));
            }
        }
        for r in 0..width {
            let row: Vec<RatFunc> = cols.iter().map(|c| c[r].clone()).collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    kernel_elements(tower, &rows, width)
        .into_iter()
        .map(|v| unflatten(tower, &v))
        .collect()
}

fn kernel_elements(tower: &Arc<Tower>, rows: &[Vec<RatFunc>], width: usize) -> Vec<Vec<RatFunc>> {
    if rows.is_empty() {
        let z = tower.k_zero();
        return (0..width)
            .map(|i| {
                let mut v = vec![z.clone(); width];
                v[i] = tower.k_one();
                v
            })
            .collect();
    }
    k_kernel(rows, width, &tower.k_zero())
}

/// K-coordinates of x, ordered by X̄-power then tower basis index.
pub fn flatten(x: &TruncElement) -> Vec<RatFunc> {
    x.coeffs().iter().flat_map(|c| c.coords().iter().cloned()).collect()
}

pub fn unflatten(tower: &Arc<Tower>, v: &[RatFunc]) -> TruncElement {
    let n = tower.degree();
    let coeffs = v
        .chunks(n)
        .map(|c| TowerElement::from_coords(tower, c.to_vec()).expect("sized to the tower"))
        .collect();
    TruncElement::from_coeffs(tower, coeffs).expect("length p^e")
}

/// Small random element of L with F_p-constant or linear coordinates.
pub fn random_tower_element(tower: &Arc<Tower>, rng: &mut ChaCha8Rng) -> TowerElement {
    let md = tower.modulus();
    let nv = tower.nvars();
    let coords = (0..tower.degree())
        .map(|_| {
            if rng.gen_bool(0.5) {
                return tower.k_zero();
            }
            let c = RatFunc::constant(md, nv, rng.gen_range(0..md.get()) as i64);
            if nv > 0 && rng.gen_bool(0.3) {
                c.add(&RatFunc::var(md, nv, rng.gen_range(0..nv)))
            } else {
                c
            }
        })
        .collect();
    TowerElement::from_coords(tower, coords).expect("sized to the tower")
}

fn random_with(tower: &Arc<Tower>, seed: u64, in_a0: bool) -> HGElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let group = tower.group();
    let g = if in_a0 {
        group.identity()
    } else {
        rng.gen_range(0..group.order())
    };
    let image_sep = TowerElement::sep_generator(tower).apply_sep_auto(g);
    let n = tower.truncation();
    let image_insep = tower
        .insep()
        .iter()
        .enumerate()
        .map(|(i, gen)| {
            let mut coeffs = vec![TowerElement::zero(tower); n];
            coeffs[0] = TowerElement::insep_generator(tower, i + 1);
            for c in coeffs.iter_mut().skip(n / gen.order) {
                *c = random_tower_element(tower, &mut rng);
            }
            TruncElement::from_coeffs(tower, coeffs).expect("length p^e")
        })
        .collect();
    HGElement::new(tower, image_sep, image_insep).expect("structural form is always valid")
}

/// Deterministic pseudo-random automorphism drawn from the structural
/// parametrization of generator images.
pub fn random_hg_element(tower: &Arc<Tower>, seed: u64) -> HGElement {
    random_with(tower, seed, false)
}

/// As [`random_hg_element`], restricted to automorphisms congruent to the
/// identity modulo X̄.
pub fn random_a0_element(tower: &Arc<Tower>, seed: u64) -> HGElement {
    random_with(tower, seed, true)
}

#[cfg(test)]
mod tests;
