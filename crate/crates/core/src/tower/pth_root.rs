use std::collections::BTreeMap;

use super::{Tower, TowerElement};
use crate::field::{Monomial, RatFunc};
use crate::linalg::k_kernel;

impl Tower {
    /// A p-th root of `x` inside K(α₀, α₁, …, α_level), if there is one.
    ///
    /// Writing the root as Σ c_b β_b over the subtower basis, Frobenius gives
    /// x = Σ c_b^p β_b^p. Splitting every coordinate into its components
    /// t^u · (·)^p for residues u turns this into a K-linear system in the
    /// c_b after taking p-th roots componentwise.
    pub fn pth_root_in_subtower(&self, x: &TowerElement, level: usize) -> Option<TowerElement> {
        let tower = x.tower();
        let basis = self.subtower_indices(level);
        let inside: Vec<bool> = {
            let mut v = vec![false; self.degree()];
            for &b in &basis {
                v[b] = true;
            }
            v
        };
        if x.coords().iter().enumerate().any(|(i, c)| !inside[i] && !c.is_zero()) {
            return None;
        }

        // Row key: (target coordinate, residue monomial).
        let mut rows: BTreeMap<(usize, Monomial), Vec<RatFunc>> = BTreeMap::new();
        let width = basis.len() + 1;
        let zero = self.k_zero();
        for (col, &b) in basis.iter().enumerate() {
            let image = TowerElement::basis(tower, b).frobenius();
            for (target, m) in image.coords().iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                for (u, root) in m.frobenius_coordinates() {
                    rows.entry((target, u))
                        .or_insert_with(|| vec![zero.clone(); width])[col] = root;
                }
            }
        }
        for (target, c) in x.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (u, root) in c.frobenius_coordinates() {
                rows.entry((target, u))
                    .or_insert_with(|| vec![zero.clone(); width])[width - 1] = root.neg();
            }
        }
        let matrix: Vec<Vec<RatFunc>> = rows.into_values().collect();
        let ker = k_kernel(&matrix, width, &zero);
        let v = ker.into_iter().find(|v| !v[width - 1].is_zero())?;
        let scale = v[width - 1].inv().ok()?;
        let mut coords = vec![zero; self.degree()];
        for (col, &b) in basis.iter().enumerate() {
            coords[b] = v[col].mul(&scale);
        }
        let root = TowerElement::from_coords(tower, coords).ok()?;
        debug_assert!(root.frobenius() == *x);
        Some(root)
    }
}

/// A p-th root of `x` in L, if one exists.
pub fn tower_pth_root(x: &TowerElement) -> Option<TowerElement> {
    let t = x.tower().clone();
    t.pth_root_in_subtower(x, t.insep().len())
}
