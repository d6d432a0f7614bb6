use std::sync::Arc;

use crate::error::AlgebraError;
use crate::field::RatFunc;
use crate::linalg::{identity, mat_mul};
use crate::tower::{Tower, TowerElement};

/// Square K-matrix in the tower monomial basis; column j is the image of
/// basis monomial j.
pub type KMatrix = Vec<Vec<RatFunc>>;

/// A higher derivation {d^(0), …, d^(N)} of L relative to K, each map
/// stored as its K-matrix.
#[derive(Clone, Debug)]
pub struct HigherDerivation {
    tower: Arc<Tower>,
    maps: Vec<KMatrix>,
}

pub fn apply_matrix(tower: &Arc<Tower>, m: &KMatrix, x: &TowerElement) -> TowerElement {
    let n = tower.degree();
    let mut out = vec![tower.k_zero(); n];
    for (j, c) in x.coords().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            if !m[i][j].is_zero() {
                out[i] = out[i].add(&c.mul(&m[i][j]));
            }
        }
    }
    TowerElement::from_coords(tower, out).expect("coordinates sized to the tower")
}

impl PartialEq for HigherDerivation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) && self.maps == other.maps
    }
}

impl Eq for HigherDerivation {}

impl HigherDerivation {
    /// {id, 0, …, 0} of the given rank.
    pub fn trivial(tower: &Arc<Tower>, rank: usize) -> Self {
        let n = tower.degree();
        let z = tower.k_zero();
        let mut maps = vec![identity(n, &z)];
        maps.extend((0..rank).map(|_| vec![vec![z.clone(); n]; n]));
        HigherDerivation {
            tower: tower.clone(),
            maps,
        }
    }

    /// Validates d^(0) = id and the Leibniz rule on all basis pairs.
    pub fn from_maps(tower: &Arc<Tower>, maps: Vec<KMatrix>) -> Result<Self, AlgebraError> {
        let n = tower.degree();
        if maps.is_empty() || maps.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(AlgebraError::SpecMismatch);
        }
        let d = HigherDerivation {
            tower: tower.clone(),
            maps,
        };
        if d.maps[0] != identity(n, &tower.k_zero()) {
            return Err(AlgebraError::NotLeibniz("d^(0) is not the identity".into()));
        }
        d.check_leibniz()?;
        Ok(d)
    }

    fn check_leibniz(&self) -> Result<(), AlgebraError> {
        let t = &self.tower;
        let n = t.degree();
        let basis: Vec<TowerElement> = (0..n).map(|j| TowerElement::basis(t, j)).collect();
        let images: Vec<Vec<TowerElement>> = self
            .maps
            .iter()
            .map(|m| basis.iter().map(|b| apply_matrix(t, m, b)).collect())
            .collect();
        for a in 0..n {
            for b in a..n {
                let prod = basis[a].mul(&basis[b]);
                for k in 0..self.maps.len() {
                    let lhs = apply_matrix(t, &self.maps[k], &prod);
                    let mut rhs = TowerElement::zero(t);
                    for i in 0..=k {
                        rhs = rhs.add(&images[i][a].mul(&images[k - i][b]));
                    }
                    if lhs != rhs {
                        return Err(AlgebraError::NotLeibniz(format!(
                            "d^({}) on {} * {}",
                            k,
                            t.monomial_name(a),
                            t.monomial_name(b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn rank(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn maps(&self) -> &[KMatrix] {
        &self.maps
    }

    /// d^(k)(x).
    pub fn apply(&self, k: usize, x: &TowerElement) -> TowerElement {
        apply_matrix(&self.tower, &self.maps[k], x)
    }

    pub fn is_trivial(&self) -> bool {
        self.maps[1..].iter().all(|m| m.iter().flatten().all(|c| c.is_zero()))
    }
}

/// Convolution f^(k) = Σ_i d^(i) ∘ e^(k−i).
pub fn hd_product(d: &HigherDerivation, e: &HigherDerivation) -> Result<HigherDerivation, AlgebraError> {
    if !Arc::ptr_eq(&d.tower, &e.tower) {
        return Err(AlgebraError::SpecMismatch);
    }
    if d.rank() != e.rank() {
        return Err(AlgebraError::RankMismatch(d.rank(), e.rank()));
    }
    let z = d.tower.k_zero();
    let n = d.tower.degree();
    let maps = (0..=d.rank())
        .map(|k| {
            let mut acc = vec![vec![z.clone(); n]; n];
            for i in 0..=k {
                let prod = mat_mul(&d.maps[i], &e.maps[k - i], &z);
                for (row, prow) in acc.iter_mut().zip(prod) {
                    for (a, b) in row.iter_mut().zip(prow) {
                        *a = a.add(&b);
                    }
                }
            }
            acc
        })
        .collect();
    Ok(HigherDerivation {
        tower: d.tower.clone(),
        maps,
    })
}
