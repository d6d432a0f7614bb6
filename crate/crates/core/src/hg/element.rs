use std::fmt;
use std::sync::Arc;

use super::derivation::{HigherDerivation, KMatrix};
use crate::error::AlgebraError;
use crate::tower::{Tower, TowerElement};
use crate::trunc::TruncElement;

/// K[X̄]-algebra automorphism of L[X̄] determined by where it sends the
/// tower generators.
///
/// The image of every basis monomial of L is cached on construction, so
/// applying the automorphism is a K-linear combination of cached values.
#[derive(Clone)]
pub struct HGElement {
    image_sep: TowerElement,
    sep_auto: usize,
    image_insep: Vec<TruncElement>,
    table: Vec<TruncElement>,
}

impl HGElement {
    pub fn new(
        tower: &Arc<Tower>,
        image_sep: TowerElement,
        image_insep: Vec<TruncElement>,
    ) -> Result<Self, AlgebraError> {
        let bad = |m: String| AlgebraError::InvalidHgElement(m);
        if !Arc::ptr_eq(image_sep.tower(), tower)
            || image_insep.iter().any(|x| !Arc::ptr_eq(x.tower(), tower))
        {
            return Err(AlgebraError::SpecMismatch);
        }
        if image_insep.len() != tower.insep().len() {
            return Err(bad(format!(
                "{} inseparable images given, tower has {}",
                image_insep.len(),
                tower.insep().len()
            )));
        }
        let alpha0 = TowerElement::sep_generator(tower);
        let sep_auto = tower
            .group()
            .elements()
            .find(|&g| alpha0.apply_sep_auto(g) == image_sep)
            .ok_or_else(|| bad(format!("{} is not a conjugate of the separable generator", image_sep)))?;
        let n = tower.truncation();
        for (i, (img, gen)) in image_insep.iter().zip(tower.insep()).enumerate() {
            let alpha = TowerElement::insep_generator(tower, i + 1);
            if img.closed_fiber() != alpha {
                return Err(bad(format!("image of {} is not congruent to it modulo X", gen.name)));
            }
            let shift = n / gen.order;
            if let Some(k) = (1..shift).find(|&k| !img.coeff(k).is_zero()) {
                return Err(bad(format!("image of {} has a nonzero X^{} term", gen.name, k)));
            }
            let value = TruncElement::constant(TowerElement::from_k(tower, gen.value.clone()));
            if img.pow(gen.order as u64) != value {
                return Err(bad(format!("image of {} does not satisfy its relation", gen.name)));
            }
        }
        let table = build_table(tower, &image_sep, &image_insep);
        Ok(HGElement {
            image_sep,
            sep_auto,
            image_insep,
            table,
        })
    }

    pub fn identity(tower: &Arc<Tower>) -> Self {
        Self::sep_automorphism(tower, tower.group().identity())
    }

    /// φ_g: the automorphism g on L, fixing X̄.
    pub fn sep_automorphism(tower: &Arc<Tower>, g: usize) -> Self {
        let image_sep = TowerElement::sep_generator(tower).apply_sep_auto(g);
        let image_insep = (1..=tower.insep().len())
            .map(|i| TruncElement::constant(TowerElement::insep_generator(tower, i)))
            .collect();
        Self::new(tower, image_sep, image_insep).expect("automorphisms of the separable factor are valid")
    }

    /// φ_i: αᵢ ↦ αᵢ + X̄^{p^{e−nᵢ}}, fixing the other generators (1-based i).
    pub fn shift_generator(tower: &Arc<Tower>, i: usize) -> Self {
        let n = tower.truncation();
        let image_sep = TowerElement::sep_generator(tower);
        let image_insep = (1..=tower.insep().len())
            .map(|j| {
                let base = TruncElement::constant(TowerElement::insep_generator(tower, j));
                if j == i {
                    base.add(&TruncElement::xbar_pow(tower, n / tower.insep()[j - 1].order))
                } else {
                    base
                }
            })
            .collect();
        Self::new(tower, image_sep, image_insep).expect("shifted generators are valid")
    }

    pub fn tower(&self) -> &Arc<Tower> {
        self.image_sep.tower()
    }

    pub fn image_sep(&self) -> &TowerElement {
        &self.image_sep
    }

    pub fn image_insep(&self) -> &[TruncElement] {
        &self.image_insep
    }

    /// Index of the group element g with φ ≡ φ_g modulo X̄.
    pub fn sep_auto(&self) -> usize {
        self.sep_auto
    }

    /// Image of basis monomial `j` of L.
    pub fn basis_image(&self, j: usize) -> &TruncElement {
        &self.table[j]
    }

    pub fn is_identity(&self) -> bool {
        self.is_in_a0()
            && self
                .image_insep
                .iter()
                .all(|x| x.coeffs()[1..].iter().all(|c| c.is_zero()))
    }

    /// True when φ(a) ≡ a modulo X̄ for all a ∈ L.
    pub fn is_in_a0(&self) -> bool {
        self.sep_auto == self.tower().group().identity()
    }

    /// φ(a) for a ∈ L.
    pub fn apply_l(&self, a: &TowerElement) -> TruncElement {
        let mut out = TruncElement::zero(self.tower());
        for (j, c) in a.coords().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.table[j].scale_k(c));
            }
        }
        out
    }

    /// φ(x), extended K[X̄]-linearly.
    pub fn apply(&self, x: &TruncElement) -> TruncElement {
        let mut out = TruncElement::zero(self.tower());
        for (k, c) in x.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.apply_l(c).shift(k));
            }
        }
        out
    }

    /// K-matrix of a ↦ (X̄^k-coefficient of φ(a)) on L.
    pub fn coefficient_matrix(&self, k: usize) -> KMatrix {
        let t = self.tower();
        let n = t.degree();
        (0..n)
            .map(|i| (0..n).map(|j| self.table[j].coeff(k).coords()[i].clone()).collect())
            .collect()
    }

    /// φ∘ψ.
    pub fn compose(&self, psi: &HGElement) -> Result<HGElement, AlgebraError> {
        if !Arc::ptr_eq(self.tower(), psi.tower()) {
            return Err(AlgebraError::SpecMismatch);
        }
        let sep = self.apply_l(&psi.image_sep);
        if sep.coeffs()[1..].iter().any(|c| !c.is_zero()) {
            return Err(AlgebraError::InvalidHgElement(
                "separable image left L under composition".into(),
            ));
        }
        let insep = psi.image_insep.iter().map(|x| self.apply(x)).collect();
        HGElement::new(self.tower(), sep.closed_fiber(), insep)
    }

    /// φ⁻¹ = ψ⁻¹ ∘ φ_{g⁻¹} with ψ = φ_{g⁻¹} ∘ φ unipotent.
    pub fn inverse(&self) -> Result<HGElement, AlgebraError> {
        let t = self.tower();
        let g_inv = HGElement::sep_automorphism(t, t.group().inverse(self.sep_auto));
        let psi = g_inv.compose(self)?;
        // ψ^{p^e} = id, so ψ⁻¹ is the last power before the identity.
        let mut prev = HGElement::identity(t);
        let mut cur = psi.clone();
        let mut steps = 1;
        while !cur.is_identity() {
            prev = cur.clone();
            cur = cur.compose(&psi)?;
            steps += 1;
            if steps > t.truncation() {
                return Err(AlgebraError::InvalidHgElement("unipotent part has unexpected order".into()));
            }
        }
        prev.compose(&g_inv)
    }

    pub fn pow(&self, e: u64) -> Result<HGElement, AlgebraError> {
        let mut acc = HGElement::identity(self.tower());
        for _ in 0..e {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    pub fn describe(&self) -> String {
        let t = self.tower();
        let mut parts = Vec::new();
        if let Some(name) = t.sep_name() {
            parts.push(format!("{} -> {}", name, self.image_sep));
        }
        for (g, img) in t.insep().iter().zip(&self.image_insep) {
            parts.push(format!("{} -> {}", g.name, img));
        }
        parts.join(", ")
    }
}

fn build_table(tower: &Arc<Tower>, image_sep: &TowerElement, image_insep: &[TruncElement]) -> Vec<TruncElement> {
    let sep_img = TruncElement::constant(image_sep.clone());
    let mut sep_pows = vec![TruncElement::one(tower)];
    for j in 1..tower.d0() {
        sep_pows.push(sep_pows[j - 1].mul(&sep_img));
    }
    let insep_pows: Vec<Vec<TruncElement>> = tower
        .insep()
        .iter()
        .zip(image_insep)
        .map(|(g, img)| {
            let mut v = vec![TruncElement::one(tower)];
            for j in 1..g.order {
                v.push(v[j - 1].mul(img));
            }
            v
        })
        .collect();
    (0..tower.degree())
        .map(|idx| {
            let (j0, js) = tower.split_index(idx);
            let mut acc = sep_pows[j0].clone();
            for (i, &j) in js.iter().enumerate() {
                if j > 0 {
                    acc = acc.mul(&insep_pows[i][j as usize]);
                }
            }
            acc
        })
        .collect()
}

impl PartialEq for HGElement {
    fn eq(&self, other: &Self) -> bool {
        self.image_sep == other.image_sep && self.image_insep == other.image_insep
    }
}

impl Eq for HGElement {}

impl fmt::Debug for HGElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HGElement({})", self.describe())
    }
}

/// δ(d)(a) = Σ_k d^(k)(a) X̄^k, defined for families of rank p^e − 1.
pub fn delta(d: &HigherDerivation) -> Result<HGElement, AlgebraError> {
    let t = d.tower();
    let n = t.truncation();
    if d.rank() + 1 != n {
        return Err(AlgebraError::RankMismatch(d.rank(), n - 1));
    }
    let image = |x: &TowerElement| {
        let coeffs = (0..n).map(|k| d.apply(k, x)).collect();
        TruncElement::from_coeffs(t, coeffs).expect("length p^e")
    };
    let sep = image(&TowerElement::sep_generator(t));
    if sep.coeffs()[1..].iter().any(|c| !c.is_zero()) {
        return Err(AlgebraError::NotLeibniz("nonzero on the separable generator".into()));
    }
    let insep = (1..=t.insep().len())
        .map(|i| image(&TowerElement::insep_generator(t, i)))
        .collect();
    let phi = HGElement::new(t, sep.closed_fiber(), insep)?;
    // The generator images determine φ; a Leibniz family agrees with it on
    // every basis monomial.
    for j in 0..t.degree() {
        if image(&TowerElement::basis(t, j)) != phi.table[j] {
            return Err(AlgebraError::NotLeibniz(format!(
                "family disagrees with the induced automorphism on {}",
                t.monomial_name(j)
            )));
        }
    }
    Ok(phi)
}

/// Reads off the higher derivation d with δ(d) = φ.
pub fn delta_inverse(phi: &HGElement) -> Result<HigherDerivation, AlgebraError> {
    if !phi.is_in_a0() {
        return Err(AlgebraError::NotInA0);
    }
    let maps = (0..phi.tower().truncation())
        .map(|k| phi.coefficient_matrix(k))
        .collect();
    HigherDerivation::from_maps(phi.tower(), maps)
}
