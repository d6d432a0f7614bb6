use std::fmt;
use std::sync::Arc;

use super::Tower;
use crate::error::TowerError;
use crate::field::{poly_gcd, FractionSum, MultiPoly, RatFunc};
use crate::linalg::{k_solve, Scalar};

/// Element of L as K-coordinates in the monomial basis of its tower.
#[derive(Clone)]
pub struct TowerElement {
    tower: Arc<Tower>,
    coords: Vec<RatFunc>,
}

impl TowerElement {
    pub fn zero(tower: &Arc<Tower>) -> Self {
        TowerElement {
            tower: tower.clone(),
            coords: vec![tower.k_zero(); tower.degree()],
        }
    }

    pub fn one(tower: &Arc<Tower>) -> Self {
        Self::from_k(tower, tower.k_one())
    }

    pub fn from_k(tower: &Arc<Tower>, c: RatFunc) -> Self {
        let mut z = Self::zero(tower);
        z.coords[0] = c;
        z
    }

    pub fn from_coords(tower: &Arc<Tower>, coords: Vec<RatFunc>) -> Result<Self, TowerError> {
        if coords.len() != tower.degree()
            || coords
                .iter()
                .any(|c| c.modulus() != tower.modulus() || c.nvars() != tower.nvars())
        {
            return Err(TowerError::SpecMismatch);
        }
        Ok(TowerElement {
            tower: tower.clone(),
            coords,
        })
    }

    /// The basis monomial with index `idx`.
    pub fn basis(tower: &Arc<Tower>, idx: usize) -> Self {
        let mut z = Self::zero(tower);
        z.coords[idx] = tower.k_one();
        z
    }

    /// α₀ (or 1 when the tower has no separable factor).
    pub fn sep_generator(tower: &Arc<Tower>) -> Self {
        if tower.d0() > 1 {
            Self::basis(tower, 1)
        } else {
            let mut z = Self::zero(tower);
            z.coords[0] = tower.sep_power(1)[0].clone();
            if !tower.has_sep() {
                z.coords[0] = tower.k_one();
            }
            z
        }
    }

    /// αᵢ for 1-based `i`.
    pub fn insep_generator(tower: &Arc<Tower>, i: usize) -> Self {
        let mut js = vec![0u32; tower.insep().len()];
        let gen = &tower.insep()[i - 1];
        if gen.order > 1 {
            js[i - 1] = 1;
            Self::basis(tower, tower.join_index(0, &js))
        } else {
            Self::from_k(tower, gen.value.clone())
        }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn coords(&self) -> &[RatFunc] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<RatFunc> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The element as a member of K, if it lies there.
    pub fn as_k(&self) -> Option<&RatFunc> {
        self.coords[1..]
            .iter()
            .all(|c| c.is_zero())
            .then_some(&self.coords[0])
    }

    pub fn same_tower(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower)
    }

    fn zip(&self, other: &Self, f: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> Self {
        assert!(self.same_tower(other), "elements of different towers");
        TowerElement {
            tower: self.tower.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map_coords(|c| c.neg())
    }

    pub fn scale_k(&self, c: &RatFunc) -> Self {
        if c.is_one() {
            return self.clone();
        }
        self.map_coords(|x| x.mul(c))
    }

    fn map_coords(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Self {
        TowerElement {
            tower: self.tower.clone(),
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.same_tower(other), "elements of different towers");
        let t = &self.tower;
        let d0 = t.d0();
        // Multiply numerators over the common denominators and reduce each
        // coordinate once at the end.
        let (xs, dx) = self.cleared_coords();
        let (ys, dy) = other.cleared_coords();
        let mut out: Vec<FractionSum> = (0..t.degree()).map(|_| FractionSum::new(t.modulus(), t.nvars())).collect();
        let den = dx.mul(&dy);
        let split: Vec<_> = (0..t.degree()).map(|i| t.split_index(i)).collect();
        let mut js = vec![0u32; t.insep().len()];
        for (i, x) in xs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in ys.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (a0, ref ai) = split[i];
                let (b0, ref bi) = split[j];
                let mut c = (x.mul(y), den.clone());
                for (k, g) in t.insep().iter().enumerate() {
                    let s = (ai[k] + bi[k]) as usize;
                    if s >= g.order {
                        c = scale_fraction(c, &g.value);
                        js[k] = (s - g.order) as u32;
                    } else {
                        js[k] = s as u32;
                    }
                }
                let base = t.join_index(0, &js);
                if d0 == 1 {
                    out[base].add_fraction(c.0, c.1);
                    continue;
                }
                for (k0, v) in t.sep_power(a0 + b0).iter().enumerate() {
                    if !v.is_zero() {
                        let (num, den) = scale_fraction(c.clone(), v);
                        out[base + k0].add_fraction(num, den);
                    }
                }
            }
        }
        TowerElement {
            tower: t.clone(),
            coords: out.into_iter().map(FractionSum::finish).collect(),
        }
    }

    /// Polynomial coordinates and a common denominator D with x = X/D.
    fn cleared_coords(&self) -> (Vec<MultiPoly>, MultiPoly) {
        let t = &self.tower;
        let mut den = MultiPoly::one(t.modulus(), t.nvars());
        for c in &self.coords {
            if !c.is_zero() && !c.den().is_one() {
                let g = poly_gcd(&den, c.den()).expect("denominators are nonzero");
                den = den.div_exact(&g).expect("gcd divides").mul(c.den());
            }
        }
        let nums = self
            .coords
            .iter()
            .map(|c| {
                if c.den() == &den {
                    c.num().clone()
                } else {
                    c.num().mul(&den.div_exact(c.den()).expect("common multiple"))
                }
            })
            .collect();
        (nums, den)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.tower);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Matrix of multiplication by `self` in the monomial basis
    /// (column j holds the coordinates of `self · b_j`).
    pub fn mul_matrix(&self) -> Vec<Vec<RatFunc>> {
        let t = &self.tower;
        let n = t.degree();
        let cols: Vec<Vec<RatFunc>> = (0..n)
            .map(|j| self.mul(&Self::basis(t, j)).coords)
            .collect();
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    pub fn inverse(&self) -> Result<Self, TowerError> {
        let one = Self::one(&self.tower);
        Ok(Self::div_all(std::slice::from_ref(&one), self)?.remove(0))
    }

    /// Every `a/b` for `a` in `items`. With b = B/D for polynomial
    /// coordinates B, a/b = a·D·B^(q−1) / B^q where q = p^e; the q-th
    /// power lies in K(α₀), and each quotient coordinate is reduced once.
    pub fn div_all(items: &[Self], b: &Self) -> Result<Vec<Self>, TowerError> {
        if b.is_zero() {
            return Err(TowerError::ZeroInverse);
        }
        if let Some(c) = b.as_k() {
            let inv = c.inv()?;
            return Ok(items.iter().map(|a| a.scale_k(&inv)).collect());
        }
        let t = &b.tower;
        let (nums, den) = b.cleared_coords();
        let cleared = TowerElement {
            tower: t.clone(),
            coords: nums.into_iter().map(RatFunc::from_poly).collect(),
        };
        let q = (t.p() as u64).pow(t.exponent());
        let mut shift = cleared.pow(q - 1);
        let norm = cleared.mul(&shift);
        let norm = match norm.as_k() {
            Some(n) => n.clone(),
            None => {
                shift = shift.mul(&norm.separable_inverse());
                t.k_one()
            }
        };
        Ok(items
            .iter()
            .map(|a| {
                let (anums, aden) = a.cleared_coords();
                let lifted = TowerElement {
                    tower: t.clone(),
                    coords: anums.into_iter().map(RatFunc::from_poly).collect(),
                };
                let coords = lifted
                    .mul(&shift)
                    .coords
                    .into_iter()
                    .map(|c| {
                        let mut q = FractionSum::new(t.modulus(), t.nvars());
                        q.add_fraction(c.num().mul(&den).mul(norm.den()), c.den().mul(&aden).mul(norm.num()));
                        q.finish()
                    })
                    .collect();
                TowerElement {
                    tower: t.clone(),
                    coords,
                }
            })
            .collect())
    }

    /// Inverse of a nonzero element of K(α₀).
    fn separable_inverse(&self) -> Self {
        let t = &self.tower;
        if let Some(c) = self.as_k() {
            return Self::from_k(t, c.inv().expect("nonzero"));
        }
        let d0 = t.d0();
        debug_assert!(self.coords[d0..].iter().all(|c| c.is_zero()));
        let cols: Vec<Vec<RatFunc>> = (0..d0)
            .map(|j| self.mul(&Self::basis(t, j)).coords[..d0].to_vec())
            .collect();
        let m: Vec<Vec<RatFunc>> = (0..d0)
            .map(|i| (0..d0).map(|j| cols[j][i].clone()).collect())
            .collect();
        let mut rhs = vec![t.k_zero(); d0];
        rhs[0] = t.k_one();
        let sol = k_solve(&m, &rhs, &t.k_zero()).expect("nonzero elements of a field are invertible");
        let mut coords = vec![t.k_zero(); t.degree()];
        coords[..d0].clone_from_slice(&sol);
        TowerElement {
            tower: t.clone(),
            coords,
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, TowerError> {
        Ok(Self::div_all(std::slice::from_ref(self), other)?.remove(0))
    }

    /// Applies the automorphism `g` of K(α₀), extended to L by fixing every αᵢ.
    pub fn apply_sep_auto(&self, g: usize) -> Self {
        let t = &self.tower;
        if g == t.group().identity() {
            return self.clone();
        }
        let d0 = t.d0();
        let mut out = vec![t.k_zero(); t.degree()];
        for (i, x) in self.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let j0 = i % d0;
            let base = i - j0;
            for (k, v) in t.auto_power(g, j0).iter().enumerate() {
                if !v.is_zero() {
                    out[base + k] = out[base + k].add(&x.mul(v));
                }
            }
        }
        TowerElement {
            tower: t.clone(),
            coords: out,
        }
    }

    /// x^p, computed coordinatewise as Σ c_j^p · b_j^p.
    pub fn frobenius(&self) -> Self {
        let t = &self.tower;
        let p = t.p() as u64;
        let mut acc = Self::zero(t);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&Self::basis(t, j).pow(p).scale_k(&c.pow(p)));
        }
        acc
    }

    /// Renders with the tower's variable names; round-trips through the
    /// expression parser.
    pub fn render(&self) -> String {
        let t = &self.tower;
        let names = t.base_vars();
        let mut parts = Vec::new();
        for (i, c) in self.coords.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = t.monomial_name(i);
            let coeff = c.render(names);
            let coeff_atomic = c.den().is_one() && c.num().num_terms() == 1;
            let coeff = if coeff_atomic || mono == "1" {
                coeff
            } else {
                format!("({})", coeff)
            };
            parts.push(if mono == "1" {
                coeff
            } else if c.is_one() {
                mono
            } else {
                format!("{}*{}", coeff, mono)
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) && self.coords == other.coords
    }
}

impl Eq for TowerElement {}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TowerElement({})", self.render())
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Scalar for TowerElement {
    fn is_zero(&self) -> bool {
        TowerElement::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Self::zero(&self.tower)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.tower)
    }
    fn add(&self, other: &Self) -> Self {
        TowerElement::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        TowerElement::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        TowerElement::mul(self, other)
    }
    fn neg(&self) -> Self {
        TowerElement::neg(self)
    }
    fn inverse(&self) -> Self {
        TowerElement::inverse(self).expect("pivot is nonzero")
    }
}

fn scale_fraction((num, den): (MultiPoly, MultiPoly), c: &RatFunc) -> (MultiPoly, MultiPoly) {
    let den = if c.den().is_one() { den } else { den.mul(c.den()) };
    (num.mul(c.num()), den)
}
