//! The truncated polynomial ring L[X̄] = L[X]/(X^{p^e}).

use std::fmt;
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::field::RatFunc;
use crate::tower::{Tower, TowerElement};

/// Element of L[X̄] stored as exactly p^e coefficients, index k for X̄^k.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncElement {
    coeffs: Vec<TowerElement>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic on two truncated elements.
pub fn trunc_arith(op: TruncOp, x: &TruncElement, y: &TruncElement) -> Result<TruncElement, AlgebraError> {
    if !Arc::ptr_eq(x.tower(), y.tower()) {
        return Err(AlgebraError::SpecMismatch);
    }
    Ok(match op {
        TruncOp::Add => x.add(y),
        TruncOp::Sub => x.sub(y),
        TruncOp::Mul => x.mul(y),
    })
}

impl TruncElement {
    pub fn zero(tower: &Arc<Tower>) -> Self {
        TruncElement {
            coeffs: vec![TowerElement::zero(tower); tower.truncation()],
        }
    }

    pub fn one(tower: &Arc<Tower>) -> Self {
        Self::constant(TowerElement::one(tower))
    }

    pub fn constant(c: TowerElement) -> Self {
        let mut z = Self::zero(c.tower());
        z.coeffs[0] = c;
        z
    }

    /// X̄^k (zero once k reaches p^e).
    pub fn xbar_pow(tower: &Arc<Tower>, k: usize) -> Self {
        let mut z = Self::zero(tower);
        if k < z.coeffs.len() {
            z.coeffs[k] = TowerElement::one(tower);
        }
        z
    }

    /// Pads with zeros up to p^e; fails if a coefficient past the
    /// truncation is nonzero or the towers differ.
    pub fn from_coeffs(tower: &Arc<Tower>, mut coeffs: Vec<TowerElement>) -> Result<Self, AlgebraError> {
        let n = tower.truncation();
        if coeffs.iter().any(|c| !Arc::ptr_eq(c.tower(), tower)) {
            return Err(AlgebraError::SpecMismatch);
        }
        if coeffs.len() > n {
            if coeffs[n..].iter().any(|c| !c.is_zero()) {
                return Err(AlgebraError::SpecMismatch);
            }
            coeffs.truncate(n);
        }
        coeffs.resize(n, TowerElement::zero(tower));
        Ok(TruncElement { coeffs })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        self.coeffs[0].tower()
    }

    pub fn coeffs(&self) -> &[TowerElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &TowerElement {
        &self.coeffs[k]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        TruncElement {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        TruncElement {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncElement {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = Self::zero(self.tower());
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &TowerElement) -> Self {
        TruncElement {
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn scale_k(&self, c: &RatFunc) -> Self {
        TruncElement {
            coeffs: self.coeffs.iter().map(|x| x.scale_k(c)).collect(),
        }
    }

    /// Multiplies by X̄^k.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let zero = TowerElement::zero(self.tower());
        TruncElement {
            coeffs: (0..n)
                .map(|i| if i >= k { self.coeffs[i - k].clone() } else { zero.clone() })
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.tower());
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

    /// Inverse via c₀⁻¹ Σ (−n)^k where self = c₀(1 + n) with n nilpotent.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(AlgebraError::NotAUnit);
        }
        let c0_inv = c0.inverse()?;
        let unipotent = self.scale(&c0_inv);
        let neg_nil = Self::one(self.tower()).sub(&unipotent);
        let mut sum = Self::one(self.tower());
        let mut term = Self::one(self.tower());
        for _ in 1..self.coeffs.len() {
            term = term.mul(&neg_nil);
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        Ok(sum.scale(&c0_inv))
    }

    /// Least k with a nonzero X̄^k coefficient; `None` stands for ∞.
    pub fn xbar_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Reduction modulo X̄.
    pub fn closed_fiber(&self) -> TowerElement {
        self.coeffs[0].clone()
    }

    /// True when every coefficient lies in K.
    pub fn is_k_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_k().is_some())
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let xb = match k {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{}", k),
            };
            let body = c.render();
            parts.push(if k == 0 {
                body
            } else if c.is_one() {
                xb
            } else if c.coords().iter().filter(|x| !x.is_zero()).count() == 1 && !body.contains(" + ") {
                format!("{}*{}", body, xb)
            } else {
                format!("({})*{}", body, xb)
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Debug for TruncElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncElement({})", self.render())
    }
}

impl fmt::Display for TruncElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
