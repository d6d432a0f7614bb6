use std::fmt;

use super::gcd::poly_gcd;
use super::modulus::PrimeModulus;
use super::mpoly::MultiPoly;
use crate::error::FieldError;

/// Element of K = F_p(t₁,…,t_r) as a reduced fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn zero(modulus: PrimeModulus, nvars: usize) -> Self {
        RatFunc {
            num: MultiPoly::zero(modulus, nvars),
            den: MultiPoly::one(modulus, nvars),
        }
    }

    pub fn one(modulus: PrimeModulus, nvars: usize) -> Self {
        Self::constant(modulus, nvars, 1)
    }

    pub fn constant(modulus: PrimeModulus, nvars: usize, c: i64) -> Self {
        RatFunc {
            num: MultiPoly::constant(modulus, nvars, c),
            den: MultiPoly::one(modulus, nvars),
        }
    }

    pub fn var(modulus: PrimeModulus, nvars: usize, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(modulus, nvars, i))
    }

    pub fn from_poly(num: MultiPoly) -> Self {
        let den = MultiPoly::one(num.modulus(), num.nvars());
        RatFunc { num, den }
    }

    /// Builds `num/den` in lowest terms.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.modulus() != den.modulus() || num.nvars() != den.nvars() {
            return Err(FieldError::ContextMismatch);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::zero(num.modulus(), num.nvars());
        }
        let (num, den) = if den.as_constant().is_some() {
            (num, den)
        } else {
            let g = poly_gcd(&num, &den).expect("den nonzero");
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        Self::normalize_lc(num, den)
    }

    fn normalize_lc(num: MultiPoly, den: MultiPoly) -> Self {
        let lc = den.leading().map(|(_, c)| c).unwrap();
        if lc == 1 {
            RatFunc { num, den }
        } else {
            let inv = num.modulus().inv(lc);
            RatFunc {
                num: num.scale(inv),
                den: den.scale(inv),
            }
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.num.modulus()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<u32> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(self.modulus(), self.nvars())
    }

    pub fn one_like(&self) -> Self {
        Self::one(self.modulus(), self.nvars())
    }

    pub fn from_fp_like(&self, c: u32) -> Self {
        Self::constant(self.modulus(), self.nvars(), c as i64)
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return RatFunc {
                    num,
                    den: self.den.clone(),
                };
            }
            return Self::reduced(num, self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::reduced(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        if c.is_multiple_of(self.modulus().get()) {
            return self.zero_like();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return self.zero_like();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(c);
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // Cross-cancel: gcd(a, d) and gcd(c, b) for (a/b)(c/d).
        let g1 = poly_gcd(&self.num, &other.den).unwrap();
        let g2 = poly_gcd(&other.num, &self.den).unwrap();
        let a = self.num.div_exact(&g1).unwrap();
        let d = other.den.div_exact(&g1).unwrap();
        let c = other.num.div_exact(&g2).unwrap();
        let b = self.den.div_exact(&g2).unwrap();
        Self::normalize_lc(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::normalize_lc(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        // Powers of coprime polynomials stay coprime.
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Renders as `num` or `(num)/(den)` with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let num = self.num.render(names);
        if self.den.is_one() {
            return num;
        }
        let wrap = |s: String, poly: &MultiPoly| {
            if poly.num_terms() > 1 || s.contains('*') {
                format!("({})", s)
            } else {
                s
            }
        };
        format!(
            "{}/{}",
            wrap(num, &self.num),
            wrap(self.den.render(names), &self.den)
        )
    }

    /// `c` with `c^p = self` when `self ∈ K^p`.
    pub fn pth_root(&self) -> Option<Self> {
        let p = self.modulus().get();
        let num = self.num.deflate(p)?;
        let den = self.den.deflate(p)?;
        // Coefficients of F_p are their own p-th powers; lowest terms persist.
        Some(Self::normalize_lc(num, den))
    }

    /// Coordinates of `self` over K^p in the basis {t^u : 0 ≤ u_v < p},
    /// returned as their p-th roots: `self = Σ_u t^u · c_u^p`.
    pub fn frobenius_coordinates(&self) -> Vec<(super::mpoly::Monomial, RatFunc)> {
        let p = self.modulus().get();
        // self = num·den^{p-1} / den^p
        let lifted = self.num.mul(&self.den.pow((p - 1) as u64));
        lifted
            .split_residues(p)
            .into_iter()
            .map(|(u, part)| (u, Self::reduced(part, self.den.clone())))
            .collect()
    }
}

/// Sum of fractions kept unreduced until [`FractionSum::finish`]; terms
/// over the same denominator add as polynomials.
pub struct FractionSum {
    num: MultiPoly,
    den: MultiPoly,
}

impl FractionSum {
    pub fn new(modulus: PrimeModulus, nvars: usize) -> Self {
        FractionSum {
            num: MultiPoly::zero(modulus, nvars),
            den: MultiPoly::one(modulus, nvars),
        }
    }

    pub fn add_fraction(&mut self, num: MultiPoly, den: MultiPoly) {
        if num.is_zero() {
            return;
        }
        if self.num.is_zero() {
            self.num = num;
            self.den = den;
        } else if self.den == den {
            self.num = self.num.add(&num);
        } else if den.is_one() {
            self.num = self.num.add(&num.mul(&self.den));
        } else if self.den.is_one() {
            self.num = self.num.mul(&den).add(&num);
            self.den = den;
        } else {
            let g = poly_gcd(&self.den, &den).expect("denominators are nonzero");
            let mine = den.div_exact(&g).expect("gcd divides");
            let theirs = self.den.div_exact(&g).expect("gcd divides");
            self.num = self.num.mul(&mine).add(&num.mul(&theirs));
            self.den = self.den.mul(&mine);
        }
    }

    pub fn add_product(&mut self, a: &RatFunc, b: &RatFunc) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        self.add_fraction(a.num.mul(&b.num), a.den.mul(&b.den));
    }

    pub fn finish(self) -> RatFunc {
        RatFunc::reduced(self.num, self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&MultiPoly::default_names(self.nvars())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn add_in_char_two_vanishes() {
        let t = RatFunc::var(ctx(2), 1, 0);
        assert!(t.add(&t).is_zero());
    }

    #[test]
    fn cancellation_on_multiply() {
        let m = ctx(2);
        let t = RatFunc::var(m, 1, 0);
        let tp1 = t.add(&RatFunc::one(m, 1));
        let x = t.div(&tp1).unwrap();
        assert_eq!(x.mul(&tp1), t);
    }

    #[test]
    fn reciprocal_already_reduced() {
        let m = ctx(3);
        let s = RatFunc::var(m, 2, 0);
        let t = RatFunc::var(m, 2, 1);
        let r = RatFunc::one(m, 2).div(&s.add(&t)).unwrap();
        assert!(r.num().is_one());
        assert_eq!(r.den(), s.add(&t).num());
    }

    #[test]
    fn division_by_zero_reported() {
        let m = ctx(5);
        let one = RatFunc::one(m, 1);
        assert_eq!(
            one.div(&RatFunc::zero(m, 1)),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn pth_roots() {
        let m = ctx(2);
        let s = RatFunc::var(m, 2, 0);
        let t = RatFunc::var(m, 2, 1);
        let x = t.pow(2).div(&s.pow(2)).unwrap();
        assert_eq!(x.pth_root(), Some(t.div(&s).unwrap()));
        assert_eq!(t.pth_root(), None);

        let m3 = ctx(3);
        let s3 = RatFunc::var(m3, 2, 0);
        let t3 = RatFunc::var(m3, 2, 1);
        let cube = s3.pow(3).add(&t3.pow(3));
        assert_eq!(cube.pth_root(), Some(s3.add(&t3)));
    }

    #[test]
    fn frobenius_coordinates_recombine() {
        let m = ctx(3);
        let t = RatFunc::var(m, 1, 0);
        let x = t
            .pow(4)
            .add(&t.scale(2))
            .div(&t.add(&RatFunc::one(m, 1)))
            .unwrap();
        let mut acc = RatFunc::zero(m, 1);
        for (u, c) in x.frobenius_coordinates() {
            let tu = RatFunc::from_poly(MultiPoly::monomial(m, u, 1));
            acc = acc.add(&tu.mul(&c.pow(3)));
        }
        assert_eq!(acc, x);
    }
}
