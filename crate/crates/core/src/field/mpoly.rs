//! Sparse multivariate polynomials over F_p in graded-lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::modulus::PrimeModulus;

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic with the first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    modulus: PrimeModulus,
    nvars: usize,
    terms: BTreeMap<Monomial, u32>,
}

impl MultiPoly {
    pub fn zero(modulus: PrimeModulus, nvars: usize) -> Self {
        MultiPoly {
            modulus,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(modulus: PrimeModulus, nvars: usize, c: i64) -> Self {
        let mut p = Self::zero(modulus, nvars);
        let c = modulus.reduce(c);
        if c != 0 {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(modulus: PrimeModulus, nvars: usize) -> Self {
        Self::constant(modulus, nvars, 1)
    }

    pub fn var(modulus: PrimeModulus, nvars: usize, i: usize) -> Self {
        Self::monomial(modulus, Monomial::var(nvars, i), 1)
    }

    pub fn monomial(modulus: PrimeModulus, m: Monomial, c: u32) -> Self {
        let nvars = m.0.len();
        let mut p = Self::zero(modulus, nvars);
        let c = c % modulus.get();
        if c != 0 {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(
        modulus: PrimeModulus,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, u32)>,
    ) -> Self {
        let mut p = Self::zero(modulus, nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, &c)| m.is_one() && c == 1)
    }

    /// Constant value if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<u32> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, &c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(c)
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &u32)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, u32)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: u32) {
        debug_assert_eq!(m.0.len(), self.nvars);
        let c = c % self.modulus.get();
        if c == 0 {
            return;
        }
        let md = self.modulus;
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = md.add(*v, c);
                if *v == 0 {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (m, &c) in &other.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (m, &c) in &other.terms {
            r.add_term(m.clone(), self.modulus.neg(c));
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(self.modulus.get() - 1)
    }

    pub fn scale(&self, c: u32) -> Self {
        let c = c % self.modulus.get();
        if c == 0 {
            return Self::zero(self.modulus, self.nvars);
        }
        MultiPoly {
            modulus: self.modulus,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, &v)| (m.clone(), self.modulus.mul(v, c)))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: u32) -> Self {
        let c = c % self.modulus.get();
        if c == 0 {
            return Self::zero(self.modulus, self.nvars);
        }
        MultiPoly {
            modulus: self.modulus,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, &v)| (k.mul(m), self.modulus.mul(v, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus, self.nvars);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(c);
        }
        let mut acc: BTreeMap<Monomial, u32> = BTreeMap::new();
        let md = self.modulus;
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                let e = acc.entry(m1.mul(m2)).or_insert(0);
                *e = md.add(*e, md.mul(c1, c2));
            }
        }
        acc.retain(|_, c| *c != 0);
        MultiPoly {
            modulus: md,
            nvars: self.nvars,
            terms: acc,
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.modulus, self.nvars);
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

    /// Scales so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if c != 1 => self.scale(self.modulus.inv(c)),
            _ => self.clone(),
        }
    }

    /// Multivariate division with remainder by a single divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let mut rem = Self::zero(self.modulus, self.nvars);
        let quot = self.divide(divisor, |m, c| {
            rem.terms.insert(m, c);
            true
        });
        (quot.expect("remainder terms are collected"), rem)
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        self.divide(divisor, |_, _| false)
    }

    /// Reduces by `divisor` in place, passing each leading term it cannot
    /// cancel to `on_rem`; stops with `None` when `on_rem` returns false.
    fn divide(&self, divisor: &Self, mut on_rem: impl FnMut(Monomial, u32) -> bool) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let md = self.modulus;
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c)).unwrap();
        let lc_inv = md.inv(lc);
        let mut quot = Self::zero(md, self.nvars);
        let mut work = self.terms.clone();
        while let Some((m, c)) = work.pop_last() {
            if !lm.divides(&m) {
                if !on_rem(m, c) {
                    return None;
                }
                continue;
            }
            let q = lm.quotient(&m);
            let qc = md.mul(c, lc_inv);
            for (dm, &dc) in divisor.terms.iter().rev().skip(1) {
                let key = dm.mul(&q);
                let delta = md.neg(md.mul(dc, qc));
                match work.get_mut(&key) {
                    Some(v) => {
                        *v = md.add(*v, delta);
                        if *v == 0 {
                            work.remove(&key);
                        }
                    }
                    None => {
                        work.insert(key, delta);
                    }
                }
            }
            quot.terms.insert(q, qc);
        }
        Some(quot)
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut r = Self::zero(self.modulus, self.nvars);
        for (m, &c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            r.add_term(m2, self.modulus.mul(c, e % self.modulus.get()));
        }
        r
    }

    /// Coefficients as a polynomial in `var`: degree ↦ coefficient with the
    /// `var` exponent cleared.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let d = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out.entry(d)
                .or_insert_with(|| Self::zero(self.modulus, self.nvars))
                .add_term(m2, c);
        }
        out
    }

    pub fn vars_used(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|m| m.0[v] > 0))
            .collect()
    }

    /// Substitutes `x_i ↦ x_i^k` in every variable (Frobenius on exponents).
    pub fn inflate(&self, k: u32) -> Self {
        MultiPoly {
            modulus: self.modulus,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (Monomial(m.0.iter().map(|e| e * k).collect()), c))
                .collect(),
        }
    }

    /// Inverse of `inflate`: `None` unless every exponent is divisible by `k`.
    pub fn deflate(&self, k: u32) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            if m.0.iter().any(|e| e % k != 0) {
                return None;
            }
            terms.insert(Monomial(m.0.iter().map(|e| e / k).collect()), c);
        }
        Some(MultiPoly {
            modulus: self.modulus,
            nvars: self.nvars,
            terms,
        })
    }

    /// Splits by exponent residues mod `k`: `self = Σ_u x^u · P_u(x^k)`,
    /// returning `u ↦ P_u` (deflated).
    pub fn split_residues(&self, k: u32) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let res = Monomial(m.0.iter().map(|e| e % k).collect());
            let quo = Monomial(m.0.iter().map(|e| e / k).collect());
            out.entry(res)
                .or_insert_with(|| Self::zero(self.modulus, self.nvars))
                .add_term(quo, c);
        }
        out
    }

    /// Renders with the given variable names, terms in decreasing grlex order.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, &c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            if factors.is_empty() {
                parts.push(c.to_string());
            } else if c == 1 {
                parts.push(factors.join("*"));
            } else {
                parts.push(format!("{}*{}", c, factors.join("*")));
            }
        }
        parts.join(" + ")
    }

    pub(crate) fn default_names(nvars: usize) -> Vec<String> {
        if nvars == 1 {
            vec!["t".to_string()]
        } else {
            (1..=nvars).map(|i| format!("t{}", i)).collect()
        }
    }

    /// Evaluates with every variable replaced by a value of some ring `T`.
    pub fn eval_with<T: Clone>(
        &self,
        zero: T,
        values: &[T],
        from_fp: impl Fn(u32) -> T,
        add: impl Fn(&T, &T) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        let mut acc = zero;
        for (m, &c) in &self.terms {
            let mut t = from_fp(c);
            for (v, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = mul(&t, &values[v]);
                }
            }
            acc = add(&acc, &t);
        }
        acc
    }
}

impl std::fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render(&Self::default_names(self.nvars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> PrimeModulus {
        PrimeModulus::new(2).unwrap()
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(b > a);
        assert!(a > c);
    }

    #[test]
    fn exact_division() {
        let m = p2();
        let t = MultiPoly::var(m, 1, 0);
        let one = MultiPoly::one(m, 1);
        let tp1 = t.add(&one);
        let sq = tp1.mul(&tp1);
        assert_eq!(sq.div_exact(&tp1), Some(tp1.clone()));
        assert_eq!(sq.div_exact(&t), None);
    }

    #[test]
    fn char_two_square_is_additive() {
        let m = p2();
        let s = MultiPoly::var(m, 2, 0);
        let t = MultiPoly::var(m, 2, 1);
        let lhs = s.add(&t).pow(2);
        assert_eq!(lhs, s.pow(2).add(&t.pow(2)));
    }
}
