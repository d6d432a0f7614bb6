//! The fixed decomposition L = K(α₀) ⊗ K(α₁) ⊗ … ⊗ K(αₘ) with α₀ separable
//! and αᵢ^{p^{nᵢ}} = aᵢ ∈ K, and exact arithmetic in L.
//!
//! Elements of L are dense coordinate vectors over the monomial basis
//! α₀^{j₀}α₁^{j₁}…αₘ^{jₘ}, indexed as `j₀ + d₀·(j₁ + p^{n₁}·(j₂ + …))`.

mod element;
pub mod irreducible;
mod pth_root;
pub mod samples;
pub mod upoly;

use std::sync::Arc;

pub use element::TowerElement;
pub use pth_root::tower_pth_root;

use crate::error::TowerError;
use crate::field::{PrimeModulus, RatFunc};
use crate::report::ValidationReport;
use irreducible::{check_irreducible, Irreducibility};

/// Separable factor K(α₀) together with its automorphism group, each
/// automorphism given by the image of α₀ as a polynomial in α₀.
#[derive(Clone, Debug)]
pub struct SepSpec {
    pub name: String,
    /// Coefficients low to high; need not be monic.
    pub minpoly: Vec<RatFunc>,
    pub autos: Vec<(String, Vec<RatFunc>)>,
}

#[derive(Clone, Debug)]
pub struct InsepSpec {
    pub name: String,
    pub n: u32,
    pub value: RatFunc,
}

/// Unvalidated description of a tower.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    pub modulus: PrimeModulus,
    pub base_vars: Vec<String>,
    pub sep: Option<SepSpec>,
    pub insep: Vec<InsepSpec>,
    pub trust_irreducible: bool,
}

/// The automorphism group G of K(α₀)/K (trivial when there is no separable
/// factor).
#[derive(Clone, Debug)]
pub struct Group {
    names: Vec<String>,
    /// g(α₀)^j in the basis of K(α₀), for j < d₀.
    powers: Vec<Vec<Vec<RatFunc>>>,
    compose: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
}

impl Group {
    pub fn order(&self) -> usize {
        self.names.len()
    }
    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
    /// Index of g∘h.
    pub fn compose(&self, g: usize, h: usize) -> usize {
        self.compose[g][h]
    }
    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }
}

#[derive(Clone, Debug)]
pub struct InsepGen {
    pub name: String,
    pub n: u32,
    pub value: RatFunc,
    /// p^n, the degree of K(αᵢ)/K.
    pub order: usize,
}

#[derive(Debug)]
pub struct Tower {
    modulus: PrimeModulus,
    base_vars: Vec<String>,
    sep_name: Option<String>,
    /// Monic minimal polynomial of α₀, low to high (`x` when absent).
    minpoly: Vec<RatFunc>,
    d0: usize,
    insep: Vec<InsepGen>,
    exponent: u32,
    degree: usize,
    /// α₀^k in the basis of K(α₀), k < 2d₀ - 1.
    sep_powers: Vec<Vec<RatFunc>>,
    group: Group,
    trusted_irreducible: bool,
}

impl Tower {
    pub fn new(spec: &TowerSpec) -> Result<Arc<Tower>, TowerError> {
        let (_, res) = validate_tower(spec);
        res
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }
    pub fn p(&self) -> u32 {
        self.modulus.get()
    }
    pub fn nvars(&self) -> usize {
        self.base_vars.len()
    }
    pub fn base_vars(&self) -> &[String] {
        &self.base_vars
    }
    pub fn sep_name(&self) -> Option<&str> {
        self.sep_name.as_deref()
    }
    pub fn has_sep(&self) -> bool {
        self.sep_name.is_some()
    }
    pub fn minpoly(&self) -> &[RatFunc] {
        &self.minpoly
    }
    pub fn d0(&self) -> usize {
        self.d0
    }
    pub fn insep(&self) -> &[InsepGen] {
        &self.insep
    }
    /// Exponent e = max nᵢ.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }
    /// [L:K].
    pub fn degree(&self) -> usize {
        self.degree
    }
    /// p^e, the length of truncated coefficient lists.
    pub fn truncation(&self) -> usize {
        (self.p() as usize).pow(self.exponent)
    }
    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn trusted_irreducible(&self) -> bool {
        self.trusted_irreducible
    }

    pub fn k_zero(&self) -> RatFunc {
        RatFunc::zero(self.modulus, self.nvars())
    }
    pub fn k_one(&self) -> RatFunc {
        RatFunc::one(self.modulus, self.nvars())
    }

    /// Number of monomials in the purely inseparable part.
    pub fn insep_size(&self) -> usize {
        self.degree / self.d0
    }

    pub fn split_index(&self, idx: usize) -> (usize, Vec<u32>) {
        let j0 = idx % self.d0;
        let mut rest = idx / self.d0;
        let mut js = Vec::with_capacity(self.insep.len());
        for g in &self.insep {
            js.push((rest % g.order) as u32);
            rest /= g.order;
        }
        (j0, js)
    }

    pub fn join_index(&self, j0: usize, js: &[u32]) -> usize {
        let mut idx = 0;
        for (g, &j) in self.insep.iter().zip(js).rev() {
            idx = idx * g.order + j as usize;
        }
        j0 + self.d0 * idx
    }

    pub(crate) fn sep_power(&self, k: usize) -> &[RatFunc] {
        &self.sep_powers[k]
    }

    pub(crate) fn auto_power(&self, g: usize, j: usize) -> &[RatFunc] {
        &self.group.powers[g][j]
    }

    /// Human-readable name of basis monomial `idx`.
    pub fn monomial_name(&self, idx: usize) -> String {
        let (j0, js) = self.split_index(idx);
        let mut parts = Vec::new();
        if let Some(n) = &self.sep_name {
            push_power(&mut parts, n, j0 as u32);
        }
        for (g, j) in self.insep.iter().zip(js) {
            push_power(&mut parts, &g.name, j);
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Basis indices lying in the subtower K(α₀, α₁, …, α_level).
    pub(crate) fn subtower_indices(&self, level: usize) -> Vec<usize> {
        (0..self.degree)
            .filter(|&idx| self.split_index(idx).1.iter().skip(level).all(|&j| j == 0))
            .collect()
    }
}

fn push_power(parts: &mut Vec<String>, name: &str, e: u32) {
    match e {
        0 => {}
        1 => parts.push(name.to_string()),
        _ => parts.push(format!("{}^{}", name, e)),
    }
}

/// Multiplies two elements of K(α₀) given in its basis.
fn sep_mul(powers: &[Vec<RatFunc>], a: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
    let d0 = a.len();
    let mut out = vec![a[0].zero_like(); d0];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let c = x.mul(y);
            for (k, v) in powers[i + j].iter().enumerate() {
                if !v.is_zero() {
                    out[k] = out[k].add(&c.mul(v));
                }
            }
        }
    }
    out
}

fn reduce_sep(poly: &[RatFunc], minpoly: &[RatFunc], zero: &RatFunc) -> Vec<RatFunc> {
    let d0 = minpoly.len() - 1;
    let mut r = upoly::rem(poly, minpoly);
    r.resize(d0, zero.clone());
    r
}

/// Runs every structural check on `spec`; the tower is returned only when
/// all of them pass.
pub fn validate_tower(spec: &TowerSpec) -> (ValidationReport, Result<Arc<Tower>, TowerError>) {
    let mut report = ValidationReport::new();
    let res = build(spec, &mut report);
    (report, res)
}

fn build(spec: &TowerSpec, report: &mut ValidationReport) -> Result<Arc<Tower>, TowerError> {
    let md = spec.modulus;
    let nv = spec.base_vars.len();
    let zero = RatFunc::zero(md, nv);
    let one = RatFunc::one(md, nv);
    let p = md.get() as usize;

    let mut seen = std::collections::BTreeSet::new();
    let all_names = spec
        .base_vars
        .iter()
        .chain(spec.sep.iter().map(|s| &s.name))
        .chain(spec.insep.iter().map(|g| &g.name));
    for n in all_names {
        if !seen.insert(n.clone()) {
            return Err(TowerError::InvalidSpec(format!("duplicate name {}", n)));
        }
    }
    for g in &spec.insep {
        if g.n == 0 {
            return Err(TowerError::InvalidSpec(format!("{}: n must be ≥ 1", g.name)));
        }
        if g.value.is_zero() {
            return Err(TowerError::InvalidSpec(format!("{}: value must be nonzero", g.name)));
        }
        if g.value.modulus() != md || g.value.nvars() != nv {
            return Err(TowerError::SpecMismatch);
        }
    }

    // Separable factor.
    let (minpoly, sep_name, d0) = match &spec.sep {
        Some(s) => {
            let f = upoly::monic(&s.minpoly);
            if f.len() < 2 {
                return Err(TowerError::InvalidSpec("minimal polynomial must have degree ≥ 1".into()));
            }
            let d = f.len() - 1;
            (f, Some(s.name.clone()), d)
        }
        None => (vec![zero.clone(), one.clone()], None, 1),
    };

    let mut sep_powers: Vec<Vec<RatFunc>> = Vec::with_capacity(2 * d0);
    for k in 0..(2 * d0).max(2) {
        let mut mono = vec![zero.clone(); k + 1];
        mono[k] = one.clone();
        sep_powers.push(reduce_sep(&mono, &minpoly, &zero));
    }

    let mut trusted = false;
    if let Some(s) = &spec.sep {
        let g = upoly::gcd(&minpoly, &upoly::derivative(&minpoly));
        let separable = upoly::degree(&g) == Some(0);
        let gcd_degree = upoly::degree(&g).map_or("-".to_string(), |d| d.to_string());
        report.record("separable", separable, format!("gcd(f, f') has degree {}", gcd_degree));
        if !separable {
            return Err(TowerError::SeparabilityFailure(s.name.clone()));
        }
        match check_irreducible(&minpoly) {
            Ok(Irreducibility::Irreducible) => report.record("irreducible", true, format!("degree {}", d0)),
            Ok(Irreducibility::Reducible(w)) => {
                report.record("irreducible", false, w.clone());
                return Err(TowerError::IrreducibilityFailure(w));
            }
            Err(e) => {
                if spec.trust_irreducible {
                    trusted = true;
                    report.record("irreducible", true, "trusted (trust-irreducible)");
                } else {
                    report.record("irreducible", false, e.to_string());
                    return Err(e);
                }
            }
        }
    }

    // Automorphism group.
    let group = match &spec.sep {
        None => trivial_group(&one),
        Some(s) => {
            let res = build_group(s, &minpoly, &sep_powers, &zero, &one);
            match res {
                Ok(g) => {
                    report.record("automorphism group", true, format!("order {}", g.order()));
                    g
                }
                Err(e) => {
                    report.record("automorphism group", false, e.to_string());
                    return Err(e);
                }
            }
        }
    };

    let insep: Vec<InsepGen> = spec
        .insep
        .iter()
        .map(|g| InsepGen {
            name: g.name.clone(),
            n: g.n,
            value: g.value.clone(),
            order: p.pow(g.n),
        })
        .collect();
    let exponent = insep.iter().map(|g| g.n).max().unwrap_or(0);
    let degree = d0 * insep.iter().map(|g| g.order).product::<usize>();

    let tower = Arc::new(Tower {
        modulus: md,
        base_vars: spec.base_vars.clone(),
        sep_name,
        minpoly,
        d0,
        insep,
        exponent,
        degree,
        sep_powers,
        group,
        trusted_irreducible: trusted,
    });

    // p-independence: aᵢ must not be a p-th power in K(α₀, α₁, …, α_{i-1}).
    for (i, g) in tower.insep.iter().enumerate() {
        let a = TowerElement::from_k(&tower, g.value.clone());
        let root = tower.pth_root_in_subtower(&a, i);
        let ok = root.is_none();
        let detail = match &root {
            None => format!("{} is not a p-th power in the preceding subtower", g.name),
            Some(r) => format!("{} has p-th root {}", g.name, r),
        };
        report.record(format!("p-independence {}", g.name), ok, detail);
        if !ok {
            return Err(TowerError::PIndependenceFailure(i + 1));
        }
    }
    report.record("exponent", true, tower.exponent.to_string());
    report.record("degree", true, tower.degree.to_string());
    Ok(tower)
}

fn trivial_group(one: &RatFunc) -> Group {
    Group {
        names: vec!["id".to_string()],
        powers: vec![vec![vec![one.clone()]]],
        compose: vec![vec![0]],
        inverse: vec![0],
        identity: 0,
    }
}

fn build_group(
    s: &SepSpec,
    minpoly: &[RatFunc],
    sep_powers: &[Vec<RatFunc>],
    zero: &RatFunc,
    one: &RatFunc,
) -> Result<Group, TowerError> {
    let d0 = minpoly.len() - 1;
    let fail = |m: String| TowerError::AutomorphismGroupFailure(m);
    let mut autos = s.autos.clone();
    if autos.is_empty() {
        if d0 > 1 {
            return Err(fail("automorphisms must be listed for a separable factor of degree > 1".into()));
        }
        autos.push(("id".into(), vec![zero.clone(), one.clone()]));
    }
    if autos.len() != d0 {
        return Err(fail(format!("{} automorphisms listed, degree is {}", autos.len(), d0)));
    }
    let images: Vec<Vec<RatFunc>> = autos
        .iter()
        .map(|(_, img)| reduce_sep(img, minpoly, zero))
        .collect();
    let mut powers = Vec::with_capacity(d0);
    for (name, img) in autos.iter().map(|a| &a.0).zip(&images) {
        let mut pw = vec![one.clone()];
        pw.resize(d0, zero.clone());
        let mut table = vec![pw.clone()];
        let mut f_val = vec![zero.clone(); d0];
        for (j, c) in minpoly.iter().enumerate() {
            if j > 0 {
                pw = sep_mul(sep_powers, &pw, img);
            }
            if j > 0 && j < d0 {
                table.push(pw.clone());
            }
            for k in 0..d0 {
                f_val[k] = f_val[k].add(&c.mul(&pw[k]));
            }
        }
        if f_val.iter().any(|c| !c.is_zero()) {
            return Err(fail(format!("{} does not map α₀ to a root of the minimal polynomial", name)));
        }
        powers.push(table);
    }
    for i in 0..d0 {
        for j in 0..i {
            if images[i] == images[j] {
                return Err(fail(format!("{} and {} coincide", autos[i].0, autos[j].0)));
            }
        }
    }
    let mut alpha = vec![zero.clone(); d0];
    if d0 > 1 {
        alpha[1] = one.clone();
    } else {
        alpha = sep_powers[1].clone();
    }
    let identity = images
        .iter()
        .position(|img| *img == alpha)
        .ok_or_else(|| fail("identity automorphism missing".into()))?;
    let mut compose = vec![vec![0; d0]; d0];
    for g in 0..d0 {
        for h in 0..d0 {
            // (g∘h)(α₀) = Σ_j h_j g(α₀)^j
            let mut v = vec![zero.clone(); d0];
            for (j, hj) in images[h].iter().enumerate() {
                if hj.is_zero() {
                    continue;
                }
                for k in 0..d0 {
                    v[k] = v[k].add(&hj.mul(&powers[g][j][k]));
                }
            }
            compose[g][h] = images.iter().position(|img| *img == v).ok_or_else(|| {
                fail(format!("{}∘{} is not in the list", autos[g].0, autos[h].0))
            })?;
        }
    }
    let inverse = (0..d0)
        .map(|g| (0..d0).find(|&h| compose[g][h] == identity).unwrap())
        .collect();
    Ok(Group {
        names: autos.into_iter().map(|a| a.0).collect(),
        powers,
        compose,
        inverse,
        identity,
    })
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    fn k(t: &Arc<Tower>, c: RatFunc) -> TowerElement {
        TowerElement::from_k(t, c)
    }

    #[test]
    fn reference_towers_validate() {
        let t1 = one_insep();
        assert_eq!((t1.exponent(), t1.degree(), t1.truncation()), (1, 2, 2));
        let t2 = two_insep();
        assert_eq!((t2.exponent(), t2.degree(), t2.truncation()), (2, 8, 4));
        let t3 = gaussian_cube_root();
        assert_eq!((t3.exponent(), t3.degree(), t3.group().order()), (1, 6, 2));
    }

    #[test]
    fn dependent_values_rejected() {
        let md = PrimeModulus::new(2).unwrap();
        let t = RatFunc::var(md, 1, 0);
        let one = RatFunc::one(md, 1);
        let tp1 = t.add(&one);
        let spec = TowerSpec {
            modulus: md,
            base_vars: vec!["t".into()],
            sep: None,
            insep: vec![
                InsepSpec { name: "a1".into(), n: 1, value: t.clone() },
                InsepSpec { name: "a2".into(), n: 1, value: t.mul(&tp1).mul(&tp1) },
            ],
            trust_irreducible: false,
        };
        let (report, res) = validate_tower(&spec);
        assert!(matches!(res, Err(TowerError::PIndependenceFailure(2))));
        assert!(!report.passed());
        let spec_k = TowerSpec {
            insep: vec![InsepSpec { name: "a1".into(), n: 1, value: t.mul(&t) }],
            ..spec
        };
        assert!(matches!(Tower::new(&spec_k), Err(TowerError::PIndependenceFailure(1))));
    }

    #[test]
    fn inseparable_minpoly_rejected() {
        let md = PrimeModulus::new(2).unwrap();
        let t = RatFunc::var(md, 1, 0);
        let one = RatFunc::one(md, 1);
        let spec = TowerSpec {
            modulus: md,
            base_vars: vec!["t".into()],
            sep: Some(SepSpec {
                name: "u".into(),
                minpoly: vec![t.clone(), one.zero_like(), one.clone()],
                autos: vec![],
            }),
            insep: vec![],
            trust_irreducible: false,
        };
        assert!(matches!(Tower::new(&spec), Err(TowerError::SeparabilityFailure(_))));
    }

    #[test]
    fn artin_schreier_group() {
        let md = PrimeModulus::new(2).unwrap();
        let t = RatFunc::var(md, 1, 0);
        let one = RatFunc::one(md, 1);
        let z = one.zero_like();
        let spec = TowerSpec {
            modulus: md,
            base_vars: vec!["t".into()],
            sep: Some(SepSpec {
                name: "u".into(),
                minpoly: vec![t.clone(), one.clone(), one.clone()],
                autos: vec![
                    ("id".into(), vec![z.clone(), one.clone()]),
                    ("g".into(), vec![one.clone(), one.clone()]),
                ],
            }),
            insep: vec![],
            trust_irreducible: false,
        };
        let tw = Tower::new(&spec).unwrap();
        let g = tw.group().index_of("g").unwrap();
        assert_eq!(tw.group().compose(g, g), tw.group().identity());
        assert_eq!(tw.group().inverse(g), g);
        let mut bad = spec.clone();
        bad.sep.as_mut().unwrap().autos[1].1 = vec![t.clone(), one.clone()];
        assert!(matches!(Tower::new(&bad), Err(TowerError::AutomorphismGroupFailure(_))));
    }

    #[test]
    fn multiplication_examples() {
        let t1 = one_insep();
        let a = TowerElement::insep_generator(&t1, 1);
        let t = RatFunc::var(t1.modulus(), 1, 0);
        assert_eq!(a.mul(&a), k(&t1, t.clone()));

        let t2 = two_insep();
        let b = TowerElement::insep_generator(&t2, 2);
        let tt = RatFunc::var(t2.modulus(), 2, 1);
        assert_eq!(b.pow(3).mul(&b.pow(2)), b.scale_k(&tt));

        let t3 = gaussian_cube_root();
        let i = TowerElement::sep_generator(&t3);
        assert_eq!(i.mul(&i), k(&t3, RatFunc::constant(t3.modulus(), 1, 2)));
    }

    #[test]
    fn inverse_examples() {
        let t1 = one_insep();
        let a = TowerElement::insep_generator(&t1, 1);
        let t = RatFunc::var(t1.modulus(), 1, 0);
        assert_eq!(a.inverse().unwrap(), a.scale_k(&t.inv().unwrap()));
        assert!(TowerElement::one(&t1).inverse().unwrap().is_one());
        assert!(matches!(TowerElement::zero(&t1).inverse(), Err(TowerError::ZeroInverse)));

        let t3 = gaussian_cube_root();
        let i = TowerElement::sep_generator(&t3);
        assert_eq!(i.inverse().unwrap(), i.scale_k(&RatFunc::constant(t3.modulus(), 1, 2)));
        let x = i.add(&TowerElement::insep_generator(&t3, 1)).add(&TowerElement::one(&t3));
        assert!(x.mul(&x.inverse().unwrap()).is_one());
    }

    #[test]
    fn sep_auto_fixes_insep_part() {
        let t3 = gaussian_cube_root();
        let g = t3.group().index_of("g").unwrap();
        let i = TowerElement::sep_generator(&t3);
        let beta = TowerElement::insep_generator(&t3, 1);
        let x = i.add(&beta);
        let two = RatFunc::constant(t3.modulus(), 1, 2);
        assert_eq!(x.apply_sep_auto(g), i.scale_k(&two).add(&beta));
        assert_eq!(x.apply_sep_auto(t3.group().identity()), x);
    }

    #[test]
    fn pth_root_examples() {
        let t1 = one_insep();
        let t = RatFunc::var(t1.modulus(), 1, 0);
        let a = TowerElement::insep_generator(&t1, 1);
        assert_eq!(tower_pth_root(&k(&t1, t)), Some(a.clone()));
        assert_eq!(tower_pth_root(&a), None);

        let t2 = two_insep();
        let tt = RatFunc::var(t2.modulus(), 2, 1);
        let b = TowerElement::insep_generator(&t2, 2);
        assert_eq!(tower_pth_root(&k(&t2, tt)), Some(b.pow(2)));

        let t3 = gaussian_cube_root();
        let x = TowerElement::sep_generator(&t3).add(&TowerElement::insep_generator(&t3, 1));
        assert_eq!(tower_pth_root(&x.frobenius()), Some(x));
    }

    #[test]
    fn monomial_rendering() {
        let t2 = two_insep();
        let b = TowerElement::insep_generator(&t2, 2);
        let a = TowerElement::insep_generator(&t2, 1);
        assert_eq!(a.mul(&b.pow(3)).render(), "a1*a2^3");
        assert_eq!(a.add(&TowerElement::one(&t2)).render(), "a1 + 1");
    }
}
