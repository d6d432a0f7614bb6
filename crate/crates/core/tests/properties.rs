//! Randomized algebraic laws, checked with proptest over seeded samples.

mod common;

use common::*;
use descent_kit::cli::expr::{parse_expr, EvalContext, LContext};
use descent_kit::cli::lexer::Pos;
use descent_kit::cli::parse_input;
use descent_kit::descent::{check_subspace, oracle_subspace, SubspaceL};
use descent_kit::field::{poly_gcd, Monomial, MultiPoly, PrimeModulus, RatFunc};
use descent_kit::trunc::TruncElement;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn poly_strategy(p: u32, nvars: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    let md = PrimeModulus::new(p).unwrap();
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), 0..p), 0..5)
        .prop_map(move |terms| MultiPoly::from_terms(md, nvars, terms.into_iter().map(|(e, c)| (Monomial(e), c))))
}

fn nonzero_poly(p: u32, nvars: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    poly_strategy(p, nvars, max_deg).prop_filter("nonzero", |f| !f.is_zero())
}

fn ratfunc_strategy() -> impl Strategy<Value = RatFunc> {
    (poly_strategy(3, 2, 2), nonzero_poly(3, 2, 2)).prop_map(|(n, d)| RatFunc::new(n, d).unwrap())
}

/// Coefficients, lowest degree first, with trailing zeros removed.
fn dense(f: &MultiPoly) -> Vec<u32> {
    let mut out = vec![0; f.total_degree().map_or(0, |d| d as usize + 1)];
    for (m, &c) in f.terms() {
        out[m.0[0] as usize] = c;
    }
    out
}

/// Monic Euclidean gcd of univariate coefficient vectors over F_p.
fn euclid(mut a: Vec<u32>, mut b: Vec<u32>, p: u32) -> Vec<u32> {
    let trim = |v: &mut Vec<u32>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let inv = |x: u32| (1..p).find(|y| x * y % p == 1).unwrap();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let lead = inv(*b.last().unwrap());
        while a.len() >= b.len() {
            let q = a.last().unwrap() * lead % p;
            let shift = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + p - q * c % p) % p;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&l) = a.last() {
        let l = inv(l);
        for c in &mut a {
            *c = *c * l % p;
        }
    }
    a
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn base_field_laws(a in ratfunc_strategy(), b in ratfunc_strategy(), c in ratfunc_strategy()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            prop_assert_eq!(b.mul(&a).div(&a).unwrap(), b);
        }
    }

    #[test]
    fn gcd_divides_and_contains_common_factor(
        f in nonzero_poly(2, 2, 3),
        g in nonzero_poly(2, 2, 3),
        h in nonzero_poly(2, 2, 2),
    ) {
        let (a, b) = (f.mul(&h), g.mul(&h));
        let d = poly_gcd(&a, &b).unwrap();
        prop_assert!(a.div_exact(&d).is_some());
        prop_assert!(b.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&h).is_some());
        let cofactor = d.div_exact(&h).unwrap();
        prop_assert!(f.div_exact(&cofactor).is_some() && g.div_exact(&cofactor).is_some());
    }

    #[test]
    fn univariate_gcd_matches_euclid(f in poly_strategy(5, 1, 6), g in poly_strategy(5, 1, 6), h in nonzero_poly(5, 1, 3)) {
        let (a, b) = (f.mul(&h), g.mul(&h));
        prop_assume!(!a.is_zero() || !b.is_zero());
        let d = poly_gcd(&a, &b).unwrap();
        prop_assert_eq!(dense(&d), euclid(dense(&a), dense(&b), 5));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn tower_field_laws(seed in any::<u64>(), which in 0usize..3) {
        let (_, t) = &towers()[which];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_l(t, &mut r), random_l(t, &mut r), random_l(t, &mut r));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        if !x.is_zero() {
            prop_assert!(x.mul(&x.inverse().unwrap()).is_one());
            prop_assert_eq!(y.div(&x).unwrap().mul(&x), y);
        }
    }

    #[test]
    fn truncated_ring_laws(seed in any::<u64>(), which in 0usize..3) {
        let (_, t) = &towers()[which];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let coeffs = (0..t.truncation()).map(|_| random_l(t, &mut r)).collect();
            TruncElement::from_coeffs(t, coeffs).unwrap()
        };
        let (a, b, c) = (draw(), draw(), draw());
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(TruncElement::xbar_pow(t, 1).pow(t.truncation() as u64).is_zero());
        if let Ok(inv) = a.invert() {
            prop_assert!(a.mul(&inv).is_one());
        } else {
            prop_assert!(a.closed_fiber().is_zero());
        }
    }

    #[test]
    fn rendered_elements_parse_back(seed in any::<u64>(), which in 0usize..3) {
        let (_, t) = &towers()[which];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = random_l(t, &mut r);
        let expr = parse_expr(&x.render(), Pos { line: 1, col: 1 }).unwrap();
        prop_assert_eq!(LContext { tower: t }.eval(&expr).unwrap(), x);
    }

    #[test]
    fn subspace_verdict_matches_oracle(seed in any::<u64>(), which in prop::sample::select(vec![0usize, 2])) {
        let (_, t) = &towers()[which];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let n = r.gen_range(1..=3);
        let d = r.gen_range(1..=n);
        let basis = if r.gen_bool(0.5) {
            let base = independent(d, || k_vector(t, n, &mut r));
            mix(t, &base, &mut r)
        } else {
            independent(d, || l_vector(t, n, &mut r))
        };
        let w = SubspaceL::new(t, n, basis).unwrap();
        let report = check_subspace(n, &w).unwrap();
        prop_assert_eq!(report.is_defined(), oracle_subspace(n, &w).unwrap());
    }

    #[test]
    fn documents_survive_printing(seed in any::<u64>(), n in 1usize..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let t = &towers()[2].1;
        let header = "tower {\n  p 3\n  base t\n  sep i { minpoly \"i^2 + 1\" autos { id \"i\" g \"2*i\" } }\n  insep b { n 1 value \"t\" }\n}\n";
        let entries: Vec<String> = l_vector(t, n, &mut r).iter().map(|x| format!("\"{}\"", x.render())).collect();
        let text = format!(
            "{}task check-subspace {{ dim {} vector ({}) }}\ntask apply {{ gen phi1 element {} }}\n",
            header,
            n,
            entries.join(", "),
            entries[0]
        );
        let doc = parse_input(&text).unwrap();
        let printed = doc.to_string();
        let again = parse_input(&printed).unwrap();
        prop_assert_eq!(&doc, &again);
        prop_assert_eq!(printed, again.to_string());
    }
}
