use super::*;
use crate::error::AlgebraError;
use crate::tower::samples::{gaussian_cube_root, one_insep, two_insep};

fn t_elem(tower: &Arc<Tower>) -> TowerElement {
    TowerElement::from_k(tower, RatFunc::var(tower.modulus(), tower.nvars(), tower.nvars() - 1))
}

fn gen(tower: &Arc<Tower>, name: &str) -> HGElement {
    canonical_generators(tower)
        .into_iter()
        .find(|g| g.name == name)
        .unwrap()
        .element
}

fn rank_one_derivation(tower: &Arc<Tower>) -> HigherDerivation {
    // d^(1)(α₁^j) = j α₁^{j-1}
    let z = tower.k_zero();
    let mut d1 = vec![vec![z.clone(); 2]; 2];
    d1[0][1] = tower.k_one();
    let d0 = HigherDerivation::trivial(tower, 0).maps()[0].clone();
    HigherDerivation::from_maps(tower, vec![d0, d1]).unwrap()
}

#[test]
fn canonical_generator_images() {
    let t1 = one_insep();
    let gens = canonical_generators(&t1);
    assert_eq!(gens.len(), 1);
    assert_eq!(gens[0].name, "phi1");
    let a = TowerElement::insep_generator(&t1, 1);
    assert_eq!(gens[0].element.image_insep()[0].to_string(), "a1 + X");
    assert_eq!(
        gens[0].element.apply_l(&a),
        TruncElement::constant(a.clone()).add(&TruncElement::xbar_pow(&t1, 1))
    );

    let t2 = two_insep();
    let names: Vec<_> = canonical_generators(&t2).into_iter().map(|g| g.name).collect();
    assert_eq!(names, ["phi1", "phi2"]);
    assert_eq!(gen(&t2, "phi1").image_insep()[0].to_string(), "a1 + X^2");
    assert_eq!(gen(&t2, "phi2").image_insep()[1].to_string(), "a2 + X");

    let t3 = gaussian_cube_root();
    let names: Vec<_> = canonical_generators(&t3).into_iter().map(|g| g.name).collect();
    assert_eq!(names, ["phi_g", "phi1"]);
    assert_eq!(gen(&t3, "phi_g").image_sep().to_string(), "2*i");
}

#[test]
fn base_field_is_fixed() {
    let t1 = one_insep();
    let phi = gen(&t1, "phi1");
    let t = TruncElement::constant(t_elem(&t1));
    assert_eq!(phi.apply(&t), t);
    let kx = t.add(&TruncElement::xbar_pow(&t1, 1));
    assert_eq!(phi.apply(&kx), kx);
}

#[test]
fn composition_examples() {
    let t1 = one_insep();
    let phi = gen(&t1, "phi1");
    assert!(phi.compose(&phi).unwrap().is_identity());
    assert_eq!(phi.compose(&HGElement::identity(&t1)).unwrap(), phi);

    let t3 = gaussian_cube_root();
    let g = gen(&t3, "phi_g");
    assert!(g.compose(&g).unwrap().is_identity());
    let p1 = gen(&t3, "phi1");
    assert_eq!(g.compose(&p1).unwrap(), p1.compose(&g).unwrap());
}

#[test]
fn canonical_generators_have_order_p_and_commute() {
    for tower in [one_insep(), two_insep(), gaussian_cube_root()] {
        let gens = canonical_generators(&tower);
        for a in &gens {
            if a.name.starts_with("phi_") {
                continue;
            }
            assert!(a.element.pow(tower.p() as u64).unwrap().is_identity());
            for b in &gens {
                assert_eq!(
                    a.element.compose(&b.element).unwrap(),
                    b.element.compose(&a.element).unwrap()
                );
            }
        }
    }
}

#[test]
fn delta_examples() {
    let t1 = one_insep();
    let d = rank_one_derivation(&t1);
    let phi = delta(&d).unwrap();
    assert_eq!(phi, gen(&t1, "phi1"));
    assert_eq!(delta_inverse(&phi).unwrap(), d);
    assert!(delta(&HigherDerivation::trivial(&t1, 1)).unwrap().is_identity());
    assert!(delta_inverse(&HGElement::identity(&t1)).unwrap().is_trivial());

    let dd = hd_product(&d, &d).unwrap();
    assert!(dd.is_trivial());
    assert_eq!(hd_product(&d, &HigherDerivation::trivial(&t1, 1)).unwrap(), d);
    assert!(matches!(
        hd_product(&d, &HigherDerivation::trivial(&t1, 2)),
        Err(AlgebraError::RankMismatch(1, 2))
    ));
}

#[test]
fn non_leibniz_family_rejected() {
    // d^(1)(α₁) = 1 and d^(1)(t) = 1, i.e. d^(1)(1) = 1/t.
    let t1 = one_insep();
    let t = RatFunc::var(t1.modulus(), 1, 0);
    let z = t1.k_zero();
    let mut d1 = vec![vec![z.clone(); 2]; 2];
    d1[0][1] = t1.k_one();
    d1[0][0] = t.inv().unwrap();
    let d0 = HigherDerivation::trivial(&t1, 0).maps()[0].clone();
    assert!(matches!(
        HigherDerivation::from_maps(&t1, vec![d0, d1]),
        Err(AlgebraError::NotLeibniz(_))
    ));
}

#[test]
fn not_in_a0_rejected() {
    let t3 = gaussian_cube_root();
    assert!(matches!(delta_inverse(&gen(&t3, "phi_g")), Err(AlgebraError::NotInA0)));
}

#[test]
fn invalid_images_rejected() {
    let t2 = two_insep();
    let a1 = TruncElement::constant(TowerElement::insep_generator(&t2, 1));
    let a2 = TruncElement::constant(TowerElement::insep_generator(&t2, 2));
    let bad = a1.add(&TruncElement::xbar_pow(&t2, 1));
    assert!(matches!(
        HGElement::new(&t2, TowerElement::one(&t2), vec![bad, a2.clone()]),
        Err(AlgebraError::InvalidHgElement(_))
    ));
    assert!(matches!(
        HGElement::new(&t2, TowerElement::one(&t2), vec![a2]),
        Err(AlgebraError::InvalidHgElement(_))
    ));
}

#[test]
fn inverses_round_trip() {
    for tower in [two_insep(), gaussian_cube_root()] {
        for seed in 0..5 {
            let phi = random_hg_element(&tower, seed);
            let inv = phi.inverse().unwrap();
            assert!(phi.compose(&inv).unwrap().is_identity());
            assert!(inv.compose(&phi).unwrap().is_identity());
        }
    }
}

#[test]
fn random_elements_are_deterministic_and_structured() {
    let t2 = two_insep();
    assert_eq!(random_hg_element(&t2, 7), random_hg_element(&t2, 7));
    let phi = random_hg_element(&t2, 11);
    for (i, g) in t2.insep().iter().enumerate() {
        let diff = phi.image_insep()[i].sub(&TruncElement::constant(TowerElement::insep_generator(&t2, i + 1)));
        if let Some(v) = diff.xbar_valuation() {
            assert!(v >= t2.truncation() / g.order);
        }
    }
    for seed in 0..5 {
        let phi = random_a0_element(&t2, seed);
        assert_eq!(delta(&delta_inverse(&phi).unwrap()).unwrap(), phi);
    }
}

#[test]
fn fixed_subfield_examples() {
    let t1 = one_insep();
    let basis = fixed_subfield(&t1, &[gen(&t1, "phi1")]);
    assert_eq!(basis.len(), 1);
    assert!(basis[0].as_k().is_some());
    assert_eq!(fixed_subfield(&t1, &[]).len(), 2);

    let t2 = two_insep();
    let basis = fixed_subfield(&t2, &[gen(&t2, "phi1")]);
    assert_eq!(basis.len(), 4);
    for b in &basis {
        let (_, js) = t2.split_index(b.coords().iter().position(|c| !c.is_zero()).unwrap());
        assert_eq!(js[0], 0);
    }

    for tower in [one_insep(), two_insep(), gaussian_cube_root()] {
        let gens: Vec<_> = canonical_generators(&tower).into_iter().map(|g| g.element).collect();
        let basis = fixed_subfield(&tower, &gens);
        assert_eq!(basis.len(), 1);
        assert!(basis[0].as_k().is_some());
    }
}

#[test]
fn fixed_subring_examples() {
    let t1 = one_insep();
    let phi = gen(&t1, "phi1");
    let fixed = fixed_subring(&t1, std::slice::from_ref(&phi));
    assert!(fixed.len() > t1.truncation());
    let a = TowerElement::insep_generator(&t1, 1);
    let ax = TruncElement::xbar_pow(&t1, 1).scale(&a);
    assert_eq!(phi.apply(&ax), ax);
    assert_eq!(fixed_subring(&t1, &[]).len(), t1.degree() * t1.truncation());

    let t2 = two_insep();
    let gens: Vec<_> = canonical_generators(&t2).into_iter().map(|g| g.element).collect();
    assert!(fixed_subring(&t2, &gens).len() > t2.truncation());
}
