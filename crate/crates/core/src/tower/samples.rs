//! Small towers used throughout the tests and examples.

use std::sync::Arc;

use super::{InsepSpec, SepSpec, Tower, TowerSpec};
use crate::field::{PrimeModulus, RatFunc};

/// p = 2, K = F₂(t), a1² = t.
pub fn one_insep() -> Arc<Tower> {
    let md = PrimeModulus::new(2).unwrap();
    Tower::new(&TowerSpec {
        modulus: md,
        base_vars: vec!["t".into()],
        sep: None,
        insep: vec![InsepSpec {
            name: "a1".into(),
            n: 1,
            value: RatFunc::var(md, 1, 0),
        }],
        trust_irreducible: false,
    })
    .unwrap()
}

/// p = 2, K = F₂(s, t), a1² = s, a2⁴ = t.
pub fn two_insep() -> Arc<Tower> {
    let md = PrimeModulus::new(2).unwrap();
    Tower::new(&TowerSpec {
        modulus: md,
        base_vars: vec!["s".into(), "t".into()],
        sep: None,
        insep: vec![
            InsepSpec {
                name: "a1".into(),
                n: 1,
                value: RatFunc::var(md, 2, 0),
            },
            InsepSpec {
                name: "a2".into(),
                n: 2,
                value: RatFunc::var(md, 2, 1),
            },
        ],
        trust_irreducible: false,
    })
    .unwrap()
}

/// p = 3, K = F₃(t), i² = −1 with automorphisms id and g: i ↦ 2i, b³ = t.
pub fn gaussian_cube_root() -> Arc<Tower> {
    let md = PrimeModulus::new(3).unwrap();
    let one = RatFunc::one(md, 1);
    let zero = one.zero_like();
    Tower::new(&TowerSpec {
        modulus: md,
        base_vars: vec!["t".into()],
        sep: Some(SepSpec {
            name: "i".into(),
            minpoly: vec![one.clone(), zero.clone(), one.clone()],
            autos: vec![
                ("id".into(), vec![zero.clone(), one.clone()]),
                ("g".into(), vec![zero.clone(), one.scale(2)]),
            ],
        }),
        insep: vec![InsepSpec {
            name: "b".into(),
            n: 1,
            value: RatFunc::var(md, 1, 0),
        }],
        trust_irreducible: false,
    })
    .unwrap()
}
