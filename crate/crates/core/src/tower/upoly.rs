//! Dense univariate polynomials over K, coefficients low to high.

use crate::field::RatFunc;

pub type UPolyK = Vec<RatFunc>;

pub fn trim(mut p: UPolyK) -> UPolyK {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree(p: &[RatFunc]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn rem(a: &[RatFunc], b: &[RatFunc]) -> UPolyK {
    let db = degree(b).expect("nonzero divisor");
    let lead_inv = b[db].inv().unwrap();
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let q = r[dr].mul(&lead_inv);
        for i in 0..=db {
            r[dr - db + i] = r[dr - db + i].sub(&q.mul(&b[i]));
        }
        r = trim(r);
    }
    r
}

pub fn monic(p: &[RatFunc]) -> UPolyK {
    match degree(p) {
        None => Vec::new(),
        Some(d) => {
            let inv = p[d].inv().unwrap();
            p[..=d].iter().map(|c| c.mul(&inv)).collect()
        }
    }
}

pub fn gcd(a: &[RatFunc], b: &[RatFunc]) -> UPolyK {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while degree(&y).is_some() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

pub fn derivative(p: &[RatFunc]) -> UPolyK {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale((i as u32) % c.modulus().get()))
            .collect(),
    )
}
