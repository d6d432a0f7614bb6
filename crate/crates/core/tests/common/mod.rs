//! Random objects and independent checks shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use descent_kit::cli::{execute, Command, Options};
use descent_kit::field::RatFunc;
use descent_kit::hg::{canonical_generators, random_tower_element};
use descent_kit::descent::l_rank as span_rank;
use descent_kit::linalg::k_rank;
use descent_kit::tower::samples::{gaussian_cube_root, one_insep, two_insep};
use descent_kit::tower::{Tower, TowerElement};
use descent_kit::trunc::TruncElement;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn towers() -> Vec<(&'static str, Arc<Tower>)> {
    vec![("T1", one_insep()), ("T2", two_insep()), ("T3", gaussian_cube_root())]
}

/// Random element of K: a ratio of low-degree polynomials.
pub fn random_k(tower: &Arc<Tower>, rng: &mut ChaCha8Rng) -> RatFunc {
    let md = tower.modulus();
    let nv = tower.nvars();
    let p = md.get() as i64;
    let poly = |rng: &mut ChaCha8Rng| {
        let mut acc = RatFunc::constant(md, nv, rng.gen_range(0..p));
        for v in 0..nv {
            let c = RatFunc::constant(md, nv, rng.gen_range(0..p));
            acc = acc.add(&c.mul(&RatFunc::var(md, nv, v)));
        }
        acc
    };
    let num = poly(rng);
    if rng.gen_bool(0.25) {
        let den = poly(rng);
        if !den.is_zero() {
            return num.div(&den).unwrap();
        }
    }
    num
}

pub fn random_l(tower: &Arc<Tower>, rng: &mut ChaCha8Rng) -> TowerElement {
    random_tower_element(tower, rng)
}

/// Element of L with at most two nonzero coordinates, each a polynomial
/// of degree at most one.
pub fn sparse_l(tower: &Arc<Tower>, rng: &mut ChaCha8Rng) -> TowerElement {
    let md = tower.modulus();
    let nv = tower.nvars();
    let p = md.get() as i64;
    let mut acc = TowerElement::zero(tower);
    for _ in 0..2 {
        let mut c = RatFunc::constant(md, nv, rng.gen_range(0..p));
        let v = rng.gen_range(0..nv);
        c = c.add(&RatFunc::constant(md, nv, rng.gen_range(0..p)).mul(&RatFunc::var(md, nv, v)));
        let b = TowerElement::basis(tower, rng.gen_range(0..tower.degree()));
        acc = acc.add(&b.scale_k(&c));
    }
    acc
}

pub fn k_vector(tower: &Arc<Tower>, n: usize, rng: &mut ChaCha8Rng) -> Vec<TowerElement> {
    (0..n).map(|_| TowerElement::from_k(tower, random_k(tower, rng))).collect()
}

pub fn l_vector(tower: &Arc<Tower>, n: usize, rng: &mut ChaCha8Rng) -> Vec<TowerElement> {
    (0..n).map(|_| random_l(tower, rng)).collect()
}

/// L-rank as the size of the largest nonvanishing minor, with
/// determinants expanded along the first row. Independent of the engine's
/// elimination; meant for the small matrices of the tests.
pub fn l_rank(vectors: &[Vec<TowerElement>]) -> usize {
    let nrows = vectors.len();
    let ncols = vectors.first().map_or(0, |v| v.len());
    for k in (1..=nrows.min(ncols)).rev() {
        for rows in subsets(nrows, k) {
            for cols in subsets(ncols, k) {
                let m: Vec<Vec<TowerElement>> =
                    rows.iter().map(|&r| cols.iter().map(|&c| vectors[r][c].clone()).collect()).collect();
                if !determinant(&m).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

pub fn determinant(m: &[Vec<TowerElement>]) -> TowerElement {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let t = m[0][0].tower().clone();
    let mut acc = TowerElement::zero(&t);
    for (j, x) in m[0].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let minor: Vec<Vec<TowerElement>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, y)| y.clone()).collect())
            .collect();
        let term = x.mul(&determinant(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// L-rank through the engine, for generating test data quickly.
pub fn fast_rank(vectors: &[Vec<TowerElement>]) -> usize {
    span_rank(vectors)
}

/// r L-independent vectors, drawn by `draw` until independent.
pub fn independent(r: usize, mut draw: impl FnMut() -> Vec<TowerElement>) -> Vec<Vec<TowerElement>> {
    loop {
        let vs: Vec<_> = (0..r).map(|_| draw()).collect();
        if fast_rank(&vs) == r {
            return vs;
        }
    }
}

/// L-combinations of `base` by a random invertible matrix.
pub fn mix(tower: &Arc<Tower>, base: &[Vec<TowerElement>], rng: &mut ChaCha8Rng) -> Vec<Vec<TowerElement>> {
    let r = base.len();
    let n = base.first().map_or(0, |v| v.len());
    loop {
        let coeffs: Vec<Vec<TowerElement>> = (0..r).map(|_| l_vector(tower, r, rng)).collect();
        if fast_rank(&coeffs) != r {
            continue;
        }
        return coeffs
            .iter()
            .map(|c| {
                (0..n)
                    .map(|i| {
                        c.iter()
                            .zip(base)
                            .fold(TowerElement::zero(tower), |acc, (a, v)| acc.add(&a.mul(&v[i])))
                    })
                    .collect()
            })
            .collect();
    }
}

/// Independent check of a K-form of the L-span of `basis`: entries in K,
/// K-independent, fixed by every canonical automorphism, and L-spanning.
pub fn verify_k_form(tower: &Arc<Tower>, basis: &[Vec<TowerElement>], form: &[Vec<TowerElement>]) -> Result<(), String> {
    let mut rows = Vec::new();
    for v in form {
        let row: Option<Vec<RatFunc>> = v.iter().map(|x| x.as_k().cloned()).collect();
        rows.push(row.ok_or("k_form entry outside K")?);
    }
    if !rows.is_empty() && k_rank(&rows) != rows.len() {
        return Err("k_form is K-dependent".into());
    }
    verify_invariant_spanning(tower, basis, form)
}

/// Fixed by the canonical automorphisms and spanning the same L-space.
pub fn verify_invariant_spanning(
    tower: &Arc<Tower>,
    basis: &[Vec<TowerElement>],
    form: &[Vec<TowerElement>],
) -> Result<(), String> {
    for g in canonical_generators(tower) {
        for v in form {
            for x in v {
                if g.element.apply_l(x) != TruncElement::constant(x.clone()) {
                    return Err(format!("{} moves k_form entry {}", g.name, x));
                }
            }
        }
    }
    let r = l_rank(basis);
    if form.len() != r || l_rank(form) != r {
        return Err("k_form does not have the dimension of the object".into());
    }
    let mut all = basis.to_vec();
    all.extend(form.iter().cloned());
    if l_rank(&all) != r {
        return Err("k_form leaves the object".into());
    }
    Ok(())
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// A corpus document: its name, text and the command line recorded in its
/// first line as `# command: <cmd> [--oracle] [--seed N]`.
pub struct GoldenCase {
    pub name: String,
    pub text: String,
    pub command: Command,
    pub options: Options,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(golden_dir())
        .expect("golden directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dk"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let header = text.lines().next().unwrap_or_default();
            let words: Vec<&str> = header
                .strip_prefix("# command:")
                .expect("first line names the command")
                .split_whitespace()
                .collect();
            let command = <Command as clap::ValueEnum>::from_str(words[0], false).expect("known command");
            let mut options = Options::default();
            let mut it = words[1..].iter();
            while let Some(w) = it.next() {
                match *w {
                    "--oracle" => options.oracle = true,
                    "--trust-irreducible" => options.trust_irreducible = true,
                    "--seed" => options.seed = it.next().unwrap().parse().unwrap(),
                    other => panic!("unknown flag {}", other),
                }
            }
            GoldenCase {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                text,
                command,
                options,
            }
        })
        .collect()
}

/// Report text followed by the exit code, as stored in the `.out` files.
pub fn run_case(case: &GoldenCase) -> String {
    let (out, code) = execute(case.command, &case.text, &case.options, false);
    format!("{}# exit {}\n", out, code)
}
