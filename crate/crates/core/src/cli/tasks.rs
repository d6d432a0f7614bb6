//! Dispatch of task blocks to the engine and JSON rendering of results.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::document::{Arg, Entry, InputDocument, Source, TaskDecl, TowerDecl};
use super::expr::{parse_expr, EvalContext, KContext, LContext, PolyContext, SepPolyContext, TruncContext};
use super::lexer::Pos;
use crate::descent::{
    check_ideal, check_morphism, check_subspace, deformation_descent, kform_from_action, oracle_subspace,
    validate_action, verify_descent_datum, AlgebraMapData, DescentReport, FreeTruncModule, LPoly, MorphismData,
    PresentedAlgebraL, SigmaLinearAction, SubspaceL,
};
use crate::error::{EngineError, InputError};
use crate::field::{PrimeModulus, RatFunc};
use crate::gha::{act_on_l, check_hopf_axioms, GhaBasisIndex, TruncMatrix};
use crate::hg::{canonical_generators, delta, delta_inverse, fixed_subfield, fixed_subring, random_a0_element, random_hg_element};
use crate::report::ValidationReport;
use crate::tower::{validate_tower, InsepSpec, SepSpec, Tower, TowerElement, TowerSpec};
use crate::trunc::TruncElement;

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub oracle: bool,
    pub seed: u64,
    pub trust_irreducible: bool,
}

/// Severity of a task result; the process exit code is the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Positive = 0,
    Negative = 1,
    InputError = 2,
    Internal = 3,
}

pub struct TaskResult {
    pub json: Value,
    pub outcome: Outcome,
}

/// Number of seeded samples drawn by the randomized validation checks.
const RANDOM_SAMPLES: u64 = 8;

fn input_failure(task: &str, err: impl ToString) -> TaskResult {
    TaskResult {
        json: json!({"task": task, "error": err.to_string()}),
        outcome: Outcome::InputError,
    }
}

fn engine_failure(task: &str, err: EngineError) -> TaskResult {
    let outcome = match err {
        EngineError::InternalInconsistency(_) => Outcome::Internal,
        _ => Outcome::InputError,
    };
    TaskResult {
        json: json!({"task": task, "error": err.to_string()}),
        outcome,
    }
}

pub fn tower_spec(decl: &TowerDecl, trust_irreducible: bool) -> Result<TowerSpec, InputError> {
    let modulus = PrimeModulus::new(decl.p).map_err(|e| decl.p_pos.invalid(e.to_string()))?;
    let k = KContext {
        modulus,
        base: &decl.base,
    };
    let eval_k = |s: &Source| -> Result<RatFunc, InputError> { k.eval(&parse_expr(&s.text, s.pos)?) };
    let sep = match &decl.sep {
        None => None,
        Some(s) => {
            let ctx = SepPolyContext {
                k: KContext {
                    modulus,
                    base: &decl.base,
                },
                var: &s.name,
            };
            let minpoly = ctx.eval(&parse_expr(&s.minpoly.text, s.minpoly.pos)?)?;
            if minpoly.len() < 2 {
                return Err(s.minpoly.pos.invalid("minimal polynomial must have positive degree"));
            }
            let mut autos = Vec::new();
            for (g, img) in &s.autos {
                autos.push((g.clone(), ctx.eval(&parse_expr(&img.text, img.pos)?)?));
            }
            Some(SepSpec {
                name: s.name.clone(),
                minpoly,
                autos,
            })
        }
    };
    let insep = decl
        .insep
        .iter()
        .map(|g| {
            Ok(InsepSpec {
                name: g.name.clone(),
                n: g.n,
                value: eval_k(&g.value)?,
            })
        })
        .collect::<Result<_, InputError>>()?;
    Ok(TowerSpec {
        modulus,
        base_vars: decl.base.clone(),
        sep,
        insep,
        trust_irreducible,
    })
}

fn checks_json(report: &ValidationReport) -> Value {
    Value::Array(
        report
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect(),
    )
}

fn descent_json(task: &str, report: &DescentReport) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("task".into(), json!(task));
    obj.insert("verdict".into(), json!(report.verdict.as_str()));
    if let Some(k) = &report.k_form {
        obj.insert("k_form".into(), json!(k.render()));
    }
    if let Some(w) = &report.witness {
        obj.insert(
            "witness".into(),
            json!({"element": w.element, "generator": w.generator, "image": w.image}),
        );
    }
    obj.insert("diagnostics".into(), json!(report.diagnostics));
    Value::Object(obj)
}

fn descent_result(task: &str, report: &DescentReport) -> TaskResult {
    TaskResult {
        json: descent_json(task, report),
        outcome: if report.is_defined() { Outcome::Positive } else { Outcome::Negative },
    }
}

// Payload access.

fn entries<'a>(task: &'a [Entry], key: &'a str) -> impl Iterator<Item = &'a Entry> {
    task.iter().filter(move |e| e.key == key)
}

fn single<'a>(task: &'a [Entry], key: &str, at: Pos) -> Result<&'a Entry, InputError> {
    let mut it = task.iter().filter(|e| e.key == key);
    let first = it.next().ok_or_else(|| at.syntax(format!("a '{}' entry", key)))?;
    if let Some(dup) = it.next() {
        return Err(dup.pos.syntax(format!("a single '{}' entry", key)));
    }
    Ok(first)
}

fn uint_arg(e: &Entry) -> Result<u64, InputError> {
    match e.args.as_slice() {
        [Arg::Uint(n, _)] => Ok(*n),
        _ => Err(e.pos.syntax(format!("'{}' followed by a number", e.key))),
    }
}

fn vector_arg(e: &Entry) -> Result<&[Source], InputError> {
    match e.args.as_slice() {
        [Arg::Vector(v, _)] => Ok(v),
        _ => Err(e.pos.syntax(format!("'{}' followed by a parenthesized list of strings", e.key))),
    }
}

fn string_arg(e: &Entry) -> Result<&Source, InputError> {
    match e.args.as_slice() {
        [Arg::Str(s)] => Ok(s),
        _ => Err(e.pos.syntax(format!("'{}' followed by a string", e.key))),
    }
}

fn eval_all<C: EvalContext>(ctx: &C, items: &[Source]) -> Result<Vec<C::Value>, InputError> {
    items
        .iter()
        .map(|s| ctx.eval(&parse_expr(&s.text, s.pos)?))
        .collect()
}

fn vectors<C: EvalContext>(ctx: &C, task: &[Entry], dim: usize) -> Result<Vec<Vec<C::Value>>, InputError> {
    entries(task, "vector")
        .map(|e| {
            let v = eval_all(ctx, vector_arg(e)?)?;
            if v.len() != dim {
                return Err(e.pos.invalid(format!("vector has {} entries, dimension is {}", v.len(), dim)));
            }
            Ok(v)
        })
        .collect()
}

fn dim_of(task: &TaskDecl) -> Result<usize, InputError> {
    Ok(uint_arg(single(&task.entries, "dim", task.pos)?)? as usize)
}

/// Rows of a `matrix { row (...) ... }` block.
fn matrix_rows<C: EvalContext>(ctx: &C, block: &[Entry]) -> Result<Vec<Vec<C::Value>>, InputError> {
    entries(block, "row").map(|e| eval_all(ctx, vector_arg(e)?)).collect()
}

fn matrix_block(e: &Entry) -> Result<(Option<&str>, &[Entry]), InputError> {
    match e.args.as_slice() {
        [Arg::Block(b)] => Ok((None, b)),
        [Arg::Ident(g, _), Arg::Block(b)] => Ok((Some(g.as_str()), b)),
        _ => Err(e.pos.syntax("'matrix', an optional generator name and a block of rows")),
    }
}

/// σ-linear action from `matrix <gen> { row ... }` entries. Generators
/// that are not listed act by the identity.
fn parse_action(tower: &Arc<Tower>, task: &TaskDecl) -> Result<SigmaLinearAction, InputError> {
    let dim = dim_of(task)?;
    let ctx = TruncContext { tower };
    let names: Vec<String> = canonical_generators(tower).into_iter().map(|g| g.name).collect();
    let mut mats: BTreeMap<String, TruncMatrix> = BTreeMap::new();
    for e in entries(&task.entries, "matrix") {
        let (gen, block) = matrix_block(e)?;
        let gen = gen.ok_or_else(|| e.pos.syntax("a generator name after 'matrix'"))?;
        if !names.iter().any(|n| n == gen) {
            return Err(e.pos.unknown(gen));
        }
        let rows = matrix_rows(&ctx, block)?;
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(e.pos.invalid(format!("matrix for {} must be {}x{}", gen, dim, dim)));
        }
        if mats.insert(gen.to_string(), rows).is_some() {
            return Err(e.pos.invalid(format!("second matrix for {}", gen)));
        }
    }
    for n in names {
        mats.entry(n).or_insert_with(|| {
            (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|c| if r == c { TruncElement::one(tower) } else { TruncElement::zero(tower) })
                        .collect()
                })
                .collect()
        });
    }
    SigmaLinearAction::new(tower, dim, mats).map_err(|e| task.pos.invalid(e.to_string()))
}

/// `vars ...` and `poly "..."` entries of a block.
fn parse_algebra(tower: &Arc<Tower>, block: &[Entry], at: Pos) -> Result<PresentedAlgebraL, InputError> {
    let vars_entry = single(block, "vars", at)?;
    let mut names = Vec::new();
    for a in &vars_entry.args {
        match a {
            Arg::Ident(s, p) => {
                if s == "X" || LContext::lookup(tower, s).is_some() || names.contains(s) {
                    return Err(p.invalid(format!("variable name {} is already in use", s)));
                }
                names.push(s.clone());
            }
            _ => return Err(vars_entry.pos.syntax("variable names after 'vars'")),
        }
    }
    let vars: Arc<[String]> = names.into();
    let ctx = PolyContext { tower, vars: &vars };
    let mut gens = Vec::new();
    for e in entries(block, "poly") {
        let p = ctx.eval(&parse_expr(&string_arg(e)?.text, string_arg(e)?.pos)?)?;
        if p.is_zero() {
            return Err(e.pos.invalid("ideal generators must be nonzero"));
        }
        gens.push(p);
    }
    PresentedAlgebraL::new(vars, gens).map_err(|e| at.invalid(e.to_string()))
}

fn parse_gha_index(tower: &Tower, name: &str, pos: Pos) -> Result<GhaBasisIndex, InputError> {
    let mut idx = GhaBasisIndex::unit(tower);
    if name == "1" {
        return Ok(idx);
    }
    for factor in name.split('*') {
        if let Some(g) = factor.strip_prefix("D_") {
            idx.g = tower.group().index_of(g).ok_or_else(|| pos.unknown(g))?;
            continue;
        }
        let parsed = factor.strip_prefix('D').and_then(|rest| {
            let (i, k) = rest.split_once("^(")?;
            let k = k.strip_suffix(')')?;
            Some((i.parse::<usize>().ok()?, k.parse::<u32>().ok()?))
        });
        let (i, k) = parsed.ok_or_else(|| pos.unknown(factor))?;
        if i == 0 || i > tower.insep().len() || k as usize >= tower.insep()[i - 1].order {
            return Err(pos.unknown(factor));
        }
        idx.k[i - 1] = k;
    }
    Ok(idx)
}

// Commands.

fn describe(tower: &Arc<Tower>) -> TaskResult {
    let basis: Vec<String> = (0..tower.degree()).map(|i| tower.monomial_name(i)).collect();
    let group: Vec<String> = tower.group().elements().map(|g| tower.group().name(g).to_string()).collect();
    let gens: Vec<String> = canonical_generators(tower).into_iter().map(|g| g.name).collect();
    TaskResult {
        json: json!({
            "task": "describe",
            "p": tower.p().to_string(),
            "base": tower.base_vars(),
            "degree": tower.degree().to_string(),
            "separable_degree": tower.d0().to_string(),
            "exponent": tower.exponent().to_string(),
            "truncation": tower.truncation().to_string(),
            "basis": basis,
            "group": group,
            "hg_generators": gens,
        }),
        outcome: Outcome::Positive,
    }
}

fn seeded_checks(tower: &Arc<Tower>, seed: u64) -> ValidationReport {
    let mut report = ValidationReport::new();
    let detail = format!("{} samples from seed {}", RANDOM_SAMPLES, seed);
    let inverse_ok = (0..RANDOM_SAMPLES).all(|s| {
        let phi = random_hg_element(tower, seed.wrapping_add(s));
        matches!(phi.inverse().and_then(|inv| phi.compose(&inv)), Ok(id) if id.is_identity())
    });
    report.record("automorphism inverses", inverse_ok, detail.clone());
    let delta_ok = (0..RANDOM_SAMPLES).all(|s| {
        let psi = random_a0_element(tower, seed.wrapping_add(s));
        matches!(delta_inverse(&psi).and_then(|d| delta(&d)), Ok(back) if back == psi)
    });
    report.record("higher derivation round trip", delta_ok, detail);
    report
}

fn validate(tower: &Arc<Tower>, task: Option<&TaskDecl>, opts: &Options, mut report: ValidationReport) -> Result<TaskResult, InputError> {
    report.extend(check_hopf_axioms(tower));
    report.extend(seeded_checks(tower, opts.seed));
    if let Some(task) = task.filter(|t| entries(&t.entries, "dim").next().is_some()) {
        let action = parse_action(tower, task)?;
        report.extend(validate_action(&action));
        let algebra = if entries(&task.entries, "vars").next().is_some() {
            Some(parse_algebra(tower, &task.entries, task.pos)?)
        } else {
            None
        };
        match verify_descent_datum(&action, algebra.as_ref()) {
            Ok(r) => report.extend(r),
            Err(e) => return Ok(engine_failure("validate", e)),
        }
    }
    Ok(TaskResult {
        json: json!({"task": "validate", "checks": checks_json(&report)}),
        outcome: if report.passed() { Outcome::Positive } else { Outcome::Negative },
    })
}

fn with_oracle(name: &str, mut result: TaskResult, agree: bool) -> TaskResult {
    if !agree {
        return TaskResult {
            json: json!({"task": name, "error": "engine verdict disagrees with the oracle"}),
            outcome: Outcome::Internal,
        };
    }
    if let Some(Value::Array(d)) = result.json.get_mut("diagnostics") {
        d.push(json!("oracle agrees"));
    }
    result
}

fn check_subspace_task(tower: &Arc<Tower>, task: &TaskDecl, opts: &Options) -> Result<TaskResult, InputError> {
    let name = "check-subspace";
    let dim = dim_of(task)?;
    let basis = vectors(&LContext { tower }, &task.entries, dim)?;
    let w = SubspaceL::new(tower, dim, basis).map_err(|e| task.pos.invalid(e.to_string()))?;
    let report = match check_subspace(dim, &w) {
        Ok(r) => r,
        Err(e) => return Ok(engine_failure(name, e)),
    };
    let result = descent_result(name, &report);
    if opts.oracle {
        let agree = oracle_subspace(dim, &w).map(|o| o == report.is_defined()).unwrap_or(false);
        return Ok(with_oracle(name, result, agree));
    }
    Ok(result)
}

fn kform_task(tower: &Arc<Tower>, task: &TaskDecl) -> Result<TaskResult, InputError> {
    let action = parse_action(tower, task)?;
    Ok(match kform_from_action(&action) {
        Ok(r) => descent_result("kform", &r),
        Err(e @ EngineError::NotAForm { .. }) => TaskResult {
            json: json!({"task": "kform", "verdict": "not_defined_over_K", "diagnostics": [e.to_string()]}),
            outcome: Outcome::Negative,
        },
        Err(e) => engine_failure("kform", e),
    })
}

fn check_ideal_task(tower: &Arc<Tower>, task: &TaskDecl) -> Result<TaskResult, InputError> {
    let alg = parse_algebra(tower, &task.entries, task.pos)?;
    Ok(match check_ideal(&alg) {
        Ok(r) => descent_result("check-ideal", &r),
        Err(e) => engine_failure("check-ideal", e),
    })
}

fn block_of<'a>(task: &'a TaskDecl, key: &str) -> Result<&'a [Entry], InputError> {
    let e = single(&task.entries, key, task.pos)?;
    match e.args.as_slice() {
        [Arg::Block(b)] => Ok(b),
        _ => Err(e.pos.syntax(format!("a block after '{}'", key))),
    }
}

fn check_morphism_task(tower: &Arc<Tower>, task: &TaskDecl) -> Result<TaskResult, InputError> {
    let data = if let Some(e) = entries(&task.entries, "matrix").next() {
        let (gen, block) = matrix_block(e)?;
        if gen.is_some() {
            return Err(e.pos.syntax("a matrix block without a generator name"));
        }
        let rows = matrix_rows(&LContext { tower }, block)?;
        MorphismData::Matrix(rows)
    } else {
        let source = parse_algebra(tower, block_of(task, "source")?, task.pos)?;
        let target = parse_algebra(tower, block_of(task, "target")?, task.pos)?;
        let image = single(&task.entries, "image", task.pos)?;
        let ctx = PolyContext {
            tower,
            vars: &target.vars,
        };
        let images: Vec<LPoly> = eval_all(&ctx, vector_arg(image)?)?;
        MorphismData::AlgebraMap(AlgebraMapData { source, target, images })
    };
    Ok(match check_morphism(tower, &data) {
        Ok(r) => descent_result("check-morphism", &r),
        Err(e) => engine_failure("check-morphism", e),
    })
}

fn deform_task(tower: &Arc<Tower>, task: &TaskDecl, opts: &Options) -> Result<TaskResult, InputError> {
    let name = "deform-check";
    let dim = dim_of(task)?;
    let basis = vectors(&TruncContext { tower }, &task.entries, dim)?;
    let w = FreeTruncModule::new(tower, dim, basis).map_err(|e| task.pos.invalid(e.to_string()))?;
    let report = match deformation_descent(dim, &w) {
        Ok(r) => r,
        Err(e) => return Ok(engine_failure(name, e)),
    };
    let result = descent_result(name, &report);
    if opts.oracle {
        let agree = SubspaceL::new(tower, dim, w.closed_fiber())
            .and_then(|f| oracle_subspace(dim, &f))
            .map(|o| o == report.is_defined())
            .unwrap_or(false);
        return Ok(with_oracle(name, result, agree));
    }
    Ok(result)
}

fn fixed_ring_task(tower: &Arc<Tower>) -> TaskResult {
    let gens: Vec<_> = canonical_generators(tower).into_iter().map(|g| g.element).collect();
    let field: Vec<String> = fixed_subfield(tower, &gens).iter().map(|x| x.render()).collect();
    let ring: Vec<String> = fixed_subring(tower, &gens).iter().map(|x| x.render()).collect();
    let diagnostics = vec![
        format!("fixed subfield has dimension {} over K", field.len()),
        format!("fixed subring has dimension {} over K", ring.len()),
    ];
    TaskResult {
        json: json!({"task": "fixed-ring", "fixed_subfield": field, "fixed_subring": ring, "diagnostics": diagnostics}),
        outcome: Outcome::Positive,
    }
}

fn apply_task(tower: &Arc<Tower>, task: &TaskDecl) -> Result<TaskResult, InputError> {
    let gen_entry = single(&task.entries, "gen", task.pos)?;
    let (gen, gpos) = match gen_entry.args.as_slice() {
        [Arg::Ident(s, p)] => (s.clone(), *p),
        [Arg::Str(s)] => (s.text.clone(), s.pos),
        _ => return Err(gen_entry.pos.syntax("a generator name after 'gen'")),
    };
    let (inputs, is_vector): (&[Source], bool) = match (
        entries(&task.entries, "element").next(),
        entries(&task.entries, "vector").next(),
    ) {
        (Some(e), None) => (std::slice::from_ref(string_arg(e)?), false),
        (None, Some(v)) => (vector_arg(v)?, true),
        _ => return Err(task.pos.syntax("exactly one 'element' or 'vector' entry")),
    };
    let (input, result): (Vec<String>, Vec<String>) =
        if let Some(phi) = canonical_generators(tower).into_iter().find(|g| g.name == gen) {
            let xs = eval_all(&TruncContext { tower }, inputs)?;
            (
                xs.iter().map(|x| x.render()).collect(),
                xs.iter().map(|x| phi.element.apply(x).render()).collect(),
            )
        } else {
            let idx = parse_gha_index(tower, &gen, gpos)?;
            let xs: Vec<TowerElement> = eval_all(&LContext { tower }, inputs)?;
            (
                xs.iter().map(|x| x.render()).collect(),
                xs.iter().map(|x| act_on_l(&idx, x).render()).collect(),
            )
        };
    let wrap = |v: Vec<String>| if is_vector { format!("({})", v.join(", ")) } else { v[0].clone() };
    Ok(TaskResult {
        json: json!({"task": "apply", "generator": gen, "input": wrap(input), "result": wrap(result)}),
        outcome: Outcome::Positive,
    })
}

fn run_task(tower: &Arc<Tower>, kind: &str, task: Option<&TaskDecl>, opts: &Options, tower_report: &ValidationReport) -> TaskResult {
    let missing = |k: &str| input_failure(k, format!("command {} needs a task block", k));
    let res = match (kind, task) {
        ("describe", _) => Ok(describe(tower)),
        ("fixed-ring", _) => Ok(fixed_ring_task(tower)),
        ("validate", t) => validate(tower, t, opts, tower_report.clone()),
        ("check-subspace", Some(t)) => check_subspace_task(tower, t, opts),
        ("kform", Some(t)) => kform_task(tower, t),
        ("check-ideal", Some(t)) => check_ideal_task(tower, t),
        ("check-morphism", Some(t)) => check_morphism_task(tower, t),
        ("deform-check", Some(t)) => deform_task(tower, t, opts),
        ("apply", Some(t)) => apply_task(tower, t),
        (k, _) => return missing(k),
    };
    res.unwrap_or_else(|e| input_failure(kind, e))
}

/// Runs the tasks of `doc` selected by `command` (all of them for
/// `None`). Commands that need no payload run once even without a block.
pub fn run_document(doc: &InputDocument, command: Option<&str>, opts: &Options) -> Vec<TaskResult> {
    let selected: Vec<&TaskDecl> = doc
        .tasks
        .iter()
        .filter(|t| command.is_none_or(|c| t.kind == c))
        .collect();
    let jobs: Vec<(String, Option<&TaskDecl>)> = match command {
        Some(c) if selected.is_empty() => vec![(c.to_string(), None)],
        _ => selected.iter().map(|t| (t.kind.clone(), Some(*t))).collect(),
    };
    let spec = match tower_spec(&doc.tower, opts.trust_irreducible) {
        Ok(s) => s,
        Err(e) => return vec![input_failure(command.unwrap_or("tower"), e)],
    };
    let (mut report, tower) = validate_tower(&spec);
    let tower = match tower {
        Ok(t) => t,
        Err(e) => {
            report.record("tower", false, e.to_string());
            return jobs
                .iter()
                .map(|(kind, _)| {
                    if kind == "validate" {
                        TaskResult {
                            json: json!({"task": "validate", "checks": checks_json(&report)}),
                            outcome: Outcome::Negative,
                        }
                    } else {
                        input_failure(kind, format!("tower is invalid: {}", e))
                    }
                })
                .collect();
        }
    };
    jobs.iter()
        .map(|(kind, task)| run_task(&tower, kind, *task, opts, &report))
        .collect()
}
