use std::fmt::Display;

use graded_core::algebra::{CoeffFn, Mode, Superfunction};
use graded_core::berezin::{
    berezin_integral, canonical_comparison, canonical_relation_holds, classify_modular_field, modular_field, rescaling_form,
    BerezinianVolume, DivergenceOperator, ModularVerdict,
};
use graded_core::continuity::{conservation_check, continuity_residual, TimeDependentSection};
use graded_core::derivations::{d_graded, GradedDerivation};
use graded_core::geometry::check_data;
use graded_core::suites::{self, Instance};
use graded_core::symplectic::{build_rothstein, RothsteinForm};
use serde_json::{json, Map, Value};

use crate::expr::{self, Context};
use crate::manifest::Manifest;

/// Input problems (exit code 2), as opposed to failed checks.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<Report, InputError>;

pub struct Report {
    pub passed: bool,
    pub lines: Vec<String>,
    pub fields: Map<String, Value>,
}

impl Report {
    fn new(passed: bool) -> Self {
        Report { passed, lines: Vec::new(), fields: Map::new() }
    }

    fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.lines.push(s.into());
        self
    }

    fn field(&mut self, k: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(k.to_string(), v.into());
        self
    }
}

fn text<T: Display>(v: &T) -> Value {
    Value::String(v.to_string())
}

fn coeff_list(v: &[CoeffFn]) -> Value {
    Value::Array(v.iter().map(text).collect())
}

fn derivation_json(d: &GradedDerivation) -> Value {
    json!({
        "nabla": d.nabla_components().iter().map(text).collect::<Vec<_>>(),
        "contraction": d.contraction_components().iter().map(text).collect::<Vec<_>>(),
    })
}

fn form(m: &Manifest) -> Result<RothsteinForm, InputError> {
    build_rothstein(&m.data).map_err(|e| InputError(format!("cannot build the even symplectic form: {e}")))
}

fn section(m: &Manifest, arg: &str) -> Result<Superfunction, InputError> {
    if let Some(s) = m.sections.get(arg) {
        return Ok(s.clone());
    }
    expr::parse_superfunction(arg, m.ring(), m.rank()).map_err(|e| InputError(format!("section '{arg}': {e}")))
}

/// A named derivation, `i[j]`, `nabla[a]` or `ham(<section>)`.
fn derivation(m: &Manifest, arg: &str) -> Result<GradedDerivation, InputError> {
    if let Some(d) = m.derivations.get(arg) {
        return Ok(d.clone());
    }
    let conn = m.connection().clone();
    let index = |inner: &str, bound: usize| -> Result<usize, InputError> {
        match inner.trim().parse::<usize>() {
            Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
            _ => Err(InputError(format!("derivation '{arg}': index must be in 1..={bound}"))),
        }
    };
    let a = arg.trim();
    if let Some(inner) = a.strip_prefix("i[").and_then(|s| s.strip_suffix(']')) {
        return Ok(GradedDerivation::contraction_basis(conn, index(inner, m.rank())?));
    }
    if let Some(inner) = a.strip_prefix("nabla[").and_then(|s| s.strip_suffix(']')) {
        return Ok(GradedDerivation::nabla_basis(conn, index(inner, m.data.dim())?));
    }
    if let Some(inner) = a.strip_prefix("ham(").and_then(|s| s.strip_suffix(')')) {
        let s = section(m, inner)?;
        return Ok(form(m)?.hamiltonian_field(&s)?);
    }
    Err(InputError(format!("unknown derivation '{arg}' (expected a manifest name, i[j], nabla[a] or ham(s))")))
}

fn density(m: &Manifest, arg: &str) -> Result<TimeDependentSection, InputError> {
    if let Some(d) = m.densities.get(arg) {
        return Ok(d.clone());
    }
    let ctx = Context { ring: m.ring(), rank: m.rank(), allow_time: true };
    let series = expr::parse_series(arg, &ctx).map_err(|e| InputError(format!("density '{arg}': {e}")))?;
    Ok(TimeDependentSection::new(m.ring(), m.rank(), series.0, Vec::new())?)
}

fn operator(vol: BerezinianVolume) -> Result<DivergenceOperator, InputError> {
    Ok(DivergenceOperator::new(vol)?)
}

fn instance(m: &Manifest) -> Result<Instance, InputError> {
    Instance::new("manifest", (*m.data).clone()).map_err(|e| InputError(format!("cannot build the even symplectic form: {e}")))
}

pub fn check(m: &Manifest) -> CmdResult {
    let report = check_data(&m.data);
    let mut passed = report.all_passed();
    let mut conditions: Vec<Value> = report
        .conditions
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    let mut r = Report::new(true);
    for l in report.to_string().lines() {
        r.line(l);
    }
    if passed {
        let built = build_rothstein(&m.data);
        let detail = built.as_ref().err().map(ToString::to_string);
        r.line(format!("{:<24} {}", "even symplectic form", if built.is_ok() { "pass" } else { "FAIL" }));
        conditions.push(json!({ "name": "even symplectic form", "passed": built.is_ok(), "detail": detail }));
        passed = built.is_ok();
    }
    r.passed = passed;
    r.field("conditions", conditions);
    Ok(r)
}

pub fn theta(m: &Manifest) -> CmdResult {
    let th = form(m)?;
    let mut r = Report::new(true);
    for l in th.to_string().lines() {
        r.line(l);
    }
    r.line(format!("inverse series terms: {}", th.neumann_terms()));
    let d = m.data.dim();
    let w: Vec<Vec<Value>> = (0..d).map(|a| (0..d).map(|b| text(th.w().get(a, b))).collect()).collect();
    let rk = m.rank();
    let g: Vec<Vec<Value>> = (0..rk).map(|j| (0..rk).map(|k| text(th.g().get(j, k))).collect()).collect();
    r.field("nabla_block", w).field("contraction_block", g).field("neumann_terms", th.neumann_terms());
    Ok(r)
}

pub fn bracket(m: &Manifest, s: &str, t: &str) -> CmdResult {
    let th = form(m)?;
    let (a, b) = (section(m, s)?, section(m, t)?);
    let v = th.poisson_bracket(&a, &b)?;
    let mut r = Report::new(true);
    r.line(format!("[[{a}, {b}]] = {v}"));
    r.field("s", text(&a)).field("t", text(&b)).field("bracket", text(&v));
    Ok(r)
}

pub fn ham(m: &Manifest, s: &str) -> CmdResult {
    let th = form(m)?;
    let a = section(m, s)?;
    let d = th.hamiltonian_field(&a)?;
    let mut r = Report::new(true);
    r.line(format!("D_s = {d}"));
    for (j, v) in d.on_generators().iter().enumerate() {
        r.line(format!("D_s(e[{}]) = {v}", j + 1));
    }
    let exact = th.insert(&d)? == d_graded(m.connection(), &a)?;
    r.passed = exact;
    r.line(format!("back-substitution i_(D_s) theta = d s: {}", if exact { "exact" } else { "FAILS" }));
    r.field("s", text(&a)).field("field", derivation_json(&d)).field("back_substitution", exact);
    Ok(r)
}

pub fn div(m: &Manifest, arg: &str) -> CmdResult {
    let d = derivation(m, arg)?;
    let op = operator(m.volume())?;
    let v = op.divergence(&d)?;
    let mut r = Report::new(true);
    r.line(format!("div({arg}) = {v}"));
    r.field("derivation", derivation_json(&d)).field("divergence", text(&v));
    if let Some(w_hat) = &m.canonical_volume {
        let cop = operator(BerezinianVolume::canonical(&m.data, w_hat.clone())?)?;
        let cv = cop.divergence(&d)?;
        let holds = canonical_relation_holds(&d, w_hat, &m.data)?;
        r.line(format!("canonical div({arg}) = {cv}"));
        r.line(format!("relation to the symplectic divergence: {}", if holds { "holds" } else { "FAILS" }));
        r.field("canonical_divergence", text(&cv)).field("canonical_relation", holds);
        r.passed = holds;
    }
    Ok(r)
}

pub fn modular(m: &Manifest) -> CmdResult {
    let th = form(m)?;
    let op = operator(m.volume())?;
    let z = modular_field(&th, &op)?;
    let mut r = Report::new(true);
    r.line(format!("Z = {z}"));
    for (j, v) in z.on_generators().iter().enumerate() {
        r.line(format!("Z(e[{}]) = {v}", j + 1));
    }
    let classical = z.classical_part();
    r.line(format!("classical part X_Z = ({})", classical.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")));
    r.field("field", derivation_json(&z)).field("classical_part", coeff_list(&classical));
    Ok(r)
}

fn verdict_text(v: &ModularVerdict) -> String {
    let alpha = if v.certificate.iter().all(CoeffFn::is_zero) {
        "0".to_string()
    } else {
        format!("({})", v.certificate.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
    };
    format!("{}, certificate α = {alpha}", if v.trivial { "trivial" } else { "NOT trivial" })
}

fn verdict_json(v: &ModularVerdict) -> Value {
    json!({ "trivial": v.trivial, "classical_field": coeff_list(&v.classical_field), "certificate": coeff_list(&v.certificate) })
}

pub fn class(m: &Manifest) -> CmdResult {
    let th = form(m)?;
    let base = BerezinianVolume::symplectic(&m.data);
    let z = modular_field(&th, &operator(base.clone())?)?;
    let v = classify_modular_field(&z, &m.data)?;
    let mut r = Report::new(v.trivial);
    r.line(format!("modular class: {}", verdict_text(&v)));
    r.field("verdict", verdict_json(&v));
    if let Some(s_bar) = &m.rescale {
        let z2 = modular_field(&th, &operator(base.with_rescale(s_bar.clone())?)?)?;
        let v2 = classify_modular_field(&z2, &m.data)?;
        let ham = th.hamiltonian_field_of_form(&rescaling_form(s_bar, &th)?)?;
        let differ_by_ham = z2.sub(&z)? == ham;
        r.line(format!("rescaled Berezinian: {}", verdict_text(&v2)));
        r.line(format!("Z' - Z is the Hamiltonian field of -s^(-1) d s: {}", if differ_by_ham { "verified" } else { "FAILS" }));
        r.passed &= differ_by_ham && v2.trivial == v.trivial;
        r.field("rescaled", json!({ "verdict": verdict_json(&v2), "difference_hamiltonian": differ_by_ham }));
    }
    if let Some(w_hat) = &m.canonical_volume {
        let zc = modular_field(&th, &operator(BerezinianVolume::canonical(&m.data, w_hat.clone())?)?)?;
        let vc = classify_modular_field(&zc, &m.data)?;
        let ratio = canonical_comparison(w_hat, &m.data)?;
        r.line(format!("canonical Berezinian: {}", verdict_text(&vc)));
        r.line(format!("comparison W/W_hat = {ratio}"));
        r.passed &= vc.trivial == v.trivial;
        r.field("canonical", json!({ "verdict": verdict_json(&vc), "comparison": text(&ratio) }));
    }
    Ok(r)
}

pub fn integrate(m: &Manifest, arg: &str) -> CmdResult {
    if m.ring().mode != Mode::Torus {
        return Err(InputError("integrate needs a torus-mode manifest".into()));
    }
    let s = section(m, arg)?;
    let v = berezin_integral(&s, &m.volume())?;
    let mut r = Report::new(true);
    r.line(format!("integral = {v}"));
    r.field("section", text(&s))
        .field("coefficient", text(&v.coefficient))
        .field("two_pi_power", v.two_pi_power)
        .field("value", text(&v));
    Ok(r)
}

pub fn continuity(m: &Manifest, rho: &str, d: &str) -> CmdResult {
    let rho = density(m, rho)?;
    let d = derivation(m, d)?;
    let op = operator(m.volume())?;
    let res = continuity_residual(&rho, &d, &op)?;
    let solved = res.is_zero();
    let mut r = Report::new(solved && res.forms_related);
    r.line(format!("rho = {rho}"));
    r.line(format!("divergence-form residual = {}", res.divergence_form));
    r.line(format!("Lie-form residual = {}", res.lie_form));
    r.line(format!("div(D) = {}", res.divergence_of_field));
    r.line(format!("forms related by rho ^ div(D): {}", if res.forms_related { "yes" } else { "NO" }));
    r.line(format!("continuity equation: {}", if solved { "satisfied" } else { "NOT satisfied" }));
    r.field("divergence_form", text(&res.divergence_form))
        .field("lie_form", text(&res.lie_form))
        .field("divergence_of_field", text(&res.divergence_of_field))
        .field("forms_related", res.forms_related)
        .field("forms_agree", res.forms_agree)
        .field("satisfied", solved);
    if solved && m.ring().mode == Mode::Torus {
        let c = conservation_check(&rho, &d, &op)?;
        let show = |v: &[graded_core::algebra::Q]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        r.line(format!("integral of rho0 by powers of t: [{}]", show(&c.integral_rho0)));
        r.line(format!("integral of rho1 by powers of t: [{}]", show(&c.integral_rho1)));
        r.line(format!("conserved: {}", if c.conserved { "yes" } else { "NO" }));
        r.passed &= c.conserved;
        r.field("conserved", c.conserved);
    }
    Ok(r)
}

fn suite_json(rep: &suites::SuiteReport) -> Value {
    let failures: Vec<Value> = rep.failures().map(|c| json!({ "index": c.index, "detail": c.detail })).collect();
    json!({ "name": rep.name, "label": rep.label, "passed": rep.passed(), "total": rep.total(), "failures": failures })
}

pub fn oracle(m: &Manifest, seed: u64, cases: u64) -> CmdResult {
    if m.ring().mode != Mode::Torus {
        return Err(InputError("oracle needs a torus-mode manifest".into()));
    }
    let inst = instance(m)?;
    let rep = suites::integral_oracle_with(&[inst], m.rescale.as_ref(), seed, cases);
    let mut r = Report::new(rep.all_passed());
    r.line(format!("{}: {}/{} exact matches", rep.label, rep.passed(), rep.total()));
    for c in rep.failures().take(5) {
        r.line(format!("  case {}: {}", c.index, c.detail.as_deref().unwrap_or("failed")));
    }
    r.field("seed", seed).field("suite", suite_json(&rep));
    Ok(r)
}

pub fn props(m: Option<&Manifest>, seed: u64, cases: u64) -> CmdResult {
    let instances = match m {
        Some(m) => vec![instance(m)?],
        None => suites::standard_instances(true),
    };
    let reports = suites::all_suites(&instances, seed, cases);
    let mut r = Report::new(reports.iter().all(|rep| rep.all_passed() || rep.total() == 0));
    for rep in &reports {
        r.line(rep.to_string());
    }
    r.field("seed", seed).field("suites", reports.iter().map(suite_json).collect::<Vec<_>>());
    Ok(r)
}
