//! Seeded property suites. Each suite runs independent cases in parallel and
//! reports them sorted by case index; identical seeds give identical reports.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{CoeffFn, Mode, Parity, Superfunction, Q};
use crate::berezin::{
    berezin_integral, classify_modular_field, divergence_rescaled, divergence_rescaled_log, modular_field,
    rescaling_form, BerezinianVolume, DivergenceOperator,
};
use crate::continuity::{classical_reduction_demo, conservation_check, continuity_residual, TimeDependentSection};
use crate::derivations::{d_graded, pair, GradedDerivation};
use crate::geometry::{classical_bracket, classical_divergence, curvature, SymplecticData};
use crate::models;
use crate::random::{self, case_rng, CaseRng, FuzzOptions};
use crate::symplectic::{build_rothstein, RothsteinForm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseOutcome {
    pub index: u64,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub label: String,
    pub seed: u64,
    pub cases: Vec<CaseOutcome>,
}

impl SuiteReport {
    pub fn total(&self) -> usize {
        self.cases.len()
    }

    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        !self.cases.is_empty() && self.passed() == self.total()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.all_passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} [{}]: {}/{} exact", self.name, self.label, self.passed(), self.total())?;
        for c in self.failures().take(3) {
            write!(f, "\n  case {}: {}", c.index, c.detail.as_deref().unwrap_or("failed"))?;
        }
        Ok(())
    }
}

type CaseResult = std::result::Result<(), String>;

fn run(name: &str, label: &str, seed: u64, cases: u64, f: impl Fn(u64, &mut CaseRng) -> CaseResult + Sync) -> SuiteReport {
    let mut outcomes: Vec<CaseOutcome> = (0..cases)
        .into_par_iter()
        .map(|index| {
            let mut rng = case_rng(seed, index);
            let res = f(index, &mut rng);
            CaseOutcome {
                index,
                passed: res.is_ok(),
                detail: res.err(),
            }
        })
        .collect();
    outcomes.sort_by_key(|c| c.index);
    SuiteReport {
        name: name.to_string(),
        label: label.to_string(),
        seed,
        cases: outcomes,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> CaseResult {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sign(p: Parity, q: Parity) -> Q {
    Q::from_integer(if p.koszul(q) { (-1).into() } else { 1.into() })
}

fn parity_of(s: &Superfunction) -> Parity {
    s.parity().expect("homogeneous sample")
}

fn dparity(d: &GradedDerivation) -> Parity {
    d.parity().expect("homogeneous sample")
}

/// Instances a suite cycles through, with their prebuilt forms.
#[derive(Clone)]
pub struct Instance {
    pub name: String,
    pub data: Arc<SymplecticData>,
    pub form: Arc<RothsteinForm>,
}

impl Instance {
    pub fn new(name: impl Into<String>, data: SymplecticData) -> crate::Result<Self> {
        let form = build_rothstein(&data)?;
        Ok(Instance {
            name: name.into(),
            data: form.symplectic_data().clone(),
            form: Arc::new(form),
        })
    }

    pub fn is_flat(&self) -> bool {
        self.form.curvature().is_flat()
    }

    pub fn mode(&self) -> Mode {
        self.data.ring().mode
    }
}

fn pick<'a>(instances: &'a [Instance], index: u64) -> &'a Instance {
    &instances[(index as usize) % instances.len()]
}

/// Flat and curved chart/torus models; rank-4 variants when `with_rank4`.
pub fn standard_instances(with_rank4: bool) -> Vec<Instance> {
    let mut v = vec![
        Instance::new("flat chart", SymplecticData::flat(crate::algebra::Ring::chart(2), 2)),
        Instance::new("curved chart", models::curved_chart(2)),
        Instance::new("flat torus", SymplecticData::flat(crate::algebra::Ring::torus(2), 2)),
        Instance::new("curved torus", models::curved_torus(2)),
        Instance::new("curved chart, weighted omega", models::curved_chart_weighted(2)),
    ];
    if with_rank4 {
        v.push(Instance::new("curved chart, rank 4", models::curved_chart(4)));
        v.push(Instance::new("curved torus, rank 4", models::curved_torus(4)));
    }
    v.into_iter().map(|i| i.expect("built-in models are valid")).collect()
}

/// `count` fuzzed instances cycling flat/curved and chart/torus.
pub fn fuzzed_instances(seed: u64, count: u64, rank: usize) -> Vec<Instance> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let opts = random::cycled_options(i, rank);
            let mut rng = case_rng(seed ^ 0x5eed_0f_da7a, i);
            let sd = random::symplectic_data(&mut rng, &opts);
            let tag = format!("fuzz #{i} ({}, {})", opts.mode, if opts.flat { "flat" } else { "curved" });
            Instance::new(tag, sd).expect("fuzzer produces valid data")
        })
        .collect()
}

pub fn with_fuzz_options(seed: u64, index: u64, opts: &FuzzOptions) -> crate::Result<Instance> {
    let mut rng = case_rng(seed, index);
    Instance::new(format!("fuzz #{index}"), random::symplectic_data(&mut rng, opts))
}

// ---------------------------------------------------------------------------
// divergence

pub fn divergence_axiom(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    run(
        "divergence_axiom",
        "div(s D) = s div(D) + (-1)^{|s||D|} D(s)",
        seed,
        cases,
        |i, rng| {
            let inst = pick(instances, i);
            let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let conn = inst.data.connection();
            let s = random::any_homogeneous(rng, conn.ring(), conn.rank());
            let d = random::derivation(rng, conn);
            let lhs = op.divergence(&d.left_mul(&s).map_err(err)?).map_err(err)?;
            let rhs = &(&s * &op.divergence(&d).map_err(err)?) + &d.apply(&s).map_err(err)?.scale_q(&sign(parity_of(&s), dparity(&d)));
            ensure(lhs == rhs, || format!("{}: s = {s}, D = {d}", inst.name))
        },
    )
}

/// Leibniz rule for the symplectic Berezinian's divergence, on the given
/// (typically fuzzed) instances; also checks evenness `|div D| = |D|`.
pub fn divergence_leibniz(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    run(
        "divergence_leibniz",
        "div^xi(s ^ D) = s ^ div^xi(D) + (-1)^{|D||s|} D(s), |div D| = |D|",
        seed,
        cases,
        |i, rng| {
            let inst = pick(instances, i);
            let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let conn = inst.data.connection();
            let s = random::any_homogeneous(rng, conn.ring(), conn.rank());
            let d = random::derivation(rng, conn);
            let div_d = op.divergence(&d).map_err(err)?;
            if let (Some(k), Some(p)) = (d.degree(), div_d.degree()) {
                ensure(k == p as i64, || format!("{}: degree of div({d}) is {p}", inst.name))?;
            }
            let lhs = op.divergence(&d.left_mul(&s).map_err(err)?).map_err(err)?;
            let rhs = &(&s * &div_d) + &d.apply(&s).map_err(err)?.scale_q(&sign(dparity(&d), parity_of(&s)));
            ensure(lhs == rhs, || format!("{}: s = {s}, D = {d}", inst.name))
        },
    )
}

fn torus_only(instances: &[Instance]) -> Vec<Instance> {
    instances.iter().filter(|i| i.mode() == Mode::Torus).cloned().collect()
}

/// `-∫_ξ D(s) = ∫_ξ div(D) ∧ s`, with the integral computed independently.
pub fn integral_oracle(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    integral_oracle_with(instances, None, seed, cases)
}

/// As [`integral_oracle`], against `∫_{ξ s̄}` when a rescale is given.
pub fn integral_oracle_with(instances: &[Instance], rescale: Option<&Superfunction>, seed: u64, cases: u64) -> SuiteReport {
    let tori = torus_only(instances);
    run(
        "integral_oracle",
        if rescale.is_some() { "-int_{xi s} D(u) = int_{xi s} div^{xi s}(D) ^ u" } else { "-int_xi D(s) = int_xi div^xi(D) ^ s" },
        seed,
        if tori.is_empty() { 0 } else { cases },
        |i, rng| {
            let inst = pick(&tori, i);
            let mut vol = BerezinianVolume::symplectic(&inst.data);
            if let Some(s) = rescale {
                vol = vol.with_rescale(s.clone()).map_err(err)?;
            }
            let op = DivergenceOperator::new(vol.clone()).map_err(err)?;
            integral_case(inst, &vol, &op, rng)
        },
    )
}

fn integral_case(inst: &Instance, vol: &BerezinianVolume, op: &DivergenceOperator, rng: &mut CaseRng) -> CaseResult {
    let conn = inst.data.connection();
    let (ring, r) = (conn.ring(), conn.rank());
    let d = random::derivation(rng, conn);
    // push s toward the degree that makes D(s) reach the top blade
    let k = (r as i64 - d.degree().unwrap_or(0)).clamp(0, r as i64) as usize;
    let s = if rng.gen_bool(0.8) {
        let t = random::homogeneous(rng, ring, r, k);
        if t.is_zero() { random::any_homogeneous(rng, ring, r) } else { t }
    } else {
        random::any_homogeneous(rng, ring, r)
    };
    let lhs = berezin_integral(&d.apply(&s).map_err(err)?, vol).map_err(err)?;
    let rhs = berezin_integral(&(&op.divergence(&d).map_err(err)? * &s), vol).map_err(err)?;
    ensure(-lhs.coefficient.clone() == rhs.coefficient, || {
        format!("{}: D = {d}, s = {s}: {} vs {}", inst.name, -lhs.coefficient, rhs.coefficient)
    })
}

/// Rescaled divergence: operator built from `ξ s̄` equals `div + s̄^{-1} D(s̄)`,
/// the log form agrees for body 1, and in torus mode the integral identity
/// holds against `∫_{ξ s̄}`.
pub fn rescaling(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    run(
        "rescaling",
        "div^{xi s} = div^xi + s^{-1} ^ D(s) = div^xi + d^G log s",
        seed,
        cases,
        |i, rng| {
            let inst = pick(instances, i);
            let conn = inst.data.connection();
            let (ring, r) = (conn.ring(), conn.rank());
            let unipotent = rng.gen_bool(0.5);
            let s_bar = if unipotent {
                random::unipotent_even(rng, ring, r)
            } else {
                random::invertible_even(rng, ring, r)
            };
            let base = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let vol = BerezinianVolume::symplectic(&inst.data).with_rescale(s_bar.clone()).map_err(err)?;
            let scaled = DivergenceOperator::new(vol.clone()).map_err(err)?;
            let d = random::derivation(rng, conn);
            let direct = divergence_rescaled(&d, &s_bar, &base).map_err(err)?;
            ensure(scaled.divergence(&d).map_err(err)? == direct, || format!("{}: operator mismatch for {d}", inst.name))?;
            if s_bar.body().is_one() {
                let via_log = divergence_rescaled_log(&d, &s_bar, &base).map_err(err)?;
                ensure(via_log == direct, || format!("{}: log form differs for s = {s_bar}", inst.name))?;
            }
            if inst.mode() == Mode::Torus {
                integral_case(inst, &vol, &scaled, rng)?;
            }
            Ok(())
        },
    )
}

/// `div(i_j) = 0` and `div(∇_a) = div^{ω^n}(∂_a)` on every instance.
pub fn basic_divergences(instances: &[Instance], seed: u64) -> SuiteReport {
    run(
        "basic_divergences",
        "div^xi(i_chi) = 0, div^xi(nabla_X) = div^{omega^n}(X)",
        seed,
        instances.len() as u64,
        |i, rng| {
            let inst = &instances[i as usize];
            let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let conn = inst.data.connection();
            for j in 0..conn.rank() {
                let v = op.divergence(&GradedDerivation::contraction_basis(conn.clone(), j)).map_err(err)?;
                ensure(v.is_zero(), || format!("{}: div(i_{}) = {v}", inst.name, j + 1))?;
            }
            let ring = conn.ring();
            for a in 0..conn.dim() {
                let mut x = vec![CoeffFn::zero(ring); conn.dim()];
                x[a] = CoeffFn::one(ring);
                let v = op.divergence(&GradedDerivation::nabla_basis(conn.clone(), a)).map_err(err)?;
                let c = classical_divergence(&x, &inst.data).map_err(err)?;
                ensure(v == Superfunction::from_coeff(conn.rank(), c), || format!("{}: div(nabla_{})", inst.name, a + 1))?;
            }
            // a random base vector field as well
            let x: Vec<CoeffFn> = (0..conn.dim()).map(|_| random::coeff(rng, ring, 2)).collect();
            let d = GradedDerivation::vector_field(conn.clone(), &x).map_err(err)?;
            let c = classical_divergence(&x, &inst.data).map_err(err)?;
            ensure(op.divergence(&d).map_err(err)? == Superfunction::from_coeff(conn.rank(), c), || format!("{}: div(nabla_X)", inst.name))
        },
    )
}

// ---------------------------------------------------------------------------
// brackets

pub fn bracket_laws(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    run(
        "bracket_laws",
        "even Poisson bracket: antisymmetry, Leibniz, Jacobi, parity, back-substitution",
        seed,
        cases,
        |i, rng| {
            let inst = pick(instances, i);
            let th = &inst.form;
            let conn = inst.data.connection();
            let (ring, r) = (conn.ring(), conn.rank());
            let s = random::any_homogeneous(rng, ring, r);
            let t = random::any_homogeneous(rng, ring, r);
            let u = random::any_homogeneous(rng, ring, r);
            let br = |a: &Superfunction, b: &Superfunction| th.poisson_bracket(a, b).map_err(err);
            let (ps, pt) = (parity_of(&s), parity_of(&t));
            let st = br(&s, &t)?;
            let ts = br(&t, &s)?;
            ensure(st == -&ts.scale_q(&sign(ps, pt)), || format!("{}: antisymmetry s = {s}, t = {t}", inst.name))?;
            if !st.is_zero() {
                ensure(st.parity() == Some(ps.add(pt)), || format!("{}: parity of [[{s}, {t}]]", inst.name))?;
            }
            let leib = &(&st * &u) + &(&t * &br(&s, &u)?).scale_q(&sign(ps, pt));
            ensure(br(&s, &(&t * &u))? == leib, || format!("{}: Leibniz s = {s}, t = {t}, u = {u}", inst.name))?;
            let lhs = br(&s, &br(&t, &u)?)?;
            let rhs = &br(&st, &u)? + &br(&t, &br(&s, &u)?)?.scale_q(&sign(ps, pt));
            ensure(lhs == rhs, || format!("{}: Jacobi s = {s}, t = {t}, u = {u}", inst.name))?;
            // the field solver substitutes back itself; double-check here
            let ds = th.hamiltonian_field(&s).map_err(err)?;
            ensure(th.insert(&ds).map_err(err)? == d_graded(conn, &s).map_err(err)?, || format!("{}: back-substitution", inst.name))?;
            // restriction to base functions
            let f = random::nonzero_coeff(rng, ring, 3);
            let h = random::nonzero_coeff(rng, ring, 3);
            let classical = classical_bracket(&f, &h, &inst.data).map_err(err)?;
            let graded = br(&Superfunction::from_coeff(r, f.clone()), &Superfunction::from_coeff(r, h.clone()))?;
            ensure(graded.grade_project(0) == Superfunction::from_coeff(r, classical), || format!("{}: restriction f = {f}, h = {h}", inst.name))?;
            if inst.is_flat() {
                ensure(graded.soul().is_zero(), || format!("{}: flat bracket of base functions has soul", inst.name))?;
            }
            Ok(())
        },
    )
}

// ---------------------------------------------------------------------------
// modular class

/// Modular field vanishes classically and its class is trivial; `Z(u) =
/// div(D_u)` and `Z` is an even derivation.
pub fn unimodularity(instances: &[Instance], seed: u64, functions_per_instance: usize) -> SuiteReport {
    run(
        "unimodularity",
        "even symplectic forms are unimodular: pi_(0)(Z(f)) = 0, class trivial",
        seed,
        instances.len() as u64,
        |i, rng| {
            let inst = &instances[i as usize];
            let th = &inst.form;
            let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let z = modular_field(th, &op).map_err(err)?;
            let verdict = classify_modular_field(&z, &inst.data).map_err(err)?;
            ensure(verdict.trivial, || format!("{}: class not trivial, alpha = {:?}", inst.name, verdict.certificate))?;
            ensure(z.degree().is_none_or(|k| k == 0), || format!("{}: Z has degree {:?}", inst.name, z.degree()))?;
            let conn = inst.data.connection();
            let (ring, r) = (conn.ring(), conn.rank());
            for _ in 0..functions_per_instance {
                let f = random::base_function(rng, ring, r);
                let zf = z.apply(&f).map_err(err)?;
                ensure(zf.grade_project(0).is_zero(), || format!("{}: pi_0(Z({f})) = {}", inst.name, zf.grade_project(0)))?;
            }
            let u = random::any_homogeneous(rng, ring, r);
            let zu = z.apply(&u).map_err(err)?;
            let direct = op.divergence(&th.hamiltonian_field(&u).map_err(err)?).map_err(err)?;
            ensure(zu == direct, || format!("{}: Z({u}) != div(D_u)", inst.name))?;
            let v = random::any_homogeneous(rng, ring, r);
            let lhs = z.apply(&(&u * &v)).map_err(err)?;
            let rhs = &(&zu * &v) + &(&u * &z.apply(&v).map_err(err)?);
            ensure(lhs == rhs, || format!("{}: Z is not an even derivation", inst.name))
        },
    )
}

/// Rescaling `ξ ↦ ξ s̄` changes `Z` by the Hamiltonian field of
/// `-s̄^{-1} d^G s̄` and leaves the class verdict unchanged.
pub fn class_invariance(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    let zs: Vec<_> = instances
        .par_iter()
        .map(|inst| {
            let op = DivergenceOperator::symplectic(&inst.data)?;
            let z = modular_field(&inst.form, &op)?;
            let v = classify_modular_field(&z, &inst.data)?;
            Ok((z, v))
        })
        .collect::<Vec<crate::Result<_>>>();
    run(
        "class_invariance",
        "div^{xi s} = div^xi + d^G log s: modular class independent of the Berezinian",
        seed,
        cases,
        |i, rng| {
            let k = (i as usize) % instances.len();
            let inst = &instances[k];
            let (z, verdict) = zs[k].as_ref().map_err(err)?;
            let conn = inst.data.connection();
            let (ring, r) = (conn.ring(), conn.rank());
            let s_bar = if rng.gen_bool(0.5) {
                random::unipotent_even(rng, ring, r)
            } else {
                random::invertible_even(rng, ring, r)
            };
            let vol = BerezinianVolume::symplectic(&inst.data).with_rescale(s_bar.clone()).map_err(err)?;
            let op = DivergenceOperator::new(vol).map_err(err)?;
            let z2 = modular_field(&inst.form, &op).map_err(err)?;
            let diff = z2.sub(z).map_err(err)?;
            let ham = inst.form.hamiltonian_field_of_form(&rescaling_form(&s_bar, &inst.form).map_err(err)?).map_err(err)?;
            ensure(diff == ham, || format!("{}: Z' - Z is not the expected Hamiltonian field for s = {s_bar}", inst.name))?;
            if s_bar.body().is_one() {
                let log = s_bar.log_even().map_err(err)?;
                let dlog = inst.form.hamiltonian_field(&log).map_err(err)?;
                ensure(diff == dlog.neg(), || format!("{}: Z' - Z != -D_(log s)", inst.name))?;
            }
            let v2 = classify_modular_field(&z2, &inst.data).map_err(err)?;
            ensure(v2.trivial == verdict.trivial, || format!("{}: verdict changed under rescaling", inst.name))
        },
    )
}

// ---------------------------------------------------------------------------
// continuity

fn random_density(rng: &mut CaseRng, ring: crate::algebra::Ring, rank: usize) -> TimeDependentSection {
    let k = rng.gen_range(0..=rank);
    let p0: Vec<Superfunction> = (0..rng.gen_range(1..=3)).map(|_| random::homogeneous(rng, ring, rank, k)).collect();
    // σ is odd, so ρ₁ has the opposite parity
    let k1 = if k == 0 { 1 } else { k - 1 };
    let p1: Vec<Superfunction> = if rng.gen_bool(0.5) {
        (0..rng.gen_range(1..=2)).map(|_| random::homogeneous(rng, ring, rank, k1)).collect()
    } else {
        Vec::new()
    };
    TimeDependentSection::new(ring, rank, p0, p1).expect("compatible parts")
}

/// For divergence-free `D` the Lie form and the divergence form coincide;
/// for any `D` they differ by `(-1)^{|D||ρ|} ρ ∧ div(D)`.
pub fn continuity_forms(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    let flat: Vec<Instance> = instances.iter().filter(|i| i.is_flat()).cloned().collect();
    run(
        "continuity_forms",
        "(d/dt + d/ds) rho + (-1)^{|D||rho|} div^xi(rho D) = (d/dt + d/ds) rho + D(rho) for div-free D",
        seed,
        if flat.is_empty() { 0 } else { cases },
        |i, rng| {
            let inst = pick(&flat, i);
            let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let conn = inst.data.connection();
            let (ring, r) = (conn.ring(), conn.rank());
            let h = random::any_homogeneous(rng, ring, r);
            let d = inst.form.hamiltonian_field(&h).map_err(err)?;
            let rho = random_density(rng, ring, r);
            let res = continuity_residual(&rho, &d, &op).map_err(err)?;
            ensure(res.divergence_of_field.is_zero(), || format!("{}: div(D_h) = {} for h = {h}", inst.name, res.divergence_of_field))?;
            ensure(res.forms_related, || format!("{}: forms not related for rho = {rho}", inst.name))?;
            ensure(res.forms_agree, || format!("{}: forms differ for rho = {rho}, h = {h}", inst.name))?;
            // a general field still satisfies the relation
            let e = random::derivation(rng, conn);
            let res = continuity_residual(&rho, &e, &op).map_err(err)?;
            ensure(res.forms_related, || format!("{}: forms not related for D = {e}", inst.name))
        },
    )
}

/// `(∂_t + L_X)(f e_1∧e_2) = (∂_t f + div(fX)) e_1∧e_2` on flat rank-2 models.
pub fn classical_reduction(seed: u64, cases: u64) -> SuiteReport {
    let models = [
        Instance::new("flat chart", SymplecticData::flat(crate::algebra::Ring::chart(2), 2)).expect("valid"),
        Instance::new("flat torus", SymplecticData::flat(crate::algebra::Ring::torus(2), 2)).expect("valid"),
    ];
    run(
        "classical_reduction",
        "d f/dt + div(f X) = 0 from the graded continuity equation",
        seed,
        cases,
        |i, rng| {
            let inst = pick(&models, i);
            let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
            let ring = inst.data.ring();
            let f: Vec<CoeffFn> = (0..rng.gen_range(1..=3)).map(|_| random::coeff(rng, ring, 2)).collect();
            let x: Vec<CoeffFn> = (0..2).map(|_| random::coeff(rng, ring, 2)).collect();
            let rep = classical_reduction_demo(&f, &x, &op).map_err(err)?;
            ensure(rep.holds, || format!("{}: residual {} vs expected {}", inst.name, rep.residual, rep.expected))
        },
    )
}

/// Transported density on `T²` under a Hamiltonian field: zero residual and
/// conserved integral.
pub fn conservation(seed: u64) -> SuiteReport {
    run("conservation", "(d/dt + d/ds) int rho = 0", seed, 1, |_, _| {
        let inst = Instance::new("flat torus", SymplecticData::flat(crate::algebra::Ring::torus(2), 2)).map_err(err)?;
        let r = inst.data.ring();
        let op = DivergenceOperator::symplectic(&inst.data).map_err(err)?;
        let q = |n: i64, d: i64| Q::new(n.into(), d.into());
        let cos = |k: Vec<i64>, c: Q| CoeffFn::trig(k, c, q(0, 1));
        let top = Superfunction::blade(2, 0b11, CoeffFn::one(r));
        let d = inst.form.hamiltonian_field(&top.scale(&cos(vec![1, 0], q(1, 1)))).map_err(err)?;
        let sin_sin = &cos(vec![1, -1], q(1, 2)) + &cos(vec![1, 1], q(-1, 2));
        let rho = TimeDependentSection::new(r, 2, vec![Superfunction::from_coeff(2, cos(vec![0, 1], q(1, 1))), top.scale(&sin_sin)], vec![]).map_err(err)?;
        let rep = conservation_check(&rho, &d, &op).map_err(err)?;
        ensure(rep.conserved && rep.rho0_conserved, || format!("not conserved: {rep:?}"))
    })
}

// ---------------------------------------------------------------------------
// curvature

/// `[∇_a, ∇_b]` acts on generators by `R_{ab}` from the Christoffel formula.
pub fn curvature_oracle(instances: &[Instance], seed: u64) -> SuiteReport {
    run(
        "curvature_oracle",
        "R_ab = d_a G_b - d_b G_a + [G_a, G_b] equals the action of [nabla_a, nabla_b]",
        seed,
        instances.len() as u64,
        |i, _| {
            let inst = &instances[i as usize];
            let conn = inst.data.connection();
            let cd = curvature(&inst.data);
            let ring = conn.ring();
            let r = conn.rank();
            for a in 0..conn.dim() {
                for b in 0..conn.dim() {
                    let na = GradedDerivation::nabla_basis(conn.clone(), a);
                    let nb = GradedDerivation::nabla_basis(conn.clone(), b);
                    let c = na.commutator(&nb).map_err(err)?;
                    ensure(c.nabla_components().iter().all(Superfunction::is_zero), || format!("{}: [nabla_{a}, nabla_{b}] has a nabla part", inst.name))?;
                    let on = c.on_generators();
                    for (j, v) in on.iter().enumerate() {
                        let mut expected = Superfunction::zero(ring, r);
                        for k in 0..r {
                            let rk = cd.r(a, b).get(k, j);
                            if !rk.is_zero() {
                                expected = &expected + &Superfunction::generator(ring, r, k).map_err(err)?.scale(rk);
                            }
                        }
                        ensure(*v == expected, || format!("{}: R_({a}{b}) on e_{}", inst.name, j + 1))?;
                    }
                }
                for b in 0..conn.dim() {
                    let bab = cd.bivector(a, b);
                    ensure(bab.antisymmetry_defect().is_none(), || format!("{}: B_({a}{b}) not antisymmetric", inst.name))?;
                }
            }
            Ok(())
        },
    )
}

// ---------------------------------------------------------------------------
// algebra and derivations

pub fn algebra_laws(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    run(
        "algebra_laws",
        "graded commutativity, associativity, inverse, log/exp, mixed partials, boundary-free integral",
        seed,
        cases,
        |i, rng| {
            let inst = pick(instances, i);
            let (ring, r) = (inst.data.ring(), inst.data.rank());
            let a = random::any_homogeneous(rng, ring, r);
            let b = random::any_homogeneous(rng, ring, r);
            let c = random::any_homogeneous(rng, ring, r);
            ensure(&a * &b == (&b * &a).scale_q(&sign(parity_of(&a), parity_of(&b))), || format!("commutativity {a}, {b}"))?;
            ensure(&(&a * &b) * &c == &a * &(&b * &c), || format!("associativity {a}, {b}, {c}"))?;
            let s = random::invertible_even(rng, ring, r);
            let inv = s.invert_even().map_err(err)?;
            ensure((&s * &inv).is_one() && (&inv * &s).is_one(), || format!("inverse of {s}"))?;
            let u = random::unipotent_even(rng, ring, r);
            ensure(u.log_even().map_err(err)?.exp_nilpotent().map_err(err)? == u, || format!("exp(log({u}))"))?;
            let f = random::coeff(rng, ring, 3);
            ensure(f.partial(0).partial(1) == f.partial(1).partial(0), || format!("mixed partials of {f}"))?;
            let sum: Superfunction = [a.clone(), b.clone()].into_iter().sum();
            ensure((0..=r).map(|k| sum.grade_project(k)).sum::<Superfunction>() == sum, || "grade decomposition".into())?;
            if ring.mode == Mode::Torus {
                ensure(f.partial(0).torus_integral().map_err(err)?.is_zero(), || format!("integral of d(f) for {f}"))?;
            }
            Ok(())
        },
    )
}

pub fn derivation_laws(instances: &[Instance], seed: u64, cases: u64) -> SuiteReport {
    run(
        "derivation_laws",
        "graded Leibniz, commutator closure and Jacobi, <D; d^G s> = D(s), frame faithfulness",
        seed,
        cases,
        |i, rng| {
            let inst = pick(instances, i);
            let conn = inst.data.connection();
            let (ring, r) = (conn.ring(), conn.rank());
            let d = random::derivation(rng, conn);
            let e = random::derivation(rng, conn);
            let f = random::derivation(rng, conn);
            let a = random::any_homogeneous(rng, ring, r);
            let b = random::any_homogeneous(rng, ring, r);
            let leibniz = |x: &GradedDerivation| -> CaseResult {
                let lhs = x.apply(&(&a * &b)).map_err(err)?;
                let rhs = &(&x.apply(&a).map_err(err)? * &b) + &(&a * &x.apply(&b).map_err(err)?).scale_q(&sign(dparity(x), parity_of(&a)));
                ensure(lhs == rhs, || format!("{}: Leibniz for {x} on {a}, {b}", inst.name))
            };
            leibniz(&d)?;
            let de = d.commutator(&e).map_err(err)?;
            leibniz(&de)?;
            // [D, E] = D∘E - (-1)^{|D||E|} E∘D on a sample
            let direct = &d.apply(&e.apply(&a).map_err(err)?).map_err(err)?
                - &e.apply(&d.apply(&a).map_err(err)?).map_err(err)?.scale_q(&sign(dparity(&d), dparity(&e)));
            ensure(de.apply(&a).map_err(err)? == direct, || format!("{}: commutator action", inst.name))?;
            // [D,[E,F]] = [[D,E],F] + (-1)^{|D||E|}[E,[D,F]]
            let lhs = d.commutator(&e.commutator(&f).map_err(err)?).map_err(err)?;
            let rhs = de
                .commutator(&f)
                .map_err(err)?
                .add(&e.commutator(&d.commutator(&f).map_err(err)?).map_err(err)?.map_components(|c| c.scale_q(&sign(dparity(&d), dparity(&e)))))
                .map_err(err)?;
            ensure(lhs == rhs, || format!("{}: commutator Jacobi", inst.name))?;
            ensure(pair(&d, &d_graded(conn, &a).map_err(err)?).map_err(err)? == d.apply(&a).map_err(err)?, || format!("{}: pairing", inst.name))?;
            let rebuilt = GradedDerivation::from_action(conn.clone(), (0..conn.dim()).map(|k| d.nabla_components()[k].clone()).collect(), d.on_generators()).map_err(err)?;
            ensure(rebuilt == d, || format!("{}: frame reassembly", inst.name))
        },
    )
}

/// Every suite, as run by the `props` command.
pub fn all_suites(instances: &[Instance], seed: u64, cases: u64) -> Vec<SuiteReport> {
    vec![
        algebra_laws(instances, seed, cases),
        derivation_laws(instances, seed, cases),
        curvature_oracle(instances, seed),
        bracket_laws(instances, seed, cases),
        divergence_axiom(instances, seed, cases),
        divergence_leibniz(instances, seed, cases),
        basic_divergences(instances, seed),
        integral_oracle(instances, seed, cases),
        rescaling(instances, seed, cases),
        unimodularity(instances, seed, 20),
        class_invariance(instances, seed, cases),
        continuity_forms(instances, seed, cases),
        classical_reduction(seed, cases.clamp(10, 50)),
        conservation(seed),
    ]
}
