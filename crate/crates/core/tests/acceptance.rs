//! Acceptance gate: nine exact property criteria at d = 2, r ∈ {2, 4}.
//! Prints one line per criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use graded_core::suites::{self, Instance, SuiteReport};

const SEED: u64 = 20_240_601;
const BUDGET: Duration = Duration::from_secs(60);

struct Criterion {
    number: usize,
    title: &'static str,
    reports: Vec<SuiteReport>,
    minimums: Vec<usize>,
    elapsed: Duration,
}

impl Criterion {
    fn passed(&self) -> bool {
        self.elapsed <= BUDGET
            && self.reports.iter().zip(&self.minimums).all(|(r, &min)| r.all_passed() && r.total() >= min)
    }
}

fn timed(number: usize, title: &'static str, minimums: Vec<usize>, f: impl FnOnce() -> Vec<SuiteReport>) -> Criterion {
    let start = Instant::now();
    let reports = f();
    Criterion { number, title, reports, minimums, elapsed: start.elapsed() }
}

fn flat_and_curved() -> Vec<Instance> {
    suites::standard_instances(true)
}

fn curved_only() -> Vec<Instance> {
    flat_and_curved().into_iter().filter(|i| !i.is_flat()).collect()
}

fn fuzzed() -> Vec<Instance> {
    let mut v = suites::fuzzed_instances(SEED, 10, 2);
    v.extend(suites::fuzzed_instances(SEED + 1, 4, 4));
    v
}

fn main() -> ExitCode {
    let criteria = vec![
        timed(1, "divergence axiom", vec![200], || {
            vec![suites::divergence_axiom(&flat_and_curved(), SEED, 240)]
        }),
        timed(2, "integral characterization on the torus", vec![100], || {
            vec![suites::integral_oracle(&flat_and_curved(), SEED, 120)]
        }),
        timed(3, "Leibniz rule and rescaling", vec![100, 100], || {
            let inst = fuzzed();
            vec![suites::divergence_leibniz(&inst, SEED, 120), suites::rescaling(&inst, SEED, 120)]
        }),
        timed(4, "basic divergences", vec![10], || vec![suites::basic_divergences(&fuzzed(), SEED)]),
        timed(5, "bracket laws in the curved model", vec![100], || {
            vec![suites::bracket_laws(&curved_only(), SEED, 120)]
        }),
        timed(6, "unimodularity", vec![10], || vec![suites::unimodularity(&fuzzed(), SEED, 20)]),
        timed(7, "class invariance", vec![20], || vec![suites::class_invariance(&fuzzed(), SEED, 40)]),
        timed(8, "continuity", vec![50, 10, 1], || {
            let mut inst = flat_and_curved();
            inst.extend(fuzzed());
            vec![
                suites::continuity_forms(&inst, SEED, 60),
                suites::classical_reduction(SEED, 12),
                suites::conservation(SEED),
            ]
        }),
        timed(9, "curvature oracle", vec![10], || {
            let inst: Vec<Instance> = fuzzed().into_iter().filter(|i| !i.is_flat()).collect();
            let mut inst = inst;
            inst.extend(curved_only());
            vec![suites::curvature_oracle(&inst, SEED)]
        }),
    ];

    let mut failed = 0;
    for c in &criteria {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let counts: Vec<String> = c.reports.iter().map(|r| format!("{} {}/{}", r.name, r.passed(), r.total())).collect();
        println!("[{status}] criterion {}: {} ({}; {:.1}s)", c.number, c.title, counts.join(", "), c.elapsed.as_secs_f64());
        if !c.passed() {
            failed += 1;
            for r in &c.reports {
                if !r.all_passed() {
                    println!("{r}");
                }
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
