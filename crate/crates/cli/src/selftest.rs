//! `sll selftest`: the seeded property suites with a pass/fail summary.

use serde_json::{json, Value};

use sll_core::report::envelope;
use sll_core::suite::{self, SuiteOutcome};
use sll_core::Result;

fn outcome(o: &SuiteOutcome) -> Value {
    json!({
        "name": o.name,
        "cases": o.cases,
        "skipped": o.skipped,
        "passed": o.passed(),
        "failures": o.failures,
    })
}

pub fn run(seed: u64, cases: usize) -> Result<Value> {
    let mut suites = vec![
        suite::equal_weight_dimensions(6)?,
        suite::quotient_identity_suite(seed, cases),
        suite::minkowski_suite(seed, cases, 4)?,
        suite::bad_set_suite(seed, cases.min(20), 10_000)?,
        suite::dani_rational_suite(seed, cases.min(20), 50)?,
    ];
    let mut density = SuiteOutcome { name: "zeta_density".into(), ..Default::default() };
    for (dim, hw, lo, hi) in [(2usize, 200i64, 0.98, 1.02), (3, 50, 0.97, 1.03)] {
        let r = suite::zeta_ratio(dim, hw)?;
        density.cases += 1;
        if !(lo..=hi).contains(&r) {
            density.failures.push(format!("Z^{dim}, half-width {hw}: ratio {r}"));
        }
    }
    suites.push(density);
    let passed = suites.iter().all(SuiteOutcome::passed);
    let config = json!({ "command": "selftest", "seed": seed, "cases": cases });
    Ok(envelope(config, json!({ "passed": passed, "suites": suites.iter().map(outcome).collect::<Vec<_>>() })))
}
