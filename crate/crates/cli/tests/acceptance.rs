//! Acceptance run: one PASS/FAIL line per criterion with its wall time.
//!
//! `cargo test -p sll --test acceptance -- --nocapture`
//!
//! Built with `harness = false`, so the lines reach stdout directly. The
//! process exits nonzero when any criterion fails or overruns its limit.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use sll_core::flow::{FlowTime, WeightVector};
use sll_core::fractal::{
    self, box_dimension_proxy, child_candidates, condition_check, condition_check_wedge, cover_count, expand_tree,
    largeness_report, CandidateOracle, ConstructionParams, FractalTree, TimeOffset,
};
use sll_core::scalar::{format_rational, int, rat, Rational};
use sll_core::suite;

const SEED: u64 = 20240601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(id: &str, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let ok = out.ok && took < limit;
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("{id} {verdict} {title} [{:.2}s / limit {}s] {}", took.as_secs_f64(), limit.as_secs(), out.detail);
    ok
}

fn ac1() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_sll");
    let o = Command::new(bin).args(["dimension", "--weights", "1/2,1/2"]).output().expect("run sll");
    let text = String::from_utf8_lossy(&o.stdout).trim().to_string();
    if !o.status.success() || text != "4/3" {
        return check(false, format!("cli printed {text:?}"));
    }
    match suite::equal_weight_dimensions(6) {
        Ok(s) if s.passed() => pass(format!("cli 4/3; d^2/(d+1) exact for d = 2..6 ({} cases)", s.cases)),
        Ok(s) => check(false, s.failures.join("; ")),
        Err(e) => check(false, e.to_string()),
    }
}

fn ac2() -> Outcome {
    let p = ConstructionParams::desk_default();
    let limit = fractal::growth_quotient_limit(&p.w);
    if limit != rat(2, 5) {
        return check(false, format!("symbolic limit {}", format_rational(&limit)));
    }
    let c = match fractal::cor24_limit(&p, &[1000]) {
        Ok(c) => c,
        Err(e) => return check(false, e.to_string()),
    };
    let q = &c.quotients[0].1;
    // whole enclosure within 1/100 of the limit
    let worst = (q.mid() - &limit).abs() + q.width() / int(2);
    let close = worst < rat(1, 100);
    let ident = suite::quotient_identity_suite(SEED, 100);
    check(
        close && ident.passed(),
        format!(
            "quotient at n = 1000 is {:.6} (limit 2/5, worst gap {:.2e}); identity {}/{} exact",
            q.to_f64(),
            sll_core::scalar::rational::to_f64(&worst),
            ident.cases - ident.failures.len(),
            ident.cases
        ),
    )
}

fn ac3() -> Outcome {
    let r2 = suite::zeta_ratio(2, 200);
    let r3 = suite::zeta_ratio(3, 50);
    match (r2, r3) {
        (Ok(a), Ok(b)) => check(
            (0.98..=1.02).contains(&a) && (0.97..=1.03).contains(&b),
            format!("Z^2 hw 200: {a:.5} in [0.98, 1.02]; Z^3 hw 50: {b:.5} in [0.97, 1.03]"),
        ),
        (Err(e), _) | (_, Err(e)) => check(false, e.to_string()),
    }
}

fn suite_line(r: sll_core::Result<suite::SuiteOutcome>, cases: usize) -> Outcome {
    match r {
        Ok(s) => check(
            s.passed() && s.cases == cases,
            if s.failures.is_empty() {
                format!("{} cases, {} skipped", s.cases, s.skipped)
            } else {
                s.failures.join("; ")
            },
        ),
        Err(e) => check(false, e.to_string()),
    }
}

/// d = 2, lambda = 2, e^(t_1) = 2^3, e^(t_2) = 2^9.
fn tiny_params() -> ConstructionParams {
    let w = WeightVector::new(vec![rat(3, 5), rat(2, 5)]).expect("weights");
    let t = FlowTime::new(2, int(3)).expect("time");
    ConstructionParams::new(w, rat(1, 2), t, rat(1, 4), TimeOffset::grid(int(0))).expect("params")
}

fn ac7(tree: &FractalTree) -> Outcome {
    let p = &tree.params;
    let mut notes = Vec::new();
    let mut ok = true;

    // (a) every node against the wedge-power route
    let mut disagreements = 0usize;
    for node in tree.nodes.iter().skip(1) {
        let a = condition_check(&node.tau, node.depth, p);
        let b = condition_check_wedge(&node.tau, node.depth, p);
        match (a, b) {
            (Ok(a), Ok(b)) if a == b && b.accepted() => {}
            _ => disagreements += 1,
        }
    }
    // rejected candidates too, at depth 1
    let root = vec![Rational::zero(); p.d()];
    let cands = child_candidates(&root, 1, p, 1_000_000).unwrap_or_default();
    let scanned = CandidateOracle::scan(&root, 1, p, &int(1)).unwrap_or_default();
    let same_cands = !cands.is_empty() && cands == scanned;
    for c in &cands {
        let tau = c.tau();
        if condition_check(&tau, 1, p).ok() != condition_check_wedge(&tau, 1, p).ok() {
            disagreements += 1;
        }
    }
    ok &= disagreements == 0 && same_cands;
    notes.push(format!("routes disagree on {disagreements} of {} checks", tree.nodes.len() - 1 + cands.len()));

    // (b) nesting and sibling disjointness, (c) mass per level
    let rep = match fractal::tree_report(tree) {
        Ok(r) => r,
        Err(e) => return check(false, e.to_string()),
    };
    for key in ["nested", "siblings_disjoint", "anchor_in_window", "parent_links", "mass_one_per_level"] {
        ok &= rep.conclusions.get(key) == Some(&true);
    }
    ok &= (0..tree.levels.len()).all(|n| tree.level_mass(n) == Rational::from_integer(BigInt::from(1)));
    ok &= tree.levels.last().is_some_and(|l| !l.is_empty());
    let sizes: Vec<String> = tree.levels.iter().map(|l| l.len().to_string()).collect();
    notes.push(format!("levels [{}], nested/disjoint/mass exact", sizes.join(", ")));

    // reported only
    if let Ok(labels) = largeness_report(p, 8) {
        let held: Vec<&str> =
            labels.iter().filter(|(_, l)| *l == fractal::Largeness::Holds).map(|(k, _)| k.as_str()).collect();
        notes.push(format!("largeness holds: [{}]", held.join(",")));
    }
    for n in 1..tree.levels.len() as u64 {
        let kids: Vec<usize> = tree.levels[(n - 1) as usize].iter().map(|&i| tree.nodes[i].children.len()).collect();
        let (lo, hi) = fractal::child_count_window(p, n);
        notes.push(format!(
            "depth {n} child counts {}..{} vs window [{lo:.3}, {hi:.1}]",
            kids.iter().min().unwrap_or(&0),
            kids.iter().max().unwrap_or(&0)
        ));
    }
    check(ok, notes.join("; "))
}

fn ac8(tree: &FractalTree) -> Outcome {
    let d = tree.params.d() as f64;
    let mut counts = Vec::new();
    let mut proxies = Vec::new();
    for n in 0..tree.levels.len() as u64 {
        match (cover_count(tree, n), box_dimension_proxy(tree, n)) {
            (Ok(c), Ok(x)) => {
                counts.push(c);
                proxies.push(x);
            }
            (Err(e), _) | (_, Err(e)) => return check(false, e.to_string()),
        }
    }
    let monotone = counts.windows(2).all(|w| w[0] <= w[1]);
    let bounded = proxies.iter().all(|&x| x <= d);
    let dim = fractal::dimension_lower_bound(&tree.params.w);
    check(
        monotone && bounded,
        format!(
            "cover counts {counts:?}, proxies {:?} <= {d}; lower bound for Sing(w) {}",
            proxies.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>(),
            format_rational(&dim)
        ),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= run("AC1", "dimension formula", secs(1), ac1);
    all &= run("AC2", "limit quotient and weight identity", secs(10), ac2);
    all &= run("AC3", "primitive point density", secs(30), ac3);
    all &= run("AC4", "Minkowski suite", secs(60), || suite_line(suite::minkowski_suite(SEED, 200, 4), 200));
    all &= run("AC5", "bad-set enumeration orders", secs(120), || {
        suite_line(suite::bad_set_suite(SEED, 100, 100_000), 100)
    });
    all &= run("AC6", "rational flow orbits", secs(60), || suite_line(suite::dani_rational_suite(SEED, 20, 50), 20));

    let mut tree = None;
    all &= run("AC7", "tree construction", secs(300), || match expand_tree(&tiny_params(), 2, 10_000_000) {
        Ok(t) => {
            let out = ac7(&t);
            tree = Some(t);
            out
        }
        Err(e) => check(false, e.to_string()),
    });
    all &= run("AC8", "cover count proxy", secs(60), || match &tree {
        Some(t) => ac8(t),
        None => check(false, "no tree"),
    });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
