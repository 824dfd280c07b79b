use std::process::ExitCode;
use std::time::Instant;

use okg_core::verify::{run_suite, Check, Tier, VerificationReport};

const SEED: u64 = 20_240_601;

/// Criterion number, title, suites, and an optional check filter.
type Criterion = (u32, &'static str, &'static [&'static str], fn(&Check) -> bool);

fn all(_: &Check) -> bool {
    true
}

fn exponent_algebra(c: &Check) -> bool {
    !c.quantity.starts_with("windowed")
}

const CRITERIA: &[Criterion] = &[
    (1, "partition of unity", &["partition"], all),
    (2, "smoothing-shift isometry", &["L2.3"], all),
    (3, "exact transference for octant products", &["L4.1"], all),
    (4, "kernel decay exponents", &["L3.2", "L3.4"], all),
    (5, "Strichartz exponent algebra", &["P3.6"], exponent_algebra),
    (6, "scaling exponents", &["L2.4-ii", "L2.4-iii"], all),
    (7, "Picard solver", &["T1.1-picard"], all),
    (8, "smoothing commutation", &["T1.1-smoothing"], all),
    (9, "scaling covariance", &["T1.1-scaling"], all),
    (10, "sinh-Gordon Taylor stability", &["T1.2-sinh"], all),
    (11, "concentrating lower bound and Sokhotski-Plemelj dichotomy", &["L5.1", "R1.3-iii"], all),
    (12, "derivatives of (μ² + r²)^α", &["A.1"], all),
];

fn describe(c: &Check) -> String {
    format!(
        "{} [{}]: measured {:.4e}, reference {:.4e}, tolerance {:.1e}, {:?}",
        c.quantity, c.parameters, c.measured, c.reference, c.tolerance, c.comparison
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let ids: Vec<&str> = CRITERIA.iter().flat_map(|c| c.2.iter().copied()).collect();
    let reports = match run_suite(&ids, Tier::Small, SEED) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: suite error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let find = |id: &str| -> &VerificationReport { reports.iter().find(|r| r.lemma_id == id).expect("suite ran") };
    let mut failed = 0;
    for &(num, title, suites, keep) in CRITERIA {
        let checks: Vec<&Check> = suites.iter().flat_map(|id| find(id).checks.iter()).filter(|c| keep(c)).collect();
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {num:>2} {verdict}: {title} ({} checks, suites {})", checks.len(), suites.join(", "));
        for c in checks.iter().filter(|c| !c.pass) {
            println!("    failed: {}", describe(c));
        }
        for id in suites {
            for n in &find(id).notes {
                println!("    note: {n}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        CRITERIA.len() - failed,
        CRITERIA.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
