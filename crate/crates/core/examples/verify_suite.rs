//! Run the full check table on every catalog entry and variant.

use srclab::frontend::catalog::all_builtins;
use srclab::{run_suite, SuiteConfig};

fn main() {
    let cfg = SuiteConfig { points: 10, ..SuiteConfig::default() };
    for e in all_builtins() {
        for (name, pi) in &e.pi_variants {
            let r = run_suite(&e.spec, Some(pi), &cfg);
            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass && !c.is_skipped()).map(|c| c.id).collect();
            let skipped = r.checks.iter().filter(|c| c.is_skipped()).count();
            println!("{:<17} {:<18} failed {:?} skipped {}", e.name, name, failed, skipped);
        }
    }
}
