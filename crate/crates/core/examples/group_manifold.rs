//! Group manifolds: Carnot groups with the horizontal connection, and a
//! hyperbolic one-form that makes D flat with parallel torsion.

use srclab::builtin;
use srclab::verifier::{check_flatness_criterion, check_group_manifold, SuiteConfig};

fn main() -> srclab::Result<()> {
    let cfg = SuiteConfig::default();
    for name in ["heisenberg1", "heisenberg2", "free-step2-l3", "curved-metric-l3"] {
        let e = builtin(name)?;
        let ev = check_group_manifold(&e.spec, None, &cfg);
        println!("{name:<17} nabla: {:?} (max R {:.1e}, max DT {:.1e})", ev.verdict, ev.max_curvature, ev.max_torsion_derivative);
    }

    let e = builtin("involutive-l3")?;
    for v in ["const", "hyperbolic"] {
        let pi = e.pi(v);
        let ev = check_group_manifold(&e.spec, pi, &cfg);
        let flat = check_flatness_criterion(&e.spec, pi, &cfg)?;
        println!(
            "involutive-l3 D[{v}]: {:?}; R = 0 at {} of {} samples, implication holds: {}",
            ev.verdict,
            flat.points.iter().filter(|p| p.r_zero).count(),
            flat.points.len(),
            flat.verdict
        );
    }
    Ok(())
}
