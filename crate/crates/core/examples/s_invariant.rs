//! The S tensor does not change when the horizontal connection is replaced
//! by a semi-symmetric one, whatever the one-form.

use srclab::curvature::s_tensor;
use srclab::{builtin, koszul_connection, schouten_curvature, semi_connection};

fn main() -> srclab::Result<()> {
    let e = builtin("curved-metric-l3")?;
    let nabla = koszul_connection(&e.spec);
    for (name, pi) in &e.pi_variants {
        let d = semi_connection(&e.spec, pi.clone())?;
        let mut worst = 0.0_f64;
        let mut size = 0.0_f64;
        for p in e.spec.sample_points(10, 3) {
            let s = s_tensor(&schouten_curvature(&nabla, &p)?)?;
            let sb = s_tensor(&schouten_curvature(&d, &p)?)?;
            worst = worst.max(sb.max_abs_diff(&s));
            size = size.max(s.max_abs());
        }
        println!("{name:<8} max|S| = {size:.3e}  max|Sbar - S| = {worst:.2e}");
    }
    Ok(())
}
