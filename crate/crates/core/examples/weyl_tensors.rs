//! Conformal and projective tensors of both connections, and how their
//! differences compare with the closed forms.

use srclab::curvature::{conformal_difference_printed, conformal_tensor, projective_difference, projective_tensor};
use srclab::{builtin, characteristic_tensor, koszul_connection, schouten_curvature, semi_connection};

fn main() -> srclab::Result<()> {
    let e = builtin("heisenberg2")?;
    let p = [0.3, -0.1, 0.2, 0.6, -0.4];
    let nabla = koszul_connection(&e.spec);
    let k = schouten_curvature(&nabla, &p)?;
    for name in ["const", "trig", "alpha-free", "conformal-gradient"] {
        let pi = e.pi(name).expect("catalog variant");
        let r = schouten_curvature(&semi_connection(&e.spec, pi.clone())?, &p)?;
        let ct = characteristic_tensor(&e.spec, pi, &p)?;

        let dw = projective_tensor(&r)?.sub(&projective_tensor(&k)?);
        let dc = conformal_tensor(&r)?.sub(&conformal_tensor(&k)?);
        let w_formula = projective_difference(&ct, &k.gram);
        let c_formula = conformal_difference_printed(&ct, &k.gram)?;
        println!(
            "{name:<18} alpha = {:+.4}  |Wbar-W - formula| = {:.1e}  |Cbar-C| = {:.1e}  |C formula| = {:.3}",
            ct.alpha,
            dw.max_abs_diff(&w_formula),
            dc.max_abs(),
            c_formula.max_abs()
        );
    }
    Ok(())
}
