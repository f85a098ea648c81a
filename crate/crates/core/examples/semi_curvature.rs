//! Semi-symmetric connection on H2 with constant one-form: curvatures,
//! characteristic tensor and the scalar relation R = K + 2(l-1) alpha.

use srclab::curvature::curvature_shift;
use srclab::{builtin, characteristic_tensor, schouten_curvature, semi_connection, koszul_connection, OneFormData};

fn main() -> srclab::Result<()> {
    let e = builtin("heisenberg2")?;
    let pi = OneFormData::constant(&[1.0, 0.0, 0.0, 0.0]);
    let p = [0.1, 0.2, -0.3, 0.4, 0.5];

    let k = schouten_curvature(&koszul_connection(&e.spec), &p)?;
    let d = semi_connection(&e.spec, pi.clone())?;
    let r = schouten_curvature(&d, &p)?;
    let ct = characteristic_tensor(&e.spec, &pi, &p)?;

    println!("K = {}  R = {}  alpha = {}", k.scalar, r.scalar, ct.alpha);
    println!("R^4_343 = {}", r.curv[[2, 3, 2, 3]]);
    println!("pi_ik diagonal = {:?}", (0..4).map(|i| ct.pi_lower[[i, i]]).collect::<Vec<_>>());

    let shift = curvature_shift(&ct, &k.gram);
    let mut worst = 0.0_f64;
    for (a, (b, s)) in r.curv.as_slice().iter().zip(k.curv.as_slice().iter().zip(shift.as_slice())) {
        worst = worst.max((a - b - s).abs());
    }
    println!("max |R - (K + P)| = {worst:.2e}");
    Ok(())
}
