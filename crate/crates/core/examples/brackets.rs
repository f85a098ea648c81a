//! Lie brackets and structure constants of the Heisenberg frame.

use srclab::{builtin, lie_bracket, snapshot, VectorField};

fn main() -> srclab::Result<()> {
    let h = builtin("heisenberg1")?.spec;
    let p = [0.2, -0.5, 1.0];
    let (x1, x2) = (&h.hframe()[0], &h.hframe()[1]);

    let b: Vec<f64> = lie_bracket(x1, x2).components(&p, 0)?.iter().map(|j| j.value()).collect();
    println!("[X1, X2] at {p:?} = {b:?}");

    let s = snapshot(&h, &p)?;
    println!("Omega_12 = {:?}", (0..2).map(|k| s.omega[[0, 1, k]]).collect::<Vec<_>>());
    println!("M_12     = {:?}", s.mcoef[[0, 1, 0]]);
    println!("rebuilt  = {:?}", s.reconstruct_bracket(0, 1));

    let h2 = builtin("heisenberg2")?.spec;
    let s2 = snapshot(&h2, &[0.1, 0.2, 0.3, 0.4, 0.5])?;
    println!("H2: M_12 = {}, M_34 = {}, M_13 = {}", s2.mcoef[[0, 1, 0]], s2.mcoef[[2, 3, 0]], s2.mcoef[[0, 2, 0]]);
    Ok(())
}
