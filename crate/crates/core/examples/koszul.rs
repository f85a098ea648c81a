//! Koszul coefficients of the horizontal connection on a non-constant metric.

use srclab::{koszul_connection, parse_manifold};

const SPEC: &str = "\
manifold warped plane
dim 3
hdim 2
coords x y z
hframe
  X = dx
  Y = dy
vframe
  Z = dz
metric
  1 + x^2, 0
  0, 1
";

fn main() -> srclab::Result<()> {
    let spec = parse_manifold(SPEC)?;
    let nabla = koszul_connection(&spec);
    for x in [0.0, 0.5, 1.0] {
        let c = nabla.coefficients_at(&[x, 0.0, 0.0])?;
        println!(
            "x = {x}: {{11^1}} = {:.6}  expected x/(1+x^2) = {:.6}",
            c[[0, 0, 0]],
            x / (1.0 + x * x)
        );
    }
    Ok(())
}
