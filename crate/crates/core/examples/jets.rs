//! Second-order jets of an expression, checked against central differences.

use srclab::{directional_derivative, fd_crosscheck, jet_eval, Expression, ScalarField};

fn main() -> srclab::Result<()> {
    let (x, y) = (Expression::coord(0), Expression::coord(1));
    // f = x^2 y + sin(x y)
    let f = x.clone().powi(2) * y.clone() + (x * y).sin();
    let p = [0.7, -0.3];

    let j = jet_eval(&f, &p, 2)?;
    println!("f      = {:.12}", j.value());
    println!("grad f = {:?}", j.gradient());
    println!("hess f = {:?}", j.hessian_matrix());

    let dx = vec![Expression::constant(1.0), Expression::constant(0.0)];
    let fx = directional_derivative(&f, &dx);
    println!("d/dx f = {:.12}", fx.value(&p)?);
    println!("fd rel = {:.2e}", fd_crosscheck(&f, &p, &dx, 1e-5)?);

    // Second derivative through the derived field.
    let fxx = directional_derivative(&fx, &dx);
    println!("d2/dx2 f = {:.12}  (hessian entry {:.12})", fxx.value(&p)?, j.hessian(0, 0));
    Ok(())
}
