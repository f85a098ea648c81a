//! Lazily evaluated scalar and vector fields.
//!
//! A field knows the highest jet order it can deliver. Derived fields record
//! what they consume from their inputs, so asking for more than the base
//! expressions provide is an [`Error::OrderExhausted`], never a silent
//! truncation.

use crate::error::{Error, Result};
use crate::expr::{jet_eval, Expression};
use crate::jet::{Jet, MAX_ORDER};

pub trait ScalarField {
    /// Highest order at which [`ScalarField::jet`] succeeds.
    fn max_order(&self) -> u8;

    fn jet(&self, point: &[f64], order: u8) -> Result<Jet>;

    fn value(&self, point: &[f64]) -> Result<f64> {
        Ok(self.jet(point, 0)?.value())
    }
}

pub trait VectorField {
    fn max_order(&self) -> u8;

    /// Coordinate components `X^k` as jets of the requested order.
    fn components(&self, point: &[f64], order: u8) -> Result<Vec<Jet>>;
}

impl ScalarField for Expression {
    fn max_order(&self) -> u8 {
        MAX_ORDER
    }

    fn jet(&self, point: &[f64], order: u8) -> Result<Jet> {
        jet_eval(self, point, order)
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn max_order(&self) -> u8 {
        (**self).max_order()
    }
    fn jet(&self, point: &[f64], order: u8) -> Result<Jet> {
        (**self).jet(point, order)
    }
}

impl<V: VectorField + ?Sized> VectorField for &V {
    fn max_order(&self) -> u8 {
        (**self).max_order()
    }
    fn components(&self, point: &[f64], order: u8) -> Result<Vec<Jet>> {
        (**self).components(point, order)
    }
}

/// Coordinate vector field given by component expressions.
impl VectorField for [Expression] {
    fn max_order(&self) -> u8 {
        MAX_ORDER
    }

    fn components(&self, point: &[f64], order: u8) -> Result<Vec<Jet>> {
        if self.len() != point.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: point.len(),
            });
        }
        self.iter().map(|e| jet_eval(e, point, order)).collect()
    }
}

impl VectorField for Vec<Expression> {
    fn max_order(&self) -> u8 {
        MAX_ORDER
    }

    fn components(&self, point: &[f64], order: u8) -> Result<Vec<Jet>> {
        self.as_slice().components(point, order)
    }
}

pub(crate) fn require_order(what: &str, order: u8, available: u8) -> Result<()> {
    if order > available {
        return Err(Error::OrderExhausted(format!(
            "{what} supports jet order <= {available}, requested {order}"
        )));
    }
    Ok(())
}

/// `X(f)`: the derivative of a scalar field along a vector field.
#[derive(Clone, Debug)]
pub struct DirectionalDerivative<F, V> {
    field: F,
    direction: V,
}

pub fn directional_derivative<F: ScalarField, V: VectorField>(
    field: F,
    direction: V,
) -> DirectionalDerivative<F, V> {
    DirectionalDerivative { field, direction }
}

impl<F: ScalarField, V: VectorField> ScalarField for DirectionalDerivative<F, V> {
    fn max_order(&self) -> u8 {
        self.field
            .max_order()
            .saturating_sub(1)
            .min(self.direction.max_order())
    }

    fn jet(&self, point: &[f64], order: u8) -> Result<Jet> {
        if self.field.max_order() == 0 {
            return Err(Error::OrderExhausted(
                "base field carries no derivatives".into(),
            ));
        }
        require_order("directional derivative", order, self.max_order())?;
        let f = self.field.jet(point, order + 1)?;
        let dir = self.direction.components(point, order)?;
        f.directional(&dir)
    }
}

/// Central-difference check of the jet-based derivative of `field` along
/// `direction` at `point`.
///
/// Returns `|jet - fd| / max(1, |jet|)`.
pub fn fd_crosscheck<F: ScalarField, V: VectorField>(
    field: &F,
    point: &[f64],
    direction: &V,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step {step} must be positive")));
    }
    let exact = directional_derivative(field, direction).value(point)?;
    let v: Vec<f64> = direction
        .components(point, 0)?
        .iter()
        .map(Jet::value)
        .collect();
    let shifted = |s: f64| -> Vec<f64> { point.iter().zip(&v).map(|(p, d)| p + s * d).collect() };
    let fp = field.value(&shifted(step))?;
    let fm = field.value(&shifted(-step))?;
    let fd = (fp - fm) / (2.0 * step);
    Ok((exact - fd).abs() / exact.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord_field(n: usize, k: usize) -> Vec<Expression> {
        (0..n)
            .map(|i| Expression::constant(if i == k { 1.0 } else { 0.0 }))
            .collect()
    }

    #[test]
    fn derivative_of_square() {
        let f = Expression::coord(0).powi(2);
        let d = directional_derivative(&f, coord_field(1, 0));
        for x in [-1.5, 0.0, 0.25, 3.0] {
            let j = d.jet(&[x], 1).unwrap();
            assert_eq!(j.value(), 2.0 * x);
            assert_eq!(j.gradient(), &[2.0]);
        }
    }

    #[test]
    fn heisenberg_z_along_x1() {
        // X1 = dx - (y/2) dz applied to z gives -y/2.
        let x1 = vec![
            Expression::constant(1.0),
            Expression::constant(0.0),
            -(Expression::coord(1) / 2.0),
        ];
        let d = directional_derivative(Expression::coord(2), &x1);
        let p = [0.4, -0.6, 0.2];
        let j = d.jet(&p, 1).unwrap();
        assert_eq!(j.value(), 0.3);
        assert_eq!(j.gradient(), &[0.0, -0.5, 0.0]);
    }

    #[test]
    fn constant_field_has_zero_derivative() {
        let d = directional_derivative(
            Expression::constant(7.0),
            vec![Expression::coord(1), Expression::coord(0).sin()],
        );
        let j = d.jet(&[0.3, 0.8], 1).unwrap();
        assert_eq!(j.value(), 0.0);
        assert!(j.gradient().iter().all(|g| *g == 0.0));
    }

    #[test]
    fn nested_derivative_exhausts_order() {
        let f = Expression::coord(0).powi(3);
        let d1 = directional_derivative(&f, coord_field(1, 0));
        let d2 = directional_derivative(&d1, coord_field(1, 0));
        assert_eq!(d2.max_order(), 0);
        assert_eq!(d2.value(&[2.0]).unwrap(), 12.0);
        assert!(matches!(d2.jet(&[2.0], 1), Err(Error::OrderExhausted(_))));
        let d3 = directional_derivative(&d2, coord_field(1, 0));
        assert!(matches!(d3.jet(&[2.0], 0), Err(Error::OrderExhausted(_))));
    }

    #[test]
    fn fd_crosscheck_examples() {
        let c = Expression::constant(3.0);
        let dir = vec![Expression::constant(1.0), Expression::coord(0)];
        assert_eq!(fd_crosscheck(&c, &[0.2, 0.4], &dir, 1e-5).unwrap(), 0.0);

        let sin = Expression::coord(0).sin();
        let r = fd_crosscheck(&sin, &[0.7], &coord_field(1, 0), 1e-5).unwrap();
        assert!(r <= 1e-8, "residual {r}");

        let poly = Expression::coord(0) * Expression::coord(1) + Expression::coord(1).powi(2);
        let r = fd_crosscheck(&poly, &[0.3, -0.9], &dir, 1e-5).unwrap();
        assert!(r <= 1e-9, "residual {r}");

        assert!(fd_crosscheck(&poly, &[0.3, -0.9], &dir, 0.0).is_err());
    }
}
