//! Truncated multivariate Taylor jets (value, gradient, Hessian).
//!
//! A [`Jet`] of order `k` carries the derivatives of a scalar function up to
//! order `k` at one point of `R^n`. Arithmetic propagates them exactly by the
//! truncated Taylor rules, so every derivative that reaches a curvature
//! formula is exact up to floating-point rounding.
//!
//! Binary operators require both operands to have the same ambient dimension
//! and the same order and panic otherwise; use [`Jet::truncate`] to align
//! orders explicitly.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Highest supported jet order.
pub const MAX_ORDER: u8 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    n: usize,
    order: u8,
    value: f64,
    grad: Vec<f64>,
    /// Packed upper triangle, row by row.
    hess: Vec<f64>,
}

#[inline]
fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

impl Jet {
    /// A constant function.
    pub fn constant(n: usize, order: u8, value: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order above {MAX_ORDER}");
        Self {
            n,
            order,
            value,
            grad: if order >= 1 { vec![0.0; n] } else { Vec::new() },
            hess: if order >= 2 {
                vec![0.0; packed_len(n)]
            } else {
                Vec::new()
            },
        }
    }

    /// The coordinate function `x_index`, evaluated at `value`.
    pub fn variable(n: usize, order: u8, index: usize, value: f64) -> Self {
        assert!(index < n, "coordinate index out of range");
        let mut j = Self::constant(n, order, value);
        if order >= 1 {
            j.grad[index] = 1.0;
        }
        j
    }

    pub(crate) fn first_order(value: f64, grad: Vec<f64>) -> Self {
        Self {
            n: grad.len(),
            order: 1,
            value,
            grad,
            hess: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Gradient; empty for order-0 jets.
    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    /// Second partial `∂_i ∂_j`; zero when the jet carries no Hessian.
    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        if self.order < 2 {
            return 0.0;
        }
        self.hess[packed_index(self.n, i, j)]
    }

    pub fn hessian_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.hessian(i, j)).collect())
            .collect()
    }

    /// Drop derivative data above `order`.
    pub fn truncate(&self, order: u8) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self {
            n: self.n,
            order,
            value: self.value,
            grad: if order >= 1 { self.grad.clone() } else { Vec::new() },
            hess: Vec::new(),
        }
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.n, other.n, "jet dimension mismatch");
        assert_eq!(self.order, other.order, "jet order mismatch");
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            order: self.order,
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|h| h * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.value += s;
        out
    }

    /// `a * self + b * other`, the fused form used by contractions.
    pub fn axpy(&self, a: f64, other: &Self, b: f64) -> Self {
        self.check_compat(other);
        Self {
            n: self.n,
            order: self.order,
            value: a * self.value + b * other.value,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            hess: self
                .hess
                .iter()
                .zip(&other.hess)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// Apply a univariate function given its value and first two derivatives
    /// at `self.value()`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(self.n, self.order, f0);
        if self.order >= 1 {
            for (o, g) in out.grad.iter_mut().zip(&self.grad) {
                *o = f1 * g;
            }
        }
        if self.order >= 2 {
            let n = self.n;
            for i in 0..n {
                for j in i..n {
                    let k = packed_index(n, i, j);
                    out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
                }
            }
        }
        out
    }

    pub fn try_recip(&self) -> Result<Self> {
        let v = self.value;
        if v == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.try_recip()?)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn try_ln(&self) -> Result<Self> {
        let v = self.value;
        if v <= 0.0 || v.is_nan() {
            return Err(Error::Domain(format!("log of non-positive value {v}")));
        }
        Ok(self.compose(v.ln(), 1.0 / v, -1.0 / (v * v)))
    }

    pub fn try_sqrt(&self) -> Result<Self> {
        let v = self.value;
        if v < 0.0 || v.is_nan() {
            return Err(Error::Domain(format!("sqrt of negative value {v}")));
        }
        if v == 0.0 && self.order >= 1 {
            return Err(Error::Domain(
                "sqrt is not differentiable at 0".into(),
            ));
        }
        let s = v.sqrt();
        Ok(self.compose(s, 0.5 / s, -0.25 / (s * v)))
    }

    /// Integer power. Negative exponents need a non-zero base.
    pub fn try_powi(&self, p: i32) -> Result<Self> {
        let v = self.value;
        match p {
            0 => Ok(Self::constant(self.n, self.order, 1.0)),
            1 => Ok(self.clone()),
            _ => {
                if p < 0 && v == 0.0 {
                    return Err(Error::Domain(format!("zero raised to power {p}")));
                }
                let pf = f64::from(p);
                let f2 = if p == 2 {
                    2.0
                } else {
                    pf * (pf - 1.0) * v.powi(p - 2)
                };
                Ok(self.compose(v.powi(p), pf * v.powi(p - 1), f2))
            }
        }
    }

    /// Derivative along a vector field whose coordinate components are the
    /// jets in `direction`.
    ///
    /// The result has order `min(self.order - 1, min direction order)` and its
    /// own gradient includes the product-rule term from the varying
    /// direction.
    pub fn directional(&self, direction: &[Jet]) -> Result<Jet> {
        if direction.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: direction.len(),
            });
        }
        if self.order == 0 {
            return Err(Error::OrderExhausted(
                "directional derivative of an order-0 jet".into(),
            ));
        }
        let dir_order = direction.iter().map(Jet::order).min().unwrap_or(MAX_ORDER);
        let order = (self.order - 1).min(dir_order);
        let n = self.n;
        let mut out = Jet::constant(n, order, 0.0);
        out.value = direction
            .iter()
            .zip(&self.grad)
            .map(|(d, g)| d.value * g)
            .sum();
        if order >= 1 {
            for l in 0..n {
                let mut acc = 0.0;
                for (m, d) in direction.iter().enumerate() {
                    acc += d.grad[l] * self.grad[m] + d.value * self.hessian(l, m);
                }
                out.grad[l] = acc;
            }
        }
        Ok(out)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.axpy(1.0, rhs, 1.0)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.axpy(1.0, rhs, -1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.check_compat(rhs);
        let n = self.n;
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet::constant(n, self.order, a * b);
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let k = packed_index(n, i, j);
                    out.hess[k] = a * rhs.hess[k]
                        + b * self.hess[k]
                        + self.grad[i] * rhs.grad[j]
                        + self.grad[j] * rhs.grad[i];
                }
            }
        }
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

/// `Σ_k a_k b_k` over jets of equal order. Returns a zero jet of the given
/// shape when the slices are empty.
pub fn dot(a: &[Jet], b: &[Jet], n: usize, order: u8) -> Jet {
    let mut acc = Jet::constant(n, order, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}
