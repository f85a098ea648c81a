//! Matrix helpers over jets. Factorizations run on the value matrix through
//! nalgebra; derivatives of inverses are propagated by hand.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::jet::Jet;

pub(crate) type JetMatrix = Vec<Vec<Jet>>;

pub(crate) fn values(m: &JetMatrix) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| m[i][j].value())
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Inverse of a square jet matrix given the inverse of its value matrix.
///
/// Only orders 0 and 1 are supported; uses `∂(A⁻¹) = -A⁻¹ (∂A) A⁻¹`.
pub(crate) fn inverse_jets(m: &JetMatrix, inv: &DMatrix<f64>, order: u8) -> Result<JetMatrix> {
    let size = m.len();
    let n = m[0][0].dim();
    if order > 1 {
        return Err(Error::OrderExhausted(
            "matrix inverse jets are limited to order 1".into(),
        ));
    }
    if order == 0 {
        return Ok((0..size)
            .map(|i| (0..size).map(|j| Jet::constant(n, 0, inv[(i, j)])).collect())
            .collect());
    }
    let mut grads = vec![vec![vec![0.0; n]; size]; size];
    for l in 0..n {
        let d = DMatrix::from_fn(size, size, |i, j| m[i][j].gradient()[l]);
        let dinv = -(inv * d * inv);
        for (i, row) in grads.iter_mut().enumerate() {
            for (j, g) in row.iter_mut().enumerate() {
                g[l] = dinv[(i, j)];
            }
        }
    }
    let out = grads
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, g)| Jet::first_order(inv[(i, j)], g))
                .collect()
        })
        .collect();
    Ok(out)
}

/// `A v` for a jet matrix and jet vector of equal order.
pub(crate) fn mat_vec(a: &JetMatrix, v: &[Jet]) -> Vec<Jet> {
    let n = v[0].dim();
    let order = v[0].order();
    a.iter()
        .map(|row| crate::jet::dot(row, v, n, order))
        .collect()
}

pub(crate) fn truncate_matrix(m: &JetMatrix, order: u8) -> JetMatrix {
    m.iter()
        .map(|row| row.iter().map(|j| j.truncate(order)).collect())
        .collect()
}

/// Cholesky-based SPD test and inverse of a symmetric value matrix.
pub(crate) fn spd_inverse(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let sym_ok = (0..g.nrows()).all(|i| (0..i).all(|j| g[(i, j)] == g[(j, i)]));
    if !sym_ok {
        return None;
    }
    let ch = g.clone().cholesky()?;
    Some(ch.inverse())
}

/// 2-norm condition number from the singular values.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
