//! Schouten curvature of a nonholonomic connection, its contractions, the
//! characteristic tensor of D, and the S, C, W combinations.
//!
//! Index order throughout: `curv[[i, j, k, h]]` is the `e_h` component of
//! `K(e_i, e_j) e_k`.

use crate::connection::{ConnectionField, ConnectionKind, ConnectionPoint, OneFormData};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::manifold::ManifoldSpec;
use crate::tensor::{delta, Tensor2, Tensor4};

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureBundle {
    pub kind: ConnectionKind,
    pub point: Vec<f64>,
    pub curv: Tensor4,
    /// `K_ik = K^e_iek`.
    pub ricci: Tensor2,
    /// `K = g^{ik} K_ik`.
    pub scalar: f64,
    /// `K(e_i, e_j, e_k, e_h) = g(K(e_i, e_j) e_k, e_h)`.
    pub lowered: Tensor4,
    pub gram: Tensor2,
    pub gram_inv: Tensor2,
}

impl CurvatureBundle {
    fn from_curv(kind: ConnectionKind, point: Vec<f64>, curv: Tensor4, gram: Tensor2, gram_inv: Tensor2) -> Self {
        let ell = gram.shape()[0];
        let ricci = Tensor2::from_fn([ell, ell], |[i, k]| (0..ell).map(|e| curv[[i, e, k, e]]).sum());
        let scalar = (0..ell)
            .flat_map(|i| (0..ell).map(move |k| (i, k)))
            .map(|(i, k)| gram_inv[[i, k]] * ricci[[i, k]])
            .sum();
        let lowered = Tensor4::from_fn([ell; 4], |[i, j, k, h]| {
            (0..ell).map(|m| curv[[i, j, k, m]] * gram[[m, h]]).sum()
        });
        Self {
            kind,
            point,
            curv,
            ricci,
            scalar,
            lowered,
            gram,
            gram_inv,
        }
    }

    pub fn ell(&self) -> usize {
        self.gram.shape()[0]
    }

    /// `K^e_ike = Σ_e curv[i][k][e][e]`.
    pub fn second_contraction(&self) -> Tensor2 {
        let ell = self.ell();
        Tensor2::from_fn([ell, ell], |[i, k]| (0..ell).map(|e| self.curv[[i, k, e, e]]).sum())
    }

    /// `K_j^h = K_jf g^{fh}`.
    pub fn ricci_mixed(&self) -> Tensor2 {
        raise_second(&self.ricci, &self.gram_inv)
    }
}

fn raise_second(t: &Tensor2, gram_inv: &Tensor2) -> Tensor2 {
    let ell = t.shape()[0];
    Tensor2::from_fn([ell, ell], |[j, h]| (0..ell).map(|f| t[[j, f]] * gram_inv[[f, h]]).sum())
}

/// Curvature from connection data. With `mirror`, only `i < j` is computed
/// and the rest filled by antisymmetry.
fn curvature_from(cp: &ConnectionPoint, mirror: bool) -> Result<Tensor4> {
    let ell = cp.ell();
    let nv = cp.geo.n - ell;
    let c = cp.coeff.map(Jet::value);
    let omega = cp.geo.omega.map(Jet::value);
    let m = cp.geo.mcoef.map(Jet::value);
    let lambda = cp.geo.lambda.map(Jet::value);
    let mut out = Tensor4::zeros([ell; 4]);
    for i in 0..ell {
        let j0 = if mirror { i + 1 } else { 0 };
        for j in j0..ell {
            for k in 0..ell {
                for h in 0..ell {
                    let mut v = cp.geo.along(i, &cp.coeff[[j, k, h]])?.value()
                        - cp.geo.along(j, &cp.coeff[[i, k, h]])?.value();
                    for e in 0..ell {
                        v += c[[j, k, e]] * c[[i, e, h]] - c[[i, k, e]] * c[[j, e, h]];
                        v -= omega[[i, j, e]] * c[[e, k, h]];
                    }
                    for a in 0..nv {
                        v -= m[[i, j, a]] * lambda[[a, k, h]];
                    }
                    out[[i, j, k, h]] = v;
                    if mirror {
                        out[[j, i, k, h]] = -v;
                    }
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn bundle_from(cp: &ConnectionPoint, mirror: bool) -> Result<CurvatureBundle> {
    let curv = curvature_from(cp, mirror)?;
    Ok(CurvatureBundle::from_curv(
        cp.kind,
        cp.geo.point.clone(),
        curv,
        cp.geo.gram_values(),
        cp.geo.gram_inv_values(),
    ))
}

/// Schouten curvature of `conn` at `point`.
pub fn schouten_curvature(conn: &ConnectionField<'_>, point: &[f64]) -> Result<CurvatureBundle> {
    bundle_from(&conn.evaluate(point)?, true)
}

/// Same as [`schouten_curvature`] but every `(i, j)` pair is evaluated
/// directly, for checking antisymmetry.
pub fn schouten_curvature_unmirrored(conn: &ConnectionField<'_>, point: &[f64]) -> Result<CurvatureBundle> {
    bundle_from(&conn.evaluate(point)?, false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicTensor {
    /// `π_ik = ∇_iπ_k - π_iπ_k + ½ g_ik π_hπ^h`.
    pub pi_lower: Tensor2,
    /// `π_i^h = π_ik g^{kh}`.
    pub pi_mixed: Tensor2,
    pub alpha: f64,
    /// `π_h π^h`.
    pub pi_norm2: f64,
}

pub(crate) fn characteristic_from(cp: &ConnectionPoint) -> Result<CharacteristicTensor> {
    let ell = cp.ell();
    let nabla = cp.nabla_pi()?;
    let pi = cp.pi_values();
    let up = cp.pi_up_values();
    let g = cp.geo.gram_values();
    let ginv = cp.geo.gram_inv_values();
    let pi_norm2: f64 = pi.iter().zip(&up).map(|(a, b)| a * b).sum();
    let pi_lower = Tensor2::from_fn([ell, ell], |[i, k]| {
        nabla[[i, k]] - pi[i] * pi[k] + 0.5 * g[[i, k]] * pi_norm2
    });
    let pi_mixed = raise_second(&pi_lower, &ginv);
    let alpha = (0..ell).map(|i| pi_mixed[[i, i]]).sum();
    Ok(CharacteristicTensor {
        pi_lower,
        pi_mixed,
        alpha,
        pi_norm2,
    })
}

pub fn characteristic_tensor(spec: &ManifoldSpec, pi: &OneFormData, point: &[f64]) -> Result<CharacteristicTensor> {
    let cp = ConnectionPoint::new(spec, Some(pi), ConnectionKind::SubRiemannian, point)?;
    if pi.len() != spec.ell() {
        return Err(Error::DimensionMismatch {
            expected: spec.ell(),
            got: pi.len(),
        });
    }
    characteristic_from(&cp)
}

fn require_rank(ell: usize, required: usize, what: &'static str) -> Result<()> {
    if ell < required {
        return Err(Error::RankTooSmall { ell, required, what });
    }
    Ok(())
}

/// The S-tensor template. On the ∇ bundle this is S, on the D bundle S̄.
pub fn s_tensor(b: &CurvatureBundle) -> Result<Tensor4> {
    let ell = b.ell();
    require_rank(ell, 3, "S tensor")?;
    let l = ell as f64;
    let rm = b.ricci_mixed();
    let g = &b.gram;
    let k = b.scalar;
    Ok(Tensor4::from_fn([ell; 4], |[i, j, kk, h]| {
        b.curv[[i, j, kk, h]]
            - (delta(j, h) * b.ricci[[i, kk]] - delta(i, h) * b.ricci[[j, kk]] + g[[i, kk]] * rm[[j, h]]
                - g[[j, kk]] * rm[[i, h]])
                / (l - 2.0)
            + k / ((l - 1.0) * (l - 2.0)) * (g[[i, kk]] * delta(j, h) - g[[j, kk]] * delta(i, h))
    }))
}

/// The conformal curvature template (C on ∇, C̄ on D).
pub fn conformal_tensor(b: &CurvatureBundle) -> Result<Tensor4> {
    let ell = b.ell();
    require_rank(ell, 3, "conformal tensor")?;
    let l = ell as f64;
    let g = &b.gram;
    let k = b.scalar;
    let ric = &b.ricci;
    let rm = b.ricci_mixed();
    let sec = b.second_contraction();
    let sec_m = raise_second(&sec, &b.gram_inv);
    let q = 2.0 * (l - 1.0);
    let lower = |a: usize, c: usize| ric[[a, c]] - sec[[a, c]] / l - k * g[[a, c]] / q;
    let mixed = |a: usize, h: usize| rm[[a, h]] - sec_m[[a, h]] / l - k * delta(a, h) / q;
    // K^e_ije, the trace over the last two slots.
    let third = Tensor2::from_fn([ell, ell], |[i, j]| (0..ell).map(|e| b.curv[[i, j, e, e]]).sum());
    Ok(Tensor4::from_fn([ell; 4], |[i, j, kk, h]| {
        b.curv[[i, j, kk, h]]
            - (delta(j, h) * lower(i, kk) - delta(i, h) * lower(j, kk) + g[[i, kk]] * mixed(j, h)
                - g[[j, kk]] * mixed(i, h))
                / (l - 2.0)
            + delta(kk, h) * third[[i, j]] / l
    }))
}

/// The projective curvature template (W on ∇, W̄ on D).
pub fn projective_tensor(b: &CurvatureBundle) -> Result<Tensor4> {
    let ell = b.ell();
    require_rank(ell, 2, "projective tensor")?;
    let l = ell as f64;
    Ok(Tensor4::from_fn([ell; 4], |[i, j, k, h]| {
        b.curv[[i, j, k, h]] - (delta(j, h) * b.ricci[[i, k]] - delta(i, h) * b.ricci[[j, k]]) / (l - 1.0)
    }))
}

/// `P^h_ijk = δ_j^h π_ik - δ_i^h π_jk + π_j^h g_ik - π_i^h g_jk`, so that
/// `R = K + P`.
pub fn curvature_shift(ct: &CharacteristicTensor, gram: &Tensor2) -> Tensor4 {
    let ell = gram.shape()[0];
    let p = &ct.pi_lower;
    let pm = &ct.pi_mixed;
    Tensor4::from_fn([ell; 4], |[i, j, k, h]| {
        delta(j, h) * p[[i, k]] - delta(i, h) * p[[j, k]] + pm[[j, h]] * gram[[i, k]] - pm[[i, h]] * gram[[j, k]]
    })
}

/// Predicted `W̄ - W` in terms of the characteristic tensor.
pub fn projective_difference(ct: &CharacteristicTensor, gram: &Tensor2) -> Tensor4 {
    let ell = gram.shape()[0];
    let l = ell as f64;
    let p = &ct.pi_lower;
    let pm = &ct.pi_mixed;
    let a = ct.alpha;
    Tensor4::from_fn([ell; 4], |[i, j, k, h]| {
        (delta(j, h) * p[[i, k]] - delta(i, h) * p[[j, k]]) / (l - 1.0)
            + (gram[[i, k]] * pm[[j, h]] - gram[[j, k]] * pm[[i, h]])
            - a / (l - 1.0) * (delta(j, h) * gram[[i, k]] - delta(i, h) * gram[[j, k]])
    })
}

/// The printed conformal difference formula for `C̄ - C`, transcribed term
/// by term.
pub fn conformal_difference_printed(ct: &CharacteristicTensor, gram: &Tensor2) -> Result<Tensor4> {
    let ell = gram.shape()[0];
    require_rank(ell, 3, "conformal difference")?;
    let l = ell as f64;
    let p = &ct.pi_lower;
    let pm = &ct.pi_mixed;
    let a = ct.alpha;
    Ok(Tensor4::from_fn([ell; 4], |[i, j, k, h]| {
        -(delta(j, h) * p[[i, k]] - delta(i, h) * p[[j, k]] + gram[[i, k]] * pm[[j, h]]
            - gram[[j, k]] * pm[[i, h]])
            / l
            - 2.0 * a / (l * (l - 2.0)) * (delta(j, h) * gram[[i, k]] - delta(i, h) * gram[[j, k]])
            - (l - 2.0) / l * delta(k, h) * p[[i, j]]
            - a / l * delta(k, h) * gram[[i, j]]
    }))
}

/// The characteristic tensor forced by a flat D:
/// `π_ik = (K_ik - K g_ik / (2(ℓ-1))) / (2 - ℓ)`.
pub fn flat_characteristic(b: &CurvatureBundle) -> Result<Tensor2> {
    let ell = b.ell();
    require_rank(ell, 3, "flat characteristic tensor")?;
    let l = ell as f64;
    Ok(Tensor2::from_fn([ell, ell], |[i, k]| {
        (b.ricci[[i, k]] - b.scalar * b.gram[[i, k]] / (2.0 * (l - 1.0))) / (2.0 - l)
    }))
}

/// `c (δ_j^h g_ik - δ_i^h g_jk)`.
pub fn constant_curvature(c: f64, gram: &Tensor2) -> Tensor4 {
    let ell = gram.shape()[0];
    Tensor4::from_fn([ell; 4], |[i, j, k, h]| {
        c * (delta(j, h) * gram[[i, k]] - delta(i, h) * gram[[j, k]])
    })
}
