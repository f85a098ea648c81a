//! The sub-Riemannian connection ∇ (Koszul formula) and the
//! semi-sub-Riemannian connection D obtained from it by a one-form π.

use crate::error::{Error, Result};
use crate::expr::{jet_eval, Expression};
use crate::field::{require_order, ScalarField};
use crate::jet::Jet;
use crate::manifold::{ManifoldSpec, PointGeometry};
use crate::tensor::{delta, Tensor, Tensor2, Tensor3, Tensor4};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    SubRiemannian,
    SemiSubRiemannian,
}

/// A one-form given by its horizontal coframe components `π_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormData {
    components: Vec<Expression>,
}

impl OneFormData {
    pub fn new(components: Vec<Expression>) -> Self {
        Self {
            components: components.iter().map(Expression::canonical).collect(),
        }
    }

    pub fn constant(values: &[f64]) -> Self {
        Self::new(values.iter().map(|v| Expression::constant(*v)).collect())
    }

    pub fn zero(ell: usize) -> Self {
        Self::constant(&vec![0.0; ell])
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `π^i = g^{ij} π_j` as fields on `spec`.
    pub fn raised<'s>(&'s self, spec: &'s ManifoldSpec) -> Vec<RaisedComponent<'s>> {
        (0..self.len())
            .map(|index| RaisedComponent {
                spec,
                pi: self,
                index,
            })
            .collect()
    }

    fn check(&self, spec: &ManifoldSpec) -> Result<()> {
        if self.len() != spec.ell() {
            return Err(Error::DimensionMismatch {
                expected: spec.ell(),
                got: self.len(),
            });
        }
        Ok(())
    }

    fn jets(&self, point: &[f64], order: u8) -> Result<Vec<Jet>> {
        self.components.iter().map(|e| jet_eval(e, point, order)).collect()
    }
}

/// One raised component `π^i`; supports order 1.
#[derive(Clone, Copy, Debug)]
pub struct RaisedComponent<'s> {
    spec: &'s ManifoldSpec,
    pi: &'s OneFormData,
    index: usize,
}

impl ScalarField for RaisedComponent<'_> {
    fn max_order(&self) -> u8 {
        1
    }

    fn jet(&self, point: &[f64], order: u8) -> Result<Jet> {
        require_order("raised one-form", order, 1)?;
        self.pi.check(self.spec)?;
        let geo = PointGeometry::new(self.spec, point)?;
        let pi = self.pi.jets(point, 1)?;
        let up = raise(&geo, &pi);
        Ok(up[self.index].truncate(order))
    }
}

fn raise(geo: &PointGeometry, lower: &[Jet]) -> Vec<Jet> {
    geo.gram_inv
        .iter()
        .map(|row| crate::jet::dot(row, lower, geo.n, 1))
        .collect()
}

/// A nonholonomic connection on the horizontal bundle of `spec`.
///
/// `coeff[i][j][k]` is the `e_k` component of `∇_{e_i} e_j`.
#[derive(Clone, Debug)]
pub struct ConnectionField<'s> {
    kind: ConnectionKind,
    spec: &'s ManifoldSpec,
    oneform: Option<OneFormData>,
}

/// The unique metric, torsion-free connection ∇.
pub fn koszul_connection(spec: &ManifoldSpec) -> ConnectionField<'_> {
    ConnectionField {
        kind: ConnectionKind::SubRiemannian,
        spec,
        oneform: None,
    }
}

/// `Γ_ij^k = {ij^k} + δ_i^k π_j - g_ij π^k`.
pub fn semi_connection(spec: &ManifoldSpec, pi: OneFormData) -> Result<ConnectionField<'_>> {
    pi.check(spec)?;
    Ok(ConnectionField {
        kind: ConnectionKind::SemiSubRiemannian,
        spec,
        oneform: Some(pi),
    })
}

impl<'s> ConnectionField<'s> {
    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn spec(&self) -> &'s ManifoldSpec {
        self.spec
    }

    pub fn oneform(&self) -> Option<&OneFormData> {
        self.oneform.as_ref()
    }

    /// The coefficient `coeff[i][j][k]` as a scalar field of order ≤ 1.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> CoefficientField<'_, 's> {
        CoefficientField {
            conn: self,
            index: [i, j, k],
        }
    }

    /// All coefficients as an ℓ×ℓ×ℓ array of fields.
    pub fn coefficients(&self) -> Tensor<CoefficientField<'_, 's>, 3> {
        let ell = self.spec.ell();
        Tensor::from_fn([ell; 3], |[i, j, k]| self.coefficient(i, j, k))
    }

    /// Coefficient values at `point`.
    pub fn coefficients_at(&self, point: &[f64]) -> Result<Tensor3> {
        Ok(self.evaluate(point)?.coeff.map(Jet::value))
    }

    pub(crate) fn evaluate(&self, point: &[f64]) -> Result<ConnectionPoint> {
        ConnectionPoint::new(self.spec, self.oneform.as_ref(), self.kind, point)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CoefficientField<'c, 's> {
    conn: &'c ConnectionField<'s>,
    index: [usize; 3],
}

impl ScalarField for CoefficientField<'_, '_> {
    fn max_order(&self) -> u8 {
        1
    }

    fn jet(&self, point: &[f64], order: u8) -> Result<Jet> {
        require_order("connection coefficient", order, 1)?;
        Ok(self.conn.evaluate(point)?.coeff[self.index].truncate(order))
    }
}

/// Connection data at one point. Coefficients carry order 1 so that one more
/// frame derivative can be taken for curvature.
pub(crate) struct ConnectionPoint {
    pub geo: PointGeometry,
    pub kind: ConnectionKind,
    /// Koszul coefficients `{ij^k}`.
    pub koszul: Tensor<Jet, 3>,
    /// `{}` or `Γ` depending on `kind`.
    pub coeff: Tensor<Jet, 3>,
    /// `π_i` at order 2 (zero when absent).
    pub pi: Vec<Jet>,
    pub pi_up: Vec<Jet>,
}

impl ConnectionPoint {
    pub fn new(
        spec: &ManifoldSpec,
        pi: Option<&OneFormData>,
        kind: ConnectionKind,
        point: &[f64],
    ) -> Result<Self> {
        let geo = PointGeometry::new(spec, point)?;
        let (n, ell) = (geo.n, geo.ell);
        let zero1 = Jet::constant(n, 1, 0.0);

        let g1: Vec<Vec<Jet>> = geo
            .gram
            .iter()
            .map(|row| row.iter().map(|g| g.truncate(1)).collect())
            .collect();
        // dg[a][i][j] = e_a(g_ij)
        let mut dg = Tensor::filled([ell; 3], zero1.clone());
        for a in 0..ell {
            for i in 0..ell {
                for j in i..ell {
                    let d = geo.along(a, &geo.gram[i][j])?;
                    dg[[a, j, i]] = d.clone();
                    dg[[a, i, j]] = d;
                }
            }
        }
        let omega_g = |a: usize, b: usize, c: usize| -> Jet {
            // Σ_e Ω_ab^e g_ec
            let mut acc = zero1.clone();
            for e in 0..ell {
                acc = &acc + &(&geo.omega[[a, b, e]] * &g1[e][c]);
            }
            acc
        };
        let mut koszul = Tensor::filled([ell; 3], zero1.clone());
        for i in 0..ell {
            for j in 0..ell {
                let rhs: Vec<Jet> = (0..ell)
                    .map(|k| {
                        &dg[[i, j, k]] + &dg[[j, i, k]] - &dg[[k, i, j]] + omega_g(i, j, k)
                            - omega_g(i, k, j)
                            - omega_g(j, k, i)
                    })
                    .collect();
                for h in 0..ell {
                    koszul[[i, j, h]] = crate::jet::dot(&geo.gram_inv[h], &rhs, n, 1).scale(0.5);
                }
            }
        }

        let pi_jets = match pi {
            Some(p) => {
                p.check(spec)?;
                p.jets(point, 2)?
            }
            None => vec![Jet::constant(n, 2, 0.0); ell],
        };
        let pi1: Vec<Jet> = pi_jets.iter().map(|p| p.truncate(1)).collect();
        let pi_up = raise(&geo, &pi1);

        let coeff = match kind {
            ConnectionKind::SubRiemannian => koszul.clone(),
            ConnectionKind::SemiSubRiemannian => Tensor::from_fn([ell; 3], |[i, j, k]| {
                let mut c = koszul[[i, j, k]].clone();
                if i == k {
                    c = &c + &pi1[j];
                }
                c - &g1[i][j] * &pi_up[k]
            }),
        };

        Ok(Self {
            geo,
            kind,
            koszul,
            coeff,
            pi: pi_jets,
            pi_up,
        })
    }

    pub fn ell(&self) -> usize {
        self.geo.ell
    }

    /// `T_ij^k = coeff[i][j][k] - coeff[j][i][k] - Ω_ij^k`, order 1.
    pub fn torsion_jets(&self) -> Tensor<Jet, 3> {
        let ell = self.ell();
        Tensor::from_fn([ell; 3], |[i, j, k]| {
            &self.coeff[[i, j, k]] - &self.coeff[[j, i, k]] - &self.geo.omega[[i, j, k]]
        })
    }

    /// `e_i(π_j) - c_ij^k π_k` for the given coefficient array.
    fn derivative_of_pi(&self, coeff: &Tensor<Jet, 3>) -> Result<Tensor2> {
        let ell = self.ell();
        let mut out = Tensor2::zeros([ell, ell]);
        for i in 0..ell {
            for j in 0..ell {
                let mut v = self.geo.along(i, &self.pi[j])?.value();
                for k in 0..ell {
                    v -= coeff[[i, j, k]].value() * self.pi[k].value();
                }
                out[[i, j]] = v;
            }
        }
        Ok(out)
    }

    /// `∇_i π_j` with the Koszul connection.
    pub fn nabla_pi(&self) -> Result<Tensor2> {
        self.derivative_of_pi(&self.koszul)
    }

    /// `D_i π_j` with this connection's own coefficients.
    pub fn d_pi(&self) -> Result<Tensor2> {
        self.derivative_of_pi(&self.coeff)
    }

    /// `(D_i T)_jk^h` of this connection's torsion with respect to itself.
    pub fn torsion_derivative(&self) -> Result<Tensor4> {
        let ell = self.ell();
        let t = self.torsion_jets();
        let tv = t.map(Jet::value);
        let c = self.coeff.map(Jet::value);
        let mut out = Tensor4::zeros([ell; 4]);
        for i in 0..ell {
            for j in 0..ell {
                for k in 0..ell {
                    for h in 0..ell {
                        let mut v = self.geo.along(i, &t[[j, k, h]])?.value();
                        for e in 0..ell {
                            v += c[[i, e, h]] * tv[[j, k, e]]
                                - c[[i, j, e]] * tv[[e, k, h]]
                                - c[[i, k, e]] * tv[[j, e, h]];
                        }
                        out[[i, j, k, h]] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Residual array of metricity: `e_k(g_ij) - c_ki^e g_ej - c_kj^e g_ie`.
    pub fn metricity_residual(&self) -> Result<Tensor3> {
        let ell = self.ell();
        let g = self.geo.gram_values();
        let c = self.coeff.map(Jet::value);
        let mut out = Tensor3::zeros([ell; 3]);
        for k in 0..ell {
            for i in 0..ell {
                for j in 0..ell {
                    let mut v = self.geo.along(k, &self.geo.gram[i][j])?.value();
                    for e in 0..ell {
                        v -= c[[k, i, e]] * g[[e, j]] + c[[k, j, e]] * g[[i, e]];
                    }
                    out[[k, i, j]] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn pi_values(&self) -> Vec<f64> {
        self.pi.iter().map(Jet::value).collect()
    }

    pub fn pi_up_values(&self) -> Vec<f64> {
        self.pi_up.iter().map(Jet::value).collect()
    }
}

/// `T_ij^k` of `conn` at `point`.
pub fn torsion(conn: &ConnectionField<'_>, point: &[f64]) -> Result<Tensor3> {
    Ok(conn.evaluate(point)?.torsion_jets().map(Jet::value))
}

/// `∇_i π_j = e_i(π_j) - {ij^k} π_k`.
pub fn nabla_oneform(spec: &ManifoldSpec, pi: &OneFormData, point: &[f64]) -> Result<Tensor2> {
    pi.check(spec)?;
    ConnectionPoint::new(spec, Some(pi), ConnectionKind::SubRiemannian, point)?.nabla_pi()
}

/// `(D_i T)_jk^h`, the covariant derivative of the torsion of `conn` with
/// respect to `conn` itself.
pub fn covariant_derivative_t(conn: &ConnectionField<'_>, point: &[f64]) -> Result<Tensor4> {
    conn.evaluate(point)?.torsion_derivative()
}

/// The semi-symmetric torsion pattern `δ_i^k π_j - δ_j^k π_i`.
pub fn semi_symmetric_torsion(pi: &[f64]) -> Tensor3 {
    let ell = pi.len();
    Tensor::from_fn([ell; 3], |[i, j, k]| delta(i, k) * pi[j] - delta(j, k) * pi[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::catalog::builtin;
    use crate::manifold::VectorFieldSpec;

    fn diagnostic_spec() -> ManifoldSpec {
        // ℓ = 2 coordinate frame with g_11 = 1 + x².
        let x = Expression::coord(0);
        let coords = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        ManifoldSpec::new(
            "diag",
            coords,
            vec![
                VectorFieldSpec::coordinate("X1", 3, 0),
                VectorFieldSpec::coordinate("X2", 3, 1),
            ],
            vec![VectorFieldSpec::coordinate("Z", 3, 2)],
            vec![
                vec![x.clone() * x + 1.0, Expression::constant(0.0)],
                vec![Expression::constant(0.0), Expression::constant(1.0)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn carnot_and_flat_coefficients_vanish() {
        for name in ["heisenberg1", "heisenberg2", "flat3", "free-step2-l3"] {
            let spec = builtin(name).unwrap().spec;
            let conn = koszul_connection(&spec);
            for p in spec.sample_points(5, 1) {
                assert_eq!(conn.coefficients_at(&p).unwrap().max_abs(), 0.0, "{name}");
            }
        }
    }

    #[test]
    fn diagnostic_koszul_values() {
        let spec = diagnostic_spec();
        let conn = koszul_connection(&spec);
        for x in [-0.8, 0.0, 0.3, 0.9] {
            let c = conn.coefficients_at(&[x, 0.2, -0.1]).unwrap();
            let mut expected = Tensor3::zeros([2; 3]);
            expected[[0, 0, 0]] = x / (1.0 + x * x);
            assert!(c.max_abs_diff(&expected) <= 1e-15, "x = {x}");
        }
        let j = conn.coefficient(0, 0, 0).jet(&[0.5, 0.0, 0.0], 1).unwrap();
        // d/dx x/(1+x²) = (1-x²)/(1+x²)²
        assert!((j.gradient()[0] - 0.75 / 1.5625).abs() < 1e-15);
        assert!(matches!(
            conn.coefficient(0, 0, 0).jet(&[0.5, 0.0, 0.0], 2),
            Err(Error::OrderExhausted(_))
        ));
    }

    #[test]
    fn diagnostic_nabla_pi() {
        let spec = diagnostic_spec();
        let pi = OneFormData::constant(&[1.0, 0.0]);
        let x = 0.6;
        let n = nabla_oneform(&spec, &pi, &[x, 0.1, 0.2]).unwrap();
        assert!((n[[0, 0]] + x / (1.0 + x * x)).abs() < 1e-15);
        assert_eq!(n[[0, 1]], 0.0);
        assert_eq!(n[[1, 0]], 0.0);
        assert_eq!(n[[1, 1]], 0.0);
    }

    #[test]
    fn flat_linear_pi_derivative() {
        let spec = builtin("flat3").unwrap().spec;
        let pi = OneFormData::new(vec![Expression::coord(0), Expression::constant(0.0)]);
        let n = nabla_oneform(&spec, &pi, &[0.3, -0.2, 0.7]).unwrap();
        assert_eq!(n.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn semi_connection_substitution() {
        let spec = builtin("heisenberg2").unwrap().spec;
        let d = semi_connection(&spec, OneFormData::constant(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let p = [0.1, 0.2, -0.3, 0.4, 0.5];
        let g = d.coefficients_at(&p).unwrap();
        assert_eq!(g[[1, 0, 1]], 1.0);
        assert_eq!(g[[0, 0, 0]], 0.0);
        assert_eq!(g[[2, 2, 0]], -1.0);
        let t = torsion(&d, &p).unwrap();
        assert_eq!(t[[1, 0, 1]], 1.0);
        assert_eq!(t[[0, 1, 1]], -1.0);
        assert_eq!(t, semi_symmetric_torsion(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn zero_pi_reproduces_nabla() {
        let spec = builtin("curved-metric-l3").unwrap().spec;
        let nabla = koszul_connection(&spec);
        let d = semi_connection(&spec, OneFormData::zero(3)).unwrap();
        for p in spec.sample_points(5, 2) {
            assert_eq!(nabla.coefficients_at(&p).unwrap(), d.coefficients_at(&p).unwrap());
            assert!(covariant_derivative_t(&d, &p).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn constant_pi_torsion_derivative_matches_parallel_form() {
        let spec = builtin("heisenberg2").unwrap().spec;
        let pi = OneFormData::constant(&[1.0, 0.0, 0.0, 0.0]);
        let d = semi_connection(&spec, pi).unwrap();
        let p = [0.2, -0.4, 0.1, 0.3, -0.9];
        let dt = covariant_derivative_t(&d, &p).unwrap();
        let cp = d.evaluate(&p).unwrap();
        let dpi = cp.d_pi().unwrap();
        let rhs = Tensor4::from_fn([4; 4], |[i, j, k, h]| {
            delta(j, h) * dpi[[i, k]] - delta(k, h) * dpi[[i, j]]
        });
        assert!(dt.max_abs_diff(&rhs) <= 1e-14);
        assert!(dt.max_abs() > 0.5);
    }

    #[test]
    fn raised_components() {
        let spec = builtin("curved-metric-l3").unwrap().spec;
        let pi = OneFormData::new(vec![
            Expression::coord(0),
            Expression::constant(0.5),
            Expression::coord(3).sin(),
        ]);
        let p = [0.3, -0.2, 0.6, 0.1];
        let up: Vec<f64> = pi.raised(&spec).iter().map(|f| f.value(&p).unwrap()).collect();
        let s = crate::manifold::snapshot(&spec, &p).unwrap();
        for i in 0..3 {
            let lowered: f64 = (0..3).map(|j| s.gram[[i, j]] * up[j]).sum();
            assert!((lowered - pi.components()[i].eval(&p).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn wrong_pi_length_is_rejected() {
        let spec = builtin("heisenberg1").unwrap().spec;
        assert!(matches!(
            semi_connection(&spec, OneFormData::constant(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
