//! Sub-Riemannian structures `(M, V0, g)` on a single global chart, Lie
//! brackets of frame fields, and the pointwise structure constants
//! `Ω_ij^k`, `M_ij^α`, `Λ_αk^h`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{jet_eval, Expression};
use crate::field::{require_order, VectorField};
use crate::jet::{Jet, MAX_ORDER};
use crate::linalg::{self, JetMatrix};
use crate::tensor::{Tensor, Tensor2, Tensor3};

/// Frame matrices whose 2-norm condition number exceeds this trigger a warning.
pub const CONDITION_WARNING: f64 = 1e8;
/// Relative determinant threshold below which a frame is singular.
pub const SINGULAR_FRAME_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    pub name: String,
    /// Coordinate components `X^k`, so `X = Σ X^k ∂_k`.
    pub components: Vec<Expression>,
}

impl VectorFieldSpec {
    pub fn new(name: impl Into<String>, components: Vec<Expression>) -> Self {
        Self {
            name: name.into(),
            components,
        }
    }

    /// The coordinate field `∂_k` in dimension `n`.
    pub fn coordinate(name: impl Into<String>, n: usize, k: usize) -> Self {
        let components = (0..n)
            .map(|i| Expression::constant(if i == k { 1.0 } else { 0.0 }))
            .collect();
        Self::new(name, components)
    }
}

impl VectorField for VectorFieldSpec {
    fn max_order(&self) -> u8 {
        MAX_ORDER
    }

    fn components(&self, point: &[f64], order: u8) -> Result<Vec<Jet>> {
        self.components.components(point, order)
    }
}

/// Immutable description of a sub-Riemannian manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    name: String,
    coords: Vec<String>,
    hframe: Vec<VectorFieldSpec>,
    vframe: Vec<VectorFieldSpec>,
    metric: Vec<Vec<Expression>>,
    oneform: Option<Vec<Expression>>,
    sample_box: Vec<(f64, f64)>,
}

impl ManifoldSpec {
    /// Builds and structurally validates a spec. Pointwise conditions (frame
    /// invertibility, positive-definite Gram) are checked at evaluation.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        hframe: Vec<VectorFieldSpec>,
        vframe: Vec<VectorFieldSpec>,
        metric: Vec<Vec<Expression>>,
    ) -> Result<Self> {
        let n = coords.len();
        let spec = Self {
            name: name.into(),
            sample_box: vec![(-1.0, 1.0); n],
            coords,
            hframe: hframe.into_iter().map(canonical_field).collect(),
            vframe: vframe.into_iter().map(canonical_field).collect(),
            metric: metric
                .into_iter()
                .map(|row| row.iter().map(Expression::canonical).collect())
                .collect(),
            oneform: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_oneform(mut self, oneform: Vec<Expression>) -> Result<Self> {
        if oneform.len() != self.ell() {
            return Err(invalid(format!(
                "oneform has {} components, expected {}",
                oneform.len(),
                self.ell()
            )));
        }
        self.check_coords(oneform.iter())?;
        self.oneform = Some(oneform.iter().map(Expression::canonical).collect());
        Ok(self)
    }

    /// Override the sampling interval of one coordinate.
    pub fn with_box(mut self, coord: usize, lo: f64, hi: f64) -> Result<Self> {
        if coord >= self.n() {
            return Err(invalid(format!("box coordinate index {coord} out of range")));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("box interval [{lo}, {hi}] is empty")));
        }
        self.sample_box[coord] = (lo, hi);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let ell = self.hframe.len();
        if ell < 2 || ell >= n {
            return Err(invalid(format!(
                "need 2 <= hdim < dim, got hdim = {ell}, dim = {n}"
            )));
        }
        if self.vframe.len() != n - ell {
            return Err(invalid(format!(
                "vframe has {} fields, expected dim - hdim = {}",
                self.vframe.len(),
                n - ell
            )));
        }
        for f in self.hframe.iter().chain(&self.vframe) {
            if f.components.len() != n {
                return Err(invalid(format!(
                    "field {} has {} components, expected {n}",
                    f.name,
                    f.components.len()
                )));
            }
            self.check_coords(f.components.iter())?;
        }
        if self.metric.len() != ell || self.metric.iter().any(|r| r.len() != ell) {
            return Err(invalid(format!("metric must be {ell}x{ell}")));
        }
        for i in 0..ell {
            self.check_coords(self.metric[i].iter())?;
            for j in 0..i {
                if self.metric[i][j] != self.metric[j][i] {
                    return Err(invalid(format!(
                        "metric is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_coords<'a>(&self, exprs: impl Iterator<Item = &'a Expression>) -> Result<()> {
        for e in exprs {
            if let Some(m) = e.max_coord() {
                if m >= self.n() {
                    return Err(invalid(format!("coordinate index {m} out of range")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Ambient dimension `n`.
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Horizontal rank `ℓ`.
    pub fn ell(&self) -> usize {
        self.hframe.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn hframe(&self) -> &[VectorFieldSpec] {
        &self.hframe
    }

    pub fn vframe(&self) -> &[VectorFieldSpec] {
        &self.vframe
    }

    /// The full frame `e_1..e_ℓ, e_{ℓ+1}..e_n`.
    pub fn frame(&self) -> impl Iterator<Item = &VectorFieldSpec> {
        self.hframe.iter().chain(&self.vframe)
    }

    pub fn metric(&self) -> &[Vec<Expression>] {
        &self.metric
    }

    pub fn oneform(&self) -> Option<&[Expression]> {
        self.oneform.as_deref()
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    /// `count` points drawn uniformly from the sampling box.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                self.sample_box
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..hi))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: point.len(),
            });
        }
        Ok(())
    }
}

fn canonical_field(f: VectorFieldSpec) -> VectorFieldSpec {
    VectorFieldSpec {
        name: f.name,
        components: f.components.iter().map(Expression::canonical).collect(),
    }
}

fn invalid(message: String) -> Error {
    Error::Validation { line: 0, message }
}

/// Coordinate components of `[X, Y]` from component jets:
/// `[X,Y]^k = X(Y^k) - Y(X^k)`.
pub(crate) fn bracket_jets(x: &[Jet], y: &[Jet]) -> Result<Vec<Jet>> {
    x.iter()
        .zip(y)
        .map(|(xk, yk)| Ok(yk.directional(x)? - xk.directional(y)?))
        .collect()
}

/// `[X, Y]` as a lazily evaluated vector field.
#[derive(Clone, Debug)]
pub struct LieBracket<X, Y> {
    x: X,
    y: Y,
}

pub fn lie_bracket<X: VectorField, Y: VectorField>(x: X, y: Y) -> LieBracket<X, Y> {
    LieBracket { x, y }
}

impl<X: VectorField, Y: VectorField> VectorField for LieBracket<X, Y> {
    fn max_order(&self) -> u8 {
        self.x.max_order().min(self.y.max_order()).saturating_sub(1)
    }

    fn components(&self, point: &[f64], order: u8) -> Result<Vec<Jet>> {
        require_order("Lie bracket", order, self.max_order())?;
        let x = self.x.components(point, order + 1)?;
        let y = self.y.components(point, order + 1)?;
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        bracket_jets(&x, &y)
    }
}

/// Everything about the frame at one point, as jets.
///
/// Frame components and the Gram matrix carry order 2; inverses, brackets and
/// structure constants carry order 1 (one order is consumed by the bracket).
pub(crate) struct PointGeometry {
    pub point: Vec<f64>,
    pub n: usize,
    pub ell: usize,
    /// `frame[a][k]`: k-th coordinate component of e_a.
    pub frame: Vec<Vec<Jet>>,
    pub gram: JetMatrix,
    pub gram_inv: JetMatrix,
    pub omega: Tensor<Jet, 3>,
    pub mcoef: Tensor<Jet, 3>,
    pub lambda: Tensor<Jet, 3>,
    pub frame_values: DMatrix<f64>,
    pub frame_inv_values: DMatrix<f64>,
    pub condition: f64,
}

impl PointGeometry {
    pub fn new(spec: &ManifoldSpec, point: &[f64]) -> Result<Self> {
        spec.check_point(point)?;
        let n = spec.n();
        let ell = spec.ell();
        let frame: Vec<Vec<Jet>> = spec
            .frame()
            .map(|f| f.components(point, 2))
            .collect::<Result<_>>()?;

        // Columns of E are the frame vectors.
        let e_jets: JetMatrix = (0..n)
            .map(|k| (0..n).map(|a| frame[a][k].truncate(1)).collect())
            .collect();
        let e_vals = linalg::values(&e_jets);
        let scale: f64 = e_vals.column_iter().map(|c| c.norm()).product();
        let det = e_vals.determinant();
        if !(det.abs() > SINGULAR_FRAME_RTOL * scale) {
            return Err(Error::SingularFrame {
                point: point.to_vec(),
                det,
            });
        }
        let e_inv_vals = e_vals.clone().try_inverse().ok_or_else(|| Error::SingularFrame {
            point: point.to_vec(),
            det,
        })?;
        let condition = linalg::condition_number(&e_vals);
        let e_inv = linalg::inverse_jets(&e_jets, &e_inv_vals, 1)?;

        let gram: JetMatrix = spec
            .metric()
            .iter()
            .map(|row| row.iter().map(|g| jet_eval(g, point, 2)).collect())
            .collect::<Result<_>>()?;
        let g1 = linalg::truncate_matrix(&gram, 1);
        let g_inv_vals =
            linalg::spd_inverse(&linalg::values(&g1)).ok_or_else(|| Error::MetricNotSpd {
                point: point.to_vec(),
            })?;
        let gram_inv = linalg::inverse_jets(&g1, &g_inv_vals, 1)?;

        // Frame coefficients c of a bracket: E c = [e_a, e_b].
        let decompose = |a: usize, b: usize| -> Result<Vec<Jet>> {
            let br = bracket_jets(&frame[a], &frame[b])?;
            Ok(linalg::mat_vec(&e_inv, &br))
        };
        let zero = Jet::constant(n, 1, 0.0);
        let mut omega = Tensor::filled([ell, ell, ell], zero.clone());
        let mut mcoef = Tensor::filled([ell, ell, n - ell], zero.clone());
        for i in 0..ell {
            for j in (i + 1)..ell {
                let c = decompose(i, j)?;
                for k in 0..ell {
                    omega[[i, j, k]] = c[k].clone();
                    omega[[j, i, k]] = -&c[k];
                }
                for a in 0..(n - ell) {
                    mcoef[[i, j, a]] = c[ell + a].clone();
                    mcoef[[j, i, a]] = -&c[ell + a];
                }
            }
        }
        let mut lambda = Tensor::filled([n - ell, ell, ell], zero);
        for a in 0..(n - ell) {
            for k in 0..ell {
                let c = decompose(ell + a, k)?;
                for h in 0..ell {
                    lambda[[a, k, h]] = c[h].clone();
                }
            }
        }

        Ok(Self {
            point: point.to_vec(),
            n,
            ell,
            frame,
            gram,
            gram_inv,
            omega,
            mcoef,
            lambda,
            frame_values: e_vals,
            frame_inv_values: e_inv_vals,
            condition,
        })
    }

    /// `e_a(f)` for a jet `f`.
    pub fn along(&self, a: usize, f: &Jet) -> Result<Jet> {
        f.directional(&self.frame[a])
    }

    pub fn gram_values(&self) -> Tensor2 {
        Tensor::from_fn([self.ell, self.ell], |[i, j]| self.gram[i][j].value())
    }

    pub fn gram_inv_values(&self) -> Tensor2 {
        Tensor::from_fn([self.ell, self.ell], |[i, j]| self.gram_inv[i][j].value())
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.condition > CONDITION_WARNING {
            vec![format!(
                "frame condition number {:.3e} exceeds {CONDITION_WARNING:e} at {:?}",
                self.condition, self.point
            )]
        } else {
            Vec::new()
        }
    }
}

/// Pointwise frame data.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSnapshot {
    pub point: Vec<f64>,
    /// Columns are `e_1..e_n` evaluated at the point.
    pub frame: Vec<Vec<f64>>,
    pub frame_inv: Vec<Vec<f64>>,
    pub gram: Tensor2,
    pub gram_inv: Tensor2,
    /// `Ω_ij^k`, indexed `[i, j, k]`.
    pub omega: Tensor3,
    /// `M_ij^α`, indexed `[i, j, α - ℓ]`.
    pub mcoef: Tensor3,
    /// `Λ_αk^h`, indexed `[α - ℓ, k, h]`.
    pub lambda: Tensor3,
    pub condition: f64,
}

impl FrameSnapshot {
    pub(crate) fn from_geometry(geo: &PointGeometry) -> Self {
        let vals = |t: &Tensor<Jet, 3>| t.map(Jet::value);
        Self {
            point: geo.point.clone(),
            frame: linalg::to_rows(&geo.frame_values),
            frame_inv: linalg::to_rows(&geo.frame_inv_values),
            gram: geo.gram_values(),
            gram_inv: geo.gram_inv_values(),
            omega: vals(&geo.omega),
            mcoef: vals(&geo.mcoef),
            lambda: vals(&geo.lambda),
            condition: geo.condition,
        }
    }

    /// `Ω_ij^k e_k + M_ij^α e_α` in coordinates.
    pub fn reconstruct_bracket(&self, i: usize, j: usize) -> Vec<f64> {
        let ell = self.gram.shape()[0];
        let n = self.frame.len();
        (0..n)
            .map(|row| {
                let h: f64 = (0..ell).map(|k| self.omega[[i, j, k]] * self.frame[row][k]).sum();
                let v: f64 = (0..n - ell)
                    .map(|a| self.mcoef[[i, j, a]] * self.frame[row][ell + a])
                    .sum();
                h + v
            })
            .collect()
    }
}

/// Structure constants and Gram data of `spec` at `point`.
pub fn snapshot(spec: &ManifoldSpec, point: &[f64]) -> Result<FrameSnapshot> {
    Ok(FrameSnapshot::from_geometry(&PointGeometry::new(spec, point)?))
}

/// Horizontal frame coefficients of the coordinate vector `v`, projecting
/// along the vertical frame.
pub fn project_h(spec: &ManifoldSpec, point: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    spec.check_point(point)?;
    if v.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: v.len(),
        });
    }
    let n = spec.n();
    let cols: Vec<Vec<Jet>> = spec
        .frame()
        .map(|f| f.components(point, 0))
        .collect::<Result<_>>()?;
    let e = DMatrix::from_fn(n, n, |k, a| cols[a][k].value());
    let scale: f64 = e.column_iter().map(|c| c.norm()).product();
    let lu = e.lu();
    let det = lu.determinant();
    if !(det.abs() > SINGULAR_FRAME_RTOL * scale) {
        return Err(Error::SingularFrame {
            point: point.to_vec(),
            det,
        });
    }
    let c = lu
        .solve(&DVector::from_column_slice(v))
        .ok_or_else(|| Error::SingularFrame {
            point: point.to_vec(),
            det,
        })?;
    Ok(c.iter().take(spec.ell()).copied().collect())
}
