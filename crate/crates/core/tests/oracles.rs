//! Hand-computed values and finite-difference checks of connection fields.

use srclab::connection::{nabla_oneform, torsion};
use srclab::{
    builtin, characteristic_tensor, fd_crosscheck, koszul_connection, parse_manifold, schouten_curvature,
    semi_connection, Expression, OneFormData,
};

const WARPED: &str = "\
manifold warped
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

#[test]
fn koszul_on_warped_metric() {
    let spec = parse_manifold(WARPED).unwrap();
    let nabla = koszul_connection(&spec);
    for x in [-0.8, 0.1, 0.6] {
        let c = nabla.coefficients_at(&[x, 0.3, -0.2]).unwrap();
        let q = 1.0 + x * x;
        // {11^1} = x/q, {12^1} = {21^1} = {22^1} = 0, {11^2} = 0
        assert!((c[[0, 0, 0]] - x / q).abs() < 1e-15);
        assert_eq!(c[[0, 1, 0]], 0.0);
        assert_eq!(c[[1, 1, 0]], 0.0);
        assert_eq!(c[[0, 0, 1]], 0.0);
        let n = nabla_oneform(&spec, &OneFormData::constant(&[1.0, 0.0]), &[x, 0.3, -0.2]).unwrap();
        assert!((n[[0, 0]] + x / q).abs() < 1e-15);
    }
}

#[test]
fn heisenberg2_constant_pi() {
    let spec = builtin("heisenberg2").unwrap().spec;
    let pi = OneFormData::constant(&[1.0, 0.0, 0.0, 0.0]);
    let p = [0.4, -0.1, 0.3, 0.2, -0.6];
    let ct = characteristic_tensor(&spec, &pi, &p).unwrap();
    assert_eq!((0..4).map(|i| ct.pi_lower[[i, i]]).collect::<Vec<_>>(), vec![-0.5, 0.5, 0.5, 0.5]);
    assert_eq!(ct.alpha, 1.0);
    let r = schouten_curvature(&semi_connection(&spec, pi).unwrap(), &p).unwrap();
    // R^4_343 in 1-based indices
    assert_eq!(r.curv[[2, 3, 2, 3]], 1.0);
    assert_eq!(r.scalar, 6.0);
}

#[test]
fn hyperbolic_oneform_is_flat() {
    let e = builtin("involutive-l3").unwrap();
    let pi = e.pi("hyperbolic").unwrap();
    let d = semi_connection(&e.spec, pi.clone()).unwrap();
    for p in e.spec.sample_points(10, 5) {
        let r = schouten_curvature(&d, &p).unwrap();
        assert!(r.curv.max_abs() < 1e-12);
        let ct = characteristic_tensor(&e.spec, pi, &p).unwrap();
        assert!((ct.pi_norm2 - 1.0).abs() < 1e-12);
        assert!((ct.alpha + 1.5).abs() < 1e-12);
    }
}

#[test]
fn torsion_of_semi_connection() {
    let spec = builtin("free-step2-l3").unwrap().spec;
    let d = semi_connection(&spec, OneFormData::constant(&[0.5, -0.25, 0.75])).unwrap();
    let t = torsion(&d, &[0.1; 6]).unwrap();
    // T(e_i, e_j) = pi_j e_i - pi_i e_j
    assert_eq!(t[[0, 1, 0]], -0.25);
    assert_eq!(t[[0, 1, 1]], -0.5);
    assert_eq!(t[[0, 1, 2]], 0.0);
}

#[test]
fn coefficient_fields_match_finite_differences() {
    for name in ["curved-metric-l3", "involutive-l3"] {
        let e = builtin(name).unwrap();
        let nabla = koszul_connection(&e.spec);
        let h = e.spec.hframe();
        for p in e.spec.sample_points(5, 9) {
            for i in 0..h.len() {
                for k in 0..h.len() {
                    let c = nabla.coefficient(i, i, k);
                    let r = fd_crosscheck(&c, &p, &h[k], 1e-5).unwrap();
                    assert!(r < 1e-6, "{name} {i}{k}: {r}");
                }
            }
        }
    }
}

#[test]
fn raised_oneform_lowers_back() {
    let e = builtin("curved-metric-l3").unwrap();
    let pi = OneFormData::new(vec![Expression::coord(0), Expression::constant(1.0), Expression::coord(1).sin()]);
    let raised = pi.raised(&e.spec);
    use srclab::ScalarField;
    for p in e.spec.sample_points(5, 1) {
        let up: Vec<f64> = raised.iter().map(|r| r.value(&p).unwrap()).collect();
        let g: Vec<Vec<f64>> = e
            .spec
            .metric()
            .iter()
            .map(|row| row.iter().map(|x| x.eval(&p).unwrap()).collect())
            .collect();
        for i in 0..3 {
            let lowered: f64 = (0..3).map(|j| g[i][j] * up[j]).sum();
            assert!((lowered - pi.components()[i].eval(&p).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn coordinate_frame_rank3_is_flat() {
    use srclab::verifier::{check_flatness_criterion, FlatnessPoint, SuiteConfig};
    let spec = parse_manifold(
        "manifold flat4\ndim 4\nhdim 3\ncoords x y z w\nhframe\n  X = dx\n  Y = dy\n  Z = dz\nvframe\n  W = dw\nmetric identity\n",
    )
    .unwrap();
    let f = check_flatness_criterion(&spec, None, &SuiteConfig::default()).unwrap();
    assert!(f.verdict);
    assert!(f.points.iter().all(|p| *p == FlatnessPoint { r_zero: true, s_zero: true, pi_matches: true }));
}
