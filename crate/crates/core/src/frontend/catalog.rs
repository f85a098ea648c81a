//! Built-in manifolds with bundled one-forms and expected verifier outcomes.

use crate::connection::OneFormData;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::frontend::parser::{parse_expression, parse_manifold};
use crate::manifold::ManifoldSpec;
use crate::verifier::Verdict;

pub const BUILTIN_NAMES: [&str; 6] = [
    "heisenberg1",
    "heisenberg2",
    "free-step2-l3",
    "flat3",
    "curved-metric-l3",
    "involutive-l3",
];

pub const HEISENBERG1: &str = "\
manifold heisenberg1
dim 3
hdim 2
coords x y z
hframe
  X1 = dx - (y/2) dz
  X2 = dy + (x/2) dz
vframe
  Z = dz
metric identity
";

pub const HEISENBERG2: &str = "\
# two Heisenberg blocks sharing the centre
manifold heisenberg2
dim 5
hdim 4
coords x1 y1 x2 y2 z
hframe
  X1 = dx1 - (y1/2) dz
  X2 = dy1 + (x1/2) dz
  X3 = dx2 - (y2/2) dz
  X4 = dy2 + (x2/2) dz
vframe
  Z = dz
metric identity
";

pub const FREE_STEP2_L3: &str = "\
# free nilpotent group of step 2 on three generators: [X_i, X_j] = Z_ij
manifold free-step2-l3
dim 6
hdim 3
coords x1 x2 x3 z12 z13 z23
hframe
  X1 = dx1 - (x2/2) dz12 - (x3/2) dz13
  X2 = dx2 + (x1/2) dz12 - (x3/2) dz23
  X3 = dx3 + (x1/2) dz13 + (x2/2) dz23
vframe
  Z12 = dz12
  Z13 = dz13
  Z23 = dz23
metric identity
";

pub const FLAT3: &str = "\
manifold flat3
dim 3
hdim 2
coords x y z
hframe
  X1 = dx
  X2 = dy
vframe
  Z = dz
metric identity
";

pub const CURVED_METRIC_L3: &str = "\
# non-constant metric, non-involutive frame with a tilted vertical field
manifold curved-metric-l3
dim 4
hdim 3
coords x y z w
hframe
  X1 = dx - (y/2) dw
  X2 = dy + x dz + (x/2) dw
  X3 = dz + x dw
vframe
  V = z dx + dw
metric
  2 + x^2, y/2, 0
  y/2, 2 + z^2, x*z/2
  0, x*z/2, 1 + y^2
";

pub const INVOLUTIVE_L3: &str = "\
# leaves w = const carry the hyperbolic metric of the half space z > -2
manifold involutive-l3
dim 4
hdim 3
coords x y z w
hframe
  X1 = dx
  X2 = dy + x dz
  X3 = dz
vframe
  V = dw
metric
  1/(z+2)^2, 0, 0
  0, (1 + x^2)/(z+2)^2, x/(z+2)^2
  0, x/(z+2)^2, 1/(z+2)^2
";

/// Expected all-samples outcome of the flatness criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatnessExpectation {
    pub r_zero: bool,
    pub s_zero: bool,
    pub pi_matches: bool,
}

/// Expected verifier behaviour for one bundled one-form.
#[derive(Clone, Debug, PartialEq)]
pub struct VariantAnnotation {
    pub variant: &'static str,
    /// Checks expected to fail under the default configuration.
    pub failing: Vec<&'static str>,
    /// Conditional checks whose hypothesis must hold at some sample.
    pub nonvacuous: Vec<&'static str>,
    /// Group-manifold verdict for D with this one-form.
    pub group_manifold: Verdict,
    /// `None` when the rank is too small or the outcome varies by point.
    pub flatness: Option<FlatnessExpectation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Annotations {
    /// Checks skipped for every one-form (rank too small).
    pub skipped: Vec<&'static str>,
    pub variants: Vec<VariantAnnotation>,
}

impl Annotations {
    pub fn variant(&self, name: &str) -> Option<&VariantAnnotation> {
        self.variants.iter().find(|v| v.variant == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub source: &'static str,
    pub spec: ManifoldSpec,
    /// Named one-forms, `zero` first.
    pub pi_variants: Vec<(&'static str, OneFormData)>,
    pub annotations: Annotations,
}

impl CatalogEntry {
    pub fn pi(&self, variant: &str) -> Option<&OneFormData> {
        self.pi_variants.iter().find(|(n, _)| *n == variant).map(|(_, p)| p)
    }
}

fn exprs(spec: &ManifoldSpec, items: &[&str]) -> OneFormData {
    OneFormData::new(
        items
            .iter()
            .map(|t| parse_expression(t, spec.coords()).expect("catalog one-form"))
            .collect(),
    )
}

/// Constant, affine and trigonometric one-forms every entry carries.
fn standard_variants(spec: &ManifoldSpec, constant: &[f64]) -> Vec<(&'static str, OneFormData)> {
    let n = spec.n();
    let ell = spec.ell();
    let c = |i: usize| Expression::coord(i % n);
    let linear = (0..ell)
        .map(|i| c(i) - c(i + 1) * 0.5 + 0.25 * (i + 1) as f64)
        .collect();
    let trig = (0..ell)
        .map(|i| c(i + 1).sin() + c(i).cos() * 0.5)
        .collect();
    vec![
        ("zero", OneFormData::zero(ell)),
        ("const", OneFormData::constant(constant)),
        ("linear", OneFormData::new(linear)),
        ("trig", OneFormData::new(trig)),
    ]
}

fn variant(
    name: &'static str,
    failing: &[&'static str],
    nonvacuous: &[&'static str],
    group_manifold: Verdict,
    flatness: Option<(bool, bool, bool)>,
) -> VariantAnnotation {
    VariantAnnotation {
        variant: name,
        failing: failing.to_vec(),
        nonvacuous: nonvacuous.to_vec(),
        group_manifold,
        flatness: flatness.map(|(r_zero, s_zero, pi_matches)| FlatnessExpectation {
            r_zero,
            s_zero,
            pi_matches,
        }),
    }
}

const RANK3: [&str; 4] = ["C11", "C12", "C14", "C17"];

pub fn builtin(name: &str) -> Result<CatalogEntry> {
    use Verdict::{Fails, HoldsAtSamples};
    let (description, source) = match name {
        "heisenberg1" => ("Heisenberg group H1, n = 3, rank 2", HEISENBERG1),
        "heisenberg2" => ("Heisenberg group H2, n = 5, rank 4", HEISENBERG2),
        "free-step2-l3" => ("free step-2 Carnot group on 3 generators, n = 6", FREE_STEP2_L3),
        "flat3" => ("commuting coordinate frame, n = 3, rank 2", FLAT3),
        "curved-metric-l3" => ("polynomial metric with all structure constants nonzero", CURVED_METRIC_L3),
        "involutive-l3" => ("involutive distribution with hyperbolic leaves", INVOLUTIVE_L3),
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    let spec = parse_manifold(source)?;
    let name = BUILTIN_NAMES.iter().copied().find(|n| *n == name).unwrap_or("");
    let mut variants;
    let annotations;
    // The printed conformal difference formula is nonzero whenever π_ij is.
    let c12: &[&str] = if spec.ell() >= 3 { &["C12"] } else { &[] };
    let skipped: Vec<&str> = if spec.ell() < 3 { RANK3.to_vec() } else { Vec::new() };
    let generic = |v: &'static str, flat: Option<(bool, bool, bool)>| variant(v, c12, &[], Fails, flat);
    match name {
        "heisenberg1" | "flat3" => {
            variants = standard_variants(&spec, &[0.5, -0.25]);
            let zero_nv: &[&str] = if name == "flat3" { &["C06", "C15", "C16", "C18"] } else { &["C15", "C16", "C18"] };
            // Rank 2 with constant π: α = -|π|² + |π|² = 0 and then R = K.
            let (const_nv, other_nv): (&[&str], &[&str]) =
                if name == "flat3" { (&["C06", "C16"], &["C06"]) } else { (&["C16"], &[]) };
            let mut list = vec![
                variant("zero", &[], zero_nv, HoldsAtSamples, None),
                variant("const", &[], const_nv, Fails, None),
                variant("linear", &[], other_nv, Fails, None),
                variant("trig", &[], other_nv, Fails, None),
            ];
            if name == "flat3" {
                variants.push(("conformal-gradient", exprs(&spec, &["-x/(1 + 0.5*(x^2 + y^2))", "-y/(1 + 0.5*(x^2 + y^2))"])));
                list.push(variant("conformal-gradient", &[], &["C06", "C15"], Fails, None));
            }
            annotations = Annotations { skipped, variants: list };
        }
        "heisenberg2" => {
            variants = standard_variants(&spec, &[1.0, 0.0, 0.0, 0.0]);
            variants.push(("alpha-free", exprs(&spec, &["1/(x1 + 2)", "0", "0", "0"])));
            variants.push((
                "conformal-gradient",
                exprs(
                    &spec,
                    &[
                        "-x1/(1 + 0.5*(x1^2 + y1^2 + x2^2 + y2^2))",
                        "-y1/(1 + 0.5*(x1^2 + y1^2 + x2^2 + y2^2))",
                        "-x2/(1 + 0.5*(x1^2 + y1^2 + x2^2 + y2^2))",
                        "-y2/(1 + 0.5*(x1^2 + y1^2 + x2^2 + y2^2))",
                    ],
                ),
            ));
            annotations = Annotations {
                skipped,
                variants: vec![
                    variant("zero", &[], &["C14", "C15", "C16", "C17", "C18"], HoldsAtSamples, Some((true, true, true))),
                    generic("const", Some((false, true, false))),
                    generic("linear", Some((false, true, false))),
                    generic("trig", Some((false, true, false))),
                    variant("alpha-free", c12, &["C14"], Fails, Some((false, true, false))),
                    variant("conformal-gradient", c12, &["C15"], Fails, Some((false, true, false))),
                ],
            };
        }
        "free-step2-l3" => {
            variants = standard_variants(&spec, &[0.5, -0.25, 0.75]);
            annotations = Annotations {
                skipped,
                variants: vec![
                    variant("zero", &[], &["C14", "C15", "C16", "C17", "C18"], HoldsAtSamples, Some((true, true, true))),
                    generic("const", Some((false, true, false))),
                    generic("linear", Some((false, true, false))),
                    generic("trig", Some((false, true, false))),
                ],
            };
        }
        "curved-metric-l3" => {
            variants = standard_variants(&spec, &[0.5, -0.25, 0.75]);
            annotations = Annotations {
                skipped,
                variants: vec![
                    variant("zero", &[], &["C14", "C15", "C16"], Fails, Some((false, false, false))),
                    generic("const", Some((false, false, false))),
                    generic("linear", Some((false, false, false))),
                    generic("trig", Some((false, false, false))),
                ],
            };
        }
        "involutive-l3" => {
            variants = standard_variants(&spec, &[0.5, -0.25, 0.75]);
            variants.push(("hyperbolic", exprs(&spec, &["0", "x/(z + 2)", "1/(z + 2)"])));
            annotations = Annotations {
                skipped,
                variants: vec![
                    variant("zero", &[], &["C06", "C14", "C15", "C16"], Fails, Some((false, true, false))),
                    variant("const", c12, &["C06"], Fails, Some((false, true, false))),
                    variant("linear", c12, &["C06"], Fails, Some((false, true, false))),
                    variant("trig", c12, &["C06"], Fails, Some((false, true, false))),
                    variant("hyperbolic", c12, &["C06", "C15", "C17", "C18"], HoldsAtSamples, Some((true, true, true))),
                ],
            };
        }
        _ => unreachable!("name matched above"),
    }
    Ok(CatalogEntry {
        name,
        description,
        source,
        spec,
        pi_variants: variants,
        annotations,
    })
}

/// Every built-in entry.
pub fn all_builtins() -> Vec<CatalogEntry> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("built-in specs parse"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        for e in all_builtins() {
            assert!(e.pi_variants.iter().all(|(_, p)| p.len() == e.spec.ell()), "{}", e.name);
            assert_eq!(e.pi_variants[0].0, "zero");
            for a in &e.annotations.variants {
                assert!(e.pi(a.variant).is_some(), "{} {}", e.name, a.variant);
            }
        }
    }

    #[test]
    fn unknown_entry() {
        assert_eq!(builtin("sphere").unwrap_err(), Error::UnknownEntry("sphere".into()));
    }

    #[test]
    fn heisenberg2_constant_pi() {
        let e = builtin("heisenberg2").unwrap();
        let pi = e.pi("const").unwrap();
        assert_eq!(pi.components(), OneFormData::constant(&[1.0, 0.0, 0.0, 0.0]).components());
    }
}
