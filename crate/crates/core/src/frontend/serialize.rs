//! Writes a [`ManifoldSpec`] back out in the text format.

use std::fmt::Write;

use crate::expr::Expression;
use crate::manifold::ManifoldSpec;

fn vector_field(components: &[Expression], coords: &[String]) -> String {
    let mut terms = Vec::new();
    for (k, c) in components.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let basis = format!("d{}", coords[k]);
        if *c == Expression::constant(1.0) {
            terms.push(basis);
        } else {
            let plain = matches!(c, Expression::Coord(_) | Expression::Apply(..))
                || matches!(c, Expression::Const(v) if v.is_sign_positive());
            if plain {
                terms.push(format!("{} {basis}", c.display_with(coords)));
            } else {
                terms.push(format!("({}) {basis}", c.display_with(coords)));
            }
        }
    }
    if terms.is_empty() {
        return format!("0 d{}", coords[0]);
    }
    terms.join(" + ")
}

fn is_identity(metric: &[Vec<Expression>]) -> bool {
    metric.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, e)| *e == Expression::constant(if i == j { 1.0 } else { 0.0 }))
    })
}

fn entries(row: &[Expression], coords: &[String]) -> String {
    row.iter()
        .map(|e| e.display_with(coords).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Text that parses back to a structurally identical spec.
pub fn serialize_manifold(spec: &ManifoldSpec) -> String {
    let coords = spec.coords();
    let mut out = String::new();
    let _ = writeln!(out, "manifold {}", spec.name());
    let _ = writeln!(out, "dim {}", spec.n());
    let _ = writeln!(out, "hdim {}", spec.ell());
    let _ = writeln!(out, "coords {}", coords.join(" "));
    let _ = writeln!(out, "hframe");
    for f in spec.hframe() {
        let _ = writeln!(out, "  {} = {}", f.name, vector_field(&f.components, coords));
    }
    let _ = writeln!(out, "vframe");
    for f in spec.vframe() {
        let _ = writeln!(out, "  {} = {}", f.name, vector_field(&f.components, coords));
    }
    if is_identity(spec.metric()) {
        let _ = writeln!(out, "metric identity");
    } else {
        let _ = writeln!(out, "metric");
        for row in spec.metric() {
            let _ = writeln!(out, "  {}", entries(row, coords));
        }
    }
    if let Some(pi) = spec.oneform() {
        let _ = writeln!(out, "oneform {}", entries(pi, coords));
    }
    for (k, &(lo, hi)) in spec.sample_box().iter().enumerate() {
        if (lo, hi) != (-1.0, 1.0) {
            let _ = writeln!(out, "box {} {lo} {hi}", coords[k]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::catalog::{builtin, BUILTIN_NAMES};
    use crate::frontend::parser::parse_manifold;

    #[test]
    fn catalog_round_trip() {
        for name in BUILTIN_NAMES {
            let spec = builtin(name).unwrap().spec;
            let text = serialize_manifold(&spec);
            let back = parse_manifold(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(back, spec, "{name}");
        }
    }

    #[test]
    fn heisenberg_text() {
        let text = serialize_manifold(&builtin("heisenberg1").unwrap().spec);
        assert!(text.contains("X1 = dx + (-(y / 2)) dz"), "{text}");
        assert!(text.contains("metric identity"));
    }
}
