//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srclab::connection::covariant_derivative_t;
use srclab::curvature::{
    conformal_difference_printed, conformal_tensor, curvature_shift, projective_difference, projective_tensor, s_tensor,
};
use srclab::frontend::catalog::{all_builtins, CatalogEntry};
use srclab::frontend::{cli_main, parse_manifold, serialize_manifold};
use srclab::verifier::{check_flatness_criterion, check_group_manifold, run_suite, SuiteConfig};
use srclab::{
    builtin, characteristic_tensor, fd_crosscheck, koszul_connection, schouten_curvature, semi_connection, Error,
    Expression, OneFormData,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(abs: f64, operands: &[f64]) -> f64 {
    abs / operands.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

fn rank3() -> Vec<CatalogEntry> {
    all_builtins().into_iter().filter(|e| e.spec.ell() >= 3).collect()
}

fn grid_variants(e: &CatalogEntry) -> Vec<(&'static str, &OneFormData)> {
    ["const", "linear", "trig"].iter().map(|v| (*v, e.pi(v).expect("standard variant"))).collect()
}

fn c1_connection_contract() -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig { points: 100, seed: 1, tol: None };
    let mut worst = 0.0_f64;
    let mut ok = true;
    for e in all_builtins() {
        let r = run_suite(&e.spec, None, &cfg);
        for id in ["C01", "C02"] {
            let c = r.check(id).unwrap();
            ok &= c.pass && c.points_evaluated == 100;
            worst = worst.max(c.max_rel_residual);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && worst <= 1e-9 && secs <= 10.0, format!("max rel {worst:.2e}, {secs:.2} s"))
}

fn c2_carnot_group_manifolds() -> srclab::Result<Outcome> {
    let mut worst = 0.0_f64;
    for name in ["heisenberg1", "heisenberg2", "free-step2-l3"] {
        let spec = builtin(name)?.spec;
        let nabla = koszul_connection(&spec);
        for p in spec.sample_points(100, 2) {
            worst = worst.max(schouten_curvature(&nabla, &p)?.curv.max_abs());
            worst = worst.max(covariant_derivative_t(&nabla, &p)?.max_abs());
        }
    }
    Ok(outcome(worst <= 1e-10, format!("max |K|, |nabla T| = {worst:.2e}")))
}

fn c3_curvature_relation() -> srclab::Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    for e in all_builtins() {
        let nabla = koszul_connection(&e.spec);
        for (_, pi) in &e.pi_variants {
            pairs += 1;
            let d = semi_connection(&e.spec, pi.clone())?;
            for p in e.spec.sample_points(100, 3) {
                let k = schouten_curvature(&nabla, &p)?;
                let r = schouten_curvature(&d, &p)?;
                let shift = curvature_shift(&characteristic_tensor(&e.spec, pi, &p)?, &k.gram);
                let abs = r
                    .curv
                    .as_slice()
                    .iter()
                    .zip(k.curv.as_slice().iter().zip(shift.as_slice()))
                    .fold(0.0_f64, |m, (a, (b, s))| m.max((a - b - s).abs()));
                worst = worst.max(rel(abs, &[r.curv.max_abs(), k.curv.max_abs(), shift.max_abs()]));
            }
        }
    }
    Ok(outcome(worst <= 1e-9, format!("{pairs} (manifold, pi) pairs, max rel {worst:.2e}")))
}

fn c4_scalar_chain() -> srclab::Result<Outcome> {
    let spec = builtin("heisenberg2")?.spec;
    let pi = OneFormData::constant(&[1.0, 0.0, 0.0, 0.0]);
    let d = semi_connection(&spec, pi.clone())?;
    let nabla = koszul_connection(&spec);
    let mut worst = 0.0_f64;
    for p in spec.sample_points(20, 4) {
        let alpha = characteristic_tensor(&spec, &pi, &p)?.alpha;
        let k = schouten_curvature(&nabla, &p)?.scalar;
        let r = schouten_curvature(&d, &p)?.scalar;
        worst = worst.max((alpha - 1.0).abs()).max(k.abs()).max((r - 6.0).abs());
    }
    Ok(outcome(worst <= 1e-10, format!("alpha = 1, K = 0, R = 6 within {worst:.2e}")))
}

fn c5_s_invariance() -> srclab::Result<Outcome> {
    let mut worst = 0.0_f64;
    for e in rank3() {
        let nabla = koszul_connection(&e.spec);
        for (_, pi) in grid_variants(&e) {
            let d = semi_connection(&e.spec, pi.clone())?;
            for p in e.spec.sample_points(50, 5) {
                let s = s_tensor(&schouten_curvature(&nabla, &p)?)?;
                let sb = s_tensor(&schouten_curvature(&d, &p)?)?;
                worst = worst.max(sb.max_abs_diff(&s));
            }
        }
    }
    Ok(outcome(worst <= 1e-9, format!("max |Sbar - S| = {worst:.2e}")))
}

fn c6_difference_formulas() -> srclab::Result<(Outcome, Outcome)> {
    let (mut wc, mut cc) = (0.0_f64, 0.0_f64);
    let mut c_actual = 0.0_f64;
    for e in rank3() {
        let nabla = koszul_connection(&e.spec);
        for (_, pi) in grid_variants(&e) {
            let d = semi_connection(&e.spec, pi.clone())?;
            for p in e.spec.sample_points(50, 5) {
                let k = schouten_curvature(&nabla, &p)?;
                let r = schouten_curvature(&d, &p)?;
                let ct = characteristic_tensor(&e.spec, pi, &p)?;
                let dw = projective_tensor(&r)?.sub(&projective_tensor(&k)?);
                wc = wc.max(dw.max_abs_diff(&projective_difference(&ct, &k.gram)));
                let dc = conformal_tensor(&r)?.sub(&conformal_tensor(&k)?);
                cc = cc.max(dc.max_abs_diff(&conformal_difference_printed(&ct, &k.gram)?));
                c_actual = c_actual.max(dc.max_abs());
            }
        }
    }
    Ok((
        outcome(wc <= 1e-9, format!("W: max |(Wbar - W) - formula| = {wc:.2e}")),
        outcome(
            cc <= 1e-9,
            format!("C: max |(Cbar - C) - formula| = {cc:.2e} (max |Cbar - C| = {c_actual:.2e})"),
        ),
    ))
}

fn c7_bianchi_suite() -> Outcome {
    let cfg = SuiteConfig { points: 100, seed: 7, tol: None };
    let mut worst = 0.0_f64;
    let mut ok = true;
    let mut involutive = 0;
    for e in all_builtins() {
        let r = run_suite(&e.spec, None, &cfg);
        for id in ["C03", "C04", "C05", "C06"] {
            let c = r.check(id).unwrap();
            ok &= c.pass;
            worst = worst.max(c.max_rel_residual);
            if id == "C06" && c.hypothesis_points == Some(100) {
                involutive += 1;
            }
        }
    }
    // flat3 and involutive-l3 have M = 0 everywhere.
    outcome(ok && worst <= 1e-9 && involutive == 2, format!("max rel {worst:.2e}, {involutive} involutive entries"))
}

fn c8_jets_vs_finite_differences() -> srclab::Result<Outcome> {
    let mut pool: Vec<(usize, Expression)> = Vec::new();
    let entries = all_builtins();
    for (k, e) in entries.iter().enumerate() {
        for f in e.spec.frame() {
            pool.extend(f.components.iter().filter(|c| !c.is_zero()).map(|c| (k, c.clone())));
        }
        for row in e.spec.metric() {
            pool.extend(row.iter().map(|c| (k, c.clone())));
        }
        for (_, pi) in &e.pi_variants {
            pool.extend(pi.components().iter().map(|c| (k, c.clone())));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    for t in 0..100 {
        let (k, f) = &pool[rng.gen_range(0..pool.len())];
        let spec = &entries[*k].spec;
        let dir = spec.frame().nth(rng.gen_range(0..spec.n())).unwrap();
        let p = spec.sample_points(1, 100 + t).remove(0);
        worst = worst.max(fd_crosscheck(f, &p, dir, 1e-5)?);
    }
    Ok(outcome(worst <= 1e-6, format!("100 triples from {} expressions, max rel {worst:.2e}", pool.len())))
}

fn c9_annotated_verdicts() -> srclab::Result<Outcome> {
    let cfg = SuiteConfig::default();
    let mut problems = Vec::new();
    for e in all_builtins() {
        for (name, pi) in &e.pi_variants {
            let ann = e.annotations.variant(name).expect("every variant is annotated");
            let r = run_suite(&e.spec, Some(pi), &cfg);
            let tag = format!("{}/{}", e.name, name);
            let failing: Vec<&str> = r.checks.iter().filter(|c| !c.pass && !c.is_skipped()).map(|c| c.id).collect();
            let skipped: Vec<&str> = r.checks.iter().filter(|c| c.is_skipped()).map(|c| c.id).collect();
            let nonvacuous: Vec<&str> =
                r.checks.iter().filter(|c| c.hypothesis_points.unwrap_or(0) > 0).map(|c| c.id).collect();
            if r.checks.iter().any(|c| !c.errors.is_empty()) {
                problems.push(format!("{tag}: evaluation errors"));
            }
            if failing != ann.failing {
                problems.push(format!("{tag}: failing {failing:?}, annotated {:?}", ann.failing));
            }
            if skipped != e.annotations.skipped || (!skipped.is_empty() && e.spec.ell() != 2) {
                problems.push(format!("{tag}: skipped {skipped:?}"));
            }
            if nonvacuous != ann.nonvacuous {
                problems.push(format!("{tag}: hypotheses held for {nonvacuous:?}, annotated {:?}", ann.nonvacuous));
            }
            let g = check_group_manifold(&e.spec, Some(pi), &cfg).verdict;
            if g != ann.group_manifold {
                problems.push(format!("{tag}: group manifold {g:?}, annotated {:?}", ann.group_manifold));
            }
            match (check_flatness_criterion(&e.spec, Some(pi), &cfg), &ann.flatness) {
                (Ok(f), Some(x)) => {
                    let got = (f.all(|p| p.r_zero), f.all(|p| p.s_zero), f.all(|p| p.pi_matches));
                    if !f.verdict || got != (x.r_zero, x.s_zero, x.pi_matches) {
                        problems.push(format!("{tag}: flatness {got:?}, verdict {}", f.verdict));
                    }
                }
                (Err(Error::RankTooSmall { .. }), None) => {}
                (other, _) => problems.push(format!("{tag}: flatness {:?}", other.map(|f| f.verdict))),
            }
        }
    }
    Ok(outcome(problems.is_empty(), if problems.is_empty() { "all variants match".into() } else { problems.join("; ") }))
}

const CORRUPT: [&str; 10] = [
    // unbalanced parenthesis
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx - (y/2 dz\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // unknown coordinate
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx - w dz\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // dangling operator
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx +\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // non-integer exponent
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx + x^1.5 dz\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // unknown function
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx + tan(x) dz\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // missing `=`
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 dx\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // bad integer
    "manifold a\ndim three\nhdim 2\ncoords x y z\nhframe\n  X1 = dx\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // stray character
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx $ dz\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // unknown keyword
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nframe\n  X1 = dx\n  X2 = dy\nvframe\n  Z = dz\nmetric identity\n",
    // metric entry not an expression
    "manifold a\ndim 3\nhdim 2\ncoords x y z\nhframe\n  X1 = dx\n  X2 = dy\nvframe\n  Z = dz\nmetric\n  1, *\n  0, 1\n",
];

const CORRUPT_LINES: [usize; 10] = [6, 6, 6, 6, 6, 6, 2, 6, 5, 11];

fn c10_frontend() -> Outcome {
    let mut problems = Vec::new();
    for e in all_builtins() {
        match parse_manifold(&serialize_manifold(&e.spec)) {
            Ok(back) if back == e.spec => {}
            _ => problems.push(format!("{} does not round trip", e.name)),
        }
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("report.json");
    let code = cli_main(["srclab", "verify", "--builtin", "heisenberg2", "--json", path.to_str().unwrap()]);
    if code != 0 {
        problems.push(format!("verify exited {code}"));
    }
    match std::fs::read_to_string(&path).map(|t| serde_json::from_str::<serde_json::Value>(&t)) {
        Ok(Ok(v)) => {
            let checks = v["checks"].as_array().map_or(0, Vec::len);
            let typed = v["schema_version"].is_u64()
                && v["manifold"] == "heisenberg2"
                && v["seed"].is_u64()
                && v["points"].is_u64()
                && v["jet_order"].is_u64()
                && v["warnings"].is_array()
                && v["timestamp"].is_u64()
                && v["checks"].as_array().is_some_and(|cs| {
                    cs.iter().all(|c| {
                        c["id"].is_string()
                            && c["description"].is_string()
                            && c["paper_ref"].is_string()
                            && (c["max_abs_residual"].is_f64() || c["max_abs_residual"].is_null())
                            && (c["max_rel_residual"].is_f64() || c["max_rel_residual"].is_null())
                            && c["tolerance"].is_f64()
                            && c["pass"].is_boolean()
                            && (c["skipped_reason"].is_string() || c["skipped_reason"].is_null())
                    })
                });
            if checks != 18 || !typed {
                problems.push("report does not match the schema".into());
            }
        }
        _ => problems.push("report is not valid JSON".into()),
    }
    for (k, (text, line)) in CORRUPT.iter().zip(CORRUPT_LINES).enumerate() {
        match parse_manifold(text) {
            Err(Error::Parse { line: l, column, .. }) if l == line && column > 0 => {}
            other => problems.push(format!("corrupt case {k}: {other:?}")),
        }
    }
    outcome(problems.is_empty(), if problems.is_empty() { "round trip, CLI, 10 corrupt specs".into() } else { problems.join("; ") })
}

fn main() {
    let fatal = |e: Error| outcome(false, format!("error: {e}"));
    let (w, c) = match c6_difference_formulas() {
        Ok(pair) => pair,
        Err(e) => (fatal(e.clone()), fatal(e)),
    };
    let results = [
        ("1", "connection contract", c1_connection_contract()),
        ("2", "Carnot group manifolds", c2_carnot_group_manifolds().unwrap_or_else(fatal)),
        ("3", "curvature relation R = K + P", c3_curvature_relation().unwrap_or_else(fatal)),
        ("4", "scalar chain on H2", c4_scalar_chain().unwrap_or_else(fatal)),
        ("5", "S invariance", c5_s_invariance().unwrap_or_else(fatal)),
        ("6a", "projective difference formula", w),
        ("6b", "conformal difference formula", c),
        ("7", "Bianchi and symmetry identities", c7_bianchi_suite()),
        ("8", "jets vs finite differences", c8_jets_vs_finite_differences().unwrap_or_else(fatal)),
        ("9", "annotated verdicts", c9_annotated_verdicts().unwrap_or_else(fatal)),
        ("10", "frontend", c10_frontend()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        println!("{} criterion {id}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
