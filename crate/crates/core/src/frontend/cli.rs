//! `srclab` command line: `verify`, `eval`, `catalog`, `parse`.
//!
//! Exit codes: 0 success, 1 failing checks, 2 usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::connection::OneFormData;
use crate::error::{Error, Result};
use crate::frontend::catalog::{all_builtins, builtin};
use crate::frontend::parser::{parse_document, parse_expression};
use crate::frontend::report_json::{now, report_to_json};
use crate::manifold::ManifoldSpec;
use crate::verifier::{check_table, named_tensor, run_suite, SuiteConfig, TENSOR_NAMES};

#[derive(Parser, Debug)]
#[command(name = "srclab", version, about = "Sub-Riemannian connections and curvature checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every identity check and write a JSON report.
    Verify(VerifyArgs),
    /// Print one tensor at one point.
    Eval(EvalArgs),
    /// List the built-in manifolds, their one-form variants and the check table.
    Catalog,
    /// Validate a spec file.
    Parse { file: PathBuf },
}

#[derive(Args, Debug)]
struct Source {
    /// Built-in catalog entry.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    builtin: Option<String>,
    /// Spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// One-form: `const:a,b,...`, `file:PATH` (one expression per line) or
    /// `builtin:VARIANT`.
    #[arg(long)]
    pi: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override every check's relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    tensor: String,
    /// Comma separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

fn numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("not a number: `{}`", s.trim())))
        })
        .collect()
}

fn located(path: &Path, e: &Error) -> String {
    match e {
        Error::Parse { line, column, message } => format!("{}:{line}:{column}: {message}", path.display()),
        Error::Validation { line, message } => format!("{}:{line}: {message}", path.display()),
        other => format!("{}: {other}", path.display()),
    }
}

struct Loaded {
    spec: ManifoldSpec,
    pi: Option<OneFormData>,
}

fn load(source: &Source) -> std::result::Result<Loaded, String> {
    let (spec, variants) = match (&source.builtin, &source.spec) {
        (Some(name), _) => {
            let entry = builtin(name).map_err(|e| e.to_string())?;
            (entry.spec, entry.pi_variants)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let doc = parse_document(&text).map_err(|e| located(path, &e))?;
            (doc.spec, Vec::new())
        }
        (None, None) => return Err("one of --builtin or --spec is required".into()),
    };
    let pi = match source.pi.as_deref() {
        None => spec.oneform().map(|c| OneFormData::new(c.to_vec())),
        Some(arg) => Some(one_form(arg, &spec, &variants)?),
    };
    if let Some(p) = &pi {
        if p.len() != spec.ell() {
            return Err(format!("--pi has {} components, expected {}", p.len(), spec.ell()));
        }
    }
    Ok(Loaded { spec, pi })
}

fn one_form(
    arg: &str,
    spec: &ManifoldSpec,
    variants: &[(&'static str, OneFormData)],
) -> std::result::Result<OneFormData, String> {
    if let Some(rest) = arg.strip_prefix("const:") {
        return numbers(rest).map(|v| OneFormData::constant(&v)).map_err(|e| e.to_string());
    }
    if let Some(path) = arg.strip_prefix("file:") {
        let path = Path::new(path);
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut comps = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let e = parse_expression(line, spec.coords()).map_err(|e| match e {
                Error::Parse { column, message, .. } => format!("{}:{}:{column}: {message}", path.display(), k + 1),
                other => located(path, &other),
            })?;
            comps.push(e);
        }
        return Ok(OneFormData::new(comps));
    }
    if let Some(name) = arg.strip_prefix("builtin:") {
        return variants.iter().find(|(n, _)| *n == name).map(|(_, p)| p.clone()).ok_or_else(|| {
            let names: Vec<&str> = variants.iter().map(|(n, _)| *n).collect();
            format!("unknown one-form variant `{name}` (available: {})", names.join(", "))
        });
    }
    Err(format!("--pi must be const:..., file:... or builtin:..., got `{arg}`"))
}

fn verify(args: VerifyArgs) -> i32 {
    let loaded = match load(&args.source) {
        Ok(l) => l,
        Err(m) => {
            eprintln!("error: {m}");
            return 2;
        }
    };
    let config = SuiteConfig {
        points: args.points,
        seed: args.seed,
        tol: args.tol,
    };
    let report = run_suite(&loaded.spec, loaded.pi.as_ref(), &config);
    let json = report_to_json(&report, now());
    match &args.json {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{json}"),
    }
    for c in &report.checks {
        let status = match (&c.skipped_reason, c.pass) {
            (Some(_), _) => "SKIP",
            (None, true) => "PASS",
            (None, false) => "FAIL",
        };
        eprintln!("{} {status} rel={:.3e} {}", c.id, c.max_rel_residual, c.description);
        for e in c.errors.iter().take(3) {
            eprintln!("    {e}");
        }
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.all_pass() {
        0
    } else {
        1
    }
}

fn eval(args: EvalArgs) -> i32 {
    let loaded = match load(&args.source) {
        Ok(l) => l,
        Err(m) => {
            eprintln!("error: {m}");
            return 2;
        }
    };
    if !TENSOR_NAMES.contains(&args.tensor.as_str()) {
        eprintln!("error: unknown tensor `{}`; expected one of {}", args.tensor, TENSOR_NAMES.join(", "));
        return 2;
    }
    let point = match numbers(&args.point) {
        Ok(p) if p.len() == loaded.spec.n() => p,
        Ok(p) => {
            eprintln!("error: --point has {} coordinates, expected {}", p.len(), loaded.spec.n());
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match named_tensor(&loaded.spec, loaded.pi.as_ref(), &args.tensor, &point) {
        Ok(t) => {
            for (ix, v) in t.entries() {
                let ix: Vec<String> = ix.iter().map(usize::to_string).collect();
                // adding 0.0 turns -0.0 into 0.0
                println!("{}[{}] = {:.16e}", args.tensor, ix.join(","), v + 0.0);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn catalog() -> i32 {
    for e in all_builtins() {
        println!("{}  n={} l={}  {}", e.name, e.spec.n(), e.spec.ell(), e.description);
        if !e.annotations.skipped.is_empty() {
            println!("    skipped: {}", e.annotations.skipped.join(" "));
        }
        for v in &e.annotations.variants {
            let mut line = format!("    pi {:<18} group manifold: {:?}", v.variant, v.group_manifold);
            if !v.failing.is_empty() {
                line += &format!("; failing: {}", v.failing.join(" "));
            }
            if !v.nonvacuous.is_empty() {
                line += &format!("; hypotheses hold: {}", v.nonvacuous.join(" "));
            }
            println!("{line}");
        }
    }
    println!();
    for c in check_table() {
        println!("{}  (l >= {})  {}", c.id, c.required_rank, c.description);
    }
    0
}

fn parse(file: &Path) -> i32 {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return 2;
        }
    };
    match parse_document(&text) {
        Ok(doc) => {
            println!(
                "{}: ok ({}: n={} l={})",
                file.display(),
                doc.spec.name(),
                doc.spec.n(),
                doc.spec.ell()
            );
            0
        }
        Err(e) => {
            eprintln!("{}", located(file, &e));
            2
        }
    }
}

/// Runs the command line given `args` (including the program name) and
/// returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a),
        Command::Catalog => catalog(),
        Command::Parse { file } => parse(&file),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(cli_main(["srclab", "catalog"]), 0);
        assert_eq!(cli_main(["srclab", "frobnicate"]), 2);
        assert_eq!(cli_main(["srclab", "verify", "--builtin", "nope"]), 2);
        assert_eq!(cli_main(["srclab", "eval", "--builtin", "heisenberg1", "--tensor", "K", "--point", "1,2"]), 2);
        assert_eq!(
            cli_main(["srclab", "eval", "--builtin", "heisenberg1", "--tensor", "K", "--point", "-0.1,0.2,0.3"]),
            0
        );
    }

    #[test]
    fn pi_arguments() {
        let e = builtin("heisenberg1").unwrap();
        assert_eq!(one_form("const:1,2", &e.spec, &e.pi_variants).unwrap(), OneFormData::constant(&[1.0, 2.0]));
        assert!(one_form("builtin:trig", &e.spec, &e.pi_variants).is_ok());
        assert!(one_form("builtin:nope", &e.spec, &e.pi_variants).is_err());
        assert!(one_form("const:1,x", &e.spec, &e.pi_variants).is_err());
        assert!(one_form("weird", &e.spec, &e.pi_variants).is_err());
    }
}
