//! `adlvlab`: JSON front end over the adlvlab library.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 for usage,
//! input or budget errors. Every outcome, errors included, is a single JSON
//! document on stdout (or a plain table with `--table`).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use adlvlab::adlv::{defect, nonempty_and_dimension, q_check, rat_json, top_components, verify_theorem_a};
use adlvlab::affineweyl::{format_element, format_word, length, parse_element, Frame};
use adlvlab::cache::Cache;
use adlvlab::classpoly::{Engine, Strategy};
use adlvlab::grid::{run_grid, GRID_PRESETS, GRID_Q};
use adlvlab::parahoric::verify_prop36;
use adlvlab::repcalc::chen_zhu_count;
use adlvlab::rootdata::{load_group, GroupDatum};
use adlvlab::sigmaconj::{enumerate_b_g_mu, newton_kottwitz, BClass, DEFAULT_BUDGET};
use adlvlab::{presets, Error};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "adlvlab", version, about = "Class polynomials and ADLV invariants on small root data")]
struct Cli {
    /// Group file, or `preset:<name>` for a shipped datum.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Node budget for every breadth-first search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Residue field sizes, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    q: Vec<u64>,
    /// Directory for persisted class polynomials. ADLVLAB_CACHE wins.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads for `grid`.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Plain-text table instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a group file and describe it.
    Validate,
    /// Length of an element of the Iwahori–Weyl group.
    Length { element: String },
    /// Class polynomials F_{w,C} of an element.
    Classpoly { element: String },
    /// B(G, μ) with the closed-form dimension of each X_μ(b).
    Bgmu { mu: String },
    /// Top-dimensional components of X_μ(b). `b` is a class key or `basic`.
    Adlv { mu: String, b: String },
    /// Every stabilizer over B(G, μ) is a very special parahoric.
    CheckTheoremA { mu: String },
    /// Very special parahorics maximize the volume, for every inner twist.
    CheckProp36,
    /// Orbit counts against dim V_μ(λ_b) over B(G, μ).
    CheckChenzhu { mu: String },
    /// The full acceptance grid.
    Grid,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            emit(&error_value("Usage", msg.trim()), false);
            return ExitCode::from(2);
        }
    };
    let (value, code) = match run(&cli) {
        Ok((v, true)) => (v, 0),
        Ok((v, false)) => (v, 1),
        Err(Failure::Usage(m)) => (error_value("Usage", &m), 2),
        Err(Failure::Lib(e)) => {
            let code = if e.is_check_failure() { 1 } else { 2 };
            (error_value(e.kind(), &e.to_string()), code)
        }
    };
    emit(&value, cli.table);
    ExitCode::from(code)
}

fn error_value(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

fn emit(v: &Value, table: bool) {
    let text = if table {
        render_table(v)
    } else {
        format!("{}\n", serde_json::to_string_pretty(v).expect("values serialize"))
    };
    // A closed pipe downstream is not our failure.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: &Cli) -> Outcome {
    if cli.budget == 0 {
        return Err(Failure::Usage("--budget must be positive".into()));
    }
    if let Some(q) = cli.q.iter().find(|&&q| q < 2) {
        return Err(Failure::Usage(format!("q = {q} is not a residue field size")));
    }
    if cli.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be positive".into()));
    }
    let qs: Vec<u64> = if cli.q.is_empty() { GRID_Q.to_vec() } else { cli.q.clone() };
    if let Command::Grid = cli.command {
        let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let report = run_grid(&GRID_PRESETS, &qs, jobs, cli.budget, cli.cache.as_deref())?;
        let ok = report.ok();
        return Ok((to_value(&report), ok));
    }
    let g = Arc::new(resolve_group(cli.group.as_deref())?);
    let engine = || -> Result<Engine, Failure> {
        let e = Engine::new(Frame::standard(g.clone())?, Strategy::Deterministic).with_budget(cli.budget);
        Ok(match Cache::resolve(cli.cache.as_deref()) {
            Some(c) => e.with_cache(c)?,
            None => e,
        })
    };
    match &cli.command {
        Command::Validate => Ok((describe(&g), true)),
        Command::Length { element } => {
            let w = parse_element(&g, element)?;
            let v = json!({
                "element": format_element(&g, &w),
                "word": format_word(&g, &w),
                "length": length(&g, &w),
            });
            Ok((v, true))
        }
        Command::Classpoly { element } => {
            let e = engine()?;
            let w = parse_element(&g, element)?;
            let polys = e.class_polynomials(&w)?;
            let classes: Vec<Value> = polys
                .iter()
                .map(|(k, p)| json!({ "class": k.to_text(&g), "poly": p }))
                .collect();
            Ok((json!({ "element": format_element(&g, &w), "length": length(&g, &w), "classes": classes }), true))
        }
        Command::Bgmu { mu } => {
            let e = engine()?;
            let mu = parse_mu(&g, mu)?;
            let mut rows = Vec::new();
            for b in enumerate_b_g_mu(&e.frame, &mu, cli.budget)? {
                let (nonempty, dim) = nonempty_and_dimension(&e.frame, &mu, &b)?;
                rows.push(json!({
                    "b": b.key.to_text(&g),
                    "newton": rat_json(&b.newton),
                    "kappa": g.omega_name(b.kappa),
                    "basic": b.basic,
                    "nonempty": nonempty,
                    "dim": dim,
                    "defect": defect(&e.frame, &b),
                }));
            }
            Ok((json!({ "mu": basis(&g, &mu), "classes": rows }), true))
        }
        Command::Adlv { mu, b } => {
            let e = engine()?;
            let mu = parse_mu(&g, mu)?;
            let class = resolve_b(&e, &mu, b)?;
            let mut report = top_components(&e, &mu, &class, true)?;
            if class.basic && report.nonempty {
                for &q in &qs {
                    report.q_check.push(q_check(&report, q)?);
                }
            }
            let ok = report.all_very_special && report.q_check.iter().all(|c| c.holds);
            Ok((to_value(&report), ok))
        }
        Command::CheckTheoremA { mu } => {
            let e = engine()?;
            let mu = parse_mu(&g, mu)?;
            let reports = verify_theorem_a(&e, &mu, &qs)?;
            let ok = reports.iter().all(|r| r.all_very_special && r.q_check.iter().all(|c| c.holds));
            Ok((json!({ "mu": basis(&g, &mu), "holds": ok, "classes": to_value(&reports) }), ok))
        }
        Command::CheckProp36 => {
            let base = Frame::standard(g.clone())?;
            let mut frames = Vec::new();
            let mut ok = true;
            for k in 0..g.omega.len() {
                let f = base.with_frob(base.frob.with_twist(&g, k))?;
                let report = verify_prop36(&f, &qs)?;
                ok &= report.holds();
                frames.push(json!({ "twist": g.omega_name(k), "holds": report.holds(), "report": to_value(&report) }));
            }
            Ok((json!({ "group": g.name, "holds": ok, "frames": frames }), ok))
        }
        Command::CheckChenzhu { mu } => {
            let e = engine()?;
            let mu = parse_mu(&g, mu)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for b in enumerate_b_g_mu(&e.frame, &mu, cli.budget)? {
                let report = top_components(&e, &mu, &b, false)?;
                let cz = chen_zhu_count(&e.frame, &mu, &b)?;
                let agree = !report.nonempty || cz == report.orbit_count;
                ok &= agree;
                rows.push(json!({
                    "b": report.b,
                    "nonempty": report.nonempty,
                    "orbit_count": report.orbit_count,
                    "chen_zhu": cz,
                    "agree": agree,
                }));
            }
            Ok((json!({ "mu": basis(&g, &mu), "holds": ok, "classes": rows }), ok))
        }
        Command::Grid => unreachable!("handled above"),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn resolve_group(spec: Option<&str>) -> Result<GroupDatum, Failure> {
    let spec = spec.ok_or_else(|| Failure::Usage("--group is required".into()))?;
    if let Some(name) = spec.strip_prefix("preset:") {
        return Ok(presets::load(name)?);
    }
    let text = std::fs::read_to_string(Path::new(spec)).map_err(Error::from)?;
    Ok(load_group(&text)?)
}

fn describe(g: &GroupDatum) -> Value {
    json!({
        "name": g.name,
        "rank": g.rank(),
        "fingerprint": g.fingerprint(),
        "affine_simple": g.num_simple(),
        "omega": (0..g.omega.len()).map(|k| g.omega_name(k)).collect::<Vec<_>>(),
        "split": g.frobenius.is_split(),
        "weyl_order": g.weyl_elements().map(|w| w.len()).ok(),
    })
}

/// μ in Λ-basis coordinates, "1,0" or "[1,0]".
fn parse_mu(g: &GroupDatum, text: &str) -> Result<Vec<i64>, Failure> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let coords: Vec<i64> = inner
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("mu must be a list of integers, got {text:?}")))?;
    if coords.len() != g.rank() {
        return Err(Failure::Usage(format!("mu needs {} coordinates, got {}", g.rank(), coords.len())));
    }
    Ok(g.from_basis_coords(&coords))
}

fn basis(g: &GroupDatum, mu: &[i64]) -> Vec<i64> {
    g.to_basis_coords(mu).unwrap_or_else(|| mu.to_vec())
}

/// `basic`, or any element of the class (a "B:" key or plain element text),
/// matched against B(G, μ) by Newton point and Kottwitz class.
fn resolve_b(e: &Engine, mu: &[i64], text: &str) -> Result<BClass, Failure> {
    let f = &e.frame;
    let classes = enumerate_b_g_mu(f, mu, e.budget)?;
    let found = if text.trim() == "basic" {
        classes.into_iter().find(|c| c.basic)
    } else {
        let body = text.trim().strip_prefix("B:").unwrap_or(text);
        let nk = newton_kottwitz(f, &parse_element(f.g(), body)?);
        classes.into_iter().find(|c| c.newton == nk.newton && c.kappa == nk.kappa)
    };
    found.ok_or_else(|| Failure::Usage(format!("{text:?} is not a class in B(G, mu)")))
}

/// Rows of the first array of objects found, or key/value lines.
fn render_table(v: &Value) -> String {
    let cell = |x: &Value| match x {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let mut out = String::new();
    let Value::Object(map) = v else {
        return format!("{}\n", cell(v));
    };
    let mut rows: Option<&Vec<Value>> = None;
    for (k, x) in map {
        match x {
            Value::Array(a) if rows.is_none() && a.first().is_some_and(Value::is_object) => rows = Some(a),
            Value::Object(_) | Value::Array(_) => {}
            _ => out.push_str(&format!("{k}: {}\n", cell(x))),
        }
        if let Value::Object(inner) = x {
            for (k2, y) in inner {
                out.push_str(&format!("{k}.{k2}: {}\n", cell(y)));
            }
        }
    }
    let Some(rows) = rows else { return out };
    let header: Vec<String> = match &rows[0] {
        Value::Object(m) => m.keys().cloned().collect(),
        _ => unreachable!("checked above"),
    };
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| header.iter().map(|h| r.get(h).map(cell).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| body.iter().map(|r| r[i].chars().count()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    out.push_str(&line(&header));
    for r in &body {
        out.push_str(&line(r));
    }
    out
}
