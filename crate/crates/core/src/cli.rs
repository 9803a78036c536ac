//! Command-line front end: argument parsing, records and exit codes.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 budget or size
//! limit exceeded, 3 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::constants::{CoarseConstants, CONSTANTS_ENV};
use crate::error::{Error, Result};
use crate::farey::{cf_expand, farey_distance, farey_geodesic, intersection_number, Slope};
use crate::hierarchy::{build_hierarchy_path, check_hierarchy_axioms};
use crate::machinery::{
    coarse_equal, contraction_experiment, corpus, distance_formula, experiment_seed, finite_support_search, fit_constants,
    perturbed_quasi_geodesic, project_to_hierarchy, stability_experiment, ContractionParams, FitSpec,
};
use crate::marking::{marking_distance, marking_distance_bfs, Marking};
use crate::orbits::{axis_boundedness_sweep, enumerate_classes, growth_rate, length_spectrum};
use crate::projection::{annular_coefficients, annular_distance, bounded_combinatorics, twist_coordinate, Endpoint};
use crate::thurston::{cf_bound_certificate, classify, find_relation, fixed_points, psi, translation_length, TwistTuple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "torus-mm", version, about = "Curve-complex and hierarchy experiments on the once-punctured torus")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// State budget for breadth-first searches.
    #[arg(long = "budget-bfs", global = true, default_value_t = 1_000_000)]
    pub budget_bfs: u64,
    /// Tuple budget for class enumeration.
    #[arg(long = "budget-tuples", global = true, default_value_t = 10_000_000)]
    pub budget_tuples: u64,
    /// Constants file; defaults to $TORUS_MM_CONSTANTS, then the shipped file.
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Records)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Records,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Farey graph distances, geodesics and continued fractions.
    #[command(subcommand)]
    Farey(FareyCmd),
    /// Annular projections.
    #[command(subcommand)]
    Proj(ProjCmd),
    /// Thurston's construction and the ψ family.
    #[command(subcommand)]
    Pa(PaCmd),
    /// Hierarchy paths.
    #[command(subcommand)]
    Hier(HierCmd),
    /// Distance formula, projection, contraction and stability.
    #[command(subcommand)]
    Mm(MmCmd),
    /// Conjugacy classes and closed-orbit growth.
    #[command(subcommand)]
    Orbits(OrbitsCmd),
    /// Refit the coarse constants on the calibration corpora.
    Fit {
        /// Write the constants file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare against the active constants file; exit 1 on mismatch.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum FareyCmd {
    Dist { x: Slope, y: Slope },
    Geodesic { x: Slope, y: Slope },
    Cf { x: Slope },
    Intersect { x: Slope, y: Slope },
}

#[derive(Subcommand, Debug)]
pub enum ProjCmd {
    /// `d_γ(x, y)`.
    Dw {
        #[arg(long, allow_hyphen_values = true)]
        gamma: Slope,
        #[arg(long, allow_hyphen_values = true)]
        x: Endpoint,
        #[arg(long, allow_hyphen_values = true)]
        y: Endpoint,
    },
    /// Twist coordinate of `x` in the frame of `γ`.
    Twist {
        #[arg(long, allow_hyphen_values = true)]
        gamma: Slope,
        #[arg(long, allow_hyphen_values = true)]
        x: Slope,
    },
    /// All annular coefficients between two boundary points.
    Coeffs {
        #[arg(long, allow_hyphen_values = true)]
        x: Endpoint,
        #[arg(long, allow_hyphen_values = true)]
        y: Endpoint,
        /// Also decide K-bounded combinatorics.
        #[arg(long)]
        k: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PaCmd {
    /// Matrix, trace, translation length, fixed points and cf certificate of ψ.
    Build {
        #[arg(long)]
        k: u64,
        /// Exponents `q_1,...,q_n`.
        #[arg(long, value_delimiter = ',', required = true)]
        tuple: Vec<u64>,
        /// Bound B for the certificate; defaults to the tuple maximum.
        #[arg(long = "B")]
        b: Option<u64>,
    },
    /// Search short reduced words for a relation.
    Free {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
    },
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m1: Marking,
    #[arg(long, allow_hyphen_values = true)]
    pub m2: Marking,
}

#[derive(Subcommand, Debug)]
pub enum HierCmd {
    Build(PairArgs),
    /// Check the hierarchy-path properties with the active constants.
    Check(PairArgs),
    /// Build and check paths between random marking pairs.
    Sweep {
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[arg(long, default_value_t = 40)]
        height: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum MmCmd {
    /// Threshold distance formula against the exact marking distance.
    Formula {
        #[command(flatten)]
        pair: PairArgs,
        /// Threshold; defaults to M3.
        #[arg(long)]
        threshold: Option<u64>,
        /// Also run the budgeted BFS oracle.
        #[arg(long)]
        bfs: bool,
    },
    /// Index of the closest-point projection of a marking to the hierarchy path.
    Project {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        m: Marking,
    },
    Contraction {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    Stability {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 5)]
        paths: usize,
    },
    /// Search for annuli off the main geodesic with large projection distance.
    Support {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 40)]
        height: i64,
        #[arg(long, default_value_t = 6)]
        threshold: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrbitsCmd {
    /// Growth estimate over all classes with `n <= n_max`.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long = "B")]
        b: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
    },
    /// One line per class of length `n` with its translation length.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long = "B")]
        b: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Largest cf entry over all classes of length `<= n`.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long = "B")]
        b: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
}

/// Output of a command before formatting.
enum Output {
    Text(String),
    Record(Map<String, Value>),
    Rows { columns: Vec<&'static str>, rows: Vec<Vec<Value>>, summary: Option<Map<String, Value>> },
}

struct Outcome {
    output: Output,
    /// False when a checked property failed.
    ok: bool,
}

impl Outcome {
    fn ok(output: Output) -> Outcome {
        Outcome { output, ok: true }
    }
}

fn record(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are objects"),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } | Error::Overflow => EXIT_BUDGET,
        Error::NotHyperbolic => EXIT_ASSERTION,
        _ => EXIT_USAGE,
    }
}

struct Ctx {
    config: ConfigArgs,
    hash: String,
    constants: Option<CoarseConstants>,
}

impl Ctx {
    fn constants(&self) -> Result<&CoarseConstants> {
        self.constants.as_ref().ok_or_else(|| Error::Invalid("no constants loaded".into()))
    }
}

fn load_constants(cfg: &ConfigArgs) -> Result<(CoarseConstants, String)> {
    let text = match (&cfg.constants, std::env::var_os(CONSTANTS_ENV)) {
        (Some(p), _) => std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?,
        (None, Some(p)) => std::fs::read_to_string(&p).map_err(|e| Error::Invalid(format!("{}: {e}", p.to_string_lossy())))?,
        (None, None) => crate::constants::FROZEN.to_string(),
    };
    Ok((CoarseConstants::parse(&text)?, text))
}

/// Hash of everything that determines a command's output.
fn config_hash(cfg: &ConfigArgs, constants_text: &str, argv: &[String]) -> String {
    let mut h = Sha256::new();
    let fmt = match cfg.format {
        Format::Records => "records",
        Format::Csv => "csv",
    };
    h.update(format!("seed={}\nbudget_bfs={}\nbudget_tuples={}\nformat={fmt}\n", cfg.seed, cfg.budget_bfs, cfg.budget_tuples));
    h.update(Sha256::digest(constants_text.as_bytes()));
    for a in argv {
        h.update(a.as_bytes());
        h.update([0u8]);
    }
    let d = h.finalize();
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Arguments that are not part of the experiment configuration flags.
fn command_words(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let flag = a.split('=').next().unwrap_or("");
        if matches!(flag, "--seed" | "--budget-bfs" | "--budget-tuples" | "--constants" | "--format") {
            if !a.contains('=') {
                it.next();
            }
            continue;
        }
        out.push(a.clone());
    }
    out
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (constants, text) = match load_constants(&cli.config) {
        Ok((c, t)) => (Some(c), t),
        Err(e) => {
            // only commands that read constants need them
            if matches!(cli.command, Command::Hier(_) | Command::Mm(_) | Command::Fit { check: true, .. }) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            (None, String::new())
        }
    };
    let ctx = Ctx { hash: config_hash(&cli.config, &text, &command_words(&argv)), config: cli.config.clone(), constants };
    match dispatch(&ctx, cli.command) {
        Ok(o) => match emit(&ctx, o.output, out) {
            Ok(()) => {
                if o.ok {
                    EXIT_OK
                } else {
                    EXIT_ASSERTION
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(ctx: &Ctx, o: Output, out: &mut dyn Write) -> std::io::Result<()> {
    let hash = Value::String(ctx.hash.clone());
    match (o, ctx.config.format) {
        (Output::Text(t), _) => writeln!(out, "{t}"),
        (Output::Record(mut m), Format::Records) => {
            m.insert("config_hash".into(), hash);
            writeln!(out, "{}", Value::Object(m))
        }
        (Output::Record(m), Format::Csv) => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["key", "value"])?;
            w.write_record(["config_hash", &ctx.hash])?;
            for (k, v) in m {
                w.write_record([k, cell(&v)])?;
            }
            w.flush()
        }
        (Output::Rows { columns, rows, summary }, Format::Records) => {
            for r in rows {
                let mut m: Map<String, Value> = columns.iter().map(|c| c.to_string()).zip(r).collect();
                m.insert("config_hash".into(), hash.clone());
                writeln!(out, "{}", Value::Object(m))?;
            }
            if let Some(mut s) = summary {
                s.insert("config_hash".into(), hash);
                writeln!(out, "{}", Value::Object(s))?;
            }
            Ok(())
        }
        (Output::Rows { columns, rows, .. }, Format::Csv) => {
            let mut w = csv::Writer::from_writer(out);
            let mut head: Vec<&str> = columns.clone();
            head.push("config_hash");
            w.write_record(&head)?;
            for r in rows {
                let mut cells: Vec<String> = r.iter().map(cell).collect();
                cells.push(ctx.hash.clone());
                w.write_record(&cells)?;
            }
            w.flush()
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn dispatch(ctx: &Ctx, cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Farey(c) => farey(c),
        Command::Proj(c) => proj(c),
        Command::Pa(c) => pa(c),
        Command::Hier(c) => hier(ctx, c),
        Command::Mm(c) => mm(ctx, c),
        Command::Orbits(c) => orbits(ctx, c),
        Command::Fit { out, check } => fit(ctx, out, check),
    }
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn farey(c: FareyCmd) -> Result<Outcome> {
    let text = match c {
        FareyCmd::Dist { x, y } => farey_distance(&x, &y).to_string(),
        FareyCmd::Geodesic { x, y } => farey_geodesic(&x, &y).iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
        FareyCmd::Cf { x } => cf_expand(&x)?.to_string(),
        FareyCmd::Intersect { x, y } => intersection_number(&x, &y).to_string(),
    };
    Ok(Outcome::ok(Output::Text(text)))
}

fn proj(c: ProjCmd) -> Result<Outcome> {
    match c {
        ProjCmd::Dw { gamma, x, y } => {
            let (d, method) = match (&x, &y) {
                (Endpoint::Rational(a), Endpoint::Rational(b)) => (annular_distance(&gamma, a, b)?, "frame"),
                _ => {
                    let co = annular_coefficients(&x, &y)?;
                    (co.iter().find(|c| c.annulus == gamma).map_or(0, |c| c.value), "coefficient")
                }
            };
            Ok(Outcome::ok(Output::Record(record(json!({
                "gamma": gamma.to_string(), "x": x.to_string(), "y": y.to_string(), "d": d, "method": method,
            })))))
        }
        ProjCmd::Twist { gamma, x } => Ok(Outcome::ok(Output::Record(record(json!({
            "gamma": gamma.to_string(), "x": x.to_string(), "twist": twist_coordinate(&gamma, &x)?,
        }))))),
        ProjCmd::Coeffs { x, y, k } => {
            let rows = annular_coefficients(&x, &y)?
                .into_iter()
                .map(|c| vec![json!(c.annulus.to_string()), json!(c.value)])
                .collect();
            let (summary, ok) = match k {
                Some(k) => {
                    let b = bounded_combinatorics(&x, &y, k)?;
                    let w = b.witness.map(|w| json!({ "annulus": w.annulus.to_string(), "value": w.value }));
                    (Some(record(json!({ "x": x.to_string(), "y": y.to_string(), "k": k, "bounded": b.bounded, "witness": w }))), true)
                }
                None => (None, true),
            };
            Ok(Outcome { output: Output::Rows { columns: vec!["annulus", "value"], rows, summary }, ok })
        }
    }
}

fn pa(c: PaCmd) -> Result<Outcome> {
    match c {
        PaCmd::Build { k, tuple, b } => {
            let t = match b {
                Some(b) => TwistTuple::new(tuple, b)?,
                None => TwistTuple::tight(tuple)?,
            };
            let m = psi(&t, k)?;
            let class = classify(&m);
            let mut r = record(json!({
                "k": k,
                "tuple": t.to_string(),
                "B": t.bound(),
                "matrix": m.to_string(),
                "trace": m.trace().to_string(),
                "classification": class.to_string(),
            }));
            let tl = translation_length(&m)?;
            let (attr, rep) = fixed_points(&m)?;
            r.insert("translation_length".into(), json!(tl));
            r.insert("attracting".into(), json!(attr.to_string()));
            r.insert("repelling".into(), json!(rep.to_string()));
            let mut ok = true;
            if k >= 2 {
                let cert = cf_bound_certificate(&t, k)?;
                r.insert("cf".into(), json!(cert.cf.to_string()));
                r.insert("cf_max".into(), json!(cert.max_entry.to_string()));
                r.insert("cf_bound".into(), json!(cert.bound.to_string()));
                r.insert("cf_ok".into(), json!(cert.ok));
                ok = cert.ok;
            }
            Ok(Outcome { output: Output::Record(r), ok })
        }
        PaCmd::Free { k, maxlen } => {
            let rel = find_relation(k, maxlen)?;
            let r = record(json!({
                "k": k, "maxlen": maxlen, "free": rel.is_none(), "relation": rel.map(|w| w.to_string()),
            }));
            Ok(Outcome::ok(Output::Record(r)))
        }
    }
}

fn hier(ctx: &Ctx, c: HierCmd) -> Result<Outcome> {
    match c {
        HierCmd::Build(p) => {
            let h = build_hierarchy_path(&p.m1, &p.m2)?;
            let rows = h
                .steps
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let dom = h.domains.iter().find(|d| d.start <= i && i <= d.end).map(|d| d.annulus.to_string());
                    vec![json!(i), json!(m.to_string()), json!(dom)]
                })
                .collect();
            let summary = record(json!({
                "m1": p.m1.to_string(), "m2": p.m2.to_string(), "length": h.len(),
                "main_geodesic": strings(&h.main_geodesic),
                "domains": h.domains.iter().map(|d| json!({ "annulus": d.annulus.to_string(), "start": d.start, "end": d.end })).collect::<Vec<_>>(),
            }));
            Ok(Outcome::ok(Output::Rows { columns: vec!["index", "marking", "domain"], rows, summary: Some(summary) }))
        }
        HierCmd::Check(p) => {
            let h = build_hierarchy_path(&p.m1, &p.m2)?;
            let rep = check_hierarchy_axioms(&h, &ctx.constants()?.hierarchy()?)?;
            let rows = rep.checks.iter().map(|c| vec![json!(c.name), json!(c.passed), json!(c.witness)]).collect();
            let summary = record(json!({ "m1": p.m1.to_string(), "m2": p.m2.to_string(), "passed": rep.passed(), "note": rep.note }));
            Ok(Outcome { output: Output::Rows { columns: vec!["check", "passed", "witness"], rows, summary: Some(summary) }, ok: rep.passed() })
        }
        HierCmd::Sweep { paths, height } => {
            let hc = ctx.constants()?.hierarchy()?;
            let mut rows = Vec::new();
            let mut failed = 0;
            for (i, (a, b)) in corpus(ctx.config.seed, 0, paths, height).into_iter().enumerate() {
                let rep = check_hierarchy_axioms(&build_hierarchy_path(&a, &b)?, &hc)?;
                if !rep.passed() {
                    failed += 1;
                    let names: Vec<&str> = rep.failures().iter().map(|c| c.name).collect();
                    rows.push(vec![json!(i), json!(a.to_string()), json!(b.to_string()), json!(names.join(";"))]);
                }
            }
            let summary = record(json!({ "paths": paths, "height": height, "failed": failed }));
            Ok(Outcome { output: Output::Rows { columns: vec!["index", "m1", "m2", "failures"], rows, summary: Some(summary) }, ok: failed == 0 })
        }
    }
}

fn mm(ctx: &Ctx, c: MmCmd) -> Result<Outcome> {
    let cons = ctx.constants()?;
    let seed = ctx.config.seed;
    match c {
        MmCmd::Formula { pair, threshold, bfs } => {
            let hc = cons.hierarchy()?;
            let t = threshold.unwrap_or(hc.m3);
            let s = distance_formula(&pair.m1, &pair.m2, t);
            let d = marking_distance(&pair.m1, &pair.m2)?;
            let ok = coarse_equal(s.total() as f64, d as f64, hc.c1, hc.c2);
            let mut r = record(json!({
                "m1": pair.m1.to_string(), "m2": pair.m2.to_string(), "threshold": t,
                "terms": s.terms.iter().map(|x| json!({ "domain": x.domain.to_string(), "raw": x.raw, "cut": x.cut })).collect::<Vec<_>>(),
                "total": s.total(), "marking_distance": d, "c1": hc.c1, "c2": hc.c2, "coarse_equal": ok,
            }));
            let mut agree = true;
            if bfs {
                let b = marking_distance_bfs(&pair.m1, &pair.m2, ctx.config.budget_bfs)?;
                agree = b == d;
                r.insert("bfs_distance".into(), json!(b));
            }
            Ok(Outcome { output: Output::Record(r), ok: ok && agree })
        }
        MmCmd::Project { pair, m } => {
            let h = build_hierarchy_path(&pair.m1, &pair.m2)?;
            let i = project_to_hierarchy(&h, &m);
            Ok(Outcome::ok(Output::Record(record(json!({
                "m1": pair.m1.to_string(), "m2": pair.m2.to_string(), "m": m.to_string(),
                "index": i, "step": h.steps[i].to_string(), "path_length": h.len(),
            })))))
        }
        MmCmd::Contraction { pair, samples } => {
            let h = build_hierarchy_path(&pair.m1, &pair.m2)?;
            let p = ContractionParams::from_constants(cons, ctx.config.budget_bfs)?;
            let rep = contraction_experiment(&h, samples, seed, &p)?;
            let rows = rep
                .samples
                .iter()
                .map(|s| vec![json!(s.marking.to_string()), json!(s.distance), json!(s.radius), json!(s.ball_size), json!(s.diameter)])
                .collect();
            let summary = record(json!({ "path_length": h.len(), "samples": samples, "max_diameter": rep.max_diameter, "N": rep.bound, "ok": rep.ok }));
            Ok(Outcome {
                output: Output::Rows { columns: vec!["marking", "distance", "radius", "ball_size", "diameter"], rows, summary: Some(summary) },
                ok: rep.ok,
            })
        }
        MmCmd::Stability { pair, paths } => {
            let h = build_hierarchy_path(&pair.m1, &pair.m2)?;
            let (k0, k, d) = (cons.value("K0")?, cons.int("K")?, cons.int("D")?);
            let mut rows = Vec::new();
            let mut ok = true;
            for j in 0..paths {
                let f = perturbed_quasi_geodesic(&h, experiment_seed(seed, 0, j), k0, 3)?;
                let rep = stability_experiment(&h, &f, k0, k, d)?;
                ok &= rep.ok;
                rows.push(vec![json!(j), json!(rep.path_len), json!(rep.max_deviation), json!(rep.ok)]);
            }
            let summary = record(json!({ "path_length": h.len(), "paths": paths, "K0": k0, "D": d, "ok": ok }));
            Ok(Outcome { output: Output::Rows { columns: vec!["path", "length", "max_deviation", "ok"], rows, summary: Some(summary) }, ok })
        }
        MmCmd::Support { pairs, height, threshold } => {
            let found = finite_support_search(seed, 0, pairs, height, threshold)?;
            let rows = found
                .iter()
                .map(|c| vec![json!(c.m1.to_string()), json!(c.m2.to_string()), json!(c.annulus.to_string()), json!(c.distance)])
                .collect();
            let summary = record(json!({ "pairs": pairs, "height": height, "threshold": threshold, "counterexamples": found.len() }));
            Ok(Outcome {
                output: Output::Rows { columns: vec!["m1", "m2", "annulus", "distance"], rows, summary: Some(summary) },
                ok: found.is_empty(),
            })
        }
    }
}

fn orbits(ctx: &Ctx, c: OrbitsCmd) -> Result<Outcome> {
    let budget = ctx.config.budget_tuples;
    match c {
        OrbitsCmd::Count { n, b, k, c } => {
            let g = growth_rate(b, n, k, c, budget)?;
            let proxy = g.proxy.as_ref().map(|p| {
                json!({
                    "buckets": p.buckets.iter().map(|(l, n)| json!([l, n])).collect::<Vec<_>>(),
                    "max_length": p.max_length,
                    "estimate": p.estimate,
                })
            });
            let r = record(json!({
                "B": g.b, "n_max": g.n_max, "k": g.k, "C": g.c,
                // counts can exceed the exact range of a JSON number
                "counts": g.counts.iter().map(|(l, n)| json!([l, n.to_string()])).collect::<Vec<_>>(),
                "estimate": g.estimate,
                "lower_bound": g.lower_bound,
                "lower_bound_limit": g.lower_bound_limit,
                "proxy": proxy,
            }));
            Ok(Outcome::ok(Output::Record(r)))
        }
        OrbitsCmd::Spectrum { n, b, k } => {
            let rows = length_spectrum(n, b, k, budget)?
                .into_iter()
                .map(|(cl, l)| vec![json!(n), json!(cl.representative.to_string()), json!(cl.multiplicity), json!(l)])
                .collect();
            Ok(Outcome::ok(Output::Rows { columns: vec!["n", "class", "multiplicity", "length"], rows, summary: None }))
        }
        OrbitsCmd::Sweep { n, b, k } => {
            let s = axis_boundedness_sweep(n, b, k, budget)?;
            let classes: usize = (1..=n).map(|m| enumerate_classes(m, b, budget).map(|v| v.len())).sum::<Result<usize>>()?;
            let r = record(json!({
                "n_max": n, "B": b, "k": k, "classes": classes,
                "empirical_K": s.empirical_k.to_string(), "bound": s.bound.to_string(),
                "witness": s.witness.map(|t| t.to_string()), "ok": s.ok,
            }));
            Ok(Outcome { output: Output::Record(r), ok: s.ok })
        }
    }
}

fn fit(ctx: &Ctx, out: Option<PathBuf>, check: bool) -> Result<Outcome> {
    let spec = FitSpec { seed: ctx.config.seed, bfs_budget: ctx.config.budget_bfs, ..FitSpec::default() };
    let c = fit_constants(&spec)?;
    let text = c.to_string();
    let ok = !check || c.same_values(ctx.constants()?);
    match out {
        Some(p) => {
            std::fs::write(&p, &text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            Ok(Outcome { output: Output::Text(format!("wrote {}", p.display())), ok })
        }
        None => Ok(Outcome { output: Output::Text(text.trim_end().to_string()), ok }),
    }
}
