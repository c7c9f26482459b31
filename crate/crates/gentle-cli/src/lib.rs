//! Command-line front end.
//!
//! Exit codes: 0 for success or an equivalent verdict, 1 for an inequivalent
//! verdict (or a non-gentle input under `validate`), 2 for any error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gentle_core::curves::boundary_curves;
use gentle_core::invariants::{
    ag_invariant, compare_records, compute_invariants, surface_invariants, InvariantOptions, InvariantRecord, Verdict,
    DEFAULT_BUDGET,
};
use gentle_core::presentation::{parse_presentation, validate_gentle, Classification, GentlePresentation};
use gentle_core::surface::{build_dissected_surface, compute_shape, parse_dissection, regions, DissectedSurface};
use gentle_core::surface_cut::{compare_cut_records, cut_algebra, cut_degree, cut_record, parse_triangulation};
use gentle_core::tilting::{
    check_dissection, levels_at_points, parse_candidate, silting_verdict, synthesize_grading, Synthesis,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "gentle-deq", version, about = "Derived equivalence of gentle algebras")]
pub struct RunConfig {
    /// Cap on spliced candidates when searching a genus one symplectic pair.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Seed for spanning tree choices (canonical tree when absent).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a presentation as gentle, locally gentle or invalid.
    Validate { file: PathBuf },
    /// Print the dissected surface of an algebra or a dissection file.
    Surface { file: PathBuf },
    /// Print the invariant record.
    Invariants { file: PathBuf },
    /// Print the Avella-Alaminos and Geiss pairs.
    Ag { file: PathBuf },
    /// Decide derived equivalence of two algebras.
    Compare { a: PathBuf, b: PathBuf },
    /// Check a graded candidate dissection.
    Tilt {
        surface: PathBuf,
        candidate: PathBuf,
        /// Replace the gradings by synthesized ones when possible.
        #[arg(long)]
        synthesize: bool,
    },
    /// Decide derived equivalence of two surface cut algebras.
    CutCompare { a: PathBuf, b: PathBuf },
    /// Partition the entries of a manifest into derived equivalence classes.
    Batch { manifest: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn first_directive(text: &str) -> Option<&str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next())
}

/// Reads an algebra, a dissection or a triangulation (via its cut algebra).
enum Input {
    Algebra(GentlePresentation),
    Surface(DissectedSurface),
}

fn load(path: &Path) -> Result<Input> {
    let text = read(path)?;
    match first_directive(&text) {
        Some("surface") => Ok(Input::Surface(
            parse_dissection(&text).with_context(|| format!("parsing {}", path.display()))?,
        )),
        Some("triangulation") => {
            let t = parse_triangulation(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok(Input::Algebra(cut_algebra(&t)))
        }
        _ => Ok(Input::Algebra(
            parse_presentation(&text).with_context(|| format!("parsing {}", path.display()))?,
        )),
    }
}

fn load_surface(path: &Path) -> Result<DissectedSurface> {
    match load(path)? {
        Input::Surface(d) => Ok(d),
        Input::Algebra(p) => Ok(build_dissected_surface(&p)?),
    }
}

fn record_of(path: &Path, opts: &InvariantOptions) -> Result<InvariantRecord> {
    match load(path)? {
        Input::Surface(d) => Ok(surface_invariants(&d, opts)?),
        Input::Algebra(p) => Ok(compute_invariants(&p, opts)?),
    }
}

fn emit(out: &mut dyn Write, format: Format, mut value: Value, table: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Json => {
            if let Value::Object(m) = &mut value {
                m.insert("schema".into(), json!(1));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        Format::Table => write!(out, "{}", table())?,
    }
    Ok(())
}

fn verdict_table(v: &Verdict) -> String {
    match v {
        Verdict::Equivalent => "verdict: equivalent\n".into(),
        Verdict::Inequivalent { clause, detail } => {
            format!("verdict: inequivalent\nclause:  {clause}\ndetail:  {detail}\n")
        }
    }
}

fn record_table(r: &InvariantRecord) -> String {
    let mut s = String::new();
    let sh = &r.shape;
    s.push_str(&format!(
        "genus {}  boundary {}  punctures {}  green {}  red {}\n",
        sh.genus, sh.boundary, sh.punctures, sh.marked_green, sh.marked_red
    ));
    for (n, w) in &r.boundary {
        s.push_str(&format!("boundary  n={n:<3} w={w}\n"));
    }
    for w in &r.punctures {
        s.push_str(&format!("puncture  w={w}\n"));
    }
    s.push_str(&format!("ag        {:?}\n", r.ag));
    s.push_str(&format!("genus     {:?}\n", r.genus_datum));
    s
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let opts = InvariantOptions {
        budget: cfg.budget as usize,
        seed: cfg.seed,
    };
    match &cfg.command {
        Command::Validate { file } => {
            let p = match load(file)? {
                Input::Algebra(p) => p,
                Input::Surface(_) => bail!("validate expects an algebra presentation"),
            };
            let c = validate_gentle(&p);
            let code = i32::from(c != Classification::Gentle);
            let label = match &c {
                Classification::Gentle => "gentle".to_string(),
                Classification::LocallyGentleInfinite { cycle } => format!(
                    "locally gentle, infinite dimensional (cycle {})",
                    cycle
                        .iter()
                        .map(|&a| p.arrows[a].id.as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
                Classification::Invalid { reason } => format!("invalid: {reason}"),
            };
            emit(out, cfg.format, json!({ "name": p.name, "classification": c }), || {
                format!("{label}\n")
            })?;
            Ok(code)
        }
        Command::Surface { file } => {
            let d = load_surface(file)?;
            let shape = compute_shape(&d);
            let curves = boundary_curves(&d).ok();
            let fans: Vec<Value> = d
                .fans
                .iter()
                .map(|f| {
                    json!({
                        "ends": f.ends.iter().map(|&h| d.half_name(h)).collect::<Vec<_>>(),
                        "interior": f.interior,
                    })
                })
                .collect();
            let regs: Vec<Value> = regions(&d)
                .iter()
                .map(
                    |r| json!({ "kind": r.kind, "sides": r.sides.iter().map(|&h| d.half_name(h)).collect::<Vec<_>>() }),
                )
                .collect();
            let bc: Option<Vec<Value>> = curves.as_ref().map(|cs| {
                cs.iter()
                    .map(|c| {
                        json!({
                            "kind": c.kind,
                            "marks": c.marks,
                            "winding": c.winding,
                            "walk": c.walk.iter().map(|&h| d.half_name(h)).collect::<Vec<_>>(),
                        })
                    })
                    .collect()
            });
            emit(
                out,
                cfg.format,
                json!({ "name": d.name, "shape": shape, "fans": fans, "regions": regs, "boundary_curves": bc }),
                || {
                    let mut s = d.to_text();
                    s.push_str(&format!("{shape:?}\n"));
                    s
                },
            )?;
            Ok(0)
        }
        Command::Invariants { file } => {
            let r = record_of(file, &opts)?;
            emit(out, cfg.format, serde_json::to_value(&r)?, || record_table(&r))?;
            Ok(0)
        }
        Command::Ag { file } => {
            let ag = match load(file)? {
                Input::Algebra(p) => ag_invariant(&p)?,
                Input::Surface(d) => surface_invariants(&d, &opts)?.ag,
            };
            emit(out, cfg.format, json!({ "ag": ag }), || {
                ag.iter().map(|(n, m)| format!("({n}, {m})\n")).collect()
            })?;
            Ok(0)
        }
        Command::Compare { a, b } => {
            let ra = record_of(a, &opts)?;
            let rb = record_of(b, &opts)?;
            let v = compare_records(&ra, &rb);
            let code = i32::from(!v.is_equivalent());
            emit(out, cfg.format, json!({ "result": v, "a": ra, "b": rb }), || {
                verdict_table(&v)
            })?;
            Ok(code)
        }
        Command::CutCompare { a, b } => {
            let ta = parse_triangulation(&read(a)?).with_context(|| format!("parsing {}", a.display()))?;
            let tb = parse_triangulation(&read(b)?).with_context(|| format!("parsing {}", b.display()))?;
            let ra = cut_record(&ta, &opts)?;
            let rb = cut_record(&tb, &opts)?;
            let v = compare_cut_records(&ra, &rb);
            let degrees = |t: &gentle_core::surface_cut::CutTriangulation| -> Result<BTreeMap<String, i64>> {
                t.curves
                    .iter()
                    .map(|c| Ok((c.name.clone(), cut_degree(t, &c.crossings)?)))
                    .collect()
            };
            let code = i32::from(!v.is_equivalent());
            emit(
                out,
                cfg.format,
                json!({
                    "result": v,
                    "a": { "record": ra, "curve_degrees": degrees(&ta)? },
                    "b": { "record": rb, "curve_degrees": degrees(&tb)? },
                }),
                || verdict_table(&v),
            )?;
            Ok(code)
        }
        Command::Tilt {
            surface,
            candidate,
            synthesize,
        } => {
            let d = load_surface(surface)?;
            let mut gd = parse_candidate(&d, &read(candidate)?)?;
            let check = check_dissection(&d, &gd.names, &gd.arcs)?;
            let synth = synthesize_grading(&d, &gd.names, &gd.arcs)?;
            if *synthesize {
                match &synth {
                    Synthesis::Gradings { gradings, .. } => gd.gradings = gradings.clone(),
                    Synthesis::Obstruction { .. } => bail!("no consistent grading exists: {synth:?}"),
                }
            }
            let verdict = silting_verdict(&d, &gd)?;
            let levels = levels_at_points(&d, &gd)?;
            emit(
                out,
                cfg.format,
                json!({
                    "dissection": check,
                    "synthesis": synth,
                    "gradings": gd.names.iter().cloned().zip(gd.gradings.iter().copied()).collect::<BTreeMap<_, _>>(),
                    "levels": levels,
                    "silting": verdict,
                }),
                || format!("dissection: {check:?}\nsilting:    {verdict:?}\n"),
            )?;
            Ok(0)
        }
        Command::Batch { manifest } => {
            let text = read(manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let mut entries = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if !line.is_empty() {
                    entries.push(line.to_string());
                }
            }
            let mut records: Vec<InvariantRecord> = Vec::new();
            let mut classes: Vec<usize> = Vec::new();
            let mut reps: Vec<usize> = Vec::new();
            for e in &entries {
                let r = record_of(&base.join(e), &opts).with_context(|| format!("entry {e}"))?;
                let class = match reps
                    .iter()
                    .position(|&k| compare_records(&records[k], &r).is_equivalent())
                {
                    Some(c) => c,
                    None => {
                        reps.push(records.len());
                        reps.len() - 1
                    }
                };
                records.push(r);
                classes.push(class);
            }
            let grouped: Vec<Vec<&str>> = (0..reps.len())
                .map(|c| {
                    entries
                        .iter()
                        .zip(&classes)
                        .filter(|(_, &k)| k == c)
                        .map(|(e, _)| e.as_str())
                        .collect()
                })
                .collect();
            emit(
                out,
                cfg.format,
                json!({
                    "entries": entries.iter().zip(&classes).map(|(e, c)| json!({ "path": e, "class": c })).collect::<Vec<_>>(),
                    "classes": grouped,
                }),
                || {
                    grouped
                        .iter()
                        .enumerate()
                        .map(|(i, g)| format!("class {i}: {}\n", g.join(" ")))
                        .collect()
                },
            )?;
            Ok(0)
        }
    }
}

/// Parses `argv` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cfg, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

pub fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("GENTLE_DEQ_LOG")).try_init();
}
