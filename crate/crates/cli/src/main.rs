use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use strands_decat::arc_diagram::{ArcDiagram, RawArcDiagram};
use strands_decat::decat::verify_main_theorem;
use strands_decat::gluing::{verify_gluing, verify_self_gluing, GluingSpec};
use strands_decat::report::{Report, Status};
use strands_decat::strands_algebra::check_axioms;
use strands_decat::suite::{run_suite, Fault};
use strands_decat::surface::SuturedSurfaceType;
use strands_decat::{Error, Result};

#[derive(Parser)]
#[command(name = "strands-decat", version, about = "Strands algebras over F2 and their decategorification")]
struct Cli {
    /// Also write the JSON report to this path (`-` for stdout instead of text).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an arc diagram and report the surface it presents.
    Validate { diagram: PathBuf },
    /// Basis sizes and the d^2 = 0, Leibniz and associativity checks.
    Algebra {
        diagram: PathBuf,
        /// Only this weight.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2)]
        winding_cap: usize,
    },
    /// [E (x) -] on K0 against Phi_I.
    Decat {
        diagram: PathBuf,
        /// Interval component; every interval when omitted.
        #[arg(long)]
        interval: Option<usize>,
    },
    /// Glue two surfaces, or one surface to itself with --self.
    Glue {
        surface: PathBuf,
        other: Option<PathBuf>,
        /// Pairs `c0.b0.i0:c0.b0.i1,...`.
        #[arg(long, default_value = "")]
        pairs: String,
        #[arg(long = "self")]
        self_gluing: bool,
    },
    /// Every acceptance criterion over the built-in corpus.
    Suite {
        #[arg(long, hide = true, default_value = "none")]
        inject_fault: String,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_diagram(path: &Path) -> Result<ArcDiagram> {
    ArcDiagram::from_json(&read(path)?)
}

fn load_surface(path: &Path) -> Result<SuturedSurfaceType> {
    SuturedSurfaceType::from_json(&read(path)?)
}

fn validate(path: &Path) -> Result<(Status, Value)> {
    let raw = RawArcDiagram::from_json(&read(path)?)?;
    let violations: Vec<String> = raw.validate().iter().map(ToString::to_string).collect();
    if !violations.is_empty() {
        return Ok((Status::Fail, json!({ "violations": violations })));
    }
    let d = ArcDiagram::try_from(raw)?;
    let kinds: Vec<Value> = (0..d.components().len())
        .map(|c| json!({"component": c, "kind": if d.is_interval(c) { "interval" } else { "circle" }, "points": d.len_of(c)}))
        .collect();
    let surface = d.surface_type();
    Ok((
        Status::Pass,
        json!({
            "components": kinds,
            "pairs": d.pair_count(),
            "homology_rank": d.homology_basis().len(),
            "surface": surface,
            "surface_h1_rank": surface.h1_rank(),
        }),
    ))
}

fn algebra(path: &Path, k: Option<usize>, cap: usize) -> Result<(Status, Value)> {
    let d = load_diagram(path)?;
    let r = check_axioms(&d, k, cap, Some(2));
    Ok((Status::from_bool(r.passed()), serde_json::to_value(&r).expect("reports serialize")))
}

fn decat(path: &Path, interval: Option<usize>) -> Result<(Status, Value)> {
    let d = load_diagram(path)?;
    let intervals = match interval {
        Some(i) => vec![i],
        None => d.intervals(),
    };
    let mut ok = true;
    let mut out = BTreeMap::new();
    for i in intervals {
        let r = verify_main_theorem(&d, i)?;
        ok &= r.passed();
        out.insert(i.to_string(), serde_json::to_value(&r).expect("reports serialize"));
    }
    Ok((Status::from_bool(ok), serde_json::to_value(&out).expect("reports serialize")))
}

fn glue(surface: &Path, other: Option<&Path>, pairs: &str, self_gluing: bool) -> Result<(Status, Value)> {
    let s1 = load_surface(surface)?;
    let spec = GluingSpec::parse(pairs)?;
    let report = if self_gluing {
        if other.is_some() {
            return Err(Error::Domain("--self takes a single surface".into()));
        }
        let [(i1, i2)] = spec.pairs.as_slice() else {
            return Err(Error::Domain("--self takes exactly one pair".into()));
        };
        verify_self_gluing(&s1, *i1, *i2)?
    } else {
        let path = other.ok_or_else(|| Error::Domain("gluing needs a second surface, or --self".into()))?;
        verify_gluing(&s1, &load_surface(path)?, &spec)?
    };
    Ok((Status::from_bool(report.passed()), serde_json::to_value(&report).expect("reports serialize")))
}

fn inputs(cmd: &Command) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    match cmd {
        Command::Validate { diagram } => put("diagram", diagram.display().to_string()),
        Command::Algebra { diagram, k, winding_cap } => {
            put("diagram", diagram.display().to_string());
            if let Some(k) = k {
                put("k", k.to_string());
            }
            put("winding_cap", winding_cap.to_string());
        }
        Command::Decat { diagram, interval } => {
            put("diagram", diagram.display().to_string());
            if let Some(i) = interval {
                put("interval", i.to_string());
            }
        }
        Command::Glue { surface, other, pairs, self_gluing } => {
            put("surface", surface.display().to_string());
            if let Some(o) = other {
                put("other", o.display().to_string());
            }
            put("pairs", pairs.clone());
            put("self", self_gluing.to_string());
        }
        Command::Suite { inject_fault } => {
            if inject_fault != "none" {
                put("fault", inject_fault.clone());
            }
        }
    }
    m
}

fn run(cmd: &Command) -> Report {
    let (name, outcome) = match cmd {
        Command::Validate { diagram } => ("validate", validate(diagram)),
        Command::Algebra { diagram, k, winding_cap } => ("algebra", algebra(diagram, *k, *winding_cap)),
        Command::Decat { diagram, interval } => ("decat", decat(diagram, *interval)),
        Command::Glue { surface, other, pairs, self_gluing } => {
            ("glue", glue(surface, other.as_deref(), pairs, *self_gluing))
        }
        Command::Suite { inject_fault } => {
            return match inject_fault.parse::<Fault>() {
                Ok(fault) => run_suite(fault),
                Err(e) => Report::error("suite", inputs(cmd), e.to_string()),
            }
        }
    };
    match outcome {
        Ok((status, details)) => Report::new(name, inputs(cmd), status, details),
        Err(e) => Report::error(name, inputs(cmd), e.to_string()),
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Error => "error",
    }
}

fn text(report: &Report) -> String {
    let mut out = format!("{}: {}\n", report.command, status_word(report.status));
    if report.command == "suite" {
        if let Ok(criteria) = serde_json::from_value::<Vec<Value>>(report.details["criteria"].clone()) {
            for c in criteria {
                let id = c["id"].as_u64().unwrap_or_default();
                let name = c["name"].as_str().unwrap_or_default();
                let passed = c["passed"].as_bool().unwrap_or_default();
                out.push_str(&format!("  {id:>2} {name:<30} {}\n", if passed { "pass" } else { "FAIL" }));
                for ce in c["counterexamples"].as_array().into_iter().flatten().take(3) {
                    out.push_str(&format!("       {}\n", ce.as_str().unwrap_or_default()));
                }
            }
        }
    } else {
        out.push_str(&serde_json::to_string_pretty(&report.details).expect("reports serialize"));
        out.push('\n');
    }
    out
}

fn configure_threads() {
    if let Some(n) = std::env::var("STRANDS_DECAT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let report = run(&cli.command);
    let json = report.to_json();
    match cli.json.as_deref() {
        Some(p) if p == Path::new("-") => print!("{json}"),
        Some(p) => {
            print!("{}", text(&report));
            if let Err(e) = fs::write(p, &json) {
                eprintln!("cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", text(&report)),
    }
    ExitCode::from(report.exit_code() as u8)
}
