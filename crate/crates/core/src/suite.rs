//! The ten acceptance criteria, run over the built-in corpus.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arc_diagram::ArcDiagram;
use crate::corpus;
use crate::decat::{k0_dim, k0_e_matrix, phi_matrix, verify_main_theorem, wedge_dim};
use crate::e_bimodule::{factorization_check, filtration_check, tensor_iso};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::gluing::{
    glue_modules, hopf_module, reduce_matches_presentation, verify_gluing, verify_self_gluing, wedge_module,
    EModule, GluingSpec, StandardBasis,
};
use crate::nilcoxeter::{acyclicity_witness, nc_differential, nc_multiply, NCElement, Perm};
use crate::report::{Report, Status};
use crate::strands_algebra::check_axioms;
use crate::surface::{IntervalLabel, SurfaceComponent, SutureCircle, SuturedSurfaceType};

/// A deliberate corruption, used to check that the suite can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fault {
    #[default]
    None,
    /// Flips one entry of every `Φ_I` used by the main-theorem criterion.
    Phi,
    /// Flips one entry of the pants `I₁`-action.
    Pants,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "phi" => Ok(Self::Phi),
            "pants" => Ok(Self::Pants),
            _ => Err(Error::Parse(format!("unknown fault {s:?} (expected none, phi or pants)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub budget_secs: Option<u64>,
    pub counterexamples: Vec<String>,
    pub details: Value,
}

pub const NAMES: [&str; 10] = [
    "algebra axioms",
    "nilCoxeter algebras",
    "decategorification dimensions",
    "main theorem",
    "E structure",
    "square zero",
    "pants table",
    "gluing",
    "tensor product corollary",
    "determinism",
];

const BUDGETS: [Option<u64>; 10] = [Some(60), Some(10), None, Some(30), None, None, None, Some(60), None, None];

fn result(id: usize, counterexamples: Vec<String>, details: Value) -> CriterionResult {
    CriterionResult {
        id,
        name: NAMES[id - 1],
        passed: counterexamples.is_empty(),
        budget_secs: BUDGETS[id - 1],
        counterexamples,
        details,
    }
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn fail(context: &str, e: impl std::fmt::Display) -> String {
    format!("{context}: {e}")
}

/// `d² = 0`, Leibniz and associativity on D1 to D5 with winding cap 2.
pub fn algebra_axioms() -> CriterionResult {
    let mut details = BTreeMap::new();
    let mut bad = Vec::new();
    for (name, d) in corpus::diagrams() {
        let assoc = match name {
            "D1" | "D4" => Some(usize::MAX),
            "D2" | "D3" => Some(2),
            _ => None,
        };
        let r = check_axioms(&d, None, 2, assoc);
        bad.extend(r.failures.iter().map(|f| format!("{name}: {f}")));
        details.insert(name, r);
    }
    result(1, bad, value(&details))
}

/// Dimensions, relations and differentials of `NCₙ` for `n ≤ 5`.
pub fn nilcoxeter() -> CriterionResult {
    let mut bad = Vec::new();
    let mut rows = Vec::new();
    let run = |bad: &mut Vec<String>| -> Result<Vec<Value>> {
        let mut rows = Vec::new();
        for n in 1..=5usize {
            let all = Perm::all(n);
            let factorial: usize = (1..=n).product();
            if all.len() != factorial {
                bad.push(format!("NC_{n} has dimension {}, expected {factorial}", all.len()));
            }
            for i in 1..n {
                let t = Perm::simple(n, i)?;
                if !nc_multiply(&t, &t)?.is_zero() {
                    bad.push(format!("tau_{i}^2 != 0 in NC_{n}"));
                }
                if i + 1 < n {
                    let u = Perm::simple(n, i + 1)?;
                    let lhs = NCElement::from(t.clone()).mul(&u.clone().into())?.mul(&t.clone().into())?;
                    let rhs = NCElement::from(u.clone()).mul(&t.clone().into())?.mul(&u.into())?;
                    if lhs != rhs {
                        bad.push(format!("braid relation fails at {i} in NC_{n}"));
                    }
                }
            }
            let nonzero_d2 = all.iter().filter(|w| !nc_differential(w).differential().is_zero()).count();
            if nonzero_d2 > 0 {
                bad.push(format!("d^2 != 0 on {nonzero_d2} elements of NC_{n}"));
            }
            let witness = if n >= 2 {
                let h = acyclicity_witness(n)?;
                if nc_differential(&h) != NCElement::one(n) {
                    bad.push(format!("d({h}) != 1 in NC_{n}"));
                }
                Some(h.to_string())
            } else {
                None
            };
            rows.push(json!({"n": n, "dim": all.len(), "witness": witness}));
        }
        let tau = Perm::simple(2, 1)?;
        if nc_differential(&tau) != NCElement::one(2) {
            bad.push("d(tau) != 1 in NC_2".into());
        }
        Ok(rows)
    };
    match run(&mut bad) {
        Ok(r) => rows = r,
        Err(e) => bad.push(fail("NC", e)),
    }
    result(2, bad, json!({ "algebras": rows }))
}

/// `dim K₀ = 2^|matching| = dim ∧*H₁`, the last read off the traced surface.
pub fn dimensions() -> CriterionResult {
    let mut bad = Vec::new();
    let mut rows = BTreeMap::new();
    for (name, d) in corpus::diagrams() {
        let k0 = k0_dim(&d);
        let wedge = wedge_dim(&d);
        let traced = 1usize << d.surface_type().h1_rank();
        let pairs = 1usize << d.pair_count();
        if !(k0 == pairs && wedge == pairs && traced == pairs) {
            bad.push(format!("{name}: K0 {k0}, wedge {wedge}, traced surface {traced}, 2^pairs {pairs}"));
        }
        rows.insert(name, json!({"k0": k0, "wedge": wedge, "traced_surface": traced}));
    }
    result(3, bad, value(&rows))
}

fn flip_first(m: &mut GF2Matrix) {
    if m.rows() > 0 && m.cols() > 1 {
        m.flip(0, m.cols() - 1);
    }
}

fn each_interval(f: impl Fn(&str, &ArcDiagram, usize) -> (Value, Vec<String>) + Sync) -> (Value, Vec<String>) {
    let cases: Vec<(&'static str, ArcDiagram, usize)> = corpus::diagrams()
        .into_iter()
        .flat_map(|(n, d)| d.intervals().into_iter().map(move |i| (n, d.clone(), i)))
        .collect();
    let out: Vec<(String, Value, Vec<String>)> =
        cases.par_iter().map(|(n, d, i)| { let (v, b) = f(n, d, *i); (format!("{n}/{i}"), v, b) }).collect();
    let mut details = BTreeMap::new();
    let mut bad = Vec::new();
    for (k, v, b) in out {
        details.insert(k, v);
        bad.extend(b);
    }
    (value(&details), bad)
}

/// `[E ⊗ −] = Φ_I` for every diagram and interval, block by block.
pub fn main_theorem(fault: Fault) -> CriterionResult {
    let (details, bad) = each_interval(|name, d, i| match verify_main_theorem(d, i) {
        Ok(mut r) => {
            if fault == Fault::Phi {
                flip_first(&mut r.phi_matrix);
                r.equal = r.k0_e_matrix == r.phi_matrix;
            }
            let mut bad = Vec::new();
            if !r.passed() {
                bad.push(format!(
                    "{name}, interval {i}: [E] = {:?}, Phi = {:?}",
                    r.k0_e_matrix.row_strings(),
                    r.phi_matrix.row_strings()
                ));
            }
            (value(&r), bad)
        }
        Err(e) => (Value::Null, vec![fail(&format!("{name}, interval {i}"), e)]),
    });
    result(4, bad, details)
}

/// Factorization, filtration, and `E ⊗ E ≅ E^⊗2`.
pub fn e_structure() -> CriterionResult {
    let (mut details, mut bad) = each_interval(|name, d, i| {
        let mut bad = Vec::new();
        let f = factorization_check(d, i, 2);
        let g = filtration_check(d, i);
        match (&f, &g) {
            (Ok(f), Ok(g)) => {
                if !f.passed() {
                    bad.push(format!("{name}, interval {i}: factorization {:?}", f.round_trip_failures));
                }
                if !g.passed() {
                    bad.push(format!("{name}, interval {i}: filtration {:?}", g.violations));
                }
                (json!({"factorization": f, "filtration": g}), bad)
            }
            (Err(e), _) | (_, Err(e)) => (Value::Null, vec![fail(&format!("{name}, interval {i}"), e)]),
        }
    });
    let mut tensor = BTreeMap::new();
    for name in ["D1", "D2", "D3", "D4"] {
        let d = corpus::diagram(name).expect("corpus");
        match tensor_iso(&d, 0, 2) {
            Ok(r) => {
                if !r.passed() {
                    bad.push(format!("{name}: E (x) E is not E^2: {r:?}"));
                }
                tensor.insert(name, value(&r));
            }
            Err(e) => bad.push(fail(name, e)),
        }
    }
    details["tensor_iso"] = value(&tensor);
    result(5, bad, details)
}

/// `[E]² = 0`, `Φ_I² = 0`, and actions of distinct intervals commute.
pub fn square_zero() -> CriterionResult {
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for (name, d) in corpus::diagrams() {
        let ints = d.intervals();
        let mats: Vec<(usize, GF2Matrix, GF2Matrix)> = ints
            .iter()
            .filter_map(|&i| match (k0_e_matrix(&d, i), phi_matrix(&d, i)) {
                (Ok(e), Ok(p)) => Some((i, e, p)),
                (Err(x), _) | (_, Err(x)) => {
                    bad.push(fail(&format!("{name}, interval {i}"), x));
                    None
                }
            })
            .collect();
        for (i, e, p) in &mats {
            checked += 1;
            if !e.mul(e).expect("square").is_zero() {
                bad.push(format!("{name}: [E]^2 != 0 on interval {i}"));
            }
            if !p.mul(p).expect("square").is_zero() {
                bad.push(format!("{name}: Phi^2 != 0 on interval {i}"));
            }
            for (j, f, q) in &mats {
                if i < j {
                    let commute = |a: &GF2Matrix, b: &GF2Matrix| a.mul(b).expect("square") == b.mul(a).expect("square");
                    if !commute(e, f) || !commute(p, q) {
                        bad.push(format!("{name}: intervals {i} and {j} do not commute"));
                    }
                }
            }
        }
    }
    result(6, bad, json!({ "intervals_checked": checked }))
}

/// The pants action table, written out term by term.
pub const PANTS_TABLE: [(&str, [(&str, &str); 4]); 3] = [
    ("I1", [("1", "0"), ("e1", "1"), ("e2", "0"), ("e1^e2", "e2")]),
    ("I2", [("1", "0"), ("e1", "0"), ("e2", "1"), ("e1^e2", "e1")]),
    ("I3", [("1", "0"), ("e1", "1"), ("e2", "1"), ("e1^e2", "e1+e2")]),
];

fn wedge_index(term: &str) -> usize {
    match term {
        "1" => 0,
        "e1" => 1,
        "e2" => 2,
        "e1^e2" => 3,
        _ => unreachable!("pants table term"),
    }
}

/// The table as matrices in the basis `1, e1, e2, e1^e2`.
pub fn pants_table_matrices() -> BTreeMap<&'static str, GF2Matrix> {
    PANTS_TABLE
        .iter()
        .map(|(i, rows)| {
            let mut m = GF2Matrix::zeros(4, 4);
            for (from, to) in rows {
                if *to != "0" {
                    for t in to.split('+') {
                        m.flip(wedge_index(t), wedge_index(from));
                    }
                }
            }
            (*i, m)
        })
        .collect()
}

/// The pants module with its default basis against [`PANTS_TABLE`].
pub fn pants_table(fault: Fault) -> CriterionResult {
    let p = corpus::pants();
    let module = StandardBasis::default_for(&p).and_then(|b| wedge_module(&p, &b));
    let mut module = match module {
        Ok(m) => m,
        Err(e) => return result(7, vec![fail("pants", e)], Value::Null),
    };
    if fault == Fault::Pants {
        if let Some(a) = module.actions.get_mut("c0.b0.i0") {
            a.flip(0, 0);
        }
    }
    let expected = pants_table_matrices();
    let labels = [("I1", "c0.b0.i0"), ("I2", "c0.b0.i1"), ("I3", "c0.b0.i2")];
    let mut bad = Vec::new();
    let mut details = BTreeMap::new();
    for (name, label) in labels {
        let got = &module.actions[label];
        if got != &expected[name] {
            bad.push(format!("{name}: got {:?}, table {:?}", got.row_strings(), expected[name].row_strings()));
        }
        details.insert(name, json!({"label": label, "matrix": got}));
    }
    result(7, bad, json!({"basis": module.basis_tags, "actions": details}))
}

fn circle_choices() -> Vec<SutureCircle> {
    use SutureCircle::*;
    vec![Alternating(1), Alternating(2), Alternating(3), FullyMinus, FullyPlus]
}

/// Every surface with at most two components, genus at most one, at most two
/// boundary circles per component, `H₁` rank at most 4 and at least two
/// `S₊` intervals. Their wedge modules have dimension at most 16.
pub fn small_surfaces() -> Vec<SuturedSurfaceType> {
    let circles = circle_choices();
    let mut comps = Vec::new();
    for genus in 0..=1 {
        for a in 0..circles.len() {
            let c = SurfaceComponent { genus, boundary: vec![circles[a]] };
            comps.push(c);
            for b in a..circles.len() {
                comps.push(SurfaceComponent { genus, boundary: vec![circles[a], circles[b]] });
            }
        }
    }
    comps.retain(|c| c.boundary.iter().any(SutureCircle::meets_minus));
    let mut out = Vec::new();
    for i in 0..comps.len() {
        out.push(SuturedSurfaceType { components: vec![comps[i].clone()] });
        for j in i..comps.len() {
            out.push(SuturedSurfaceType { components: vec![comps[i].clone(), comps[j].clone()] });
        }
    }
    out.retain(|s| s.h1_rank() <= 4 && s.intervals().len() >= 2);
    out
}

fn default_module(s: &SuturedSurfaceType) -> Result<EModule> {
    wedge_module(s, &StandardBasis::default_for(s)?)
}

/// One gluing per proof case, two-surface gluings, and the presentation oracle.
pub fn gluing() -> CriterionResult {
    let mut bad = Vec::new();
    let mut cases = BTreeMap::new();
    let reports: Vec<(&'static str, Result<Value>)> = corpus::gluing_cases()
        .par_iter()
        .map(|c| {
            let r = verify_self_gluing(&c.surface, c.i1, c.i2).map(|r| {
                let ok = r.passed();
                (value(&r), ok)
            });
            (c.name, r.and_then(|(v, ok)| if ok { Ok(v) } else { Err(Error::Domain(v.to_string())) }))
        })
        .collect();
    for (name, r) in reports {
        match r {
            Ok(v) => {
                cases.insert(name.to_string(), v);
            }
            Err(e) => bad.push(fail(name, e)),
        }
    }
    let two_surface = [
        ("annulus + annulus", corpus::annulus(), corpus::annulus(), "c0.b0.i0:c0.b1.i0"),
        ("annulus + annulus into a torus", corpus::annulus(), corpus::annulus(), "c0.b0.i0:c0.b0.i0,c0.b1.i0:c0.b1.i0"),
        ("pants + two disks", corpus::pants(), corpus::disk().disjoint_union(&corpus::disk()), "c0.b0.i0:c0.b0.i0,c0.b0.i1:c1.b0.i0"),
        ("pants + pants", corpus::pants(), corpus::pants(), "c0.b0.i2:c0.b0.i0"),
    ];
    for (name, s1, s2, pairs) in two_surface {
        match GluingSpec::parse(pairs).and_then(|spec| verify_gluing(&s1, &s2, &spec)) {
            Ok(r) => {
                if !r.passed() {
                    bad.push(format!("{name}: {}", value(&r)));
                }
                cases.insert(name.to_string(), value(&r));
            }
            Err(e) => bad.push(fail(name, e)),
        }
    }
    let surfaces = small_surfaces();
    let checks: Vec<(usize, Vec<String>)> = surfaces
        .par_iter()
        .map(|s| {
            let mut bad = Vec::new();
            let mut count = 0;
            let m = match default_module(s) {
                Ok(m) => m,
                Err(e) => return (0, vec![fail(&s.to_json(), e)]),
            };
            let labels = m.labels();
            for a in 0..labels.len() {
                for b in a + 1..labels.len() {
                    count += 1;
                    match reduce_matches_presentation(&m, &labels[a], &labels[b]) {
                        Ok(true) => {}
                        Ok(false) => bad.push(format!("{} at {}, {}", s.to_json(), labels[a], labels[b])),
                        Err(e) => bad.push(fail(&s.to_json(), e)),
                    }
                }
            }
            (count, bad)
        })
        .collect();
    let mut oracle_checks = 0;
    for (n, b) in checks {
        oracle_checks += n;
        bad.extend(b);
    }
    result(
        8,
        bad,
        json!({"gluings": cases, "presentation_oracle": {"modules": surfaces.len(), "reductions": oracle_checks}}),
    )
}

/// Gluing `F'` and `F''` into the two pants inputs reproduces `Δ(E) = E⊗1 + 1⊗E`.
pub fn tensor_corollary() -> CriterionResult {
    let inputs = [
        ("annulus, pants", corpus::annulus(), corpus::pants()),
        ("disk, annulus", corpus::disk(), corpus::annulus()),
        ("pants, pants", corpus::pants(), corpus::pants()),
    ];
    let mut bad = Vec::new();
    let mut details = BTreeMap::new();
    for (name, f1, f2) in inputs {
        let run = || -> Result<(bool, usize)> {
            let union = f1.disjoint_union(&f2);
            let n = default_module(&union)?;
            let l1 = IntervalLabel::new(0, 0, 0);
            let l2 = IntervalLabel::new(f1.components.len(), 0, 0);
            let spec = GluingSpec { pairs: vec![(IntervalLabel::new(0, 0, 0), l1), (IntervalLabel::new(0, 0, 1), l2)] };
            let glued = glue_modules(&default_module(&corpus::pants())?, &n, &spec)?;
            let rename: BTreeMap<String, String> = glued
                .labels()
                .into_iter()
                .map(|k| {
                    let short = k.strip_prefix("2:").map_or_else(|| "out".to_string(), str::to_string);
                    (k, short)
                })
                .collect();
            let glued = glued.relabel(&rename);
            let hopf = hopf_module(&n, &l1.to_string(), &l2.to_string(), "out")?;
            Ok((glued.dim == hopf.dim && glued.actions == hopf.actions, glued.dim))
        };
        match run() {
            Ok((ok, dim)) => {
                if !ok {
                    bad.push(format!("{name}: glued module differs from the Hopf tensor product"));
                }
                details.insert(name, json!({"dim": dim, "equal": ok}));
            }
            Err(e) => bad.push(fail(name, e)),
        }
    }
    result(9, bad, value(&details))
}

/// Runs a single criterion. Criterion 10 runs 1 to 9 twice.
pub fn run_criterion(id: usize, fault: Fault) -> Result<CriterionResult> {
    Ok(match id {
        1 => algebra_axioms(),
        2 => nilcoxeter(),
        3 => dimensions(),
        4 => main_theorem(fault),
        5 => e_structure(),
        6 => square_zero(),
        7 => pants_table(fault),
        8 => gluing(),
        9 => tensor_corollary(),
        10 => determinism(fault),
        _ => return Err(Error::Domain(format!("criteria are numbered 1 to 10, not {id}"))),
    })
}

fn first_nine(fault: Fault) -> Vec<CriterionResult> {
    (1..=9).into_par_iter().map(|id| run_criterion(id, fault).expect("valid id")).collect()
}

fn render(results: &[CriterionResult], fault: Fault) -> String {
    suite_report(results.to_vec(), fault).to_json()
}

/// Two runs of criteria 1 to 9 render to identical bytes.
pub fn determinism(fault: Fault) -> CriterionResult {
    let a = render(&first_nine(fault), fault);
    let b = render(&first_nine(fault), fault);
    let bad = if a == b { Vec::new() } else { vec!["two runs produced different reports".into()] };
    result(10, bad, json!({"bytes": a.len()}))
}

fn suite_report(criteria: Vec<CriterionResult>, fault: Fault) -> Report {
    let status = Status::from_bool(criteria.iter().all(|c| c.passed));
    let mut inputs = BTreeMap::new();
    inputs.insert("corpus".to_string(), "D1-D5, pants, disk, annulus, gluing cases".to_string());
    if fault != Fault::None {
        inputs.insert("fault".to_string(), value(&fault).as_str().unwrap_or_default().to_string());
    }
    Report::new("suite", inputs, status, json!({ "criteria": criteria }))
}

/// All ten criteria. The report holds no timings, so it is reproducible byte for byte.
pub fn run_suite(fault: Fault) -> Report {
    let mut criteria = first_nine(fault);
    let again = first_nine(fault);
    let same = render(&criteria, fault) == render(&again, fault);
    criteria.push(result(
        10,
        if same { Vec::new() } else { vec!["two runs produced different reports".into()] },
        json!({"compared_runs": 2}),
    ));
    suite_report(criteria, fault)
}
