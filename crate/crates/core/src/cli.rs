//! Command-line interface. [`run`] executes a parsed command and returns
//! the text to print and the process exit code, so commands can be driven
//! from tests without spawning a process.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::cancellation::{find_cck_star_violation, find_cck_violation, SearchLimits, SearchOutcome};
use crate::catalog;
use crate::complex::{has_shift_obstruction, is_shifted, SimplicialComplex};
use crate::error::{Error, Result};
use crate::example26::{verify_construction, Construction, VerificationReport};
use crate::feasibility::{
    is_almost_representable, is_representable, is_threshold, verify_order_certificate, verify_threshold_certificate,
    Certificate,
};
use crate::io::{read_json, to_json, ComplexFile, ConstructionFile, OrderFile, VectorsFile};
use crate::order::{
    find_untie_set, hyperplane_vectors, initial_segment, order_from_weights, qp_axiom_report, untie, QPOrder, UntieError,
};
use crate::rational::{integer, Rational};
use crate::report::{digest, RunReport};
use crate::subset::Subset;
use crate::ternary::TernaryVector;
use crate::transform::{is_trading_transform, TradingTransform};
use crate::winder::{is_strongly_acyclic, probe_extension, winder_prec, Acyclicity};

/// Exit code for a completed command that found a failure.
pub const EXIT_FAILED: i32 = 1;
/// Exit code for unusable input or I/O errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qpcone", version, about = "Qualitative probability orders, discrete cones and their initial-segment complexes")]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Node budget for cancellation searches.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "QPCONE_JOBS")]
    pub jobs: Option<usize>,
    /// Write the JSON output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a complex is threshold.
    Threshold(ComplexArg),
    /// Decide whether a complex is shifted.
    Shifted(ComplexArg),
    /// Search for a cancellation-condition violation of length k.
    Cancel(CancelArgs),
    /// Check the order axioms and (almost) representability.
    OrderCheck(OrderArg),
    /// Break ties of a weighted order, keeping the given tie vectors.
    Untie(UntieArgs),
    /// Build or verify the 26-atom construction.
    #[command(subcommand)]
    Example26(Example26Command),
    /// Strong acyclicity of the Winder relation of a complex.
    Winder(WinderArgs),
    /// Re-run every worked example and property suite.
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ComplexArg {
    /// JSON complex: {"n": .., "generators": [[..], ..]}
    #[arg(long)]
    pub complex: PathBuf,
}

#[derive(Debug, Args)]
pub struct OrderArg {
    /// JSON order: {"n": .., "weights": [..]} or {"n": .., "classes": [..]}
    #[arg(long)]
    pub order: PathBuf,
}

#[derive(Debug, Args)]
pub struct CancelArgs {
    #[arg(long, conflicts_with = "order", required_unless_present = "order")]
    pub complex: Option<PathBuf>,
    #[arg(long)]
    pub order: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct UntieArgs {
    /// Order file giving weights.
    #[arg(long)]
    pub order: PathBuf,
    /// JSON {"vectors": [[..], ..]}: tie vectors that must be kept.
    #[arg(long)]
    pub keep: PathBuf,
    /// Complete the kept set by backtracking search instead of taking the
    /// remaining tie vectors as listed.
    #[arg(long)]
    pub search: bool,
}

#[derive(Debug, Subcommand)]
pub enum Example26Command {
    /// Build the construction, verify it and write the artifact.
    Build {
        /// 18-bit column selector in hex.
        #[arg(long, default_value = "0", value_parser = parse_hex)]
        selector: u32,
    },
    /// Verify a stored artifact (or a fresh default build).
    Verify {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct WinderArgs {
    #[arg(long)]
    pub complex: PathBuf,
    /// Include a shortest cycle when one exists.
    #[arg(long)]
    pub cycle_witness: bool,
    /// Also try to extend the relation to an order with the complex as an
    /// initial segment.
    #[arg(long)]
    pub probe: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Verify this stored 26-atom artifact instead of building one.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Random samples per property.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

fn parse_hex(s: &str) -> std::result::Result<u32, String> {
    let digits = s.trim_start_matches("0x").trim_start_matches("0X");
    u32::from_str_radix(digits, 16).map_err(|e| format!("{s:?} is not a hex selector: {e}"))
}

/// What to print and the exit code.
pub struct Output {
    pub text: String,
    pub code: i32,
}

/// Executes `cli`, writing to `--out` when given.
pub fn run(cli: &Cli) -> Output {
    if let Some(jobs) = cli.jobs {
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let start = Instant::now();
    let result = dispatch(cli);
    let (text, code) = match result {
        Ok(Emit::Report(mut report)) => {
            if cli.timing {
                report.wall_time_ms = Some(start.elapsed().as_millis());
            }
            let code = if report.ok { 0 } else { EXIT_FAILED };
            (to_json(&report), code)
        }
        Ok(Emit::Artifact(text, ok)) => (text, if ok { 0 } else { EXIT_FAILED }),
        Err(e) => return Output { text: format!("error: {e}\n"), code: EXIT_ERROR },
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Output { text: String::new(), code },
            Err(e) => Output { text: format!("error: {}: {e}\n", path.display()), code: EXIT_ERROR },
        },
        None => Output { text, code },
    }
}

enum Emit {
    Report(RunReport),
    /// Pre-rendered JSON and whether it records success.
    Artifact(String, bool),
}

fn limits(cli: &Cli) -> SearchLimits {
    let mut l = SearchLimits { deterministic_seed: cli.seed, ..SearchLimits::default() };
    if let Some(b) = cli.budget {
        l.node_budget = b;
    }
    l
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_complex(path: &Path) -> Result<(SimplicialComplex, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let file: ComplexFile = read_json(path)?;
    Ok((file.to_complex()?, bytes))
}

fn load_order(path: &Path) -> Result<(QPOrder, Option<Vec<Rational>>, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let file: OrderFile = read_json(path)?;
    Ok((file.to_order()?, file.weights()?, bytes))
}

fn dispatch(cli: &Cli) -> Result<Emit> {
    match &cli.command {
        Command::Threshold(a) => cmd_threshold(cli, &a.complex).map(Emit::Report),
        Command::Shifted(a) => cmd_shifted(&a.complex).map(Emit::Report),
        Command::Cancel(a) => cmd_cancel(cli, a).map(Emit::Report),
        Command::OrderCheck(a) => cmd_order_check(&a.order).map(Emit::Report),
        Command::Untie(a) => cmd_untie(a).map(Emit::Report),
        Command::Example26(Example26Command::Build { selector }) => cmd_example26_build(cli, *selector),
        Command::Example26(Example26Command::Verify { input }) => cmd_example26_verify(input.as_deref()).map(Emit::Report),
        Command::Winder(a) => cmd_winder(a).map(Emit::Report),
        Command::ReproducePaper(a) => cmd_reproduce_paper(cli, a).map(Emit::Report),
    }
}

#[derive(Serialize)]
struct ThresholdDetails {
    maximal_faces: Vec<Subset>,
    /// The weights (when threshold) or the cancellation witness (when not)
    /// passed an independent re-check.
    reverified: bool,
}

fn is_violation_of(complex: &SimplicialComplex, t: &TradingTransform) -> bool {
    is_trading_transform(t.left(), t.right()).unwrap_or(false)
        && t.left().iter().all(|a| complex.contains(a))
        && t.right().iter().all(|b| !complex.contains(b))
}

pub fn cmd_threshold(cli: &Cli, path: &Path) -> Result<RunReport> {
    let (complex, bytes) = load_complex(path)?;
    let cert = is_threshold(&complex);
    let d = digest(&[("complex", &bytes)]);
    let (mut report, reverified) = if cert.is_positive() {
        (RunReport::new("threshold", d, "threshold"), verify_threshold_certificate(&complex, &cert))
    } else {
        let mut r = RunReport::new("threshold", d, "not threshold");
        let mut reverified = true;
        for k in 2..=4 {
            let outcome = find_cck_star_violation(&complex, k, &limits(cli))?;
            if let Some(w) = outcome.witness() {
                reverified = is_violation_of(&complex, w);
                r = r.with_witness(w);
                break;
            }
        }
        (r, reverified)
    };
    let details = ThresholdDetails { maximal_faces: complex.maximal_faces(), reverified };
    report = report.with_certificate(&cert).with_details(details);
    if !reverified {
        report = report.failed();
    }
    Ok(report)
}

pub fn cmd_shifted(path: &Path) -> Result<RunReport> {
    let (complex, bytes) = load_complex(path)?;
    let d = digest(&[("complex", &bytes)]);
    match is_shifted(&complex) {
        Some(order) => Ok(RunReport::new("shifted", d, "shifted").with_certificate(order)),
        None => {
            let usual: Vec<usize> = (1..=complex.n()).collect();
            let obstruction = has_shift_obstruction(&complex, &usual)?;
            Ok(RunReport::new("shifted", d, "not shifted").with_witness(obstruction))
        }
    }
}

fn outcome_verdict(outcome: &SearchOutcome) -> &'static str {
    match outcome {
        SearchOutcome::Violation { .. } => "violation",
        SearchOutcome::None => "none",
        SearchOutcome::Inconclusive { .. } => "inconclusive",
    }
}

/// Certificate for a negative answer: the search covered every candidate.
#[derive(Serialize)]
struct ExhaustiveSearch {
    k: usize,
    exhaustive: bool,
}

pub fn cmd_cancel(cli: &Cli, a: &CancelArgs) -> Result<RunReport> {
    let lim = limits(cli);
    let k_bytes = a.k.to_le_bytes();
    let budget_bytes = lim.node_budget.to_le_bytes();
    let (outcome, d) = match (&a.complex, &a.order) {
        (Some(path), None) => {
            let (complex, bytes) = load_complex(path)?;
            let d = digest(&[("complex", &bytes), ("k", &k_bytes), ("budget", &budget_bytes)]);
            (find_cck_star_violation(&complex, a.k, &lim)?, d)
        }
        (None, Some(path)) => {
            let (order, _, bytes) = load_order(path)?;
            let d = digest(&[("order", &bytes), ("k", &k_bytes), ("budget", &budget_bytes)]);
            (find_cck_violation(&order, a.k, &lim)?, d)
        }
        _ => return Err(Error::Precondition("give exactly one of --complex and --order".into())),
    };
    let report = RunReport::new("cancel", d, outcome_verdict(&outcome));
    Ok(match outcome {
        SearchOutcome::Violation { witness } => report.with_witness(witness),
        SearchOutcome::Inconclusive { reason } => report.with_details(reason),
        SearchOutcome::None => report.with_certificate(ExhaustiveSearch { k: a.k, exhaustive: true }),
    })
}

#[derive(Serialize)]
struct OrderCheckDetails {
    representable: Certificate,
    representable_reverified: bool,
    almost_representable: Certificate,
    almost_representable_reverified: bool,
}

pub fn cmd_order_check(path: &Path) -> Result<RunReport> {
    let (order, _, bytes) = load_order(path)?;
    let d = digest(&[("order", &bytes)]);
    let axioms = qp_axiom_report(&order)?;
    if !axioms.holds() {
        return Ok(RunReport::new("order-check", d, "invalid order").with_witness(axioms));
    }
    let rep = is_representable(&order)?;
    let almost = is_almost_representable(&order)?;
    let rep_ok = !rep.is_positive() || verify_order_certificate(&order, &rep);
    let almost_ok = !almost.is_positive() || verify_order_certificate(&order, &almost);
    let verdict = match (rep.is_positive(), almost.is_positive()) {
        (true, _) => "representable",
        (false, true) => "almost representable, not representable",
        (false, false) => "not almost representable",
    };
    let mut report = RunReport::new("order-check", d, verdict).with_certificate(&axioms).with_details(OrderCheckDetails {
        representable: rep,
        representable_reverified: rep_ok,
        almost_representable: almost,
        almost_representable_reverified: almost_ok,
    });
    if !(rep_ok && almost_ok) {
        report = report.failed();
    }
    Ok(report)
}

/// `required` first, then one member of every remaining tie pair, taking
/// the member listed first in sorted order.
fn complete_greedily(order: &QPOrder, required: &[TernaryVector]) -> Vec<TernaryVector> {
    let mut keep = required.to_vec();
    for s in hyperplane_vectors(order) {
        if !keep.contains(&s) && !keep.contains(&s.neg()) {
            keep.push(s);
        }
    }
    keep
}

pub fn cmd_untie(a: &UntieArgs) -> Result<RunReport> {
    let (order, weights, order_bytes) = load_order(&a.order)?;
    let weights = weights.ok_or_else(|| Error::Precondition("untie needs an order file with weights".into()))?;
    let keep_bytes = read_bytes(&a.keep)?;
    let required = read_json::<VectorsFile>(&a.keep)?.to_vectors()?;
    let d = digest(&[("order", &order_bytes), ("keep", &keep_bytes), ("search", &[u8::from(a.search)])]);
    let keep = if a.search {
        match find_untie_set(&order, &weights, &required) {
            Ok(Some(keep)) => keep,
            Ok(None) => {
                return Ok(RunReport::new("untie", d, "no valid completion of the kept vectors")
                    .with_certificate(json!({ "exhaustive": true })))
            }
            Err(Error::Untie(e)) => return Ok(RunReport::new("untie", d, "rejected").with_witness(*e)),
            Err(e) => return Err(e),
        }
    } else {
        complete_greedily(&order, &required)
    };
    match untie(&order, &weights, &keep) {
        Ok(untied) => Ok(RunReport::new("untie", d, if untied.is_linear() { "untied (linear)" } else { "untied" })
            .with_certificate(VectorsFile::from_vectors(&keep))
            .with_details(OrderFile::from_order(&untied))),
        Err(Error::Untie(e)) => Ok(RunReport::new("untie", d, "rejected").with_witness(*e)),
        Err(e) => Err(e),
    }
}

fn example26_report(report: &VerificationReport, d: String, command: &str) -> RunReport {
    let r = RunReport::new(command, d, report.conclusion.clone()).with_details(report);
    let r = match report.failures().next() {
        Some(f) => r.with_witness(f),
        None => r.with_certificate(report.check("h")),
    };
    if report.passed() { r } else { r.failed() }
}

fn cmd_example26_build(cli: &Cli, selector: u32) -> Result<Emit> {
    let c = Construction::build(selector)?;
    let report = verify_construction(&c)?;
    let passed = report.passed();
    let artifact = to_json(&ConstructionFile::new(&c, Some(report.clone())));
    if cli.out.is_some() {
        return Ok(Emit::Artifact(artifact, passed));
    }
    let d = digest(&[("selector", &selector.to_le_bytes())]);
    Ok(Emit::Report(example26_report(&report, d, "example26 build")))
}

pub fn cmd_example26_verify(input: Option<&Path>) -> Result<RunReport> {
    let (c, d) = match input {
        Some(path) => {
            let bytes = read_bytes(path)?;
            let file: ConstructionFile = read_json(path)?;
            (file.to_construction()?, digest(&[("artifact", &bytes)]))
        }
        None => (Construction::build(0)?, digest(&[("selector", &0u32.to_le_bytes())])),
    };
    let report = verify_construction(&c)?;
    Ok(example26_report(&report, d, "example26 verify"))
}

pub fn cmd_winder(a: &WinderArgs) -> Result<RunReport> {
    let (complex, bytes) = load_complex(&a.complex)?;
    let d = digest(&[("complex", &bytes), ("cycle", &[u8::from(a.cycle_witness)]), ("probe", &[u8::from(a.probe)])]);
    let acyclicity = is_strongly_acyclic(&complex)?;
    let mut report = match &acyclicity {
        Acyclicity::Acyclic => {
            RunReport::new("winder", d, "strongly acyclic").with_certificate(json!({ "nontrivial_components": 0 }))
        }
        Acyclicity::Cycle { cycle } => {
            let r = RunReport::new("winder", d, "not strongly acyclic");
            if a.cycle_witness { r.with_witness(cycle) } else { r.with_witness(json!({ "cycle_length": cycle.len() })) }
        }
    };
    if a.probe {
        report = report.with_details(probe_extension(&complex)?);
    }
    Ok(report)
}

#[derive(Serialize)]
struct Item {
    name: &'static str,
    passed: bool,
    detail: String,
}

type Check = std::result::Result<String, String>;

fn item(name: &'static str, check: Result<Check>) -> Item {
    match check {
        Ok(Ok(detail)) => Item { name, passed: true, detail },
        Ok(Err(detail)) => Item { name, passed: false, detail },
        Err(e) => Item { name, passed: false, detail: format!("error: {e}") },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

pub fn cmd_reproduce_paper(cli: &Cli, a: &ReproduceArgs) -> Result<RunReport> {
    let fixture = match &a.fixture {
        Some(path) => Some(read_bytes(path)?),
        None => None,
    };
    let lim = limits(cli);
    let items = vec![
        item("tied five-atom order", check_tied_order()),
        item("swapped five-atom order", check_swapped_order(&lim)),
        item("magic square untie", check_magic_untie()),
        item("shifted non-threshold complex", check_shift_example(&lim)),
        item("26-atom construction", check_construction(a.fixture.as_deref())),
        item("Winder properties", check_winder_suite(cli.seed, a.samples)),
    ];
    let mut parts: Vec<(&str, &[u8])> = Vec::new();
    let seed = cli.seed.to_le_bytes();
    let samples = (a.samples as u64).to_le_bytes();
    parts.push(("seed", &seed));
    parts.push(("samples", &samples));
    if let Some(bytes) = &fixture {
        parts.push(("fixture", bytes));
    }
    let failed = items.iter().filter(|i| !i.passed).count();
    let verdict = if failed == 0 { "all reproduced".to_string() } else { format!("{failed} mismatches") };
    let report = RunReport::new("reproduce-paper", digest(&parts), verdict).with_details(&items);
    Ok(if failed == 0 { report } else { report.failed() })
}

fn set(n: usize, atoms: &[u64]) -> Subset {
    Subset::from_atoms(n, atoms.iter().copied()).expect("atoms in range")
}

fn check_tied_order() -> Result<Check> {
    let w = catalog::tied_five_atom_weights();
    let order = order_from_weights(&w)?;
    let run = || -> std::result::Result<String, String> {
        for (a, b) in catalog::tied_five_atom_pairs() {
            ensure(order.equiv(&a, &b), || format!("{a} and {b} are not tied"))?;
        }
        let extra_tie = order.equiv(&set(5, &[3]), &set(5, &[4, 5]));
        let rep = is_representable(&order).map_err(|e| e.to_string())?;
        ensure(rep.is_positive() && verify_order_certificate(&order, &rep), || "not representable".into())?;
        let keep = find_untie_set(&order, &w, &catalog::tied_five_atom_vectors())
            .map_err(|e| e.to_string())?
            .ok_or("no untie set containing u_1..u_4")?;
        let untied = untie(&order, &w, &keep).map_err(|e| e.to_string())?;
        ensure(untied.is_linear(), || "untied order is not linear".into())?;
        let almost = is_almost_representable(&untied).map_err(|e| e.to_string())?;
        ensure(almost.is_positive(), || "untied order is not almost representable".into())?;
        Ok(format!(
            "four listed ties present; exact arithmetic also ties 3 ~ 45: {extra_tie}; {} tie vectors; untied order is linear and almost representable",
            hyperplane_vectors(&order).len()
        ))
    };
    Ok(run())
}

fn check_swapped_order(lim: &SearchLimits) -> Result<Check> {
    let order = catalog::swapped_five_atom_order()?;
    let run = || -> std::result::Result<String, String> {
        ensure(qp_axiom_report(&order).map_err(|e| e.to_string())?.holds(), || "fails the order axioms".into())?;
        ensure(!is_representable(&order).map_err(|e| e.to_string())?.is_positive(), || "representable".into())?;
        let almost = is_almost_representable(&order).map_err(|e| e.to_string())?;
        ensure(almost.is_positive() && verify_order_certificate(&order, &almost), || "not almost representable".into())?;
        let seg = initial_segment(&order, &set(5, &[1, 2])).map_err(|e| e.to_string())?;
        let faces: Vec<Subset> = seg.faces().collect();
        let expected: Vec<Subset> = [&[][..], &[1], &[2], &[3], &[4]].iter().map(|a| set(5, a)).collect();
        let mut sorted = faces.clone();
        sorted.sort();
        let mut exp_sorted = expected;
        exp_sorted.sort();
        ensure(sorted == exp_sorted, || format!("initial segment below 12 is {faces:?}"))?;
        for k in 2..=4 {
            let outcome = find_cck_violation(&order, k, lim).map_err(|e| e.to_string())?;
            if let Some(w) = outcome.witness() {
                return Ok(format!("valid, not representable, almost representable; CC_{k} fails with {w:?}"));
            }
        }
        Err("no CC_k violation for k ≤ 4".into())
    };
    Ok(run())
}

fn check_magic_untie() -> Result<Check> {
    let w = catalog::magic_square_weights();
    let order = order_from_weights(&w)?;
    let x = catalog::magic_square_vectors();
    let keep = complete_greedily(&order, &x);
    Ok(match untie(&order, &w, &keep) {
        Err(Error::Untie(e)) => match *e {
            UntieError::NotClosed { x: a, y: b, sum } if a == x[0] && b == x[1] && sum == x[2].neg() => {
                Ok("rejected: x_1 ⊕ x_2 = −x_3".into())
            }
            other => Err(format!("rejected with an unexpected witness: {other}")),
        },
        Err(e) => Err(format!("error: {e}")),
        Ok(_) => Err("untie accepted a set containing x_1, x_2, x_3".into()),
    })
}

fn check_shift_example(lim: &SearchLimits) -> Result<Check> {
    let complex = catalog::shift_example_complex()?;
    let run = || -> std::result::Result<String, String> {
        ensure(is_shifted(&complex).is_some(), || "not shifted".into())?;
        for g in catalog::shift_example_generators() {
            ensure(complex.contains(&g), || format!("{g} missing"))?;
        }
        for s in [set(7, &[3, 4, 7]), set(7, &[1, 2, 5, 6])] {
            ensure(!complex.contains(&s), || format!("{s} present"))?;
        }
        let t = catalog::shift_example_transform();
        ensure(is_violation_of(&complex, &t), || "the listed transform is not a violation".into())?;
        let outcome = find_cck_star_violation(&complex, 2, lim).map_err(|e| e.to_string())?;
        let w = outcome.witness().ok_or("no CC_2* violation found")?;
        ensure(is_violation_of(&complex, w), || "search witness does not verify".into())?;
        ensure(!is_threshold(&complex).is_positive(), || "reported threshold".into())?;
        Ok(format!("shifted, not threshold; CC_2* witness {w:?}"))
    };
    Ok(run())
}

fn check_construction(fixture: Option<&Path>) -> Result<Check> {
    let c = match fixture {
        Some(path) => read_json::<ConstructionFile>(path)?.to_construction()?,
        None => Construction::build(0)?,
    };
    let report = verify_construction(&c)?;
    let failures: Vec<String> =
        report.failures().map(|f| format!("check ({}) failed: {}", f.id, f.detail)).collect();
    Ok(if failures.is_empty() { Ok(report.conclusion) } else { Err(failures.join("; ")) })
}

/// Random positive integer weights; ties are likely, which exercises the
/// tie-handling paths.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| integer(rng.gen_range(1..=12))).collect()
}

pub fn random_subset(rng: &mut impl Rng, n: usize) -> Subset {
    Subset::new(n, rng.gen_range(0..(1u64 << n))).expect("bits below n")
}

fn check_winder_suite(seed: u64, samples: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let n = rng.gen_range(2..=5);
        let order = order_from_weights(&random_weights(&mut rng, n))?;
        let t = random_subset(&mut rng, n);
        let seg = initial_segment(&order, &t)?;
        if let Acyclicity::Cycle { cycle } = is_strongly_acyclic(&seg)? {
            return Ok(Err(format!("initial segment below {t} has a Winder cycle {cycle:?}")));
        }
        for _ in 0..8 {
            let a = random_subset(&mut rng, n);
            let b = random_subset(&mut rng, n);
            if seg.contains(&a) && !seg.contains(&b) && !winder_prec(&seg, &a, &b)? {
                return Ok(Err(format!("{a} is a face and {b} is not, yet {a} ≺_W {b} fails")));
            }
            let d = random_subset(&mut rng, n).difference(&a.union(&b));
            if winder_prec(&seg, &a, &b)? != winder_prec(&seg, &a.union(&d), &b.union(&d))? {
                return Ok(Err(format!("≺_W between {a} and {b} changes after adding {d}")));
            }
        }
    }
    let magic = catalog::magic_square_complex()?;
    let cycle = match is_strongly_acyclic(&magic)? {
        Acyclicity::Cycle { cycle } => cycle,
        Acyclicity::Acyclic => return Ok(Err("the magic-square complex is strongly acyclic".into())),
    };
    Ok(Ok(format!(
        "{samples} random initial segments strongly acyclic, faces ≺_W non-faces, ≺_W invariant under disjoint unions; magic-square complex has the cycle {cycle:?}"
    )))
}
