//! The `locseries` command line.
//!
//! Every command prints one JSON envelope on standard output. Exit codes:
//! 0 ok, 1 fixture mismatch, 2 unsupported, 3 coset cap exceeded, 4 invalid
//! input. With `--strict`, a series computed without a finite realization
//! because the cap was hit exits 3, an uncertified torsion quotient exits 5
//! and a singular signature evaluation exits 6.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::enumerator::{reidemeister_schreier, CosetTable, DEFAULT_MAX_COSETS};
use crate::error::{Error, Result};
use crate::groupring::{sigma_torsion_quotient, Certification, DEFAULT_SWEEP_CAP};
use crate::homology::{h1_twisted, trivial_action_h1};
use crate::presentations::{
    abelianization_map, parse_catalog_ref, parse_presentation, parse_words, FinitePresentation, TargetElement,
};
use crate::series::{local_abelian_quotient, modp_derived_series, series};
use crate::signatures::{connected_power, distinguish_family, rho, RhoCoefficient, SeifertMatrix};
use crate::suite::{load_fixtures, run_suite, DEFAULT_FIXTURES};
use crate::zlinalg::RSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_UNCERTIFIED: i32 = 5;
pub const EXIT_SINGULAR: i32 = 6;

/// Output schema version of the envelope.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "locseries", version, about = "Local derived series of finitely presented groups and knot rho-invariants")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GroupArg {
    /// A presentation file, inline `gens: ...; rels: ...`, or `catalog:name(params)`.
    #[arg(long)]
    group: String,
    /// Coset enumeration cap.
    #[arg(long, env = "LOCSERIES_MAX_COSETS", default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower terms of the R-local derived series.
    Series {
        #[command(flatten)]
        group: GroupArg,
        /// Q, Z, Zloc:p or Zp:p.
        #[arg(long)]
        coeff: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        strict: bool,
    },
    /// The mod-p derived series of a finite group.
    ModpSeries {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Abelianization and the map onto it.
    Abelianize {
        #[command(flatten)]
        group: GroupArg,
    },
    /// Reidemeister–Schreier presentation of a finite-index subgroup.
    Subgroup {
        #[command(flatten)]
        group: GroupArg,
        /// Comma-separated subgroup generators.
        #[arg(long, default_value = "")]
        gens: String,
    },
    /// Coset enumeration.
    Enum {
        #[command(flatten)]
        group: GroupArg,
        /// Comma-separated subgroup generators; the trivial subgroup by default.
        #[arg(long, default_value = "")]
        subgroup: String,
    },
    /// H_1 of the group with coefficients in Z[π/π^(1)].
    H1 {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        coeff: String,
    },
    /// H_1(π; Z[π/π^(1)]) modulo its Σ-torsion.
    Sigma {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        coeff: String,
        #[arg(long, default_value_t = DEFAULT_SWEEP_CAP)]
        sweep_cap: u64,
        #[arg(long)]
        strict: bool,
    },
    /// Rho-invariant of zero-surgery on a knot.
    Rho {
        /// Seifert matrix as JSON `{"matrix": ...}` or CSV.
        #[arg(long)]
        seifert: PathBuf,
        /// Z or Zd:d.
        #[arg(long, default_value = "Z")]
        coeff: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Take the k-fold connected sum first.
        #[arg(long, default_value_t = 1)]
        sum: usize,
        #[arg(long)]
        strict: bool,
    },
    /// Connected sums of a knot with pairwise distinct rho-invariants.
    Distinguish {
        #[arg(long)]
        seifert: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u64,
    },
    /// Run the regression fixtures.
    PaperSuite {
        /// Only fixtures whose name contains this string.
        #[arg(long)]
        only: Option<String>,
        /// A fixture file replacing the built-in set.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Print the JSON envelope instead of the table.
        #[arg(long)]
        json: bool,
        #[arg(long, env = "LOCSERIES_MAX_COSETS", default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    input_digest: String,
    tool_version: &'static str,
    result: Value,
    warnings: Vec<String>,
}

/// Hashes the command, its flags in a fixed order and the contents of any
/// input files.
struct DigestInput {
    hasher: Sha256,
}

impl DigestInput {
    fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        DigestInput { hasher }
    }

    fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.hasher.update(format!("\n{key}={value}").as_bytes());
        self
    }

    fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedCoefficients(_)
        | Error::UnsupportedAction(_)
        | Error::UnsupportedQuotient(_)
        | Error::BaseHasZeroRho(_) => EXIT_UNSUPPORTED,
        Error::CapExceeded(_) => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Resolves `--group`, returning the presentation and the text that
/// identifies it.
fn load_group(spec: &str) -> Result<(FinitePresentation, String)> {
    let s = spec.trim();
    if s.starts_with("catalog:") {
        return Ok((parse_catalog_ref(s)?, s.to_string()));
    }
    let path = Path::new(s);
    if path.is_file() {
        let text = read_file(path)?;
        return Ok((parse_presentation(&text)?, text));
    }
    if s.contains("gens") {
        return Ok((parse_presentation(s)?, s.to_string()));
    }
    Err(Error::InvalidInput(format!("no such presentation file or catalog reference: {s:?}")))
}

struct Success {
    digest: String,
    result: Value,
    warnings: Vec<String>,
    code: i32,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn abelian_quotient_of(phi: &crate::presentations::GroupHom) -> crate::zlinalg::AbelianInvariants {
    match phi.target() {
        crate::presentations::TargetGroup::Abelian(a) => a.clone(),
        crate::presentations::TargetGroup::Perm(_) => unreachable!("the local quotient is abelian"),
    }
}

fn cmd_series(g: &GroupArg, coeff: &str, depth: usize, strict: bool) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let r = RSpec::parse(coeff)?;
    let rep = series(&pres, r, depth, g.max_cosets)?;
    let mut d = DigestInput::new("series");
    d.field("group", &text).field("coeff", r).field("depth", depth).field("max_cosets", g.max_cosets);
    let code = match (strict, rep.cap_exceeded, rep.certified) {
        (true, true, _) => EXIT_CAP,
        (true, false, false) => EXIT_UNCERTIFIED,
        _ => EXIT_OK,
    };
    Ok(Success { digest: d.finish(), result: to_value(&rep), warnings: rep.warnings.clone(), code })
}

fn cmd_modp(g: &GroupArg, p: u64, depth: usize) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let rep = modp_derived_series(&pres, p, depth, g.max_cosets)?;
    let mut d = DigestInput::new("modp-series");
    d.field("group", &text).field("p", p).field("depth", depth).field("max_cosets", g.max_cosets);
    Ok(Success { digest: d.finish(), result: to_value(&rep), warnings: rep.warnings.clone(), code: EXIT_OK })
}

fn cmd_abelianize(g: &GroupArg) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let phi = abelianization_map(&pres);
    let images: Vec<Value> = pres
        .generators()
        .iter()
        .zip(phi.images())
        .map(|(name, img)| {
            let coords = match img {
                TargetElement::Abelian(v) => v.clone(),
                TargetElement::Perm(_) => Vec::new(),
            };
            json!({ "generator": name, "image": coords })
        })
        .collect();
    let result = json!({
        "presentation": pres.to_string(),
        "invariants": pres.abelianization(),
        "generator_images": images,
    });
    let mut d = DigestInput::new("abelianize");
    d.field("group", &text);
    Ok(Success { digest: d.finish(), result, warnings: Vec::new(), code: EXIT_OK })
}

fn cmd_subgroup(g: &GroupArg, gens: &str) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let words = parse_words(&pres, gens)?;
    let table = CosetTable::enumerate(&pres, &words, g.max_cosets)?;
    let sp = reidemeister_schreier(&pres, &table);
    let sub = sp.presentation();
    let generators: Vec<Value> = (0..sp.num_generators())
        .map(|j| {
            json!({
                "name": sub.generators()[j],
                "word": pres.word_display(&sp.generator_word(j)).to_string(),
            })
        })
        .collect();
    let result = json!({
        "index": table.index(),
        "generators": generators,
        "presentation": sub.to_string(),
        "abelianization": sub.abelianization(),
    });
    let mut d = DigestInput::new("subgroup");
    d.field("group", &text).field("gens", gens.trim()).field("max_cosets", g.max_cosets);
    Ok(Success { digest: d.finish(), result, warnings: Vec::new(), code: EXIT_OK })
}

/// Coset tables beyond this index are summarized without listing cosets.
const LISTING_LIMIT: usize = 1000;

fn cmd_enum(g: &GroupArg, subgroup: &str) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let words = parse_words(&pres, subgroup)?;
    let table = CosetTable::enumerate(&pres, &words, g.max_cosets)?;
    let mut warnings = Vec::new();
    let mut result = json!({ "index": table.index() });
    if words.is_empty() {
        result["order"] = json!(table.index());
    }
    if table.index() <= LISTING_LIMIT {
        let reps: Vec<String> =
            table.representatives().iter().map(|w| pres.word_display(w).to_string()).collect();
        result["representatives"] = json!(reps);
        result["permutations"] = json!(table.permutations().generators());
    } else {
        warnings.push(format!("index {} exceeds {LISTING_LIMIT}; cosets not listed", table.index()));
    }
    let mut d = DigestInput::new("enum");
    d.field("group", &text).field("subgroup", subgroup.trim()).field("max_cosets", g.max_cosets);
    Ok(Success { digest: d.finish(), result, warnings, code: EXIT_OK })
}

fn cmd_h1(g: &GroupArg, coeff: &str) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let r = RSpec::parse(coeff)?;
    let phi = local_abelian_quotient(&pres, r)?;
    let a = abelian_quotient_of(&phi);
    let mut warnings = Vec::new();
    let result = if a.is_finite() {
        let m = h1_twisted(&pres, &phi)?;
        json!({
            "coefficient": r,
            "quotient": a,
            "route": "covering chain complex",
            "rank": m.rank(),
            "invariants": m.invariants(),
            "trivial_action": m.has_trivial_action(),
        })
    } else {
        let t = trivial_action_h1(&pres, r)?;
        warnings.push(format!("trivial action checked at {} characters only", t.characters_checked));
        json!({
            "coefficient": r,
            "quotient": t.quotient,
            "route": "trivial action",
            "invariants": t.module,
            "trivial_action": true,
            "details": t,
        })
    };
    let mut d = DigestInput::new("h1");
    d.field("group", &text).field("coeff", r).field("max_cosets", g.max_cosets);
    Ok(Success { digest: d.finish(), result, warnings, code: EXIT_OK })
}

fn cmd_sigma(g: &GroupArg, coeff: &str, sweep_cap: u64, strict: bool) -> Result<Success> {
    let (pres, text) = load_group(&g.group)?;
    let r = RSpec::parse(coeff)?;
    let phi = local_abelian_quotient(&pres, r)?;
    let a = abelian_quotient_of(&phi);
    let mut warnings = Vec::new();
    let (module, quotient, certification) = if a.is_finite() {
        let m = h1_twisted(&pres, &phi)?;
        let q = sigma_torsion_quotient(&m, r, sweep_cap)?;
        (m.invariants(), q.invariants, q.certification)
    } else {
        let t = trivial_action_h1(&pres, r)?;
        let q = crate::zlinalg::s_torsion_quotient(&t.module, r)?;
        let why = format!("trivial action checked at {} characters only", t.characters_checked);
        (t.module, q, Certification::Uncertified(why))
    };
    if let Certification::Uncertified(why) = &certification {
        warnings.push(format!("Σ-torsion quotient uncertified: {why}"));
    }
    let code = if strict && certification != Certification::Certified { EXIT_UNCERTIFIED } else { EXIT_OK };
    let result = json!({
        "coefficient": r,
        "quotient": a,
        "module": module,
        "sigma_quotient": quotient,
        "certification": certification,
    });
    let mut d = DigestInput::new("sigma");
    d.field("group", &text).field("coeff", r).field("sweep_cap", sweep_cap).field("max_cosets", g.max_cosets);
    Ok(Success { digest: d.finish(), result, warnings, code })
}

fn cmd_rho(path: &Path, coeff: &str, tol: f64, sum: usize, strict: bool) -> Result<Success> {
    let text = read_file(path)?;
    let base = SeifertMatrix::parse(&text)?;
    let a = if sum == 1 { base } else { connected_power(&base, sum) };
    let c = RhoCoefficient::parse(coeff)?;
    let rep = rho(&a, c, tol)?;
    let singular = rep.evaluations.iter().any(|e| e.singular);
    let code = if strict && singular { EXIT_SINGULAR } else { EXIT_OK };
    let mut d = DigestInput::new("rho");
    d.field("seifert", &text).field("coeff", c).field("tol", tol).field("sum", sum);
    Ok(Success { digest: d.finish(), result: to_value(&rep), warnings: rep.warnings.clone(), code })
}

fn cmd_distinguish(path: &Path, n: usize, dd: u64) -> Result<Success> {
    let text = read_file(path)?;
    let base = SeifertMatrix::parse(&text)?;
    let family = distinguish_family(&base, n, dd)?;
    let mut warnings: Vec<String> = family.iter().flat_map(|m| m.rho.warnings.clone()).collect();
    warnings.dedup();
    let mut d = DigestInput::new("distinguish");
    d.field("seifert", &text).field("n", n).field("d", dd);
    Ok(Success { digest: d.finish(), result: to_value(&family), warnings, code: EXIT_OK })
}

fn envelope(command: &str, s: Success) -> Outcome {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        input_digest: s.digest,
        tool_version: env!("CARGO_PKG_VERSION"),
        result: s.result,
        warnings: s.warnings,
    };
    let mut stdout = serde_json::to_string_pretty(&env).expect("envelope serializes");
    stdout.push('\n');
    Outcome { code: s.code, stdout, stderr: String::new() }
}

fn failure(e: &Error) -> Outcome {
    Outcome { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") }
}

fn paper_suite(only: Option<&str>, fixtures: Option<&Path>, json_out: bool, cap: usize) -> Outcome {
    let loaded = match fixtures {
        Some(p) => read_file(p).map(|t| (t, p.display().to_string())),
        None => Ok((DEFAULT_FIXTURES.to_string(), "built-in".to_string())),
    };
    let (text, source) = match loaded {
        Ok(x) => x,
        Err(e) => return failure(&e),
    };
    let set = match load_fixtures(&text) {
        Ok(s) => s,
        Err(e) => return failure(&e),
    };
    let results = run_suite(&set, only, cap);
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let code = if failed.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
    let stderr = failed.first().map(|n| format!("first failing fixture: {n}\n")).unwrap_or_default();
    if json_out {
        let mut d = DigestInput::new("paper-suite");
        d.field("fixtures", &text).field("only", only.unwrap_or("")).field("max_cosets", cap);
        let s = Success { digest: d.finish(), result: to_value(&results), warnings: Vec::new(), code };
        let mut out = envelope("paper-suite", s);
        out.stderr = stderr;
        return out;
    }
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut stdout = format!("fixtures: {source}\n");
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        stdout.push_str(&format!("{status}  {:width$}", r.name));
        if !r.passed {
            stdout.push_str(&format!("  {}", r.detail));
        }
        stdout.push('\n');
    }
    stdout.push_str(&format!("{} passed, {} failed\n", results.len() - failed.len(), failed.len()));
    Outcome { code, stdout, stderr }
}

/// Parses arguments (the first being the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_INVALID, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let (name, res) = match &cli.command {
        Command::Series { group, coeff, depth, strict } => ("series", cmd_series(group, coeff, *depth, *strict)),
        Command::ModpSeries { group, p, depth } => ("modp-series", cmd_modp(group, *p, *depth)),
        Command::Abelianize { group } => ("abelianize", cmd_abelianize(group)),
        Command::Subgroup { group, gens } => ("subgroup", cmd_subgroup(group, gens)),
        Command::Enum { group, subgroup } => ("enum", cmd_enum(group, subgroup)),
        Command::H1 { group, coeff } => ("h1", cmd_h1(group, coeff)),
        Command::Sigma { group, coeff, sweep_cap, strict } => ("sigma", cmd_sigma(group, coeff, *sweep_cap, *strict)),
        Command::Rho { seifert, coeff, tol, sum, strict } => ("rho", cmd_rho(seifert, coeff, *tol, *sum, *strict)),
        Command::Distinguish { seifert, n, d } => ("distinguish", cmd_distinguish(seifert, *n, *d)),
        Command::PaperSuite { only, fixtures, json, max_cosets } => {
            return paper_suite(only.as_deref(), fixtures.as_deref(), *json, *max_cosets)
        }
    };
    match res {
        Ok(s) => envelope(name, s),
        Err(e) => failure(&e),
    }
}
