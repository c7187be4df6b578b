//! `sections`: build gadgets, verify their properties, and run the
//! product-to-section reductions from the command line.
//!
//! Exit status: 0 verified or member, 1 refuted or absent within an
//! exhausted bound, 2 inconclusive, 3 input or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use sections_core::format::encode_element;
use sections_core::format::files::{
    encode_reduction, encode_witness, parse_instance, parse_query, parse_reduction, to_text,
};
use sections_core::gadgets::verify::{
    verify_h5_vectors, verify_main_identity, verify_polygon, verify_unique_product_permutations,
    verify_unique_product_words, verify_unique_sum,
};
use sections_core::gadgets::{
    make_h5_vectors, make_main_gadget_elements, make_polygon_gadget, make_superincreasing, make_unique_product_gadget,
};
use sections_core::reductions::{
    bounded_submonoid_membership, build_reduction, section_equivalence_check, witness_translate, ReductionKind, Role,
    SectionReduction,
};
use sections_core::words::check_prop21;
use sections_core::{EnumerationBudget, GadgetCertificate, Verdict};

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sections",
    version,
    about = "Heisenberg gadgets and product-to-section reductions"
)]
struct Cli {
    /// Worker threads for the parallel searches (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print or write a gadget.
    Gadget(GadgetArgs),
    /// Exhaustively check a gadget property and emit a certificate.
    Verify(VerifyArgs),
    /// Build a reduction file from an instance file.
    Build(BuildArgs),
    /// Bounded membership of an element in the section of a reduction.
    Member(MemberArgs),
    /// Compare a reduction's section with the product it encodes.
    CheckEquivalence(EquivalenceArgs),
    /// Re-emit a reduction file.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetKind {
    Superincreasing,
    UniqueProduct,
    H5Vectors,
    Polygon,
}

#[derive(Args)]
struct GadgetArgs {
    kind: GadgetKind,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Prop21,
    UniqueSum,
    UniqueProduct,
    H5Vectors,
    Polygon,
    MainIdentity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Permutations,
    AllWords,
}

#[derive(Args)]
struct VerifyArgs {
    kind: VerifyKind,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Check mode for unique-product.
    #[arg(long, value_enum, default_value_t = Mode::Permutations)]
    mode: Mode,
    /// Longest word enumerated.
    #[arg(long, default_value_t = 9)]
    max_len: usize,
    /// Cap on enumerated words.
    #[arg(long)]
    max_candidates: Option<u64>,
    /// Largest power checked by polygon and main-identity.
    #[arg(long, default_value_t = 5)]
    l: u64,
    /// Largest `n` in `t^n y x^n` for prop21 (default: all that fit in --max-len).
    #[arg(long)]
    max_n: Option<usize>,
    /// Write the certificate here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pair,
    Conjugate,
    ProductH5,
    ConjugateH5,
}

impl From<Kind> for ReductionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Pair => ReductionKind::Pair,
            Kind::Conjugate => ReductionKind::Conjugate,
            Kind::ProductH5 => ReductionKind::ProductH5,
            Kind::ConjugateH5 => ReductionKind::ConjugateH5,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    kind: Kind,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MemberArgs {
    #[arg(long)]
    reduction: PathBuf,
    #[arg(long)]
    element: PathBuf,
    #[arg(long, default_value_t = 9)]
    max_len: usize,
    /// Cap on distinct states visited.
    #[arg(long)]
    max_candidates: Option<u64>,
    /// Write the witness file here when the element is a member.
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivalenceArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Reduction to check (default: conjugate-h5 if the instance has
    /// conjugators, product-h5 otherwise).
    #[arg(long)]
    kind: Option<Kind>,
    #[arg(long, default_value_t = 3)]
    ball: usize,
    #[arg(long, default_value_t = 12)]
    word_bound: usize,
    /// Cap on distinct section states explored.
    #[arg(long)]
    max_states: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Native,
    PlainTextSummary,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    reduction: PathBuf,
    #[arg(long, value_enum, default_value_t = ExportFormat::Native)]
    format: ExportFormat,
}

struct Outcome {
    code: u8,
    summary: String,
    /// Printed to stdout; JSON records end up pretty-printed.
    output: String,
}

impl Outcome {
    fn record(code: u8, summary: String, record: Value) -> Self {
        Self {
            code,
            summary,
            output: to_text(&record),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn load_reduction(path: &Path) -> Result<(SectionReduction, String)> {
    let text = read(path)?;
    let red = parse_reduction(&text).with_context(|| format!("{}", path.display()))?;
    Ok((red, text))
}

fn gadget(args: &GadgetArgs) -> Result<Outcome> {
    let (name, value) = match args.kind {
        GadgetKind::Superincreasing => ("superincreasing", make_superincreasing(args.n)?.to_json()),
        GadgetKind::UniqueProduct => ("unique-product", make_unique_product_gadget(args.n)?.to_json()),
        GadgetKind::H5Vectors => ("h5-vectors", make_h5_vectors(args.n)?.to_json()),
        GadgetKind::Polygon => ("polygon", make_polygon_gadget(args.n)?.to_json()),
    };
    let summary = format!("{name} gadget, n = {}", args.n);
    if let Some(out) = &args.out {
        write(out, &to_text(&value))?;
    }
    Ok(Outcome::record(
        EXIT_OK,
        summary,
        json!({ "command": "gadget", "kind": name, "n": args.n, "gadget": value }),
    ))
}

fn verdict_code(cert: &GadgetCertificate) -> u8 {
    match cert.verdict {
        Verdict::Verified => EXIT_OK,
        Verdict::Counterexample { .. } => EXIT_REFUTED,
        Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    }
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let mut budget = EnumerationBudget::pruned(args.max_len);
    if let Some(c) = args.max_candidates {
        budget = budget.with_max_candidates(c);
    }
    let n = args.n;
    let cert = match args.kind {
        VerifyKind::Prop21 => {
            let max_n = args.max_n.unwrap_or(args.max_len.saturating_sub(1) / 2);
            check_prop21(max_n, args.max_len)?
        }
        VerifyKind::UniqueSum => verify_unique_sum(&make_superincreasing(n)?),
        VerifyKind::UniqueProduct => {
            let g = make_unique_product_gadget(n)?;
            match args.mode {
                Mode::Permutations => verify_unique_product_permutations(&g),
                Mode::AllWords => verify_unique_product_words(&g, &budget)?,
            }
        }
        VerifyKind::H5Vectors => verify_h5_vectors(&make_h5_vectors(n)?),
        VerifyKind::Polygon => verify_polygon(&make_polygon_gadget(n)?, args.l),
        VerifyKind::MainIdentity => {
            let m = make_main_gadget_elements(&make_h5_vectors(n)?);
            verify_main_identity(&m, args.l, &budget)?
        }
    };
    let status = match &cert.verdict {
        Verdict::Verified => "verified".to_string(),
        Verdict::Counterexample { reason, .. } => format!("refuted: {reason}"),
        Verdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
    };
    let summary = format!("{} [{}]: {status} ({} cases)", cert.gadget, cert.mode, cert.examined);
    let value = cert.to_json();
    if let Some(out) = &args.out {
        write(out, &to_text(&value))?;
    }
    Ok(Outcome::record(
        verdict_code(&cert),
        summary,
        json!({ "command": "verify", "certificate": value }),
    ))
}

fn build(args: &BuildArgs) -> Result<Outcome> {
    let instance = parse_instance(&read(&args.instance)?).with_context(|| format!("{}", args.instance.display()))?;
    let red = build_reduction(args.kind.into(), &instance)?;
    let text = to_text(&encode_reduction(&red));
    write(&args.out, &text)?;
    let summary = format!(
        "{} reduction with {} generators written to {}",
        red.kind(),
        red.generators().len(),
        args.out.display()
    );
    Ok(Outcome::record(
        EXIT_OK,
        summary,
        json!({
            "command": "build",
            "kind": red.kind().name(),
            "generators": red.generators().len(),
            "out": args.out.display().to_string(),
            "sha256": sha256_hex(&text),
        }),
    ))
}

fn member(args: &MemberArgs) -> Result<Outcome> {
    let (red, text) = load_reduction(&args.reduction)?;
    let query = parse_query(&red, &read(&args.element)?).with_context(|| format!("{}", args.element.display()))?;
    let mut budget = EnumerationBudget::pruned(args.max_len);
    if let Some(c) = args.max_candidates {
        budget = budget.with_max_candidates(c);
    }
    let verdict = bounded_submonoid_membership(&red, &query, &budget)?;
    let mut record = json!({
        "command": "member",
        "reduction": { "path": args.reduction.display().to_string(), "sha256": sha256_hex(&text) },
        "query": encode_element(&query),
        "verdict": verdict.to_json(),
    });
    let (code, summary) = match verdict.witness() {
        Some(word) => {
            let summary = format!("member, witness of length {}: {word}", word.len());
            if red.target() == query.component(1).expect("queries are pairs") {
                let fac = witness_translate(&red, word)?;
                record["factorization"] = fac.to_json();
                if let Some(out) = &args.witness_out {
                    let w = encode_witness(
                        &args.reduction.display().to_string(),
                        &sha256_hex(&text),
                        &query,
                        word,
                        &fac,
                    );
                    write(out, &to_text(&w))?;
                }
            } else if args.witness_out.is_some() {
                bail!("the query's H component is not the reduction's target, so there is no factorization to write");
            }
            (EXIT_OK, summary)
        }
        None if verdict.is_truncated() => (
            EXIT_INCONCLUSIVE,
            format!("inconclusive: state cap reached before length {}", args.max_len),
        ),
        None => (
            EXIT_REFUTED,
            format!("not a member within length {} (search exhausted)", args.max_len),
        ),
    };
    Ok(Outcome::record(code, summary, record))
}

fn check_equivalence(args: &EquivalenceArgs) -> Result<Outcome> {
    let instance = parse_instance(&read(&args.instance)?).with_context(|| format!("{}", args.instance.display()))?;
    let kind = match args.kind {
        Some(k) => k.into(),
        None if instance.conjugators().is_some() => ReductionKind::ConjugateH5,
        None => ReductionKind::ProductH5,
    };
    let red = build_reduction(kind, &instance)?;
    let report = section_equivalence_check(&red, args.ball, args.word_bound, args.max_states)?;
    let code = match report.status() {
        "passed" => EXIT_OK,
        "failed" => EXIT_REFUTED,
        _ => EXIT_INCONCLUSIVE,
    };
    let summary = format!(
        "{kind}: {} ({} product elements, {} section elements, {} completeness failures, {} soundness violations)",
        report.status(),
        report.product_ball,
        report.section_checked,
        report.completeness_failures.len(),
        report.soundness_violations.len()
    );
    Ok(Outcome::record(
        code,
        summary,
        json!({ "command": "check-equivalence", "kind": kind.name(), "report": report.to_json() }),
    ))
}

fn plain_summary(red: &SectionReduction) -> String {
    let mut s = String::new();
    s.push_str(&format!("kind: {}\n", red.kind()));
    s.push_str(&format!("ambient: {}\n", red.ambient()));
    s.push_str(&format!("target: {}\n", red.target()));
    s.push_str(&format!("blocks: {}\n", red.blocks()));
    s.push_str(&format!("separators: {}\n", red.separators()));
    s.push_str(&format!("generators: {}\n", red.generators().len()));
    for (i, (g, role)) in red.generators().iter().zip(red.roles()).enumerate() {
        let role = match role {
            Role::Factor(k) => format!("factor {}", k + 1),
            Role::Free => "free".to_string(),
            Role::Separator(j) => format!("separator {}", j + 1),
        };
        s.push_str(&format!("  t{i} [{role}] {g}\n"));
    }
    s
}

fn export(args: &ExportArgs) -> Result<Outcome> {
    let (red, _) = load_reduction(&args.reduction)?;
    let output = match args.format {
        ExportFormat::Native => to_text(&encode_reduction(&red)),
        ExportFormat::PlainTextSummary => plain_summary(&red),
    };
    Ok(Outcome {
        code: EXIT_OK,
        summary: format!("{} reduction with {} generators", red.kind(), red.generators().len()),
        output,
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    match &cli.command {
        Command::Gadget(a) => gadget(a),
        Command::Verify(a) => verify(a),
        Command::Build(a) => build(a),
        Command::Member(a) => member(a),
        Command::CheckEquivalence(a) => check_equivalence(a),
        Command::Export(a) => export(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if ok { EXIT_OK } else { EXIT_INPUT });
        }
    };
    match run(&cli) {
        Ok(out) => {
            eprintln!("{}", out.summary);
            print!("{}", out.output);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
