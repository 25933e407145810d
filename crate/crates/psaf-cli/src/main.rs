use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use psaf::argumentation::{build_psaf, Psaf};
use psaf::dialogue::attempt_dialogue;
use psaf::gen::{random_kb, GenParams};
use psaf::logic::{enumerate_mcs, mcs_query, render_set, Formula, KnowledgeBase, Literal, McsMode};
use psaf::render::{render, Format, RenderOptions};
use psaf::semantics::{
    accepted, enumerate_extensions, theorem1_report_for, verify_postulates, AcceptanceMode, Report, SemanticsKind,
};
use psaf::PsafError;

/// Inconsistency-tolerant query answering over rule-based knowledge bases,
/// explained by argumentation dialogues.
#[derive(Parser)]
#[command(name = "psaf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer a query and explain a positive answer with a dialogue.
    Query(QueryArgs),
    /// List the extensions of the knowledge base's framework.
    Extensions(ExtensionsArgs),
    /// List the maximal consistent subsets (repairs).
    Mcs(KbArg),
    /// List arguments, and optionally the minimal collective attacks.
    Arguments(ArgumentsArgs),
    /// Cross-check extensions against repairs and the rationality postulates.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct KbArg {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Entailed by some repair (credulous acceptance).
    Possible,
    /// Entailed by every repair (sceptical acceptance).
    Plausible,
    /// Entailed by the intersection of repairs (grounded acceptance).
    Surest,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuerySemantics {
    Admissible,
    Preferred,
    Stable,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Dot,
    Json,
    Text,
}

#[derive(Args)]
struct QueryArgs {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
    /// Ground literal, e.g. `rese(v)`.
    #[arg(long)]
    query: String,
    #[arg(long, value_enum, default_value = "possible")]
    mode: Mode,
    /// Semantics for possible and plausible answers; surest is always grounded.
    #[arg(long, value_enum, default_value = "preferred")]
    semantics: QuerySemantics,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write the explanation here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Show utterance ids in DOT output.
    #[arg(long)]
    show_ids: bool,
    /// Show node tags in DOT output.
    #[arg(long)]
    show_tags: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnySemantics {
    Admissible,
    Complete,
    Preferred,
    Stable,
    Grounded,
}

impl From<AnySemantics> for SemanticsKind {
    fn from(s: AnySemantics) -> Self {
        match s {
            AnySemantics::Admissible => SemanticsKind::Admissible,
            AnySemantics::Complete => SemanticsKind::Complete,
            AnySemantics::Preferred => SemanticsKind::Preferred,
            AnySemantics::Stable => SemanticsKind::Stable,
            AnySemantics::Grounded => SemanticsKind::Grounded,
        }
    }
}

#[derive(Args)]
struct ExtensionsArgs {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
    #[arg(long, value_enum, default_value = "preferred")]
    semantics: AnySemantics,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ArgumentsArgs {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
    /// Also list the minimal collective attacks.
    #[arg(long)]
    attacks: bool,
    /// Print the framework as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Knowledge base to check; without it, random knowledge bases are checked.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Number of random knowledge bases to check when no file is given.
    #[arg(long, default_value_t = 200)]
    random: u64,
    /// First seed of the random run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print every check, not only failures.
    #[arg(long)]
    verbose: bool,
}

/// A failure mapped to an exit code.
enum Failure {
    Error(String),
    Disagreement(String),
}

impl From<PsafError> for Failure {
    fn from(e: PsafError) -> Self {
        Failure::Error(e.to_string())
    }
}

fn load(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    KnowledgeBase::parse(&text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn framework(kb: &KnowledgeBase) -> Result<Psaf, Failure> {
    Ok(build_psaf(kb)?)
}

fn query(a: &QueryArgs) -> Result<bool, Failure> {
    let kb = load(&a.kb)?;
    let lit = Literal::parse(&a.query).map_err(|e| Failure::Error(format!("query: {e}")))?;
    if !lit.atom.is_ground() {
        return Err(Failure::Error(format!("query `{lit}` is not ground")));
    }
    let af = framework(&kb)?;
    // Sceptical admissible acceptance is trivial (the empty set is
    // admissible), so plausible answers under admissible use preferred.
    let sem = match a.semantics {
        QuerySemantics::Admissible => SemanticsKind::Admissible,
        QuerySemantics::Preferred => SemanticsKind::Preferred,
        QuerySemantics::Stable => SemanticsKind::Stable,
    };
    let (mode, mcs_mode) = match a.mode {
        Mode::Possible => (AcceptanceMode::Credulous(sem), McsMode::Some),
        Mode::Plausible if sem == SemanticsKind::Admissible => {
            (AcceptanceMode::Sceptical(SemanticsKind::Preferred), McsMode::All)
        }
        Mode::Plausible => (AcceptanceMode::Sceptical(sem), McsMode::All),
        Mode::Surest => (AcceptanceMode::Grounded, McsMode::Intersection),
    };
    let phi = Formula::Lit(lit.clone());
    let by_extensions = accepted(&af, &phi, mode).accepted;
    let by_repairs = mcs_query(&kb, &lit, mcs_mode);
    let generated = attempt_dialogue(&kb, &phi, mode)?;
    let by_dialogue = generated.classification.successful_for(mode);
    if by_extensions != by_repairs || by_extensions != by_dialogue {
        return Err(Failure::Disagreement(format!(
            "answers disagree for {phi} ({mode}): extensions={by_extensions} repairs={by_repairs} dialogue={by_dialogue}"
        )));
    }
    println!("{}", if by_extensions { "yes" } else { "no" });
    if by_extensions {
        let opts = RenderOptions {
            format: match a.format {
                OutputFormat::Dot => Format::Dot,
                OutputFormat::Json => Format::Json,
                OutputFormat::Text => Format::Text,
            },
            show_ids: a.show_ids,
            show_tags: a.show_tags,
        };
        let mut dialogue = generated.dialogue;
        dialogue.kb = a.kb.display().to_string();
        let body = match opts.format {
            Format::Json => format!(
                "{{\n  \"dialogue\": {},\n  \"tree\": {}\n}}\n",
                indent(&dialogue.to_json()),
                indent(&generated.tree.to_json())
            ),
            _ => render(&dialogue, &generated.tree, &opts, mode),
        };
        match &a.out {
            Some(p) => std::fs::write(p, body).map_err(|e| Failure::Error(format!("{}: {e}", p.display())))?,
            None => print!("{body}"),
        }
    }
    Ok(by_extensions)
}

fn indent(json: &str) -> String {
    json.trim_end().replace('\n', "\n  ")
}

fn extensions(a: &ExtensionsArgs) -> Result<(), Failure> {
    let kb = load(&a.kb)?;
    let af = framework(&kb)?;
    let exts = enumerate_extensions(&af, a.semantics.into());
    let named: Vec<Vec<String>> = exts
        .iter()
        .map(|e| e.iter().map(|&i| af.arguments[i].id.clone()).collect())
        .collect();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&named).expect("serialisable"));
    } else {
        println!("{} {} extension(s)", exts.len(), SemanticsKind::from(a.semantics));
        for (k, e) in exts.iter().enumerate() {
            let base: psaf::logic::FormulaSet = e
                .iter()
                .flat_map(|&i| af.arguments[i].support.iter().cloned())
                .collect();
            println!("E{}: {{{}}} base {}", k + 1, named[k].join(", "), render_set(&base));
        }
    }
    Ok(())
}

fn mcs(a: &KbArg) -> Result<(), Failure> {
    let kb = load(&a.kb)?;
    let family = enumerate_mcs(&kb);
    println!("{} maximal consistent subset(s)", family.len());
    for (k, m) in family.iter().enumerate() {
        println!("B{}: {}", k + 1, render_set(m));
    }
    Ok(())
}

fn arguments(a: &ArgumentsArgs) -> Result<(), Failure> {
    let kb = load(&a.kb)?;
    let af = framework(&kb)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&af.to_json()).expect("serialisable"));
        return Ok(());
    }
    println!("{} argument(s)", af.len());
    for arg in &af.arguments {
        let note = if arg.consistent { "" } else { " (inconsistent support)" };
        println!("{arg}{note}");
    }
    if a.attacks {
        println!("{} attack(s)", af.attacks.len());
        for at in &af.attacks {
            let from: Vec<&str> = at.attackers.iter().map(|&i| af.arguments[i].id.as_str()).collect();
            println!("{{{}}} -> {} ({:?})", from.join(", "), af.arguments[at.target].id, at.kind);
        }
    }
    Ok(())
}

fn full_report(kb: &KnowledgeBase) -> Result<Report, Failure> {
    let af = framework(kb)?;
    let mut r = theorem1_report_for(kb, &af);
    for s in [
        SemanticsKind::Complete,
        SemanticsKind::Preferred,
        SemanticsKind::Stable,
        SemanticsKind::Grounded,
    ] {
        r.extend(verify_postulates(&af, kb, s));
    }
    Ok(r)
}

fn print_report(label: &str, r: &Report, verbose: bool) {
    for c in &r.checks {
        let failed = r.failures().iter().any(|f| f.name == c.name && f.detail == c.detail);
        if verbose || failed {
            let status = if failed { "FAIL" } else { "pass" };
            println!("{label}{status} {} {}", c.name, c.detail);
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<bool, Failure> {
    if let Some(path) = &a.kb {
        let kb = load(path)?;
        let r = full_report(&kb)?;
        print_report("", &r, a.verbose);
        let failed = r.failures().len();
        println!("{} check(s), {failed} failure(s)", r.checks.len());
        return Ok(failed == 0);
    }
    let mut failed_kbs = 0;
    for seed in a.seed..a.seed + a.random {
        let kb = random_kb(seed, &GenParams::default());
        let r = full_report(&kb)?;
        if !r.passed() {
            failed_kbs += 1;
            println!("seed {seed}:");
            print_report("  ", &r, a.verbose);
        }
    }
    println!("{} random knowledge base(s), {failed_kbs} with failures", a.random);
    Ok(failed_kbs == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Query(a) => query(a),
        Command::Extensions(a) => extensions(a).map(|()| true),
        Command::Mcs(a) => mcs(a).map(|()| true),
        Command::Arguments(a) => arguments(a).map(|()| true),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
