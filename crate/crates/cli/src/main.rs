//! `cclkit`: parse, check, graph, resolve and dry-run schedules of a thorn corpus.
//!
//! Exit status: 0 success, 1 parse or semantic error, 2 I/O error,
//! 3 unresolved ambiguity.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cclkit_core::corpus::{load_corpus, CorpusError};
use cclkit_core::graph::{emit_dot, extract_edges};
use cclkit_core::model::{build_world, check_implementation_consistency, Severity, World};
use cclkit_core::parse::{decode_utf8, parse_parameter_file, parse_thornlist, write_thornlist, ParseError};
use cclkit_core::resolve::{activate, resolve, AmbiguityReport, ChoiceMap, ResolveError, Thornlist};
use cclkit_core::schedule::{
    build_schedule_tree, parse_oracle_file, trace_to_json, trace_to_text, traverse, OnesOracle, TraceEvent,
};
use cclkit_core::Identifier;

#[derive(Parser)]
#[command(name = "cclkit", version, about = "Inspect Cactus Configuration Language thorn corpora")]
struct Cli {
    /// Corpus root holding <arrangement>/<thorn>/ directories.
    #[arg(long, global = true, env = "CCLKIT_ROOT", default_value = ".")]
    root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse every thorn; with --json, dump the thorn database.
    Parse(OutputArgs),
    /// Run the semantic checks and list diagnostics.
    Check(OutputArgs),
    /// Emit the dependency graph as DOT (or JSON).
    Graph {
        #[command(flatten)]
        select: SelectArgs,
        /// Fill thorns that no other thorn depends on.
        #[arg(long)]
        shade_leaves: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute a closed thornlist from seed thorns.
    Resolve {
        #[command(flatten)]
        select: SelectArgs,
        /// Read additional seeds from a thornlist file.
        #[arg(long)]
        thornlist: Option<PathBuf>,
        /// Prompt on standard input for each ambiguous requirement.
        #[arg(long)]
        interactive: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Activate a parameter file and print the dry-run schedule trace.
    Schedule {
        #[arg(long)]
        parfile: PathBuf,
        #[arg(long, default_value_t = 1)]
        iterations: u32,
        /// ANALYSIS routine whose output is requested.
        #[arg(long = "request")]
        requests: Vec<String>,
        /// `ones`, or a file of `variable = v1 v2 ...` lines.
        #[arg(long, default_value = "ones")]
        oracle: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    json: bool,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long = "seed")]
    seeds: Vec<String>,
    /// `<requirement>=<thorn>`, choosing among alternate providers.
    #[arg(long = "choose", value_parser = parse_choice)]
    choices: Vec<(String, String)>,
}

fn parse_choice(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
            Ok((k.trim().to_string(), v.trim().to_string()))
        }
        _ => Err(format!("expected <requirement>=<thorn>, got `{s}`")),
    }
}

/// A reportable failure and the exit status it maps to.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn semantic(message: impl ToString) -> Self {
        Failure { status: 1, message: message.to_string() }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Failure { status: 2, message: format!("{}: {err}", path.display()) }
    }

    fn ambiguous(report: &AmbiguityReport) -> Self {
        Failure { status: 3, message: format!("ambiguous requirements; use --choose <requirement>=<thorn>\n{report}") }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure { status: if e.is_io() { 2 } else { 1 }, message: e.to_string() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::semantic(e)
    }
}

impl From<ResolveError> for Failure {
    fn from(e: ResolveError) -> Self {
        match &e {
            ResolveError::Ambiguous(report) => Failure::ambiguous(report),
            _ => Failure::semantic(e),
        }
    }
}

type Outcome = Result<(), Failure>;

fn identifier(text: &str) -> Result<Identifier, Failure> {
    Identifier::new(text).map_err(Failure::semantic)
}

fn load_world(root: &Path) -> Result<World, Failure> {
    Ok(build_world(load_corpus(root)?))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    Ok(decode_utf8(&bytes, path)?.to_string())
}

fn emit(output: &OutputArgs, text: &str) -> Outcome {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn choice_map(select: &SelectArgs) -> Result<ChoiceMap, Failure> {
    let mut map = ChoiceMap::new();
    for (key, thorn) in &select.choices {
        map.insert(key, identifier(thorn)?);
    }
    Ok(map)
}

fn seeds(select: &SelectArgs) -> Result<Vec<Identifier>, Failure> {
    select.seeds.iter().map(|s| identifier(s)).collect()
}

fn cmd_parse(root: &Path, output: &OutputArgs) -> Outcome {
    let world = load_world(root)?;
    if output.json {
        emit(output, &(world.to_json() + "\n"))
    } else {
        emit(output, &format!("parsed {} thorns\n", world.thorns.len()))
    }
}

fn cmd_check(root: &Path, output: &OutputArgs) -> Outcome {
    let world = load_world(root)?;
    let mut diags = world.diagnostics.clone();
    diags.extend(check_implementation_consistency(&world));
    diags.sort();
    let text = if output.json {
        serde_json::to_string_pretty(&diags).expect("diagnostics serialize") + "\n"
    } else {
        diags.iter().map(|d| format!("{d}\n")).collect()
    };
    emit(output, &text)?;
    let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
    if errors > 0 {
        return Err(Failure::semantic(format!("{errors} error(s)")));
    }
    Ok(())
}

fn cmd_graph(root: &Path, select: &SelectArgs, shade: bool, output: &OutputArgs) -> Outcome {
    let world = load_world(root)?;
    let seeds = seeds(select)?;
    let scope: Option<BTreeSet<Identifier>> = if seeds.is_empty() {
        None
    } else {
        Some(resolve(&world, &seeds, &choice_map(select)?)?.thorns.into_iter().collect())
    };
    let graph = extract_edges(&world, scope.as_ref());
    let text = if output.json { graph.to_json() } else { emit_dot(&graph, shade) };
    emit(output, &text)
}

/// Asks for one provider per ambiguity. A non-candidate answer re-prompts
/// up to three times.
fn prompt_choices(report: &AmbiguityReport, choices: &mut ChoiceMap, input: &mut impl BufRead) -> Outcome {
    for amb in &report.unresolved {
        let names: Vec<&str> = amb.candidates.iter().map(|c| c.as_str()).collect();
        let mut chosen = None;
        for _ in 0..4 {
            eprint!("{} `{}` has several providers [{}]; choose one: ", amb.domain.label(), amb.key, names.join(", "));
            let mut line = String::new();
            if input.read_line(&mut line).map_err(|e| Failure::io(Path::new("<stdin>"), e))? == 0 {
                break;
            }
            chosen = amb.candidates.iter().find(|c| c.matches(line.trim())).cloned();
            if chosen.is_some() {
                break;
            }
        }
        match chosen {
            Some(thorn) => choices.insert(&amb.key, thorn),
            None => return Err(Failure::ambiguous(report)),
        }
    }
    Ok(())
}

fn cmd_resolve(
    root: &Path,
    select: &SelectArgs,
    thornlist: Option<&Path>,
    interactive: bool,
    output: &OutputArgs,
) -> Outcome {
    let world = load_world(root)?;
    let mut seeds = seeds(select)?;
    if let Some(path) = thornlist {
        seeds.extend(parse_thornlist(&read_text(path)?, path)?.into_iter().map(|e| e.thorn));
    }
    let mut choices = choice_map(select)?;
    let stdin = io::stdin();
    let list: Thornlist = loop {
        match resolve(&world, &seeds, &choices) {
            Ok(list) => break list,
            Err(ResolveError::Ambiguous(report)) if interactive => {
                prompt_choices(&report, &mut choices, &mut stdin.lock())?
            }
            Err(e) => return Err(e.into()),
        }
    };
    let text = if output.json {
        serde_json::to_string_pretty(&list).expect("thornlist serializes") + "\n"
    } else {
        write_thornlist(&list.entries(&world))
    };
    emit(output, &text)
}

fn cmd_schedule(
    root: &Path,
    parfile: &Path,
    iterations: u32,
    requests: &[String],
    oracle: &str,
    output: &OutputArgs,
) -> Outcome {
    let world = load_world(root)?;
    let runconfig = parse_parameter_file(&read_text(parfile)?, parfile)?;
    let config = activate(&world, &runconfig).map_err(Failure::semantic)?;
    let tree = build_schedule_tree(&world, &config).map_err(Failure::semantic)?;
    for w in &tree.warnings {
        eprintln!("{w}");
    }
    let requested: BTreeSet<Identifier> = requests.iter().map(|r| identifier(r)).collect::<Result<_, _>>()?;
    let trace: Vec<TraceEvent> = if oracle.eq_ignore_ascii_case("ones") {
        traverse(&tree, iterations, &mut OnesOracle, &requested)
    } else {
        let path = Path::new(oracle);
        let mut file_oracle = parse_oracle_file(&read_text(path)?, path)?;
        traverse(&tree, iterations, &mut file_oracle, &requested)
    }
    .map_err(Failure::semantic)?;
    let text = if output.json { trace_to_json(&trace) } else { trace_to_text(&trace) };
    emit(output, &text)
}

fn run(cli: &Cli) -> Outcome {
    let root = cli.root.as_path();
    match &cli.command {
        Command::Parse(output) => cmd_parse(root, output),
        Command::Check(output) => cmd_check(root, output),
        Command::Graph { select, shade_leaves, output } => cmd_graph(root, select, *shade_leaves, output),
        Command::Resolve { select, thornlist, interactive, output } => {
            cmd_resolve(root, select, thornlist.as_deref(), *interactive, output)
        }
        Command::Schedule { parfile, iterations, requests, oracle, output } => {
            cmd_schedule(root, parfile, *iterations, requests, oracle, output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.status)
        }
    }
}
