//! Command-line front end. [`run`] parses arguments, dispatches and returns
//! the process exit code.
//!
//! Exit codes: 0 resolving (or success), 1 not resolving, 2 inconclusive,
//! 3 usage error, 4 runtime error.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchConfig, BenchMethod};
use crate::embed::{embed, embed_file, load_basis, BasisSource, SHIPPED_NAME};
use crate::error::{Error, Result};
use crate::groebner_verifier::{verify_groebner_parallel, verify_groebner_with_transcript};
use crate::ilp::{
    build_classic_min_model, build_membership_model, export_model, solve_covering, verify_ilp, ModeKind,
    DEFAULT_CLASSIC_CAP,
};
use crate::kmer::{HammingInstance, Kmer};
use crate::oracle::{brute_force_verify, metric_dimension_exhaustive, DEFAULT_MINDIM_CAP};
use crate::setfile::VertexSet;
use crate::shrink::{shrink, ScreenMethod, ShrinkConfig};
use crate::verdict::{is_valid_witness, Status, Verdict};

pub const EXIT_RESOLVING: i32 = 0;
pub const EXIT_NOT_RESOLVING: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

/// Instances with at most this many vertices are verified by brute force under `--method auto`.
pub const AUTO_BRUTE_LIMIT: u128 = 10_000;
/// Groebner certification above this many variables needs `--long-running`.
pub const LONG_RUN_VARIABLES: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "hamres", version, about = "Resolving sets of Hamming graphs: verify, shrink, embed, benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a vertex set resolves its Hamming graph.
    Verify(VerifyArgs),
    /// Remove redundant vertices from a resolving set.
    Shrink(ShrinkArgs),
    /// Write distance-vector embeddings of sequences.
    Embed(EmbedArgs),
    /// Time the verifiers on random labeled sets.
    Bench(BenchArgs),
    /// Metric dimension of a tiny Hamming graph.
    Mindim(MindimArgs),
    /// Write an integer program in LP format.
    ExportIlp(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Auto,
    Brute,
    Groebner,
    Ilp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeChoice {
    Exact,
    Feasibility,
    RandomObjective,
}

impl ModeChoice {
    fn kind(self) -> ModeKind {
        match self {
            ModeChoice::Exact => ModeKind::PowersOfTwo,
            ModeChoice::Feasibility => ModeKind::Feasibility,
            ModeChoice::RandomObjective => ModeKind::RandomNormal,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Vertex set in hrs-set format, or `shipped-octapeptide-77`.
    #[arg(long)]
    set: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodChoice,
    /// Objective for the ILP method.
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeChoice,
    /// Seed for randomized ILP modes; a random seed is chosen and logged when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Branch-and-bound node budget for the ILP method.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Threads for the Groebner certification.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the Groebner basis transcript here (groebner method only).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow Groebner certification on large instances (hours for octapeptides).
    #[arg(long)]
    long_running: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScreenChoice {
    Exact,
    Feasibility,
}

#[derive(Args, Debug)]
struct ShrinkArgs {
    #[arg(long)]
    set: PathBuf,
    /// Random subsets screened per size.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "exact")]
    screen: ScreenChoice,
    /// Skip the final Groebner confirmation.
    #[arg(long)]
    no_confirm: bool,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    json: bool,
    /// Write the final set here in hrs-set format.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the step log here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    /// `shipped-octapeptide-77` or an hrs-set file.
    #[arg(long, default_value = SHIPPED_NAME)]
    basis: String,
    /// One sequence per line.
    #[arg(long, requires = "out")]
    input: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sequences to embed to stdout.
    sequences: Vec<String>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Instance as `k,a`; repeatable.
    #[arg(long = "instance", required = true, value_parser = parse_pair)]
    instances: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 50)]
    resolving: usize,
    #[arg(long, default_value_t = 50)]
    non_resolving: usize,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    /// Comma-separated subset of brute, groebner, ilp-exact, ilp-feasibility.
    #[arg(long, value_delimiter = ',', value_parser = parse_bench_method)]
    methods: Option<Vec<BenchMethod>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-run time cap in seconds.
    #[arg(long)]
    time_cap: Option<f64>,
    /// Output directory for records.csv and summary.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MindimMethod {
    Exhaustive,
    Ilp,
}

#[derive(Args, Debug)]
struct MindimArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    a: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    method: MindimMethod,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// Vertex set for the kernel-membership model.
    #[arg(long, conflicts_with = "classic")]
    set: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeChoice,
    #[arg(long)]
    seed: Option<u64>,
    /// Export the minimum-resolving-set model of `H(k, a)` instead.
    #[arg(long, requires_all = ["k", "a"])]
    classic: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (k, a) = s.split_once(',').ok_or("expected k,a")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(k)?, num(a)?))
}

fn parse_bench_method(s: &str) -> std::result::Result<BenchMethod, String> {
    BenchMethod::parse(s).ok_or_else(|| format!("unknown method {s:?}"))
}

fn seed_or_random(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        let _ = writeln!(err, "seed: {s}");
        log::info!("no --seed given, using {s}");
        s
    })
}

/// Method chosen by `--method auto`: brute force for small instances,
/// otherwise the exact ILP screen with Groebner confirmation.
pub fn method_auto_select(instance: &HammingInstance, flag: Option<MethodChoice>) -> Vec<MethodChoice> {
    match flag {
        Some(m) if m != MethodChoice::Auto => vec![m],
        _ if instance.vertex_count() <= AUTO_BRUTE_LIMIT => vec![MethodChoice::Brute],
        _ => vec![MethodChoice::Ilp, MethodChoice::Groebner],
    }
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Resolving => EXIT_RESOLVING,
        Status::NotResolving => EXIT_NOT_RESOLVING,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn run_verify(args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let set = match args.set.to_str() {
        Some(SHIPPED_NAME) => load_basis(&BasisSource::Shipped)?.into_set(),
        _ => VertexSet::read(&args.set)?,
    };
    let mut plan = method_auto_select(&set.instance, Some(args.method));
    let variables = set.instance.dimension();
    if variables > LONG_RUN_VARIABLES && !args.long_running {
        if args.method == MethodChoice::Groebner {
            return Err(Error::LongRunning(variables));
        }
        if plan.len() > 1 {
            plan.retain(|m| *m != MethodChoice::Groebner);
            let _ = writeln!(err, "skipping Groebner confirmation; pass --long-running to run it");
        }
    }
    let mut verdict: Option<Verdict> = None;
    for m in plan {
        let v = match m {
            MethodChoice::Brute => brute_force_verify(&set.kmers)?,
            MethodChoice::Groebner => match &args.out {
                Some(path) => {
                    let (v, transcript) = verify_groebner_with_transcript(&set.kmers)?;
                    std::fs::write(path, transcript.render()).map_err(|e| Error::io(path, e))?;
                    v
                }
                None => verify_groebner_parallel(&set.kmers, args.workers)?,
            },
            MethodChoice::Ilp => {
                let mode = args.mode.kind();
                let seed = match mode {
                    ModeKind::PowersOfTwo => args.seed,
                    _ => Some(seed_or_random(args.seed, err)),
                };
                verify_ilp(&set.kmers, mode, seed, args.budget_nodes)?
            }
            MethodChoice::Auto => unreachable!("auto is resolved to concrete methods"),
        };
        let screened = verdict.as_ref().map(|p| p.method);
        let done = v.status != Status::Resolving;
        verdict = Some(match screened {
            Some(p) => v.with_reason(format!("screened by {p}, confirmed by groebner")),
            None => v,
        });
        if done {
            break;
        }
    }
    let verdict = verdict.expect("at least one method runs");
    if let Some((x, y)) = &verdict.witness {
        if !is_valid_witness(x, y, &set.kmers)? {
            return Err(Error::NotAWitness(format!("{} {}", x.render(), y.render())));
        }
    }
    if args.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&verdict.to_json()).unwrap_or_default());
    } else {
        let _ = writeln!(out, "{}", verdict.summary_line());
    }
    Ok(status_code(verdict.status))
}

fn run_shrink(args: ShrinkArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let set = VertexSet::read(&args.set)?;
    let cfg = ShrinkConfig {
        samples_per_size: args.samples,
        seed: seed_or_random(args.seed, err),
        screen_method: match args.screen {
            ScreenChoice::Exact => ScreenMethod::IlpExact,
            ScreenChoice::Feasibility => ScreenMethod::IlpFeasibility,
        },
        confirm_with_groebner: !args.no_confirm,
        time_budget: args.time_budget.map(Duration::from_secs_f64),
        node_budget: args.budget_nodes,
        workers: args.workers,
    };
    let trace = shrink(&set.kmers, &cfg)?;
    let rendered = trace.render();
    if let Some(path) = &args.trace {
        std::fs::write(path, &rendered).map_err(|e| Error::io(path, e))?;
    }
    let result = VertexSet::new(Arc::clone(&set.instance), trace.final_set.clone());
    if let Some(path) = &args.out {
        result.write(path)?;
    }
    if !args.json {
        let _ = write!(out, "{rendered}");
        for v in &trace.final_set {
            let _ = writeln!(out, "{}", v.render());
        }
    } else {
        let json = serde_json::json!({
            "input_size": set.kmers.len(),
            "final_size": trace.final_set.len(),
            "final_set": trace.final_set.iter().map(Kmer::render).collect::<Vec<_>>(),
            "confirmed": trace.confirmed,
            "budget_exhausted": trace.budget_exhausted,
            "steps": trace.steps.iter().map(|s| serde_json::json!({
                "L": s.lower, "U": s.upper, "s": s.size, "tried": s.tried, "found": s.found,
            })).collect::<Vec<_>>(),
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&json).unwrap_or_default());
    }
    let settled = trace.confirmed || (args.no_confirm && !trace.budget_exhausted);
    Ok(if settled { EXIT_RESOLVING } else { EXIT_INCONCLUSIVE })
}

fn run_embed(args: EmbedArgs, out: &mut dyn Write) -> Result<i32> {
    let basis = load_basis(&BasisSource::parse(&args.basis))?;
    if let (Some(input), Some(path)) = (&args.input, &args.out) {
        let n = embed_file(input, &basis, path)?;
        let _ = writeln!(out, "embedded {n} sequences into {}", path.display());
    }
    for s in &args.sequences {
        let v = Kmer::parse(s, &basis.instance)?;
        let phi = embed(&v, &basis)?;
        let row: Vec<String> = phi.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{},{}", v.render(), row.join(","));
    }
    Ok(EXIT_RESOLVING)
}

fn run_bench_cmd(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = BenchConfig {
        instances: args.instances,
        n_resolving: args.resolving,
        n_non_resolving: args.non_resolving,
        replicates: args.replicates,
        methods: args.methods.unwrap_or_else(|| BenchMethod::ALL.to_vec()),
        seed: seed_or_random(args.seed, err),
        time_cap: args.time_cap.map(Duration::from_secs_f64),
    };
    let report = run_bench(&cfg)?;
    report.write(&args.out)?;
    let _ = write!(out, "{}", report.summary_csv());
    let disagreements = report.records.iter().filter(|r| r.agrees() == Some(false)).count();
    if disagreements > 0 {
        let _ = writeln!(err, "{disagreements} records disagree with the ground truth");
    }
    Ok(EXIT_RESOLVING)
}

fn run_mindim(args: MindimArgs, out: &mut dyn Write) -> Result<i32> {
    let instance = Arc::new(HammingInstance::new(args.k, args.a)?);
    let (beta, set) = match args.method {
        MindimMethod::Exhaustive => metric_dimension_exhaustive(&instance, DEFAULT_MINDIM_CAP)?,
        MindimMethod::Ilp => {
            let model = build_classic_min_model(&instance, DEFAULT_CLASSIC_CAP)?;
            let (beta, chosen) = solve_covering(&model)?;
            (beta, chosen.into_iter().map(|j| Kmer::from_index(&instance, j as u128)).collect())
        }
    };
    let words: Vec<String> = set.iter().map(Kmer::render).collect();
    if !args.json {
        let _ = writeln!(out, "beta = {beta}");
        let _ = writeln!(out, "set: {}", words.join(" "));
    } else {
        let json = serde_json::json!({ "k": args.k, "a": args.a, "beta": beta, "set": words });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&json).unwrap_or_default());
    }
    Ok(EXIT_RESOLVING)
}

fn run_export(args: ExportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let model = if args.classic {
        let (k, a) = (args.k.unwrap_or_default(), args.a.unwrap_or_default());
        build_classic_min_model(&Arc::new(HammingInstance::new(k, a)?), DEFAULT_CLASSIC_CAP)?
    } else {
        let path = args
            .set
            .as_ref()
            .ok_or_else(|| Error::MalformedModel("either --set or --classic is required".into()))?;
        let set = VertexSet::read(path)?;
        let mode = args.mode.kind();
        let seed = match mode {
            ModeKind::PowersOfTwo => None,
            _ => Some(seed_or_random(args.seed, err)),
        };
        build_membership_model(&set.kmers, mode, seed)?
    };
    export_model(&model, &args.out)?;
    let _ = writeln!(
        out,
        "wrote {} variables and {} constraints to {}",
        model.variables.len(),
        model.constraints.len(),
        args.out.display()
    );
    Ok(EXIT_RESOLVING)
}

/// Runs the command line `args` (program name first), writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_RESOLVING;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => run_verify(a, out, err),
        Command::Shrink(a) => run_shrink(a, out, err),
        Command::Embed(a) => run_embed(a, out),
        Command::Bench(a) => run_bench_cmd(a, out, err),
        Command::Mindim(a) => run_mindim(a, out),
        Command::ExportIlp(a) => run_export(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("hamres").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn auto_selection() {
        let small = HammingInstance::new(2, 3).unwrap();
        let big = HammingInstance::new(8, 20).unwrap();
        assert_eq!(method_auto_select(&small, None), vec![MethodChoice::Brute]);
        assert_eq!(method_auto_select(&big, None), vec![MethodChoice::Ilp, MethodChoice::Groebner]);
        assert_eq!(method_auto_select(&big, Some(MethodChoice::Brute)), vec![MethodChoice::Brute]);
    }

    #[test]
    fn mindim_line() {
        let (code, out, _) = call(&["mindim", "--k", "1", "--a", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("beta = 2\n"));
        let (code, out, _) = call(&["mindim", "--k", "2", "--a", "2", "--method", "ilp"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("beta = 2\n"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["verify"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, 0);
        let (code, _, err) = call(&["verify", "--set", "/nonexistent/file.hrs"]);
        assert_eq!(code, EXIT_RUNTIME);
        assert!(err.starts_with("error:"));
    }
}
