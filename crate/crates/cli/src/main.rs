//! `cfc`: generate matrices, synthesize and check circuits, compute lower
//! bounds, run exact searches and the seeded experiments.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 search limit or sample budget exceeded.

mod input;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cfcircuit::bounds::{bound_report, BoundOptions};
use cfcircuit::exact::{census, optimal_size, Model, SearchOptions, SearchStatus, DEFAULT_LIMIT};
use cfcircuit::lab::{
    estimate_conditional_bias, exact_conditional_probability, ramsey_check, ratio_sweep, run_separation,
    submatrix_rank_stats, sylvester_check, BiasOptions, BiasStatus, ExperimentConfig, MaskPattern,
};
use cfcircuit::synthesis::{
    boyar_peralta, hadamard_circuit, lupanov, lupanov_depth2, naive_rowwise, paar_greedy, product_circuit,
    setintersection_or_circuit, sierpinski_circuit, DepthMode, SynthesisResult,
};
use cfcircuit::BitMatrix;

use input::{load_circuit, load_matrix, AnyCircuit};
use report::{envelope, write_json, write_text};

#[derive(Debug)]
pub enum Failure {
    Verification(String),
    Invalid(String),
    Limit(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Limit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Invalid(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<cfcircuit::Error> for Failure {
    fn from(e: cfcircuit::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "cfc", version, about = "Linear Boolean circuits: synthesis, verification, bounds, experiments")]
struct Cli {
    /// Worker threads for the lab experiments.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a generated matrix in the text (or JSON) matrix format.
    Gen(GenArgs),
    /// Build a circuit for a matrix.
    Synth(SynthArgs),
    /// Check a circuit against a matrix.
    Check(CheckArgs),
    /// Lower-bound certificates for a matrix.
    Bound(BoundArgs),
    /// Minimum fan-in-2 circuit by exhaustive search.
    Exact(ExactArgs),
    /// Seeded experiments.
    #[command(subcommand)]
    Lab(LabCommand),
    /// Exact optima in every model for all n×n matrices (n ≤ 3).
    Census(CensusArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator: sierpinski:N, setint:N, hadamard:N, random:M:N:SEED,
    /// exampleA, exampleB, identity:N, ones:M:N, zero:M:N.
    spec: String,
    #[arg(long)]
    out: Option<String>,
    /// Emit the JSON wrapper instead of the text format.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Naive,
    Paar,
    Bp,
    Lupanov,
    Lupanov2,
    Sierpinski,
    Setint,
    Hadamard,
    Product,
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Fanin2,
    Depth4,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Matrix file, generator name, or `-` for stdin. For `product` this is B.
    #[arg(long = "in", default_value = "-")]
    input: String,
    /// Right factor C for `product`.
    #[arg(long)]
    right: Option<String>,
    #[arg(long, value_enum, default_value = "fanin2")]
    depth_mode: DepthArg,
    /// Circuit output path (stdout by default).
    #[arg(long)]
    out: Option<String>,
    /// JSON cost report path. Defaults to stdout when --out is given,
    /// stderr otherwise.
    #[arg(long)]
    report: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// Circuit file or `-` for stdin.
    #[arg(long = "in", default_value = "-")]
    input: String,
    /// Matrix file or generator name.
    #[arg(long)]
    against: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "in")]
    input: String,
    /// Freeness quantity at this k (repeatable).
    #[arg(long)]
    kfree: Vec<usize>,
    /// Kővári-Sós-Turán cap for this a (repeatable).
    #[arg(long)]
    kst: Vec<usize>,
    /// Add k ∈ {1, 2, ⌈2·log2 n⌉} and a ∈ {2, 3}.
    #[arg(long)]
    all: bool,
    /// Seed for the heuristic submatrix search; required with --kfree/--all.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Xor,
    Cf,
    Or,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Xor => Model::Xor,
            ModelArg::Cf => Model::Cf,
            ModelArg::Or => Model::Or,
        }
    }
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Write the optimal circuit here.
    #[arg(long)]
    emit_witness: Option<String>,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 14.0)]
    c: f64,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Steps per all-ones / all-zeros submatrix search.
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    #[arg(long, default_value_t = 100)]
    rank_samples: usize,
    /// Also run the pair-frequency heuristic on each product matrix.
    #[arg(long)]
    heuristic: bool,
    #[arg(long)]
    json: Option<String>,
}

impl ExperimentArgs {
    fn config(&self, n: usize) -> Result<ExperimentConfig, Failure> {
        if !(self.c > 0.0 && self.c.is_finite()) || self.trials == 0 {
            return Err(Failure::Invalid("--c must be positive and --trials at least 1".into()));
        }
        let mut cfg = ExperimentConfig::new(n, self.seed);
        cfg.c = self.c;
        cfg.trials = self.trials;
        cfg.search_budget = self.budget;
        cfg.rank_samples = self.rank_samples;
        cfg.heuristic = self.heuristic;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum LabCommand {
    /// Random product matrices A = B·C: density, freeness evidence, ranks, composed circuits.
    Separation {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Ratio proxies across several n.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
        ns: Vec<usize>,
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// GF(2) ranks of random k×k submatrices.
    Rankstats {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: Option<String>,
    },
    /// Search a matrix and its complement for t×t constant submatrices.
    Ramsey {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: Option<String>,
    },
    /// Sylvester rank inequality on random factor pairs.
    Sylvester {
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, default_value_t = 32)]
        max_dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: Option<String>,
    },
    /// Conditional probability of one product entry given the others.
    Bias {
        #[arg(long)]
        m: usize,
        /// Rows separated by `/`, entries 0, 1 or a single `?`. Random when omitted.
        #[arg(long)]
        mask: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        accepted: u64,
        #[arg(long, default_value_t = 100_000_000)]
        max_draws: u64,
        #[arg(long, default_value_t = 1_000)]
        min_accepted: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: Option<String>,
    },
}

fn gen(a: GenArgs) -> Outcome {
    let m = load_matrix(&a.spec)?;
    if a.json {
        write_json(a.out.as_deref(), &m.to_json())
    } else {
        write_text(a.out.as_deref(), &m.to_text())
    }
}

fn square_side(m: &BitMatrix) -> Result<usize, Failure> {
    if !m.is_square() {
        return Err(Failure::Invalid(format!("expected a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    Ok(m.rows())
}

fn synth(a: SynthArgs) -> Outcome {
    let m = load_matrix(&a.input)?;
    let (result, target): (SynthesisResult, BitMatrix) = match a.method {
        Method::Naive => (naive_rowwise(&m), m),
        Method::Paar => (paar_greedy(&m), m),
        Method::Bp => (boyar_peralta(&m), m),
        Method::Lupanov => (lupanov(&m), m),
        Method::Lupanov2 => (lupanov_depth2(&m), m),
        Method::Sierpinski => (sierpinski_circuit(square_side(&m)?)?, m),
        Method::Setint => (setintersection_or_circuit(square_side(&m)?)?, m),
        Method::Hadamard => (hadamard_circuit(square_side(&m)?)?, m),
        Method::Product => {
            let right = a
                .right
                .as_deref()
                .ok_or_else(|| Failure::Invalid("product needs --right <matrix C>".into()))?;
            let c = load_matrix(right)?;
            let mode = match a.depth_mode {
                DepthArg::Fanin2 => DepthMode::Fanin2,
                DepthArg::Depth4 => DepthMode::Depth4,
            };
            let r = product_circuit(&m, &c, mode)?;
            (r, m.mul_gf2(&c)?)
        }
    };
    let verifies = result.verify(&target)?;
    if !verifies {
        return Err(Failure::Verification(format!(
            "the {} construction does not compute the input matrix",
            result.method
        )));
    }
    let text = match (result.circuit.as_fanin2(), result.circuit.as_layered()) {
        (Some(c), _) => c.to_string(),
        (None, Some(l)) => l.to_string(),
        (None, None) => unreachable!("a result holds one circuit kind"),
    };
    write_text(a.out.as_deref(), &text)?;
    let mut rep = envelope("synth", result.report());
    rep["verifies"] = verifies.into();
    match (a.report.as_deref(), a.out.is_some()) {
        (Some(p), _) => write_json(Some(p), &rep),
        (None, true) => write_json(None, &rep),
        (None, false) => {
            eprintln!("{}", serde_json::to_string(&rep).expect("values serialize"));
            Ok(())
        }
    }
}

fn check(a: CheckArgs) -> Outcome {
    let circuit = load_circuit(&a.input)?;
    let m = load_matrix(&a.against)?;
    let (verdict, cf, gates, wires, depth, connective) = match &circuit {
        AnyCircuit::Fanin2(c) => (c.verify(&m), c.is_cancellation_free(), c.size(), None, c.depth(), c.connective()),
        AnyCircuit::Layered(l) => (
            l.verify(&m),
            l.is_cancellation_free(),
            l.gate_count(),
            Some(l.wires()),
            l.depth(),
            l.connective(),
        ),
    };
    let (verifies, mismatch) = match verdict {
        Ok(v) => (v, None),
        Err(e) => (false, Some(e.to_string())),
    };
    if a.json {
        let mut rep = envelope(
            "check",
            json!({
                "verifies": verifies,
                "cancellation_free": cf,
                "gates": gates,
                "depth": depth,
                "connective": connective,
            }),
        );
        if let Some(w) = wires {
            rep["wires"] = w.into();
        }
        write_json(None, &rep)?;
    } else {
        let cost = match wires {
            Some(w) => format!("{w} wires, {gates} gates"),
            None => format!("{gates} gates"),
        };
        let cf_text = if cf { "cancellation-free" } else { "not cancellation-free" };
        println!("{cost}, {cf_text}");
    }
    if verifies {
        Ok(())
    } else {
        Err(Failure::Verification(
            mismatch.unwrap_or_else(|| "circuit does not compute the matrix".into()),
        ))
    }
}

fn bound(a: BoundArgs) -> Outcome {
    let m = load_matrix(&a.input)?;
    let mut kfree = a.kfree.clone();
    let mut kst = a.kst.clone();
    if a.all {
        let n = m.rows().min(m.cols()).max(1);
        let side = (2.0 * (n as f64).log2()).ceil() as usize;
        kfree.extend([1, 2, side.max(1)]);
        if m.is_square() {
            kst.extend([2, 3]);
        }
    }
    kfree.sort_unstable();
    kfree.dedup();
    kst.sort_unstable();
    kst.dedup();
    let seed = match (a.seed, kfree.is_empty()) {
        (Some(s), _) => s,
        (None, true) => 0,
        (None, false) => return Err(Failure::Invalid("--seed is required with --kfree or --all".into())),
    };
    let opts = BoundOptions {
        kfree,
        kst,
        evidence_budget: a.budget,
        seed,
    };
    let r = bound_report(&m, &opts)?;
    write_json(a.json.as_deref(), &envelope("bound", r))
}

fn exact(a: ExactArgs) -> Outcome {
    let m = load_matrix(&a.input)?;
    let model: Model = a.model.into();
    let out = optimal_size(
        &m,
        model,
        SearchOptions {
            limit: a.limit,
            max_nodes: a.max_nodes,
        },
    )?;
    let rep = envelope(
        "exact",
        json!({
            "model": model,
            "status": out.status,
            "optimal": out.optimal_size,
            "lower_bound": out.lower_bound,
            "nodes": out.nodes_expanded,
            "limit": out.limit,
            "max_nodes": a.max_nodes,
        }),
    );
    write_json(a.json.as_deref(), &rep)?;
    if let (Some(path), Some(w)) = (a.emit_witness.as_deref(), out.witness.as_ref()) {
        write_text(Some(path), &w.to_string())?;
    }
    match out.status {
        SearchStatus::Optimal => Ok(()),
        SearchStatus::ExceedsLimit => Err(Failure::Limit(format!("no circuit with at most {} gates", out.limit))),
        SearchStatus::NodeBudget => Err(Failure::Limit(format!(
            "node budget exhausted; lower bound {}",
            out.lower_bound
        ))),
    }
}

fn run_census(a: CensusArgs) -> Outcome {
    let c = census(a.n)?;
    write_json(a.json.as_deref(), &envelope("census", c))
}

fn lab(cmd: LabCommand) -> Outcome {
    match cmd {
        LabCommand::Separation { n, exp } => {
            let r = run_separation(&exp.config(n)?);
            write_json(exp.json.as_deref(), &envelope("lab separation", &r))?;
            if !r.summary.all_verified {
                return Err(Failure::Verification("a composed circuit failed verification".into()));
            }
            Ok(())
        }
        LabCommand::Sweep { ns, exp } => {
            if ns.is_empty() {
                return Err(Failure::Invalid("--ns needs at least one size".into()));
            }
            let r = ratio_sweep(&ns, &exp.config(ns[0])?);
            write_json(exp.json.as_deref(), &envelope("lab sweep", r))
        }
        LabCommand::Rankstats {
            input,
            k,
            samples,
            seed,
            json,
        } => {
            let m = load_matrix(&input)?;
            let r = submatrix_rank_stats(&m, k, samples, seed)?;
            let rep = envelope(
                "lab rankstats",
                json!({
                    "config": {"input": input, "k": k, "samples": samples, "seed": seed},
                    "stats": r,
                }),
            );
            write_json(json.as_deref(), &rep)
        }
        LabCommand::Ramsey {
            input,
            t,
            budget,
            seed,
            json,
        } => {
            let m = load_matrix(&input)?;
            let r = ramsey_check(&m, t, budget, seed)?;
            let rep = envelope(
                "lab ramsey",
                json!({
                    "config": {"input": input, "t": t, "budget": budget, "seed": seed},
                    "outcome": r,
                }),
            );
            write_json(json.as_deref(), &rep)
        }
        LabCommand::Sylvester {
            pairs,
            max_dim,
            seed,
            json,
        } => {
            if max_dim == 0 {
                return Err(Failure::Invalid("--max-dim must be at least 1".into()));
            }
            let r = sylvester_check(pairs, max_dim, seed);
            let rep = envelope(
                "lab sylvester",
                json!({
                    "config": {"pairs": pairs, "max_dim": max_dim, "seed": seed},
                    "result": r,
                }),
            );
            write_json(json.as_deref(), &rep)?;
            if r.violations > 0 {
                return Err(Failure::Verification(format!("{} violations", r.violations)));
            }
            Ok(())
        }
        LabCommand::Bias {
            m,
            mask,
            accepted,
            max_draws,
            min_accepted,
            seed,
            json,
        } => {
            let mask = match mask {
                Some(s) => s.parse::<MaskPattern>()?,
                None => MaskPattern::random(m, seed)?,
            };
            if mask.m() != m {
                return Err(Failure::Invalid(format!("mask is {}x{}, --m is {m}", mask.m(), mask.m())));
            }
            let e = estimate_conditional_bias(
                &mask,
                BiasOptions {
                    accepted_target: accepted,
                    max_draws,
                    min_accepted,
                    seed,
                },
            );
            let exact = exact_conditional_probability(&mask, e.inner);
            let mut rep = envelope("lab bias", &e);
            rep["exact"] = if exact.is_finite() { exact.into() } else { serde_json::Value::Null };
            write_json(json.as_deref(), &rep)?;
            match e.status {
                BiasStatus::Ok => Ok(()),
                BiasStatus::InsufficientSamples => Err(Failure::Limit(format!(
                    "only {} of {} draws matched the mask",
                    e.accepted, e.draws
                ))),
            }
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if cli.threads == 0 {
        return Err(Failure::Invalid("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Failure::Invalid(format!("thread pool: {e}")))?;
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Synth(a) => synth(a),
        Command::Check(a) => check(a),
        Command::Bound(a) => bound(a),
        Command::Exact(a) => exact(a),
        Command::Lab(c) => lab(c),
        Command::Census(a) => run_census(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cfc: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
