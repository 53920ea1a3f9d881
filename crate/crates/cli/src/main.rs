//! `pmc`: probability that a Markov chain or MDP satisfies an LTL formula or
//! a Büchi, Rabin or parity automaton given in HOA format.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use pmc_core::automata::hoa::{hoa_parse, HoaAutomaton};
use pmc_core::engine::{
    model_check, model_check_deterministic, model_check_ltl, CheckResult, Config, Fallback, Method, Mode, Solver,
};
use pmc_core::ltl::parse_ltl;
use pmc_core::model::{load_model_files, ModelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Mc,
    Mdp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Max,
    Min,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Lazy,
    RabinOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FallbackArg {
    Multibreakpoint,
    Rabin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pmc", version, about = "Probabilistic model checking against omega-regular properties")]
#[command(group(ArgGroup::new("property").required(true).args(["ltl", "hoa"])))]
struct Cli {
    /// Transition file (`src dst prob` or `src action dst prob` per line).
    #[arg(long)]
    model: PathBuf,
    /// Label file (`#aps ...` header, then `state: ap ap ...`).
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// LTL formula.
    #[arg(long)]
    ltl: Option<String>,
    /// Automaton in HOA format.
    #[arg(long)]
    hoa: Option<PathBuf>,
    /// Scheduler quantifier; defaults to `exact` for chains and `max` for MDPs.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "lazy")]
    method: MethodArg,
    /// Layer used for components the breakpoint layer leaves open.
    #[arg(long, value_enum, default_value = "multibreakpoint")]
    fallback: FallbackArg,
    /// Print per-layer component counts.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Convergence threshold of iterative solvers.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

enum Failure {
    Input(String),
    Internal(String),
}

fn config(cli: &Cli) -> Config {
    let mut solver = Solver::default();
    if let Some(t) = cli.tolerance {
        solver.tolerance = t;
    }
    if let Some(n) = cli.max_iterations {
        solver.max_iterations = n;
    }
    Config {
        method: match cli.method {
            MethodArg::Lazy => Method::Lazy,
            MethodArg::RabinOracle => Method::RabinOracle,
        },
        fallback: match cli.fallback {
            FallbackArg::Multibreakpoint => Fallback::MultiBreakpoint,
            FallbackArg::Rabin => Fallback::Rabin,
        },
        threads: cli.threads,
        solver,
        ..Config::default()
    }
}

fn run(cli: &Cli) -> Result<CheckResult, Failure> {
    let kind = match cli.kind {
        KindArg::Mc => ModelKind::MarkovChain,
        KindArg::Mdp => ModelKind::Mdp,
    };
    if cli.tolerance.is_some_and(|t| !(t > 0.0)) {
        return Err(Failure::Input("--tolerance must be positive".into()));
    }
    let mode = match (cli.mode, kind) {
        (None, ModelKind::MarkovChain) | (Some(ModeArg::Exact), ModelKind::MarkovChain) => Mode::Exact,
        (Some(ModeArg::Max | ModeArg::Min), ModelKind::MarkovChain) => Mode::Exact,
        (None, ModelKind::Mdp) | (Some(ModeArg::Max), ModelKind::Mdp) => Mode::Max,
        (Some(ModeArg::Min), ModelKind::Mdp) => Mode::Min,
        (Some(ModeArg::Exact), ModelKind::Mdp) => {
            return Err(Failure::Input("--mode exact needs --kind mc; use max or min for an MDP".into()))
        }
    };
    let model = load_model_files(&cli.model, &cli.labels, kind).map_err(|e| Failure::Input(e.to_string()))?;
    let config = config(cli);
    let internal = |e: pmc_core::engine::EngineError| Failure::Internal(e.to_string());
    if let Some(text) = &cli.ltl {
        let phi = parse_ltl(text).map_err(|e| Failure::Input(format!("--ltl: {e}")))?;
        return model_check_ltl(&model, &phi, mode, &config).map_err(internal);
    }
    let path = cli.hoa.as_ref().expect("clap enforces --ltl or --hoa");
    if mode == Mode::Min {
        return Err(Failure::Input("--mode min is only available with --ltl".into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let aut = hoa_parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let aps = aut.alphabet().aps();
    if let Some(ap) = aps.iter().find(|p| model.alphabet().index_of(p).is_none()) {
        return Err(Failure::Input(format!("automaton proposition \"{ap}\" is not declared in the label file")));
    }
    match &aut {
        HoaAutomaton::Ngba(b) => model_check(&model, b, &config).map_err(internal),
        HoaAutomaton::Deterministic(a) => model_check_deterministic(&model, a, &config).map_err(internal),
    }
}

fn render(cli: &Cli, r: &CheckResult) -> String {
    match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("results serialize");
            s.push('\n');
            s
        }
        Format::Plain => {
            let mut s = format!("{}\n", r.probability);
            if cli.stats {
                let l = &r.layers;
                s += &format!(
                    "subset: {}\nbreakpoint: {}\nmultibreakpoint: {}\nrabin: {}\nstates explored: {}\n",
                    l.subset, l.breakpoint, l.multi_breakpoint, l.rabin, r.states_explored
                );
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            print!("{}", render(&cli, &r));
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("pmc: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("pmc: {msg}");
            ExitCode::from(1)
        }
    }
}
