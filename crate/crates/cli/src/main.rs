//! `hfl`: command-line front end for the HFL model checker.
//!
//! Exit codes: `check` returns 0 if the state satisfies the formula, 1 if it
//! does not and 2 on any error; `atm run` returns 0 on accept and 1 on reject.
//! Every other command returns 0 on success and 2 on error.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hfl::denote::DEFAULT_ELEMENT_LIMIT;
use hfl::encodings::{self, Atm, CounterOp, Showcase};
use hfl::eval::{eval_with_stats, EvalConfig};
use hfl::games::{check_via_games_report, export_game, ExportFormat, GameConfig, DEFAULT_EDGE_LIMIT, DEFAULT_UNFOLD_BUDGET};
use hfl::lts::{gen_chain, gen_counter_lts, gen_counter_lts_labeled, gen_word_lts};
use hfl::surface::{parse_formula, print_formula};
use hfl::syntax::measures;
use hfl::typesys::{
    game_size_bound, height_bound, infer_closed, lattice_size_bound, DEFAULT_DIGIT_BUDGET,
};
use hfl::{Formula, HflType, Lts};

use report::{BoundCheck, CheckReport, CliError, Stats, TypecheckReport};

#[derive(Parser)]
#[command(name = "hfl", version, about = "Model checking for higher-order fixpoint logic over finite transition systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a state satisfies a closed formula of type Pr.
    Check(CheckArgs),
    /// Print the type, order, arity and size measures of a closed formula.
    Typecheck(TypecheckArgs),
    /// Build and solve the model-checking game and dump it.
    Game(GameArgs),
    /// Write a generated transition system or formula.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Output file; stdout if absent.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run or compile alternating Turing machines.
    Atm {
        #[command(subcommand)]
        command: AtmCommand,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    /// Tabulate every function value.
    Naive,
    /// Evaluate functions only on the arguments that are needed.
    Demand,
    /// Eliminate fixpoints and solve the reachability game.
    ElimGame,
}

impl EngineArg {
    fn name(self) -> &'static str {
        match self {
            EngineArg::Naive => "naive",
            EngineArg::Demand => "demand",
            EngineArg::ElimGame => "elim-game",
        }
    }
}

#[derive(Args)]
struct Limits {
    /// Largest lattice that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_ELEMENT_LIMIT)]
    limit: u64,
    /// Largest number of game edges.
    #[arg(long, default_value_t = DEFAULT_EDGE_LIMIT)]
    edge_limit: u64,
    /// Largest number of unfoldings of a single fixpoint.
    #[arg(long, default_value_t = DEFAULT_UNFOLD_BUDGET)]
    unfold_budget: u64,
}

impl Limits {
    fn eval_config(&self, engine: EngineArg) -> EvalConfig {
        let base = if engine == EngineArg::Naive { EvalConfig::tabulate() } else { EvalConfig::demand() };
        EvalConfig { element_limit: self.limit, ..base }
    }

    fn game_config(&self, monolithic: bool) -> GameConfig {
        GameConfig { element_limit: self.limit, edge_limit: self.edge_limit, unfold_budget: self.unfold_budget, monolithic }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    lts: PathBuf,
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    state: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Demand)]
    engine: EngineArg,
    #[command(flatten)]
    limits: Limits,
    /// Emit a JSON report instead of the verdict line.
    #[arg(long)]
    json: bool,
    /// Omit wall-clock times so that reports are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct TypecheckArgs {
    #[arg(long)]
    formula: PathBuf,
    /// Also print the size bounds for systems with this many states.
    #[arg(long)]
    states: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    lts: PathBuf,
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    state: usize,
    #[arg(long, default_value = "dot")]
    dump: String,
    /// Let the universal player challenge an argument in a single move.
    #[arg(long)]
    monolithic: bool,
    #[command(flatten)]
    limits: Limits,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Counter system with `p` states and `lower`/`test` edges.
    LtsCounter {
        #[arg(long)]
        p: usize,
    },
    /// Counter system whose states carry the word `w` in the proposition `q`.
    LtsCounterLabeled {
        #[arg(long)]
        p: usize,
        /// Word over {0,1}, e.g. `101`.
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Path `0 -a-> 1 -a-> ... -a-> n-1`.
    Chain {
        #[arg(long)]
        n: usize,
    },
    /// Linear model spelling a word of actions.
    Word {
        /// Comma-separated actions, e.g. `in,out,out`.
        #[arg(long, default_value = "")]
        actions: String,
    },
    /// Counter formula `op^k` over `p` states.
    Counter {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        p: usize,
    },
    /// Representation `χ_i^k` of the number `i`.
    Chi {
        #[arg(long)]
        i: u64,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        p: usize,
    },
    /// Example formula: buffer, buffer-safe, bisim-word or phi-m:N.
    Showcase {
        #[arg(long)]
        name: String,
        /// Comma-separated actions for the modalities ⟨-⟩ and [-].
        #[arg(long, default_value = "a,b")]
        actions: String,
    },
}

#[derive(Subcommand)]
enum AtmCommand {
    /// Simulate a machine and print `accept` or `reject`.
    Run {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
        /// Number of tape cells; defaults to 2^p.
        #[arg(long)]
        space: Option<usize>,
        #[arg(long, default_value_t = 2)]
        p: usize,
    },
    /// Write the machine formula and the matching transition system.
    Compile {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        /// Read the word from state labels instead of hard-coding it into the formula.
        #[arg(long)]
        word_independent: bool,
        #[arg(long)]
        formula_out: Option<PathBuf>,
        #[arg(long)]
        lts_out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::new("io", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn load_lts(path: &Path) -> Result<Lts, CliError> {
    Lts::load(&read(path)?).map_err(|e| CliError::new("lts", e.to_string()))
}

fn load_formula(path: &Path) -> Result<Formula, CliError> {
    parse_formula(&read(path)?).map_err(|e| CliError::new("parse", e.to_string()))
}

fn parse_word(w: &str) -> Result<Vec<bool>, CliError> {
    w.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '1' | 't' => Ok(true),
            '0' | 'f' => Ok(false),
            _ => Err(CliError::new("usage", format!("word `{w}` must consist of 0 and 1"))),
        })
        .collect()
}

fn actions(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|a| !a.is_empty()).map(String::from).collect()
}

fn check(args: &CheckArgs) -> Result<CheckReport, (CliError, Option<String>)> {
    let lts = load_lts(&args.lts).map_err(|e| (e, None))?;
    let phi = load_formula(&args.formula).map_err(|e| (e, None))?;
    let id = report::formula_id(&phi);
    let with_id = |e: CliError| (e, Some(id.clone()));
    let typing = infer_closed(&phi).map_err(|e| with_id(CliError::new("type", e.to_string())))?;
    if typing.ty != HflType::Pr {
        return Err(with_id(CliError::new("type", format!("formula has type {}, expected Pr", typing.ty))));
    }
    let n = lts.state_count();
    if args.state >= n {
        return Err(with_id(CliError::new("state", format!("state {} out of range for {n} states", args.state))));
    }
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut bounds = Vec::new();
    let verdict = match args.engine {
        EngineArg::Naive | EngineArg::Demand => {
            let cfg = args.limits.eval_config(args.engine);
            let (d, s) = eval_with_stats(&lts, &Default::default(), &phi, &cfg).map_err(|e| with_id(report::eval_error(e)))?;
            stats.fixpoint_iterations = Some(s.fixpoint_iterations);
            d.contains(args.state)
        }
        EngineArg::ElimGame => {
            let cfg = args.limits.game_config(false);
            let r = check_via_games_report(&lts, args.state, &phi, &cfg).map_err(|e| with_id(report::game_error(e)))?;
            stats.game_nodes = Some(r.game.node_count());
            stats.game_edges = Some(r.game.edge_count());
            bounds.push(BoundCheck::new("game_nodes", r.bound.as_ref(), r.game.node_count()));
            bounds.push(BoundCheck::new("game_edges", r.bound.as_ref(), r.game.edge_count()));
            r.holds
        }
    };
    if !args.no_timing {
        stats.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(CheckReport::verdict(id, args.state, args.engine.name(), verdict, stats, bounds))
}

fn run_check(args: CheckArgs) -> ExitCode {
    let result = check(&args);
    if args.json {
        let (report, code) = match result {
            Ok(r) => {
                let code = if r.verdict == Some(true) { 0 } else { 1 };
                (r, code)
            }
            Err((e, id)) => (CheckReport::error(id, args.state, args.engine.name(), e), 2),
        };
        println!("{}", report.to_json());
        return ExitCode::from(code);
    }
    match result {
        Ok(r) if r.verdict == Some(true) => {
            println!("{} ∈ ⟦φ⟧", args.state);
            ExitCode::from(0)
        }
        Ok(_) => {
            println!("{} ∉ ⟦φ⟧", args.state);
            ExitCode::from(1)
        }
        Err((e, _)) => e.report(),
    }
}

fn typecheck(args: &TypecheckArgs) -> Result<String, CliError> {
    let phi = load_formula(&args.formula)?;
    let typing = infer_closed(&phi).map_err(|e| CliError::new("type", e.to_string()))?;
    let ms = measures(&phi);
    let mut rep = TypecheckReport::new(&typing, ms, phi.is_fixpoint_free());
    if let Some(n) = args.states {
        rep.states = Some(n);
        rep.lattice_size_bound = Some(report::bound_text(lattice_size_bound(&typing.ty, n, DEFAULT_DIGIT_BUDGET)));
        rep.height_bound = Some(report::bound_text(height_bound(&typing.ty, n, DEFAULT_DIGIT_BUDGET)));
        if phi.is_fixpoint_free() {
            let b = game_size_bound(n, ms.size, typing.ord, typing.mar, ms.lam_vars, DEFAULT_DIGIT_BUDGET);
            rep.game_size_bound = Some(report::bound_text(b));
        }
    }
    Ok(if args.json { rep.to_json() + "\n" } else { rep.to_text() })
}

fn game(args: &GameArgs) -> Result<(), CliError> {
    let format: ExportFormat = args.dump.parse().map_err(|e: String| CliError::new("usage", e))?;
    let lts = load_lts(&args.lts)?;
    let phi = load_formula(&args.formula)?;
    let r = check_via_games_report(&lts, args.state, &phi, &args.limits.game_config(args.monolithic))
        .map_err(report::game_error)?;
    let text = export_game(&r.game, format).map_err(report::game_error)?;
    write_or_print(args.out.as_deref(), &with_newline(text))
}

fn encoding_error(e: impl std::fmt::Display) -> CliError {
    CliError::new("encoding", e.to_string())
}

fn gen(family: &GenFamily) -> Result<String, CliError> {
    let lts_text = |lts: Lts| Ok(lts.save());
    let formula_text = |f: Formula| Ok(print_formula(&f) + "\n");
    match family {
        GenFamily::LtsCounter { p } => {
            if *p == 0 {
                return Err(CliError::new("usage", "p must be positive"));
            }
            lts_text(gen_counter_lts(*p))
        }
        GenFamily::LtsCounterLabeled { p, word } => {
            if *p == 0 {
                return Err(CliError::new("usage", "p must be positive"));
            }
            lts_text(gen_counter_lts_labeled(*p, &parse_word(word)?).map_err(|e| CliError::new("lts", e.to_string()))?)
        }
        GenFamily::Chain { n } => {
            if *n == 0 {
                return Err(CliError::new("usage", "n must be positive"));
            }
            lts_text(gen_chain(*n))
        }
        GenFamily::Word { actions: list } => lts_text(gen_word_lts(&actions(list))),
        GenFamily::Counter { op, k, p } => {
            let op: CounterOp = op.parse().map_err(encoding_error)?;
            formula_text(encodings::counter_formula(op, *k, *p).map_err(encoding_error)?)
        }
        GenFamily::Chi { i, k, p } => formula_text(encodings::chi_formula(*i, *k, *p).map_err(encoding_error)?),
        GenFamily::Showcase { name, actions: list } => {
            let which: Showcase = name.parse().map_err(encoding_error)?;
            formula_text(encodings::showcase_formula(which, &actions(list)).map_err(encoding_error)?)
        }
    }
}

fn atm(command: &AtmCommand) -> Result<ExitCode, CliError> {
    let load = |path: &Path| Atm::parse(&read(path)?).map_err(|e| CliError::new("atm", e.to_string()));
    match command {
        AtmCommand::Run { machine, word, space, p } => {
            let m = load(machine)?;
            let w = parse_word(word)?;
            let space = space.unwrap_or_else(|| 1usize.checked_shl(*p as u32).unwrap_or(usize::MAX));
            let accepted = encodings::atm_accepts(&m, &w, space).map_err(|e| CliError::new("atm", e.to_string()))?;
            println!("{}", if accepted { "accept" } else { "reject" });
            Ok(ExitCode::from(if accepted { 0 } else { 1 }))
        }
        AtmCommand::Compile { machine, word, k, p, word_independent, formula_out, lts_out } => {
            let m = load(machine)?;
            let w = parse_word(word)?;
            let atm_error = |e: encodings::AtmError| CliError::new("atm", e.to_string());
            let (phi, lts) = if *word_independent {
                let lts = gen_counter_lts_labeled(*p, &w).map_err(|e| CliError::new("lts", e.to_string()))?;
                (encodings::machine_formula(&m, *k, *p, None).map_err(atm_error)?, lts)
            } else {
                if *p == 0 {
                    return Err(CliError::new("usage", "p must be positive"));
                }
                (encodings::machine_formula(&m, *k, *p, Some(&w)).map_err(atm_error)?, gen_counter_lts(*p))
            };
            write_or_print(formula_out.as_deref(), &(print_formula(&phi) + "\n"))?;
            write_or_print(lts_out.as_deref(), &lts.save())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => return run_check(args),
        Command::Typecheck(args) => typecheck(&args).map(|text| {
            print!("{text}");
            ExitCode::SUCCESS
        }),
        Command::Game(args) => game(&args).map(|()| ExitCode::SUCCESS),
        Command::Gen { family, out } => {
            gen(&family).and_then(|text| write_or_print(out.as_deref(), &text)).map(|()| ExitCode::SUCCESS)
        }
        Command::Atm { command } => atm(&command),
    };
    outcome.unwrap_or_else(CliError::report)
}
