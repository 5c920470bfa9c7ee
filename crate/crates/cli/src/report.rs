use std::fmt::Write as _;
use std::process::ExitCode;

use num_bigint::BigUint;
use serde::Serialize;

use hfl::eval::EvalError;
use hfl::games::GameError;
use hfl::surface::print_formula;
use hfl::syntax::Measures;
use hfl::typesys::{BoundError, Typing};
use hfl::Formula;

pub const CHECK_SCHEMA: &str = "hfl.check-report/1";
pub const TYPECHECK_SCHEMA: &str = "hfl.typecheck-report/1";

/// Numbers with more digits are abbreviated.
const MAX_DIGITS: usize = 80;

#[derive(Clone, Debug, Serialize)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> CliError {
        CliError { code, message: message.into() }
    }

    pub fn report(self) -> ExitCode {
        eprintln!("error[{}]: {}", self.code, self.message);
        ExitCode::from(2)
    }
}

pub fn eval_error(e: EvalError) -> CliError {
    let code = match e {
        EvalError::Limit(_) | EvalError::IterationCap { .. } => "budget",
        EvalError::Type(_) => "type",
        _ => "eval",
    };
    CliError::new(code, e.to_string())
}

pub fn game_error(e: GameError) -> CliError {
    let code = match e {
        GameError::TooLarge { .. } | GameError::Denote(_) | GameError::Elimination(_) => "budget",
        GameError::Type(_) | GameError::NotAProposition(_) => "type",
        GameError::StateOutOfRange { .. } => "state",
        _ => "game",
    };
    CliError::new(code, e.to_string())
}

/// FNV-1a hash of the printed formula, stable across runs and platforms.
pub fn formula_id(phi: &Formula) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in print_formula(phi).bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

pub fn big_text(b: &BigUint) -> String {
    let s = b.to_string();
    if s.len() <= MAX_DIGITS {
        s
    } else {
        format!("{}...({} digits)", &s[..12], s.len())
    }
}

pub fn bound_text(r: Result<BigUint, BoundError>) -> String {
    match r {
        Ok(b) => big_text(&b),
        Err(BoundError::BudgetExceeded { expr, .. }) => format!("{expr} (beyond the digit budget)"),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub fixpoint_iterations: Option<u64>,
    pub game_nodes: Option<usize>,
    pub game_edges: Option<usize>,
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    /// `None` when the bound does not fit the digit budget, which it then trivially exceeds.
    pub bound: Option<String>,
    pub measured: usize,
    pub holds: bool,
}

impl BoundCheck {
    pub fn new(name: &'static str, bound: Option<&BigUint>, measured: usize) -> BoundCheck {
        BoundCheck { name, bound: bound.map(big_text), measured, holds: bound.map_or(true, |b| BigUint::from(measured) <= *b) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub formula_id: Option<String>,
    pub state: usize,
    pub engine: &'static str,
    pub verdict: Option<bool>,
    pub stats: Stats,
    pub bounds: Vec<BoundCheck>,
    pub error: Option<CliError>,
}

impl CheckReport {
    pub fn verdict(
        id: String,
        state: usize,
        engine: &'static str,
        verdict: bool,
        stats: Stats,
        bounds: Vec<BoundCheck>,
    ) -> CheckReport {
        CheckReport {
            schema: CHECK_SCHEMA,
            formula_id: Some(id),
            state,
            engine,
            verdict: Some(verdict),
            stats,
            bounds,
            error: None,
        }
    }

    pub fn error(id: Option<String>, state: usize, engine: &'static str, e: CliError) -> CheckReport {
        CheckReport {
            schema: CHECK_SCHEMA,
            formula_id: id,
            state,
            engine,
            verdict: None,
            stats: Stats::default(),
            bounds: Vec::new(),
            error: Some(e),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypecheckReport {
    pub schema: &'static str,
    #[serde(rename = "type")]
    pub ty: String,
    pub ord: u32,
    pub mar: u32,
    pub size: u64,
    pub lambda_vars: u64,
    pub fixpoint_free: bool,
    pub states: Option<u64>,
    pub lattice_size_bound: Option<String>,
    pub height_bound: Option<String>,
    pub game_size_bound: Option<String>,
}

impl TypecheckReport {
    pub fn new(typing: &Typing, ms: Measures, fixpoint_free: bool) -> TypecheckReport {
        TypecheckReport {
            schema: TYPECHECK_SCHEMA,
            ty: typing.ty.to_string(),
            ord: typing.ord,
            mar: typing.mar,
            size: ms.size,
            lambda_vars: ms.lam_vars,
            fixpoint_free,
            states: None,
            lattice_size_bound: None,
            height_bound: None,
            game_size_bound: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}, ord={}, mar={}\n|φ|={}, v(φ)={}\n", self.ty, self.ord, self.mar, self.size, self.lambda_vars);
        if let Some(n) = self.states {
            for (name, b) in [
                ("lattice size bound", &self.lattice_size_bound),
                ("height bound", &self.height_bound),
                ("game size bound", &self.game_size_bound),
            ] {
                if let Some(b) = b {
                    let _ = writeln!(out, "{name} (n={n}): {b}");
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
