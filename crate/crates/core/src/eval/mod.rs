//! Denotational evaluation over a finite transition system.
//!
//! Two engines are available. [`Engine::Tabulate`] turns every λ-abstraction
//! into a complete table and computes every fixpoint by global iteration.
//! [`Engine::Demand`] keeps abstractions as closures and solves function-typed
//! fixpoints locally, only at the argument tuples that are actually queried.
//!
//! A fixpoint `μ(X:τ).φ` denotes `f^h(⊥)` where `f` is the transformer of `φ`
//! and `h` is the height of the full lattice of `τ`. Iteration stops as soon as
//! two iterates agree, so for monotone transformers this is the least fixpoint.

mod approx;
mod engine;

use serde::Serialize;
use thiserror::Error;

use crate::denote::{bit_width, Bitset, Denotation, DenoteError, Environment, DEFAULT_ELEMENT_LIMIT};
use crate::lts::Lts;
use crate::syntax::Formula;
use crate::typesys::{infer, Context, HflType, TypeError, Variance};

pub use approx::{approximant, bottom_of, eliminate_fixpoints, ElimError};
use engine::{Env, Evaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Tabulate,
    Demand,
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub engine: Engine,
    /// Largest argument domain that may be enumerated.
    pub element_limit: u64,
    /// Largest number of iterations of a single fixpoint, if any.
    pub iteration_cap: Option<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { engine: Engine::Demand, element_limit: DEFAULT_ELEMENT_LIMIT, iteration_cap: None }
    }
}

impl EvalConfig {
    pub fn tabulate() -> EvalConfig {
        EvalConfig { engine: Engine::Tabulate, ..EvalConfig::default() }
    }

    pub fn demand() -> EvalConfig {
        EvalConfig::default()
    }
}

/// Counters collected during one evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    /// Transformer applications, including local right-hand side evaluations.
    pub fixpoint_iterations: u64,
    pub memo_hits: u64,
    /// Argument tuples introduced into local fixpoint solvers.
    pub solver_entries: u64,
    /// Iterations that did not increase, i.e. non-monotone transformers.
    pub non_monotone_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Limit(#[from] DenoteError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("environment binds {name} to a value of width {found}, expected {expected}")]
    EnvironmentMismatch { name: String, expected: usize, found: usize },
    #[error("fixpoint iteration exceeded the cap of {cap}")]
    IterationCap { cap: u64 },
    #[error("internal evaluation error: {0}")]
    Internal(String),
}

/// Evaluates `φ` under `η` and returns its denotation.
pub fn eval(lts: &Lts, env: &Environment, phi: &Formula, cfg: &EvalConfig) -> Result<Denotation, EvalError> {
    eval_with_stats(lts, env, phi, cfg).map(|(d, _)| d)
}

pub fn eval_with_stats(
    lts: &Lts,
    env: &Environment,
    phi: &Formula,
    cfg: &EvalConfig,
) -> Result<(Denotation, EvalStats), EvalError> {
    let n = lts.state_count();
    let mut ctx = Context::new();
    let mut values = Env::default();
    for (name, ty, d) in env.entries() {
        let expected = bit_width(ty, n)?;
        if d.len() != expected {
            return Err(EvalError::EnvironmentMismatch { name: name.to_string(), expected, found: d.len() });
        }
        ctx = ctx.with(name, Variance::Zero, ty.clone());
        values = values.bind(name.clone(), engine::value_of(ty, d.clone()));
    }
    let typing = infer(&ctx, phi)?;
    let mut ev = Evaluator::new(lts, cfg);
    let v = ev.eval(phi, &values)?;
    let d = ev.reify(&v, &typing.ty)?;
    Ok((d, ev.stats))
}

/// Evaluates a closed formula.
pub fn eval_closed(lts: &Lts, phi: &Formula, cfg: &EvalConfig) -> Result<Denotation, EvalError> {
    eval(lts, &Environment::new(), phi, cfg)
}

/// `s ∈ ⟦φ⟧` for a closed formula of type `Pr`.
pub fn holds(lts: &Lts, state: usize, phi: &Formula, cfg: &EvalConfig) -> Result<bool, EvalError> {
    let d = eval_closed(lts, phi, cfg)?;
    if d.len() != lts.state_count() {
        return Err(EvalError::Internal("formula is not of type Pr".into()));
    }
    Ok(d.contains(state))
}

/// Outcome of a global fixpoint iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iteration {
    pub value: Denotation,
    pub iterations: u64,
    /// Every iterate was above its predecessor.
    pub increasing: bool,
    /// Two consecutive iterates agreed before the height was exhausted.
    pub converged: bool,
}

/// Iterates `f` from the bottom of a lattice with `width` atoms, at most `width + 1` times.
pub fn lfp_global<F>(width: usize, cap: Option<u64>, mut f: F) -> Result<Iteration, EvalError>
where
    F: FnMut(&Denotation) -> Result<Denotation, EvalError>,
{
    let height = width as u64 + 1;
    let mut x = Bitset::empty(width);
    let mut out = Iteration { value: Bitset::empty(width), iterations: 0, increasing: true, converged: false };
    for i in 1..=height {
        if let Some(c) = cap {
            if i > c {
                return Err(EvalError::IterationCap { cap: c });
            }
        }
        let next = f(&x)?;
        out.iterations = i;
        if next == x {
            out.converged = true;
            break;
        }
        if !x.is_subset(&next) {
            out.increasing = false;
        }
        x = next;
    }
    out.value = x;
    Ok(out)
}

/// Default number of iterations allowed for a fixpoint of type `ty`.
pub fn default_iteration_cap(ty: &HflType, n: usize) -> Result<u64, EvalError> {
    Ok(bit_width(ty, n)? as u64 + 3)
}
