use std::collections::HashMap;

use thiserror::Error;

use crate::denote::{bit_width, DenoteError};
use crate::lts::Lts;
use crate::syntax::{ff, substitute, Formula, Kind};
use crate::typesys::HflType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElimError {
    #[error("fixpoint of type {ty} needs {required} unfoldings, over the budget of {budget}")]
    UnfoldingBudget { ty: String, required: String, budget: u64 },
    #[error("not a least fixpoint formula")]
    NotAFixpoint,
    #[error("vector fixpoints must be desugared before elimination")]
    VectorFixpoint,
}

/// `λZ1...λZm.ff` at type `τ1 -> ... -> τm -> Pr`, keeping the variances of `ty`.
pub fn bottom_of(ty: &HflType) -> Formula {
    let args = ty.args();
    args.iter()
        .enumerate()
        .rev()
        .fold(ff(), |acc, (i, (t, v))| Formula::lam(&format!("Z{}", i + 1), *v, (*t).clone(), acc))
}

/// `μ^α X.φ`: the bottom function unfolded `α` times.
pub fn approximant(mu: &Formula, alpha: u64) -> Result<Formula, ElimError> {
    let Kind::Mu { var, ty, body } = mu.kind() else { return Err(ElimError::NotAFixpoint) };
    let mut cur = bottom_of(ty);
    for _ in 0..alpha {
        cur = substitute(body, var, &cur);
    }
    Ok(cur)
}

/// Replaces every fixpoint, innermost first, by its approximant at the height of its type over `lts`.
pub fn eliminate_fixpoints(phi: &Formula, lts: &Lts, budget: u64) -> Result<Formula, ElimError> {
    let mut memo = HashMap::new();
    elim(phi, lts.state_count(), budget, &mut memo)
}

fn elim(phi: &Formula, n: usize, budget: u64, memo: &mut HashMap<u64, Formula>) -> Result<Formula, ElimError> {
    if phi.is_fixpoint_free() {
        return Ok(phi.clone());
    }
    if let Some(f) = memo.get(&phi.id()) {
        return Ok(f.clone());
    }
    let out = match phi.kind() {
        Kind::Prop(_) | Kind::Var(_) => phi.clone(),
        Kind::Neg(f) => Formula::neg(elim(f, n, budget, memo)?),
        Kind::Or(a, b) => Formula::or(elim(a, n, budget, memo)?, elim(b, n, budget, memo)?),
        Kind::Dia(act, f) => Formula::dia(act, elim(f, n, budget, memo)?),
        Kind::App(f, a) => Formula::app(elim(f, n, budget, memo)?, elim(a, n, budget, memo)?),
        Kind::Lam { var, variance, ty, body } => {
            Formula::lam_named(var.clone(), *variance, ty.clone(), elim(body, n, budget, memo)?)
        }
        Kind::Mu { var, ty, body } => {
            let body = elim(body, n, budget, memo)?;
            let too_many = |required: String| ElimError::UnfoldingBudget { ty: ty.to_string(), required, budget };
            let h = match bit_width(ty, n) {
                Ok(w) => w as u64 + 1,
                Err(DenoteError::TooLarge { cardinality, .. }) => {
                    return Err(too_many(format!("log2({cardinality}) + 1")))
                }
                Err(e) => return Err(too_many(e.to_string())),
            };
            if h > budget {
                return Err(too_many(h.to_string()));
            }
            approximant(&Formula::mu_named(var.clone(), ty.clone(), body), h)?
        }
        Kind::MuVec { .. } => return Err(ElimError::VectorFixpoint),
    };
    memo.insert(phi.id(), out.clone());
    Ok(out)
}
