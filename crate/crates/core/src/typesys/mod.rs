//! Types with variances, the typing judgment, and quantitative bounds.

mod bounds;
mod infer;

use std::fmt;
use std::sync::Arc;

pub use bounds::{
    f_k, game_size_bound, height_bound, lattice_size_bound, leq_tower, tower, type_count_bound,
    within_lattice_size_bound, BoundError,
    DEFAULT_DIGIT_BUDGET,
};
pub use infer::{fragment, infer, infer_closed, Context, TypeError, Typing};

/// Variance annotation of a function argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    Plus,
    Minus,
    Zero,
}

impl Variance {
    pub fn complement(self) -> Variance {
        match self {
            Variance::Plus => Variance::Minus,
            Variance::Minus => Variance::Plus,
            Variance::Zero => Variance::Zero,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Variance::Plus => "^+",
            Variance::Minus => "^-",
            Variance::Zero => "^0",
        }
    }
}

/// An HFL type: `Pr` or `σ^v -> τ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HflType {
    Pr,
    Arrow(Arc<HflType>, Variance, Arc<HflType>),
}

impl HflType {
    pub fn arrow(arg: HflType, variance: Variance, result: HflType) -> HflType {
        HflType::Arrow(Arc::new(arg), variance, Arc::new(result))
    }

    /// Builds `τ1^v1 -> ... -> τm^vm -> result`.
    pub fn curried(args: &[(HflType, Variance)], result: HflType) -> HflType {
        args.iter()
            .rev()
            .fold(result, |acc, (t, v)| HflType::arrow(t.clone(), *v, acc))
    }

    /// The chain types `τ_0 = Pr`, `τ_{k+1} = τ_k^0 -> Pr`.
    pub fn tau(k: usize) -> HflType {
        (0..k).fold(HflType::Pr, |t, _| HflType::arrow(t, Variance::Zero, HflType::Pr))
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, HflType::Pr)
    }

    /// Argument types `τ1 ... τm` with their variances.
    pub fn args(&self) -> Vec<(&HflType, Variance)> {
        let mut out = Vec::new();
        let mut t = self;
        while let HflType::Arrow(a, v, r) = t {
            out.push((a.as_ref(), *v));
            t = r;
        }
        out
    }

    pub fn arity(&self) -> usize {
        let mut n = 0;
        let mut t = self;
        while let HflType::Arrow(_, _, r) = t {
            n += 1;
            t = r;
        }
        n
    }

    pub fn split(&self) -> Option<(&HflType, Variance, &HflType)> {
        match self {
            HflType::Pr => None,
            HflType::Arrow(a, v, r) => Some((a, *v, r)),
        }
    }

    pub fn ord(&self) -> u32 {
        self.args()
            .iter()
            .map(|(a, _)| a.ord() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn mar(&self) -> u32 {
        let args = self.args();
        let own = args.len() as u32;
        args.iter().map(|(a, _)| a.mar()).fold(own, u32::max)
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            HflType::Pr => f.write_str("Pr"),
            HflType::Arrow(a, v, r) => {
                if nested {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, true)?;
                if *v != Variance::Plus {
                    f.write_str(v.suffix())?;
                }
                f.write_str(" -> ")?;
                r.fmt_prec(f, false)?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for HflType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}
