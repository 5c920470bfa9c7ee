//! Formula families over the counter systems of `gen_counter_lts`: binary
//! counters at every level of the type hierarchy `τ_k`, tapes and heads,
//! alternating Turing machines, and three small showcase properties.
//!
//! Every λ-binder in the counter, tape and machine families has variance 0.

mod atm;
mod showcase;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{and, and_all, box_, ff, iff, implies, or_all, tt, Formula};
use crate::typesys::{HflType, Variance};

pub use atm::{atm_accepts, machine_formula, tape_built, Atm, AtmConfig, AtmError, Move, StateKind, Transition};
pub use showcase::{buffer, buffer_violation_free, bisim_word, phi_m, showcase_formula, Showcase};

/// Proposition that carries the input word on labeled counter systems.
pub const WORD_PROP: &str = "q";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("index {index} out of range, must be below {bound}")]
    IndexOutOfRange { index: u64, bound: String },
    #[error("word of length {len} needs more than {p} states")]
    WordTooLong { len: usize, p: usize },
    #[error("the literal case form needs at least one guard")]
    EmptyCase,
    #[error("unknown counter operation `{0}`")]
    UnknownOperation(String),
    #[error("counter systems need at least one state")]
    NoStates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CounterOp {
    Inc,
    Dec,
    Eq,
    Lt,
    Gt,
    Exists,
    Forall,
    Min,
    Max,
}

impl CounterOp {
    pub const ALL: [CounterOp; 9] = [
        CounterOp::Inc,
        CounterOp::Dec,
        CounterOp::Eq,
        CounterOp::Lt,
        CounterOp::Gt,
        CounterOp::Exists,
        CounterOp::Forall,
        CounterOp::Min,
        CounterOp::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CounterOp::Inc => "inc",
            CounterOp::Dec => "dec",
            CounterOp::Eq => "eq",
            CounterOp::Lt => "lt",
            CounterOp::Gt => "gt",
            CounterOp::Exists => "exists",
            CounterOp::Forall => "forall",
            CounterOp::Min => "min",
            CounterOp::Max => "max",
        }
    }
}

impl fmt::Display for CounterOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CounterOp {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CounterOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| EncodingError::UnknownOperation(s.to_string()))
    }
}

fn var(x: &str) -> Formula {
    Formula::var(x)
}

fn app(f: Formula, args: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::apps(f, args)
}

fn lam(x: &str, ty: HflType, body: Formula) -> Formula {
    Formula::lam(x, Variance::Zero, ty, body)
}

fn tau(k: usize) -> HflType {
    HflType::tau(k)
}

/// `τ_k -> τ_k`.
fn endo(k: usize) -> HflType {
    HflType::arrow(tau(k), Variance::Zero, tau(k))
}

/// `τ_k -> τ_k -> Pr`.
fn relation(k: usize) -> HflType {
    HflType::curried(&[(tau(k), Variance::Zero), (tau(k), Variance::Zero)], HflType::Pr)
}

/// `if β then ψ1 else ψ2 := (β ∧ ψ1) ∨ (¬β ∧ ψ2)`.
pub fn macro_if(beta: Formula, then: Formula, otherwise: Formula) -> Formula {
    Formula::or(and(beta.clone(), then), and(Formula::neg(beta), otherwise))
}

/// `bit_0 = [lower]ff`, `bit_{i+1} = ⟨lower⟩bit_i ∧ [lower](⋁_{j≤i} bit_j)`; holds exactly at state `i`.
pub fn bit_formula(i: usize) -> Formula {
    bits_upto(i).pop().expect("nonempty")
}

fn bits_upto(i: usize) -> Vec<Formula> {
    let mut bits = vec![box_("lower", ff())];
    while bits.len() <= i {
        let last = bits.last().expect("nonempty").clone();
        let below = or_all(bits.iter().cloned());
        bits.push(and(Formula::dia("lower", last), box_("lower", below)));
    }
    bits
}

/// Generator for the counter formulas over a counter system with `p` states.
///
/// Formulas are cached per level, so shared helpers are built once.
pub struct Counters {
    p: usize,
    bits: Vec<Formula>,
    cache: HashMap<(CounterOp, usize), Formula>,
}

impl Counters {
    pub fn new(p: usize) -> Result<Counters, EncodingError> {
        if p == 0 {
            return Err(EncodingError::NoStates);
        }
        Ok(Counters { p, bits: bits_upto(p), cache: HashMap::new() })
    }

    pub fn states(&self) -> usize {
        self.p
    }

    /// `bit_i` for `i ≤ p`; `bit_p` holds nowhere.
    pub fn bit(&self, i: usize) -> Formula {
        self.bits[i].clone()
    }

    pub fn get(&mut self, op: CounterOp, k: usize) -> Formula {
        if let Some(f) = self.cache.get(&(op, k)) {
            return f.clone();
        }
        let f = self.construct(op, k);
        self.cache.insert((op, k), f.clone());
        f
    }

    pub fn inc(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Inc, k)
    }

    pub fn dec(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Dec, k)
    }

    pub fn eq(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Eq, k)
    }

    pub fn lt(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Lt, k)
    }

    pub fn gt(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Gt, k)
    }

    pub fn exists(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Exists, k)
    }

    pub fn forall(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Forall, k)
    }

    pub fn min(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Min, k)
    }

    pub fn max(&mut self, k: usize) -> Formula {
        self.get(CounterOp::Max, k)
    }

    fn construct(&mut self, op: CounterOp, k: usize) -> Formula {
        let pr = HflType::Pr;
        match (op, k) {
            (CounterOp::Min, 0) => ff(),
            (CounterOp::Max, 0) => tt(),
            (CounterOp::Min | CounterOp::Max, _) => lam("X", tau(k - 1), self.get(op, 0)),
            (CounterOp::Inc, 0) => lam("X", pr, iff(var("X"), Formula::dia("lower", Formula::neg(var("X"))))),
            (CounterOp::Dec, 0) => lam("X", pr, iff(var("X"), Formula::dia("lower", var("X")))),
            (CounterOp::Eq, 0) => {
                lam("I", pr.clone(), lam("J", pr, box_("test", iff(var("I"), var("J")))))
            }
            (CounterOp::Lt, 0) => {
                let (i, j) = (var("I"), var("J"));
                let disjuncts = (0..self.p).map(|b| {
                    let here = implies(self.bit(b), and(Formula::neg(i.clone()), j.clone()));
                    let above = and_all((b + 1..self.p).map(|h| implies(self.bit(h), iff(i.clone(), j.clone()))));
                    box_("test", and(here, above))
                });
                lam("I", pr.clone(), lam("J", pr, or_all(disjuncts)))
            }
            (CounterOp::Gt, _) => {
                let lt = self.lt(k);
                lam("I", tau(k), lam("J", tau(k), app(lt, [var("J"), var("I")])))
            }
            (CounterOp::Exists, _) => {
                let pred = HflType::arrow(tau(k), Variance::Zero, HflType::Pr);
                let step = Formula::or(
                    app(var("P"), [var("X")]),
                    app(var("Z"), [app(self.inc(k), [var("X")])]),
                );
                let search = Formula::mu("Z", pred.clone(), lam("X", tau(k), step));
                lam("P", pred, app(search, [self.min(k)]))
            }
            (CounterOp::Forall, _) => {
                let pred = HflType::arrow(tau(k), Variance::Zero, HflType::Pr);
                let body = Formula::neg(app(self.exists(k), [Formula::neg(var("P"))]));
                lam("P", pred, body)
            }
            (CounterOp::Eq, _) => {
                let (i, j) = (var("I"), var("J"));
                let cell = lam(
                    "X",
                    tau(k - 1),
                    app(self.eq(0), [app(i, [var("X")]), app(j, [var("X")])]),
                );
                lam("I", tau(k), lam("J", tau(k), app(self.forall(k - 1), [cell])))
            }
            (CounterOp::Lt, _) => {
                let at = |f: &str, x: &str| app(var(f), [var(x)]);
                let above = lam(
                    "Y",
                    tau(k - 1),
                    implies(
                        app(self.gt(k - 1), [var("Y"), var("X")]),
                        app(self.eq(0), [at("I", "Y"), at("J", "Y")]),
                    ),
                );
                let witness = lam(
                    "X",
                    tau(k - 1),
                    and(app(self.lt(0), [at("I", "X"), at("J", "X")]), app(self.forall(k - 1), [above])),
                );
                lam("I", tau(k), lam("J", tau(k), app(self.exists(k - 1), [witness])))
            }
            (CounterOp::Inc | CounterOp::Dec, _) => {
                let (edge, step) = if op == CounterOp::Inc {
                    (self.max(0), self.inc(0))
                } else {
                    (self.min(0), self.dec(0))
                };
                let lower = lam(
                    "Y",
                    tau(k - 1),
                    and(
                        app(self.lt(k - 1), [var("Y"), var("X")]),
                        Formula::neg(app(self.eq(0), [app(var("I"), [var("Y")]), edge])),
                    ),
                );
                let body = macro_if(
                    app(self.exists(k - 1), [lower]),
                    app(var("I"), [var("X")]),
                    app(step, [app(var("I"), [var("X")])]),
                );
                lam("I", tau(k), lam("X", tau(k - 1), body))
            }
        }
    }

    /// `χ_i^k` with `⟦χ_i^k⟧ = ⟨i⟩_k`.
    ///
    /// At level 0 this is the conjunction of `¬bit_j` over the unset bits `j` of `i`.
    pub fn chi(&mut self, i: u64, k: usize) -> Result<Formula, EncodingError> {
        let bound = if self.p >= 64 { u64::MAX } else { 1u64 << self.p };
        if i >= bound {
            return Err(EncodingError::IndexOutOfRange { index: i, bound: format!("2^{}", self.p) });
        }
        if k == 0 {
            return Ok(and_all((0..self.p).filter(|&j| (i >> j) & 1 == 0).map(|j| Formula::neg(self.bit(j)))));
        }
        let cell = self.chi(i, 0)?;
        let min = self.min(k - 1);
        let min0 = self.min(0);
        self.case(k - 1, &[(min, cell)], min0, false)
    }

    /// The disjunction over set and unset bits, taken literally.
    pub fn chi0_literal(&self, i: u64) -> Formula {
        or_all((0..self.p).map(|j| {
            if (i >> j) & 1 == 1 {
                self.bit(j)
            } else {
                Formula::neg(self.bit(j))
            }
        }))
    }

    /// `case^k j1: ψ1, ..., jm: ψm else ψ`, a function of type `τ_{k+1}`.
    ///
    /// The default form is a chain of `if`s over `eq^k I j_h`. With `literal`
    /// the single disjunction `(⋁ (eq I j_h) ∧ ψ_h) ∨ (ψ ∧ ⋀ (¬(eq I j_h) ∨ ¬ψ_h))` is produced instead.
    pub fn case(
        &mut self,
        k: usize,
        pairs: &[(Formula, Formula)],
        default: Formula,
        literal: bool,
    ) -> Result<Formula, EncodingError> {
        let eq = self.eq(k);
        let guard = |j: &Formula| app(eq.clone(), [var("I"), j.clone()]);
        let body = if literal {
            if pairs.is_empty() {
                return Err(EncodingError::EmptyCase);
            }
            let hit = or_all(pairs.iter().map(|(j, psi)| and(guard(j), psi.clone())));
            let miss = and_all(pairs.iter().map(|(j, psi)| Formula::or(Formula::neg(guard(j)), Formula::neg(psi.clone()))));
            Formula::or(hit, and(default, miss))
        } else {
            pairs.iter().rev().fold(default, |acc, (j, psi)| macro_if(guard(j), psi.clone(), acc))
        };
        Ok(lam("I", tau(k), body))
    }

    /// `head_0^k := min^k`.
    pub fn head0(&mut self, k: usize) -> Formula {
        self.min(k)
    }

    /// `tape_0^k`: the word `w` on cells `0..|w|`, blank (`ff`) elsewhere.
    pub fn tape0(&mut self, k: usize, w: &[bool]) -> Result<Formula, EncodingError> {
        if w.len() >= self.p {
            return Err(EncodingError::WordTooLong { len: w.len(), p: self.p });
        }
        let mut pairs = Vec::with_capacity(w.len());
        for (i, &a) in w.iter().enumerate() {
            pairs.push((self.chi(i as u64, k)?, if a { tt() } else { ff() }));
        }
        self.case(k, &pairs, ff(), false)
    }

    /// `tape_empty^k := λX.ff`.
    pub fn tape_empty(&self, k: usize) -> Formula {
        lam("X", tau(k), ff())
    }

    /// `read_a^k`, of type `τ_{k+1} -> τ_k -> Pr`.
    pub fn read(&self, k: usize, a: bool) -> Formula {
        let cell = app(var("T"), [var("H")]);
        let body = if a { cell } else { Formula::neg(cell) };
        lam("T", tau(k + 1), lam("H", tau(k), body))
    }

    /// `write_a^k`, of type `τ_{k+1} -> τ_k -> τ_{k+1}`.
    pub fn write(&mut self, k: usize, a: bool) -> Formula {
        let sym = if a { tt() } else { ff() };
        let body = macro_if(app(self.eq(k), [var("H"), var("H2")]), sym, app(var("T"), [var("H2")]));
        lam("T", tau(k + 1), lam("H", tau(k), lam("H2", tau(k), body)))
    }

    /// `move_d^k`, of type `τ_k -> τ_k`.
    pub fn move_head(&mut self, k: usize, d: Move) -> Formula {
        match d {
            Move::Left => self.dec(k),
            Move::Stay => lam("H", tau(k), var("H")),
            Move::Right => self.inc(k),
        }
    }

    /// `build^k`, of type `τ_{k+1} -> τ_k -> Pr -> Pr -> τ_{k+1}`.
    ///
    /// Walks the states `0..p` of a labeled counter system, writing `tt` at
    /// head position `i` iff state `i` carries [`WORD_PROP`].
    pub fn build(&mut self, k: usize) -> Formula {
        let pr = HflType::Pr;
        let ty = HflType::curried(
            &[
                (tau(k + 1), Variance::Zero),
                (tau(k), Variance::Zero),
                (pr.clone(), Variance::Zero),
                (pr.clone(), Variance::Zero),
                (tau(k), Variance::Zero),
            ],
            HflType::Pr,
        );
        let (c, y) = (var("C"), var("Y"));
        let next_c = and(Formula::dia("lower", c.clone()), box_("lower", Formula::or(c.clone(), y.clone())));
        let next_y = Formula::or(c.clone(), y);
        let inc = self.inc(k);
        let mut recurse = |a: bool| {
            app(
                var("Z"),
                [
                    app(self.write(k, a), [var("T"), var("H")]),
                    app(inc.clone(), [var("H")]),
                    next_c.clone(),
                    next_y.clone(),
                    var("H2"),
                ],
            )
        };
        let (on, off) = (recurse(true), recurse(false));
        let body = macro_if(
            box_("test", iff(c.clone(), self.bit(self.p))),
            app(var("T"), [var("H2")]),
            macro_if(box_("test", implies(c, Formula::prop(WORD_PROP))), on, off),
        );
        let lams = lam(
            "T",
            tau(k + 1),
            lam("H", tau(k), lam("C", pr.clone(), lam("Y", pr, lam("H2", tau(k), body)))),
        );
        Formula::mu("Z", ty, lams)
    }
}

/// The counter formula `op^k` over `p` states.
pub fn counter_formula(op: CounterOp, k: usize, p: usize) -> Result<Formula, EncodingError> {
    Ok(Counters::new(p)?.get(op, k))
}

pub fn chi_formula(i: u64, k: usize, p: usize) -> Result<Formula, EncodingError> {
    Counters::new(p)?.chi(i, k)
}

pub fn macro_case(
    k: usize,
    p: usize,
    pairs: &[(Formula, Formula)],
    default: Formula,
    literal: bool,
) -> Result<Formula, EncodingError> {
    Counters::new(p)?.case(k, pairs, default, literal)
}

/// The type of `op^k`.
pub fn counter_type(op: CounterOp, k: usize) -> HflType {
    match op {
        CounterOp::Inc | CounterOp::Dec => endo(k),
        CounterOp::Eq | CounterOp::Lt | CounterOp::Gt => relation(k),
        CounterOp::Exists | CounterOp::Forall => HflType::arrow(tau(k + 1), Variance::Zero, HflType::Pr),
        CounterOp::Min | CounterOp::Max => tau(k),
    }
}
