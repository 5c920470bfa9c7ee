//! Alternating Turing machines over the tape alphabet `{tt, ff}`, their
//! simulator, and their compilation into a vector fixpoint formula.
//!
//! Text format, `#` starts a comment:
//!
//! ```text
//! states q0 q1 qa qr ; exists q0 ; forall q1 ; accept qa ; reject qr ; start q0
//! delta q0 tt -> q1 ff R
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{tau, Counters, EncodingError};
use crate::syntax::{and, and_all, ff, or_all, tt, Binding, Formula};
use crate::typesys::{HflType, Variance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Exists,
    Forall,
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    fn letter(self) -> &'static str {
        match self {
            Move::Left => "L",
            Move::Stay => "N",
            Move::Right => "R",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub read: bool,
    pub to: usize,
    pub write: bool,
    pub mv: Move,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atm {
    names: Vec<String>,
    kinds: Vec<StateKind>,
    start: usize,
    delta: Vec<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtmConfig {
    pub state: usize,
    pub head: usize,
    pub tape: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("state `{0}` has no kind")]
    Unclassified(String),
    #[error("state `{0}` is given more than one kind")]
    Reclassified(String),
    #[error("missing `{0}` clause")]
    MissingClause(&'static str),
    #[error("halting state `{0}` has outgoing transitions")]
    HaltingTransition(String),
    #[error("head moved to {head}, outside the space bound {bound}")]
    SpaceBound { head: i64, bound: usize },
    #[error("word of length {len} exceeds the space bound {bound}")]
    WordTooLong { len: usize, bound: usize },
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

fn symbol(a: bool) -> &'static str {
    if a {
        "tt"
    } else {
        "ff"
    }
}

impl Atm {
    pub fn new(names: Vec<String>, kinds: Vec<StateKind>, start: usize, delta: Vec<Transition>) -> Result<Atm, AtmError> {
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(AtmError::DuplicateState(n.clone()));
            }
        }
        if kinds.len() != names.len() || start >= names.len() {
            return Err(AtmError::MissingClause("start"));
        }
        for t in &delta {
            if t.from >= names.len() || t.to >= names.len() {
                return Err(AtmError::UnknownState(format!("#{}", t.from.max(t.to))));
            }
            if matches!(kinds[t.from], StateKind::Accept | StateKind::Reject) {
                return Err(AtmError::HaltingTransition(names[t.from].clone()));
            }
        }
        let mut delta = delta;
        delta.dedup();
        Ok(Atm { names, kinds, start, delta })
    }

    pub fn parse(text: &str) -> Result<Atm, AtmError> {
        let mut names: Vec<String> = Vec::new();
        let mut kinds: HashMap<String, StateKind> = HashMap::new();
        let mut start: Option<String> = None;
        let mut raw_delta: Vec<(usize, Vec<String>)> = Vec::new();
        let mut have_states = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = content.split_whitespace().collect();
            if words.first() == Some(&"delta") {
                raw_delta.push((line, words[1..].iter().map(|w| w.to_string()).collect()));
                continue;
            }
            for clause in content.split(';') {
                let words: Vec<&str> = clause.split_whitespace().collect();
                let Some((&head, rest)) = words.split_first() else { continue };
                let kind = match head {
                    "states" => {
                        if have_states {
                            return Err(AtmError::Parse { line, message: "duplicate `states` clause".into() });
                        }
                        have_states = true;
                        names.extend(rest.iter().map(|w| w.to_string()));
                        continue;
                    }
                    "start" => {
                        if rest.len() != 1 {
                            return Err(AtmError::Parse { line, message: "expected `start <state>`".into() });
                        }
                        start = Some(rest[0].to_string());
                        continue;
                    }
                    "exists" => StateKind::Exists,
                    "forall" => StateKind::Forall,
                    "accept" => StateKind::Accept,
                    "reject" => StateKind::Reject,
                    other => return Err(AtmError::Parse { line, message: format!("unknown clause `{other}`") }),
                };
                for w in rest {
                    if kinds.insert(w.to_string(), kind).is_some() {
                        return Err(AtmError::Reclassified(w.to_string()));
                    }
                }
            }
        }
        if !have_states {
            return Err(AtmError::MissingClause("states"));
        }
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        for k in kinds.keys() {
            if !index.contains_key(k.as_str()) {
                return Err(AtmError::UnknownState(k.clone()));
            }
        }
        let state_kinds = names
            .iter()
            .map(|n| kinds.get(n).copied().ok_or_else(|| AtmError::Unclassified(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let start = start.ok_or(AtmError::MissingClause("start"))?;
        let start = *index.get(start.as_str()).ok_or(AtmError::UnknownState(start.clone()))?;
        let lookup = |w: &str| index.get(w).copied().ok_or_else(|| AtmError::UnknownState(w.to_string()));
        let mut delta = Vec::new();
        for (line, words) in raw_delta {
            let bad = || AtmError::Parse { line, message: "expected `delta <q> <tt|ff> -> <q'> <tt|ff> <L|N|R>`".into() };
            if words.len() != 6 || words[2] != "->" {
                return Err(bad());
            }
            let sym = |w: &str| match w {
                "tt" => Ok(true),
                "ff" => Ok(false),
                _ => Err(bad()),
            };
            let mv = match words[5].as_str() {
                "L" => Move::Left,
                "N" => Move::Stay,
                "R" => Move::Right,
                _ => return Err(bad()),
            };
            delta.push(Transition {
                from: lookup(&words[0])?,
                read: sym(&words[1])?,
                to: lookup(&words[3])?,
                write: sym(&words[4])?,
                mv,
            });
        }
        Atm::new(names, state_kinds, start, delta)
    }

    pub fn to_text(&self) -> String {
        let group = |k: StateKind| {
            self.names.iter().zip(&self.kinds).filter(|(_, &x)| x == k).map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(" ")
        };
        let mut out = format!(
            "states {} ; exists {} ; forall {} ; accept {} ; reject {} ; start {}\n",
            self.names.join(" "),
            group(StateKind::Exists),
            group(StateKind::Forall),
            group(StateKind::Accept),
            group(StateKind::Reject),
            self.names[self.start]
        );
        for t in &self.delta {
            let _ = writeln!(
                out,
                "delta {} {} -> {} {} {}",
                self.names[t.from],
                symbol(t.read),
                self.names[t.to],
                symbol(t.write),
                t.mv.letter()
            );
        }
        out
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn kind(&self, q: usize) -> StateKind {
        self.kinds[q]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.delta
    }

    pub fn moves(&self, q: usize, a: bool) -> impl Iterator<Item = &Transition> + '_ {
        self.delta.iter().filter(move |t| t.from == q && t.read == a)
    }

    pub fn initial(&self, w: &[bool], space_bound: usize) -> Result<AtmConfig, AtmError> {
        if w.len() > space_bound {
            return Err(AtmError::WordTooLong { len: w.len(), bound: space_bound });
        }
        let mut tape = w.to_vec();
        tape.resize(space_bound, false);
        Ok(AtmConfig { state: self.start, head: 0, tape })
    }

    pub fn successors(&self, c: &AtmConfig) -> Result<Vec<AtmConfig>, AtmError> {
        let bound = c.tape.len();
        self.moves(c.state, c.tape[c.head])
            .map(|t| {
                let head = c.head as i64 + t.mv.offset();
                if head < 0 || head >= bound as i64 {
                    return Err(AtmError::SpaceBound { head, bound });
                }
                let mut tape = c.tape.clone();
                tape[c.head] = t.write;
                Ok(AtmConfig { state: t.to, head: head as usize, tape })
            })
            .collect()
    }
}

/// Whether `M` accepts `w` within `space_bound` cells.
///
/// Acceptance is the least fixpoint over the reachable configurations: an
/// existential configuration accepts iff some successor does, a universal one
/// iff all do. Configurations that only accept through a cycle reject.
pub fn atm_accepts(m: &Atm, w: &[bool], space_bound: usize) -> Result<bool, AtmError> {
    let init = m.initial(w, space_bound)?;
    let mut index: HashMap<AtmConfig, usize> = HashMap::new();
    let mut configs = vec![init.clone()];
    let mut succ: Vec<Vec<usize>> = Vec::new();
    index.insert(init, 0);
    let mut i = 0;
    while i < configs.len() {
        let next = m.successors(&configs[i])?;
        let mut ids = Vec::with_capacity(next.len());
        for c in next {
            let id = *index.entry(c.clone()).or_insert_with(|| {
                configs.push(c);
                configs.len() - 1
            });
            ids.push(id);
        }
        succ.push(ids);
        i += 1;
    }
    let mut accepted = vec![false; configs.len()];
    loop {
        let mut changed = false;
        for v in 0..configs.len() {
            if accepted[v] {
                continue;
            }
            let now = match m.kind(configs[v].state) {
                StateKind::Accept => true,
                StateKind::Reject => false,
                StateKind::Exists => succ[v].iter().any(|&t| accepted[t]),
                StateKind::Forall => succ[v].iter().all(|&t| accepted[t]),
            };
            if now {
                accepted[v] = true;
                changed = true;
            }
        }
        if !changed {
            return Ok(accepted[0]);
        }
    }
}

/// The variable naming state `q` in the vector fixpoint.
fn state_var(q: usize) -> String {
    format!("Q{q}")
}

/// `Ψ_{M,q0}`: one component `λT.λH.Ψ_q` per state, of type `τ_{k+1} -> τ_k -> Pr`.
fn psi(c: &mut Counters, m: &Atm, k: usize) -> Formula {
    let ty = HflType::curried(&[(tau(k + 1), Variance::Zero), (tau(k), Variance::Zero)], HflType::Pr);
    let (t, h) = (Formula::var("T"), Formula::var("H"));
    let mut bindings = Vec::with_capacity(m.state_count());
    for q in 0..m.state_count() {
        let body = match m.kind(q) {
            StateKind::Accept => tt(),
            StateKind::Reject => ff(),
            kind => or_all([true, false].into_iter().map(|a| {
                let steps: Vec<Formula> = m
                    .moves(q, a)
                    .map(|tr| {
                        Formula::apps(
                            Formula::var(&state_var(tr.to)),
                            [
                                Formula::apps(c.write(k, tr.write), [t.clone(), h.clone()]),
                                Formula::app(c.move_head(k, tr.mv), h.clone()),
                            ],
                        )
                    })
                    .collect();
                let next = if kind == StateKind::Exists { or_all(steps) } else { and_all(steps) };
                and(Formula::apps(c.read(k, a), [t.clone(), h.clone()]), next)
            })),
        };
        let lams = Formula::lam(
            "T",
            Variance::Zero,
            tau(k + 1),
            Formula::lam("H", Variance::Zero, tau(k), body),
        );
        bindings.push(Binding { var: state_var(q).into(), ty: ty.clone(), body: lams });
    }
    Formula::mu_vec(m.start(), bindings)
}

/// `tape_built^k := build^k tape_empty^k min^k bit_0 ff`, for labeled counter systems with `p` states.
pub fn tape_built(k: usize, p: usize) -> Result<Formula, EncodingError> {
    let mut c = Counters::new(p)?;
    Ok(Formula::apps(c.build(k), [c.tape_empty(k), c.min(k), c.bit(0), ff()]))
}

/// `Φ^k_{M,w} := Ψ_{M,q0} tape_0^k head_0^k`, or with `tape_built^k` when no word is given.
pub fn machine_formula(m: &Atm, k: usize, p: usize, w: Option<&[bool]>) -> Result<Formula, AtmError> {
    let mut c = Counters::new(p)?;
    let tape = match w {
        Some(w) => c.tape0(k, w)?,
        None => tape_built(k, p)?,
    };
    let head = c.head0(k);
    Ok(Formula::apps(psi(&mut c, m, k), [tape, head]))
}
