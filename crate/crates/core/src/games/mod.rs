//! Model-checking games for fixpoint-free formulas.
//!
//! Positions are configurations `(s, f1...fk, η ⊢ φ)`: a state, a stack of
//! argument values, an environment restricted to the free variables of `φ`,
//! and a formula from the closure of the start formula. Configurations are
//! hash-consed, so the game is a DAG.
//!
//! At an application `φ ψ` the existential player proposes a value `g` for
//! `ψ`. The universal player then either accepts and continues with `φ` on
//! the stack `g f1...fk`, or challenges `g`. A challenge is split into a chain
//! of single choices: one argument `h_i` per step, then a state `t` together
//! with the polarity `t ∈ g h1...hm` or `t ∉ g h1...hm`. With
//! [`GameConfig::monolithic`] the whole challenge is a single move instead.

mod export;
mod solve;

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::denote::{apply_all, Bitset, Denotation, DenoteError, LatticeEnum, DEFAULT_ELEMENT_LIMIT};
use crate::eval::{eliminate_fixpoints, ElimError};
use crate::lts::Lts;
use crate::syntax::{desugar_vec, measures, Formula, Kind, Measures, Name};
use crate::typesys::{game_size_bound, DEFAULT_DIGIT_BUDGET};
use crate::typesys::{infer_closed, HflType, TypeError};

pub use export::{export_game, ExportFormat};
pub use solve::{solve, Solution, Strategy};

pub const DEFAULT_EDGE_LIMIT: u64 = 10_000_000;

/// Default number of unfoldings allowed per eliminated fixpoint.
pub const DEFAULT_UNFOLD_BUDGET: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }
}

/// The partition `V∃ / V∀ / W∃ / W∀` of the nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    Exists,
    Forall,
    WinExists,
    WinForall,
}

impl NodeClass {
    pub fn owner(self) -> Option<Player> {
        match self {
            NodeClass::Exists => Some(Player::Exists),
            NodeClass::Forall => Some(Player::Forall),
            _ => None,
        }
    }

    pub fn terminal_winner(self) -> Option<Player> {
        match self {
            NodeClass::WinExists => Some(Player::Exists),
            NodeClass::WinForall => Some(Player::Forall),
            _ => None,
        }
    }
}

/// One entry of a configuration environment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binding {
    pub name: Name,
    pub ty: HflType,
    pub value: Denotation,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub stack: Vec<Denotation>,
    /// Sorted by name, exactly the free variables of `formula`.
    pub env: Vec<Binding>,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Config(Config),
    /// `∀` accepts the value `g` proposed at the application node `at`, or challenges it.
    Branch { at: usize, g: Denotation },
    /// `∀` picks the next argument of `g`, whose type is `ty`.
    Arguments { g: Denotation, ty: HflType, arg: Formula, env: Vec<Binding>, prefix: Vec<Denotation> },
    /// `∀` picks a state and a polarity for `g args`.
    Target { g: Denotation, ty: HflType, arg: Formula, env: Vec<Binding>, args: Vec<Denotation> },
}

#[derive(Clone, Debug)]
pub struct Game {
    states: usize,
    classes: Vec<NodeClass>,
    payloads: Vec<Payload>,
    succ: Vec<Vec<usize>>,
    start: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GameStats {
    pub nodes: u64,
    pub edges: u64,
    pub exists_nodes: u64,
    pub forall_nodes: u64,
    pub terminals: u64,
    pub configurations: u64,
}

impl Game {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn node_count(&self) -> usize {
        self.classes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn class(&self, node: usize) -> NodeClass {
        self.classes[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn payload(&self, node: usize) -> &Payload {
        &self.payloads[node]
    }

    pub fn stats(&self) -> GameStats {
        let mut st = GameStats { nodes: self.node_count() as u64, edges: self.edge_count() as u64, ..GameStats::default() };
        for (c, p) in self.classes.iter().zip(&self.payloads) {
            match c {
                NodeClass::Exists => st.exists_nodes += 1,
                NodeClass::Forall => st.forall_nodes += 1,
                _ => st.terminals += 1,
            }
            if matches!(p, Payload::Config(_)) {
                st.configurations += 1;
            }
        }
        st
    }

    /// Nodes ordered so that every edge points forward, or the node on a cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>, GameError> {
        let n = self.node_count();
        let mut indeg = vec![0usize; n];
        for ss in &self.succ {
            for &t in ss {
                indeg[t] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &t in &self.succ[v] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
        if order.len() < n {
            let node = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
            return Err(GameError::Cycle { node });
        }
        Ok(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct GameConfig {
    /// Largest domain `⟦σ⟧` the existential player may choose from.
    pub element_limit: u64,
    pub edge_limit: u64,
    /// Unfoldings allowed per fixpoint during elimination.
    pub unfold_budget: u64,
    /// Challenge an application with one move instead of a chain.
    pub monolithic: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            element_limit: DEFAULT_ELEMENT_LIMIT,
            edge_limit: DEFAULT_EDGE_LIMIT,
            unfold_budget: DEFAULT_UNFOLD_BUDGET,
            monolithic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game exceeds the limit of {limit} edges{}", estimate.as_ref().map(|e| format!(" (size bound {e})")).unwrap_or_default())]
    TooLarge { limit: u64, estimate: Option<String> },
    #[error(transparent)]
    Denote(#[from] DenoteError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Elimination(#[from] ElimError),
    #[error("game formulas must be fixpoint-free")]
    NotFixpointFree,
    #[error("the start formula must be closed and of type Pr, found {0}")]
    NotAProposition(String),
    #[error("state {state} out of range for {n} states")]
    StateOutOfRange { state: usize, n: usize },
    #[error("game graph has a cycle through node {node}")]
    Cycle { node: usize },
    #[error("internal game error: {0}")]
    Internal(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Config(Config),
    Branch(usize, Bitset),
    Arguments(Bitset, Formula, Vec<Binding>, Vec<Bitset>),
    Target(Bitset, Formula, Vec<Binding>, Vec<Bitset>),
}

struct Builder<'a> {
    lts: &'a Lts,
    cfg: &'a GameConfig,
    game: Game,
    index: HashMap<Key, usize>,
    pending: Vec<usize>,
    edges: u64,
    types: HashMap<(u64, Vec<HflType>), HflType>,
}

/// Builds the game for `s0 ⊨ φ0`, where `φ0` is closed, fixpoint-free and of type `Pr`.
pub fn build_game(lts: &Lts, s0: usize, phi0: &Formula, cfg: &GameConfig) -> Result<Game, GameError> {
    let n = lts.state_count();
    if s0 >= n {
        return Err(GameError::StateOutOfRange { state: s0, n });
    }
    if !phi0.is_fixpoint_free() {
        return Err(GameError::NotFixpointFree);
    }
    let typing = infer_closed(phi0)?;
    if typing.ty != HflType::Pr {
        return Err(GameError::NotAProposition(typing.ty.to_string()));
    }
    let mut b = Builder {
        lts,
        cfg,
        game: Game { states: n, classes: Vec::new(), payloads: Vec::new(), succ: Vec::new(), start: 0 },
        index: HashMap::new(),
        pending: Vec::new(),
        edges: 0,
        types: HashMap::new(),
    };
    let start = b.node(Payload::Config(Config { state: s0, stack: Vec::new(), env: Vec::new(), formula: phi0.clone() }));
    b.game.start = start;
    while let Some(v) = b.pending.pop() {
        let (class, succ) = b.expand(v)?;
        b.edges += succ.len() as u64;
        if b.edges > cfg.edge_limit {
            return Err(GameError::TooLarge { limit: cfg.edge_limit, estimate: None });
        }
        b.game.classes[v] = class;
        b.game.succ[v] = succ;
    }
    Ok(b.game)
}

fn restrict(env: &[Binding], phi: &Formula) -> Vec<Binding> {
    let fv = phi.free_vars();
    env.iter().filter(|b| fv.contains(&b.name)).cloned().collect()
}

fn lookup<'e>(env: &'e [Binding], x: &str) -> Result<&'e Binding, GameError> {
    env.iter().find(|b| &*b.name == x).ok_or_else(|| GameError::Internal(format!("unbound variable {x}")))
}

/// Every tuple of the product of `domains`, in lexicographic order.
fn tuples(domains: &[LatticeEnum]) -> Vec<Vec<Denotation>> {
    let mut out: Vec<Vec<Denotation>> = vec![Vec::new()];
    for d in domains {
        let mut next = Vec::with_capacity(out.len() * d.len() as usize);
        for prefix in &out {
            for v in d.iter() {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

impl Builder<'_> {
    fn node(&mut self, payload: Payload) -> usize {
        let key = match &payload {
            Payload::Config(c) => Key::Config(c.clone()),
            Payload::Branch { at, g } => Key::Branch(*at, g.clone()),
            Payload::Arguments { g, arg, env, prefix, .. } => {
                Key::Arguments(g.clone(), arg.clone(), env.clone(), prefix.clone())
            }
            Payload::Target { g, arg, env, args, .. } => Key::Target(g.clone(), arg.clone(), env.clone(), args.clone()),
        };
        if let Some(&v) = self.index.get(&key) {
            return v;
        }
        let v = self.game.classes.len();
        self.game.classes.push(NodeClass::Exists);
        self.game.payloads.push(payload);
        self.game.succ.push(Vec::new());
        self.index.insert(key, v);
        self.pending.push(v);
        v
    }

    fn config(&mut self, state: usize, stack: Vec<Denotation>, env: &[Binding], formula: Formula) -> usize {
        let env = restrict(env, &formula);
        self.node(Payload::Config(Config { state, stack, env, formula }))
    }

    fn domain(&self, ty: &HflType) -> Result<LatticeEnum, GameError> {
        Ok(LatticeEnum::new(ty, self.lts.state_count(), self.cfg.element_limit)?)
    }

    fn type_of(&mut self, phi: &Formula, env: &[Binding]) -> Result<HflType, GameError> {
        let mut ctx: Vec<(Name, HflType)> = env.iter().map(|b| (b.name.clone(), b.ty.clone())).collect();
        self.synth(phi, &mut ctx)
    }

    fn synth(&mut self, phi: &Formula, ctx: &mut Vec<(Name, HflType)>) -> Result<HflType, GameError> {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || match phi.kind() {
            Kind::Prop(_) | Kind::Or(..) | Kind::Dia(..) => Ok(HflType::Pr),
            Kind::Neg(f) => self.synth(f, ctx),
            Kind::Var(x) => ctx
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| GameError::Internal(format!("unbound variable {x}"))),
            Kind::App(..) | Kind::Lam { .. } => {
                let mut fv_types = Vec::with_capacity(phi.free_vars().len());
                for x in phi.free_vars() {
                    let t = ctx.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone());
                    fv_types.push(t.ok_or_else(|| GameError::Internal(format!("unbound variable {x}")))?);
                }
                let key = (phi.id(), fv_types);
                if let Some(t) = self.types.get(&key) {
                    return Ok(t.clone());
                }
                let t = match phi.kind() {
                    Kind::App(f, _) => {
                        let ft = self.synth(f, ctx)?;
                        let (_, _, res) = ft.split().ok_or_else(|| GameError::Internal("applied a proposition".into()))?;
                        res.clone()
                    }
                    Kind::Lam { var, variance, ty, body } => {
                        ctx.push((var.clone(), ty.clone()));
                        let r = self.synth(body, ctx);
                        ctx.pop();
                        HflType::arrow(ty.clone(), *variance, r?)
                    }
                    _ => unreachable!(),
                };
                self.types.insert(key, t.clone());
                Ok(t)
            }
            Kind::Mu { .. } | Kind::MuVec { .. } => Err(GameError::NotFixpointFree),
        })
    }

    fn expand(&mut self, v: usize) -> Result<(NodeClass, Vec<usize>), GameError> {
        match self.game.payloads[v].clone() {
            Payload::Config(c) => self.expand_config(v, c),
            Payload::Branch { at, g } => self.expand_branch(at, g),
            Payload::Arguments { g, ty, arg, env, prefix } => {
                let args = ty.args();
                let dom = self.domain(args[prefix.len()].0)?;
                let mut succ = Vec::with_capacity(dom.len() as usize);
                for h in dom.iter() {
                    let mut next = prefix.clone();
                    next.push(h);
                    let payload = if next.len() == args.len() {
                        Payload::Target { g: g.clone(), ty: ty.clone(), arg: arg.clone(), env: env.clone(), args: next }
                    } else {
                        Payload::Arguments { g: g.clone(), ty: ty.clone(), arg: arg.clone(), env: env.clone(), prefix: next }
                    };
                    succ.push(self.node(payload));
                }
                Ok((NodeClass::Forall, succ))
            }
            Payload::Target { g, ty, arg, env, args } => {
                let succ = self.targets(&g, &ty, &arg, &env, &args);
                Ok((NodeClass::Forall, succ))
            }
        }
    }

    fn targets(&mut self, g: &Denotation, ty: &HflType, arg: &Formula, env: &[Binding], args: &[Denotation]) -> Vec<usize> {
        let n = self.lts.state_count();
        let image = apply_all(g, ty, args, n);
        (0..n)
            .map(|t| {
                let f = if image.contains(t) { arg.clone() } else { Formula::neg(arg.clone()) };
                self.config(t, args.to_vec(), env, f)
            })
            .collect()
    }

    fn expand_branch(&mut self, at: usize, g: Denotation) -> Result<(NodeClass, Vec<usize>), GameError> {
        let Payload::Config(c) = self.game.payloads[at].clone() else {
            return Err(GameError::Internal("branch node without an application".into()));
        };
        let (negated, core) = match c.formula.kind() {
            Kind::Neg(f) => (true, f.clone()),
            _ => (false, c.formula.clone()),
        };
        let Kind::App(fun, arg) = core.kind() else {
            return Err(GameError::Internal("branch node without an application".into()));
        };
        let mut stack = Vec::with_capacity(c.stack.len() + 1);
        stack.push(g.clone());
        stack.extend(c.stack.iter().cloned());
        let fun = if negated { Formula::neg(fun.clone()) } else { fun.clone() };
        let mut succ = vec![self.config(c.state, stack, &c.env, fun)];
        let env = restrict(&c.env, arg);
        let ty = self.type_of(arg, &env)?;
        if self.cfg.monolithic {
            let doms = ty.args().iter().map(|(t, _)| self.domain(t)).collect::<Result<Vec<_>, _>>()?;
            let count = doms.iter().map(|d| d.len()).try_fold(1u64, u64::checked_mul);
            if count.is_none_or(|c| c.saturating_mul(self.lts.state_count() as u64) > self.cfg.edge_limit) {
                return Err(GameError::TooLarge { limit: self.cfg.edge_limit, estimate: None });
            }
            for args in tuples(&doms) {
                let more = self.targets(&g, &ty, arg, &env, &args);
                succ.extend(more);
            }
        } else {
            let payload = if ty.is_ground() {
                Payload::Target { g, ty, arg: arg.clone(), env, args: Vec::new() }
            } else {
                Payload::Arguments { g, ty, arg: arg.clone(), env, prefix: Vec::new() }
            };
            succ.push(self.node(payload));
        }
        Ok((NodeClass::Forall, succ))
    }

    fn expand_config(&mut self, v: usize, c: Config) -> Result<(NodeClass, Vec<usize>), GameError> {
        let (negated, core) = match c.formula.kind() {
            Kind::Neg(f) => (true, f.clone()),
            _ => (false, c.formula.clone()),
        };
        let wins = |holds: bool| if holds != negated { NodeClass::WinExists } else { NodeClass::WinForall };
        let neg = |f: &Formula| if negated { Formula::neg(f.clone()) } else { f.clone() };
        let s = c.state;
        match core.kind() {
            Kind::Prop(q) => Ok((wins(self.lts.has_label(s, q)), Vec::new())),
            Kind::Var(x) => {
                let b = lookup(&c.env, x)?;
                let d = apply_all(&b.value, &b.ty, &c.stack, self.lts.state_count());
                Ok((wins(d.contains(s)), Vec::new()))
            }
            Kind::Neg(inner) if negated => {
                let next = self.config(s, c.stack.clone(), &c.env, inner.clone());
                Ok((NodeClass::Exists, vec![next]))
            }
            Kind::Or(a, b) => {
                let succ = vec![
                    self.config(s, c.stack.clone(), &c.env, neg(a)),
                    self.config(s, c.stack.clone(), &c.env, neg(b)),
                ];
                Ok((if negated { NodeClass::Forall } else { NodeClass::Exists }, dedup(succ)))
            }
            Kind::Dia(act, body) => {
                let targets: Vec<usize> = self.lts.successors(act, s).to_vec();
                if targets.is_empty() {
                    return Ok((if negated { NodeClass::WinExists } else { NodeClass::WinForall }, Vec::new()));
                }
                let succ = targets.into_iter().map(|t| self.config(t, c.stack.clone(), &c.env, neg(body))).collect();
                Ok((if negated { NodeClass::Forall } else { NodeClass::Exists }, succ))
            }
            Kind::App(_, arg) => {
                let env = restrict(&c.env, arg);
                let ty = self.type_of(arg, &env)?;
                let dom = self.domain(&ty)?;
                if dom.len() > self.cfg.edge_limit {
                    return Err(GameError::TooLarge { limit: self.cfg.edge_limit, estimate: None });
                }
                let succ = dom.iter().map(|g| self.node(Payload::Branch { at: v, g })).collect();
                Ok((NodeClass::Exists, succ))
            }
            Kind::Lam { var, ty, body, .. } => {
                let (f1, rest) = c
                    .stack
                    .split_first()
                    .ok_or_else(|| GameError::Internal("abstraction with an empty stack".into()))?;
                let mut env = c.env.clone();
                if body.has_free(var) {
                    env.push(Binding { name: var.clone(), ty: ty.clone(), value: f1.clone() });
                    env.sort_by(|a, b| a.name.cmp(&b.name));
                }
                let next = self.config(s, rest.to_vec(), &env, neg(body));
                Ok((NodeClass::Exists, vec![next]))
            }
            Kind::Neg(_) => unreachable!(),
            Kind::Mu { .. } | Kind::MuVec { .. } => Err(GameError::NotFixpointFree),
        }
    }
}

fn dedup(mut v: Vec<usize>) -> Vec<usize> {
    v.dedup();
    v
}

/// Everything produced by [`check_via_games_report`].
#[derive(Clone, Debug)]
pub struct GameReport {
    pub holds: bool,
    pub eliminated: Formula,
    pub measures: Measures,
    /// The fragment `(k, m)` of the eliminated formula.
    pub fragment: (u32, u32),
    /// The a priori size bound, if it fits into the digit budget.
    pub bound: Option<BigUint>,
    pub game: Game,
    pub solution: Solution,
}

/// A priori bound on the size of the game for a fixpoint-free closed formula over `n` states.
pub fn size_bound(phi: &Formula, n: usize) -> Result<Option<BigUint>, GameError> {
    let (k, m) = infer_closed(phi).map(|t| (t.ord, t.mar))?;
    let ms = measures(phi);
    Ok(game_size_bound(n as u64, ms.size, k, m, ms.lam_vars, DEFAULT_DIGIT_BUDGET).ok())
}

/// Eliminates fixpoints, builds the game, and solves it.
pub fn check_via_games_report(lts: &Lts, s: usize, phi: &Formula, cfg: &GameConfig) -> Result<GameReport, GameError> {
    let eliminated = eliminate_fixpoints(&desugar_vec(phi), lts, cfg.unfold_budget)?;
    let typing = infer_closed(&eliminated)?;
    let ms = measures(&eliminated);
    let bound = game_size_bound(
        lts.state_count() as u64,
        ms.size,
        typing.ord,
        typing.mar,
        ms.lam_vars,
        DEFAULT_DIGIT_BUDGET,
    )
    .ok();
    let game = build_game(lts, s, &eliminated, cfg).map_err(|e| match e {
        GameError::TooLarge { limit, .. } => {
            GameError::TooLarge { limit, estimate: Some(bound.as_ref().map_or("unknown".into(), BigUint::to_string)) }
        }
        e => e,
    })?;
    let solution = solve(&game)?;
    Ok(GameReport {
        holds: solution.winner == Player::Exists,
        eliminated,
        measures: ms,
        fragment: (typing.ord, typing.mar),
        bound,
        game,
        solution,
    })
}

/// `s ∈ ⟦φ⟧`, decided by the existential player winning the game.
pub fn check_via_games(lts: &Lts, s: usize, phi: &Formula, cfg: &GameConfig) -> Result<bool, GameError> {
    check_via_games_report(lts, s, phi, cfg).map(|r| r.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::gen_chain;
    use crate::surface::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn proposition_is_a_single_terminal() {
        let mut lts = Lts::new(1);
        lts.add_label(0, "q");
        let g = build_game(&lts, 0, &f("q"), &GameConfig::default()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.class(g.start()), NodeClass::WinExists);
        let g = build_game(&lts, 0, &f("!q"), &GameConfig::default()).unwrap();
        assert_eq!(g.class(g.start()), NodeClass::WinForall);
    }

    #[test]
    fn stuck_modalities() {
        let lts = Lts::new(1);
        let g = build_game(&lts, 0, &f("<a>q"), &GameConfig::default()).unwrap();
        assert_eq!(g.class(g.start()), NodeClass::WinForall);
        let g = build_game(&lts, 0, &f("!<a>q"), &GameConfig::default()).unwrap();
        assert_eq!(g.class(g.start()), NodeClass::WinExists);
    }

    #[test]
    fn universal_choice_between_terminals() {
        let mut lts = Lts::new(1);
        lts.add_label(0, "q");
        let g = build_game(&lts, 0, &f("!(q | !q)"), &GameConfig::default()).unwrap();
        assert_eq!(g.class(g.start()), NodeClass::Forall);
        let classes: Vec<_> = g.successors(g.start()).iter().map(|&v| g.class(v)).collect();
        assert_eq!(classes, vec![NodeClass::WinForall, NodeClass::Exists]);
        let sol = solve(&g).unwrap();
        assert_eq!(sol.winner, Player::Forall);
        assert_eq!(sol.strategy.choice(g.start()), Some(g.successors(g.start())[0]));
    }

    #[test]
    fn reachability_on_a_chain() {
        let mut lts = gen_chain(3);
        lts.add_label(2, "q");
        let phi = f("mu (X:Pr). q | <a>X");
        assert!(check_via_games(&lts, 0, &phi, &GameConfig::default()).unwrap());
        let psi = f("mu (X:Pr). q | <b>X");
        assert!(!check_via_games(&lts, 0, &psi, &GameConfig::default()).unwrap());
    }

    #[test]
    fn higher_order_application() {
        let lts = gen_chain(2);
        let phi = f(r"(\(F:Pr^- -> Pr). F (<a>tt)) (\(Y^-:Pr). !Y)");
        for monolithic in [false, true] {
            let cfg = GameConfig { monolithic, ..GameConfig::default() };
            assert!(!check_via_games(&lts, 0, &phi, &cfg).unwrap());
            assert!(check_via_games(&lts, 1, &phi, &cfg).unwrap());
        }
    }

    #[test]
    fn games_are_acyclic_and_limited() {
        let lts = gen_chain(3);
        let phi = f(r"(mu (F:Pr -> Pr). \(Y:Pr). Y | <a>(F Y)) (!<a>tt)");
        let r = check_via_games_report(&lts, 0, &phi, &GameConfig::default()).unwrap();
        assert!(r.holds);
        assert!(r.game.is_acyclic());
        let bound = r.bound.unwrap();
        assert!(BigUint::from(r.game.edge_count()) <= bound);
        let tiny = GameConfig { edge_limit: 10, ..GameConfig::default() };
        assert!(matches!(check_via_games(&lts, 0, &phi, &tiny), Err(GameError::TooLarge { estimate: Some(_), .. })));
    }

    #[test]
    fn rejects_bad_input() {
        let lts = gen_chain(2);
        let cfg = GameConfig::default();
        assert!(matches!(build_game(&lts, 5, &f("q"), &cfg), Err(GameError::StateOutOfRange { .. })));
        assert!(matches!(build_game(&lts, 0, &f("mu (X:Pr). X"), &cfg), Err(GameError::NotFixpointFree)));
        assert!(matches!(build_game(&lts, 0, &f(r"\(X:Pr). X"), &cfg), Err(GameError::NotAProposition(_))));
    }
}
