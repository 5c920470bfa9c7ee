//! Hash-consed HFL formulas, derived forms, substitution, Fischer–Ladner closure and measures.
//!
//! Every formula node is interned in a global table, so structurally equal
//! formulas share one allocation and compare by pointer. This keeps
//! equality, hashing and closure computation cheap even for the large,
//! heavily shared formulas produced by fixpoint elimination.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock, Mutex, Weak};

use crate::typesys::{HflType, Variance};

pub type Name = Arc<str>;

/// Reserved proposition used to expand `tt` and `ff`.
pub const RESERVED_PROP: &str = "__q";

/// One equation `X : τ = φ` of a vector fixpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binding {
    pub var: Name,
    pub ty: HflType,
    pub body: Formula,
}

#[derive(Clone, Debug)]
pub enum Kind {
    Prop(Name),
    Var(Name),
    Neg(Formula),
    Or(Formula, Formula),
    Dia(Name, Formula),
    App(Formula, Formula),
    Lam {
        var: Name,
        variance: Variance,
        ty: HflType,
        body: Formula,
    },
    Mu {
        var: Name,
        ty: HflType,
        body: Formula,
    },
    /// Component `index` (0-based) of a simultaneous least fixpoint.
    MuVec { index: usize, bindings: Arc<[Binding]> },
}

pub struct Node {
    id: u64,
    kind: Kind,
    free: Arc<[Name]>,
    length: u64,
    fixpoint_free: bool,
}

/// An immutable, interned HFL formula.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::surface::print_formula(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::surface::print_formula(self))
    }
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Prop(Name),
    Var(Name),
    Neg(u64),
    Or(u64, u64),
    Dia(Name, u64),
    App(u64, u64),
    Lam(Name, Variance, HflType, u64),
    Mu(Name, HflType, u64),
    MuVec(usize, Vec<(Name, HflType, u64)>),
}

struct Table {
    map: HashMap<Key, Weak<Node>>,
    next_id: u64,
    sweep_at: usize,
}

static TABLE: LazyLock<Mutex<Table>> = LazyLock::new(|| {
    Mutex::new(Table { map: HashMap::new(), next_id: 0, sweep_at: 1 << 12 })
});

static FRESH: AtomicU64 = AtomicU64::new(0);

fn key_of(kind: &Kind) -> Key {
    match kind {
        Kind::Prop(p) => Key::Prop(p.clone()),
        Kind::Var(x) => Key::Var(x.clone()),
        Kind::Neg(f) => Key::Neg(f.id()),
        Kind::Or(a, b) => Key::Or(a.id(), b.id()),
        Kind::Dia(a, f) => Key::Dia(a.clone(), f.id()),
        Kind::App(a, b) => Key::App(a.id(), b.id()),
        Kind::Lam { var, variance, ty, body } => Key::Lam(var.clone(), *variance, ty.clone(), body.id()),
        Kind::Mu { var, ty, body } => Key::Mu(var.clone(), ty.clone(), body.id()),
        Kind::MuVec { index, bindings } => Key::MuVec(
            *index,
            bindings.iter().map(|b| (b.var.clone(), b.ty.clone(), b.body.id())).collect(),
        ),
    }
}

fn merge_free<'a>(parts: impl IntoIterator<Item = &'a [Name]>, bound: &[Name]) -> Arc<[Name]> {
    let mut out: Vec<Name> = Vec::new();
    for part in parts {
        out.extend(part.iter().filter(|x| !bound.contains(x)).cloned());
    }
    out.sort();
    out.dedup();
    out.into()
}

fn intern(kind: Kind) -> Formula {
    let key = key_of(&kind);
    let mut table = TABLE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(node) = table.map.get(&key).and_then(Weak::upgrade) {
        return Formula(node);
    }
    let (free, length, fixpoint_free) = summarize(&kind);
    let id = table.next_id;
    table.next_id += 1;
    let node = Arc::new(Node { id, kind, free, length, fixpoint_free });
    table.map.insert(key, Arc::downgrade(&node));
    if table.map.len() > table.sweep_at {
        table.map.retain(|_, w| w.strong_count() > 0);
        table.sweep_at = (2 * table.map.len()).max(1 << 12);
    }
    Formula(node)
}

fn summarize(kind: &Kind) -> (Arc<[Name]>, u64, bool) {
    match kind {
        Kind::Prop(_) => (Arc::from([]), 1, true),
        Kind::Var(x) => (Arc::from([x.clone()]), 1, true),
        Kind::Neg(f) | Kind::Dia(_, f) => (f.0.free.clone(), f.length().saturating_add(1), f.is_fixpoint_free()),
        Kind::Or(a, b) | Kind::App(a, b) => (
            merge_free([&*a.0.free, &*b.0.free], &[]),
            a.length().saturating_add(b.length()).saturating_add(1),
            a.is_fixpoint_free() && b.is_fixpoint_free(),
        ),
        Kind::Lam { var, body, .. } => (
            merge_free([&*body.0.free], std::slice::from_ref(var)),
            body.length().saturating_add(1),
            body.is_fixpoint_free(),
        ),
        Kind::Mu { var, body, .. } => {
            (merge_free([&*body.0.free], std::slice::from_ref(var)), body.length().saturating_add(1), false)
        }
        Kind::MuVec { bindings, .. } => {
            let bound: Vec<Name> = bindings.iter().map(|b| b.var.clone()).collect();
            let length = bindings.iter().fold(1u64, |acc, b| acc.saturating_add(b.body.length()));
            (merge_free(bindings.iter().map(|b| &*b.body.0.free), &bound), length, false)
        }
    }
}

/// Produces a variable name that has not been produced before, derived from `base`.
pub fn fresh_name(base: &str) -> Name {
    let stem = match base.rfind('_') {
        Some(i) if i > 0 && base[i + 1..].chars().all(|c| c.is_ascii_digit()) => &base[..i],
        _ => base,
    };
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    format!("{stem}_{n}").into()
}

impl Formula {
    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Identity of the interned node; equal formulas have equal ids.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    /// Free variables, sorted and without duplicates.
    pub fn free_vars(&self) -> &[Name] {
        &self.0.free
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.0.free.iter().any(|y| &**y == x)
    }

    pub fn is_closed(&self) -> bool {
        self.0.free.is_empty()
    }

    /// Number of nodes of the formula read as a tree (saturating).
    pub fn length(&self) -> u64 {
        self.0.length
    }

    /// True if no `Mu` or `MuVec` node occurs.
    pub fn is_fixpoint_free(&self) -> bool {
        self.0.fixpoint_free
    }

    pub fn prop(name: &str) -> Formula {
        intern(Kind::Prop(name.into()))
    }

    pub fn var(name: &str) -> Formula {
        intern(Kind::Var(name.into()))
    }

    pub fn var_named(name: Name) -> Formula {
        intern(Kind::Var(name))
    }

    pub fn neg(f: Formula) -> Formula {
        intern(Kind::Neg(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        intern(Kind::Or(a, b))
    }

    pub fn dia(action: &str, f: Formula) -> Formula {
        intern(Kind::Dia(action.into(), f))
    }

    pub fn app(f: Formula, arg: Formula) -> Formula {
        intern(Kind::App(f, arg))
    }

    /// `f a1 ... an`.
    pub fn apps(f: Formula, args: impl IntoIterator<Item = Formula>) -> Formula {
        args.into_iter().fold(f, Formula::app)
    }

    pub fn lam(var: &str, variance: Variance, ty: HflType, body: Formula) -> Formula {
        intern(Kind::Lam { var: var.into(), variance, ty, body })
    }

    pub fn lam_named(var: Name, variance: Variance, ty: HflType, body: Formula) -> Formula {
        intern(Kind::Lam { var, variance, ty, body })
    }

    pub fn mu(var: &str, ty: HflType, body: Formula) -> Formula {
        intern(Kind::Mu { var: var.into(), ty, body })
    }

    pub fn mu_named(var: Name, ty: HflType, body: Formula) -> Formula {
        intern(Kind::Mu { var, ty, body })
    }

    /// Component `index` (0-based) of the simultaneous fixpoint of `bindings`.
    pub fn mu_vec(index: usize, bindings: Vec<Binding>) -> Formula {
        assert!(index < bindings.len(), "vector fixpoint index out of range");
        intern(Kind::MuVec { index, bindings: bindings.into() })
    }

    pub fn is_tt(&self) -> bool {
        match self.kind() {
            Kind::Or(a, b) => match (a.kind(), b.kind()) {
                (Kind::Prop(p), Kind::Neg(c)) => {
                    &**p == RESERVED_PROP && matches!(c.kind(), Kind::Prop(r) if &**r == RESERVED_PROP)
                }
                _ => false,
            },
            _ => false,
        }
    }

    pub fn is_ff(&self) -> bool {
        matches!(self.kind(), Kind::Neg(f) if f.is_tt())
    }
}

/// The abbreviations built on top of the core constructors.
#[derive(Clone, Debug)]
pub enum Derived {
    Tt,
    Ff,
    And(Formula, Formula),
    Implies(Formula, Formula),
    Iff(Formula, Formula),
    Nu { var: Name, ty: HflType, body: Formula },
    Box { action: Name, body: Formula },
    DiaAny { actions: Vec<Name>, body: Formula },
    BoxAny { actions: Vec<Name>, body: Formula },
}

impl Derived {
    pub fn expand(&self) -> Formula {
        match self {
            Derived::Tt => tt(),
            Derived::Ff => ff(),
            Derived::And(a, b) => and(a.clone(), b.clone()),
            Derived::Implies(a, b) => implies(a.clone(), b.clone()),
            Derived::Iff(a, b) => iff(a.clone(), b.clone()),
            Derived::Nu { var, ty, body } => nu(var, ty.clone(), body.clone()),
            Derived::Box { action, body } => box_(action, body.clone()),
            Derived::DiaAny { actions, body } => dia_any(actions, body.clone()),
            Derived::BoxAny { actions, body } => box_any(actions, body.clone()),
        }
    }
}

pub fn tt() -> Formula {
    let q = Formula::prop(RESERVED_PROP);
    Formula::or(q.clone(), Formula::neg(q))
}

pub fn ff() -> Formula {
    Formula::neg(tt())
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::neg(Formula::or(Formula::neg(a), Formula::neg(b)))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::or(Formula::neg(a), b)
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    and(implies(a.clone(), b.clone()), implies(b, a))
}

pub fn box_(action: &str, body: Formula) -> Formula {
    Formula::neg(Formula::dia(action, Formula::neg(body)))
}

/// `νX.φ := ¬μX.¬φ[¬X/X]`.
pub fn nu(var: &str, ty: HflType, body: Formula) -> Formula {
    let negated = substitute(&body, var, &Formula::neg(Formula::var(var)));
    Formula::neg(Formula::mu(var, ty, Formula::neg(negated)))
}

/// Disjunction of all formulas; `ff` when empty.
pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
    fs.into_iter().reduce(Formula::or).unwrap_or_else(ff)
}

/// Conjunction of all formulas; `tt` when empty.
pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
    fs.into_iter().reduce(and).unwrap_or_else(tt)
}

/// `⟨-⟩φ` over an explicit action set.
pub fn dia_any<S: AsRef<str>>(actions: &[S], body: Formula) -> Formula {
    or_all(actions.iter().map(|a| Formula::dia(a.as_ref(), body.clone())))
}

/// `[-]φ` over an explicit action set.
pub fn box_any<S: AsRef<str>>(actions: &[S], body: Formula) -> Formula {
    and_all(actions.iter().map(|a| box_(a.as_ref(), body.clone())))
}

/// Capture-avoiding substitution `φ[ψ/X]`.
pub fn substitute(phi: &Formula, x: &str, psi: &Formula) -> Formula {
    Subst { x, psi, memo: HashMap::new() }.go(phi)
}

struct Subst<'a> {
    x: &'a str,
    psi: &'a Formula,
    memo: HashMap<u64, Formula>,
}

impl Subst<'_> {
    fn go(&mut self, phi: &Formula) -> Formula {
        if !phi.has_free(self.x) {
            return phi.clone();
        }
        if let Some(r) = self.memo.get(&phi.id()) {
            return r.clone();
        }
        let r = match phi.kind() {
            Kind::Prop(_) => phi.clone(),
            Kind::Var(_) => self.psi.clone(),
            Kind::Neg(f) => Formula::neg(self.go(f)),
            Kind::Or(a, b) => {
                let (a, b) = (self.go(a), self.go(b));
                Formula::or(a, b)
            }
            Kind::Dia(act, f) => intern(Kind::Dia(act.clone(), self.go(f))),
            Kind::App(a, b) => {
                let (a, b) = (self.go(a), self.go(b));
                Formula::app(a, b)
            }
            Kind::Lam { var, variance, ty, body } => {
                let (var, body) = self.under_binder(var, body);
                Formula::lam_named(var, *variance, ty.clone(), body)
            }
            Kind::Mu { var, ty, body } => {
                let (var, body) = self.under_binder(var, body);
                Formula::mu_named(var, ty.clone(), body)
            }
            Kind::MuVec { index, bindings } => {
                let mut bindings: Vec<Binding> = bindings.to_vec();
                for i in 0..bindings.len() {
                    if self.psi.has_free(&bindings[i].var) {
                        let new = fresh_name(&bindings[i].var);
                        let old = bindings[i].var.clone();
                        let renamed = Formula::var_named(new.clone());
                        for b in bindings.iter_mut() {
                            b.body = substitute(&b.body, &old, &renamed);
                        }
                        bindings[i].var = new;
                    }
                }
                for b in bindings.iter_mut() {
                    b.body = self.go(&b.body);
                }
                Formula::mu_vec(*index, bindings)
            }
        };
        self.memo.insert(phi.id(), r.clone());
        r
    }

    fn under_binder(&mut self, var: &Name, body: &Formula) -> (Name, Formula) {
        if self.psi.has_free(var) {
            let new = fresh_name(var);
            let renamed = substitute(body, var, &Formula::var_named(new.clone()));
            let body = self.go(&renamed);
            (new, body)
        } else {
            (var.clone(), self.go(body))
        }
    }
}

/// Replaces every vector fixpoint by nested ordinary fixpoints.
pub fn desugar_vec(phi: &Formula) -> Formula {
    let mut memo = HashMap::new();
    desugar_go(phi, &mut memo)
}

fn desugar_go(phi: &Formula, memo: &mut HashMap<u64, Formula>) -> Formula {
    if phi.is_fixpoint_free() {
        return phi.clone();
    }
    if let Some(r) = memo.get(&phi.id()) {
        return r.clone();
    }
    let r = match phi.kind() {
        Kind::Prop(_) | Kind::Var(_) => phi.clone(),
        Kind::Neg(f) => Formula::neg(desugar_go(f, memo)),
        Kind::Or(a, b) => Formula::or(desugar_go(a, memo), desugar_go(b, memo)),
        Kind::Dia(act, f) => intern(Kind::Dia(act.clone(), desugar_go(f, memo))),
        Kind::App(a, b) => Formula::app(desugar_go(a, memo), desugar_go(b, memo)),
        Kind::Lam { var, variance, ty, body } => {
            Formula::lam_named(var.clone(), *variance, ty.clone(), desugar_go(body, memo))
        }
        Kind::Mu { var, ty, body } => Formula::mu_named(var.clone(), ty.clone(), desugar_go(body, memo)),
        Kind::MuVec { index, bindings } => {
            let bindings: Vec<Binding> = bindings
                .iter()
                .map(|b| Binding { var: b.var.clone(), ty: b.ty.clone(), body: desugar_go(&b.body, memo) })
                .collect();
            let all = (1u64 << bindings.len()) - 1;
            bekic(&bindings, all, *index, &mut HashMap::new())
        }
    };
    memo.insert(phi.id(), r.clone());
    r
}

/// Component `i` of the subsystem `active` (bitmask over `bindings`), with the
/// variables outside `active` left free.
fn bekic(bindings: &[Binding], active: u64, i: usize, memo: &mut HashMap<(u64, usize), Formula>) -> Formula {
    if let Some(r) = memo.get(&(active, i)) {
        return r.clone();
    }
    let rest = active & !(1 << i);
    let mut body = bindings[i].body.clone();
    for j in 0..bindings.len() {
        if rest & (1 << j) != 0 && body.has_free(&bindings[j].var) {
            let sol = bekic(bindings, rest, j, memo);
            body = substitute(&body, &bindings[j].var, &sol);
        }
    }
    let r = Formula::mu_named(bindings[i].var.clone(), bindings[i].ty.clone(), body);
    memo.insert((active, i), r.clone());
    r
}

/// The Fischer–Ladner closure, in discovery order.
pub fn fl_closure(phi: &Formula) -> Vec<Formula> {
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut order = Vec::new();
    let mut stack = vec![phi.clone()];
    while let Some(f) = stack.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        order.push(f.clone());
        stack.extend(fl_successors(&f));
    }
    order
}

fn fl_successors(f: &Formula) -> Vec<Formula> {
    use Formula as F;
    match f.kind() {
        Kind::Or(a, b) => vec![a.clone(), b.clone()],
        Kind::Dia(_, g) => vec![g.clone()],
        Kind::App(a, b) => vec![a.clone(), b.clone(), F::neg(b.clone())],
        Kind::Lam { body, .. } | Kind::Mu { body, .. } => vec![body.clone()],
        Kind::MuVec { bindings, .. } => bindings.iter().map(|b| b.body.clone()).collect(),
        Kind::Neg(g) => match g.kind() {
            Kind::Or(a, b) => vec![F::neg(a.clone()), F::neg(b.clone())],
            Kind::Dia(_, h) => vec![F::neg(h.clone())],
            Kind::App(a, b) => vec![F::neg(a.clone()), b.clone(), F::neg(b.clone())],
            Kind::Lam { body, .. } => vec![F::neg(body.clone())],
            Kind::Mu { var, body, .. } => {
                vec![F::neg(substitute(body, var, &F::neg(F::var_named(var.clone()))))]
            }
            Kind::Neg(h) => vec![h.clone()],
            Kind::Var(_) | Kind::Prop(_) => vec![g.clone()],
            Kind::MuVec { .. } => Vec::new(),
        },
        Kind::Prop(_) | Kind::Var(_) => Vec::new(),
    }
}

/// `|φ|` and `v(φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Measures {
    pub size: u64,
    pub lam_vars: u64,
}

pub fn measures(phi: &Formula) -> Measures {
    let closure = fl_closure(phi);
    let mut names: HashSet<&Name> = HashSet::new();
    for f in &closure {
        if let Kind::Lam { var, .. } = f.kind() {
            names.insert(var);
        }
    }
    Measures { size: closure.len() as u64, lam_vars: names.len() as u64 }
}

/// Structural equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
        if a == b && env.iter().all(|(x, y)| x == y) {
            return true;
        }
        match (a.kind(), b.kind()) {
            (Kind::Prop(p), Kind::Prop(q)) => p == q,
            (Kind::Var(x), Kind::Var(y)) => {
                let bx = env.iter().rposition(|(l, _)| l == x);
                let by = env.iter().rposition(|(_, r)| r == y);
                match (bx, by) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Kind::Neg(f), Kind::Neg(g)) => go(f, g, env),
            (Kind::Or(a1, a2), Kind::Or(b1, b2)) | (Kind::App(a1, a2), Kind::App(b1, b2)) => {
                go(a1, b1, env) && go(a2, b2, env)
            }
            (Kind::Dia(x, f), Kind::Dia(y, g)) => x == y && go(f, g, env),
            (
                Kind::Lam { var: x, variance: v, ty: s, body: f },
                Kind::Lam { var: y, variance: w, ty: t, body: g },
            ) => v == w && s == t && binder(x, y, f, g, env),
            (Kind::Mu { var: x, ty: s, body: f }, Kind::Mu { var: y, ty: t, body: g }) => {
                s == t && binder(x, y, f, g, env)
            }
            (Kind::MuVec { index: i, bindings: bs }, Kind::MuVec { index: j, bindings: cs }) => {
                if i != j || bs.len() != cs.len() || bs.iter().zip(cs.iter()).any(|(b, c)| b.ty != c.ty) {
                    return false;
                }
                let depth = env.len();
                env.extend(bs.iter().zip(cs.iter()).map(|(b, c)| (b.var.clone(), c.var.clone())));
                let ok = bs.iter().zip(cs.iter()).all(|(b, c)| go(&b.body, &c.body, env));
                env.truncate(depth);
                ok
            }
            _ => false,
        }
    }
    fn binder(x: &Name, y: &Name, f: &Formula, g: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
        env.push((x.clone(), y.clone()));
        let ok = go(f, g, env);
        env.pop();
        ok
    }
    go(a, b, &mut Vec::new())
}
