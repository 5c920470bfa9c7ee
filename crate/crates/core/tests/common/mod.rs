//! Random transition systems and well-typed random formulas shared by the integration tests.
#![allow(dead_code)]

use hfl::syntax::{and, box_, nu, Kind};
use hfl::{Formula, HflType, Lts, Variance};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PROPS: [&str; 2] = ["p", "q"];
pub const ACTIONS: [&str; 2] = ["a", "b"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// An LTS with `n` states over [`ACTIONS`] and [`PROPS`].
pub fn random_lts(rng: &mut impl Rng, n: usize, edge_prob: f64) -> Lts {
    let mut lts = Lts::new(n);
    for s in 0..n {
        for a in ACTIONS {
            for t in 0..n {
                if rng.gen_bool(edge_prob) {
                    lts.add_edge(s, a, t);
                }
            }
        }
        for p in PROPS {
            if rng.gen_bool(0.5) {
                lts.add_label(s, p);
            }
        }
    }
    lts
}

pub fn pr_to_pr(v: Variance) -> HflType {
    HflType::arrow(HflType::Pr, v, HflType::Pr)
}

pub fn random_variance(rng: &mut impl Rng) -> Variance {
    *[Variance::Plus, Variance::Minus, Variance::Zero].choose(rng).unwrap()
}

#[derive(Clone)]
struct Entry {
    name: String,
    ty: HflType,
    variance: Variance,
}

#[derive(Clone, Default)]
pub struct Ctx(Vec<Entry>);

impl Ctx {
    pub fn with(&self, name: &str, ty: HflType, variance: Variance) -> Ctx {
        let mut c = self.clone();
        c.0.push(Entry { name: name.to_string(), ty, variance });
        c
    }

    fn flip(&self) -> Ctx {
        Ctx(self.0.iter().map(|e| Entry { variance: e.variance.complement(), ..e.clone() }).collect())
    }

    fn zero_only(&self) -> Ctx {
        Ctx(self.0.iter().filter(|e| e.variance == Variance::Zero).cloned().collect())
    }

    /// The context for an argument position of variance `v`.
    fn for_argument(&self, v: Variance) -> Ctx {
        match v {
            Variance::Plus => self.clone(),
            Variance::Minus => self.flip(),
            Variance::Zero => self.zero_only(),
        }
    }

    fn usable(&self, ty: &HflType) -> Vec<String> {
        self.0.iter().filter(|e| &e.ty == ty && e.variance != Variance::Minus).map(|e| e.name.clone()).collect()
    }
}

/// Generator of well-typed formulas.
pub struct FormulaGen {
    pub rng: ChaCha8Rng,
    /// Types that application arguments may have; `[Pr]` gives order-1 formulas.
    pub arg_types: Vec<HflType>,
    /// Whether applications and abstractions are generated at all.
    pub higher_order: bool,
    pub fixpoints: bool,
    /// Largest number of arguments of a single application.
    pub max_args: usize,
    /// Largest order of a function type that may be bound by a fixpoint.
    pub max_fix_order: u32,
    fresh: usize,
}

impl FormulaGen {
    /// Modal μ-calculus formulas only.
    pub fn mu_calculus(seed: u64) -> FormulaGen {
        FormulaGen { rng: rng(seed), arg_types: vec![], higher_order: false, fixpoints: true, max_args: 0, max_fix_order: 0, fresh: 0 }
    }

    /// Formulas whose arguments range over `arg_types`.
    pub fn higher_order(seed: u64, arg_types: Vec<HflType>, max_args: usize) -> FormulaGen {
        FormulaGen { rng: rng(seed), arg_types, higher_order: true, fixpoints: true, max_args, max_fix_order: 1, fresh: 0 }
    }

    pub fn fresh(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    pub fn closed(&mut self, depth: u32) -> Formula {
        self.pr(&Ctx::default(), depth)
    }

    pub fn of_type(&mut self, ty: &HflType, ctx: &Ctx, depth: u32) -> Formula {
        match ty {
            HflType::Pr => self.pr(ctx, depth),
            _ => self.fun(ty, ctx, depth),
        }
    }

    fn leaf(&mut self, ctx: &Ctx) -> Formula {
        let vars = ctx.usable(&HflType::Pr);
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            return Formula::var(vars.choose(&mut self.rng).unwrap());
        }
        match self.rng.gen_range(0..6) {
            0 => hfl::syntax::tt(),
            1 => hfl::syntax::ff(),
            _ => Formula::prop(PROPS.choose(&mut self.rng).unwrap()),
        }
    }

    pub fn pr(&mut self, ctx: &Ctx, depth: u32) -> Formula {
        if depth == 0 {
            return self.leaf(ctx);
        }
        let d = depth - 1;
        let action = *ACTIONS.choose(&mut self.rng).unwrap();
        let pick = self.rng.gen_range(0..if self.higher_order { 13 } else { 11 });
        match pick {
            0 | 1 => self.leaf(ctx),
            2 => Formula::neg(self.pr(&ctx.flip(), d)),
            3 | 4 => Formula::or(self.pr(ctx, d), self.pr(ctx, d)),
            5 => and(self.pr(ctx, d), self.pr(ctx, d)),
            6 | 7 => Formula::dia(action, self.pr(ctx, d)),
            8 => box_(action, self.pr(ctx, d)),
            9 | 10 if self.fixpoints => {
                let x = self.fresh("X");
                let inner = ctx.with(&x, HflType::Pr, Variance::Plus);
                let body = self.pr(&inner, d);
                if pick == 9 {
                    Formula::mu(&x, HflType::Pr, body)
                } else {
                    nu(&x, HflType::Pr, body)
                }
            }
            9 | 10 => self.leaf(ctx),
            _ => self.application(ctx, d),
        }
    }

    /// `f a1 ... am : Pr` with a randomly chosen function type.
    fn application(&mut self, ctx: &Ctx, depth: u32) -> Formula {
        let m = self.rng.gen_range(1..=self.max_args.max(1));
        let mut args = Vec::with_capacity(m);
        for _ in 0..m {
            let t = self.arg_types.choose(&mut self.rng).unwrap().clone();
            args.push((t, random_variance(&mut self.rng)));
        }
        let fty = HflType::curried(&args, HflType::Pr);
        let f = self.fun(&fty, ctx, depth);
        let actual: Vec<Formula> =
            args.iter().map(|(t, v)| self.of_type(t, &ctx.for_argument(*v), depth.saturating_sub(1))).collect();
        Formula::apps(f, actual)
    }

    pub fn fun(&mut self, ty: &HflType, ctx: &Ctx, depth: u32) -> Formula {
        let (arg, v, res) = ty.split().expect("function type");
        let vars = ctx.usable(ty);
        let pick = if depth == 0 { 0 } else { self.rng.gen_range(0..10) };
        match pick {
            1 | 2 if !vars.is_empty() => Formula::var(vars.choose(&mut self.rng).unwrap()),
            3 if self.fixpoints && ty.ord() <= self.max_fix_order => {
                let f = self.fresh("F");
                let inner = ctx.with(&f, ty.clone(), Variance::Plus);
                let body = self.lambda(arg, v, res, &inner, depth - 1);
                Formula::mu(&f, ty.clone(), body)
            }
            4 => Formula::neg(self.fun(ty, &ctx.flip(), depth - 1)),
            _ => self.lambda(arg, v, res, ctx, depth.saturating_sub(1)),
        }
    }

    fn lambda(&mut self, arg: &HflType, v: Variance, res: &HflType, ctx: &Ctx, depth: u32) -> Formula {
        let x = self.fresh(if arg.is_ground() { "Y" } else { "G" });
        let inner = ctx.with(&x, arg.clone(), v);
        let body = self.of_type(res, &inner, depth);
        Formula::lam(&x, v, arg.clone(), body)
    }
}

/// Nesting depth of the formula tree.
pub fn depth(f: &Formula) -> usize {
    match f.kind() {
        Kind::Prop(_) | Kind::Var(_) => 0,
        Kind::Neg(a) | Kind::Dia(_, a) | Kind::Lam { body: a, .. } | Kind::Mu { body: a, .. } => 1 + depth(a),
        Kind::Or(a, b) | Kind::App(a, b) => 1 + depth(a).max(depth(b)),
        Kind::MuVec { bindings, .. } => 1 + bindings.iter().map(|b| depth(&b.body)).max().unwrap_or(0),
    }
}
