use std::cell::OnceCell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::{lfp_global, Engine, EvalConfig, EvalError, EvalStats};
use crate::denote::{bit_width, Bitset, LatticeEnum};
use crate::lts::Lts;
use crate::syntax::{Formula, Kind, Name};
use crate::typesys::HflType;

/// A runtime value. Sets and tables are canonical; the other forms are suspended.
#[derive(Clone)]
pub(crate) enum Value {
    Set(Bitset),
    Table(HflType, Bitset),
    Closure(Rc<Closure>),
    Neg(Rc<Value>),
    Fix(Rc<FixRef>),
}

pub(crate) struct Closure {
    var: Name,
    body: Formula,
    lam_id: u64,
    env: Env,
    key: OnceCell<(VKey, Rc<[usize]>)>,
}

pub(crate) struct FixRef {
    inst: usize,
    comp: usize,
    args: Vec<Bitset>,
}

/// Structural identity of a value. Equal keys denote equal values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum VKey {
    Bits(Bitset),
    Clo(u64, Rc<[VKey]>),
    Neg(Rc<VKey>),
    Fix(usize, usize, Rc<[Bitset]>),
}

pub(crate) fn value_of(ty: &HflType, bits: Bitset) -> Value {
    if ty.is_ground() {
        Value::Set(bits)
    } else {
        Value::Table(ty.clone(), bits)
    }
}

fn negate(v: Value) -> Value {
    match v {
        Value::Set(b) => Value::Set(b.complement()),
        Value::Table(t, b) => Value::Table(t, b.complement()),
        Value::Neg(inner) => (*inner).clone(),
        other => Value::Neg(Rc::new(other)),
    }
}

#[derive(Clone, Default)]
pub(crate) struct Env(Option<Rc<EnvCell>>);

struct EnvCell {
    name: Name,
    value: Value,
    next: Env,
}

impl Env {
    pub(crate) fn bind(&self, name: Name, value: Value) -> Env {
        Env(Some(Rc::new(EnvCell { name, value, next: self.clone() })))
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(cell) = cur {
            if &*cell.name == name {
                return Some(&cell.value);
            }
            cur = &cell.next.0;
        }
        None
    }

    fn restrict(&self, names: &[Name]) -> Result<Env, EvalError> {
        let mut out = Env::default();
        for x in names.iter().rev() {
            let v = self.lookup(x).ok_or_else(|| EvalError::Unbound(x.to_string()))?;
            out = out.bind(x.clone(), v.clone());
        }
        Ok(out)
    }

    fn values(&self) -> impl Iterator<Item = &Value> {
        let mut cur = &self.0;
        std::iter::from_fn(move || {
            let cell = cur.as_ref()?;
            cur = &cell.next.0;
            Some(&cell.value)
        })
    }
}

type EntryKey = (usize, Vec<Bitset>);

struct Instance {
    vars: Vec<Name>,
    tys: Vec<HflType>,
    bodies: Vec<Formula>,
    env: Env,
    rhs_env: Env,
    /// Shared between uses; false when the environment mentions another fixpoint.
    persistent: bool,
    solving: bool,
    current: Option<EntryKey>,
    vals: HashMap<EntryKey, (Bitset, u64)>,
    infl: HashMap<EntryKey, HashSet<EntryKey>>,
    worklist: Vec<EntryKey>,
    queued: HashSet<EntryKey>,
    global: Option<Vec<Bitset>>,
}

impl Instance {
    fn push(&mut self, key: EntryKey) {
        if self.queued.insert(key.clone()) {
            self.worklist.push(key);
        }
    }
}

pub(crate) struct Evaluator<'a> {
    lts: &'a Lts,
    n: usize,
    cfg: &'a EvalConfig,
    pub(crate) stats: EvalStats,
    props: HashMap<Name, Bitset>,
    domains: HashMap<HflType, (u64, usize)>,
    widths: HashMap<HflType, usize>,
    instances: Vec<Instance>,
    instance_table: HashMap<(u64, Rc<[VKey]>), usize>,
    node_memo: HashMap<(u64, Rc<[VKey]>), Value>,
    app_memo: HashMap<(VKey, VKey), Value>,
    reify_memo: HashMap<VKey, Bitset>,
}

fn internal(msg: &str) -> EvalError {
    EvalError::Internal(msg.to_string())
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(lts: &'a Lts, cfg: &'a EvalConfig) -> Evaluator<'a> {
        Evaluator {
            lts,
            n: lts.state_count(),
            cfg,
            stats: EvalStats::default(),
            props: HashMap::new(),
            domains: HashMap::new(),
            widths: HashMap::new(),
            instances: Vec::new(),
            instance_table: HashMap::new(),
            node_memo: HashMap::new(),
            app_memo: HashMap::new(),
            reify_memo: HashMap::new(),
        }
    }

    fn width(&mut self, ty: &HflType) -> Result<usize, EvalError> {
        if let Some(&w) = self.widths.get(ty) {
            return Ok(w);
        }
        let w = bit_width(ty, self.n)?;
        self.widths.insert(ty.clone(), w);
        Ok(w)
    }

    /// Number of elements of `⟦ty⟧` and their width, if enumerable within the limit.
    fn domain(&mut self, ty: &HflType) -> Result<(u64, usize), EvalError> {
        if let Some(&d) = self.domains.get(ty) {
            return Ok(d);
        }
        let e = LatticeEnum::new(ty, self.n, self.cfg.element_limit)?;
        let d = (e.len(), e.width());
        self.domains.insert(ty.clone(), d);
        Ok(d)
    }

    fn prop(&mut self, p: &Name) -> Bitset {
        if let Some(b) = self.props.get(p) {
            return b.clone();
        }
        let b = Bitset::from_indices(self.n, (0..self.n).filter(|&s| self.lts.has_label(s, p)));
        self.props.insert(p.clone(), b.clone());
        b
    }

    fn pre(&self, action: &str, target: &Bitset) -> Bitset {
        let mut out = Bitset::empty(self.n);
        for t in target.iter() {
            for &s in self.lts.predecessors(action, t) {
                out.insert(s);
            }
        }
        out
    }

    // ---- keys and volatility

    fn vkey(&self, v: &Value, refs: &mut Vec<usize>) -> VKey {
        match v {
            Value::Set(b) | Value::Table(_, b) => VKey::Bits(b.clone()),
            Value::Neg(inner) => VKey::Neg(Rc::new(self.vkey(inner, refs))),
            Value::Fix(f) => {
                refs.push(f.inst);
                VKey::Fix(f.inst, f.comp, f.args.clone().into())
            }
            Value::Closure(c) => {
                let (k, r) = c.key.get_or_init(|| {
                    let mut inner = Vec::new();
                    let keys: Vec<VKey> = c.env.values().map(|v| self.vkey(v, &mut inner)).collect();
                    inner.sort_unstable();
                    inner.dedup();
                    (VKey::Clo(c.lam_id, keys.into()), inner.into())
                });
                refs.extend(r.iter().copied());
                k.clone()
            }
        }
    }

    fn env_key(&self, names: &[Name], env: &Env) -> Result<(Rc<[VKey]>, Vec<usize>), EvalError> {
        let mut refs = Vec::new();
        let mut keys = Vec::with_capacity(names.len());
        for x in names {
            let v = env.lookup(x).ok_or_else(|| EvalError::Unbound(x.to_string()))?;
            keys.push(self.vkey(v, &mut refs));
        }
        Ok((keys.into(), refs))
    }

    /// A key mentioning these fixpoint instances may be stored in a memo table.
    fn stable(&self, refs: &[usize]) -> bool {
        refs.iter().all(|&i| self.instances[i].persistent && !self.instances[i].solving)
    }

    fn value_is_stable(&self, v: &Value) -> bool {
        let mut refs = Vec::new();
        match v {
            Value::Set(_) | Value::Table(..) => return true,
            _ => {
                self.vkey(v, &mut refs);
            }
        }
        self.stable(&refs)
    }

    fn node_key(&self, phi: &Formula, env: &Env) -> Result<Option<(u64, Rc<[VKey]>)>, EvalError> {
        let (keys, refs) = self.env_key(phi.free_vars(), env)?;
        Ok(self.stable(&refs).then(|| (phi.id(), keys)))
    }

    fn remember(&mut self, key: Option<(u64, Rc<[VKey]>)>, v: &Value) {
        if let Some(k) = key {
            if self.value_is_stable(v) {
                self.node_memo.insert(k, v.clone());
            }
        }
    }

    // ---- evaluation

    pub(crate) fn eval(&mut self, phi: &Formula, env: &Env) -> Result<Value, EvalError> {
        stacker::maybe_grow(256 * 1024, 64 * 1024 * 1024, || self.eval_node(phi, env))
    }

    fn eval_set(&mut self, phi: &Formula, env: &Env) -> Result<Bitset, EvalError> {
        match self.eval(phi, env)? {
            Value::Set(b) => Ok(b),
            _ => Err(internal("expected a state set")),
        }
    }

    fn eval_node(&mut self, phi: &Formula, env: &Env) -> Result<Value, EvalError> {
        match phi.kind() {
            Kind::Prop(p) => Ok(Value::Set(self.prop(p))),
            Kind::Var(x) => {
                let v = env.lookup(x).cloned().ok_or_else(|| EvalError::Unbound(x.to_string()))?;
                self.force(v)
            }
            Kind::Neg(f) => Ok(negate(self.eval(f, env)?)),
            Kind::Or(a, b) => {
                let va = self.eval_set(a, env)?;
                if va.is_full() {
                    return Ok(Value::Set(va));
                }
                let vb = self.eval_set(b, env)?;
                Ok(Value::Set(va.union(&vb)))
            }
            Kind::Dia(act, f) => {
                let s = self.eval_set(f, env)?;
                Ok(Value::Set(self.pre(act, &s)))
            }
            Kind::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(&fv, av)
            }
            Kind::Lam { var, ty, body, .. } => match self.cfg.engine {
                Engine::Demand => Ok(Value::Closure(Rc::new(Closure {
                    var: var.clone(),
                    body: body.clone(),
                    lam_id: phi.id(),
                    env: env.restrict(phi.free_vars())?,
                    key: OnceCell::new(),
                }))),
                Engine::Tabulate => self.tabulate_lam(phi, var, ty, body, env),
            },
            Kind::Mu { var, ty, body } => {
                let key = self.node_key(phi, env)?;
                if let Some(v) = key.as_ref().and_then(|k| self.node_memo.get(k)) {
                    self.stats.memo_hits += 1;
                    return Ok(v.clone());
                }
                let v = if ty.is_ground() || self.cfg.engine == Engine::Tabulate {
                    self.global_mu(std::slice::from_ref(var), std::slice::from_ref(ty), std::slice::from_ref(body), env)?
                        .swap_remove(0)
                } else {
                    let inst = self.instance(phi, vec![(var.clone(), ty.clone(), body.clone())], env)?;
                    Value::Fix(Rc::new(FixRef { inst, comp: 0, args: Vec::new() }))
                };
                self.remember(key, &v);
                Ok(v)
            }
            Kind::MuVec { index, bindings } => {
                let key = self.node_key(phi, env)?;
                if let Some(v) = key.as_ref().and_then(|k| self.node_memo.get(k)) {
                    self.stats.memo_hits += 1;
                    return Ok(v.clone());
                }
                let v = if self.cfg.engine == Engine::Tabulate || bindings.iter().all(|b| b.ty.is_ground()) {
                    let vars: Vec<Name> = bindings.iter().map(|b| b.var.clone()).collect();
                    let tys: Vec<HflType> = bindings.iter().map(|b| b.ty.clone()).collect();
                    let bodies: Vec<Formula> = bindings.iter().map(|b| b.body.clone()).collect();
                    self.global_mu(&vars, &tys, &bodies, env)?.swap_remove(*index)
                } else {
                    let comps = bindings.iter().map(|b| (b.var.clone(), b.ty.clone(), b.body.clone())).collect();
                    let inst = self.instance(phi, comps, env)?;
                    self.force(Value::Fix(Rc::new(FixRef { inst, comp: *index, args: Vec::new() })))?
                };
                self.remember(key, &v);
                Ok(v)
            }
        }
    }

    /// Reads a fixpoint component that needs no further arguments.
    fn force(&mut self, v: Value) -> Result<Value, EvalError> {
        if let Value::Fix(f) = &v {
            if f.args.len() == self.instances[f.inst].tys[f.comp].arity() {
                return Ok(Value::Set(self.read(f.inst, f.comp, f.args.clone())?));
            }
        }
        Ok(v)
    }

    pub(crate) fn apply(&mut self, f: &Value, arg: Value) -> Result<Value, EvalError> {
        match f {
            Value::Set(_) => Err(internal("applying a state set")),
            Value::Table(ty, bits) => {
                let (sigma, _, res) = ty.split().ok_or_else(|| internal("table of ground type"))?;
                let j = self.reify(&arg, sigma)?;
                let w = self.width(res)?;
                let j = j.to_u64().ok_or_else(|| internal("argument index overflow"))? as usize;
                Ok(value_of(res, bits.slice(j * w, w)))
            }
            Value::Closure(c) => {
                let mut refs = Vec::new();
                let ck = self.vkey(f, &mut refs);
                let ak = self.vkey(&arg, &mut refs);
                let key = self.stable(&refs).then_some((ck, ak));
                if let Some(v) = key.as_ref().and_then(|k| self.app_memo.get(k)) {
                    self.stats.memo_hits += 1;
                    return Ok(v.clone());
                }
                let env = c.env.bind(c.var.clone(), arg);
                let r = self.eval(&c.body, &env)?;
                if let Some(k) = key {
                    if self.value_is_stable(&r) {
                        self.app_memo.insert(k, r.clone());
                    }
                }
                Ok(r)
            }
            Value::Neg(inner) => Ok(negate(self.apply(inner, arg)?)),
            Value::Fix(fr) => {
                let ty = self.instances[fr.inst].tys[fr.comp].clone();
                let args = ty.args();
                let (sigma, _) = args.get(fr.args.len()).ok_or_else(|| internal("too many arguments"))?;
                let bits = self.reify(&arg, sigma)?;
                let mut next = fr.args.clone();
                next.push(bits);
                if next.len() == args.len() {
                    Ok(Value::Set(self.read(fr.inst, fr.comp, next)?))
                } else {
                    Ok(Value::Fix(Rc::new(FixRef { inst: fr.inst, comp: fr.comp, args: next })))
                }
            }
        }
    }

    /// The canonical bit vector of `v` at type `ty`.
    pub(crate) fn reify(&mut self, v: &Value, ty: &HflType) -> Result<Bitset, EvalError> {
        match v {
            Value::Set(b) | Value::Table(_, b) => Ok(b.clone()),
            Value::Neg(inner) => Ok(self.reify(inner, ty)?.complement()),
            Value::Closure(_) | Value::Fix(_) => {
                let mut refs = Vec::new();
                let key = self.vkey(v, &mut refs);
                let stable = self.stable(&refs);
                if stable {
                    if let Some(b) = self.reify_memo.get(&key) {
                        self.stats.memo_hits += 1;
                        return Ok(b.clone());
                    }
                }
                let (sigma, _, res) = ty.split().ok_or_else(|| internal("function value at ground type"))?;
                let (count, arg_width) = self.domain(sigma)?;
                let w = self.width(res)?;
                let mut out = Bitset::empty(count as usize * w);
                for j in 0..count {
                    let a = value_of(sigma, Bitset::from_u64(j, arg_width));
                    let r = self.apply(v, a)?;
                    let rb = self.reify(&r, res)?;
                    out.or_at(j as usize * w, &rb);
                }
                if stable && self.stable(&refs) {
                    self.reify_memo.insert(key, out.clone());
                }
                Ok(out)
            }
        }
    }

    fn tabulate_lam(
        &mut self,
        phi: &Formula,
        var: &Name,
        sigma: &HflType,
        body: &Formula,
        env: &Env,
    ) -> Result<Value, EvalError> {
        let key = self.node_key(phi, env)?;
        if let Some(v) = key.as_ref().and_then(|k| self.node_memo.get(k)) {
            self.stats.memo_hits += 1;
            return Ok(v.clone());
        }
        let (count, arg_width) = self.domain(sigma)?;
        let variance = match phi.kind() {
            Kind::Lam { variance, .. } => *variance,
            _ => unreachable!(),
        };
        let mut parts = Vec::with_capacity(count as usize);
        let mut res_ty = HflType::Pr;
        for j in 0..count {
            let a = value_of(sigma, Bitset::from_u64(j, arg_width));
            match self.eval(body, &env.bind(var.clone(), a))? {
                Value::Set(b) => parts.push(b),
                Value::Table(t, b) => {
                    res_ty = t;
                    parts.push(b);
                }
                _ => return Err(internal("suspended value in tabulating mode")),
            }
        }
        let w = parts[0].len();
        let v = Value::Table(HflType::arrow(sigma.clone(), variance, res_ty), Bitset::concat(&parts, w, parts.len()));
        self.remember(key, &v);
        Ok(v)
    }

    /// Simultaneous fixpoint by global iteration over complete tables.
    fn global_mu(
        &mut self,
        vars: &[Name],
        tys: &[HflType],
        bodies: &[Formula],
        env: &Env,
    ) -> Result<Vec<Value>, EvalError> {
        let widths = tys.iter().map(|t| self.width(t)).collect::<Result<Vec<_>, _>>()?;
        let tables = self.iterate_tables(vars, tys, bodies, &widths, env)?;
        Ok(tys.iter().zip(tables).map(|(t, b)| value_of(t, b)).collect())
    }

    fn iterate_tables(
        &mut self,
        vars: &[Name],
        tys: &[HflType],
        bodies: &[Formula],
        widths: &[usize],
        env: &Env,
    ) -> Result<Vec<Bitset>, EvalError> {
        let total: usize = widths.iter().sum();
        let split = |x: &Bitset| -> Vec<Bitset> {
            let mut off = 0;
            widths
                .iter()
                .map(|&w| {
                    let part = x.slice(off, w);
                    off += w;
                    part
                })
                .collect()
        };
        let cap = self.cfg.iteration_cap;
        let it = lfp_global(total, cap, |x| {
            let parts = split(x);
            let mut e = env.clone();
            for ((v, t), p) in vars.iter().zip(tys).zip(&parts) {
                e = e.bind(v.clone(), value_of(t, p.clone()));
            }
            let mut next = Vec::with_capacity(parts.len());
            for (body, t) in bodies.iter().zip(tys) {
                let r = self.eval(body, &e)?;
                next.push(self.reify(&r, t)?);
            }
            self.stats.fixpoint_iterations += 1;
            Ok(Bitset::concat_varied(&next))
        })?;
        if !it.increasing || !it.converged {
            self.stats.non_monotone_steps += 1;
        }
        Ok(split(&it.value))
    }

    // ---- local solving

    fn instance(&mut self, phi: &Formula, comps: Vec<(Name, HflType, Formula)>, env: &Env) -> Result<usize, EvalError> {
        let (keys, refs) = self.env_key(phi.free_vars(), env)?;
        let persistent = refs.is_empty();
        if persistent {
            if let Some(&i) = self.instance_table.get(&(phi.id(), keys.clone())) {
                return Ok(i);
            }
        }
        let idx = self.instances.len();
        let env = env.restrict(phi.free_vars())?;
        let mut rhs_env = env.clone();
        for (c, (var, _, _)) in comps.iter().enumerate() {
            rhs_env = rhs_env.bind(var.clone(), Value::Fix(Rc::new(FixRef { inst: idx, comp: c, args: Vec::new() })));
        }
        let mut vars = Vec::new();
        let mut tys = Vec::new();
        let mut bodies = Vec::new();
        for (v, t, b) in comps {
            vars.push(v);
            tys.push(t);
            bodies.push(b);
        }
        self.instances.push(Instance {
            vars,
            tys,
            bodies,
            env,
            rhs_env,
            persistent,
            solving: false,
            current: None,
            vals: HashMap::new(),
            infl: HashMap::new(),
            worklist: Vec::new(),
            queued: HashSet::new(),
            global: None,
        });
        if persistent {
            self.instance_table.insert((phi.id(), keys), idx);
        }
        Ok(idx)
    }

    fn read(&mut self, i: usize, comp: usize, args: Vec<Bitset>) -> Result<Bitset, EvalError> {
        if self.instances[i].global.is_some() {
            return self.read_global(i, comp, &args);
        }
        let key = (comp, args);
        let w = self.width(&self.instances[i].tys[comp].clone())?;
        let res_width = self.n;
        debug_assert!(w >= res_width);
        let inst = &mut self.instances[i];
        if inst.solving {
            if !inst.vals.contains_key(&key) {
                inst.vals.insert(key.clone(), (Bitset::empty(res_width), 0));
                inst.push(key.clone());
                self.stats.solver_entries += 1;
            }
            if let Some(cur) = inst.current.clone() {
                inst.infl.entry(key.clone()).or_default().insert(cur);
            }
            return Ok(inst.vals[&key].0.clone());
        }
        if let Some((v, _)) = inst.vals.get(&key) {
            return Ok(v.clone());
        }
        inst.vals.insert(key.clone(), (Bitset::empty(res_width), 0));
        inst.push(key.clone());
        self.stats.solver_entries += 1;
        self.run(i)?;
        if self.instances[i].global.is_some() {
            return self.read_global(i, key.0, &key.1);
        }
        Ok(self.instances[i].vals[&key].0.clone())
    }

    fn read_global(&mut self, i: usize, comp: usize, args: &[Bitset]) -> Result<Bitset, EvalError> {
        let ty = self.instances[i].tys[comp].clone();
        let mut offset = 0usize;
        let mut t = &ty;
        for a in args {
            let (_, _, res) = t.split().ok_or_else(|| internal("too many arguments"))?;
            let w = self.width(res)?;
            offset += a.to_u64().ok_or_else(|| internal("argument index overflow"))? as usize * w;
            t = res;
        }
        let table = &self.instances[i].global.as_ref().expect("global tables")[comp];
        Ok(table.slice(offset, self.n))
    }

    fn run(&mut self, i: usize) -> Result<(), EvalError> {
        self.instances[i].solving = true;
        let r = self.run_loop(i);
        let inst = &mut self.instances[i];
        inst.solving = false;
        inst.current = None;
        r
    }

    fn run_loop(&mut self, i: usize) -> Result<(), EvalError> {
        loop {
            let key = {
                let inst = &mut self.instances[i];
                match inst.worklist.pop() {
                    Some(k) => {
                        inst.queued.remove(&k);
                        k
                    }
                    None => return Ok(()),
                }
            };
            let prev = self.instances[i].current.replace(key.clone());
            let new = self.rhs(i, &key);
            self.instances[i].current = prev;
            let new = new?;
            self.stats.fixpoint_iterations += 1;
            let cap = self.cfg.iteration_cap;
            let inst = &mut self.instances[i];
            let (old, updates) = inst.vals.get_mut(&key).expect("queued entries have a value");
            if new == *old {
                continue;
            }
            if !old.is_subset(&new) {
                self.stats.non_monotone_steps += 1;
                return self.globalize(i);
            }
            *old = new;
            *updates += 1;
            if let Some(c) = cap {
                if *updates > c {
                    return Err(EvalError::IterationCap { cap: c });
                }
            }
            if let Some(readers) = inst.infl.get(&key) {
                let mut readers: Vec<EntryKey> = readers.iter().cloned().collect();
                readers.sort_unstable();
                for r in readers {
                    inst.push(r);
                }
            }
        }
    }

    fn rhs(&mut self, i: usize, key: &EntryKey) -> Result<Bitset, EvalError> {
        let (comp, args) = key;
        let inst = &self.instances[i];
        let body = inst.bodies[*comp].clone();
        let ty = inst.tys[*comp].clone();
        let env = inst.rhs_env.clone();
        let mut v = self.eval(&body, &env)?;
        for (a, (sigma, _)) in args.iter().zip(ty.args()) {
            v = self.apply(&v, value_of(sigma, a.clone()))?;
        }
        match self.force(v)? {
            Value::Set(b) => Ok(b),
            _ => Err(internal("fixpoint body did not yield a state set")),
        }
    }

    /// Falls back to global iteration after a decreasing update.
    fn globalize(&mut self, i: usize) -> Result<(), EvalError> {
        let (vars, tys, bodies, env) = {
            let inst = &self.instances[i];
            (inst.vars.clone(), inst.tys.clone(), inst.bodies.clone(), inst.env.clone())
        };
        for t in &tys {
            let mut a = t;
            while let Some((sigma, _, res)) = a.split() {
                self.domain(sigma)?;
                a = res;
            }
        }
        let widths = tys.iter().map(|t| self.width(t)).collect::<Result<Vec<_>, _>>()?;
        let tables = self.iterate_tables(&vars, &tys, &bodies, &widths, &env)?;
        let inst = &mut self.instances[i];
        inst.global = Some(tables);
        inst.vals.clear();
        inst.infl.clear();
        inst.worklist.clear();
        inst.queued.clear();
        Ok(())
    }
}
