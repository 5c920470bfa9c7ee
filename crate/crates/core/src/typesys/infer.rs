use std::collections::HashMap;

use thiserror::Error;

use super::{HflType, Variance};
use crate::syntax::{Formula, Kind, Name};

/// Typing context: variables with variance and type. Later entries shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(Name, Variance, HflType)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn with(mut self, name: &str, variance: Variance, ty: HflType) -> Context {
        self.push(name.into(), variance, ty);
        self
    }

    fn push(&mut self, name: Name, variance: Variance, ty: HflType) {
        self.entries.retain(|(x, _, _)| *x != name);
        self.entries.push((name, variance, ty));
    }

    pub fn lookup(&self, name: &str) -> Option<(Variance, &HflType)> {
        self.entries.iter().rev().find(|(x, _, _)| &**x == name).map(|(_, v, t)| (*v, t))
    }

    pub fn complement(&self) -> Context {
        Context {
            entries: self.entries.iter().map(|(x, v, t)| (x.clone(), v.complement(), t.clone())).collect(),
        }
    }

    fn restrict(&self, names: &[Name]) -> Vec<(Name, Variance, HflType)> {
        names
            .iter()
            .filter_map(|x| self.lookup(x).map(|(v, t)| (x.clone(), v, t.clone())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable {name} in `{formula}`")]
    Unbound { name: String, formula: String },
    #[error("variable {name} has variance {variance:?} and cannot be used here: `{formula}`")]
    Variance { name: String, variance: Variance, formula: String },
    #[error("argument of type {found} where {expected} was expected: `{formula}`")]
    ArgumentMismatch { expected: String, found: String, formula: String },
    #[error("applied formula of type {found} is not a function: `{formula}`")]
    NotAFunction { found: String, formula: String },
    #[error("operand of type {found} where Pr was expected: `{formula}`")]
    NotGround { found: String, formula: String },
    #[error("fixpoint body has type {found} but {declared} was declared: `{formula}`")]
    FixpointMismatch { declared: String, found: String, formula: String },
}

fn excerpt(f: &Formula) -> String {
    let s = crate::surface::print_formula(f);
    if s.len() > 160 {
        let cut = (0..=157).rev().find(|&i| s.is_char_boundary(i)).unwrap_or(0);
        format!("{}...", &s[..cut])
    } else {
        s
    }
}

/// Result of a successful type check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typing {
    pub ty: HflType,
    /// Maximal order over all types in the derivation.
    pub ord: u32,
    /// Maximal arity over all types in the derivation.
    pub mar: u32,
}

type MemoKey = (u64, Vec<(Name, Variance, HflType)>);

struct Checker {
    memo: HashMap<MemoKey, HflType>,
    ord: u32,
    mar: u32,
}

impl Checker {
    fn record(&mut self, t: &HflType) {
        self.ord = self.ord.max(t.ord());
        self.mar = self.mar.max(t.mar());
    }

    fn check(&mut self, ctx: &Context, phi: &Formula) -> Result<HflType, TypeError> {
        let key = (phi.id(), ctx.restrict(phi.free_vars()));
        if let Some(t) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let t = self.rule(ctx, phi)?;
        self.record(&t);
        self.memo.insert(key, t.clone());
        Ok(t)
    }

    fn ground(&mut self, ctx: &Context, phi: &Formula) -> Result<(), TypeError> {
        let t = self.check(ctx, phi)?;
        if t.is_ground() {
            Ok(())
        } else {
            Err(TypeError::NotGround { found: t.to_string(), formula: excerpt(phi) })
        }
    }

    fn rule(&mut self, ctx: &Context, phi: &Formula) -> Result<HflType, TypeError> {
        match phi.kind() {
            Kind::Prop(_) => Ok(HflType::Pr),
            Kind::Var(x) => match ctx.lookup(x) {
                None => Err(TypeError::Unbound { name: x.to_string(), formula: excerpt(phi) }),
                Some((Variance::Minus, _)) => {
                    Err(TypeError::Variance { name: x.to_string(), variance: Variance::Minus, formula: excerpt(phi) })
                }
                Some((_, t)) => Ok(t.clone()),
            },
            Kind::Neg(f) => self.check(&ctx.complement(), f),
            Kind::Or(a, b) => {
                self.ground(ctx, a)?;
                self.ground(ctx, b)?;
                Ok(HflType::Pr)
            }
            Kind::Dia(_, f) => {
                self.ground(ctx, f)?;
                Ok(HflType::Pr)
            }
            Kind::App(f, arg) => {
                let ft = self.check(ctx, f)?;
                let (sigma, v, tau) = match ft.split() {
                    Some(s) => s,
                    None => return Err(TypeError::NotAFunction { found: ft.to_string(), formula: excerpt(phi) }),
                };
                let mut check_arg = |c: &Context| -> Result<(), TypeError> {
                    let at = self.check(c, arg)?;
                    if &at != sigma {
                        return Err(TypeError::ArgumentMismatch {
                            expected: sigma.to_string(),
                            found: at.to_string(),
                            formula: excerpt(phi),
                        });
                    }
                    Ok(())
                };
                match v {
                    Variance::Plus => check_arg(ctx)?,
                    Variance::Minus => check_arg(&ctx.complement())?,
                    Variance::Zero => {
                        check_arg(ctx)?;
                        check_arg(&ctx.complement())?;
                    }
                }
                Ok(tau.clone())
            }
            Kind::Lam { var, variance, ty, body } => {
                let mut inner = ctx.clone();
                inner.push(var.clone(), *variance, ty.clone());
                self.record(ty);
                let bt = self.check(&inner, body)?;
                Ok(HflType::arrow(ty.clone(), *variance, bt))
            }
            Kind::Mu { var, ty, body } => {
                let mut inner = ctx.clone();
                inner.push(var.clone(), Variance::Plus, ty.clone());
                let bt = self.check(&inner, body)?;
                if &bt != ty {
                    return Err(TypeError::FixpointMismatch {
                        declared: ty.to_string(),
                        found: bt.to_string(),
                        formula: excerpt(phi),
                    });
                }
                Ok(ty.clone())
            }
            Kind::MuVec { index, bindings } => {
                let mut inner = ctx.clone();
                for b in bindings.iter() {
                    inner.push(b.var.clone(), Variance::Plus, b.ty.clone());
                }
                for b in bindings.iter() {
                    let bt = self.check(&inner, &b.body)?;
                    if bt != b.ty {
                        return Err(TypeError::FixpointMismatch {
                            declared: b.ty.to_string(),
                            found: bt.to_string(),
                            formula: excerpt(&b.body),
                        });
                    }
                }
                Ok(bindings[*index].ty.clone())
            }
        }
    }
}

/// Checks `Γ ⊢ φ : τ` and returns `τ` with the order and arity of the derivation.
pub fn infer(ctx: &Context, phi: &Formula) -> Result<Typing, TypeError> {
    let mut c = Checker { memo: HashMap::new(), ord: 0, mar: 0 };
    let ty = c.check(ctx, phi)?;
    Ok(Typing { ty, ord: c.ord, mar: c.mar })
}

pub fn infer_closed(phi: &Formula) -> Result<Typing, TypeError> {
    infer(&Context::new(), phi)
}

/// The fragment `HFL(k, m)` witnessed by the annotated derivation of a closed formula.
pub fn fragment(phi: &Formula) -> Result<(u32, u32), TypeError> {
    infer_closed(phi).map(|t| (t.ord, t.mar))
}
