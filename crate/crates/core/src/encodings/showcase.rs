//! Three properties beyond the modal μ-calculus: buffer underflow on some
//! path, bisimilarity to a word, and maximal paths of tower length.

use std::fmt;
use std::str::FromStr;

use crate::syntax::{and, box_any, dia_any, ff, or_all, tt, Formula};
use crate::typesys::{HflType, Variance};

use super::EncodingError;

/// `μ(X:Pr -> Pr).(λ(Z:Pr).⟨out⟩Z ∨ ⟨in⟩(X (X Z))) tt`: some finite path is labeled by
/// a word of `X → out | in X X`.
pub fn buffer() -> Formula {
    let fun = HflType::arrow(HflType::Pr, Variance::Plus, HflType::Pr);
    let z = Formula::var("Z");
    let x = Formula::var("X");
    let body = Formula::or(
        Formula::dia("out", z.clone()),
        Formula::dia("in", Formula::app(x.clone(), Formula::app(x, z))),
    );
    let mu = Formula::mu("X", fun, Formula::lam("Z", Variance::Plus, HflType::Pr, body));
    Formula::app(mu, tt())
}

/// The negation of [`buffer`]: no path ever outputs more than it has received.
pub fn buffer_violation_free() -> Formula {
    Formula::neg(buffer())
}

/// `¬ ⋁_{a≠b} (μF.λX.λY.(X ∧ Y) ∨ (F ⟨-⟩X ⟨-⟩Y)) ⟨a⟩tt ⟨b⟩tt`, with `⟨-⟩` ranging over `actions`.
pub fn bisim_word<S: AsRef<str>>(actions: &[S]) -> Formula {
    let pr = HflType::Pr;
    let fty = HflType::curried(&[(pr.clone(), Variance::Plus), (pr.clone(), Variance::Plus)], pr.clone());
    let (x, y) = (Formula::var("X"), Formula::var("Y"));
    let body = Formula::or(
        and(x.clone(), y.clone()),
        Formula::apps(Formula::var("F"), [dia_any(actions, x), dia_any(actions, y)]),
    );
    let lams = Formula::lam("X", Variance::Plus, pr.clone(), Formula::lam("Y", Variance::Plus, pr, body));
    let search = Formula::mu("F", fty, lams);
    let mut pairs = Vec::new();
    for a in actions {
        for b in actions {
            if a.as_ref() != b.as_ref() {
                pairs.push(Formula::apps(
                    search.clone(),
                    [Formula::dia(a.as_ref(), tt()), Formula::dia(b.as_ref(), tt())],
                ));
            }
        }
    }
    Formula::neg(or_all(pairs))
}

/// `τ'_0 = Pr`, `τ'_{i+1} = τ'_i -> τ'_i`.
fn church(i: usize) -> HflType {
    (0..i).fold(HflType::Pr, |t, _| HflType::arrow(t.clone(), Variance::Plus, t))
}

/// `φ_m := ψ_m ψ_{m-1} ... ψ_1 (λ(X:Pr).⟨-⟩X) [-]ff` with `ψ_i := λ(F:τ'_i).λ(X:τ'_{i-1}).F (F X)`.
pub fn phi_m<S: AsRef<str>>(m: usize, actions: &[S]) -> Result<Formula, EncodingError> {
    if m == 0 {
        return Err(EncodingError::IndexOutOfRange { index: 0, bound: "m >= 1".into() });
    }
    let psi = |i: usize| {
        let (f, x) = (Formula::var("F"), Formula::var("X"));
        Formula::lam(
            "F",
            Variance::Plus,
            church(i),
            Formula::lam("X", Variance::Plus, church(i - 1), Formula::app(f.clone(), Formula::app(f, x))),
        )
    };
    let step = Formula::lam("X", Variance::Plus, HflType::Pr, dia_any(actions, Formula::var("X")));
    let args = (1..m).rev().map(psi).chain([step, box_any(actions, ff())]);
    Ok(Formula::apps(psi(m), args))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Showcase {
    Buffer,
    BufferViolationFree,
    BisimWord,
    PhiM(usize),
}

impl fmt::Display for Showcase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Showcase::Buffer => f.write_str("buffer"),
            Showcase::BufferViolationFree => f.write_str("buffer-safe"),
            Showcase::BisimWord => f.write_str("bisim-word"),
            Showcase::PhiM(m) => write!(f, "phi-m:{m}"),
        }
    }
}

impl FromStr for Showcase {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "buffer" => Ok(Showcase::Buffer),
            "buffer-safe" => Ok(Showcase::BufferViolationFree),
            "bisim-word" => Ok(Showcase::BisimWord),
            _ => s
                .strip_prefix("phi-m:")
                .and_then(|m| m.parse().ok())
                .map(Showcase::PhiM)
                .ok_or_else(|| EncodingError::UnknownOperation(s.to_string())),
        }
    }
}

/// The showcase formula `which`, with `⟨-⟩` and `[-]` ranging over `actions`.
pub fn showcase_formula<S: AsRef<str>>(which: Showcase, actions: &[S]) -> Result<Formula, EncodingError> {
    match which {
        Showcase::Buffer => Ok(buffer()),
        Showcase::BufferViolationFree => Ok(buffer_violation_free()),
        Showcase::BisimWord => Ok(bisim_word(actions)),
        Showcase::PhiM(m) => phi_m(m, actions),
    }
}
