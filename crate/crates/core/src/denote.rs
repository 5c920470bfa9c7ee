//! Semantic values over a transition system.
//!
//! An element of the full function space `⟦τ1 -> ... -> τm -> Pr⟧` is a table
//! assigning a state set to every argument tuple. It is stored as one flat bit
//! vector: the entry for argument index `j` occupies bits
//! `j * w .. (j + 1) * w` where `w` is the width of the result type, and a
//! state set of `Pr` sets bit `s` for every member `s`. Read as a binary
//! number, the bit vector is exactly the canonical index of the element, with
//! the highest argument as the most significant digit. The pointwise order is
//! bitwise inclusion and pointwise complement is bitwise negation.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use smallvec::SmallVec;
use thiserror::Error;

use crate::syntax::Name;
use crate::typesys::{HflType, Variance};

/// Default limit on the number of elements of an enumerated lattice.
pub const DEFAULT_ELEMENT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenoteError {
    #[error("lattice of type {ty} over {n} states has {cardinality} elements, over the limit of {limit}")]
    TooLarge { ty: String, n: usize, cardinality: String, limit: u64 },
    #[error("index {index} out of range for a lattice of {cardinality} elements")]
    IndexOutOfRange { index: String, cardinality: String },
    #[error("values of widths {left} and {right} do not have the same type")]
    TypeMismatch { left: usize, right: usize },
}

/// A fixed-length bit vector. Unused high bits of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitset {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

/// A set of states.
pub type StateSet = Bitset;

/// An element of a semantic lattice, in the flat encoding described above.
pub type Denotation = Bitset;

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bitset {
    pub fn empty(len: usize) -> Bitset {
        Bitset { len, words: SmallVec::from_elem(0, words_for(len)) }
    }

    pub fn full(len: usize) -> Bitset {
        let mut b = Bitset { len, words: SmallVec::from_elem(!0, words_for(len)) };
        b.trim();
        b
    }

    pub fn from_u64(value: u64, len: usize) -> Bitset {
        let mut b = Bitset::empty(len);
        if len > 0 {
            b.words[0] = value;
            b.trim();
        }
        b
    }

    pub fn from_biguint(value: &BigUint, len: usize) -> Bitset {
        let mut b = Bitset::empty(len);
        for (i, w) in value.iter_u64_digits().enumerate() {
            if i < b.words.len() {
                b.words[i] = w;
            }
        }
        b.trim();
        b
    }

    pub fn from_indices(len: usize, members: impl IntoIterator<Item = usize>) -> Bitset {
        let mut b = Bitset::empty(len);
        for i in members {
            b.insert(i);
        }
        b
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 >> extra;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        *self == Bitset::full(self.len)
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }

    pub fn union(&self, other: &Bitset) -> Bitset {
        debug_assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Bitset { len: self.len, words }
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        debug_assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Bitset { len: self.len, words }
    }

    pub fn complement(&self) -> Bitset {
        let mut b = Bitset { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        b.trim();
        b
    }

    pub fn is_subset(&self, other: &Bitset) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// The value as an integer, if it fits into 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.words.iter().skip(1).any(|&w| w != 0) {
            return None;
        }
        Some(self.words.first().copied().unwrap_or(0))
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut digits: Vec<u32> = Vec::with_capacity(self.words.len() * 2);
        for w in &self.words {
            digits.push(*w as u32);
            digits.push((*w >> 32) as u32);
        }
        BigUint::new(digits)
    }

    /// Bits `offset .. offset + len`.
    pub fn slice(&self, offset: usize, len: usize) -> Bitset {
        assert!(offset + len <= self.len, "slice out of range");
        let mut out = Bitset::empty(len);
        if offset % 64 == 0 {
            let first = offset / 64;
            for (i, w) in out.words.iter_mut().enumerate() {
                *w = self.words[first + i];
            }
        } else {
            let shift = offset % 64;
            for i in 0..out.words.len() {
                let lo = offset / 64 + i;
                let mut w = self.words[lo] >> shift;
                if lo + 1 < self.words.len() {
                    w |= self.words[lo + 1] << (64 - shift);
                }
                out.words[i] = w;
            }
        }
        out.trim();
        out
    }

    /// Concatenation with `parts[0]` in the least significant position.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Bitset>, width: usize, count: usize) -> Bitset {
        let mut out = Bitset::empty(width * count);
        for (j, part) in parts.into_iter().enumerate() {
            debug_assert_eq!(part.len, width);
            out.or_at(j * width, part);
        }
        out
    }

    /// Concatenation of parts of arbitrary widths, `parts[0]` least significant.
    pub fn concat_varied(parts: &[Bitset]) -> Bitset {
        let mut out = Bitset::empty(parts.iter().map(Bitset::len).sum());
        let mut offset = 0;
        for p in parts {
            out.or_at(offset, p);
            offset += p.len;
        }
        out
    }

    /// Ors `part` into bits `offset .. offset + part.len()`.
    pub fn or_at(&mut self, offset: usize, part: &Bitset) {
        assert!(offset + part.len <= self.len, "write out of range");
        if offset % 64 == 0 {
            let first = offset / 64;
            for (i, w) in part.words.iter().enumerate() {
                self.words[first + i] |= w;
            }
        } else {
            for i in part.iter() {
                self.insert(offset + i);
            }
        }
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Number of bits of the flat encoding of `ty` over `n` states: `n * ∏ |τi|`.
pub fn bit_width(ty: &HflType, n: usize) -> Result<usize, DenoteError> {
    match ty {
        HflType::Pr => Ok(n),
        HflType::Arrow(arg, _, res) => {
            let too_large = || DenoteError::TooLarge {
                ty: ty.to_string(),
                n,
                cardinality: symbolic_cardinality(ty, n),
                limit: u64::MAX,
            };
            let a = bit_width(arg, n)?;
            let r = bit_width(res, n)?;
            if a >= 40 {
                return Err(too_large());
            }
            (1usize << a).checked_mul(r).filter(|&w| w <= 1 << 40).ok_or_else(too_large)
        }
    }
}

fn symbolic_cardinality(ty: &HflType, n: usize) -> String {
    fn exponent(ty: &HflType, n: usize) -> String {
        match ty {
            HflType::Pr => n.to_string(),
            _ => {
                let args: Vec<String> = ty.args().iter().map(|(a, _)| format!("2^({})", exponent(a, n))).collect();
                format!("{n}*{}", args.join("*"))
            }
        }
    }
    format!("2^({})", exponent(ty, n))
}

/// `|⟦ty⟧|` over `n` states, when it is small enough to write down.
pub fn cardinality(ty: &HflType, n: usize) -> Result<BigUint, DenoteError> {
    let w = bit_width(ty, n)?;
    if w > 1 << 20 {
        return Err(DenoteError::TooLarge {
            ty: ty.to_string(),
            n,
            cardinality: symbolic_cardinality(ty, n),
            limit: u64::MAX,
        });
    }
    Ok(BigUint::one() << w)
}

/// Height of the full-space lattice: the number of elements of a maximal chain.
pub fn full_height(ty: &HflType, n: usize) -> Result<usize, DenoteError> {
    Ok(bit_width(ty, n)? + 1)
}

/// The canonical enumeration of a finite lattice.
#[derive(Clone, Debug)]
pub struct LatticeEnum {
    ty: HflType,
    n: usize,
    width: usize,
    len: u64,
}

impl LatticeEnum {
    pub fn new(ty: &HflType, n: usize, limit: u64) -> Result<LatticeEnum, DenoteError> {
        let too_large = |cardinality: String| DenoteError::TooLarge { ty: ty.to_string(), n, cardinality, limit };
        let width = bit_width(ty, n).map_err(|_| too_large(symbolic_cardinality(ty, n)))?;
        if width >= 63 || (1u64 << width) > limit {
            let card = if width <= 4096 { (BigUint::one() << width).to_string() } else { symbolic_cardinality(ty, n) };
            return Err(too_large(card));
        }
        Ok(LatticeEnum { ty: ty.clone(), n, width, len: 1 << width })
    }

    pub fn ty(&self) -> &HflType {
        &self.ty
    }

    pub fn states(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cardinality(&self) -> BigUint {
        BigUint::from(self.len)
    }

    pub fn get(&self, index: u64) -> Result<Denotation, DenoteError> {
        if index >= self.len {
            return Err(DenoteError::IndexOutOfRange { index: index.to_string(), cardinality: self.len.to_string() });
        }
        Ok(Bitset::from_u64(index, self.width))
    }

    pub fn index_of(&self, d: &Denotation) -> Result<u64, DenoteError> {
        if d.len() != self.width {
            return Err(DenoteError::TypeMismatch { left: d.len(), right: self.width });
        }
        Ok(d.to_u64().expect("enumerated values fit into 64 bits"))
    }

    pub fn iter(&self) -> impl Iterator<Item = Denotation> + '_ {
        (0..self.len).map(move |i| Bitset::from_u64(i, self.width))
    }
}

pub fn enumerate(ty: &HflType, n: usize, limit: u64) -> Result<LatticeEnum, DenoteError> {
    LatticeEnum::new(ty, n, limit)
}

/// `⟨i⟩_k`: the `i`-th element of the chain type `τ_k` over `p` states.
pub fn repr(i: &BigUint, k: usize, p: usize) -> Result<Denotation, DenoteError> {
    let ty = HflType::tau(k);
    let width = bit_width(&ty, p)?;
    if i.bits() > width as u64 {
        let card = if width <= 4096 { (BigUint::one() << width).to_string() } else { symbolic_cardinality(&ty, p) };
        return Err(DenoteError::IndexOutOfRange { index: i.to_string(), cardinality: card });
    }
    Ok(Bitset::from_biguint(i, width))
}

pub fn repr_u64(i: u64, k: usize, p: usize) -> Result<Denotation, DenoteError> {
    repr(&BigUint::from(i), k, p)
}

/// Position of `d` in the canonical enumeration of its type.
pub fn index_of(d: &Denotation) -> BigUint {
    d.to_biguint()
}

/// Pointwise order.
pub fn leq(a: &Denotation, b: &Denotation) -> Result<bool, DenoteError> {
    if a.len() != b.len() {
        return Err(DenoteError::TypeMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.is_subset(b))
}

/// Pointwise complement.
pub fn complement(d: &Denotation) -> Denotation {
    d.complement()
}

/// Applies a function value of type `ty` to `arg`.
pub fn apply(f: &Denotation, ty: &HflType, arg: &Denotation, n: usize) -> Denotation {
    let (_, _, res) = ty.split().expect("applying a ground value");
    let w = bit_width(res, n).expect("result width");
    let j = arg.to_u64().expect("argument index fits into 64 bits") as usize;
    f.slice(j * w, w)
}

/// Applies a function value to several arguments in turn.
pub fn apply_all(f: &Denotation, ty: &HflType, args: &[Denotation], n: usize) -> Denotation {
    let mut cur = f.clone();
    let mut t = ty;
    for a in args {
        cur = apply(&cur, t, a, n);
        t = t.split().expect("too many arguments").2;
    }
    cur
}

/// Builds a function value from its table, entry `j` for argument index `j`.
pub fn from_table(ty: &HflType, entries: &[Denotation], n: usize) -> Result<Denotation, DenoteError> {
    let (arg, _, res) = ty.split().expect("tables have function type");
    let count = 1usize << bit_width(arg, n)?;
    let w = bit_width(res, n)?;
    assert_eq!(entries.len(), count, "table length must match the argument domain");
    Ok(Bitset::concat(entries, w, count))
}

/// Splits a function value into its table.
pub fn table(f: &Denotation, ty: &HflType, n: usize) -> Result<Vec<Denotation>, DenoteError> {
    let (arg, _, res) = ty.split().expect("tables have function type");
    let count = 1usize << bit_width(arg, n)?;
    let w = bit_width(res, n)?;
    Ok((0..count).map(|j| f.slice(j * w, w)).collect())
}

/// Structured view of a value: a state set or a table of results.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum View {
    Ground(StateSet),
    Func(Vec<Denotation>),
}

pub fn view(d: &Denotation, ty: &HflType, n: usize) -> Result<View, DenoteError> {
    match ty {
        HflType::Pr => Ok(View::Ground(d.clone())),
        _ => Ok(View::Func(table(d, ty, n)?)),
    }
}

/// True if `d` respects the variances of `ty` on arguments that do so themselves.
pub fn is_monotone(d: &Denotation, ty: &HflType, n: usize, limit: u64) -> Result<bool, DenoteError> {
    let Some((arg, v, res)) = ty.split() else { return Ok(true) };
    let dom = LatticeEnum::new(arg, n, limit)?;
    let proper: Vec<Denotation> = dom
        .iter()
        .filter(|a| is_monotone(a, arg, n, limit).unwrap_or(false))
        .collect();
    for a in &proper {
        if !is_monotone(&apply(d, ty, a, n), res, n, limit)? {
            return Ok(false);
        }
    }
    if v == Variance::Zero {
        return Ok(true);
    }
    for a in &proper {
        for b in &proper {
            if a != b && a.is_subset(b) {
                let (fa, fb) = (apply(d, ty, a, n), apply(d, ty, b, n));
                let ok = if v == Variance::Plus { fa.is_subset(&fb) } else { fb.is_subset(&fa) };
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A partial map from variables to typed values; later bindings shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    entries: Vec<(Name, HflType, Denotation)>,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    pub fn bind(mut self, name: &str, ty: HflType, value: Denotation) -> Environment {
        self.entries.push((name.into(), ty, value));
        self
    }

    pub fn lookup(&self, name: &str) -> Option<(&HflType, &Denotation)> {
        self.entries.iter().rev().find(|(x, _, _)| &**x == name).map(|(_, t, d)| (t, d))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Name, &HflType, &Denotation)> {
        self.entries.iter().map(|(x, t, d)| (x, t, d))
    }
}

/// The index of a canonical value as a `u64`, when it fits.
pub fn small_index(d: &Denotation) -> Option<u64> {
    d.to_u64()
}

/// Converts a big index into a machine word when possible.
pub fn index_u64(i: &BigUint) -> Option<u64> {
    i.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr_pr() -> HflType {
        HflType::arrow(HflType::Pr, Variance::Plus, HflType::Pr)
    }

    #[test]
    fn ground_enumeration_order() {
        let e = enumerate(&HflType::Pr, 2, DEFAULT_ELEMENT_LIMIT).unwrap();
        let sets: Vec<Vec<usize>> = e.iter().map(|d| d.iter().collect()).collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn function_enumeration() {
        let e = enumerate(&pr_pr(), 1, DEFAULT_ELEMENT_LIMIT).unwrap();
        assert_eq!(e.len(), 4);
        let zero = e.get(0).unwrap();
        let t = HflType::tau(1);
        for a in enumerate(&HflType::Pr, 2, 10).unwrap().iter() {
            assert!(apply(&repr_u64(0, 1, 2).unwrap(), &t, &a, 2).is_empty());
        }
        assert!(zero.is_empty());
        assert!(matches!(enumerate(&HflType::tau(2), 2, DEFAULT_ELEMENT_LIMIT), Err(DenoteError::TooLarge { .. })));
    }

    #[test]
    fn repr_examples() {
        let d = repr_u64(5, 0, 3).unwrap();
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![0, 2]);
        let z = repr_u64(0, 1, 2).unwrap();
        match view(&z, &HflType::tau(1), 2).unwrap() {
            View::Func(entries) => {
                assert_eq!(entries.len(), 4);
                assert!(entries.iter().all(Bitset::is_empty));
            }
            View::Ground(_) => panic!("expected a table"),
        }
        for i in 0..256u64 {
            assert_eq!(index_of(&repr_u64(i, 1, 2).unwrap()), BigUint::from(i));
        }
        assert!(repr_u64(256, 1, 2).is_err());
    }

    #[test]
    fn lexicographic_significance() {
        // the highest argument is the most significant digit
        let t = HflType::tau(1);
        let one = repr_u64(1, 1, 2).unwrap();
        let arg0 = repr_u64(0, 0, 2).unwrap();
        assert_eq!(apply(&one, &t, &arg0, 2), repr_u64(1, 0, 2).unwrap());
        let top_digit = repr_u64(4 * 4 * 4, 1, 2).unwrap();
        let arg3 = repr_u64(3, 0, 2).unwrap();
        assert_eq!(apply(&top_digit, &t, &arg3, 2), repr_u64(1, 0, 2).unwrap());
    }

    #[test]
    fn order_and_complement() {
        let e = Bitset::empty(2);
        let s0 = Bitset::from_indices(2, [0]);
        assert!(leq(&e, &s0).unwrap());
        let lo = from_table(&pr_pr(), &vec![Bitset::empty(2); 4], 2).unwrap();
        let hi = from_table(&pr_pr(), &vec![Bitset::full(2); 4], 2).unwrap();
        assert!(leq(&lo, &hi).unwrap());
        assert_eq!(complement(&lo), hi);
        assert!(leq(&e, &Bitset::empty(3)).is_err());
    }

    #[test]
    fn tables_round_trip() {
        let t = HflType::tau(1);
        for i in [0u64, 7, 100, 255] {
            let d = repr_u64(i, 1, 2).unwrap();
            let tab = table(&d, &t, 2).unwrap();
            assert_eq!(from_table(&t, &tab, 2).unwrap(), d);
        }
    }

    #[test]
    fn slices_across_words() {
        let mut b = Bitset::empty(200);
        for i in [3, 63, 64, 65, 130, 199] {
            b.insert(i);
        }
        let s = b.slice(60, 80);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 4, 5, 70]);
        let parts = [b.slice(0, 100), b.slice(100, 100)];
        assert_eq!(Bitset::concat(&parts, 100, 2), b);
    }

    #[test]
    fn chain_heights() {
        assert_eq!(full_height(&HflType::Pr, 3).unwrap(), 4);
        assert_eq!(full_height(&pr_pr(), 2).unwrap(), 9);
    }

    #[test]
    fn monotone_predicate() {
        let id = from_table(&pr_pr(), &[0u64, 1, 2, 3].map(|i| Bitset::from_u64(i, 2)), 2).unwrap();
        let not = complement(&id);
        assert!(is_monotone(&id, &pr_pr(), 2, 100).unwrap());
        assert!(!is_monotone(&not, &pr_pr(), 2, 100).unwrap());
        let flat = HflType::arrow(HflType::Pr, Variance::Zero, HflType::Pr);
        assert!(is_monotone(&not, &flat, 2, 100).unwrap());
    }
}
