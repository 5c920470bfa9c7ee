//! Finite labeled transition systems, their text format, and generator families.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("line {line}: state {state} out of range for {n} states")]
    OutOfRange { line: usize, state: usize, n: usize },
    #[error("line {line}: duplicate `states` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: `states` header must come first")]
    MissingHeader { line: usize },
    #[error("line {line}: unknown section `{word}`")]
    UnknownSection { line: usize, word: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("word of length {len} does not fit into {p} states")]
    WordTooLong { len: usize, p: usize },
}

/// A transition system over states `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    n: usize,
    labels: Vec<BTreeSet<String>>,
    edges: BTreeMap<String, BTreeSet<(usize, usize)>>,
    succ: BTreeMap<String, Vec<Vec<usize>>>,
    pred: BTreeMap<String, Vec<Vec<usize>>>,
}

impl Lts {
    pub fn new(n: usize) -> Lts {
        Lts {
            n,
            labels: vec![BTreeSet::new(); n],
            edges: BTreeMap::new(),
            succ: BTreeMap::new(),
            pred: BTreeMap::new(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, src: usize, action: &str, dst: usize) {
        assert!(src < self.n && dst < self.n, "edge endpoint out of range");
        if self.edges.entry(action.to_string()).or_default().insert((src, dst)) {
            let n = self.n;
            self.succ.entry(action.to_string()).or_insert_with(|| vec![Vec::new(); n])[src].push(dst);
            self.pred.entry(action.to_string()).or_insert_with(|| vec![Vec::new(); n])[dst].push(src);
        }
    }

    pub fn add_label(&mut self, state: usize, prop: &str) {
        assert!(state < self.n, "labeled state out of range");
        self.labels[state].insert(prop.to_string());
    }

    /// Actions with at least one edge, sorted.
    pub fn actions(&self) -> Vec<&str> {
        self.edges.keys().map(String::as_str).collect()
    }

    pub fn edges(&self, action: &str) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.get(action).into_iter().flatten().copied()
    }

    pub fn edge_count(&self, action: &str) -> usize {
        self.edges.get(action).map_or(0, BTreeSet::len)
    }

    pub fn successors(&self, action: &str, s: usize) -> &[usize] {
        self.succ.get(action).map_or(&[], |v| &v[s])
    }

    pub fn predecessors(&self, action: &str, s: usize) -> &[usize] {
        self.pred.get(action).map_or(&[], |v| &v[s])
    }

    pub fn labels(&self, s: usize) -> &BTreeSet<String> {
        &self.labels[s]
    }

    pub fn has_label(&self, s: usize, prop: &str) -> bool {
        self.labels[s].contains(prop)
    }

    pub fn load(text: &str) -> Result<Lts, LtsError> {
        let mut lts: Option<Lts> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = content.split_whitespace().collect();
            let Some(&head) = words.first() else { continue };
            let malformed = |message: &str| LtsError::Malformed { line, message: message.into() };
            let number = |w: &str| w.parse::<usize>().map_err(|_| malformed(&format!("expected a number, found `{w}`")));
            if head == "states" {
                if lts.is_some() {
                    return Err(LtsError::DuplicateHeader { line });
                }
                if words.len() != 2 {
                    return Err(malformed("expected `states <n>`"));
                }
                lts = Some(Lts::new(number(words[1])?));
                continue;
            }
            if head != "label" && head != "trans" {
                return Err(LtsError::UnknownSection { line, word: head.to_string() });
            }
            let lts = lts.as_mut().ok_or(LtsError::MissingHeader { line })?;
            let state = |w: &str| -> Result<usize, LtsError> {
                let s = number(w)?;
                if s >= lts.n {
                    return Err(LtsError::OutOfRange { line, state: s, n: lts.n });
                }
                Ok(s)
            };
            let ident = |w: &str| -> Result<(), LtsError> {
                let ok = w.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                    && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
                if ok {
                    Ok(())
                } else {
                    Err(malformed(&format!("`{w}` is not an identifier")))
                }
            };
            if head == "label" {
                if words.len() < 2 {
                    return Err(malformed("expected `label <state> <prop>...`"));
                }
                let s = state(words[1])?;
                for p in &words[2..] {
                    ident(p)?;
                }
                for p in &words[2..] {
                    lts.add_label(s, p);
                }
            } else {
                if words.len() != 4 {
                    return Err(malformed("expected `trans <src> <action> <dst>`"));
                }
                let (src, dst) = (state(words[1])?, state(words[3])?);
                ident(words[2])?;
                lts.add_edge(src, words[2], dst);
            }
        }
        lts.ok_or(LtsError::MissingHeader { line: 0 })
    }

    pub fn save(&self) -> String {
        let mut out = format!("states {}\n", self.n);
        for (s, props) in self.labels.iter().enumerate() {
            if !props.is_empty() {
                let names: Vec<&str> = props.iter().map(String::as_str).collect();
                let _ = writeln!(out, "label {s} {}", names.join(" "));
            }
        }
        let mut all: Vec<(usize, &str, usize)> = self
            .edges
            .iter()
            .flat_map(|(a, es)| es.iter().map(move |&(s, d)| (s, a.as_str(), d)))
            .collect();
        all.sort();
        for (s, a, d) in all {
            let _ = writeln!(out, "trans {s} {a} {d}");
        }
        out
    }
}

/// States `0..p`; `lower` edges `i -> j` for `j < i`; `test` edges between all pairs.
pub fn gen_counter_lts(p: usize) -> Lts {
    assert!(p >= 1, "counter systems need at least one state");
    let mut lts = Lts::new(p);
    for i in 0..p {
        for j in 0..p {
            if j < i {
                lts.add_edge(i, "lower", j);
            }
            lts.add_edge(i, "test", j);
        }
    }
    lts
}

/// The counter system with state `i` labeled `q` iff `i < |w|` and `w[i]` holds.
pub fn gen_counter_lts_labeled(p: usize, w: &[bool]) -> Result<Lts, LtsError> {
    if w.len() > p {
        return Err(LtsError::WordTooLong { len: w.len(), p });
    }
    let mut lts = gen_counter_lts(p);
    for (i, &bit) in w.iter().enumerate() {
        if bit {
            lts.add_label(i, "q");
        }
    }
    Ok(lts)
}

/// A path `0 -a-> 1 -a-> ... -a-> n-1`.
pub fn gen_chain(n: usize) -> Lts {
    assert!(n >= 1, "a chain needs at least one state");
    let mut lts = Lts::new(n);
    for i in 0..n - 1 {
        lts.add_edge(i, "a", i + 1);
    }
    lts
}

/// A linear model whose `i`-th edge carries the `i`-th action.
pub fn gen_word_lts<S: AsRef<str>>(actions: &[S]) -> Lts {
    let mut lts = Lts::new(actions.len() + 1);
    for (i, a) in actions.iter().enumerate() {
        lts.add_edge(i, a.as_ref(), i + 1);
    }
    lts
}
