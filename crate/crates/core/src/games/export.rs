use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{solve, Binding, Game, GameError, NodeClass, Payload, Player};
use crate::denote::{index_of, Denotation};
use crate::surface::print_formula;
use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            _ => Err(format!("unknown export format `{s}`")),
        }
    }
}

const MAX_PRINTED_LENGTH: u64 = 60;

fn formula_label(f: &Formula) -> String {
    if f.length() <= MAX_PRINTED_LENGTH {
        print_formula(f)
    } else {
        format!("φ#{}", f.id())
    }
}

fn value(d: &Denotation) -> String {
    format!("#{}", index_of(d))
}

fn values(ds: &[Denotation]) -> String {
    ds.iter().map(value).collect::<Vec<_>>().join(" ")
}

fn env_label(env: &[Binding]) -> String {
    let parts: Vec<String> = env.iter().map(|b| format!("{}={}", b.name, value(&b.value))).collect();
    format!("[{}]", parts.join(", "))
}

/// A one-line description of a node.
pub fn node_label(payload: &Payload) -> String {
    match payload {
        Payload::Config(c) => {
            let stack = if c.stack.is_empty() { String::new() } else { format!(" | {}", values(&c.stack)) };
            format!("{}{} {} ⊢ {}", c.state, stack, env_label(&c.env), formula_label(&c.formula))
        }
        Payload::Branch { at, g } => format!("branch @{at} g={}", value(g)),
        Payload::Arguments { g, arg, prefix, .. } => {
            format!("args g={} [{}] for {}", value(g), values(prefix), formula_label(arg))
        }
        Payload::Target { g, arg, args, .. } => {
            format!("target g={} [{}] for {}", value(g), values(args), formula_label(arg))
        }
    }
}

fn shape(class: NodeClass) -> &'static str {
    match class {
        NodeClass::Exists => "diamond",
        NodeClass::Forall => "box",
        NodeClass::WinExists => "doublecircle",
        NodeClass::WinForall => "doubleoctagon",
    }
}

#[derive(Serialize)]
struct JsonNode {
    id: usize,
    class: NodeClass,
    label: String,
    winner: Player,
}

#[derive(Serialize)]
struct JsonGame {
    start: usize,
    states: usize,
    winner: Player,
    nodes: Vec<JsonNode>,
    edges: Vec<(usize, usize)>,
}

/// Renders `game` as Graphviz DOT or as JSON annotated with the winner of every node.
pub fn export_game(game: &Game, format: ExportFormat) -> Result<String, GameError> {
    match format {
        ExportFormat::Dot => {
            let mut out = String::from("digraph game {\n  node [fontsize=10];\n");
            for v in 0..game.node_count() {
                let label = node_label(game.payload(v)).replace('\\', "\\\\").replace('"', "\\\"");
                let _ = writeln!(out, "  n{v} [shape={}, label=\"{label}\"];", shape(game.class(v)));
            }
            let _ = writeln!(out, "  start [shape=point];\n  start -> n{};", game.start());
            for v in 0..game.node_count() {
                for &t in game.successors(v) {
                    let _ = writeln!(out, "  n{v} -> n{t};");
                }
            }
            out.push_str("}\n");
            Ok(out)
        }
        ExportFormat::Json => {
            let sol = solve(game)?;
            let nodes = (0..game.node_count())
                .map(|v| JsonNode { id: v, class: game.class(v), label: node_label(game.payload(v)), winner: sol.winners[v] })
                .collect();
            let edges = (0..game.node_count()).flat_map(|v| game.successors(v).iter().map(move |&t| (v, t))).collect();
            let doc = JsonGame { start: game.start(), states: game.state_count(), winner: sol.winner, nodes, edges };
            serde_json::to_string_pretty(&doc).map_err(|e| GameError::Internal(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{build_game, GameConfig};
    use crate::lts::gen_chain;
    use crate::surface::parse_formula;

    #[test]
    fn dot_and_json() {
        let lts = gen_chain(2);
        let phi = parse_formula("<a>tt").unwrap();
        let g = build_game(&lts, 0, &phi, &GameConfig::default()).unwrap();
        let dot = export_game(&g, ExportFormat::Dot).unwrap();
        assert!(dot.starts_with("digraph game {"));
        assert!(dot.contains("shape=diamond"));
        let json: serde_json::Value = serde_json::from_str(&export_game(&g, ExportFormat::Json).unwrap()).unwrap();
        assert_eq!(json["winner"], "exists");
        assert_eq!(json["nodes"].as_array().unwrap().len(), g.node_count());
        assert_eq!(json["edges"].as_array().unwrap().len(), g.edge_count());
        for node in json["nodes"].as_array().unwrap() {
            assert!(node["winner"] == "exists" || node["winner"] == "forall");
        }
        assert_eq!("json".parse::<ExportFormat>(), Ok(ExportFormat::Json));
        assert!("svg".parse::<ExportFormat>().is_err());
    }
}
