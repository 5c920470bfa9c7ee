use std::collections::BTreeMap;

use super::{Game, GameError, NodeClass, Player};

/// A positional strategy: one chosen successor per node of `player`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    moves: BTreeMap<usize, usize>,
}

impl Strategy {
    pub fn choice(&self, node: usize) -> Option<usize> {
        self.moves.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn moves(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.moves.iter().map(|(&a, &b)| (a, b))
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Winner from the start node.
    pub winner: Player,
    /// Winner from every node.
    pub winners: Vec<Player>,
    /// Winning moves of `winner` at every node it owns and wins.
    pub strategy: Strategy,
}

/// Backward induction over the game DAG.
pub fn solve(game: &Game) -> Result<Solution, GameError> {
    let order = game.topological_order()?;
    let n = game.node_count();
    let mut winners = vec![Player::Exists; n];
    let mut best = vec![usize::MAX; n];
    for &v in order.iter().rev() {
        let class = game.class(v);
        if let Some(w) = class.terminal_winner() {
            winners[v] = w;
            continue;
        }
        let Some(owner) = class.owner() else { unreachable!() };
        let succ = game.successors(v);
        if succ.is_empty() {
            return Err(GameError::Internal(format!("non-terminal node {v} has no successors")));
        }
        match succ.iter().find(|&&t| winners[t] == owner) {
            Some(&t) => {
                winners[v] = owner;
                best[v] = t;
            }
            None => {
                winners[v] = owner.opponent();
                best[v] = succ[0];
            }
        }
    }
    let winner = winners[game.start()];
    let moves = (0..n)
        .filter(|&v| game.class(v).owner() == Some(winner) && winners[v] == winner)
        .map(|v| (v, best[v]))
        .collect();
    Ok(Solution { winner, winners, strategy: Strategy { player: winner, moves } })
}

impl NodeClass {
    pub fn is_terminal(self) -> bool {
        self.terminal_winner().is_some()
    }
}
