//! Exact game-tree search: a memoized solver, a naive reference solver,
//! optimal-move extraction and on-line chromatic numbers.
//!
//! The memo is keyed on the permutable-color canonical form. Legality and
//! the winning condition only look at whether two vertices share a color,
//! never at which color it is, and any pre-coloring is part of the presented
//! state; recoloring a whole state bijectively therefore gives a
//! strategically identical position.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::canon::{CanonicalKey, ColorMode};
use crate::game::{GameConfig, GameError, GameState, Role, Status};
use crate::graph::{members, Color, Graph, VertexSet};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
pub const DEFAULT_MEMO_CAP: usize = 20_000_000;
pub const NAIVE_MAX_VERTICES: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("node budget of {budget} expansions exceeded")]
    NodeBudget { budget: u64 },
    #[error("naive solver is limited to {max} host vertices, got {vertices}")]
    TooLarge { vertices: usize, max: usize },
    #[error("host graph is empty")]
    EmptyHost,
    #[error("it is not the {0}'s turn")]
    NotYourTurn(Role),
    #[error("state is terminal")]
    Terminal,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub memo_hits: u64,
    /// Memo inserts refused because the table was at capacity.
    pub memo_rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// Present a vertex adjacent to these presented vertices.
    Present(VertexSet),
    Color(Color),
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub winner: Role,
    /// A winning move for the side to move, when it wins and the state is
    /// not terminal.
    pub principal_move: Option<Move>,
    pub stats: SolveStats,
}

fn side_to_move(status: Status) -> Option<Role> {
    match status {
        Status::DrawerToMove => Some(Role::Drawer),
        Status::PainterToMove => Some(Role::Painter),
        _ => None,
    }
}

/// Memoized solver. One instance serves a single game configuration; the
/// memo is dropped when a state from a different configuration arrives.
pub struct Solver {
    node_budget: u64,
    memo_cap: usize,
    memo: HashMap<CanonicalKey, Role>,
    config: Option<Arc<GameConfig>>,
    stats: SolveStats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Self::with_limits(DEFAULT_NODE_BUDGET, DEFAULT_MEMO_CAP)
    }

    pub fn with_limits(node_budget: u64, memo_cap: usize) -> Self {
        Solver { node_budget, memo_cap, memo: HashMap::new(), config: None, stats: SolveStats::default() }
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn bind(&mut self, state: &GameState) {
        let same = self.config.as_ref().is_some_and(|c| Arc::ptr_eq(c, state.config()));
        if !same {
            self.memo.clear();
            self.config = Some(Arc::clone(state.config()));
        }
    }

    /// Winner from `state` plus a principal move. Drawer ties break toward
    /// the lowest canonical successor key, painter ties toward the lowest
    /// color id.
    pub fn solve(&mut self, state: &GameState) -> Result<SolveResult, SearchError> {
        self.bind(state);
        let before = self.stats;
        let winner = self.value(state)?;
        let principal_move = match side_to_move(state.status()) {
            Some(side) if side == winner => Some(self.winning_move(state, side)?),
            _ => None,
        };
        let stats = SolveStats {
            nodes: self.stats.nodes - before.nodes,
            memo_hits: self.stats.memo_hits - before.memo_hits,
            memo_rejected: self.stats.memo_rejected - before.memo_rejected,
        };
        Ok(SolveResult { winner, principal_move, stats })
    }

    fn winning_move(&mut self, state: &GameState, side: Role) -> Result<Move, SearchError> {
        match side {
            Role::Drawer => {
                for m in state.drawer_moves()? {
                    if self.value(&m.state)? == Role::Drawer {
                        return Ok(Move::Present(m.neighborhood));
                    }
                }
            }
            Role::Painter => {
                for c in state.painter_moves()? {
                    if self.value(&state.apply_color(c)?)? == Role::Painter {
                        return Ok(Move::Color(c));
                    }
                }
            }
        }
        unreachable!("winner has no winning move")
    }

    fn value(&mut self, state: &GameState) -> Result<Role, SearchError> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.node_budget {
            return Err(SearchError::NodeBudget { budget: self.node_budget });
        }
        let status = state.status();
        match status {
            Status::PainterWon => return Ok(Role::Painter),
            Status::DrawerWon => return Ok(Role::Drawer),
            _ => {}
        }
        let key = state.key(ColorMode::Permutable);
        if let Some(&w) = self.memo.get(&key) {
            self.stats.memo_hits += 1;
            return Ok(w);
        }
        let winner = if status == Status::DrawerToMove {
            let mut w = Role::Painter;
            for m in state.drawer_moves()? {
                if self.value(&m.state)? == Role::Drawer {
                    w = Role::Drawer;
                    break;
                }
            }
            w
        } else {
            let mut w = Role::Drawer;
            for c in painter_candidates(state)? {
                if self.value(&state.apply_color(c)?)? == Role::Painter {
                    w = Role::Painter;
                    break;
                }
            }
            w
        };
        if self.memo.len() < self.memo_cap {
            self.memo.insert(key, winner);
        } else {
            self.stats.memo_rejected += 1;
        }
        Ok(winner)
    }
}

/// Legal colors already in use, plus the lowest legal unused color: all
/// unused colors are interchangeable.
fn painter_candidates(state: &GameState) -> Result<Vec<Color>, GameError> {
    let legal = state.painter_moves()?;
    let used = state.presented().colors_on(crate::graph::full_set(state.presented().vertex_count()));
    let mut out = Vec::new();
    let mut fresh_taken = false;
    for c in legal {
        if used.binary_search(&c).is_ok() {
            out.push(c);
        } else if !fresh_taken {
            fresh_taken = true;
            out.push(c);
        }
    }
    Ok(out)
}

/// Memoized solve with default limits.
pub fn solve(state: &GameState) -> Result<SolveResult, SearchError> {
    Solver::new().solve(state)
}

/// Reference solver: plain post-order search with no memo and no
/// isomorphism reduction; drawer moves are all neighborhood subsets that
/// keep the presented graph induced.
pub fn solve_naive(state: &GameState) -> Result<SolveResult, SearchError> {
    let n = state.config().host().vertex_count();
    if n > NAIVE_MAX_VERTICES {
        return Err(SearchError::TooLarge { vertices: n, max: NAIVE_MAX_VERTICES });
    }
    let mut stats = SolveStats::default();
    let (winner, principal_move) = naive(state, &mut stats)?;
    Ok(SolveResult { winner, principal_move, stats })
}

fn naive(state: &GameState, stats: &mut SolveStats) -> Result<(Role, Option<Move>), SearchError> {
    stats.nodes += 1;
    match state.status() {
        Status::PainterWon => Ok((Role::Painter, None)),
        Status::DrawerWon => Ok((Role::Drawer, None)),
        Status::DrawerToMove => {
            for nb in state.neighborhoods_by_subsets() {
                let next = state.present(nb)?;
                if naive(&next, stats)?.0 == Role::Drawer {
                    return Ok((Role::Drawer, Some(Move::Present(nb))));
                }
            }
            Ok((Role::Painter, None))
        }
        Status::PainterToMove => {
            for c in state.painter_moves()? {
                if naive(&state.apply_color(c)?, stats)?.0 == Role::Painter {
                    return Ok((Role::Painter, Some(Move::Color(c))));
                }
            }
            Ok((Role::Drawer, None))
        }
    }
}

/// Greedy clique: a lower bound on both chromatic numbers.
pub fn greedy_clique(g: &Graph) -> usize {
    let n = g.vertex_count();
    let mut best = 0;
    for start in 0..n {
        let mut clique: VertexSet = 1 << start;
        let mut cand = g.neighbors(start);
        while cand != 0 {
            let v = members(cand).max_by_key(|&v| (g.neighbors(v) & cand).count_ones()).unwrap();
            clique |= 1 << v;
            cand &= g.neighbors(v);
        }
        best = best.max(clique.count_ones() as usize);
    }
    best
}

/// Off-line chromatic number by exhaustive backtracking.
pub fn chromatic_number(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    fn colorable(g: &Graph, k: usize, colors: &mut Vec<usize>, v: usize, used: usize) -> bool {
        if v == g.vertex_count() {
            return true;
        }
        for c in 0..k.min(used + 1) {
            if members(g.neighbors(v)).filter(|&w| w < v).all(|w| colors[w] != c) {
                colors[v] = c;
                if colorable(g, k, colors, v + 1, used.max(c + 1)) {
                    return true;
                }
            }
        }
        false
    }
    (1..=n).find(|&k| colorable(g, k, &mut vec![usize::MAX; n], 0, 0)).unwrap()
}

/// Result of an on-line chromatic number computation.
#[derive(Debug, Clone)]
pub struct OnlineChromatic {
    pub value: usize,
    pub lower_bound: usize,
    pub stats: SolveStats,
}

/// Least `k` for which the painter wins from the empty state, found by
/// ascending from a clique lower bound (painter wins are monotone in `k`).
pub fn online_chromatic_number(host: &Graph) -> Result<OnlineChromatic, SearchError> {
    online_chromatic_number_with(host, DEFAULT_NODE_BUDGET)
}

pub fn online_chromatic_number_with(host: &Graph, node_budget: u64) -> Result<OnlineChromatic, SearchError> {
    let n = host.vertex_count();
    if n == 0 {
        return Err(SearchError::EmptyHost);
    }
    let lower_bound = greedy_clique(host).max(1);
    let mut stats = SolveStats::default();
    for k in lower_bound..=n {
        let config = GameConfig::new(host.clone(), k as Color)?;
        let res = Solver::with_limits(node_budget, DEFAULT_MEMO_CAP).solve(&GameState::initial(config))?;
        stats.nodes += res.stats.nodes;
        stats.memo_hits += res.stats.memo_hits;
        stats.memo_rejected += res.stats.memo_rejected;
        if res.winner == Role::Painter {
            return Ok(OnlineChromatic { value: k, lower_bound, stats });
        }
    }
    unreachable!("the painter always wins with |V| colors")
}

/// A winning move for `role` if one exists; otherwise the move whose
/// refutation costs the opponent the most search nodes (ties: first in
/// move order).
pub fn best_move(state: &GameState, role: Role) -> Result<Move, SearchError> {
    let side = side_to_move(state.status()).ok_or(SearchError::Terminal)?;
    if side != role {
        return Err(SearchError::NotYourTurn(role));
    }
    let mut solver = Solver::new();
    let res = solver.solve(state)?;
    if let Some(m) = res.principal_move {
        return Ok(m);
    }
    let candidates: Vec<(Move, GameState)> = match role {
        Role::Drawer => state.drawer_moves()?.into_iter().map(|m| (Move::Present(m.neighborhood), m.state)).collect(),
        Role::Painter => state
            .painter_moves()?
            .into_iter()
            .map(|c| Ok((Move::Color(c), state.apply_color(c)?)))
            .collect::<Result<_, GameError>>()?,
    };
    let mut best: Option<(u64, Move)> = None;
    for (mv, next) in candidates {
        let cost = Solver::new().solve(&next)?.stats.nodes;
        if best.as_ref().is_none_or(|(b, _)| cost > *b) {
            best = Some((cost, mv));
        }
    }
    best.map(|(_, m)| m).ok_or(SearchError::Terminal)
}
