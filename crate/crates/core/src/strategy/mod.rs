//! Scripted strategies for reduction instances: the drawer that wins when
//! the formula is false and the phase-based painter that wins when it is
//! true. Both are plain state machines that the verification harness clones
//! when it branches.

mod drawer;
mod painter;

pub use drawer::{DrawerOptions, DrawerScript};
pub use painter::{PainterOptions, PainterScript, Phase};

use thiserror::Error;

use crate::game::{GameError, GameState};
use crate::graph::{members, Color, Vertex, VertexSet};
use crate::qbf::QbfError;
use crate::reduction::{classify_by_b_degree, Classification, ReductionInstance, Role, BLOCKED_COLOR};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("script ledger admits no embedding: {0}")]
    Inconsistent(String),
    #[error("no legal color for the prescribed rule `{rule}`")]
    NoLegalColor { rule: String },
    #[error("vertex {0} cannot be classified by its B-degree")]
    Unclassifiable(Vertex),
    #[error("no role assignment is consistent with the presented graph")]
    NoIdentification,
    #[error("pending vertex role is ambiguous: {0}")]
    Ambiguous(String),
    #[error("it is not this script's turn")]
    NotYourTurn,
    #[error("the drawer script has nothing left to present")]
    Exhausted,
    #[error(transparent)]
    Formula(#[from] QbfError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// The painter's view of the free (not pre-colored) presented vertices:
/// their B-degree classification and every joint role assignment
/// consistent with their mutual adjacency.
#[derive(Debug, Clone)]
pub(crate) struct Identification {
    pub free: Vec<Vertex>,
    pub classes: Vec<Classification>,
    /// Each entry assigns `assignments[a][i]` to `free[i]`.
    pub assignments: Vec<Vec<Role>>,
}

impl Identification {
    pub fn new(inst: &ReductionInstance, state: &GameState) -> Result<Self, StrategyError> {
        let presented = state.presented();
        let g = presented.graph();
        let b_set: VertexSet = (0..presented.vertex_count())
            .filter(|&v| presented.color(v) == Some(BLOCKED_COLOR) && v < inst.layout.counts.presented)
            .fold(0, |acc, v| acc | 1 << v);
        let free: Vec<Vertex> = (inst.layout.counts.presented..presented.vertex_count()).collect();
        let mut classes = Vec::with_capacity(free.len());
        let mut candidates: Vec<Vec<Role>> = Vec::with_capacity(free.len());
        for &v in &free {
            let j = (g.neighbors(v) & b_set).count_ones() as usize;
            let class = classify_by_b_degree(j, inst.n, inst.t).map_err(|_| StrategyError::Unclassifiable(v))?;
            classes.push(class);
            candidates.push(match class {
                Classification::OddPair(i) => vec![Role::X { var: i, positive: true }, Role::X { var: i, positive: false }],
                Classification::PositiveEven(i) => vec![Role::X { var: i, positive: true }],
                Classification::NegatedEven(i) => vec![Role::X { var: i, positive: false }],
                Classification::Gadget(i) => (1..=4).map(|pos| Role::H { gadget: i, pos }).collect(),
                Classification::Term(i) => vec![Role::T(i)],
            });
        }
        let mut assignments = Vec::new();
        let mut current = Vec::with_capacity(free.len());
        extend(inst, state, &free, &candidates, &mut current, &mut assignments);
        if assignments.is_empty() {
            return Err(StrategyError::NoIdentification);
        }
        Ok(Identification { free, classes, assignments })
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.free.iter().position(|&f| f == v)
    }

    /// Presented vertex playing `role` under assignment `a`.
    pub fn vertex_with(&self, a: usize, role: Role) -> Option<Vertex> {
        self.assignments[a].iter().position(|&r| r == role).map(|i| self.free[i])
    }

    /// Free vertices classified as belonging to gadget `g`, excluding `except`.
    pub fn gadget_vertices(&self, g: usize, except: Option<Vertex>) -> Vec<Vertex> {
        self.free
            .iter()
            .zip(&self.classes)
            .filter(|&(&v, c)| *c == Classification::Gadget(g) && Some(v) != except)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn vertices_where(&self, pred: impl Fn(Classification) -> bool) -> Vec<Vertex> {
        self.free.iter().zip(&self.classes).filter(|&(_, &c)| pred(c)).map(|(&v, _)| v).collect()
    }
}

fn extend(
    inst: &ReductionInstance,
    state: &GameState,
    free: &[Vertex],
    candidates: &[Vec<Role>],
    current: &mut Vec<Role>,
    out: &mut Vec<Vec<Role>>,
) {
    let i = current.len();
    if i == free.len() {
        out.push(current.clone());
        return;
    }
    let host = inst.host();
    let g = state.presented().graph();
    for &role in &candidates[i] {
        if current.contains(&role) {
            continue;
        }
        let hv = inst.layout.vertex(role);
        let consistent = current
            .iter()
            .enumerate()
            .all(|(j, &r)| host.has_edge(hv, inst.layout.vertex(r)) == g.has_edge(free[i], free[j]));
        if consistent {
            current.push(role);
            extend(inst, state, free, candidates, current, out);
            current.pop();
        }
    }
}

/// First color of `palette` that is legal for the pending vertex.
pub(crate) fn greedy(
    legal: &[Color],
    palette: impl IntoIterator<Item = Color>,
    rule: &str,
) -> Result<Color, StrategyError> {
    palette
        .into_iter()
        .find(|c| legal.contains(c))
        .ok_or_else(|| StrategyError::NoLegalColor { rule: rule.to_string() })
}

pub(crate) fn colored_with(state: &GameState, set: VertexSet) -> Vec<Color> {
    members(set).filter_map(|v| state.presented().color(v)).collect()
}
