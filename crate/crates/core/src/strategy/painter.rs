use std::sync::Arc;

use super::{colored_with, greedy, Identification, StrategyError};
use crate::game::{GameState, Status};
use crate::graph::{Color, Vertex};
use crate::qbf::ValueTable;
use crate::reduction::{Classification, ReductionInstance, Role, FALSE_COLOR, TRUE_COLOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PainterOptions {
    /// A term request is good only if it is good under every role
    /// assignment consistent with the presented graph.
    pub pessimistic_good: bool,
    /// Play counts as normal if some consistent role assignment has both
    /// endpoints of every required gadget presented.
    pub optimistic_normal: bool,
    /// Treat every term request as not good. Breaks the strategy; used to
    /// test that the harness notices.
    pub never_phase_three: bool,
}

impl Default for PainterOptions {
    fn default() -> Self {
        PainterOptions { pessimistic_good: true, optimistic_normal: true, never_phase_three: false }
    }
}

/// Painter phase. All mutable script state lives here, so the phase doubles
/// as the script digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    /// Play deviated from normal play; `spare` is an H-color kept back for
    /// the last term vertex and `deviant` the gadget colored with 2 colors.
    Two { spare: Color, deviant: usize },
    /// A good request for term `good_term` was colored false.
    Three { good_term: usize },
}

/// The painter's phase strategy for true formulas.
#[derive(Debug, Clone)]
pub struct PainterScript {
    inst: Arc<ReductionInstance>,
    values: Arc<ValueTable>,
    options: PainterOptions,
    phase: Phase,
}

impl PainterScript {
    pub fn new(inst: Arc<ReductionInstance>, options: PainterOptions) -> Result<Self, StrategyError> {
        let values = Arc::new(ValueTable::new(&inst.formula)?);
        Ok(PainterScript { inst, values, options, phase: Phase::One })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Everything the next decision depends on besides the game state.
    pub fn digest(&self) -> Phase {
        self.phase
    }

    pub fn next(&mut self, state: &GameState) -> Result<Color, StrategyError> {
        if state.status() != Status::PainterToMove {
            return Err(StrategyError::NotYourTurn);
        }
        let pending = state.pending().expect("painter to move");
        let ident = Identification::new(&self.inst, state)?;
        let idx = ident.index_of(pending).expect("pending vertex is free");
        let class = ident.classes[idx];
        let legal = state.painter_moves()?;
        let l = self.inst.layout;
        let booleans = [TRUE_COLOR, FALSE_COLOR];

        match (self.phase, class) {
            (Phase::One, Classification::Gadget(_)) => greedy(&legal, l.h_colors(), "H greedy"),
            (Phase::One, Classification::PositiveEven(i) | Classification::NegatedEven(i)) => {
                match self.normal_play_witness(&ident, pending, i) {
                    Some(a) => {
                        let value = self.p_prime(state, &ident, a, i);
                        let positive = matches!(class, Classification::PositiveEven(_));
                        let c = if positive == value { TRUE_COLOR } else { FALSE_COLOR };
                        greedy(&legal, [c], "even variable p'")
                    }
                    None => {
                        let c = greedy(&legal, booleans, "X greedy")?;
                        self.enter_phase_two(state, &ident, pending, i)?;
                        Ok(c)
                    }
                }
            }
            (Phase::One, Classification::OddPair(i)) => {
                let gadget = i.div_ceil(2);
                if ident.gadget_vertices(gadget, Some(pending)).is_empty() {
                    return greedy(&legal, booleans, "X greedy");
                }
                let positive = unanimous(ident.assignments.iter().map(|a| match a[idx] {
                    Role::X { positive, .. } => positive,
                    _ => unreachable!(),
                }))
                .ok_or_else(|| StrategyError::Ambiguous(format!("vertex {pending} in pair {i}")))?;
                let c = if positive { TRUE_COLOR } else { FALSE_COLOR };
                // the partner may already hold that color if it was colored
                // before the gadget appeared; the complement is then forced
                greedy(&legal, [c, TRUE_COLOR + FALSE_COLOR - c], "odd variable identified")
            }
            (Phase::One, Classification::Term(i)) => {
                if !self.options.never_phase_three && self.is_good_request(state, &ident, i) {
                    let c = greedy(&legal, [FALSE_COLOR], "good request")?;
                    self.phase = Phase::Three { good_term: i };
                    Ok(c)
                } else {
                    greedy(&legal, l.t_colors(), "T greedy")
                }
            }
            (Phase::Two { spare, deviant }, Classification::Gadget(g)) if g == deviant => {
                self.color_deviant(state, &ident, pending, &legal, spare, deviant)
            }
            (Phase::Two { spare, .. }, Classification::Gadget(_)) => {
                greedy(&legal, l.h_colors().filter(|&c| c != spare), "H greedy without spare")
            }
            (Phase::Two { spare, .. }, Classification::Term(_)) => {
                greedy(&legal, l.t_colors().chain([spare]), "T greedy then spare")
            }
            (Phase::Two { .. }, _) => greedy(&legal, booleans, "X greedy"),
            (Phase::Three { .. }, Classification::Gadget(_)) => greedy(&legal, l.h_colors(), "H greedy"),
            (Phase::Three { .. }, Classification::Term(_)) => greedy(&legal, l.t_colors(), "T greedy"),
            (Phase::Three { good_term }, _) => {
                let g = state.presented().graph();
                let term_vertex = ident.vertices_where(|c| c == Classification::Term(good_term));
                if term_vertex.iter().any(|&t| g.has_edge(pending, t)) {
                    return greedy(&legal, [TRUE_COLOR], "literal of the good term");
                }
                let literals = &self.inst.formula.terms()[good_term - 1];
                let complement = ident.assignments.iter().all(|a| match a[idx] {
                    Role::X { var, positive } => {
                        literals.iter().any(|lit| lit.var as usize == var && lit.positive != positive)
                    }
                    _ => false,
                });
                if complement {
                    greedy(&legal, [FALSE_COLOR], "complement of a good-term literal")
                } else {
                    greedy(&legal, booleans, "X greedy")
                }
            }
        }
    }

    /// Assignment index witnessing normal play for a request to even
    /// variable `i`, or `None` when play is not normal.
    fn normal_play_witness(&self, ident: &Identification, pending: Vertex, i: usize) -> Option<usize> {
        let pend_idx = ident.index_of(pending);
        let ok = |a: usize| {
            (1..=i / 2).all(|g| {
                [1, 4].iter().all(|&pos| {
                    ident.assignments[a]
                        .iter()
                        .enumerate()
                        .any(|(j, &r)| Some(j) != pend_idx && r == Role::H { gadget: g, pos })
                })
            })
        };
        let all: Vec<usize> = (0..ident.assignments.len()).collect();
        if self.options.optimistic_normal {
            all.into_iter().find(|&a| ok(a))
        } else if all.iter().all(|&a| ok(a)) {
            Some(0)
        } else {
            None
        }
    }

    pub fn is_normal_play(&self, state: &GameState, i: usize) -> Result<bool, StrategyError> {
        let ident = Identification::new(&self.inst, state)?;
        let pending = state.pending().ok_or(StrategyError::NotYourTurn)?;
        Ok(self.normal_play_witness(&ident, pending, i).is_some())
    }

    fn is_good_request(&self, state: &GameState, ident: &Identification, term: usize) -> bool {
        let literals = &self.inst.formula.terms()[term - 1];
        let good_under = |a: usize| {
            literals.iter().all(|lit| {
                let (var, positive) = (lit.var as usize, lit.positive);
                let lit_color = ident.vertex_with(a, Role::X { var, positive }).and_then(|v| state.presented().color(v));
                let comp_color =
                    ident.vertex_with(a, Role::X { var, positive: !positive }).and_then(|v| state.presented().color(v));
                lit_color != Some(FALSE_COLOR) && comp_color != Some(TRUE_COLOR)
            })
        };
        let mut each = 0..ident.assignments.len();
        if self.options.pessimistic_good {
            each.all(good_under)
        } else {
            each.any(good_under)
        }
    }

    pub fn is_good_request_at(&self, state: &GameState, term: usize) -> Result<bool, StrategyError> {
        let ident = Identification::new(&self.inst, state)?;
        Ok(self.is_good_request(state, &ident, term))
    }

    /// Truth value the painter aims for at even variable `i`, computed from
    /// the interpreted values of `x1..x(i-1)` under assignment `a`.
    fn p_prime(&self, state: &GameState, ident: &Identification, a: usize, i: usize) -> bool {
        let color_of = |var: usize, positive: bool| {
            ident.vertex_with(a, Role::X { var, positive }).and_then(|v| state.presented().color(v))
        };
        let mut values = Vec::with_capacity(i);
        for var in 1..i {
            let value = if var % 2 == 1 {
                matches!(
                    (color_of(var, true), color_of(var, false)),
                    (Some(TRUE_COLOR), _) | (_, Some(FALSE_COLOR)) | (None, None)
                )
            } else {
                match (color_of(var, true), color_of(var, false)) {
                    (Some(c), _) => c == TRUE_COLOR,
                    (None, Some(c)) => c == FALSE_COLOR,
                    (None, None) => self.values.winning_move(&values),
                }
            };
            values.push(value);
        }
        self.values.winning_move(&values)
    }

    fn enter_phase_two(
        &mut self,
        state: &GameState,
        ident: &Identification,
        pending: Vertex,
        i: usize,
    ) -> Result<(), StrategyError> {
        let pend_idx = ident.index_of(pending);
        let has_endpoints = |a: usize, g: usize| {
            [1, 4].iter().all(|&pos| {
                ident.assignments[a]
                    .iter()
                    .enumerate()
                    .any(|(j, &r)| Some(j) != pend_idx && r == Role::H { gadget: g, pos })
            })
        };
        let n_assign = ident.assignments.len();
        let deviant = (1..=i / 2)
            .find(|&g| !(0..n_assign).any(|a| has_endpoints(a, g)))
            .or_else(|| (1..=i / 2).find(|&g| !(0..n_assign).all(|a| has_endpoints(a, g))))
            .ok_or_else(|| StrategyError::Ambiguous("no gadget lacks its endpoints".into()))?;
        let h_vertices = ident.vertices_where(|c| matches!(c, Classification::Gadget(_)));
        let used = colored_with(state, h_vertices.iter().fold(0, |acc, &v| acc | 1 << v));
        let spare = self
            .inst
            .layout
            .h_colors()
            .rev()
            .find(|c| !used.contains(c))
            .ok_or_else(|| StrategyError::NoLegalColor { rule: "spare H-color".into() })?;
        self.phase = Phase::Two { spare, deviant };
        Ok(())
    }

    /// Colors a vertex of the deviant gadget by its side of the path's
    /// bipartition, using at most one color per side.
    fn color_deviant(
        &self,
        state: &GameState,
        ident: &Identification,
        pending: Vertex,
        legal: &[Color],
        spare: Color,
        gadget: usize,
    ) -> Result<Color, StrategyError> {
        let g = state.presented().graph();
        // h^2 and h^4 of gadget j see every x_(2l), xbar_(2l) with l >= j
        let markers = ident.vertices_where(|c| match c {
            Classification::PositiveEven(i) | Classification::NegatedEven(i) => i / 2 >= gadget,
            _ => false,
        });
        let side = |v: Vertex| markers.iter().any(|&m| g.has_edge(v, m));
        let mine = side(pending);
        let members = ident.gadget_vertices(gadget, Some(pending));
        let color = |v: Vertex| state.presented().color(v);
        if let Some(c) = members.iter().filter(|&&v| side(v) == mine).find_map(|&v| color(v)) {
            return greedy(legal, [c], "deviant gadget, same side");
        }
        let other: Vec<Color> = members.iter().filter(|&&v| side(v) != mine).filter_map(|&v| color(v)).collect();
        greedy(
            legal,
            self.inst.layout.h_colors().filter(|&c| c != spare && !other.contains(&c)),
            "deviant gadget, new side",
        )
    }
}

fn unanimous(mut it: impl Iterator<Item = bool>) -> Option<bool> {
    let first = it.next()?;
    it.all(|x| x == first).then_some(first)
}
