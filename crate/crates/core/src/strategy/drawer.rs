use std::sync::Arc;

use super::StrategyError;
use crate::game::{GameState, Status};
use crate::graph::{Color, Vertex, VertexSet};
use crate::qbf::ValueTable;
use crate::reduction::{ReductionInstance, Role, FALSE_COLOR, TRUE_COLOR};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct DrawerOptions {
    /// Leave a true/false color on an odd gadget position instead of
    /// reflecting the gadget. Breaks the strategy; used to test that the
    /// harness notices.
    pub skip_swap: bool,
}

/// The drawer's round-based strategy for false formulas.
///
/// Round `i` presents `x_(2i-1)` and its negation, then `H_i` as two
/// non-adjacent vertices followed by the other two, then `x_(2i)` and its
/// negation. Afterwards every term vertex is presented. Identities are
/// committed lazily: `plan` maps each presented vertex to a host vertex and
/// is rewritten (within the symmetries the painter cannot see) when the
/// painter's colors arrive.
#[derive(Debug, Clone)]
pub struct DrawerScript {
    inst: Arc<ReductionInstance>,
    values: Arc<ValueTable>,
    options: DrawerOptions,
    plan: Vec<Vertex>,
    /// Free vertices presented so far.
    step: usize,
    /// Truth values fixed so far, `x1` first.
    assignment: Vec<bool>,
}

const STEPS_PER_ROUND: usize = 8;

impl DrawerScript {
    pub fn new(inst: Arc<ReductionInstance>, options: DrawerOptions) -> Result<Self, StrategyError> {
        let values = Arc::new(ValueTable::new(&inst.formula)?);
        let l = inst.layout;
        let mut plan: Vec<Vertex> = (1..=l.counts.a).map(|i| l.a(i)).collect();
        plan.extend((1..=l.counts.b).map(|i| l.b(i)));
        plan.push(l.m());
        plan.push(l.c());
        Ok(DrawerScript { inst, values, options, plan, step: 0, assignment: Vec::new() })
    }

    pub fn assignment(&self) -> &[bool] {
        &self.assignment
    }

    /// Host vertex currently planned for presented vertex `v`.
    pub fn planned(&self, v: Vertex) -> Vertex {
        self.plan[v]
    }

    fn round_len(&self) -> usize {
        self.inst.n / 2 * STEPS_PER_ROUND
    }

    fn role_at(&self, v: Vertex) -> Role {
        self.inst.role(self.plan[v])
    }

    /// Presented vertex currently planned as `role`.
    fn presented_as(&self, role: Role) -> Option<Vertex> {
        let hv = self.inst.layout.vertex(role);
        self.plan.iter().position(|&p| p == hv)
    }

    fn next_role(&self) -> Result<Role, StrategyError> {
        if self.step >= self.round_len() {
            let j = self.step - self.round_len() + 1;
            return if j <= self.inst.t { Ok(Role::T(j)) } else { Err(StrategyError::Exhausted) };
        }
        let round = self.step / STEPS_PER_ROUND + 1;
        let odd = 2 * round - 1;
        Ok(match self.step % STEPS_PER_ROUND {
            0 => Role::X { var: odd, positive: true },
            1 => Role::X { var: odd, positive: false },
            2 => Role::H { gadget: round, pos: 1 },
            3 => Role::H { gadget: round, pos: 3 },
            4 | 5 => {
                let pos = (1..=4)
                    .find(|&pos| self.presented_as(Role::H { gadget: round, pos }).is_none())
                    .expect("a gadget position is free");
                Role::H { gadget: round, pos }
            }
            6 => Role::X { var: odd + 1, positive: true },
            _ => Role::X { var: odd + 1, positive: false },
        })
    }

    /// Neighborhood of the next presentation: the planned host vertex's
    /// adjacency projected onto the presented vertices.
    pub fn next(&mut self, state: &GameState) -> Result<VertexSet, StrategyError> {
        if state.status() != Status::DrawerToMove {
            return Err(StrategyError::NotYourTurn);
        }
        self.check(state)?;
        let role = self.next_role()?;
        let hv = self.inst.layout.vertex(role);
        let host = self.inst.host();
        let nb = self.plan.iter().enumerate().filter(|&(_, &p)| host.has_edge(p, hv)).fold(0, |acc, (v, _)| acc | 1 << v);
        self.plan.push(hv);
        self.step += 1;
        Ok(nb)
    }

    /// Takes the painter's latest color into account. Returns annotation
    /// lines describing any commitments made.
    pub fn observe(&mut self, state: &GameState) -> Result<Vec<String>, StrategyError> {
        let mut notes = Vec::new();
        if state.pending().is_some() || self.step == 0 || self.step > self.round_len() {
            return Ok(notes);
        }
        let color = |v: Vertex| state.presented().color(v);
        let round = (self.step - 1) / STEPS_PER_ROUND + 1;
        let odd = 2 * round - 1;
        match (self.step - 1) % STEPS_PER_ROUND {
            1 => {
                let value = self.values.falsifying_move(&self.assignment);
                self.assignment.push(value);
                let want: Color = if value { TRUE_COLOR } else { FALSE_COLOR };
                let pos = self.presented_as(Role::X { var: odd, positive: true }).unwrap();
                let neg = self.presented_as(Role::X { var: odd, positive: false }).unwrap();
                if color(pos) != Some(want) {
                    self.plan.swap(pos, neg);
                }
                let x = if color(pos) == Some(want) { pos } else { neg };
                notes.push(format!("commit x{odd} = {value}: vertex {x} is x{odd}"));
            }
            3 => {
                let first = self.presented_as(Role::H { gadget: round, pos: 1 }).unwrap();
                let second = self.presented_as(Role::H { gadget: round, pos: 3 }).unwrap();
                if color(first) == color(second) {
                    self.plan[second] = self.inst.layout.h(round, 4);
                    notes.push(format!("commit vertices {first},{second} are h{round}.1,h{round}.4"));
                } else {
                    notes.push(format!("commit vertices {first},{second} are h{round}.1,h{round}.3"));
                }
            }
            5 => {
                let at = |pos| self.presented_as(Role::H { gadget: round, pos }).unwrap();
                let boolean = |v| matches!(color(v), Some(TRUE_COLOR) | Some(FALSE_COLOR));
                let on_even = boolean(at(2)) || boolean(at(4));
                let on_odd = boolean(at(1)) || boolean(at(3));
                if on_odd && !on_even && !self.options.skip_swap {
                    let (h1, h2, h3, h4) = (at(1), at(2), at(3), at(4));
                    self.plan.swap(h1, h4);
                    self.plan.swap(h2, h3);
                    notes.push(format!("commit reflect H{round}: vertices {h4},{h3},{h2},{h1} are h{round}.1..4"));
                }
            }
            7 => {
                let pos = self.presented_as(Role::X { var: odd + 1, positive: true }).unwrap();
                self.assignment.push(color(pos) == Some(TRUE_COLOR));
            }
            _ => {}
        }
        self.check(state)?;
        Ok(notes)
    }

    /// The plan must be an induced embedding of the presented graph.
    fn check(&self, state: &GameState) -> Result<(), StrategyError> {
        let g = state.presented().graph();
        if g.vertex_count() != self.plan.len() {
            return Err(StrategyError::Inconsistent(format!(
                "{} presented vertices but {} planned",
                g.vertex_count(),
                self.plan.len()
            )));
        }
        let host = self.inst.host();
        for u in 0..self.plan.len() {
            for v in u + 1..self.plan.len() {
                if g.has_edge(u, v) != host.has_edge(self.plan[u], self.plan[v]) {
                    return Err(StrategyError::Inconsistent(format!(
                        "vertices {u} ({}) and {v} ({})",
                        self.role_at(u),
                        self.role_at(v)
                    )));
                }
            }
        }
        Ok(())
    }
}
