//! Compiler from normalized quantified 3DNF formulas to game states.
//!
//! Host vertex ids follow the role order A, B, X, H, T, m, c:
//! `a_1..a_(k-3)`, `b_1..b_(10n+3t)`, then `x_1, xbar_1, x_2, xbar_2, ...`,
//! then `h_1^1..h_1^4, h_2^1, ...`, then `t_1..t_t`, then `m`, then `c`.
//! The pre-colored graph lists `a'_i`, then `b'_i`, then `m'`, then `c'`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::embed::{embeds_with, BudgetExceeded, EmbedOptions, HostClasses};
use crate::game::{GameConfig, GameError, GameState};
use crate::graph::{Color, ColoredState, Graph, Vertex, MAX_VERTICES};
use crate::qbf::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("formula must be normalized before compilation")]
    NotNormalized,
    #[error("formula needs at least one term")]
    NoTerms,
    #[error("instance needs {vertices} host vertices, the limit is {max}")]
    TooLarge { vertices: usize, max: usize },
    #[error("B-degree {j} is outside 1..={max}")]
    DegreeOutOfRange { j: usize, max: usize },
    #[error("rigidity check `{check}` ran out of budget ({budget} nodes)")]
    Budget { check: String, budget: u64 },
    #[error("rigidity check `{check}` found an unexpected embedding")]
    Rigidity { check: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Role of a host vertex. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    A(usize),
    B(usize),
    X { var: usize, positive: bool },
    H { gadget: usize, pos: usize },
    T(usize),
    M,
    C,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Role::A(i) => write!(f, "a{i}"),
            Role::B(i) => write!(f, "b{i}"),
            Role::X { var, positive: true } => write!(f, "x{var}"),
            Role::X { var, positive: false } => write!(f, "xbar{var}"),
            Role::H { gadget, pos } => write!(f, "h{gadget}.{pos}"),
            Role::T(i) => write!(f, "t{i}"),
            Role::M => write!(f, "m"),
            Role::C => write!(f, "c"),
        }
    }
}

impl Role {
    /// Number of B-neighbors a vertex with this role has, for roles outside
    /// the pre-colored part.
    pub fn b_degree(self, n: usize) -> Option<usize> {
        match self {
            Role::X { var, positive } => {
                let i = var.div_ceil(2);
                Some(match (var % 2 == 1, positive) {
                    (true, _) => 3 * i - 2,
                    (false, true) => 3 * i - 1,
                    (false, false) => 3 * i,
                })
            }
            Role::H { gadget, .. } => Some(gadget + 3 * n / 2),
            Role::T(i) => Some(i + 2 * n),
            _ => None,
        }
    }
}

/// What a presented vertex's B-degree reveals about its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// `xbar_i`, `i` even.
    NegatedEven(usize),
    /// `x_i` or `xbar_i`, `i` odd.
    OddPair(usize),
    /// `x_i`, `i` even.
    PositiveEven(usize),
    /// Some vertex of gadget `H_i`.
    Gadget(usize),
    /// Term vertex `t_i`.
    Term(usize),
}

pub fn classify_by_b_degree(j: usize, n: usize, t: usize) -> Result<Classification, ReductionError> {
    let max = 2 * n + t;
    if j == 0 || j > max {
        return Err(ReductionError::DegreeOutOfRange { j, max });
    }
    Ok(if j <= 3 * n / 2 {
        match j % 3 {
            0 => Classification::NegatedEven(2 * j / 3),
            1 => Classification::OddPair((2 * j + 1) / 3),
            _ => Classification::PositiveEven((2 * j).div_ceil(3)),
        }
    } else if j <= 2 * n {
        Classification::Gadget(j - 3 * n / 2)
    } else {
        Classification::Term(j - 2 * n)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub k: usize,
    pub a: usize,
    pub b: usize,
    pub h: usize,
    pub t: usize,
    pub x: usize,
    pub host: usize,
    pub presented: usize,
}

pub fn expected_counts(n: usize, t: usize) -> Counts {
    assert!(n >= 2 && n.is_multiple_of(2) && t >= 1, "n must be even and positive, t positive");
    let k = t + 3 * n / 2 + 2;
    let a = k - 3;
    let b = 10 * n + 3 * t;
    Counts {
        k,
        a,
        b,
        h: 2 * n,
        t,
        x: 2 * n,
        host: 5 * t + 31 * n / 2 + 1,
        presented: 4 * t + 23 * n / 2 + 1,
    }
}

/// Host vertex ids by role, for an instance with parameters `n`, `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub t: usize,
    pub counts: Counts,
}

impl Layout {
    pub fn new(n: usize, t: usize) -> Self {
        Layout { n, t, counts: expected_counts(n, t) }
    }

    pub fn a(&self, i: usize) -> Vertex {
        i - 1
    }

    pub fn b(&self, i: usize) -> Vertex {
        self.counts.a + i - 1
    }

    pub fn x(&self, var: usize, positive: bool) -> Vertex {
        self.counts.a + self.counts.b + 2 * (var - 1) + usize::from(!positive)
    }

    pub fn h(&self, gadget: usize, pos: usize) -> Vertex {
        self.counts.a + self.counts.b + 2 * self.n + 4 * (gadget - 1) + pos - 1
    }

    pub fn term(&self, i: usize) -> Vertex {
        self.counts.a + self.counts.b + 4 * self.n + i - 1
    }

    pub fn m(&self) -> Vertex {
        self.counts.host - 2
    }

    pub fn c(&self) -> Vertex {
        self.counts.host - 1
    }

    pub fn vertex(&self, role: Role) -> Vertex {
        match role {
            Role::A(i) => self.a(i),
            Role::B(i) => self.b(i),
            Role::X { var, positive } => self.x(var, positive),
            Role::H { gadget, pos } => self.h(gadget, pos),
            Role::T(i) => self.term(i),
            Role::M => self.m(),
            Role::C => self.c(),
        }
    }

    /// Roles in vertex-id order.
    pub fn roles(&self) -> Vec<Role> {
        let mut out = Vec::with_capacity(self.counts.host);
        out.extend((1..=self.counts.a).map(Role::A));
        out.extend((1..=self.counts.b).map(Role::B));
        for var in 1..=self.n {
            out.push(Role::X { var, positive: true });
            out.push(Role::X { var, positive: false });
        }
        for gadget in 1..=self.n / 2 {
            out.extend((1..=4).map(|pos| Role::H { gadget, pos }));
        }
        out.extend((1..=self.t).map(Role::T));
        out.push(Role::M);
        out.push(Role::C);
        out
    }

    /// Presented-graph ids of the pre-colored vertices.
    pub fn presented_a(&self, i: usize) -> Vertex {
        i - 1
    }

    pub fn presented_b(&self, i: usize) -> Vertex {
        self.counts.a + i - 1
    }

    pub fn presented_m(&self) -> Vertex {
        self.counts.a + self.counts.b
    }

    pub fn presented_c(&self) -> Vertex {
        self.counts.a + self.counts.b + 1
    }

    /// Colors: 1 true, 2 false, 3 blocked by B, then the H-colors, then
    /// the T-colors.
    pub fn h_colors(&self) -> std::ops::RangeInclusive<Color> {
        4..=(3 + 3 * self.n / 2) as Color
    }

    pub fn t_colors(&self) -> std::ops::RangeInclusive<Color> {
        (4 + 3 * self.n / 2) as Color..=self.counts.k as Color
    }
}

pub const TRUE_COLOR: Color = 1;
pub const FALSE_COLOR: Color = 2;
pub const BLOCKED_COLOR: Color = 3;

/// A compiled formula.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub formula: Formula,
    pub n: usize,
    pub t: usize,
    pub layout: Layout,
    pub config: Arc<GameConfig>,
    pub initial: GameState,
    pub roles: Vec<Role>,
}

impl ReductionInstance {
    pub fn k(&self) -> Color {
        self.config.k()
    }

    pub fn host(&self) -> &Graph {
        self.config.host()
    }

    pub fn role(&self, v: Vertex) -> Role {
        self.roles[v]
    }

    /// Sidecar text: one `role <vertex> <tag>` line per host vertex.
    pub fn roles_text(&self) -> String {
        self.roles.iter().enumerate().map(|(v, r)| format!("role {v} {r}\n")).collect()
    }

    /// The pre-colored graph with its coloring.
    pub fn precolored(&self) -> &ColoredState {
        self.initial.presented()
    }
}

pub fn build(formula: &Formula) -> Result<ReductionInstance, ReductionError> {
    if !formula.is_normalized() {
        return Err(ReductionError::NotNormalized);
    }
    if formula.num_terms() == 0 {
        return Err(ReductionError::NoTerms);
    }
    let n = formula.num_vars();
    let t = formula.num_terms();
    let layout = Layout::new(n, t);
    let counts = layout.counts;
    if counts.host > MAX_VERTICES {
        return Err(ReductionError::TooLarge { vertices: counts.host, max: MAX_VERTICES });
    }
    let host = host_graph(formula, &layout);
    let config = GameConfig::new(host, counts.k as Color)?;
    let initial = GameState::new(Arc::clone(&config), precolored(&layout))?;
    Ok(ReductionInstance { formula: formula.clone(), n, t, layout, config, initial, roles: layout.roles() })
}

fn host_graph(formula: &Formula, l: &Layout) -> Graph {
    let (n, t) = (l.n, l.t);
    let c = l.counts;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let half = n / 2;

    for i in 1..=c.a {
        for j in i + 1..=c.a {
            edges.push((l.a(i), l.a(j)));
        }
    }
    for g in 1..=half {
        for p in 1..4 {
            edges.push((l.h(g, p), l.h(g, p + 1)));
        }
        for g2 in g + 1..=half {
            for p in 1..=4 {
                for p2 in 1..=4 {
                    edges.push((l.h(g, p), l.h(g2, p2)));
                }
            }
        }
    }
    for i in 1..=t {
        for j in i + 1..=t {
            edges.push((l.term(i), l.term(j)));
        }
    }
    for var in 1..=n {
        edges.push((l.x(var, true), l.x(var, false)));
    }
    for (j, term) in formula.terms().iter().enumerate() {
        let mut lits: Vec<Vertex> = term.iter().map(|lit| l.x(lit.var as usize, lit.positive)).collect();
        lits.sort_unstable();
        lits.dedup();
        for v in lits {
            edges.push((v, l.term(j + 1)));
        }
    }
    for g in 1..=half {
        for p in 1..=4 {
            edges.push((l.h(g, p), l.x(2 * g - 1, true)));
        }
        for p in [2, 4] {
            for even in g..=half {
                edges.push((l.h(g, p), l.x(2 * even, true)));
                edges.push((l.h(g, p), l.x(2 * even, false)));
            }
        }
        for p in 1..=4 {
            for j in 1..=t {
                edges.push((l.h(g, p), l.term(j)));
            }
        }
    }
    for i in 1..=c.a {
        edges.push((l.c(), l.a(i)));
    }
    for i in 1..=c.b {
        edges.push((l.c(), l.b(i)));
    }
    for var in 1..=n {
        for i in 1..=c.a {
            edges.push((l.x(var, true), l.a(i)));
            edges.push((l.x(var, false), l.a(i)));
        }
    }
    for j in 1..=t {
        edges.push((l.m(), l.term(j)));
    }
    for role in l.roles() {
        if let Some(d) = role.b_degree(n) {
            for j in 1..=d {
                edges.push((l.b(j), l.vertex(role)));
            }
        }
    }
    Graph::new(c.host, &edges).expect("construction produces a simple graph")
}

fn precolored(l: &Layout) -> ColoredState {
    let c = l.counts;
    let nv = c.a + c.b + 2;
    let mut edges = Vec::new();
    for i in 1..=c.a {
        edges.push((l.presented_c(), l.presented_a(i)));
        for j in i + 1..=c.a {
            edges.push((l.presented_a(i), l.presented_a(j)));
        }
    }
    for i in 1..=c.b {
        edges.push((l.presented_c(), l.presented_b(i)));
    }
    let graph = Graph::new(nv, &edges).expect("pre-colored graph is simple");
    let mut colors = vec![None; nv];
    for i in 1..=c.a {
        colors[l.presented_a(i)] = Some(i as Color + 3);
    }
    for i in 1..=c.b {
        colors[l.presented_b(i)] = Some(BLOCKED_COLOR);
    }
    colors[l.presented_m()] = Some(TRUE_COLOR);
    colors[l.presented_c()] = Some(TRUE_COLOR);
    ColoredState::new(graph, colors, None).expect("pre-coloring is proper")
}

/// Outcome of one pinned existence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityCheck {
    pub description: String,
    pub expected: bool,
    pub embedding_exists: bool,
}

#[derive(Debug, Clone)]
pub struct RigidityReport {
    pub checks: Vec<RigidityCheck>,
}

impl RigidityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.embedding_exists == c.expected)
    }
}

/// Confirms by pinned existence searches that the pre-colored graph can
/// only be placed on A, B, m, c. Every pin of `c'` away from `c`, and every
/// pin of `a'_1`, `b'_1` or `m'` outside its own role family (with `c'` on
/// `c`), must be infeasible. Pinning one representative suffices: the
/// `a'` vertices are pairwise twins, as are the `b'` vertices, and host
/// twins are interchangeable.
pub fn verify_embedding_rigidity(inst: &ReductionInstance, budget: u64) -> Result<RigidityReport, ReductionError> {
    let host = inst.host();
    let pattern = inst.precolored().graph();
    let l = &inst.layout;
    let twins = inst.config.twins();
    let mut checks = Vec::new();
    let mut run = |description: String, pins: Vec<(Vertex, Vertex)>, want: bool| -> Result<(), ReductionError> {
        let opts = EmbedOptions { pins, node_budget: Some(budget), ..Default::default() };
        let exists = embeds_with(pattern, host, Some(twins), &opts)
            .map_err(|BudgetExceeded { budget }| ReductionError::Budget { check: description.clone(), budget })?;
        if exists != want {
            return Err(ReductionError::Rigidity { check: description });
        }
        checks.push(RigidityCheck { description, expected: want, embedding_exists: exists });
        Ok(())
    };

    run("unpinned".into(), Vec::new(), true)?;
    let reps = class_representatives(twins);
    for &v in &reps {
        if v != l.c() {
            run(format!("c' -> {}", inst.role(v)), vec![(l.presented_c(), v)], false)?;
        }
    }
    let family = |v: Vertex, role: &dyn Fn(Role) -> bool| role(inst.role(v));
    for &v in &reps {
        if v == l.c() {
            continue;
        }
        let c_pin = (l.presented_c(), l.c());
        if !family(v, &|r| matches!(r, Role::A(_))) {
            run(format!("c' -> c, a'1 -> {}", inst.role(v)), vec![c_pin, (l.presented_a(1), v)], false)?;
        }
        if !family(v, &|r| matches!(r, Role::B(_))) {
            run(format!("c' -> c, b'1 -> {}", inst.role(v)), vec![c_pin, (l.presented_b(1), v)], false)?;
        }
        if v != l.m() {
            run(format!("c' -> c, m' -> {}", inst.role(v)), vec![c_pin, (l.presented_m(), v)], false)?;
        }
    }
    Ok(RigidityReport { checks })
}

fn class_representatives(classes: &HostClasses) -> Vec<Vertex> {
    (0..classes.len()).map(|c| classes.members(c)[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ReductionInstance {
        build(&Formula::parse("forall 1 exists 2 : (1 2 2)").unwrap()).unwrap()
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify_by_b_degree(1, 2, 1).unwrap(), Classification::OddPair(1));
        assert_eq!(classify_by_b_degree(2, 2, 1).unwrap(), Classification::PositiveEven(2));
        assert_eq!(classify_by_b_degree(3, 2, 1).unwrap(), Classification::NegatedEven(2));
        assert_eq!(classify_by_b_degree(4, 2, 1).unwrap(), Classification::Gadget(1));
        assert_eq!(classify_by_b_degree(5, 2, 1).unwrap(), Classification::Term(1));
        assert!(classify_by_b_degree(6, 2, 1).is_err());
        assert!(classify_by_b_degree(0, 2, 1).is_err());
    }

    #[test]
    fn counts() {
        let c = expected_counts(2, 1);
        assert_eq!((c.k, c.host, c.presented), (6, 37, 28));
        assert_eq!(c.host - c.b, 14);
        let c = expected_counts(4, 3);
        assert_eq!((c.k, c.b), (11, 49));
    }

    #[test]
    fn layout_is_a_bijection() {
        let l = Layout::new(4, 3);
        let roles = l.roles();
        assert_eq!(roles.len(), l.counts.host);
        for (v, &r) in roles.iter().enumerate() {
            assert_eq!(l.vertex(r), v, "{r}");
        }
    }

    #[test]
    fn tiny_instance() {
        let inst = tiny();
        assert_eq!(inst.host().vertex_count(), 37);
        assert_eq!(inst.precolored().vertex_count(), 28);
        assert_eq!(inst.k(), 6);
        let l = inst.layout;
        assert_eq!(inst.precolored().color(l.presented_a(3)), Some(6));
        assert_eq!(inst.precolored().color(l.presented_m()), Some(1));
        assert_eq!(inst.roles_text().lines().last(), Some("role 36 c"));
    }

    #[test]
    fn rejects_unnormalized() {
        let f = Formula::parse("exists 1 : (1 1 1)").unwrap();
        assert_eq!(build(&f).unwrap_err(), ReductionError::NotNormalized);
    }

    #[test]
    fn rigidity_tiny() {
        let inst = tiny();
        let report = verify_embedding_rigidity(&inst, 10_000_000).unwrap();
        assert!(report.passed());
        assert!(report.checks.iter().any(|c| c.description == "c' -> m"));
    }
}
