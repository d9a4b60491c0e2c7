//! Immutable simple graphs and partially colored presented graphs.
//!
//! Vertex sets are stored as `u128` bitmasks, which caps every graph handled
//! by this crate at [`MAX_VERTICES`] vertices. The largest reduction instances
//! (four variables, three terms) have 78 host vertices.

use std::fmt;

use thiserror::Error;

pub type Vertex = usize;
pub type Color = u32;
pub type VertexSet = u128;

pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {0} vertices, at most {MAX_VERTICES} are supported")]
    TooLarge(usize),
    #[error("edge ({0}, {1}) is out of range for {2} vertices")]
    OutOfRange(Vertex, Vertex, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("color table has {got} entries for {expected} vertices")]
    ColorCount { expected: usize, got: usize },
    #[error("vertex {0} is uncolored but is not the pending vertex")]
    Uncolored(Vertex),
    #[error("pending vertex {0} carries a color")]
    PendingColored(Vertex),
    #[error("pending vertex {0} is out of range")]
    PendingOutOfRange(Vertex),
    #[error("color 0 used on vertex {0}; colors start at 1")]
    ZeroColor(Vertex),
    #[error("adjacent vertices {0} and {1} share color {2}")]
    Conflict(Vertex, Vertex, Color),
}

#[inline]
pub fn bit(v: Vertex) -> VertexSet {
    1u128 << v
}

/// Iterates the members of a vertex set in increasing order.
pub fn members(mut set: VertexSet) -> impl Iterator<Item = Vertex> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

#[inline]
pub fn full_set(n: usize) -> VertexSet {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Undirected simple graph over vertices `0..vertex_count`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.adj[u] & bit(v) != 0 {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            g.adj[u] |= bit(v);
            g.adj[v] |= bit(u);
        }
        Ok(g)
    }

    /// Builds a graph from adjacency rows. Rows must be symmetric and loop-free.
    pub fn from_rows(rows: Vec<VertexSet>) -> Result<Self, GraphError> {
        let n = rows.len();
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        for (u, &row) in rows.iter().enumerate() {
            if row & bit(u) != 0 {
                return Err(GraphError::SelfLoop(u));
            }
            if row & !full_set(n) != 0 {
                let v = (row & !full_set(n)).trailing_zeros() as usize;
                return Err(GraphError::OutOfRange(u, v, n));
            }
            for v in members(row) {
                if rows[v] & bit(u) == 0 {
                    return Err(GraphError::Parse {
                        line: 0,
                        msg: format!("asymmetric adjacency between {u} and {v}"),
                    });
                }
            }
        }
        Ok(Graph { n, adj: rows })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path fits")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::new(n, &edges).expect("cycle fits")
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n).map(|v| full_set(n) & !bit(v)).collect();
        Graph::from_rows(rows).expect("clique fits")
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> VertexSet {
        self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u] & bit(v) != 0
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in members(self.adj[u] >> u >> 1) {
                out.push((u, u + 1 + v));
            }
        }
        out
    }

    pub fn rows(&self) -> &[VertexSet] {
        &self.adj
    }

    /// The graph with one extra vertex `n` adjacent to `neighborhood`.
    pub fn extended(&self, neighborhood: VertexSet) -> Result<Self, GraphError> {
        if self.n + 1 > MAX_VERTICES {
            return Err(GraphError::TooLarge(self.n + 1));
        }
        assert!(
            neighborhood & !full_set(self.n) == 0,
            "neighborhood reaches past the presented vertices"
        );
        let new = self.n;
        let mut adj = self.adj.clone();
        for v in members(neighborhood) {
            adj[v] |= bit(new);
        }
        adj.push(neighborhood);
        Ok(Graph { n: self.n + 1, adj })
    }

    /// Induced subgraph on `keep`, relabeled in increasing vertex order.
    pub fn induced(&self, keep: &[Vertex]) -> Graph {
        let rows = keep
            .iter()
            .map(|&u| {
                keep.iter()
                    .enumerate()
                    .filter(|&(_, &v)| self.has_edge(u, v))
                    .fold(0, |acc, (i, _)| acc | bit(i))
            })
            .collect();
        Graph { n: keep.len(), adj: rows }
    }

    /// Relabels vertex `v` to `perm[v]`.
    pub fn permuted(&self, perm: &[Vertex]) -> Graph {
        let mut rows = vec![0; self.n];
        for u in 0..self.n {
            rows[perm[u]] = members(self.adj[u]).fold(0, |acc, v| acc | bit(perm[v]));
        }
        Graph { n: self.n, adj: rows }
    }

    /// Text format: `p <n> <m>` header, then `e <u> <v>` per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("p {} {}\n", self.n, self.edge_count());
        for (u, v) in self.edges() {
            s.push_str(&format!("e {u} {v}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        parse_graph_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}, {:?})", self.n, self.edges())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn parse_num(line: usize, tok: Option<&str>, what: &str) -> Result<usize, GraphError> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

/// Parses `p`/`e` lines; other line kinds are rejected.
pub(crate) fn parse_graph_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(no, "duplicate header"));
                }
                let n = parse_num(no, toks.next(), "vertex count")?;
                let m = parse_num(no, toks.next(), "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                if header.is_none() {
                    return Err(parse_err(no, "edge before header"));
                }
                let u = parse_num(no, toks.next(), "endpoint")?;
                let v = parse_num(no, toks.next(), "endpoint")?;
                edges.push((u, v));
            }
            Some(other) => return Err(parse_err(no, format!("unexpected token `{other}`"))),
            None => unreachable!(),
        }
        if toks.next().is_some() {
            return Err(parse_err(no, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing `p` header"))?;
    if edges.len() != m {
        return Err(parse_err(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::new(n, &edges)
}

/// A presented graph with a proper partial coloring: every vertex except the
/// optional pending one carries a color.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColoredState {
    graph: Graph,
    colors: Vec<Option<Color>>,
    pending: Option<Vertex>,
}

impl ColoredState {
    pub fn new(
        graph: Graph,
        colors: Vec<Option<Color>>,
        pending: Option<Vertex>,
    ) -> Result<Self, StateError> {
        let n = graph.vertex_count();
        if colors.len() != n {
            return Err(StateError::ColorCount { expected: n, got: colors.len() });
        }
        if let Some(p) = pending {
            if p >= n {
                return Err(StateError::PendingOutOfRange(p));
            }
        }
        for (v, c) in colors.iter().enumerate() {
            match (c, pending == Some(v)) {
                (None, false) => return Err(StateError::Uncolored(v)),
                (Some(_), true) => return Err(StateError::PendingColored(v)),
                (Some(0), _) => return Err(StateError::ZeroColor(v)),
                _ => {}
            }
        }
        for (u, v) in graph.edges() {
            if let (Some(a), Some(b)) = (colors[u], colors[v]) {
                if a == b {
                    return Err(StateError::Conflict(u, v, a));
                }
            }
        }
        Ok(ColoredState { graph, colors, pending })
    }

    pub fn empty() -> Self {
        ColoredState { graph: Graph::empty(0).unwrap(), colors: Vec::new(), pending: None }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn colors(&self) -> &[Option<Color>] {
        &self.colors
    }

    #[inline]
    pub fn color(&self, v: Vertex) -> Option<Color> {
        self.colors[v]
    }

    pub fn pending(&self) -> Option<Vertex> {
        self.pending
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Colors carried by members of `set`.
    pub fn colors_on(&self, set: VertexSet) -> Vec<Color> {
        let mut out: Vec<Color> = members(set).filter_map(|v| self.colors[v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Adds a new pending vertex adjacent to `neighborhood`. Panics if a
    /// vertex is already pending.
    pub fn present(&self, neighborhood: VertexSet) -> Result<Self, GraphError> {
        assert!(self.pending.is_none(), "a vertex is already pending");
        let graph = self.graph.extended(neighborhood)?;
        let mut colors = self.colors.clone();
        colors.push(None);
        Ok(ColoredState { pending: Some(graph.vertex_count() - 1), graph, colors })
    }

    /// Colors the pending vertex without legality checks beyond a debug assert.
    pub(crate) fn colored_unchecked(&self, color: Color) -> Self {
        let p = self.pending.expect("no pending vertex");
        debug_assert!(self.colors_on(self.graph.neighbors(p)).binary_search(&color).is_err());
        let mut colors = self.colors.clone();
        colors[p] = Some(color);
        ColoredState { graph: self.graph.clone(), colors, pending: None }
    }

    /// Applies a vertex relabeling `perm` and a color map `recolor`.
    pub fn relabeled(&self, perm: &[Vertex], recolor: impl Fn(Color) -> Color) -> Self {
        let graph = self.graph.permuted(perm);
        let mut colors = vec![None; self.colors.len()];
        for (v, c) in self.colors.iter().enumerate() {
            colors[perm[v]] = c.map(&recolor);
        }
        ColoredState { graph, colors, pending: self.pending.map(|p| perm[p]) }
    }

    /// Graph text followed by `c <v> <color>` lines and an optional
    /// `pending <v>` line.
    pub fn to_text(&self) -> String {
        let mut s = self.graph.to_text();
        for (v, c) in self.colors.iter().enumerate() {
            if let Some(c) = c {
                s.push_str(&format!("c {v} {c}\n"));
            }
        }
        if let Some(p) = self.pending {
            s.push_str(&format!("pending {p}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, StateError> {
        let mut graph_lines = Vec::new();
        let mut color_lines = Vec::new();
        let mut pending = None;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.trim();
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("c") => {
                    let v = parse_num(no, toks.next(), "vertex")?;
                    let c = parse_num(no, toks.next(), "color")?;
                    if toks.next().is_some() {
                        return Err(parse_err(no, "trailing tokens").into());
                    }
                    color_lines.push((no, v, c as Color));
                }
                Some("pending") => {
                    if pending.is_some() {
                        return Err(parse_err(no, "duplicate pending line").into());
                    }
                    pending = Some(parse_num(no, toks.next(), "vertex")?);
                    if toks.next().is_some() {
                        return Err(parse_err(no, "trailing tokens").into());
                    }
                }
                _ => graph_lines.push((no, raw)),
            }
        }
        let graph = parse_graph_lines(graph_lines.into_iter())?;
        let mut colors = vec![None; graph.vertex_count()];
        for (no, v, c) in color_lines {
            if v >= colors.len() {
                return Err(parse_err(no, format!("vertex {v} out of range")).into());
            }
            if colors[v].replace(c).is_some() {
                return Err(parse_err(no, format!("vertex {v} colored twice")).into());
            }
        }
        ColoredState::new(graph, colors, pending)
    }
}

impl fmt::Debug for ColoredState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColoredState")
            .field("graph", &self.graph)
            .field("colors", &self.colors)
            .field("pending", &self.pending)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::new(2, &[(0, 2)]), Err(GraphError::OutOfRange(0, 2, 2)));
        assert_eq!(Graph::new(2, &[(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(Graph::empty(129), Err(GraphError::TooLarge(129))));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let g = Graph::cycle(5);
        let text = g.to_text();
        assert_eq!(text, "p 5 5\ne 0 1\ne 0 4\ne 1 2\ne 2 3\ne 3 4\n");
        let back = Graph::parse(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_skips_comments_and_checks_counts() {
        let g = Graph::parse("# a path\np 3 2\ne 0 1\n# mid\ne 1 2\n").unwrap();
        assert_eq!(g, Graph::path(3));
        assert!(Graph::parse("p 3 2\ne 0 1\n").is_err());
        assert!(Graph::parse("e 0 1\n").is_err());
        assert!(Graph::parse("p 3 1\ne 0 x\n").is_err());
    }

    #[test]
    fn colored_state_invariants() {
        let g = Graph::path(2);
        assert!(ColoredState::new(g.clone(), vec![Some(1), Some(1)], None).is_err());
        assert!(ColoredState::new(g.clone(), vec![Some(1), None], None).is_err());
        assert!(ColoredState::new(g.clone(), vec![Some(1), Some(2)], Some(1)).is_err());
        assert!(ColoredState::new(g.clone(), vec![Some(0), None], Some(1)).is_err());
        let s = ColoredState::new(g, vec![Some(1), None], Some(1)).unwrap();
        assert_eq!(s.colors_on(s.graph().neighbors(1)), vec![1]);
    }

    #[test]
    fn state_text_round_trip() {
        let s = ColoredState::empty().present(0).unwrap().colored_unchecked(2).present(1).unwrap();
        let text = s.to_text();
        assert_eq!(text, "p 2 1\ne 0 1\nc 0 2\npending 1\n");
        assert_eq!(ColoredState::parse(&text).unwrap(), s);
    }

    #[test]
    fn induced_and_permuted() {
        let g = Graph::path(4);
        assert_eq!(g.induced(&[0, 2, 3]), Graph::new(3, &[(1, 2)]).unwrap());
        let p = g.permuted(&[3, 2, 1, 0]);
        assert_eq!(p, g);
    }
}
