//! Canonical forms of colored presented graphs.
//!
//! A state is turned into an auxiliary vertex-labeled graph: one node per
//! presented vertex (label 0, or 1 for the pending vertex) plus one node per
//! color in use, joined to the vertices wearing it. In fixed mode each color
//! node is labeled by its color id; in permutable mode all color nodes share
//! a label, so bijective recolorings give isomorphic auxiliary graphs.
//!
//! The canonical form is the lexicographically smallest adjacency encoding
//! over all leaves of an individualization-refinement tree. Only one member
//! per twin class is individualized at each branch, since swapping twins is
//! an automorphism; this keeps the large twin blocks of the reduction
//! pre-colorings from blowing up the tree.

use std::fmt;

use crate::graph::{members, ColoredState, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorMode {
    Fixed,
    Permutable,
}

/// Opaque key; equal keys mean isomorphic states under the chosen mode.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey(")?;
        for b in self.0.iter().take(24) {
            write!(f, "{b:02x}")?;
        }
        if self.0.len() > 24 {
            write!(f, "..")?;
        }
        write!(f, ")")
    }
}

const WORDS: usize = 4;
type Row = [u64; WORDS];

#[inline]
fn has(row: &Row, v: usize) -> bool {
    row[v >> 6] >> (v & 63) & 1 == 1
}

#[inline]
fn set(row: &mut Row, v: usize) {
    row[v >> 6] |= 1 << (v & 63);
}

#[inline]
fn clear(row: &Row, v: usize) -> Row {
    let mut r = *row;
    r[v >> 6] &= !(1 << (v & 63));
    r
}

struct Aux {
    n: usize,
    labels: Vec<u32>,
    adj: Vec<Row>,
    nbrs: Vec<Vec<usize>>,
    twin: Vec<usize>,
}

impl Aux {
    fn new(labels: Vec<u32>, edges: &[(usize, usize)]) -> Self {
        let n = labels.len();
        assert!(n <= WORDS * 64, "state too large to canonicalize");
        let mut adj = vec![[0u64; WORDS]; n];
        let mut nbrs = vec![Vec::new(); n];
        for &(u, v) in edges {
            set(&mut adj[u], v);
            set(&mut adj[v], u);
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
        let mut twin = vec![usize::MAX; n];
        for u in 0..n {
            if twin[u] != usize::MAX {
                continue;
            }
            twin[u] = u;
            for v in u + 1..n {
                if twin[v] == usize::MAX
                    && labels[u] == labels[v]
                    && clear(&adj[u], v) == clear(&adj[v], u)
                {
                    twin[v] = u;
                }
            }
        }
        Aux { n, labels, adj, nbrs, twin }
    }

    fn initial_cells(&self) -> Vec<u32> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| self.labels[v]);
        let mut cell = vec![0u32; self.n];
        for i in 0..self.n {
            let v = order[i];
            cell[v] = if i > 0 && self.labels[order[i - 1]] == self.labels[v] {
                cell[order[i - 1]]
            } else {
                i as u32
            };
        }
        cell
    }

    /// Equitable refinement; cell ids are start positions in the ordering.
    fn refine(&self, cell: &mut [u32]) {
        let mut count = distinct(cell);
        loop {
            let mut keyed: Vec<(u32, Vec<u32>, usize)> = (0..self.n)
                .map(|v| {
                    let mut sig: Vec<u32> = self.nbrs[v].iter().map(|&w| cell[w]).collect();
                    sig.sort_unstable();
                    (cell[v], sig, v)
                })
                .collect();
            keyed.sort_unstable();
            for i in 0..self.n {
                let v = keyed[i].2;
                cell[v] = if i > 0 && keyed[i - 1].0 == keyed[i].0 && keyed[i - 1].1 == keyed[i].1 {
                    cell[keyed[i - 1].2]
                } else {
                    i as u32
                };
            }
            let c = distinct(cell);
            if c == count {
                return;
            }
            count = c;
        }
    }

    fn encode(&self, cell: &[u32]) -> Vec<u8> {
        let mut order = vec![0usize; self.n];
        for v in 0..self.n {
            order[cell[v] as usize] = v;
        }
        let mut out = Vec::with_capacity(2 + 4 * self.n + self.n * self.n / 16 + 1);
        out.extend_from_slice(&(self.n as u16).to_be_bytes());
        for &v in &order {
            out.extend_from_slice(&self.labels[v].to_be_bytes());
        }
        let mut byte = 0u8;
        let mut nbits = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                byte = byte << 1 | has(&self.adj[order[i]], order[j]) as u8;
                nbits += 1;
                if nbits == 8 {
                    out.push(byte);
                    byte = 0;
                    nbits = 0;
                }
            }
        }
        if nbits > 0 {
            out.push(byte << (8 - nbits));
        }
        out
    }

    fn search(&self, cell: &mut [u32], best: &mut Option<Vec<u8>>) {
        self.refine(cell);
        if distinct(cell) == self.n {
            let code = self.encode(cell);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        // first non-singleton cell
        let mut sizes = vec![0u32; self.n];
        for &c in cell.iter() {
            sizes[c as usize] += 1;
        }
        let target = (0..self.n).find(|&c| sizes[c] > 1).unwrap() as u32;
        let mut tried: Vec<usize> = Vec::new();
        for v in 0..self.n {
            if cell[v] != target || tried.contains(&self.twin[v]) {
                continue;
            }
            tried.push(self.twin[v]);
            let mut next = cell.to_vec();
            for (w, c) in next.iter_mut().enumerate() {
                if *c == target && w != v {
                    *c = target + 1;
                }
            }
            self.search(&mut next, best);
        }
    }

    fn canonical(&self) -> Vec<u8> {
        let mut cell = self.initial_cells();
        let mut best = None;
        self.search(&mut cell, &mut best);
        best.unwrap_or_else(|| vec![0, 0])
    }
}

fn distinct(cell: &[u32]) -> usize {
    let mut seen = vec![false; cell.len()];
    let mut c = 0;
    for &x in cell {
        if !seen[x as usize] {
            seen[x as usize] = true;
            c += 1;
        }
    }
    c
}

/// Canonical key of a colored state (pending vertex always distinguished).
pub fn canonical_key(state: &ColoredState, mode: ColorMode) -> CanonicalKey {
    let n = state.vertex_count();
    let mut palette: Vec<u32> = state.colors().iter().flatten().copied().collect();
    palette.sort_unstable();
    palette.dedup();
    let mut labels: Vec<u32> = (0..n).map(|v| (state.pending() == Some(v)) as u32).collect();
    labels.extend(palette.iter().map(|&c| match mode {
        ColorMode::Fixed => 2 + c,
        ColorMode::Permutable => 2,
    }));
    let mut edges = state.graph().edges();
    for (v, c) in state.colors().iter().enumerate() {
        if let Some(c) = c {
            let idx = palette.binary_search(c).unwrap();
            edges.push((v, n + idx));
        }
    }
    CanonicalKey(Aux::new(labels, &edges).canonical())
}

/// Canonical key of an uncolored graph.
pub fn graph_key(g: &Graph) -> CanonicalKey {
    let n = g.vertex_count();
    let edges: Vec<_> = (0..n)
        .flat_map(|u| members(g.neighbors(u)).filter(move |&v| v > u).map(move |v| (u, v)))
        .collect();
    CanonicalKey(Aux::new(vec![0; n], &edges).canonical())
}
