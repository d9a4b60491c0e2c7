//! Induced-subgraph embedding search.
//!
//! The search assigns pattern vertices to *host classes* rather than host
//! vertices. In labeled mode every host vertex is its own class. In
//! symmetric mode host twins (vertices with `N(u) - v == N(v) - u`) share a
//! class, and pattern vertices that are interchangeable (twins carrying the
//! same label and domain) are forced to take classes in nondecreasing order.
//! Symmetric mode therefore yields one representative per orbit of the host
//! twin group acting on the left and the pattern twin group acting on the
//! right, which is what existence checks and move generation need.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::graph::{bit, members, Graph, Vertex, VertexSet};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("embedding search exceeded its budget of {budget} nodes")]
pub struct BudgetExceeded {
    pub budget: u64,
}

/// Partition of host vertices into classes of mutual twins.
#[derive(Debug, Clone)]
pub struct HostClasses {
    members: Vec<Vec<Vertex>>,
    class_of: Vec<usize>,
    internal_edge: Vec<bool>,
    adjacent: Vec<u128>,
    degree: Vec<usize>,
}

impl HostClasses {
    pub fn singletons(host: &Graph) -> Self {
        let groups = (0..host.vertex_count()).map(|v| vec![v]).collect();
        Self::from_groups(host, groups)
    }

    pub fn twins(host: &Graph) -> Self {
        let n = host.vertex_count();
        let mut class_of = vec![usize::MAX; n];
        let mut groups: Vec<Vec<Vertex>> = Vec::new();
        for u in 0..n {
            if class_of[u] != usize::MAX {
                continue;
            }
            let id = groups.len();
            class_of[u] = id;
            let mut g = vec![u];
            for (v, c) in class_of.iter_mut().enumerate().skip(u + 1) {
                if *c == usize::MAX && are_twins(host, u, v) {
                    *c = id;
                    g.push(v);
                }
            }
            groups.push(g);
        }
        Self::from_groups(host, groups)
    }

    /// Splits classes so that each vertex in `singled` is alone and each
    /// mask in `masks` is a union of classes.
    pub fn split(&self, host: &Graph, singled: VertexSet, masks: &[VertexSet]) -> Self {
        let mut groups = Vec::new();
        for class in &self.members {
            let mut parts: Vec<(Vec<bool>, Vec<Vertex>)> = Vec::new();
            for &v in class {
                if singled & bit(v) != 0 {
                    groups.push(vec![v]);
                    continue;
                }
                let sig: Vec<bool> = masks.iter().map(|m| m & bit(v) != 0).collect();
                match parts.iter_mut().find(|(s, _)| *s == sig) {
                    Some((_, vs)) => vs.push(v),
                    None => parts.push((sig, vec![v])),
                }
            }
            groups.extend(parts.into_iter().map(|(_, vs)| vs));
        }
        groups.sort_by_key(|g| g[0]);
        Self::from_groups(host, groups)
    }

    fn from_groups(host: &Graph, groups: Vec<Vec<Vertex>>) -> Self {
        let n = host.vertex_count();
        let mut class_of = vec![0; n];
        for (c, g) in groups.iter().enumerate() {
            for &v in g {
                class_of[v] = c;
            }
        }
        let internal_edge = groups.iter().map(|g| g.len() > 1 && host.has_edge(g[0], g[1])).collect();
        let adjacent = groups
            .iter()
            .enumerate()
            .map(|(c, g)| {
                members(host.neighbors(g[0]))
                    .map(|v| class_of[v])
                    .filter(|&d| d != c)
                    .fold(0u128, |acc, d| acc | (1u128 << d))
            })
            .collect();
        let degree = groups.iter().map(|g| host.degree(g[0])).collect();
        HostClasses { members: groups, class_of, internal_edge, adjacent, degree }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, class: usize) -> &[Vertex] {
        &self.members[class]
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        self.class_of[v]
    }

    /// Whether a vertex of class `a` is adjacent to a (different) vertex of class `b`.
    #[inline]
    pub fn classes_adjacent(&self, a: usize, b: usize) -> bool {
        if a == b {
            self.internal_edge[a]
        } else {
            self.adjacent[a] & (1u128 << b) != 0
        }
    }
}

fn are_twins(g: &Graph, u: Vertex, v: Vertex) -> bool {
    g.neighbors(u) & !bit(v) == g.neighbors(v) & !bit(u)
}

#[inline]
fn mask_le(c: usize) -> u128 {
    if c >= 127 {
        u128::MAX
    } else {
        (1u128 << (c + 1)) - 1
    }
}

#[inline]
fn mask_ge(c: usize) -> u128 {
    !((1u128 << c) - 1)
}

/// Options for one embedding search.
#[derive(Debug, Clone, Default)]
pub struct EmbedOptions {
    /// Fixed images `(pattern vertex, host vertex)`.
    pub pins: Vec<(Vertex, Vertex)>,
    /// Optional allowed host vertices per pattern vertex.
    pub domains: Option<Vec<VertexSet>>,
    /// Interchangeability labels for symmetric mode; `None` treats all
    /// pattern vertices alike. Ignored in labeled mode.
    pub labels: Option<Vec<u64>>,
    pub node_budget: Option<u64>,
}

/// A configured search. Construct with [`Embedder::labeled`] or
/// [`Embedder::symmetric`].
pub struct Embedder<'a> {
    pattern: &'a Graph,
    classes: HostClasses,
    group: Vec<usize>,
    initial: Vec<u128>,
    node_budget: Option<u64>,
    nodes: u64,
}

const NO_GROUP: usize = usize::MAX;

impl<'a> Embedder<'a> {
    /// Every injective map is reported individually.
    pub fn labeled(pattern: &'a Graph, host: &'a Graph, opts: &EmbedOptions) -> Self {
        let base = HostClasses::singletons(host);
        Self::build(pattern, host, base, opts, false)
    }

    /// One representative per symmetry orbit. `twins` may be a precomputed
    /// `HostClasses::twins(host)`.
    pub fn symmetric(
        pattern: &'a Graph,
        host: &'a Graph,
        twins: Option<&HostClasses>,
        opts: &EmbedOptions,
    ) -> Self {
        let base = match twins {
            Some(t) => t.clone(),
            None => HostClasses::twins(host),
        };
        Self::build(pattern, host, base, opts, true)
    }

    fn build(
        pattern: &'a Graph,
        host: &'a Graph,
        base: HostClasses,
        opts: &EmbedOptions,
        symmetric: bool,
    ) -> Self {
        let np = pattern.vertex_count();
        let pinned_hosts = opts.pins.iter().fold(0, |acc, &(_, h)| acc | bit(h));
        let masks: Vec<VertexSet> = match &opts.domains {
            Some(d) => {
                let mut m = d.clone();
                m.sort_unstable();
                m.dedup();
                m
            }
            None => Vec::new(),
        };
        let classes = if pinned_hosts != 0 || !masks.is_empty() {
            base.split(host, pinned_hosts, &masks)
        } else {
            base
        };

        let mut initial: Vec<u128> = (0..np)
            .map(|p| {
                let deg = pattern.degree(p);
                (0..classes.len())
                    .filter(|&c| classes.degree[c] >= deg)
                    .fold(0u128, |acc, c| acc | (1u128 << c))
            })
            .collect();
        if let Some(domains) = &opts.domains {
            for (p, &d) in domains.iter().enumerate().take(np) {
                let allowed = members(d).fold(0u128, |acc, h| acc | (1u128 << classes.class_of(h)));
                initial[p] &= allowed;
            }
        }
        let mut pinned_pattern: VertexSet = 0;
        for &(p, h) in &opts.pins {
            initial[p] &= 1u128 << classes.class_of(h);
            pinned_pattern |= bit(p);
        }

        let mut group = vec![NO_GROUP; np];
        if symmetric {
            let label = |p: Vertex| opts.labels.as_ref().map_or(0, |l| l[p]);
            let domain = |p: Vertex| opts.domains.as_ref().map_or(0, |d| d[p]);
            for u in 0..np {
                if group[u] != NO_GROUP || pinned_pattern & bit(u) != 0 {
                    continue;
                }
                for v in u + 1..np {
                    if group[v] == NO_GROUP
                        && pinned_pattern & bit(v) == 0
                        && label(u) == label(v)
                        && domain(u) == domain(v)
                        && are_twins(pattern, u, v)
                    {
                        group[u] = u;
                        group[v] = u;
                    }
                }
            }
        }
        Embedder { pattern, classes, group, initial, node_budget: opts.node_budget, nodes: 0 }
    }

    pub fn classes(&self) -> &HostClasses {
        &self.classes
    }

    /// Search nodes expanded so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Visits every class assignment. The visitor returns `Break` to stop.
    /// Returns `Ok(true)` if the search ran to completion.
    pub fn for_each(
        &mut self,
        mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> Result<bool, BudgetExceeded> {
        let np = self.pattern.vertex_count();
        let mut assign = vec![usize::MAX; np];
        let mut used = vec![0u32; self.classes.len()];
        let allowed = self.initial.clone();
        if allowed.contains(&0) {
            return Ok(true);
        }
        let unassigned = crate::graph::full_set(np);
        match self.rec(&mut assign, &mut used, allowed, unassigned, &mut visit) {
            Ok(ControlFlow::Continue(())) => Ok(true),
            Ok(ControlFlow::Break(())) => Ok(false),
            Err(e) => Err(e),
        }
    }

    fn rec(
        &mut self,
        assign: &mut [usize],
        used: &mut [u32],
        allowed: Vec<u128>,
        unassigned: VertexSet,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, BudgetExceeded> {
        self.nodes += 1;
        if let Some(b) = self.node_budget {
            if self.nodes > b {
                return Err(BudgetExceeded { budget: b });
            }
        }
        if unassigned == 0 {
            return Ok(visit(assign));
        }
        let p = members(unassigned)
            .min_by_key(|&q| allowed[q].count_ones())
            .expect("nonempty");
        let rest = unassigned & !bit(p);
        let prow = self.pattern.neighbors(p);
        let mut choices = allowed[p];
        while choices != 0 {
            let c = choices.trailing_zeros() as usize;
            choices &= choices - 1;
            let size = self.classes.members[c].len() as u32;
            if used[c] >= size {
                continue;
            }
            let full = used[c] + 1 == size;
            let internal = self.classes.internal_edge[c];
            let adj_mask = self.classes.adjacent[c] | if internal { 1u128 << c } else { 0 };
            let non_mask = !self.classes.adjacent[c] & !(1u128 << c)
                | if !internal && size > 1 { 1u128 << c } else { 0 };
            let mut next = allowed.clone();
            let mut dead = false;
            for q in members(rest) {
                let mut a = next[q] & if prow & bit(q) != 0 { adj_mask } else { non_mask };
                if full {
                    a &= !(1u128 << c);
                }
                if self.group[p] != NO_GROUP && self.group[q] == self.group[p] {
                    a &= if q > p { mask_ge(c) } else { mask_le(c) };
                }
                if a == 0 {
                    dead = true;
                    break;
                }
                next[q] = a;
            }
            if dead {
                continue;
            }
            assign[p] = c;
            used[c] += 1;
            let flow = self.rec(assign, used, next, rest, visit)?;
            used[c] -= 1;
            assign[p] = usize::MAX;
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Turns a class assignment into a concrete injective map.
    pub fn materialize(&self, assign: &[usize]) -> Vec<Vertex> {
        let mut next = vec![0usize; self.classes.len()];
        let mut out = vec![0; assign.len()];
        for (p, &c) in assign.iter().enumerate() {
            out[p] = self.classes.members[c][next[c]];
            next[c] += 1;
        }
        out
    }

    /// Classes that still have an unused member under `assign`.
    pub fn free_classes(&self, assign: &[usize]) -> Vec<usize> {
        let mut used = vec![0usize; self.classes.len()];
        for &c in assign {
            used[c] += 1;
        }
        (0..self.classes.len()).filter(|&c| used[c] < self.classes.members[c].len()).collect()
    }
}

/// All (up to `limit`) injective maps `g` from `pattern` into `host` with
/// `(v,w)` an edge iff `(g(v),g(w))` is, extending `pins`.
pub fn induced_embeddings(
    pattern: &Graph,
    host: &Graph,
    pins: &[(Vertex, Vertex)],
    limit: usize,
) -> Vec<Vec<Vertex>> {
    let opts = EmbedOptions { pins: pins.to_vec(), ..Default::default() };
    let mut out = Vec::new();
    if limit == 0 || !pins_consistent(pattern, host, pins) {
        return out;
    }
    let mut e = Embedder::labeled(pattern, host, &opts);
    e.for_each(|assign| {
        out.push(assign.to_vec());
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .expect("no budget configured");
    out.into_iter().map(|a| e.materialize(&a)).collect()
}

fn pins_consistent(pattern: &Graph, host: &Graph, pins: &[(Vertex, Vertex)]) -> bool {
    for (i, &(p, h)) in pins.iter().enumerate() {
        if p >= pattern.vertex_count() || h >= host.vertex_count() {
            return false;
        }
        for &(q, k) in &pins[..i] {
            if (p == q) != (h == k) {
                return false;
            }
        }
    }
    true
}

/// Whether `pattern` is an induced subgraph of `host`.
pub fn embeds(pattern: &Graph, host: &Graph) -> bool {
    embeds_with(pattern, host, None, &EmbedOptions::default()).expect("no budget configured")
}

/// Existence check in symmetric mode with pins, domains and an optional budget.
pub fn embeds_with(
    pattern: &Graph,
    host: &Graph,
    twins: Option<&HostClasses>,
    opts: &EmbedOptions,
) -> Result<bool, BudgetExceeded> {
    if pattern.vertex_count() > host.vertex_count() || !pins_consistent(pattern, host, &opts.pins) {
        return Ok(false);
    }
    let mut e = Embedder::symmetric(pattern, host, twins, opts);
    let mut found = false;
    e.for_each(|_| {
        found = true;
        ControlFlow::Break(())
    })?;
    Ok(found)
}
