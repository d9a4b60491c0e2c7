//! The drawer–painter game: states, legal moves for both players, and
//! terminal detection.

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::canon::{canonical_key, CanonicalKey, ColorMode};
use crate::embed::{embeds_with, EmbedOptions, Embedder, HostClasses};
use crate::graph::{bit, full_set, members, Color, ColoredState, Graph, GraphError, Vertex, VertexSet};

/// Embeddings enumerated per drawer-move query before switching to the
/// neighborhood-subset fallback.
pub const EMBEDDING_LIMIT: usize = 200_000;
/// Largest presented graph for which the subset fallback is allowed.
pub const SUBSET_FALLBACK_MAX: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("color budget must be at least 1")]
    ZeroBudget,
    #[error("it is not the drawer's turn")]
    NotDrawerTurn,
    #[error("it is not the painter's turn")]
    NotPainterTurn,
    #[error("color {color} is not legal here; legal colors: {legal:?}")]
    IllegalColor { color: Color, legal: Vec<Color> },
    #[error("presented graph would not be an induced subgraph of the host")]
    IllegalPresentation,
    #[error("neighborhood mentions vertices that are not presented")]
    NeighborhoodOutOfRange,
    #[error("presented graph does not embed in the host")]
    NotEmbeddable,
    #[error("color {0} exceeds the budget {1}")]
    ColorOutOfRange(Color, Color),
    #[error("too many embeddings to enumerate drawer moves for {0} presented vertices")]
    TooManyEmbeddings(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The agreed host graph `G` and the color budget `k`.
#[derive(Debug)]
pub struct GameConfig {
    host: Graph,
    k: Color,
    twins: HostClasses,
}

impl GameConfig {
    pub fn new(host: Graph, k: Color) -> Result<Arc<Self>, GameError> {
        if k == 0 {
            return Err(GameError::ZeroBudget);
        }
        let twins = HostClasses::twins(&host);
        Ok(Arc::new(GameConfig { host, k, twins }))
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn k(&self) -> Color {
        self.k
    }

    pub fn twins(&self) -> &HostClasses {
        &self.twins
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    DrawerToMove,
    PainterToMove,
    PainterWon,
    DrawerWon,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        matches!(self, Status::PainterWon | Status::DrawerWon)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::DrawerToMove => "drawer-to-move",
            Status::PainterToMove => "painter-to-move",
            Status::PainterWon => "painter-won",
            Status::DrawerWon => "drawer-won",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Painter,
    Drawer,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Painter => "painter",
            Role::Drawer => "drawer",
        })
    }
}

/// A game position. Whose turn it is follows from whether a vertex is pending.
#[derive(Clone)]
pub struct GameState {
    config: Arc<GameConfig>,
    presented: ColoredState,
}

/// One deduplicated drawer move.
#[derive(Debug, Clone)]
pub struct DrawerMove {
    /// Presented vertices the new vertex is adjacent to.
    pub neighborhood: VertexSet,
    pub state: GameState,
    /// Fixed-color canonical key of `state`.
    pub key: CanonicalKey,
}

impl GameState {
    pub fn initial(config: Arc<GameConfig>) -> Self {
        GameState { config, presented: ColoredState::empty() }
    }

    /// Validates that `presented` embeds in the host and uses colors in `1..=k`.
    pub fn new(config: Arc<GameConfig>, presented: ColoredState) -> Result<Self, GameError> {
        for c in presented.colors().iter().flatten() {
            if *c > config.k {
                return Err(GameError::ColorOutOfRange(*c, config.k));
            }
        }
        let ok = embeds_with(presented.graph(), &config.host, Some(&config.twins), &EmbedOptions::default())
            .expect("unbounded search");
        if !ok {
            return Err(GameError::NotEmbeddable);
        }
        Ok(GameState { config, presented })
    }

    pub fn config(&self) -> &Arc<GameConfig> {
        &self.config
    }

    pub fn presented(&self) -> &ColoredState {
        &self.presented
    }

    pub fn k(&self) -> Color {
        self.config.k
    }

    pub fn status(&self) -> Status {
        match self.presented.pending() {
            Some(_) if self.legal_colors().is_empty() => Status::DrawerWon,
            Some(_) => Status::PainterToMove,
            None if self.presented.vertex_count() == self.config.host.vertex_count() => Status::PainterWon,
            None => Status::DrawerToMove,
        }
    }

    fn legal_colors(&self) -> Vec<Color> {
        let p = self.presented.pending().expect("pending vertex");
        let blocked = self.presented.colors_on(self.presented.graph().neighbors(p));
        (1..=self.config.k).filter(|c| blocked.binary_search(c).is_err()).collect()
    }

    /// Colors in `1..=k` not used on the pending vertex's neighbors.
    pub fn painter_moves(&self) -> Result<Vec<Color>, GameError> {
        if self.presented.pending().is_none() {
            return Err(GameError::NotPainterTurn);
        }
        Ok(self.legal_colors())
    }

    pub fn apply_color(&self, color: Color) -> Result<GameState, GameError> {
        let legal = self.painter_moves()?;
        if !legal.contains(&color) {
            return Err(GameError::IllegalColor { color, legal });
        }
        Ok(GameState {
            config: Arc::clone(&self.config),
            presented: self.presented.colored_unchecked(color),
        })
    }

    /// Whether presenting a vertex adjacent to `neighborhood` keeps the
    /// presented graph induced in the host.
    pub fn is_legal_presentation(&self, neighborhood: VertexSet) -> Result<bool, GameError> {
        if self.status() != Status::DrawerToMove {
            return Err(GameError::NotDrawerTurn);
        }
        if neighborhood & !full_set(self.presented.vertex_count()) != 0 {
            return Err(GameError::NeighborhoodOutOfRange);
        }
        let g = self.presented.graph().extended(neighborhood)?;
        Ok(embeds_with(&g, &self.config.host, Some(&self.config.twins), &EmbedOptions::default())
            .expect("unbounded search"))
    }

    /// Presents a new vertex, checking legality.
    pub fn present(&self, neighborhood: VertexSet) -> Result<GameState, GameError> {
        if !self.is_legal_presentation(neighborhood)? {
            return Err(GameError::IllegalPresentation);
        }
        Ok(self.present_unchecked(neighborhood))
    }

    pub(crate) fn present_unchecked(&self, neighborhood: VertexSet) -> GameState {
        GameState {
            config: Arc::clone(&self.config),
            presented: self.presented.present(neighborhood).expect("size checked by embedding"),
        }
    }

    /// Distinct legal neighborhoods, complete up to automorphisms of the
    /// presented colored graph (not yet deduplicated by isomorphism).
    pub fn legal_neighborhoods(&self) -> Result<Vec<VertexSet>, GameError> {
        if self.status() != Status::DrawerToMove {
            return Err(GameError::NotDrawerTurn);
        }
        match self.neighborhoods_by_embedding() {
            Some(v) => Ok(v),
            None if self.presented.vertex_count() <= SUBSET_FALLBACK_MAX => Ok(self.neighborhoods_by_subsets()),
            None => Err(GameError::TooManyEmbeddings(self.presented.vertex_count())),
        }
    }

    fn neighborhoods_by_embedding(&self) -> Option<Vec<VertexSet>> {
        let presented = &self.presented;
        let labels = presented.colors().iter().map(|c| c.map_or(0, u64::from)).collect();
        let opts = EmbedOptions { labels: Some(labels), ..Default::default() };
        let mut emb = Embedder::symmetric(presented.graph(), &self.config.host, Some(&self.config.twins), &opts);
        let mut seen: HashSet<VertexSet> = HashSet::new();
        let mut out = Vec::new();
        let mut count = 0usize;
        let mut assignments: Vec<Vec<usize>> = Vec::new();
        let complete = emb
            .for_each(|a| {
                assignments.push(a.to_vec());
                count += 1;
                if count >= EMBEDDING_LIMIT {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })
            .expect("unbounded search");
        if !complete {
            return None;
        }
        let classes = emb.classes();
        for a in &assignments {
            for c in emb.free_classes(a) {
                let nb = a
                    .iter()
                    .enumerate()
                    .filter(|&(_, &d)| classes.classes_adjacent(d, c))
                    .fold(0, |acc, (p, _)| acc | bit(p));
                if seen.insert(nb) {
                    out.push(nb);
                }
            }
        }
        out.sort_unstable();
        Some(out)
    }

    /// Reference enumeration: every neighborhood subset filtered by `embeds`.
    pub fn neighborhoods_by_subsets(&self) -> Vec<VertexSet> {
        let v = self.presented.vertex_count();
        assert!(v <= 30, "subset enumeration over {v} presented vertices");
        (0..1u128 << v)
            .filter(|&nb| {
                let g = self.presented.graph().extended(nb).expect("fits");
                embeds_with(&g, &self.config.host, Some(&self.config.twins), &EmbedOptions::default())
                    .expect("unbounded search")
            })
            .collect()
    }

    /// Legal drawer moves deduplicated by fixed-color canonical key of the
    /// successor, sorted by that key.
    pub fn drawer_moves(&self) -> Result<Vec<DrawerMove>, GameError> {
        let nbs = self.legal_neighborhoods()?;
        Ok(self.dedup_moves(nbs))
    }

    pub(crate) fn dedup_moves(&self, nbs: Vec<VertexSet>) -> Vec<DrawerMove> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for nb in nbs {
            let state = self.present_unchecked(nb);
            let key = canonical_key(&state.presented, ColorMode::Fixed);
            if seen.insert(key.clone()) {
                out.push(DrawerMove { neighborhood: nb, state, key });
            }
        }
        out.sort_by(|a, b| a.key.cmp(&b.key));
        out
    }

    pub fn pending(&self) -> Option<Vertex> {
        self.presented.pending()
    }

    /// Canonical key of the presented state.
    pub fn key(&self, mode: ColorMode) -> CanonicalKey {
        canonical_key(&self.presented, mode)
    }

    pub fn to_text(&self) -> String {
        self.presented.to_text()
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameState")
            .field("k", &self.config.k)
            .field("host_vertices", &self.config.host.vertex_count())
            .field("presented", &self.presented)
            .finish()
    }
}

/// Vertices of `set` as a sorted list.
pub fn neighborhood_list(set: VertexSet) -> Vec<Vertex> {
    members(set).collect()
}

/// Inverse of [`neighborhood_list`]; rejects ids past `limit`.
pub fn neighborhood_from_list(list: &[Vertex], limit: usize) -> Result<VertexSet, GameError> {
    let mut s = 0;
    for &v in list {
        if v >= limit {
            return Err(GameError::NeighborhoodOutOfRange);
        }
        s |= bit(v);
    }
    Ok(s)
}
