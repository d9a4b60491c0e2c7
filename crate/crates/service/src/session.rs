//! Game sessions: one human side against an engine opponent, with a move
//! log that always replays to the current state.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use oncol_core::game::{neighborhood_from_list, neighborhood_list};
use oncol_core::strategy::{DrawerOptions, DrawerScript, PainterOptions, PainterScript};
use oncol_core::transcript::Transcript;
use oncol_core::{
    best_move, build, Color, Formula, GameConfig, GameState, Graph, Move, ReductionInstance, Role, Solver, Status,
    Vertex, VertexSet,
};

/// Largest host on which the exact solver plays or gives hints.
pub const DEFAULT_SOLVER_LIMIT: usize = 12;
/// Alternatives offered when a human presentation is illegal.
pub const NEAREST_ALTERNATIVES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Painter,
    Drawer,
}

impl From<Side> for Role {
    fn from(s: Side) -> Role {
        match s {
            Side::Painter => Role::Painter,
            Side::Drawer => Role::Drawer,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        Role::from(*self).fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opponent {
    Solver,
    Script,
    Random,
}

/// Request body for creating a session. Exactly one of `graph` (graph
/// text) and `formula` (formula text) is given; `k` is required for graphs
/// and fixed by the reduction for formulas.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Color>,
    pub human: Side,
    pub opponent: Opponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A human move: a color for the pending vertex, or the neighborhood of a
/// new vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveView {
    Color(Color),
    Neighborhood(Vec<Vertex>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegalMoves {
    Colors(Vec<Color>),
    /// Representatives up to automorphisms of the presented colored graph.
    Neighborhoods(Vec<Vec<Vertex>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("unknown session `{0}`")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("illegal move: {reason}")]
    Illegal { reason: String, legal: Option<LegalMoves>, nearest: Vec<Vec<Vertex>> },
    #[error("it is the {0}'s turn")]
    NotYourTurn(Side),
    #[error("the game is over: {0}")]
    Finished(Status),
    #[error("host has {vertices} vertices but the solver is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("{0}")]
    Unavailable(String),
    #[error("engine failure: {0}")]
    Engine(String),
}

fn bad(e: impl std::fmt::Display) -> SessionError {
    SessionError::BadRequest(e.to_string())
}

fn engine(e: impl std::fmt::Display) -> SessionError {
    SessionError::Engine(e.to_string())
}

/// Session payload returned by every endpoint. Mirrors the state text
/// format plus turn information and the move log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub id: String,
    pub human: Side,
    pub opponent: Opponent,
    pub k: Color,
    pub host_vertices: usize,
    pub status: String,
    pub to_move: Option<Side>,
    pub vertices: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    pub colors: Vec<Option<Color>>,
    pub pending: Option<Vertex>,
    /// Legal moves for the side to move; absent when terminal or too
    /// expensive to enumerate.
    pub legal_moves: Option<LegalMoves>,
    /// Role tags of the pre-colored vertices on formula sessions.
    pub labels: Vec<String>,
    pub log: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    pub side: Side,
    #[serde(rename = "move")]
    pub mv: MoveView,
    pub source: String,
    /// Whether the side to move wins with best play; known only for
    /// solver hints.
    pub winning: Option<bool>,
}

pub struct Session {
    id: String,
    human: Side,
    opponent: Opponent,
    initial: GameState,
    state: GameState,
    log: Transcript,
    instance: Option<Arc<ReductionInstance>>,
    /// Drawer script kept in step with the game while play stays on its line.
    drawer_script: Option<DrawerScript>,
    painter_script: Option<PainterScript>,
    /// The painter script's choice for the current pending vertex.
    painter_advice: Option<Result<Color, String>>,
    rng: ChaCha8Rng,
    solver_limit: usize,
}

impl Session {
    /// Builds the session and lets the engine move if it goes first.
    pub fn create(id: String, spec: &SessionSpec, solver_limit: usize) -> Result<Self, SessionError> {
        let (initial, instance) = match (&spec.graph, &spec.formula) {
            (Some(text), None) => {
                let host = Graph::parse(text).map_err(bad)?;
                let k = spec.k.ok_or_else(|| bad("graph sessions need a color budget `k`"))?;
                (GameState::initial(GameConfig::new(host, k).map_err(bad)?), None)
            }
            (None, Some(text)) => {
                let f = Formula::parse(text).map_err(bad)?;
                let f = if f.is_normalized() { f } else { f.normalize().0 };
                let inst = Arc::new(build(&f).map_err(bad)?);
                if spec.k.is_some_and(|k| k != inst.k()) {
                    return Err(bad(format!("the reduction fixes k = {}", inst.k())));
                }
                (inst.initial.clone(), Some(inst))
            }
            _ => return Err(bad("give exactly one of `graph` and `formula`")),
        };
        let vertices = initial.config().host().vertex_count();
        match spec.opponent {
            Opponent::Solver if vertices > solver_limit => {
                return Err(SessionError::TooLarge { vertices, limit: solver_limit })
            }
            Opponent::Script if instance.is_none() => {
                return Err(SessionError::Unavailable("scripted opponents exist only for formula sessions".into()))
            }
            _ => {}
        }
        let (drawer_script, painter_script) = match &instance {
            Some(inst) => {
                let d = DrawerScript::new(Arc::clone(inst), DrawerOptions::default());
                let p = PainterScript::new(Arc::clone(inst), PainterOptions::default());
                if spec.opponent == Opponent::Script {
                    (Some(d.map_err(bad)?), Some(p.map_err(bad)?))
                } else {
                    (d.ok(), p.ok())
                }
            }
            None => (None, None),
        };
        let seed = spec.seed.unwrap_or_else(rand::random);
        let mut session = Session {
            id,
            human: spec.human,
            opponent: spec.opponent,
            state: initial.clone(),
            initial,
            log: Transcript::new(),
            instance,
            drawer_script,
            painter_script,
            painter_advice: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
            solver_limit,
        };
        session.engine_reply()?;
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn initial(&self) -> &GameState {
        &self.initial
    }

    pub fn log(&self) -> &Transcript {
        &self.log
    }

    pub fn human(&self) -> Side {
        self.human
    }

    pub fn to_move(&self) -> Option<Side> {
        match self.state.status() {
            Status::DrawerToMove => Some(Side::Drawer),
            Status::PainterToMove => Some(Side::Painter),
            _ => None,
        }
    }

    /// Applies the human's move, then the engine's replies up to the
    /// human's next turn or the end of the game.
    pub fn play(&mut self, mv: MoveView) -> Result<(), SessionError> {
        let side = self.to_move().ok_or(SessionError::Finished(self.state.status()))?;
        if side != self.human {
            return Err(SessionError::NotYourTurn(side));
        }
        match (side, mv) {
            (Side::Painter, MoveView::Color(c)) => {
                let legal = self.state.painter_moves().map_err(engine)?;
                if !legal.contains(&c) {
                    return Err(SessionError::Illegal {
                        reason: format!("color {c} is not available for the pending vertex"),
                        legal: Some(LegalMoves::Colors(legal)),
                        nearest: Vec::new(),
                    });
                }
                self.apply_color(c)?;
            }
            (Side::Drawer, MoveView::Neighborhood(list)) => {
                let n = self.state.presented().vertex_count();
                let nb = match neighborhood_from_list(&list, n) {
                    Ok(nb) if self.state.is_legal_presentation(nb).map_err(engine)? => nb,
                    _ => return Err(self.illegal_presentation(&list)),
                };
                self.apply_present(nb)?;
            }
            (Side::Painter, MoveView::Neighborhood(_)) => {
                return Err(SessionError::Illegal {
                    reason: "the painter answers with a color".into(),
                    legal: self.legal_moves(),
                    nearest: Vec::new(),
                })
            }
            (Side::Drawer, MoveView::Color(_)) => {
                return Err(SessionError::Illegal {
                    reason: "the drawer answers with a neighborhood".into(),
                    legal: self.legal_moves(),
                    nearest: Vec::new(),
                })
            }
        }
        self.engine_reply()
    }

    fn illegal_presentation(&self, list: &[Vertex]) -> SessionError {
        let n = self.state.presented().vertex_count();
        let wanted: VertexSet = list.iter().filter(|&&v| v < n).fold(0, |acc, &v| acc | 1 << v);
        let legal = self.state.legal_neighborhoods().unwrap_or_default();
        let mut ranked = legal.clone();
        let size = list.len() as i64;
        ranked.sort_by_key(|&nb| ((nb.count_ones() as i64 - size).abs(), (nb ^ wanted).count_ones(), nb));
        SessionError::Illegal {
            reason: format!("no host embedding extends the presented graph by a vertex adjacent to {list:?}"),
            legal: Some(LegalMoves::Neighborhoods(legal.into_iter().map(neighborhood_list).collect())),
            nearest: ranked.into_iter().take(NEAREST_ALTERNATIVES).map(neighborhood_list).collect(),
        }
    }

    /// A suggested move for the human: the exact solver on small hosts, the
    /// scripted strategy on formula sessions.
    pub fn hint(&self) -> Result<Hint, SessionError> {
        let side = self.to_move().ok_or(SessionError::Finished(self.state.status()))?;
        if side != self.human {
            return Err(SessionError::NotYourTurn(side));
        }
        if self.instance.is_some() {
            let off_line = || SessionError::Unavailable("play has left the scripted strategy's line".into());
            let mv = match side {
                Side::Painter => match &self.painter_advice {
                    Some(Ok(c)) => MoveView::Color(*c),
                    Some(Err(e)) => return Err(SessionError::Unavailable(e.clone())),
                    None => return Err(off_line()),
                },
                Side::Drawer => {
                    let mut script = self.drawer_script.clone().ok_or_else(off_line)?;
                    let nb = script.next(&self.state).map_err(|e| SessionError::Unavailable(e.to_string()))?;
                    MoveView::Neighborhood(neighborhood_list(nb))
                }
            };
            return Ok(Hint { side, mv, source: "script".into(), winning: None });
        }
        let vertices = self.state.config().host().vertex_count();
        if vertices > self.solver_limit {
            return Err(SessionError::TooLarge { vertices, limit: self.solver_limit });
        }
        let winner = Solver::new().solve(&self.state).map_err(engine)?.winner;
        let mv = to_view(best_move(&self.state, side.into()).map_err(engine)?);
        Ok(Hint { side, mv, source: "solver".into(), winning: Some(winner == Role::from(side)) })
    }

    pub fn view(&self) -> StateView {
        let p = self.state.presented();
        let labels = match &self.instance {
            Some(inst) => {
                let l = inst.layout;
                let mut tags: Vec<String> = (1..=l.counts.a).map(|i| format!("a{i}")).collect();
                tags.extend((1..=l.counts.b).map(|i| format!("b{i}")));
                tags.push("m".into());
                tags.push("c".into());
                tags
            }
            None => Vec::new(),
        };
        StateView {
            id: self.id.clone(),
            human: self.human,
            opponent: self.opponent,
            k: self.state.k(),
            host_vertices: self.state.config().host().vertex_count(),
            status: self.state.status().to_string(),
            to_move: self.to_move(),
            vertices: p.vertex_count(),
            edges: p.graph().edges(),
            colors: p.colors().to_vec(),
            pending: p.pending(),
            legal_moves: self.legal_moves(),
            labels,
            log: self.log.to_string().lines().map(str::to_string).collect(),
        }
    }

    fn legal_moves(&self) -> Option<LegalMoves> {
        match self.to_move()? {
            Side::Painter => self.state.painter_moves().ok().map(LegalMoves::Colors),
            Side::Drawer => self
                .state
                .legal_neighborhoods()
                .ok()
                .map(|nbs| LegalMoves::Neighborhoods(nbs.into_iter().map(neighborhood_list).collect())),
        }
    }

    /// Replays the move log from the initial state and compares.
    pub fn replay_matches(&self) -> bool {
        self.log.replay(&self.initial).is_ok_and(|s| s.to_text() == self.state.to_text())
    }

    fn engine_reply(&mut self) -> Result<(), SessionError> {
        while let Some(side) = self.to_move() {
            if side == self.human {
                break;
            }
            match side {
                Side::Drawer => {
                    let nb = self.engine_presentation()?;
                    self.apply_present(nb)?;
                }
                Side::Painter => {
                    let c = self.engine_color()?;
                    self.apply_color(c)?;
                }
            }
        }
        Ok(())
    }

    fn engine_presentation(&mut self) -> Result<VertexSet, SessionError> {
        match self.opponent {
            Opponent::Solver => match best_move(&self.state, Role::Drawer).map_err(engine)? {
                Move::Present(nb) => Ok(nb),
                Move::Color(_) => Err(engine("solver answered the drawer's turn with a color")),
            },
            Opponent::Script => {
                let mut script = self.drawer_script.clone().ok_or_else(|| engine("drawer script lost"))?;
                script.next(&self.state).map_err(engine)
            }
            Opponent::Random => {
                let moves = self.state.drawer_moves().map_err(engine)?;
                moves.choose(&mut self.rng).map(|m| m.neighborhood).ok_or_else(|| engine("no drawer move"))
            }
        }
    }

    fn engine_color(&mut self) -> Result<Color, SessionError> {
        let legal = self.state.painter_moves().map_err(engine)?;
        match self.opponent {
            Opponent::Solver => match best_move(&self.state, Role::Painter) {
                Ok(Move::Color(c)) => Ok(c),
                Ok(Move::Present(_)) => Err(engine("solver answered the painter's turn with a neighborhood")),
                Err(e) => Err(engine(e)),
            },
            Opponent::Script => match self.painter_advice.clone() {
                Some(Ok(c)) => Ok(c),
                Some(Err(e)) => {
                    self.log.note(format!("painter script failed: {e}"));
                    legal.first().copied().ok_or_else(|| engine("no legal color"))
                }
                None => Err(engine("painter script lost")),
            },
            Opponent::Random => legal.choose(&mut self.rng).copied().ok_or_else(|| engine("no legal color")),
        }
    }

    fn apply_present(&mut self, nb: VertexSet) -> Result<(), SessionError> {
        let next = self.state.present(nb).map_err(engine)?;
        if let Some(script) = self.drawer_script.as_mut() {
            let mut probe = script.clone();
            match probe.next(&self.state) {
                Ok(planned) if planned == nb => *script = probe,
                _ => self.drawer_script = None,
            }
        }
        self.state = next;
        self.log.present(nb);
        self.painter_advice = match self.painter_script.as_mut() {
            Some(script) if self.state.status() == Status::PainterToMove => {
                Some(script.next(&self.state).map_err(|e| e.to_string()))
            }
            _ => None,
        };
        Ok(())
    }

    fn apply_color(&mut self, c: Color) -> Result<(), SessionError> {
        let next = self.state.apply_color(c).map_err(engine)?;
        if self.painter_advice.take() != Some(Ok(c)) {
            self.painter_script = None;
        }
        self.state = next;
        self.log.color(c);
        if let Some(script) = self.drawer_script.as_mut() {
            match script.observe(&self.state) {
                Ok(notes) if self.opponent == Opponent::Script && self.human == Side::Painter => {
                    notes.into_iter().for_each(|n| self.log.note(n))
                }
                Ok(_) => {}
                Err(_) => self.drawer_script = None,
            }
        }
        Ok(())
    }
}

fn to_view(m: Move) -> MoveView {
    match m {
        Move::Color(c) => MoveView::Color(c),
        Move::Present(nb) => MoveView::Neighborhood(neighborhood_list(nb)),
    }
}
