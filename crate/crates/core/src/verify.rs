//! One-sided exhaustive checks of the scripted strategies, and the
//! cross-check between the memoized and naive solvers.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canon::{graph_key, CanonicalKey, ColorMode};
use crate::game::{GameConfig, GameError, GameState, Role, Status};
use crate::graph::{Color, Graph};
use crate::qbf::QbfError;
use crate::reduction::ReductionInstance;
use crate::search::{chromatic_number, online_chromatic_number, solve, solve_naive, SearchError};
use crate::strategy::{DrawerOptions, DrawerScript, PainterOptions, PainterScript, Phase, StrategyError};
use crate::transcript::Transcript;

pub const DEFAULT_HALF_MOVE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("precondition failed: formula evaluates to {0}")]
    Precondition(bool),
    #[error("drawer script failed: {source}\n{transcript}")]
    Script { source: StrategyError, transcript: Transcript },
    #[error(transparent)]
    Formula(#[from] QbfError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Dominated,
    Refuted,
    BudgetExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Dominated => "dominated",
            Verdict::Refuted => "refuted",
            Verdict::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub verdict: Verdict,
    /// Play lines followed to a terminal state (or to a memoized subtree).
    pub lines: u64,
    /// Half-moves made during the search.
    pub half_moves: u64,
    /// Sum of branching factors at the exhaustively branched turns.
    pub branches: u64,
    pub memo_hits: u64,
    /// Longest line, in half-moves from the initial state.
    pub max_depth: usize,
    /// Line on which the script lost, replayable from the initial state.
    pub refutation: Option<Transcript>,
    /// Why the script lost on that line.
    pub reason: Option<String>,
    pub elapsed: Duration,
}

impl DominanceReport {
    fn new() -> Self {
        DominanceReport {
            verdict: Verdict::Dominated,
            lines: 0,
            half_moves: 0,
            branches: 0,
            memo_hits: 0,
            max_depth: 0,
            refutation: None,
            reason: None,
            elapsed: Duration::ZERO,
        }
    }

    /// Line-oriented `key value` rendering.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "verdict {}\nlines {}\nhalf_moves {}\nbranches {}\nmemo_hits {}\nmax_depth {}\nwall_ms {}\n",
            self.verdict,
            self.lines,
            self.half_moves,
            self.branches,
            self.memo_hits,
            self.max_depth,
            self.elapsed.as_millis()
        );
        if let Some(r) = &self.reason {
            s.push_str(&format!("reason {r}\n"));
        }
        if let Some(t) = &self.refutation {
            s.push_str(&format!("refutation_half_moves {}\n", t.moves()));
        }
        s
    }
}

/// Scripted drawer against every legal painter color at every painter turn.
pub fn verify_drawer_dominates(
    inst: &Arc<ReductionInstance>,
    options: DrawerOptions,
) -> Result<DominanceReport, VerifyError> {
    let value = inst.formula.evaluate()?;
    if value {
        return Err(VerifyError::Precondition(value));
    }
    let start = Instant::now();
    let mut report = DominanceReport::new();
    let script = DrawerScript::new(Arc::clone(inst), options)?;
    let mut transcript = Transcript::new();
    drawer_dfs(&inst.initial, script, &mut transcript, 0, &mut report)?;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Returns `false` once a refutation has been recorded.
fn drawer_dfs(
    state: &GameState,
    mut script: DrawerScript,
    transcript: &mut Transcript,
    depth: usize,
    report: &mut DominanceReport,
) -> Result<bool, VerifyError> {
    report.max_depth = report.max_depth.max(depth);
    match state.status() {
        Status::DrawerWon => {
            report.lines += 1;
            Ok(true)
        }
        Status::PainterWon => {
            report.lines += 1;
            report.verdict = Verdict::Refuted;
            report.reason = Some("painter colored every vertex".into());
            report.refutation = Some(transcript.clone());
            Ok(false)
        }
        Status::DrawerToMove => {
            let nb = match script.next(state) {
                Ok(nb) => nb,
                Err(source) => return Err(VerifyError::Script { source, transcript: transcript.clone() }),
            };
            let next = state.present(nb)?;
            report.half_moves += 1;
            transcript.present(nb);
            let ok = drawer_dfs(&next, script, transcript, depth + 1, report)?;
            transcript.entries.pop();
            Ok(ok)
        }
        Status::PainterToMove => {
            let colors = state.painter_moves()?;
            report.branches += colors.len() as u64;
            for c in colors {
                let next = state.apply_color(c)?;
                report.half_moves += 1;
                let mut branch = script.clone();
                let mark = transcript.entries.len();
                transcript.color(c);
                match branch.observe(&next) {
                    Ok(notes) => notes.into_iter().for_each(|n| transcript.note(n)),
                    Err(source) => return Err(VerifyError::Script { source, transcript: transcript.clone() }),
                }
                let ok = drawer_dfs(&next, branch, transcript, depth + 1, report)?;
                transcript.entries.truncate(mark);
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Scripted painter against every legal drawer move (deduplicated up to
/// isomorphism) at every drawer turn, with a memo on (state, script phase).
pub fn verify_painter_dominates(
    inst: &Arc<ReductionInstance>,
    options: PainterOptions,
    budget: u64,
) -> Result<DominanceReport, VerifyError> {
    let value = inst.formula.evaluate()?;
    if !value {
        return Err(VerifyError::Precondition(value));
    }
    let script = PainterScript::new(Arc::clone(inst), options)?;
    Ok(PainterSearch::new(budget, None).run(&inst.initial, script))
}

struct PainterSearch {
    budget: u64,
    /// Drawer moves beyond this depth are not explored.
    depth_limit: Option<usize>,
    memo: HashSet<(CanonicalKey, Phase)>,
    report: DominanceReport,
    frontier: u64,
}

enum Outcome {
    Ok,
    Stop,
}

impl PainterSearch {
    fn new(budget: u64, depth_limit: Option<usize>) -> Self {
        PainterSearch { budget, depth_limit, memo: HashSet::new(), report: DominanceReport::new(), frontier: 0 }
    }

    fn run(mut self, initial: &GameState, script: PainterScript) -> DominanceReport {
        let start = Instant::now();
        let mut transcript = Transcript::new();
        self.dfs(initial, script, &mut transcript, 0, 0);
        self.report.elapsed = start.elapsed();
        self.report
    }

    fn refute(&mut self, transcript: &Transcript, reason: String) -> Outcome {
        self.report.verdict = Verdict::Refuted;
        self.report.reason = Some(reason);
        self.report.refutation = Some(transcript.clone());
        self.report.lines += 1;
        Outcome::Stop
    }

    fn dfs(
        &mut self,
        state: &GameState,
        script: PainterScript,
        transcript: &mut Transcript,
        depth: usize,
        drawer_depth: usize,
    ) -> Outcome {
        self.report.max_depth = self.report.max_depth.max(depth);
        match state.status() {
            Status::PainterWon => {
                self.report.lines += 1;
                return Outcome::Ok;
            }
            Status::DrawerWon => return self.refute(transcript, "pending vertex has no legal color".into()),
            Status::PainterToMove => unreachable!("painter moves are made inline"),
            Status::DrawerToMove => {}
        }
        if self.depth_limit.is_some_and(|d| drawer_depth >= d) {
            self.frontier += 1;
            self.report.lines += 1;
            return Outcome::Ok;
        }
        let key = (state.key(ColorMode::Fixed), script.digest());
        if self.memo.contains(&key) {
            self.report.memo_hits += 1;
            self.report.lines += 1;
            return Outcome::Ok;
        }
        let moves = match state.drawer_moves() {
            Ok(m) => m,
            Err(e) => return self.refute(transcript, format!("drawer moves unavailable: {e}")),
        };
        self.report.branches += moves.len() as u64;
        for m in moves {
            if self.report.half_moves >= self.budget {
                self.report.verdict = Verdict::BudgetExhausted;
                return Outcome::Stop;
            }
            self.report.half_moves += 2;
            let mark = transcript.entries.len();
            transcript.present(m.neighborhood);
            if m.state.status() == Status::DrawerWon {
                return self.refute(transcript, "pending vertex has no legal color".into());
            }
            let mut branch = script.clone();
            let color = match branch.next(&m.state) {
                Ok(c) => c,
                Err(e) => return self.refute(transcript, e.to_string()),
            };
            transcript.color(color);
            let next = match m.state.apply_color(color) {
                Ok(s) => s,
                Err(e) => return self.refute(transcript, format!("script chose an illegal color: {e}")),
            };
            if let Outcome::Stop = self.dfs(&next, branch, transcript, depth + 2, drawer_depth + 1) {
                return Outcome::Stop;
            }
            transcript.entries.truncate(mark);
        }
        self.memo.insert(key);
        Outcome::Ok
    }
}

/// Evidence gathered when full painter-side exhaustion exceeds its budget.
#[derive(Debug, Clone)]
pub struct LadderReport {
    /// Exhaustion up to `depth` drawer moves.
    pub shallow: DominanceReport,
    pub depth: usize,
    pub frontier: u64,
    pub samples: u64,
    pub sample_refutation: Option<(Transcript, String)>,
    /// Outcome of the scripted drawer against the scripted painter.
    pub scripted_adversary: Status,
    pub scripted_transcript: Transcript,
}

impl LadderReport {
    pub fn passed(&self) -> bool {
        self.shallow.verdict == Verdict::Dominated
            && self.sample_refutation.is_none()
            && self.scripted_adversary == Status::PainterWon
    }

    pub fn to_text(&self) -> String {
        format!(
            "rung depth-limited depth {} verdict {} lines {} frontier {}\nrung random-completions samples {} refuted {}\nrung scripted-drawer outcome {}\n",
            self.depth,
            self.shallow.verdict,
            self.shallow.lines,
            self.frontier,
            self.samples,
            self.sample_refutation.is_some(),
            self.scripted_adversary
        )
    }
}

/// The three weaker checks used when full exhaustion is out of budget.
pub fn painter_fallback_ladder(
    inst: &Arc<ReductionInstance>,
    options: PainterOptions,
    depth: usize,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<LadderReport, VerifyError> {
    let script = PainterScript::new(Arc::clone(inst), options)?;
    let mut search = PainterSearch::new(budget, Some(depth));
    let start = Instant::now();
    let mut transcript = Transcript::new();
    search.dfs(&inst.initial, script.clone(), &mut transcript, 0, 0);
    search.report.elapsed = start.elapsed();
    let frontier = search.frontier;
    let shallow = search.report;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_refutation = None;
    for _ in 0..samples {
        if let Some(r) = random_completion(&inst.initial, script.clone(), &mut rng)? {
            sample_refutation = Some(r);
            break;
        }
    }

    let (scripted_adversary, scripted_transcript) = scripted_match(inst, DrawerOptions::default(), options)?;
    Ok(LadderReport { shallow, depth, frontier, samples, sample_refutation, scripted_adversary, scripted_transcript })
}

/// One uniformly random drawer line against the painter script. Returns the
/// transcript and reason if the painter loses.
fn random_completion(
    initial: &GameState,
    mut script: PainterScript,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(Transcript, String)>, VerifyError> {
    let mut state = initial.clone();
    let mut transcript = Transcript::new();
    loop {
        match state.status() {
            Status::PainterWon => return Ok(None),
            Status::DrawerWon => return Ok(Some((transcript, "pending vertex has no legal color".into()))),
            Status::DrawerToMove => {
                let moves = state.drawer_moves()?;
                let m = moves.choose(rng).expect("a non-terminal state has a drawer move");
                transcript.present(m.neighborhood);
                state = m.state.clone();
            }
            Status::PainterToMove => match script.next(&state) {
                Ok(c) => {
                    transcript.color(c);
                    state = state.apply_color(c)?;
                }
                Err(e) => return Ok(Some((transcript, e.to_string()))),
            },
        }
    }
}

/// Plays the drawer script against a painter choosing uniformly among legal
/// colors. Used where full painter-side exhaustion is out of reach.
pub fn drawer_vs_random_painter(
    inst: &Arc<ReductionInstance>,
    options: DrawerOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(Status, Transcript), VerifyError> {
    let mut drawer = DrawerScript::new(Arc::clone(inst), options)?;
    let mut state = inst.initial.clone();
    let mut transcript = Transcript::new();
    loop {
        match state.status() {
            Status::PainterWon | Status::DrawerWon => return Ok((state.status(), transcript)),
            Status::DrawerToMove => {
                let nb = drawer.next(&state)?;
                transcript.present(nb);
                state = state.present(nb)?;
            }
            Status::PainterToMove => {
                let c = *state.painter_moves()?.choose(rng).expect("a pending vertex with legal colors");
                transcript.color(c);
                state = state.apply_color(c)?;
                for n in drawer.observe(&state)? {
                    transcript.note(n);
                }
            }
        }
    }
}

/// Plays the drawer script against the painter script.
pub fn scripted_match(
    inst: &Arc<ReductionInstance>,
    drawer_options: DrawerOptions,
    painter_options: PainterOptions,
) -> Result<(Status, Transcript), VerifyError> {
    let mut drawer = DrawerScript::new(Arc::clone(inst), drawer_options)?;
    let mut painter = PainterScript::new(Arc::clone(inst), painter_options)?;
    let mut state = inst.initial.clone();
    let mut transcript = Transcript::new();
    loop {
        match state.status() {
            Status::PainterWon | Status::DrawerWon => return Ok((state.status(), transcript)),
            Status::DrawerToMove => {
                let nb = drawer.next(&state)?;
                transcript.present(nb);
                state = state.present(nb)?;
            }
            Status::PainterToMove => match painter.next(&state) {
                Ok(c) => {
                    transcript.color(c);
                    state = state.apply_color(c)?;
                    for n in drawer.observe(&state)? {
                        transcript.note(n);
                    }
                }
                Err(e) => {
                    transcript.note(format!("painter script failed: {e}"));
                    return Ok((Status::DrawerWon, transcript));
                }
            },
        }
    }
}

/// Result of comparing the solvers on every small graph.
#[derive(Debug, Clone, Default)]
pub struct CrossCheckReport {
    pub graphs: usize,
    pub comparisons: usize,
    /// Graph text and `k` for each disagreement or bound violation.
    pub failures: Vec<String>,
    /// `(graph, chromatic number, on-line chromatic number)` per graph.
    pub chromatic: Vec<(Graph, usize, usize)>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// One representative of every isomorphism class of graphs on `n` vertices.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(pairs.len() <= 21, "graph enumeration is limited to 7 vertices");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let g = Graph::new(n, &edges).expect("valid edges");
        if seen.insert(graph_key(&g)) {
            out.push(g);
        }
    }
    out
}

/// Memoized versus naive solver on every graph with `1..=max_n` vertices and
/// every `k` in `1..=max_k`, plus the bounds `chi <= chi_online <= |V|` and
/// monotonicity of painter wins in `k`.
pub fn cross_check_solvers(max_n: usize, max_k: Color) -> Result<CrossCheckReport, VerifyError> {
    let mut report = CrossCheckReport::default();
    for n in 1..=max_n {
        for g in nonisomorphic_graphs(n) {
            report.graphs += 1;
            let mut previous: Option<Role> = None;
            for k in 1..=max_k {
                let state = GameState::initial(GameConfig::new(g.clone(), k)?);
                let fast = solve(&state)?.winner;
                let slow = solve_naive(&state)?.winner;
                report.comparisons += 1;
                if fast != slow {
                    report.failures.push(format!("k={k}: memoized {fast}, naive {slow}\n{}", g.to_text()));
                }
                if previous == Some(Role::Painter) && fast == Role::Drawer {
                    report.failures.push(format!("k={k}: painter win at k-1 lost at k\n{}", g.to_text()));
                }
                previous = Some(fast);
            }
            let chi = chromatic_number(&g);
            let online = online_chromatic_number(&g)?.value;
            if !(chi <= online && online <= n) {
                report.failures.push(format!("bounds: chi={chi} online={online}\n{}", g.to_text()));
            }
            report.chromatic.push((g, chi, online));
        }
    }
    Ok(report)
}
