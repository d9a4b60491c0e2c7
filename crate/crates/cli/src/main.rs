use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use oncol_core::search::{online_chromatic_number_with, DEFAULT_NODE_BUDGET};
use oncol_core::strategy::{DrawerOptions, PainterOptions};
use oncol_core::verify::{
    cross_check_solvers, painter_fallback_ladder, verify_drawer_dominates, verify_painter_dominates, VerifyError,
    Verdict, DEFAULT_HALF_MOVE_BUDGET,
};
use oncol_core::{build, Color, ColoredState, Formula, GameConfig, GameState, Graph, Move, ReductionInstance, Solver};
use oncol_service::{MoveView, Opponent, Session, SessionError, SessionSpec, Side};

#[derive(Parser)]
#[command(name = "oncol", version, about = "On-line graph coloring games: solver, reduction and strategy verification")]
struct Cli {
    /// Print search statistics to standard error.
    #[arg(long, global = true)]
    stats: bool,
    /// Seed for random opponents and random completions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// On-line chromatic number of a graph.
    Chromatic {
        graph: PathBuf,
        /// Solver node budget per value of k.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Winner and a winning move from a position on a host graph.
    Solve {
        /// Host graph file.
        host: PathBuf,
        #[arg(short)]
        k: Color,
        /// Presented state file; the empty state when omitted.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Compile a formula into a host graph, pre-colored state and roles file.
    Reduce {
        formula: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Truth value of a formula.
    QbfEval { formula: PathBuf },
    /// Check the drawer script against every painter reply.
    VerifyDrawer {
        formula: PathBuf,
        /// Disable the gadget reflection rule.
        #[arg(long)]
        skip_swap: bool,
        /// Where to write a refutation transcript.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Check the painter script against every drawer move.
    VerifyPainter {
        formula: PathBuf,
        #[arg(long, default_value_t = DEFAULT_HALF_MOVE_BUDGET)]
        budget: u64,
        /// Never enter phase 3.
        #[arg(long)]
        never_phase_three: bool,
        /// Drawer-move depth of the exhaustive fallback search.
        #[arg(long, default_value_t = 5)]
        ladder_depth: usize,
        /// Random completions in the fallback.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Compare the memoized and naive solvers on all small graphs.
    CrossCheck {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 4)]
        max_k: Color,
    },
    /// Play interactively against an engine opponent.
    Play {
        /// Graph or formula file.
        input: PathBuf,
        #[arg(long = "as", value_enum)]
        human: SideArg,
        #[arg(long, value_enum)]
        vs: OpponentArg,
        /// Color budget (graphs only).
        #[arg(short)]
        k: Option<Color>,
        /// Where to write the move log when the game ends.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Painter,
    Drawer,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpponentArg {
    Solver,
    Script,
    Random,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Success,
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

fn read_formula(path: &Path) -> Result<Formula> {
    Formula::parse(&read(path)?).with_context(|| format!("parsing formula {}", path.display()))
}

/// Builds the reduction, renaming variables first when the formula is not
/// in normalized form.
fn instance(path: &Path) -> Result<Arc<ReductionInstance>> {
    let mut f = read_formula(path)?;
    if !f.is_normalized() {
        let (normalized, mapping) = f.normalize();
        eprintln!("note: normalized to `{normalized}` (variable map {mapping:?})");
        f = normalized;
    }
    Ok(Arc::new(build(&f)?))
}

fn write_transcript(path: Option<&PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Chromatic { graph, budget } => {
            let g = read_graph(graph)?;
            let r = online_chromatic_number_with(&g, *budget)?;
            println!("{}", r.value);
            if cli.stats {
                eprintln!(
                    "lower_bound {}\nnodes {}\nmemo_hits {}\nmemo_rejected {}",
                    r.lower_bound, r.stats.nodes, r.stats.memo_hits, r.stats.memo_rejected
                );
            }
            Ok(Outcome::Success)
        }
        Command::Solve { host, k, from, budget } => {
            let config = GameConfig::new(read_graph(host)?, *k)?;
            let state = match from {
                Some(p) => {
                    let presented = ColoredState::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
                    GameState::new(config, presented)?
                }
                None => GameState::initial(config),
            };
            let mut solver = Solver::with_limits(*budget, oncol_core::search::DEFAULT_MEMO_CAP);
            let r = solver.solve(&state)?;
            println!("status {}", state.status());
            println!("winner {}", r.winner);
            match r.principal_move {
                Some(Move::Color(c)) => println!("move color {c}"),
                Some(Move::Present(nb)) => {
                    let list: String =
                        oncol_core::game::neighborhood_list(nb).iter().map(|v| format!(" {v}")).collect();
                    println!("move present{list}");
                }
                None => {}
            }
            if cli.stats {
                eprintln!("nodes {}\nmemo_hits {}\nmemo_entries {}", r.stats.nodes, r.stats.memo_hits, solver.memo_len());
            }
            Ok(Outcome::Success)
        }
        Command::Reduce { formula, out } => {
            let inst = instance(formula)?;
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            fs::write(out.join("host.graph"), inst.host().to_text())?;
            fs::write(out.join("precolored.state"), inst.precolored().to_text())?;
            fs::write(out.join("roles.txt"), inst.roles_text())?;
            println!("n {}\nt {}\nk {}", inst.n, inst.t, inst.k());
            println!("host_vertices {}\nhost_edges {}", inst.host().vertex_count(), inst.host().edge_count());
            println!("precolored_vertices {}", inst.precolored().vertex_count());
            Ok(Outcome::Success)
        }
        Command::QbfEval { formula } => {
            println!("{}", read_formula(formula)?.evaluate()?);
            Ok(Outcome::Success)
        }
        Command::VerifyDrawer { formula, skip_swap, transcript } => {
            let inst = instance(formula)?;
            let report = match verify_drawer_dominates(&inst, DrawerOptions { skip_swap: *skip_swap }) {
                Err(VerifyError::Precondition(v)) => bail!("the drawer script needs a false formula; this one is {v}"),
                r => r?,
            };
            print!("{}", report.to_text());
            if let Some(t) = &report.refutation {
                write_transcript(transcript.as_ref(), &t.to_string())?;
            }
            Ok(if report.verdict == Verdict::Dominated { Outcome::Success } else { Outcome::Negative })
        }
        Command::VerifyPainter { formula, budget, never_phase_three, ladder_depth, samples, transcript } => {
            let inst = instance(formula)?;
            let options = PainterOptions { never_phase_three: *never_phase_three, ..Default::default() };
            let report = match verify_painter_dominates(&inst, options, *budget) {
                Err(VerifyError::Precondition(v)) => bail!("the painter script needs a true formula; this one is {v}"),
                r => r?,
            };
            print!("{}", report.to_text());
            match report.verdict {
                Verdict::Dominated => {
                    println!("rung full-exhaustion");
                    Ok(Outcome::Success)
                }
                Verdict::Refuted => {
                    if let Some(t) = &report.refutation {
                        write_transcript(transcript.as_ref(), &t.to_string())?;
                    }
                    Ok(Outcome::Negative)
                }
                Verdict::BudgetExhausted => {
                    let ladder = painter_fallback_ladder(&inst, options, *ladder_depth, *samples, cli.seed, *budget)?;
                    print!("{}", ladder.to_text());
                    if let Some((t, _)) = &ladder.sample_refutation {
                        write_transcript(transcript.as_ref(), &t.to_string())?;
                    }
                    println!("rung fallback-ladder {}", if ladder.passed() { "passed" } else { "failed" });
                    Ok(if ladder.passed() { Outcome::Success } else { Outcome::Negative })
                }
            }
        }
        Command::CrossCheck { max_n, max_k } => {
            if *max_n > 7 {
                bail!("cross-check enumerates graphs on at most 7 vertices");
            }
            let r = cross_check_solvers(*max_n, *max_k)?;
            println!("graphs {}\ncomparisons {}\nfailures {}", r.graphs, r.comparisons, r.failures.len());
            for f in &r.failures {
                println!("failure {}", f.replace('\n', " | "));
            }
            Ok(if r.passed() { Outcome::Success } else { Outcome::Negative })
        }
        Command::Play { input, human, vs, k, transcript } => play(input, *human, *vs, *k, cli.seed, transcript.as_ref()),
        Command::Serve { port } => {
            let port = match std::env::var("ONCOL_PORT") {
                Ok(v) => v.parse().with_context(|| format!("ONCOL_PORT={v} is not a port"))?,
                Err(_) => *port,
            };
            let addr = std::net::SocketAddr::from(([127, 0, 0, 1], port));
            eprintln!("listening on http://{addr}");
            tokio::runtime::Runtime::new()?.block_on(oncol_service::serve(addr, Default::default()))?;
            Ok(Outcome::Success)
        }
    }
}

fn play(
    input: &Path,
    human: SideArg,
    vs: OpponentArg,
    k: Option<Color>,
    seed: u64,
    transcript: Option<&PathBuf>,
) -> Result<Outcome> {
    let text = read(input)?;
    let (graph, formula) = if Graph::parse(&text).is_ok() { (Some(text), None) } else { (None, Some(text)) };
    let spec = SessionSpec {
        graph,
        formula,
        k,
        human: match human {
            SideArg::Painter => Side::Painter,
            SideArg::Drawer => Side::Drawer,
        },
        opponent: match vs {
            OpponentArg::Solver => Opponent::Solver,
            OpponentArg::Script => Opponent::Script,
            OpponentArg::Random => Opponent::Random,
        },
        seed: Some(seed),
    };
    let mut session = Session::create("cli".into(), &spec, oncol_service::session::DEFAULT_SOLVER_LIMIT)?;
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let mut out = io::stdout();
    loop {
        let view = session.view();
        writeln!(out, "{}", session.state().to_text().trim_end())?;
        writeln!(out, "status {}", view.status)?;
        if view.to_move.is_none() {
            break;
        }
        match session.human() {
            Side::Painter => write!(out, "color for vertex {} (or `hint`, `quit`)> ", view.pending.unwrap_or(0))?,
            Side::Drawer => write!(out, "neighborhood, `.` for none (or `hint`, `quit`)> ")?,
        }
        out.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        match line {
            "quit" => break,
            "hint" => {
                match session.hint() {
                    Ok(h) => writeln!(out, "hint {:?} ({})", h.mv, h.source)?,
                    Err(e) => writeln!(out, "no hint: {e}")?,
                }
                continue;
            }
            _ => {}
        }
        let mv = match session.human() {
            Side::Painter => match line.parse() {
                Ok(c) => MoveView::Color(c),
                Err(_) => {
                    writeln!(out, "expected a color number")?;
                    continue;
                }
            },
            Side::Drawer => {
                let parsed: Result<Vec<usize>, _> = line.split_whitespace().filter(|t| *t != ".").map(str::parse).collect();
                match parsed {
                    Ok(vs) => MoveView::Neighborhood(vs),
                    Err(_) => {
                        writeln!(out, "expected vertex numbers")?;
                        continue;
                    }
                }
            }
        };
        match session.play(mv) {
            Ok(()) => {}
            Err(SessionError::Illegal { reason, legal, nearest }) => {
                writeln!(out, "illegal: {reason}")?;
                if !nearest.is_empty() {
                    writeln!(out, "nearest legal: {nearest:?}")?;
                } else if let Some(l) = legal {
                    writeln!(out, "legal: {l:?}")?;
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    write_transcript(transcript, &session.log().to_string())?;
    Ok(Outcome::Success)
}
