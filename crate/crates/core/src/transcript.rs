//! Move transcripts: one line per half-move (`D <vertices>` for a drawer
//! presentation, `P <color>` for a painter coloring) plus `# ...`
//! annotation lines.

use std::fmt;

use thiserror::Error;

use crate::game::{neighborhood_from_list, neighborhood_list, GameError, GameState, Status};
use crate::graph::{Color, Vertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("half-move {index}: {source}")]
    Replay { index: usize, source: GameError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Present(Vec<Vertex>),
    Color(Color),
    Note(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<Entry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn present(&mut self, neighborhood: VertexSet) {
        self.entries.push(Entry::Present(neighborhood_list(neighborhood)));
    }

    pub fn color(&mut self, color: Color) {
        self.entries.push(Entry::Color(color));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.entries.push(Entry::Note(text.into()));
    }

    /// Number of half-moves, annotations excluded.
    pub fn moves(&self) -> usize {
        self.entries.iter().filter(|e| !matches!(e, Entry::Note(_))).count()
    }

    pub fn parse(text: &str) -> Result<Self, TranscriptError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: &str| TranscriptError::Parse { line: i + 1, msg: msg.to_string() };
            if line.is_empty() {
                continue;
            }
            if let Some(note) = line.strip_prefix('#') {
                entries.push(Entry::Note(note.trim().to_string()));
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("D") => {
                    let vs = parts
                        .map(|p| p.parse::<Vertex>().map_err(|_| err("bad vertex")))
                        .collect::<Result<Vec<_>, _>>()?;
                    entries.push(Entry::Present(vs));
                }
                Some("P") => {
                    let c = parts.next().ok_or_else(|| err("missing color"))?;
                    let c = c.parse::<Color>().map_err(|_| err("bad color"))?;
                    if parts.next().is_some() {
                        return Err(err("trailing input"));
                    }
                    entries.push(Entry::Color(c));
                }
                _ => return Err(err("expected `D`, `P` or `#`")),
            }
        }
        Ok(Transcript { entries })
    }

    /// Plays the transcript from `start` under the game rules.
    pub fn replay(&self, start: &GameState) -> Result<GameState, TranscriptError> {
        let mut state = start.clone();
        for (index, e) in self.entries.iter().filter(|e| !matches!(e, Entry::Note(_))).enumerate() {
            let wrap = |source| TranscriptError::Replay { index, source };
            state = match e {
                Entry::Present(vs) => {
                    let nb = neighborhood_from_list(vs, state.presented().vertex_count()).map_err(wrap)?;
                    state.present(nb).map_err(wrap)?
                }
                Entry::Color(c) => state.apply_color(*c).map_err(wrap)?,
                Entry::Note(_) => unreachable!(),
            };
        }
        Ok(state)
    }

    /// Replays and returns the final status.
    pub fn final_status(&self, start: &GameState) -> Result<Status, TranscriptError> {
        Ok(self.replay(start)?.status())
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e {
                Entry::Present(vs) => {
                    write!(f, "D")?;
                    for v in vs {
                        write!(f, " {v}")?;
                    }
                    writeln!(f)?;
                }
                Entry::Color(c) => writeln!(f, "P {c}")?,
                Entry::Note(s) => writeln!(f, "# {s}")?,
            }
        }
        Ok(())
    }
}
