//! Exact tools for the on-line graph coloring game with a pre-colored
//! induced subgraph: game rules, solvers, quantified 3DNF formulas, the
//! formula-to-game compiler, scripted strategies for both players, and the
//! one-sided verification harness that checks them.

pub mod canon;
pub mod embed;
pub mod game;
pub mod graph;
pub mod qbf;
pub mod reduction;
pub mod search;
pub mod strategy;
pub mod transcript;
pub mod verify;

pub use canon::{canonical_key, graph_key, CanonicalKey, ColorMode};
pub use embed::{embeds, induced_embeddings};
pub use game::{DrawerMove, GameConfig, GameError, GameState, Role, Status};
pub use graph::{Color, ColoredState, Graph, Vertex, VertexSet};
pub use search::{best_move, online_chromatic_number, solve, solve_naive, Move, SearchError, Solver};
pub use qbf::{Formula, Literal, QbfError, QbfOracle, Quantifier, ValueTable};
pub use reduction::{build, classify_by_b_degree, expected_counts, verify_embedding_rigidity, Classification, ReductionInstance};
