//! Interactive play: in-memory sessions pairing a human side with an engine
//! opponent, and the JSON API the browser client talks to.

pub mod api;
pub mod session;

pub use api::{router, AppState, ServiceConfig};
pub use session::{Hint, LegalMoves, MoveView, Opponent, Session, SessionError, SessionSpec, Side, StateView};

/// Serves the API on `addr` until the process is stopped.
pub async fn serve(addr: std::net::SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(config))).await
}
