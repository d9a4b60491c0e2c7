use proptest::prelude::*;

use oncol_core::{ColoredState, GameConfig, GameState, Graph};
use oncol_service::{LegalMoves, MoveView, Opponent, Session, SessionError, SessionSpec, Side};

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..=6).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges: Vec<_> = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(&e, _)| e).collect();
            Graph::new(n, &edges).unwrap()
        })
    })
}

/// The payload must describe a legal position of the session's game.
fn check_view(session: &Session, host: &Graph, k: u32) {
    let v = session.view();
    let g = Graph::new(v.vertices, &v.edges).unwrap();
    let presented = ColoredState::new(g, v.colors.clone(), v.pending).expect("proper partial coloring");
    GameState::new(GameConfig::new(host.clone(), k).unwrap(), presented).expect("presented graph embeds in the host");
    assert!(session.replay_matches(), "move log does not replay to the current state");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sessions_stay_replayable(
        host in graph_strategy(),
        k in 1u32..=4,
        human_drawer in any::<bool>(),
        solver in any::<bool>(),
        seed in any::<u64>(),
        picks in proptest::collection::vec(any::<u16>(), 24),
    ) {
        let spec = SessionSpec {
            graph: Some(host.to_text()),
            formula: None,
            k: Some(k),
            human: if human_drawer { Side::Drawer } else { Side::Painter },
            opponent: if solver { Opponent::Solver } else { Opponent::Random },
            seed: Some(seed),
        };
        let mut session = Session::create("t".into(), &spec, 12).unwrap();
        check_view(&session, &host, k);
        for pick in picks {
            let view = session.view();
            let Some(legal) = view.legal_moves.clone() else { break };
            // every fourth pick tries a move that cannot be legal
            let mv = match (&legal, pick % 4) {
                (LegalMoves::Colors(_), 0) => MoveView::Color(k + 1),
                (LegalMoves::Neighborhoods(_), 0) => MoveView::Neighborhood(vec![view.vertices]),
                (LegalMoves::Colors(cs), _) => MoveView::Color(cs[pick as usize % cs.len()]),
                (LegalMoves::Neighborhoods(ns), _) => MoveView::Neighborhood(ns[pick as usize % ns.len()].clone()),
            };
            let illegal = pick % 4 == 0;
            match session.play(mv) {
                Ok(()) => prop_assert!(!illegal),
                Err(SessionError::Illegal { .. }) => {
                    prop_assert!(illegal);
                    prop_assert_eq!(session.view(), view);
                }
                Err(e) => panic!("unexpected error {e}"),
            }
            check_view(&session, &host, k);
        }
    }
}
