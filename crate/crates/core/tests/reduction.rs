use oncol_core::qbf::Formula;
use oncol_core::reduction::{build, classify_by_b_degree, expected_counts, verify_embedding_rigidity, Classification, Role};
use oncol_core::{embeds, GameConfig, GameState};

const TINY: &str = "forall 1 exists 2 : (1 2 2)";
const EXAMPLE: &str = "forall 1 exists 2 forall 3 exists 4 : (1 2 -4)(-1 2 3)(-1 -2 3)";

/// Adjacency decided from roles alone, read straight off the edge families.
fn adjacent(f: &Formula, n: usize, r: Role, s: Role) -> bool {
    use Role::*;
    let half_n = 3 * n / 2;
    let in_term = |var: usize, positive: bool, j: usize| {
        f.terms()[j - 1].iter().any(|l| l.var as usize == var && l.positive == positive)
    };
    let one_way = |r: Role, s: Role| -> bool {
        match (r, s) {
            (A(i), A(j)) => i != j,
            (H { gadget: g, pos: p }, H { gadget: g2, pos: p2 }) => {
                if g == g2 {
                    p.abs_diff(p2) == 1
                } else {
                    true
                }
            }
            (T(i), T(j)) => i != j,
            (X { var, positive }, X { var: v2, positive: p2 }) => var == v2 && positive != p2,
            (X { var, positive }, T(j)) => in_term(var, positive, j),
            (H { gadget, pos }, X { var, positive }) => {
                (var == 2 * gadget - 1 && positive) || ([2, 4].contains(&pos) && var % 2 == 0 && var / 2 >= gadget)
            }
            (H { .. }, T(_)) => true,
            (C, A(_)) | (C, B(_)) => true,
            (X { .. }, A(_)) => true,
            (M, T(_)) => true,
            (B(j), X { var, positive }) => {
                let i = var.div_ceil(2);
                if var % 2 == 1 {
                    j + 2 <= 3 * i
                } else if positive {
                    j < 3 * i
                } else {
                    j <= 3 * i
                }
            }
            (B(i), H { gadget, .. }) => i <= gadget + half_n,
            (B(i), T(j)) => i <= j + 2 * n,
            _ => false,
        }
    };
    one_way(r, s) || one_way(s, r)
}

fn check_instance(text: &str) {
    let f = Formula::parse(text).unwrap();
    let inst = build(&f).unwrap();
    let (n, t) = (inst.n, inst.t);
    let host = inst.host();
    for u in 0..host.vertex_count() {
        for v in 0..host.vertex_count() {
            if u != v {
                assert_eq!(host.has_edge(u, v), adjacent(&f, n, inst.role(u), inst.role(v)), "{} {}", inst.role(u), inst.role(v));
            }
        }
    }

    let c = expected_counts(n, t);
    assert_eq!(host.vertex_count(), c.host);
    assert_eq!(inst.precolored().vertex_count(), c.presented);
    assert_eq!(inst.k() as usize, t + 3 * n / 2 + 2);
    let count = |p: &dyn Fn(Role) -> bool| inst.roles.iter().filter(|&&r| p(r)).count();
    assert_eq!(count(&|r| matches!(r, Role::A(_))), c.k - 3);
    assert_eq!(count(&|r| matches!(r, Role::B(_))), 10 * n + 3 * t);
    assert_eq!(count(&|r| matches!(r, Role::H { .. })), 2 * n);
    assert_eq!(count(&|r| matches!(r, Role::X { .. })), 2 * n);
    assert_eq!(count(&|r| matches!(r, Role::T(_))), t);
    assert_eq!(host.vertex_count() - c.b, 2 * t + 11 * n / 2 + 1);

    // measured B-degrees invert the classification table
    let b_set = inst.roles.iter().enumerate().filter(|(_, r)| matches!(r, Role::B(_))).fold(0u128, |acc, (v, _)| acc | 1 << v);
    for (v, &role) in inst.roles.iter().enumerate() {
        let j = (host.neighbors(v) & b_set).count_ones() as usize;
        let class = match role {
            Role::X { .. } | Role::H { .. } | Role::T(_) => classify_by_b_degree(j, n, t).unwrap(),
            _ => continue,
        };
        let ok = match (role, class) {
            (Role::X { var, positive: false }, Classification::NegatedEven(i)) => var == i && var % 2 == 0,
            (Role::X { var, .. }, Classification::OddPair(i)) => var == i && var % 2 == 1,
            (Role::X { var, positive: true }, Classification::PositiveEven(i)) => var == i && var % 2 == 0,
            (Role::H { gadget, .. }, Classification::Gadget(i)) => gadget == i,
            (Role::T(j), Classification::Term(i)) => i == j,
            _ => false,
        };
        assert!(ok, "{role} classified as {class:?}");
    }

    // the pre-coloring follows f and embeds
    let l = inst.layout;
    let pc = inst.precolored();
    for i in 1..=c.a {
        assert_eq!(pc.color(l.presented_a(i)), Some(i as u32 + 3));
    }
    for i in 1..=c.b {
        assert_eq!(pc.color(l.presented_b(i)), Some(3));
    }
    assert_eq!(pc.color(l.presented_c()), Some(1));
    assert_eq!(pc.color(l.presented_m()), Some(1));
    assert_eq!(pc.graph().edge_count(), c.a * (c.a - 1) / 2 + c.a + c.b);
    assert!(embeds(pc.graph(), host));
    assert!(GameState::new(GameConfig::new(host.clone(), inst.k()).unwrap(), pc.clone()).is_ok());

    assert_eq!(host.edge_count(), closed_form_edges(&f, n, t));

    let report = verify_embedding_rigidity(&inst, 50_000_000).unwrap();
    assert!(report.passed());
    assert!(report.checks.len() > 10);
}

/// Independently summed edge count of the host graph.
fn closed_form_edges(f: &Formula, n: usize, t: usize) -> usize {
    let k = t + 3 * n / 2 + 2;
    let a = k - 3;
    let b = 10 * n + 3 * t;
    let g = n / 2;
    let literal_edges: usize = f
        .terms()
        .iter()
        .map(|term| {
            let mut lits: Vec<_> = term.to_vec();
            lits.sort();
            lits.dedup();
            lits.len()
        })
        .sum();
    let h_internal = 3 * g;
    let h_cross = 16 * g * (g.saturating_sub(1)) / 2;
    let h_even = 4 * g * (g + 1) / 2;
    let b_x: usize = (1..=g).map(|i| 2 * (3 * i - 2) + (3 * i - 1) + 3 * i).sum();
    let b_h: usize = (1..=g).map(|l| 4 * (l + 3 * n / 2)).sum();
    let b_t: usize = (1..=t).map(|j| j + 2 * n).sum();
    a * (a - 1) / 2
        + h_internal
        + h_cross
        + t * (t - 1) / 2
        + n
        + literal_edges
        + 2 * n
        + h_even
        + 2 * n * t
        + a
        + b
        + 2 * n * a
        + t
        + b_x
        + b_h
        + b_t
}

#[test]
fn tiny_instance_structure() {
    check_instance(TINY);
}

#[test]
fn example_instance_structure() {
    check_instance(EXAMPLE);
    let inst = build(&Formula::parse(EXAMPLE).unwrap()).unwrap();
    assert_eq!((inst.k(), inst.layout.counts.b), (11, 49));
}

#[test]
fn repeated_literals_give_single_edges() {
    let f = Formula::parse("forall 1 exists 2 : (2 2 2)").unwrap();
    let inst = build(&f).unwrap();
    let x2 = inst.layout.x(2, true);
    let t1 = inst.layout.term(1);
    assert!(inst.host().has_edge(x2, t1));
    check_instance("forall 1 exists 2 : (2 2 2)");
}

#[test]
fn h_vertices_see_the_odd_positive_literal_only() {
    let inst = build(&Formula::parse(EXAMPLE).unwrap()).unwrap();
    let l = inst.layout;
    for g in 1..=2 {
        for p in 1..=4 {
            assert!(inst.host().has_edge(l.h(g, p), l.x(2 * g - 1, true)));
            assert!(!inst.host().has_edge(l.h(g, p), l.x(2 * g - 1, false)));
        }
    }
}
