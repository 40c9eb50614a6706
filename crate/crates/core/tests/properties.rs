//! Randomized invariants of the engine, explorer and root-firing modules.

use chipfire_core::engine::{
    check_label_bounds, closed_form_stabilization, fire, fire_unlabeled, legal_moves, run_script,
    stabilize_labeled, stabilize_unlabeled, RunOptions,
};
use chipfire_core::explorer::{enumerate_stables, enumerate_stables_with, Exploration, Limits};
use chipfire_core::vector::{vector_fire, Root, VectorState};
use chipfire_core::{
    compare, parse_graph, FiringMove, Label, LabeledConfig, Order, PathGraph, Seed, Strategy,
    UnlabeledConfig, Vertex,
};
use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use proptest::strategy::Strategy as _;
use rand::Rng;

fn config_from(vertices: &[Vertex]) -> UnlabeledConfig {
    let mut c = UnlabeledConfig::new();
    for &v in vertices {
        c.add(v, 1);
    }
    c
}

fn arb_config(
    max_chips: usize,
    lo: Vertex,
    hi: Vertex,
) -> impl proptest::strategy::Strategy<Value = UnlabeledConfig> {
    prop::collection::vec(lo..=hi, 1..=max_chips).prop_map(|v| config_from(&v))
}

/// A random legal labeled script from `Δⁿ` on `graph`, `len` moves or until stable.
fn random_script(graph: &PathGraph, n: usize, len: usize, seed: u64) -> Vec<FiringMove> {
    let mut rng = Seed::new(seed).rng();
    let mut c = LabeledConfig::delta_n(n as i64).unwrap();
    let mut script = Vec::new();
    for _ in 0..len {
        let moves = legal_moves(graph, &c);
        if moves.is_empty() {
            break;
        }
        let mv = moves[rng.random_range(0..moves.len())].clone();
        c = fire(graph, &c, &mv).unwrap();
        script.push(mv);
    }
    script
}

fn graphs() -> Vec<PathGraph> {
    [
        "Z",
        "N",
        "Ndir",
        "Z loops=0:1",
        "Z loops=-1:1,2:2",
        "Z r=2",
        "N r=3",
    ]
    .iter()
    .map(|s| parse_graph(s).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn firing_statistics(c in arb_config(24, -6, 6), seed in any::<u64>(), steps in 1usize..30) {
        let z = PathGraph::line();
        let mut rng = Seed::new(seed).rng();
        let mut c = c;
        for _ in 0..steps {
            let unstable: Vec<Vertex> = c.iter().filter(|&(_, k)| k >= 2).map(|(v, _)| v).collect();
            if unstable.is_empty() {
                break;
            }
            let j = unstable[rng.random_range(0..unstable.len())];
            let d = fire_unlabeled(&z, &c, j).unwrap();
            for ell in j - 4..=j + 4 {
                let drop = c.phi(ell).unwrap() - d.phi(ell).unwrap();
                prop_assert_eq!(drop, i64::from(j == ell + 1), "ell={} j={}", ell, j);
            }
            prop_assert_eq!(d.phi_inf().unwrap(), c.phi_inf().unwrap());
            prop_assert_eq!(d.phi2_inf().unwrap(), c.phi2_inf().unwrap() + 2);
            prop_assert!(d.gamma() <= c.gamma());
            c = d;
        }
    }

    #[test]
    fn order_laws(a in arb_config(6, -3, 3), b in arb_config(6, -3, 3), c in arb_config(6, -3, 3)) {
        prop_assert_eq!(compare(&a, &a).unwrap().order, Order::Equal);
        if a.total() == b.total() {
            let ab = compare(&a, &b).unwrap();
            let ba = compare(&b, &a).unwrap();
            let flipped = match ab.order {
                Order::Less => Order::Greater,
                Order::Greater => Order::Less,
                o => o,
            };
            prop_assert_eq!(ba.order, flipped);
            if ab.is_cover {
                prop_assert_eq!(b.phi_inf().unwrap(), a.phi_inf().unwrap() + 1);
            }
            if a.total() == c.total() {
                let bc = compare(&b, &c).unwrap().order;
                let le = |o: Order| matches!(o, Order::Less | Order::Equal);
                if le(ab.order) && le(bc) {
                    prop_assert!(le(compare(&a, &c).unwrap().order));
                }
            }
        }
    }

    #[test]
    fn order_preserved_by_stabilization(c in arb_config(20, -10, 10), pick in any::<prop::sample::Index>()) {
        let z = PathGraph::line();
        let support: Vec<Vertex> = c.support().collect();
        let v = support[pick.index(support.len())];
        let mut d = c.clone();
        d.remove(v, 1).unwrap();
        d.add(v + 1, 1);
        let stab = |x: &UnlabeledConfig| {
            stabilize_unlabeled(&z, x, &Strategy::LeftmostVertex, RunOptions::default()).unwrap().final_config
        };
        let cmp = compare(&stab(&c), &stab(&d)).unwrap();
        prop_assert!(cmp.is_cover && cmp.order == Order::Less);
    }

    #[test]
    fn dual_is_an_involution_and_commutes_with_firing(n in 1usize..12, len in 0usize..40, seed in any::<u64>()) {
        let z = PathGraph::line();
        let script = random_script(&z, n, len, seed);
        let mut c = LabeledConfig::delta_n(n as i64).unwrap();
        for mv in &script {
            prop_assert_eq!(c.dual(n).unwrap().dual(n).unwrap(), c.clone());
            let next = fire(&z, &c, mv).unwrap();
            let dual_next = next.dual(n).unwrap();
            let reachable = legal_moves(&z, &c.dual(n).unwrap())
                .iter()
                .any(|m| fire(&z, &c.dual(n).unwrap(), m).unwrap() == dual_next);
            prop_assert!(reachable);
            c = next;
        }
    }

    #[test]
    fn mirrored_script_reaches_the_dual(n in 1usize..12, len in 0usize..60, seed in any::<u64>()) {
        let z = PathGraph::line();
        let script = random_script(&z, n, len, seed);
        let start = LabeledConfig::delta_n(n as i64).unwrap();
        let end = run_script(&z, &start, &script).unwrap();
        let mirrored: Vec<FiringMove> = script
            .iter()
            .map(|mv| {
                let mut chips: Vec<Label> = mv.chips.iter().map(|&l| n as Label + 1 - l).collect();
                chips.sort_unstable();
                FiringMove::new(-mv.vertex, chips)
            })
            .collect();
        prop_assert_eq!(run_script(&z, &start, &mirrored).unwrap(), end.dual(n).unwrap());
    }

    #[test]
    fn psi_tracks_cross_firings(n in 2usize..14, seed in any::<u64>()) {
        let z = PathGraph::line();
        let start = LabeledConfig::delta_n(n as i64).unwrap();
        let r = stabilize_labeled(&z, &start, &Strategy::UniformMove(Seed::new(seed)), RunOptions::traced(usize::MAX)).unwrap();
        let mut c = start.clone();
        for mv in r.trace.as_ref().unwrap() {
            let next = fire(&z, &c, mv).unwrap();
            for k in 1..=n as Label {
                let straddles = mv.chips[0] <= k && k < mv.chips[mv.chips.len() - 1];
                prop_assert_eq!(c.psi(k).unwrap() - next.psi(k).unwrap(), i64::from(straddles));
            }
            c = next;
        }
        for k in 1..=n as Label {
            let crossed = r.cross_firings.get(&k).copied().unwrap_or(0) as i64;
            prop_assert_eq!(start.psi(k).unwrap() - r.final_config.psi(k).unwrap(), crossed);
        }
    }

    #[test]
    fn restriction_moves_rightward(n in 2usize..14, len in 0usize..80, seed in any::<u64>()) {
        let z = PathGraph::line();
        let script = random_script(&z, n, len, seed);
        let mut c = LabeledConfig::delta_n(n as i64).unwrap();
        for mv in &script {
            let next = fire(&z, &c, mv).unwrap();
            for k in 1..=n as Label {
                let (before, after) = (c.restrict_geq(k), next.restrict_geq(k));
                let fired = before.get(mv.vertex) >= 2
                    && fire_unlabeled(&z, &before, mv.vertex).unwrap() == after;
                let cover = compare(&before, &after).unwrap().is_cover;
                prop_assert!(before == after || fired || cover, "k={}: {} -> {}", k, before, after);
            }
            prop_assert!(check_label_bounds(&next, n).unwrap());
            c = next;
        }
    }

    #[test]
    fn unlabeled_confluence(g in 0usize..7, raw in prop::collection::vec(0i64..=8, 1..=16)) {
        let graph = &graphs()[g];
        let c = config_from(&raw);
        let reference = stabilize_unlabeled(graph, &c, &Strategy::LeftmostVertex, RunOptions::default()).unwrap();
        let mut others = vec![Strategy::RightmostVertex];
        others.extend((0..10).map(|s| Strategy::UniformMove(Seed::new(s))));
        for s in &others {
            let r = stabilize_unlabeled(graph, &c, s, RunOptions::default()).unwrap();
            prop_assert_eq!(&r.final_config, &reference.final_config, "{} {:?}", graph, s);
            prop_assert_eq!(r.total_firings, reference.total_firings);
            prop_assert_eq!(&r.odometer, &reference.odometer);
        }
    }

    #[test]
    fn labeled_runs_match_unlabeled(g in 0usize..7, n in 1usize..12, seed in any::<u64>()) {
        let graph = &graphs()[g];
        let start = LabeledConfig::delta_n(n as i64).unwrap();
        let labeled = stabilize_labeled(graph, &start, &Strategy::UniformVertexThenChips(Seed::new(seed)), RunOptions::default()).unwrap();
        let unlabeled = stabilize_unlabeled(graph, &start.underlying(), &Strategy::LeftmostVertex, RunOptions::default()).unwrap();
        prop_assert_eq!(labeled.final_config.underlying(), unlabeled.final_config);
        prop_assert_eq!(labeled.odometer, unlabeled.odometer);
    }

    #[test]
    fn type_a_trajectories_agree(n in 1usize..12, len in 0usize..60, seed in any::<u64>()) {
        let z = PathGraph::line();
        let script = random_script(&z, n, len, seed);
        let mut c = LabeledConfig::delta_n(n as i64).unwrap();
        let mut v = VectorState::origin(n).unwrap();
        for mv in &script {
            let (i, j) = (mv.chips[0] as usize, mv.chips[1] as usize);
            v = vector_fire(&v, &Root::Diff { lo: i, hi: j }).unwrap();
            c = fire(&z, &c, mv).unwrap();
            prop_assert_eq!(VectorState::from_labeled(&c, n).unwrap(), v.clone());
        }
    }

    #[test]
    fn graph_specs_round_trip(g in 0usize..7) {
        let graph = &graphs()[g];
        prop_assert_eq!(&parse_graph(&graph.to_string()).unwrap(), graph);
        for v in -3..=3 {
            if graph.contains(v) {
                prop_assert!(graph.outdeg(v).unwrap() >= 1);
            }
        }
    }
}

#[test]
fn line_outdegree_is_two() {
    let z = PathGraph::line();
    assert!((-50..=50).all(|v| z.outdeg(v).unwrap() == 2));
}

#[test]
fn stable_sets_are_closed_under_duality() {
    let z = PathGraph::line();
    for n in 1..=7usize {
        let set = enumerate_stables(
            &z,
            &LabeledConfig::delta_n(n as i64).unwrap(),
            Limits::unlimited(),
        )
        .unwrap();
        let pile = closed_form_stabilization(&z, n as u64).unwrap();
        for d in &set.stables {
            assert!(
                set.contains(&d.dual(n).unwrap()),
                "n={n}: dual of {d} missing"
            );
            assert_eq!(d.underlying(), pile);
            assert!(check_label_bounds(d, n).unwrap());
        }
    }
}

#[test]
fn stable_sets_do_not_depend_on_exploration_order() {
    for spec in ["Z", "Z loops=0:1", "Z r=2", "N"] {
        let graph = parse_graph(spec).unwrap();
        for n in 1..=7usize {
            let start = LabeledConfig::delta_n(n as i64).unwrap();
            let sets: Vec<_> = [
                Exploration::DepthFirst,
                Exploration::BreadthFirst,
                Exploration::Parallel,
            ]
            .into_iter()
            .map(|m| {
                enumerate_stables_with(&graph, &start, Limits::unlimited(), m)
                    .unwrap()
                    .stables
            })
            .collect();
            assert!(sets.windows(2).all(|w| w[0] == w[1]), "{spec} n={n}");
        }
    }
}
