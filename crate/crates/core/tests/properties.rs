mod common;

use proptest::prelude::*;

use common::*;
use ircanon::invariant::quotient;
use ircanon::io::{decode_dimacs, decode_graph6, encode_dimacs, encode_graph6, format_cycles, parse_cycles};
use ircanon::refine::refine_sequence;
use ircanon::target::select;
use ircanon::{
    run, ColouredGraph, Colouring, EngineConfig, Graph, Mode, PermGroup, Permutation, SearchNode, SelectorStrategy,
    Strategy as Engine,
};

const SELECTORS: [SelectorStrategy; 4] = [
    SelectorStrategy::FirstNonSingleton,
    SelectorStrategy::FirstSmallest,
    SelectorStrategy::MostJoined,
    SelectorStrategy::TracesAncestral,
];

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        prop::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn colouring(n: usize) -> impl Strategy<Value = Colouring> {
    prop::collection::vec(0i64..3, n).prop_map(|l| Colouring::from_labels(&l))
}

/// Graph with a colouring and two permutations of its vertices.
fn instance(max_n: usize) -> impl Strategy<Value = (Graph, Colouring, Permutation, Permutation)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), colouring(n), perm(n), perm(n))
    })
}

/// Every node of the unpruned tree, parents before children.
fn all_nodes(g: &Graph, p0: &Colouring, sel: SelectorStrategy) -> Vec<SearchNode> {
    let mut out = vec![SearchNode::compute(g, p0, &[], sel).unwrap()];
    let mut i = 0;
    while i < out.len() {
        if let Some(cell) = out[i].target.clone() {
            for v in cell {
                let mut nu = out[i].nu.clone();
                nu.push(v);
                out.push(SearchNode::compute(g, p0, &nu, sel).unwrap());
            }
        }
        i += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_laws((g, p, a, b) in instance(12)) {
        let n = g.n();
        prop_assert_eq!(g.permuted(&Permutation::identity(n)).unwrap(), g.clone());
        let ab = a.then(&b).unwrap();
        prop_assert_eq!(g.permuted(&ab).unwrap(), g.permuted(&a).unwrap().permuted(&b).unwrap());
        prop_assert_eq!(p.permuted(&ab).unwrap(), p.permuted(&a).unwrap().permuted(&b).unwrap());
        prop_assert!(a.then(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(g.permuted(&a).unwrap().m(), g.m());
    }

    #[test]
    fn group_matches_brute_force((g, p, _, _) in instance(7), s in 0usize..2, m in 0usize..2) {
        let strategy = [Engine::Dfs, Engine::Bfs][s];
        let mode = [Mode::GroupOnly, Mode::Canonical][m];
        let r = run(&g, &p, &EngineConfig::new(mode, strategy)).unwrap();
        let mut group = PermGroup::from_generators(g.n(), &r.generators, 3).unwrap();
        group.complete();
        let mut elements = Vec::new();
        for_each_automorphism(&g, &p, &mut |img| elements.push(img.to_vec()));
        prop_assert_eq!(group.order(), (elements.len() as u64).into());
        for img in elements {
            prop_assert!(group.contains(&Permutation::from_images(img).unwrap()));
        }
        prop_assert_eq!(r.orbit_partition.classes(), brute_orbits(&g, &p));
    }

    #[test]
    fn refinement_r1_r2((g, p, _, _) in instance(14), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..6)) {
        let mut nu: Vec<usize> = Vec::new();
        for pick in picks {
            let node = SearchNode::compute(&g, &p, &nu, SelectorStrategy::FirstSmallest).unwrap();
            let Some(cell) = node.target else { break };
            nu.push(cell[pick.index(cell.len())]);
        }
        let r = refine_sequence(&g, &p, &nu).unwrap();
        prop_assert!(r.colouring.finer_or_equal(&p).unwrap());
        for &v in &nu {
            prop_assert_eq!(r.colouring.cell(r.colouring.colour(v)).len(), 1);
        }
        prop_assert_eq!(r.trace.len(), nu.len() + 1);
    }

    #[test]
    fn selector_t1_t2((g, p, _, _) in instance(14), s in 0usize..4) {
        let refined = refine_sequence(&g, &p, &[]).unwrap().colouring;
        let target = select(SELECTORS[s], &g, &refined, &[]);
        match target {
            None => prop_assert!(refined.is_discrete()),
            Some(cell) => {
                prop_assert!(cell.len() > 1);
                let is_cell = refined.cells().iter().any(|c| {
                    let mut c = c.clone();
                    c.sort_unstable();
                    c == cell
                });
                prop_assert!(is_cell);
            }
        }
    }

    #[test]
    fn quotient_counts((g, p, _, _) in instance(14)) {
        let refined = refine_sequence(&g, &p, &[]).unwrap().colouring;
        let q = quotient(&g, &refined);
        let k = refined.len();
        prop_assert_eq!(q.total_weight(), g.m());
        prop_assert_eq!(q.cell_labels.iter().map(|l| l.1).sum::<usize>(), g.n());
        let a = matrix(&g);
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(q.edge_weights[i][j], q.edge_weights[j][i]);
                // Equitable: every vertex of cell i sees the same number in cell j.
                let x = refined.cell(i);
                let deg = refined.cell(j).iter().filter(|&&w| a[x[0]][w]).count();
                let expected = if i == j { x.len() * deg / 2 } else { x.len() * deg };
                prop_assert_eq!(q.edge_weights[i][j], expected);
            }
        }
    }

    #[test]
    fn certificates_identify_isomorphism_classes(g in graph(7), h in graph(7), a in perm(7), s in 0usize..2) {
        let strategy = [Engine::Dfs, Engine::Bfs][s];
        let cfg = EngineConfig::new(Mode::Canonical, strategy);
        let cg = run(&g, &Colouring::unit(g.n()), &cfg).unwrap().canonical.unwrap();
        let ch = run(&h, &Colouring::unit(h.n()), &cfg).unwrap().canonical.unwrap();
        prop_assert_eq!(cg.certificate == ch.certificate, brute_isomorphism(&g, &h).is_some());
        prop_assert_eq!(cg.certificate == ch.certificate, cg.graph == ch.graph);
        prop_assert_eq!(g.permuted(&cg.labelling).unwrap(), cg.graph.clone());
        if g.n() == 7 {
            let moved = g.permuted(&a).unwrap();
            let cm = run(&moved, &Colouring::unit(7), &cfg).unwrap().canonical.unwrap();
            prop_assert_eq!(cm.certificate, cg.certificate);
        }
    }

    #[test]
    fn graph6_round_trip(g in graph(70)) {
        let s = encode_graph6(&g);
        prop_assert!(s.bytes().all(|b| (63..=126).contains(&b)));
        prop_assert_eq!(decode_graph6(&s).unwrap(), g);
    }

    #[test]
    fn dimacs_round_trip((g, p, _, _) in instance(20)) {
        let cg = ColouredGraph::new(g, p).unwrap();
        prop_assert_eq!(decode_dimacs(&encode_dimacs(&cg)).unwrap(), cg);
    }

    #[test]
    fn cycle_notation_round_trip(a in (0usize..20).prop_flat_map(perm)) {
        prop_assert_eq!(parse_cycles(a.len(), &format_cycles(&a)).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A strict trace difference at some depth is kept by every pair of leaf
    /// descendants.
    #[test]
    fn phi1_by_exhaustive_extension(g in graph(7), s in 0usize..4) {
        let nodes = all_nodes(&g, &Colouring::unit(g.n()), SELECTORS[s]);
        let leaves: Vec<&SearchNode> = nodes.iter().filter(|x| x.target.is_none()).collect();
        let below = |x: &SearchNode| -> Vec<&SearchNode> {
            leaves.iter().copied().filter(|l| l.nu.starts_with(&x.nu)).collect()
        };
        for x in &nodes {
            for y in &nodes {
                if x.nu.len() != y.nu.len() || x.trace == y.trace {
                    continue;
                }
                let o = x.trace.cmp(&y.trace);
                for lx in below(x) {
                    for ly in below(y) {
                        prop_assert_eq!(lx.trace.cmp(&ly.trace), o);
                    }
                }
            }
        }
    }
}
