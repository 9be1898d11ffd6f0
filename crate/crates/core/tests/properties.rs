use std::collections::VecDeque;

use proptest::prelude::*;

use knowall::dynet::{
    constant_instance, dominates, domination, information_flow_graph, power_graph, temporal_reachable, Digraph,
    DynamicGraph,
};
use knowall::homology::{betti_reduced, check_shelling_order, ShellingOrder};
use knowall::protocol::{compute_views, flood_simulate, protocol_complex, xi_simplex};
use knowall::simplicial::{
    check_spreading_map, pseudosphere, skeleton, star, CSimplex, CVertex, ChromaticComplex, Label,
};
use knowall::solver::{kset_by_domination, solve, verify_decision_map};
use knowall::tasks::kset_task;

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        let slots = Digraph::arc_slots(n);
        (Just(n), 0..(1u64 << slots)).prop_map(|(n, m)| Digraph::from_bitmask(n, m).unwrap())
    })
}

fn dynamic(max_n: usize, max_r: usize) -> impl Strategy<Value = DynamicGraph> {
    (1..=max_n, 0..=max_r).prop_flat_map(|(n, r)| {
        let slots = Digraph::arc_slots(n);
        prop::collection::vec(0..(1u64 << slots), r).prop_map(move |masks| {
            let rounds = masks.into_iter().map(|m| Digraph::from_bitmask(n, m).unwrap()).collect();
            DynamicGraph::new(n, rounds).unwrap()
        })
    })
}

fn binary(n: usize) -> ChromaticComplex {
    pseudosphere(n, &[Label::new("0"), Label::new("1")]).unwrap()
}

/// Subcomplex of the binary 3-pseudosphere generated by a nonempty set of its simplices.
fn binary_subcomplex() -> impl Strategy<Value = ChromaticComplex> {
    let all: Vec<CSimplex> = binary(3).simplices().into_iter().collect();
    prop::sample::subsequence(all.clone(), 1..=all.len().min(12)).prop_map(ChromaticComplex::from_facets)
}

/// Time-expanded graph search: layer `t` holds every node at time `t`.
fn reachable_oracle(g: &DynamicGraph, p: usize, q: usize) -> bool {
    let (n, r) = (g.n(), g.len());
    let mut seen = vec![vec![false; n]; r + 1];
    let mut queue = VecDeque::from([(p, 0usize)]);
    seen[0][p] = true;
    while let Some((u, t)) = queue.pop_front() {
        if t == r {
            continue;
        }
        let mut next = vec![u];
        next.extend((0..n).filter(|&w| g.rounds()[t].has_arc(u, w)));
        for w in next {
            if !seen[t + 1][w] {
                seen[t + 1][w] = true;
                queue.push_back((w, t + 1));
            }
        }
    }
    seen[r][q]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reachability_matches_time_expanded_search(g in dynamic(5, 4)) {
        for p in 0..g.n() {
            for q in 0..g.n() {
                prop_assert_eq!(temporal_reachable(&g, p, q).unwrap(), reachable_oracle(&g, p, q));
            }
        }
    }

    #[test]
    fn ifg_grows_with_rounds(g in dynamic(5, 4)) {
        let ifg = information_flow_graph(&g);
        prop_assert!((0..g.n()).all(|p| !ifg.has_arc(p, p)));
        for r in 0..g.len() {
            let a = information_flow_graph(&g.truncated(r));
            let b = information_flow_graph(&g.truncated(r + 1));
            prop_assert!(a.is_subgraph_of(&b));
        }
        prop_assert!(g.rounds().iter().all(|round| round.is_subgraph_of(&ifg)));
    }

    #[test]
    fn constant_instance_ifg_is_power_graph(h in digraph(6), r in 0usize..6) {
        prop_assert_eq!(information_flow_graph(&constant_instance(&h, r)), power_graph(&h, r));
    }

    #[test]
    fn domination_is_minimum(h in digraph(5)) {
        let report = domination(&h);
        let n = h.n();
        prop_assert_eq!(report.witness.len(), report.gamma);
        prop_assert!(dominates(&h, report.witness_mask()));
        let smaller = (0u64..1 << n).filter(|s| (s.count_ones() as usize) < report.gamma);
        for set in smaller {
            prop_assert!(!dominates(&h, set));
        }
        let universal = (0..n).any(|p| h.out_degree(p) == n - 1);
        prop_assert_eq!(report.gamma == 1, universal);
    }

    #[test]
    fn domination_ignores_relabeling(h in digraph(5), seed in any::<u64>()) {
        let n = h.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let relabeled = h.relabel(&perm).unwrap();
        prop_assert_eq!(relabeled.arc_count(), h.arc_count());
        prop_assert_eq!(domination(&relabeled).gamma, domination(&h).gamma);
    }

    #[test]
    fn flooding_yields_ifg_views(g in dynamic(5, 4), raw in prop::collection::vec(0u8..3, 5)) {
        let inputs: Vec<Label> = raw[..g.n()].iter().map(|v| Label::new(v.to_string())).collect();
        let flooded = flood_simulate(&g, &inputs).unwrap();
        let direct = compute_views(&information_flow_graph(&g), &inputs).unwrap();
        prop_assert_eq!(flooded, direct);
    }

    #[test]
    fn xi_is_a_facet_bijection_and_spreading(h in digraph(3)) {
        let n = h.n();
        let input = binary(n);
        let (complex, xi) = protocol_complex(&h, &input).unwrap();
        prop_assert_eq!(xi.len(), input.facets().len());
        prop_assert_eq!(complex.facets().len(), input.facets().len());
        for (sigma, image) in xi.iter() {
            prop_assert_eq!(image.name_mask(), sigma.name_mask());
        }
        prop_assert!(check_spreading_map(|s| xi_simplex(&xi, s), &input, &complex));
    }

    #[test]
    fn cuts_never_enlarge_intersections(h in digraph(4)) {
        let input = binary(h.n());
        let (_, xi) = protocol_complex(&h, &input).unwrap();
        let pairs: Vec<(&CSimplex, &CSimplex)> = xi.iter().collect();
        for (s, xs) in &pairs {
            for (t, xt) in &pairs {
                prop_assert!(xs.intersection(xt).dim() <= s.intersection(t).dim());
            }
        }
    }

    #[test]
    fn search_witnesses_verify(h in digraph(3), k in 1usize..3) {
        let values = [Label::new("0"), Label::new("1"), Label::new("2")];
        let task = kset_task(h.n(), &values, k).unwrap();
        let verdict = solve(&task, &h).unwrap();
        if let Some(w) = verdict.witness() {
            prop_assert!(verify_decision_map(&task, &h, w).unwrap());
        }
        if domination(&h).gamma <= k {
            let dm = kset_by_domination(&h, task.input_complex(), k).unwrap();
            prop_assert!(verify_decision_map(&task, &h, &dm).unwrap());
        }
    }

    #[test]
    fn simplex_boundary_shells_in_any_order(
        order in (2usize..6).prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    ) {
        let n = order.len();
        let full = CSimplex::from_labels((0..n).map(|_| "x"));
        let faces: Vec<CSimplex> = order.iter().map(|&skip| full.restrict_to_names(!(1u64 << skip))).collect();
        let boundary = ChromaticComplex::from_facets(faces.clone());
        prop_assert!(check_shelling_order(&boundary, &ShellingOrder(faces)).unwrap());
    }

    #[test]
    fn cones_are_acyclic(k in binary_subcomplex()) {
        let apex = CVertex::new(3, "apex");
        let coned = ChromaticComplex::from_facets(k.facets().iter().map(|f| {
            let mut vs = f.vertices().to_vec();
            vs.push(apex.clone());
            CSimplex::new(vs).unwrap()
        }));
        prop_assert!(betti_reduced(&coned, 3).unwrap().values().iter().all(|&b| b == 0));
    }

    #[test]
    fn reduced_zeroth_betti_counts_components(k in binary_subcomplex()) {
        let b = betti_reduced(&k, 0).unwrap();
        prop_assert_eq!(b.values()[0] + 1, k.connected_components());
    }

    #[test]
    fn star_and_skeleton_are_idempotent(k in binary_subcomplex(), d in 0usize..3, pick in any::<prop::sample::Index>()) {
        let sk = skeleton(&k, d);
        prop_assert_eq!(skeleton(&sk, d), sk.clone());
        prop_assert!(sk.dim() <= d as isize);
        let simplices: Vec<CSimplex> = k.simplices().into_iter().collect();
        let s = pick.get(&simplices);
        let st = star(s, &k).unwrap();
        prop_assert_eq!(star(s, &st).unwrap(), st);
    }

    #[test]
    fn facet_list_round_trips(k in binary_subcomplex()) {
        prop_assert_eq!(ChromaticComplex::from_facet_list(&k.to_facet_list()).unwrap(), k);
    }
}
