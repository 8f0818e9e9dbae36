use std::collections::BTreeSet;

use lpaclass::explorer::neighbors;
use lpaclass::{
    canonical_form, cokernel, graph_iso, k0_data, parse_graph, pointed_iso, project, IntMatrix, MultiGraph,
    SearchBounds,
};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(-bound..=bound, rows * cols).prop_map(move |e| IntMatrix::from_vec(rows, cols, e).unwrap())
}

fn any_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c, 3))
}

fn graph(max_n: usize, max_mult: i64) -> impl Strategy<Value = MultiGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(0..=max_mult, n * n)
            .prop_map(move |e| MultiGraph::from_incidence(&IntMatrix::from_vec(n, n, e).unwrap(), None).unwrap())
    })
}

/// A unimodular matrix built from random elementary row operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..6).prop_map(move |ops| {
        let mut rows = IntMatrix::identity(n).to_rows();
        for (s, t, k, swap) in ops {
            if s == t {
                continue;
            }
            if swap {
                rows.swap(s, t);
            } else {
                for j in 0..n {
                    rows[s][j] += k * rows[t][j];
                }
            }
        }
        IntMatrix::from_rows(&rows)
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn hereditary(g: &MultiGraph, set: &[bool]) -> bool {
    let n = g.vertex_count();
    (0..n).all(|u| !set[u] || (0..n).all(|v| g.mult(u, v) == 0 || set[v]))
}

fn saturated(g: &MultiGraph, set: &[bool]) -> bool {
    let n = g.vertex_count();
    (0..n).all(|v| set[v] || g.is_sink(v) || (0..n).any(|u| g.mult(v, u) > 0 && !set[u]))
}

fn brute_force_cycles(g: &MultiGraph) -> BTreeSet<Vec<usize>> {
    fn walk(g: &MultiGraph, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let n = g.vertex_count();
        let last = *path.last().unwrap();
        if g.mult(last, path[0]) > 0 {
            out.insert(path.clone());
        }
        for next in 0..n {
            if next > path[0] && !path.contains(&next) && g.mult(last, next) > 0 {
                path.push(next);
                walk(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for start in 0..g.vertex_count() {
        walk(g, &mut vec![start], &mut out);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cokernel_ignores_unimodular_changes(
        (a, u, v) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| (matrix(r, c, 3), unimodular(r), unimodular(c)))
    ) {
        let b = u.checked_mul(&a).unwrap().checked_mul(&v).unwrap();
        prop_assert_eq!(cokernel(&b).unwrap(), cokernel(&a).unwrap());
    }

    #[test]
    fn projection_is_constant_on_cosets(
        (a, v, x) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| (
            matrix(r, c, 3),
            proptest::collection::vec(-6i64..=6, r),
            proptest::collection::vec(-3i64..=3, c),
        ))
    ) {
        let ax = a.checked_mul_vec(&x).unwrap();
        let shifted: Vec<i64> = v.iter().zip(&ax).map(|(p, q)| p + q).collect();
        prop_assert_eq!(project(&a, &shifted).unwrap(), project(&a, &v).unwrap());
    }

    #[test]
    fn projection_is_additive(
        (a, v, w) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| (
            matrix(r, c, 3),
            proptest::collection::vec(-6i64..=6, r),
            proptest::collection::vec(-6i64..=6, r),
        ))
    ) {
        let group = cokernel(&a).unwrap();
        let sum: Vec<i64> = v.iter().zip(&w).map(|(p, q)| p + q).collect();
        let (pv, pw, ps) = (project(&a, &v).unwrap(), project(&a, &w).unwrap(), project(&a, &sum).unwrap());
        for (i, ((x, y), z)) in pv.iter().zip(&pw).zip(&ps).enumerate() {
            match group.invariant_factors.get(i) {
                Some(&d) => prop_assert_eq!((x + y).rem_euclid(d), *z),
                None => prop_assert_eq!(x + y, *z),
            }
        }
    }

    #[test]
    fn unit_projection_has_group_shape(a in any_matrix()) {
        let group = cokernel(&a).unwrap();
        let coords = project(&a, &vec![1; a.rows()]).unwrap();
        prop_assert_eq!(coords.len(), group.invariant_factors.len() + group.free_rank);
    }

    #[test]
    fn hs_closure_is_least_hereditary_saturated_superset(
        (g, seed) in graph(5, 2).prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), proptest::collection::vec(any::<bool>(), n))
        })
    ) {
        let n = g.vertex_count();
        let seed_idx: Vec<usize> = (0..n).filter(|&i| seed[i]).collect();
        let closure = g.hs_closure_indices(&seed_idx);
        prop_assert!(seed_idx.iter().all(|&i| closure[i]));
        prop_assert!(hereditary(&g, &closure));
        prop_assert!(saturated(&g, &closure));
        for mask in 0u32..1 << n {
            let set: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if seed_idx.iter().all(|&i| set[i]) && hereditary(&g, &set) && saturated(&g, &set) {
                prop_assert!((0..n).all(|i| !closure[i] || set[i]));
            }
        }
    }

    #[test]
    fn hs_closure_is_monotone_and_idempotent(
        (g, small, extra) in graph(5, 2).prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(any::<bool>(), n))
        })
    ) {
        let n = g.vertex_count();
        let x: Vec<usize> = (0..n).filter(|&i| small[i]).collect();
        let y: Vec<usize> = (0..n).filter(|&i| small[i] || extra[i]).collect();
        let (cx, cy) = (g.hs_closure_indices(&x), g.hs_closure_indices(&y));
        prop_assert!((0..n).all(|i| !cx[i] || cy[i]));
        let again: Vec<usize> = (0..n).filter(|&i| cx[i]).collect();
        prop_assert_eq!(g.hs_closure_indices(&again), cx);
    }

    #[test]
    fn purely_infinite_simple_graphs_have_no_sinks(g in graph(4, 2)) {
        let report = g.analyze();
        if report.purely_infinite_simple {
            prop_assert!(report.sinks.is_empty());
        }
    }

    #[test]
    fn cycles_match_brute_force(g in graph(5, 2)) {
        let listed: BTreeSet<Vec<usize>> = g.cycle_indices().into_iter().collect();
        prop_assert_eq!(listed.len(), g.cycle_indices().len());
        prop_assert_eq!(listed, brute_force_cycles(&g));
    }

    #[test]
    fn relabeling_preserves_invariants(
        (g, perm) in graph(5, 2).prop_flat_map(|g| { let n = g.vertex_count(); (Just(g), permutation(n)) })
    ) {
        let h = g.permuted(&perm);
        prop_assert_eq!(canonical_form(&h).unwrap(), canonical_form(&g).unwrap());
        prop_assert!(graph_iso(&g, &h).unwrap());
        prop_assert_eq!(h.is_purely_infinite_simple(), g.is_purely_infinite_simple());
        let (kg, kh) = (k0_data(&g).unwrap(), k0_data(&h).unwrap());
        prop_assert_eq!(&kg.group, &kh.group);
        prop_assert!(pointed_iso(&kg, &kh).unwrap());
    }

    #[test]
    fn graph_json_round_trip(g in graph(4, 3)) {
        let text = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn moves_preserve_pointed_k0(g in graph(3, 2)) {
        let bounds = SearchBounds { max_vertices: 5, max_multiplicity: i64::MAX, max_steps: 1 };
        let k = k0_data(&g).unwrap();
        for (step, h) in neighbors(&g, &bounds) {
            prop_assert!(pointed_iso(&k, &k0_data(&h).unwrap()).unwrap(), "{}", step);
        }
    }
}
