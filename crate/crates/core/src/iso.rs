//! Canonical forms and isomorphism testing for small multigraphs.

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::matrix::IntMatrix;

/// Largest vertex count accepted by [`canonical_form`].
pub const CANONICAL_CAP: usize = 8;

/// The lexicographically least incidence matrix (row-major) over all
/// vertex orderings.
pub fn canonical_form(g: &MultiGraph) -> Result<IntMatrix> {
    Ok(canonical_labeling(g)?.0)
}

/// The canonical matrix together with a vertex order producing it:
/// canonical row `i` is vertex `perm[i]` of `g`.
pub fn canonical_labeling(g: &MultiGraph) -> Result<(IntMatrix, Vec<usize>)> {
    let n = g.vertex_count();
    if n > CANONICAL_CAP {
        return Err(Error::CapExceeded {
            what: "canonical form vertex count",
            size: n as u128,
            cap: CANONICAL_CAP as u128,
        });
    }
    let a = g.incidence();
    let mut best: Option<(Vec<i64>, Vec<usize>)> = None;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(a, n, &mut perm, &mut used, &mut best);
    let (entries, perm) = best.expect("at least one ordering");
    Ok((IntMatrix::from_vec(n, n, entries)?, perm))
}

/// Depth-first over orderings. After `k` vertices are placed, only the
/// first `k` entries of row 0 are a fixed row-major prefix; branches whose
/// prefix already exceeds the incumbent's are cut.
fn search(
    a: &IntMatrix,
    n: usize,
    perm: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<(Vec<i64>, Vec<usize>)>,
) {
    let k = perm.len();
    if let Some((b, _)) = best {
        let mine = perm.iter().map(|&p| a[(perm[0], p)]);
        if mine.cmp(b[..k].iter().copied()) == std::cmp::Ordering::Greater {
            return;
        }
    }
    if k == n {
        let entries: Vec<i64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(perm[i], perm[j])])
            .collect();
        if best.as_ref().is_none_or(|(b, _)| entries < *b) {
            *best = Some((entries, perm.clone()));
        }
        return;
    }
    for v in 0..n {
        if !used[v] {
            used[v] = true;
            perm.push(v);
            search(a, n, perm, used, best);
            perm.pop();
            used[v] = false;
        }
    }
}

/// Per-vertex data preserved by isomorphisms, used to prune matching.
fn vertex_signature(g: &MultiGraph, v: usize) -> (i64, i64, i64, Vec<i64>, Vec<i64>) {
    let mut out = g.out_row(v).to_vec();
    out.sort_unstable();
    let mut inc = g.in_column(v);
    inc.sort_unstable();
    (g.out_degree(v), inc.iter().sum(), g.mult(v, v), out, inc)
}

/// Isomorphism test by backtracking over signature-compatible assignments.
/// Works for any vertex count.
pub fn graph_iso(g1: &MultiGraph, g2: &MultiGraph) -> Result<bool> {
    Ok(find_isomorphism(g1, g2).is_some())
}

/// A bijection `map` with `g1.mult(i, j) == g2.mult(map[i], map[j])`.
pub fn find_isomorphism(g1: &MultiGraph, g2: &MultiGraph) -> Option<Vec<usize>> {
    let n = g1.vertex_count();
    if n != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let s1: Vec<_> = (0..n).map(|v| vertex_signature(g1, v)).collect();
    let s2: Vec<_> = (0..n).map(|v| vertex_signature(g2, v)).collect();
    let mut sorted1 = s1.clone();
    let mut sorted2 = s2.clone();
    sorted1.sort();
    sorted2.sort();
    if sorted1 != sorted2 {
        return None;
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..n).filter(|&w| s1[v] == s2[w]).collect())
        .collect();
    // most constrained vertices first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| candidates[v].len());
    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    if extend(g1, g2, &order, 0, &candidates, &mut map, &mut taken) {
        Some(map)
    } else {
        None
    }
}

fn extend(
    g1: &MultiGraph,
    g2: &MultiGraph,
    order: &[usize],
    depth: usize,
    candidates: &[Vec<usize>],
    map: &mut [usize],
    taken: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for &w in &candidates[v] {
        if taken[w] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&u| {
            g1.mult(u, v) == g2.mult(map[u], w) && g1.mult(v, u) == g2.mult(w, map[u])
        }) && g1.mult(v, v) == g2.mult(w, w);
        if !consistent {
            continue;
        }
        map[v] = w;
        taken[w] = true;
        if extend(g1, g2, order, depth + 1, candidates, map, taken) {
            return true;
        }
        taken[w] = false;
        map[v] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g<R: AsRef<[i64]>>(rows: &[R]) -> MultiGraph {
        MultiGraph::from_incidence(&IntMatrix::from_rows(rows), None).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        permutations(n - 1)
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    q
                })
            })
            .collect()
    }

    fn naive_canonical(g: &MultiGraph) -> IntMatrix {
        permutations(g.vertex_count())
            .into_iter()
            .map(|p| g.permuted(&p).incidence().clone())
            .min_by(|a, b| a.entries().cmp(b.entries()))
            .unwrap()
    }

    #[test]
    fn examples() {
        let s2 = MultiGraph::builtin("S2", &[]).unwrap();
        assert_eq!(canonical_form(&s2).unwrap(), canonical_form(&s2.permuted(&[1, 0])).unwrap());
        let swap = g(&[[0, 1], [1, 0]]);
        assert_eq!(canonical_form(&swap).unwrap(), IntMatrix::from_rows(&[[0, 1], [1, 0]]));
        assert_eq!(
            canonical_form(&g(&[[2, 0], [1, 0]])).unwrap(),
            canonical_form(&g(&[[0, 1], [0, 2]])).unwrap()
        );
    }

    #[test]
    fn iso_examples() {
        let e16 = g(&[[0, 1, 1], [1, 0, 1], [1, 1, 0]]);
        assert!(graph_iso(&e16, &e16.permuted(&[1, 2, 0])).unwrap());
        let r2 = MultiGraph::builtin("R_n", &[2]).unwrap();
        let r3 = MultiGraph::builtin("R_n", &[3]).unwrap();
        assert!(!graph_iso(&r2, &r3).unwrap());
        assert!(!graph_iso(&r2, &e16).unwrap());
    }

    #[test]
    fn matches_naive_canonical_form() {
        // all 3-vertex 0/1 matrices, plus a sample with multiplicities
        for bits in 0u32..512 {
            let a: Vec<i64> = (0..9).map(|i| ((bits >> i) & 1) as i64).collect();
            let graph = MultiGraph::from_incidence(&IntMatrix::from_vec(3, 3, a).unwrap(), None).unwrap();
            let canon = canonical_form(&graph).unwrap();
            assert_eq!(canon, naive_canonical(&graph));
            for p in permutations(3) {
                let other = graph.permuted(&p);
                assert_eq!(canonical_form(&other).unwrap(), canon);
                assert!(graph_iso(&graph, &other).unwrap());
            }
        }
        let mut seed = 7u64;
        for _ in 0..300 {
            let entries: Vec<i64> = (0..16)
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((seed >> 33) % 3) as i64
                })
                .collect();
            let graph = MultiGraph::from_incidence(&IntMatrix::from_vec(4, 4, entries).unwrap(), None).unwrap();
            assert_eq!(canonical_form(&graph).unwrap(), naive_canonical(&graph));
        }
    }

    #[test]
    fn iso_agrees_with_canonical_forms() {
        let mut graphs = Vec::new();
        for bits in (0u32..512).step_by(7) {
            let a: Vec<i64> = (0..9).map(|i| ((bits >> i) & 1) as i64).collect();
            graphs.push(MultiGraph::from_incidence(&IntMatrix::from_vec(3, 3, a).unwrap(), None).unwrap());
        }
        for x in &graphs {
            for y in &graphs {
                assert_eq!(
                    graph_iso(x, y).unwrap(),
                    canonical_form(x).unwrap() == canonical_form(y).unwrap()
                );
            }
        }
    }

    #[test]
    fn labeling_reproduces_form() {
        let graph = g(&[[0, 2, 1], [1, 0, 0], [0, 1, 1]]);
        let (canon, perm) = canonical_labeling(&graph).unwrap();
        assert_eq!(graph.permuted(&perm).incidence(), &canon);
    }

    #[test]
    fn cap() {
        let big = MultiGraph::from_incidence(&IntMatrix::identity(9), None).unwrap();
        assert!(matches!(canonical_form(&big), Err(Error::CapExceeded { .. })));
        assert!(graph_iso(&big, &big).unwrap());
    }
}
