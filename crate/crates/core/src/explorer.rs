//! Exhaustive enumeration of small purely infinite simple graphs, their
//! partition by pointed K0, and bounded search for move chains.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::iso::{canonical_form, CANONICAL_CAP};
use crate::k0::{k0_data, pointed_iso, PointedK0};
use crate::matrix::IntMatrix;
use crate::moves::{
    amalgamate_applicable_idx, amalgamate_idx, counts_to_spec, outsplit_idx, shift_applicable_idx, shift_idx, unshift_applicable_idx,
    unshift_idx, MoveCertificate, MoveStep,
};

/// Largest vertex count accepted by [`enumerate_pis_sing`].
pub const ENUMERATION_CAP: usize = 4;

/// The graph with incidence `canonical_form(g)` and vertices `v1..vn`.
pub fn canonical_graph(g: &MultiGraph) -> Result<MultiGraph> {
    MultiGraph::from_incidence(&canonical_form(g)?, None)
}

/// All purely infinite simple graphs on `n` vertices without parallel
/// edges, one per isomorphism class, sorted by canonical matrix.
pub fn enumerate_pis_sing(n: usize) -> Result<Vec<MultiGraph>> {
    if n == 0 {
        return Err(Error::InvalidParameter("vertex count must be >= 1".into()));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "enumeration vertex count",
            size: n as u128,
            cap: ENUMERATION_CAP as u128,
        });
    }
    let cells = n * n;
    let mut seen = BTreeSet::new();
    for bits in 0u32..(1u32 << cells) {
        let entries: Vec<i64> = (0..cells).map(|i| ((bits >> i) & 1) as i64).collect();
        let g = MultiGraph::from_incidence(&IntMatrix::from_vec(n, n, entries)?, None)?;
        if g.is_purely_infinite_simple() {
            seen.insert(canonical_form(&g)?);
        }
    }
    seen.into_iter()
        .map(|a| MultiGraph::from_incidence(&a, None))
        .collect()
}

/// One pointed-K0 class: the data of its representative and its members
/// in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K0Class {
    pub k0: PointedK0,
    pub representative: MultiGraph,
    pub graphs: Vec<MultiGraph>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationTable {
    pub classes: Vec<K0Class>,
}

impl ClassificationTable {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.graphs.len()).collect()
    }
}

/// Partitions `graphs` by pointed K0. Classes are ordered by rank, then
/// invariant factors, then representative; each class's representative is
/// its smallest canonical member.
pub fn classify(graphs: &[MultiGraph]) -> Result<ClassificationTable> {
    let mut items: Vec<(IntMatrix, MultiGraph, PointedK0)> = graphs
        .iter()
        .map(|g| {
            let canon = canonical_form(g)?;
            let cg = MultiGraph::from_incidence(&canon, None)?;
            let k = k0_data(&cg)?;
            Ok((canon, cg, k))
        })
        .collect::<Result<_>>()?;
    items.sort_by(|a, b| a.0.entries().cmp(b.0.entries()).then(a.0.rows().cmp(&b.0.rows())));

    let mut classes: Vec<(IntMatrix, K0Class)> = Vec::new();
    for (canon, g, k) in items {
        let mut home = None;
        for (i, (_, class)) in classes.iter().enumerate() {
            if pointed_iso(&class.k0, &k)? {
                home = Some(i);
                break;
            }
        }
        match home {
            Some(i) => classes[i].1.graphs.push(g),
            None => classes.push((
                canon,
                K0Class {
                    k0: k,
                    representative: g.clone(),
                    graphs: vec![g],
                },
            )),
        }
    }
    classes.sort_by(|(ca, a), (cb, b)| {
        (a.k0.group.free_rank, &a.k0.group.invariant_factors)
            .cmp(&(b.k0.group.free_rank, &b.k0.group.invariant_factors))
            .then(ca.rows().cmp(&cb.rows()))
            .then(ca.entries().cmp(cb.entries()))
    });
    Ok(ClassificationTable {
        classes: classes.into_iter().map(|(_, c)| c).collect(),
    })
}

/// Limits for [`find_path`]; every intermediate graph must respect the
/// vertex and multiplicity bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_vertices: usize,
    pub max_multiplicity: i64,
    pub max_steps: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_vertices: 5,
            max_multiplicity: 4,
            max_steps: 20,
        }
    }
}

impl SearchBounds {
    fn validate(&self) -> Result<()> {
        if self.max_vertices == 0 || self.max_multiplicity < 1 || self.max_steps == 0 {
            return Err(Error::InvalidParameter("search bounds must be positive".into()));
        }
        if self.max_vertices > CANONICAL_CAP {
            return Err(Error::CapExceeded {
                what: "search vertex bound",
                size: self.max_vertices as u128,
                cap: CANONICAL_CAP as u128,
            });
        }
        Ok(())
    }

    fn admits(&self, g: &MultiGraph) -> bool {
        g.vertex_count() <= self.max_vertices && g.max_multiplicity() <= self.max_multiplicity
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSearch {
    Found(MoveCertificate),
    NotFound { found: bool, reason: String },
}

impl PathSearch {
    fn not_found(reason: impl Into<String>) -> Self {
        PathSearch::NotFound {
            found: false,
            reason: reason.into(),
        }
    }

    pub fn certificate(&self) -> Option<&MoveCertificate> {
        match self {
            PathSearch::Found(c) => Some(c),
            PathSearch::NotFound { .. } => None,
        }
    }
}

/// Unordered partitions of the count vector `row` into exactly `parts`
/// nonzero vectors, each listed with classes in nonincreasing
/// lexicographic order.
fn vector_partitions(row: &[i64], parts: usize) -> Vec<Vec<Vec<i64>>> {
    fn go(remaining: &[i64], parts: usize, cap: Option<&[i64]>, acc: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if parts == 1 {
            if remaining.iter().any(|&c| c > 0) && cap.is_none_or(|c| remaining <= c) {
                acc.push(remaining.to_vec());
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        // candidate classes in decreasing lexicographic order
        let mut class = remaining.to_vec();
        loop {
            let nonzero = class.iter().any(|&c| c > 0);
            let rest: Vec<i64> = remaining.iter().zip(&class).map(|(r, c)| r - c).collect();
            if nonzero && cap.is_none_or(|c| class.as_slice() <= c) && rest.iter().any(|&c| c > 0) {
                acc.push(class.clone());
                let prev = acc.last().unwrap().clone();
                go(&rest, parts - 1, Some(&prev), acc, out);
                acc.pop();
            }
            // decrement like an odometer, most significant position first
            let mut i = class.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if class[i] > 0 {
                    class[i] -= 1;
                    class[i + 1..].copy_from_slice(&remaining[i + 1..]);
                    break;
                }
            }
        }
    }
    let mut out = Vec::new();
    go(row, parts, None, &mut Vec::new(), &mut out);
    out
}

/// Every move from `g` whose result stays within `bounds`, in the fixed
/// order shift, unshift, out-split, amalgamation.
pub fn neighbors(g: &MultiGraph, bounds: &SearchBounds) -> Vec<(MoveStep, MultiGraph)> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let keep = |step: MoveStep, h: MultiGraph, out: &mut Vec<(MoveStep, MultiGraph)>| {
        if bounds.admits(&h) {
            out.push((step, h));
        }
    };
    for v in 0..n {
        for w in 0..n {
            if shift_applicable_idx(g, v, w) {
                keep(MoveStep::shift(g.name(v), g.name(w)), shift_idx(g, v, w), &mut out);
            }
        }
    }
    for v in 0..n {
        for w in 0..n {
            if unshift_applicable_idx(g, v, w) {
                if let Ok(h) = unshift_idx(g, v, w) {
                    keep(MoveStep::unshift(g.name(v), g.name(w)), h, &mut out);
                }
            }
        }
    }
    if n < bounds.max_vertices {
        for x in 0..n {
            let degree = g.out_degree(x);
            let most = ((bounds.max_vertices - n + 1) as i64).min(degree);
            for parts in 2..=most {
                for classes in vector_partitions(g.out_row(x), parts as usize) {
                    if let Ok(h) = outsplit_idx(g, x, &classes) {
                        keep(MoveStep::Outsplit(counts_to_spec(g, x, &classes)), h, &mut out);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in (0..n).filter(|&v| !g.is_sink(v)) {
        let col = g.in_column(v);
        match groups.iter_mut().find(|grp| g.in_column(grp[0]) == col) {
            Some(grp) => grp.push(v),
            None => groups.push(vec![v]),
        }
    }
    for grp in groups.iter().filter(|grp| grp.len() >= 2) {
        for mask in 1u32..(1 << grp.len()) {
            if mask.count_ones() < 2 {
                continue;
            }
            let members: Vec<usize> = (0..grp.len()).filter(|i| mask >> i & 1 == 1).map(|i| grp[i]).collect();
            if !amalgamate_applicable_idx(g, &members) {
                continue;
            }
            if let Ok(h) = amalgamate_idx(g, &members) {
                let names: Vec<&str> = members.iter().map(|&m| g.name(m)).collect();
                keep(MoveStep::amalgamate(names), h, &mut out);
            }
        }
    }
    out
}

struct Expansion {
    canon: IntMatrix,
    step: MoveStep,
    graph: MultiGraph,
}

fn expand_frontier(
    frontier: &[IntMatrix],
    graphs: &HashMap<IntMatrix, MultiGraph>,
    bounds: &SearchBounds,
    parallel: bool,
) -> Result<Vec<(IntMatrix, Vec<Expansion>)>> {
    let work = |c: &IntMatrix| -> Result<(IntMatrix, Vec<Expansion>)> {
        let g = &graphs[c];
        let next = neighbors(g, bounds)
            .into_iter()
            .map(|(step, graph)| {
                Ok(Expansion {
                    canon: canonical_form(&graph)?,
                    step,
                    graph,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((c.clone(), next))
    };
    if parallel {
        frontier.par_iter().map(work).collect()
    } else {
        frontier.iter().map(work).collect()
    }
}

/// One side of the bidirectional search.
struct Side {
    /// canonical state -> (parent state, move from the parent's graph)
    parent: HashMap<IntMatrix, Option<(IntMatrix, MoveStep)>>,
    /// canonical state -> labeled graph reached by replaying parent moves
    graph: HashMap<IntMatrix, MultiGraph>,
    depth: HashMap<IntMatrix, usize>,
    frontier: Vec<IntMatrix>,
    level: usize,
}

impl Side {
    fn new(start: &MultiGraph) -> Result<Self> {
        let c = canonical_form(start)?;
        Ok(Side {
            parent: HashMap::from([(c.clone(), None)]),
            graph: HashMap::from([(c.clone(), start.clone())]),
            depth: HashMap::from([(c.clone(), 0)]),
            frontier: vec![c],
            level: 0,
        })
    }

    fn path_to(&self, mut c: IntMatrix) -> Vec<MoveStep> {
        let mut steps = Vec::new();
        while let Some(Some((p, step))) = self.parent.get(&c) {
            steps.push(step.clone());
            c = p.clone();
        }
        steps.reverse();
        steps
    }
}

/// Searches for a chain of moves from `g1` to a graph isomorphic to `g2`.
///
/// Breadth-first from both ends over canonical forms; moves are closed
/// under inversion, so the search from `g2` explores the same neighbor
/// relation. Exhausting the bounds is reported as not found, which says
/// nothing about whether a longer or wider chain exists.
pub fn find_path(g1: &MultiGraph, g2: &MultiGraph, bounds: &SearchBounds, parallel: bool) -> Result<PathSearch> {
    bounds.validate()?;
    let (k1, k2) = (k0_data(g1)?, k0_data(g2)?);
    if !pointed_iso(&k1, &k2)? {
        return Ok(PathSearch::not_found("invariant mismatch"));
    }
    let mut fwd = Side::new(g1)?;
    let mut bwd = Side::new(g2)?;
    let mut meet = fwd.frontier.iter().find(|c| bwd.parent.contains_key(c)).cloned();

    while meet.is_none() {
        if fwd.level + bwd.level >= bounds.max_steps {
            return Ok(PathSearch::not_found(format!(
                "no chain within {} steps under the given bounds",
                bounds.max_steps
            )));
        }
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            return Ok(PathSearch::not_found(
                "search space exhausted under the given bounds",
            ));
        }
        let forward = fwd.frontier.len() <= bwd.frontier.len();
        let (side, other) = if forward { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };
        let expanded = expand_frontier(&side.frontier, &side.graph, bounds, parallel)?;
        side.level += 1;
        let mut next = Vec::new();
        'merge: for (from, items) in expanded {
            for e in items {
                if side.parent.contains_key(&e.canon) {
                    continue;
                }
                side.parent.insert(e.canon.clone(), Some((from.clone(), e.step)));
                side.graph.insert(e.canon.clone(), e.graph);
                side.depth.insert(e.canon.clone(), side.level);
                if other.parent.contains_key(&e.canon) {
                    meet = Some(e.canon);
                    break 'merge;
                }
                next.push(e.canon);
            }
        }
        side.frontier = next;
    }

    let meet = meet.expect("loop exits on a meeting state");
    let mut builder_steps = fwd.path_to(meet.clone());
    let mut current = builder_steps
        .iter()
        .try_fold(g1.clone(), |g, s| s.apply(&g))?;
    // walk back toward g2 along decreasing backward depth
    let mut depth = bwd.depth[&meet];
    while depth > 0 {
        let wanted = |c: &IntMatrix| bwd.depth.get(c) == Some(&(depth - 1));
        let mut advanced = false;
        for (step, h) in neighbors(&current, bounds) {
            if wanted(&canonical_form(&h)?) {
                builder_steps.push(step);
                current = h;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(Error::Construction("backward chain could not be followed".into()));
        }
        depth -= 1;
    }
    Ok(PathSearch::Found(MoveCertificate {
        source: g1.clone(),
        steps: builder_steps,
        target: g2.clone(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::verify_certificate;

    fn g<R: AsRef<[i64]>>(rows: &[R]) -> MultiGraph {
        MultiGraph::from_incidence(&IntMatrix::from_rows(rows), None).unwrap()
    }

    #[test]
    fn partitions_of_small_rows() {
        let p = vector_partitions(&[2], 2);
        assert_eq!(p, vec![vec![vec![1], vec![1]]]);
        // {a, a, b}: {aa|b}, {ab|a}
        assert_eq!(vector_partitions(&[2, 1], 2).len(), 2);
        assert_eq!(vector_partitions(&[1, 1, 1], 2).len(), 3);
        assert_eq!(vector_partitions(&[1, 1, 1], 3).len(), 1);
        assert!(vector_partitions(&[1, 0], 2).is_empty());
        for parts in vector_partitions(&[2, 2, 1], 3) {
            let total: Vec<i64> = (0..3).map(|j| parts.iter().map(|c| c[j]).sum()).collect();
            assert_eq!(total, vec![2, 2, 1]);
            assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn enumeration_counts() {
        assert!(enumerate_pis_sing(1).unwrap().is_empty());
        // R2_hat and S2; a double loop is a pair of parallel edges
        let two = enumerate_pis_sing(2).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().any(|g| crate::iso::graph_iso(g, &MultiGraph::builtin("S2", &[]).unwrap()).unwrap()));
        assert!(two.iter().any(|g| crate::iso::graph_iso(g, &MultiGraph::builtin("R2_hat", &[]).unwrap()).unwrap()));
        assert!(matches!(enumerate_pis_sing(5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn classify_two_vertices() {
        let table = classify(&enumerate_pis_sing(2).unwrap()).unwrap();
        assert_eq!(table.sizes(), vec![2]);
        assert!(table.classes[0].k0.group.is_trivial());
        assert!(classify(&[]).unwrap().classes.is_empty());
    }

    #[test]
    fn classify_is_order_independent() {
        let mut graphs = enumerate_pis_sing(2).unwrap();
        graphs.push(MultiGraph::builtin("R_n", &[3]).unwrap());
        let a = classify(&graphs).unwrap();
        graphs.reverse();
        assert_eq!(classify(&graphs).unwrap(), a);
    }

    #[test]
    fn find_path_examples() {
        let s2 = MultiGraph::builtin("S2", &[]).unwrap();
        let r22 = MultiGraph::builtin("R_n_k", &[2, 2]).unwrap();
        let bounds = SearchBounds {
            max_vertices: 3,
            max_multiplicity: 3,
            max_steps: 4,
        };
        let found = find_path(&s2, &r22, &bounds, false).unwrap();
        let cert = found.certificate().expect("path");
        assert_eq!(cert.steps.len(), 1);
        assert!(verify_certificate(cert, false).valid);

        let r3 = MultiGraph::builtin("R_n", &[3]).unwrap();
        match find_path(&s2, &r3, &bounds, false).unwrap() {
            PathSearch::NotFound { reason, .. } => assert_eq!(reason, "invariant mismatch"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn find_path_between_three_vertex_graphs() {
        let e61 = g(&[[1, 1, 0], [0, 0, 1], [1, 1, 1]]);
        let e171 = g(&[[0, 1, 1], [0, 1, 1], [0, 1, 1]]);
        let bounds = SearchBounds {
            max_vertices: 4,
            max_multiplicity: 3,
            max_steps: 12,
        };
        for parallel in [false, true] {
            let found = find_path(&e61, &e171, &bounds, parallel).unwrap();
            let cert = found.certificate().expect("path");
            assert!(verify_certificate(cert, false).valid);
        }
    }

    #[test]
    fn parallel_search_is_deterministic() {
        let a = g(&[[1, 1, 0], [0, 0, 1], [1, 1, 1]]);
        let b = MultiGraph::builtin("R_n", &[2]).unwrap();
        let bounds = SearchBounds {
            max_vertices: 4,
            max_multiplicity: 3,
            max_steps: 10,
        };
        assert_eq!(
            find_path(&a, &b, &bounds, false).unwrap(),
            find_path(&a, &b, &bounds, true).unwrap()
        );
    }

    #[test]
    fn exhaustion_is_not_nonexistence() {
        let a = g(&[[1, 1, 0], [0, 0, 1], [1, 1, 1]]);
        let b = g(&[[0, 1, 1], [0, 1, 1], [0, 1, 1]]);
        let tight = SearchBounds {
            max_vertices: 3,
            max_multiplicity: 1,
            max_steps: 1,
        };
        match find_path(&a, &b, &tight, false).unwrap() {
            PathSearch::NotFound { found, reason } => {
                assert!(!found);
                assert_ne!(reason, "invariant mismatch");
            }
            PathSearch::Found(c) => assert!(c.steps.len() <= 1),
        }
    }
}
