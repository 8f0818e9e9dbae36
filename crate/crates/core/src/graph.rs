//! Finite directed multigraphs, their incidence matrices, and the structural
//! predicates (cofinality, Condition (L), Condition (Sing)) that characterize
//! purely infinite simple Leavitt path algebras.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A finite directed graph with parallel edges and loops.
///
/// Parallel edges are stored as multiplicities: `incidence()[(i, j)]` is the
/// number of edges from vertex `i` to vertex `j`. The vertex order fixes the
/// row and column order of every matrix derived from the graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    names: Vec<String>,
    adj: IntMatrix,
}

impl MultiGraph {
    pub fn new(names: Vec<String>, adj: IntMatrix) -> Result<Self> {
        let n = adj.require_square()?;
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if names.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} vertex names for a {n}x{n} incidence matrix",
                names.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let value = adj[(i, j)];
                if value < 0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
            }
        }
        Ok(MultiGraph { names, adj })
    }

    /// Graph whose incidence matrix is `a`; vertices default to `v1..vn`.
    pub fn from_incidence(a: &IntMatrix, names: Option<Vec<String>>) -> Result<Self> {
        let n = a.require_square()?;
        let names = names.unwrap_or_else(|| default_names(n));
        Self::new(names, a.clone())
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// The incidence matrix `A_E`: entry `(i, j)` counts edges from `v_i` to `v_j`.
    pub fn incidence(&self) -> &IntMatrix {
        &self.adj
    }

    pub fn mult(&self, from: usize, to: usize) -> i64 {
        self.adj[(from, to)]
    }

    pub fn out_row(&self, v: usize) -> &[i64] {
        self.adj.row(v)
    }

    pub fn out_degree(&self, v: usize) -> i64 {
        self.adj.row(v).iter().sum()
    }

    pub fn in_column(&self, v: usize) -> Vec<i64> {
        (0..self.vertex_count()).map(|u| self.adj[(u, v)]).collect()
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.adj.row(v).iter().all(|&m| m == 0)
    }

    pub fn is_source(&self, v: usize) -> bool {
        (0..self.vertex_count()).all(|u| self.adj[(u, v)] == 0)
    }

    pub fn edge_count(&self) -> i64 {
        self.adj.entries().iter().sum()
    }

    pub fn max_multiplicity(&self) -> i64 {
        self.adj.entries().iter().copied().max().unwrap_or(0)
    }

    /// The same graph with vertices reordered: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> MultiGraph {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n);
        let mut adj = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                adj[(i, j)] = self.adj[(perm[i], perm[j])];
            }
        }
        MultiGraph {
            names: perm.iter().map(|&p| self.names[p].clone()).collect(),
            adj,
        }
    }

    /// A copy with the given vertex names (same order, same edges).
    pub fn renamed(&self, names: Vec<String>) -> Result<MultiGraph> {
        MultiGraph::new(names, self.adj.clone())
    }

    /// Forward reachability by paths of length >= 1: `reach[u][v]` is true
    /// when `u` connects to `v` through at least one edge.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        (0..n)
            .map(|start| {
                let mut seen = vec![false; n];
                let mut stack: Vec<usize> = (0..n).filter(|&j| self.adj[(start, j)] > 0).collect();
                for &j in &stack {
                    seen[j] = true;
                }
                while let Some(u) = stack.pop() {
                    for j in 0..n {
                        if self.adj[(u, j)] > 0 && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// Vertices lying on at least one cycle.
    pub fn cycle_vertices(&self) -> Vec<bool> {
        let reach = self.reachability();
        (0..self.vertex_count()).map(|v| reach[v][v]).collect()
    }

    /// All vertex-simple cycles, each listed once starting from its smallest
    /// vertex index. Parallel edges do not produce distinct cycles.
    pub fn cycle_indices(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut on_path = vec![false; n];
        for start in 0..n {
            path.push(start);
            on_path[start] = true;
            self.extend_cycles(start, start, &mut path, &mut on_path, &mut out);
            on_path[start] = false;
            path.pop();
        }
        out.sort();
        out
    }

    fn extend_cycles(
        &self,
        start: usize,
        at: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        for next in start..self.vertex_count() {
            if self.adj[(at, next)] == 0 {
                continue;
            }
            if next == start {
                out.push(path.clone());
            } else if !on_path[next] {
                on_path[next] = true;
                path.push(next);
                self.extend_cycles(start, next, path, on_path, out);
                path.pop();
                on_path[next] = false;
            }
        }
    }

    /// All cycles as vertex-name sequences (see [`MultiGraph::cycle_indices`]).
    pub fn cycles(&self) -> Vec<Vec<String>> {
        self.cycle_indices()
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.names[i].clone()).collect())
            .collect()
    }

    /// Smallest hereditary saturated set containing `seed`, by index.
    pub fn hs_closure_indices(&self, seed: &[usize]) -> Vec<bool> {
        let n = self.vertex_count();
        let mut inside = vec![false; n];
        for &v in seed {
            inside[v] = true;
        }
        let reach = self.reachability();
        loop {
            let mut changed = false;
            for u in 0..n {
                if inside[u] {
                    for v in 0..n {
                        if reach[u][v] && !inside[v] {
                            inside[v] = true;
                            changed = true;
                        }
                    }
                }
            }
            for v in 0..n {
                if !inside[v]
                    && !self.is_sink(v)
                    && (0..n).all(|u| self.adj[(v, u)] == 0 || inside[u])
                {
                    inside[v] = true;
                    changed = true;
                }
            }
            if !changed {
                return inside;
            }
        }
    }

    /// Smallest hereditary saturated superset of the named vertices, in vertex order.
    pub fn hs_closure<S: AsRef<str>>(&self, seed: &[S]) -> Result<Vec<String>> {
        let idx = seed
            .iter()
            .map(|s| self.index_of(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let inside = self.hs_closure_indices(&idx);
        Ok(self
            .names
            .iter()
            .zip(inside)
            .filter(|(_, keep)| *keep)
            .map(|(n, _)| n.clone())
            .collect())
    }

    /// Every cycle has an exit. A cycle without an exit consists only of
    /// vertices emitting exactly one edge, so it is found by following the
    /// unique out-edge from each such vertex.
    pub fn satisfies_condition_l(&self) -> bool {
        let n = self.vertex_count();
        let successor = |v: usize| -> Option<usize> {
            if self.out_degree(v) == 1 {
                (0..n).find(|&j| self.adj[(v, j)] == 1)
            } else {
                None
            }
        };
        (0..n).all(|start| {
            let mut at = start;
            for _ in 0..n {
                match successor(at) {
                    Some(next) if next == start => return false,
                    Some(next) => at = next,
                    None => return true,
                }
            }
            true
        })
    }

    pub fn satisfies_condition_sing(&self) -> bool {
        self.adj.entries().iter().all(|&m| m <= 1)
    }

    pub fn is_cofinal(&self) -> bool {
        let n = self.vertex_count();
        (0..n).all(|v| self.hs_closure_indices(&[v]).iter().all(|&x| x))
    }

    pub fn all_connect_to_cycle(&self) -> bool {
        let reach = self.reachability();
        let n = self.vertex_count();
        let on_cycle: Vec<bool> = (0..n).map(|v| reach[v][v]).collect();
        (0..n).all(|v| on_cycle[v] || (0..n).any(|c| on_cycle[c] && reach[v][c]))
    }

    pub fn is_purely_infinite_simple(&self) -> bool {
        self.satisfies_condition_l() && self.is_cofinal() && self.all_connect_to_cycle()
    }

    pub fn analyze(&self) -> PropertyReport {
        let n = self.vertex_count();
        let condition_l = self.satisfies_condition_l();
        let cofinal = self.is_cofinal();
        let all_connect_to_cycle = self.all_connect_to_cycle();
        PropertyReport {
            sinks: (0..n)
                .filter(|&v| self.is_sink(v))
                .map(|v| self.names[v].clone())
                .collect(),
            sources: (0..n)
                .filter(|&v| self.is_source(v))
                .map(|v| self.names[v].clone())
                .collect(),
            condition_l,
            condition_sing: self.satisfies_condition_sing(),
            cofinal,
            all_connect_to_cycle,
            purely_infinite_simple: condition_l && cofinal && all_connect_to_cycle,
        }
    }

    /// Graphviz rendering; parallel edges are drawn individually.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for name in &self.names {
            let _ = writeln!(out, "  \"{}\";", escape_dot(name));
        }
        let n = self.vertex_count();
        for i in 0..n {
            for j in 0..n {
                for _ in 0..self.adj[(i, j)] {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -> \"{}\";",
                        escape_dot(&self.names[i]),
                        escape_dot(&self.names[j])
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Builds one of the named graph families.
    ///
    /// * `R_n` (`[n]`): one vertex with `n` loops.
    /// * `R_n_k` (`[n, k]`): a rose `v1` with `n` loops and a vertex `v2`
    ///   emitting `k - 1` edges into it. `k = 1` gives `R_n`.
    /// * `A_n_k` (`[n, k]`): a rose `w` with `n` loops and `k - 1` vertices
    ///   `v1..v(k-1)`, each emitting one edge into `w`.
    /// * `B_n_k` (`[n, k]`): a rose `v1` with `n` loops fed by the line
    ///   `vk -> ... -> v2 -> v1`.
    /// * `R2_hat`: the complete graph on two vertices with loops.
    /// * `S2`: incidence `[[1, 1], [1, 0]]`.
    pub fn builtin(name: &str, params: &[i64]) -> Result<MultiGraph> {
        let want = |count: usize| -> Result<()> {
            if params.len() != count {
                return Err(Error::InvalidParameter(format!(
                    "{name} takes {count} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        let positive = |label: &str, v: i64| -> Result<i64> {
            if v >= 1 {
                Ok(v)
            } else {
                Err(Error::InvalidParameter(format!("{label} must be >= 1, got {v}")))
            }
        };
        match name {
            "R_n" => {
                want(1)?;
                let n = positive("n", params[0])?;
                Ok(rose(n))
            }
            "R_n_k" | "A_n_k" | "B_n_k" => {
                want(2)?;
                let n = positive("n", params[0])?;
                let k = positive("k", params[1])?;
                if k == 1 {
                    return Ok(rose(n));
                }
                Ok(match name {
                    "R_n_k" => rose_with_tail(n, k),
                    "A_n_k" => open_tails(n, k),
                    _ => rose_with_line(n, k),
                })
            }
            "R2_hat" => {
                want(0)?;
                Ok(named(&["v1", "v2"], &[[1, 1], [1, 1]]))
            }
            "S2" => {
                want(0)?;
                Ok(named(&["v1", "v2"], &[[1, 1], [1, 0]]))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown graph family {other:?}"
            ))),
        }
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

fn named<R: AsRef<[i64]>>(names: &[&str], rows: &[R]) -> MultiGraph {
    MultiGraph {
        names: names.iter().map(|s| s.to_string()).collect(),
        adj: IntMatrix::from_rows(rows),
    }
}

fn rose(n: i64) -> MultiGraph {
    named(&["v"], &[[n]])
}

fn rose_with_tail(n: i64, k: i64) -> MultiGraph {
    named(&["v1", "v2"], &[[n, 0], [k - 1, 0]])
}

fn open_tails(n: i64, k: i64) -> MultiGraph {
    let size = k as usize;
    let mut adj = IntMatrix::zeros(size, size);
    adj[(0, 0)] = n;
    for i in 1..size {
        adj[(i, 0)] = 1;
    }
    let mut names = vec!["w".to_string()];
    names.extend((1..size).map(|i| format!("v{i}")));
    MultiGraph { names, adj }
}

fn rose_with_line(n: i64, k: i64) -> MultiGraph {
    let size = k as usize;
    let mut adj = IntMatrix::zeros(size, size);
    adj[(0, 0)] = n;
    for i in 1..size {
        adj[(i, i - 1)] = 1;
    }
    MultiGraph {
        names: default_names(size),
        adj,
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Structural facts about a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub sinks: Vec<String>,
    pub sources: Vec<String>,
    #[serde(rename = "condition_L")]
    pub condition_l: bool,
    #[serde(rename = "condition_Sing")]
    pub condition_sing: bool,
    pub cofinal: bool,
    pub all_connect_to_cycle: bool,
    pub purely_infinite_simple: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<(String, String, i64)>,
}

impl TryFrom<GraphDoc> for MultiGraph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<Self> {
        if doc.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut index = HashMap::new();
        for (i, name) in doc.vertices.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        let n = doc.vertices.len();
        let mut adj = IntMatrix::zeros(n, n);
        for (src, dst, mult) in &doc.edges {
            let i = *index
                .get(src.as_str())
                .ok_or_else(|| Error::UnknownVertex(src.clone()))?;
            let j = *index
                .get(dst.as_str())
                .ok_or_else(|| Error::UnknownVertex(dst.clone()))?;
            if *mult <= 0 {
                return Err(Error::NonPositiveMultiplicity(src.clone(), dst.clone(), *mult));
            }
            if adj[(i, j)] != 0 {
                return Err(Error::DuplicateEdge(src.clone(), dst.clone()));
            }
            adj[(i, j)] = *mult;
        }
        Ok(MultiGraph {
            names: doc.vertices,
            adj,
        })
    }
}

impl From<&MultiGraph> for GraphDoc {
    fn from(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let m = g.adj[(i, j)];
                if m > 0 {
                    edges.push((g.names[i].clone(), g.names[j].clone(), m));
                }
            }
        }
        GraphDoc {
            vertices: g.names.clone(),
            edges,
        }
    }
}

impl Serialize for MultiGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = GraphDoc::deserialize(d)?;
        MultiGraph::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Debug for MultiGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiGraph")
            .field("vertices", &self.names)
            .field("incidence", &self.adj)
            .finish()
    }
}

/// Parses the graph JSON document `{"vertices": [...], "edges": [[src, dst, mult], ...]}`.
pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    MultiGraph::try_from(doc)
}
