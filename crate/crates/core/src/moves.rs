//! Graph moves that preserve the Leavitt path algebra: shifts, out-splits,
//! and their inverses, plus certificates chaining them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::iso::graph_iso;
use crate::k0::{k0_data, pointed_iso, PointedK0};
use crate::matrix::IntMatrix;

/// How the out-edges of one vertex are divided for an out-split.
///
/// Each class maps range vertices to edge counts; the classes must be
/// nonempty and add up to the vertex's out-row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub vertex: String,
    pub classes: Vec<BTreeMap<String, i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MoveStep {
    /// Move the out-edges of `w` off `v`, leaving one edge `v -> w`.
    Shift { v: String, w: String },
    /// Inverse of [`MoveStep::Shift`]: replace one edge `v -> w` by a copy
    /// of the out-edges of `w`.
    Unshift { v: String, w: String },
    Outsplit(PartitionSpec),
    /// Inverse of [`MoveStep::Outsplit`]: merge vertices with identical
    /// in-columns.
    Amalgamate { vertices: Vec<String> },
}

impl MoveStep {
    pub fn shift(v: impl Into<String>, w: impl Into<String>) -> Self {
        MoveStep::Shift {
            v: v.into(),
            w: w.into(),
        }
    }

    pub fn unshift(v: impl Into<String>, w: impl Into<String>) -> Self {
        MoveStep::Unshift {
            v: v.into(),
            w: w.into(),
        }
    }

    pub fn amalgamate<S: Into<String>>(vertices: impl IntoIterator<Item = S>) -> Self {
        MoveStep::Amalgamate {
            vertices: vertices.into_iter().map(Into::into).collect(),
        }
    }

    pub fn apply(&self, g: &MultiGraph) -> Result<MultiGraph> {
        match self {
            MoveStep::Shift { v, w } => apply_shift(g, v, w),
            MoveStep::Unshift { v, w } => apply_unshift(g, v, w),
            MoveStep::Outsplit(spec) => apply_outsplit(g, spec),
            MoveStep::Amalgamate { vertices } => apply_amalgamate(g, vertices),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MoveStep::Shift { .. } => "shift",
            MoveStep::Unshift { .. } => "unshift",
            MoveStep::Outsplit(_) => "outsplit",
            MoveStep::Amalgamate { .. } => "amalgamate",
        }
    }
}

impl fmt::Display for MoveStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveStep::Shift { v, w } => write!(f, "shift({v}, {w})"),
            MoveStep::Unshift { v, w } => write!(f, "unshift({v}, {w})"),
            MoveStep::Outsplit(spec) => write!(f, "outsplit({}, {} classes)", spec.vertex, spec.classes.len()),
            MoveStep::Amalgamate { vertices } => write!(f, "amalgamate({})", vertices.join(", ")),
        }
    }
}

fn distinct_pair(g: &MultiGraph, v: &str, w: &str) -> Result<(usize, usize)> {
    let vi = g.index_of(v)?;
    let wi = g.index_of(w)?;
    if vi == wi {
        return Err(Error::NotApplicable(format!("{v:?} and {w:?} must be distinct")));
    }
    Ok((vi, wi))
}

pub(crate) fn shift_applicable_idx(g: &MultiGraph, v: usize, w: usize) -> bool {
    v != w
        && !g.is_sink(v)
        && !g.is_sink(w)
        && g.out_row(w).iter().zip(g.out_row(v)).all(|(a, b)| a <= b)
}

/// Whether the out-row of `w` fits inside the out-row of `v` (both non-sinks).
pub fn shift_applicable(g: &MultiGraph, v: &str, w: &str) -> Result<bool> {
    let (vi, wi) = distinct_pair(g, v, w)?;
    Ok(shift_applicable_idx(g, vi, wi))
}

pub(crate) fn shift_idx(g: &MultiGraph, v: usize, w: usize) -> MultiGraph {
    let mut a = g.incidence().clone();
    let n = g.vertex_count();
    for j in 0..n {
        a[(v, j)] -= g.mult(w, j);
    }
    a[(v, w)] += 1;
    MultiGraph::new(g.names().to_vec(), a).expect("shift keeps entries nonnegative")
}

/// `row_v <- row_v - row_w + e_w`.
pub fn apply_shift(g: &MultiGraph, v: &str, w: &str) -> Result<MultiGraph> {
    let (vi, wi) = distinct_pair(g, v, w)?;
    if !shift_applicable_idx(g, vi, wi) {
        return Err(Error::NotApplicable(format!(
            "shift({v}, {w}) needs non-sinks with out-row of {w} inside out-row of {v}"
        )));
    }
    Ok(shift_idx(g, vi, wi))
}

pub(crate) fn unshift_applicable_idx(g: &MultiGraph, v: usize, w: usize) -> bool {
    v != w && g.mult(v, w) >= 1 && !g.is_sink(w)
}

pub(crate) fn unshift_idx(g: &MultiGraph, v: usize, w: usize) -> Result<MultiGraph> {
    let mut a = g.incidence().clone();
    for j in 0..g.vertex_count() {
        a[(v, j)] = a[(v, j)]
            .checked_add(g.mult(w, j))
            .ok_or(Error::Overflow("unshift"))?;
    }
    a[(v, w)] -= 1;
    Ok(MultiGraph::new(g.names().to_vec(), a).expect("unshift keeps entries nonnegative"))
}

/// `row_v <- row_v + row_w - e_w`; the inverse of [`apply_shift`].
pub fn apply_unshift(g: &MultiGraph, v: &str, w: &str) -> Result<MultiGraph> {
    let (vi, wi) = distinct_pair(g, v, w)?;
    if g.mult(vi, wi) < 1 {
        return Err(Error::NotApplicable(format!("unshift({v}, {w}) needs an edge {v} -> {w}")));
    }
    if g.is_sink(wi) {
        return Err(Error::NotApplicable(format!("unshift({v}, {w}): {w} is a sink")));
    }
    let out = unshift_idx(g, vi, wi)?;
    if !shift_applicable_idx(&out, vi, wi) || shift_idx(&out, vi, wi) != *g {
        return Err(Error::NotApplicable(format!("unshift({v}, {w}) does not invert a shift")));
    }
    Ok(out)
}

/// `vertex#1 .. vertex#classes`.
pub fn split_names(vertex: &str, classes: usize) -> Vec<String> {
    (1..=classes).map(|i| format!("{vertex}#{i}")).collect()
}

/// Names an out-split of `vertex` into `classes` pieces would use in `g`:
/// `vertex#1 .. vertex#m`, or the first run `vertex#(s+1) .. vertex#(s+m)`
/// whose names are all unused.
pub fn outsplit_names(g: &MultiGraph, vertex: &str, classes: usize) -> Vec<String> {
    (0..)
        .map(|offset| {
            (offset + 1..=offset + classes)
                .map(|i| format!("{vertex}#{i}"))
                .collect::<Vec<_>>()
        })
        .find(|names| names.iter().all(|n| !g.contains(n)))
        .expect("finitely many names are taken")
}

/// Out-split of vertex `x` by count-vector classes (length = vertex count).
pub(crate) fn outsplit_idx(g: &MultiGraph, x: usize, classes: &[Vec<i64>]) -> Result<MultiGraph> {
    let n = g.vertex_count();
    if classes.is_empty() {
        return Err(Error::InvalidPartition("no classes".into()));
    }
    for (i, class) in classes.iter().enumerate() {
        if class.len() != n || class.iter().any(|&c| c < 0) {
            return Err(Error::InvalidPartition(format!("class {} is malformed", i + 1)));
        }
        if class.iter().all(|&c| c == 0) {
            return Err(Error::InvalidPartition(format!("class {} is empty", i + 1)));
        }
    }
    for j in 0..n {
        let total: i64 = classes.iter().map(|c| c[j]).sum();
        if total != g.mult(x, j) {
            return Err(Error::InvalidPartition(format!(
                "classes send {total} edges from {} to {}, graph has {}",
                g.name(x),
                g.name(j),
                g.mult(x, j)
            )));
        }
    }
    let m = classes.len();
    if m == 1 {
        return Ok(g.clone());
    }
    let pieces = outsplit_names(g, g.name(x), m);
    // expansion: new index -> (old index, class index if it is a piece of x)
    let mut origin: Vec<(usize, Option<usize>)> = Vec::with_capacity(n + m - 1);
    let mut names = Vec::with_capacity(n + m - 1);
    for u in 0..n {
        if u == x {
            for (i, piece) in pieces.iter().enumerate() {
                origin.push((u, Some(i)));
                names.push(piece.clone());
            }
        } else {
            origin.push((u, None));
            names.push(g.name(u).to_string());
        }
    }
    let size = origin.len();
    let mut a = IntMatrix::zeros(size, size);
    for (r, &(src, class)) in origin.iter().enumerate() {
        for (c, &(dst, _)) in origin.iter().enumerate() {
            a[(r, c)] = match class {
                Some(i) => classes[i][dst],
                None => g.mult(src, dst),
            };
        }
    }
    MultiGraph::new(names, a)
}

fn spec_to_counts(g: &MultiGraph, spec: &PartitionSpec) -> Result<(usize, Vec<Vec<i64>>)> {
    let x = g.index_of(&spec.vertex)?;
    let counts = spec
        .classes
        .iter()
        .map(|class| {
            let mut row = vec![0; g.vertex_count()];
            for (name, &count) in class {
                let j = g.index_of(name)?;
                if count <= 0 {
                    return Err(Error::InvalidPartition(format!(
                        "count {count} for range vertex {name:?} must be positive"
                    )));
                }
                row[j] = count;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((x, counts))
}

pub(crate) fn counts_to_spec(g: &MultiGraph, x: usize, classes: &[Vec<i64>]) -> PartitionSpec {
    PartitionSpec {
        vertex: g.name(x).to_string(),
        classes: classes
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(j, &c)| (g.name(j).to_string(), c))
                    .collect()
            })
            .collect(),
    }
}

/// Splits `spec.vertex` into `vertex#1 .. vertex#m` (see [`outsplit_names`]),
/// one per class; every other vertex keeps its single class.
pub fn apply_outsplit(g: &MultiGraph, spec: &PartitionSpec) -> Result<MultiGraph> {
    let (x, counts) = spec_to_counts(g, spec)?;
    outsplit_idx(g, x, &counts)
}

/// Name of the vertex produced by merging `members`.
fn merged_name(g: &MultiGraph, members: &[usize]) -> String {
    let first = g.name(members[0]);
    if let Some((base, _)) = first.rsplit_once('#') {
        let expected = split_names(base, members.len());
        let actual: Vec<&str> = members.iter().map(|&i| g.name(i)).collect();
        if actual == expected && !g.contains(base) {
            return base.to_string();
        }
    }
    first.to_string()
}

pub(crate) fn amalgamate_applicable_idx(g: &MultiGraph, members: &[usize]) -> bool {
    if members.len() < 2 {
        return false;
    }
    let col = g.in_column(members[0]);
    members
        .iter()
        .all(|&m| !g.is_sink(m) && g.in_column(m) == col)
}

pub(crate) fn amalgamate_idx(g: &MultiGraph, members: &[usize]) -> Result<MultiGraph> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    for &m in members {
        if std::mem::replace(&mut seen[m], true) {
            return Err(Error::NotApplicable(format!("vertex {:?} listed twice", g.name(m))));
        }
    }
    if members.len() < 2 {
        return Err(Error::NotApplicable("amalgamation needs at least two vertices".into()));
    }
    let col = g.in_column(members[0]);
    for &m in members {
        if g.is_sink(m) {
            return Err(Error::NotApplicable(format!("{:?} is a sink", g.name(m))));
        }
        if g.in_column(m) != col {
            return Err(Error::NotApplicable(format!(
                "in-edges of {:?} and {:?} differ",
                g.name(members[0]),
                g.name(m)
            )));
        }
    }
    let head = members[0];
    // surviving old indices, in order; the merged vertex sits at `head`
    let keep: Vec<usize> = (0..n).filter(|&u| u == head || !seen[u]).collect();
    let size = keep.len();
    let mut a = IntMatrix::zeros(size, size);
    for (r, &src) in keep.iter().enumerate() {
        let sources: Vec<usize> = if src == head { members.to_vec() } else { vec![src] };
        for (c, &dst) in keep.iter().enumerate() {
            a[(r, c)] = sources.iter().map(|&s| g.mult(s, dst)).sum();
        }
    }
    let names = keep
        .iter()
        .map(|&u| {
            if u == head {
                merged_name(g, members)
            } else {
                g.name(u).to_string()
            }
        })
        .collect();
    let merged = MultiGraph::new(names, a)?;

    // re-splitting the merged vertex must give back `g` up to names
    let x = keep.iter().position(|&u| u == head).unwrap();
    let classes: Vec<Vec<i64>> = members
        .iter()
        .map(|&m| keep.iter().map(|&dst| g.mult(m, dst)).collect())
        .collect();
    let back = outsplit_idx(&merged.renamed(placeholder_names(size))?, x, &classes)?;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for &u in &keep {
        if u == head {
            order.extend_from_slice(members);
        } else {
            order.push(u);
        }
    }
    let expected = g.permuted(&order);
    if back.incidence() != expected.incidence() {
        return Err(Error::NotApplicable("amalgamation does not invert an out-split".into()));
    }
    Ok(merged)
}

fn placeholder_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("\u{0}{i}")).collect()
}

/// Merges vertices with identical in-columns into one vertex whose out-row
/// is the sum of theirs. The merged vertex takes the first member's
/// position, and its name is `v` when the members are exactly `v#1 .. v#m`
/// (and `v` is free), otherwise the first member's name.
pub fn apply_amalgamate<S: AsRef<str>>(g: &MultiGraph, vertices: &[S]) -> Result<MultiGraph> {
    let members = vertices
        .iter()
        .map(|v| g.index_of(v.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    amalgamate_idx(g, &members)
}

/// The out-splits making every edge its own class, vertex by vertex in
/// order. Sinks and vertices emitting a single edge are left alone.
pub fn maximal_outsplit_steps(g: &MultiGraph) -> Result<Vec<MoveStep>> {
    let originals: Vec<String> = g.names().to_vec();
    let mut current = g.clone();
    let mut pieces: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut steps = Vec::new();
    for (x, name) in originals.iter().enumerate() {
        if g.out_degree(x) <= 1 {
            continue;
        }
        let mut classes = Vec::new();
        for (y, target) in originals.iter().enumerate() {
            for _ in 0..g.mult(x, y) {
                let class: BTreeMap<String, i64> = match pieces.get(target) {
                    Some(ps) => ps.iter().map(|p| (p.clone(), 1)).collect(),
                    None => [(target.clone(), 1)].into_iter().collect(),
                };
                classes.push(class);
            }
        }
        let step = MoveStep::Outsplit(PartitionSpec {
            vertex: name.clone(),
            classes,
        });
        let names = outsplit_names(&current, name, g.out_degree(x) as usize);
        current = step.apply(&current)?;
        pieces.insert(name.clone(), names);
        steps.push(step);
    }
    Ok(steps)
}

/// Out-split using the partition into single edges at every vertex.
pub fn maximal_outsplit(g: &MultiGraph) -> Result<MultiGraph> {
    maximal_outsplit_steps(g)?
        .iter()
        .try_fold(g.clone(), |acc, step| step.apply(&acc))
}

/// A chain of moves from `source`, claimed to end at a graph isomorphic to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveCertificate {
    pub source: MultiGraph,
    pub steps: Vec<MoveStep>,
    pub target: MultiGraph,
}

impl MoveCertificate {
    /// Replays the steps, returning the final graph.
    pub fn replay(&self) -> Result<MultiGraph> {
        self.steps
            .iter()
            .try_fold(self.source.clone(), |g, step| step.apply(&g))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    /// Index of the failing step; the endpoint check uses the step count.
    pub step: usize,
    pub check: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub steps: usize,
    pub failures: Vec<CheckFailure>,
    /// Some shift was accepted on a graph without Condition (L), so the
    /// isomorphism is only guaranteed over infinite fields.
    pub field_conditional: bool,
}

/// Replays a certificate, checking each step's preconditions, Condition (L)
/// on every graph that is shifted, the pointed K0 class after every step,
/// and isomorphism of the final graph with the target.
pub fn verify_certificate(cert: &MoveCertificate, allow_infinite_field: bool) -> VerificationReport {
    let mut failures = Vec::new();
    let mut field_conditional = false;
    let fail = |failures: &mut Vec<CheckFailure>, step, check: &str, message: String| {
        failures.push(CheckFailure {
            step,
            check: check.to_string(),
            message,
        })
    };

    let source_k0 = k0_data(&cert.source);
    if let Err(e) = &source_k0 {
        fail(&mut failures, 0, "k0", format!("source invariant: {e}"));
    }
    let mut current = cert.source.clone();
    let mut replayed = true;
    for (i, step) in cert.steps.iter().enumerate() {
        let next = match step.apply(&current) {
            Ok(g) => g,
            Err(e) => {
                fail(&mut failures, i, "precondition", format!("{step}: {e}"));
                replayed = false;
                break;
            }
        };
        let shifted = match step {
            MoveStep::Shift { .. } => Some(&current),
            MoveStep::Unshift { .. } => Some(&next),
            _ => None,
        };
        if let Some(h) = shifted {
            if !h.satisfies_condition_l() {
                if allow_infinite_field {
                    field_conditional = true;
                } else {
                    fail(
                        &mut failures,
                        i,
                        "condition_L",
                        format!("{step}: shifted graph has a cycle without an exit"),
                    );
                }
            }
        }
        if let Ok(src) = &source_k0 {
            if let Some(msg) = k0_mismatch(src, &next) {
                fail(&mut failures, i, "k0", format!("{step}: {msg}"));
            }
        }
        current = next;
    }
    if replayed {
        match graph_iso(&current, &cert.target) {
            Ok(true) => {}
            Ok(false) => fail(
                &mut failures,
                cert.steps.len(),
                "endpoint",
                "final graph is not isomorphic to the target".into(),
            ),
            Err(e) => fail(&mut failures, cert.steps.len(), "endpoint", e.to_string()),
        }
    }
    VerificationReport {
        valid: failures.is_empty(),
        steps: cert.steps.len(),
        failures,
        field_conditional,
    }
}

fn k0_mismatch(source: &PointedK0, g: &MultiGraph) -> Option<String> {
    match k0_data(g).and_then(|k| pointed_iso(source, &k)) {
        Ok(true) => None,
        Ok(false) => Some("pointed K0 differs from the source".into()),
        Err(e) => Some(e.to_string()),
    }
}
