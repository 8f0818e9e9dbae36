//! Certificate builders: explicit move sequences proving isomorphisms
//! between matrix algebras over Leavitt algebras, and the matrix tools
//! (the `Phi` operator, Euclidean `S` matrices) they rely on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::iso::graph_iso;
use crate::matrix::IntMatrix;
use crate::moves::{maximal_outsplit_steps, outsplit_names, MoveCertificate, MoveStep, PartitionSpec};

/// Accumulates moves, applying each one as it is pushed.
#[derive(Clone, Debug)]
pub struct CertBuilder {
    source: MultiGraph,
    current: MultiGraph,
    steps: Vec<MoveStep>,
}

impl CertBuilder {
    pub fn new(source: MultiGraph) -> Self {
        CertBuilder {
            current: source.clone(),
            source,
            steps: Vec::new(),
        }
    }

    pub fn current(&self) -> &MultiGraph {
        &self.current
    }

    pub fn steps(&self) -> &[MoveStep] {
        &self.steps
    }

    pub fn push(&mut self, step: MoveStep) -> Result<&mut Self> {
        self.current = step.apply(&self.current).map_err(|e| {
            Error::Construction(format!("step {} ({step}) failed: {e}", self.steps.len()))
        })?;
        self.steps.push(step);
        Ok(self)
    }

    pub fn repeat(&mut self, step: MoveStep, times: i64) -> Result<&mut Self> {
        for _ in 0..times {
            self.push(step.clone())?;
        }
        Ok(self)
    }

    pub fn extend(&mut self, steps: impl IntoIterator<Item = MoveStep>) -> Result<&mut Self> {
        for step in steps {
            self.push(step)?;
        }
        Ok(self)
    }

    /// Finishes with the current graph as target.
    pub fn finish(self) -> MoveCertificate {
        MoveCertificate {
            target: self.current,
            source: self.source,
            steps: self.steps,
        }
    }

    /// Finishes with `target`, which must be isomorphic to the current graph.
    pub fn finish_at(self, target: MultiGraph) -> Result<MoveCertificate> {
        if !graph_iso(&self.current, &target)? {
            return Err(Error::Construction(
                "final graph is not isomorphic to the intended target".into(),
            ));
        }
        Ok(MoveCertificate {
            source: self.source,
            steps: self.steps,
            target,
        })
    }
}

/// `M * A + I - M`.
pub fn phi(m: &IntMatrix, a: &IntMatrix) -> Result<IntMatrix> {
    let n = m.require_square()?;
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} operator applied to a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    m.checked_mul(a)?
        .checked_add(&IntMatrix::identity(n))?
        .checked_sub(m)
}

/// `I + k * e_st` of size `p` (indices from 0).
pub fn elementary_k(p: usize, s: usize, t: usize, k: i64) -> Result<IntMatrix> {
    if s == t {
        return Err(Error::InvalidParameter("elementary matrix needs s != t".into()));
    }
    if s >= p || t >= p {
        return Err(Error::InvalidParameter(format!(
            "index ({s}, {t}) out of range for size {p}"
        )));
    }
    let mut m = IntMatrix::identity(p);
    m[(s, t)] = k;
    Ok(m)
}

/// Certificate from `g` to the graph with incidence `Phi_K(A)`, where
/// `K = I + k e_st`: `k` unshifts of `s` along its edge to `t`.
pub fn phi_shift_cert(g: &MultiGraph, s: &str, t: &str, k: i64) -> Result<MoveCertificate> {
    let mut b = CertBuilder::new(g.clone());
    phi_shift_steps(&mut b, s, t, k)?;
    Ok(b.finish())
}

fn phi_shift_steps(b: &mut CertBuilder, s: &str, t: &str, k: i64) -> Result<()> {
    let g = b.current().clone();
    let si = g.index_of(s)?;
    let ti = g.index_of(t)?;
    if k < 1 {
        return Err(Error::Precondition(format!("k must be >= 1, got {k}")));
    }
    if si == ti {
        return Err(Error::Precondition("s and t must differ".into()));
    }
    if g.mult(ti, ti) < 1 || g.mult(si, ti) < 1 {
        return Err(Error::Precondition(format!(
            "need a loop at {t} and an edge {s} -> {t}"
        )));
    }
    if !g.satisfies_condition_l() {
        return Err(Error::Precondition("graph must satisfy Condition (L)".into()));
    }
    let expected = phi(&elementary_k(g.vertex_count(), si, ti, k)?, g.incidence())?;
    b.repeat(MoveStep::unshift(s, t), k)?;
    if b.current().incidence() != &expected {
        return Err(Error::Construction(format!(
            "unshift chain does not realize Phi_K for K = I + {k} e({s},{t})"
        )));
    }
    Ok(())
}

/// Output of the Euclidean `S`-matrix construction for coprime `a > b > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclidResult {
    pub a: i64,
    pub b: i64,
    /// Quotients of the Euclidean algorithm, with `r_{m-1} - 1` appended.
    pub k_sequence: Vec<i64>,
    #[serde(rename = "S")]
    pub s: IntMatrix,
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl EuclidResult {
    /// The elementary factors `K_1, ..., K_m` with `S = K_m ... K_1`:
    /// lower for odd `i`, upper for even `i`.
    pub fn factors(&self) -> Vec<IntMatrix> {
        self.k_sequence
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let (s, t) = if i % 2 == 0 { (1, 0) } else { (0, 1) };
                elementary_k(3, s, t, k).expect("distinct indices")
            })
            .collect()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn euclid_s(a: i64, b: i64) -> Result<EuclidResult> {
    if !(a > b && b > 1) {
        return Err(Error::Precondition(format!("need a > b > 1, got a={a}, b={b}")));
    }
    if gcd(a, b) != 1 {
        return Err(Error::Precondition(format!("gcd({a}, {b}) != 1")));
    }
    let mut k_sequence = Vec::new();
    let (mut prev, mut cur) = (a, b);
    while cur != 1 {
        k_sequence.push(prev / cur);
        (prev, cur) = (cur, prev % cur);
    }
    k_sequence.push(prev - 1);
    let mut result = EuclidResult {
        a,
        b,
        k_sequence,
        s: IntMatrix::identity(3),
        x1: 0,
        y1: 0,
        x2: 0,
        y2: 0,
    };
    let mut s = IntMatrix::identity(3);
    for k in result.factors() {
        s = k.checked_mul(&s)?;
    }
    result.x1 = s[(0, 0)];
    result.y1 = s[(0, 1)];
    result.x2 = s[(1, 0)];
    result.y2 = s[(1, 1)];
    result.s = s;
    Ok(result)
}

/// `R_n^k` with the rose first.
fn rose_with_tail(n: i64, k: i64) -> Result<MultiGraph> {
    MultiGraph::builtin("R_n_k", &[n, k])
}

fn single_class(target: &str, count: i64) -> std::collections::BTreeMap<String, i64> {
    [(target.to_string(), count)].into_iter().collect()
}

/// `R_n^k` to `B_n^k`: split the tail into single edges, then chain the
/// resulting vertices into a line.
pub fn cert_open_tails(n: i64, k: i64) -> Result<MoveCertificate> {
    if n < 1 || k < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and k >= 1, got n={n}, k={k}")));
    }
    let source = rose_with_tail(n, k)?;
    let target = MultiGraph::builtin("B_n_k", &[n, k])?;
    let mut b = CertBuilder::new(source);
    if k >= 3 {
        let tails = outsplit_names(b.current(), "v2", (k - 1) as usize);
        b.push(MoveStep::Outsplit(PartitionSpec {
            vertex: "v2".into(),
            classes: (1..k).map(|_| single_class("v1", 1)).collect(),
        }))?;
        for pair in tails.windows(2) {
            b.push(MoveStep::shift(&pair[0], &pair[1]))?;
        }
    }
    b.finish_at(target)
}

/// `R_n^{k + t(n-1)}` to `R_n^k`, lowering the tail by `n - 1` edges per round.
pub fn cert_stabilize(n: i64, k: i64, t: i64) -> Result<MoveCertificate> {
    if n < 2 || k < 1 || t < 0 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2, k >= 1, t >= 0, got n={n}, k={k}, t={t}"
        )));
    }
    let size = (n - 1)
        .checked_mul(t)
        .and_then(|x| x.checked_add(k))
        .ok_or(Error::Overflow("tail size"))?;
    let mut b = CertBuilder::new(rose_with_tail(n, size)?);
    stabilize_steps(&mut b, n, k, t)?;
    b.finish_at(rose_with_tail(n, k)?)
}

fn stabilize_steps(b: &mut CertBuilder, n: i64, k: i64, t: i64) -> Result<()> {
    let rose = b.current().name(0).to_string();
    for round in (1..=t).rev() {
        if b.current().vertex_count() < 2 {
            return Err(Error::Construction("tail vanished before the last round".into()));
        }
        let tail = b.current().name(1).to_string();
        let rest = (k - 1) + (round - 1) * (n - 1);
        let (kept, moved) = if rest == 0 {
            (None, tail.clone())
        } else {
            let pieces = outsplit_names(b.current(), &tail, 2);
            b.push(MoveStep::Outsplit(PartitionSpec {
                vertex: tail.clone(),
                classes: vec![single_class(&rose, rest), single_class(&rose, n - 1)],
            }))?;
            (Some(pieces[0].clone()), pieces[1].clone())
        };
        b.push(MoveStep::shift(&rose, &moved))?;
        b.repeat(MoveStep::unshift(&moved, &rose), n - 1)?;
        if let Some(kept) = &kept {
            b.repeat(MoveStep::unshift(kept, &rose), rest)?;
        }
        b.push(MoveStep::amalgamate([rose.clone(), moved]))?;
    }
    Ok(())
}

/// `R_n^k` to `R_n` when `k` divides `n`.
pub fn cert_divides(n: i64, k: i64) -> Result<MoveCertificate> {
    if n < 2 || k < 2 || n % k != 0 {
        return Err(Error::Precondition(format!("need k >= 2 dividing n >= 2, got n={n}, k={k}")));
    }
    let mut b = CertBuilder::new(rose_with_tail(n, k)?);
    divides_steps(&mut b, n, k)?;
    b.finish_at(MultiGraph::builtin("R_n", &[n])?)
}

fn divides_steps(b: &mut CertBuilder, n: i64, k: i64) -> Result<()> {
    let rose = b.current().name(0).to_string();
    let tail = b.current().name(1).to_string();
    b.repeat(MoveStep::shift(&rose, &tail), n / k)?;
    b.repeat(MoveStep::unshift(&tail, &rose), k - 1)?;
    b.push(MoveStep::amalgamate([rose, tail]))?;
    Ok(())
}

/// How [`cert_fish`] reaches `R_n` from `R_n^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FishRoute {
    pub n: i64,
    pub d: i64,
    /// `d` reduced into `1..=n-1` modulo `n - 1`.
    pub reduced_d: i64,
    /// Rounds of tail reduction by `n - 1` edges.
    pub stabilize_rounds: i64,
    pub method: FishMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FishMethod {
    Trivial,
    Divides,
    TenStep(TenStepData),
}

/// Parameters of the ten-step construction for `n = d t + r`, `2 <= r < d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TenStepData {
    pub t: i64,
    pub r: i64,
    pub euclid: EuclidResult,
    pub n1: i64,
    pub n2: i64,
}

pub fn fish_route(n: i64, d: i64) -> Result<FishRoute> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and d >= 1, got n={n}, d={d}")));
    }
    if gcd(d, n - 1) != 1 {
        return Err(Error::Precondition(format!("gcd({d}, {}) != 1", n - 1)));
    }
    let reduced_d = (d - 1) % (n - 1) + 1;
    let stabilize_rounds = (d - reduced_d) / (n - 1);
    let dd = reduced_d;
    let method = if dd == 1 {
        FishMethod::Trivial
    } else if n % dd == 0 {
        FishMethod::Divides
    } else {
        let t = n / dd;
        let r = n % dd;
        if r < 2 {
            return Err(Error::Construction(format!("unexpected remainder {r} for n={n}, d={dd}")));
        }
        let euclid = euclid_s(dd, dd - r + 1)?;
        let n1 = euclid.x1 * (t + 1) - euclid.y1;
        let n2 = euclid.x2 * (t + 1) + 1 - euclid.y2;
        FishMethod::TenStep(TenStepData { t, r, euclid, n1, n2 })
    };
    Ok(FishRoute {
        n,
        d,
        reduced_d,
        stabilize_rounds,
        method,
    })
}

/// `R_n^d` to `R_n` when `gcd(d, n - 1) = 1`.
pub fn cert_fish(n: i64, d: i64) -> Result<MoveCertificate> {
    let route = fish_route(n, d)?;
    let mut b = CertBuilder::new(rose_with_tail(n, d)?);
    if route.stabilize_rounds > 0 {
        stabilize_steps(&mut b, n, route.reduced_d, route.stabilize_rounds)?;
    }
    match &route.method {
        FishMethod::Trivial => {}
        FishMethod::Divides => divides_steps(&mut b, n, route.reduced_d)?,
        FishMethod::TenStep(data) => ten_steps(&mut b, n, route.reduced_d, data)?,
    }
    b.finish_at(MultiGraph::builtin("R_n", &[n])?)
}

fn expect_rows(b: &CertBuilder, stage: &str, rows: &[(&str, [i64; 3])], order: [&str; 3]) -> Result<()> {
    let g = b.current();
    let idx = order
        .iter()
        .map(|v| g.index_of(v))
        .collect::<Result<Vec<_>>>()?;
    for (v, want) in rows {
        let i = g.index_of(v)?;
        let got: Vec<i64> = idx.iter().map(|&j| g.mult(i, j)).collect();
        if got != want {
            return Err(Error::Construction(format!(
                "{stage}: row of {v} is {got:?}, expected {want:?}"
            )));
        }
    }
    Ok(())
}

fn ten_steps(b: &mut CertBuilder, n: i64, d: i64, data: &TenStepData) -> Result<()> {
    let TenStepData { t, r, euclid, n1, n2 } = data;
    let (t, r, n1, n2) = (*t, *r, *n1, *n2);
    let rose = b.current().name(0).to_string();
    let tail = b.current().name(1).to_string();

    // 1: move t copies of the tail's out-row onto the rose
    b.repeat(MoveStep::shift(&rose, &tail), t)?;
    // 2: split the tail into one edge and d - 2 edges
    let pieces = outsplit_names(b.current(), &tail, 2);
    b.push(MoveStep::Outsplit(PartitionSpec {
        vertex: tail.clone(),
        classes: vec![single_class(&rose, 1), single_class(&rose, d - 2)],
    }))?;
    let (u, w) = (pieces[0].as_str(), pieces[1].as_str());
    // 3
    b.push(MoveStep::shift(&rose, u))?;
    let order = [rose.as_str(), u, w];
    expect_rows(
        b,
        "step 3",
        &[(rose.as_str(), [t + r - 1, t + 1, t]), (u, [1, 0, 0]), (w, [d - 2, 0, 0])],
        order,
    )?;
    let before = ordered_incidence(b.current(), &order)?;
    // 4: Phi_S as alternating unshift bundles
    for (i, &k) in euclid.k_sequence.iter().enumerate() {
        if i % 2 == 0 {
            phi_shift_steps(b, u, &rose, k)?;
        } else {
            phi_shift_steps(b, &rose, u, k)?;
        }
    }
    let expected = phi(&euclid.s, &before)?;
    if ordered_incidence(b.current(), &order)? != expected {
        return Err(Error::Construction("step 4: result differs from Phi_S(A)".into()));
    }
    // 5
    let (x1, y1, x2, y2) = (euclid.x1, euclid.y1, euclid.x2, euclid.y2);
    b.repeat(MoveStep::shift(&rose, w), x1 - y1)?;
    b.repeat(MoveStep::shift(u, w), x2 - y2)?;
    expect_rows(b, "step 5", &[(rose.as_str(), [n1, n1, n1]), (u, [n2, n2, n2 - 1])], order)?;
    // 6
    if n1 + n2 != n {
        return Err(Error::Construction(format!("step 6: n1 + n2 = {} != {n}", n1 + n2)));
    }
    b.push(MoveStep::unshift(u, &rose))?;
    expect_rows(b, "step 6", &[(u, [n - 1, n, n - 1])], order)?;
    // 7
    b.push(MoveStep::shift(u, w))?;
    expect_rows(b, "step 7", &[(u, [n - d + 1, n, n])], order)?;
    // 8: merge the two tail pieces back
    b.push(MoveStep::amalgamate([u, w]))?;
    let merged = b.current().name(1).to_string();
    // 9
    b.push(MoveStep::shift(&merged, &rose))?;
    // 10
    b.push(MoveStep::amalgamate([rose, merged]))?;
    Ok(())
}

fn ordered_incidence(g: &MultiGraph, order: &[&str]) -> Result<IntMatrix> {
    let idx = order
        .iter()
        .map(|v| g.index_of(v))
        .collect::<Result<Vec<_>>>()?;
    let k = idx.len();
    let mut m = IntMatrix::zeros(k, k);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            m[(r, c)] = g.mult(i, j);
        }
    }
    Ok(m)
}

fn require_pis(g: &MultiGraph) -> Result<()> {
    if !g.is_purely_infinite_simple() {
        return Err(Error::Precondition(
            "graph must be cofinal, satisfy Condition (L), and have every vertex connect to a cycle"
                .into(),
        ));
    }
    Ok(())
}

/// Shifts every vertex off the acyclic part into a cycle, producing a graph
/// without sources with the same vertex count and Condition (Sing).
///
/// Each step picks a non-cycle vertex `v` and a cycle vertex `p` whose
/// out-row contains `v`'s, and shifts `v`'s out-row off `p`, leaving the
/// edge `p -> v`. Errors if at some point no such pair exists.
pub fn cert_remove_sources(g: &MultiGraph) -> Result<(MultiGraph, MoveCertificate)> {
    require_pis(g)?;
    if !g.satisfies_condition_sing() {
        return Err(Error::Precondition("graph must satisfy Condition (Sing)".into()));
    }
    let mut b = CertBuilder::new(g.clone());
    loop {
        let cur = b.current().clone();
        let on_cycle = cur.cycle_vertices();
        let n = cur.vertex_count();
        if on_cycle.iter().all(|&c| c) {
            break;
        }
        // layers first: vertices with an edge into the cycle part come first
        let mut outside: Vec<usize> = (0..n).filter(|&v| !on_cycle[v]).collect();
        outside.sort_by_key(|&v| !(0..n).any(|u| on_cycle[u] && cur.mult(v, u) > 0));
        let pick = outside.iter().find_map(|&v| {
            (0..n)
                .filter(|&p| on_cycle[p] && cur.mult(p, v) == 0)
                .find(|&p| crate::moves::shift_applicable_idx(&cur, p, v))
                .map(|p| (p, v))
        });
        let Some((p, v)) = pick else {
            return Err(Error::Construction(
                "no cycle vertex dominates the out-row of a remaining acyclic vertex".into(),
            ));
        };
        b.push(MoveStep::shift(cur.name(p), cur.name(v)))?;
    }
    let end = b.current().clone();
    if !end.satisfies_condition_sing() || !end.analyze().sources.is_empty() {
        return Err(Error::Construction("result has sources or parallel edges".into()));
    }
    Ok((end, b.finish()))
}

/// Out-splits `g` into a Condition (Sing) graph with exactly `n` vertices:
/// the maximal out-split, then splits peeling one edge off the first vertex
/// emitting two or more edges.
pub fn cert_expand(g: &MultiGraph, n: usize) -> Result<(MultiGraph, MoveCertificate)> {
    require_pis(g)?;
    let edges = g.edge_count();
    if (n as i64) < edges {
        return Err(Error::Precondition(format!(
            "target size {n} is below the edge count {edges}"
        )));
    }
    let mut b = CertBuilder::new(g.clone());
    b.extend(maximal_outsplit_steps(g)?)?;
    while b.current().vertex_count() < n {
        let cur = b.current().clone();
        let Some(x) = (0..cur.vertex_count()).find(|&v| cur.out_degree(v) >= 2) else {
            return Err(Error::Construction("no vertex emits two edges".into()));
        };
        let row = cur.out_row(x).to_vec();
        let first = row.iter().position(|&m| m > 0).unwrap();
        let mut rest = row.clone();
        rest[first] -= 1;
        let mut head = vec![0; row.len()];
        head[first] = 1;
        let spec = crate::moves::counts_to_spec(&cur, x, &[head, rest]);
        b.push(MoveStep::Outsplit(spec))?;
    }
    let end = b.current().clone();
    if !end.satisfies_condition_sing() {
        return Err(Error::Construction("expanded graph has parallel edges".into()));
    }
    Ok((end, b.finish()))
}
