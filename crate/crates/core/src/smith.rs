//! Smith normal form over the integers, with the unimodular transforms, and
//! the cokernel / kernel computations built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// `P * A * Q = D` with `P`, `Q` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmithForm {
    #[serde(rename = "D")]
    pub d: IntMatrix,
    #[serde(rename = "P")]
    pub p: IntMatrix,
    #[serde(rename = "Q")]
    pub q: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)])
            .collect()
    }
}

/// A finitely generated abelian group `Z^free_rank + Z/f1 + ... + Z/fk`
/// with `f1 | f2 | ... | fk` and every `fi >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroup {
    #[serde(rename = "rank")]
    pub free_rank: usize,
    #[serde(rename = "factors")]
    pub invariant_factors: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            free_rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    /// Order of the torsion subgroup, or `None` if it does not fit in `u128`.
    pub fn torsion_order(&self) -> Option<u128> {
        self.invariant_factors
            .iter()
            .try_fold(1u128, |acc, &f| acc.checked_mul(f as u128))
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Computes the Smith normal form.
///
/// Pivot: the smallest nonzero absolute value in the remaining block, ties
/// broken in row-major order. Diagonal entries come out nonnegative, ordered
/// by divisibility, with zeros last.
pub fn smith_normal_form(a: &IntMatrix) -> Result<SmithForm> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let mut d = a.clone();
    let mut p = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = find_pivot(&d, t) else {
                return Ok(SmithForm { d, p, q });
            };
            d.swap_rows(t, pi);
            p.swap_rows(t, pi);
            d.swap_cols(t, pj);
            q.swap_cols(t, pj);

            let pivot = d[(t, t)];
            let mut clean = true;
            for i in t + 1..m {
                let quot = d[(i, t)] / pivot;
                if quot != 0 {
                    d.add_row_multiple(i, t, -quot)?;
                    p.add_row_multiple(i, t, -quot)?;
                }
                clean &= d[(i, t)] == 0;
            }
            for j in t + 1..n {
                let quot = d[(t, j)] / pivot;
                if quot != 0 {
                    d.add_col_multiple(j, t, -quot)?;
                    q.add_col_multiple(j, t, -quot)?;
                }
                clean &= d[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            // The pivot must divide the whole remaining block; if not, fold
            // the offending row into the pivot row and reduce again.
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[(i, j)] % pivot != 0));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, 1)?;
                    p.add_row_multiple(t, i, 1)?;
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t);
            p.negate_row(t);
        }
    }
    Ok(SmithForm { d, p, q })
}

fn find_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(u64, usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let v = d[(i, j)].unsigned_abs();
            if v != 0 && best.is_none_or(|(b, _, _)| v < b) {
                best = Some((v, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn group_from_diagonal(a: &IntMatrix, diag: &[i64]) -> AbelianGroup {
    let nonzero = diag.iter().filter(|&&x| x != 0).count();
    AbelianGroup {
        free_rank: a.rows() - nonzero,
        invariant_factors: diag.iter().copied().filter(|&x| x >= 2).collect(),
    }
}

/// `Z^rows / image(A)`.
pub fn cokernel(a: &IntMatrix) -> Result<AbelianGroup> {
    let snf = smith_normal_form(a)?;
    Ok(group_from_diagonal(a, &snf.diagonal()))
}

/// Coordinates of the class of `v` in `coker(A)`, in the order of
/// [`cokernel`]: one residue per invariant factor, then one integer per free
/// summand.
pub fn project(a: &IntMatrix, v: &[i64]) -> Result<Vec<i64>> {
    let snf = smith_normal_form(a)?;
    project_with(&snf, v)
}

pub(crate) fn project_with(snf: &SmithForm, v: &[i64]) -> Result<Vec<i64>> {
    let rows = snf.p.rows();
    if v.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a matrix with {rows} rows",
            v.len()
        )));
    }
    let pv = snf.p.checked_mul_vec(v)?;
    let diag = snf.diagonal();
    let mut torsion = Vec::new();
    let mut free = Vec::new();
    for (i, &x) in pv.iter().enumerate() {
        match diag.get(i).copied().unwrap_or(0) {
            0 => free.push(x),
            1 => {}
            di => torsion.push(x.rem_euclid(di)),
        }
    }
    torsion.extend(free);
    Ok(torsion)
}

/// Rank of the integer kernel of `A`.
pub fn kernel_rank(a: &IntMatrix) -> Result<usize> {
    let snf = smith_normal_form(a)?;
    Ok(a.cols() - snf.diagonal().iter().filter(|&&x| x != 0).count())
}

/// Square with determinant `+1` or `-1`.
pub fn is_unimodular(m: &IntMatrix) -> bool {
    m.is_square() && matches!(m.determinant(), Ok(1) | Ok(-1))
}

/// Cokernel plus the class of `v`, from one reduction.
pub(crate) fn cokernel_and_project(a: &IntMatrix, v: &[i64]) -> Result<(AbelianGroup, Vec<i64>)> {
    let snf = smith_normal_form(a)?;
    let group = group_from_diagonal(a, &snf.diagonal());
    let coords = project_with(&snf, v)?;
    Ok((group, coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m<R: AsRef<[i64]>>(rows: &[R]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a).unwrap();
        let paq = s.p.checked_mul(a).unwrap().checked_mul(&s.q).unwrap();
        assert_eq!(paq, s.d);
        assert!(is_unimodular(&s.p) && is_unimodular(&s.q));
        s
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(s.p, IntMatrix::identity(3));
        assert_eq!(s.q, IntMatrix::identity(3));
    }

    #[test]
    fn three_by_three_example() {
        let a = m(&[[-1, 1, 1], [1, -1, 1], [1, 1, -1]]);
        assert_eq!(check(&a).diagonal(), vec![1, 2, 2]);
        let g = cokernel(&a).unwrap();
        assert_eq!(g.invariant_factors, vec![2, 2]);
        assert_eq!(g.free_rank, 0);
        assert_eq!(project(&a, &[1, 1, 1]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn two_by_two_example() {
        let a = m(&[[4, 1], [0, -1]]);
        assert_eq!(check(&a).diagonal(), vec![1, 4]);
        assert_eq!(project(&a, &[1, 1]).unwrap(), vec![2]);
    }

    #[test]
    fn rectangular_and_zero() {
        check(&m(&[[2, 4, 4], [-6, 6, 12]]));
        check(&m(&[[0, 0], [0, 3], [5, 0]]));
        let z = IntMatrix::zeros(2, 2);
        assert_eq!(cokernel(&z).unwrap().free_rank, 2);
        assert_eq!(kernel_rank(&IntMatrix::zeros(3, 3)).unwrap(), 3);
        assert_eq!(kernel_rank(&IntMatrix::identity(2)).unwrap(), 0);
    }

    #[test]
    fn cyclic_examples() {
        assert_eq!(
            cokernel(&m(&[[2]])).unwrap(),
            AbelianGroup {
                free_rank: 0,
                invariant_factors: vec![2]
            }
        );
        assert_eq!(project(&m(&[[2]]), &[1]).unwrap(), vec![1]);
        assert_eq!(project(&m(&[[0]]), &[5]).unwrap(), vec![5]);
        assert!(matches!(
            project(&m(&[[2]]), &[1, 1]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn divisibility_fix_is_applied() {
        // diag(2, 3) is not in normal form; expect diag(1, 6)
        let s = check(&m(&[[2, 0], [0, 3]]));
        assert_eq!(s.diagonal(), vec![1, 6]);
    }

    #[test]
    fn unimodular_checks() {
        assert!(is_unimodular(&IntMatrix::identity(4)));
        assert!(!is_unimodular(&m(&[[2, 0], [0, 1]])));
        assert!(is_unimodular(&m(&[[2, 1, 0], [1, 1, 0], [0, 0, 1]])));
        assert!(!is_unimodular(&m(&[[1, 0, 0]])));
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2;
        let a = m(&[[3, big], [big, 7]]);
        match smith_normal_form(&a) {
            Ok(s) => assert_eq!(s.p.checked_mul(&a).and_then(|x| x.checked_mul(&s.q)).ok(), Some(s.d)),
            Err(e) => assert!(matches!(e, Error::Overflow(_))),
        }
    }

    #[test]
    fn deterministic() {
        let a = m(&[[3, -2, 4], [1, 5, -5], [2, 2, 0]]);
        assert_eq!(smith_normal_form(&a).unwrap(), smith_normal_form(&a).unwrap());
    }

    #[test]
    fn display_group() {
        let g = AbelianGroup {
            free_rank: 1,
            invariant_factors: vec![2, 4],
        };
        assert_eq!(g.to_string(), "Z/2 + Z/4 + Z");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
    }
}
