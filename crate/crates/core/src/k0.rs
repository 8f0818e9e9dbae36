//! The pointed Grothendieck group `(K0, [1])` of a graph algebra and the
//! decision procedure for isomorphism of pointed groups.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::matrix::IntMatrix;
use crate::smith::{cokernel_and_project, kernel_rank, AbelianGroup};

/// Default bound on the torsion work done by [`pointed_iso`]; override with
/// the `LPACLASS_MAX_TORSION` environment variable.
pub const DEFAULT_TORSION_CAP: u128 = 10_000;

/// An abelian group together with a distinguished element.
///
/// `unit` has one residue per invariant factor followed by one integer per
/// free summand. Coordinates depend on the chosen basis, so compare values
/// with [`pointed_iso`], not `==`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointedK0 {
    #[serde(flatten)]
    pub group: AbelianGroup,
    pub unit: Vec<i64>,
}

impl PointedK0 {
    pub fn new(group: AbelianGroup, unit: Vec<i64>) -> Result<Self> {
        let k = group.invariant_factors.len();
        if unit.len() != k + group.free_rank {
            return Err(Error::DimensionMismatch(format!(
                "{} unit coordinates for a group with {} factors and rank {}",
                unit.len(),
                k,
                group.free_rank
            )));
        }
        for w in group.invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::InvalidParameter(format!(
                    "invariant factors {} and {} do not form a divisibility chain",
                    w[0], w[1]
                )));
            }
        }
        if group.invariant_factors.iter().any(|&f| f < 2) {
            return Err(Error::InvalidParameter("invariant factors must be >= 2".into()));
        }
        let unit = unit
            .iter()
            .enumerate()
            .map(|(i, &x)| if i < k { x.rem_euclid(group.invariant_factors[i]) } else { x })
            .collect();
        Ok(PointedK0 { group, unit })
    }

    pub fn torsion_part(&self) -> &[i64] {
        &self.unit[..self.group.invariant_factors.len()]
    }

    pub fn free_part(&self) -> &[i64] {
        &self.unit[self.group.invariant_factors.len()..]
    }
}

/// `A^t - I` for the incidence matrix `A` of `g`.
pub fn transition_relations(g: &MultiGraph) -> Result<IntMatrix> {
    let n = g.vertex_count();
    g.incidence().transpose().checked_sub(&IntMatrix::identity(n))
}

/// `K0 = coker(A^t - I)` with the class of the all-ones vector.
pub fn k0_data(g: &MultiGraph) -> Result<PointedK0> {
    let rel = transition_relations(g)?;
    let ones = vec![1; g.vertex_count()];
    let (group, unit) = cokernel_and_project(&rel, &ones)?;
    Ok(PointedK0 { group, unit })
}

/// Rank of `ker(A^t - I)`.
pub fn k1_rank(g: &MultiGraph) -> Result<usize> {
    kernel_rank(&transition_relations(g)?)
}

pub fn group_iso(a: &AbelianGroup, b: &AbelianGroup) -> bool {
    a == b
}

fn torsion_cap() -> u128 {
    std::env::var("LPACLASS_MAX_TORSION")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_TORSION_CAP)
}

/// Whether some automorphism of the common group carries `a.unit` to `b.unit`.
///
/// Automorphisms of `Z^r + T` act on the free coordinates through
/// `GL_r(Z)` and may add any homomorphic image of the free part to the
/// torsion part. So the free parts must share their gcd `c`, and some
/// automorphism of `T` must move `a`'s torsion part into `b_t + cT`. On each
/// primary component, two elements lie in the same automorphism orbit
/// exactly when their height sequences agree, so the search runs over the
/// coset `b_t + cT` one prime at a time.
pub fn pointed_iso(a: &PointedK0, b: &PointedK0) -> Result<bool> {
    pointed_iso_with_cap(a, b, torsion_cap())
}

pub fn pointed_iso_with_cap(a: &PointedK0, b: &PointedK0, cap: u128) -> Result<bool> {
    if !group_iso(&a.group, &b.group) {
        return Ok(false);
    }
    let c = gcd_all(a.free_part());
    if c != gcd_all(b.free_part()) {
        return Ok(false);
    }
    if c == 1 {
        return Ok(true);
    }
    let factors = &a.group.invariant_factors;
    if factors.is_empty() {
        return Ok(true);
    }
    // a prime not dividing c has cT_p = T_p, which meets every orbit
    let primes: Vec<i64> = primes_of(factors)
        .into_iter()
        .filter(|&p| c == 0 || c % p == 0)
        .collect();
    let work: u128 = primes
        .iter()
        .map(|&p| coset_size(factors, p, c))
        .try_fold(0u128, |acc, s| acc.checked_add(s?))
        .ok_or(Error::Overflow("torsion coset size"))?;
    if work > cap {
        return Err(Error::CapExceeded {
            what: "torsion coset search",
            size: work,
            cap,
        });
    }
    for &p in &primes {
        if !primary_match(factors, p, c, a.torsion_part(), b.torsion_part()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0, |acc, &x| gcd(acc, x))
}

fn primes_of(factors: &[i64]) -> Vec<i64> {
    // the largest factor is divisible by every other one
    let mut rest = *factors.last().unwrap_or(&1);
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            primes.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    primes
}

fn valuation(mut x: i64, p: i64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Exponents `e_i` with `p^e_i || f_i`, skipping factors prime to `p`.
fn primary_exponents(factors: &[i64], p: i64) -> Vec<(usize, u32)> {
    factors
        .iter()
        .enumerate()
        .map(|(i, &f)| (i, valuation(f, p)))
        .filter(|&(_, e)| e > 0)
        .collect()
}

/// Size of `p^v T_p` where `p^v || c`; a single element when `c = 0`.
fn coset_size(factors: &[i64], p: i64, c: i64) -> Option<u128> {
    if c == 0 {
        return Some(1);
    }
    let v = valuation(c, p);
    primary_exponents(factors, p)
        .iter()
        .try_fold(1u128, |acc, &(_, e)| {
            acc.checked_mul((p as u128).checked_pow(e.saturating_sub(v))?)
        })
}

/// Heights of `x, px, p^2 x, ...` in `Z/p^e1 + ... + Z/p^ek` until zero.
fn ulm_sequence(x: &[i64], exps: &[u32], p: i64) -> Vec<u32> {
    let mods: Vec<i64> = exps.iter().map(|&e| p.pow(e)).collect();
    let mut y: Vec<i64> = x.iter().zip(&mods).map(|(&a, &m)| a.rem_euclid(m)).collect();
    let mut seq = Vec::new();
    while y.iter().any(|&a| a != 0) {
        let h = y
            .iter()
            .filter(|&&a| a != 0)
            .map(|&a| valuation(a, p))
            .min()
            .unwrap();
        seq.push(h);
        for (a, &m) in y.iter_mut().zip(&mods) {
            *a = (*a * p) % m;
        }
    }
    seq
}

fn primary_match(factors: &[i64], p: i64, c: i64, a: &[i64], b: &[i64]) -> bool {
    let comps = primary_exponents(factors, p);
    let exps: Vec<u32> = comps.iter().map(|&(_, e)| e).collect();
    let pa: Vec<i64> = comps.iter().map(|&(i, e)| a[i].rem_euclid(p.pow(e))).collect();
    let pb: Vec<i64> = comps.iter().map(|&(i, e)| b[i].rem_euclid(p.pow(e))).collect();
    let target = ulm_sequence(&pa, &exps, p);
    if c == 0 {
        return ulm_sequence(&pb, &exps, p) == target;
    }
    let v = valuation(c, p);
    // steps[i] = p^min(v, e_i); range[i] = number of multiples of steps[i] mod p^e_i
    let steps: Vec<i64> = exps.iter().map(|&e| p.pow(v.min(e))).collect();
    let ranges: Vec<i64> = exps
        .iter()
        .zip(&steps)
        .map(|(&e, &s)| p.pow(e) / s)
        .collect();
    let mut counter = vec![0i64; exps.len()];
    loop {
        let y: Vec<i64> = pb
            .iter()
            .zip(&counter)
            .zip(&steps)
            .map(|((&bi, &k), &s)| bi + k * s)
            .collect();
        if ulm_sequence(&y, &exps, p) == target {
            return true;
        }
        let mut i = 0;
        loop {
            if i == counter.len() {
                return false;
            }
            counter[i] += 1;
            if counter[i] < ranges[i] {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}
