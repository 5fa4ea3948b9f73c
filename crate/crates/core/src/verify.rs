//! Brute-force ground truth and path validation, independent of the LP code.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::paths::{cost_bits, Algorithm, SimplexPath};
use crate::polytope::{Instance, LatticeVertex};
use crate::preprocess;

/// Size limits for subset-based vertex enumeration.
pub const MAX_ENUM_N: usize = 6;
pub const MAX_ENUM_M: usize = 20;
/// Limit on `(k+1)^n` for lattice-point enumeration.
pub const MAX_LATTICE_POINTS: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("instance too large for brute force: {0}")]
    TooLarge(String),
    #[error("point is not a vertex: {0}")]
    NotAVertex(String),
    #[error("polytope has a fractional vertex {0}")]
    Fractional(String),
    #[error("invalid path at step {step}: {reason}")]
    InvalidPath { step: usize, reason: String },
}

fn combinations(m: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > m {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let mut i = r;
        while i > 0 && idx[i - 1] == m - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices, by solving every `n`-subset of rows with full rank.
/// Guarded to `n <= 6` and `m <= 20`.
pub fn enumerate_vertices(inst: &Instance) -> Result<Vec<LatticeVertex>, VerifyError> {
    let (n, m) = (inst.n(), inst.m());
    if n > MAX_ENUM_N || m > MAX_ENUM_M {
        return Err(VerifyError::TooLarge(format!("n = {n}, m = {m}")));
    }
    let a = inst.a_rational();
    let b = inst.b_rational();
    let mut found: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    combinations(m, n, |rows| {
        let sub = a.select_rows(rows);
        if linalg::rank(&sub) < n {
            return;
        }
        let rhs: Vec<BigRational> = rows.iter().map(|&i| b[i].clone()).collect();
        if let Ok(x) = linalg::solve_system(&sub, &rhs) {
            if let Ok(active) = inst.active_set_q(&x) {
                if inst.equalities().is_subset(&active) {
                    found.insert(x);
                }
            }
        }
    });
    let mut out = Vec::with_capacity(found.len());
    for x in found {
        let coords = linalg::to_integer(&x).ok_or_else(|| {
            VerifyError::Fractional(x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
        })?;
        let v = inst.vertex(coords).map_err(|e| VerifyError::NotAVertex(e.to_string()))?;
        out.push(v);
    }
    out.sort();
    Ok(out)
}

/// Every feasible integer point of `[0,k]^n`.
pub fn enumerate_lattice_points(inst: &Instance) -> Result<Vec<Vec<BigInt>>, VerifyError> {
    let n = inst.n();
    let k = inst.k();
    let total = (k + 1).checked_pow(n as u32).filter(|&t| t <= MAX_LATTICE_POINTS);
    if total.is_none() {
        return Err(VerifyError::TooLarge(format!("(k+1)^n with k = {k}, n = {n}")));
    }
    let mut out = Vec::new();
    let mut x = vec![0u64; n];
    loop {
        let coords: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        if let Ok(active) = inst.active_set(&coords) {
            if inst.equalities().is_subset(&active) {
                out.push(coords);
            }
        }
        let mut i = 0;
        while i < n && x[i] == k {
            x[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        x[i] += 1;
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub value: BigInt,
    /// Maximizing vertices, sorted.
    pub witnesses: Vec<Vec<BigInt>>,
    /// `"vertices"` or `"lattice-points"`.
    pub method: String,
}

/// Maximum of `cost` over the polytope with all maximizing vertices. Uses
/// vertex enumeration within its guard and falls back to scanning lattice
/// points, which is exact because every vertex is integral.
pub fn brute_force_optimum(inst: &Instance, cost: &[BigInt]) -> Result<BruteForce, VerifyError> {
    let (points, method) = match enumerate_vertices(inst) {
        Ok(vs) => (vs.into_iter().map(|v| v.coords).collect::<Vec<_>>(), "vertices"),
        Err(VerifyError::TooLarge(_)) => {
            let pts = enumerate_lattice_points(inst)?;
            (pts, "lattice-points")
        }
        Err(e) => return Err(e),
    };
    let value = points
        .iter()
        .map(|x| inst.cost_value(cost, x))
        .max()
        .ok_or_else(|| VerifyError::TooLarge("empty polytope".into()))?;
    let witnesses = points
        .into_iter()
        .filter(|x| inst.cost_value(cost, x) == value && (method == "vertices" || inst.is_vertex(x)))
        .collect();
    Ok(BruteForce {
        value,
        witnesses,
        method: method.into(),
    })
}

/// True iff `x` and `y` are distinct vertices whose common tight rows have
/// rank `n - 1` and are exactly the rows tight at their midpoint.
pub fn check_adjacent(inst: &Instance, x: &[BigInt], y: &[BigInt]) -> Result<bool, VerifyError> {
    let vx = inst.vertex(x.to_vec()).map_err(|e| VerifyError::NotAVertex(e.to_string()))?;
    let vy = inst.vertex(y.to_vec()).map_err(|e| VerifyError::NotAVertex(e.to_string()))?;
    if vx.coords == vy.coords {
        return Ok(false);
    }
    let common: BTreeSet<usize> = vx.active.intersection(&vy.active).copied().collect();
    if inst.rank_of_rows(&common) != inst.n() - 1 {
        return Ok(false);
    }
    let two = BigRational::from_integer(2.into());
    let mid: Vec<BigRational> = x
        .iter()
        .zip(y)
        .map(|(a, b)| BigRational::from_integer(a + b) / &two)
        .collect();
    Ok(inst.active_set_q(&mid).map(|s| s == common).unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub name: String,
    /// Closed-form value of the bound, as text.
    pub bound: String,
    pub observed: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub algorithm: Algorithm,
    pub observed_length: usize,
    pub bounds: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.bounds.iter().all(|b| b.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&BoundRow> {
        self.bounds.iter().find(|b| b.name == name)
    }

    fn push(&mut self, name: &str, bound: impl ToString, observed: impl ToString, satisfied: bool) {
        self.bounds.push(BoundRow {
            name: name.into(),
            bound: bound.to_string(),
            observed: observed.to_string(),
            satisfied,
        });
    }
}

/// Bound names, also used as CSV columns.
pub mod bound {
    pub const BASIC: &str = "basic_length";
    pub const SCALING_TOTAL: &str = "scaling_total";
    pub const PHASE: &str = "phase_length";
    pub const PRESCALE_TOTAL: &str = "prescale_total";
    pub const ROUNDED_NORM: &str = "rounded_norm";
    pub const ITERATIONS: &str = "iterations";
    pub const SEGMENT: &str = "segment_length";
    pub const ITERATIVE_TOTAL: &str = "iterative_total";
    pub const CTILDE_NORM: &str = "ctilde_norm";

    pub const ALL: [&str; 9] = [
        BASIC,
        SCALING_TOTAL,
        PHASE,
        PRESCALE_TOTAL,
        ROUNDED_NORM,
        ITERATIONS,
        SEGMENT,
        ITERATIVE_TOTAL,
        CTILDE_NORM,
    ];
}

/// `L <= nk (4n^3 + n(n+2) log2(nk+1) + 2)`, decided exactly.
pub fn prescale_bound_holds(length: usize, n: usize, nk: &BigInt) -> bool {
    let base = nk * BigInt::from(4 * n * n * n + 2);
    let excess = BigInt::from(length) - base;
    if !excess.is_positive() {
        return true;
    }
    // excess <= nk n(n+2) log2(nk+1)  <=>  2^excess <= (nk+1)^(nk n(n+2))
    let Some(e) = excess.to_usize() else { return false };
    let Some(p) = (nk * BigInt::from(n * (n + 2))).to_usize() else { return true };
    (BigInt::one() << e) <= num_traits::pow(nk + BigInt::one(), p)
}

/// Approximate value of the prescale bound for display.
pub fn prescale_bound_value(n: usize, nk: &BigInt) -> f64 {
    let nkf = nk.to_f64().unwrap_or(f64::INFINITY);
    let nf = n as f64;
    nkf * (4.0 * nf.powi(3) + nf * (nf + 2.0) * (nkf + 1.0).log2() + 2.0)
}

fn norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

fn invalid(step: usize, reason: impl Into<String>) -> VerifyError {
    VerifyError::InvalidPath {
        step,
        reason: reason.into(),
    }
}

/// Validates `path` (vertices, adjacency of consecutive vertices, strict
/// improvement under each phase's cost) and evaluates the length bounds for
/// its algorithm. `cost` is the objective the path was run for.
pub fn check_path(inst: &Instance, cost: &[BigInt], path: &SimplexPath) -> Result<BoundReport, VerifyError> {
    let n = inst.n();
    let nk = inst.nk();
    for (i, v) in path.vertices.iter().enumerate() {
        let w = inst.vertex(v.coords.clone()).map_err(|e| invalid(i, e.to_string()))?;
        if w.active != v.active {
            return Err(invalid(i, "recorded active set is stale"));
        }
    }
    for i in 1..path.vertices.len() {
        let adj = check_adjacent(inst, &path.vertices[i - 1].coords, &path.vertices[i].coords)
            .map_err(|e| invalid(i, e.to_string()))?;
        if !adj {
            return Err(invalid(i, "consecutive vertices are not adjacent"));
        }
    }
    let mut covered = 0;
    for ph in &path.phases {
        if ph.start != covered {
            return Err(invalid(ph.start, format!("phase {} does not continue the path", ph.label)));
        }
        for s in ph.start..ph.start + ph.length {
            let (x, y) = (&path.vertices[s].coords, &path.vertices[s + 1].coords);
            if inst.cost_value(&ph.cost, y) <= inst.cost_value(&ph.cost, x) {
                return Err(invalid(s + 1, format!("no strict improvement in phase {}", ph.label)));
            }
        }
        covered += ph.length;
    }
    if covered != path.length() {
        return Err(invalid(covered, "edges outside any phase"));
    }

    let length = path.length();
    let mut report = BoundReport {
        algorithm: path.algorithm,
        observed_length: length,
        bounds: Vec::new(),
    };
    let max_phase = path.phases.iter().map(|p| p.length).max().unwrap_or(0);
    let first = &path.vertices[0].coords;
    let last = &path.last().coords;
    match path.algorithm {
        Algorithm::Basic => {
            let gain = inst.cost_value(cost, last) - inst.cost_value(cost, first);
            let b = gain.min(&nk * norm(cost));
            let ok = BigInt::from(length) <= b;
            report.push(bound::BASIC, b, length, ok);
        }
        Algorithm::Scaling => {
            let b = scaling_total(&nk, cost);
            report.push(bound::SCALING_TOTAL, &b, length, BigInt::from(length) <= b);
            report.push(bound::PHASE, &nk, max_phase, BigInt::from(max_phase) <= nk);
        }
        Algorithm::Prescale => {
            let ok = prescale_bound_holds(length, n, &nk);
            report.push(bound::PRESCALE_TOTAL, format!("{:.1}", prescale_bound_value(n, &nk)), length, ok);
            report.push(bound::PHASE, &nk, max_phase, BigInt::from(max_phase) <= nk);
            let big = preprocess::norm_bound(n, &(&nk + BigInt::one()));
            let rn = path.rounded_cost.as_deref().map(norm).unwrap_or_default();
            let bits = big.bits();
            report.push(bound::ROUNDED_NORM, format!("2^{bits} (approx)"), &rn, rn <= big);
        }
        Algorithm::Iterative => {
            let target = BigInt::from(n).pow(3) * BigInt::from(inst.k()) * inst.alpha();
            let seg_bound = &nk * BigInt::from(cost_bits(&[target.clone()]).unwrap_or(0) + 1);
            let iters: BTreeSet<usize> = path.phases.iter().filter_map(|p| p.iteration).collect();
            let count = iters.len();
            report.push(bound::ITERATIONS, n, count, count <= n);
            let mut max_seg = 0;
            let mut norms_ok = true;
            for it in &iters {
                let phases: Vec<_> = path.phases.iter().filter(|p| p.iteration == Some(*it)).collect();
                max_seg = max_seg.max(phases.iter().map(|p| p.length).sum::<usize>());
                let ctilde = &phases.last().expect("iteration has phases").cost;
                norms_ok &= norm(ctilde) == target;
            }
            report.push(bound::SEGMENT, &seg_bound, max_seg, BigInt::from(max_seg) <= seg_bound);
            let total = BigInt::from(n) * &seg_bound;
            report.push(bound::ITERATIVE_TOTAL, &total, length, BigInt::from(length) <= total);
            report.push(bound::PHASE, &nk, max_phase, BigInt::from(max_phase) <= nk);
            report.push(bound::CTILDE_NORM, &target, if norms_ok { "equal" } else { "differs" }, norms_ok);
        }
    }
    Ok(report)
}

/// `nk (ceil(log2 ||c||_inf) + 1)`, or 0 for the zero cost.
pub fn scaling_total(nk: &BigInt, cost: &[BigInt]) -> BigInt {
    match cost_bits(cost) {
        Some(l) => nk * BigInt::from(l + 1),
        None => BigInt::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::PivotRule;
    use crate::paths::{run_basic, run_scaling};
    use crate::polytope::{gen_hypercube, gen_odd_cycle_stable_set};

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn square_and_segment_vertices() {
        let sq = gen_hypercube(2, 1).unwrap();
        let vs: Vec<_> = enumerate_vertices(&sq).unwrap().into_iter().map(|v| v.coords).collect();
        assert_eq!(vs, vec![iv(&[0, 0]), iv(&[0, 1]), iv(&[1, 0]), iv(&[1, 1])]);
        let seg = gen_hypercube(1, 2).unwrap();
        let vs: Vec<_> = enumerate_vertices(&seg).unwrap().into_iter().map(|v| v.coords).collect();
        assert_eq!(vs, vec![iv(&[0]), iv(&[2])]);
    }

    #[test]
    fn five_cycle_has_eleven_vertices() {
        let inst = gen_odd_cycle_stable_set(5).unwrap();
        assert_eq!(enumerate_vertices(&inst).unwrap().len(), 11);
        let bf = brute_force_optimum(&inst, &iv(&[1; 5])).unwrap();
        assert_eq!(bf.value, BigInt::from(2));
        assert_eq!(bf.witnesses.len(), 5);
    }

    #[test]
    fn guard_and_fallback() {
        let inst = gen_odd_cycle_stable_set(7).unwrap();
        assert!(matches!(enumerate_vertices(&inst), Err(VerifyError::TooLarge(_))));
        let bf = brute_force_optimum(&inst, &iv(&[1; 7])).unwrap();
        assert_eq!(bf.value, BigInt::from(3));
        assert_eq!(bf.method, "lattice-points");
    }

    #[test]
    fn brute_force_on_square() {
        let sq = gen_hypercube(2, 1).unwrap();
        let bf = brute_force_optimum(&sq, &iv(&[1, 1])).unwrap();
        assert_eq!((bf.value, bf.witnesses), (BigInt::from(2), vec![iv(&[1, 1])]));
        let bf = brute_force_optimum(&sq, &iv(&[0, 0])).unwrap();
        assert_eq!(bf.witnesses.len(), 4);
    }

    #[test]
    fn adjacency_examples() {
        let sq = gen_hypercube(2, 1).unwrap();
        assert!(check_adjacent(&sq, &iv(&[0, 0]), &iv(&[1, 0])).unwrap());
        assert!(!check_adjacent(&sq, &iv(&[0, 0]), &iv(&[1, 1])).unwrap());
        let seg = gen_hypercube(1, 2).unwrap();
        assert!(check_adjacent(&seg, &iv(&[0]), &iv(&[2])).unwrap());
        assert!(matches!(check_adjacent(&seg, &iv(&[0]), &iv(&[1])), Err(VerifyError::NotAVertex(_))));
    }

    #[test]
    fn paths_validate_and_jumps_fail() {
        let cube = gen_hypercube(3, 1).unwrap();
        let c = iv(&[5, 3, 2]);
        let (_, path) = run_scaling(&cube, &c, &cube.start_vertex(), PivotRule::FirstImproving).unwrap();
        let rep = check_path(&cube, &c, &path).unwrap();
        assert!(rep.all_satisfied());
        assert!(rep.get(bound::SCALING_TOTAL).unwrap().satisfied);

        let (_, mut path) = run_basic(&cube, &c, &cube.start_vertex(), PivotRule::FirstImproving).unwrap();
        assert!(check_path(&cube, &c, &path).unwrap().all_satisfied());
        path.vertices.remove(1);
        path.phases[0].length -= 1;
        assert!(matches!(check_path(&cube, &c, &path), Err(VerifyError::InvalidPath { step: 1, .. })));
    }

    #[test]
    fn prescale_bound_exact() {
        // n = 1, k = 1: nk (4 + 3 log2 2 + 2) = 9
        let nk = BigInt::from(1);
        assert!(prescale_bound_holds(9, 1, &nk));
        assert!(!prescale_bound_holds(10, 1, &nk));
    }
}
