//! The pivoting oracle: certify that a vertex is optimal or move to an
//! adjacent vertex of strictly larger cost.
//!
//! Nondegenerate vertices (exactly `n` tight rows) are handled with a
//! single ratio test on the square active system. Degenerate vertices go
//! through the truncated cone `T' = {A⁼x <= b⁼, dᵀx >= dᵀx_t - 1}` where
//! `d` is the sum of the tight rows: the vertex is optimal iff it is optimal
//! over `T'`, and every other vertex of `T'` spans an edge of `P`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, RationalMatrix, RationalVector};
use crate::lp::{self, LpOutcome};
use crate::polytope::{Instance, LatticeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotRule {
    /// Lexicographically smallest improving neighbor.
    #[default]
    #[serde(rename = "first")]
    FirstImproving,
    /// Neighbor with the largest cost gain, ties broken lexicographically.
    #[serde(rename = "best")]
    BestImprovement,
    /// Largest gain per unit decrease of the summed tight rows; this is the
    /// optimum over the truncated cone, and the most negative multiplier at a
    /// nondegenerate vertex.
    Dantzig,
}

impl PivotRule {
    pub const ALL: [PivotRule; 3] = [PivotRule::FirstImproving, PivotRule::BestImprovement, PivotRule::Dantzig];

    pub fn as_str(self) -> &'static str {
        match self {
            PivotRule::FirstImproving => "first",
            PivotRule::BestImprovement => "best",
            PivotRule::Dantzig => "dantzig",
        }
    }
}

impl fmt::Display for PivotRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PivotRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(PivotRule::FirstImproving),
            "best" => Ok(PivotRule::BestImprovement),
            "dantzig" => Ok(PivotRule::Dantzig),
            other => Err(format!("unknown pivot rule '{other}' (expected first, best or dantzig)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    OptimalCertified,
    Improve(LatticeVertex),
}

/// How a pivot was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotMethod {
    RatioTest,
    TruncatedCone,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("input is not a vertex: {0}")]
    NotAVertex(String),
    #[error("neighbor {0:?} is not integral; polytope is not a lattice polytope")]
    NonIntegral(Vec<String>),
    #[error("edge is unbounded; polytope is not bounded")]
    UnboundedEdge,
    #[error("auxiliary program failed: {0}")]
    Auxiliary(String),
}

pub fn pivot(inst: &Instance, cost: &[BigInt], x: &LatticeVertex, rule: PivotRule) -> Result<OracleResult, OracleError> {
    pivot_with_method(inst, cost, x, rule).map(|(r, _)| r)
}

pub fn pivot_with_method(
    inst: &Instance,
    cost: &[BigInt],
    x: &LatticeVertex,
    rule: PivotRule,
) -> Result<(OracleResult, PivotMethod), OracleError> {
    let v = inst
        .vertex(x.coords.clone())
        .map_err(|e| OracleError::NotAVertex(e.to_string()))?;
    if v.active != x.active {
        return Err(OracleError::NotAVertex("stale active set".into()));
    }
    if v.active.len() == inst.n() {
        ratio_test_pivot(inst, cost, &v, rule).map(|r| (r, PivotMethod::RatioTest))
    } else {
        truncated_cone_pivot(inst, cost, &v, rule).map(|r| (r, PivotMethod::TruncatedCone))
    }
}

fn q(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Walks from `x` along `dir` until the first row outside `skip` blocks.
fn ratio_step(inst: &Instance, x: &[BigRational], dir: &[BigRational], skip: &BTreeSet<usize>) -> Result<Vec<BigInt>, OracleError> {
    let lambda = (0..inst.m())
        .filter(|i| !skip.contains(i))
        .filter_map(|i| {
            let rate = inst.row_value_q(i, dir);
            rate.is_positive()
                .then(|| (q(&inst.b()[i]) - inst.row_value_q(i, x)) / rate)
        })
        .min()
        .ok_or(OracleError::UnboundedEdge)?;
    let y: RationalVector = x.iter().zip(dir).map(|(a, d)| a + &lambda * d).collect();
    linalg::to_integer(&y).ok_or_else(|| OracleError::NonIntegral(y.iter().map(|v| v.to_string()).collect()))
}

struct Candidate {
    coords: Vec<BigInt>,
    gain: BigInt,
}

fn choose(inst: &Instance, cost: &[BigInt], from: &[BigInt], mut cands: Vec<Candidate>, rule: PivotRule) -> Result<OracleResult, OracleError> {
    debug_assert!(rule != PivotRule::Dantzig);
    match rule {
        PivotRule::BestImprovement => cands.sort_by(|a, b| b.gain.cmp(&a.gain).then_with(|| a.coords.cmp(&b.coords))),
        _ => cands.sort_by(|a, b| a.coords.cmp(&b.coords)),
    }
    let best = cands.into_iter().next().expect("at least one improving neighbor");
    debug_assert_eq!(inst.cost_value(cost, &best.coords) - inst.cost_value(cost, from), best.gain);
    inst.vertex(best.coords)
        .map(OracleResult::Improve)
        .map_err(|e| OracleError::NotAVertex(e.to_string()))
}

fn ratio_test_pivot(inst: &Instance, cost: &[BigInt], x: &LatticeVertex, rule: PivotRule) -> Result<OracleResult, OracleError> {
    let rows: Vec<usize> = x.active.iter().copied().collect();
    let basis = inst.a_rational().select_rows(&rows);
    let c = linalg::to_rational(cost);
    let y = linalg::solve_system(&basis.transpose(), &c).map_err(|e| OracleError::Auxiliary(e.to_string()))?;
    let eq = inst.equalities();
    let improving: Vec<usize> = (0..rows.len())
        .filter(|&j| !eq.contains(&rows[j]) && y[j].is_negative())
        .collect();
    if improving.is_empty() {
        return Ok(OracleResult::OptimalCertified);
    }
    let xq = linalg::to_rational(&x.coords);
    // Edge j keeps every other basis row tight and leaves row j: B d = -e_j.
    let edge = |j: usize| -> Result<Vec<BigInt>, OracleError> {
        let mut rhs = vec![BigRational::zero(); rows.len()];
        rhs[j] = -BigRational::one();
        let d = linalg::solve_system(&basis, &rhs).map_err(|e| OracleError::Auxiliary(e.to_string()))?;
        ratio_step(inst, &xq, &d, &x.active)
    };
    if rule == PivotRule::Dantzig {
        let j = *improving
            .iter()
            .min_by(|&&a, &&b| y[a].cmp(&y[b]).then(a.cmp(&b)))
            .unwrap();
        let next = edge(j)?;
        return inst
            .vertex(next)
            .map(OracleResult::Improve)
            .map_err(|e| OracleError::NotAVertex(e.to_string()));
    }
    let base = inst.cost_value(cost, &x.coords);
    let cands = improving
        .into_iter()
        .map(|j| {
            edge(j).map(|coords| Candidate {
                gain: inst.cost_value(cost, &coords) - &base,
                coords,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    choose(inst, cost, &x.coords, cands, rule)
}

/// `T'` as an explicit system: the tight rows of `x` followed by the
/// truncation row `-dᵀx <= 1 - dᵀx_t`.
fn truncated_cone(inst: &Instance, x: &LatticeVertex) -> (RationalMatrix, RationalVector, BTreeSet<usize>, Vec<usize>) {
    let rows: Vec<usize> = x.active.iter().copied().collect();
    let n = inst.n();
    let a = inst.a_rational();
    let mut d = vec![BigRational::zero(); n];
    for &i in &rows {
        for (dj, aij) in d.iter_mut().zip(a.row(i)) {
            *dj += aij;
        }
    }
    let xq = linalg::to_rational(&x.coords);
    let mut sys = a.select_rows(&rows).to_rows();
    let mut rhs: RationalVector = rows.iter().map(|&i| q(&inst.b()[i])).collect();
    sys.push(d.iter().map(|v| -v.clone()).collect());
    rhs.push(BigRational::one() - linalg::dot(&d, &xq));
    let eq: BTreeSet<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, i)| inst.equalities().contains(i))
        .map(|(pos, _)| pos)
        .collect();
    (RationalMatrix::from_rows(n, sys).unwrap(), rhs, eq, rows)
}

fn truncated_cone_pivot(inst: &Instance, cost: &[BigInt], x: &LatticeVertex, rule: PivotRule) -> Result<OracleResult, OracleError> {
    let (sys, rhs, eq, rows) = truncated_cone(inst, x);
    let c = linalg::to_rational(cost);
    let sol = match lp::maximize(&sys, &rhs, &eq, &c) {
        LpOutcome::Optimal(s) => s,
        other => return Err(OracleError::Auxiliary(format!("truncated cone program: {:?}", other.status()))),
    };
    let current = q(&inst.cost_value(cost, &x.coords));
    if sol.value <= current {
        return Ok(OracleResult::OptimalCertified);
    }
    if rule != PivotRule::Dantzig {
        let cands = improving_neighbors(inst, cost, x)?;
        if cands.is_empty() {
            return Err(OracleError::Auxiliary("truncated cone improves but no improving edge found".into()));
        }
        return choose(inst, cost, &x.coords, cands, rule);
    }

    // Tighten the rows shared by x and w, then maximize over that edge.
    let w = &sol.x;
    let mut edge_eq = inst.equalities().clone();
    for (pos, &i) in rows.iter().enumerate() {
        if linalg::dot(sys.row(pos), w) == rhs[pos] {
            edge_eq.insert(i);
        }
    }
    let b = inst.b_rational();
    let edge = match lp::maximize(inst.a_rational(), &b, &edge_eq, &c) {
        LpOutcome::Optimal(s) => s,
        other => return Err(OracleError::Auxiliary(format!("edge program: {:?}", other.status()))),
    };
    let coords = linalg::to_integer(&edge.x)
        .ok_or_else(|| OracleError::NonIntegral(edge.x.iter().map(|v| v.to_string()).collect()))?;
    if edge.value <= current {
        return Err(OracleError::Auxiliary("edge endpoint does not improve".into()));
    }
    inst.vertex(coords)
        .map(OracleResult::Improve)
        .map_err(|e| OracleError::NotAVertex(e.to_string()))
}

/// All improving neighbors of a degenerate vertex, via the extreme rays of
/// its cone of feasible directions.
fn improving_neighbors(inst: &Instance, cost: &[BigInt], x: &LatticeVertex) -> Result<Vec<Candidate>, OracleError> {
    let n = inst.n();
    let a = inst.a_rational();
    let c = linalg::to_rational(cost);
    let implicit = implicit_equalities(inst, x)?;
    let free: Vec<usize> = x.active.iter().copied().filter(|i| !implicit.contains(i)).collect();
    let implicit_rows: Vec<usize> = implicit.iter().copied().collect();
    let base_rank = linalg::rank(&a.select_rows(&implicit_rows));
    let xq = linalg::to_rational(&x.coords);
    let base = inst.cost_value(cost, &x.coords);
    let need = (n - 1).saturating_sub(base_rank);

    let mut d = vec![BigRational::zero(); n];
    for &i in &x.active {
        for (dj, aij) in d.iter_mut().zip(a.row(i)) {
            *dj += aij;
        }
    }

    let mut rays: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    let mut chosen = implicit_rows.clone();
    // Depth-first over independent extensions of the implicit rows.
    fn extend(
        a: &RationalMatrix,
        free: &[usize],
        start: usize,
        need: usize,
        rank: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if need == 0 {
            out.push(chosen.clone());
            return;
        }
        for pos in start..free.len() {
            if free.len() - pos < need {
                break;
            }
            chosen.push(free[pos]);
            if linalg::rank(&a.select_rows(chosen)) == rank + 1 {
                extend(a, free, pos + 1, need - 1, rank + 1, chosen, out);
            }
            chosen.pop();
        }
    }
    let mut systems = Vec::new();
    extend(a, &free, 0, need, base_rank, &mut chosen, &mut systems);

    for sys in systems {
        let ns = linalg::null_space(&a.select_rows(&sys));
        if ns.len() != 1 {
            continue;
        }
        let mut r = ns.into_iter().next().unwrap();
        let rates: Vec<BigRational> = free.iter().map(|&i| linalg::dot(a.row(i), &r)).collect();
        if rates.iter().all(|v| !v.is_negative()) {
            r.iter_mut().for_each(|v| *v = -v.clone());
        } else if rates.iter().any(|v| v.is_positive()) {
            continue;
        }
        let scale = -linalg::dot(&d, &r);
        if !scale.is_positive() {
            continue;
        }
        let r: Vec<BigRational> = r.into_iter().map(|v| v / &scale).collect();
        rays.insert(r);
    }

    let mut out = Vec::new();
    for r in rays {
        if !linalg::dot(&c, &r).is_positive() {
            continue;
        }
        let coords = ratio_step(inst, &xq, &r, &x.active)?;
        let gain = inst.cost_value(cost, &coords) - &base;
        out.push(Candidate { coords, gain });
    }
    Ok(out)
}

/// Tight rows that stay tight on the whole cone of feasible directions,
/// found with one program: maximize `sum s_i` subject to
/// `a_i r + s_i <= 0`, `0 <= s_i <= 1` for the non-equality tight rows.
fn implicit_equalities(inst: &Instance, x: &LatticeVertex) -> Result<BTreeSet<usize>, OracleError> {
    let n = inst.n();
    let a = inst.a_rational();
    let eq = inst.equalities();
    let loose: Vec<usize> = x.active.iter().copied().filter(|i| !eq.contains(i)).collect();
    let width = n + loose.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut sys_eq = BTreeSet::new();
    for &i in eq {
        if x.active.contains(&i) {
            let mut row = a.row(i).to_vec();
            row.resize(width, BigRational::zero());
            sys_eq.insert(rows.len());
            rows.push(row);
            rhs.push(BigRational::zero());
        }
    }
    for (s, &i) in loose.iter().enumerate() {
        let mut row = a.row(i).to_vec();
        row.resize(width, BigRational::zero());
        row[n + s] = BigRational::one();
        rows.push(row);
        rhs.push(BigRational::zero());
        let mut lo = vec![BigRational::zero(); width];
        lo[n + s] = -BigRational::one();
        rows.push(lo);
        rhs.push(BigRational::zero());
        let mut hi = vec![BigRational::zero(); width];
        hi[n + s] = BigRational::one();
        rows.push(hi);
        rhs.push(BigRational::one());
    }
    let mut obj = vec![BigRational::zero(); width];
    for v in &mut obj[n..] {
        *v = BigRational::one();
    }
    let sys = RationalMatrix::from_rows(width, rows).unwrap();
    let sol = match lp::maximize(&sys, &rhs, &sys_eq, &obj) {
        LpOutcome::Optimal(s) => s,
        other => return Err(OracleError::Auxiliary(format!("implicit equality program: {:?}", other.status()))),
    };
    let mut implicit: BTreeSet<usize> = eq.iter().copied().filter(|i| x.active.contains(i)).collect();
    for (s, &i) in loose.iter().enumerate() {
        if sol.x[n + s].is_zero() {
            implicit.insert(i);
        }
    }
    Ok(implicit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{gen_degenerate_hypercube, gen_hypercube, gen_odd_cycle_stable_set};

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn square_from_origin() {
        let sq = gen_hypercube(2, 1).unwrap();
        let start = sq.start_vertex();
        for rule in PivotRule::ALL {
            match pivot(&sq, &iv(&[1, 1]), &start, rule).unwrap() {
                OracleResult::Improve(v) => {
                    assert!(v.coords == iv(&[1, 0]) || v.coords == iv(&[0, 1]));
                }
                other => panic!("{other:?}"),
            }
        }
        // first improving is lexicographically smallest
        let OracleResult::Improve(v) = pivot(&sq, &iv(&[1, 1]), &start, PivotRule::FirstImproving).unwrap() else {
            unreachable!()
        };
        assert_eq!(v.coords, iv(&[0, 1]));
    }

    #[test]
    fn square_top_is_optimal() {
        let sq = gen_hypercube(2, 1).unwrap();
        let top = sq.vertex(iv(&[1, 1])).unwrap();
        for rule in PivotRule::ALL {
            assert_eq!(pivot(&sq, &iv(&[1, 1]), &top, rule).unwrap(), OracleResult::OptimalCertified);
        }
    }

    #[test]
    fn odd_cycle_neighbors_of_origin_are_units() {
        let inst = gen_odd_cycle_stable_set(5).unwrap();
        let start = inst.start_vertex();
        for rule in PivotRule::ALL {
            let OracleResult::Improve(v) = pivot(&inst, &iv(&[1; 5]), &start, rule).unwrap() else {
                panic!("origin is not optimal")
            };
            let ones = v.coords.iter().filter(|c| c.is_one()).count();
            let zeros = v.coords.iter().filter(|c| c.is_zero()).count();
            assert_eq!((ones, zeros), (1, 4));
        }
    }

    #[test]
    fn degenerate_origin_uses_truncated_cone() {
        let inst = gen_degenerate_hypercube(3, 1).unwrap();
        let start = inst.start_vertex();
        assert_eq!(start.active.len(), 4);
        for rule in PivotRule::ALL {
            let (res, method) = pivot_with_method(&inst, &iv(&[3, 2, 1]), &start, rule).unwrap();
            assert_eq!(method, PivotMethod::TruncatedCone);
            let OracleResult::Improve(v) = res else { panic!() };
            assert_eq!(v.coords.iter().filter(|c| c.is_one()).count(), 1, "{rule}: {:?}", v.coords);
        }
        let top = inst.vertex(iv(&[1, 1, 1])).unwrap();
        for rule in PivotRule::ALL {
            assert_eq!(pivot(&inst, &iv(&[3, 2, 1]), &top, rule).unwrap(), OracleResult::OptimalCertified);
        }
    }

    #[test]
    fn best_improvement_takes_largest_gain() {
        let inst = gen_degenerate_hypercube(3, 1).unwrap();
        let start = inst.start_vertex();
        let OracleResult::Improve(v) = pivot(&inst, &iv(&[1, 5, 2]), &start, PivotRule::BestImprovement).unwrap() else {
            panic!()
        };
        assert_eq!(v.coords, iv(&[0, 1, 0]));
        let cube = gen_hypercube(3, 1).unwrap();
        let OracleResult::Improve(v) = pivot(&cube, &iv(&[1, 5, 2]), &cube.start_vertex(), PivotRule::BestImprovement).unwrap() else {
            panic!()
        };
        assert_eq!(v.coords, iv(&[0, 1, 0]));
    }

    #[test]
    fn rejects_non_vertex() {
        let cube = gen_hypercube(2, 2).unwrap();
        let fake = LatticeVertex {
            coords: iv(&[1, 0]),
            active: [1].into_iter().collect(),
        };
        assert!(matches!(
            pivot(&cube, &iv(&[1, 1]), &fake, PivotRule::FirstImproving),
            Err(OracleError::NotAVertex(_))
        ));
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in PivotRule::ALL {
            assert_eq!(rule.as_str().parse::<PivotRule>().unwrap(), rule);
        }
        assert!("steepest".parse::<PivotRule>().is_err());
    }
}
