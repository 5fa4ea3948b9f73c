//! Simplex paths built from repeated oracle calls: the basic walk, bit
//! scaling with the cost approximations `ceil(c / 2^(l-t))`, and scaling
//! after Frank–Tardos rounding.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::CertificateError;
use crate::oracle::{self, OracleError, OracleResult, PivotMethod, PivotRule};
use crate::polytope::{Instance, LatticeVertex, PolytopeError};
use crate::preprocess;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Basic,
    Scaling,
    Prescale,
    Iterative,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Basic, Algorithm::Scaling, Algorithm::Prescale, Algorithm::Iterative];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Basic => "basic",
            Algorithm::Scaling => "scaling",
            Algorithm::Prescale => "prescale",
            Algorithm::Iterative => "iterative",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}' (expected basic, scaling, prescale or iterative)"))
    }
}

#[derive(Debug, Error)]
pub enum PathError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error("no index with multiplier above nk outside E (iteration {iteration})")]
    EmptyH { iteration: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl PathError {
    /// Errors that indicate a bug in the engine rather than bad input.
    pub fn is_internal(&self) -> bool {
        !matches!(self, PathError::Polytope(_) | PathError::Oracle(OracleError::NotAVertex(_)))
    }
}

/// One run of the basic algorithm inside a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    pub label: String,
    /// Scaling step `t`, when the phase belongs to a scaling run.
    pub scale: Option<u64>,
    /// Outer iteration of the iterative algorithm (1-based).
    pub iteration: Option<usize>,
    pub cost: Vec<BigInt>,
    /// Index into `vertices` where the phase starts.
    pub start: usize,
    /// Edges traversed.
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexPath {
    pub algorithm: Algorithm,
    pub pivot: PivotRule,
    pub vertices: Vec<LatticeVertex>,
    pub oracle_calls: usize,
    pub certified: usize,
    /// Oracle calls answered through the truncated cone.
    pub degenerate_calls: usize,
    pub phases: Vec<Phase>,
    /// Original objective value at every vertex.
    pub cost_trace: Vec<BigInt>,
    /// The rounded cost handed to the scaling run, for `prescale`.
    pub rounded_cost: Option<Vec<BigInt>>,
}

impl SimplexPath {
    pub fn new(algorithm: Algorithm, pivot: PivotRule, inst: &Instance, objective: &[BigInt], start: LatticeVertex) -> Self {
        let value = inst.cost_value(objective, &start.coords);
        SimplexPath {
            algorithm,
            pivot,
            vertices: vec![start],
            oracle_calls: 0,
            certified: 0,
            degenerate_calls: 0,
            phases: Vec::new(),
            cost_trace: vec![value],
            rounded_cost: None,
        }
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn last(&self) -> &LatticeVertex {
        self.vertices.last().expect("path is never empty")
    }
}

/// Runs the basic algorithm for `cost` on `inst` from the last vertex of
/// `path`, appending to it. `objective` feeds `cost_trace`.
pub(crate) fn basic_phase(
    inst: &Instance,
    cost: &[BigInt],
    objective: &[BigInt],
    path: &mut SimplexPath,
    label: String,
    scale: Option<u64>,
    iteration: Option<usize>,
) -> Result<(), PathError> {
    let start = path.vertices.len() - 1;
    let mut current = path.last().clone();
    let mut value = inst.cost_value(cost, &current.coords);
    // Vertices of `inst` can differ in active set from the path's record
    // when the path was started on a larger polytope.
    current = inst.vertex(current.coords)?;
    loop {
        let (res, method) = oracle::pivot_with_method(inst, cost, &current, path.pivot)?;
        path.oracle_calls += 1;
        if method == PivotMethod::TruncatedCone {
            path.degenerate_calls += 1;
        }
        match res {
            OracleResult::OptimalCertified => {
                path.certified += 1;
                break;
            }
            OracleResult::Improve(next) => {
                let next_value = inst.cost_value(cost, &next.coords);
                if next_value < &value + BigInt::one() {
                    return Err(PathError::Invariant(format!(
                        "oracle step gained {} < 1",
                        &next_value - &value
                    )));
                }
                value = next_value;
                path.cost_trace.push(inst.cost_value(objective, &next.coords));
                path.vertices.push(next.clone());
                current = next;
            }
        }
    }
    path.phases.push(Phase {
        label,
        scale,
        iteration,
        cost: cost.to_vec(),
        start,
        length: path.vertices.len() - 1 - start,
    });
    Ok(())
}

fn check_start(inst: &Instance, start: &LatticeVertex) -> Result<LatticeVertex, PathError> {
    let v = inst.vertex(start.coords.clone())?;
    Ok(v)
}

/// Walks improving edges for `cost` until the oracle certifies optimality.
pub fn run_basic(
    inst: &Instance,
    cost: &[BigInt],
    start: &LatticeVertex,
    rule: PivotRule,
) -> Result<(LatticeVertex, SimplexPath), PathError> {
    let start = check_start(inst, start)?;
    let mut path = SimplexPath::new(Algorithm::Basic, rule, inst, cost, start);
    basic_phase(inst, cost, cost, &mut path, "basic".into(), None, None)?;
    Ok((path.last().clone(), path))
}

/// `ceil(log2 ||cost||_inf)`, or `None` for the zero vector.
pub fn cost_bits(cost: &[BigInt]) -> Option<u64> {
    let norm = cost.iter().map(|c| c.abs()).max()?;
    if norm.is_zero() {
        return None;
    }
    Some((norm - BigInt::one()).bits())
}

/// Componentwise `ceil(cost / 2^(ell - t))`.
pub fn scale_cost(cost: &[BigInt], t: u64, ell: u64) -> Vec<BigInt> {
    assert!(t <= ell, "scale index {t} exceeds {ell}");
    let denom = BigInt::one() << (ell - t);
    cost.iter().map(|c| -((-c).div_floor(&denom))).collect()
}

/// Appends the phases `t = 0..=ell` of the scaling algorithm to `path`.
pub(crate) fn scaling_phases(
    inst: &Instance,
    cost: &[BigInt],
    objective: &[BigInt],
    path: &mut SimplexPath,
    iteration: Option<usize>,
) -> Result<(), PathError> {
    let Some(ell) = cost_bits(cost) else {
        return Ok(());
    };
    for t in 0..=ell {
        let ct = scale_cost(cost, t, ell);
        let label = match iteration {
            Some(i) => format!("iter{i}/t={t}"),
            None => format!("t={t}"),
        };
        basic_phase(inst, &ct, objective, path, label, Some(t), iteration)?;
    }
    Ok(())
}

/// Bit scaling: the basic algorithm with increasingly accurate integral
/// approximations of `cost`, each phase starting where the previous ended.
pub fn run_scaling(
    inst: &Instance,
    cost: &[BigInt],
    start: &LatticeVertex,
    rule: PivotRule,
) -> Result<(LatticeVertex, SimplexPath), PathError> {
    let start = check_start(inst, start)?;
    let mut path = SimplexPath::new(Algorithm::Scaling, rule, inst, cost, start);
    scaling_phases(inst, cost, cost, &mut path, None)?;
    Ok((path.last().clone(), path))
}

/// Rounds `cost` with Frank–Tardos for `N = nk + 1`, then runs bit scaling
/// on the rounded cost.
pub fn run_prescale(
    inst: &Instance,
    cost: &[BigInt],
    start: &LatticeVertex,
    rule: PivotRule,
) -> Result<(LatticeVertex, SimplexPath), PathError> {
    let start = check_start(inst, start)?;
    let mut path = SimplexPath::new(Algorithm::Prescale, rule, inst, cost, start);
    if cost.iter().all(Zero::is_zero) {
        return Ok((path.last().clone(), path));
    }
    let big_n = inst.nk() + BigInt::one();
    let rounded = preprocess::frank_tardos_int(cost, &big_n);
    if !rounded.within_bound() {
        return Err(PathError::Invariant("rounded cost exceeds its norm bound".into()));
    }
    scaling_phases(inst, &rounded.cbreve, cost, &mut path, None)?;
    path.rounded_cost = Some(rounded.cbreve);
    Ok((path.last().clone(), path))
}

/// Runs any of the four algorithms from the instance's start vertex on the
/// instance's own cost.
pub fn run(inst: &Instance, algorithm: Algorithm, rule: PivotRule) -> Result<(LatticeVertex, SimplexPath), PathError> {
    let start = inst.start_vertex();
    let cost = inst.cost();
    match algorithm {
        Algorithm::Basic => run_basic(inst, cost, &start, rule),
        Algorithm::Scaling => run_scaling(inst, cost, &start, rule),
        Algorithm::Prescale => run_prescale(inst, cost, &start, rule),
        Algorithm::Iterative => crate::iterative::run_iterative(inst, rule).map(|r| (r.vertex, r.path)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{gen_hypercube, gen_odd_cycle_stable_set};

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn scale_cost_examples() {
        let c = iv(&[5, -3]);
        assert_eq!(cost_bits(&c), Some(3));
        assert_eq!(scale_cost(&c, 0, 3), iv(&[1, 0]));
        assert_eq!(scale_cost(&c, 1, 3), iv(&[2, 0]));
        assert_eq!(scale_cost(&c, 2, 3), iv(&[3, -1]));
        assert_eq!(scale_cost(&c, 3, 3), c);
        assert_eq!(cost_bits(&iv(&[1, 1, 1])), Some(0));
        assert_eq!(cost_bits(&iv(&[0, 0])), None);
        assert_eq!(cost_bits(&iv(&[4])), Some(2));
        assert_eq!(cost_bits(&iv(&[-5])), Some(3));
    }

    #[test]
    fn basic_on_cube_flips_each_coordinate() {
        let cube = gen_hypercube(3, 1).unwrap();
        let (v, path) = run_basic(&cube, &iv(&[1, 1, 1]), &cube.start_vertex(), PivotRule::FirstImproving).unwrap();
        assert_eq!(v.coords, iv(&[1, 1, 1]));
        assert_eq!(path.length(), 3);
        assert_eq!(path.oracle_calls, 4);
    }

    #[test]
    fn basic_zero_cost_stays() {
        let cube = gen_hypercube(2, 3).unwrap();
        let (v, path) = run_basic(&cube, &iv(&[0, 0]), &cube.start_vertex(), PivotRule::BestImprovement).unwrap();
        assert_eq!(v, cube.start_vertex());
        assert_eq!(path.length(), 0);
    }

    #[test]
    fn basic_on_segment_is_one_edge() {
        let seg = gen_hypercube(1, 7).unwrap();
        let (v, path) = run_basic(&seg, &iv(&[1]), &seg.start_vertex(), PivotRule::Dantzig).unwrap();
        assert_eq!(v.coords, iv(&[7]));
        assert_eq!(path.length(), 1);
    }

    #[test]
    fn scaling_per_phase_bound_on_square() {
        let sq = gen_hypercube(2, 1).unwrap();
        let (v, path) = run_scaling(&sq, &iv(&[5, 3]), &sq.start_vertex(), PivotRule::FirstImproving).unwrap();
        assert_eq!(v.coords, iv(&[1, 1]));
        assert_eq!(path.phases.len(), 4);
        assert!(path.phases.iter().all(|p| p.length <= 2));
    }

    #[test]
    fn scaling_zero_cost_is_empty() {
        let sq = gen_hypercube(2, 1).unwrap();
        let (v, path) = run_scaling(&sq, &iv(&[0, 0]), &sq.start_vertex(), PivotRule::FirstImproving).unwrap();
        assert_eq!(v, sq.start_vertex());
        assert_eq!(path.length(), 0);
        assert_eq!(path.oracle_calls, 0);
    }

    #[test]
    fn scaling_with_unit_norm_matches_basic() {
        let inst = gen_odd_cycle_stable_set(5).unwrap();
        let c = iv(&[1, 1, 0, -1, 1]);
        let (vb, pb) = run_basic(&inst, &c, &inst.start_vertex(), PivotRule::FirstImproving).unwrap();
        let (vs, ps) = run_scaling(&inst, &c, &inst.start_vertex(), PivotRule::FirstImproving).unwrap();
        assert_eq!(vb, vs);
        assert_eq!(pb.vertices, ps.vertices);
        assert_eq!(ps.phases.len(), 1);
    }

    #[test]
    fn prescale_matches_basic_optimum() {
        let sq = gen_hypercube(2, 1).unwrap();
        let c = iv(&[7, 2]);
        let (vb, _) = run_basic(&sq, &c, &sq.start_vertex(), PivotRule::FirstImproving).unwrap();
        let (vp, pp) = run_prescale(&sq, &c, &sq.start_vertex(), PivotRule::FirstImproving).unwrap();
        assert_eq!(vb, vp);
        assert!(pp.rounded_cost.is_some());
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
    }
}
