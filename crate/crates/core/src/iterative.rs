//! Iterative algorithm: project the cost onto the current face, round it to a
//! small integral cost, solve by bit scaling, and fix one constraint whose
//! dual multiplier is large. Repeats until the projected cost vanishes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, RationalVector};
pub use crate::lp::DualCertificate;
use crate::lp::{dual_basic_optimal, independent_rows};
use crate::oracle::PivotRule;
use crate::paths::{self, Algorithm, PathError, SimplexPath};
use crate::polytope::{Instance, LatticeVertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoundingError {
    #[error("projected cost is zero")]
    ZeroCbar,
}

/// `floor(n^3 k alpha / ||cbar||_inf * cbar)` componentwise.
pub fn round_projected_cost(cbar: &[BigRational], n: usize, k: u64, alpha: &BigInt) -> Result<Vec<BigInt>, RoundingError> {
    let norm = linalg::max_abs(cbar);
    if norm.is_zero() {
        return Err(RoundingError::ZeroCbar);
    }
    let target = BigRational::from_integer(BigInt::from(n).pow(3) * BigInt::from(k) * alpha);
    let factor = target / norm;
    Ok(cbar.iter().map(|c| (&factor * c).floor().to_integer()).collect())
}

/// True if `ctilde` is a positive multiple of `cbar`.
fn is_exact_rounding(cbar: &[BigRational], ctilde: &[BigInt]) -> bool {
    let Some(j) = cbar.iter().position(|c| !c.is_zero()) else {
        return false;
    };
    let ratio = BigRational::from_integer(ctilde[j].clone()) / &cbar[j];
    ratio.is_positive() && cbar.iter().zip(ctilde).all(|(c, t)| &ratio * c == BigRational::from_integer(t.clone()))
}

/// Smallest `h` outside `eq` with `y_h > nk`.
pub fn select_constraint(cert: &DualCertificate, eq: &BTreeSet<usize>, n: usize, k: u64) -> Option<usize> {
    let nk = BigRational::from_integer(BigInt::from(n) * BigInt::from(k));
    (0..cert.y.len()).find(|i| !eq.contains(i) && cert.y[*i] > nk)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub e_before: BTreeSet<usize>,
    pub e_after: BTreeSet<usize>,
    pub cbar: RationalVector,
    pub ctilde: Vec<BigInt>,
    pub chosen_h: usize,
    pub certificate: DualCertificate,
    /// Index of the first vertex of this iteration's segment in the merged path.
    pub segment_start: usize,
    pub segment_length: usize,
    pub segment_phases: usize,
    pub rank_before: usize,
    pub rank_after: usize,
}

#[derive(Debug, Clone)]
pub struct IterativeRun {
    pub vertex: LatticeVertex,
    pub path: SimplexPath,
    pub iterations: Vec<IterationRecord>,
    /// Projected cost at termination. Zero unless the run ended through
    /// `exact_stop`.
    pub final_cbar: RationalVector,
    /// Iteration at which no row had a multiplier above `nk` but the rounded
    /// cost was an exact positive multiple of the projected cost, so the
    /// scaling optimum is already optimal. Only happens for `n = 1`, where
    /// `n^3 k alpha = n^2 k alpha` leaves no room for a large multiplier.
    pub exact_stop: Option<usize>,
}

/// Runs the iterative algorithm on `inst` with its own cost from its start
/// vertex. Equality rows of `inst` seed the fixed set; each iteration adds
/// one row and raises its rank by one, so there are at most
/// `n - rank(initial rows)` iterations.
pub fn run_iterative(inst: &Instance, rule: PivotRule) -> Result<IterativeRun, PathError> {
    let n = inst.n();
    let c = linalg::to_rational(inst.cost());
    let a = inst.a_rational();
    let mut eq: BTreeSet<usize> = inst.equalities().clone();
    let max_iterations = n - inst.rank_of_rows(&eq);
    let mut path = SimplexPath::new(Algorithm::Iterative, rule, inst, inst.cost(), inst.start_vertex());
    let mut iterations = Vec::new();
    let mut last_h: Option<usize> = None;

    loop {
        let rows = independent_rows(a, &eq);
        let span = a.select_rows(&rows);
        let cbar = linalg::project_orthogonal(&c, &span).map_err(|e| PathError::Invariant(e.to_string()))?;
        if cbar.iter().all(Zero::is_zero) {
            return Ok(IterativeRun {
                vertex: path.last().clone(),
                path,
                iterations,
                final_cbar: cbar,
                exact_stop: None,
            });
        }
        let iteration = iterations.len() + 1;
        if iteration > max_iterations {
            return Err(PathError::Invariant(format!("more than {max_iterations} iterations")));
        }
        let ctilde = round_projected_cost(&cbar, n, inst.k(), inst.alpha())
            .map_err(|e| PathError::Invariant(e.to_string()))?;
        let target = BigInt::from(n).pow(3) * BigInt::from(inst.k()) * inst.alpha();
        if ctilde.iter().map(|x| x.abs()).max() != Some(target) {
            return Err(PathError::Invariant("rounded cost norm differs from n^3 k alpha".into()));
        }

        let start = path.last().clone();
        if let Some(h) = last_h {
            if inst.row_value(h, &start.coords) != inst.b()[h] {
                return Err(PathError::Invariant(format!("start of iteration {iteration} not tight on row {h}")));
            }
        }
        let face = inst.face(eq.clone(), start.coords.clone())?;
        let segment_start = path.vertices.len() - 1;
        let phases_before = path.phases.len();
        paths::scaling_phases(&face, &ctilde, inst.cost(), &mut path, Some(iteration))?;
        let xtilde = face.vertex(path.last().coords.clone())?;
        let cert = dual_basic_optimal(&face, &ctilde, &xtilde)?;
        let Some(h) = select_constraint(&cert, &eq, n, inst.k()) else {
            // x̃ maximizes c̃; if c̃ is a positive multiple of c̄ it maximizes c
            // over the face, which holds every optimum of P.
            if is_exact_rounding(&cbar, &ctilde) {
                return Ok(IterativeRun {
                    vertex: path.last().clone(),
                    path,
                    iterations,
                    final_cbar: cbar,
                    exact_stop: Some(iteration),
                });
            }
            return Err(PathError::EmptyH { iteration });
        };

        let rank_before = inst.rank_of_rows(&eq);
        let mut e_after = eq.clone();
        e_after.insert(h);
        let rank_after = inst.rank_of_rows(&e_after);
        if rank_after != rank_before + 1 {
            return Err(PathError::Invariant(format!(
                "rank of fixed rows went from {rank_before} to {rank_after}"
            )));
        }
        iterations.push(IterationRecord {
            iteration,
            e_before: eq.clone(),
            e_after: e_after.clone(),
            cbar,
            ctilde,
            chosen_h: h,
            certificate: cert,
            segment_start,
            segment_length: path.vertices.len() - 1 - segment_start,
            segment_phases: path.phases.len() - phases_before,
            rank_before,
            rank_after,
        });
        eq = e_after;
        last_h = Some(h);
    }
}
