//! Exact simplex sub-solver for the auxiliary linear programs: a dense
//! two-phase tableau simplex with Bland's rule over `BigRational`, an
//! inequality-form front end with free variables, and extraction of basic
//! optimal dual solutions.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, RationalMatrix, RationalVector};
use crate::polytope::{Instance, LatticeVertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    /// Optimal point; a vertex whenever the feasible region is pointed.
    pub x: RationalVector,
    pub value: BigRational,
    /// `n` linearly independent rows tight at `x`; shorter if the region
    /// contains a line.
    pub basis: Vec<usize>,
    pub active: BTreeSet<usize>,
    /// Optimal dual: `Aᵀy = cost`, `y_i >= 0` off the equality rows.
    pub dual: RationalVector,
}

impl LpSolution {
    pub fn is_vertex(&self) -> bool {
        self.basis.len() == self.x.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Result of [`solve_standard`] on `max cᵀz, Mz = r, z >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StandardOutcome {
    Optimal {
        z: RationalVector,
        value: BigRational,
        /// Basic columns (original columns only).
        basis: Vec<usize>,
        /// Dual of the equality rows: `Mᵀy >= c`, `rᵀy = value`.
        dual: RationalVector,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    reduced: Vec<BigRational>,
    value: BigRational,
}

impl Tableau {
    fn pivot(&mut self, p: usize, q: usize) {
        let inv = self.rows[p][q].recip();
        for v in self.rows[p].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[p] *= &inv;
        let prow = self.rows[p].clone();
        let prhs = self.rhs[p].clone();
        for i in 0..self.rows.len() {
            if i == p {
                continue;
            }
            let f = self.rows[i][q].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.reduced[q].clone();
        if !f.is_zero() {
            for (v, pv) in self.reduced.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.value += &f * &prhs;
        }
        self.basis[p] = q;
    }

    fn set_objective(&mut self, cost: &[BigRational]) {
        self.reduced = cost.to_vec();
        self.value = BigRational::zero();
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = &cost[bj];
            if cb.is_zero() {
                continue;
            }
            for (v, t) in self.reduced.iter_mut().zip(&self.rows[i]) {
                if !t.is_zero() {
                    *v -= cb * t;
                }
            }
            self.value += cb * &self.rhs[i];
        }
    }

    /// Runs Bland's rule on columns `0..allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(q) = (0..allowed).find(|&j| self.reduced[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let t = &self.rows[i][q];
                if !t.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / t;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((p, _)) => self.pivot(p, q),
                None => return false,
            }
        }
    }
}

/// Solves `max cᵀz s.t. Mz = r, z >= 0` exactly with a two-phase simplex
/// using Bland's rule for both entering and leaving choices.
pub fn solve_standard(m: &RationalMatrix, r: &[BigRational], c: &[BigRational]) -> StandardOutcome {
    let (nr, nc) = (m.rows(), m.cols());
    assert_eq!(r.len(), nr, "rhs length");
    assert_eq!(c.len(), nc, "cost length");
    let width = nc + nr;
    let mut signs = Vec::with_capacity(nr);
    let mut rows = Vec::with_capacity(nr);
    let mut rhs = Vec::with_capacity(nr);
    for i in 0..nr {
        let neg = r[i].is_negative();
        signs.push(if neg { -BigRational::one() } else { BigRational::one() });
        let mut row: Vec<BigRational> = m
            .row(i)
            .iter()
            .map(|v| if neg { -v.clone() } else { v.clone() })
            .collect();
        row.resize(width, BigRational::zero());
        row[nc + i] = BigRational::one();
        rows.push(row);
        rhs.push(r[i].abs());
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (nc..width).collect(),
        reduced: Vec::new(),
        value: BigRational::zero(),
    };

    // Phase I: maximize minus the sum of artificials.
    let mut phase1 = vec![BigRational::zero(); width];
    for v in &mut phase1[nc..] {
        *v = -BigRational::one();
    }
    t.set_objective(&phase1);
    t.optimize(nc);
    if t.value.is_negative() {
        return StandardOutcome::Infeasible;
    }
    // Drive zero-valued artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for i in 0..nr {
        if t.basis[i] >= nc {
            if let Some(q) = (0..nc).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, q);
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.resize(width, BigRational::zero());
    t.set_objective(&phase2);
    if !t.optimize(nc) {
        return StandardOutcome::Unbounded;
    }
    let mut z = vec![BigRational::zero(); nc];
    let mut basis = Vec::new();
    for (i, &bj) in t.basis.iter().enumerate() {
        if bj < nc {
            z[bj] = t.rhs[i].clone();
            basis.push(bj);
        }
    }
    basis.sort_unstable();
    let dual = (0..nr).map(|i| -&t.reduced[nc + i] * &signs[i]).collect();
    StandardOutcome::Optimal {
        z,
        value: t.value,
        basis,
        dual,
    }
}

/// `max costᵀx` subject to `a_i x = b_i` for `i in eq` and `a_i x <= b_i`
/// otherwise, with `x` free. An optimal solution is moved to a vertex of
/// the optimal face when the region is pointed.
pub fn maximize(a: &RationalMatrix, b: &[BigRational], eq: &BTreeSet<usize>, cost: &[BigRational]) -> LpOutcome {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m, "rhs length");
    assert_eq!(cost.len(), n, "cost length");
    let slack_rows: Vec<usize> = (0..m).filter(|i| !eq.contains(i)).collect();
    let cols = 2 * n + slack_rows.len();
    let mut std = RationalMatrix::zeros(m, cols);
    for i in 0..m {
        for j in 0..n {
            let v = a.get(i, j);
            if !v.is_zero() {
                std.set(i, j, v.clone());
                std.set(i, n + j, -v.clone());
            }
        }
    }
    for (s, &i) in slack_rows.iter().enumerate() {
        std.set(i, 2 * n + s, BigRational::one());
    }
    let mut c = Vec::with_capacity(cols);
    c.extend(cost.iter().cloned());
    c.extend(cost.iter().map(|v| -v.clone()));
    c.resize(cols, BigRational::zero());

    match solve_standard(&std, b, &c) {
        StandardOutcome::Infeasible => LpOutcome::Infeasible,
        StandardOutcome::Unbounded => LpOutcome::Unbounded,
        StandardOutcome::Optimal { z, value, dual, .. } => {
            let x: RationalVector = (0..n).map(|j| &z[j] - &z[n + j]).collect();
            let (x, active, basis) = purify(a, b, eq, x);
            debug_assert_eq!(linalg::dot(cost, &x), value);
            LpOutcome::Optimal(LpSolution {
                x,
                value,
                basis,
                active,
                dual,
            })
        }
    }
}

/// Tight rows at `x` (equality rows always count).
pub fn tight_rows(a: &RationalMatrix, b: &[BigRational], eq: &BTreeSet<usize>, x: &[BigRational]) -> BTreeSet<usize> {
    (0..a.rows())
        .filter(|&i| eq.contains(&i) || linalg::dot(a.row(i), x) == b[i])
        .collect()
}

/// Greedy maximal independent subset of `rows`, in index order.
pub fn independent_rows(a: &RationalMatrix, rows: &BTreeSet<usize>) -> Vec<usize> {
    let mut chosen = Vec::new();
    for &i in rows {
        chosen.push(i);
        if linalg::rank(&a.select_rows(&chosen)) < chosen.len() {
            chosen.pop();
        }
        if chosen.len() == a.cols() {
            break;
        }
    }
    chosen
}

/// Moves an optimal point to a vertex of the optimal face by walking along
/// null-space directions of its tight rows. The objective is constant along
/// every such direction at an optimum.
fn purify(
    a: &RationalMatrix,
    b: &[BigRational],
    eq: &BTreeSet<usize>,
    mut x: RationalVector,
) -> (RationalVector, BTreeSet<usize>, Vec<usize>) {
    let n = a.cols();
    loop {
        let active = tight_rows(a, b, eq, &x);
        let basis = independent_rows(a, &active);
        if basis.len() == n {
            return (x, active, basis);
        }
        let dir = linalg::null_space(&a.select_rows(&basis))
            .into_iter()
            .next()
            .expect("rank < n leaves a null direction");
        let step = |d: &[BigRational]| -> Option<BigRational> {
            (0..a.rows())
                .filter(|i| !active.contains(i))
                .filter_map(|i| {
                    let rate = linalg::dot(a.row(i), d);
                    rate.is_positive()
                        .then(|| (&b[i] - linalg::dot(a.row(i), &x)) / rate)
                })
                .min()
        };
        let neg: RationalVector = dir.iter().map(|v| -v.clone()).collect();
        let (d, lambda) = match step(&dir) {
            Some(l) => (dir, l),
            None => match step(&neg) {
                Some(l) => (neg, l),
                None => return (x, active, basis),
            },
        };
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += &lambda * di;
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("no basic optimal dual certificate: {0}")]
    CertificateUnavailable(String),
}

/// Basic optimal solution `ỹ` of `min bᵀy, Aᵀy = c̃, y_i >= 0 (i not in E)`
/// with the bookkeeping needed to assert its structural properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub y: RationalVector,
    pub support: BTreeSet<usize>,
    /// At most `n` nonzero components.
    pub sparse: bool,
    /// Zero on every inequality row whose normal lies in the span of the
    /// equality rows.
    pub zero_on_dependent: bool,
    pub feasible: bool,
    pub complementary: bool,
}

impl DualCertificate {
    pub fn all_checked(&self) -> bool {
        self.sparse && self.zero_on_dependent && self.feasible && self.complementary
    }
}

/// Dual certificate for a vertex `xtilde` that maximizes `ctilde` over the
/// face of `inst` fixed by its equality set.
///
/// A nondegenerate vertex uses the square active system `Ãᵀy = c̃`
/// directly. Otherwise rows dependent on the equality rows are dropped,
/// each free equality multiplier is split into a nonnegative pair, and a
/// basic optimal solution of the resulting standard-form program is taken.
pub fn dual_basic_optimal(
    inst: &Instance,
    ctilde: &[BigInt],
    xtilde: &LatticeVertex,
) -> Result<DualCertificate, CertificateError> {
    let unavailable = |m: String| Err(CertificateError::CertificateUnavailable(m));
    let n = inst.n();
    let m = inst.m();
    let eq = inst.equalities();
    let a = inst.a_rational();
    let c = linalg::to_rational(ctilde);
    let active = inst
        .active_set(&xtilde.coords)
        .map_err(|e| CertificateError::CertificateUnavailable(e.to_string()))?;
    if !eq.is_subset(&active) {
        return unavailable("vertex is not on the face".into());
    }

    let mut y = vec![BigRational::zero(); m];
    if active.len() == n {
        let rows: Vec<usize> = active.iter().copied().collect();
        let sq = a.select_rows(&rows);
        let sol = linalg::solve_system(&sq.transpose(), &c)
            .map_err(|e| CertificateError::CertificateUnavailable(e.to_string()))?;
        for (&i, v) in rows.iter().zip(sol) {
            if !eq.contains(&i) && v.is_negative() {
                return unavailable(format!("negative multiplier on row {i}: vertex not optimal"));
            }
            y[i] = v;
        }
    } else {
        let eq_rows: Vec<usize> = eq.iter().copied().collect();
        let span = a.select_rows(&eq_rows);
        let kept: Vec<usize> = (0..m)
            .filter(|&j| eq.contains(&j) || !linalg::in_row_space(a.row(j), &span))
            .collect();
        // Column layout: one column per kept row, plus a negative copy for
        // each equality row.
        let mut columns: Vec<(usize, bool)> = kept.iter().map(|&j| (j, false)).collect();
        columns.extend(kept.iter().filter(|j| eq.contains(j)).map(|&j| (j, true)));
        let mut std = RationalMatrix::zeros(n, columns.len());
        let mut obj = Vec::with_capacity(columns.len());
        let b = inst.b_rational();
        for (col, &(j, negated)) in columns.iter().enumerate() {
            for r in 0..n {
                let v = a.get(j, r);
                if !v.is_zero() {
                    std.set(r, col, if negated { -v.clone() } else { v.clone() });
                }
            }
            obj.push(if negated { b[j].clone() } else { -b[j].clone() });
        }
        match solve_standard(&std, &c, &obj) {
            StandardOutcome::Optimal { z, .. } => {
                for (col, &(j, negated)) in columns.iter().enumerate() {
                    if negated {
                        y[j] -= &z[col];
                    } else {
                        y[j] += &z[col];
                    }
                }
            }
            other => return unavailable(format!("dual program not solvable: {other:?}")),
        }
    }

    let cert = certify(inst, &c, &active, y);
    if !cert.all_checked() {
        return unavailable(format!("certificate properties failed: {cert:?}"));
    }
    Ok(cert)
}

fn certify(inst: &Instance, c: &[BigRational], active: &BTreeSet<usize>, y: RationalVector) -> DualCertificate {
    let n = inst.n();
    let eq = inst.equalities();
    let a = inst.a_rational();
    let support: BTreeSet<usize> = (0..y.len()).filter(|&i| !y[i].is_zero()).collect();
    let aty = a.transpose().mul_vec(&y);
    let signs_ok = (0..y.len()).all(|i| eq.contains(&i) || !y[i].is_negative());
    let eq_rows: Vec<usize> = eq.iter().copied().collect();
    let span = a.select_rows(&eq_rows);
    let zero_on_dependent = (0..y.len())
        .filter(|j| !eq.contains(j))
        .all(|j| y[j].is_zero() || !linalg::in_row_space(a.row(j), &span));
    DualCertificate {
        sparse: support.len() <= n,
        zero_on_dependent,
        feasible: aty == c && signs_ok,
        complementary: support.iter().all(|i| active.contains(i)),
        support,
        y,
    }
}
