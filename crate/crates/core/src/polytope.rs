//! Polytopes in H-representation `{x : Ax <= b}` with an optional set of rows
//! forced to equality, plus the instance text format and generators.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::linalg::{self, RationalMatrix};

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("point violates row {row}")]
    Infeasible { row: usize },
    #[error("point is not a vertex: {0}")]
    NotAVertex(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A `[0,k]`-polytope `P = {x : Ax <= b}` together with a cost vector, the
/// set `E` of rows treated as equalities and a starting vertex.
///
/// Instances are validated on construction and immutable afterwards. Faces
/// of `P` are expressed by enlarging `E`, see [`Instance::face`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
    c: Vec<BigInt>,
    k: u64,
    eq: BTreeSet<usize>,
    x0: Vec<BigInt>,
    alpha: BigInt,
    a_rat: RationalMatrix,
}

/// An integral vertex together with its exact set of tight rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVertex {
    pub coords: Vec<BigInt>,
    pub active: BTreeSet<usize>,
}

impl Instance {
    pub fn new(
        a: Vec<Vec<BigInt>>,
        b: Vec<BigInt>,
        c: Vec<BigInt>,
        k: u64,
        eq: BTreeSet<usize>,
        x0: Vec<BigInt>,
    ) -> Result<Self, PolytopeError> {
        let n = c.len();
        let m = b.len();
        let invalid = |msg: String| Err(PolytopeError::Validation(msg));
        if n == 0 {
            return invalid("dimension n must be positive".into());
        }
        if m == 0 {
            return invalid("at least one constraint row is required".into());
        }
        if k == 0 {
            return invalid("box bound k must be positive".into());
        }
        if a.len() != m {
            return invalid(format!("A has {} rows but b has {m} entries", a.len()));
        }
        if let Some(i) = a.iter().position(|row| row.len() != n) {
            return invalid(format!("row {i} of A has {} entries, expected {n}", a[i].len()));
        }
        if x0.len() != n {
            return invalid(format!("x0 has {} entries, expected {n}", x0.len()));
        }
        if let Some(&i) = eq.iter().find(|&&i| i >= m) {
            return invalid(format!("equality index {i} out of range"));
        }
        let alpha = a
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        if alpha.is_zero() {
            return invalid("constraint matrix is zero".into());
        }
        let a_rat = RationalMatrix::from_int_rows(n, &a).expect("rows checked above");
        let inst = Instance {
            a,
            b,
            c,
            k,
            eq,
            x0,
            alpha,
            a_rat,
        };
        let kb = BigInt::from(k);
        if let Some(j) = inst.x0.iter().position(|x| x.is_negative() || *x > kb) {
            return invalid(format!("x0[{j}] = {} lies outside [0, {k}]", inst.x0[j]));
        }
        if let Some(i) = (0..m).find(|&i| inst.row_value(i, &inst.x0) > inst.b[i]) {
            return invalid(format!("x0 violates row {i}"));
        }
        if let Some(&i) = inst.eq.iter().find(|&&i| inst.row_value(i, &inst.x0) != inst.b[i]) {
            return invalid(format!("x0 is not tight on equality row {i}"));
        }
        if !inst.is_vertex(&inst.x0) {
            return invalid("x0 is not a vertex (active rows have rank < n)".into());
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn alpha(&self) -> &BigInt {
        &self.alpha
    }

    pub fn a(&self) -> &[Vec<BigInt>] {
        &self.a
    }

    pub fn a_rational(&self) -> &RationalMatrix {
        &self.a_rat
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn b_rational(&self) -> Vec<BigRational> {
        linalg::to_rational(&self.b)
    }

    pub fn cost(&self) -> &[BigInt] {
        &self.c
    }

    pub fn equalities(&self) -> &BTreeSet<usize> {
        &self.eq
    }

    pub fn x0(&self) -> &[BigInt] {
        &self.x0
    }

    /// `n * k`, the l1-diameter bound of the box.
    pub fn nk(&self) -> BigInt {
        BigInt::from(self.n()) * BigInt::from(self.k)
    }

    pub fn start_vertex(&self) -> LatticeVertex {
        self.vertex(self.x0.clone())
            .expect("validated instance has a vertex start")
    }

    /// Same polytope with a different objective.
    pub fn with_cost(&self, c: Vec<BigInt>) -> Result<Self, PolytopeError> {
        if c.len() != self.n() {
            return Err(PolytopeError::Validation(format!(
                "cost has {} entries, expected {}",
                c.len(),
                self.n()
            )));
        }
        Ok(Instance { c, ..self.clone() })
    }

    /// The face `{x in P : a_i x = b_i for i in eq}` started at `start`.
    pub fn face(&self, eq: BTreeSet<usize>, start: Vec<BigInt>) -> Result<Self, PolytopeError> {
        Self::new(self.a.clone(), self.b.clone(), self.c.clone(), self.k, eq, start)
    }

    pub fn row_value(&self, i: usize, x: &[BigInt]) -> BigInt {
        self.a[i].iter().zip(x).map(|(a, x)| a * x).sum()
    }

    pub fn row_value_q(&self, i: usize, x: &[BigRational]) -> BigRational {
        linalg::dot(self.a_rat.row(i), x)
    }

    pub fn cost_value(&self, cost: &[BigInt], x: &[BigInt]) -> BigInt {
        cost.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Indices of the rows tight at `x`.
    pub fn active_set(&self, x: &[BigInt]) -> Result<BTreeSet<usize>, PolytopeError> {
        let mut active = BTreeSet::new();
        for i in 0..self.m() {
            let v = self.row_value(i, x);
            if v > self.b[i] {
                return Err(PolytopeError::Infeasible { row: i });
            }
            if v == self.b[i] {
                active.insert(i);
            }
        }
        Ok(active)
    }

    /// Rational counterpart of [`Instance::active_set`].
    pub fn active_set_q(&self, x: &[BigRational]) -> Result<BTreeSet<usize>, PolytopeError> {
        let mut active = BTreeSet::new();
        for i in 0..self.m() {
            let v = self.row_value_q(i, x);
            let b = BigRational::from_integer(self.b[i].clone());
            if v > b {
                return Err(PolytopeError::Infeasible { row: i });
            }
            if v == b {
                active.insert(i);
            }
        }
        Ok(active)
    }

    pub fn rank_of_rows<'a>(&self, rows: impl IntoIterator<Item = &'a usize>) -> usize {
        let idx: Vec<usize> = rows.into_iter().copied().collect();
        linalg::rank(&self.a_rat.select_rows(&idx))
    }

    pub fn is_vertex(&self, x: &[BigInt]) -> bool {
        if x.len() != self.n() {
            return false;
        }
        match self.active_set(x) {
            Ok(active) => self.eq.is_subset(&active) && self.rank_of_rows(&active) == self.n(),
            Err(_) => false,
        }
    }

    pub fn vertex(&self, coords: Vec<BigInt>) -> Result<LatticeVertex, PolytopeError> {
        if coords.len() != self.n() {
            return Err(PolytopeError::NotAVertex(format!(
                "point has {} coordinates, expected {}",
                coords.len(),
                self.n()
            )));
        }
        let active = self.active_set(&coords).map_err(|e| PolytopeError::NotAVertex(e.to_string()))?;
        if let Some(i) = self.eq.difference(&active).next() {
            return Err(PolytopeError::NotAVertex(format!("equality row {i} not tight")));
        }
        let r = self.rank_of_rows(&active);
        if r != self.n() {
            return Err(PolytopeError::NotAVertex(format!("active rows have rank {r} < {}", self.n())));
        }
        Ok(LatticeVertex { coords, active })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(s, "# lsimplex instance").unwrap();
        writeln!(s, "{} {} {}", self.n(), self.m(), self.k).unwrap();
        for i in 0..self.m() {
            let flag = u8::from(self.eq.contains(&i));
            writeln!(s, "{} {} {flag}", join(&self.a[i]), self.b[i]).unwrap();
        }
        writeln!(s, "{}", join(&self.c)).unwrap();
        writeln!(s, "{}", join(&self.x0)).unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<Self, PolytopeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next_line = |what: &str| {
            lines.next().ok_or_else(|| PolytopeError::Parse {
                line: text.lines().count() + 1,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };
        let ints = |line: usize, l: &str, expected: usize| -> Result<Vec<BigInt>, PolytopeError> {
            let toks: Vec<BigInt> = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<BigInt>().map_err(|_| PolytopeError::Parse {
                        line,
                        msg: format!("'{t}' is not an integer"),
                    })
                })
                .collect::<Result<_, _>>()?;
            if toks.len() != expected {
                return Err(PolytopeError::Parse {
                    line,
                    msg: format!("expected {expected} integers, found {}", toks.len()),
                });
            }
            Ok(toks)
        };

        let (hl, header) = next_line("header `n m k`")?;
        let h = ints(hl, header, 3)?;
        let as_usize = |v: &BigInt, what: &str| {
            v.to_usize().ok_or_else(|| PolytopeError::Parse {
                line: hl,
                msg: format!("{what} = {v} is not a valid size"),
            })
        };
        let n = as_usize(&h[0], "n")?;
        let m = as_usize(&h[1], "m")?;
        let k = h[2].to_u64().ok_or_else(|| PolytopeError::Parse {
            line: hl,
            msg: format!("k = {} out of range", h[2]),
        })?;
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut eq = BTreeSet::new();
        for i in 0..m {
            let (ln, l) = next_line("constraint row")?;
            let mut row = ints(ln, l, n + 2)?;
            let flag = row.pop().unwrap();
            if flag.is_one() {
                eq.insert(i);
            } else if !flag.is_zero() {
                return Err(PolytopeError::Parse {
                    line: ln,
                    msg: format!("equality flag must be 0 or 1, found {flag}"),
                });
            }
            b.push(row.pop().unwrap());
            a.push(row);
        }
        let (cl, l) = next_line("cost vector")?;
        let c = ints(cl, l, n)?;
        let (xl, l) = next_line("start vertex")?;
        let x0 = ints(xl, l, n)?;
        if let Some((ln, _)) = lines.next() {
            return Err(PolytopeError::Parse {
                line: ln,
                msg: "trailing content after start vertex".into(),
            });
        }
        Self::new(a, b, c, k, eq, x0)
    }
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, PolytopeError> {
    Instance::parse(&std::fs::read_to_string(path)?)
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), PolytopeError> {
    std::fs::write(path, inst.to_text())?;
    Ok(())
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn ones(n: usize) -> Vec<BigInt> {
    vec![BigInt::one(); n]
}

/// `[0,k]^n` as `-x_i <= 0` (rows `0..n`) and `x_i <= k` (rows `n..2n`),
/// starting at the origin with the all-ones cost.
pub fn gen_hypercube(n: usize, k: u64) -> Result<Instance, PolytopeError> {
    if n == 0 || k == 0 {
        return Err(PolytopeError::InvalidParameters("hypercube needs n >= 1 and k >= 1".into()));
    }
    let mut a = Vec::with_capacity(2 * n);
    let mut b = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[i] = int(-1);
        a.push(row);
        b.push(BigInt::zero());
    }
    for i in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[i] = int(1);
        a.push(row);
        b.push(BigInt::from(k));
    }
    Instance::new(a, b, ones(n), k, BTreeSet::new(), vec![BigInt::zero(); n])
}

/// Hypercube with two redundant rows, `-sum x <= 0` and `sum x <= nk`, so
/// the origin and the all-`k` corner each have `n + 1` tight rows.
pub fn gen_degenerate_hypercube(n: usize, k: u64) -> Result<Instance, PolytopeError> {
    if n < 2 {
        return Err(PolytopeError::InvalidParameters("degenerate hypercube needs n >= 2".into()));
    }
    let cube = gen_hypercube(n, k)?;
    let mut a = cube.a.clone();
    let mut b = cube.b.clone();
    a.push(vec![int(-1); n]);
    b.push(BigInt::zero());
    a.push(ones(n));
    b.push(BigInt::from(n as u64) * BigInt::from(k));
    Instance::new(a, b, ones(n), k, BTreeSet::new(), vec![BigInt::zero(); n])
}

/// Stable-set relaxation of the odd cycle `C_n`: rows `0..n` are `x_i >= 0`,
/// rows `n..2n` the edge rows `x_i + x_{i+1} <= 1`, and row `2n` the
/// odd-cycle row `sum x <= floor(n/2)`.
pub fn gen_odd_cycle_stable_set(n: usize) -> Result<Instance, PolytopeError> {
    if n < 5 || n % 2 == 0 {
        return Err(PolytopeError::InvalidParameters(format!(
            "odd cycle needs an odd n >= 5, got {n}"
        )));
    }
    let mut a = Vec::with_capacity(2 * n + 1);
    let mut b = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[i] = int(-1);
        a.push(row);
        b.push(BigInt::zero());
    }
    for i in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[i] = int(1);
        row[(i + 1) % n] = int(1);
        a.push(row);
        b.push(BigInt::one());
    }
    a.push(ones(n));
    b.push(BigInt::from(n / 2));
    Instance::new(a, b, ones(n), 1, BTreeSet::new(), vec![BigInt::zero(); n])
}

/// Capacitated transportation polytope in inequality form. Variable
/// `x_ij` has index `i * demands.len() + j`. Each supply and demand
/// equation is written as a pair of opposite inequalities, followed by
/// `-x <= 0` and `x <= cap` for every variable. The start vertex comes from
/// a greedy row-major fill.
pub fn gen_transportation(supplies: &[u64], demands: &[u64], cap: u64) -> Result<Instance, PolytopeError> {
    let bad = |m: String| Err(PolytopeError::InvalidParameters(m));
    if supplies.is_empty() || demands.is_empty() {
        return bad("supplies and demands must be nonempty".into());
    }
    if cap == 0 {
        return bad("cap must be positive".into());
    }
    let total_s: u128 = supplies.iter().map(|&s| s as u128).sum();
    let total_d: u128 = demands.iter().map(|&d| d as u128).sum();
    if total_s != total_d {
        return bad(format!("unbalanced: supplies sum to {total_s}, demands to {total_d}"));
    }
    let (rs, cs) = (supplies.len(), demands.len());
    let n = rs * cs;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut push_pair = |cells: Vec<usize>, rhs: u64| {
        let mut row = vec![BigInt::zero(); n];
        for c in cells {
            row[c] = int(1);
        }
        let neg: Vec<BigInt> = row.iter().map(|x| -x).collect();
        a.push(row);
        b.push(BigInt::from(rhs));
        a.push(neg);
        b.push(-BigInt::from(rhs));
    };
    for (i, &s) in supplies.iter().enumerate() {
        push_pair((0..cs).map(|j| i * cs + j).collect(), s);
    }
    for (j, &d) in demands.iter().enumerate() {
        push_pair((0..rs).map(|i| i * cs + j).collect(), d);
    }
    for v in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[v] = int(-1);
        a.push(row);
        b.push(BigInt::zero());
    }
    for v in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[v] = int(1);
        a.push(row);
        b.push(BigInt::from(cap));
    }

    let mut rem_s = supplies.to_vec();
    let mut rem_d = demands.to_vec();
    let mut x0 = vec![BigInt::zero(); n];
    for i in 0..rs {
        for j in 0..cs {
            let v = rem_s[i].min(rem_d[j]).min(cap);
            rem_s[i] -= v;
            rem_d[j] -= v;
            x0[i * cs + j] = BigInt::from(v);
        }
    }
    if rem_s.iter().any(|&r| r > 0) || rem_d.iter().any(|&r| r > 0) {
        return bad("greedy start cannot meet supplies and demands within cap".into());
    }
    Instance::new(a, b, ones(n), cap, BTreeSet::new(), x0)
}

/// Random balanced transportation instance: supplies and demands are the
/// row and column sums of a random matrix with entries in `[0, cap]`.
/// Retries until the greedy start is feasible.
pub fn random_transportation<R: Rng>(
    rows: usize,
    cols: usize,
    cap: u64,
    rng: &mut R,
) -> Result<Instance, PolytopeError> {
    for _ in 0..1000 {
        let cells: Vec<u64> = (0..rows * cols).map(|_| rng.gen_range(0..=cap)).collect();
        let supplies: Vec<u64> = (0..rows).map(|i| (0..cols).map(|j| cells[i * cols + j]).sum()).collect();
        let demands: Vec<u64> = (0..cols).map(|j| (0..rows).map(|i| cells[i * cols + j]).sum()).collect();
        match gen_transportation(&supplies, &demands, cap) {
            Ok(inst) => return Ok(inst),
            Err(PolytopeError::InvalidParameters(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PolytopeError::InvalidParameters(
        "no feasible random transportation instance found".into(),
    ))
}

/// Uniform integer cost in `[-bound, bound]^n`.
pub fn random_cost<R: Rng>(n: usize, bound: u64, rng: &mut R) -> Vec<BigInt> {
    let bound = bound as i128;
    (0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()
}
