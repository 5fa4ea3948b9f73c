//! Command-line front end: `gen`, `solve`, `preprocess`, `bench`, `verify`.
//!
//! Exit codes: 0 success, 1 bad input (parse, validation, parameters),
//! 2 internal invariant violation, 3 verification failure (invalid path,
//! violated bound or brute-force mismatch).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::iterative::{run_iterative, IterationRecord};
use crate::oracle::PivotRule;
use crate::paths::{self, Algorithm, PathError, SimplexPath};
use crate::polytope::{self, Instance, LatticeVertex, PolytopeError};
use crate::preprocess;
use crate::trace::{Trace, Verification};
use crate::verify::{self, bound, BoundReport, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lsimplex", version, about = "Short simplex paths on lattice polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated instance in the text format.
    Gen(GenArgs),
    /// Run one algorithm on an instance.
    Solve(SolveArgs),
    /// Frank–Tardos rounding of a cost vector.
    Preprocess(PreprocessArgs),
    /// Sweep a family of instances and write a CSV table.
    Bench(BenchArgs),
    /// Check a trace, or every algorithm and pivot rule, against brute force.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Hypercube,
    DegenerateHypercube,
    OddCycle,
    Transportation,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Hypercube => "hypercube",
            Family::DegenerateHypercube => "degenerate-hypercube",
            Family::OddCycle => "odd-cycle",
            Family::Transportation => "transportation",
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    /// Comma-separated supplies (transportation).
    #[arg(long)]
    pub supplies: Option<String>,
    /// Comma-separated demands (transportation).
    #[arg(long)]
    pub demands: Option<String>,
    /// Random transportation instance shape, used without --supplies.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub cap: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace the default all-ones cost by a uniform random cost in
    /// `[-C, C]`.
    #[arg(long, value_name = "C")]
    pub cost_bound: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings of a single solve.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "basic")]
    pub algorithm: Algorithm,
    #[arg(long, default_value = "first")]
    pub pivot: PivotRule,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Reserved for randomized choices; solves are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cross-check the optimum by brute force.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Comma-separated integer cost; defaults to the instance cost.
    #[arg(long, allow_hyphen_values = true)]
    pub cost: Option<String>,
    /// Sign preservation radius; defaults to `nk + 1` of the instance.
    #[arg(long = "big-n", value_name = "N")]
    pub big_n: Option<BigInt>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "hypercube")]
    pub family: Family,
    /// Dimensions, as `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "2..5")]
    pub n: String,
    #[arg(long, default_value = "1")]
    pub k: String,
    /// Transportation shapes.
    #[arg(long, default_value = "2")]
    pub rows: String,
    #[arg(long, default_value = "2")]
    pub cols: String,
    #[arg(long, default_value = "1")]
    pub cap: String,
    /// Comma list of algorithms, or `all`.
    #[arg(long, default_value = "all")]
    pub algorithms: String,
    #[arg(long, default_value = "first")]
    pub pivot: PivotRule,
    /// Random costs per instance; 0 uses the generator's cost.
    #[arg(long, default_value_t = 1)]
    pub costs: usize,
    #[arg(long, default_value_t = 1000)]
    pub cost_bound: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Test fixture: corrupt every path before checking it.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Check this trace instead of running the algorithms.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Comma list of algorithms, or `all`.
    #[arg(long, default_value = "all")]
    pub algorithms: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(m: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: m.to_string(),
        }
    }

    fn verify(m: impl ToString) -> Self {
        Failure {
            code: EXIT_VERIFY,
            message: m.to_string(),
        }
    }
}

impl From<PolytopeError> for Failure {
    fn from(e: PolytopeError) -> Self {
        Failure::input(e)
    }
}

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        Failure {
            code: if e.is_internal() { EXIT_INTERNAL } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let res = match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Solve(a) => cmd_solve(&a.config, out),
        Command::Preprocess(a) => cmd_preprocess(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Failure::input(format!("bad number '{t}'"))))
        .collect()
}

fn parse_int_list(s: &str) -> Result<Vec<BigInt>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::input(format!("bad integer '{t}'"))))
        .collect()
}

/// `a..b` (inclusive, possibly empty) or `a,b,c`.
pub fn parse_range(s: &str) -> Result<Vec<u64>, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| format!("bad range '{s}'"))?;
        let hi: u64 = hi.trim().parse().map_err(|_| format!("bad range '{s}'"))?;
        return Ok((lo..=hi).collect());
    }
    parse_u64_list(s).map_err(|f| f.message)
}

fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>, Failure> {
    if s == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(Failure::input))
        .collect()
}

fn seeded(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
}

fn generate(family: Family, n: Option<usize>, k: u64, a: &GenArgs) -> Result<Instance, Failure> {
    let need_n = || n.ok_or_else(|| Failure::input(format!("{} needs --n", family.name())));
    let inst = match family {
        Family::Hypercube => polytope::gen_hypercube(need_n()?, k)?,
        Family::DegenerateHypercube => polytope::gen_degenerate_hypercube(need_n()?, k)?,
        Family::OddCycle => polytope::gen_odd_cycle_stable_set(need_n()?)?,
        Family::Transportation => match (&a.supplies, &a.demands) {
            (Some(s), Some(d)) => polytope::gen_transportation(&parse_u64_list(s)?, &parse_u64_list(d)?, a.cap)?,
            (None, None) => {
                let (Some(r), Some(c)) = (a.rows, a.cols) else {
                    return Err(Failure::input("transportation needs --supplies/--demands or --rows/--cols"));
                };
                polytope::random_transportation(r, c, a.cap, &mut seeded(a.seed, 0, 0))?
            }
            _ => return Err(Failure::input("--supplies and --demands go together")),
        },
    };
    Ok(inst)
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut inst = generate(a.family, a.n, a.k, a)?;
    if let Some(c) = a.cost_bound {
        let cost = polytope::random_cost(inst.n(), c, &mut seeded(a.seed, 1, 0));
        inst = inst.with_cost(cost)?;
    }
    match &a.out {
        Some(p) => polytope::write_instance(&inst, p)?,
        None => out.write_all(inst.to_text().as_bytes())?,
    }
    Ok(EXIT_OK)
}

/// Result of one solve, with iteration records for the iterative algorithm.
#[derive(Debug, Clone)]
pub struct Solved {
    pub vertex: LatticeVertex,
    pub path: SimplexPath,
    pub iterations: Vec<IterationRecord>,
    /// See [`crate::iterative::IterativeRun::exact_stop`].
    pub exact_stop: Option<usize>,
}

pub fn solve(inst: &Instance, algorithm: Algorithm, rule: PivotRule) -> Result<Solved, PathError> {
    if algorithm == Algorithm::Iterative {
        let r = run_iterative(inst, rule)?;
        return Ok(Solved {
            vertex: r.vertex,
            path: r.path,
            iterations: r.iterations,
            exact_stop: r.exact_stop,
        });
    }
    let (vertex, path) = paths::run(inst, algorithm, rule)?;
    Ok(Solved {
        vertex,
        path,
        iterations: Vec::new(),
        exact_stop: None,
    })
}

fn cmd_solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = polytope::read_instance(&cfg.instance)?;
    let solved = solve(&inst, cfg.algorithm, cfg.pivot)?;
    let value = inst.cost_value(inst.cost(), &solved.vertex.coords);
    let report = verify::check_path(&inst, inst.cost(), &solved.path).map_err(Failure::verify)?;
    let mut trace = Trace::new(&inst, &solved.path).with_iterations(&solved.iterations);
    trace.exact_stop = solved.exact_stop;
    let mut code = EXIT_OK;
    let mut problems = Vec::new();
    if !report.all_satisfied() {
        code = EXIT_VERIFY;
        problems.push("bound violated".to_string());
    }
    if solved.iterations.iter().any(|r| !r.certificate.all_checked()) {
        code = EXIT_VERIFY;
        problems.push("dual certificate check failed".to_string());
    }
    let mut verified = "skipped".to_string();
    if cfg.verify {
        match verify::brute_force_optimum(&inst, inst.cost()) {
            Ok(bf) => {
                let v = Verification::new(&bf, &value);
                verified = if v.matches { "ok".into() } else { format!("mismatch (brute force {})", bf.value) };
                if !v.matches {
                    code = EXIT_VERIFY;
                    problems.push("optimum mismatch".into());
                }
                trace.verification = Some(v);
            }
            Err(VerifyError::TooLarge(m)) => verified = format!("skipped ({m})"),
            Err(e) => return Err(Failure::verify(e)),
        }
    }
    trace.bound_report = Some(report.clone());
    if let Some(p) = &cfg.trace {
        fs::write(p, trace.to_json())?;
    }
    let coords: Vec<String> = solved.vertex.coords.iter().map(|x| x.to_string()).collect();
    writeln!(out, "algorithm: {}", cfg.algorithm)?;
    writeln!(out, "pivot: {}", cfg.pivot)?;
    writeln!(out, "vertex: {}", coords.join(" "))?;
    writeln!(out, "value: {value}")?;
    writeln!(out, "length: {}", solved.path.length())?;
    writeln!(out, "oracle_calls: {}", solved.path.oracle_calls)?;
    if cfg.algorithm == Algorithm::Iterative {
        writeln!(out, "iterations: {}", solved.iterations.len())?;
        if let Some(i) = solved.exact_stop {
            writeln!(out, "exact_stop: iteration {i}")?;
        }
    }
    for b in &report.bounds {
        writeln!(out, "bound {}: {} <= {} {}", b.name, b.observed, b.bound, if b.satisfied { "ok" } else { "VIOLATED" })?;
    }
    writeln!(out, "verify: {verified}")?;
    if !problems.is_empty() {
        writeln!(out, "problems: {}", problems.join(", "))?;
    }
    Ok(code)
}

fn cmd_preprocess(a: &PreprocessArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = a.instance.as_ref().map(polytope::read_instance).transpose()?;
    let cost = match (&a.cost, &inst) {
        (Some(c), _) => parse_int_list(c)?,
        (None, Some(i)) => i.cost().to_vec(),
        (None, None) => return Err(Failure::input("preprocess needs --cost or --instance")),
    };
    let big_n = match (&a.big_n, &inst) {
        (Some(n), _) => n.clone(),
        (None, Some(i)) => i.nk() + BigInt::one(),
        (None, None) => return Err(Failure::input("preprocess needs --big-n or --instance")),
    };
    if !big_n.is_positive() {
        return Err(Failure::input("N must be positive"));
    }
    let r = preprocess::frank_tardos_int(&cost, &big_n);
    let s: Vec<String> = r.cbreve.iter().map(|x| x.to_string()).collect();
    writeln!(out, "cbreve: {}", s.join(","))?;
    writeln!(out, "norm: {}", r.norm())?;
    writeln!(out, "norm_bits: {}", r.norm().bits())?;
    writeln!(out, "bound_bits: {}", r.bound.bits())?;
    writeln!(out, "within_bound: {}", r.within_bound())?;
    Ok(if r.within_bound() { EXIT_OK } else { EXIT_INTERNAL })
}

/// Fixed CSV layout of `bench`.
pub fn bench_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "family",
        "n",
        "m",
        "k",
        "alpha",
        "cost_norm",
        "cost_index",
        "algorithm",
        "pivot",
        "path_length",
        "oracle_calls",
        "final_value",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for b in bound::ALL {
        h.push(format!("{b}_bound"));
        h.push(format!("{b}_ok"));
    }
    for s in ["path_valid", "optimum", "bound_satisfied", "error"] {
        h.push(s.into());
    }
    h
}

struct Job {
    family: Family,
    inst: Instance,
    cost_index: usize,
    algorithm: Algorithm,
}

fn bench_instances(a: &BenchArgs) -> Result<Vec<Instance>, Failure> {
    let list = |s: &str| parse_range(s).map_err(Failure::input);
    let mut out = Vec::new();
    match a.family {
        Family::Hypercube | Family::DegenerateHypercube | Family::OddCycle => {
            let ks = if a.family == Family::OddCycle { vec![1] } else { list(&a.k)? };
            for n in list(&a.n)? {
                for &k in &ks {
                    let n = n as usize;
                    let inst = match a.family {
                        Family::Hypercube => polytope::gen_hypercube(n, k)?,
                        Family::DegenerateHypercube => polytope::gen_degenerate_hypercube(n, k)?,
                        _ => polytope::gen_odd_cycle_stable_set(n)?,
                    };
                    out.push(inst);
                }
            }
        }
        Family::Transportation => {
            for r in list(&a.rows)? {
                for c in list(&a.cols)? {
                    for cap in list(&a.cap)? {
                        let mut rng = seeded(a.seed, 2, out.len() as u64);
                        out.push(polytope::random_transportation(r as usize, c as usize, cap, &mut rng)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn corrupt(path: &mut SimplexPath) {
    let last = path.last().clone();
    path.vertices.push(last);
    match path.phases.last_mut() {
        Some(p) => p.length += 1,
        None => path.phases.push(paths::Phase {
            label: "fault".into(),
            scale: None,
            iteration: None,
            cost: Vec::new(),
            start: 0,
            length: 1,
        }),
    }
}

fn bench_row(job: &Job, pivot: PivotRule, check: bool, fault: bool) -> (Vec<String>, bool) {
    let inst = &job.inst;
    let cost = inst.cost();
    let mut row = vec![
        job.family.name().to_string(),
        inst.n().to_string(),
        inst.m().to_string(),
        inst.k().to_string(),
        inst.alpha().to_string(),
        cost.iter().map(|c| c.abs()).max().unwrap_or_default().to_string(),
        job.cost_index.to_string(),
        job.algorithm.to_string(),
        pivot.to_string(),
    ];
    let blank_tail = |row: &mut Vec<String>, err: String| {
        row.resize(bench_header().len() - 1, String::new());
        let len = row.len();
        row[len - 1] = "false".into();
        row.push(err);
    };
    let mut solved = match solve(inst, job.algorithm, pivot) {
        Ok(s) => s,
        Err(e) => {
            blank_tail(&mut row, e.to_string());
            return (row, false);
        }
    };
    if fault {
        corrupt(&mut solved.path);
    }
    row.push(solved.path.length().to_string());
    row.push(solved.path.oracle_calls.to_string());
    row.push(inst.cost_value(cost, &solved.vertex.coords).to_string());
    let (report, path_err) = match verify::check_path(inst, cost, &solved.path) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    for b in bound::ALL {
        match report.as_ref().and_then(|r: &BoundReport| r.get(b)) {
            Some(r) => {
                row.push(r.bound.clone());
                row.push(r.satisfied.to_string());
            }
            None => {
                row.push(String::new());
                row.push(String::new());
            }
        }
    }
    row.push(path_err.is_none().to_string());
    let mut ok = report.as_ref().is_some_and(|r| r.all_satisfied())
        && solved.iterations.iter().all(|r| r.certificate.all_checked());
    let mut error = path_err.unwrap_or_default();
    if check {
        match verify::brute_force_optimum(inst, cost) {
            Ok(bf) => {
                let m = bf.value == inst.cost_value(cost, &solved.vertex.coords);
                ok &= m;
                row.push(if m { "match" } else { "mismatch" }.into());
            }
            Err(VerifyError::TooLarge(_)) => row.push("skipped".into()),
            Err(e) => {
                ok = false;
                error = e.to_string();
                row.push("error".into());
            }
        }
    } else {
        row.push("unchecked".into());
    }
    row.push(ok.to_string());
    row.push(error);
    (row, ok)
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let algorithms = parse_algorithms(&a.algorithms)?;
    let instances = bench_instances(a)?;
    let mut jobs = Vec::new();
    for (ii, inst) in instances.iter().enumerate() {
        let costs = if a.costs == 0 { 1 } else { a.costs };
        for ci in 0..costs {
            let inst = if a.costs == 0 {
                inst.clone()
            } else {
                let c = polytope::random_cost(inst.n(), a.cost_bound, &mut seeded(a.seed, 3 + ii as u64, ci as u64));
                inst.with_cost(c)?
            };
            for &algorithm in &algorithms {
                jobs.push(Job {
                    family: a.family,
                    inst: inst.clone(),
                    cost_index: ci,
                    algorithm,
                });
            }
        }
    }
    let rows: Vec<(Vec<String>, bool)> = jobs
        .par_iter()
        .map(|j| bench_row(j, a.pivot, a.verify, a.inject_fault))
        .collect();

    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(bench_header()).map_err(Failure::input)?;
        for (r, _) in &rows {
            w.write_record(r).map_err(Failure::input)?;
        }
        w.flush()?;
    }
    match &a.out {
        Some(p) => fs::write(p, &buf)?,
        None => out.write_all(&buf)?,
    }
    Ok(if rows.iter().all(|(_, ok)| *ok) { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = polytope::read_instance(&a.instance)?;
    let bf = match verify::brute_force_optimum(&inst, inst.cost()) {
        Ok(b) => Some(b),
        Err(VerifyError::TooLarge(m)) => {
            writeln!(out, "brute force skipped: {m}")?;
            None
        }
        Err(e) => return Err(Failure::verify(e)),
    };
    if let Some(b) = &bf {
        writeln!(out, "brute force optimum: {} ({} witnesses, {})", b.value, b.witnesses.len(), b.method)?;
    }
    let mut failures = 0;
    let check = |label: String, path: &SimplexPath, out: &mut dyn Write| -> Result<bool, Failure> {
        let value = inst.cost_value(inst.cost(), &path.last().coords);
        let status = match verify::check_path(&inst, inst.cost(), path) {
            Err(e) => format!("invalid path: {e}"),
            Ok(r) if !r.all_satisfied() => "bound violated".into(),
            Ok(_) => match &bf {
                Some(b) if b.value != value => format!("value {value} != {}", b.value),
                _ => "ok".into(),
            },
        };
        writeln!(out, "{label}: length {} value {value} {status}", path.length())?;
        Ok(status == "ok")
    };
    if let Some(t) = &a.trace {
        let text = fs::read_to_string(t)?;
        let trace = Trace::from_json(&text).map_err(|e| Failure::input(format!("bad trace: {e}")))?;
        let path = trace.to_path();
        if !check(format!("trace {}/{}", trace.algorithm, trace.pivot), &path, out)? {
            failures += 1;
        }
    } else {
        for alg in parse_algorithms(&a.algorithms)? {
            for rule in PivotRule::ALL {
                match solve(&inst, alg, rule) {
                    Ok(s) => {
                        if !check(format!("{alg}/{rule}"), &s.path, out)? {
                            failures += 1;
                        }
                    }
                    Err(e) => {
                        failures += 1;
                        writeln!(out, "{alg}/{rule}: error {e}")?;
                    }
                }
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_VERIFY })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["lsimplex"];
        full.extend_from_slice(args);
        let code = run_cli(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("3,1").unwrap(), vec![3, 1]);
        assert!(parse_range("3..2").unwrap().is_empty());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn gen_row_counts() {
        let (code, text, _) = run(&["gen", "hypercube", "--n", "3", "--k", "2"]);
        assert_eq!(code, 0);
        assert_eq!(Instance::parse(&text).unwrap().m(), 6);
        let (_, text, _) = run(&["gen", "odd-cycle", "--n", "5"]);
        assert_eq!(Instance::parse(&text).unwrap().m(), 11);
        let (code, _, err) = run(&["gen", "hypercube", "--n", "0"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("n >= 1"));
    }

    #[test]
    fn empty_bench_is_header_only() {
        let (code, text, _) = run(&["bench", "--n", "3..2"]);
        assert_eq!(code, 0);
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.trim_end().split(',').count(), bench_header().len());
    }

    #[test]
    fn unknown_pivot_is_usage_error() {
        let (code, _, err) = run(&["solve", "--instance", "x", "--pivot", "steepest"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("steepest"));
    }
}
