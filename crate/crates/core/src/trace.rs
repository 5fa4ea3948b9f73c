//! JSON path traces. Integers that fit in 64 bits are written as JSON
//! numbers, larger ones as decimal strings; rationals are always strings.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::iterative::IterationRecord;
use crate::oracle::PivotRule;
use crate::paths::{Algorithm, Phase, SimplexPath};
use crate::polytope::{Instance, LatticeVertex};
use crate::verify::{BoundReport, BruteForce};

pub const TRACE_FORMAT_VERSION: u32 = 1;

/// Big integer with the number-or-string JSON encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int(v.into()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        v.parse().map(Int).map_err(|_| E::custom(format!("bad integer '{v}'")))
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

fn unints(v: &[Int]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

fn rationals(v: &[BigRational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub n: usize,
    pub m: usize,
    pub k: u64,
    pub alpha: Int,
    pub cost_norm: Int,
    pub equalities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceVertex {
    pub coords: Vec<Int>,
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePhase {
    pub label: String,
    pub scale: Option<u64>,
    pub iteration: Option<usize>,
    pub cost: Vec<Int>,
    pub start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceIteration {
    pub iteration: usize,
    pub e_before: Vec<usize>,
    pub e_after: Vec<usize>,
    pub cbar: Vec<String>,
    pub ctilde: Vec<Int>,
    pub chosen_h: usize,
    /// Nonzero multipliers as `(row, value)`.
    pub multipliers: Vec<(usize, String)>,
    pub certificate_checked: bool,
    pub segment_start: usize,
    pub segment_length: usize,
    pub segment_phases: usize,
}

impl From<&IterationRecord> for TraceIteration {
    fn from(r: &IterationRecord) -> Self {
        TraceIteration {
            iteration: r.iteration,
            e_before: r.e_before.iter().copied().collect(),
            e_after: r.e_after.iter().copied().collect(),
            cbar: rationals(&r.cbar),
            ctilde: ints(&r.ctilde),
            chosen_h: r.chosen_h,
            multipliers: r.certificate.support.iter().map(|&i| (i, r.certificate.y[i].to_string())).collect(),
            certificate_checked: r.certificate.all_checked(),
            segment_start: r.segment_start,
            segment_length: r.segment_length,
            segment_phases: r.segment_phases,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub method: String,
    pub brute_force_value: Int,
    pub witnesses: usize,
    pub matches: bool,
}

impl Verification {
    pub fn new(bf: &BruteForce, found: &BigInt) -> Self {
        Verification {
            method: bf.method.clone(),
            brute_force_value: Int(bf.value.clone()),
            witnesses: bf.witnesses.len(),
            matches: *found == bf.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub format_version: u32,
    pub algorithm: Algorithm,
    pub pivot: PivotRule,
    pub instance: InstanceStats,
    pub cost: Vec<Int>,
    pub vertices: Vec<TraceVertex>,
    pub phases: Vec<TracePhase>,
    pub cost_trace: Vec<Int>,
    pub oracle_calls: usize,
    pub certified: usize,
    pub degenerate_calls: usize,
    pub rounded_cost: Option<Vec<Int>>,
    pub path_length: usize,
    pub final_vertex: Vec<Int>,
    pub final_value: Int,
    pub bound_report: Option<BoundReport>,
    pub iterations: Vec<TraceIteration>,
    /// Iteration where the iterative run stopped on an exact rounding with
    /// no large multiplier.
    pub exact_stop: Option<usize>,
    pub verification: Option<Verification>,
}

impl Trace {
    pub fn new(inst: &Instance, path: &SimplexPath) -> Self {
        let last = path.last();
        Trace {
            format_version: TRACE_FORMAT_VERSION,
            algorithm: path.algorithm,
            pivot: path.pivot,
            instance: InstanceStats {
                n: inst.n(),
                m: inst.m(),
                k: inst.k(),
                alpha: Int(inst.alpha().clone()),
                cost_norm: Int(inst.cost().iter().map(|c| num_traits::Signed::abs(c)).max().unwrap_or_default()),
                equalities: inst.equalities().iter().copied().collect(),
            },
            cost: ints(inst.cost()),
            vertices: path
                .vertices
                .iter()
                .map(|v| TraceVertex {
                    coords: ints(&v.coords),
                    active: v.active.iter().copied().collect(),
                })
                .collect(),
            phases: path
                .phases
                .iter()
                .map(|p| TracePhase {
                    label: p.label.clone(),
                    scale: p.scale,
                    iteration: p.iteration,
                    cost: ints(&p.cost),
                    start: p.start,
                    length: p.length,
                })
                .collect(),
            cost_trace: ints(&path.cost_trace),
            oracle_calls: path.oracle_calls,
            certified: path.certified,
            degenerate_calls: path.degenerate_calls,
            rounded_cost: path.rounded_cost.as_deref().map(ints),
            path_length: path.length(),
            final_vertex: ints(&last.coords),
            final_value: Int(inst.cost_value(inst.cost(), &last.coords)),
            bound_report: None,
            iterations: Vec::new(),
            exact_stop: None,
            verification: None,
        }
    }

    pub fn with_iterations(mut self, records: &[IterationRecord]) -> Self {
        self.iterations = records.iter().map(TraceIteration::from).collect();
        self
    }

    /// Rebuilds the path stored in the trace.
    pub fn to_path(&self) -> SimplexPath {
        SimplexPath {
            algorithm: self.algorithm,
            pivot: self.pivot,
            vertices: self
                .vertices
                .iter()
                .map(|v| LatticeVertex {
                    coords: unints(&v.coords),
                    active: v.active.iter().copied().collect(),
                })
                .collect(),
            oracle_calls: self.oracle_calls,
            certified: self.certified,
            degenerate_calls: self.degenerate_calls,
            phases: self
                .phases
                .iter()
                .map(|p| Phase {
                    label: p.label.clone(),
                    scale: p.scale,
                    iteration: p.iteration,
                    cost: unints(&p.cost),
                    start: p.start,
                    length: p.length,
                })
                .collect(),
            cost_trace: unints(&self.cost_trace),
            rounded_cost: self.rounded_cost.as_deref().map(unints),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
