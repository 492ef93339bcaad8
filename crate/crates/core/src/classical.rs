//! Deterministic classical search schedules and the exact distributions of
//! their oracle outputs under a uniform prior on the marked item.
//!
//! Observable `A_0` is the constant 0 held by the output register before any
//! query; `A_i` for `i >= 1` is the oracle's answer to the `i`-th scheduled
//! input. All distributions are obtained by enumerating every marked item.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::entropy::{conditional_entropy, joint_entropy, FullJoint, PairJoint, ProbDist, MAX_FULL_JOINT_VARS};
use crate::error::{Error, Result};

pub const MAX_CLASSICAL_BITS: u32 = 20;

/// Black-box oracle `F(x) = [x == s]` over `n`-bit inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSpec {
    n: u32,
    s: u64,
}

impl OracleSpec {
    pub fn new(n: u32, s: u64) -> Result<Self> {
        check_bits(n)?;
        if s >= 1 << n {
            return Err(Error::out_of_range("s", s, 0, (1u64 << n) - 1));
        }
        Ok(Self { n, s })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn marked(&self) -> u64 {
        self.s
    }

    pub fn eval(&self, x: u64) -> Result<u8> {
        if x >= 1 << self.n {
            return Err(Error::out_of_range("x", x, 0, (1u64 << self.n) - 1));
        }
        Ok(u8::from(x == self.s))
    }
}

/// Free-function form of [`OracleSpec::eval`].
pub fn oracle_eval(spec: &OracleSpec, x: u64) -> Result<u8> {
    spec.eval(x)
}

fn check_bits(n: u32) -> Result<()> {
    if !(1..=MAX_CLASSICAL_BITS).contains(&n) {
        return Err(Error::out_of_range("n", n, 1, MAX_CLASSICAL_BITS));
    }
    Ok(())
}

/// Fixed sequence of oracle inputs `x_1, ..., x_L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySchedule {
    n: u32,
    inputs: Vec<u64>,
}

impl QuerySchedule {
    pub fn new(n: u32, inputs: Vec<u64>) -> Result<Self> {
        check_bits(n)?;
        if inputs.is_empty() {
            return Err(Error::Usage("a schedule needs at least one query".into()));
        }
        if let Some(&x) = inputs.iter().find(|&&x| x >= 1 << n) {
            return Err(Error::out_of_range("query input", x, 0, (1u64 << n) - 1));
        }
        Ok(Self { n, inputs })
    }

    /// Queries `0, 1, ..., 2^n - 1` in order.
    pub fn sequential(n: u32) -> Result<Self> {
        check_bits(n)?;
        Ok(Self {
            n,
            inputs: (0..1u64 << n).collect(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn inputs(&self) -> &[u64] {
        &self.inputs
    }

    /// Number of queries `L`.
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Every input value appears at least once.
    pub fn is_covering(&self) -> bool {
        let mut seen = vec![false; 1 << self.n];
        for &x in &self.inputs {
            seen[x as usize] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn has_distinct_inputs(&self) -> bool {
        let mut seen = vec![false; 1 << self.n];
        self.inputs.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true))
    }

    /// Value of `A_k` when the marked item is `s`.
    fn observable(&self, k: usize, s: u64) -> u8 {
        if k == 0 {
            0
        } else {
            u8::from(self.inputs[k - 1] == s)
        }
    }

    /// Parses the text form: a `n=<int>` header followed by one input per line.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines.next().ok_or(Error::Schedule {
            line: 1,
            message: "empty schedule, expected header `n=<int>`".into(),
        })?;
        let n = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::Schedule {
                line: header_line,
                message: format!("expected header `n=<int>`, found `{header}`"),
            })?;
        check_bits(n).map_err(|e| Error::Schedule {
            line: header_line,
            message: e.to_string(),
        })?;

        let mut inputs = Vec::new();
        for (line, entry) in lines {
            let x: u64 = entry.parse().map_err(|_| Error::Schedule {
                line,
                message: format!("`{entry}` is not a non-negative integer"),
            })?;
            if x >= 1 << n {
                return Err(Error::Schedule {
                    line,
                    message: format!("input {x} is out of range [0, {}]", (1u64 << n) - 1),
                });
            }
            inputs.push(x);
        }
        if inputs.is_empty() {
            return Err(Error::Schedule {
                line: header_line,
                message: "schedule has no queries".into(),
            });
        }
        Ok(Self { n, inputs })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for x in &self.inputs {
            let _ = writeln!(out, "{x}");
        }
        out
    }
}

/// Free-function form of [`QuerySchedule::sequential`].
pub fn sequential_schedule(n: u32) -> Result<QuerySchedule> {
    QuerySchedule::sequential(n)
}

/// Exact joint of `(A_k, A_{k+1})` under a uniform marked item.
pub fn classical_pair_joint(schedule: &QuerySchedule, k: usize) -> Result<PairJoint> {
    let l = schedule.len();
    if k >= l {
        return Err(Error::out_of_range("k", k as i128, 0, l as i128 - 1));
    }
    let items = 1u64 << schedule.n;
    let mut counts = [0u64; 4];
    for s in 0..items {
        let a = schedule.observable(k, s);
        let b = schedule.observable(k + 1, s);
        counts[2 * a as usize + b as usize] += 1;
    }
    let total = items as f64;
    PairJoint::new(2, 2, counts.iter().map(|&c| c as f64 / total).collect())
}

/// Per-step terms `H(A_{k+1} | A_k)` for `k = 0..L-1`.
pub fn classical_per_step(schedule: &QuerySchedule) -> Result<Vec<f64>> {
    (0..schedule.len())
        .map(|k| classical_pair_joint(schedule, k).map(|j| conditional_entropy(&j)))
        .collect()
}

/// `sum_{k=0}^{L-1} H(A_{k+1} | A_k)` for a classical schedule.
pub fn classical_rhs_sum(schedule: &QuerySchedule) -> Result<f64> {
    Ok(classical_per_step(schedule)?.iter().sum())
}

/// Entropy of the full output record together with the schedule properties
/// that decide whether it must equal `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullJointEntropy {
    pub bits: f64,
    pub covering: bool,
    pub distinct: bool,
}

impl FullJointEntropy {
    /// Whether the equality `H(A_0, ..., A_L) = n` is expected for this schedule.
    pub fn supports_information_equality(&self) -> bool {
        self.covering && self.distinct
    }
}

/// `H(A_0, ..., A_L)` under a uniform marked item.
///
/// Counts the distinct output records over all marked items instead of
/// materializing the `2^(L+1)` table, so any schedule length is accepted.
pub fn classical_full_joint_entropy(schedule: &QuerySchedule) -> FullJointEntropy {
    let items = 1u64 << schedule.n;
    let mut records: HashMap<Vec<u8>, u64> = HashMap::new();
    for s in 0..items {
        let record: Vec<u8> = (0..=schedule.len()).map(|k| schedule.observable(k, s)).collect();
        *records.entry(record).or_default() += 1;
    }
    let mut weights: Vec<f64> = records.into_values().map(|c| c as f64 / items as f64).collect();
    weights.sort_by(f64::total_cmp);
    let bits = joint_entropy(&ProbDist::new(weights).expect("enumeration is normalized"));
    FullJointEntropy {
        bits,
        covering: schedule.is_covering(),
        distinct: schedule.has_distinct_inputs(),
    }
}

/// Probability over the marked item that the output record singles it out.
pub fn classical_success_probability(schedule: &QuerySchedule) -> f64 {
    let items = 1u64 << schedule.n;
    let mut records: HashMap<Vec<u8>, u64> = HashMap::new();
    for s in 0..items {
        let record: Vec<u8> = (1..=schedule.len()).map(|k| schedule.observable(k, s)).collect();
        *records.entry(record).or_default() += 1;
    }
    records.values().filter(|&&c| c == 1).count() as f64 / items as f64
}

/// Dense joint of `(A_0, ..., A_L)`; needs `L + 1 <= 20`.
pub fn classical_full_joint(schedule: &QuerySchedule) -> Result<FullJoint> {
    let vars = schedule.len() + 1;
    if vars > MAX_FULL_JOINT_VARS {
        return Err(Error::out_of_range("schedule length", schedule.len() as i128, 1, MAX_FULL_JOINT_VARS as i128 - 1));
    }
    let items = 1u64 << schedule.n;
    let mut table = vec![0.0; 1 << vars];
    for s in 0..items {
        let idx = (0..vars).fold(0usize, |acc, k| acc | (schedule.observable(k, s) as usize) << k);
        table[idx] += 1.0 / items as f64;
    }
    FullJoint::new(vars, table)
}
