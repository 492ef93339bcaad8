//! Shannon entropy over finite distributions, in bits.
//!
//! Everything here works on validated probability tables: [`ProbDist`] for a
//! single variable, [`PairJoint`] for a pair `(X, Y)` and [`FullJoint`] for a
//! tuple of binary variables `(A_0, ..., A_{m-1})`. The convention
//! `0 log 0 = 0` is applied by branching on exact zeros.

use crate::error::{Error, Result};

/// Normalization slack accepted when validating a table.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Tolerance used for the entropy identities (chain rule, chain bound).
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Largest number of binary variables a [`FullJoint`] may hold.
pub const MAX_FULL_JOINT_VARS: usize = 20;

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution("no outcomes".into()));
    }
    let mut total = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidDistribution(format!("weight {i} is {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    Ok(())
}

/// `-sum p log2 p` over raw weights, skipping zeros.
fn entropy_of(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Probability distribution of a single discrete variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    weights: Vec<f64>,
}

impl ProbDist {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights)?;
        Ok(Self { weights })
    }

    /// Two-outcome distribution `(1 - p, p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            weights: vec![1.0 - p, p],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Joint distribution of a pair `(X, Y)`; rows index `X`, columns index `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairJoint {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl PairJoint {
    /// Builds a joint from a row-major table.
    pub fn new(rows: usize, cols: usize, table: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || table.len() != rows * cols {
            return Err(Error::InvalidDistribution(format!(
                "table of {} entries does not match shape {rows}x{cols}",
                table.len()
            )));
        }
        validate_weights(&table)?;
        Ok(Self { rows, cols, table })
    }

    /// 2x2 joint of two bits, `table[x][y] = P(X = x, Y = y)`.
    pub fn binary(table: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(2, 2, table.concat())
    }

    /// Joint of two bits from `P(X = 1)` and the two conditionals `P(Y = 1 | X = x)`.
    pub fn from_conditionals(p_x1: f64, p_y1_given_x0: f64, p_y1_given_x1: f64) -> Result<Self> {
        check_probability("P(X=1)", p_x1)?;
        check_probability("P(Y=1|X=0)", p_y1_given_x0)?;
        check_probability("P(Y=1|X=1)", p_y1_given_x1)?;
        let p_x0 = 1.0 - p_x1;
        Self::binary([
            [p_x0 * (1.0 - p_y1_given_x0), p_x0 * p_y1_given_x0],
            [p_x1 * (1.0 - p_y1_given_x1), p_x1 * p_y1_given_x1],
        ])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.cols + y]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Marginal of the row variable `X`.
    pub fn row_marginal(&self) -> ProbDist {
        ProbDist {
            weights: self.table.chunks(self.cols).map(|r| r.iter().sum()).collect(),
        }
    }

    /// Marginal of the column variable `Y`.
    pub fn col_marginal(&self) -> ProbDist {
        let weights = (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
            .collect();
        ProbDist { weights }
    }

    /// `P(Y = y | X = x)`, or `None` when `P(X = x) = 0`.
    pub fn conditional(&self, x: usize, y: usize) -> Option<f64> {
        let row = &self.table[x * self.cols..(x + 1) * self.cols];
        let px: f64 = row.iter().sum();
        (px > 0.0).then(|| row[y] / px)
    }

    /// Half the L1 distance between two joints of the same shape.
    pub fn total_variation(&self, other: &PairJoint) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        0.5 * self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Joint distribution of `m` binary variables. Entry `i` holds the
/// probability of the tuple whose variable `j` equals bit `j` of `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullJoint {
    vars: usize,
    table: Vec<f64>,
}

impl FullJoint {
    pub fn new(vars: usize, table: Vec<f64>) -> Result<Self> {
        if vars == 0 || vars > MAX_FULL_JOINT_VARS {
            return Err(Error::out_of_range("binary variables", vars as i128, 1, MAX_FULL_JOINT_VARS as i128));
        }
        if table.len() != 1 << vars {
            return Err(Error::InvalidDistribution(format!(
                "table of {} entries for {vars} binary variables",
                table.len()
            )));
        }
        validate_weights(&table)?;
        Ok(Self { vars, table })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Marginal of variable `i`.
    pub fn marginal(&self, i: usize) -> ProbDist {
        assert!(i < self.vars);
        let mut weights = vec![0.0; 2];
        for (idx, &p) in self.table.iter().enumerate() {
            weights[(idx >> i) & 1] += p;
        }
        ProbDist { weights }
    }

    /// Pairwise marginal of `(A_i, A_j)` as a 2x2 joint with `A_i` on rows.
    pub fn pair_marginal(&self, i: usize, j: usize) -> PairJoint {
        assert!(i < self.vars && j < self.vars);
        let mut table = vec![0.0; 4];
        for (idx, &p) in self.table.iter().enumerate() {
            table[2 * ((idx >> i) & 1) + ((idx >> j) & 1)] += p;
        }
        PairJoint { rows: 2, cols: 2, table }
    }
}

/// Any validated table whose cells can be flattened into one distribution.
pub trait JointTable {
    fn cells(&self) -> &[f64];
}

impl JointTable for PairJoint {
    fn cells(&self) -> &[f64] {
        &self.table
    }
}

impl JointTable for FullJoint {
    fn cells(&self) -> &[f64] {
        &self.table
    }
}

impl JointTable for ProbDist {
    fn cells(&self) -> &[f64] {
        &self.weights
    }
}

fn check_probability(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: x,
            domain: "[0, 1]",
        })
    }
}

pub fn shannon_entropy(dist: &ProbDist) -> f64 {
    entropy_of(&dist.weights)
}

/// `f(x) = -x log2 x` on `[0, 1]`, with `f(0) = 0`.
pub fn neg_x_log2_x(x: f64) -> Result<f64> {
    check_probability("x", x)?;
    Ok(if x == 0.0 { 0.0 } else { -x * x.log2() })
}

/// Binary entropy `H(x) = -x log2 x - (1 - x) log2 (1 - x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_probability("x", x)?;
    Ok(neg_x_log2_x(x)? + neg_x_log2_x(1.0 - x)?)
}

/// Entropy of the flattened table.
pub fn joint_entropy<J: JointTable + ?Sized>(joint: &J) -> f64 {
    entropy_of(joint.cells())
}

/// `H(Y | X)`, evaluated as `sum_x P(x) H(Y | X = x)`.
///
/// This equals `H(X, Y) - H(X)` but never goes negative through cancellation.
pub fn conditional_entropy(joint: &PairJoint) -> f64 {
    joint
        .table
        .chunks(joint.cols)
        .map(|row| {
            let px: f64 = row.iter().sum();
            if px > 0.0 {
                px * row
                    .iter()
                    .filter(|&&p| p > 0.0)
                    .map(|&p| -(p / px) * (p / px).log2())
                    .sum::<f64>()
            } else {
                0.0
            }
        })
        .sum()
}

/// Outcome of comparing a joint entropy to its successive-conditioning upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainBound {
    /// `H(A_0, ..., A_{m-1})`
    pub lhs: f64,
    /// `H(A_0) + sum_i H(A_{i+1} | A_i)`
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `H(A_0, ..., A_L) <= H(A_0) + sum_i H(A_{i+1} | A_i)` on a joint.
pub fn chain_bound_check(full: &FullJoint) -> Result<ChainBound> {
    if full.vars < 2 {
        return Err(Error::out_of_range("binary variables", full.vars as i128, 2, MAX_FULL_JOINT_VARS as i128));
    }
    let lhs = joint_entropy(full);
    let rhs = shannon_entropy(&full.marginal(0))
        + (0..full.vars - 1)
            .map(|i| conditional_entropy(&full.pair_marginal(i, i + 1)))
            .sum::<f64>();
    Ok(ChainBound {
        lhs,
        rhs,
        holds: lhs <= rhs + IDENTITY_TOLERANCE,
    })
}
