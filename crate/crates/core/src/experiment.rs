//! The two-time measurement experiment on many copies of the search.
//!
//! Each copy measures the output register only after the first oracle call
//! of iterations `k` and `k + 1`. This module produces the joint of
//! `(A_k, A_{k+1})` three ways (closed form, exact branch enumeration on the
//! subspace engine, and seeded Monte-Carlo sampling of independent copies),
//! sums the conditional entropies over `k`, and compares the sum to the
//! information that solving the search must produce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::classical::{classical_full_joint_entropy, classical_per_step, classical_success_probability, QuerySchedule, MAX_CLASSICAL_BITS};
use crate::entropy::{binary_entropy, conditional_entropy, PairJoint};
use crate::error::{Error, Result};
use crate::qsim::{GroverEngine, GroverParams, SubspaceState, MAX_SUBSPACE_BITS};

/// Slack applied to the verdict `rhs < I`.
pub const VERDICT_TOLERANCE: f64 = 1e-9;

/// Bootstrap resamples behind the Monte-Carlo standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

pub const MIN_EXPERIMENT_BITS: u32 = 3;

/// Longest iteration budget for which per-step terms are materialized.
pub const MAX_PER_STEP_ITERATIONS: u64 = 1 << 20;

/// Largest `n` for which sweeps attach the classical sequential baseline.
pub const CLASSICAL_BASELINE_MAX_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Exact,
    MonteCarlo,
    /// Classical schedules: enumeration over the marked item.
    Enumeration,
}

/// What happens after the first measurement reads 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Keep iterating as if nothing happened.
    Standard,
    /// Stop the search: the output register stays 0 from then on.
    HaltOnHit,
    /// Classical schedules have no variant.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSource {
    Analytic,
    ExactBranch,
    Sampled,
}

/// How a sweep picks the iteration budget for each `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterationPolicy {
    /// `ceil(sqrt(2^n))`
    CeilSqrt,
    /// `round(pi/4 * sqrt(2^n))`
    GroverOptimal,
}

impl IterationPolicy {
    pub fn iterations(self, n: u32) -> u64 {
        match self {
            IterationPolicy::CeilSqrt => ceil_sqrt_pow2(n),
            IterationPolicy::GroverOptimal => (std::f64::consts::FRAC_PI_4 * (n as f64 / 2.0).exp2()).round() as u64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IterationPolicy::CeilSqrt => "ceil-sqrt",
            IterationPolicy::GroverOptimal => "grover-optimal",
        }
    }
}

/// `ceil(sqrt(2^n))` in exact integer arithmetic.
pub fn ceil_sqrt_pow2(n: u32) -> u64 {
    let r = (1u64 << (n / 2)) as u128;
    if n % 2 == 0 {
        r as u64
    } else {
        // sqrt(2^n) = r * sqrt(2); 2^n is not a square so the ceiling is isqrt + 1
        (((r * r * 2) as u64).isqrt()) + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: u32,
    pub iterations: u64,
    pub mode: Method,
    pub samples: u64,
    pub seed: u64,
    pub variant: Variant,
}

impl ExperimentConfig {
    pub fn new(n: u32, iterations: u64) -> Self {
        Self {
            n,
            iterations,
            mode: Method::Analytic,
            samples: 100_000,
            seed: 0,
            variant: Variant::Standard,
        }
    }

    pub fn with_mode(mut self, mode: Method) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_samples(mut self, samples: u64, seed: u64) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_EXPERIMENT_BITS..=MAX_SUBSPACE_BITS).contains(&self.n) {
            return Err(Error::out_of_range("n", self.n, MIN_EXPERIMENT_BITS, MAX_SUBSPACE_BITS));
        }
        if self.iterations == 0 {
            return Err(Error::out_of_range("L", 0, 1, u64::MAX));
        }
        if self.samples == 0 {
            return Err(Error::out_of_range("samples", 0, 1, u64::MAX));
        }
        match (self.mode, self.variant) {
            (Method::Enumeration, _) | (_, Variant::None) => {
                Err(Error::Usage("quantum experiments take analytic, exact or monte-carlo mode with a standard or halt-on-hit variant".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Joint of two successive output measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistribution {
    pub n: u32,
    pub k: u64,
    pub variant: Variant,
    pub joint: PairJoint,
    pub source: PairSource,
    /// Copies simulated, for sampled distributions.
    pub samples: Option<u64>,
    /// Bootstrap standard error of the plug-in conditional entropy; `None`
    /// when it cannot be estimated (fewer than two copies).
    pub stderr: Option<f64>,
}

impl PairDistribution {
    /// `H(A_{k+1} | A_k)` of the stored joint.
    pub fn conditional_entropy(&self) -> f64 {
        conditional_entropy(&self.joint)
    }
}

/// Exact joint of `(A_k, A_{k+1})` starting from `state`, the state right
/// before the first oracle call of iteration `k` (the initial state for
/// `k = 0` and `k = 1`).
pub fn pair_joint_from<S: GroverEngine>(state: &S, k: u64, variant: Variant) -> Result<PairJoint> {
    let p_next = |s: &S| -> f64 { s.apply_oracle().output_one_probability() };
    if k == 0 {
        let p1 = p_next(state);
        return PairJoint::binary([[1.0 - p1, p1], [0.0, 0.0]]);
    }
    let mut table = [[0.0; 2]; 2];
    for branch in state.apply_oracle().measure_output() {
        let a = branch.outcome as usize;
        let p_b1 = if a == 1 && variant == Variant::HaltOnHit {
            0.0
        } else {
            p_next(&branch.post_state.complete_iteration()?)
        };
        table[a] = [branch.probability * (1.0 - p_b1), branch.probability * p_b1];
    }
    PairJoint::binary(table)
}

fn check_variant(variant: Variant) -> Result<()> {
    if variant == Variant::None {
        return Err(Error::Usage("quantum pairs need the standard or halt-on-hit variant".into()));
    }
    Ok(())
}

/// Exact joint of `(A_k, A_{k+1})` by branch enumeration on the subspace engine.
pub fn exact_pair_distribution(n: u32, k: u64, variant: Variant) -> Result<PairDistribution> {
    check_variant(variant)?;
    let initial = SubspaceState::initial(n)?;
    let state = crate::qsim::iterate(&initial, k.saturating_sub(1))?;
    Ok(PairDistribution {
        n,
        k,
        variant,
        joint: pair_joint_from(&state, k, variant)?,
        source: PairSource::ExactBranch,
        samples: None,
        stderr: None,
    })
}

/// Exact pairs for `k = 0..iterations`, advancing one shared unmeasured state.
pub fn exact_pair_sequence(n: u32, iterations: u64, variant: Variant) -> Result<Vec<PairDistribution>> {
    check_variant(variant)?;
    let mut state = SubspaceState::initial(n)?;
    let mut pairs = Vec::with_capacity(iterations as usize);
    for k in 0..iterations {
        if k >= 2 {
            state = state.grover_iteration()?;
        }
        pairs.push(PairDistribution {
            n,
            k,
            variant,
            joint: pair_joint_from(&state, k, variant)?,
            source: PairSource::ExactBranch,
            samples: None,
            stderr: None,
        });
    }
    Ok(pairs)
}

/// `P(A_k = 1)` without earlier measurements: `sin^2((2k - 1) theta / 2)`, 0 for `k = 0`.
pub fn first_hit_probability(params: &GroverParams, k: u64) -> f64 {
    if k == 0 {
        0.0
    } else {
        ((2 * k - 1) as f64 * params.theta() / 2.0).sin().powi(2)
    }
}

/// Closed-form `H(A_{k+1} | A_k)`: `H(cos^2(theta/2))` for `k = 0`, `H(cos^2 theta)` otherwise.
pub fn analytic_pair_conditional_entropy(n: u32, k: u64) -> Result<f64> {
    analytic_pair_conditional_entropy_variant(n, k, Variant::Standard)
}

/// Closed form for either variant. Halting after a hit removes the
/// `A_k = 1` branch's uncertainty, leaving `(1 - P(A_k = 1)) H(sin^2 theta)`.
pub fn analytic_pair_conditional_entropy_variant(n: u32, k: u64, variant: Variant) -> Result<f64> {
    check_variant(variant)?;
    let p = GroverParams::new(n)?;
    if k == 0 {
        // H(cos^2(theta/2)) = H(2^-n)
        return binary_entropy(p.marked_weight());
    }
    let h = binary_entropy(p.sin2_theta())?;
    Ok(match variant {
        Variant::HaltOnHit => (1.0 - first_hit_probability(&p, k)) * h,
        _ => h,
    })
}

fn analytic_pair_joint(n: u32, k: u64, variant: Variant) -> Result<PairJoint> {
    let p = GroverParams::new(n)?;
    if k == 0 {
        let p1 = p.marked_weight();
        return PairJoint::binary([[1.0 - p1, p1], [0.0, 0.0]]);
    }
    let after_hit = if variant == Variant::HaltOnHit { 0.0 } else { p.cos2_theta() };
    PairJoint::from_conditionals(first_hit_probability(&p, k), p.sin2_theta(), after_hit)
}

/// Closed-form right-hand side with a real-valued iteration budget:
/// `H(cos^2(theta/2)) + (L - 1) H(cos^2 theta)`.
pub fn analytic_rhs_real(n: u32, iterations: f64) -> Result<f64> {
    let p = GroverParams::new(n)?;
    Ok(binary_entropy(p.marked_weight())? + (iterations - 1.0) * binary_entropy(p.sin2_theta())?)
}

/// Per-step terms and, for sampled runs, their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct PerStep {
    pub terms: Vec<f64>,
    pub stderr: Option<f64>,
}

/// `H(A_{k+1} | A_k)` for `k = 0..L` by the configured method.
pub fn quantum_per_step(config: &ExperimentConfig) -> Result<PerStep> {
    config.validate()?;
    let (n, l, variant) = (config.n, config.iterations, config.variant);
    if l > MAX_PER_STEP_ITERATIONS {
        return Err(Error::out_of_range("L", l, 1, MAX_PER_STEP_ITERATIONS));
    }
    match config.mode {
        Method::Analytic => {
            let terms = (0..l)
                .map(|k| analytic_pair_conditional_entropy_variant(n, k, variant))
                .collect::<Result<_>>()?;
            Ok(PerStep { terms, stderr: None })
        }
        Method::Exact => Ok(PerStep {
            terms: exact_pair_sequence(n, l, variant)?
                .iter()
                .map(PairDistribution::conditional_entropy)
                .collect(),
            stderr: None,
        }),
        Method::MonteCarlo => {
            let mut terms = Vec::with_capacity(l as usize);
            let mut var = Some(0.0);
            for k in 0..l {
                let pair = sample_pairs(config, k)?;
                terms.push(pair.conditional_entropy());
                var = var.zip(pair.stderr).map(|(v, s)| v + s * s);
            }
            Ok(PerStep {
                terms,
                stderr: var.map(f64::sqrt),
            })
        }
        Method::Enumeration => unreachable!("rejected by validate"),
    }
}

/// `sum_{k=0}^{L-1} H(A_{k+1} | A_k)` for the measured search.
///
/// The analytic standard-variant sum is evaluated in closed form, so it
/// accepts any budget; the other methods go through [`quantum_per_step`].
pub fn quantum_rhs_sum(config: &ExperimentConfig) -> Result<f64> {
    config.validate()?;
    match (config.mode, config.variant) {
        (Method::Analytic, Variant::Standard) => analytic_rhs_real(config.n, config.iterations as f64),
        (Method::Analytic, _) if config.iterations > MAX_PER_STEP_ITERATIONS => (0..config.iterations)
            .map(|k| analytic_pair_conditional_entropy_variant(config.n, k, config.variant))
            .sum(),
        _ => Ok(quantum_per_step(config)?.terms.iter().sum()),
    }
}

/// `(sqrt(2^n) - 1)(n - 2) / 2^(n-3) + 1`, an upper bound on the right-hand
/// side at `L = sqrt(2^n)`. Requires `n >= 3`.
pub fn paper_bound(n: u32) -> Result<f64> {
    if n < MIN_EXPERIMENT_BITS {
        return Err(Error::out_of_range("n", n, MIN_EXPERIMENT_BITS, u32::MAX));
    }
    let n_f = n as f64;
    Ok(((n_f / 2.0).exp2() - 1.0) * (n_f - 2.0) / (n_f - 3.0).exp2() + 1.0)
}

/// Everything about a run except the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportContext {
    pub n: u32,
    pub iterations: u64,
    pub policy: String,
    pub method: Method,
    pub variant: Variant,
    pub per_step: Vec<f64>,
    pub rhs_stderr: Option<f64>,
    pub paper_bound: Option<f64>,
    pub success_probability: Option<f64>,
    pub oracle_calls: u64,
    pub full_joint_entropy: Option<f64>,
    pub classical_baseline: Option<f64>,
}

/// Verdict of `I <= sum_k H(A_{k+1} | A_k)` for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub n: u32,
    #[serde(rename = "L")]
    pub iterations: u64,
    pub policy: String,
    pub rhs_sum: f64,
    pub information_target: f64,
    pub violated: bool,
    /// `I - rhs_sum`
    pub margin: f64,
    pub paper_bound: Option<f64>,
    pub success_probability: Option<f64>,
    pub method: Method,
    pub variant: Variant,
    /// Raw oracle calls: two per quantum iteration, one per classical query.
    pub oracle_calls: u64,
    pub rhs_stderr: Option<f64>,
    pub full_joint_entropy: Option<f64>,
    pub classical_baseline: Option<f64>,
    pub per_step: Vec<f64>,
}

/// Compares the information target `I` with the summed per-step entropies.
pub fn evaluate_inequality(information_target: f64, context: ReportContext) -> Result<InequalityReport> {
    if !(information_target >= 0.0 && information_target.is_finite()) {
        return Err(Error::Domain {
            what: "information target",
            value: information_target,
            domain: "[0, inf)",
        });
    }
    let rhs_sum: f64 = context.per_step.iter().sum();
    Ok(InequalityReport {
        n: context.n,
        iterations: context.iterations,
        policy: context.policy,
        rhs_sum,
        information_target,
        violated: rhs_sum < information_target - VERDICT_TOLERANCE,
        margin: information_target - rhs_sum,
        paper_bound: context.paper_bound,
        success_probability: context.success_probability,
        method: context.method,
        variant: context.variant,
        oracle_calls: context.oracle_calls,
        rhs_stderr: context.rhs_stderr,
        full_joint_entropy: context.full_joint_entropy,
        classical_baseline: context.classical_baseline,
        per_step: context.per_step,
    })
}

/// Full quantum report for a configuration, with `I = n` unless overridden.
pub fn quantum_report(config: &ExperimentConfig, policy: &str, information_target: Option<f64>) -> Result<InequalityReport> {
    let per_step = quantum_per_step(config)?;
    let params = GroverParams::new(config.n)?;
    evaluate_inequality(
        information_target.unwrap_or(config.n as f64),
        ReportContext {
            n: config.n,
            iterations: config.iterations,
            policy: policy.to_string(),
            method: config.mode,
            variant: config.variant,
            per_step: per_step.terms,
            rhs_stderr: per_step.stderr,
            paper_bound: Some(paper_bound(config.n)?),
            success_probability: Some(params.success_after(config.iterations)),
            oracle_calls: 2 * config.iterations,
            full_joint_entropy: None,
            classical_baseline: None,
        },
    )
}

/// Report for a deterministic classical schedule, with `I = n` unless overridden.
pub fn classical_report(schedule: &QuerySchedule, policy: &str, information_target: Option<f64>) -> Result<InequalityReport> {
    let n = schedule.n();
    evaluate_inequality(
        information_target.unwrap_or(n as f64),
        ReportContext {
            n,
            iterations: schedule.len() as u64,
            policy: policy.to_string(),
            method: Method::Enumeration,
            variant: Variant::None,
            per_step: classical_per_step(schedule)?,
            rhs_stderr: None,
            paper_bound: None,
            success_probability: Some(classical_success_probability(schedule)),
            oracle_calls: schedule.len() as u64,
            full_joint_entropy: Some(classical_full_joint_entropy(schedule).bits),
            classical_baseline: None,
        },
    )
}

/// Counts of `(A_k, A_{k+1})` in row-major order.
fn joint_from_counts(counts: &[u64; 4], total: u64) -> Result<PairJoint> {
    PairJoint::new(2, 2, counts.iter().map(|&c| c as f64 / total as f64).collect())
}

fn sample_branch(probabilities: [f64; 2], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    usize::from(u >= probabilities[0])
}

/// Simulates `config.samples` independent copies, each measuring only `A_k`
/// and `A_{k+1}`, and returns the empirical joint.
///
/// Copy `i` draws from the ChaCha8 stream `i` of `config.seed`; the bootstrap
/// uses stream `u64::MAX`. Counts are integers, so the result is a pure
/// function of the configuration.
pub fn sample_pairs(config: &ExperimentConfig, k: u64) -> Result<PairDistribution> {
    if config.samples == 0 {
        return Err(Error::out_of_range("samples", 0, 1, u64::MAX));
    }
    check_variant(config.variant)?;
    let m = config.samples;

    // the unmeasured prefix is deterministic and shared by every copy
    let before = crate::qsim::iterate(&SubspaceState::initial(config.n)?, k.saturating_sub(1))?;
    let mut first = [0.0; 2];
    let mut second = [[0.0; 2]; 2];
    if k == 0 {
        first = [1.0, 0.0];
        let p1 = before.apply_oracle().output_one_probability();
        second[0] = [1.0 - p1, p1];
    } else {
        for branch in before.apply_oracle().measure_output() {
            let a = branch.outcome as usize;
            first[a] = branch.probability;
            let p1 = if a == 1 && config.variant == Variant::HaltOnHit {
                0.0
            } else {
                branch.post_state.complete_iteration()?.apply_oracle().output_one_probability()
            };
            second[a] = [1.0 - p1, p1];
        }
    }

    let mut counts = [0u64; 4];
    for copy in 0..m {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(copy);
        let a = if k == 0 { 0 } else { sample_branch(first, &mut rng) };
        let b = sample_branch(second[a], &mut rng);
        counts[2 * a + b] += 1;
    }
    let joint = joint_from_counts(&counts, m)?;

    let stderr = if m < 2 {
        None
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(u64::MAX);
        let estimates: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
            .map(|_| resample_counts(&counts, m, &mut rng).and_then(|c| joint_from_counts(&c, m)).map(|j| conditional_entropy(&j)))
            .collect::<Result<_>>()?;
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (estimates.len() - 1) as f64;
        Some(var.sqrt())
    };

    Ok(PairDistribution {
        n: config.n,
        k,
        variant: config.variant,
        joint,
        source: PairSource::Sampled,
        samples: Some(m),
        stderr,
    })
}

/// One multinomial resample of `m` copies from the observed cell frequencies.
fn resample_counts(counts: &[u64; 4], m: u64, rng: &mut ChaCha8Rng) -> Result<[u64; 4]> {
    let mut out = [0u64; 4];
    let mut remaining_trials = m;
    let mut remaining_mass = m;
    for (i, &c) in counts.iter().enumerate() {
        if i == 3 || remaining_mass == 0 {
            out[i] = if remaining_mass == 0 { 0 } else { remaining_trials };
            continue;
        }
        let p = (c as f64 / remaining_mass as f64).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining_trials, p).map_err(|e| Error::Usage(e.to_string()))?.sample(rng);
        out[i] = draw;
        remaining_trials -= draw;
        remaining_mass -= c;
    }
    Ok(out)
}

/// Pair distribution by any method; the analytic joint uses the closed-form conditionals.
pub fn pair_distribution(config: &ExperimentConfig, k: u64) -> Result<PairDistribution> {
    match config.mode {
        Method::Analytic => Ok(PairDistribution {
            n: config.n,
            k,
            variant: config.variant,
            joint: {
                check_variant(config.variant)?;
                analytic_pair_joint(config.n, k, config.variant)?
            },
            source: PairSource::Analytic,
            samples: None,
            stderr: None,
        }),
        Method::Exact => exact_pair_distribution(config.n, k, config.variant),
        Method::MonteCarlo => sample_pairs(config, k),
        Method::Enumeration => Err(Error::Usage("enumeration applies to classical schedules".into())),
    }
}

/// Options shared by every row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub policy: IterationPolicy,
    pub mode: Method,
    pub variant: Variant,
    pub samples: u64,
    pub seed: u64,
    pub classical_baseline: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            policy: IterationPolicy::CeilSqrt,
            mode: Method::Analytic,
            variant: Variant::Standard,
            samples: 100_000,
            seed: 0,
            classical_baseline: true,
        }
    }
}

/// One report per `n`, with the classical sequential baseline attached for `n <= 12`.
pub fn sweep(n_range: std::ops::RangeInclusive<u32>, options: &SweepOptions) -> Result<Vec<InequalityReport>> {
    n_range
        .map(|n| {
            let config = ExperimentConfig {
                n,
                iterations: options.policy.iterations(n),
                mode: options.mode,
                samples: options.samples,
                seed: options.seed,
                variant: options.variant,
            };
            let mut report = quantum_report(&config, options.policy.label(), None)?;
            if options.classical_baseline && n <= CLASSICAL_BASELINE_MAX_BITS.min(MAX_CLASSICAL_BITS) {
                let schedule = QuerySchedule::sequential(n)?;
                report.classical_baseline = Some(classical_per_step(&schedule)?.iter().sum());
            }
            Ok(report)
        })
        .collect()
}
