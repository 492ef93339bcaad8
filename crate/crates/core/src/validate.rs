//! Self-check suites behind `tbell validate`.
//!
//! Each suite returns the number of checks it ran and the first
//! counterexample, if any. A deliberate fault can be injected into the
//! subspace engine to confirm that the suites catch it.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{classical_full_joint_entropy, classical_rhs_sum, QuerySchedule};
use crate::entropy::{chain_bound_check, conditional_entropy, joint_entropy, shannon_entropy, FullJoint, PairJoint, IDENTITY_TOLERANCE};
use crate::error::Result;
use crate::experiment::{analytic_pair_conditional_entropy, ceil_sqrt_pow2, exact_pair_distribution, first_hit_probability, quantum_rhs_sum, ExperimentConfig, IterationPolicy, Variant};
use crate::qsim::{
    engine_pair_check, iterate, measured_pair_script, overlap_modulo_phase, FullStateVector, GroverEngine, GroverParams, MeasurementBranch, SubspaceState, MAX_FULL_BITS,
    MAX_SUBSPACE_BITS,
};

pub const RANDOM_JOINTS: usize = 1000;

/// Faults that can be planted to exercise the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Diffusion reflects about `cos(theta/2)|alpha> - sin(theta/2)|s>`.
    DiffusionSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    /// Largest `n` simulated on the dense engine.
    pub n_max: u32,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            n_max: 10,
            fault: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "{}: pass ({} checks)", self.name, self.checks),
            Some(why) => write!(f, "{}: FAIL after {} checks: {why}", self.name, self.checks),
        }
    }
}

/// Counts checks and keeps the first failure.
struct Tally {
    name: &'static str,
    checks: usize,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(describe());
        }
    }

    fn error(&mut self, e: crate::Error) {
        self.check(false, || e.to_string());
    }

    fn done(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            checks: self.checks,
            failure: self.failure,
        }
    }
}

/// Subspace engine whose diffusion mirrors the reflection axis.
#[derive(Debug, Clone)]
struct MirroredDiffusion(SubspaceState);

impl GroverEngine for MirroredDiffusion {
    fn params(&self) -> &GroverParams {
        self.0.params()
    }

    fn apply_oracle(&self) -> Self {
        Self(self.0.apply_oracle())
    }

    fn apply_output_phase(&self) -> Self {
        Self(self.0.apply_output_phase())
    }

    fn apply_diffusion(&self) -> Result<Self> {
        let p = self.0.params();
        let (c, s) = (p.cos_half(), -p.sin_half());
        let [a0, a1, s0, s1] = *self.0.amplitudes();
        let reflect = |va: Complex64, vs: Complex64| {
            let overlap = va * c + vs * s;
            (overlap * 2.0 * c - va, overlap * 2.0 * s - vs)
        };
        let (na0, ns0) = reflect(a0, s0);
        let (na1, ns1) = reflect(a1, s1);
        Ok(Self(SubspaceState::from_amplitudes(p.n(), [na0, na1, ns0, ns1])?))
    }

    fn measure_output(&self) -> Vec<MeasurementBranch<Self>> {
        self.0
            .measure_output()
            .into_iter()
            .map(|b| MeasurementBranch {
                outcome: b.outcome,
                probability: b.probability,
                post_state: Self(b.post_state),
            })
            .collect()
    }

    fn subspace_coords(&self) -> [Complex64; 4] {
        self.0.subspace_coords()
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn output_one_probability(&self) -> f64 {
        self.0.output_one_probability()
    }

    fn success_probability(&self) -> f64 {
        self.0.success_probability()
    }
}

fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len).map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random::<f64>() }).collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Chain rule, conditioning, and the successive-conditioning bound on random joints.
pub fn entropy_identities(seed: u64) -> SuiteResult {
    let mut t = Tally::new("entropy-identities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..RANDOM_JOINTS {
        let (rows, cols) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let joint = match PairJoint::new(rows, cols, random_weights(&mut rng, rows * cols)) {
            Ok(j) => j,
            Err(e) => {
                t.error(e);
                return t.done();
            }
        };
        let (hxy, hx, hy, hyx) = (
            joint_entropy(&joint),
            shannon_entropy(&joint.row_marginal()),
            shannon_entropy(&joint.col_marginal()),
            conditional_entropy(&joint),
        );
        t.check((hxy - hx - hyx).abs() <= IDENTITY_TOLERANCE, || format!("chain rule, case {case}: H(X,Y)={hxy} H(X)={hx} H(Y|X)={hyx}"));
        t.check(hyx <= hy + IDENTITY_TOLERANCE, || format!("conditioning, case {case}: H(Y|X)={hyx} > H(Y)={hy}"));

        match FullJoint::new(4, random_weights(&mut rng, 16)).and_then(|f| chain_bound_check(&f)) {
            Ok(b) => t.check(b.holds, || format!("chain bound, case {case}: lhs {} > rhs {}", b.lhs, b.rhs)),
            Err(e) => t.error(e),
        }
    }
    t.done()
}

fn rotation_checks<S: GroverEngine>(t: &mut Tally, initial: S, steps: u64, tol: f64, engine: &str) {
    let theta = initial.params().theta();
    let n = initial.params().n();
    let mut state = initial;
    for j in 0..=steps {
        let phi = theta / 2.0 + j as f64 * theta;
        let target = [Complex64::from(phi.cos()), Complex64::from(0.0), Complex64::from(phi.sin()), Complex64::from(0.0)];
        let fidelity = overlap_modulo_phase(&state.subspace_coords(), &target);
        t.check((fidelity - 1.0).abs() <= tol, || format!("{engine} engine, n={n}, after {j} iterations: overlap with angle {phi:.6} is {fidelity}"));
        t.check(state.output_one_probability() <= 1e-12, || format!("{engine} engine, n={n}, after {j} iterations: output register not reset"));
        t.check((state.norm_sqr() - 1.0).abs() <= tol, || format!("{engine} engine, n={n}: norm drifted to {}", state.norm_sqr()));
        match state.grover_iteration() {
            Ok(next) => state = next,
            Err(e) => return t.error(e),
        }
    }
}

/// Unmeasured iterations advance the input register by `theta` per step.
pub fn rotation_law(options: &ValidateOptions) -> SuiteResult {
    let mut t = Tally::new("rotation-law");
    for n in 1..=MAX_SUBSPACE_BITS {
        let steps = ceil_sqrt_pow2(n).min(64) + 2;
        let initial = match SubspaceState::initial(n) {
            Ok(s) => s,
            Err(e) => {
                t.error(e);
                return t.done();
            }
        };
        match options.fault {
            Some(Fault::DiffusionSign) => rotation_checks(&mut t, MirroredDiffusion(initial), steps, 1e-12, "subspace"),
            None => rotation_checks(&mut t, initial, steps, 1e-12, "subspace"),
        }
    }
    for n in 1..=options.n_max.min(MAX_FULL_BITS) {
        let steps = ceil_sqrt_pow2(n) + 2;
        match FullStateVector::initial(n, (1u64 << n) - 1) {
            Ok(s) => rotation_checks(&mut t, s, steps, 1e-10, "full"),
            Err(e) => t.error(e),
        }
    }
    t.done()
}

/// Dense and subspace engines induce the same measured-pair statistics.
pub fn engine_equivalence(options: &ValidateOptions) -> SuiteResult {
    let mut t = Tally::new("engine-equivalence");
    for n in 3..=options.n_max.min(MAX_FULL_BITS) {
        for k in 0..=ceil_sqrt_pow2(n) {
            match engine_pair_check(n, &measured_pair_script(k)) {
                Ok(tv) => t.check(tv <= 1e-10, || format!("n={n}, k={k}: total variation {tv:e}")),
                Err(e) => t.error(e),
            }
        }
        let l = IterationPolicy::GroverOptimal.iterations(n);
        let params = GroverParams::new(n).expect("n within engine range");
        match FullStateVector::initial(n, 0).and_then(|s| iterate(&s, l)) {
            Ok(s) => {
                let (sim, closed) = (s.success_probability(), params.success_after(l));
                t.check((sim - closed).abs() <= 1e-10, || format!("n={n}, L={l}: dense success {sim} vs closed form {closed}"));
            }
            Err(e) => t.error(e),
        }
    }
    t.done()
}

/// Branch enumeration reproduces the closed-form conditional entropies, and
/// halting after a hit never raises them.
pub fn exact_vs_analytic() -> SuiteResult {
    let mut t = Tally::new("exact-vs-analytic");
    for n in 3..=12 {
        let params = GroverParams::new(n).expect("n within engine range");
        for k in 0..=ceil_sqrt_pow2(n) {
            let standard = exact_pair_distribution(n, k, Variant::Standard).map(|p| p.conditional_entropy());
            let halt = exact_pair_distribution(n, k, Variant::HaltOnHit).map(|p| p.conditional_entropy());
            let closed = analytic_pair_conditional_entropy(n, k);
            match (standard, halt, closed) {
                (Ok(s), Ok(h), Ok(c)) => {
                    t.check((s - c).abs() <= 1e-12, || format!("n={n}, k={k}: exact {s} vs closed form {c}"));
                    if k >= 1 {
                        t.check(h <= s + 1e-12, || format!("n={n}, k={k}: halt-on-hit {h} exceeds standard {s}"));
                        if first_hit_probability(&params, k) > 1e-12 {
                            t.check(h < s, || format!("n={n}, k={k}: halt-on-hit {h} not below standard {s}"));
                        }
                    }
                }
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => t.error(e),
            }
        }
    }
    for n in 3..=MAX_SUBSPACE_BITS {
        match quantum_rhs_sum(&ExperimentConfig::new(n, ceil_sqrt_pow2(n))) {
            Ok(rhs) => t.check(rhs < n as f64, || format!("n={n}: quantum sum {rhs} is not below {n}")),
            Err(e) => t.error(e),
        }
    }
    t.done()
}

/// The sequential scan meets the inequality and carries exactly `n` bits.
pub fn classical_satisfaction(options: &ValidateOptions) -> SuiteResult {
    let mut t = Tally::new("classical-satisfaction");
    for n in 1..=options.n_max.clamp(1, 12) {
        let schedule = match QuerySchedule::sequential(n) {
            Ok(s) => s,
            Err(e) => {
                t.error(e);
                return t.done();
            }
        };
        match classical_rhs_sum(&schedule) {
            Ok(rhs) => t.check(rhs >= n as f64 - 1e-9, || format!("n={n}: classical sum {rhs} below {n}")),
            Err(e) => t.error(e),
        }
        let full = classical_full_joint_entropy(&schedule).bits;
        t.check((full - n as f64).abs() <= 1e-9, || format!("n={n}: full joint entropy {full}"));
    }
    t.done()
}

/// Runs every suite in a fixed order.
pub fn run_all(options: &ValidateOptions) -> Vec<SuiteResult> {
    vec![
        entropy_identities(options.seed),
        rotation_law(options),
        engine_equivalence(options),
        exact_vs_analytic(),
        classical_satisfaction(options),
    ]
}
