//! Grover search with the oracle output kept in its own qubit, so that the
//! output register can be measured in the middle of an iteration.
//!
//! One iteration is `G = D * O * Z * O`: the oracle `O|x>|y> = |x>|y ^ F(x)>`,
//! a phase flip `Z` on the output qubit, the oracle again to uncompute, and
//! the inversion about the uniform superposition `D = 2|psi><psi| - I` on the
//! input register. The output qubit starts in `|0>`.
//!
//! Two engines implement [`GroverEngine`]:
//!
//! * [`SubspaceState`] keeps four amplitudes over `{|alpha>, |s>} x {|0>, |1>}`
//!   where `|alpha>` is the uniform superposition of the unmarked inputs. The
//!   dynamics, measurements included, never leaves this span, so it is exact
//!   for any `n` up to 60.
//! * [`FullStateVector`] keeps all `2^(n+1)` amplitudes (`n <= 12`) and is
//!   used to cross-check the subspace engine.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_SUBSPACE_BITS: u32 = 60;
pub const MAX_FULL_BITS: u32 = 12;

/// Branches below this probability are dropped by [`GroverEngine::measure_output`].
pub const BRANCH_CUTOFF: f64 = 1e-15;

/// Largest output/input entanglement tolerated by the diffusion step.
pub const DISENTANGLEMENT_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Problem size and the Grover angle `theta`, `cos(theta / 2) = sqrt(1 - 2^-n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverParams {
    n: u32,
    theta: f64,
}

impl GroverParams {
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=MAX_SUBSPACE_BITS).contains(&n) {
            return Err(Error::out_of_range("n", n, 1, MAX_SUBSPACE_BITS));
        }
        let theta = 2.0 * (-(n as f64) / 2.0).exp2().asin();
        Ok(Self { n, theta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `2^-n`, the prior weight of the marked item.
    pub fn marked_weight(&self) -> f64 {
        (-(self.n as f64)).exp2()
    }

    /// `sin(theta / 2) = 2^(-n/2)`
    pub fn sin_half(&self) -> f64 {
        (-(self.n as f64) / 2.0).exp2()
    }

    /// `cos(theta / 2) = sqrt(1 - 2^-n)`
    pub fn cos_half(&self) -> f64 {
        (1.0 - self.marked_weight()).sqrt()
    }

    /// `sin^2(theta) = 4 p (1 - p)` with `p = 2^-n`; avoids cancellation for large `n`.
    pub fn sin2_theta(&self) -> f64 {
        let p = self.marked_weight();
        4.0 * p * (1.0 - p)
    }

    pub fn cos2_theta(&self) -> f64 {
        1.0 - self.sin2_theta()
    }

    /// Success probability after `iterations` unmeasured iterations: `sin^2((2L + 1) theta / 2)`.
    pub fn success_after(&self, iterations: u64) -> f64 {
        ((2 * iterations + 1) as f64 * self.theta / 2.0).sin().powi(2)
    }
}

/// One outcome of measuring the output qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch<S> {
    pub outcome: u8,
    pub probability: f64,
    pub post_state: S,
}

/// Operations shared by both simulation engines. States are values: every
/// operation returns a new state.
pub trait GroverEngine: Clone {
    fn params(&self) -> &GroverParams;

    /// `O|x>|y> = |x>|y ^ F(x)>`
    fn apply_oracle(&self) -> Self;

    /// Pauli Z on the output qubit.
    fn apply_output_phase(&self) -> Self;

    /// `2|psi><psi| - I` on the input register. Fails unless the output qubit
    /// factors out of the state.
    fn apply_diffusion(&self) -> Result<Self>;

    /// Projective measurement of the output qubit in the computational basis.
    /// Post-states are renormalized with the first non-negligible amplitude
    /// made real and non-negative.
    fn measure_output(&self) -> Vec<MeasurementBranch<Self>>;

    /// Amplitudes projected onto `(|alpha,0>, |alpha,1>, |s,0>, |s,1>)`.
    fn subspace_coords(&self) -> [Complex64; 4];

    fn norm_sqr(&self) -> f64;

    /// Probability that the output qubit reads 1.
    fn output_one_probability(&self) -> f64;

    /// Probability that the input register holds the marked item.
    fn success_probability(&self) -> f64;

    /// The rest of an iteration after its first oracle call: `D * O * Z`.
    fn complete_iteration(&self) -> Result<Self> {
        self.apply_output_phase().apply_oracle().apply_diffusion()
    }

    /// A full iteration `D * O * Z * O`. The output qubit must start in `|0>`.
    fn grover_iteration(&self) -> Result<Self> {
        let p1 = self.output_one_probability();
        if p1 > DISENTANGLEMENT_TOLERANCE {
            return Err(Error::OutputNotReset(p1));
        }
        self.apply_oracle().complete_iteration()
    }
}

fn fix_phase(amps: &mut [Complex64]) {
    if let Some(lead) = amps.iter().copied().find(|a| a.norm() > 1e-12) {
        let rot = lead.conj() / lead.norm();
        for a in amps.iter_mut() {
            *a *= rot;
        }
    }
}

/// Exact state restricted to `span{|alpha>, |s>} x span{|0>, |1>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceState {
    params: GroverParams,
    /// Ordered `|alpha,0>, |alpha,1>, |s,0>, |s,1>`.
    amps: [Complex64; 4],
}

impl SubspaceState {
    /// `|psi>|0>` with `|psi> = cos(theta/2)|alpha> + sin(theta/2)|s>`.
    pub fn initial(n: u32) -> Result<Self> {
        let params = GroverParams::new(n)?;
        let amps = [params.cos_half().into(), ZERO, params.sin_half().into(), ZERO];
        Ok(Self { params, amps })
    }

    /// Arbitrary state in the subspace; must be normalized to 1e-12.
    pub fn from_amplitudes(n: u32, amps: [Complex64; 4]) -> Result<Self> {
        let params = GroverParams::new(n)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { params, amps })
    }

    /// Input register at angle `phi` from `|alpha>`, output qubit `|0>`.
    pub fn at_angle(n: u32, phi: f64) -> Result<Self> {
        let params = GroverParams::new(n)?;
        let amps = [phi.cos().into(), ZERO, phi.sin().into(), ZERO];
        Ok(Self { params, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }
}

impl GroverEngine for SubspaceState {
    fn params(&self) -> &GroverParams {
        &self.params
    }

    fn apply_oracle(&self) -> Self {
        let [a0, a1, s0, s1] = self.amps;
        Self {
            params: self.params,
            amps: [a0, a1, s1, s0],
        }
    }

    fn apply_output_phase(&self) -> Self {
        let [a0, a1, s0, s1] = self.amps;
        Self {
            params: self.params,
            amps: [a0, -a1, s0, -s1],
        }
    }

    fn apply_diffusion(&self) -> Result<Self> {
        let [a0, a1, s0, s1] = self.amps;
        let residual = (a0 * s1 - a1 * s0).norm();
        if residual > DISENTANGLEMENT_TOLERANCE {
            return Err(Error::EntangledOutput { residual });
        }
        let (c, s) = (self.params.cos_half(), self.params.sin_half());
        let reflect = |va: Complex64, vs: Complex64| {
            let overlap = va * c + vs * s;
            (overlap * 2.0 * c - va, overlap * 2.0 * s - vs)
        };
        let (na0, ns0) = reflect(a0, s0);
        let (na1, ns1) = reflect(a1, s1);
        Ok(Self {
            params: self.params,
            amps: [na0, na1, ns0, ns1],
        })
    }

    fn measure_output(&self) -> Vec<MeasurementBranch<Self>> {
        (0..2u8)
            .filter_map(|y| {
                let keep = [y == 0, y == 1, y == 0, y == 1];
                let mut amps = self.amps;
                for (a, k) in amps.iter_mut().zip(keep) {
                    if !k {
                        *a = ZERO;
                    }
                }
                let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if probability < BRANCH_CUTOFF {
                    return None;
                }
                let scale = probability.sqrt().recip();
                amps.iter_mut().for_each(|a| *a *= scale);
                fix_phase(&mut amps);
                Some(MeasurementBranch {
                    outcome: y,
                    probability,
                    post_state: Self {
                        params: self.params,
                        amps,
                    },
                })
            })
            .collect()
    }

    fn subspace_coords(&self) -> [Complex64; 4] {
        self.amps
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn output_one_probability(&self) -> f64 {
        self.amps[1].norm_sqr() + self.amps[3].norm_sqr()
    }

    fn success_probability(&self) -> f64 {
        self.amps[2].norm_sqr() + self.amps[3].norm_sqr()
    }
}

/// Dense state over `n` input qubits and one output qubit; amplitude of
/// `|x>|y>` sits at index `2x + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStateVector {
    params: GroverParams,
    marked: u64,
    amps: Vec<Complex64>,
}

impl FullStateVector {
    /// Uniform superposition on the input register, output `|0>`.
    pub fn initial(n: u32, marked: u64) -> Result<Self> {
        if !(1..=MAX_FULL_BITS).contains(&n) {
            return Err(Error::out_of_range("n", n, 1, MAX_FULL_BITS));
        }
        if marked >= 1 << n {
            return Err(Error::out_of_range("s", marked, 0, (1u64 << n) - 1));
        }
        let items = 1usize << n;
        let amp = Complex64::from((items as f64).sqrt().recip());
        let mut amps = vec![ZERO; 2 * items];
        for x in 0..items {
            amps[2 * x] = amp;
        }
        Ok(Self {
            params: GroverParams::new(n)?,
            marked,
            amps,
        })
    }

    /// Computational basis state `|x>|y>`.
    pub fn basis(n: u32, marked: u64, x: u64, y: u8) -> Result<Self> {
        let mut state = Self::initial(n, marked)?;
        if x >= 1 << n || y > 1 {
            return Err(Error::out_of_range("basis index", x, 0, (1u64 << n) - 1));
        }
        state.amps.iter_mut().for_each(|a| *a = ZERO);
        state.amps[2 * x as usize + y as usize] = Complex64::from(1.0);
        Ok(state)
    }

    pub fn marked(&self) -> u64 {
        self.marked
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of `|x>|y>`.
    pub fn amplitude(&self, x: u64, y: u8) -> Complex64 {
        self.amps[2 * x as usize + y as usize]
    }

    fn items(&self) -> usize {
        self.amps.len() / 2
    }
}

impl GroverEngine for FullStateVector {
    fn params(&self) -> &GroverParams {
        &self.params
    }

    fn apply_oracle(&self) -> Self {
        let mut next = self.clone();
        let s = self.marked as usize;
        next.amps.swap(2 * s, 2 * s + 1);
        next
    }

    fn apply_output_phase(&self) -> Self {
        let mut next = self.clone();
        next.amps.iter_mut().skip(1).step_by(2).for_each(|a| *a = -*a);
        next
    }

    fn apply_diffusion(&self) -> Result<Self> {
        // Gram determinant of the two output columns vanishes iff they are parallel.
        let (mut n0, mut n1, mut cross) = (0.0, 0.0, ZERO);
        for pair in self.amps.chunks_exact(2) {
            n0 += pair[0].norm_sqr();
            n1 += pair[1].norm_sqr();
            cross += pair[0].conj() * pair[1];
        }
        let residual = (n0 * n1 - cross.norm_sqr()).max(0.0).sqrt();
        if residual > DISENTANGLEMENT_TOLERANCE {
            return Err(Error::EntangledOutput { residual });
        }
        let items = self.items() as f64;
        let mut next = self.clone();
        for y in 0..2 {
            let mean = self.amps.iter().skip(y).step_by(2).sum::<Complex64>() / items;
            next.amps.iter_mut().skip(y).step_by(2).for_each(|a| *a = mean * 2.0 - *a);
        }
        Ok(next)
    }

    fn measure_output(&self) -> Vec<MeasurementBranch<Self>> {
        (0..2u8)
            .filter_map(|y| {
                let mut amps = self.amps.clone();
                amps.iter_mut().skip(1 - y as usize).step_by(2).for_each(|a| *a = ZERO);
                let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if probability < BRANCH_CUTOFF {
                    return None;
                }
                let scale = probability.sqrt().recip();
                amps.iter_mut().for_each(|a| *a *= scale);
                fix_phase(&mut amps);
                Some(MeasurementBranch {
                    outcome: y,
                    probability,
                    post_state: Self {
                        params: self.params,
                        marked: self.marked,
                        amps,
                    },
                })
            })
            .collect()
    }

    fn subspace_coords(&self) -> [Complex64; 4] {
        let s = self.marked as usize;
        let unmarked = (self.items() as f64 - 1.0).sqrt();
        let mut alpha = [ZERO; 2];
        for (x, pair) in self.amps.chunks_exact(2).enumerate() {
            if x != s {
                alpha[0] += pair[0];
                alpha[1] += pair[1];
            }
        }
        [alpha[0] / unmarked, alpha[1] / unmarked, self.amps[2 * s], self.amps[2 * s + 1]]
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn output_one_probability(&self) -> f64 {
        self.amps.iter().skip(1).step_by(2).map(|a| a.norm_sqr()).sum()
    }

    fn success_probability(&self) -> f64 {
        let s = self.marked as usize;
        self.amps[2 * s].norm_sqr() + self.amps[2 * s + 1].norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Subspace,
    Full,
}

/// A state from either engine, for callers that pick the engine at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineState {
    Subspace(SubspaceState),
    Full(FullStateVector),
}

macro_rules! delegate {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            EngineState::Subspace($s) => $e,
            EngineState::Full($s) => $e,
        }
    };
}

impl GroverEngine for EngineState {
    fn params(&self) -> &GroverParams {
        delegate!(self, s => s.params())
    }

    fn apply_oracle(&self) -> Self {
        match self {
            Self::Subspace(s) => Self::Subspace(s.apply_oracle()),
            Self::Full(s) => Self::Full(s.apply_oracle()),
        }
    }

    fn apply_output_phase(&self) -> Self {
        match self {
            Self::Subspace(s) => Self::Subspace(s.apply_output_phase()),
            Self::Full(s) => Self::Full(s.apply_output_phase()),
        }
    }

    fn apply_diffusion(&self) -> Result<Self> {
        Ok(match self {
            Self::Subspace(s) => Self::Subspace(s.apply_diffusion()?),
            Self::Full(s) => Self::Full(s.apply_diffusion()?),
        })
    }

    fn measure_output(&self) -> Vec<MeasurementBranch<Self>> {
        fn wrap<S>(branches: Vec<MeasurementBranch<S>>, f: fn(S) -> EngineState) -> Vec<MeasurementBranch<EngineState>> {
            branches
                .into_iter()
                .map(|b| MeasurementBranch {
                    outcome: b.outcome,
                    probability: b.probability,
                    post_state: f(b.post_state),
                })
                .collect()
        }
        match self {
            Self::Subspace(s) => wrap(s.measure_output(), Self::Subspace),
            Self::Full(s) => wrap(s.measure_output(), Self::Full),
        }
    }

    fn subspace_coords(&self) -> [Complex64; 4] {
        delegate!(self, s => s.subspace_coords())
    }

    fn norm_sqr(&self) -> f64 {
        delegate!(self, s => s.norm_sqr())
    }

    fn output_one_probability(&self) -> f64 {
        delegate!(self, s => s.output_one_probability())
    }

    fn success_probability(&self) -> f64 {
        delegate!(self, s => s.success_probability())
    }
}

/// Initial state `|psi>|0>` on the chosen engine; the full engine marks item 0.
pub fn prepare_initial(n: u32, engine: EngineKind) -> Result<EngineState> {
    Ok(match engine {
        EngineKind::Subspace => EngineState::Subspace(SubspaceState::initial(n)?),
        EngineKind::Full => EngineState::Full(FullStateVector::initial(n, 0)?),
    })
}

/// Result of running iterations without any measurement.
#[derive(Debug, Clone)]
pub struct UnmeasuredRun<S> {
    pub final_state: S,
    pub success_probability: f64,
}

/// Applies `iterations` full iterations to `state`.
pub fn iterate<S: GroverEngine>(state: &S, iterations: u64) -> Result<S> {
    let mut state = state.clone();
    for _ in 0..iterations {
        state = state.grover_iteration()?;
    }
    Ok(state)
}

/// Standard Grover evolution on the subspace engine.
pub fn run_unmeasured(n: u32, iterations: u64) -> Result<UnmeasuredRun<SubspaceState>> {
    run_unmeasured_on(SubspaceState::initial(n)?, iterations)
}

pub fn run_unmeasured_on<S: GroverEngine>(initial: S, iterations: u64) -> Result<UnmeasuredRun<S>> {
    let final_state = iterate(&initial, iterations)?;
    Ok(UnmeasuredRun {
        success_probability: final_state.success_probability(),
        final_state,
    })
}

/// One step of a simulation script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptOp {
    Oracle,
    OutputPhase,
    Diffusion,
    Iteration,
    Measure,
}

/// Script that measures the output register right after the first oracle
/// call of iterations `k` and `k + 1`. For `k = 0` only `A_1` is measured,
/// since `A_0` is the constant 0.
pub fn measured_pair_script(k: u64) -> Vec<ScriptOp> {
    use ScriptOp::*;
    if k == 0 {
        return vec![Oracle, Measure];
    }
    let mut script = vec![Iteration; (k - 1) as usize];
    script.extend([Oracle, Measure, OutputPhase, Oracle, Diffusion, Oracle, Measure]);
    script
}

/// Runs `script` on `initial`, branching at every measurement, and returns
/// the distribution of measurement records.
pub fn outcome_distribution<S: GroverEngine>(initial: &S, script: &[ScriptOp]) -> Result<BTreeMap<Vec<u8>, f64>> {
    let mut frontier = vec![(Vec::new(), 1.0, initial.clone())];
    for op in script {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (record, prob, state) in frontier {
            match op {
                ScriptOp::Oracle => next.push((record, prob, state.apply_oracle())),
                ScriptOp::OutputPhase => next.push((record, prob, state.apply_output_phase())),
                ScriptOp::Diffusion => next.push((record, prob, state.apply_diffusion()?)),
                ScriptOp::Iteration => next.push((record, prob, state.grover_iteration()?)),
                ScriptOp::Measure => {
                    for branch in state.measure_output() {
                        let mut r = record.clone();
                        r.push(branch.outcome);
                        next.push((r, prob * branch.probability, branch.post_state));
                    }
                }
            }
        }
        frontier = next;
    }
    let mut dist = BTreeMap::new();
    for (record, prob, _) in frontier {
        *dist.entry(record).or_insert(0.0) += prob;
    }
    Ok(dist)
}

/// Total-variation distance between two record distributions.
pub fn total_variation(a: &BTreeMap<Vec<u8>, f64>, b: &BTreeMap<Vec<u8>, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, pa) in a {
        sum += (pa - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum += pb.abs();
        }
    }
    0.5 * sum
}

/// Runs `script` on both engines and returns the total-variation distance
/// between their outcome distributions.
pub fn engine_pair_check(n: u32, script: &[ScriptOp]) -> Result<f64> {
    engine_pair_check_marked(n, 0, script)
}

pub fn engine_pair_check_marked(n: u32, marked: u64, script: &[ScriptOp]) -> Result<f64> {
    let sub = outcome_distribution(&SubspaceState::initial(n)?, script)?;
    let full = outcome_distribution(&FullStateVector::initial(n, marked)?, script)?;
    Ok(total_variation(&sub, &full))
}

/// `|<target|state>|` for a target given in subspace coordinates; 1 means equal up to phase.
pub fn overlap_modulo_phase(coords: &[Complex64; 4], target: &[Complex64; 4]) -> f64 {
    coords.iter().zip(target).map(|(a, b)| b.conj() * a).sum::<Complex64>().norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const EPS: f64 = 1e-12;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn angle_target(phi: f64) -> [Complex64; 4] {
        [c(phi.cos()), ZERO, c(phi.sin()), ZERO]
    }

    #[test]
    fn params_identities() {
        for n in 1..=MAX_SUBSPACE_BITS {
            let p = GroverParams::new(n).unwrap();
            assert!(((p.theta() / 2.0).sin().powi(2) - p.marked_weight()).abs() < EPS);
            assert!((p.sin2_theta() - p.theta().sin().powi(2)).abs() < 1e-12);
            if n >= 2 {
                assert!(p.theta() > 0.0 && p.theta() < FRAC_PI_2);
            }
        }
        assert!(GroverParams::new(0).is_err());
        assert!(GroverParams::new(61).is_err());
        assert!((GroverParams::new(2).unwrap().theta() - std::f64::consts::FRAC_PI_3).abs() < EPS);
    }

    #[test]
    fn initial_states() {
        let s = SubspaceState::initial(2).unwrap();
        assert!(close(s.amplitudes(), &[c(3f64.sqrt() / 2.0), ZERO, c(0.5), ZERO], EPS));

        let f = FullStateVector::initial(1, 0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(f.amplitudes(), &[c(h), ZERO, c(h), ZERO], EPS));

        for n in [1, 5, 12] {
            assert!((prepare_initial(n, EngineKind::Full).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
        }
        for n in [1, 30, 60] {
            assert!((prepare_initial(n, EngineKind::Subspace).unwrap().norm_sqr() - 1.0).abs() < EPS);
        }
        assert!(prepare_initial(13, EngineKind::Full).is_err());
        assert!(prepare_initial(61, EngineKind::Subspace).is_err());
        assert!(FullStateVector::initial(3, 8).is_err());
    }

    #[test]
    fn oracle_flips_marked_output() {
        let (a, b) = (0.6, 0.8);
        let s = SubspaceState::from_amplitudes(3, [c(a), ZERO, c(b), ZERO]).unwrap();
        let o = s.apply_oracle();
        assert!(close(o.amplitudes(), &[c(a), ZERO, ZERO, c(b)], EPS));
        assert!(close(o.apply_oracle().amplitudes(), s.amplitudes(), EPS));

        let f = FullStateVector::basis(3, 5, 5, 0).unwrap().apply_oracle();
        assert_eq!(f.amplitude(5, 1), c(1.0));
        assert_eq!(f.amplitude(5, 0), ZERO);
        let g = FullStateVector::basis(3, 5, 4, 0).unwrap().apply_oracle();
        assert_eq!(g.amplitude(4, 0), c(1.0));
    }

    #[test]
    fn output_phase_negates_one_components() {
        let (a, b) = (0.6, 0.8);
        let s = SubspaceState::from_amplitudes(3, [c(a), ZERO, ZERO, c(b)]).unwrap();
        assert!(close(s.apply_output_phase().amplitudes(), &[c(a), ZERO, ZERO, c(-b)], EPS));
        assert!(close(s.apply_output_phase().apply_output_phase().amplitudes(), s.amplitudes(), EPS));
        let init = SubspaceState::initial(4).unwrap();
        assert_eq!(init.apply_output_phase(), init);
    }

    #[test]
    fn diffusion_reflects_about_half_theta() {
        let n = 5;
        let theta = GroverParams::new(n).unwrap().theta();
        let alpha = SubspaceState::at_angle(n, 0.0).unwrap().apply_diffusion().unwrap();
        assert!((overlap_modulo_phase(&alpha.subspace_coords(), &angle_target(theta)) - 1.0).abs() < EPS);

        let marked = SubspaceState::at_angle(n, FRAC_PI_2).unwrap().apply_diffusion().unwrap();
        assert!((overlap_modulo_phase(&marked.subspace_coords(), &angle_target(theta - FRAC_PI_2)) - 1.0).abs() < EPS);

        let psi = SubspaceState::initial(n).unwrap();
        assert!(close(psi.apply_diffusion().unwrap().amplitudes(), psi.amplitudes(), EPS));

        // the same reflection on the dense engine
        let f = FullStateVector::initial(n, 3).unwrap();
        assert!(close(f.apply_diffusion().unwrap().amplitudes(), f.amplitudes(), EPS));
    }

    #[test]
    fn diffusion_rejects_entangled_output() {
        let s = SubspaceState::initial(3).unwrap().apply_oracle();
        assert!(matches!(s.apply_diffusion(), Err(Error::EntangledOutput { .. })));
        let f = FullStateVector::initial(3, 2).unwrap().apply_oracle();
        assert!(matches!(f.apply_diffusion(), Err(Error::EntangledOutput { .. })));
        // a product state with output |1> is fine
        let one = SubspaceState::from_amplitudes(3, [ZERO, c(0.6), ZERO, c(0.8)]).unwrap();
        assert!(one.apply_diffusion().is_ok());
        assert!(matches!(one.grover_iteration(), Err(Error::OutputNotReset(_))));
    }

    #[test]
    fn iteration_examples() {
        let n = 6;
        let p = GroverParams::new(n).unwrap();
        let once = SubspaceState::initial(n).unwrap().grover_iteration().unwrap();
        assert!((overlap_modulo_phase(&once.subspace_coords(), &angle_target(1.5 * p.theta())) - 1.0).abs() < EPS);
        assert!(once.output_one_probability() < EPS);

        let full = FullStateVector::initial(2, 1).unwrap().grover_iteration().unwrap();
        assert!((full.success_probability() - 1.0).abs() < EPS);
        assert!(full.output_one_probability() < EPS);
    }

    #[test]
    fn measurement_examples() {
        let (a, b) = (0.6, 0.8);
        let s = SubspaceState::from_amplitudes(3, [c(a), ZERO, ZERO, c(b)]).unwrap();
        let branches = s.measure_output();
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].outcome, 0);
        assert!((branches[0].probability - a * a).abs() < EPS);
        assert!(close(branches[0].post_state.amplitudes(), &[c(1.0), ZERO, ZERO, ZERO], EPS));
        assert!((branches[1].probability - b * b).abs() < EPS);
        assert!(close(branches[1].post_state.amplitudes(), &[ZERO, ZERO, ZERO, c(1.0)], EPS));

        let single = SubspaceState::initial(4).unwrap().measure_output();
        assert_eq!(single.len(), 1);
        assert!((single[0].probability - 1.0).abs() < EPS);

        let after = SubspaceState::initial(4).unwrap().apply_oracle().measure_output();
        assert!((after[1].probability - 1.0 / 16.0).abs() < EPS);

        // post-state phase convention: leading amplitude real and non-negative
        let neg = SubspaceState::from_amplitudes(3, [c(-a), ZERO, ZERO, c(b)]).unwrap();
        let lead = neg.measure_output()[0].post_state.amplitudes()[0];
        assert!(lead.re > 0.0 && lead.im == 0.0);
    }

    #[test]
    fn unmeasured_runs() {
        assert!((run_unmeasured(2, 1).unwrap().success_probability - 1.0).abs() < EPS);
        for n in [1, 7, 40] {
            assert!((run_unmeasured(n, 0).unwrap().success_probability - (-(n as f64)).exp2()).abs() < EPS);
        }
        let p = GroverParams::new(4).unwrap();
        let sub = run_unmeasured(4, 3).unwrap();
        let full = run_unmeasured_on(FullStateVector::initial(4, 9).unwrap(), 3).unwrap();
        assert!((sub.success_probability - p.success_after(3)).abs() < 1e-12);
        assert!((full.success_probability - p.success_after(3)).abs() < 1e-10);
        assert!(sub.final_state.output_one_probability() < EPS);
    }

    #[test]
    fn engine_pair_examples() {
        assert_eq!(engine_pair_check(3, &[]).unwrap(), 0.0);
        assert!(engine_pair_check(3, &[ScriptOp::Iteration]).unwrap() <= 1e-10);
        assert!(engine_pair_check(4, &measured_pair_script(2)).unwrap() <= 1e-10);
        assert!(engine_pair_check_marked(5, 17, &measured_pair_script(3)).unwrap() <= 1e-10);
        assert!(engine_pair_check(3, &[ScriptOp::Oracle, ScriptOp::Diffusion]).is_err());
    }

    #[test]
    fn full_engine_coords_match_subspace_engine() {
        let script = [ScriptOp::Iteration, ScriptOp::Oracle, ScriptOp::OutputPhase];
        let mut sub = SubspaceState::initial(6).unwrap();
        let mut full = FullStateVector::initial(6, 33).unwrap();
        for op in script {
            match op {
                ScriptOp::Iteration => {
                    sub = sub.grover_iteration().unwrap();
                    full = full.grover_iteration().unwrap();
                }
                ScriptOp::Oracle => {
                    sub = sub.apply_oracle();
                    full = full.apply_oracle();
                }
                _ => {
                    sub = sub.apply_output_phase();
                    full = full.apply_output_phase();
                }
            }
        }
        assert!(close(&sub.subspace_coords(), &full.subspace_coords(), 1e-12));
    }

    fn op() -> impl Strategy<Value = ScriptOp> {
        prop_oneof![
            Just(ScriptOp::Oracle),
            Just(ScriptOp::OutputPhase),
            Just(ScriptOp::Diffusion),
            Just(ScriptOp::Iteration),
        ]
    }

    proptest! {
        #[test]
        fn unitary_steps_preserve_norm(n in 1u32..=60, ops in prop::collection::vec(op(), 0..30)) {
            let mut s = SubspaceState::initial(n).unwrap();
            for op in ops {
                let next = match op {
                    ScriptOp::Oracle => Ok(s.apply_oracle()),
                    ScriptOp::OutputPhase => Ok(s.apply_output_phase()),
                    ScriptOp::Diffusion => s.apply_diffusion(),
                    _ => s.grover_iteration(),
                };
                if let Ok(next) = next {
                    s = next;
                }
                prop_assert!((s.norm_sqr() - 1.0).abs() < EPS);
            }
        }

        #[test]
        fn oracle_and_phase_are_involutions(n in 1u32..=8, x in any::<u64>(), y in 0u8..2) {
            let f = FullStateVector::basis(n, 0, x % (1 << n), y).unwrap().grover_iteration();
            if let Ok(f) = f {
                prop_assert!(close(f.apply_oracle().apply_oracle().amplitudes(), f.amplitudes(), EPS));
                prop_assert!(close(f.apply_output_phase().apply_output_phase().amplitudes(), f.amplitudes(), EPS));
            }
        }

        #[test]
        fn rotation_law(n in 1u32..=60, j in 0u64..200) {
            let p = GroverParams::new(n).unwrap();
            let s = iterate(&SubspaceState::initial(n).unwrap(), j).unwrap();
            let target = angle_target(p.theta() / 2.0 + j as f64 * p.theta());
            prop_assert!((overlap_modulo_phase(&s.subspace_coords(), &target) - 1.0).abs() < 1e-12);
            prop_assert!(s.output_one_probability() < EPS);
        }

        #[test]
        fn branch_probabilities_sum_to_one(n in 1u32..=60, j in 0u64..50) {
            let s = iterate(&SubspaceState::initial(n).unwrap(), j).unwrap().apply_oracle();
            let total: f64 = s.measure_output().iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < EPS);
            for b in s.measure_output() {
                prop_assert!((b.post_state.norm_sqr() - 1.0).abs() < EPS);
            }
        }
    }
}
