//! Full protocol sessions: Alice's random states, an optional attack, Bob's
//! random-basis measurement, sifting and the resulting rates.

use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::collective::{build_isometry, eve_measurement, CollectiveParams, EveIsometry, EveMeasurement};
use crate::error::{QkdError, Result};
use crate::intercept_resend::IrStrategy;
use crate::quantum::{born_sample, make_basis, measure_leading, Axis, MeasurementBasis, PerAxis, StateVector};
use crate::rng::{sharded, SimRng};
use crate::stats::Rate;

/// An eavesdropper sitting on the quantum channel.
///
/// `transmit` returns the joint state `qubit ⊗ register`, where the qubit goes
/// on to Bob and the register is whatever Eve kept. After sifting, `guess`
/// turns Bob-collapsed register state and the announced axis into a guess of
/// Alice's bit.
pub trait AttackModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn transmit(&self, input: &StateVector, rng: &mut dyn RngCore) -> Result<StateVector>;

    fn guess(&self, register: &StateVector, axis: Axis, rng: &mut dyn RngCore) -> Result<Option<u8>>;
}

pub struct NoAttack;

impl AttackModel for NoAttack {
    fn name(&self) -> &'static str {
        "none"
    }

    fn transmit(&self, input: &StateVector, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(input.kron(&StateVector::basis_state(1, 0)))
    }

    fn guess(&self, _register: &StateVector, _axis: Axis, _rng: &mut dyn RngCore) -> Result<Option<u8>> {
        Ok(None)
    }
}

/// Eve measures in a fixed basis, resends the eigenstate she found and keeps
/// her outcome in a classical register `|j>`.
pub struct InterceptResendAttack {
    strategy: IrStrategy,
    basis: MeasurementBasis,
}

impl InterceptResendAttack {
    pub fn new(strategy: IrStrategy) -> Self {
        Self { basis: strategy.basis(), strategy }
    }

    pub fn strategy(&self) -> &IrStrategy {
        &self.strategy
    }
}

impl AttackModel for InterceptResendAttack {
    fn name(&self) -> &'static str {
        "intercept-resend"
    }

    fn transmit(&self, input: &StateVector, rng: &mut dyn RngCore) -> Result<StateVector> {
        let j = born_sample(input, &self.basis, rng)?;
        Ok(self.basis.vector(j).kron(&StateVector::basis_state(2, j as usize)))
    }

    fn guess(&self, register: &StateVector, _axis: Axis, rng: &mut dyn RngCore) -> Result<Option<u8>> {
        Ok(Some(born_sample(register, &make_basis(Axis::Z), rng)?))
    }
}

/// Eve entangles her probe and measures it once the basis is public.
pub struct CollectiveAttack {
    isometry: EveIsometry,
    measurements: PerAxis<EveMeasurement>,
}

impl CollectiveAttack {
    pub fn new(params: &CollectiveParams) -> Result<Self> {
        Ok(Self {
            isometry: build_isometry(params),
            measurements: PerAxis {
                x: eve_measurement(params, Axis::X)?,
                y: eve_measurement(params, Axis::Y)?,
                z: eve_measurement(params, Axis::Z)?,
            },
        })
    }

    pub fn params(&self) -> &CollectiveParams {
        self.isometry.params()
    }
}

impl AttackModel for CollectiveAttack {
    fn name(&self) -> &'static str {
        "collective"
    }

    fn transmit(&self, input: &StateVector, _rng: &mut dyn RngCore) -> Result<StateVector> {
        input.ensure_normalized()?;
        self.isometry.apply(input)
    }

    fn guess(&self, register: &StateVector, axis: Axis, rng: &mut dyn RngCore) -> Result<Option<u8>> {
        Ok(Some(self.measurements[axis].measure(register, rng)?.guess()))
    }
}

/// Parameters handed to [`attack_registry`]. Unused fields must stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    pub disturbance: Option<f64>,
    pub fidelity: Option<f64>,
}

impl AttackParams {
    fn has_ir(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some()
    }

    fn collective_count(&self) -> usize {
        [self.theta, self.disturbance, self.fidelity].iter().filter(|v| v.is_some()).count()
    }
}

pub const ATTACK_NAMES: [&str; 3] = ["none", "intercept-resend", "collective"];

/// Builds an attack by name. Intercept/resend takes both angles, or neither
/// for the symmetric optimum. Collective takes exactly one of theta, D or F.
pub fn attack_registry(name: &str, params: &AttackParams) -> Result<Box<dyn AttackModel>> {
    let bad = |msg: &str| Err(QkdError::InvalidParams(format!("{name}: {msg}")));
    match name {
        "none" => {
            if params.has_ir() || params.collective_count() > 0 {
                return bad("takes no parameters");
            }
            Ok(Box::new(NoAttack))
        }
        "intercept-resend" => {
            if params.collective_count() > 0 {
                return bad("takes only alpha and beta");
            }
            let strategy = match (params.alpha, params.beta) {
                (Some(a), Some(b)) => IrStrategy::new(a, b)?,
                (None, None) => IrStrategy::optimal(),
                _ => return bad("alpha and beta must be given together"),
            };
            Ok(Box::new(InterceptResendAttack::new(strategy)))
        }
        "collective" => {
            if params.has_ir() {
                return bad("takes only one of theta, disturbance, fidelity");
            }
            let p = match (params.theta, params.disturbance, params.fidelity) {
                (Some(t), None, None) => CollectiveParams::from_theta(t)?,
                (None, Some(d), None) => CollectiveParams::from_disturbance(d)?,
                (None, None, Some(f)) => CollectiveParams::from_fidelity(f)?,
                _ => return bad("needs exactly one of theta, disturbance, fidelity"),
            };
            Ok(Box::new(CollectiveAttack::new(&p)?))
        }
        other => Err(QkdError::UnknownAttack(other.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SixState,
    Bb84,
}

impl Scheme {
    pub fn axes(self) -> &'static [Axis] {
        match self {
            Scheme::SixState => &[Axis::Z, Axis::X, Axis::Y],
            Scheme::Bb84 => &[Axis::Z, Axis::X],
        }
    }

    /// Probability that two independent uniform basis choices agree.
    pub fn expected_sift_rate(self) -> f64 {
        1.0 / self.axes().len() as f64
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::SixState => "six-state",
            Scheme::Bb84 => "bb84",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    bases: Vec<(Axis, MeasurementBasis)>,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, bases: scheme.axes().iter().map(|&t| (t, make_basis(t))).collect() }
    }

    pub fn bases(&self) -> &[(Axis, MeasurementBasis)] {
        &self.bases
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AxisTally {
    pub sifted: u64,
    pub errors: u64,
    pub eve_guesses: u64,
    pub eve_correct: u64,
}

/// Counters from one session plus the derived rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionStats {
    pub scheme: Scheme,
    pub attack: String,
    pub rounds: u64,
    pub sifted: u64,
    pub errors_in_sifted: u64,
    pub eve_guesses_in_sifted: u64,
    pub eve_correct_in_sifted: u64,
    pub per_axis: PerAxis<AxisTally>,
    pub sift_rate: Rate,
    pub qber: Rate,
    pub q_ab: Rate,
    pub eve_accuracy: Option<Rate>,
}

impl SessionStats {
    fn from_counts(scheme: Scheme, attack: &str, rounds: u64, per_axis: PerAxis<AxisTally>) -> Self {
        let sum = |f: fn(&AxisTally) -> u64| per_axis.iter().map(|(_, a)| f(a)).sum::<u64>();
        let sifted = sum(|a| a.sifted);
        let errors = sum(|a| a.errors);
        let guesses = sum(|a| a.eve_guesses);
        let correct = sum(|a| a.eve_correct);
        Self {
            scheme,
            attack: attack.to_string(),
            rounds,
            sifted,
            errors_in_sifted: errors,
            eve_guesses_in_sifted: guesses,
            eve_correct_in_sifted: correct,
            per_axis,
            sift_rate: Rate::new(sifted, rounds),
            qber: Rate::new(errors, sifted),
            q_ab: Rate::new(sifted - errors, sifted),
            eve_accuracy: (guesses > 0).then(|| Rate::new(correct, guesses)),
        }
    }

    /// Eve accuracy restricted to rounds sifted in one axis.
    pub fn eve_accuracy_on(&self, axis: Axis) -> Option<Rate> {
        let a = &self.per_axis[axis];
        (a.eve_guesses > 0).then(|| Rate::new(a.eve_correct, a.eve_guesses))
    }

    pub fn q_ab_on(&self, axis: Axis) -> Rate {
        let a = &self.per_axis[axis];
        Rate::new(a.sifted - a.errors, a.sifted)
    }

    /// Counter ordering and rate ranges.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(QkdError::InvariantViolation(msg));
        if self.sifted > self.rounds {
            return fail(format!("sifted {} exceeds rounds {}", self.sifted, self.rounds));
        }
        if self.errors_in_sifted > self.sifted || self.eve_guesses_in_sifted > self.sifted {
            return fail("sifted-subset counter exceeds sifted count".into());
        }
        if self.eve_correct_in_sifted > self.eve_guesses_in_sifted {
            return fail("more correct guesses than guesses".into());
        }
        for (axis, a) in self.per_axis.iter() {
            if !self.scheme.axes().contains(&axis) && *a != AxisTally::default() {
                return fail(format!("{} axis used by a scheme without it", axis.name()));
            }
        }
        let rates = [Some(self.sift_rate), Some(self.qber), Some(self.q_ab), self.eve_accuracy];
        for r in rates.into_iter().flatten() {
            if !(0.0..=1.0).contains(&r.value) || !r.standard_error.is_finite() {
                return fail(format!("rate {} outside [0, 1]", r.value));
            }
        }
        Ok(())
    }
}

/// Runs `rounds` protocol rounds. Identical inputs give identical stats
/// regardless of the thread pool size.
pub fn run_session(
    config: &SchemeConfig,
    attack: Option<&dyn AttackModel>,
    rounds: u64,
    seed: u64,
) -> Result<SessionStats> {
    if rounds == 0 {
        return Err(QkdError::InvalidParams("rounds must be at least 1".into()));
    }
    let attack = attack.unwrap_or(&NoAttack);
    let bases = config.bases();
    let shard = |n: u64, rng: &mut SimRng| -> Result<PerAxis<AxisTally>> {
        let mut tally = PerAxis::<AxisTally>::default();
        for _ in 0..n {
            let (alice_axis, alice_basis) = &bases[rng.random_range(0..bases.len())];
            let bit = rng.random_range(0..2u8);
            let joint = attack.transmit(alice_basis.vector(bit), rng)?;
            let (bob_axis, bob_basis) = &bases[rng.random_range(0..bases.len())];
            let (bob_bit, register) = measure_leading(&joint, bob_basis, rng)?;
            if alice_axis != bob_axis {
                continue;
            }
            let t = &mut tally[*alice_axis];
            t.sifted += 1;
            t.errors += u64::from(bob_bit != bit);
            if let Some(g) = attack.guess(&register, *alice_axis, rng)? {
                t.eve_guesses += 1;
                t.eve_correct += u64::from(g == bit);
            }
        }
        Ok(tally)
    };
    let mut total = PerAxis::<AxisTally>::default();
    for part in sharded(rounds, seed, shard) {
        let part = part?;
        for t in Axis::ALL {
            let (a, b) = (&mut total[t], &part[t]);
            a.sifted += b.sifted;
            a.errors += b.errors;
            a.eve_guesses += b.eve_guesses;
            a.eve_correct += b.eve_correct;
        }
    }
    let stats = SessionStats::from_counts(config.scheme, attack.name(), rounds, total);
    stats.validate()?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intercept_resend::p_optimal;

    #[test]
    fn no_attack_has_no_errors() {
        for scheme in [Scheme::SixState, Scheme::Bb84] {
            let stats = run_session(&SchemeConfig::new(scheme), None, 50_000, 3).unwrap();
            assert_eq!(stats.errors_in_sifted, 0);
            assert_eq!(stats.eve_accuracy, None);
            assert!(stats.sift_rate.sigmas_from(scheme.expected_sift_rate()) < 4.0);
        }
    }

    #[test]
    fn bb84_never_uses_the_y_axis() {
        let stats = run_session(&SchemeConfig::new(Scheme::Bb84), None, 20_000, 1).unwrap();
        assert_eq!(stats.per_axis.y, AxisTally::default());
    }

    #[test]
    fn registry_names_and_errors() {
        for name in ATTACK_NAMES {
            let params = if name == "collective" {
                AttackParams { disturbance: Some(0.1), ..Default::default() }
            } else {
                AttackParams::default()
            };
            assert_eq!(attack_registry(name, &params).unwrap().name(), name);
        }
        assert!(matches!(attack_registry("mitm", &AttackParams::default()), Err(QkdError::UnknownAttack(_))));
        assert!(attack_registry("collective", &AttackParams::default()).is_err());
        let both = AttackParams { disturbance: Some(0.1), theta: Some(0.1), ..Default::default() };
        assert!(attack_registry("collective", &both).is_err());
        let half = AttackParams { alpha: Some(0.1), ..Default::default() };
        assert!(attack_registry("intercept-resend", &half).is_err());
        let far = AttackParams { disturbance: Some(0.7), ..Default::default() };
        assert!(matches!(attack_registry("collective", &far), Err(QkdError::OutOfRange { .. })));
    }

    #[test]
    fn optimal_intercept_resend_session() {
        let attack = attack_registry("intercept-resend", &AttackParams::default()).unwrap();
        let stats = run_session(&SchemeConfig::new(Scheme::SixState), Some(attack.as_ref()), 60_000, 9).unwrap();
        assert!(stats.q_ab.sigmas_from(2.0 / 3.0) < 4.0);
        assert!(stats.eve_accuracy.unwrap().sigmas_from(p_optimal()) < 4.0);
    }

    #[test]
    fn invalid_stats_are_caught() {
        let mut stats = run_session(&SchemeConfig::new(Scheme::Bb84), None, 1000, 1).unwrap();
        stats.per_axis.y.sifted = 1;
        assert!(matches!(stats.validate(), Err(QkdError::InvariantViolation(_))));
        let mut stats = run_session(&SchemeConfig::new(Scheme::Bb84), None, 1000, 1).unwrap();
        stats.sifted = stats.rounds + 1;
        assert!(stats.validate().is_err());
    }
}
