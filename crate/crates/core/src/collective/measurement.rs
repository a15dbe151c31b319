use rand::RngCore;
use serde::Serialize;

use super::probe::{probe_conditionals, ProbeConditionals, PROBE_DIM};
use super::CollectiveParams;
use crate::error::{QkdError, Result};
use crate::quantum::{sample_weighted, Axis, Operator, StateVector};

/// Weights below this are treated as absent (the `theta = 0` degeneracy).
const NULL_WEIGHT: f64 = 1e-14;
const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EveOutcome {
    /// The probe lies in the `E_01` direction: Alice sent 0, Bob got a flip.
    FlipFromZero,
    /// The probe lies in the `E_10` direction: Alice sent 1, Bob got a flip.
    FlipFromOne,
    /// Positive eigenspace of `rho_00 - rho_11`.
    FavoursZero,
    /// Everything else.
    FavoursOne,
}

impl EveOutcome {
    pub const ALL: [EveOutcome; 4] =
        [EveOutcome::FlipFromZero, EveOutcome::FlipFromOne, EveOutcome::FavoursZero, EveOutcome::FavoursOne];

    pub fn guess(self) -> u8 {
        match self {
            EveOutcome::FlipFromZero | EveOutcome::FavoursZero => 0,
            EveOutcome::FlipFromOne | EveOutcome::FavoursOne => 1,
        }
    }
}

/// Eve's four-outcome projective measurement on the probe for one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EveMeasurement {
    pub axis: Axis,
    projectors: [Operator; 4],
}

fn ray_projector(v: &StateVector) -> Operator {
    match v.normalize() {
        Some(u) if v.weight() > NULL_WEIGHT => u.projector(),
        _ => Operator::zeros(v.dim()),
    }
}

/// Builds the measurement: certainty projectors on the two bit-flip
/// directions, and the Helstrom split of the no-flip sector.
pub fn eve_measurement(params: &CollectiveParams, axis: Axis) -> Result<EveMeasurement> {
    let cond = probe_conditionals(params, axis);
    let flip0 = ray_projector(cond.get(0, 1));
    let flip1 = ray_projector(cond.get(1, 0));

    let f = params.fidelity;
    let rho = |i: usize| ray_projector(cond.get(i, i));
    let eig = (&rho(0) - &rho(1)).eigh()?;
    let mut favours0 = Operator::zeros(PROBE_DIM);
    // A numerically zero eigenvalue belongs to neither state; it falls into the remainder.
    let cutoff = 1e-12 * f.max(1.0);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda > cutoff {
            favours0 = &favours0 + &eig.vectors[k].projector();
        }
    }
    let favours1 = &(&(&Operator::identity(PROBE_DIM) - &flip0) - &flip1) - &favours0;
    let m = EveMeasurement { axis, projectors: [flip0, flip1, favours0, favours1] };
    m.validate()?;
    Ok(m)
}

impl EveMeasurement {
    pub fn projector(&self, outcome: EveOutcome) -> &Operator {
        &self.projectors[outcome as usize]
    }

    pub fn projectors(&self) -> &[Operator; 4] {
        &self.projectors
    }

    /// Each element is a projector, they are pairwise orthogonal and sum to
    /// the identity.
    pub fn validate(&self) -> Result<()> {
        let mut total = Operator::zeros(PROBE_DIM);
        for (k, p) in self.projectors.iter().enumerate() {
            if !p.is_projector(CHECK_TOL) {
                return Err(QkdError::InvariantViolation(format!("element {k} is not a projector")));
            }
            for q in &self.projectors[k + 1..] {
                if (p * q).max_abs_diff(&Operator::zeros(PROBE_DIM)) > CHECK_TOL {
                    return Err(QkdError::InvariantViolation("elements are not orthogonal".into()));
                }
            }
            total = &total + p;
        }
        if total.max_abs_diff(&Operator::identity(PROBE_DIM)) > CHECK_TOL {
            return Err(QkdError::InvariantViolation("elements do not sum to the identity".into()));
        }
        Ok(())
    }

    /// `<psi|Pi_k|psi>` for an unnormalized probe state.
    pub fn outcome_probabilities(&self, probe: &StateVector) -> [f64; 4] {
        self.projectors.each_ref().map(|p| p.expectation(probe).re.max(0.0))
    }

    pub fn measure<R: RngCore + ?Sized>(&self, probe: &StateVector, rng: &mut R) -> Result<EveOutcome> {
        if probe.dim() != PROBE_DIM {
            return Err(QkdError::DimensionMismatch { expected: PROBE_DIM, actual: probe.dim() });
        }
        probe.ensure_normalized()?;
        let p = self.outcome_probabilities(probe);
        Ok(EveOutcome::ALL[sample_weighted(&p, rng)])
    }

    /// Probability that Eve's guess equals Alice's bit, averaged over
    /// uniform bits and Bob's outcome.
    pub fn success_probability(&self, cond: &ProbeConditionals) -> f64 {
        let mut total = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let p = self.outcome_probabilities(cond.get(i, j));
                for (k, outcome) in EveOutcome::ALL.iter().enumerate() {
                    if outcome.guess() as usize == i {
                        total += 0.5 * p[k];
                    }
                }
            }
        }
        total
    }

    /// Success restricted to the no-flip sector `{00, 11}` and to the flip
    /// sector `{01, 10}`, each conditioned on its sector occurring.
    pub fn sector_success(&self, cond: &ProbeConditionals) -> (f64, f64) {
        let sector = |pairs: [(usize, usize); 2]| {
            let mut hit = 0.0;
            let mut weight = 0.0;
            for (i, j) in pairs {
                let p = self.outcome_probabilities(cond.get(i, j));
                weight += cond.weight(i, j);
                for (k, outcome) in EveOutcome::ALL.iter().enumerate() {
                    if outcome.guess() as usize == i {
                        hit += p[k];
                    }
                }
            }
            if weight > NULL_WEIGHT {
                hit / weight
            } else {
                1.0
            }
        };
        (sector([(0, 0), (1, 1)]), sector([(0, 1), (1, 0)]))
    }
}

/// Helstrom value `1/2 + 1/4 tr|rho_00 - rho_11|` for the no-flip sector.
#[cfg(test)]
fn helstrom_bound(cond: &ProbeConditionals) -> Result<f64> {
    let rho = |i: usize| match cond.get(i, i).normalize() {
        Some(u) => u.projector(),
        None => Operator::zeros(PROBE_DIM),
    };
    Ok(0.5 + 0.25 * crate::quantum::trace_distance(&rho(0), &rho(1))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn measurement_is_complete_on_every_basis() {
        for theta in [0.0, 0.2, 1.0, FRAC_PI_2] {
            let p = CollectiveParams::from_theta(theta).unwrap();
            for t in Axis::ALL {
                eve_measurement(&p, t).unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn sector_successes_attain_their_optima() {
        for d in [0.05, 1.0 / 6.0, 0.3, 0.5] {
            let p = CollectiveParams::from_disturbance(d).unwrap();
            for t in Axis::ALL {
                let m = eve_measurement(&p, t).unwrap();
                let cond = probe_conditionals(&p, t);
                let (no_flip, flip) = m.sector_success(&cond);
                assert!((no_flip - 0.5 * (1.0 + p.sin_theta())).abs() < 1e-12, "d={d} {t:?}");
                assert!((flip - 1.0).abs() < 1e-12);
                assert!((no_flip - helstrom_bound(&cond).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_sixth_disturbance_gives_five_sixths() {
        let p = CollectiveParams::from_disturbance(1.0 / 6.0).unwrap();
        let m = eve_measurement(&p, Axis::Y).unwrap();
        let s = m.success_probability(&probe_conditionals(&p, Axis::Y));
        assert!((s - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn no_information_without_disturbance() {
        let p = CollectiveParams::from_theta(0.0).unwrap();
        let m = eve_measurement(&p, Axis::X).unwrap();
        assert!((m.success_probability(&probe_conditionals(&p, Axis::X)) - 0.5).abs() < 1e-12);
        assert_eq!(m.projector(EveOutcome::FlipFromZero), &Operator::zeros(PROBE_DIM));
    }

    #[test]
    fn sampled_outcomes_follow_projector_weights() {
        let p = CollectiveParams::from_disturbance(0.5).unwrap();
        let m = eve_measurement(&p, Axis::Z).unwrap();
        let cond = probe_conditionals(&p, Axis::Z);
        let probe = cond.get(0, 0).normalize().unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..1000 {
            assert_eq!(m.measure(&probe, &mut rng).unwrap().guess(), 0);
        }
    }
}
