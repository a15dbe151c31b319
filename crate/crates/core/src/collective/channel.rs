use rand::Rng;
use serde::Serialize;

use super::measurement::eve_measurement;
use super::probe::build_isometry;
use super::CollectiveParams;
use crate::error::{QkdError, Result};
use crate::quantum::{make_basis, measure_leading, Axis, PerAxis, StateVector};
use crate::rng::{sharded, SimRng};
use crate::stats::Rate;

/// Sends one qubit through Eve's interaction. The result lives in
/// `qubit ⊗ probe` (dimension 8); Bob measures the leading factor.
pub fn collective_attack_channel(input: &StateVector, params: &CollectiveParams) -> Result<StateVector> {
    input.ensure_normalized()?;
    build_isometry(params).apply(input)
}

/// Counts from a run in which Alice and Bob always share the basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiftedOutcome {
    pub q_ab: Rate,
    pub eve_accuracy: Rate,
    pub per_axis_eve: PerAxis<Rate>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    rounds: PerAxis<u64>,
    bob_match: u64,
    eve_match: PerAxis<u64>,
}

/// Simulates `rounds` sifted rounds: Alice's state passes through the probe
/// interaction, Bob measures in Alice's basis, and Eve measures the collapsed
/// probe knowing the basis.
pub fn simulate_sifted(params: &CollectiveParams, rounds: u64, seed: u64) -> Result<SiftedOutcome> {
    if rounds == 0 {
        return Err(QkdError::InvalidParams("rounds must be at least 1".into()));
    }
    let iso = build_isometry(params);
    let measurements = PerAxis::from_fn(|t| eve_measurement(params, t));
    let measurements = PerAxis { x: measurements.x?, y: measurements.y?, z: measurements.z? };
    let bases = PerAxis::from_fn(make_basis);
    // Bob's collapse only depends on the sent state, so the joint states are precomputed.
    let joints = PerAxis::from_fn(|t| [0u8, 1].map(|i| iso.apply(bases[t].vector(i)).expect("qubit input")));

    let shard = |n: u64, rng: &mut SimRng| -> Result<Tally> {
        let mut tally = Tally::default();
        for _ in 0..n {
            let t = Axis::ALL[rng.random_range(0..3)];
            let bit = rng.random_range(0..2u8);
            let (bob, probe) = measure_leading(&joints[t][bit as usize], &bases[t], rng)?;
            let guess = measurements[t].measure(&probe, rng)?.guess();
            tally.rounds[t] += 1;
            tally.bob_match += u64::from(bob == bit);
            tally.eve_match[t] += u64::from(guess == bit);
        }
        Ok(tally)
    };
    let mut total = Tally::default();
    for part in sharded(rounds, seed, shard) {
        let part = part?;
        for t in Axis::ALL {
            total.rounds[t] += part.rounds[t];
            total.eve_match[t] += part.eve_match[t];
        }
        total.bob_match += part.bob_match;
    }
    let eve_hits = total.eve_match.x + total.eve_match.y + total.eve_match.z;
    Ok(SiftedOutcome {
        q_ab: Rate::new(total.bob_match, rounds),
        eve_accuracy: Rate::new(eve_hits, rounds),
        per_axis_eve: PerAxis::from_fn(|t| Rate::new(total.eve_match[t], total.rounds[t])),
    })
}
