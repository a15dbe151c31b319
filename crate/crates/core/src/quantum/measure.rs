//! Born-rule sampling, including measurement of one qubit of a bipartite
//! state `qubit ⊗ rest` or `rest ⊗ qubit`.

use rand::{Rng, RngCore};

use super::basis::MeasurementBasis;
use super::linalg::StateVector;
use crate::error::{QkdError, Result};

/// `|<xi_j|state>|^2` for both basis vectors.
pub fn born_probabilities(state: &StateVector, basis: &MeasurementBasis) -> Result<[f64; 2]> {
    if state.dim() != 2 {
        return Err(QkdError::DimensionMismatch { expected: 2, actual: state.dim() });
    }
    state.ensure_normalized()?;
    Ok([basis.vector(0).inner(state).norm_sqr(), basis.vector(1).inner(state).norm_sqr()])
}

/// Samples an index with probability proportional to `weights[k]`.
///
/// Zero-weight entries are never returned.
pub fn sample_weighted<R: RngCore + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let mut u = rng.random::<f64>() * total;
    let mut last_positive = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        if u < w {
            return k;
        }
        u -= w;
        last_positive = k;
    }
    last_positive
}

/// Measures a normalized qubit in `basis` and returns the outcome index.
pub fn born_sample<R: RngCore + ?Sized>(state: &StateVector, basis: &MeasurementBasis, rng: &mut R) -> Result<u8> {
    let p = born_probabilities(state, basis)?;
    Ok(sample_weighted(&p, rng) as u8)
}

/// `(<b| ⊗ I) psi` for a joint state laid out as `qubit ⊗ rest`.
pub fn project_leading(bra: &StateVector, joint: &StateVector) -> StateVector {
    let rest = joint.dim() / 2;
    assert_eq!(joint.dim(), 2 * rest);
    let amps = (0..rest).map(|r| bra.amp(0).conj() * joint.amp(r) + bra.amp(1).conj() * joint.amp(rest + r)).collect();
    StateVector::from_amps_unchecked(amps)
}

/// `(I ⊗ <b|) psi` for a joint state laid out as `rest ⊗ qubit`.
pub fn project_trailing(bra: &StateVector, joint: &StateVector) -> StateVector {
    let rest = joint.dim() / 2;
    assert_eq!(joint.dim(), 2 * rest);
    let amps =
        (0..rest).map(|r| bra.amp(0).conj() * joint.amp(2 * r) + bra.amp(1).conj() * joint.amp(2 * r + 1)).collect();
    StateVector::from_amps_unchecked(amps)
}

fn collapse<R: RngCore + ?Sized>(branches: [StateVector; 2], rng: &mut R) -> Result<(u8, StateVector)> {
    let w = [branches[0].weight(), branches[1].weight()];
    if (w[0] + w[1] - 1.0).abs() > 1e-10 {
        return Err(QkdError::NotNormalized { norm_sqr: w[0] + w[1] });
    }
    let k = sample_weighted(&w, rng);
    let [b0, b1] = branches;
    let chosen = if k == 0 { b0 } else { b1 };
    let post = chosen.normalize().expect("sampled branch has positive weight");
    Ok((k as u8, post))
}

/// Measures the leading qubit of `qubit ⊗ rest`. Returns the outcome and the
/// normalized post-measurement state of `rest`.
pub fn measure_leading<R: RngCore + ?Sized>(
    joint: &StateVector,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<(u8, StateVector)> {
    check_even(joint)?;
    collapse([project_leading(basis.vector(0), joint), project_leading(basis.vector(1), joint)], rng)
}

/// Measures the trailing qubit of `rest ⊗ qubit`. Returns the outcome and the
/// normalized post-measurement state of `rest`.
pub fn measure_trailing<R: RngCore + ?Sized>(
    joint: &StateVector,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<(u8, StateVector)> {
    check_even(joint)?;
    collapse([project_trailing(basis.vector(0), joint), project_trailing(basis.vector(1), joint)], rng)
}

fn check_even(joint: &StateVector) -> Result<()> {
    if joint.dim() < 2 || !joint.dim().is_multiple_of(2) {
        return Err(QkdError::DimensionMismatch { expected: 2 * (joint.dim() / 2).max(1), actual: joint.dim() });
    }
    Ok(())
}

/// Maps an outcome index to the eigenvalue `+1` / `-1`.
pub fn outcome_sign(outcome: u8) -> f64 {
    if outcome == 0 {
        1.0
    } else {
        -1.0
    }
}
