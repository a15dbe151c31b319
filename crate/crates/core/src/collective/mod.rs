//! The one-parameter collective attack.
//!
//! Eve entangles a four-dimensional probe with each qubit through an isometry
//! fixed by a single angle `theta` (`Re<A|C> = cos theta`), waits for the
//! basis announcement, then measures the probe. Fidelity and disturbance
//! follow from `cos theta = 2 - 1/F` and `D = 1 - F`.

mod channel;
mod curves;
mod measurement;
mod probe;

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{QkdError, Result};

pub use channel::{collective_attack_channel, simulate_sifted, SiftedOutcome};
pub use curves::{
    bb84_curves, bb84_ie_closed_form, binary_entropy_term, ie_closed_form, ie_curve, pe_curve, Bb84Curves,
};
pub use measurement::{eve_measurement, EveMeasurement, EveOutcome};
pub use probe::{
    build_isometry, build_probe_vectors, probe_conditionals, verify_bruss, BrussReport, EveIsometry, ProbeConditionals,
    ProbeVectors, ResidualFamily,
};

/// `theta`, `F` and `D` for one attack, kept mutually consistent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectiveParams {
    pub theta: f64,
    pub fidelity: f64,
    pub disturbance: f64,
    cos_theta: f64,
    sin_theta: f64,
}

impl CollectiveParams {
    /// `theta` in `[0, pi/2]`. Larger angles would need `F < 1/2`.
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(QkdError::NonFinite("theta"));
        }
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
            return Err(QkdError::out_of_range("theta", theta, "[0, pi/2]"));
        }
        let theta = theta.min(FRAC_PI_2);
        let (sin_theta, cos_theta) = theta.sin_cos();
        let cos_theta = cos_theta.max(0.0);
        let fidelity = 1.0 / (2.0 - cos_theta);
        Ok(Self { theta, fidelity, disturbance: 1.0 - fidelity, cos_theta, sin_theta })
    }

    /// `F` in `[1/2, 1]`.
    pub fn from_fidelity(fidelity: f64) -> Result<Self> {
        if !fidelity.is_finite() {
            return Err(QkdError::NonFinite("fidelity"));
        }
        if !(0.5..=1.0).contains(&fidelity) {
            return Err(QkdError::out_of_range("fidelity", fidelity, "[1/2, 1]"));
        }
        Self::from_disturbance_unchecked(1.0 - fidelity, fidelity)
    }

    /// `D` in `[0, 1/2]`.
    pub fn from_disturbance(disturbance: f64) -> Result<Self> {
        if !disturbance.is_finite() {
            return Err(QkdError::NonFinite("disturbance"));
        }
        if !(0.0..=0.5).contains(&disturbance) {
            return Err(QkdError::out_of_range("disturbance", disturbance, "[0, 1/2]"));
        }
        Self::from_disturbance_unchecked(disturbance, 1.0 - disturbance)
    }

    fn from_disturbance_unchecked(d: f64, f: f64) -> Result<Self> {
        // cos = (1 - 2D)/(1 - D), sin = sqrt((2 - 3D) D)/(1 - D)
        let cos_theta = ((1.0 - 2.0 * d) / f).clamp(0.0, 1.0);
        let sin_theta = (((2.0 - 3.0 * d) * d).max(0.0)).sqrt() / f;
        Ok(Self {
            theta: sin_theta.atan2(cos_theta),
            fidelity: f,
            disturbance: d,
            cos_theta,
            sin_theta: sin_theta.min(1.0),
        })
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    pub fn sin_theta(&self) -> f64 {
        self.sin_theta
    }
}
