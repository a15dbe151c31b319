use std::f64::consts::LN_2;

use serde::Serialize;

use super::CollectiveParams;
use crate::error::{QkdError, Result};

fn check_disturbance(d: f64) -> Result<()> {
    if !d.is_finite() {
        return Err(QkdError::NonFinite("disturbance"));
    }
    if !(0.0..=0.5).contains(&d) {
        return Err(QkdError::out_of_range("disturbance", d, "[0, 1/2]"));
    }
    Ok(())
}

/// `P log2 P + (1 - P) log2 (1 - P)` with `0 log 0 = 0`. This is minus the
/// binary entropy.
pub fn binary_entropy_term(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Eve's maximal probability of guessing Alice's sifted bit,
/// `(1 + D + sqrt((2 - 3D) D)) / 2`.
pub fn pe_curve(d: f64) -> Result<f64> {
    check_disturbance(d)?;
    Ok(0.5 * (1.0 + d + ((2.0 - 3.0 * d) * d).sqrt()))
}

/// Eve's Shannon information from its definition: `1 + F H(P_noflip) + (1 - F) H(P_flip)`
/// with `P_noflip = (1 + sin theta)/2` and `P_flip = 1`.
pub fn ie_curve(d: f64) -> Result<f64> {
    check_disturbance(d)?;
    let p = CollectiveParams::from_disturbance(d)?;
    let no_flip = 0.5 * (1.0 + p.sin_theta());
    Ok(1.0 + p.fidelity * binary_entropy_term(no_flip) + (1.0 - p.fidelity) * binary_entropy_term(1.0))
}

/// The arccoth closed form of [`ie_curve`]. Only defined strictly inside `(0, 1/2)`.
pub fn ie_closed_form(d: f64) -> Result<f64> {
    check_disturbance(d)?;
    if d == 0.0 || d == 0.5 {
        return Err(QkdError::out_of_range("disturbance", d, "(0, 1/2)"));
    }
    let root = ((2.0 - 3.0 * d) * d).sqrt();
    let ln4 = 2.0 * LN_2;
    let x = (1.0 - d) / root;
    let arccoth = 0.5 * ((x + 1.0) / (x - 1.0)).ln();
    Ok(1.0 + 2.0 * root / ln4 * arccoth - 2.0 * (1.0 - d) / ln4 * (2.0 * (1.0 - d) / (1.0 - 2.0 * d)).ln())
}

/// BB84 values under its optimal collective attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bb84Curves {
    pub p_e: f64,
    pub i_e: f64,
    pub q_ab: f64,
}

/// `p_e = 1/2 + sqrt(D(1-D))`. The information is evaluated as
/// `1 + H(p_e)`, which equals the arctanh form and stays finite at `D = 1/2`.
pub fn bb84_curves(d: f64) -> Result<Bb84Curves> {
    check_disturbance(d)?;
    let p_e = (0.5 + (d * (1.0 - d)).sqrt()).min(1.0);
    Ok(Bb84Curves { p_e, i_e: 1.0 + binary_entropy_term(p_e), q_ab: 1.0 - d })
}

/// `ln(1 - 2D)/ln 2 + (2/ln 2) sqrt(D(1-D)) arctanh(2 sqrt(D(1-D)))`, valid on `[0, 1/2)`.
pub fn bb84_ie_closed_form(d: f64) -> Result<f64> {
    check_disturbance(d)?;
    if d == 0.5 {
        return Err(QkdError::out_of_range("disturbance", d, "[0, 1/2)"));
    }
    let s = (d * (1.0 - d)).sqrt();
    Ok((1.0 - 2.0 * d).ln() / LN_2 + 2.0 / LN_2 * s * (2.0 * s).atanh())
}
