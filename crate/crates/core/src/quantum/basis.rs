use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::linalg::{c, cr, Operator, StateVector, NORM_TOL};
use crate::error::{QkdError, Result};

/// One of the three protocol axes. `t` in the usual notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// A value for each of the x, y and z axes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerAxis<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> PerAxis<T> {
    pub fn from_fn(mut f: impl FnMut(Axis) -> T) -> Self {
        Self { x: f(Axis::X), y: f(Axis::Y), z: f(Axis::Z) }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Axis, &T)> {
        [(Axis::X, &self.x), (Axis::Y, &self.y), (Axis::Z, &self.z)].into_iter()
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerAxis<U> {
        PerAxis { x: f(&self.x), y: f(&self.y), z: f(&self.z) }
    }
}

impl<T> Index<Axis> for PerAxis<T> {
    type Output = T;
    fn index(&self, axis: Axis) -> &T {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }
}

impl<T> IndexMut<Axis> for PerAxis<T> {
    fn index_mut(&mut self, axis: Axis) -> &mut T {
        match axis {
            Axis::X => &mut self.x,
            Axis::Y => &mut self.y,
            Axis::Z => &mut self.z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BasisLabel {
    Z,
    X,
    Y,
    /// Eve's basis `V(alpha, beta, 0){|0>, |1>}`.
    Custom {
        alpha: f64,
        beta: f64,
    },
}

impl From<Axis> for BasisLabel {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::X => BasisLabel::X,
            Axis::Y => BasisLabel::Y,
            Axis::Z => BasisLabel::Z,
        }
    }
}

/// An ordered orthonormal qubit basis `{|xi_0>, |xi_1>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    label: BasisLabel,
    vectors: [StateVector; 2],
}

impl MeasurementBasis {
    pub fn from_vectors(label: BasisLabel, v0: StateVector, v1: StateVector) -> Result<Self> {
        for v in [&v0, &v1] {
            if v.dim() != 2 {
                return Err(QkdError::DimensionMismatch { expected: 2, actual: v.dim() });
            }
            v.ensure_normalized()?;
        }
        if v0.inner(&v1).norm() > NORM_TOL {
            return Err(QkdError::InvalidParams("basis vectors are not orthogonal".into()));
        }
        Ok(Self { label, vectors: [v0, v1] })
    }

    /// Eve's intercept basis: the columns of `V(alpha, beta, 0)`.
    pub fn custom(alpha: f64, beta: f64) -> Result<Self> {
        let v = su2_rotation(alpha, beta, 0.0)?;
        Self::from_vectors(BasisLabel::Custom { alpha, beta }, v.column(0), v.column(1))
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    pub fn vector(&self, outcome: u8) -> &StateVector {
        &self.vectors[outcome as usize]
    }

    pub fn vectors(&self) -> &[StateVector; 2] {
        &self.vectors
    }

    pub fn projector(&self, outcome: u8) -> Operator {
        self.vector(outcome).projector()
    }

    /// The observable `|xi_0><xi_0| - |xi_1><xi_1|`.
    pub fn observable(&self) -> Operator {
        &self.projector(0) - &self.projector(1)
    }
}

/// The z, x or y basis of the six-state protocol.
pub fn make_basis(axis: Axis) -> MeasurementBasis {
    let h = FRAC_1_SQRT_2;
    let (v0, v1) = match axis {
        Axis::Z => (vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(1.0)]),
        Axis::X => (vec![cr(h), cr(h)], vec![cr(h), cr(-h)]),
        Axis::Y => (vec![cr(h), c(0.0, h)], vec![cr(h), c(0.0, -h)]),
    };
    MeasurementBasis {
        label: axis.into(),
        vectors: [StateVector::from_amps_unchecked(v0), StateVector::from_amps_unchecked(v1)],
    }
}

fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(QkdError::NonFinite(what))
    }
}

/// `V(alpha, beta, gamma) = exp(-i alpha sz / 2) exp(-i beta sy / 2) exp(-i gamma sz / 2)`.
pub fn su2_rotation(alpha: f64, beta: f64, gamma: f64) -> Result<Operator> {
    ensure_finite(&[alpha, beta, gamma], "su2 angles")?;
    let (s, co) = (beta / 2.0).sin_cos();
    let phase = |x: f64| c(0.0, x).exp();
    Operator::from_rows(vec![
        vec![phase(-(alpha + gamma) / 2.0) * co, -phase(-(alpha - gamma) / 2.0) * s],
        vec![phase((alpha - gamma) / 2.0) * s, phase((alpha + gamma) / 2.0) * co],
    ])
}

/// Eve's projectors `P(xi_0)`, `P(xi_1)` written out in closed form.
pub fn eve_projectors(alpha: f64, beta: f64) -> Result<(Operator, Operator)> {
    ensure_finite(&[alpha, beta], "projector angles")?;
    let cos2 = (beta / 2.0).cos().powi(2);
    let sin2 = (beta / 2.0).sin().powi(2);
    let off = c(0.0, -alpha).exp() * (0.5 * beta.sin());
    let p0 = Operator::from_rows(vec![vec![cr(cos2), off], vec![off.conj(), cr(sin2)]])?;
    let p1 = Operator::from_rows(vec![vec![cr(sin2), -off], vec![-off.conj(), cr(cos2)]])?;
    Ok((p0, p1))
}
