//! Dense complex vectors and square matrices for the small Hilbert spaces used
//! here (qubit, qubit pair, qubit plus a four-dimensional probe).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{QkdError, Result};

pub type C64 = Complex64;

/// Tolerance for unit norm and for the unitary/projector/Hermitian checks.
pub const NORM_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density operator.
pub const POSITIVITY_TOL: f64 = -1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn all_finite(values: &[C64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A column vector of complex amplitudes.
///
/// Vectors are not required to be normalized: conditional probe states keep
/// their weight as the squared norm, see [`StateVector::weight`].
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(QkdError::InvalidParams("state vector must have dim >= 1".into()));
        }
        if !all_finite(&amps) {
            return Err(QkdError::NonFinite("state vector"));
        }
        Ok(Self { amps })
    }

    /// Like [`StateVector::new`] but also requires unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let v = Self::new(amps)?;
        v.ensure_normalized()?;
        Ok(v)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| cr(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self { amps: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Computational basis vector `|k>` of dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut v = Self::zeros(dim);
        v.amps[k] = cr(1.0);
        v
    }

    pub(crate) fn from_amps_unchecked(amps: Vec<C64>) -> Self {
        debug_assert!(!amps.is_empty() && all_finite(&amps));
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Weight of an unnormalized conditional state (its squared norm).
    pub fn weight(&self) -> f64 {
        self.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(QkdError::NotNormalized { norm_sqr: self.norm_sqr() })
        }
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched dims");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        Self::from_amps_unchecked(self.amps.iter().map(|a| a * factor).collect())
    }

    /// Unit vector along `self`, or `None` for a (numerically) zero vector.
    pub fn normalize(&self) -> Option<StateVector> {
        let n = self.norm_sqr().sqrt();
        if n <= 1e-300 {
            None
        } else {
            Some(self.scaled(cr(1.0 / n)))
        }
    }

    /// Tensor product `self ⊗ other`; `self` is the leading factor.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self::from_amps_unchecked(amps)
    }

    /// Equality up to a global phase: `|<u|v>| = 1` for unit vectors.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.is_normalized()
            && other.is_normalized()
            && (1.0 - self.inner(other).norm()).abs() <= tol
    }

    /// The rank-one operator `|self><self|` (unnormalized if `self` is).
    pub fn projector(&self) -> Operator {
        Operator::outer(self, self)
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim());
        StateVector::from_amps_unchecked(self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim());
        StateVector::from_amps_unchecked(self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect())
    }
}

/// A square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = cr(1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(QkdError::InvalidParams("operator must have dim >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(QkdError::DimensionMismatch { expected: dim, actual: row.len() });
            }
            data.extend(row);
        }
        if !all_finite(&data) {
            return Err(QkdError::NonFinite("operator"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| cr(x)).collect()).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = cr(v);
        }
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &StateVector, v: &StateVector) -> Self {
        assert_eq!(u.dim(), v.dim());
        let dim = u.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for a in u.amps() {
            for b in v.amps() {
                data.push(a * b.conj());
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> StateVector {
        StateVector::from_amps_unchecked((0..self.dim).map(|r| self.get(r, col)).collect())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for col in 0..n {
                m.data[col * n + r] = self.data[r * n + col].conj();
            }
        }
        m
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim(), "operator/state dimension mismatch");
        let n = self.dim;
        let amps = (0..n).map(|r| (0..n).map(|col| self.data[r * n + col] * v.amp(col)).sum()).collect();
        StateVector::from_amps_unchecked(amps)
    }

    /// `<v|self|v>`.
    pub fn expectation(&self, v: &StateVector) -> C64 {
        v.inner(&self.apply(v))
    }

    pub fn kron(&self, other: &Operator) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.get(r1, c1);
                for r2 in 0..m {
                    for c2 in 0..m {
                        out.data[(r1 * m + r2) * dim + c1 * m + c2] = a * other.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim)) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).max_abs_diff(self) <= tol
    }

    /// Hermitian, unit trace and positive semidefinite within the module
    /// tolerances.
    pub fn ensure_density(&self) -> Result<()> {
        if !self.is_hermitian(NORM_TOL) {
            return Err(QkdError::InvariantViolation("density operator is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(QkdError::InvariantViolation(format!("density operator has trace {tr}")));
        }
        let eig = self.eigh()?;
        if eig.values[0] < POSITIVITY_TOL {
            return Err(QkdError::InvariantViolation(format!("density operator has eigenvalue {}", eig.values[0])));
        }
        Ok(())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = cr(1.0);
        for k in 0..n {
            let pivot = (k..n).max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm())).unwrap();
            if a[pivot * n + k].norm() == 0.0 {
                return cr(0.0);
            }
            if pivot != k {
                for col in 0..n {
                    a.swap(k * n + col, pivot * n + col);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for i in k + 1..n {
                let f = a[i * n + k] / p;
                for col in k..n {
                    let sub = f * a[k * n + col];
                    a[i * n + col] -= sub;
                }
            }
        }
        det
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Eigenvalues are returned in ascending order.
    pub fn eigh(&self) -> Result<HermitianEigen> {
        if !self.is_hermitian(1e-9) {
            return Err(QkdError::InvariantViolation("eigh called on a non-Hermitian operator".into()));
        }
        let n = self.dim;
        let mut a = self.clone();
        let mut v = Operator::identity(n);
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);

        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|r| (0..n).filter(move |&col| col != r).map(move |col| (r, col)))
                .map(|(r, col)| a.get(r, col).norm_sqr())
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    let r = apq.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    let phase = apq / r; // e^{i phi}
                    let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * r);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = t * cs;
                    // G = diag(1, e^{-i phi}) * real rotation, acting on (p, q)
                    let mut g = Operator::identity(n);
                    g.set(p, p, cr(cs));
                    g.set(p, q, cr(sn));
                    g.set(q, p, phase.conj() * (-sn));
                    g.set(q, q, phase.conj() * cs);
                    a = &(&g.adjoint() * &a) * &g;
                    v = &v * &g;
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
        Ok(HermitianEigen {
            values: order.iter().map(|&i| a.get(i, i).re).collect(),
            vectors: order.iter().map(|&i| v.column(i)).collect(),
        })
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[C64]> = self.data.chunks(self.dim).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..n {
                    out.data[r * n + col] += a * rhs.data[k * n + col];
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

/// Trace distance `tr|rho - sigma|`, the sum of absolute eigenvalues of the
/// difference. Ranges over `[0, 2]` for density operators.
pub fn trace_distance(rho: &Operator, sigma: &Operator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QkdError::DimensionMismatch { expected: rho.dim(), actual: sigma.dim() });
    }
    let diff = rho - sigma;
    Ok(diff.eigh()?.values.iter().map(|l| l.abs()).sum())
}
