//! Intercept/resend attacks: Eve measures each qubit in a basis fixed by the
//! angles `(alpha, beta)` of an SU(2) rotation and forwards the eigenstate she
//! found.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::RngCore;
use serde::Serialize;

use crate::error::{QkdError, Result};
use crate::quantum::{born_sample, eve_projectors, make_basis, Axis, MeasurementBasis, PerAxis, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IrStrategy {
    alpha: f64,
    beta: f64,
}

impl IrStrategy {
    /// Both angles are reduced into `[0, 2pi)`; every probability below is
    /// `2pi`-periodic in each of them.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(QkdError::NonFinite("intercept/resend strategy"));
        }
        Ok(Self { alpha: canonical_angle(alpha), beta: canonical_angle(beta) })
    }

    /// `alpha = pi/4`, `beta = 2 arccos sqrt((3 + sqrt 3)/6)`.
    pub fn optimal() -> Self {
        Self { alpha: FRAC_PI_4, beta: 2.0 * p_optimal().sqrt().acos() }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn basis(&self) -> MeasurementBasis {
        MeasurementBasis::custom(self.alpha, self.beta).expect("finite angles")
    }
}

fn canonical_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `P_t`: Eve guesses Alice's bit; `Q_t`: Alice and Bob see no error. Both
/// conditioned on Alice and Bob using basis `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IrReport {
    pub p: PerAxis<f64>,
    pub q: PerAxis<f64>,
}

impl IrReport {
    pub fn min_p(&self) -> f64 {
        self.p.x.min(self.p.y).min(self.p.z)
    }

    pub fn mean_p(&self) -> f64 {
        (self.p.x + self.p.y + self.p.z) / 3.0
    }

    /// `max_{t,s} |P_t - P_s|`.
    pub fn p_spread(&self) -> f64 {
        let max = self.p.x.max(self.p.y).max(self.p.z);
        max - self.min_p()
    }
}

/// `(3 + sqrt 3) / 6`, Eve's success probability at the symmetric optimum.
pub fn p_optimal() -> f64 {
    (3.0 + 3f64.sqrt()) / 6.0
}

/// `(3 - sqrt 3) / 6`, the other symmetric value.
pub fn p_pessimal() -> f64 {
    (3.0 - 3f64.sqrt()) / 6.0
}

/// Closed-form `P_t`, `Q_t` for a strategy.
pub fn ir_analytic(strategy: &IrStrategy) -> IrReport {
    let (a, b) = (strategy.alpha, strategy.beta);
    let ch = (b / 2.0).cos();
    let sh = (b / 2.0).sin();
    let p = PerAxis { x: 0.5 * (1.0 + a.cos() * b.sin()), y: 0.5 * (1.0 + a.sin() * b.sin()), z: ch * ch };
    let q = PerAxis {
        x: (5.0 + (2.0 * a).cos() - 2.0 * a.cos().powi(2) * (2.0 * b).cos()) / 8.0,
        y: (5.0 - (2.0 * a).cos() - 2.0 * a.sin().powi(2) * (2.0 * b).cos()) / 8.0,
        z: ch.powi(4) + sh.powi(4),
    };
    IrReport { p, q }
}

/// `P_t`, `Q_t` evaluated from their definitions as sums of projector
/// expectation values. An independent route to [`ir_analytic`].
pub fn ir_from_projectors(strategy: &IrStrategy) -> IrReport {
    let (p0, p1) = eve_projectors(strategy.alpha, strategy.beta).expect("finite angles");
    let projectors = [p0, p1];
    let mut p = PerAxis::default();
    let mut q = PerAxis::default();
    for t in Axis::ALL {
        let basis = make_basis(t);
        for i in 0..2u8 {
            let v = basis.vector(i);
            p[t] += 0.5 * projectors[i as usize].expectation(v).re;
            for proj in &projectors {
                q[t] += 0.5 * proj.expectation(v).re.powi(2);
            }
        }
    }
    IrReport { p, q }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricSolution {
    pub alpha: f64,
    pub beta: f64,
    pub p_common: f64,
    pub q_common: f64,
    pub optimal: bool,
    /// `max(|P_x - P_y|, |P_y - P_z|)` at this root.
    pub residual: f64,
}

/// The four strategies with `P_x = P_y = P_z` on `[0, 2pi)^2`, in closed form.
pub fn solve_symmetric() -> Vec<SymmetricSolution> {
    let s_plus = p_optimal().sqrt();
    let s_minus = p_pessimal().sqrt();
    let roots = [
        (FRAC_PI_4, 2.0 * (-s_minus).acos()),
        (FRAC_PI_4, 2.0 * s_plus.acos()),
        (5.0 * FRAC_PI_4, 2.0 * s_minus.acos()),
        (5.0 * FRAC_PI_4, 2.0 * (-s_plus).acos()),
    ];
    roots
        .iter()
        .map(|&(alpha, beta)| {
            let report = ir_analytic(&IrStrategy { alpha, beta });
            let residual = (report.p.x - report.p.y).abs().max((report.p.y - report.p.z).abs());
            SymmetricSolution {
                alpha,
                beta,
                p_common: report.mean_p(),
                q_common: (report.q.x + report.q.y + report.q.z) / 3.0,
                optimal: report.mean_p() > 0.5,
                residual,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    pub alpha: f64,
    pub beta: f64,
    pub report: IrReport,
    pub min_p: f64,
    pub mean_p: f64,
    pub candidate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCluster {
    pub cells: usize,
    /// Circular mean of the member cells.
    pub alpha: f64,
    pub beta: f64,
    pub best_min_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrScan {
    pub alpha_steps: usize,
    pub beta_steps: usize,
    /// Cells whose `P_t` spread is below this bound are symmetry candidates.
    pub tolerance: f64,
    /// Row-major in alpha: cell `(i, j)` is at index `i * beta_steps + j`.
    pub cells: Vec<ScanCell>,
}

/// Evaluates [`ir_analytic`] on a uniform grid over `[0, 2pi)^2`.
pub fn ir_scan(alpha_steps: usize, beta_steps: usize) -> Result<IrScan> {
    if alpha_steps < 2 || beta_steps < 2 {
        return Err(QkdError::InvalidParams("scan needs at least 2 steps per axis".into()));
    }
    let da = TAU / alpha_steps as f64;
    let db = TAU / beta_steps as f64;
    // |grad (P_t - P_s)| <= 1, so a root lies within one step of a cell whose
    // spread is below twice the step.
    let tolerance = 2.0 * da.max(db);
    let mut cells = Vec::with_capacity(alpha_steps * beta_steps);
    for i in 0..alpha_steps {
        for j in 0..beta_steps {
            let strategy = IrStrategy { alpha: i as f64 * da, beta: j as f64 * db };
            let report = ir_analytic(&strategy);
            cells.push(ScanCell {
                alpha: strategy.alpha,
                beta: strategy.beta,
                report,
                min_p: report.min_p(),
                mean_p: report.mean_p(),
                candidate: report.p_spread() < tolerance,
            });
        }
    }
    Ok(IrScan { alpha_steps, beta_steps, tolerance, cells })
}

impl IrScan {
    pub fn max_min_p(&self) -> f64 {
        self.cells.iter().map(|c| c.min_p).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Connected components (8-neighbourhood, periodic in both angles) of the
    /// candidate mask.
    pub fn clusters(&self) -> Vec<ScanCluster> {
        let (na, nb) = (self.alpha_steps, self.beta_steps);
        let mut seen = vec![false; self.cells.len()];
        let mut clusters = Vec::new();
        for start in 0..self.cells.len() {
            if seen[start] || !self.cells[start].candidate {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = Vec::new();
            while let Some(k) = stack.pop() {
                members.push(k);
                let (i, j) = (k / nb, k % nb);
                for di in [na - 1, 0, 1] {
                    for dj in [nb - 1, 0, 1] {
                        let n = ((i + di) % na) * nb + (j + dj) % nb;
                        if !seen[n] && self.cells[n].candidate {
                            seen[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
            let circ_mean = |angle: &dyn Fn(&ScanCell) -> f64| {
                let (s, c) = members
                    .iter()
                    .map(|&k| angle(&self.cells[k]).sin_cos())
                    .fold((0.0, 0.0), |(s, c), (ds, dc)| (s + ds, c + dc));
                canonical_angle(s.atan2(c))
            };
            clusters.push(ScanCluster {
                cells: members.len(),
                alpha: circ_mean(&|c| c.alpha),
                beta: circ_mean(&|c| c.beta),
                best_min_p: members.iter().map(|&k| self.cells[k].min_p).fold(f64::NEG_INFINITY, f64::max),
            });
        }
        clusters
    }
}

/// Eve measures `input` in her basis and resends the eigenstate she found.
/// Returns the qubit delivered to Bob and Eve's bit.
pub fn ir_attack_channel<R: RngCore + ?Sized>(
    input: &StateVector,
    strategy: &IrStrategy,
    rng: &mut R,
) -> Result<(StateVector, u8)> {
    let basis = strategy.basis();
    let bit = born_sample(input, &basis, rng)?;
    Ok((basis.vector(bit).clone(), bit))
}

/// Eve's success probability and the no-error probability for the optimal
/// (Breidbart-basis) intercept/resend attack on BB84: `(2 + sqrt 2)/4`, `3/4`.
pub fn bb84_breidbart_constants() -> (f64, f64) {
    ((2.0 + 2f64.sqrt()) / 4.0, 0.75)
}

/// Breidbart basis in the `(alpha, beta)` parametrization: halfway between
/// the z and x axes.
pub fn breidbart_strategy() -> IrStrategy {
    IrStrategy { alpha: 0.0, beta: PI / 4.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn z_measurement_strategy() {
        for alpha in [0.0, 1.0, 4.0] {
            let r = ir_analytic(&IrStrategy::new(alpha, 0.0).unwrap());
            assert!((r.p.z - 1.0).abs() < 1e-15 && (r.q.z - 1.0).abs() < 1e-15);
            assert!((r.p.x - 0.5).abs() < 1e-15 && (r.p.y - 0.5).abs() < 1e-15);
            assert!((r.q.x - 0.5).abs() < 1e-15 && (r.q.y - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn optimum_values() {
        let r = ir_analytic(&IrStrategy::optimal());
        for t in Axis::ALL {
            assert!((r.p[t] - p_optimal()).abs() < 1e-12);
            assert!((r.q[t] - 2.0 / 3.0).abs() < 1e-12);
        }
        assert!((p_optimal() - 0.7887).abs() < 5e-5);
    }

    #[test]
    fn strategy_angles_are_canonicalized() {
        let s = IrStrategy::new(-FRAC_PI_4, 9.0).unwrap();
        assert!((s.alpha() - 7.0 * FRAC_PI_4).abs() < 1e-15);
        assert!((s.beta() - (9.0 - TAU)).abs() < 1e-15);
        assert!(IrStrategy::new(f64::INFINITY, 0.0).is_err());
        let tiny = IrStrategy::new(-1e-300, 0.0).unwrap();
        assert!(tiny.alpha() < TAU);
    }

    #[test]
    fn four_symmetric_roots_with_reported_betas() {
        let sols = solve_symmetric();
        assert_eq!(sols.len(), 4);
        let betas: Vec<f64> = sols.iter().map(|s| s.beta).collect();
        for (b, want) in betas.iter().zip([4.097, 0.9553, 2.186, 5.328]) {
            assert!((b - want).abs() < 1e-3, "{b} vs {want}");
        }
        for s in &sols {
            assert!(s.residual < 1e-10);
            let want = if s.optimal { p_optimal() } else { p_pessimal() };
            assert!((s.p_common - want).abs() < 1e-12);
        }
        assert_eq!(sols.iter().filter(|s| s.optimal).count(), 2);
    }

    #[test]
    fn degenerate_scan_still_reports_cells() {
        let scan = ir_scan(2, 2).unwrap();
        assert_eq!(scan.cells.len(), 4);
        assert!(ir_scan(1, 5).is_err());
    }

    #[test]
    fn channel_leaves_eigenstates_alone() {
        let s = IrStrategy::new(0.7, 2.1).unwrap();
        let basis = s.basis();
        let mut rng = stream_rng(3, 0);
        for bit in 0..2u8 {
            for _ in 0..500 {
                let (out, eve) = ir_attack_channel(basis.vector(bit), &s, &mut rng).unwrap();
                assert_eq!(eve, bit);
                assert!(out.same_ray(basis.vector(bit), 1e-14));
            }
        }
    }

    #[test]
    fn breidbart_constants_follow_from_the_bb84_axes() {
        let (p, q) = bb84_breidbart_constants();
        let r = ir_analytic(&breidbart_strategy());
        assert!((r.p.z - p).abs() < 1e-15 && (r.p.x - p).abs() < 1e-15);
        assert!((r.q.z - q).abs() < 1e-15 && (r.q.x - q).abs() < 1e-15);
        assert!(p > p_optimal() && q > 2.0 / 3.0);
    }
}
