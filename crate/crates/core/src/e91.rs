//! Singlet correlations along the three protocol axes, the hidden-variable
//! account of intercept/resend attacks on both wings, and the correlation
//! left over after a collective attack on Bob's wing.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::collective::{build_isometry, CollectiveParams};
use crate::error::{QkdError, Result};
use crate::quantum::{
    born_sample, c, cr, make_basis, measure_leading, measure_trailing, outcome_sign, Axis, BasisLabel,
    MeasurementBasis, Operator, PerAxis, StateVector,
};
use crate::rng::{sharded, SimRng};
use crate::stats::MeanAccumulator;

const UNIT_TOL: f64 = 1e-12;
const POLE_TOL: f64 = 1e-12;

/// A real direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if ![x, y, z].iter().all(|v| v.is_finite()) {
            return Err(QkdError::NonFinite("direction"));
        }
        let norm_sqr = x * x + y * y + z * z;
        if (norm_sqr - 1.0).abs() > UNIT_TOL {
            return Err(QkdError::NotUnit { norm_sqr });
        }
        Ok(Self { x, y, z })
    }

    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() {
            return Err(QkdError::NonFinite("direction"));
        }
        if norm == 0.0 {
            return Err(QkdError::NotUnit { norm_sqr: 0.0 });
        }
        Ok(Self { x: x / norm, y: y / norm, z: z / norm })
    }

    pub const fn e_x() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub const fn e_y() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub const fn e_z() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn axis(t: Axis) -> Self {
        match t {
            Axis::X => Self::e_x(),
            Axis::Y => Self::e_y(),
            Axis::Z => Self::e_z(),
        }
    }

    /// Uniform on the sphere: three standard normals, normalized.
    pub fn random_uniform<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        loop {
            let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(v) = Self::normalize(x, y, z) {
                return v;
            }
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn component(&self, t: Axis) -> f64 {
        match t {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn neg(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// `n · sigma`.
pub fn spin_observable(n: &UnitVector3) -> Operator {
    Operator::from_rows(vec![vec![cr(n.z), c(n.x, -n.y)], vec![c(n.x, n.y), cr(-n.z)]]).expect("finite entries")
}

/// Eigenvectors of `n · sigma` for `+1` and `-1`. Next to the poles the
/// general formula divides by zero, so the z eigenvectors are used there.
pub fn spin_eigenvectors(n: &UnitVector3) -> [StateVector; 2] {
    let up = StateVector::basis_state(2, 0);
    let down = StateVector::basis_state(2, 1);
    if 1.0 - n.z < POLE_TOL {
        return [up, down];
    }
    if 1.0 + n.z < POLE_TOL {
        return [down, up];
    }
    let lower = c(n.x, n.y);
    let phi = |upper: f64, scale: f64| {
        let v = StateVector::new(vec![cr(upper), lower]).expect("finite");
        // the scale is sqrt(2(1 ± n_z)); renormalizing absorbs rounding near the poles
        v.scaled(cr(1.0 / scale)).normalize().expect("nonzero")
    };
    [phi(1.0 + n.z, (2.0 * (1.0 + n.z)).sqrt()), phi(-1.0 + n.z, (2.0 * (1.0 - n.z)).sqrt())]
}

/// The measurement basis `{phi(n)_0, phi(n)_1}`.
pub fn spin_basis(n: &UnitVector3) -> MeasurementBasis {
    let [v0, v1] = spin_eigenvectors(n);
    let label = BasisLabel::Custom { alpha: n.y.atan2(n.x), beta: n.z.clamp(-1.0, 1.0).acos() };
    MeasurementBasis::from_vectors(label, v0, v1).expect("eigenvectors are orthonormal")
}

/// `(|01> - |10>)/sqrt(2)` with Alice's qubit first.
pub fn singlet() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(vec![cr(0.0), cr(h), cr(-h), cr(0.0)]).expect("finite")
}

/// Same-axis correlations `c_t` and `S = |c_x + c_y + c_z|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub c: PerAxis<f64>,
    pub s: f64,
    pub standard_errors: Option<PerAxis<f64>>,
    pub s_standard_error: Option<f64>,
    pub exceeds_hidden_variable_bound: bool,
}

/// Largest `S` any hidden-variable model of the attack can produce.
pub const HIDDEN_VARIABLE_BOUND: f64 = 1.0;

impl CorrelationReport {
    fn exact(c: PerAxis<f64>) -> Self {
        let s = (c.x + c.y + c.z).abs();
        Self {
            c,
            s,
            standard_errors: None,
            s_standard_error: None,
            exceeds_hidden_variable_bound: s > HIDDEN_VARIABLE_BOUND + 1e-12,
        }
    }

    fn estimated(c: PerAxis<f64>, se: PerAxis<f64>, s_se: f64) -> Self {
        let s = (c.x + c.y + c.z).abs();
        Self {
            c,
            s,
            standard_errors: Some(se),
            s_standard_error: Some(s_se),
            exceeds_hidden_variable_bound: s > HIDDEN_VARIABLE_BOUND + (4.0 * s_se).max(1e-12),
        }
    }

    fn from_axis_means(acc: &PerAxis<MeanAccumulator>) -> Self {
        let se = acc.map(|a| a.standard_error());
        let s_se = (se.x * se.x + se.y * se.y + se.z * se.z).sqrt();
        Self::estimated(acc.map(|a| a.mean()), se, s_se)
    }
}

/// `<Psi-| E(e_t) ⊗ E(e_t) |Psi->` evaluated exactly.
pub fn singlet_correlation_quantum() -> CorrelationReport {
    let psi = singlet();
    let c = PerAxis::from_fn(|t| {
        let e = spin_observable(&UnitVector3::axis(t));
        e.kron(&e).expectation(&psi).re
    });
    CorrelationReport::exact(c)
}

fn merge_axes(parts: Vec<Result<PerAxis<MeanAccumulator>>>) -> Result<PerAxis<MeanAccumulator>> {
    let mut total = PerAxis::<MeanAccumulator>::default();
    for part in parts {
        let part = part?;
        for t in Axis::ALL {
            total[t].merge(&part[t]);
        }
    }
    Ok(total)
}

/// Singlet pairs measured by Alice and Bob in a shared, uniformly chosen axis.
pub fn singlet_correlation_mc(rounds: u64, seed: u64) -> Result<CorrelationReport> {
    check_rounds(rounds)?;
    let psi = singlet();
    let bases = PerAxis::from_fn(make_basis);
    let parts = sharded(rounds, seed, |n, rng: &mut SimRng| {
        let mut acc = PerAxis::<MeanAccumulator>::default();
        for _ in 0..n {
            let t = Axis::ALL[rng.random_range(0..3)];
            let (a, bob) = measure_leading(&psi, &bases[t], rng)?;
            let b = born_sample(&bob, &bases[t], rng)?;
            acc[t].push(outcome_sign(a) * outcome_sign(b));
        }
        Ok(acc)
    });
    Ok(CorrelationReport::from_axis_means(&merge_axes(parts)?))
}

/// Probability that Eve, measuring the singlet along `n_a` and `n_b`,
/// finds outcomes `i` and `j`: `(1 - (-1)^(i+j) n_a · n_b)/4`.
pub fn eve_outcome_probability(n_a: &UnitVector3, i: u8, n_b: &UnitVector3, j: u8) -> f64 {
    let sign = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
    0.25 * (1.0 - sign * n_a.dot(n_b))
}

/// A density over the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SphereDensity {
    Fixed(UnitVector3),
    Uniform,
    /// One of `±e_x, ±e_y, ±e_z`, each with probability 1/6.
    Axes,
}

impl SphereDensity {
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> UnitVector3 {
        match self {
            SphereDensity::Fixed(n) => *n,
            SphereDensity::Uniform => UnitVector3::random_uniform(rng),
            SphereDensity::Axes => {
                let n = UnitVector3::axis(Axis::ALL[rng.random_range(0..3)]);
                if rng.random::<bool>() {
                    n
                } else {
                    n.neg()
                }
            }
        }
    }

    /// `E[n_k n_l]`.
    pub fn second_moment(&self) -> [[f64; 3]; 3] {
        match self {
            SphereDensity::Fixed(n) => {
                let v = [n.x, n.y, n.z];
                std::array::from_fn(|k| std::array::from_fn(|l| v[k] * v[l]))
            }
            SphereDensity::Uniform | SphereDensity::Axes => {
                std::array::from_fn(|k| std::array::from_fn(|l| if k == l { 1.0 / 3.0 } else { 0.0 }))
            }
        }
    }
}

pub type PairSampler = Arc<dyn Fn(&mut dyn RngCore) -> (UnitVector3, UnitVector3) + Send + Sync>;

/// Joint density of Eve's two measurement directions.
#[derive(Clone)]
pub enum DirectionDistribution {
    DiracPair(UnitVector3, UnitVector3),
    /// Independent directions on the two wings.
    Product(SphereDensity, SphereDensity),
    /// Only Bob's qubit is intercepted. Alice's wing acts like a measurement
    /// along the announced axis.
    BobOnly(SphereDensity),
    /// Both wings measured along the same random direction.
    Aligned(SphereDensity),
    Custom(PairSampler),
}

impl fmt::Debug for DirectionDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DiracPair(a, b) => f.debug_tuple("DiracPair").field(a).field(b).finish(),
            Self::Product(a, b) => f.debug_tuple("Product").field(a).field(b).finish(),
            Self::BobOnly(b) => f.debug_tuple("BobOnly").field(b).finish(),
            Self::Aligned(n) => f.debug_tuple("Aligned").field(n).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl DirectionDistribution {
    pub fn product_uniform() -> Self {
        Self::Product(SphereDensity::Uniform, SphereDensity::Uniform)
    }

    /// Directions `(n_a, n_b)` for a round announced in axis `t`.
    pub fn sample(&self, t: Axis, rng: &mut dyn RngCore) -> (UnitVector3, UnitVector3) {
        match self {
            Self::DiracPair(a, b) => (*a, *b),
            Self::Product(a, b) => (a.sample(rng), b.sample(rng)),
            Self::BobOnly(b) => (UnitVector3::axis(t), b.sample(rng)),
            Self::Aligned(n) => {
                let v = n.sample(rng);
                (v, v)
            }
            Self::Custom(sampler) => sampler(rng),
        }
    }

    /// A draw that does not depend on the axis. `None` for Alice means her
    /// direction is the announced axis itself.
    fn sample_shared(&self, rng: &mut dyn RngCore) -> (Option<UnitVector3>, UnitVector3) {
        match self {
            Self::BobOnly(b) => (None, b.sample(rng)),
            other => {
                let (a, b) = other.sample(Axis::Z, rng);
                (Some(a), b)
            }
        }
    }

    fn intercepts_alice(&self) -> bool {
        !matches!(self, Self::BobOnly(_))
    }
}

/// The five distributions used to probe the hidden-variable ceiling.
pub fn canned_distributions() -> Vec<(&'static str, DirectionDistribution)> {
    vec![
        ("dirac-z", DirectionDistribution::DiracPair(UnitVector3::e_z(), UnitVector3::e_z())),
        ("product-uniform", DirectionDistribution::product_uniform()),
        ("product-axes", DirectionDistribution::Product(SphereDensity::Axes, SphereDensity::Axes)),
        ("aligned-uniform", DirectionDistribution::Aligned(SphereDensity::Uniform)),
        ("bob-only-uniform", DirectionDistribution::BobOnly(SphereDensity::Uniform)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvMode {
    /// Closed-form expectation. Unavailable for custom samplers.
    Exact,
    Mc {
        rounds: u64,
        seed: u64,
    },
}

/// `-(n_a · n_b)(n_a · e_t)(n_b · e_t)`, the hidden-variable integrand of `c_t`.
pub fn hv_integrand(n_a: &UnitVector3, n_b: &UnitVector3, t: Axis) -> f64 {
    -n_a.dot(n_b) * n_a.component(t) * n_b.component(t)
}

/// Correlations of the hidden-variable model, `c_t = -∫ρ (n_a·n_b)(n_a·e_t)(n_b·e_t)`.
/// Their sum has magnitude `∫ρ (n_a·n_b)^2 ≤ 1`.
pub fn hv_sbar(dist: &DirectionDistribution, mode: HvMode) -> Result<CorrelationReport> {
    match mode {
        HvMode::Exact => hv_exact(dist).map(CorrelationReport::exact),
        HvMode::Mc { rounds, seed } => hv_mc(dist, rounds, seed),
    }
}

fn hv_exact(dist: &DirectionDistribution) -> Result<PerAxis<f64>> {
    let idx = |t: Axis| t.index();
    Ok(match dist {
        DirectionDistribution::DiracPair(a, b) => PerAxis::from_fn(|t| hv_integrand(a, b, t)),
        // independent wings: E[(a·b) a_t b_t] = sum_k E[a_k a_t] E[b_k b_t]
        DirectionDistribution::Product(a, b) => {
            let (ma, mb) = (a.second_moment(), b.second_moment());
            PerAxis::from_fn(|t| -(0..3).map(|k| ma[k][idx(t)] * mb[k][idx(t)]).sum::<f64>())
        }
        // n_a = e_t: the integrand reduces to -(n_b · e_t)^2
        DirectionDistribution::BobOnly(b) | DirectionDistribution::Aligned(b) => {
            let m = b.second_moment();
            PerAxis::from_fn(|t| -m[idx(t)][idx(t)])
        }
        DirectionDistribution::Custom(_) => {
            return Err(QkdError::InvalidParams("custom distributions only support Monte Carlo".into()))
        }
    })
}

fn hv_mc(dist: &DirectionDistribution, rounds: u64, seed: u64) -> Result<CorrelationReport> {
    check_rounds(rounds)?;
    let parts = sharded(rounds, seed, |n, rng: &mut SimRng| {
        let mut acc = PerAxis::<MeanAccumulator>::default();
        let mut s = MeanAccumulator::default();
        for _ in 0..n {
            // one draw serves all three axes
            let (alice, b) = dist.sample_shared(rng);
            let mut total = 0.0;
            for t in Axis::ALL {
                let a = alice.unwrap_or_else(|| UnitVector3::axis(t));
                let v = hv_integrand(&a, &b, t);
                acc[t].push(v);
                total += v;
            }
            s.push(total.abs());
        }
        (acc, s)
    });
    let mut acc = PerAxis::<MeanAccumulator>::default();
    let mut s = MeanAccumulator::default();
    for (part, part_s) in parts {
        for t in Axis::ALL {
            acc[t].merge(&part[t]);
        }
        s.merge(&part_s);
    }
    let c = acc.map(|a| a.mean());
    Ok(CorrelationReport::estimated(c, acc.map(|a| a.standard_error()), s.standard_error()))
}

/// Operational intercept/resend on the singlet: Eve measures each wing
/// along its sampled direction and resends the eigenstate she found; Alice and
/// Bob then measure along a shared random axis.
pub fn hv_full_simulation(dist: &DirectionDistribution, rounds: u64, seed: u64) -> Result<CorrelationReport> {
    check_rounds(rounds)?;
    let psi = singlet();
    let bases = PerAxis::from_fn(make_basis);
    let parts = sharded(rounds, seed, |n, rng: &mut SimRng| {
        let mut acc = PerAxis::<MeanAccumulator>::default();
        for _ in 0..n {
            let t = Axis::ALL[rng.random_range(0..3)];
            let (n_a, n_b) = dist.sample(t, rng);
            let eve_b = spin_basis(&n_b);
            let (alice_state, bob_state) = if dist.intercepts_alice() {
                let eve_a = spin_basis(&n_a);
                let (i, rest) = measure_leading(&psi, &eve_a, rng)?;
                let j = born_sample(&rest, &eve_b, rng)?;
                (eve_a.vector(i).clone(), eve_b.vector(j).clone())
            } else {
                let (j, alice_rest) = measure_trailing(&psi, &eve_b, rng)?;
                (alice_rest, eve_b.vector(j).clone())
            };
            let a = born_sample(&alice_state, &bases[t], rng)?;
            let b = born_sample(&bob_state, &bases[t], rng)?;
            acc[t].push(outcome_sign(a) * outcome_sign(b));
        }
        Ok(acc)
    });
    Ok(CorrelationReport::from_axis_means(&merge_axes(parts)?))
}

fn check_rounds(rounds: u64) -> Result<()> {
    if rounds == 0 {
        return Err(QkdError::InvalidParams("rounds must be at least 1".into()));
    }
    Ok(())
}

/// Bob's wing after the collective attack, as a map on 2x2 operators:
/// populations flip with probability `1 - F`, coherences shrink by `F cos theta`.
fn collective_channel(
    params: &CollectiveParams,
    block: [[crate::quantum::C64; 2]; 2],
) -> [[crate::quantum::C64; 2]; 2] {
    let f = params.fidelity;
    let damp = f * params.cos_theta();
    [
        [block[0][0] * f + block[1][1] * (1.0 - f), block[0][1] * damp],
        [block[1][0] * damp, block[0][0] * (1.0 - f) + block[1][1] * f],
    ]
}

/// The singlet density operator after Bob's qubit passes through the attack.
pub fn collective_e91_state(d: f64) -> Result<Operator> {
    let params = CollectiveParams::from_disturbance(d)?;
    let rho = singlet().projector();
    let mut out = Operator::zeros(4);
    // index = 2 * alice + bob
    for a in 0..2 {
        for a2 in 0..2 {
            let block = std::array::from_fn(|b| std::array::from_fn(|b2| rho.get(2 * a + b, 2 * a2 + b2)));
            let mapped = collective_channel(&params, block);
            for b in 0..2 {
                for b2 in 0..2 {
                    out.set(2 * a + b, 2 * a2 + b2, mapped[b][b2]);
                }
            }
        }
    }
    out.ensure_density()?;
    Ok(out)
}

/// `c_t = tr[rho' E(e_t) ⊗ E(e_t)]` on the attacked singlet.
pub fn collective_e91_report(d: f64) -> Result<CorrelationReport> {
    let rho = collective_e91_state(d)?;
    let c = PerAxis::from_fn(|t| {
        let e = spin_observable(&UnitVector3::axis(t));
        (&rho * &e.kron(&e)).trace().re
    });
    Ok(CorrelationReport::exact(c))
}

pub fn collective_e91_s(d: f64) -> Result<f64> {
    Ok(collective_e91_report(d)?.s)
}

/// Singlet pairs whose Bob half goes through the probe interaction, measured
/// along a shared random axis.
pub fn collective_e91_mc(d: f64, rounds: u64, seed: u64) -> Result<CorrelationReport> {
    check_rounds(rounds)?;
    let iso = build_isometry(&CollectiveParams::from_disturbance(d)?);
    // alice ⊗ (bob ⊗ probe): apply the isometry to each of Alice's branches
    let psi = singlet();
    let mut amps = Vec::with_capacity(16);
    for a in 0..2 {
        let bob = StateVector::new(vec![psi.amp(2 * a), psi.amp(2 * a + 1)])?;
        amps.extend_from_slice(iso.apply(&bob)?.amps());
    }
    let joint = StateVector::new(amps)?;
    joint.ensure_normalized()?;
    let bases = PerAxis::from_fn(make_basis);
    let parts = sharded(rounds, seed, |n, rng: &mut SimRng| {
        let mut acc = PerAxis::<MeanAccumulator>::default();
        for _ in 0..n {
            let t = Axis::ALL[rng.random_range(0..3)];
            let (a, rest) = measure_leading(&joint, &bases[t], rng)?;
            let (b, _) = measure_leading(&rest, &bases[t], rng)?;
            acc[t].push(outcome_sign(a) * outcome_sign(b));
        }
        Ok(acc)
    });
    Ok(CorrelationReport::from_axis_means(&merge_axes(parts)?))
}
