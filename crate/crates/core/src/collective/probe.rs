use serde::Serialize;

use super::CollectiveParams;
use crate::error::{QkdError, Result};
use crate::quantum::{c, cr, make_basis, Axis, Operator, PerAxis, StateVector, C64};

pub const PROBE_DIM: usize = 4;

/// Eve's probe states `|A>, |B>, |C>, |D>` in a fixed orthonormal frame
/// `f_0..f_3`: `A = f_0`, `B = f_2`, `C = cos(theta) f_0 + sin(theta) f_1`,
/// `D = f_3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeVectors {
    pub a: StateVector,
    pub b: StateVector,
    pub c: StateVector,
    pub d: StateVector,
}

pub fn build_probe_vectors(params: &CollectiveParams) -> ProbeVectors {
    let f = |k| StateVector::basis_state(PROBE_DIM, k);
    let c_vec = &f(0).scaled(cr(params.cos_theta())) + &f(1).scaled(cr(params.sin_theta()));
    ProbeVectors { a: f(0), b: f(2), c: c_vec, d: f(3) }
}

/// Eve's interaction restricted to inputs `|i>|X>`: an isometry from the qubit
/// into `qubit ⊗ probe` (index `q * 4 + p`).
#[derive(Debug, Clone, PartialEq)]
pub struct EveIsometry {
    columns: [StateVector; 2],
    params: CollectiveParams,
}

/// `V|0> = sqrt(F)|0>|A> + sqrt(1-F)|1>|B>`,
/// `V|1> = sqrt(F)|1>|C> + sqrt(1-F)|0>|D>`.
pub fn build_isometry(params: &CollectiveParams) -> EveIsometry {
    let probe = build_probe_vectors(params);
    let sf = cr(params.fidelity.sqrt());
    let sd = cr(params.disturbance.sqrt());
    let q0 = StateVector::basis_state(2, 0);
    let q1 = StateVector::basis_state(2, 1);
    let col0 = &q0.kron(&probe.a).scaled(sf) + &q1.kron(&probe.b).scaled(sd);
    let col1 = &q1.kron(&probe.c).scaled(sf) + &q0.kron(&probe.d).scaled(sd);
    EveIsometry { columns: [col0, col1], params: *params }
}

impl EveIsometry {
    pub fn params(&self) -> &CollectiveParams {
        &self.params
    }

    pub fn column(&self, i: usize) -> &StateVector {
        &self.columns[i]
    }

    pub fn apply(&self, qubit: &StateVector) -> Result<StateVector> {
        if qubit.dim() != 2 {
            return Err(QkdError::DimensionMismatch { expected: 2, actual: qubit.dim() });
        }
        Ok(&self.columns[0].scaled(qubit.amp(0)) + &self.columns[1].scaled(qubit.amp(1)))
    }

    /// `V^dagger V`, which must be the 2x2 identity.
    pub fn gram(&self) -> Operator {
        let mut g = Operator::zeros(2);
        for r in 0..2 {
            for col in 0..2 {
                g.set(r, col, self.columns[r].inner(&self.columns[col]));
            }
        }
        g
    }

    /// A full 8x8 unitary `U` with `U|i>|f_0> = V|i>`, completed by
    /// Gram-Schmidt over the computational basis.
    pub fn unitary_completion(&self) -> Operator {
        let n = 2 * PROBE_DIM;
        let mut cols: Vec<StateVector> = self.columns.to_vec();
        for k in 0..n {
            if cols.len() == n {
                break;
            }
            let mut v = StateVector::basis_state(n, k);
            for u in &cols {
                let overlap = u.inner(&v);
                v = &v - &u.scaled(overlap);
            }
            if let Some(unit) = v.normalize().filter(|_| v.norm_sqr() > 1e-12) {
                cols.push(unit);
            }
        }
        // inputs |0>|f_0> and |1>|f_0> sit at indices 0 and 4
        let mut order = vec![None; n];
        order[0] = Some(0);
        order[PROBE_DIM] = Some(1);
        let mut rest = 2..n;
        for slot in order.iter_mut().filter(|s| s.is_none()) {
            *slot = rest.next();
        }
        let mut u = Operator::zeros(n);
        for (col, src) in order.iter().enumerate() {
            let v = &cols[src.expect("every slot filled")];
            for r in 0..n {
                u.set(r, col, v.amp(r));
            }
        }
        u
    }
}

/// The unnormalized probe states `|E^t_ij>` defined by
/// `U|i_t>|X> = sum_j |j_t>|E^t_ij>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConditionals {
    pub axis: Axis,
    e: [[StateVector; 2]; 2],
}

impl ProbeConditionals {
    pub fn get(&self, i: usize, j: usize) -> &StateVector {
        &self.e[i][j]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.e[i][j].weight()
    }

    /// Gram matrix over the ordering `00, 01, 10, 11`.
    pub fn gram(&self) -> [[C64; 4]; 4] {
        let flat = [&self.e[0][0], &self.e[0][1], &self.e[1][0], &self.e[1][1]];
        let mut g = [[C64::new(0.0, 0.0); 4]; 4];
        for (r, u) in flat.iter().enumerate() {
            for (col, v) in flat.iter().enumerate() {
                g[r][col] = u.inner(v);
            }
        }
        g
    }

    /// Reference Gram matrix: weights `F`, `1-F` on the diagonal and
    /// `<E_00|E_11> = F cos(theta)`, everything else zero.
    pub fn target_gram(params: &CollectiveParams) -> [[C64; 4]; 4] {
        let f = params.fidelity;
        let mut g = [[C64::new(0.0, 0.0); 4]; 4];
        g[0][0] = cr(f);
        g[3][3] = cr(f);
        g[1][1] = cr(1.0 - f);
        g[2][2] = cr(1.0 - f);
        g[0][3] = cr(f * params.cos_theta());
        g[3][0] = g[0][3];
        g
    }
}

/// `|E^t_ij>` expanded in terms of `A, B, C, D` for each basis.
pub fn probe_conditionals(params: &CollectiveParams, axis: Axis) -> ProbeConditionals {
    let ProbeVectors { a, b, c: cv, d } = build_probe_vectors(params);
    let sf = params.fidelity.sqrt();
    let sd = params.disturbance.sqrt();
    let half = |v: StateVector| v.scaled(cr(0.5));
    let i = c(0.0, 1.0);
    let a_plus_c = &a + &cv;
    let a_minus_c = &a - &cv;
    let b_plus_d = &b + &d;
    let d_minus_b = &d - &b;
    let e = match axis {
        Axis::Z => [[a.scaled(cr(sf)), b.scaled(cr(sd))], [d.scaled(cr(sd)), cv.scaled(cr(sf))]],
        Axis::X => [
            [
                half(&a_plus_c.scaled(cr(sf)) + &b_plus_d.scaled(cr(sd))),
                half(&a_minus_c.scaled(cr(sf)) + &d_minus_b.scaled(cr(sd))),
            ],
            [
                half(&a_minus_c.scaled(cr(sf)) - &d_minus_b.scaled(cr(sd))),
                half(&a_plus_c.scaled(cr(sf)) - &b_plus_d.scaled(cr(sd))),
            ],
        ],
        Axis::Y => [
            [
                half(&a_plus_c.scaled(cr(sf)) + &d_minus_b.scaled(i * sd)),
                half(&a_minus_c.scaled(cr(sf)) + &b_plus_d.scaled(i * sd)),
            ],
            [
                half(&a_minus_c.scaled(cr(sf)) - &b_plus_d.scaled(i * sd)),
                half(&a_plus_c.scaled(cr(sf)) - &d_minus_b.scaled(i * sd)),
            ],
        ],
    };
    ProbeConditionals { axis, e }
}

/// `(<j_t| ⊗ I) V |i_t>`, computed from the isometry directly.
pub(crate) fn conditionals_from_isometry(iso: &EveIsometry, axis: Axis) -> [[StateVector; 2]; 2] {
    let basis = make_basis(axis);
    let out = |i: u8, j: u8| {
        let joint = iso.apply(basis.vector(i)).expect("qubit input");
        crate::quantum::measure::project_leading(basis.vector(j), &joint)
    };
    [[out(0, 0), out(0, 1)], [out(1, 0), out(1, 1)]]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualFamily {
    pub name: &'static str,
    pub checks: usize,
    pub max_residual: f64,
}

/// Residuals of every probe constraint for one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrussReport {
    pub params: CollectiveParams,
    pub families: Vec<ResidualFamily>,
}

impl BrussReport {
    pub fn max_residual(&self) -> f64 {
        self.families.iter().map(|f| f.max_residual).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

struct FamilyBuilder {
    name: &'static str,
    checks: usize,
    max: f64,
}

impl FamilyBuilder {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, max: 0.0 }
    }

    fn check(&mut self, residual: f64) -> &mut Self {
        self.checks += 1;
        // NaN must never look like a pass
        self.max = if residual.is_nan() { f64::INFINITY } else { self.max.max(residual) };
        self
    }

    fn finish(&self) -> ResidualFamily {
        ResidualFamily { name: self.name, checks: self.checks, max_residual: self.max }
    }
}

/// Evaluates the constraint set on the constructed probe: the unitarity and
/// equal-fidelity relations, the derived vanishing inner products, and the
/// basis-independence of the `<E^t_ij|E^t_kl>` table.
pub fn verify_bruss(params: &CollectiveParams) -> BrussReport {
    let ProbeVectors { a, b, c: cv, d } = build_probe_vectors(params);
    let f = params.fidelity;
    let ip = |u: &StateVector, v: &StateVector| u.inner(v);
    let mut families = Vec::new();

    let mut fam = FamilyBuilder::new("probe states normalized");
    for v in [&a, &b, &cv, &d] {
        fam.check((v.norm_sqr() - 1.0).abs());
    }
    families.push(fam.finish());

    families.push(FamilyBuilder::new("<A|D> + <B|C> = 0").check((ip(&a, &d) + ip(&b, &cv)).norm()).finish());
    families.push(FamilyBuilder::new("<A|B> + <D|C> = 0").check((ip(&a, &b) + ip(&d, &cv)).norm()).finish());
    families.push(FamilyBuilder::new("Re<B|D> = 0").check(ip(&b, &d).re.abs()).finish());
    families.push(FamilyBuilder::new("Re<A|C> = 2 - 1/F").check((ip(&a, &cv).re - (2.0 - 1.0 / f)).abs()).finish());
    families.push(FamilyBuilder::new("F = 1/(2 - Re<A|C>)").check((f - 1.0 / (2.0 - ip(&a, &cv).re)).abs()).finish());

    // Fidelity-F conditions in the x and y bases, as sums of inner products.
    let x_sum =
        ip(&a, &b) + ip(&a, &d) + ip(&b, &a) + ip(&b, &cv) + ip(&cv, &b) + ip(&cv, &d) + ip(&d, &a) + ip(&d, &cv);
    let y_sum =
        -ip(&a, &d) + ip(&a, &b) + ip(&d, &a) + ip(&d, &cv) - ip(&b, &a) - ip(&b, &cv) - ip(&cv, &d) + ip(&cv, &b);
    families
        .push(FamilyBuilder::new("x/y fidelity inner-product sums").check(x_sum.norm()).check(y_sum.norm()).finish());

    // F = (1 + F Re<A|C> ± (1 - F) Re<B|D>)/2 for the x and y bases
    let (re_ac, re_bd) = (ip(&a, &cv).re, ip(&b, &d).re);
    families.push(
        FamilyBuilder::new("x/y fidelity equations")
            .check((f - 0.5 * (1.0 + f * re_ac + (1.0 - f) * re_bd)).abs())
            .check((f - 0.5 * (1.0 + f * re_ac - (1.0 - f) * re_bd)).abs())
            .finish(),
    );

    let mut fam = FamilyBuilder::new("<A|B> = <D|C> = <A|D> = <B|C> = 0");
    for z in [ip(&a, &b), ip(&d, &cv), ip(&a, &d), ip(&b, &cv)] {
        fam.check(z.norm());
    }
    families.push(fam.finish());

    // a, b, alpha, beta: real and imaginary parts of <A|B>, <A|D>
    let mut fam = FamilyBuilder::new("a = b = alpha = beta = 0, <B|D> = 0, Im<A|C> = 0");
    fam.check(ip(&a, &b).re.abs())
        .check(ip(&a, &d).re.abs())
        .check(ip(&a, &b).im.abs())
        .check(ip(&a, &d).im.abs())
        .check(ip(&b, &d).norm())
        .check(ip(&a, &cv).im.abs());
    families.push(fam.finish());

    let iso = build_isometry(params);
    let gram = iso.gram();
    families.push(
        FamilyBuilder::new("isometry columns orthonormal").check(gram.max_abs_diff(&Operator::identity(2))).finish(),
    );

    let tables = PerAxis::from_fn(|t| probe_conditionals(params, t).gram());
    let mut fam = FamilyBuilder::new("<E^t_ij|E^t_kl> identical for t = x, y, z");
    for r in 0..4 {
        for col in 0..4 {
            fam.check((tables.z[r][col] - tables.x[r][col]).norm())
                .check((tables.z[r][col] - tables.y[r][col]).norm())
                .check((tables.x[r][col] - tables.y[r][col]).norm());
        }
    }
    families.push(fam.finish());

    let target = ProbeConditionals::target_gram(params);
    let mut weights = FamilyBuilder::new("<E^t_ii|E^t_ii> = F, <E^t_ij|E^t_ij> = 1 - F");
    let mut overlap = FamilyBuilder::new("<E^t_00|E^t_11> = F cos(theta)");
    let mut cross = FamilyBuilder::new("other <E^t_ij|E^t_kl> = 0");
    for (_, g) in tables.iter() {
        for r in 0..4 {
            for col in 0..4 {
                let residual = (g[r][col] - target[r][col]).norm();
                match (r, col) {
                    (r, col) if r == col => weights.check(residual),
                    (0, 3) | (3, 0) => overlap.check(residual),
                    _ => cross.check(residual),
                };
            }
        }
    }
    families.extend([weights.finish(), overlap.finish(), cross.finish()]);

    let mut fam = FamilyBuilder::new("displayed E^t_ij match the isometry");
    for t in Axis::ALL {
        let shown = probe_conditionals(params, t);
        let direct = conditionals_from_isometry(&iso, t);
        for i in 0..2 {
            for j in 0..2 {
                let diff = shown.get(i, j) - &direct[i][j];
                fam.check(diff.norm_sqr().sqrt());
            }
        }
    }
    families.push(fam.finish());

    BrussReport { params: *params, families }
}
