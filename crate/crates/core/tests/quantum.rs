use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use proptest::prelude::*;
use sixstate_core::quantum::{
    born_probabilities, born_sample, c, cr, eve_projectors, make_basis, su2_rotation, trace_distance, Axis, Operator,
    StateVector, C64,
};
use sixstate_core::rng::stream_rng;
use sixstate_core::stats::binomial_sd;

fn det2(m: &Operator) -> C64 {
    m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)
}

proptest! {
    #[test]
    fn su2_is_special_unitary(a in -20.0..20.0f64, b in -20.0..20.0f64, g in -20.0..20.0f64) {
        let v = su2_rotation(a, b, g).unwrap();
        prop_assert!(v.is_unitary(1e-12));
        let d = det2(&v);
        prop_assert!((d - cr(1.0)).norm() < 1e-12);
        prop_assert!((v.determinant() - d).norm() < 1e-12);
    }

    #[test]
    fn eve_projectors_are_a_complete_pair(a in -20.0..20.0f64, b in -20.0..20.0f64) {
        let (p0, p1) = eve_projectors(a, b).unwrap();
        prop_assert!((&p0 * &p0).max_abs_diff(&p0) < 1e-12);
        prop_assert!(p0.is_projector(1e-12) && p1.is_projector(1e-12));
        prop_assert!((&p0 + &p1).max_abs_diff(&Operator::identity(2)) < 1e-12);
        prop_assert!((p0.trace() - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_bounded_symmetric_metric(
        x in prop::array::uniform4(-1.0..1.0f64),
        y in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let u = StateVector::new(vec![c(x[0], x[1]), c(x[2], x[3])]).unwrap();
        let v = StateVector::new(vec![c(y[0], y[1]), c(y[2], y[3])]).unwrap();
        prop_assume!(u.norm_sqr() > 1e-3 && v.norm_sqr() > 1e-3);
        let (rho, sigma) = (u.normalize().unwrap().projector(), v.normalize().unwrap().projector());
        let d = trace_distance(&rho, &sigma).unwrap();
        prop_assert!((d - trace_distance(&sigma, &rho).unwrap()).abs() < 1e-12);
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&d));
        // pure states: tr|rho - sigma| = 2 sqrt(1 - |<u|v>|^2)
        let overlap = u.normalize().unwrap().inner(&v.normalize().unwrap()).norm_sqr();
        prop_assert!((d - 2.0 * (1.0 - overlap).max(0.0).sqrt()).abs() < 1e-10);
    }
}

#[test]
fn bases_are_pairwise_unbiased() {
    for t in Axis::ALL {
        for u in Axis::ALL {
            if t == u {
                continue;
            }
            for i in 0..2 {
                for j in 0..2 {
                    let o = make_basis(t).vector(i).inner(make_basis(u).vector(j)).norm_sqr();
                    assert!((o - 0.5).abs() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn basis_vector_phases() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert_eq!(make_basis(Axis::X).vector(1).amps(), &[cr(h), cr(-h)]);
    assert_eq!(make_basis(Axis::Y).vector(0).amps(), &[cr(h), c(0.0, h)]);
    assert_eq!(make_basis(Axis::Y).vector(1).amps(), &[cr(h), c(0.0, -h)]);
}

#[test]
fn trace_distance_of_the_no_flip_probe_states() {
    // rho_00 = |A><A|, rho_11 = |C><C| with <A|C> = cos(theta)
    for theta in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2, 3.0 * PI / 4.0] {
        let a = StateVector::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let cv = StateVector::from_real(&[theta.cos(), theta.sin(), 0.0, 0.0]).unwrap();
        let d = trace_distance(&a.projector(), &cv.projector()).unwrap();
        assert!((d - 2.0 * theta.sin()).abs() < 1e-10, "theta={theta}");
    }
}

#[test]
fn trace_distance_examples() {
    let rho = Operator::diag(&[0.3, 0.7]);
    assert!(trace_distance(&rho, &rho).unwrap().abs() < 1e-15);
    let d = trace_distance(&Operator::diag(&[1.0, 0.0]), &Operator::diag(&[0.0, 1.0])).unwrap();
    assert!((d - 2.0).abs() < 1e-15);
    assert!(trace_distance(&Operator::identity(2), &Operator::identity(4)).is_err());
}

#[test]
fn born_frequencies_match_probabilities() {
    const N: u64 = 1_000_000;
    let mut stream = 0;
    for prep in Axis::ALL {
        for i in 0..2u8 {
            let state = make_basis(prep).vector(i).clone();
            for meas in Axis::ALL {
                let basis = make_basis(meas);
                let p0 = born_probabilities(&state, &basis).unwrap()[0];
                let mut rng = stream_rng(2024, stream);
                stream += 1;
                let zeros = (0..N).filter(|_| born_sample(&state, &basis, &mut rng).unwrap() == 0).count();
                let freq = zeros as f64 / N as f64;
                if p0.min(1.0 - p0).abs() < 1e-12 {
                    assert_eq!(freq, p0.round(), "{prep:?}{i} in {meas:?}");
                } else {
                    let sd = binomial_sd(p0, N);
                    assert!((freq - p0).abs() < 4.0 * sd, "{prep:?}{i} in {meas:?}: {freq} vs {p0}");
                }
            }
        }
    }
}
