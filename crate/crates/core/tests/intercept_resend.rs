use std::f64::consts::{FRAC_PI_2, TAU};

use proptest::prelude::*;
use rand::Rng;
use sixstate_core::intercept_resend::{
    bb84_breidbart_constants, breidbart_strategy, ir_analytic, ir_attack_channel, ir_from_projectors, ir_scan,
    p_optimal, p_pessimal, solve_symmetric, IrStrategy,
};
use sixstate_core::quantum::{born_sample, make_basis, Axis};
use sixstate_core::rng::stream_rng;
use sixstate_core::stats::Rate;

/// Bloch vector of Eve's outcome-0 state, from its amplitudes.
fn bloch(strategy: &IrStrategy) -> [f64; 3] {
    let basis = strategy.basis();
    let a = basis.vector(0).amps();
    let cross = a[0].conj() * a[1];
    [2.0 * cross.re, 2.0 * cross.im, a[0].norm_sqr() - a[1].norm_sqr()]
}

/// Eve guesses right with `(1 + n_t)/2`; no error with `(1 + n_t^2)/2`.
fn oracle(strategy: &IrStrategy, t: Axis) -> (f64, f64) {
    let n = bloch(strategy)[t.index()];
    ((1.0 + n) / 2.0, (1.0 + n * n) / 2.0)
}

proptest! {
    #[test]
    fn closed_form_matches_projector_sums(a in -10.0..10.0f64, b in -10.0..10.0f64) {
        let s = IrStrategy::new(a, b).unwrap();
        let (closed, sums) = (ir_analytic(&s), ir_from_projectors(&s));
        for t in Axis::ALL {
            prop_assert!((closed.p[t] - sums.p[t]).abs() < 1e-12);
            prop_assert!((closed.q[t] - sums.q[t]).abs() < 1e-12);
            let (p, q) = oracle(&s, t);
            prop_assert!((closed.p[t] - p).abs() < 1e-12);
            prop_assert!((closed.q[t] - q).abs() < 1e-12);
        }
    }

    #[test]
    fn no_error_probability_is_at_least_half(a in 0.0..TAU, b in 0.0..TAU) {
        let r = ir_analytic(&IrStrategy::new(a, b).unwrap());
        for t in Axis::ALL {
            prop_assert!(r.q[t] >= 0.5 - 1e-15 && r.q[t] <= 1.0 + 1e-15);
            if (r.q[t] - 1.0).abs() < 1e-9 {
                // Eve's basis is basis t up to labels
                prop_assert!((r.p[t] - 0.5).abs() > 0.5 - 1e-4);
            }
        }
    }

    // A quarter turn in alpha maps n = (n_x, n_y, n_z) to (-n_y, n_x, n_z).
    #[test]
    fn quarter_turn_swaps_x_and_y(a in 0.0..TAU, b in 0.0..TAU) {
        let r = ir_analytic(&IrStrategy::new(a, b).unwrap());
        let s = ir_analytic(&IrStrategy::new(a + FRAC_PI_2, b).unwrap());
        prop_assert!((s.q.x - r.q.y).abs() < 1e-12);
        prop_assert!((s.q.y - r.q.x).abs() < 1e-12);
        prop_assert!((s.q.z - r.q.z).abs() < 1e-12);
        prop_assert!((s.p.x - (1.0 - r.p.y)).abs() < 1e-12);
        prop_assert!((s.p.y - r.p.x).abs() < 1e-12);
        prop_assert!((s.p.z - r.p.z).abs() < 1e-12);
        let mean_q = |q: &sixstate_core::quantum::PerAxis<f64>| (q.x + q.y + q.z) / 3.0;
        prop_assert!((mean_q(&s.q) - mean_q(&r.q)).abs() < 1e-12);
    }
}

#[test]
fn no_error_is_certain_only_in_the_matching_basis() {
    let cases = [(0.0, 0.0, Axis::Z), (0.0, FRAC_PI_2, Axis::X), (FRAC_PI_2, FRAC_PI_2, Axis::Y)];
    for (a, b, t) in cases {
        let r = ir_analytic(&IrStrategy::new(a, b).unwrap());
        for u in Axis::ALL {
            if u == t {
                assert!((r.q[u] - 1.0).abs() < 1e-15);
            } else {
                assert!((r.q[u] - 0.5).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn symmetric_roots_reproduce_their_values() {
    let roots = solve_symmetric();
    assert_eq!(roots.len(), 4);
    for root in &roots {
        let r = ir_analytic(&IrStrategy::new(root.alpha, root.beta).unwrap());
        for t in Axis::ALL {
            assert!((r.p[t] - root.p_common).abs() < 1e-10);
            assert!((r.q[t] - root.q_common).abs() < 1e-10);
        }
        assert!((root.q_common - 2.0 / 3.0).abs() < 1e-12);
        let target = if root.optimal { p_optimal() } else { p_pessimal() };
        assert!((root.p_common - target).abs() < 1e-12);
    }
    assert_eq!(roots.iter().filter(|r| r.optimal).count(), 2);
}

#[test]
fn grid_scan_finds_four_symmetric_clusters() {
    let scan = ir_scan(361, 361).unwrap();
    let clusters = scan.clusters();
    assert_eq!(clusters.len(), 4);
    assert!(scan.max_min_p() <= p_optimal() + scan.tolerance);
    for root in solve_symmetric() {
        let near = clusters.iter().any(|c| {
            let da = (c.alpha - root.alpha).rem_euclid(TAU);
            let db = (c.beta - root.beta).rem_euclid(TAU);
            da.min(TAU - da) < 0.1 && db.min(TAU - db) < 0.1
        });
        assert!(near, "no cluster near ({}, {})", root.alpha, root.beta);
    }
}

#[test]
fn breidbart_values_exceed_the_six_state_optimum() {
    let (p, q) = bb84_breidbart_constants();
    assert_eq!(p, (2.0 + 2f64.sqrt()) / 4.0);
    assert_eq!(q, 0.75);
    let r = ir_analytic(&breidbart_strategy());
    assert!((r.p.z - p).abs() < 1e-15 && (r.p.x - p).abs() < 1e-15);
    assert!((r.q.z - q).abs() < 1e-15 && (r.q.x - q).abs() < 1e-15);
    assert!(p > p_optimal() && q > 2.0 / 3.0);
}

#[test]
fn simulated_rates_match_closed_form_on_grid_points() {
    const ROUNDS: u64 = 100_000;
    let mut pick = stream_rng(77, u64::MAX);
    for point in 0..20u64 {
        let (i, j) = (pick.random_range(0..100), pick.random_range(0..100));
        let s = IrStrategy::new(TAU * i as f64 / 100.0, TAU * j as f64 / 100.0).unwrap();
        let r = ir_analytic(&s);
        for t in Axis::ALL {
            let basis = make_basis(t);
            let mut rng = stream_rng(point, t.index() as u64);
            let (mut eve, mut agree) = (0, 0);
            for _ in 0..ROUNDS {
                let bit = rng.random_range(0..2u8);
                let (resent, guess) = ir_attack_channel(basis.vector(bit), &s, &mut rng).unwrap();
                eve += u64::from(guess == bit);
                agree += u64::from(born_sample(&resent, &basis, &mut rng).unwrap() == bit);
            }
            let (pe, qa) = (Rate::new(eve, ROUNDS), Rate::new(agree, ROUNDS));
            assert!(pe.sigmas_from(r.p[t]) < 5.0, "P_{t:?} at ({i},{j}): {} vs {}", pe.value, r.p[t]);
            assert!(qa.sigmas_from(r.q[t]) < 5.0, "Q_{t:?} at ({i},{j}): {} vs {}", qa.value, r.q[t]);
        }
    }
}
