use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use proptest::prelude::*;

use sonon::bell::{chsh, quantum_correlation, simulate_local_model, LocalModelSpec, Settings};
use sonon::field::{kg_dispersion_residual, kg_frequency, ring_integral, SononMode};
use sonon::sync::{order_parameter, safe_step, simulate, Kernel, OscillatorNetwork};

fn rotate_z(p: [f64; 3], a: f64) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

fn network(positions: Vec<[f64; 3]>, freqs: Vec<f64>, phases: Vec<f64>, coupling: f64, kernel: Kernel) -> OscillatorNetwork {
    OscillatorNetwork::new(positions, freqs, phases, coupling, kernel).unwrap()
}

fn run(mut net: OscillatorNetwork, dt: f64, t: f64) -> Vec<f64> {
    simulate(&mut net, dt, t, 15).unwrap();
    net.phases().to_vec()
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_parameter_is_bounded(phases in prop::collection::vec(-20.0f64..20.0, 1..12)) {
        let (r, psi) = order_parameter(&phases);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&r));
        prop_assert!(psi.is_finite());
    }

    #[test]
    fn mass_shell_has_no_dispersion_residual(k in -50.0f64..50.0, c in 0.1f64..10.0, omega0 in 0.0f64..50.0) {
        let omega = kg_frequency(k, c, omega0);
        prop_assert!(kg_dispersion_residual(omega, k, c, omega0).abs() <= 8.0 * f64::EPSILON * omega * omega);
    }

    #[test]
    fn field_magnitude_is_symmetric_about_the_ring_axis(
        rho in 1.4f64..15.0,
        phi in 0.0f64..TAU,
        z in -10.0f64..10.0,
        alpha in 0.0f64..TAU,
        m in 0u32..=3,
        n in 1u32..=3,
    ) {
        let mode = SononMode { m, n, ..SononMode::r10() };
        let p = [rho * phi.cos(), rho * phi.sin(), z];
        let a = ring_integral(&mode, p, 512).unwrap().norm();
        let b = ring_integral(&mode, rotate_z(p, alpha), 512).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-12), "{a} vs {b}");
    }

    #[test]
    fn network_dynamics_ignore_rigid_motion(
        coords in prop::collection::vec(-2.0f64..2.0, 9),
        phases in prop::collection::vec(0.0f64..TAU, 3),
        shift in prop::array::uniform3(-100.0f64..100.0),
        alpha in 0.0f64..TAU,
    ) {
        let positions: Vec<[f64; 3]> = coords.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        for i in 0..3 {
            for j in 0..i {
                let d: f64 = (0..3).map(|k| (positions[i][k] - positions[j][k]).powi(2)).sum::<f64>().sqrt();
                prop_assume!(d > 0.3);
            }
        }
        let moved: Vec<[f64; 3]> =
            positions.iter().map(|&p| { let q = rotate_z(p, alpha); [q[0] + shift[0], q[1] + shift[1], q[2] + shift[2]] }).collect();
        let freqs = vec![1.0, 1.05, 0.97];
        let base = network(positions, freqs.clone(), phases.clone(), 0.8, Kernel::InverseR);
        let dt = safe_step(&base, 0.5);
        let a = run(base, dt, 20.0);
        let b = run(network(moved, freqs, phases, 0.8, Kernel::InverseR), dt, 20.0);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(phase_gap(*x, *y) < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn potential_never_increases_for_identical_frequencies(
        phases in prop::collection::vec(0.0f64..TAU, 4),
        coupling in 0.1f64..3.0,
    ) {
        let positions = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 1.2, 0.0], [0.5, 0.4, 0.9]];
        let mut net = network(positions, vec![1.0; 4], phases, coupling, Kernel::InverseR);
        let dt = safe_step(&net, 0.5);
        let mut last = net.potential();
        for _ in 0..400 {
            net.step(dt).unwrap();
            let v = net.potential();
            prop_assert!(v <= last + 1e-12 * last.abs().max(1.0), "{v} > {last}");
            last = v;
        }
    }

    #[test]
    fn uniform_kernel_locks_identical_oscillators(
        phases in prop::collection::vec(0.0f64..TAU, 2..7),
        coupling in 0.5f64..2.0,
    ) {
        let n = phases.len();
        let positions: Vec<[f64; 3]> = (0..n).map(|i| [i as f64 * 3.7, (i * i) as f64, 0.0]).collect();
        let net = network(positions, vec![0.4; n], phases, coupling, Kernel::Uniform);
        let dt = safe_step(&net, 0.5);
        let end = run(net, dt, 60.0 / coupling);
        prop_assert!(order_parameter(&end).0 > 1.0 - 1e-6);
    }
}

#[test]
fn shared_phase_depends_only_on_setting_differences() {
    let base = Settings::from_degrees(0.0, 45.0, 22.5, 67.5);
    let trials = 20_000;
    let reference = chsh(&simulate_local_model(&LocalModelSpec::shared_phase(), &base, trials, 1).unwrap(), &base).unwrap();
    for (i, delta) in [0.3, 1.1, 2.5].into_iter().enumerate() {
        let s = Settings { a: base.a + delta, a_prime: base.a_prime + delta, b: base.b + delta, b_prime: base.b_prime + delta };
        let r = chsh(&simulate_local_model(&LocalModelSpec::shared_phase(), &s, trials, 10 + i as u64).unwrap(), &s).unwrap();
        for (x, y) in reference.correlations.iter().zip(&r.correlations) {
            let se = x.std_error.hypot(y.std_error);
            assert!((x.e - y.e).abs() < 5.0 * se, "delta {delta}: {} vs {}", x.e, y.e);
        }
        assert!(r.s.abs() <= 2.0 + 5.0 * r.s_err);
    }
}

#[test]
fn oracle_correlations_track_cos_2_delta() {
    // Fixed seeds: each of the 20 pairs must land within 3σ.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let (a, b) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let s = Settings { a, a_prime: a + 0.4, b, b_prime: b + 0.9 };
        let r = chsh(&simulate_local_model(&LocalModelSpec::quantum_oracle(), &s, 20_000, 500 + i).unwrap(), &s).unwrap();
        let c = r.correlations[0];
        let expected = quantum_correlation(a, b);
        assert!((c.e - expected).abs() <= 3.0 * c.std_error, "pair {i}: {} vs {expected}", c.e);
        assert_relative_eq!(c.std_error, ((1.0 - c.e * c.e) / 20_000.0).sqrt(), max_relative = 1e-12);
    }
}
