mod common;

use common::*;
use qthermo::channels::{ohmic_rate, ChannelModel};
use qthermo::numerics::rk4_fixed;
use qthermo::BlochState;

const TOL: f64 = 1e-8;

fn st(x: f64, y: f64, z: f64) -> BlochState {
    BlochState::new(x, y, z).unwrap()
}

fn initial_states() -> Vec<BlochState> {
    vec![st(0.3, -0.4, 0.5), st(1.0, 0.0, 0.0), st(0.0, 0.6, -0.8), st(0.1, 0.1, 0.1)]
}

#[test]
fn bitflip_closed_form_matches_lindblad() {
    // under-, critically and over-damped
    for &(gamma, omega0) in &[(0.3, 1.0), (2.0, 1.0), (5.0, 1.0)] {
        let m = ChannelModel::BitflipDissipative { gamma, omega0 };
        let gen = |_t: f64| (h_of_field_z(-omega0), vec![scaled(&sx(), gamma.sqrt())]);
        for r0 in initial_states() {
            for &t in &[0.2, 1.0, 3.0] {
                let want = lindblad_rk4(gen, r0.vector(), t, 20_000);
                let got = m.evolve(&r0, t).unwrap();
                assert!(max_diff(want, &got) < TOL, "γ={gamma} t={t}: {want:?} vs {:?}", got.vector());
            }
        }
    }
}

#[test]
fn spont_emission_closed_form_matches_lindblad() {
    for &omega0 in &[1.0, 0.4] {
        let m = ChannelModel::SpontaneousEmission { gamma: 0.7, omega0 };
        let gen = |_t: f64| (h_of_field_z(omega0), vec![scaled(&to_up(), 0.7f64.sqrt())]);
        for r0 in initial_states() {
            for &t in &[0.5, 2.0, 6.0] {
                let want = lindblad_rk4(gen, r0.vector(), t, 20_000);
                assert!(max_diff(want, &m.evolve(&r0, t).unwrap()) < TOL);
            }
        }
    }
}

#[test]
fn driven_dephasing_closed_form_matches_lindblad() {
    let (gamma, omega0, omega) = (0.25, 1.3, 0.9);
    let m = ChannelModel::PdTimeDependent { gamma, omega0, omega };
    let gen = |t: f64| {
        let hz = -0.5 * omega0 * (1.0 - (omega * t).cos());
        (h_of_field_z(hz), vec![scaled(&sz(), gamma.sqrt())])
    };
    for r0 in initial_states() {
        for &t in &[0.7, 3.0, 8.0] {
            let want = lindblad_rk4(gen, r0.vector(), t, 20_000);
            assert!(max_diff(want, &m.evolve(&r0, t).unwrap()) < TOL);
        }
    }
}

#[test]
fn gad_master_integration_matches_lindblad() {
    let (gamma0, temperature, omega0) = (1.0, 10.0, 1.0);
    let m = ChannelModel::GadMaster { gamma0, temperature, omega0 };
    let n = 1.0 / (omega0 / temperature).exp_m1();
    let gen = |_t: f64| {
        (
            h_of_field_z(-0.5 * omega0),
            vec![scaled(&to_down(), (gamma0 * (n + 1.0)).sqrt()), scaled(&to_up(), (gamma0 * n).sqrt())],
        )
    };
    let times = [0.0, 0.05, 0.2, 0.6];
    for r0 in initial_states() {
        let traj = m.trajectory(&r0, &times).unwrap();
        for (i, &t) in times.iter().enumerate().skip(1) {
            let want = lindblad_rk4(gen, r0.vector(), t, 40_000);
            assert!(max_diff(want, &traj.states[i]) < TOL, "t={t}");
        }
    }
}

#[test]
fn amplitude_damping_populations_match_lindblad() {
    let gamma = 0.8;
    let m = ChannelModel::AmplitudeDamping { gamma, omega0: 1.0 };
    let gen = |_t: f64| (h_of_field_z(0.0), vec![scaled(&to_up(), gamma.sqrt())]);
    for r0 in initial_states() {
        for &t in &[0.3, 1.5, 4.0] {
            let want = lindblad_rk4(gen, r0.vector(), t, 20_000);
            assert!(max_diff(want, &m.evolve(&r0, t).unwrap()) < TOL);
        }
    }
}

#[test]
fn ohmic_coherence_matches_rate_equation() {
    // ẋ = −2γ(t)x integrated directly from the rate
    for &s in &[1.0, 2.5, 3.2, 5.0] {
        let m = ChannelModel::OhmicDephasing { s, omega_c: 1.0, omega0: 1.0 };
        for &t in &[0.5, 2.0, 7.0] {
            let [x] = rk4_fixed(|u, y: &[f64; 1]| [-2.0 * ohmic_rate(u, s, 1.0) * y[0]], [1.0], 0.0, t, 40_000);
            let got = m.evolve(&st(1.0, 0.0, 0.0), t).unwrap();
            assert!((got.x() - x).abs() < TOL, "s={s} t={t}: {} vs {x}", got.x());
        }
    }
}

#[test]
fn nm_dephasing_matches_rate_equation() {
    let (gamma, width) = (1.0, 0.05);
    let m = ChannelModel::NmPhaseDamping { gamma, width, omega0: 1.0 };
    for &t in &[0.1, 5.0, 40.0] {
        let rate = |u: f64, y: &[f64; 1]| [-0.5 * gamma * (1.0 - (-width * u).exp()) * y[0]];
        let [x] = rk4_fixed(rate, [0.9], 0.0, t, 20_000);
        let got = m.evolve(&st(0.9, 0.0, 0.2), t).unwrap();
        assert!((got.x() - x).abs() < TOL);
        assert!((got.z() - 0.2).abs() < 1e-15);
    }
}

#[test]
fn nm_amplitude_damping_matches_pseudomode_equations() {
    // excited amplitude c(t) with memory kernel (γΓ/2) e^{−Γ|t−s|}:
    // ċ = −φ, φ̇ = −Γφ + (γΓ/2)c
    for &(gamma, width) in &[(1.0, 0.01), (1.0, 3.0), (1.0, 2.0)] {
        let m = ChannelModel::NmAmplitudeDamping { gamma, width, omega0: 1.0 };
        for &t in &[0.5, 10.0, 60.0] {
            let rhs = |_u: f64, y: &[f64; 2]| [-y[1], -width * y[1] + 0.5 * gamma * width * y[0]];
            let [c, _] = rk4_fixed(rhs, [1.0, 0.0], 0.0, t, 60_000);
            // excited population ends at (1 − z)/2
            let got = m.evolve(&st(0.0, 0.0, -1.0), t).unwrap();
            assert!(((1.0 - got.z()) / 2.0 - c * c).abs() < TOL, "Γ={width} t={t}");
        }
    }
}
