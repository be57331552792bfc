use std::f64::consts::PI;

use proptest::prelude::*;

use dipoledyn::coupling::{coupling_c, decay_rates};
use dipoledyn::dynamics::{evolve, rabi_analytic_ps, IntegratorOptions};
use dipoledyn::feasibility::{separation, trap_frequency};
use dipoledyn::gates::{prep_fidelity_max, run_schedule, schedule_prepare_s};
use dipoledyn::hamiltonians::{drive_hamiltonian, h_cnot, h_cnot_ideal, Decay, Units};
use dipoledyn::statespace::{populations, to_collective, to_product};
use dipoledyn::{
    Basis, CouplingConstant, LaserDrive, Level, PairedDrive, StateVector, TransitionPair, C64,
};

fn normalized(raw: [(f64, f64); 4], basis: Basis) -> Option<StateVector> {
    let amps: Vec<C64> = raw.iter().map(|&(re, im)| C64::new(re, im)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-3 {
        return None;
    }
    let amps = [
        amps[0] / norm,
        amps[1] / norm,
        amps[2] / norm,
        amps[3] / norm,
    ];
    StateVector::from_array(amps, basis).ok()
}

fn amplitude() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64)
}

fn drive() -> impl Strategy<Value = LaserDrive> {
    prop_oneof![
        (-0.5..0.5f64, -1.5..1.5f64).prop_map(|(w, d)| LaserDrive::running(w, d)),
        (-0.5..0.5f64, -1.5..1.5f64).prop_map(|(w, d)| LaserDrive::standing_with_rabi(w, d)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn basis_round_trip(raw in [amplitude(), amplitude(), amplitude(), amplitude()]) {
        if let Some(x) = normalized(raw, Basis::Product) {
            let back = to_product(&to_collective(&x).unwrap()).unwrap();
            prop_assert!(back.max_distance(&x).unwrap() <= 1e-12);
            let p: f64 = populations(&to_collective(&x).unwrap()).iter().sum();
            prop_assert!((p - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn drive_hamiltonians_are_hermitian(
        drives in prop::collection::vec(drive(), 0..=2),
        omega in 0.01..0.5f64,
        t in 0.0..20.0f64,
    ) {
        prop_assert!(drive_hamiltonian(&drives, t).hermiticity_defect() <= 1e-12);
        prop_assert!(h_cnot(omega, t).hermiticity_defect() <= 1e-12);
        for pair in [TransitionPair::Lower, TransitionPair::Upper] {
            let p = PairedDrive { pair, omega_r: omega, omega_s: -0.7 * omega };
            prop_assert!(p.at(t).hermiticity_defect() <= 1e-12);
        }
    }

    #[test]
    fn real_part_of_coupling_at_most_one(x in 0.05..20.0f64, theta in 0.0..PI) {
        let c = coupling_c(x, theta).unwrap();
        prop_assert!(c.re() <= 1.0 + 1e-9);
        let rates = decay_rates(&c);
        prop_assert!((rates.gamma_s + rates.gamma_a - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn trap_frequency_scaling(mass in 1.0..300.0f64, r in 1e-7..1e-5f64) {
        let f = trap_frequency(mass, r).unwrap();
        prop_assert!((f / trap_frequency(mass, 4.0 * r).unwrap() - 8.0).abs() <= 1e-9);
        prop_assert!((f / trap_frequency(4.0 * mass, r).unwrap() - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn separation_is_bilinear(x in 0.01..1.0f64, lambda in 1e-7..1e-4f64, k in 0.1..3.0f64) {
        let r = separation(x, lambda).unwrap();
        let scale = |a: f64, b: f64| ((a - b) / b).abs();
        prop_assert!(scale(separation(k * x, lambda).unwrap(), k * r) <= 1e-12 || k * x > 1.0);
        prop_assert!(scale(separation(x, k * lambda).unwrap(), k * r) <= 1e-12);
    }

    #[test]
    fn norm_decays_monotonically(a in 1e-4..0.05f64, k0r in 0.1..0.5f64) {
        let c: CouplingConstant = coupling_c(k0r, PI / 2.0).unwrap();
        let decay = Decay::new(a, &c);
        let schedule = schedule_prepare_s(0.25).unwrap();
        let traj = run_schedule(&schedule, &StateVector::level(Level::E), &decay, &IntegratorOptions::default()).unwrap();
        prop_assert!(traj.norms.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        prop_assert!(*traj.norms.last().unwrap() < 1.0);
    }
}

#[test]
fn ground_state_is_protected_under_ideal_cnot() {
    let h = h_cnot_ideal(0.5);
    let hf = |_t: f64| h.clone();
    let traj = evolve(
        &hf,
        &StateVector::level(Level::G),
        8.0 * PI,
        &IntegratorOptions::default(),
    )
    .unwrap();
    for psi in &traj.states {
        assert!((psi.amplitudes()[0] - C64::new(1.0, 0.0)).norm() <= 1e-12);
    }
}

#[test]
fn preparation_fidelity_does_not_grow_with_rabi_frequency() {
    let target = StateVector::level(Level::S);
    let fidelities: Vec<f64> = [0.05, 0.1, 0.15, 0.2, 0.25]
        .iter()
        .map(|&w| {
            let traj = run_schedule(
                &schedule_prepare_s(w).unwrap(),
                &StateVector::level(Level::G),
                &Decay::off(),
                &IntegratorOptions::default(),
            )
            .unwrap();
            prep_fidelity_max(&traj, &target).unwrap().0
        })
        .collect();
    assert!(
        fidelities.windows(2).all(|w| w[1] <= w[0] + 1e-9),
        "{fidelities:?}"
    );
}

#[test]
fn two_level_formula_improves_for_weaker_drive() {
    let deviation = |w: f64| {
        let traj = run_schedule(
            &schedule_prepare_s(w).unwrap(),
            &StateVector::level(Level::G),
            &Decay::off(),
            &IntegratorOptions::default(),
        )
        .unwrap();
        traj.times
            .iter()
            .zip(traj.populations())
            .map(|(t, p)| (p[Level::S.index()] - rabi_analytic_ps(w, *t)).abs())
            .fold(0.0, f64::max)
    };
    assert!(deviation(0.05) < deviation(0.25));
}

#[test]
fn default_units_match_reference_scenario() {
    assert!((Units::default().a_over_imc - 1.0 / 375.0).abs() < 1e-15);
}
