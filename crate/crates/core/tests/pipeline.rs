use std::f64::consts::FRAC_PI_2;

use dotqip_core::linalg::{c, max_abs_diff, CVector};
use dotqip_core::*;

fn bell_run() -> GenerationRun {
    GenerationRun::resonant(ExcitonSystemParams::new(2, 0.1, SignConvention::DensityMatrix), 0.02, PulseShape::Cosine)
}

#[test]
fn generated_bell_state_matches_target_and_analytic_time() {
    let (w, a) = (0.1, 0.02);
    let tau = pulse_length(TargetKind::Bell, a, w).unwrap();
    let times = time_steps(1.5 * tau, 0.1);
    let traj = bell_run().simulate(&times).unwrap();
    let series = overlap_series(&traj, TargetKind::Bell, FRAC_PI_2).unwrap();
    let peak = find_first_peak(&times, &series, 0.99).unwrap();
    assert!((peak.time / tau - 1.0).abs() < 0.05, "{peak:?} vs {tau}");
    // the state at the peak is the φ = π/2 target up to the small |1⟩ leak
    let state = &traj.states[peak.index];
    let best = phase_optimized_overlap(state, TargetKind::Bell).unwrap();
    assert!(best >= series[peak.index] - 1e-12);
    assert!(target(TargetKind::Bell, FRAC_PI_2).overlap(state).unwrap() > 0.99);
    assert!((omega_bell(a, w) * tau - FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn lab_and_rotating_frames_share_the_envelope() {
    let times = time_steps(200.0, 0.05);
    let rot = bell_run().simulate(&times).unwrap();
    let lab = GenerationRun { frame: Frame::Lab, ..bell_run() }.simulate(&times).unwrap();
    let env_rot = envelope_series(&rot, TargetKind::Bell).unwrap();
    let env_lab = envelope_series(&lab, TargetKind::Bell).unwrap();
    for phi in [0.0, 0.7, FRAC_PI_2, 2.5] {
        let fixed = overlap_series(&lab, TargetKind::Bell, phi).unwrap();
        for ((f, el), er) in fixed.iter().zip(&env_lab).zip(&env_rot) {
            assert!((el - er).abs() < 1e-12);
            assert!(*f <= el + 1e-12);
        }
    }
    let back = lab.transformed(1.0, Direction::ToRotating).unwrap();
    for (x, y) in back.states.iter().zip(&rot.states) {
        assert!(max_abs_diff(&x.density(), &y.density()) < 1e-12);
    }
}

#[test]
fn dephasing_at_zero_rate_reproduces_exact_run() {
    let times = time_steps(300.0, 2.0);
    let system = ExcitonSystemParams::new(3, 0.1, SignConvention::DensityMatrix);
    let run = GenerationRun::resonant(system, 0.04, PulseShape::Cosine);
    let h = build_hamiltonian(&run.system, &run.drive).unwrap();
    let s0 = QuantumState::basis(active_subspace(3).unwrap(), 0).unwrap();
    let exact = run.simulate(&times).unwrap();
    let master = evolve_dephasing(&h, &DephasingSpec::rate(0.0), &s0, &times).unwrap();
    for (x, y) in exact.states.iter().zip(&master.states) {
        assert!(max_abs_diff(&x.density(), &y.density()) < 1e-8);
    }
    // a small rate pulls the GHZ envelope below the coherent one
    let noisy = GenerationRun { dephasing: DephasingSpec::rate(1e-3), ..run }.simulate(&times).unwrap();
    let best = |t: &Trajectory| envelope_series(t, TargetKind::Ghz).unwrap().into_iter().fold(0.0, f64::max);
    assert!(best(&noisy) < best(&exact));
}

#[test]
fn generation_times_convert_to_femtoseconds() {
    let units = UnitContext::new(2.8).unwrap();
    let t = 2.0 * std::f64::consts::PI / (16.0 * 0.04f64.powi(2) + 0.01).sqrt();
    let seconds = units.to_seconds(t);
    assert!((seconds - 7.83e-15).abs() < 0.01e-15, "{seconds}");
    assert!((units.to_dimensionless(seconds) - t).abs() < 1e-12);
}

#[test]
fn teleported_bell_pair_output_is_product_state() {
    let input = QubitState::from_bloch(0.9, -2.1);
    let out = teleport_full_circuit(&input);
    let plus = QubitState::new(c(0.5f64.sqrt()), c(0.5f64.sqrt())).unwrap();
    let expected = Register::product(&[plus, plus, input]);
    let overlap = expected.amplitudes().dotc(out.amplitudes()).norm();
    assert!((overlap - 1.0).abs() < 1e-12);
    let rho_c = out.reduced_density(2).unwrap();
    let psi: CVector = input.vector();
    assert!(max_abs_diff(&rho_c, &(&psi * psi.adjoint())) < 1e-12);
}

#[test]
fn records_round_trip_through_json() {
    let run = bell_run();
    let back: GenerationRun = serde_json::from_str(&serde_json::to_string(&run).unwrap()).unwrap();
    assert_eq!(back, run);

    let rec = teleport_with_measurement(&QubitState::from_bloch(1.2, 0.4), None, 99).unwrap();
    let back: TeleportRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(back, rec);

    let point = nmr_point(4.0, &DotParams::silicon(5.4), true).unwrap();
    let back: NmrPoint = serde_json::from_str(&serde_json::to_string(&point).unwrap()).unwrap();
    assert_eq!(back, point);
}

#[test]
fn nmr_sweep_switches_with_the_ground_state() {
    let dot = DotParams::silicon(5.4);
    let points = nmr_sweep(0.5, 12.0, 116, &dot, false).unwrap();
    let mut switches = 0;
    for pair in points.windows(2) {
        let (p, q) = (&pair[0], &pair[1]);
        if p.ground.spin_s != q.ground.spin_s {
            switches += 1;
        }
        if q.ground.spin_s == 1 {
            assert!(q.relative_shift > 0.0);
            assert!((q.omega_nmr - q.omega_nmr_diagonalized).abs() < 1e-10 * q.omega_nmr);
        } else {
            assert_eq!(q.relative_shift, 0.0);
        }
    }
    assert_eq!(switches, 1);
    // picosecond-scale gating from a meV-scale splitting
    let bound = gating_time_bound(0.1).unwrap();
    assert!(bound > 1e-12 && bound < 1e-11);
}

#[test]
fn invalid_inputs_surface_as_errors() {
    let bad = ExcitonSystemParams::new(4, 0.1, SignConvention::DensityMatrix);
    assert!(GenerationRun::resonant(bad, 0.02, PulseShape::Cosine).simulate(&[0.0]).is_err());
    assert!(bell_run().simulate(&[1.0, 0.5]).is_err());
    assert!(approx_bell_rho(1.0, 0.06, 0.1).is_err());
    assert!(approx_bell_rho(1.0, 0.03, 0.1).unwrap().outside_validity);
    assert!(nmr_point(0.0, &DotParams::silicon(5.4), false).is_err());
    assert!(QubitState::new(c(1.0), c(1.0)).is_err());
}
