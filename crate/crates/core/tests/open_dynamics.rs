use atxy::ed::{
    build_hamiltonian, evolve_closed, reduce_pair, DenseState, SparseHamiltonian, Spectrum,
};
use atxy::entanglement::log_negativity;
use atxy::linalg::{self, pauli, C64};
use atxy::openquantum::{integrate, rhs, BathSpec, IntegratorSettings, LadderChoice, NoiseKind};
use atxy::{Error, ModelParams};
use nalgebra::DMatrix;

fn settings(dt: f64, t_final: f64, pairs: Vec<(usize, usize)>) -> IntegratorSettings {
    IntegratorSettings {
        dt,
        t_final,
        pairs,
        ..Default::default()
    }
}

#[test]
fn single_qubit_amplitude_damping() {
    // p↑(t) = p↑(0) e^{−Γt}, coherences decay at Γ/2
    let bath = BathSpec {
        k: 0.3,
        beta_e: 2.0,
        ..Default::default()
    };
    let rate = 16.0 * bath.k * bath.beta_e.exp() / bath.z_e();
    let rho0 = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.8, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.2, 0.0),
        ],
    );
    let state = DenseState::from_matrix(1, rho0).unwrap();
    let t = 0.4;
    let traj = integrate(
        &state,
        &SparseHamiltonian::zero(1),
        &bath,
        LadderChoice::Ladder,
        &settings(1e-4, t, vec![]),
    )
    .unwrap();
    let m = traj.final_state.matrix();
    assert!((m[(0, 0)].re - 0.8 * (-rate * t).exp()).abs() < 1e-12);

    let coh = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    );
    let d = rhs(
        &DenseState::from_matrix(1, coh.clone()).unwrap(),
        &SparseHamiltonian::zero(1),
        &bath,
        LadderChoice::Ladder,
    )
    .unwrap();
    assert!((d - coh * C64::new(-rate / 2.0, 0.0)).norm() < 1e-12);

    // long times: the σz = −1 projector
    let traj = integrate(
        &state,
        &SparseHamiltonian::zero(1),
        &bath,
        LadderChoice::Ladder,
        &settings(1e-3, 20.0, vec![]),
    )
    .unwrap();
    assert!((traj.final_state.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
}

#[test]
fn single_qubit_with_absorption_reaches_detailed_balance() {
    let bath = BathSpec {
        beta_e: 0.4,
        include_absorption: true,
        k: 0.5,
        ..Default::default()
    };
    let state = DenseState::product(&[1]);
    let traj = integrate(
        &state,
        &SparseHamiltonian::zero(1),
        &bath,
        LadderChoice::Ladder,
        &settings(1e-3, 10.0, vec![]),
    )
    .unwrap();
    let up = traj.final_state.matrix()[(0, 0)].re;
    let expect = (-bath.beta_e).exp() / bath.z_e();
    assert!((up - expect).abs() < 1e-10, "{up} vs {expect}");
}

fn vectorized_generator(
    h: &SparseHamiltonian,
    bath: &BathSpec,
    choice: LadderChoice,
    n: usize,
) -> DMatrix<C64> {
    let d = 1 << n;
    let mut l = DMatrix::from_element(d * d, d * d, C64::new(0.0, 0.0));
    for col in 0..d * d {
        let mut e = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        e[(col % d, col / d)] = C64::new(1.0, 0.0);
        // rhs is linear; feed the unit matrix through the unchecked path
        let out = rhs(&DenseState::from_matrix(n, e).unwrap(), h, bath, choice).unwrap();
        for row in 0..d * d {
            l[(row, col)] = out[(row % d, row / d)];
        }
    }
    l
}

#[test]
fn two_sites_match_matrix_exponential() {
    let gamma = 0.6;
    let (h1, h2) = (0.7, 0.2);
    let xx = linalg::kron(&pauli::x(), &pauli::x());
    let yy = linalg::kron(&pauli::y(), &pauli::y());
    let z1 = linalg::kron(&pauli::z(), &pauli::id());
    let z2 = linalg::kron(&pauli::id(), &pauli::z());
    let hc = xx * C64::new((1.0 + gamma) / 4.0, 0.0)
        + yy * C64::new((1.0 - gamma) / 4.0, 0.0)
        + z1 * C64::new((h1 - h2) / 2.0, 0.0)
        + z2 * C64::new((h1 + h2) / 2.0, 0.0);
    let h = SparseHamiltonian::from_dense(2, &hc.map(|z| z.re)).unwrap();
    let rho0 = DenseState::product(&[0, 0]);
    let t = 1.5;
    for (choice, noise) in [
        (LadderChoice::Ladder, NoiseKind::Dissipative),
        (LadderChoice::Literal, NoiseKind::Dissipative),
        (LadderChoice::Ladder, NoiseKind::Dephasing),
    ] {
        let bath = BathSpec {
            beta_e: 0.8,
            include_absorption: true,
            noise,
            dephasing_rate: 0.3,
            ..Default::default()
        };
        let l = vectorized_generator(&h, &bath, choice, 2);
        let prop = (l * C64::new(t, 0.0)).exp();
        let v0 = DMatrix::from_fn(16, 1, |r, _| rho0.matrix()[(r % 4, r / 4)]);
        let v = prop * v0;
        let expect = DMatrix::from_fn(4, 4, |r, c| v[(r + 4 * c, 0)]);
        let traj = integrate(&rho0, &h, &bath, choice, &settings(2.5e-4, t, vec![(1, 2)])).unwrap();
        let err = (traj.final_state.matrix() - expect).norm();
        assert!(err < 1e-8, "{choice:?} {noise:?}: {err:e}");
    }
}

fn fs_setup(n: usize, gamma: f64, lambda2: f64, beta: f64) -> (ModelParams, DenseState) {
    let p = ModelParams::on_fs(gamma, lambda2, n).unwrap();
    let rho0 = Spectrum::new(&build_hamiltonian(&p, p.fields()).unwrap())
        .thermal_state(beta)
        .unwrap();
    (p, rho0)
}

#[test]
fn zero_coupling_is_closed_evolution() {
    let (p, rho0) = fs_setup(6, 0.6, 0.4, 20.0);
    let h = build_hamiltonian(&p, (0.0, 0.0)).unwrap();
    let bath = BathSpec {
        k: 0.0,
        ..Default::default()
    };
    let t = 3.0;
    let traj = integrate(
        &rho0,
        &h,
        &bath,
        LadderChoice::Ladder,
        &settings(1e-3, t, vec![(2, 3)]),
    )
    .unwrap();
    let closed = evolve_closed(&rho0, &h, t).unwrap();
    let err = (traj.final_state.matrix() - closed.matrix()).camax();
    assert!(err < 1e-7, "{err:e}");
    let ln_closed = log_negativity(&reduce_pair(&closed, 2, 3).unwrap());
    assert!((traj.observations.last().unwrap().ln[0] - ln_closed).abs() < 1e-7);
}

#[test]
fn repeated_door_list_is_single_door() {
    let (p, rho0) = fs_setup(4, 0.6, 0.4, 30.0);
    let h = build_hamiltonian(&p, (0.0, 0.0)).unwrap();
    let single = BathSpec {
        doors: vec![3],
        ..Default::default()
    };
    let a = integrate(
        &rho0,
        &h,
        &single,
        LadderChoice::Ladder,
        &settings(1e-3, 1.0, vec![(3, 4)]),
    )
    .unwrap();
    let b = integrate(
        &rho0,
        &h,
        &single.clone(),
        LadderChoice::Ladder,
        &settings(1e-3, 1.0, vec![(3, 4)]),
    )
    .unwrap();
    assert_eq!(a.final_state.matrix(), b.final_state.matrix());
    let twice = BathSpec {
        doors: vec![3, 3],
        ..Default::default()
    };
    assert!(matches!(
        integrate(
            &rho0,
            &h,
            &twice,
            LadderChoice::Ladder,
            &IntegratorSettings::default()
        ),
        Err(Error::InvalidBath(_))
    ));
    // two doors are additive in the generator
    let both = BathSpec {
        doors: vec![1, 3],
        ..Default::default()
    };
    let g_both = rhs(&rho0, &h, &both, LadderChoice::Ladder).unwrap();
    let g1 = rhs(
        &rho0,
        &h,
        &BathSpec {
            doors: vec![1],
            ..Default::default()
        },
        LadderChoice::Ladder,
    )
    .unwrap();
    let g3 = rhs(&rho0, &h, &single, LadderChoice::Ladder).unwrap();
    let comm = rhs(
        &rho0,
        &h,
        &BathSpec {
            k: 0.0,
            ..Default::default()
        },
        LadderChoice::Ladder,
    )
    .unwrap();
    assert!((g_both - (g1 + g3 - comm)).norm() < 1e-13);
}

#[test]
fn dephasing_keeps_populations_without_hamiltonian() {
    let (_, rho0) = fs_setup(4, 0.6, 0.4, 2.0);
    let bath = BathSpec {
        noise: NoiseKind::Dephasing,
        doors: vec![1, 2],
        dephasing_rate: 0.7,
        ..Default::default()
    };
    let traj = integrate(
        &rho0,
        &SparseHamiltonian::zero(4),
        &bath,
        LadderChoice::Ladder,
        &settings(1e-3, 2.0, vec![(1, 2)]),
    )
    .unwrap();
    let (m0, m1) = (rho0.matrix(), traj.final_state.matrix());
    for s in 0..16 {
        assert!((m0[(s, s)] - m1[(s, s)]).norm() < 1e-13);
    }
    // coherences flipping site 1 decay as e^{−8kκt}
    let rate = 8.0 * bath.k * bath.dephasing_rate;
    let (r, c) = (0b0000, 0b1100);
    let expect = m0[(r, c)] * (-2.0 * rate * 2.0).exp();
    assert!((m1[(r, c)] - expect).norm() < 1e-10);
}

#[test]
fn trajectory_integrity_and_step_convergence() {
    let (p, rho0) = fs_setup(6, 0.6, 0.5, 80.0);
    let h = build_hamiltonian(&p, (0.0, 0.0)).unwrap();
    let bath = BathSpec::default();
    let pairs = vec![(1, 2), (6, 1), (2, 3)];
    let coarse = integrate(
        &rho0,
        &h,
        &bath,
        LadderChoice::Ladder,
        &settings(2e-3, 2.0, pairs.clone()),
    )
    .unwrap();
    let fine = integrate(
        &rho0,
        &h,
        &bath,
        LadderChoice::Ladder,
        &settings(1e-3, 2.0, pairs),
    )
    .unwrap();
    for o in &fine.observations {
        assert!(o.trace_err < 1e-8);
        assert!(o.min_eig > -1e-7);
        assert!(o.hermiticity_err < 1e-9);
    }
    let (a, b) = (
        coarse.observations.last().unwrap(),
        fine.observations.last().unwrap(),
    );
    assert_eq!(a.t, b.t);
    for k in 0..3 {
        assert!((a.ln[k] - b.ln[k]).abs() < 1e-6);
    }
    // reflection through the door site: pairs (1,2) and (6,1) agree
    for o in &fine.observations {
        assert!((o.ln[0] - o.ln[1]).abs() < 1e-9);
    }
}

#[test]
fn literal_choice_keeps_trace() {
    let (p, rho0) = fs_setup(4, 0.6, 0.5, 80.0);
    let h = build_hamiltonian(&p, (0.0, 0.0)).unwrap();
    let traj = integrate(
        &rho0,
        &h,
        &BathSpec::default(),
        LadderChoice::Literal,
        &settings(1e-3, 1.0, vec![(1, 2)]),
    )
    .unwrap();
    for o in &traj.observations {
        assert!(o.trace_err < 1e-10);
    }
}

#[test]
fn reflection_sectors_match_parity_blocks() {
    let (p, rho0) = fs_setup(6, 0.6, 0.5, 80.0);
    let h = build_hamiltonian(&p, (0.0, 0.0)).unwrap();
    let bath = BathSpec {
        doors: vec![1, 4],
        include_absorption: true,
        ..Default::default()
    };
    let pairs = vec![(1, 2), (6, 1), (2, 3), (4, 5)];
    let base = settings(1e-3, 1.0, pairs);
    let sym = integrate(&rho0, &h, &bath, LadderChoice::Ladder, &base).unwrap();
    let plain = integrate(
        &rho0,
        &h,
        &bath,
        LadderChoice::Ladder,
        &IntegratorSettings {
            reflection: false,
            ..base
        },
    )
    .unwrap();
    assert!(sym.reflected && !plain.reflected);
    assert!((sym.final_state.matrix() - plain.final_state.matrix()).camax() < 1e-12);
    for (a, b) in sym.observations.iter().zip(&plain.observations) {
        for k in 0..4 {
            assert!((a.ln[k] - b.ln[k]).abs() < 1e-12);
        }
        assert!((a.min_eig - b.min_eig).abs() < 1e-12);
    }
    // a door off the mirror axis falls back to parity blocks
    let off = integrate(
        &rho0,
        &h,
        &BathSpec {
            doors: vec![2],
            ..Default::default()
        },
        LadderChoice::Ladder,
        &settings(1e-3, 0.1, vec![]),
    )
    .unwrap();
    assert!(!off.reflected);
}
