//! Free-fermion correlators against exact diagonalization.

use atxy::ed::{build_hamiltonian, reduce_pair, Spectrum};
use atxy::freefermion::CorrelatorEngine;
use atxy::{CorrelatorSet, FieldProtocol, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ed_correlators(p: &ModelParams, proto: &FieldProtocol, beta: f64, t: f64) -> CorrelatorSet {
    let pre = Spectrum::new(&build_hamiltonian(p, proto.pre()).unwrap());
    let rho0 = pre.thermal_state(beta).unwrap();
    let rho = Spectrum::new(&build_hamiltonian(p, proto.post()).unwrap())
        .evolve(&rho0, t)
        .unwrap();
    reduce_pair(&rho, 2, 3).unwrap().correlators()
}

fn compare(p: &ModelParams, proto: &FieldProtocol, beta: f64, t: f64) -> f64 {
    let ff = CorrelatorEngine::new(p, proto)
        .unwrap()
        .correlators(beta, t)
        .unwrap();
    let ed = ed_correlators(p, proto, beta, t);
    ff.max_abs_diff(&ed)
}

#[test]
fn single_point() {
    let p = ModelParams::new(0.6, 1.2, 0.5, 8).unwrap();
    let d = compare(&p, &p.quench(), 5.0, 1.3);
    assert!(d < 1e-8, "diff {d:e}");
}

#[test]
fn random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst0, mut worst_t) = (0.0f64, 0.0f64);
    for n in [4usize, 6, 8] {
        for k in 0..24 {
            let g = rng.gen_range(0.1..1.0) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 };
            let p =
                ModelParams::new(g, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), n).unwrap();
            let beta = if k % 6 == 0 {
                250.0
            } else {
                rng.gen_range(0.0..20.0)
            };
            let proto = if k % 5 == 0 { p.hold() } else { p.quench() };
            let t0 = compare(&p, &proto, beta, 0.0);
            let t = rng.gen_range(0.1..15.0);
            let tt = compare(&p, &proto, beta, t);
            assert!(t0 < 1e-8, "N={n} {p:?} beta={beta} t=0 diff {t0:e}");
            assert!(tt < 1e-6, "N={n} {p:?} beta={beta} t={t} diff {tt:e}");
            worst0 = worst0.max(t0);
            worst_t = worst_t.max(tt);
        }
    }
    println!("worst deviation: t=0 {worst0:e}, t>0 {worst_t:e}");
}
