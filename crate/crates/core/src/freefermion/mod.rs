//! Momentum-space solution of the ring.
//!
//! After the Jordan-Wigner mapping the ring splits into two fermion-parity
//! sectors: even parity sees antiperiodic fermions (half-integer `p`), odd
//! parity sees periodic fermions (integer `p`). Within a sector, the two-site
//! unit cell gives sublattice modes `a_φ` (odd sites) and `b_φ` (even sites)
//! with `φ = 2πp/N` in `(-π/2, π/2]`, and the momenta `±φ` couple into one
//! block of four modes. The momenta `φ = 0` and `φ = π/2` are their own
//! partners and form two-mode blocks.
//!
//! Each block is diagonalized numerically on its Fock space. Spin
//! correlators follow from Wick-type contractions across blocks, summed over
//! both parity sectors with the projector `(1 ± P)/2`, which makes finite-ring
//! results exact.

mod engine;
mod fock;
mod gaussian;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use engine::{CorrelatorEngine, TimeSlice};
pub use fock::FockSpace;
pub use gaussian::{GaussianEngine, GaussianSlice};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, I, ZERO};
use crate::model::{field_at, FieldProtocol, ModelParams};

/// Fermion-parity sector of the spin ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// `P = +1`; antiperiodic fermions.
    Even,
    /// `P = -1`; periodic fermions.
    Odd,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Even, Sector::Odd];

    pub fn sign(self) -> f64 {
        match self {
            Sector::Even => 1.0,
            Sector::Odd => -1.0,
        }
    }
}

/// Block momentum `p = twice_p / 2`, stored doubled so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Momentum {
    pub twice_p: i64,
    pub n_sites: usize,
}

impl Momentum {
    pub fn p(&self) -> f64 {
        self.twice_p as f64 / 2.0
    }

    pub fn phi(&self) -> f64 {
        PI * self.twice_p as f64 / self.n_sites as f64
    }

    /// Whether `±φ` are distinct modes (four-mode block).
    pub fn paired(&self) -> bool {
        self.twice_p != 0 && 2 * self.twice_p != self.n_sites as i64
    }

    pub fn sector(&self) -> Sector {
        if self.twice_p % 2 == 0 {
            Sector::Odd
        } else {
            Sector::Even
        }
    }
}

/// Representative momenta `0 <= p <= N/4` of one parity sector. Together
/// with their partners `-p` they enumerate each sublattice's `N/2` modes once.
pub fn momentum_grid(n_sites: usize, sector: Sector) -> Result<Vec<Momentum>> {
    if n_sites % 2 != 0 {
        return Err(Error::OddSize(n_sites));
    }
    let start = match sector {
        Sector::Even => 1,
        Sector::Odd => 0,
    };
    Ok((start..=(n_sites as i64 / 2))
        .step_by(2)
        .map(|twice_p| Momentum { twice_p, n_sites })
        .collect())
}

/// Quadratic block Hamiltonian.
///
/// Four-mode blocks use the ordering `[a_φ, b_φ, a_-φ, b_-φ]` and read
///
/// ```text
/// H_φ = cos φ (a_φ† b_φ + a_-φ† b_-φ + h.c.)
///     + iγ sin φ (a_φ† b_-φ† − a_-φ† b_φ†) + h.c.
///     + (h1 − h2)(n_aφ + n_a-φ) + (h1 + h2)(n_bφ + n_b-φ) − 2 h1
/// ```
///
/// Two-mode blocks (`[a_φ, b_φ]`) carry `cos φ (a†b + h.c.)`,
/// `iγ sin φ a†b† + h.c.`, the same potentials and offset `-h1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumBlock {
    pub momentum: Momentum,
    pub phi: f64,
    /// `J cos φ`.
    pub hopping: f64,
    /// `J γ sin φ`.
    pub pairing: f64,
    /// Potential on the odd sublattice, `h1 − h2`.
    pub potential_a: f64,
    /// Potential on the even sublattice, `h1 + h2`.
    pub potential_b: f64,
    pub offset: f64,
}

/// Block coefficients for the fields in force at time `t`.
pub fn build_block(
    params: &ModelParams,
    proto: &FieldProtocol,
    t: f64,
    momentum: Momentum,
) -> MomentumBlock {
    let (h1, h2) = field_at(proto, t);
    block_with_fields(params.gamma, h1, h2, momentum)
}

pub(crate) fn block_with_fields(gamma: f64, h1: f64, h2: f64, momentum: Momentum) -> MomentumBlock {
    let phi = momentum.phi();
    MomentumBlock {
        momentum,
        phi,
        hopping: phi.cos(),
        pairing: gamma * phi.sin(),
        potential_a: h1 - h2,
        potential_b: h1 + h2,
        offset: if momentum.paired() { -2.0 * h1 } else { -h1 },
    }
}

impl MomentumBlock {
    pub fn n_modes(&self) -> usize {
        if self.momentum.paired() {
            4
        } else {
            2
        }
    }

    pub fn fock(&self) -> FockSpace {
        FockSpace::new(self.n_modes())
    }

    /// The block operator on its Fock space.
    pub fn hamiltonian(&self) -> DMatrix<C64> {
        self.hamiltonian_on(&self.fock())
    }

    pub(crate) fn hamiltonian_on(&self, fock: &FockSpace) -> DMatrix<C64> {
        let m = self.n_modes();
        let mut hop = DMatrix::from_element(m, m, ZERO);
        let t = C64::new(self.hopping, 0.0);
        let pa = C64::new(self.potential_a, 0.0);
        let pb = C64::new(self.potential_b, 0.0);
        let cells: &[(usize, usize)] = if m == 4 { &[(0, 1), (2, 3)] } else { &[(0, 1)] };
        for &(a, b) in cells {
            hop[(a, b)] = t;
            hop[(b, a)] = t;
            hop[(a, a)] = pa;
            hop[(b, b)] = pb;
        }
        let delta = I * self.pairing;
        let pairs: Vec<(usize, usize, C64)> = if m == 4 {
            vec![(0, 3, delta), (2, 1, -delta)]
        } else {
            vec![(0, 1, delta)]
        };
        fock.quadratic(&hop, &pairs, self.offset)
    }

    /// Mode coefficients of the real-space annihilator `c_site` (1-based) on
    /// this block.
    pub(crate) fn site_modes(&self, site: usize) -> Vec<(usize, C64)> {
        let n = self.momentum.n_sites as f64;
        let norm = (2.0 / n).sqrt();
        // odd sites live on sublattice a (modes 0, 2), even sites on b (1, 3)
        let sub = if site % 2 == 1 { 0 } else { 1 };
        let arg = site as f64 * self.phi;
        let mut modes = vec![(sub, C64::from_polar(norm, arg))];
        if self.momentum.paired() {
            modes.push((sub + 2, C64::from_polar(norm, -arg)));
        }
        modes
    }

    pub(crate) fn site_annihilator(&self, fock: &FockSpace, site: usize) -> DMatrix<C64> {
        let dim = fock.dim();
        self.site_modes(site)
            .into_iter()
            .fold(DMatrix::from_element(dim, dim, ZERO), |acc, (k, z)| {
                acc + fock.annihilator(k) * z
            })
    }
}

/// Normalized `exp(−β H_p)` on the block Fock space.
pub fn thermal_block_state(block: &MomentumBlock, beta: f64) -> Result<DMatrix<C64>> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    let (vals, vecs) = linalg::eigh(&block.hamiltonian());
    let e0 = vals[0];
    let weights: Vec<f64> = vals.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        weights.len(),
        weights.iter().map(|&w| C64::new(w / z, 0.0)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// `U ρ U†` with `U = exp(−i H_post t)` on the block.
pub fn evolve_block(state: &DMatrix<C64>, block_post: &MomentumBlock, t: f64) -> DMatrix<C64> {
    let (vals, vecs) = linalg::eigh(&block_post.hamiltonian());
    let phases = nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    );
    let u = &vecs * DMatrix::from_diagonal(&phases) * vecs.adjoint();
    &u * state * u.adjoint()
}

/// Single-site magnetizations and two-site correlators of the nearest-neighbour
/// pair `(e, o)`, `e` even and `o = e + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub mz_e: f64,
    pub mz_o: f64,
    pub txx: f64,
    pub tyy: f64,
    pub tzz: f64,
    pub txy: f64,
    pub tyx: f64,
}

impl CorrelatorSet {
    pub fn entries(&self) -> [f64; 7] {
        [
            self.mz_e, self.mz_o, self.txx, self.tyy, self.tzz, self.txy, self.tyx,
        ]
    }

    pub fn max_abs_diff(&self, other: &CorrelatorSet) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact nearest-neighbour correlators of the finite ring at inverse
/// temperature `beta`, evolved to time `t` under the post-quench fields.
pub fn correlators(
    params: &ModelParams,
    proto: &FieldProtocol,
    beta: f64,
    t: f64,
) -> Result<CorrelatorSet> {
    let engine = CorrelatorEngine::new(params, proto)?;
    engine.correlators(beta, t)
}

/// Settings for the large-ring proxy of the infinite chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoLimit {
    pub n_start: usize,
    pub tol: f64,
    pub n_max: usize,
}

impl Default for ThermoLimit {
    fn default() -> Self {
        Self {
            n_start: 4096,
            tol: 1e-8,
            n_max: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Converged {
    pub correlators: CorrelatorSet,
    pub n_sites: usize,
    /// Largest entry change in the last doubling.
    pub delta: f64,
    pub converged: bool,
}

/// Correlators of the infinite chain from the unprojected Gaussian state:
/// rings of size `N` and `2N` are compared and `N` doubled until entries agree
/// within `tol` (or `n_max` is reached). `params.n_sites` is ignored.
pub fn thermodynamic_correlators(
    params: &ModelParams,
    proto: &FieldProtocol,
    beta: f64,
    t: f64,
    limit: &ThermoLimit,
) -> Result<Converged> {
    let mut n = limit.n_start.max(4);
    if n % 4 != 0 {
        n += 4 - n % 4;
    }
    let gauss = |n: usize| GaussianEngine::new(&params.with_sites(n), proto)?.correlators(beta, t);
    let mut prev = gauss(n)?;
    loop {
        let next_n = 2 * n;
        let next = gauss(next_n)?;
        let delta = prev.max_abs_diff(&next);
        if delta < limit.tol || next_n >= limit.n_max {
            return Ok(Converged {
                correlators: next,
                n_sites: next_n,
                delta,
                converged: delta < limit.tol,
            });
        }
        prev = next;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_error, trace, trace_product};

    fn params() -> ModelParams {
        ModelParams::new(0.6, 1.2, 0.5, 8).unwrap()
    }

    #[test]
    fn grid_covers_all_modes_once() {
        for n in (4..=40).step_by(2) {
            for sector in Sector::BOTH {
                let modes: usize = momentum_grid(n, sector)
                    .unwrap()
                    .iter()
                    .map(|m| if m.paired() { 4 } else { 2 })
                    .sum();
                assert_eq!(modes, n, "n = {n}, {sector:?}");
            }
        }
    }

    #[test]
    fn block_coefficients_at_special_momenta() {
        let p = params();
        let proto = p.quench();
        let half_pi = Momentum {
            twice_p: 4,
            n_sites: 8,
        };
        let b = build_block(&p, &proto, 0.0, half_pi);
        assert!(b.hopping.abs() < 1e-15);
        assert!((b.pairing - 0.6).abs() < 1e-15);
        let zero = Momentum {
            twice_p: 0,
            n_sites: 8,
        };
        let b = build_block(&p, &proto, 0.0, zero);
        assert_eq!(b.pairing, 0.0);
        assert_eq!(b.hopping, 1.0);
        // post-quench fields vanish under the default protocol
        let b = build_block(
            &p,
            &proto,
            1.0,
            Momentum {
                twice_p: 2,
                n_sites: 8,
            },
        );
        assert_eq!((b.potential_a, b.potential_b, b.offset), (0.0, 0.0, 0.0));
    }

    #[test]
    fn block_operators_are_hermitian() {
        let p = params();
        for sector in Sector::BOTH {
            for m in momentum_grid(8, sector).unwrap() {
                let h = build_block(&p, &p.quench(), 0.0, m).hamiltonian();
                assert!(hermiticity_error(&h) < 1e-14);
            }
        }
    }

    #[test]
    fn thermal_block_limits() {
        let p = params();
        let block = build_block(
            &p,
            &p.quench(),
            0.0,
            Momentum {
                twice_p: 1,
                n_sites: 8,
            },
        );
        let hot = thermal_block_state(&block, 0.0).unwrap();
        assert!((hot - DMatrix::<C64>::identity(16, 16) / C64::new(16.0, 0.0)).norm() < 1e-14);

        let rho = thermal_block_state(&block, 7.0).unwrap();
        assert!((trace(&rho).re - 1.0).abs() < 1e-13);
        assert!(hermiticity_error(&rho) < 1e-13);
        assert!(linalg::eigvalsh(&rho)[0] > -1e-14);

        let (vals, vecs) = linalg::eigh(&block.hamiltonian());
        assert!(vals[1] - vals[0] >= 0.1, "test block needs a gap");
        let cold = thermal_block_state(&block, 250.0).unwrap();
        let g = vecs.column(0);
        let projector = &g * g.adjoint();
        assert!((cold - projector).norm() < 1e-12);
        assert!(thermal_block_state(&block, -1.0).is_err());
    }

    #[test]
    fn block_evolution_properties() {
        let p = params();
        let m = Momentum {
            twice_p: 1,
            n_sites: 8,
        };
        let pre = build_block(&p, &p.quench(), 0.0, m);
        let post = build_block(&p, &p.quench(), 1.0, m);
        let rho = thermal_block_state(&pre, 3.0).unwrap();
        assert!((evolve_block(&rho, &post, 0.0) - &rho).norm() < 1e-13);
        // stationary when fields are unchanged
        assert!((evolve_block(&rho, &pre, 2.7) - &rho).norm() < 1e-12);
        let h_post = post.hamiltonian();
        let e0 = trace_product(&rho, &h_post).re;
        for t in [0.3, 1.7, 5.0] {
            let r = evolve_block(&rho, &post, t);
            assert!((trace_product(&r, &h_post).re - e0).abs() < 1e-12);
            assert!((trace(&r).re - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn infinite_temperature_correlators_vanish() {
        let p = params();
        let c = correlators(&p, &p.quench(), 0.0, 0.0).unwrap();
        assert!(c.entries().iter().all(|x| x.abs() < 1e-14), "{c:?}");
    }

    #[test]
    fn equilibrium_has_no_mixed_correlators() {
        let p = params();
        let c = correlators(&p, &p.quench(), 4.0, 0.0).unwrap();
        assert!(c.txy.abs() < 1e-13 && c.tyx.abs() < 1e-13);
        let c = correlators(&p, &p.hold(), 4.0, 3.0).unwrap();
        assert!(c.txy.abs() < 1e-12 && c.tyx.abs() < 1e-12);
    }

    #[test]
    fn rejects_odd_rings() {
        let p = ModelParams {
            gamma: 0.5,
            lambda1: 1.0,
            lambda2: 0.0,
            n_sites: 7,
        };
        assert!(correlators(&p, &p.quench(), 1.0, 0.0).is_err());
    }
}
