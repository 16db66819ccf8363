//! Negativity and logarithmic negativity of two-qubit states.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::{self, C64};
use crate::rdm::TwoSiteState;

/// Partial-transpose eigenvalues in `(−ZERO_TOL, 0)` count as zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Transpose on one qubit of a 4×4 matrix in the `|ab⟩` basis.
pub fn partial_transpose(rho: &DMatrix<C64>, sub: Subsystem) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    let (r, c) = match sub {
                        Subsystem::A => (2 * ap + b, 2 * a + bp),
                        Subsystem::B => (2 * a + bp, 2 * ap + b),
                    };
                    out[(r, c)] = rho[(2 * a + b, 2 * ap + bp)];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementValue {
    /// Sum of `|λ|` over negative partial-transpose eigenvalues.
    pub negativity: f64,
    /// `log2(1 + 2 N)`.
    pub log_negativity: f64,
}

pub fn entanglement(state: &TwoSiteState) -> EntanglementValue {
    let pt = partial_transpose(state.matrix(), Subsystem::B);
    let negativity: f64 = linalg::eigvalsh(&pt)
        .iter()
        .filter(|&&v| v < -ZERO_TOL)
        .map(|v| -v)
        .sum();
    EntanglementValue {
        negativity,
        log_negativity: (1.0 + 2.0 * negativity).log2(),
    }
}

pub fn log_negativity(state: &TwoSiteState) -> f64 {
    entanglement(state).log_negativity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefermion::CorrelatorSet;
    use crate::rdm::assemble;
    use proptest::prelude::*;

    fn werner(p: f64) -> TwoSiteState {
        // p |Φ+⟩⟨Φ+| + (1 − p) 1/4
        assemble(&CorrelatorSet {
            txx: p,
            tyy: -p,
            tzz: p,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn bell_state() {
        let e = entanglement(&werner(1.0));
        assert!((e.negativity - 0.5).abs() < 1e-14);
        assert!((e.log_negativity - 1.0).abs() < 1e-14);
    }

    #[test]
    fn werner_state() {
        let e = entanglement(&werner(0.6));
        assert!((e.negativity - 0.2).abs() < 1e-14);
        assert!((e.log_negativity - 1.4f64.log2()).abs() < 1e-14);
        assert_eq!(entanglement(&werner(1.0 / 3.0)).negativity, 0.0);
    }

    #[test]
    fn product_and_mixed_states_are_separable() {
        assert_eq!(log_negativity(&werner(0.0)), 0.0);
        let up = assemble(&CorrelatorSet {
            mz_e: 1.0,
            mz_o: 1.0,
            tzz: 1.0,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(log_negativity(&up), 0.0);
    }

    #[test]
    fn transposing_either_side_agrees() {
        let s = assemble(&CorrelatorSet {
            mz_e: 0.2,
            txx: 0.5,
            tyy: -0.3,
            tzz: 0.1,
            txy: 0.2,
            tyx: -0.1,
            mz_o: -0.1,
        })
        .unwrap();
        let a = linalg::eigvalsh(&partial_transpose(s.matrix(), Subsystem::A));
        let b = linalg::eigvalsh(&partial_transpose(s.matrix(), Subsystem::B));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    fn local_unitary(theta: f64, phi: f64) -> DMatrix<C64> {
        let (c, s) = (theta.cos(), theta.sin());
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c, 0.0),
                -C64::from_polar(s, -phi),
                C64::from_polar(s, phi),
                C64::new(c, 0.0),
            ],
        )
    }

    proptest! {
        #[test]
        fn invariant_under_local_unitaries(p in 0.0f64..1.0, t1 in 0.0f64..3.0, f1 in 0.0f64..6.0, t2 in 0.0f64..3.0, f2 in 0.0f64..6.0) {
            let s = werner(p);
            let u = linalg::kron(&local_unitary(t1, f1), &local_unitary(t2, f2));
            let rotated = TwoSiteState::from_matrix(&u * s.matrix() * u.adjoint()).unwrap();
            prop_assert!((log_negativity(&s) - log_negativity(&rotated)).abs() < 1e-10);
        }
    }
}
