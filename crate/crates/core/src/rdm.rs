//! Two-site reduced states built from Pauli correlators.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::freefermion::CorrelatorSet;
use crate::linalg::{self, pauli, C64};

/// Eigenvalues below this are treated as an upstream bug rather than round-off.
pub const UNPHYSICAL_TOL: f64 = 1e-6;

/// Density operator of two qubits `(A, B)`, basis `|ab⟩` with `a` the
/// more significant bit and `0 = ↑`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteState {
    matrix: DMatrix<C64>,
}

impl TwoSiteState {
    /// Wraps a 4×4 matrix without physicality checks.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.nrows(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `Tr[(σ^a ⊗ σ^b) ρ]` with axes indexed 0..=3 as (1, x, y, z).
    pub fn pauli_coefficient(&self, a: usize, b: usize) -> f64 {
        let op = linalg::kron(&pauli::by_index(a), &pauli::by_index(b));
        linalg::trace_product(&op, &self.matrix).re
    }

    /// Correlators read back from the state, with `A` as the even site.
    pub fn correlators(&self) -> CorrelatorSet {
        CorrelatorSet {
            mz_e: self.pauli_coefficient(3, 0),
            mz_o: self.pauli_coefficient(0, 3),
            txx: self.pauli_coefficient(1, 1),
            tyy: self.pauli_coefficient(2, 2),
            tzz: self.pauli_coefficient(3, 3),
            txy: self.pauli_coefficient(1, 2),
            tyx: self.pauli_coefficient(2, 1),
        }
    }

    /// Hermitian part with eigenvalues in `(−UNPHYSICAL_TOL, 0)` set to zero
    /// and the trace restored to one.
    pub fn clip_negative(&self) -> Result<Self> {
        let (vals, vecs) = linalg::eigh(&linalg::hermitian_part(&self.matrix));
        if vals[0] < -UNPHYSICAL_TOL {
            return Err(Error::Unphysical { min_eig: vals[0] });
        }
        if vals[0] >= 0.0 {
            return Ok(self.clone());
        }
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            clipped.iter().map(|&v| C64::new(v / total, 0.0)),
        ));
        Ok(Self {
            matrix: &vecs * d * vecs.adjoint(),
        })
    }
}

/// `1/4 [1 + m_e σz⊗1 + m_o 1⊗σz + Σ_α T^αα σα⊗σα + T^xy σx⊗σy + T^yx σy⊗σx]`.
///
/// Fails with [`Error::Unphysical`] when the result has an eigenvalue below
/// `−UNPHYSICAL_TOL`.
pub fn assemble(c: &CorrelatorSet) -> Result<TwoSiteState> {
    let state = assemble_unchecked(c);
    let min_eig = state.min_eigenvalue();
    if min_eig < -UNPHYSICAL_TOL {
        return Err(Error::Unphysical { min_eig });
    }
    Ok(state)
}

pub fn assemble_unchecked(c: &CorrelatorSet) -> TwoSiteState {
    let terms = [
        (0, 0, 1.0),
        (3, 0, c.mz_e),
        (0, 3, c.mz_o),
        (1, 1, c.txx),
        (2, 2, c.tyy),
        (3, 3, c.tzz),
        (1, 2, c.txy),
        (2, 1, c.tyx),
    ];
    let mut m = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    for (a, b, coeff) in terms {
        if coeff != 0.0 {
            m +=
                linalg::kron(&pauli::by_index(a), &pauli::by_index(b)) * C64::new(coeff / 4.0, 0.0);
        }
    }
    TwoSiteState { matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_correlators_give_identity() {
        let s = assemble(&CorrelatorSet::default()).unwrap();
        assert!((s.matrix() - DMatrix::<C64>::identity(4, 4) * C64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fully_polarized_down() {
        let c = CorrelatorSet {
            mz_e: -1.0,
            mz_o: -1.0,
            tzz: 1.0,
            ..Default::default()
        };
        let s = assemble(&c).unwrap();
        let mut expect = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
        expect[(3, 3)] = C64::new(1.0, 0.0);
        assert!((s.matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn singlet() {
        let c = CorrelatorSet {
            txx: -1.0,
            tyy: -1.0,
            tzz: -1.0,
            ..Default::default()
        };
        let s = assemble(&c).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
            C64::new(0.0, 0.0),
        ]);
        assert!((s.matrix() - &v * v.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn rejects_unphysical() {
        let c = CorrelatorSet {
            txx: 1.0,
            tyy: 1.0,
            tzz: 1.0,
            ..Default::default()
        };
        assert!(matches!(assemble(&c), Err(Error::Unphysical { .. })));
    }

    #[test]
    fn clipping_removes_small_negative_weight() {
        // singlet slightly overdriven: one eigenvalue at −1e−7
        let c = CorrelatorSet {
            txx: -1.0 - 4e-7 / 3.0,
            tyy: -1.0 - 4e-7 / 3.0,
            tzz: -1.0 - 4e-7 / 3.0,
            ..Default::default()
        };
        let s = assemble(&c).unwrap();
        assert!(s.min_eigenvalue() < 0.0);
        let clipped = s.clip_negative().unwrap();
        assert!(clipped.min_eigenvalue() >= -1e-15);
        assert!((clipped.trace() - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn pauli_round_trip(
            mz_e in -1.0f64..1.0, mz_o in -1.0f64..1.0,
            txx in -1.0f64..1.0, tyy in -1.0f64..1.0, tzz in -1.0f64..1.0,
            txy in -1.0f64..1.0, tyx in -1.0f64..1.0,
        ) {
            let c = CorrelatorSet { mz_e, mz_o, txx, tyy, tzz, txy, tyx };
            let s = assemble_unchecked(&c);
            prop_assert!(linalg::hermiticity_error(s.matrix()) < 1e-15);
            prop_assert!((s.trace() - 1.0).abs() < 1e-15);
            prop_assert!(s.correlators().max_abs_diff(&c) < 1e-14);
        }

        #[test]
        fn assemble_is_linear(a in -0.5f64..0.5, b in -0.5f64..0.5, x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let c1 = CorrelatorSet { mz_e: x, txy: y, ..Default::default() };
            let c2 = CorrelatorSet { tzz: y, tyx: x, ..Default::default() };
            let mix = CorrelatorSet { mz_e: a * x, txy: a * y, tzz: b * y, tyx: b * x, ..Default::default() };
            let lhs = assemble_unchecked(&mix).matrix().clone();
            let id = DMatrix::<C64>::identity(4, 4) * C64::new(0.25, 0.0);
            let rhs = (assemble_unchecked(&c1).matrix() - &id) * C64::new(a, 0.0)
                + (assemble_unchecked(&c2).matrix() - &id) * C64::new(b, 0.0)
                + &id;
            prop_assert!((lhs - rhs).norm() < 1e-14);
        }
    }
}
