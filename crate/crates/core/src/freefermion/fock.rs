//! Fock space of a handful of fermionic modes.

use nalgebra::DMatrix;

use crate::linalg::{C64, ONE, ZERO};

/// Fock space of `n_modes` modes. Basis state `s` has mode `k` occupied when
/// bit `k` of `s` is set; operators carry the in-block Jordan-Wigner sign.
#[derive(Debug, Clone)]
pub struct FockSpace {
    n_modes: usize,
    annihilators: Vec<DMatrix<C64>>,
}

impl FockSpace {
    pub fn new(n_modes: usize) -> Self {
        let dim = 1usize << n_modes;
        let annihilators = (0..n_modes)
            .map(|k| {
                let mut m = DMatrix::from_element(dim, dim, ZERO);
                for s in 0..dim {
                    if s & (1 << k) != 0 {
                        let below = (s & ((1 << k) - 1)).count_ones();
                        let sign = if below % 2 == 0 { ONE } else { -ONE };
                        m[(s ^ (1 << k), s)] = sign;
                    }
                }
                m
            })
            .collect();
        Self {
            n_modes,
            annihilators,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn annihilator(&self, k: usize) -> &DMatrix<C64> {
        &self.annihilators[k]
    }

    pub fn creator(&self, k: usize) -> DMatrix<C64> {
        self.annihilators[k].adjoint()
    }

    /// Fermion parity `(-1)^n` of basis state `s`.
    pub fn parity(s: usize) -> f64 {
        if s.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Matrix of `Σ_ij hop[i][j] d_i† d_j + Σ (pair d_i† d_j† + h.c.) + offset`.
    pub fn quadratic(
        &self,
        hop: &DMatrix<C64>,
        pairs: &[(usize, usize, C64)],
        offset: f64,
    ) -> DMatrix<C64> {
        let dim = self.dim();
        let mut h = DMatrix::from_element(dim, dim, ZERO);
        for i in 0..self.n_modes {
            for j in 0..self.n_modes {
                let c = hop[(i, j)];
                if c != ZERO {
                    h += (self.creator(i) * self.annihilator(j)) * c;
                }
            }
        }
        for &(i, j, c) in pairs {
            let term = (self.creator(i) * self.creator(j)) * c;
            h += &term + term.adjoint();
        }
        for s in 0..dim {
            h[(s, s)] += C64::new(offset, 0.0);
        }
        h
    }
}
