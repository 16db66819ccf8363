//! Unprojected Gaussian state through single-particle Majorana covariances.
//!
//! With block Majoranas `γ_{2k} = a_k + a_k†`, `γ_{2k+1} = i(a_k† − a_k)` and
//! `[H, γ_μ] = Σ_ν K_μν γ_ν` (`K` Hermitian), the thermal covariance is
//! `⟨γ_μ γ_ν⟩ = [1 − tanh(βK/2)]_μν` and the Heisenberg evolution is
//! `γ(t) = exp(iK_post t) γ`. The site Majoranas are linear in the `γ`, so
//! pair expectations add up over blocks and the quartic term follows from
//! Wick's theorem.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{block_with_fields, momentum_grid, CorrelatorSet, FockSpace, MomentumBlock, Sector};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, I, ZERO};
use crate::model::{FieldProtocol, ModelParams};

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

struct GaussBlock {
    kappa_pre: Vec<f64>,
    kappa_post: Vec<f64>,
    /// `u W_post`, rows are the site Majoranas `x1..x4`.
    uw: DMatrix<C64>,
    /// `W_post† W_pre`.
    q: DMatrix<C64>,
    /// `W_post† conj(W_pre)`.
    q_conj: DMatrix<C64>,
}

/// Antiperiodic-sector Gaussian state of a ring, diagonalized per block.
pub struct GaussianEngine {
    n_sites: usize,
    blocks: Vec<GaussBlock>,
}

/// Rotated site Majoranas at a fixed time; cheap to evaluate at any `β`.
pub struct GaussianSlice {
    blocks: Vec<SlicedBlock>,
}

struct SlicedBlock {
    kappa: Vec<f64>,
    /// `B = v W_pre` and `C = v conj(W_pre)` with `v = u exp(iK_post t)`.
    b: DMatrix<C64>,
    c: DMatrix<C64>,
}

fn majoranas(fock: &FockSpace) -> Vec<DMatrix<C64>> {
    let mut g = Vec::with_capacity(2 * fock.n_modes());
    for k in 0..fock.n_modes() {
        let a = fock.annihilator(k);
        let ad = fock.creator(k);
        g.push(a + &ad);
        g.push((ad - a) * I);
    }
    g
}

/// `K_μν = Tr(γ_ν [H, γ_μ]) / dim`, symmetrized.
fn single_particle(h: &DMatrix<C64>, gam: &[DMatrix<C64>]) -> DMatrix<C64> {
    let dim = h.nrows() as f64;
    let n = gam.len();
    let comm: Vec<DMatrix<C64>> = gam.iter().map(|g| h * g - g * h).collect();
    let k = DMatrix::from_fn(n, n, |mu, nu| {
        linalg::trace_product(&gam[nu], &comm[mu]) / dim
    });
    (&k + k.adjoint()) * C64::new(0.5, 0.0)
}

/// `K` of unit hopping, pairing and sublattice potentials for one block
/// shape; `K` is linear in the block coefficients.
struct Shape {
    terms: [DMatrix<C64>; 4],
}

impl Shape {
    fn new(template: &MomentumBlock) -> Self {
        let fock = template.fock();
        let gam = majoranas(&fock);
        let unit = |c: [f64; 4]| MomentumBlock {
            hopping: c[0],
            pairing: c[1],
            potential_a: c[2],
            potential_b: c[3],
            offset: 0.0,
            ..*template
        };
        let terms = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
        .map(|c| single_particle(&unit(c).hamiltonian_on(&fock), &gam));
        Self { terms }
    }

    fn k(&self, b: &MomentumBlock) -> DMatrix<C64> {
        [b.hopping, b.pairing, b.potential_a, b.potential_b]
            .iter()
            .zip(&self.terms)
            .fold(
                DMatrix::zeros(self.terms[0].nrows(), self.terms[0].ncols()),
                |acc, (&c, m)| acc + m * C64::new(c, 0.0),
            )
    }
}

impl GaussBlock {
    fn new(shape: &Shape, pre: &MomentumBlock, post: &MomentumBlock) -> Self {
        // with c = Σ z_k a_k: c + c† = Σ Re z γ_2k − Im z γ_2k+1,
        // c† − c = −i Σ Im z γ_2k + Re z γ_2k+1
        let mut u = DMatrix::from_element(4, 2 * pre.n_modes(), ZERO);
        for (row, site) in [(0usize, 2usize), (2, 3)] {
            for (k, z) in pre.site_modes(site) {
                u[(row, 2 * k)] = C64::new(z.re, 0.0);
                u[(row, 2 * k + 1)] = C64::new(-z.im, 0.0);
                u[(row + 1, 2 * k)] = C64::new(0.0, -z.im);
                u[(row + 1, 2 * k + 1)] = C64::new(0.0, -z.re);
            }
        }
        let (kappa_pre, w_pre) = linalg::eigh(&shape.k(pre));
        let (kappa_post, w_post) = linalg::eigh(&shape.k(post));
        Self {
            kappa_pre,
            kappa_post,
            uw: u * &w_post,
            q: w_post.adjoint() * &w_pre,
            q_conj: w_post.adjoint() * w_pre.map(|z| z.conj()),
        }
    }

    fn slice(&self, t: f64) -> SlicedBlock {
        let mut v = self.uw.clone();
        for (col, &k) in self.kappa_post.iter().enumerate() {
            let ph = C64::from_polar(1.0, k * t);
            for row in 0..v.nrows() {
                v[(row, col)] *= ph;
            }
        }
        SlicedBlock {
            kappa: self.kappa_pre.clone(),
            b: &v * &self.q,
            c: &v * &self.q_conj,
        }
    }
}

impl GaussianEngine {
    pub fn new(params: &ModelParams, proto: &FieldProtocol) -> Result<Self> {
        let n = params.n_sites;
        if n % 2 != 0 {
            return Err(Error::OddSize(n));
        }
        if n < 4 {
            return Err(Error::SizeOutOfRange {
                n,
                min: 4,
                max: usize::MAX,
            });
        }
        let (h1, h2) = proto.pre();
        let (g1, g2) = proto.post();
        let grid = momentum_grid(n, Sector::Even)?;
        let shape = |paired: bool| {
            grid.iter()
                .find(|m| m.paired() == paired)
                .map(|&m| Shape::new(&block_with_fields(params.gamma, 0.0, 0.0, m)))
        };
        let (four, two) = (shape(true), shape(false));
        let blocks = grid
            .par_iter()
            .map(|&m| {
                let pre = block_with_fields(params.gamma, h1, h2, m);
                let post = block_with_fields(params.gamma, g1, g2, m);
                let s = if m.paired() {
                    four.as_ref()
                } else {
                    two.as_ref()
                };
                GaussBlock::new(s.expect("shape of a listed momentum"), &pre, &post)
            })
            .collect();
        Ok(Self { n_sites: n, blocks })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn at_time(&self, t: f64) -> GaussianSlice {
        GaussianSlice {
            blocks: self.blocks.par_iter().map(|b| b.slice(t)).collect(),
        }
    }

    pub fn correlators(&self, beta: f64, t: f64) -> Result<CorrelatorSet> {
        self.at_time(t).evaluate(beta)
    }
}

impl GaussianSlice {
    pub fn evaluate(&self, beta: f64) -> Result<CorrelatorSet> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        let mut p = [ZERO; 6];
        let mut d = Vec::with_capacity(8);
        for blk in &self.blocks {
            d.clear();
            d.extend(blk.kappa.iter().map(|&k| 1.0 - (0.5 * beta * k).tanh()));
            for (slot, &(i, j)) in p.iter_mut().zip(&PAIRS) {
                for (l, &dl) in d.iter().enumerate() {
                    *slot += blk.b[(i, l)] * blk.c[(j, l)] * dl;
                }
            }
        }
        // ⟨x1 x2 x3 x4⟩ by Wick
        let q = p[0] * p[5] - p[1] * p[4] + p[2] * p[3];
        Ok(CorrelatorSet {
            mz_e: -p[0].re,
            mz_o: -p[5].re,
            txx: p[3].re,
            tyy: -p[2].re,
            txy: p[4].im,
            tyx: p[1].im,
            tzz: q.re,
        })
    }
}
