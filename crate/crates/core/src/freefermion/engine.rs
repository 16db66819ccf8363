//! Block-diagonal evaluation of nearest-neighbour correlators.
//!
//! For the pair `(e, o) = (2, 3)` the four Majorana operators
//! `x1 = c_e + c_e†`, `x2 = c_e† − c_e`, `x3 = c_o + c_o†`, `x4 = c_o† − c_o`
//! give
//!
//! ```text
//! σz_e = −x1 x2     σx_e σx_o = x2 x3      σx_e σy_o = −i x2 x4
//! σz_o = −x3 x4     σy_e σy_o = −x1 x4     σy_e σx_o = −i x1 x3
//! σz_e σz_o = x1 x2 x3 x4
//! ```
//!
//! Every `x` is a sum of block-local odd operators, so an expectation in a
//! block-product operator splits into in-block traces. Both the thermal
//! operator `exp(−βH)` and its parity-weighted companion `P exp(−βH)` are
//! block products, which is all the sector projection needs.
//!
//! [`CorrelatorEngine::gaussian`] skips the projection and keeps only the
//! antiperiodic Gaussian state. On long rings at fixed `β` this is the
//! infinite-chain state; the projected ring reaches it only once
//! `N exp(−β Δ)` is large, which at low temperature takes far longer.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{block_with_fields, momentum_grid, CorrelatorSet, FockSpace, Sector};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, ZERO};
use crate::model::{FieldProtocol, ModelParams};

const N_PAIRS: usize = 6;
const N_OPS: usize = N_PAIRS + 1;
/// Ordered Majorana pairs `(x_i, x_j)`, `i < j`.
const PAIRS: [(usize, usize); N_PAIRS] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
/// Two-block splittings of `x1 x2 x3 x4`: (first pair, second pair, sign).
const SPLITS: [(usize, usize, f64); 3] = [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)];

/// Single momentum block, in a basis ordered even-parity states first.
///
/// With `A = V_post† V_pre` and `T_{mm'} = conj(A_{mn}) O_{mm'} A_{m'n}`, the
/// evolved diagonal is `Σ T_{mm'} exp(i (E_m − E_m') t)`. Every `O` is
/// Hermitian or anti-Hermitian, so only `m < m'` is stored.
struct BlockData {
    e_pre: [Vec<f64>; 2],
    e_post: [Vec<f64>; 2],
    /// `Σ_m T_{mm}` per pre-quench state `n`.
    still: [Vec<[C64; N_OPS]>; 2],
    /// `T_{mm'}`, `m < m'`, laid out `[n][op][pair]`.
    moving: [Vec<C64>; 2],
    /// `+1` for Hermitian, `−1` for anti-Hermitian operators.
    sym: [f64; N_OPS],
}

struct SectorBlocks {
    sign: f64,
    blocks: Vec<BlockData>,
}

/// Diagonalized blocks of one parameter point, reusable across temperatures
/// and times.
pub struct CorrelatorEngine {
    n_sites: usize,
    projected: bool,
    sectors: Vec<SectorBlocks>,
}

/// Per-block diagonal data at a fixed time; cheap to evaluate at any `β`.
pub struct TimeSlice {
    projected: bool,
    sectors: Vec<SliceSector>,
}

struct SliceSector {
    sign: f64,
    blocks: Vec<SliceBlock>,
}

struct SliceBlock {
    energies: Vec<f64>,
    parities: Vec<f64>,
    /// `⟨n|U† X_k U|n⟩` over pre-quench eigenstates `n`.
    diag: Vec<[C64; N_OPS]>,
}

impl CorrelatorEngine {
    /// Exact parity-projected thermal state of the finite ring.
    pub fn new(params: &ModelParams, proto: &FieldProtocol) -> Result<Self> {
        Self::build(params, proto, &Sector::BOTH, true)
    }

    /// Unprojected antiperiodic Gaussian state.
    pub fn gaussian(params: &ModelParams, proto: &FieldProtocol) -> Result<Self> {
        Self::build(params, proto, &[Sector::Even], false)
    }

    fn build(
        params: &ModelParams,
        proto: &FieldProtocol,
        which: &[Sector],
        projected: bool,
    ) -> Result<Self> {
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
        let fock4 = FockSpace::new(4);
        let fock2 = FockSpace::new(2);
        let mut sectors = Vec::with_capacity(which.len());
        for &sector in which {
            let grid = momentum_grid(n, sector)?;
            let blocks = grid
                .par_iter()
                .map(|&m| {
                    let pre = block_with_fields(params.gamma, h1, h2, m);
                    let post = block_with_fields(params.gamma, g1, g2, m);
                    let fock = if m.paired() { &fock4 } else { &fock2 };
                    BlockData::new(fock, &pre, &post)
                })
                .collect();
            sectors.push(SectorBlocks {
                sign: sector.sign(),
                blocks,
            });
        }
        Ok(Self {
            n_sites: n,
            projected,
            sectors,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn projected(&self) -> bool {
        self.projected
    }

    pub fn at_time(&self, t: f64) -> TimeSlice {
        let sectors = self
            .sectors
            .iter()
            .map(|s| SliceSector {
                sign: s.sign,
                blocks: s.blocks.par_iter().map(|b| b.slice(t)).collect(),
            })
            .collect();
        TimeSlice {
            projected: self.projected,
            sectors,
        }
    }

    pub fn correlators(&self, beta: f64, t: f64) -> Result<CorrelatorSet> {
        self.at_time(t).evaluate(beta)
    }
}

impl BlockData {
    fn new(fock: &FockSpace, pre: &super::MomentumBlock, post: &super::MomentumBlock) -> Self {
        let dim = fock.dim();
        let half = dim / 2;
        let even: Vec<usize> = (0..dim).filter(|&s| FockSpace::parity(s) > 0.0).collect();
        let odd: Vec<usize> = (0..dim).filter(|&s| FockSpace::parity(s) < 0.0).collect();
        let halves = [even, odd];
        let sub = |m: &DMatrix<C64>, idx: &[usize]| {
            DMatrix::from_fn(half, half, |i, j| m[(idx[i], idx[j])])
        };

        // Majoranas of sites 2 (even) and 3 (odd)
        let mut x = Vec::with_capacity(4);
        for site in [2usize, 3] {
            let c = pre.site_annihilator(fock, site);
            let cd = c.adjoint();
            x.push(&c + &cd);
            x.push(&cd - &c);
        }
        let mut ops: Vec<DMatrix<C64>> = PAIRS.iter().map(|&(i, j)| &x[i] * &x[j]).collect();
        ops.push(&x[0] * &x[1] * &x[2] * &x[3]);

        let h_pre = pre.hamiltonian_on(fock);
        let h_post = post.hamiltonian_on(fock);
        let mut sym = [0.0; N_OPS];
        for (k, op) in ops.iter().enumerate() {
            let adj = op.adjoint();
            sym[k] = if (&adj - op).norm() <= (&adj + op).norm() {
                1.0
            } else {
                -1.0
            };
        }
        let mut e_pre: [Vec<f64>; 2] = Default::default();
        let mut e_post: [Vec<f64>; 2] = Default::default();
        let mut still: [Vec<[C64; N_OPS]>; 2] = Default::default();
        let mut moving: [Vec<C64>; 2] = Default::default();
        for (k, idx) in halves.iter().enumerate() {
            let (ep, vp) = linalg::eigh(&sub(&h_pre, idx));
            let (eq, vq) = linalg::eigh(&sub(&h_post, idx));
            let a = vq.adjoint() * &vp;
            let o: Vec<DMatrix<C64>> = ops
                .iter()
                .map(|op| vq.adjoint() * sub(op, idx) * &vq)
                .collect();
            let mut st = vec![[ZERO; N_OPS]; half];
            let mut mv = Vec::with_capacity(half * N_OPS * half * (half - 1) / 2);
            for n in 0..half {
                for (op_idx, om) in o.iter().enumerate() {
                    for m in 0..half {
                        st[n][op_idx] += a[(m, n)].conj() * om[(m, m)] * a[(m, n)];
                        for q in m + 1..half {
                            mv.push(a[(m, n)].conj() * om[(m, q)] * a[(q, n)]);
                        }
                    }
                }
            }
            e_pre[k] = ep;
            e_post[k] = eq;
            still[k] = st;
            moving[k] = mv;
        }
        Self {
            e_pre,
            e_post,
            still,
            moving,
            sym,
        }
    }

    fn slice(&self, t: f64) -> SliceBlock {
        let half = self.e_pre[0].len();
        let mut energies = Vec::with_capacity(2 * half);
        let mut parities = Vec::with_capacity(2 * half);
        let mut diag = Vec::with_capacity(2 * half);
        let mut phase = Vec::with_capacity(half * (half - 1) / 2);
        for k in 0..2 {
            energies.extend_from_slice(&self.e_pre[k]);
            parities.extend(std::iter::repeat(if k == 0 { 1.0 } else { -1.0 }).take(half));
            let ph: Vec<C64> = self.e_post[k]
                .iter()
                .map(|&e| C64::from_polar(1.0, -e * t))
                .collect();
            phase.clear();
            for m in 0..half {
                for q in m + 1..half {
                    phase.push(ph[m].conj() * ph[q]);
                }
            }
            let mut terms = self.moving[k].chunks_exact(phase.len().max(1));
            for n in 0..half {
                let mut d = self.still[k][n];
                for (op_idx, slot) in d.iter_mut().enumerate() {
                    if phase.is_empty() {
                        continue;
                    }
                    let tm: &[f64] = bytemuck::cast_slice(terms.next().unwrap());
                    let pm: &[f64] = bytemuck::cast_slice(&phase);
                    // pair (m, m') plus its mirror (m', m): 2 Re or 2i Im of Σ T P
                    *slot += if self.sym[op_idx] > 0.0 {
                        C64::new(2.0 * dot_re(tm, pm), 0.0)
                    } else {
                        C64::new(0.0, 2.0 * dot_im(tm, pm))
                    };
                }
                diag.push(d);
            }
        }
        SliceBlock {
            energies,
            parities,
            diag,
        }
    }
}

/// `Re Σ a b` over interleaved complex slices.
#[inline]
fn dot_re(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] -= x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] -= x[3] * y[3];
    }
    for (x, y) in ca
        .remainder()
        .chunks_exact(2)
        .zip(cb.remainder().chunks_exact(2))
    {
        acc[0] += x[0] * y[0] - x[1] * y[1];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// `Im Σ a b` over interleaved complex slices.
#[inline]
fn dot_im(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[1];
        acc[1] += x[1] * y[0];
        acc[2] += x[2] * y[3];
        acc[3] += x[3] * y[2];
    }
    for (x, y) in ca
        .remainder()
        .chunks_exact(2)
        .zip(cb.remainder().chunks_exact(2))
    {
        acc[0] += x[0] * y[1] + x[1] * y[0];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Running contraction of block-local traces.
///
/// Tracks, for a product operator `Π_b G_b` with per-block weight `w_b`
/// (normalized trace) and normalized pair traces `f_b`,
/// the full trace of `1`, of each Majorana pair, and of `x1 x2 x3 x4`.
struct Contraction {
    norm: C64,
    pairs: [C64; N_PAIRS],
    quartic: C64,
}

impl Contraction {
    fn new() -> Self {
        Self {
            norm: ONE,
            pairs: [ZERO; N_PAIRS],
            quartic: ZERO,
        }
    }

    fn push(&mut self, w: C64, f: &[C64; N_OPS]) {
        let mut cross = ZERO;
        for &(p, q, sign) in &SPLITS {
            cross += (self.pairs[p] * f[q] + f[p] * self.pairs[q]) * sign;
        }
        self.quartic = self.quartic * w + self.norm * f[N_PAIRS] + cross;
        for k in 0..N_PAIRS {
            self.pairs[k] = self.pairs[k] * w + self.norm * f[k];
        }
        self.norm *= w;
    }
}

impl TimeSlice {
    pub fn evaluate(&self, beta: f64) -> Result<CorrelatorSet> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        // per sector: log of Π_b Tr exp(−β H_b), the plain and parity-weighted contractions
        let mut parts = Vec::with_capacity(2);
        for sector in &self.sectors {
            let mut log_z = 0.0;
            let mut plain = Contraction::new();
            let mut parity = Contraction::new();
            for b in &sector.blocks {
                let e0 = b.energies.iter().copied().fold(f64::INFINITY, f64::min);
                let mut z = 0.0;
                let mut r = 0.0;
                let mut f = [ZERO; N_OPS];
                let mut q = [ZERO; N_OPS];
                for (n, &e) in b.energies.iter().enumerate() {
                    let w = (-beta * (e - e0)).exp();
                    let pw = w * b.parities[n];
                    z += w;
                    r += pw;
                    for k in 0..N_OPS {
                        f[k] += b.diag[n][k] * w;
                        q[k] += b.diag[n][k] * pw;
                    }
                }
                log_z += -beta * e0 + z.ln();
                for k in 0..N_OPS {
                    f[k] /= z;
                    q[k] /= z;
                }
                plain.push(ONE, &f);
                parity.push(C64::new(r / z, 0.0), &q);
            }
            parts.push((sector.sign, log_z, plain, parity));
        }
        let log_max = parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let mut denom = ZERO;
        let mut pairs = [ZERO; N_PAIRS];
        let mut quartic = ZERO;
        for (sign, log_z, plain, parity) in &parts {
            let w = (log_z - log_max).exp();
            let s = if self.projected { *sign } else { 0.0 };
            denom += (plain.norm + parity.norm * s) * w;
            for k in 0..N_PAIRS {
                pairs[k] += (plain.pairs[k] + parity.pairs[k] * s) * w;
            }
            quartic += (plain.quartic + parity.quartic * s) * w;
        }
        let e = |z: C64| z / denom;
        let p: Vec<C64> = pairs.iter().map(|&z| e(z)).collect();
        let q = e(quartic);
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
