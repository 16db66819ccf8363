//! Fixed-step RK4 on the symmetry blocks of the density matrix.
//!
//! The ring Hamiltonian and every door channel map the `P = ±1` diagonal
//! blocks into themselves (the door channel swaps them), so the state is
//! kept as dense blocks of half the full dimension. When the Hamiltonian,
//! the doors and the initial state are also invariant under the reflection
//! `i ↔ N + 2 − i` (which fixes site 1), each parity block splits again
//! into even and odd reflection sectors.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{door_superoperator, preserves_parity_blocks, BathSpec, LadderChoice};
use crate::ed::{reduce_pair, site_mask, DenseState, SparseHamiltonian};
use crate::entanglement::log_negativity;
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ZERO};
use crate::rdm::TwoSiteState;

/// Step and observation settings. Integrity checks apply to the ladder
/// choice only; the literal one is not positivity preserving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorSettings {
    pub dt: f64,
    pub t_final: f64,
    pub observe_every: f64,
    pub pairs: Vec<(usize, usize)>,
    pub trace_tol: f64,
    pub min_eig_tol: f64,
    /// Skip the per-observation eigensolve (min_eig is then reported as NaN).
    pub skip_spectrum: bool,
    /// Use reflection sectors when the problem allows it.
    pub reflection: bool,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 10.0,
            observe_every: 0.05,
            pairs: vec![(1, 2), (2, 3)],
            trace_tol: 1e-8,
            min_eig_tol: 1e-7,
            skip_spectrum: false,
            reflection: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub t: f64,
    /// Log-negativity per requested pair, in order.
    pub ln: Vec<f64>,
    pub trace_err: f64,
    pub hermiticity_err: f64,
    pub min_eig: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub pairs: Vec<(usize, usize)>,
    pub observations: Vec<Observation>,
    pub final_state: DenseState,
    /// Whether the reflection sectors were used.
    pub reflected: bool,
}

impl Trajectory {
    pub fn series(&self, pair: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.observations.iter().map(move |o| (o.t, o.ln[pair]))
    }

    pub fn max_ln(&self, pair: usize) -> f64 {
        self.series(pair).map(|(_, l)| l).fold(0.0, f64::max)
    }
}

/// Image of `site` under `i ↔ N + 2 − i` on the ring.
fn reflect_site(n: usize, site: usize) -> usize {
    (n + 1 - site) % n + 1
}

fn reflect_state(n: usize, s: usize) -> usize {
    (1..=n)
        .filter(|&i| s & site_mask(n, i) != 0)
        .fold(0, |acc, i| acc | site_mask(n, reflect_site(n, i)))
}

/// Orthonormal real basis grouped into sectors; sector `q` and `q ^ 1`
/// differ only in parity.
struct Sectors {
    n_sites: usize,
    /// `(state, coefficient)` terms of every basis vector, per sector.
    vecs: Vec<Vec<Vec<(usize, f64)>>>,
    /// `(sector, position, coefficient)` components of every product state.
    expand: Vec<Vec<(usize, usize, f64)>>,
}

impl Sectors {
    fn parity(n: usize) -> Self {
        let mut vecs = vec![vec![]; 2];
        for s in 0..1usize << n {
            vecs[(s.count_ones() % 2) as usize].push(vec![(s, 1.0)]);
        }
        Self::from_vecs(n, vecs)
    }

    /// Sector `2 r + p`: parity `p`, reflection sign `(−1)^r`.
    fn reflected(n: usize) -> Self {
        let mut vecs = vec![vec![]; 4];
        let w = std::f64::consts::FRAC_1_SQRT_2;
        for s in 0..1usize << n {
            let p = (s.count_ones() % 2) as usize;
            let rs = reflect_state(n, s);
            if rs == s {
                vecs[p].push(vec![(s, 1.0)]);
            } else if rs > s {
                vecs[p].push(vec![(s, w), (rs, w)]);
                vecs[2 + p].push(vec![(s, w), (rs, -w)]);
            }
        }
        Self::from_vecs(n, vecs)
    }

    fn from_vecs(n: usize, vecs: Vec<Vec<Vec<(usize, f64)>>>) -> Self {
        let mut expand = vec![vec![]; 1 << n];
        for (q, sector) in vecs.iter().enumerate() {
            for (a, terms) in sector.iter().enumerate() {
                for &(s, c) in terms {
                    expand[s].push((q, a, c));
                }
            }
        }
        Self {
            n_sites: n,
            vecs,
            expand,
        }
    }

    fn dim(&self) -> usize {
        1 << self.n_sites
    }

    fn zeros(&self) -> Vec<Block> {
        self.vecs.iter().map(|v| Block::zeros(v.len())).collect()
    }

    /// Components of `Σ_m c_m |f(s_m)⟩` for basis vector `a` of sector `q`.
    fn image(
        &self,
        q: usize,
        a: usize,
        f: impl Fn(usize) -> Vec<(usize, f64)>,
    ) -> Vec<(usize, usize, f64)> {
        let mut acc: Vec<(usize, usize, f64)> = vec![];
        for &(s, c) in &self.vecs[q][a] {
            for (t, v) in f(s) {
                for &(q2, b, d) in &self.expand[t] {
                    acc.push((q2, b, c * v * d));
                }
            }
        }
        acc.sort_by_key(|&(q2, b, _)| (q2, b));
        let mut out: Vec<(usize, usize, f64)> = vec![];
        for (q2, b, v) in acc {
            match out.last_mut() {
                Some(last) if last.0 == q2 && last.1 == b => last.2 += v,
                _ => out.push((q2, b, v)),
            }
        }
        out.retain(|e| e.2.abs() > 1e-14);
        out
    }

    fn split(&self, rho: &DenseState) -> Result<Vec<Block>> {
        let m = rho.matrix();
        let blocks: Vec<Block> = self
            .vecs
            .iter()
            .map(|sector| {
                let n = sector.len();
                let mut b = Block::zeros(n);
                for (i, ti) in sector.iter().enumerate() {
                    for (j, tj) in sector.iter().enumerate() {
                        let mut v = ZERO;
                        for &(r, cr) in ti {
                            for &(c, cc) in tj {
                                v += m[(r, c)] * (cr * cc);
                            }
                        }
                        b.data[i * n + j] = v;
                    }
                }
                b
            })
            .collect();
        let leak = (self.merge_matrix(&blocks) - m).camax();
        if leak > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "initial state couples the Π σz sectors (max {leak:e}); open dynamics needs a parity-diagonal state"
            )));
        }
        Ok(blocks)
    }

    fn merge_matrix(&self, x: &[Block]) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::from_element(d, d, ZERO);
        for (sector, b) in self.vecs.iter().zip(x) {
            let n = b.n;
            for (i, ti) in sector.iter().enumerate() {
                for (j, tj) in sector.iter().enumerate() {
                    let v = b.data[i * n + j];
                    for &(r, cr) in ti {
                        for &(c, cc) in tj {
                            m[(r, c)] += v * (cr * cc);
                        }
                    }
                }
            }
        }
        m
    }

    fn merge(&self, x: &[Block]) -> DenseState {
        DenseState::from_matrix(self.n_sites, self.merge_matrix(x))
            .expect("dimension fixed by basis")
    }
}

/// Every ingredient maps to itself under the reflection.
fn reflection_applies(rho0: &DenseState, h: &SparseHamiltonian, bath: &BathSpec) -> bool {
    let n = rho0.n_sites();
    if n < 4 || bath.doors.iter().any(|&d| reflect_site(n, d) != d) {
        return false;
    }
    let r: Vec<usize> = (0..rho0.dim()).map(|s| reflect_state(n, s)).collect();
    let sorted_row = |s: usize, map: &dyn Fn(usize) -> usize| {
        let mut row: Vec<(usize, f64)> = h.row(s).map(|(c, v)| (map(c), v)).collect();
        row.sort_by_key(|e| e.0);
        row
    };
    for s in 0..rho0.dim() {
        if (h.diag()[s] - h.diag()[r[s]]).abs() > 1e-13 {
            return false;
        }
        let a = sorted_row(s, &|c| r[c]);
        let b = sorted_row(r[s], &|c| c);
        if a.len() != b.len()
            || a.iter()
                .zip(&b)
                .any(|(x, y)| x.0 != y.0 || (x.1 - y.1).abs() > 1e-13)
        {
            return false;
        }
    }
    let m = rho0.matrix();
    (0..rho0.dim()).all(|i| (0..rho0.dim()).all(|j| (m[(i, j)] - m[(r[i], r[j])]).norm() <= 1e-12))
}

/// Row-major square block.
#[derive(Clone)]
struct Block {
    n: usize,
    data: Vec<C64>,
}

impl Block {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }
}

struct BlockOperator {
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// One door channel restricted to sector `q → q`, with sources in `q ^ 1`.
struct DoorBlock {
    /// Door bit of each basis vector.
    bit: Vec<u8>,
    /// Position and sign of the door-flipped vector in sector `q ^ 1`.
    flip: Vec<usize>,
    sign: Vec<f64>,
    /// Superoperator weights per row bit, indexed by column.
    own: [Vec<C64>; 2],
    other: [Vec<C64>; 2],
    other_active: [bool; 2],
}

struct Generator {
    h: Vec<BlockOperator>,
    doors: Vec<Vec<DoorBlock>>,
    hermitian: bool,
}

impl Generator {
    fn new(
        h: &SparseHamiltonian,
        sectors: &Sectors,
        bath: &BathSpec,
        choice: LadderChoice,
    ) -> Result<Self> {
        let mut ops = Vec::with_capacity(sectors.vecs.len());
        for (q, sector) in sectors.vecs.iter().enumerate() {
            let mut op = BlockOperator {
                diag: vec![0.0; sector.len()],
                row_ptr: vec![0],
                cols: vec![],
                vals: vec![],
            };
            for a in 0..sector.len() {
                let image = sectors.image(q, a, |s| {
                    let mut row: Vec<(usize, f64)> = h.row(s).collect();
                    row.push((s, h.diag()[s]));
                    row
                });
                for (q2, b, v) in image {
                    if q2 != q {
                        if v.abs() > 1e-12 {
                            return Err(Error::InvalidParams(
                                "Hamiltonian mixes the symmetry sectors".into(),
                            ));
                        }
                    } else if b == a {
                        op.diag[a] = v;
                    } else {
                        op.cols.push(b);
                        op.vals.push(v);
                    }
                }
                op.row_ptr.push(op.cols.len());
            }
            ops.push(op);
        }
        let s = door_superoperator(bath, choice);
        if !preserves_parity_blocks(&s) {
            return Err(Error::InvalidBath(
                "door channel mixes parity blocks".into(),
            ));
        }
        let n = sectors.n_sites;
        let mut doors = Vec::with_capacity(bath.doors.len());
        for &d in &bath.doors {
            let mask = site_mask(n, d);
            let mut per_sector = Vec::with_capacity(sectors.vecs.len());
            for (q, sector) in sectors.vecs.iter().enumerate() {
                let m = sector.len();
                let mut bit = Vec::with_capacity(m);
                let mut flip = Vec::with_capacity(m);
                let mut sign = Vec::with_capacity(m);
                for a in 0..m {
                    let b0 = sector[a][0].0 & mask != 0;
                    if sector[a].iter().any(|&(st, _)| (st & mask != 0) != b0) {
                        return Err(Error::InvalidBath(format!(
                            "door {d} is not fixed by the sector symmetry"
                        )));
                    }
                    let image = sectors.image(q, a, |st| vec![(st ^ mask, 1.0)]);
                    match image.as_slice() {
                        [(q2, b, v)] if *q2 == q ^ 1 && (v.abs() - 1.0).abs() < 1e-12 => {
                            flip.push(*b);
                            sign.push(v.signum());
                        }
                        _ => {
                            return Err(Error::InvalidBath(format!(
                                "door {d} is not fixed by the sector symmetry"
                            )))
                        }
                    }
                    bit.push(u8::from(b0));
                }
                let weights = |f: &dyn Fn(usize, usize) -> C64| {
                    [0, 1].map(|xb| (0..m).map(|c| f(xb, c)).collect::<Vec<C64>>())
                };
                let own = weights(&|xb, c| {
                    let yb = bit[c] as usize;
                    s[2 * xb + yb][2 * xb + yb]
                });
                let other = weights(&|xb, c| {
                    let yb = bit[c] as usize;
                    s[2 * xb + yb][2 * (1 - xb) + (1 - yb)] * sign[c]
                });
                let other_active = [0, 1].map(|xb| other[xb].iter().any(|&v| v != ZERO));
                per_sector.push(DoorBlock {
                    bit,
                    flip,
                    sign,
                    own,
                    other,
                    other_active,
                });
            }
            doors.push(per_sector);
        }
        Ok(Self {
            h: ops,
            doors,
            hermitian: choice == LadderChoice::Ladder,
        })
    }

    /// `y = H_q x` as row axpys over the interleaved real/imaginary parts.
    #[inline(always)]
    fn apply_h(&self, q: usize, x: &Block, y: &mut Block) {
        let op = &self.h[q];
        let w = 2 * x.n;
        if w == 0 {
            return;
        }
        let xs: &[f64] = bytemuck::cast_slice(&x.data);
        let ys: &mut [f64] = bytemuck::cast_slice_mut(&mut y.data);
        for (r, out) in ys.chunks_exact_mut(w).enumerate() {
            let d = op.diag[r];
            for (o, &v) in out.iter_mut().zip(&xs[r * w..(r + 1) * w]) {
                *o = v * d;
            }
            for e in op.row_ptr[r]..op.row_ptr[r + 1] {
                let (j, a) = (op.cols[e], op.vals[e]);
                for (o, &v) in out.iter_mut().zip(&xs[j * w..(j + 1) * w]) {
                    *o += v * a;
                }
            }
        }
    }

    /// `out = L(x)`, using `scratch` for intermediate products.
    #[inline(always)]
    fn eval(&self, x: &[Block], out: &mut [Block], scratch: &mut [Block], extra: &mut [Block]) {
        for q in 0..x.len() {
            self.apply_h(q, &x[q], &mut scratch[q]);
            if self.hermitian {
                // −i (Hρ − (Hρ)†)
                commutator(&scratch[q], &scratch[q], &mut out[q]);
            } else {
                // −i (Hρ − (Hρ†)†)
                adjoint_into(&x[q], &mut out[q]);
                self.apply_h(q, &out[q], &mut extra[q]);
                commutator(&scratch[q], &extra[q], &mut out[q]);
            }
        }
        for door in &self.doors {
            for (q, db) in door.iter().enumerate() {
                let n = x[q].n;
                let own = &x[q].data;
                let other = &x[q ^ 1].data;
                let o = &mut out[q].data;
                for r in 0..n {
                    let xb = db.bit[r] as usize;
                    let orow = &mut o[r * n..(r + 1) * n];
                    for ((v, &w), &src) in orow
                        .iter_mut()
                        .zip(&db.own[xb])
                        .zip(&own[r * n..(r + 1) * n])
                    {
                        *v += w * src;
                    }
                    if db.other_active[xb] {
                        let fr = db.flip[r];
                        let sr = db.sign[r];
                        let oth_row = &other[fr * n..(fr + 1) * n];
                        for ((v, &w), &fc) in orow.iter_mut().zip(&db.other[xb]).zip(&db.flip) {
                            *v += (w * oth_row[fc]) * sr;
                        }
                    }
                }
            }
        }
    }
}

const TILE: usize = 32;

/// `out = −i (a − b†)`, tiled for the transposed reads.
#[inline(always)]
fn commutator(a: &Block, b: &Block, out: &mut Block) {
    let n = a.n;
    let mi = C64::new(0.0, -1.0);
    for rb in (0..n).step_by(TILE) {
        for cb in (0..n).step_by(TILE) {
            for r in rb..(rb + TILE).min(n) {
                for c in cb..(cb + TILE).min(n) {
                    out.data[r * n + c] = (a.data[r * n + c] - b.data[c * n + r].conj()) * mi;
                }
            }
        }
    }
}

#[inline(always)]
fn adjoint_into(a: &Block, out: &mut Block) {
    let n = a.n;
    for rb in (0..n).step_by(TILE) {
        for cb in (0..n).step_by(TILE) {
            for r in rb..(rb + TILE).min(n) {
                for c in cb..(cb + TILE).min(n) {
                    out.data[r * n + c] = a.data[c * n + r].conj();
                }
            }
        }
    }
}

fn to_matrix(b: &Block) -> DMatrix<C64> {
    DMatrix::from_fn(b.n, b.n, |r, c| b.data[r * b.n + c])
}

fn observe(t: f64, x: &[Block], sectors: &Sectors, settings: &IntegratorSettings) -> Observation {
    let mut tr = ZERO;
    let mut herm: f64 = 0.0;
    for b in x {
        let n = b.n;
        for r in 0..n {
            tr += b.data[r * n + r];
            for c in r..n {
                herm = herm.max((b.data[r * n + c] - b.data[c * n + r].conj()).norm());
            }
        }
    }
    let min_eig = if settings.skip_spectrum {
        f64::NAN
    } else {
        x.iter()
            .filter(|b| b.n > 0)
            .map(|b| linalg::eigvalsh(&to_matrix(b))[0])
            .fold(f64::INFINITY, f64::min)
    };
    let full = if settings.pairs.is_empty() {
        None
    } else {
        Some(sectors.merge(x))
    };
    let ln = settings
        .pairs
        .iter()
        .map(|&(i, j)| {
            let s = reduce_pair(
                full.as_ref().expect("merged when pairs are requested"),
                i,
                j,
            )
            .expect("pairs validated");
            log_negativity(
                &TwoSiteState::from_matrix(linalg::hermitian_part(s.matrix())).expect("4x4"),
            )
        })
        .collect();
    Observation {
        t,
        ln,
        trace_err: (tr - C64::new(1.0, 0.0)).norm(),
        hermiticity_err: herm,
        min_eig,
    }
}

struct Rk4Work {
    k: [Vec<Block>; 4],
    tmp: Vec<Block>,
    scratch: Vec<Block>,
    extra: Vec<Block>,
}

impl Rk4Work {
    fn new(sectors: &Sectors) -> Self {
        Self {
            k: [
                sectors.zeros(),
                sectors.zeros(),
                sectors.zeros(),
                sectors.zeros(),
            ],
            tmp: sectors.zeros(),
            scratch: sectors.zeros(),
            extra: sectors.zeros(),
        }
    }
}

#[inline(always)]
fn rk4_steps(gen: &Generator, x: &mut [Block], w: &mut Rk4Work, dt: f64, count: usize) {
    #[inline(always)]
    fn axpy(out: &mut [Block], base: &[Block], a: f64, d: &[Block]) {
        for q in 0..out.len() {
            let o: &mut [f64] = bytemuck::cast_slice_mut(&mut out[q].data);
            let b: &[f64] = bytemuck::cast_slice(&base[q].data);
            let v: &[f64] = bytemuck::cast_slice(&d[q].data);
            for ((o, &b), &v) in o.iter_mut().zip(b).zip(v) {
                *o = b + v * a;
            }
        }
    }
    for _ in 0..count {
        let [k1, k2, k3, k4] = &mut w.k;
        gen.eval(x, k1, &mut w.scratch, &mut w.extra);
        axpy(&mut w.tmp, x, dt / 2.0, k1);
        gen.eval(&w.tmp, k2, &mut w.scratch, &mut w.extra);
        axpy(&mut w.tmp, x, dt / 2.0, k2);
        gen.eval(&w.tmp, k3, &mut w.scratch, &mut w.extra);
        axpy(&mut w.tmp, x, dt, k3);
        gen.eval(&w.tmp, k4, &mut w.scratch, &mut w.extra);
        let c = dt / 6.0;
        for q in 0..x.len() {
            let xs: &mut [f64] = bytemuck::cast_slice_mut(&mut x[q].data);
            let a: &[f64] = bytemuck::cast_slice(&k1[q].data);
            let b: &[f64] = bytemuck::cast_slice(&k2[q].data);
            let d: &[f64] = bytemuck::cast_slice(&k3[q].data);
            let e: &[f64] = bytemuck::cast_slice(&k4[q].data);
            for i in 0..xs.len() {
                xs[i] += (a[i] + (b[i] + d[i]) * 2.0 + e[i]) * c;
            }
        }
    }
}

/// Wider vector registers where available. Rust never contracts `a * b + c`
/// into a fused multiply-add, so both paths give identical results.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
fn rk4_steps_avx2(gen: &Generator, x: &mut [Block], w: &mut Rk4Work, dt: f64, count: usize) {
    rk4_steps(gen, x, w, dt, count)
}

fn advance(gen: &Generator, x: &mut [Block], w: &mut Rk4Work, dt: f64, count: usize) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the required CPU feature was detected at runtime.
        unsafe { rk4_steps_avx2(gen, x, w, dt, count) };
        return;
    }
    rk4_steps(gen, x, w, dt, count)
}

/// Integrates `dρ/dt = −i[H, ρ] + D(ρ)` from `rho0` at `t = 0`.
///
/// Observations are taken at multiples of `observe_every` (rounded to whole
/// steps) and at `t_final`. With the ladder choice, a trace error above
/// `trace_tol` or an eigenvalue below `−min_eig_tol` aborts with
/// [`Error::Integrity`].
pub fn integrate(
    rho0: &DenseState,
    h: &SparseHamiltonian,
    bath: &BathSpec,
    choice: LadderChoice,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    let n = rho0.n_sites();
    if h.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho0.dim(),
        });
    }
    bath.validate(n)?;
    if !(settings.dt > 0.0) || !(settings.t_final >= 0.0) || !(settings.observe_every > 0.0) {
        return Err(Error::InvalidParams(
            "dt and observe_every must be positive, t_final non-negative".into(),
        ));
    }
    for &(i, j) in &settings.pairs {
        for site in [i, j] {
            if site == 0 || site > n {
                return Err(Error::SiteOutOfRange { site, n });
            }
        }
        if i == j {
            return Err(Error::InvalidParams(format!(
                "pair ({i}, {j}) repeats a site"
            )));
        }
    }
    let reflected = settings.reflection && reflection_applies(rho0, h, bath);
    let sectors = if reflected {
        Sectors::reflected(n)
    } else {
        Sectors::parity(n)
    };
    let gen = Generator::new(h, &sectors, bath, choice)?;
    let steps = (settings.t_final / settings.dt).round() as usize;
    let stride = ((settings.observe_every / settings.dt).round() as usize).max(1);
    let dt = settings.dt;
    let check = choice == LadderChoice::Ladder;

    let mut x = sectors.split(rho0)?;
    let mut work = Rk4Work::new(&sectors);
    let mut observations = Vec::with_capacity(steps / stride + 2);

    let mut record = |step: usize, x: &[Block]| -> Result<()> {
        let t = step as f64 * dt;
        let o = observe(t, x, &sectors, settings);
        let bad_trace = !(o.trace_err <= settings.trace_tol);
        let bad_eig = o.min_eig < -settings.min_eig_tol;
        observations.push(o);
        if check && (bad_trace || bad_eig) {
            let o = observations.last().unwrap();
            return Err(Error::Integrity {
                t,
                trace_err: o.trace_err,
                min_eig: o.min_eig,
            });
        }
        Ok(())
    };
    record(0, &x)?;
    let mut step = 0;
    while step < steps {
        let next = (step + stride - step % stride).min(steps);
        advance(&gen, &mut x, &mut work, dt, next - step);
        step = next;
        record(step, &x)?;
    }
    let final_state = sectors.merge(&x);
    Ok(Trajectory {
        pairs: settings.pairs.clone(),
        observations,
        final_state,
        reflected,
    })
}
