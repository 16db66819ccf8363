//! Exact diagonalization of finite rings.
//!
//! Basis: site 1 is the most significant bit, bit value 0 is `|↑⟩`
//! (`σz = +1`). The Hamiltonian is real and conserves `P = Π σz`, so the
//! spectral decomposition is done per parity half.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ZERO};
use crate::model::{ModelParams, J};
use crate::rdm::TwoSiteState;

pub const MIN_SITES: usize = 4;
pub const MAX_SITES: usize = 14;

/// Bit mask of a 1-based site.
#[inline]
pub fn site_mask(n_sites: usize, site: usize) -> usize {
    1 << (n_sites - site)
}

/// Basis states of each parity half, even popcount (`P = +1`) first.
#[derive(Debug, Clone)]
pub struct ParityBasis {
    pub n_sites: usize,
    pub states: [Vec<usize>; 2],
    /// `(half, position)` of every basis state.
    pub index: Vec<(usize, usize)>,
}

impl ParityBasis {
    pub fn new(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut states: [Vec<usize>; 2] =
            [Vec::with_capacity(dim / 2), Vec::with_capacity(dim / 2)];
        let mut index = vec![(0, 0); dim];
        for s in 0..dim {
            let k = (s.count_ones() % 2) as usize;
            index[s] = (k, states[k].len());
            states[k].push(s);
        }
        Self {
            n_sites,
            states,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }
}

/// Real symmetric Hamiltonian in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    n_sites: usize,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseHamiltonian {
    /// Any real symmetric matrix on `n_sites` qubits that conserves `Π σz`.
    pub fn from_dense(n_sites: usize, m: &DMatrix<f64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
        let mut diag = Vec::with_capacity(dim);
        let mut row_ptr = vec![0];
        let (mut cols, mut vals) = (vec![], vec![]);
        for r in 0..dim {
            diag.push(m[(r, r)]);
            for c in 0..dim {
                let v = m[(r, c)];
                if c == r || v == 0.0 {
                    continue;
                }
                if v != m[(c, r)] {
                    return Err(Error::InvalidParams(
                        "Hamiltonian matrix is not symmetric".into(),
                    ));
                }
                if (r ^ c).count_ones() % 2 != 0 {
                    return Err(Error::InvalidParams(
                        "Hamiltonian does not conserve parity".into(),
                    ));
                }
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            n_sites,
            diag,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn zero(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        Self {
            n_sites,
            diag: vec![0.0; dim],
            row_ptr: vec![0; dim + 1],
            cols: vec![],
            vals: vec![],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries `(col, value)` of a row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.vals.len() + self.diag.iter().filter(|&&d| d != 0.0).count()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..d {
            m[(r, r)] = self.diag[r];
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// Dense block of one parity half.
    pub fn parity_block(&self, basis: &ParityBasis, half: usize) -> DMatrix<f64> {
        let states = &basis.states[half];
        let mut m = DMatrix::zeros(states.len(), states.len());
        for (i, &s) in states.iter().enumerate() {
            m[(i, i)] = self.diag[s];
            for (c, v) in self.row(s) {
                let (k, j) = basis.index[c];
                debug_assert_eq!(k, half);
                m[(i, j)] += v;
            }
        }
        m
    }

    /// `H v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim())
            .map(|r| {
                let mut acc = v[r] * self.diag[r];
                for (c, x) in self.row(r) {
                    acc += v[c] * x;
                }
                acc
            })
            .collect()
    }

    /// `Tr(H ρ)`.
    pub fn expectation(&self, rho: &DenseState) -> f64 {
        let m = rho.matrix();
        let mut acc = ZERO;
        for r in 0..self.dim() {
            acc += m[(r, r)] * self.diag[r];
            for (c, x) in self.row(r) {
                acc += m[(c, r)] * x;
            }
        }
        acc.re
    }
}

/// `H = J/4 Σ [(1+γ) σx σx + (1−γ) σy σy] + 1/2 Σ h_i σz_i`, periodic, with
/// `h_i = h1 + (−1)^i h2`.
pub fn build_hamiltonian(p: &ModelParams, fields: (f64, f64)) -> Result<SparseHamiltonian> {
    let n = p.n_sites;
    if n % 2 != 0 {
        return Err(Error::OddSize(n));
    }
    if !(MIN_SITES..=MAX_SITES).contains(&n) {
        return Err(Error::SizeOutOfRange {
            n,
            min: MIN_SITES,
            max: MAX_SITES,
        });
    }
    let (h1, h2) = fields;
    let dim = 1usize << n;
    let h: Vec<f64> = (1..=n)
        .map(|i| h1 + if i % 2 == 0 { h2 } else { -h2 })
        .collect();
    // σx σx + σy σy flips an anti-aligned pair with amplitude 2; σx σx − σy σy
    // flips an aligned pair with amplitude 2.
    let flip_same = J * p.gamma / 2.0;
    let flip_diff = J / 2.0;
    let mut diag = vec![0.0; dim];
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(dim * n);
    let mut vals = Vec::with_capacity(dim * n);
    row_ptr.push(0);
    for s in 0..dim {
        for i in 1..=n {
            let up = s & site_mask(n, i) == 0;
            diag[s] += 0.5 * h[i - 1] * if up { 1.0 } else { -1.0 };
        }
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(n);
        for i in 1..=n {
            let j = i % n + 1;
            let (mi, mj) = (site_mask(n, i), site_mask(n, j));
            let same = ((s & mi) == 0) == ((s & mj) == 0);
            let amp = if same { flip_same } else { flip_diff };
            if amp != 0.0 {
                row.push((s ^ mi ^ mj, amp));
            }
        }
        row.sort_by_key(|e| e.0);
        for (c, v) in row {
            match cols.last() {
                Some(&last) if cols.len() > row_ptr[s] && last == c => {
                    *vals.last_mut().unwrap() += v
                }
                _ => {
                    cols.push(c);
                    vals.push(v);
                }
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseHamiltonian {
        n_sites: n,
        diag,
        row_ptr,
        cols,
        vals,
    })
}

/// Density operator of the full ring.
#[derive(Debug, Clone)]
pub struct DenseState {
    n_sites: usize,
    rho: DMatrix<C64>,
}

/// Numerical health of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateCheck {
    pub trace_err: f64,
    pub hermiticity_err: f64,
    pub min_eig: f64,
}

impl DenseState {
    pub fn from_matrix(n_sites: usize, rho: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.nrows(),
            });
        }
        Ok(Self { n_sites, rho })
    }

    pub fn from_pure(n_sites: usize, psi: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm_squared();
        Self::from_matrix(n_sites, &v * v.adjoint() / C64::new(norm, 0.0))
    }

    /// Product state from per-site bits (0 = ↑), site 1 first.
    pub fn product(bits: &[u8]) -> Self {
        let n = bits.len();
        let s = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut rho = DMatrix::from_element(1 << n, 1 << n, ZERO);
        rho[(s, s)] = C64::new(1.0, 0.0);
        Self { n_sites: n, rho }
    }

    pub fn maximally_mixed(n_sites: usize) -> Self {
        let d = 1usize << n_sites;
        Self {
            n_sites,
            rho: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.rho
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.rho)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.rho)
    }

    pub fn check(&self) -> StateCheck {
        StateCheck {
            trace_err: (self.trace() - C64::new(1.0, 0.0)).norm(),
            hermiticity_err: linalg::hermiticity_error(&self.rho),
            min_eig: self.eigenvalues()[0],
        }
    }
}

struct HalfSpectrum {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// Spectral decomposition of a Hamiltonian, per parity half.
pub struct Spectrum {
    basis: ParityBasis,
    halves: [HalfSpectrum; 2],
}

impl Spectrum {
    pub fn new(h: &SparseHamiltonian) -> Self {
        let basis = ParityBasis::new(h.n_sites());
        let halves = [0, 1].map(|k| {
            let (energies, vectors) = linalg::eigh_real(&h.parity_block(&basis, k));
            HalfSpectrum { energies, vectors }
        });
        Self { basis, halves }
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .halves
            .iter()
            .flat_map(|h| h.energies.iter().copied())
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn ground_energy(&self) -> f64 {
        self.halves
            .iter()
            .map(|h| h.energies[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `exp(−β H) / Z`, shifted by the ground energy.
    pub fn thermal_state(&self, beta: f64) -> Result<DenseState> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        let e0 = self.ground_energy();
        let weights: [Vec<f64>; 2] = [0, 1].map(|k| {
            self.halves[k]
                .energies
                .iter()
                .map(|&e| (-beta * (e - e0)).exp())
                .collect()
        });
        let z: f64 = weights.iter().flatten().sum();
        let dim = self.basis.dim();
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        for k in 0..2 {
            let v = &self.halves[k].vectors;
            let scaled =
                DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * weights[k][j] / z);
            let block = scaled * v.transpose();
            scatter(
                &mut rho,
                &self.basis.states[k],
                &self.basis.states[k],
                |i, j| C64::new(block[(i, j)], 0.0),
            );
        }
        Ok(DenseState {
            n_sites: self.n_sites(),
            rho,
        })
    }

    /// `exp(−i H t)` on one parity half.
    fn propagator(&self, half: usize, t: f64) -> DMatrix<C64> {
        let h = &self.halves[half];
        let phased = DMatrix::from_fn(h.vectors.nrows(), h.vectors.ncols(), |i, j| {
            C64::from_polar(h.vectors[(i, j)], -h.energies[j] * t)
        });
        linalg::mul_complex_real(&phased, &h.vectors.transpose())
    }

    /// `U ρ U†` with `U = exp(−i H t)`.
    pub fn evolve(&self, rho0: &DenseState, t: f64) -> Result<DenseState> {
        if rho0.n_sites != self.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim(),
                found: rho0.dim(),
            });
        }
        if t == 0.0 {
            return Ok(rho0.clone());
        }
        let u = [self.propagator(0, t), self.propagator(1, t)];
        let s = &self.basis.states;
        let dim = self.basis.dim();
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        for a in 0..2 {
            for b in 0..2 {
                let block = gather(rho0.matrix(), &s[a], &s[b]);
                let out = linalg::mul_complex(&linalg::mul_complex(&u[a], &block), &u[b].adjoint());
                scatter(&mut rho, &s[a], &s[b], |i, j| out[(i, j)]);
            }
        }
        Ok(DenseState {
            n_sites: self.n_sites(),
            rho,
        })
    }
}

fn gather(m: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn scatter(m: &mut DMatrix<C64>, rows: &[usize], cols: &[usize], f: impl Fn(usize, usize) -> C64) {
    for (j, &c) in cols.iter().enumerate() {
        for (i, &r) in rows.iter().enumerate() {
            m[(r, c)] = f(i, j);
        }
    }
}

pub fn thermal_state(h: &SparseHamiltonian, beta: f64) -> Result<DenseState> {
    Spectrum::new(h).thermal_state(beta)
}

pub fn evolve_closed(rho0: &DenseState, h_post: &SparseHamiltonian, t: f64) -> Result<DenseState> {
    Spectrum::new(h_post).evolve(rho0, t)
}

/// Partial trace onto sites `(i, j)` (1-based), qubit order `(i, j)`.
pub fn reduce_pair(rho: &DenseState, i: usize, j: usize) -> Result<TwoSiteState> {
    let n = rho.n_sites;
    for site in [i, j] {
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, n });
        }
    }
    if i == j {
        return Err(Error::InvalidParams(format!(
            "reduce_pair needs distinct sites, got {i} twice"
        )));
    }
    let (mi, mj) = (site_mask(n, i), site_mask(n, j));
    let local = |s: usize| 2 * usize::from(s & mi != 0) + usize::from(s & mj != 0);
    let m = rho.matrix();
    let mut out = DMatrix::from_element(4, 4, ZERO);
    for r in 0..rho.dim() {
        let rest = r & !(mi | mj);
        let a = local(r);
        for b in 0..4 {
            let c = rest | if b & 2 != 0 { mi } else { 0 } | if b & 1 != 0 { mj } else { 0 };
            out[(a, b)] += m[(r, c)];
        }
    }
    TwoSiteState::from_matrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::log_negativity;
    use crate::linalg::pauli;

    fn params(g: f64, l1: f64, l2: f64, n: usize) -> ModelParams {
        ModelParams::new(g, l1, l2, n).unwrap()
    }

    /// Dense Kronecker-product construction, independent of the bit tricks.
    fn kron_hamiltonian(p: &ModelParams, (h1, h2): (f64, f64)) -> DMatrix<C64> {
        let n = p.n_sites;
        let embed = |ops: &[(usize, DMatrix<C64>)]| {
            let mut m = DMatrix::identity(1, 1);
            for site in 1..=n {
                let f = ops
                    .iter()
                    .find(|(s, _)| *s == site)
                    .map(|(_, o)| o.clone())
                    .unwrap_or_else(pauli::id);
                m = linalg::kron(&m, &f);
            }
            m
        };
        let d = 1 << n;
        let mut h = DMatrix::from_element(d, d, ZERO);
        for i in 1..=n {
            let j = i % n + 1;
            h += embed(&[(i, pauli::x()), (j, pauli::x())]) * C64::new((1.0 + p.gamma) / 4.0, 0.0);
            h += embed(&[(i, pauli::y()), (j, pauli::y())]) * C64::new((1.0 - p.gamma) / 4.0, 0.0);
            let hi = h1 + if i % 2 == 0 { h2 } else { -h2 };
            h += embed(&[(i, pauli::z())]) * C64::new(hi / 2.0, 0.0);
        }
        h
    }

    #[test]
    fn matches_kronecker_construction() {
        for (p, f) in [
            (params(0.6, 1.2, 0.5, 4), (1.2, 0.5)),
            (params(-0.3, 0.1, 2.0, 6), (0.4, -0.7)),
        ] {
            let sparse = build_hamiltonian(&p, f)
                .unwrap()
                .to_dense()
                .map(|x| C64::new(x, 0.0));
            assert!((sparse - kron_hamiltonian(&p, f)).norm() < 1e-13);
        }
    }

    #[test]
    fn classical_ground_energy() {
        let h = build_hamiltonian(&params(1.0, 0.0, 0.0, 4), (0.0, 0.0)).unwrap();
        assert!((Spectrum::new(&h).ground_energy() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        let mut p = params(0.5, 0.0, 0.0, 4);
        p.n_sites = 16;
        assert!(matches!(
            build_hamiltonian(&p, (0.0, 0.0)),
            Err(Error::SizeOutOfRange { .. })
        ));
        p.n_sites = 7;
        assert!(matches!(
            build_hamiltonian(&p, (0.0, 0.0)),
            Err(Error::OddSize(7))
        ));
    }

    #[test]
    fn nonzeros_scale_with_bonds() {
        let h = build_hamiltonian(&params(0.5, 1.0, 0.3, 8), (1.0, 0.3)).unwrap();
        assert!(h.nnz() <= (8 + 1) * 256);
        let d = h.to_dense();
        assert_eq!(d, d.transpose());
    }

    #[test]
    fn fs_ground_doublet_at_ten_sites() {
        let p = ModelParams::on_fs(0.8, 1.0, 10).unwrap();
        let e = Spectrum::new(&build_hamiltonian(&p, p.fields()).unwrap()).energies();
        assert!((e[1] - e[0]).abs() < 1e-8, "splitting {}", e[1] - e[0]);
        assert!(e[2] - e[1] > 1e-3);
    }

    #[test]
    fn thermal_state_limits() {
        let p = params(0.6, 1.2, 0.5, 6);
        let spec = Spectrum::new(&build_hamiltonian(&p, p.fields()).unwrap());
        let inf = spec.thermal_state(0.0).unwrap();
        assert!((inf.matrix() - DenseState::maximally_mixed(6).matrix()).norm() < 1e-14);
        let s = spec.thermal_state(3.0).unwrap();
        let c = s.check();
        assert!(c.trace_err < 1e-12 && c.hermiticity_err < 1e-14 && c.min_eig > -1e-12);
        assert!(spec.thermal_state(-1.0).is_err());
    }

    #[test]
    fn cold_state_lives_on_ground_space() {
        let p = params(0.6, 1.2, 0.5, 6);
        let h = build_hamiltonian(&p, p.fields()).unwrap();
        let spec = Spectrum::new(&h);
        let e = spec.energies();
        assert!(e[1] - e[0] > 0.1);
        let rho = spec.thermal_state(250.0).unwrap();
        assert!((h.expectation(&rho) - e[0]).abs() < 1e-12);
        let lam = rho.eigenvalues();
        assert!((lam[lam.len() - 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fs_ground_state_is_separable() {
        let p = ModelParams::on_fs(0.8, 1.0, 10).unwrap();
        let rho = thermal_state(&build_hamiltonian(&p, p.fields()).unwrap(), 250.0).unwrap();
        assert!(log_negativity(&reduce_pair(&rho, 2, 3).unwrap()) < 1e-6);
    }

    #[test]
    fn closed_evolution_is_unitary() {
        let p = params(0.6, 1.2, 0.5, 6);
        let rho0 = thermal_state(&build_hamiltonian(&p, p.fields()).unwrap(), 1.5).unwrap();
        let post = build_hamiltonian(&p, (0.0, 0.0)).unwrap();
        let spec = Spectrum::new(&post);
        assert!((spec.evolve(&rho0, 0.0).unwrap().matrix() - rho0.matrix()).norm() == 0.0);
        let e0 = post.expectation(&rho0);
        let lam0 = rho0.eigenvalues();
        for t in [0.3, 2.0, 11.0] {
            let rho = spec.evolve(&rho0, t).unwrap();
            let c = rho.check();
            assert!(c.trace_err < 1e-10 && c.hermiticity_err < 1e-10);
            assert!((post.expectation(&rho) - e0).abs() < 1e-10);
            for (a, b) in rho.eigenvalues().iter().zip(&lam0) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn evolution_matches_pure_state_propagation() {
        // small Taylor steps of i dψ/dt = H ψ as a check on the propagator sign
        let p = params(0.4, 0.7, 0.2, 4);
        let h = build_hamiltonian(&p, p.fields()).unwrap();
        let psi0: Vec<C64> = (0..16)
            .map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let rho0 = DenseState::from_pure(4, &psi0).unwrap();
        let t = 0.5;
        let steps = 2000;
        let dt = t / steps as f64;
        let mut psi = psi0.clone();
        for _ in 0..steps {
            // fourth-order Taylor of exp(−i H dt)
            let mut term = psi.clone();
            let mut next = psi.clone();
            for order in 1..=4 {
                term = h
                    .apply(&term)
                    .into_iter()
                    .map(|z| z * C64::new(0.0, -dt / order as f64))
                    .collect();
                for (x, y) in next.iter_mut().zip(&term) {
                    *x += y;
                }
            }
            psi = next;
        }
        let expect = DenseState::from_pure(4, &psi).unwrap();
        let got = evolve_closed(&rho0, &h, t).unwrap();
        assert!((got.matrix() - expect.matrix()).norm() < 1e-9);
    }

    #[test]
    fn reduce_product_and_bell() {
        let up = DenseState::product(&[0, 0, 0, 0]);
        let r = reduce_pair(&up, 2, 3).unwrap();
        assert!((r.matrix()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((r.trace() - 1.0).abs() < 1e-15);

        // (|↑↑⟩ + |↓↓⟩)/√2 on (1, 2), then |↑↓⟩
        let mut psi = vec![ZERO; 16];
        psi[0b0001] = C64::new(1.0, 0.0);
        psi[0b1101] = C64::new(1.0, 0.0);
        let rho = DenseState::from_pure(4, &psi).unwrap();
        let bell = reduce_pair(&rho, 1, 2).unwrap();
        let mut expect = DMatrix::from_element(4, 4, ZERO);
        for (a, b) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expect[(a, b)] = C64::new(0.5, 0.0);
        }
        assert!((bell.matrix() - &expect).norm() < 1e-15);
        let tail = reduce_pair(&rho, 3, 4).unwrap();
        assert!((tail.matrix()[(1, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        // qubit order follows the arguments
        let swapped = reduce_pair(&rho, 4, 3).unwrap();
        assert!((swapped.matrix()[(2, 2)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(reduce_pair(&rho, 0, 2).is_err());
        assert!(reduce_pair(&rho, 2, 5).is_err());
        assert!(reduce_pair(&rho, 2, 2).is_err());
    }

    #[test]
    fn reduced_random_state_has_unit_trace() {
        let psi: Vec<C64> = (0..64)
            .map(|k| C64::new(((k * 37) % 11) as f64 - 5.0, ((k * 13) % 7) as f64))
            .collect();
        let rho = DenseState::from_pure(6, &psi).unwrap();
        for (i, j) in [(1, 2), (3, 6), (5, 2)] {
            let r = reduce_pair(&rho, i, j).unwrap();
            assert!((r.trace() - 1.0).abs() < 1e-13);
            assert!(r.min_eigenvalue() > -1e-13);
        }
    }
}
