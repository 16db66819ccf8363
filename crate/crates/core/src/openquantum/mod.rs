//! Open dynamics under repeated interactions with a stream of bath qubits.
//!
//! Each door spin sees the generator
//!
//! ```text
//! D(ρ) = 2k/Z_E Σ_i e^{(−1)^i β_E B} [2 η^{i+1} ρ η^i − {η^i η^{i+1}, ρ}]
//! ```
//!
//! with `Z_E = e^{β_E B} + e^{−β_E B}`. The `i = 1` (absorption) term is
//! dropped unless requested.

mod integrator;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use integrator::{integrate, IntegratorSettings, Observation, Trajectory};

use crate::ed::{site_mask, DenseState, SparseHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{pauli, C64, I, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Dissipative,
    /// `2kκ [2 σz ρ σz − 2ρ]` on every door.
    Dephasing,
}

/// Reading of the `η^α` operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderChoice {
    /// `η^α = σx + i(−1)^α σy`, i.e. `η⁰ = 2σ⁺`, `η¹ = 2σ⁻`.
    Ladder,
    /// `η^α = σx + (−1)^α σy`; keeps the trace but not positivity.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub beta_e: f64,
    /// Bath qubit energy, `H_E = B σz`.
    pub b: f64,
    pub k: f64,
    /// 1-based door sites.
    pub doors: Vec<usize>,
    pub include_absorption: bool,
    pub noise: NoiseKind,
    pub dephasing_rate: f64,
}

impl Default for BathSpec {
    fn default() -> Self {
        Self {
            beta_e: 10.0,
            b: 1.0,
            k: 1.0,
            doors: vec![1],
            include_absorption: false,
            noise: NoiseKind::Dissipative,
            dephasing_rate: 1.0,
        }
    }
}

impl BathSpec {
    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if self.doors.is_empty() {
            return Err(Error::InvalidBath("at least one door is required".into()));
        }
        for (pos, &d) in self.doors.iter().enumerate() {
            if d == 0 || d > n_sites {
                return Err(Error::InvalidBath(format!(
                    "door {d} outside sites 1..={n_sites}"
                )));
            }
            if self.doors[..pos].contains(&d) {
                return Err(Error::InvalidBath(format!("door {d} listed twice")));
            }
        }
        for (name, v) in [
            ("beta_e", self.beta_e),
            ("b", self.b),
            ("k", self.k),
            ("dephasing_rate", self.dephasing_rate),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidBath(format!("{name} must be finite")));
            }
        }
        if self.k < 0.0 || self.dephasing_rate < 0.0 {
            return Err(Error::InvalidBath(
                "k and dephasing_rate must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn z_e(&self) -> f64 {
        let x = self.beta_e * self.b;
        x.exp() + (-x).exp()
    }

    /// `e^{±β_E B} / Z_E` for emission (`+`) and absorption (`−`).
    pub fn emission_absorption_weights(&self) -> (f64, f64) {
        let x = self.beta_e * self.b;
        let tail = (-2.0 * x.abs()).exp();
        let (hi, lo) = (1.0 / (1.0 + tail), tail / (1.0 + tail));
        if x >= 0.0 {
            (hi, lo)
        } else {
            (lo, hi)
        }
    }
}

pub fn eta(choice: LadderChoice, alpha: usize) -> DMatrix<C64> {
    let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
    let y = match choice {
        LadderChoice::Ladder => I * sign,
        LadderChoice::Literal => C64::new(sign, 0.0),
    };
    pauli::x() + pauli::y() * y
}

/// Single-door channel as a superoperator on `(row bit, column bit)` pairs:
/// `D(ρ)[x, y] = Σ_ab S[2x + y][2a + b] ρ[a, b]`.
pub type DoorSuperop = [[C64; 4]; 4];

pub fn door_superoperator(bath: &BathSpec, choice: LadderChoice) -> DoorSuperop {
    let mut s = [[ZERO; 4]; 4];
    // c [2 X ρ Y − Y X ρ − ρ Y X]
    let mut add = |c: f64, x: &DMatrix<C64>, y: &DMatrix<C64>| {
        let m = y * x;
        for (xr, yc, a, b) in quad() {
            let mut v = x[(xr, a)] * y[(b, yc)] * 2.0;
            if b == yc {
                v -= m[(xr, a)];
            }
            if a == xr {
                v -= m[(b, yc)];
            }
            s[2 * xr + yc][2 * a + b] += v * c;
        }
    };
    match bath.noise {
        NoiseKind::Dissipative => {
            let (emit, absorb) = bath.emission_absorption_weights();
            let pre = 2.0 * bath.k;
            add(pre * emit, &eta(choice, 1), &eta(choice, 0));
            if bath.include_absorption {
                add(pre * absorb, &eta(choice, 0), &eta(choice, 1));
            }
        }
        NoiseKind::Dephasing => {
            let z = pauli::z();
            add(2.0 * bath.k * bath.dephasing_rate, &z, &z);
        }
    }
    s
}

fn quad() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|k| (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1))
}

/// Whether `S` only connects `(a, b)` to `(x, y)` with `a ⊕ x = b ⊕ y`, so
/// that operators block-diagonal in `Π σz` stay block-diagonal.
pub fn preserves_parity_blocks(s: &DoorSuperop) -> bool {
    quad().all(|(x, y, a, b)| (a ^ x) == (b ^ y) || s[2 * x + y][2 * a + b].norm() < 1e-15)
}

/// `D(ρ)` summed over doors, on the full matrix.
pub fn dissipator(rho: &DenseState, bath: &BathSpec, choice: LadderChoice) -> Result<DMatrix<C64>> {
    bath.validate(rho.n_sites())?;
    let s = door_superoperator(bath, choice);
    let n = rho.n_sites();
    let m = rho.matrix();
    let dim = rho.dim();
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for &d in &bath.doors {
        let mask = site_mask(n, d);
        for c in 0..dim {
            let y = usize::from(c & mask != 0);
            for r in 0..dim {
                let x = usize::from(r & mask != 0);
                let mut acc = ZERO;
                for a in 0..2 {
                    for b in 0..2 {
                        let coeff = s[2 * x + y][2 * a + b];
                        if coeff != ZERO {
                            let rr = if a == x { r } else { r ^ mask };
                            let cc = if b == y { c } else { c ^ mask };
                            acc += coeff * m[(rr, cc)];
                        }
                    }
                }
                out[(r, c)] += acc;
            }
        }
    }
    Ok(out)
}

/// `−i[H, ρ] + D(ρ)` on the full matrix.
pub fn rhs(
    rho: &DenseState,
    h: &SparseHamiltonian,
    bath: &BathSpec,
    choice: LadderChoice,
) -> Result<DMatrix<C64>> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let dense = h.to_dense().map(|x| C64::new(x, 0.0));
    let comm = &dense * m - m * &dense;
    Ok(comm * (-I) + dissipator(rho, bath, choice)?)
}
