//! Parameters of the alternating-field anisotropic XY ring.
//!
//! Energies are measured in units of the exchange `J = 1`, times in `ħ/J`
//! and inverse temperatures in `1/J`. The Hamiltonian is
//!
//! ```text
//! H = 1/4 Σ_i [(1+γ) σx_i σx_{i+1} + (1-γ) σy_i σy_{i+1}] + 1/2 Σ_i h_i σz_i
//! h_i = h1 + (-1)^i h2,   sites 1..N,   σ_{N+1} ≡ σ_1
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exchange energy. Fixed to one; every other quantity is measured against it.
pub const J: f64 = 1.0;

/// Tolerance on the phase-boundary polynomials used by [`classify_phase`].
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// x-y anisotropy, nonzero.
    pub gamma: f64,
    /// Uniform field `h1 / J`.
    pub lambda1: f64,
    /// Alternating field `h2 / J`.
    pub lambda2: f64,
    /// Number of sites on the ring. Even; at least four.
    pub n_sites: usize,
}

impl ModelParams {
    pub fn new(gamma: f64, lambda1: f64, lambda2: f64, n_sites: usize) -> Result<Self> {
        let p = Self {
            gamma,
            lambda1,
            lambda2,
            n_sites,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters on the factorization surface with `lambda1` fixed by `gamma` and `lambda2`.
    pub fn on_fs(gamma: f64, lambda2: f64, n_sites: usize) -> Result<Self> {
        Self::new(gamma, lambda1_on_fs(gamma, lambda2)?, lambda2, n_sites)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma == 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be finite and nonzero, got {}",
                self.gamma
            )));
        }
        if !self.lambda1.is_finite() || !self.lambda2.is_finite() {
            return Err(Error::InvalidParams("fields must be finite".into()));
        }
        if self.n_sites % 2 != 0 {
            return Err(Error::OddSize(self.n_sites));
        }
        if self.n_sites < 4 {
            return Err(Error::SizeOutOfRange {
                n: self.n_sites,
                min: 4,
                max: usize::MAX,
            });
        }
        Ok(())
    }

    pub fn with_sites(mut self, n_sites: usize) -> Self {
        self.n_sites = n_sites;
        self
    }

    /// Field strengths `(h1, h2)` in units of `J`.
    pub fn fields(&self) -> (f64, f64) {
        (self.lambda1 * J, self.lambda2 * J)
    }

    /// The default quench: fields on for `t <= 0`, off afterwards.
    pub fn quench(&self) -> FieldProtocol {
        let (h1, h2) = self.fields();
        FieldProtocol::quench(h1, h2)
    }

    /// Fields held at their initial values for all times.
    pub fn hold(&self) -> FieldProtocol {
        let (h1, h2) = self.fields();
        FieldProtocol::hold(h1, h2)
    }
}

/// Piecewise-constant field protocol, switched at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldProtocol {
    pub h1_pre: f64,
    pub h2_pre: f64,
    pub h1_post: f64,
    pub h2_post: f64,
}

impl FieldProtocol {
    pub fn quench(h1: f64, h2: f64) -> Self {
        Self {
            h1_pre: h1,
            h2_pre: h2,
            h1_post: 0.0,
            h2_post: 0.0,
        }
    }

    pub fn hold(h1: f64, h2: f64) -> Self {
        Self {
            h1_pre: h1,
            h2_pre: h2,
            h1_post: h1,
            h2_post: h2,
        }
    }

    pub fn pre(&self) -> (f64, f64) {
        (self.h1_pre, self.h2_pre)
    }

    pub fn post(&self) -> (f64, f64) {
        (self.h1_post, self.h2_post)
    }
}

/// Fields `(h1, h2)` in force at time `t`.
pub fn field_at(proto: &FieldProtocol, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        proto.pre()
    } else {
        proto.post()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "PM_I")]
    PmI,
    #[serde(rename = "PM_II")]
    PmII,
    #[serde(rename = "AFM")]
    Afm,
    #[serde(rename = "BOUNDARY")]
    Boundary,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Phase::PmI => "PM_I",
            Phase::PmII => "PM_II",
            Phase::Afm => "AFM",
            Phase::Boundary => "BOUNDARY",
        };
        f.write_str(s)
    }
}

/// Zero-temperature phase of the infinite chain. Finite rings reuse the same
/// boundaries.
pub fn classify_phase(p: &ModelParams) -> Phase {
    let l1 = p.lambda1 * p.lambda1;
    let l2 = p.lambda2 * p.lambda2;
    let g2 = p.gamma * p.gamma;
    // PM-I <-> AFM: l1 = l2 + 1; PM-II <-> AFM: l2 = l1 + g2
    let pm1 = l1 - l2 - 1.0;
    let pm2 = l2 - l1 - g2;
    if pm1.abs() <= BOUNDARY_TOL || pm2.abs() <= BOUNDARY_TOL {
        Phase::Boundary
    } else if pm1 > 0.0 {
        Phase::PmI
    } else if pm2 > 0.0 {
        Phase::PmII
    } else {
        Phase::Afm
    }
}

/// Non-negative uniform field on the factorization surface
/// `λ1² = λ2² + 1 − γ²`.
pub fn lambda1_on_fs(gamma: f64, lambda2: f64) -> Result<f64> {
    let radicand = lambda2 * lambda2 + (1.0 - gamma * gamma);
    if radicand < 0.0 {
        return Err(Error::NoFactorizationPoint { radicand });
    }
    Ok(radicand.sqrt())
}

/// Non-negative alternating field on the factorization surface for a given `λ1`.
pub fn lambda2_on_fs(gamma: f64, lambda1: f64) -> Result<f64> {
    let radicand = lambda1 * lambda1 - (1.0 - gamma * gamma);
    if radicand < 0.0 {
        return Err(Error::NoFactorizationPoint { radicand });
    }
    Ok(radicand.sqrt())
}
