//! Nearest-neighbour entanglement in the alternating-field anisotropic XY
//! chain: free-fermion correlators, exact diagonalization, and open dynamics
//! with local baths.

pub mod ed;
pub mod entanglement;
pub mod error;
pub mod freefermion;
pub mod linalg;
pub mod model;
pub mod openquantum;
pub mod rdm;
pub mod sweep;

pub use error::{Error, Result};
pub use freefermion::CorrelatorSet;
pub use model::{FieldProtocol, ModelParams, Phase};
