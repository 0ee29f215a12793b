//! Open single-qubit dynamics with a thermodynamic ledger.
//!
//! States are Bloch vectors, Hamiltonians are `H = -h·σ` and internal energy
//! is `U = -h·r`. Units set `ħ = k_B = 1`; entropies are in nats.

pub mod channels;
pub mod error;
pub mod nonmarkov;
pub mod numerics;
pub mod parallel;
pub mod state;
pub mod thermo;

pub use channels::{ChannelModel, Trajectory};
pub use error::{Error, Result};
pub use state::{BlochState, Field3, SpectralPair};
