//! Time-optimal control of one-mode Gaussian states in Markovian dissipative
//! channels.
//!
//! * [`gaussian`]: covariance matrices, Williamson triples, fidelity, unitaries
//! * [`channel`]: bath, fixed point and closed-form free evolution
//! * [`trajectory`]: free trajectories with time eliminated
//! * [`control`]: relaxation times and optimal cooling, heating and stopping
//! * [`oracle`]: fixed-step integration, protocol replay, greedy baseline

pub mod channel;
pub mod control;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod roots;
pub mod trajectory;

pub use channel::{fixed_point, BathSpec, ChannelFixedPoint};
pub use error::{Error, Result};
pub use gaussian::{CovMatrix, Displacement, GaussianState, ModeParams};
