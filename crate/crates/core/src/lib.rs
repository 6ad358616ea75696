//! Linear stability, Hopf bifurcation analysis and time-domain simulation
//! of the logistic growth model with a distributed delay in the density
//! feedback and a constant inflow:
//!
//! ```text
//! dn/dt = r n(t) [1 - (1/K) ∫ n(t - s) g(s) ds] + D
//! ```
//!
//! Three delay kernels are supported: uniform, point (Dirac) and gamma of
//! integer order. See [`model`] for the characteristic function,
//! [`stability`] for crossing frequencies and Hopf curves, [`simulate`] for
//! the integrators and [`io`] for configuration and CSV/JSON output.

pub mod error;
pub mod io;
pub mod model;
pub mod simulate;
pub mod stability;

pub use error::{Error, Result};
pub use model::{Kernel, ModelParams};
