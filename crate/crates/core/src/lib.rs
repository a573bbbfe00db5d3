//! Steady 1+1D radiative transfer with overlapping Schwarz decomposition and
//! randomized low-rank compression of the subdomain solution maps.

pub mod disc;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problem;
pub mod rsvd;
pub mod schwarz;
pub mod transport;

pub use error::{CacheError, Error, Result};
pub use problem::{Fingerprint, PhysicalInflow, Problem};
