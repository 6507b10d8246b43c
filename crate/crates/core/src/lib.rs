//! Covariance-matrix separability criteria and concurrence lower bounds for
//! finite-dimensional multipartite quantum states.
//!
//! The criteria are one-sided: a violated inequality proves entanglement, a
//! satisfied one proves nothing.

pub mod cli;
pub mod concurrence;
pub mod covariance;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod states;

pub use concurrence::ConcurrenceBounds;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix};
pub use observables::ObservableBasis;
pub use states::StateSpec;
