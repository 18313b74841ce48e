//! Convex extensions of supermodular set functions and budget-constrained
//! supermodular minimization by cutting-plane LP relaxations.

pub mod coverage;
pub mod error;
pub mod extensions;
pub mod flowsep;
pub mod lpsolve;
pub mod minimize;
pub mod oracle;
pub mod setfn;

pub use error::{Error, Result};
