//! Finite-n computations for sofic entropy and homology of free-group actions:
//! random permutation and configuration models, model spaces of labelings,
//! first-moment exponents for independent sets, cluster experiments, two-scale
//! homology and constructive partition balancing.

pub mod empirical;
pub mod error;
pub mod exact;
pub mod freegroup;
pub mod homology;
pub mod indepsets;
pub mod linalg;
pub mod moments;
pub mod partition;
pub mod rng;
pub mod sofic;
pub mod unionfind;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
