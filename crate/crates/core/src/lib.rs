//! Exact combinatorics of self-avoiding walks and polygons on the regular
//! hyperbolic tessellations H(d,k), together with the closed-form,
//! optimized and transfer-matrix bounds on their connective constants.

pub mod bounds;
pub mod enumeration;
pub mod error;
pub mod geometry;
pub mod tessellation;
pub mod transfer;

pub use error::{Error, Result};
pub use tessellation::{build_ball, build_ball_with_budget, PlanarMap, TessellationParams};
