//! Homogeneous Ricci flow on reductive homogeneous spaces `G/H`.
//!
//! Structure constants, reductive presentations with an invariant background
//! form, Ricci curvature of invariant metrics, the Bochner-type lower bound
//! on a compact semisimple ideal, and an adaptive integrator that tracks the
//! fiber sup `k(t)` toward extinction.

pub mod algebra;
pub mod bochner;
pub mod catalog;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod presentation;
pub mod tol;

pub use algebra::{LieAlgebra, Subspace};
pub use bochner::{build_bochner, fiber_splitting, mixed_term_audit, positive_direction, reduce_to_semisimple, BochnerData};
pub use curvature::{ricci_oracle, ricci_tensor, scalar_curvature, RicciData};
pub use error::{Error, Result};
pub use flow::{integrate, FlowOptions, FlowResult, Verdict};
pub use presentation::{Metric, Presentation};
