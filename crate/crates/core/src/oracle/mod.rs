//! Independent reference solutions and convergence tools.

mod exact;
mod kirchhoff;
mod richardson;
mod semilinear;

pub use exact::{exact_linear_radial, exact_radiation_field, ProfileFunction};
pub use kirchhoff::{kirchhoff_eval, KirchhoffValue, ModelSource, RadialSource, KIRCHHOFF_NODES, KIRCHHOFF_RTOL};
pub use richardson::{observed_orders, richardson, Richardson};
pub use semilinear::{chain_polynomial, semilinear_coefficients, semilinear_transform, MAX_CHAIN_DEPTH};
