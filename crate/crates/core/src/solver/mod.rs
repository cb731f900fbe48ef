//! Brownian paths on the finest grid, Euler–Maruyama schemes driven by their
//! block sums, occupation statistics and the Itô-residual diagnostic.

mod brownian;
mod em;
mod ito;
mod occupation;

pub use brownian::BrownianPath;
pub use em::{
    em_continuous_eval, em_discrete, em_endpoint, em_transformed, interpolate_fine, linear_interpolation,
    EmTrajectory,
};
pub use ito::{ito_residual, ItoDiagnostic, ItoResidual, HESSIAN_SAFETY, HESSIAN_SAMPLES};
pub use occupation::{neighborhood_occupation, neighborhood_occupation_multi, occupation_indicator_stat};
