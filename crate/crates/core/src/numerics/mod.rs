//! Special functions, random streams and one-dimensional minimization.

mod ks;
mod optimize;
mod quad;
mod rng;
mod special;

pub use ks::{kolmogorov_q, ks_two_sample};
pub use optimize::{golden_min, grid_then_golden};
pub use quad::integrate;
pub use rng::{philox4x32_10, RngStream};
pub use special::{
    erf, erfc, ln_beta, ln_gamma, normal_cdf, normal_pdf, regularized_incomplete_beta,
    student_t_cdf, student_t_ln_pdf,
};
