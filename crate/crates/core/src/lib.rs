//! Linear low-pass filters on real functions and Fourier series.
//!
//! The first-order filter replaces `f(x)` by its average over `[x-ε, x+ε]`.
//! On a Fourier series it multiplies mode `k` by `sin(kε)/(kε)`. Iterating it
//! `N` times at range `ε/N` gives the order-`N` filter, whose kernel is a
//! piecewise polynomial of class `C^(N-2)`.

/// Crate version, echoed in CLI manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod error;
pub mod fourier;
pub mod kernels;
pub mod ops;
pub mod pde;
pub mod sampled;
pub mod shapes;

pub use error::{Error, Result};
pub use fourier::{
    classify_convergence, classify_magnitudes, coefficients_from_samples, Convergence,
    ConvergenceReport, FourierSeries,
};
pub use kernels::{
    convolve, first_order_kernel, kernel_series, multiplier, order_n_kernel, PiecewiseKernel,
};
pub use ops::{filter_samples, filter_series, FilterSpec};
pub use sampled::{Extension, SampledFunction};
