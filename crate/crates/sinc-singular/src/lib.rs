//! Sinc projection solvers for nonlinear Fredholm integral equations of the
//! second kind with algebraic weakly singular kernels
//!
//! ```text
//! u(t) = g(t) + ∫_a^b |t−s|^{−λ} k(t, s, u(s)) ds,   0 < λ < 1,
//! ```
//!
//! covering Hammerstein kernels `k(t,s)·ψ(s, u(s))` and Urysohn kernels
//! `k(t, s, u(s))`. Two schemes are provided, both built on single-exponential
//! sinc approximation and both solved by damped Newton iteration seeded by
//! steepest descent:
//!
//! * **sinc-collocation** ([`collocation`]): a singularity-preserving sinc
//!   expansion collocated at the sinc points, with the weakly singular
//!   integrals discretized by SE-transformed sinc quadrature on each side of
//!   the singularity;
//! * **sinc-convolution** ([`convolution`]): one-sided convolutions
//!   approximated through the Toeplitz indefinite-integration matrices and
//!   the Laplace-type transform `F(s) = Γ(1−λ)·s^{1−λ}` of the singular
//!   factor, applied via eigendecomposition.
//!
//! Both converge exponentially, at rate `exp(−c·sqrt(N))`. The [`benchmarks`]
//! module carries four reference problems with known solutions, a brute-force
//! singular quadrature oracle, and convergence-study drivers.

pub mod benchmarks;
pub mod collocation;
pub mod convolution;
pub mod eigen;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod newton;
pub mod oracle;
pub mod problem;
pub mod quad;
pub mod sinc;
pub mod special;
pub mod validate;

pub use error::{Error, Result};
pub use sinc::{Interval, SincGrid};
