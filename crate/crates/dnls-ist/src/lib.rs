//! Inverse scattering transform (IST) engine for the derivative nonlinear
//! Schrödinger equation
//!
//! ```text
//!     i u_t + u_xx + i (|u|^2 u)_x = 0,        u(x, 0) = u_0(x),  x ∈ ℝ.
//! ```
//!
//! The engine propagates decaying initial data through the three IST stages:
//!
//! 1. **Direct scattering** ([`direct_scattering`]): solve the Volterra
//!    integral equations for the Jost functions of the associated quadratic
//!    spectral problem, assemble the transmission-type coefficient `a(z)` and
//!    the two reflection coefficients `r_+(z)`, `r_-(z) = 4z·r_+(z)` on the
//!    real line of the squared spectral variable `z = λ²`.
//! 2. **Time evolution** ([`evolution`]): the reflection data evolves by the
//!    explicit phase `r_±(t; z) = r_±(0; z)·e^{4iz²t}`; no PDE is solved.
//! 3. **Inverse problem** ([`rh_inverse`]): reconstruct `u(x, t)` from the
//!    evolved reflection data by solving a Riemann–Hilbert (RH) factorization
//!    problem on the real `z`-line — one system adapted to the positive
//!    half-line in `x` and one scalar-dressed (δ-factorized) system adapted to
//!    the negative half-line — glued smoothly in an overlap window.
//!
//! An independent pseudospectral time-stepper for the PDE itself lives in
//! [`pde_reference`] and is used for cross-validation, never for production
//! propagation. Singular-integral machinery (Hilbert transform and the two
//! Plemelj boundary projections, realized as FFT multiplier operators) lives
//! in [`cauchy`]; grids, sampled potentials and norms in [`grids`].
//!
//! All numerical tolerances used by library invariants are centralized in
//! [`tol`] together with the measurements that justify them.

pub mod cauchy;
pub mod direct_scattering;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod gmres;
pub mod grids;
pub mod pde_reference;
pub mod rh_inverse;
pub mod tol;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Imaginary unit as a crate-wide constant.
pub const I: C64 = C64::new(0.0, 1.0);
