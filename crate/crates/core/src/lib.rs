//! Numerical laboratory for the integral operators induced by the Fock
//! reproducing kernel `K_t(z, w) = e^{t<z,w>}` acting on `L^p(C^n, dv_s)`.
//!
//! * [`measure`]: Gaussian measures and polar-grid quadrature.
//! * [`kernel`]: the kernel, its modulus integrals and the reproducing check.
//! * [`operators`]: `S_t`, `T_t`, their adjoints and the radial operator `A`.
//! * [`norms`]: Schur certificates, lower bounds, witnesses and the
//!   boundedness classifier.
//! * [`asymptotics`]: the double-integral limit behind the sharp lower bound.
//! * [`cli`]: the batch front-end used by the `fock-lab` binary.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod norms;
pub mod numeric;
pub mod operators;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
