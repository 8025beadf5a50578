//! Fourier-Bessel expansions on the unit interval: special functions, eigenbases,
//! Poisson and heat kernels, maximal operators and atomic Hardy-space decompositions.

pub mod basis;
pub mod error;
pub mod hardy;
pub mod kernels;
pub mod maximal;
pub mod quadrature;
pub mod smoothstep;
pub mod specfun;

pub use error::{Error, Result};
