//! Generalized polarization tensors of insulated planar inclusions, the conformal-map
//! coefficients and geometric factors they determine, and corner detection from those factors.

pub mod bie;
pub mod coeffs;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod oracle;
pub mod pipeline;
pub mod quadrature;
pub mod reconstruct;
pub mod sum;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
