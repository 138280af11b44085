//! Time-frequency numerics on uniform grids: Fourier and short-time Fourier
//! transforms, weighted mixed (quasi-)norms and modulation-space norms,
//! weight classes with Gevrey regularity diagnostics, and pseudo-differential
//! operators in arbitrary `A`-quantization.

pub mod error;
pub mod lattice;
pub mod norms;
pub mod pdo;
pub mod stft;
pub mod util;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
