//! Windows, the short-time Fourier transform
//!
//! ```text
//! V_phi f(x, xi) = (2 pi)^(-d/2) \int f(y) conj(phi(y - x)) e^{-i <y, xi>} dy
//! ```
//!
//! its inversion, and window and decay diagnostics.

mod diagnostics;
mod transform;
mod window;

pub use diagnostics::{gs_seminorm, stft_decay_fit, DecayFit, DecayFitReport};
pub use transform::{
    istft, stft, Reconstruction, Spectrogram, StftMeta, StftOptions, PHASE_CONVENTION, STFT_TAG,
};
pub use window::{hermite_function, PreparedWindow, Window, WindowKind};
