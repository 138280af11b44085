//! Grids, ordered bases, sampled fields and the discrete Fourier transform.

mod basis;
mod field;
mod fourier;
mod grid;
pub mod io;
mod quantization;

pub use basis::{is_phase_split, OrderedBasis, Parallelepiped, PhaseSplit, MAX_PHASE_SPLIT_DIM};
pub use field::SampledField;
pub use fourier::{
    fourier_transform, inverse_fourier, inverse_fourier_onto, SpectralDifferentiator,
    MAX_AMPLIFICATION,
};
#[allow(unused_imports)]
pub(crate) use fourier::{check_dual, dft_nd, forward_axes, inverse_axes, AxisPlan};
pub use grid::UniformGrid;
pub use quantization::{Quantization, QuantizationSpec};

/// Default half-width of the truncation box.
pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
/// Default samples per axis for signals on R^d.
pub const DEFAULT_SIGNAL_COUNT: usize = 256;
/// Default samples per axis for phase-space symbols.
pub const DEFAULT_SYMBOL_COUNT: usize = 64;
