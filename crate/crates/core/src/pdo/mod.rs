//! Pseudo-differential operators `Op_A(a)`, changes of quantization and
//! Gevrey symbol-class diagnostics.

mod apply;
mod convert;
mod gamma;
mod symbol;

pub use apply::{apply_op, phase_grid_for, ApplyMethod, MAX_QUADRATURE_N};
pub use convert::{adjoint_symbol, change_quantization};
pub use gamma::{
    gamma_membership, quantization_invariance_check, GammaMode, GammaOptions, GammaReport, InvarianceEntry,
    InvarianceReport, SweepPoint, Verdict, MAX_STFT_ENTRIES, MAX_STFT_N,
};
pub use symbol::{
    ClosedForm, Envelope, Monomial, Profile, Symbol, SymbolMeta, SYMBOL_DECAY_TOL, SYMB_TAG,
};
