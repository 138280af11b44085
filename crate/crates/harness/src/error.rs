use thiserror::Error;

/// Errors of scenario runs, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] modcalc_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit codes shared by the harness and the command line.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const INAPPLICABLE: i32 = 4;
}

/// Exit code for a core error: numerical breakdowns are 3, everything
/// else (bad grids, weights, exponents, files) is a configuration error.
pub fn core_exit_code(e: &modcalc_core::Error) -> i32 {
    use modcalc_core::Error as E;
    match e {
        E::MollificationDiverged { .. } | E::OrderTooHigh { .. } | E::UndefinedFit(_) | E::NonDecayingSymbol(_) => exit::NUMERIC,
        _ => exit::CONFIG,
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(e) => core_exit_code(e),
            HarnessError::Config(_) | HarnessError::Io(_) => exit::CONFIG,
        }
    }
}
