//! Empirical operator-norm studies for pseudo-differential operators on
//! modulation spaces: seeded ensembles, ratio estimates over a ladder of
//! grids, the named continuity scenarios and frozen regression fixtures.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod fixtures;
pub mod kernel;
pub mod ratio;
pub mod scenario;

pub use config::{KernelConfig, PropOpContConfig, Side, SpaceConfig, TheoremConfig};
pub use ensemble::{Ensemble, Member};
pub use error::{core_exit_code, exit, HarnessError};
pub use fixtures::{check_fixture, fixture_dir, FixtureStatus};
pub use kernel::{stft_kernel_crosscheck, KernelReport};
pub use ratio::{normalize, op_norm_ratio, window_robustness, Ladder, RatioProblem, RatioReport, WindowRobustness};
pub use scenario::{run_scenario, Outcome, ScenarioKind, ScenarioReport};
