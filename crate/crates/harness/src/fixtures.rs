//! Frozen regression values. The first passing run of a config writes its
//! report to `<scenario>-<config hash>.json`; later runs must reproduce the
//! file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::scenario::{Outcome, ScenarioReport};

/// Environment variable overriding the fixture directory.
pub const FIXTURE_ENV: &str = "MODCALC_FIXTURES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureStatus {
    /// No fixture existed; this run wrote it.
    Created,
    Matched,
    Mismatch,
    /// Only passing reports are frozen.
    NotFrozen,
}

/// `$MODCALC_FIXTURES`, or the `fixtures` directory of this crate.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

pub fn fixture_path(dir: &Path, report: &ScenarioReport) -> PathBuf {
    dir.join(format!("{}-{}.json", report.scenario, report.config_hash))
}

/// Compares `report` with its fixture in `dir`, freezing it on a first pass.
/// A mismatch turns the outcome into a failure.
pub fn check_fixture(report: &mut ScenarioReport, dir: &Path) -> Result<FixtureStatus, HarnessError> {
    report.fixture = None;
    let text = report.to_json();
    let path = fixture_path(dir, report);
    let status = match fs::read_to_string(&path) {
        Ok(frozen) if frozen == text => FixtureStatus::Matched,
        Ok(_) => FixtureStatus::Mismatch,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            if report.outcome.is_pass() {
                fs::create_dir_all(dir)?;
                // Write then rename, so concurrent runs never see half a file.
                let tmp = path.with_extension(format!("tmp{}", std::process::id()));
                fs::write(&tmp, &text)?;
                fs::rename(&tmp, &path)?;
                FixtureStatus::Created
            } else {
                FixtureStatus::NotFrozen
            }
        }
        Err(e) => return Err(e.into()),
    };
    if status == FixtureStatus::Mismatch && report.outcome.is_pass() {
        report.outcome = Outcome::Fail { reason: format!("report differs from the frozen fixture {}", path.display()) };
    }
    report.fixture = Some(status);
    Ok(status)
}
