//! Scenario configurations. Every field has a default, unknown keys are
//! rejected, and the hash of the fully defaulted JSON keys fixture files.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use modcalc_core::lattice::Quantization;
use modcalc_core::norms::{Exponent, PhaseNorm};
use modcalc_core::pdo::{ClosedForm, GammaMode, GammaOptions, Monomial, Profile};
use modcalc_core::stft::Window;
use modcalc_core::weights::Weight;
use modcalc_core::Complex64;

use crate::ensemble::{Ensemble, Member};
use crate::error::HarnessError;
use crate::ratio::Ladder;

fn one_symbol() -> ClosedForm {
    ClosedForm::Constant { c: Complex64::new(1.0, 0.0) }
}
fn kn() -> Quantization {
    Quantization::Kn
}
fn one() -> Weight {
    Weight::one()
}
fn s_default() -> f64 {
    2.0
}
fn l22() -> PhaseNorm {
    PhaseNorm::lpq1(Exponent::Finite(2.0), Exponent::Finite(2.0))
}
fn window1() -> Window {
    Window::gaussian(1)
}
fn drift() -> f64 {
    0.1
}

/// Gevrey class diagnostic run before the theorem scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSettings {
    #[serde(default = "derivative")]
    pub mode: GammaMode,
    #[serde(default)]
    pub options: GammaOptions,
}

fn derivative() -> GammaMode {
    GammaMode::Derivative
}

impl Default for GammaSettings {
    fn default() -> Self {
        Self { mode: derivative(), options: GammaOptions::default() }
    }
}

/// Weight-class scan against `exp(r |z|^(1/s))` on `[-half_width, half_width]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySettings {
    #[serde(default = "r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default = "classify_half_width")]
    pub half_width: f64,
    #[serde(default = "classify_n")]
    pub n: usize,
}

fn r_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn classify_half_width() -> f64 {
    8.0
}
fn classify_n() -> usize {
    17
}

impl Default for ClassifySettings {
    fn default() -> Self {
        Self { r_grid: r_grid(), half_width: classify_half_width(), n: classify_n() }
    }
}

/// Shared by the `p32`, `p32b` and `opcont3` scenarios: `Op_A(a)` from
/// `M(omega0 omega, B)` to `M(omega, B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremConfig {
    #[serde(default = "one_symbol")]
    pub symbol: ClosedForm,
    #[serde(default = "kn")]
    pub quantization: Quantization,
    /// Weight on phase space `R^2`.
    #[serde(default = "one")]
    pub omega: Weight,
    /// Symbol envelope on `R^2`.
    #[serde(default = "one")]
    pub omega0: Weight,
    #[serde(default = "s_default")]
    pub s: f64,
    #[serde(default = "l22")]
    pub norm: PhaseNorm,
    #[serde(default = "window1")]
    pub window: Window,
    #[serde(default)]
    pub ensemble: Ensemble,
    #[serde(default)]
    pub ladder: Ladder,
    /// Largest accepted `(max - min) / max` of the ratio along the ladder.
    #[serde(default = "drift")]
    pub drift_tolerance: f64,
    #[serde(default)]
    pub gamma: GammaSettings,
    #[serde(default)]
    pub classify: ClassifySettings,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        from_json("{}").expect("empty config is valid")
    }
}

fn compat_half_width() -> f64 {
    6.0
}
fn compat_n() -> usize {
    13
}
fn symbol_norm_n() -> usize {
    24
}
fn symbol_norm_half_width() -> f64 {
    6.0
}
fn one4() -> Weight {
    Weight::one()
}

/// Scan of `omega2(x, xi) / (omega1(y, eta) omega0(x, eta, xi - eta, y - x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatSettings {
    #[serde(default = "compat_half_width")]
    pub half_width: f64,
    #[serde(default = "compat_n")]
    pub n: usize,
}

impl Default for CompatSettings {
    fn default() -> Self {
        Self { half_width: compat_half_width(), n: compat_n() }
    }
}

/// Grid `nodal(2, n, half_width)` on which the symbol norm is measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolNormSettings {
    #[serde(default = "symbol_norm_n")]
    pub n: usize,
    #[serde(default = "symbol_norm_half_width")]
    pub half_width: f64,
}

impl Default for SymbolNormSettings {
    fn default() -> Self {
        Self { n: symbol_norm_n(), half_width: symbol_norm_half_width() }
    }
}

/// `Op_0(a)` from `M(omega1, B)` to `M(omega2, B)` with `a` in `M^{inf,1}_{(omega0)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropOpContConfig {
    #[serde(default = "one_symbol")]
    pub symbol: ClosedForm,
    #[serde(default = "one")]
    pub omega1: Weight,
    #[serde(default = "one")]
    pub omega2: Weight,
    /// Weight on `R^4`, evaluated at `(x, eta, xi - eta, y - x)`.
    #[serde(default = "one4")]
    pub omega0: Weight,
    #[serde(default = "l22")]
    pub norm: PhaseNorm,
    #[serde(default = "window1")]
    pub window: Window,
    #[serde(default)]
    pub ensemble: Ensemble,
    #[serde(default)]
    pub ladder: Ladder,
    #[serde(default = "drift")]
    pub drift_tolerance: f64,
    #[serde(default)]
    pub compat: CompatSettings,
    #[serde(default)]
    pub symbol_norm: SymbolNormSettings,
}

impl Default for PropOpContConfig {
    fn default() -> Self {
        from_json("{}").expect("empty config is valid")
    }
}

fn r_space() -> f64 {
    0.3
}
fn r0_space() -> f64 {
    0.2
}
fn s_space() -> f64 {
    1.0
}
fn bracket_width() -> f64 {
    3.0
}
fn growth_tolerance() -> f64 {
    0.05
}

/// Which side of phase space carries the weight `exp(r |.|^(1/s))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Sobolev-type spaces, weight in `xi`.
    Frequency,
    /// Weighted Lebesgue spaces, weight in `x`.
    Position,
}

impl Side {
    pub fn coord(self) -> usize {
        match self {
            Side::Position => 0,
            Side::Frequency => 1,
        }
    }
}

/// Shared by `sobolev` and `weightedl2`. The symbol defaults to a smooth
/// `exp(r0 |.|)` growth on the weighted side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(default = "r_space")]
    pub r: f64,
    #[serde(default = "r0_space")]
    pub r0: f64,
    #[serde(default = "s_space")]
    pub s: f64,
    #[serde(default)]
    pub symbol: Option<ClosedForm>,
    #[serde(default = "kn")]
    pub quantization: Quantization,
    #[serde(default = "window1")]
    pub window: Window,
    #[serde(default)]
    pub ensemble: Ensemble,
    #[serde(default)]
    pub ladder: Ladder,
    #[serde(default = "drift")]
    pub drift_tolerance: f64,
    /// Largest accepted `max / min` of the identity ratios on one grid.
    #[serde(default = "bracket_width")]
    pub bracket_width: f64,
    /// Largest accepted excess (in log scale) of `|a| / exp(r0 |.|^(1/s))`
    /// on the full box over the inner half box.
    #[serde(default = "growth_tolerance")]
    pub growth_tolerance: f64,
}

impl SpaceConfig {
    pub fn symbol_for(&self, side: Side) -> ClosedForm {
        self.symbol.clone().unwrap_or_else(|| {
            let g = Profile::SmoothGrowth { r: self.r0 };
            match side {
                Side::Frequency => ClosedForm::Separable { x: Profile::One, xi: g, c: Complex64::new(1.0, 0.0) },
                Side::Position => ClosedForm::Separable { x: g, xi: Profile::One, c: Complex64::new(1.0, 0.0) },
            }
        })
    }
}

impl Default for SpaceConfig {
    fn default() -> Self {
        from_json("{}").expect("empty config is valid")
    }
}

fn xi_symbol() -> ClosedForm {
    ClosedForm::Polynomial { terms: vec![Monomial { coeff: Complex64::new(1.0, 0.0), x: vec![0], xi: vec![1] }] }
}
fn unit_gaussian() -> Member {
    Member::Chirp { center: 0.0, width: 1.0, modulation: 0.0, chirp: 0.0 }
}
fn poly1() -> Weight {
    Weight::Polynomial { t: 1.0 }
}
fn kernel_n() -> usize {
    128
}
fn kernel_half_width() -> f64 {
    12.0
}
fn probe_count() -> usize {
    64
}
fn kernel_tolerance() -> f64 {
    1e-4
}

/// Two-path check of the kernel form of `V_phi(Op_0(a) f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "xi_symbol")]
    pub symbol: ClosedForm,
    #[serde(default = "unit_gaussian")]
    pub signal: Member,
    #[serde(default = "window1")]
    pub window: Window,
    /// Weight on `R^2`; cancels from the identity.
    #[serde(default = "poly1")]
    pub omega: Weight,
    /// Weight on `R^1`; cancels from the identity.
    #[serde(default = "poly1")]
    pub v: Weight,
    #[serde(default = "kernel_n")]
    pub n: usize,
    #[serde(default = "kernel_half_width")]
    pub half_width: f64,
    /// Explicit probe points `(x, xi)`; when absent a square lattice of
    /// `probe_count` spectrogram samples is used.
    #[serde(default)]
    pub probes: Option<Vec<[f64; 2]>>,
    #[serde(default = "probe_count")]
    pub probe_count: usize,
    #[serde(default = "kernel_tolerance")]
    pub tolerance: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        from_json("{}").expect("empty config is valid")
    }
}

/// Parses a config, rejecting unknown keys.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
}

/// Hex SHA-256 of the scenario name and the canonical JSON of the config.
pub fn config_hash<T: Serialize>(scenario: &str, config: &T) -> Result<String, HarnessError> {
    let json = serde_json::to_string(config).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut h = Sha256::new();
    h.update(scenario.as_bytes());
    h.update([0u8]);
    h.update(json.as_bytes());
    Ok(hex::encode(h.finalize()))
}
