//! Named continuity scenarios. A scenario first checks its hypotheses with
//! the finite-box diagnostics; if they fail the outcome is `Inapplicable`,
//! otherwise the empirical operator norm decides between `Pass` and `Fail`.
//!
//! A pass is boundedness evidence on the configured grids (a finite ratio
//! whose drift along the ladder stays under the tolerance), not a proof.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use modcalc_core::lattice::{fourier_transform, is_phase_split, QuantizationSpec, UniformGrid};
use modcalc_core::norms::{modulation_norm, phase_space_norm, Exponent, ModSpaceSpec, PhaseNorm};
use modcalc_core::pdo::{gamma_membership, phase_grid_for, ClosedForm, GammaReport, Symbol, Verdict};
use modcalc_core::stft::{stft, StftOptions, Window};
use modcalc_core::weights::{classify_pes, weight_compatibility, Classification, ClassifyReport, ScanBox, ScanReport, Weight};

use crate::config::{
    config_hash, from_json, KernelConfig, PropOpContConfig, Side, SpaceConfig, TheoremConfig,
};
use crate::ensemble::Ensemble;
use crate::error::{exit, HarnessError};
use crate::fixtures::FixtureStatus;
use crate::kernel::{default_probes, stft_kernel_crosscheck, KernelReport};
use crate::ratio::{op_norm_ratio, Ladder, RatioProblem, RatioReport};

type Result<T> = std::result::Result<T, HarnessError>;

/// Weights larger than this anywhere on the box make a space scenario ill-posed.
pub const MAX_BOX_WEIGHT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    P32,
    P32b,
    Opcont3,
    Propopcont,
    Sobolev,
    Weightedl2,
    Kernel,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::P32,
        ScenarioKind::P32b,
        ScenarioKind::Opcont3,
        ScenarioKind::Propopcont,
        ScenarioKind::Sobolev,
        ScenarioKind::Weightedl2,
        ScenarioKind::Kernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::P32 => "p32",
            ScenarioKind::P32b => "p32b",
            ScenarioKind::Opcont3 => "opcont3",
            ScenarioKind::Propopcont => "propopcont",
            ScenarioKind::Sobolev => "sobolev",
            ScenarioKind::Weightedl2 => "weightedl2",
            ScenarioKind::Kernel => "kernel",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail { reason: String },
    Inapplicable { reason: String },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Pass => exit::PASS,
            Outcome::Fail { .. } => exit::FAIL,
            Outcome::Inapplicable { .. } => exit::INAPPLICABLE,
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

/// Largest value of `log|a| - r0 |z_k|^(1/s)` on the full box and on its inner half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub r0: f64,
    pub s: f64,
    pub full_log_max: f64,
    pub inner_log_max: f64,
    pub bounded: bool,
}

/// Ratios `||f||_{M^{2,2}_(w_r)} / ||f||_direct` per grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketPoint {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub weight: Weight,
    pub brackets: Vec<BracketPoint>,
    /// `hi / lo` on the finest grid.
    pub width: f64,
    /// Largest relative change of either endpoint between the coarsest and finest grid.
    pub drift: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_class: Option<ClassifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_class: Option<ClassifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_split: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compatibility: Option<ScanReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioKind,
    pub config_hash: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelReport>,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureStatus>,
}

impl ScenarioReport {
    fn new(scenario: ScenarioKind, config_hash: String) -> Self {
        Self {
            scenario,
            config_hash,
            outcome: Outcome::Pass,
            ratio: None,
            identity: None,
            kernel: None,
            diagnostics: Diagnostics::default(),
            fixture: None,
        }
    }

    fn inapplicable(mut self, reason: impl Into<String>) -> Self {
        self.outcome = Outcome::Inapplicable { reason: reason.into() };
        self
    }

    fn fail(&mut self, reason: impl Into<String>) {
        if self.outcome.is_pass() {
            self.outcome = Outcome::Fail { reason: reason.into() };
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    /// Pretty JSON; equal configs give byte-identical output.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Per-member CSV rows for ratio scenarios, per-probe rows for the kernel check.
    pub fn to_csv(&self) -> String {
        if let Some(r) = &self.ratio {
            return r.to_csv();
        }
        let mut out = String::from("x,xi,lhs_re,lhs_im,rhs_re,rhs_im\n");
        if let Some(k) = &self.kernel {
            for p in &k.probes {
                out.push_str(&format!("{:e},{:e},{:e},{:e},{:e},{:e}\n", p.x, p.xi, p.lhs.re, p.lhs.im, p.rhs.re, p.rhs.im));
            }
        }
        out
    }
}

/// The fully defaulted config of a scenario as JSON.
pub fn defaulted_config(kind: ScenarioKind, text: &str) -> Result<serde_json::Value> {
    let v = match kind {
        ScenarioKind::P32 | ScenarioKind::P32b | ScenarioKind::Opcont3 => serde_json::to_value(from_json::<TheoremConfig>(text)?),
        ScenarioKind::Propopcont => serde_json::to_value(from_json::<PropOpContConfig>(text)?),
        ScenarioKind::Sobolev | ScenarioKind::Weightedl2 => serde_json::to_value(from_json::<SpaceConfig>(text)?),
        ScenarioKind::Kernel => serde_json::to_value(from_json::<KernelConfig>(text)?),
    };
    v.map_err(|e| HarnessError::Config(e.to_string()))
}

/// Parses `text` as the config of `kind` and runs the scenario.
pub fn run_scenario(kind: ScenarioKind, text: &str) -> Result<ScenarioReport> {
    match kind {
        ScenarioKind::P32 => scenario_thm_p32(&from_json(text)?),
        ScenarioKind::P32b => scenario_thm_p32b(&from_json(text)?),
        ScenarioKind::Opcont3 => scenario_opcont3(&from_json(text)?),
        ScenarioKind::Propopcont => scenario_prop_opcont(&from_json(text)?),
        ScenarioKind::Sobolev => scenario_sobolev(&from_json(text)?),
        ScenarioKind::Weightedl2 => scenario_weighted_l2(&from_json(text)?),
        ScenarioKind::Kernel => scenario_kernel(&from_json(text)?),
    }
}

fn check_tolerance(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("{name} must be positive, got {v}")))
    }
}

/// Runs the ratio study and turns it into an outcome.
fn ratio_stage(
    report: &mut ScenarioReport,
    symbol: &Symbol,
    quant: &QuantizationSpec,
    source: &ModSpaceSpec,
    target: &ModSpaceSpec,
    ensemble: &Ensemble,
    ladder: &Ladder,
    tolerance: f64,
) -> Result<()> {
    let problem = RatioProblem { symbol, quantization: quant, source, target };
    let r = op_norm_ratio(&problem, ensemble, ladder)?;
    if !r.max_ratio.is_finite() {
        report.fail("the operator-norm ratio is not finite");
    } else if !r.bounded(tolerance) {
        report.fail(format!("ratio drift {:.4} along the grid ladder exceeds {tolerance}", r.drift));
    }
    report.ratio = Some(r);
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Family {
    /// `omega, omega0` moderate for every tested `r`, Roumieu symbol class.
    EveryR,
    /// Moderate for some tested `r`, Beurling symbol class.
    SomeR,
}

fn class_ok(c: &ClassifyReport, family: Family) -> bool {
    match family {
        Family::EveryR => c.classification == Classification::FitsAll,
        Family::SomeR => c.classification != Classification::FitsNone,
    }
}

fn theorem(kind: ScenarioKind, cfg: &TheoremConfig, family: Family) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(kind, config_hash(kind.name(), cfg)?);
    check_tolerance("drift_tolerance", cfg.drift_tolerance)?;
    cfg.ladder.validate()?;
    cfg.ensemble.validate()?;
    cfg.omega.check_dim(2)?;
    cfg.omega0.check_dim(2)?;
    let quant = cfg.quantization.spec(1)?;
    let norm_spec = cfg.norm.resolve(1)?;
    let basis = norm_spec.validate()?;
    let symbol = Symbol::closed(cfg.symbol.clone(), 1)?.with_envelope(cfg.omega0.clone(), cfg.s)?;

    if kind == ScenarioKind::Opcont3 {
        let split = is_phase_split(&basis)?.is_some();
        report.diagnostics.phase_split = Some(split);
        if !split {
            return Ok(report.inapplicable("the ordered basis of the norm is not phase split"));
        }
    }

    let gamma = gamma_membership(&symbol, &cfg.omega0, cfg.s, cfg.gamma.mode, &cfg.gamma.options)?;
    let sbox = ScanBox::symmetric(2, cfg.classify.half_width);
    let omega_class = classify_pes(&cfg.omega, cfg.s, &cfg.classify.r_grid, &sbox, cfg.classify.n)?;
    let omega0_class = classify_pes(&cfg.omega0, cfg.s, &cfg.classify.r_grid, &sbox, cfg.classify.n)?;
    let mut missing = Vec::new();
    if gamma.verdict != Verdict::RoumieuConsistent {
        missing.push("no Gevrey constants fit the symbol against omega0");
    }
    if family == Family::SomeR && !gamma.beurling_trend {
        missing.push("the symbol constants do not stay resolved for every h");
    }
    if !class_ok(&omega_class, family) {
        missing.push("omega fails the weight-class scan");
    }
    if !class_ok(&omega0_class, family) {
        missing.push("omega0 fails the weight-class scan");
    }
    report.diagnostics.gamma = Some(gamma);
    report.diagnostics.omega_class = Some(omega_class);
    report.diagnostics.omega0_class = Some(omega0_class);
    if !missing.is_empty() {
        return Ok(report.inapplicable(missing.join("; ")));
    }

    let source = ModSpaceSpec {
        window: cfg.window.clone(),
        weight: Weight::Product { factors: vec![cfg.omega0.clone(), cfg.omega.clone()] },
        norm: cfg.norm.clone(),
    };
    let target = ModSpaceSpec { window: cfg.window.clone(), weight: cfg.omega.clone(), norm: cfg.norm.clone() };
    ratio_stage(&mut report, &symbol, &quant, &source, &target, &cfg.ensemble, &cfg.ladder, cfg.drift_tolerance)?;
    Ok(report)
}

/// `Op_A(a)` on `M(omega0 omega, B) -> M(omega, B)`, weights moderate for every `r`.
pub fn scenario_thm_p32(cfg: &TheoremConfig) -> Result<ScenarioReport> {
    theorem(ScenarioKind::P32, cfg, Family::EveryR)
}

/// As [`scenario_thm_p32`] with weights moderate for some `r` and the
/// every-`h` symbol sweep.
pub fn scenario_thm_p32b(cfg: &TheoremConfig) -> Result<ScenarioReport> {
    theorem(ScenarioKind::P32b, cfg, Family::SomeR)
}

/// As [`scenario_thm_p32`] with a mixed quasi-norm over a phase-split basis.
pub fn scenario_opcont3(cfg: &TheoremConfig) -> Result<ScenarioReport> {
    theorem(ScenarioKind::Opcont3, cfg, Family::EveryR)
}

/// `Op_0(a)` on `M(omega1, B) -> M(omega2, B)` under the weight compatibility
/// condition, with `a` in `M^{inf,1}_{(omega0)}`.
pub fn scenario_prop_opcont(cfg: &PropOpContConfig) -> Result<ScenarioReport> {
    let kind = ScenarioKind::Propopcont;
    let mut report = ScenarioReport::new(kind, config_hash(kind.name(), cfg)?);
    check_tolerance("drift_tolerance", cfg.drift_tolerance)?;
    cfg.ladder.validate()?;
    cfg.ensemble.validate()?;
    cfg.norm.resolve(1)?.validate()?;
    let symbol = Symbol::closed(cfg.symbol.clone(), 1)?;

    let compat = weight_compatibility(
        &cfg.omega1,
        &cfg.omega2,
        &cfg.omega0,
        &ScanBox::symmetric(2, cfg.compat.half_width),
        cfg.compat.n,
    )?;
    let compatible = compat.bounded;
    report.diagnostics.compatibility = Some(compat);
    if !compatible {
        return Ok(report.inapplicable("omega2 / (omega1 omega0) is not bounded on the scanned box"));
    }

    let grid = UniformGrid::nodal(2, cfg.symbol_norm.n, cfg.symbol_norm.half_width)?;
    let sampled = symbol.sample_on(&grid)?;
    let spec = stft(&sampled, &Window::gaussian(2), &StftOptions::default())?;
    let m_inf_1 = ModSpaceSpec {
        window: Window::gaussian(2),
        weight: cfg.omega0.clone(),
        norm: PhaseNorm::lpq1(Exponent::Infinity, Exponent::Finite(1.0)),
    };
    let symbol_norm = phase_space_norm(&spec, &m_inf_1)?;
    report.diagnostics.symbol_norm = Some(symbol_norm);
    if !symbol_norm.is_finite() {
        return Ok(report.inapplicable("the symbol norm in M^{inf,1}_(omega0) is not finite"));
    }

    let source = ModSpaceSpec { window: cfg.window.clone(), weight: cfg.omega1.clone(), norm: cfg.norm.clone() };
    let target = ModSpaceSpec { window: cfg.window.clone(), weight: cfg.omega2.clone(), norm: cfg.norm.clone() };
    let quant = QuantizationSpec::kohn_nirenberg(1);
    ratio_stage(&mut report, &symbol, &quant, &source, &target, &cfg.ensemble, &cfg.ladder, cfg.drift_tolerance)?;
    Ok(report)
}

/// `exp(r |z_k|^(1/s))` on phase space, `k` the weighted side.
pub fn space_weight(side: Side, r: f64, s: f64) -> Weight {
    if r == 0.0 {
        Weight::one()
    } else {
        Weight::Project { coords: vec![side.coord()], of: Box::new(Weight::ExpPower { r, s }) }
    }
}

/// The defining norm: `(int |F f|^2 e^{2 r |xi|^(1/s)})^(1/2)` for the
/// frequency side, `(int |f|^2 e^{2 r |x|^(1/s)})^(1/2)` for the position side.
pub fn direct_space_norm(f: &modcalc_core::lattice::SampledField, side: Side, r: f64, s: f64) -> Result<f64> {
    let field = match side {
        Side::Frequency => fourier_transform(f)?,
        Side::Position => f.clone(),
    };
    let g = field.grid();
    let vol = g.cell_volume();
    let sum: f64 = (0..field.len())
        .map(|i| {
            let t = g.point_of_flat(i)[0].abs();
            field.values()[i].norm_sqr() * (2.0 * r * t.powf(1.0 / s)).exp()
        })
        .sum();
    Ok((sum * vol).sqrt())
}

fn space(kind: ScenarioKind, side: Side, cfg: &SpaceConfig) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(kind, config_hash(kind.name(), cfg)?);
    check_tolerance("drift_tolerance", cfg.drift_tolerance)?;
    check_tolerance("bracket_width", cfg.bracket_width)?;
    check_tolerance("growth_tolerance", cfg.growth_tolerance)?;
    if !(cfg.s > 0.0 && cfg.s.is_finite()) || !(cfg.r >= 0.0 && cfg.r.is_finite()) || !cfg.r0.is_finite() {
        return Err(HarnessError::Config("space scenarios need r >= 0, finite r0 and s > 0".into()));
    }
    cfg.ladder.validate()?;
    cfg.ensemble.validate()?;
    let quant = cfg.quantization.spec(1)?;
    let symbol = Symbol::closed(cfg.symbol_for(side), 1)?;
    let finest = cfg.ladder.finest()?;
    let phase = phase_grid_for(&finest)?;

    // The weight at the edge of the box must stay representable.
    let reach = phase.axis_coords(side.coord()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = cfg.r * reach.powf(1.0 / cfg.s);
    if edge > MAX_BOX_WEIGHT.ln() {
        return Err(HarnessError::Config(format!(
            "the weight reaches e^{edge:.1} on the box, above {MAX_BOX_WEIGHT:e}; lower r or the box"
        )));
    }

    // Growth of the symbol against exp(r0 |.|^(1/s)) on the weighted side.
    let q = 0.25 * (1.0 + 1e-12);
    let half: Vec<f64> = (0..2).map(|k| phase.axis_coords(k).iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    let (mut full, mut inner) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..phase.len() {
        let z = phase.point_of_flat(i);
        let a = symbol.evaluate(&z).expect("closed forms evaluate").norm();
        let l = a.ln() - cfg.r0 * z[side.coord()].abs().powf(1.0 / cfg.s);
        full = full.max(l);
        if z.iter().zip(&half).all(|(c, h)| c.abs() <= 2.0 * q * h) {
            inner = inner.max(l);
        }
    }
    let bounded = full.is_finite() && full - inner <= cfg.growth_tolerance;
    report.diagnostics.growth = Some(GrowthReport { r0: cfg.r0, s: cfg.s, full_log_max: full, inner_log_max: inner, bounded });
    if !bounded {
        return Ok(report.inapplicable("the symbol outgrows exp(r0 |.|^(1/s)) toward the box boundary"));
    }

    // Identity: the modulation norm with w_r against the defining norm.
    let weight = space_weight(side, cfg.r, cfg.s);
    let m22 = ModSpaceSpec {
        window: cfg.window.clone(),
        weight: weight.clone(),
        norm: PhaseNorm::lpq1(Exponent::Finite(2.0), Exponent::Finite(2.0)),
    };
    let members = cfg.ensemble.members()?;
    let mut brackets = Vec::new();
    for grid in cfg.ladder.grids()? {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for m in &members {
            let f = m.sample(&grid)?;
            let direct = direct_space_norm(&f, side, cfg.r, cfg.s)?;
            if direct == 0.0 {
                continue;
            }
            let ratio = modulation_norm(&f, &m22)? / direct;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        brackets.push(BracketPoint { n: grid.len(), lo, hi });
    }
    let first = brackets.first().expect("validated ladder");
    let last = brackets.last().expect("validated ladder");
    let width = last.hi / last.lo;
    let drift = ((last.lo - first.lo).abs() / last.lo).max((last.hi - first.hi).abs() / last.hi);
    report.identity = Some(IdentityReport { weight: weight.clone(), brackets, width, drift });
    if !(width.is_finite() && width < cfg.bracket_width) {
        report.fail(format!("identity bracket width {width:.4} is not below {}", cfg.bracket_width));
    } else if !(drift < cfg.drift_tolerance) {
        report.fail(format!("identity bracket drifts by {drift:.4} under refinement"));
    }

    // Mapping from the r space into the r - r0 space.
    let source = m22.clone();
    let target = ModSpaceSpec { weight: space_weight(side, cfg.r - cfg.r0, cfg.s), ..m22 };
    ratio_stage(&mut report, &symbol, &quant, &source, &target, &cfg.ensemble, &cfg.ladder, cfg.drift_tolerance)?;
    Ok(report)
}

/// Sobolev spaces `H^2_r = M^{2,2}_(w_r)` with `w_r = e^{r |xi|^(1/s)}`.
pub fn scenario_sobolev(cfg: &SpaceConfig) -> Result<ScenarioReport> {
    space(ScenarioKind::Sobolev, Side::Frequency, cfg)
}

/// Weighted Lebesgue spaces `L^2_r = M^{2,2}_(w_r)` with `w_r = e^{r |x|^(1/s)}`.
pub fn scenario_weighted_l2(cfg: &SpaceConfig) -> Result<ScenarioReport> {
    space(ScenarioKind::Weightedl2, Side::Position, cfg)
}

/// The kernel identity check as a scenario.
pub fn scenario_kernel(cfg: &KernelConfig) -> Result<ScenarioReport> {
    let kind = ScenarioKind::Kernel;
    let mut report = ScenarioReport::new(kind, config_hash(kind.name(), cfg)?);
    check_tolerance("tolerance", cfg.tolerance)?;
    let grid = UniformGrid::nodal(1, cfg.n, cfg.half_width)?;
    let f = cfg.signal.sample(&grid)?;
    let symbol = Symbol::closed(cfg.symbol.clone(), 1)?;
    let probes: Vec<(f64, f64)> = match &cfg.probes {
        Some(p) => p.iter().map(|q| (q[0], q[1])).collect(),
        None => default_probes(&f, cfg.probe_count)?,
    };
    let k = stft_kernel_crosscheck(&symbol, &f, &cfg.window, &cfg.omega, &cfg.v, &probes)?;
    if !(k.deviation < cfg.tolerance) {
        report.fail(format!("kernel deviation {:e} is not below {:e}", k.deviation, cfg.tolerance));
    }
    report.kernel = Some(k);
    Ok(report)
}

/// A theorem config with the given symbol and weights, the rest defaulted.
pub fn theorem_config(symbol: ClosedForm, omega: Weight, omega0: Weight, s: f64) -> TheoremConfig {
    TheoremConfig { symbol, omega, omega0, s, ..TheoremConfig::default() }
}
