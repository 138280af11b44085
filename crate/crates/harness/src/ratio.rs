use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use modcalc_core::lattice::{QuantizationSpec, SampledField, UniformGrid};
use modcalc_core::norms::{embedding_check, modulation_norm, ModSpaceSpec};
use modcalc_core::stft::Window;
use modcalc_core::pdo::{apply_op, ApplyMethod, Symbol};
use modcalc_core::{Complex64, Error, Result};

use crate::ensemble::{Ensemble, Member};

fn default_sizes() -> Vec<usize> {
    vec![128, 192, 256]
}

fn default_half_width() -> f64 {
    12.0
}

/// Signal grids `nodal(1, N, half_width)` for increasing `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ladder {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

impl Default for Ladder {
    fn default() -> Self {
        Self { sizes: default_sizes(), half_width: default_half_width() }
    }
}

impl Ladder {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidGrid("the grid ladder must be nonempty and strictly increasing".into()));
        }
        if self.sizes[0] < 8 {
            return Err(Error::InvalidGrid("ladder grids need at least 8 samples".into()));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidGrid("ladder half width must be positive".into()));
        }
        Ok(())
    }

    pub fn grids(&self) -> Result<Vec<UniformGrid>> {
        self.validate()?;
        self.sizes.iter().map(|&n| UniformGrid::nodal(1, n, self.half_width)).collect()
    }

    pub fn finest(&self) -> Result<UniformGrid> {
        UniformGrid::nodal(1, *self.sizes.last().ok_or_else(|| Error::InvalidGrid("empty ladder".into()))?, self.half_width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRatio {
    pub index: usize,
    pub ratio: f64,
    /// Source norm of the member before normalization.
    pub source_norm: f64,
    /// Target norm of the image of the normalized member.
    pub target_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub n: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    pub half_width: f64,
    pub step: f64,
}

/// Empirical operator norm over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    /// Max of the member ratios on the finest grid.
    pub max_ratio: f64,
    /// Member ratios on the finest grid.
    pub ratios: Vec<MemberRatio>,
    pub argmax: usize,
    pub argmax_member: Member,
    pub grid: GridMeta,
    /// `max_ratio` on every grid of the ladder, increasing `N`.
    pub trend: Vec<TrendPoint>,
    /// `(max - min) / max` of the trend values.
    pub drift: f64,
    /// Members with zero source norm, left out.
    pub skipped: usize,
}

impl RatioReport {
    /// Finite ratios whose drift along the ladder stays below `tolerance`.
    pub fn bounded(&self, tolerance: f64) -> bool {
        self.trend.iter().all(|t| t.max_ratio.is_finite()) && self.drift.is_finite() && self.drift < tolerance
    }

    /// One row per member: index, ratio, source norm, target norm.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,ratio,source_norm,target_norm\n");
        for m in &self.ratios {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", m.index, m.ratio, m.source_norm, m.target_norm));
        }
        out
    }
}

/// Operator and spaces of a ratio study.
#[derive(Debug, Clone)]
pub struct RatioProblem<'a> {
    pub symbol: &'a Symbol,
    pub quantization: &'a QuantizationSpec,
    pub source: &'a ModSpaceSpec,
    pub target: &'a ModSpaceSpec,
}

/// `f / ||f||_space` and the norm of `f`; `None` when the norm is zero or not finite.
pub fn normalize(f: &SampledField, space: &ModSpaceSpec) -> Result<Option<(SampledField, f64)>> {
    let raw = modulation_norm(f, space)?;
    if raw == 0.0 || !raw.is_finite() {
        return Ok(None);
    }
    Ok(Some((f.scale(Complex64::new(1.0 / raw, 0.0))?, raw)))
}

/// Ratios of all members on one grid; `None` for members with zero source norm.
pub fn member_ratios(problem: &RatioProblem, members: &[Member], grid: &UniformGrid) -> Result<Vec<Option<MemberRatio>>> {
    members
        .par_iter()
        .enumerate()
        .map(|(index, m)| {
            let Some((g, raw)) = normalize(&m.sample(grid)?, problem.source)? else {
                return Ok(None);
            };
            let source = modulation_norm(&g, problem.source)?;
            let image = apply_op(problem.symbol, problem.quantization, &g, ApplyMethod::Fast)?;
            let target = modulation_norm(&image, problem.target)?;
            Ok(Some(MemberRatio { index, ratio: target / source, source_norm: raw, target_norm: target }))
        })
        .collect()
}

/// `||Op_A(a) f||_target / ||f||_source` over the ensemble, on every grid of the ladder.
pub fn op_norm_ratio(problem: &RatioProblem, ensemble: &Ensemble, ladder: &Ladder) -> Result<RatioReport> {
    let members = ensemble.members()?;
    let grids = ladder.grids()?;
    let mut trend = Vec::with_capacity(grids.len());
    let mut last = Vec::new();
    let mut skipped = 0;
    for grid in &grids {
        let rows = member_ratios(problem, &members, grid)?;
        skipped = rows.iter().filter(|r| r.is_none()).count();
        last = rows.into_iter().flatten().collect::<Vec<_>>();
        let max = last.iter().map(|m| m.ratio).fold(f64::NEG_INFINITY, f64::max);
        trend.push(TrendPoint { n: grid.len(), max_ratio: max });
    }
    if last.is_empty() {
        return Err(Error::InvalidField("every ensemble member has zero source norm".into()));
    }
    let (argmax, max_ratio) = last
        .iter()
        .map(|m| (m.index, m.ratio))
        .fold((0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
    let hi = trend.iter().map(|t| t.max_ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = trend.iter().map(|t| t.max_ratio).fold(f64::INFINITY, f64::min);
    let drift = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let finest = grids.last().expect("validated ladder");
    Ok(RatioReport {
        max_ratio,
        ratios: last,
        argmax,
        argmax_member: members[argmax].clone(),
        grid: GridMeta { n: finest.len(), half_width: ladder.half_width, step: finest.steps()[0] },
        trend,
        drift,
        skipped,
    })
}

/// Effect of swapping the analysis window on one grid.
///
/// With `R_k = max_f ||T f||_{target_k} / ||f||_{source_k}` for windows
/// `k = 1, 2`, every member satisfies
/// `ratio_2(f) <= (||T f||_{t2} / ||T f||_{t1}) ratio_1(f) (||f||_{s1} / ||f||_{s2})`,
/// so `R_2 <= target_constant * R_1 * source_constant` with the two
/// empirical norm-equivalence constants taken over the images and the members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRobustness {
    pub ratio_first: f64,
    pub ratio_second: f64,
    /// `max ||T f||_{t2} / ||T f||_{t1}` over the members.
    pub target_constant: f64,
    /// `max ||f||_{s1} / ||f||_{s2}` over the members.
    pub source_constant: f64,
}

impl WindowRobustness {
    /// `R_2 <= target_constant * R_1 * source_constant` up to rounding.
    pub fn holds(&self) -> bool {
        self.ratio_second <= self.target_constant * self.ratio_first * self.source_constant * (1.0 + 1e-12)
    }
}

/// Ratio study of `problem` against the same study with `window` in both spaces.
pub fn window_robustness(problem: &RatioProblem, window: &Window, ensemble: &Ensemble, grid: &UniformGrid) -> Result<WindowRobustness> {
    let source2 = ModSpaceSpec { window: window.clone(), ..problem.source.clone() };
    let target2 = ModSpaceSpec { window: window.clone(), ..problem.target.clone() };
    let second = RatioProblem { source: &source2, target: &target2, ..problem.clone() };
    let members = ensemble.members()?;
    let r1 = member_ratios(problem, &members, grid)?;
    let r2 = member_ratios(&second, &members, grid)?;
    let fields: Vec<SampledField> = members.iter().map(|m| m.sample(grid)).collect::<Result<_>>()?;
    let images: Vec<SampledField> = fields
        .iter()
        .map(|f| apply_op(problem.symbol, problem.quantization, f, ApplyMethod::Fast))
        .collect::<Result<_>>()?;
    let target = embedding_check(&images, problem.target, &target2, None)?;
    let source = embedding_check(&fields, &source2, problem.source, None)?;
    let max = |rows: Vec<Option<MemberRatio>>| rows.into_iter().flatten().map(|m| m.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(WindowRobustness {
        ratio_first: max(r1),
        ratio_second: max(r2),
        target_constant: target.constant,
        source_constant: source.constant,
    })
}
