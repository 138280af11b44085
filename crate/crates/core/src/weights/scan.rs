//! Tensor-grid scans of weight ratios.
//!
//! A scan evaluates a log-ratio on every sample (or pair of samples) of
//! `[lo, hi]^d` with `n` points per axis, endpoints included. Besides the
//! maximum it records the maximum over the samples lying in the inner half
//! box. When the two agree the supremum is attained inside the box
//! (`saturated`); when the full-box value keeps growing past the inner value
//! the ratio is still climbing at the boundary and the scan cannot certify
//! a finite constant. `bounded` is `finite && saturated`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Weight;
use crate::error::{Error, Result};
use crate::util::{exp_or_inf, float_or_string};

/// Relative tolerance (in log scale) for calling a scan saturated.
const SATURATION_TOL: f64 = 1e-8;

/// The scanned box `[lo, hi]^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBox {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl ScanBox {
    pub fn symmetric(dim: usize, half_width: f64) -> Self {
        Self {
            dim,
            lo: -half_width,
            hi: half_width,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidDimension("scan box needs dim >= 1".into()));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::InvalidGrid(format!(
                "scan box [{}, {}] is empty or infinite",
                self.lo, self.hi
            )));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("scans need n >= 8, got {n}")));
        }
        Ok(())
    }

    /// Written as `center + m * half / (n - 1)` with even-symmetric integer `m`
    /// so mirrored samples cancel exactly and boxes doubled with `2n - 1`
    /// samples reproduce every old sample bit for bit.
    fn axis(&self, n: usize) -> Vec<f64> {
        let center = 0.5 * (self.lo + self.hi);
        let half = 0.5 * (self.hi - self.lo);
        (0..n)
            .map(|i| center + (2.0 * i as f64 - (n - 1) as f64) * half / (n - 1) as f64)
            .collect()
    }

    /// All sample points and whether each lies in the inner half box.
    fn samples(&self, n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
        let axis = self.axis(n);
        let center = 0.5 * (self.lo + self.hi);
        let quarter = 0.25 * (self.hi - self.lo) * (1.0 + 1e-12);
        let total = n.pow(self.dim as u32);
        let mut points = Vec::with_capacity(total);
        let mut inner = Vec::with_capacity(total);
        for mut flat in 0..total {
            let mut p = vec![0.0; self.dim];
            for k in (0..self.dim).rev() {
                p[k] = axis[flat % n];
                flat /= n;
            }
            inner.push(p.iter().all(|c| (c - center).abs() <= quarter));
            points.push(p);
        }
        (points, inner)
    }
}

/// Where and on what the scan ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub evaluations: usize,
}

/// Result of a supremum scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    /// `exp(log_constant)`, `+inf` on overflow.
    #[serde(with = "float_or_string")]
    pub constant: f64,
    #[serde(with = "float_or_string")]
    pub log_constant: f64,
    /// The maximizing sample (a pair for two-point scans).
    pub max_ratio_point: Vec<Vec<f64>>,
    /// The maximum restricted to the inner half box.
    #[serde(with = "float_or_string")]
    pub inner_log_constant: f64,
    pub saturated: bool,
    pub bounded: bool,
    pub grid_spec: ScanGrid,
}

/// Moderateness of a weight: sup of `w(x1 + x2) / (w(x1) v(x2))`.
pub type ModerationReport = ScanReport;

struct Best {
    log: f64,
    at: (usize, usize),
    inner: f64,
}

/// Deterministic parallel max over all pairs `(i, j)`.
fn pair_scan<F>(count: usize, inner: &[bool], f: F) -> Best
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let rows: Vec<Best> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut b = Best {
                log: f64::NEG_INFINITY,
                at: (i, 0),
                inner: f64::NEG_INFINITY,
            };
            for j in 0..count {
                let mut v = f(i, j);
                if v.is_nan() {
                    v = f64::INFINITY;
                }
                if v > b.log {
                    b.log = v;
                    b.at = (i, j);
                }
                if inner[i] && inner[j] && v > b.inner {
                    b.inner = v;
                }
            }
            b
        })
        .collect();
    reduce(rows)
}

fn reduce(rows: Vec<Best>) -> Best {
    let mut best = Best {
        log: f64::NEG_INFINITY,
        at: (0, 0),
        inner: f64::NEG_INFINITY,
    };
    for r in rows {
        if r.log > best.log {
            best.log = r.log;
            best.at = r.at;
        }
        best.inner = best.inner.max(r.inner);
    }
    best
}

fn report(best: Best, points: &[Vec<f64>], pair: bool, sbox: &ScanBox, n: usize, evaluations: usize) -> ScanReport {
    let saturated = best.log.is_finite()
        && best.log - best.inner <= SATURATION_TOL * (1.0 + best.log.abs());
    let max_ratio_point = if pair {
        vec![points[best.at.0].clone(), points[best.at.1].clone()]
    } else {
        vec![points[best.at.0].clone()]
    };
    let constant = exp_or_inf(best.log);
    ScanReport {
        constant,
        log_constant: best.log,
        max_ratio_point,
        inner_log_constant: best.inner,
        saturated,
        bounded: saturated && constant.is_finite(),
        grid_spec: ScanGrid {
            dim: sbox.dim,
            lo: sbox.lo,
            hi: sbox.hi,
            n,
            evaluations,
        },
    }
}

/// Sup over sampled `(x1, x2)` in the box of `w(x1 + x2) / (w(x1) v(x2))`.
pub fn moderation_constant(w: &Weight, v: &Weight, sbox: &ScanBox, n: usize) -> Result<ModerationReport> {
    sbox.validate(n)?;
    w.check_dim(sbox.dim)?;
    v.check_dim(sbox.dim)?;
    let (points, inner) = sbox.samples(n);
    let lw: Vec<f64> = points.iter().map(|p| w.log_eval(p)).collect();
    let lv: Vec<f64> = points.iter().map(|p| v.log_eval(p)).collect();
    let best = pair_scan(points.len(), &inner, |i, j| {
        let sum: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a + b).collect();
        w.log_eval(&sum) - lw[i] - lv[j]
    });
    let evals = points.len() * points.len();
    Ok(report(best, &points, true, sbox, n, evals))
}

/// How a weight relates to the family `exp(r |x|^(1/s))` over the tested `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Bounded for every tested `r`: consistent with the smallest class.
    FitsAll,
    /// Bounded for some tested `r`.
    FitsSome,
    FitsNone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyEntry {
    pub r: f64,
    pub report: ModerationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub s: f64,
    pub classification: Classification,
    pub smallest_bounded_r: Option<f64>,
    pub entries: Vec<ClassifyEntry>,
}

/// Runs [`moderation_constant`] against `v = exp(r |x|^(1/s))` for each `r`.
pub fn classify_pes(w: &Weight, s: f64, r_grid: &[f64], sbox: &ScanBox, n: usize) -> Result<ClassifyReport> {
    if r_grid.is_empty() {
        return Err(Error::InvalidWeight("r grid is empty".into()));
    }
    if r_grid.windows(2).any(|p| !(p[1] > p[0])) || r_grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidWeight("r grid must be finite, nonnegative and increasing".into()));
    }
    let entries = r_grid
        .iter()
        .map(|&r| {
            let v = Weight::ExpPower { r, s };
            moderation_constant(w, &v, sbox, n).map(|report| ClassifyEntry { r, report })
        })
        .collect::<Result<Vec<_>>>()?;
    let bounded = entries.iter().filter(|e| e.report.bounded).count();
    let classification = if bounded == entries.len() {
        Classification::FitsAll
    } else if bounded > 0 {
        Classification::FitsSome
    } else {
        Classification::FitsNone
    };
    let smallest_bounded_r = entries.iter().find(|e| e.report.bounded).map(|e| e.r);
    Ok(ClassifyReport {
        s,
        classification,
        smallest_bounded_r,
        entries,
    })
}

/// Sup over `(x, xi, y, eta)` of
/// `w2(x, xi) / (w1(y, eta) w0(x, eta, xi - eta, y - x))`.
///
/// `w1`, `w2` live on R^{2d} and `w0` on R^{4d}; `sbox.dim` is `2d`.
pub fn weight_compatibility(
    w1: &Weight,
    w2: &Weight,
    w0: &Weight,
    sbox: &ScanBox,
    n: usize,
) -> Result<ScanReport> {
    sbox.validate(n)?;
    if sbox.dim % 2 != 0 {
        return Err(Error::InvalidDimension(
            "compatibility scans run on phase space R^{2d}".into(),
        ));
    }
    let d = sbox.dim / 2;
    w1.check_dim(2 * d)?;
    w2.check_dim(2 * d)?;
    w0.check_dim(4 * d)?;
    let (points, inner) = sbox.samples(n);
    let l2: Vec<f64> = points.iter().map(|p| w2.log_eval(p)).collect();
    let l1: Vec<f64> = points.iter().map(|p| w1.log_eval(p)).collect();
    let best = pair_scan(points.len(), &inner, |i, j| {
        let (x, xi) = points[i].split_at(d);
        let (y, eta) = points[j].split_at(d);
        let mut z = Vec::with_capacity(4 * d);
        z.extend_from_slice(x);
        z.extend_from_slice(eta);
        z.extend(xi.iter().zip(eta).map(|(a, b)| a - b));
        z.extend(y.iter().zip(x).map(|(a, b)| a - b));
        l2[i] - l1[j] - w0.log_eval(&z)
    });
    let evals = points.len() * points.len();
    Ok(report(best, &points, true, sbox, n, evals))
}

/// Two-sided exponential bound `e^{-r|x|} <~ w(x) <~ e^{r|x|}` on the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialBoundsReport {
    pub r: f64,
    /// Sup of `w(x) e^{-r|x|}`.
    pub upper: ScanReport,
    /// Sup of `e^{-r|x|} / w(x)`.
    pub lower: ScanReport,
}

/// Diagnostic only: no weight class is attached to the outcome.
pub fn exponential_bounds(w: &Weight, r: f64, sbox: &ScanBox, n: usize) -> Result<ExponentialBoundsReport> {
    sbox.validate(n)?;
    w.check_dim(sbox.dim)?;
    let (points, inner) = sbox.samples(n);
    let single = |sign: f64| {
        let rows: Vec<Best> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                let v = sign * w.log_eval(p) - r * norm;
                Best {
                    log: v,
                    at: (i, i),
                    inner: if inner[i] { v } else { f64::NEG_INFINITY },
                }
            })
            .collect();
        report(reduce(rows), &points, false, sbox, n, points.len())
    };
    Ok(ExponentialBoundsReport {
        r,
        upper: single(1.0),
        lower: single(-1.0),
    })
}
