use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mixed::mixed_norm;
use super::modulation::{modulation_norm, ModSpaceSpec, PhaseNorm, PresetNorm};
use super::MixedNormSpec;
use crate::error::{Error, Result};
use crate::lattice::{SampledField, UniformGrid};
use crate::weights::{exponential_bounds, ScanBox, ScanReport, Weight};

/// Smallest number of trials accepted by [`qbf_axiom_check`].
pub const MIN_TRIALS: usize = 100;

/// Empirical constants for the quasi-Banach function space axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QbfReport {
    pub seed: u64,
    pub trials: usize,
    /// Max of `||f(. - x)|| / (v(x) ||f||)` over whole-cell shifts `x`.
    pub translation_ratio: f64,
    /// Max of `||f|| / ||g||` over `|f| <= |g|`.
    pub solidity_ratio: f64,
    /// Max of `||f + g||^r / (||f||^r + ||g||^r)`.
    pub subadditivity_ratio: f64,
    pub r: f64,
}

fn random_field(grid: &UniformGrid, rng: &mut ChaCha8Rng) -> Result<SampledField> {
    // Support in the middle half so shifts by up to a quarter box lose nothing.
    let counts = grid.counts().to_vec();
    let density: f64 = rng.gen_range(0.1..1.0);
    let values = (0..grid.len())
        .map(|i| {
            let idx = grid.unravel(i);
            let inside = idx.iter().zip(&counts).all(|(&j, &n)| 4 * j >= n && 4 * j < 3 * n);
            if inside && rng.gen::<f64>() < density {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SampledField::new(grid.clone(), values)
}

/// Randomized check of translation invariance with respect to `v`, solidity
/// and the `r`-triangle inequality for the mixed norm `spec` on `grid`.
///
/// Deterministic in `seed`. Shifts move whole cells so no interpolation error
/// enters the translation constant.
pub fn qbf_axiom_check(
    spec: &MixedNormSpec,
    v: &Weight,
    grid: &UniformGrid,
    trials: usize,
    seed: u64,
) -> Result<QbfReport> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidProbe(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let basis = spec.validate()?;
    v.check_dim(spec.dim())?;
    let r = spec.r();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut trans, mut solid, mut sub) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let f = random_field(grid, &mut rng)?;
        let g = random_field(grid, &mut rng)?;
        let nf = mixed_norm(&f, spec)?;
        let ng = mixed_norm(&g, spec)?;

        let shift: Vec<isize> = grid
            .counts()
            .iter()
            .map(|&n| {
                let m = (n / 4) as isize;
                rng.gen_range(-m..=m)
            })
            .collect();
        let coords: Vec<f64> = shift.iter().zip(grid.steps()).map(|(&s, h)| s as f64 * h).collect();
        let x = basis.combine(&coords);
        if nf > 0.0 {
            let moved = mixed_norm(&f.shift_cells(&shift), spec)?;
            trans = trans.max(moved / (v.evaluate(&x) * nf));
        }

        let damped = SampledField::new(
            grid.clone(),
            g.values().iter().map(|z| z * rng.gen_range(0.0..=1.0)).collect(),
        )?;
        if ng > 0.0 {
            solid = solid.max(mixed_norm(&damped, spec)? / ng);
        }

        let sum = f.axpby(Complex64::new(1.0, 0.0), &g, Complex64::new(1.0, 0.0))?;
        let denom = nf.powf(r) + ng.powf(r);
        if denom > 0.0 {
            sub = sub.max(mixed_norm(&sum, spec)?.powf(r) / denom);
        }
    }
    Ok(QbfReport {
        seed,
        trials,
        translation_ratio: trans,
        solidity_ratio: solid,
        subadditivity_ratio: sub,
        r,
    })
}

/// Empirical embedding constant between two modulation spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Max of `||f||_2 / ||f||_1` over the ensemble.
    pub constant: f64,
    /// Min of the same ratio; bounded away from zero for equivalent norms.
    pub min_ratio: f64,
    pub argmax: usize,
    pub ratios: Vec<f64>,
    /// `p1 <= p2` and `q1 <= q2`, when both norms are presets of the same kind.
    pub exponents_ordered: Option<bool>,
    /// Sup scan of `w2 / w1` on the given box.
    pub weight_ratio: Option<ScanReport>,
    /// Members with zero source norm, left out of the ratios.
    pub skipped: usize,
}

fn exponents_ordered(a: &PhaseNorm, b: &PhaseNorm) -> Option<bool> {
    match (a, b) {
        (PhaseNorm::Preset(PresetNorm { preset: k1, p: p1, q: q1 }), PhaseNorm::Preset(PresetNorm { preset: k2, p: p2, q: q2 }))
            if k1 == k2 =>
        {
            Some(p1.value() <= p2.value() && q1.value() <= q2.value())
        }
        _ => None,
    }
}

/// `max_f ||f||_{spec2} / ||f||_{spec1}` over an ensemble; with `scan` the
/// weight condition `w2 <~ w1` is checked on `[lo, hi]^{2d}`.
pub fn embedding_check(
    ensemble: &[SampledField],
    spec1: &ModSpaceSpec,
    spec2: &ModSpaceSpec,
    scan: Option<(ScanBox, usize)>,
) -> Result<EmbeddingReport> {
    let pairs: Vec<(f64, f64)> = ensemble
        .par_iter()
        .map(|f| Ok((modulation_norm(f, spec1)?, modulation_norm(f, spec2)?)))
        .collect::<Result<_>>()?;
    let mut ratios = Vec::with_capacity(pairs.len());
    let mut skipped = 0;
    for (n1, n2) in pairs {
        if n1 > 0.0 {
            ratios.push(n2 / n1);
        } else {
            skipped += 1;
        }
    }
    let (argmax, constant) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let weight_ratio = match scan {
        Some((sbox, n)) => {
            let q = Weight::Product {
                factors: vec![spec2.weight.clone(), Weight::Inverse { of: Box::new(spec1.weight.clone()) }],
            };
            Some(exponential_bounds(&q, 0.0, &sbox, n)?.upper)
        }
        None => None,
    };
    Ok(EmbeddingReport {
        constant,
        min_ratio,
        argmax,
        ratios,
        exponents_ordered: exponents_ordered(&spec1.norm, &spec2.norm),
        weight_ratio,
        skipped,
    })
}
