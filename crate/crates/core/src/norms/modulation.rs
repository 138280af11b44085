use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mixed::{align_to_basis, mixed_norm};
use super::{Exponent, MixedNormSpec};
use crate::error::{Error, Result};
use crate::lattice::{OrderedBasis, SampledField};
use crate::stft::{stft, Spectrogram, StftOptions, Window};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `(int (int |F|^p dx)^{q/p} dxi)^{1/q}`: position inner.
    Lpq1,
    /// `(int (int |F|^q dxi)^{p/q} dx)^{1/p}`: frequency inner.
    Lpq2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetNorm {
    pub preset: Preset,
    pub p: Exponent,
    pub q: Exponent,
}

/// Norm on phase space `R^{2d}`, ordered `(x, xi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseNorm {
    Preset(PresetNorm),
    Mixed(MixedNormSpec),
}

impl PhaseNorm {
    pub fn lpq1(p: Exponent, q: Exponent) -> Self {
        PhaseNorm::Preset(PresetNorm { preset: Preset::Lpq1, p, q })
    }

    pub fn lpq2(p: Exponent, q: Exponent) -> Self {
        PhaseNorm::Preset(PresetNorm { preset: Preset::Lpq2, p, q })
    }

    /// The mixed-norm spec on `R^{2d}` this norm stands for.
    pub fn resolve(&self, d: usize) -> Result<MixedNormSpec> {
        match self {
            PhaseNorm::Mixed(m) => {
                if m.dim() != 2 * d {
                    return Err(Error::InvalidDimension(format!(
                        "phase-space norm has {} exponents, expected {}",
                        m.dim(),
                        2 * d
                    )));
                }
                Ok(m.clone())
            }
            PhaseNorm::Preset(PresetNorm { preset, p, q }) => {
                let (order, exps): (Vec<usize>, Vec<Exponent>) = match preset {
                    Preset::Lpq1 => ((0..2 * d).collect(), [vec![*p; d], vec![*q; d]].concat()),
                    Preset::Lpq2 => ((d..2 * d).chain(0..d).collect(), [vec![*q; d], vec![*p; d]].concat()),
                };
                Ok(MixedNormSpec::new(exps, OrderedBasis::permuted_standard(&order)?, Weight::one()))
            }
        }
    }
}

/// `M(w, B)`: the norm `|| V_phi f w ||_B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModSpaceSpec {
    pub window: Window,
    /// Weight on phase space `R^{2d}`.
    pub weight: Weight,
    pub norm: PhaseNorm,
}

impl ModSpaceSpec {
    /// `M^{p,q}_{(w)}` with the unit Gaussian window.
    pub fn lpq(d: usize, p: Exponent, q: Exponent, weight: Weight) -> Self {
        Self {
            window: Window::gaussian(d),
            weight,
            norm: PhaseNorm::lpq1(p, q),
        }
    }
}

/// Norm of a spectrogram in `M(w, B)`.
pub fn phase_space_norm(spec_field: &Spectrogram, spec: &ModSpaceSpec) -> Result<f64> {
    let d = spec_field.dim();
    spec.weight.check_dim(2 * d)?;
    let norm = spec.norm.resolve(d)?;
    let grid = spec_field.field.grid();
    let values: Vec<Complex64> = spec_field
        .field
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.norm() == 0.0 {
                v
            } else {
                v * spec.weight.evaluate(&grid.point_of_flat(i))
            }
        })
        .collect();
    let weighted = SampledField::new(grid.clone(), values)?;
    let basis = norm.validate()?;
    mixed_norm(&align_to_basis(&weighted, &basis)?, &norm)
}

/// `||f||_{M(w, B)} = || V_phi f w ||_B` on the full-stride spectrogram.
pub fn modulation_norm(f: &SampledField, spec: &ModSpaceSpec) -> Result<f64> {
    let s = stft(f, &spec.window, &StftOptions::default())?;
    phase_space_norm(&s, spec)
}
