//! Seeded test signals for operator-norm estimates.
//!
//! Members are drawn one after another from a single ChaCha stream, so the
//! first `n` members of an ensemble do not depend on `count`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use modcalc_core::lattice::{SampledField, UniformGrid};
use modcalc_core::stft::hermite_function;
use modcalc_core::{Complex64, Error, Result};

fn default_center() -> f64 {
    3.0
}
fn default_modulation() -> f64 {
    3.0
}
fn default_chirp() -> f64 {
    0.3
}
fn default_width() -> [f64; 2] {
    [0.7, 1.5]
}
fn default_atoms() -> usize {
    3
}

/// Parameter ranges of Gaussian chirps `e^{-(x-c)^2/(2 w^2)} e^{i(k x + b x^2)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpRanges {
    /// `|c| <= center`.
    #[serde(default = "default_center")]
    pub center: f64,
    /// `|k| <= modulation`.
    #[serde(default = "default_modulation")]
    pub modulation: f64,
    /// `|b| <= chirp`.
    #[serde(default = "default_chirp")]
    pub chirp: f64,
    #[serde(default = "default_width")]
    pub width: [f64; 2],
}

impl Default for ChirpRanges {
    fn default() -> Self {
        Self {
            center: default_center(),
            modulation: default_modulation(),
            chirp: default_chirp(),
            width: default_width(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Ensemble {
    GaussianChirps {
        count: usize,
        seed: u64,
        #[serde(default)]
        ranges: ChirpRanges,
    },
    /// `sum_{n <= max_order} c_n h_n(x - c)` with random complex `c_n`.
    HermiteMix { max_order: usize, count: usize, seed: u64 },
    /// Sums of `atoms` unit-width Gaussian atoms at random positions and frequencies.
    GaborCloud {
        count: usize,
        seed: u64,
        #[serde(default = "default_atoms")]
        atoms: usize,
    },
}

impl Default for Ensemble {
    fn default() -> Self {
        Ensemble::GaussianChirps { count: 8, seed: 1, ranges: ChirpRanges::default() }
    }
}

/// Parameters of one member; enough to resample it on any grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Member {
    Chirp { center: f64, width: f64, modulation: f64, chirp: f64 },
    Hermite { shift: f64, coefficients: Vec<Complex64> },
    Cloud { atoms: Vec<Atom> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub amplitude: Complex64,
    pub center: f64,
    pub frequency: f64,
}

fn sym(rng: &mut ChaCha8Rng, half: f64) -> f64 {
    if half > 0.0 {
        rng.gen_range(-half..=half)
    } else {
        0.0
    }
}

impl Ensemble {
    pub fn count(&self) -> usize {
        match self {
            Ensemble::GaussianChirps { count, .. } | Ensemble::HermiteMix { count, .. } | Ensemble::GaborCloud { count, .. } => *count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidField(m.to_string()));
        match self {
            _ if self.count() == 0 => bad("ensembles need at least one member"),
            Ensemble::GaussianChirps { ranges, .. } => {
                let [lo, hi] = ranges.width;
                if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                    return bad("chirp widths need 0 < lo <= hi");
                }
                if [ranges.center, ranges.modulation, ranges.chirp].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return bad("chirp ranges must be finite and nonnegative");
                }
                Ok(())
            }
            Ensemble::HermiteMix { max_order, .. } if *max_order > 40 => bad("Hermite mixes go up to order 40"),
            Ensemble::GaborCloud { atoms: 0, .. } => bad("Gabor clouds need at least one atom"),
            _ => Ok(()),
        }
    }

    /// Member parameters, in order.
    pub fn members(&self) -> Result<Vec<Member>> {
        self.validate()?;
        let seed = match self {
            Ensemble::GaussianChirps { seed, .. } | Ensemble::HermiteMix { seed, .. } | Ensemble::GaborCloud { seed, .. } => *seed,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..self.count())
            .map(|_| match self {
                Ensemble::GaussianChirps { ranges, .. } => Member::Chirp {
                    center: sym(&mut rng, ranges.center),
                    width: rng.gen_range(ranges.width[0]..=ranges.width[1]),
                    modulation: sym(&mut rng, ranges.modulation),
                    chirp: sym(&mut rng, ranges.chirp),
                },
                Ensemble::HermiteMix { max_order, .. } => Member::Hermite {
                    shift: sym(&mut rng, 2.0),
                    coefficients: (0..=*max_order)
                        .map(|_| Complex64::new(sym(&mut rng, 1.0), sym(&mut rng, 1.0)))
                        .collect(),
                },
                Ensemble::GaborCloud { atoms, .. } => Member::Cloud {
                    atoms: (0..*atoms)
                        .map(|_| Atom {
                            amplitude: Complex64::new(sym(&mut rng, 1.0), sym(&mut rng, 1.0)),
                            center: sym(&mut rng, 4.0),
                            frequency: sym(&mut rng, 3.0),
                        })
                        .collect(),
                },
            })
            .collect())
    }

    /// All members sampled on a one-dimensional grid.
    pub fn sample(&self, grid: &UniformGrid) -> Result<Vec<SampledField>> {
        self.members()?.iter().map(|m| m.sample(grid)).collect()
    }
}

impl Member {
    pub fn evaluate(&self, x: f64) -> Complex64 {
        match self {
            Member::Chirp { center, width, modulation, chirp } => {
                let t = (x - center) / width;
                Complex64::from_polar((-0.5 * t * t).exp(), modulation * x + chirp * x * x)
            }
            Member::Hermite { shift, coefficients } => coefficients
                .iter()
                .enumerate()
                .map(|(n, c)| c * hermite_function(n, x - shift))
                .sum(),
            Member::Cloud { atoms } => atoms
                .iter()
                .map(|a| a.amplitude * Complex64::from_polar((-0.5 * (x - a.center).powi(2)).exp(), a.frequency * x))
                .sum(),
        }
    }

    pub fn sample(&self, grid: &UniformGrid) -> Result<SampledField> {
        if grid.dim() != 1 {
            return Err(Error::InvalidDimension("ensembles are one-dimensional".into()));
        }
        SampledField::from_fn(grid.clone(), |p| self.evaluate(p[0]))
    }
}
