//! Mixed (quasi-)norms over ordered bases, their discrete counterparts,
//! function-space axiom diagnostics and modulation-space norms.

mod checks;
mod mixed;
mod modulation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::OrderedBasis;
use crate::weights::Weight;

pub use checks::{embedding_check, qbf_axiom_check, EmbeddingReport, QbfReport, MIN_TRIALS};
pub use mixed::{align_to_basis, discrete_mixed_norm, mixed_norm};
pub use modulation::{modulation_norm, phase_space_norm, ModSpaceSpec, PhaseNorm, Preset, PresetNorm};

/// A Lebesgue exponent in `(0, inf]`; infinity is its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// The exponent as a float, `inf` for infinity.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) => Exponent::new(p),
            Exponent::Infinity => Ok(self),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::Format(format!("cannot read exponent '{t}'")))?;
                Exponent::new(p)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => ExponentRepr::Number(*p),
            Exponent::Infinity => ExponentRepr::Text("inf".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ExponentRepr::deserialize(d)? {
            ExponentRepr::Number(p) => Exponent::new(p),
            ExponentRepr::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Conjugate exponent: `inf` on `(0, 1]`, `p / (p - 1)` on `(1, inf)`, `1` at `inf`.
pub fn conjugate_exponent(p: Exponent) -> Result<Exponent> {
    match p.validate()? {
        Exponent::Infinity => Ok(Exponent::Finite(1.0)),
        Exponent::Finite(p) if p <= 1.0 => Ok(Exponent::Infinity),
        Exponent::Finite(p) => Ok(Exponent::Finite(p / (p - 1.0))),
    }
}

/// Ordered basis as written in norm specs: `"identity"` or explicit vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    Named(NamedBasis),
    Vectors(OrderedBasis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBasis {
    Identity,
}

impl BasisSpec {
    pub fn resolve(&self, d: usize) -> Result<OrderedBasis> {
        match self {
            BasisSpec::Named(NamedBasis::Identity) => Ok(OrderedBasis::identity(d)),
            BasisSpec::Vectors(b) if b.dim() == d => Ok(b.clone()),
            BasisSpec::Vectors(b) => Err(Error::InvalidDimension(format!(
                "basis of dimension {} for {d} exponents",
                b.dim()
            ))),
        }
    }
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec::Named(NamedBasis::Identity)
    }
}

fn one() -> Weight {
    Weight::one()
}

/// `L^p_{E,(w)}`: iterated one-variable norms along the ordered basis `E`,
/// `p_1` innermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedNormSpec {
    pub exponents: Vec<Exponent>,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default = "one")]
    pub weight: Weight,
}

impl MixedNormSpec {
    pub fn new(exponents: Vec<Exponent>, basis: OrderedBasis, weight: Weight) -> Self {
        Self {
            exponents,
            basis: BasisSpec::Vectors(basis),
            weight,
        }
    }

    /// Unweighted, identity basis.
    pub fn standard(exponents: Vec<Exponent>) -> Self {
        Self {
            exponents,
            basis: BasisSpec::default(),
            weight: Weight::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Checks exponents, basis and weight; returns the resolved basis.
    pub fn validate(&self) -> Result<OrderedBasis> {
        if self.exponents.is_empty() {
            return Err(Error::InvalidDimension("a mixed norm needs at least one exponent".into()));
        }
        for p in &self.exponents {
            p.validate()?;
        }
        self.weight.check_dim(self.dim())?;
        self.basis.resolve(self.dim())
    }

    /// Quasi-norm order `min(1, p_1, ..., p_d)`.
    pub fn r(&self) -> f64 {
        self.exponents.iter().map(|p| p.value()).fold(1.0, f64::min)
    }

    pub fn max_exponent(&self) -> f64 {
        self.exponents.iter().map(|p| p.value()).fold(0.0, f64::max)
    }

    pub fn min_exponent(&self) -> f64 {
        self.exponents.iter().map(|p| p.value()).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_json() {
        let ps: Vec<Exponent> = serde_json::from_str(r#"[2, "inf", 0.5]"#).unwrap();
        assert_eq!(ps, vec![Exponent::Finite(2.0), Exponent::Infinity, Exponent::Finite(0.5)]);
        assert_eq!(serde_json::to_string(&ps).unwrap(), r#"[2.0,"inf",0.5]"#);
        assert!(serde_json::from_str::<Exponent>("0").is_err());
        assert!(serde_json::from_str::<Exponent>("-1.5").is_err());
        assert!(serde_json::from_str::<Exponent>(r#""big""#).is_err());
    }

    #[test]
    fn spec_json() {
        let s: MixedNormSpec = serde_json::from_str(
            r#"{"exponents":[2,"inf",0.5],"basis":"identity","weight":{"form":"polynomial","t":1.0}}"#,
        )
        .unwrap();
        assert_eq!(s.validate().unwrap(), OrderedBasis::identity(3));
        assert_eq!(s.r(), 0.5);
        assert_eq!(s.max_exponent(), f64::INFINITY);
        let t: MixedNormSpec = serde_json::from_str(r#"{"exponents":[1,2],"basis":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(t.validate().unwrap(), OrderedBasis::permuted_standard(&[1, 0]).unwrap());
        assert!(serde_json::from_str::<MixedNormSpec>(r#"{"exponents":[1],"extra":1}"#).is_err());
        let bad: MixedNormSpec = serde_json::from_str(r#"{"exponents":[1,2],"basis":[[1]]}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exponent_from_str() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("0.5".parse::<Exponent>().unwrap(), Exponent::Finite(0.5));
        assert!(matches!("0".parse::<Exponent>(), Err(Error::InvalidExponent(_))));
    }
}
