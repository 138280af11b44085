use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The real `d x d` matrix `A` selecting the quantization `Op_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationSpec {
    matrix: Vec<Vec<f64>>,
}

impl QuantizationSpec {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let d = matrix.len();
        if d == 0 || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidDimension("quantization matrix must be square".into()));
        }
        if matrix.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidDimension("quantization matrix must be finite".into()));
        }
        Ok(Self { matrix })
    }

    pub fn scalar(d: usize, t: f64) -> Self {
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i == j { t } else { 0.0 }).collect())
            .collect();
        Self { matrix }
    }

    /// `A = I / 2`.
    pub fn weyl(d: usize) -> Self {
        Self::scalar(d, 0.5)
    }

    /// `A = 0`.
    pub fn kohn_nirenberg(d: usize) -> Self {
        Self::scalar(d, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&a| a == 0.0)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().flatten().map(|a| a.abs()).fold(0.0, f64::max)
    }

    /// `self - other` as a matrix.
    pub fn difference(&self, other: &QuantizationSpec) -> Result<Vec<Vec<f64>>> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidDimension("quantization dimensions differ".into()));
        }
        Ok(self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect())
    }

    /// `A v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Quantization as written in configs and on the command line:
/// `weyl`, `kn`, or `matrix:<row-major csv>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantization {
    Weyl,
    #[serde(alias = "kohn_nirenberg")]
    Kn,
    Matrix(Vec<Vec<f64>>),
}

impl Quantization {
    pub fn spec(&self, d: usize) -> Result<QuantizationSpec> {
        match self {
            Quantization::Weyl => Ok(QuantizationSpec::weyl(d)),
            Quantization::Kn => Ok(QuantizationSpec::kohn_nirenberg(d)),
            Quantization::Matrix(m) => {
                let q = QuantizationSpec::new(m.clone())?;
                if q.dim() != d {
                    return Err(Error::InvalidDimension(format!(
                        "quantization matrix is {0}x{0}, signal dimension is {d}",
                        q.dim()
                    )));
                }
                Ok(q)
            }
        }
    }
}

impl FromStr for Quantization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weyl" => Ok(Quantization::Weyl),
            "kn" | "kohn-nirenberg" => Ok(Quantization::Kn),
            _ => {
                let csv = s.strip_prefix("matrix:").ok_or_else(|| {
                    Error::InvalidDimension(format!("unknown quantization '{s}'"))
                })?;
                let entries = csv
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidDimension(format!("bad matrix entry: {e}")))?;
                let d = (entries.len() as f64).sqrt().round() as usize;
                if d * d != entries.len() || d == 0 {
                    return Err(Error::InvalidDimension(format!(
                        "{} matrix entries do not form a square matrix",
                        entries.len()
                    )));
                }
                Ok(Quantization::Matrix(entries.chunks(d).map(|r| r.to_vec()).collect()))
            }
        }
    }
}
