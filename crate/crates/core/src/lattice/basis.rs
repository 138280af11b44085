use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative determinant threshold below which a basis counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

/// Largest phase-space dimension accepted by the exhaustive phase-split search.
pub const MAX_PHASE_SPLIT_DIM: usize = 8;

/// An ordered basis `e_1, ..., e_d` of R^d. Order is significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct OrderedBasis {
    vectors: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for OrderedBasis {
    type Error = Error;

    fn try_from(vectors: Vec<Vec<f64>>) -> Result<Self> {
        OrderedBasis::new(vectors)
    }
}

impl From<OrderedBasis> for Vec<Vec<f64>> {
    fn from(b: OrderedBasis) -> Self {
        b.vectors
    }
}

impl OrderedBasis {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::InvalidDimension("basis must contain at least one vector".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::InvalidDimension(format!(
                "basis vector of length {} in dimension {d}",
                v.len()
            )));
        }
        if vectors.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDimension("basis entries must be finite".into()));
        }
        let basis = Self { vectors };
        let det = basis.determinant();
        let scale: f64 = basis
            .vectors
            .iter()
            .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
            .product();
        if !(det.abs() > SINGULAR_TOL * scale) {
            return Err(Error::SingularBasis { det });
        }
        Ok(basis)
    }

    pub fn identity(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { vectors }
    }

    /// Standard basis vectors taken in the given order.
    pub fn permuted_standard(order: &[usize]) -> Result<Self> {
        let d = order.len();
        let vectors = order
            .iter()
            .map(|&k| (0..d).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(vectors)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    /// Matrix whose columns are the basis vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.vectors[j][i])
    }

    pub fn determinant(&self) -> f64 {
        self.matrix().determinant()
    }

    pub fn is_identity(&self) -> bool {
        self.vectors.iter().enumerate().all(|(i, v)| {
            v.iter()
                .enumerate()
                .all(|(j, &c)| c == if i == j { 1.0 } else { 0.0 })
        })
    }

    /// Point `sum_k t_k e_k`.
    pub fn combine(&self, coords: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut p = vec![0.0; d];
        for (t, e) in coords.iter().zip(&self.vectors) {
            for (pi, ei) in p.iter_mut().zip(e) {
                *pi += t * ei;
            }
        }
        p
    }

    /// Coordinates `t` with `sum_k t_k e_k = point`.
    pub fn coordinates(&self, point: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return point.to_vec();
        }
        let rhs = DVector::from_column_slice(point);
        let lu = self.matrix().lu();
        lu.solve(&rhs)
            .map(|v| v.iter().copied().collect())
            .unwrap_or_else(|| vec![f64::NAN; self.dim()])
    }

    /// If every vector of `self` is a nonzero multiple of some vector of `other`
    /// (a signed, scaled permutation), returns `(source_index, factor)` per vector.
    pub fn scaled_permutation_of(&self, other: &OrderedBasis) -> Option<Vec<(usize, f64)>> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut used = vec![false; other.dim()];
        let mut out = Vec::with_capacity(self.dim());
        for v in &self.vectors {
            let mut found = None;
            for (k, w) in other.vectors.iter().enumerate() {
                if used[k] {
                    continue;
                }
                if let Some(c) = parallel_factor(v, w) {
                    found = Some((k, c));
                    break;
                }
            }
            let (k, c) = found?;
            used[k] = true;
            out.push((k, c));
        }
        Some(out)
    }

    pub fn parallelepiped(&self) -> Parallelepiped {
        Parallelepiped { basis: self.clone() }
    }
}

/// Returns `c` with `v = c * w`, if it exists.
fn parallel_factor(v: &[f64], w: &[f64]) -> Option<f64> {
    let (k, &wk) = w
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
    if wk == 0.0 {
        return None;
    }
    let c = v[k] / wk;
    if c == 0.0 {
        return None;
    }
    let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let ok = v
        .iter()
        .zip(w)
        .all(|(a, b)| (a - c * b).abs() <= 1e-12 * scale);
    ok.then_some(c)
}

/// The half-open parallelepiped `{ sum t_k e_k : t_k in [0, 1) }` spanned by a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Parallelepiped {
    basis: OrderedBasis,
}

impl Parallelepiped {
    pub fn basis(&self) -> &OrderedBasis {
        &self.basis
    }

    /// The `2^d` vertices, vertex `m` having `t_k = (m >> k) & 1`.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.basis.dim();
        (0..1usize << d)
            .map(|m| {
                let t: Vec<f64> = (0..d).map(|k| ((m >> k) & 1) as f64).collect();
                self.basis.combine(&t)
            })
            .collect()
    }

    /// Edges as pairs of vertex indices differing in one coordinate.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let d = self.basis.dim();
        (0..1usize << d)
            .flat_map(|m| {
                (0..d)
                    .filter(move |k| (m >> k) & 1 == 0)
                    .map(move |k| (m, m | (1 << k)))
            })
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        const TOL: f64 = 1e-12;
        self.basis
            .coordinates(point)
            .iter()
            .all(|&t| t >= -TOL && t < 1.0 - TOL)
    }
}

/// Partition of a phase-space basis into position and frequency parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSplit {
    /// Indices of the vectors spanning `{(x, 0)}`.
    pub position: Vec<usize>,
    /// Indices of the vectors spanning `{(0, xi)}`.
    pub frequency: Vec<usize>,
}

/// Exhaustive search for a subset `E0` of `basis` spanning the position plane
/// whose complement spans the frequency plane.
pub fn is_phase_split(basis: &OrderedBasis) -> Result<Option<PhaseSplit>> {
    let n = basis.dim();
    if n % 2 != 0 {
        return Err(Error::InvalidDimension(format!(
            "phase space dimension must be even, got {n}"
        )));
    }
    if n > MAX_PHASE_SPLIT_DIM {
        return Err(Error::InvalidDimension(format!(
            "phase-split search supports dimension <= {MAX_PHASE_SPLIT_DIM}, got {n}"
        )));
    }
    let d = n / 2;
    let in_plane = |v: &[f64], position: bool| {
        let scale = v.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let off = if position { &v[d..] } else { &v[..d] };
        off.iter().all(|c| c.abs() <= 1e-12 * scale)
    };
    for subset in (0..n).combinations(d) {
        let rest: Vec<usize> = (0..n).filter(|k| !subset.contains(k)).collect();
        let pos_ok = subset.iter().all(|&k| in_plane(basis.vector(k), true));
        let freq_ok = rest.iter().all(|&k| in_plane(basis.vector(k), false));
        // `basis` is linearly independent, so d vectors inside a d-plane span it.
        if pos_ok && freq_ok {
            return Ok(Some(PhaseSplit {
                position: subset,
                frequency: rest,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_basis_is_rejected() {
        let err = OrderedBasis::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        assert!(matches!(err, Error::SingularBasis { .. }));
    }

    #[test]
    fn unit_square() {
        let p = OrderedBasis::identity(2).parallelepiped();
        assert!(p.contains(&[0.5, 0.5]));
        assert!(!p.contains(&[1.0, 0.0]));
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.edges().len(), 4);
        assert_eq!(p.volume(), 1.0);
    }

    #[test]
    fn stretched_rectangle() {
        let b = OrderedBasis::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let p = b.parallelepiped();
        assert!((p.volume() - 2.0).abs() < 1e-15);
        assert!(p.contains(&[1.9, 0.5]));
        assert!(!p.contains(&[2.0, 0.5]));
    }

    #[test]
    fn sheared_parallelogram() {
        let b = OrderedBasis::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let p = b.parallelepiped();
        assert!((p.volume() - 1.0).abs() < 1e-15);
        // (1.5, 0.6) = 0.9 e1 + 0.6 e2
        let t = b.coordinates(&[1.5, 0.6]);
        assert!((t[0] - 0.9).abs() < 1e-14 && (t[1] - 0.6).abs() < 1e-14);
        assert!(p.contains(&[1.5, 0.6]));
        assert!(!p.contains(&[0.2, 0.6]));
    }

    #[test]
    fn cube_has_twelve_edges() {
        let p = OrderedBasis::identity(3).parallelepiped();
        assert_eq!(p.edges().len(), 12);
        assert_eq!(p.vertices().len(), 8);
    }

    #[test]
    fn standard_phase_split() {
        let split = is_phase_split(&OrderedBasis::identity(4)).unwrap().unwrap();
        assert_eq!(split.position, vec![0, 1]);
        assert_eq!(split.frequency, vec![2, 3]);
    }

    #[test]
    fn interleaved_phase_split() {
        // (x1, xi1, x2, xi2)
        let b = OrderedBasis::permuted_standard(&[0, 2, 1, 3]).unwrap();
        let split = is_phase_split(&b).unwrap().unwrap();
        assert_eq!(split.position, vec![0, 2]);
        assert_eq!(split.frequency, vec![1, 3]);
    }

    #[test]
    fn mixed_vector_is_not_phase_split() {
        let b = OrderedBasis::new(vec![
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(is_phase_split(&b).unwrap(), None);
    }

    #[test]
    fn odd_dimension_is_rejected() {
        assert!(matches!(
            is_phase_split(&OrderedBasis::identity(3)),
            Err(Error::InvalidDimension(_))
        ));
        assert!(is_phase_split(&OrderedBasis::identity(10)).is_err());
    }

    #[test]
    fn scaled_permutation_detection() {
        let std = OrderedBasis::identity(2);
        let b = OrderedBasis::new(vec![vec![0.0, -2.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(b.scaled_permutation_of(&std), Some(vec![(1, -2.0), (0, 3.0)]));
        let sheared = OrderedBasis::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(sheared.scaled_permutation_of(&std), None);
    }
}
