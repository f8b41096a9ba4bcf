//! Feature vectors, class labels and the numeric primitives shared by
//! every other module.
//!
//! All values are immutable once constructed; reals are `f64` throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A d-dimensional real feature vector.
///
/// Entries are finite by construction; the dimension is strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    /// Builds a vector, rejecting empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("feature vector must have dimension > 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("feature vector entries must be finite".into()));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Index of a class in `[0, n)` for the run's class set of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId(pub usize);

/// A feature vector together with its class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledFeature {
    pub feature: FeatureVector,
    pub label: ClassId,
}

impl LabeledFeature {
    pub fn new(feature: FeatureVector, label: ClassId) -> Self {
        Self { feature, label }
    }
}

/// A probability vector over classes (non-negative, sums to 1 within 1e-9).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftLabel(Vec<f64>);

impl SoftLabel {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("soft label needs at least one class".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Numeric("soft label weights must be finite and non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!("soft label weights sum to {sum}, expected 1")));
        }
        Ok(Self(weights))
    }

    /// One-hot label for `class` among `n` classes.
    pub fn one_hot(class: usize, n: usize) -> Self {
        let mut w = vec![0.0; n];
        w[class] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest weight (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, w) in self.0.iter().enumerate() {
            if *w > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// `lam * a + (1 - lam) * b`, exact elementwise interpolation.
    pub fn interpolate(a: &SoftLabel, b: &SoftLabel, lam: f64) -> Result<SoftLabel> {
        if a.len() != b.len() {
            return Err(Error::Dimension { expected: a.len(), got: b.len() });
        }
        let w = a
            .0
            .iter()
            .zip(&b.0)
            .map(|(x, y)| lam * x + (1.0 - lam) * y)
            .collect();
        // interpolation of simplex points stays on the simplex up to fp noise
        Ok(SoftLabel(w))
    }
}

/// Rescales `v` to unit L2 norm, preserving direction.
pub fn l2_normalize(v: &FeatureVector) -> Result<FeatureVector> {
    let norm = v.norm();
    if norm < 1e-300 {
        return Err(Error::Normalization);
    }
    let scaled = v.as_slice().iter().map(|x| x / norm).collect();
    FeatureVector::new(scaled)
}

/// Euclidean distance between two vectors of equal dimension.
pub fn euclidean_distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    Ok(euclidean_distance_slices(a.as_slice(), b.as_slice()))
}

/// Distance on raw slices; callers guarantee equal lengths.
pub fn euclidean_distance_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// `lam * a + (1 - lam) * b` over raw feature coordinates.
pub fn interpolate_features(a: &FeatureVector, b: &FeatureVector, lam: f64) -> Result<FeatureVector> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    let v = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| lam * x + (1.0 - lam) * y)
        .collect();
    FeatureVector::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalize_three_four() {
        let out = l2_normalize(&fv(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(out.as_slice()[0], 0.6, max_relative = 1e-12);
        assert_relative_eq!(out.as_slice()[1], 0.8, max_relative = 1e-12);
    }

    #[test]
    fn normalize_unit_identity() {
        let out = l2_normalize(&fv(&[1.0, 0.0])).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn normalize_zero_vector_fails() {
        let err = l2_normalize(&fv(&[0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::Normalization));
    }

    #[test]
    fn distance_three_four_five() {
        let d = euclidean_distance(&fv(&[0.0, 0.0]), &fv(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(d, 5.0, max_relative = 1e-12);
    }

    #[test]
    fn distance_to_self_zero() {
        let v = fv(&[1.5, -2.5, 0.25]);
        assert_eq!(euclidean_distance(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let err = euclidean_distance(&fv(&[1.0]), &fv(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn soft_label_rejects_bad_sum() {
        assert!(SoftLabel::new(vec![0.5, 0.6]).is_err());
        assert!(SoftLabel::new(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(FeatureVector::new(vec![f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![f64::INFINITY, 0.0]).is_err());
        assert!(FeatureVector::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn normalize_idempotent(v in proptest::collection::vec(-100.0f64..100.0, 1..16)) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-6));
            let v = FeatureVector::new(v).unwrap();
            let once = l2_normalize(&v).unwrap();
            let twice = l2_normalize(&once).unwrap();
            prop_assert!((once.norm() - 1.0).abs() < 1e-9);
            for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn distance_symmetric_and_triangle(
            a in proptest::collection::vec(-50.0f64..50.0, 4),
            b in proptest::collection::vec(-50.0f64..50.0, 4),
            c in proptest::collection::vec(-50.0f64..50.0, 4),
        ) {
            let (a, b, c) = (fv(&a), fv(&b), fv(&c));
            let ab = euclidean_distance(&a, &b).unwrap();
            let ba = euclidean_distance(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            let ac = euclidean_distance(&a, &c).unwrap();
            let cb = euclidean_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-9);
        }
    }
}
