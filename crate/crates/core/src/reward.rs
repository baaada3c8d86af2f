use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A fixed-length vector of per-objective rewards.
///
/// Every return, immediate reward and Q-value in the crate is one of these.
/// The length is set at construction and no operation changes it; binary
/// operations on vectors of different lengths panic.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardVector(Vec<f64>);

impl RewardVector {
    pub fn new(values: Vec<f64>) -> Self {
        RewardVector(values)
    }

    pub fn zeros(objectives: usize) -> Self {
        RewardVector(vec![0.0; objectives])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &RewardVector, scale: f64) {
        assert_eq!(self.len(), other.len(), "reward vector length mismatch");
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
    }

    /// Moves `self` a fraction `rate` of the way towards `target`.
    pub fn move_towards(&mut self, target: &RewardVector, rate: f64) {
        assert_eq!(self.len(), target.len(), "reward vector length mismatch");
        for (a, b) in self.0.iter_mut().zip(&target.0) {
            *a += rate * (b - *a);
        }
    }

    pub fn scaled(&self, scale: f64) -> RewardVector {
        RewardVector(self.0.iter().map(|v| v * scale).collect())
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &RewardVector) -> f64 {
        assert_eq!(self.len(), other.len(), "reward vector length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for RewardVector {
    fn from(values: Vec<f64>) -> Self {
        RewardVector(values)
    }
}

impl<const N: usize> From<[f64; N]> for RewardVector {
    fn from(values: [f64; N]) -> Self {
        RewardVector(values.to_vec())
    }
}

impl Index<usize> for RewardVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl AddAssign<&RewardVector> for RewardVector {
    fn add_assign(&mut self, rhs: &RewardVector) {
        self.add_scaled(rhs, 1.0);
    }
}

impl Add<&RewardVector> for &RewardVector {
    type Output = RewardVector;

    fn add(self, rhs: &RewardVector) -> RewardVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&RewardVector> for &RewardVector {
    type Output = RewardVector;

    fn sub(self, rhs: &RewardVector) -> RewardVector {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Mul<f64> for &RewardVector {
    type Output = RewardVector;

    fn mul(self, rhs: f64) -> RewardVector {
        self.scaled(rhs)
    }
}

impl fmt::Display for RewardVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic() {
        let a = RewardVector::from([1.0, -2.0]);
        let b = RewardVector::from([0.5, 4.0]);
        assert_eq!(&a + &b, RewardVector::from([1.5, 2.0]));
        assert_eq!(&a - &b, RewardVector::from([0.5, -6.0]));
        assert_eq!(&a * 2.0, RewardVector::from([2.0, -4.0]));
        assert_eq!(a.to_string(), "(1, -2)");
    }

    #[test]
    fn move_towards_is_an_ema_step() {
        let mut v = RewardVector::zeros(2);
        v.move_towards(&RewardVector::from([1.0, -22.0]), 0.01);
        assert_eq!(v, RewardVector::from([0.01, -0.22]));
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn mismatched_lengths_panic() {
        let mut a = RewardVector::zeros(2);
        a += &RewardVector::zeros(3);
    }

    fn vec2() -> impl Strategy<Value = RewardVector> {
        prop::collection::vec(-100.0f64..100.0, 2).prop_map(RewardVector::new)
    }

    proptest! {
        #[test]
        fn addition_commutes_and_keeps_length(a in vec2(), b in vec2()) {
            let ab = &a + &b;
            prop_assert_eq!(ab.len(), 2);
            prop_assert_eq!(ab, &b + &a);
        }

        #[test]
        fn scaling_distributes(a in vec2(), b in vec2(), k in -10.0f64..10.0) {
            let lhs = &(&a + &b) * k;
            let rhs = &(&a * k) + &(&b * k);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        }
    }
}
