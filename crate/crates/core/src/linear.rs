//! Integer forms `a·n + b` in one parameter `n`, and affine families of
//! coordinate vectors built from them.
//!
//! Every comparison is decided for *all* integers `n ≥ n_lo`: the sign of
//! the slope tells which end of the ray is binding, and the value at the
//! boundary `n_lo` settles the rest. Nothing here samples.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

/// Guard value carried by forms that do not depend on `n`.
pub const UNGUARDED: i64 = i64::MIN;

/// The form `slope·n + offset`, valid for integers `n ≥ n_lo`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub slope: i64,
    pub offset: i64,
    pub n_lo: i64,
}

impl LinearForm {
    pub const ZERO: LinearForm = LinearForm { slope: 0, offset: 0, n_lo: UNGUARDED };

    pub fn constant(c: i64) -> Self {
        LinearForm { slope: 0, offset: c, n_lo: UNGUARDED }
    }

    pub fn new(slope: i64, offset: i64, n_lo: i64) -> Self {
        LinearForm { slope, offset, n_lo }
    }

    /// The parameter itself, `n` for `n ≥ n_lo`.
    pub fn param(n_lo: i64) -> Self {
        LinearForm { slope: 1, offset: 0, n_lo }
    }

    pub fn with_guard(self, n_lo: i64) -> Self {
        LinearForm { n_lo, ..self }
    }

    pub fn is_constant(&self) -> bool {
        self.slope == 0
    }

    pub fn as_constant(&self) -> Option<i64> {
        self.is_constant().then_some(self.offset)
    }

    pub fn is_guarded(&self) -> bool {
        self.n_lo != UNGUARDED
    }

    pub fn value_at(&self, n: i64) -> i64 {
        self.slope * n + self.offset
    }

    /// Value at the smallest admissible `n`; the offset for constants.
    pub fn boundary_value(&self) -> i64 {
        if self.slope == 0 {
            self.offset
        } else {
            self.value_at(self.n_lo)
        }
    }

    /// Same polynomial, guards ignored.
    pub fn same_values(&self, other: &LinearForm) -> bool {
        self.slope == other.slope && self.offset == other.offset
    }

    pub fn is_identically(&self, c: i64) -> bool {
        self.slope == 0 && self.offset == c
    }

    pub fn always_gt(&self, c: i64) -> bool {
        self.slope >= 0 && self.boundary_value() > c
    }

    pub fn always_ge(&self, c: i64) -> bool {
        self.slope >= 0 && self.boundary_value() >= c
    }

    pub fn always_lt(&self, c: i64) -> bool {
        self.slope <= 0 && self.boundary_value() < c
    }

    pub fn always_le(&self, c: i64) -> bool {
        self.slope <= 0 && self.boundary_value() <= c
    }

    /// Product of two forms when it stays linear in `n`.
    pub fn checked_mul(&self, other: &LinearForm) -> Option<LinearForm> {
        let n_lo = self.n_lo.max(other.n_lo);
        match (self.as_constant(), other.as_constant()) {
            (Some(c), _) => Some(LinearForm { slope: other.slope * c, offset: other.offset * c, n_lo }),
            (_, Some(c)) => Some(LinearForm { slope: self.slope * c, offset: self.offset * c, n_lo }),
            _ => None,
        }
    }

    /// `max(0, self)` when the sign is uniform over the guard range.
    pub fn positive_part(&self) -> Option<LinearForm> {
        if self.always_ge(0) {
            Some(*self)
        } else if self.always_le(0) {
            Some(LinearForm { slope: 0, offset: 0, n_lo: self.n_lo })
        } else {
            None
        }
    }
}

impl Default for LinearForm {
    fn default() -> Self {
        LinearForm::ZERO
    }
}

impl From<i64> for LinearForm {
    fn from(c: i64) -> Self {
        LinearForm::constant(c)
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: LinearForm) -> LinearForm {
        LinearForm { slope: self.slope + rhs.slope, offset: self.offset + rhs.offset, n_lo: self.n_lo.max(rhs.n_lo) }
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        self + (-rhs)
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm { slope: -self.slope, offset: -self.offset, n_lo: self.n_lo }
    }
}

impl Mul<i64> for LinearForm {
    type Output = LinearForm;
    fn mul(self, k: i64) -> LinearForm {
        LinearForm { slope: self.slope * k, offset: self.offset * k, n_lo: self.n_lo }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope, self.offset) {
            (0, b) => write!(f, "{b}"),
            (a, b) => {
                match a {
                    1 => write!(f, "n")?,
                    -1 => write!(f, "-n")?,
                    _ => write!(f, "{a}n")?,
                }
                match b.cmp(&0) {
                    std::cmp::Ordering::Greater => write!(f, " + {b}"),
                    std::cmp::Ordering::Less => write!(f, " - {}", -b),
                    std::cmp::Ordering::Equal => Ok(()),
                }
            }
        }
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_constant() {
            s.serialize_i64(self.offset)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

/// An integer vector depending affinely on `n`: `offset + n·slope` for
/// `n ≥ n_lo`. Concrete classes have a zero slope.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClassVec {
    pub offset: Vec<i64>,
    pub slope: Vec<i64>,
    pub n_lo: i64,
}

impl ClassVec {
    pub fn constant(offset: Vec<i64>) -> Self {
        let slope = vec![0; offset.len()];
        ClassVec { offset, slope, n_lo: UNGUARDED }
    }

    pub fn zero(len: usize) -> Self {
        ClassVec::constant(vec![0; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        ClassVec::constant(v)
    }

    /// `n·self.offset` for `n ≥ n_lo`; `self` must be concrete.
    pub fn times_param(&self, n_lo: i64) -> Self {
        debug_assert!(self.is_constant());
        ClassVec { offset: vec![0; self.len()], slope: self.offset.clone(), n_lo }
    }

    pub fn len(&self) -> usize {
        self.offset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offset.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.slope.iter().all(|&s| s == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.offset.iter().all(|&c| c == 0)
    }

    pub fn coord(&self, i: usize) -> LinearForm {
        LinearForm { slope: self.slope[i], offset: self.offset[i], n_lo: self.n_lo }
    }

    pub fn with_guard(mut self, n_lo: i64) -> Self {
        self.n_lo = n_lo;
        self
    }

    /// Substitute a concrete parameter value.
    pub fn at(&self, n: i64) -> ClassVec {
        ClassVec::constant(self.offset.iter().zip(&self.slope).map(|(b, a)| a * n + b).collect())
    }

    pub fn dot(&self, weights: &[i64]) -> LinearForm {
        debug_assert_eq!(weights.len(), self.len());
        let offset = self.offset.iter().zip(weights).map(|(c, w)| c * w).sum();
        let slope = self.slope.iter().zip(weights).map(|(c, w)| c * w).sum();
        LinearForm { slope, offset, n_lo: self.n_lo }
    }

    pub fn scale(&self, k: i64) -> ClassVec {
        ClassVec {
            offset: self.offset.iter().map(|c| c * k).collect(),
            slope: self.slope.iter().map(|c| c * k).collect(),
            n_lo: self.n_lo,
        }
    }

    /// Multiply by a form; fails when the result would be quadratic in `n`.
    pub fn scale_form(&self, k: &LinearForm) -> Option<ClassVec> {
        let n_lo = self.n_lo.max(k.n_lo);
        if k.is_constant() {
            return Some(self.scale(k.offset).with_guard(n_lo));
        }
        if !self.is_constant() {
            return None;
        }
        Some(ClassVec {
            offset: self.offset.iter().map(|c| c * k.offset).collect(),
            slope: self.offset.iter().map(|c| c * k.slope).collect(),
            n_lo,
        })
    }

    pub fn concat(&self, other: &ClassVec) -> ClassVec {
        ClassVec {
            offset: self.offset.iter().chain(&other.offset).copied().collect(),
            slope: self.slope.iter().chain(&other.slope).copied().collect(),
            n_lo: self.n_lo.max(other.n_lo),
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> ClassVec {
        ClassVec { offset: self.offset[range.clone()].to_vec(), slope: self.slope[range].to_vec(), n_lo: self.n_lo }
    }

    pub fn from_coords(coords: &[LinearForm]) -> ClassVec {
        ClassVec {
            offset: coords.iter().map(|c| c.offset).collect(),
            slope: coords.iter().map(|c| c.slope).collect(),
            n_lo: coords.iter().map(|c| c.n_lo).max().unwrap_or(UNGUARDED),
        }
    }
}

impl Add for &ClassVec {
    type Output = ClassVec;
    fn add(self, rhs: &ClassVec) -> ClassVec {
        debug_assert_eq!(self.len(), rhs.len());
        ClassVec {
            offset: self.offset.iter().zip(&rhs.offset).map(|(a, b)| a + b).collect(),
            slope: self.slope.iter().zip(&rhs.slope).map(|(a, b)| a + b).collect(),
            n_lo: self.n_lo.max(rhs.n_lo),
        }
    }
}

impl Sub for &ClassVec {
    type Output = ClassVec;
    fn sub(self, rhs: &ClassVec) -> ClassVec {
        self + &rhs.scale(-1)
    }
}

impl Neg for &ClassVec {
    type Output = ClassVec;
    fn neg(self) -> ClassVec {
        self.scale(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_n_plus_one_exceeds_twelve_for_all_n() {
        // 16n - (4n - 1) with n >= 1
        let deg = LinearForm::new(16, 0, 1) - LinearForm::new(4, -1, 1);
        assert_eq!(deg, LinearForm::new(12, 1, 1));
        assert!(deg.always_gt(12));
        assert!(deg.always_ge(13));
        assert!(!deg.always_gt(13));
        assert!(!deg.always_lt(100));
    }

    #[test]
    fn decreasing_forms_bounded_above() {
        let f = LinearForm::new(-4, 5, 2); // 5 - 4n, n >= 2
        assert!(f.always_lt(0));
        assert!(f.always_le(-3));
        assert!(!f.always_le(-4));
        assert!(!f.always_ge(-1000));
    }

    #[test]
    fn constants_ignore_guard() {
        let c = LinearForm::constant(-1);
        assert!(c.always_lt(0));
        assert!(c.is_identically(-1));
        assert_eq!(c.to_string(), "-1");
    }

    #[test]
    fn mixed_sign_is_undecided() {
        let f = LinearForm::new(4, -8, 1); // -4 at n = 1, >= 0 afterwards
        assert!(!f.always_ge(0));
        assert!(!f.always_le(0));
        assert_eq!(f.positive_part(), None);
        assert!(f.with_guard(2).always_ge(0));
    }

    #[test]
    fn products_stay_linear_or_fail() {
        let n = LinearForm::param(1);
        assert_eq!(n.checked_mul(&LinearForm::constant(4)), Some(LinearForm::new(4, 0, 1)));
        assert_eq!(n.checked_mul(&n), None);
        assert_eq!(LinearForm::ZERO.checked_mul(&n), Some(LinearForm::new(0, 0, 1)));
    }

    #[test]
    fn display() {
        assert_eq!(LinearForm::new(4, -1, 1).to_string(), "4n - 1");
        assert_eq!(LinearForm::new(-1, 3, 1).to_string(), "-n + 3");
        assert_eq!(LinearForm::new(1, 0, 1).to_string(), "n");
    }

    #[test]
    fn class_vec_substitution() {
        let v = ClassVec::constant(vec![2, 0]).times_param(1);
        let w = &v - &ClassVec::constant(vec![0, 1]);
        assert_eq!(w.at(3).offset, vec![6, -1]);
        assert_eq!(w.dot(&[2, 1]), LinearForm::new(4, -1, 1));
        assert!(v.scale_form(&LinearForm::param(1)).is_none());
    }
}
