//! Small dense tensors with a fixed rank and row-major storage.

use std::ops::{Index, IndexMut};

/// Dense rank-`R` array. The last index varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T, const R: usize> {
    shape: [usize; R],
    data: Vec<T>,
}

pub type Tensor2 = Tensor<f64, 2>;
pub type Tensor3 = Tensor<f64, 3>;
pub type Tensor4 = Tensor<f64, 4>;

impl<T: Clone, const R: usize> Tensor<T, R> {
    pub fn filled(shape: [usize; R], fill: T) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![fill; len],
        }
    }
}

impl<T, const R: usize> Tensor<T, R> {
    pub fn from_fn(shape: [usize; R], mut f: impl FnMut([usize; R]) -> T) -> Self {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = [0usize; R];
        for _ in 0..len {
            data.push(f(idx));
            for axis in (0..R).rev() {
                idx[axis] += 1;
                if idx[axis] < shape[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Self { shape, data }
    }

    pub fn shape(&self) -> [usize; R] {
        self.shape
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Tensor<U, R> {
        Tensor {
            shape: self.shape,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn offset(&self, idx: [usize; R]) -> usize {
        let mut off = 0;
        for axis in 0..R {
            debug_assert!(idx[axis] < self.shape[axis], "index out of bounds");
            off = off * self.shape[axis] + idx[axis];
        }
        off
    }
}

impl<const R: usize> Tensor<f64, R> {
    pub fn zeros(shape: [usize; R]) -> Self {
        Self::filled(shape, 0.0)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        Self {
            shape: self.shape,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T, const R: usize> Index<[usize; R]> for Tensor<T, R> {
    type Output = T;
    fn index(&self, idx: [usize; R]) -> &T {
        &self.data[self.offset(idx)]
    }
}

impl<T, const R: usize> IndexMut<[usize; R]> for Tensor<T, R> {
    fn index_mut(&mut self, idx: [usize; R]) -> &mut T {
        let off = self.offset(idx);
        &mut self.data[off]
    }
}

/// Kronecker delta as a float.
#[inline]
pub fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_is_row_major() {
        let t = Tensor::from_fn([2, 3], |[i, j]| 10 * i + j);
        assert_eq!(t.as_slice(), &[0, 1, 2, 10, 11, 12]);
        assert_eq!(t[[1, 2]], 12);
    }

    #[test]
    fn max_abs_diff() {
        let a = Tensor::from_fn([2, 2], |[i, j]| (i + j) as f64);
        let mut b = a.clone();
        b[[1, 0]] -= 3.0;
        assert_eq!(a.max_abs_diff(&b), 3.0);
        assert_eq!(a.max_abs(), 2.0);
    }
}
