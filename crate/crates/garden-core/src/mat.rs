//! Small dense row-major matrices over an arbitrary scalar.
//!
//! Everything in this crate works with matrices of size at most a few
//! dozen, so the implementation favours exactness and genericity over
//! throughput: entries can be machine integers, floats, rationals or
//! complex rationals.

use std::ops::{Index, IndexMut};

use num_traits::Num;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

/// Dense `rows x cols` matrix, row-major storage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Mat<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Builds a matrix from nested rows.
    ///
    /// Panics if the rows are ragged or empty; matrix literals are
    /// programmer-supplied, so a malformed one is a bug at the call site.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        assert!(nrows > 0, "matrix must have at least one row");
        let ncols = rows[0].len();
        assert!(ncols > 0, "matrix must have at least one column");
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows in matrix literal");
            data.extend(row);
        }
        Mat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f(x)).collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Clone> Mat<T> {
    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl<T: Num + Clone> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, factor: &T) -> Mat<T> {
        self.map(|x| x.clone() * factor.clone())
    }

    /// Sum of squared entries. Exact in exact scalars.
    pub fn frob_sq(&self) -> T {
        let mut acc = T::zero();
        for x in &self.data {
            acc = acc + x.clone() * x.clone();
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

impl<T: Scalar> Mat<T> {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for x in &self.data {
            let a = x.abs();
            if a > best {
                best = a;
            }
        }
        best
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Serialize> Serialize for Mat<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(serializer)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Mat<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<T>> = Vec::deserialize(deserializer)?;
        if rows.is_empty() {
            return Err(D::Error::custom("matrix must have at least one row"));
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(D::Error::custom("matrix must have at least one column"));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            data.extend(row);
        }
        Ok(Mat {
            rows: nrows,
            cols: ncols,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_identity() {
        let a: Mat<i64> = Mat::from_rows(vec![vec![1, 2], vec![3, 4]]);
        let id = Mat::identity(2);
        assert_eq!(a.mul(&id), a);
        let b = Mat::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            a.mul(&b),
            Mat::from_rows(vec![vec![2, 1], vec![4, 3]])
        );
    }

    #[test]
    fn transpose_involution() {
        let a: Mat<i64> = Mat::from_rows(vec![vec![1, 2, 3], vec![4, 5, 6]]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn frobenius_and_max_abs() {
        let a: Mat<i64> = Mat::from_rows(vec![vec![-3, 0], vec![1, 2]]);
        assert_eq!(a.frob_sq(), 14);
        assert_eq!(a.max_abs(), 3);
    }

    #[test]
    fn serde_round_trip() {
        let a: Mat<i64> = Mat::from_rows(vec![vec![0, 1], vec![-1, 0]]);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, "[[0,1],[-1,0]]");
        let back: Mat<i64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn serde_rejects_ragged() {
        let err = serde_json::from_str::<Mat<i64>>("[[1,2],[3]]");
        assert!(err.is_err());
    }
}
