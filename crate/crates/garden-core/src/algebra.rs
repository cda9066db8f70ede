//! The Garden algebra: representation tuples, the residual that measures
//! how far a tuple is from satisfying
//!
//! ```text
//! L_I R_J + L_J R_I = 2 delta_IJ 1
//! R_I L_J + R_J L_I = 2 delta_IJ 1
//! ```
//!
//! the block gamma-hat construction, the equivalent Euclidean Clifford
//! check, and recovery of sign/permutation data from matrices.
//!
//! All functions are pure and generic over the scalar, so the same
//! residual definition serves the exact enumeration backend (`i64`,
//! tolerance zero) and the floating-point solver backend.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::mat::Mat;
use crate::perm::{Permutation, SignedPermutation};
use crate::scalar::Scalar;

/// Default absolute tolerance on the residual for floating-point
/// verification.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("representation needs at least one supercharge")]
    Empty,
    #[error("L and R lists have different lengths: {l} vs {r}")]
    ListLength { l: usize, r: usize },
    #[error("matrix {index} of {side} is {rows}x{cols}, expected {dim}x{dim}")]
    BadShape {
        side: &'static str,
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("{0}")]
    NotSignedPermutation(#[from] NotSignedPermutation),
}

/// A matrix that fails to round to a signed permutation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NotSignedPermutation {
    #[error("column {column} does not contain exactly one entry near +-1 with the rest near 0")]
    Column { column: usize },
    #[error("columns {first} and {second} are both supported on the same row")]
    RowCollision { first: usize, second: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
}

/// An ordered tuple of N pairs `(L_I, R_I)` of d x d matrices; a candidate
/// (or verified) representation of N-extended supersymmetry in one
/// dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct GardenRep<T> {
    l: Vec<Mat<T>>,
    r: Vec<Mat<T>>,
}

impl<T> GardenRep<T> {
    pub fn new(l: Vec<Mat<T>>, r: Vec<Mat<T>>) -> Result<Self, AlgebraError> {
        if l.is_empty() {
            return Err(AlgebraError::Empty);
        }
        if l.len() != r.len() {
            return Err(AlgebraError::ListLength {
                l: l.len(),
                r: r.len(),
            });
        }
        let dim = l[0].rows();
        for (side, mats) in [("L", &l), ("R", &r)] {
            for (index, m) in mats.iter().enumerate() {
                if m.rows() != dim || m.cols() != dim {
                    return Err(AlgebraError::BadShape {
                        side,
                        index,
                        rows: m.rows(),
                        cols: m.cols(),
                        dim,
                    });
                }
            }
        }
        Ok(GardenRep { l, r })
    }

    /// Number of supercharges N.
    pub fn n_colors(&self) -> usize {
        self.l.len()
    }

    /// Matrix size d.
    pub fn dim(&self) -> usize {
        self.l[0].rows()
    }

    pub fn l(&self, i: usize) -> &Mat<T> {
        &self.l[i]
    }

    pub fn r(&self, i: usize) -> &Mat<T> {
        &self.r[i]
    }

    pub fn ls(&self) -> &[Mat<T>] {
        &self.l
    }

    pub fn rs(&self) -> &[Mat<T>] {
        &self.r
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> GardenRep<U> {
        GardenRep {
            l: self.l.iter().map(|m| m.map(&mut f)).collect(),
            r: self.r.iter().map(|m| m.map(&mut f)).collect(),
        }
    }
}

impl GardenRep<i64> {
    /// Builds the exact representation with `L_I = to_matrix(sp_I)` and
    /// `R_I = L_I^T` (forced: signed permutation matrices are orthogonal
    /// and the diagonal relation pins `R_I = L_I^{-1}`).
    pub fn from_signed_perms(sps: &[SignedPermutation]) -> Result<Self, AlgebraError> {
        let l: Vec<Mat<i64>> = sps.iter().map(|sp| sp.to_matrix()).collect();
        let r: Vec<Mat<i64>> = l.iter().map(|m| m.transpose()).collect();
        GardenRep::new(l, r)
    }

    pub fn to_f64(&self) -> GardenRep<f64> {
        self.map(|&x| x as f64)
    }
}

#[derive(Serialize, Deserialize)]
struct GardenRepJson<T> {
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    #[serde(rename = "L")]
    l: Vec<Mat<T>>,
    #[serde(rename = "R")]
    r: Vec<Mat<T>>,
}

impl<T: Serialize + Clone> Serialize for GardenRep<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GardenRepJson {
            n: self.n_colors(),
            d: self.dim(),
            l: self.l.clone(),
            r: self.r.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for GardenRep<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GardenRepJson::<T>::deserialize(deserializer)?;
        let rep = GardenRep::new(raw.l, raw.r).map_err(D::Error::custom)?;
        if rep.n_colors() != raw.n {
            return Err(D::Error::custom(format!(
                "N field says {} but {} matrices are present",
                raw.n,
                rep.n_colors()
            )));
        }
        if rep.dim() != raw.d {
            return Err(D::Error::custom(format!(
                "d field says {} but matrices are {}x{}",
                raw.d,
                rep.dim(),
                rep.dim()
            )));
        }
        Ok(rep)
    }
}

/// Sum over unordered pairs `I <= J` of the squared Frobenius norms of
/// both defining relations. Zero exactly when the tuple is a
/// representation. The `I > J` terms are omitted: both relations are
/// symmetric in `(I, J)`, so they would only double the value.
pub fn garden_residual<T: Scalar>(rep: &GardenRep<T>) -> T {
    let d = rep.dim();
    let two = T::one() + T::one();
    let mut total = T::zero();
    for i in 0..rep.n_colors() {
        for j in i..rep.n_colors() {
            let target = if i == j {
                Mat::<T>::identity(d).scale(&two)
            } else {
                Mat::<T>::zeros(d, d)
            };
            let lr = rep.l(i).mul(rep.r(j)).add(&rep.l(j).mul(rep.r(i)));
            let rl = rep.r(i).mul(rep.l(j)).add(&rep.r(j).mul(rep.l(i)));
            total = total + lr.sub(&target).frob_sq() + rl.sub(&target).frob_sq();
        }
    }
    total
}

/// Whether the residual is within `tol` (use zero for exact scalars).
pub fn is_garden_rep<T: Scalar>(rep: &GardenRep<T>, tol: T) -> bool {
    debug_assert!(tol >= T::zero());
    garden_residual(rep) <= tol
}

/// The N block matrices `[[0, L_I], [R_I, 0]]` of size 2d x 2d.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaHatSet<T> {
    mats: Vec<Mat<T>>,
}

impl<T> GammaHatSet<T> {
    pub fn n_colors(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn mat(&self, i: usize) -> &Mat<T> {
        &self.mats[i]
    }

    pub fn mats(&self) -> &[Mat<T>] {
        &self.mats
    }
}

pub fn build_gamma_hats<T: Scalar>(rep: &GardenRep<T>) -> GammaHatSet<T> {
    let d = rep.dim();
    let mats = (0..rep.n_colors())
        .map(|i| {
            let mut g = Mat::zeros(2 * d, 2 * d);
            for a in 0..d {
                for b in 0..d {
                    g[(a, d + b)] = rep.l(i)[(a, b)].clone();
                    g[(d + a, b)] = rep.r(i)[(a, b)].clone();
                }
            }
            g
        })
        .collect();
    GammaHatSet { mats }
}

/// Largest entrywise deviation of the anticommutators
/// `{gamma_I, gamma_J}` from `2 delta_IJ 1`.
pub fn clifford_max_deviation<T: Scalar>(g: &GammaHatSet<T>) -> T {
    let dim = g.dim();
    let two = T::one() + T::one();
    let mut worst = T::zero();
    for i in 0..g.n_colors() {
        for j in i..g.n_colors() {
            let target = if i == j {
                Mat::<T>::identity(dim).scale(&two)
            } else {
                Mat::<T>::zeros(dim, dim)
            };
            let anti = g.mat(i).mul(g.mat(j)).add(&g.mat(j).mul(g.mat(i)));
            let dev = anti.sub(&target).max_abs();
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// Whether the gamma-hats close a Euclidean Clifford algebra within `tol`.
pub fn clifford_check<T: Scalar>(g: &GammaHatSet<T>, tol: T) -> bool {
    debug_assert!(tol >= T::zero());
    clifford_max_deviation(g) <= tol
}

/// Recovers the `S * P` factorization of a matrix that is entrywise
/// within `tol` of a signed permutation matrix.
pub fn decompose_sp<T: Scalar>(
    m: &Mat<T>,
    tol: T,
) -> Result<SignedPermutation, NotSignedPermutation> {
    if !m.is_square() {
        return Err(NotSignedPermutation::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let d = m.rows();
    let one = T::one();
    let mut images = vec![0usize; d];
    let mut signs = vec![0i8; d];
    let mut row_owner: Vec<Option<usize>> = vec![None; d];
    for j in 0..d {
        let mut hit: Option<(usize, i8)> = None;
        for i in 0..d {
            let x = m[(i, j)].clone();
            if (x.clone() - one.clone()).abs() <= tol {
                if hit.is_some() {
                    return Err(NotSignedPermutation::Column { column: j });
                }
                hit = Some((i, 1));
            } else if (x.clone() + one.clone()).abs() <= tol {
                if hit.is_some() {
                    return Err(NotSignedPermutation::Column { column: j });
                }
                hit = Some((i, -1));
            } else if x.abs() > tol {
                return Err(NotSignedPermutation::Column { column: j });
            }
        }
        let (i, sign) = hit.ok_or(NotSignedPermutation::Column { column: j })?;
        if let Some(prev) = row_owner[i] {
            return Err(NotSignedPermutation::RowCollision {
                first: prev,
                second: j,
            });
        }
        row_owner[i] = Some(j);
        images[j] = i;
        signs[i] = sign;
    }
    let perm = Permutation::from_images_one_based(
        &images.iter().map(|&x| x + 1).collect::<Vec<_>>(),
    )
    .expect("column scan produced a bijection");
    Ok(SignedPermutation::new(perm, signs).expect("signs are +-1 by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn rep1(l: i64, r: i64) -> GardenRep<i64> {
        GardenRep::new(
            vec![Mat::from_rows(vec![vec![l]])],
            vec![Mat::from_rows(vec![vec![r]])],
        )
        .unwrap()
    }

    #[test]
    fn residual_of_trivial_rep() {
        assert_eq!(garden_residual(&rep1(1, 1)), 0);
    }

    #[test]
    fn residual_of_scaled_rep_is_eight() {
        // both 1x1 relations read 2*2 - 2 = 2, squared and summed: 8
        assert_eq!(garden_residual(&rep1(1, 2)), 8);
        assert!(is_garden_rep(&rep1(1, 1), 0));
        assert!(!is_garden_rep(&rep1(1, 2).to_f64(), 1e-9));
    }

    #[test]
    fn gamma_hats_block_structure() {
        let hats = build_gamma_hats(&rep1(1, 1));
        assert_eq!(
            *hats.mat(0),
            Mat::from_rows(vec![vec![0, 1], vec![1, 0]])
        );
        assert!(clifford_check(&hats, 0));
    }

    #[test]
    fn gamma_hat_diagonal_blocks_are_zero() {
        let sp = SignedPermutation::new(
            Permutation::parse_cycles("(1234)", 4).unwrap(),
            vec![1, -1, 1, -1],
        )
        .unwrap();
        let rep = GardenRep::from_signed_perms(&[sp]).unwrap();
        let hats = build_gamma_hats(&rep);
        let d = rep.dim();
        for a in 0..d {
            for b in 0..d {
                assert_eq!(hats.mat(0)[(a, b)], 0);
                assert_eq!(hats.mat(0)[(d + a, d + b)], 0);
            }
        }
    }

    #[test]
    fn clifford_check_rejects_scaled_rep() {
        let hats = build_gamma_hats(&rep1(1, 2).to_f64());
        // anticommutator is 4 on the diagonal instead of 2
        assert!(!clifford_check(&hats, 1e-9));
        assert_eq!(clifford_max_deviation(&hats), 2.0);
    }

    #[test]
    fn decompose_sp_round_trips() {
        let m: Mat<f64> = Mat::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let sp = decompose_sp(&m, 1e-9).unwrap();
        assert_eq!(sp.perm().to_cycle_string(), "(12)");
        assert_eq!(sp.signs(), &[1, -1]);
        assert_eq!(
            decompose_sp(&Mat::<i64>::identity(3), 0).unwrap(),
            SignedPermutation::identity(3)
        );
    }

    #[test]
    fn decompose_sp_rejects_non_sign_matrices() {
        let m: Mat<f64> = Mat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(
            decompose_sp(&m, 1e-6),
            Err(NotSignedPermutation::Column { column: 0 })
        );
        let twice: Mat<i64> = Mat::from_rows(vec![vec![1, 1], vec![0, 0]]);
        assert!(decompose_sp(&twice, 0).is_err());
    }

    #[test]
    fn rep_json_round_trip() {
        let rep = rep1(1, 1);
        let text = serde_json::to_string(&rep).unwrap();
        assert_eq!(text, r#"{"N":1,"d":1,"L":[[[1]]],"R":[[[1]]]}"#);
        let back: GardenRep<i64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert!(serde_json::from_str::<GardenRep<i64>>(
            r#"{"N":2,"d":1,"L":[[[1]]],"R":[[[1]]]}"#
        )
        .is_err());
    }

    #[test]
    fn shape_validation() {
        let bad = GardenRep::new(
            vec![Mat::<i64>::identity(2)],
            vec![Mat::<i64>::identity(3)],
        );
        assert!(matches!(bad, Err(AlgebraError::BadShape { .. })));
        assert!(matches!(
            GardenRep::<i64>::new(vec![], vec![]),
            Err(AlgebraError::Empty)
        ));
    }
}
