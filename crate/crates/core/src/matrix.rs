//! Dense complex matrices, the unitary gate carrier and the shared matrix
//! JSON format.

use std::f64::consts::TAU;
use std::ops::Mul;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use nalgebra::Complex;
pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Default tolerance on `max |U†U − I|` for accepting a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(2πi·k/n)`, with the exponent reduced modulo `n` first. Quarter
/// turns are returned exactly.
pub fn root_of_unity(k: i64, n: u64) -> C64 {
    let n_i = n as i64;
    let r = k.rem_euclid(n_i);
    if (4 * r) % n_i == 0 {
        return match (4 * r) / n_i {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, TAU * r as f64 / n as f64)
}

/// `exp(2πi·t)` for a real number of turns `t`.
pub fn turns(t: f64) -> C64 {
    C64::from_polar(1.0, TAU * t)
}

/// `max |A†A − I|` over entries.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `min_φ max |a − e^{iφ} b|`, evaluated at the phase aligning `b` with `a`
/// in Hilbert-Schmidt inner product.
pub fn projective_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    max_abs_diff(a, &(b * phase))
}

/// Kronecker product with the first factor as the most significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Permutation matrix `P` with `P|x⟩ = |perm[x]⟩`.
pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let mut m = CMatrix::zeros(n, n);
    for (x, &y) in perm.iter().enumerate() {
        m[(y, x)] = c(1.0, 0.0);
    }
    m
}

pub fn diagonal(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

/// Eigenvalues of a square complex matrix from the diagonal of its Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numeric("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues of a unitary matrix via the commuting Hermitian pair
/// `A = (U + U†)/2`, `B = (U − U†)/2i`: eigenvectors of `A + tB` are read back
/// through `v†Uv`. Falls back to the Schur form if every pencil is degenerate.
pub fn unitary_eigenvalues(u: &CMatrix) -> Result<Vec<C64>> {
    let a = (u + u.adjoint()) * c(0.5, 0.0);
    let b = (u - u.adjoint()) * c(0.0, -0.5);
    for t in [0.754_877_666_246_692_7, 1.324_717_957_244_746, 0.213_817_4] {
        let (_, vecs) = hermitian_eigen(&(&a + &b * c(t, 0.0)))?;
        let vals: Vec<C64> = vecs
            .column_iter()
            .map(|v| (v.adjoint() * u * v)[(0, 0)])
            .collect();
        if vals.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9) {
            return Ok(vals);
        }
    }
    eigenvalues(u)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending with
/// eigenvectors as the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let eig = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, k| {
        eig.eigenvectors[(r, order[k])]
    });
    Ok((values, vectors))
}

/// A square complex matrix that passed a unitarity check.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, UNITARY_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "empty matrix",
            });
        }
        let deviation = unitarity_deviation(&m);
        if deviation.is_nan() || deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryMatrix { m })
    }

    /// Wraps a matrix that is unitary by construction.
    pub(crate) fn trusted(m: CMatrix) -> Self {
        debug_assert!(unitarity_deviation(&m) < 1e-8);
        UnitaryMatrix { m }
    }

    pub fn identity(d: usize) -> Self {
        UnitaryMatrix {
            m: CMatrix::identity(d, d),
        }
    }

    /// Diagonal unitary from unit-modulus values.
    pub fn diagonal(values: &[C64]) -> Result<Self> {
        Self::new(diagonal(values))
    }

    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &y in perm {
            if y >= perm.len() || seen[y] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[y] = true;
        }
        Ok(UnitaryMatrix {
            m: permutation_matrix(perm),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix {
            m: self.m.adjoint(),
        }
    }

    pub fn kron(&self, other: &UnitaryMatrix) -> Self {
        UnitaryMatrix {
            m: kron(&self.m, &other.m),
        }
    }

    /// Integer power; negative exponents use the adjoint.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.adjoint() } else { self.clone() };
        let mut acc = UnitaryMatrix::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    pub fn times_phase(&self, phase: C64) -> Self {
        UnitaryMatrix { m: &self.m * phase }
    }

    /// `self · other · self†`.
    pub fn conjugate(&self, other: &CMatrix) -> CMatrix {
        &self.m * other * self.m.adjoint()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.m[(i, i)]).collect()
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in product");
        UnitaryMatrix {
            m: &self.m * &rhs.m,
        }
    }
}

impl Mul for UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: UnitaryMatrix) -> UnitaryMatrix {
        &self * &rhs
    }
}

/// Wire format `{"dim": n, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson {
            dim: m.nrows(),
            entries: (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::MalformedMatrix("dim must be positive".into()));
        }
        if self.entries.len() != self.dim {
            return Err(Error::MalformedMatrix(format!(
                "expected {} rows, found {}",
                self.dim,
                self.entries.len()
            )));
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.dim
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::MalformedMatrix(format!(
                        "non-finite entry at ({i}, {j})"
                    )));
                }
                m[(i, j)] = c(re, im);
            }
        }
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedMatrix(e.to_string()))
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(&self.m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let m = raw.to_matrix().map_err(serde::de::Error::custom)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
