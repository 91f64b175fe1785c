use std::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::basis::{devectorize_unchecked, vectorize, HermBasis};
use super::herm::{check_same_dim, HermOperator};
use crate::error::{Error, Result};
use crate::scalar::{cabs, Complex, Real};

/// Default relative cutoff for [`SuperOperator::pseudo_inverse`].
pub const PINV_REL_TOL: f64 = 1e-10;

/// Symmetry tolerance for spectral routines.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Linear map on `Herm(C^d)` stored as a real `d^2 x d^2` matrix in the
/// standard Hermitian basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator<T: Real> {
    dim: usize,
    matrix: DMatrix<T>,
}

/// Eigendecomposition of a symmetric superoperator, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<HermOperator<T>>,
}

impl<T: Real> SpectralDecomposition<T> {
    /// `sum_k lambda_k P(v_k)`.
    pub fn reconstruct(&self) -> SuperOperator<T> {
        let d = self.eigenvectors[0].dim();
        let mut m = DMatrix::zeros(d * d, d * d);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let x = vectorize(v);
            m += &x * x.transpose() * *lambda;
        }
        SuperOperator { dim: d, matrix: m }
    }

    pub fn max(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

impl<T: Real> SuperOperator<T> {
    pub fn new(dim: usize, matrix: DMatrix<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        check_same_dim(dim * dim, rows)?;
        Ok(Self { dim, matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            matrix: DMatrix::identity(d * d, d * d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            dim: d,
            matrix: DMatrix::zeros(d * d, d * d),
        }
    }

    /// `P(Y): X -> <Y, X> Y`.
    pub fn outer(y: &HermOperator<T>) -> Self {
        let v = vectorize(y);
        Self {
            dim: y.dim(),
            matrix: &v * v.transpose(),
        }
    }

    /// `sum_b c_b P(Y_b)`, assembled as `M diag(c) M^T`.
    pub fn weighted_outer_sum(elements: &[HermOperator<T>], weights: &[T]) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyInput)?;
        check_same_dim(elements.len(), weights.len())?;
        let d = first.dim();
        let mut cols = DMatrix::zeros(d * d, elements.len());
        let mut scaled = DMatrix::zeros(d * d, elements.len());
        for (b, (el, w)) in elements.iter().zip(weights).enumerate() {
            check_same_dim(d, el.dim())?;
            let v = vectorize(el);
            cols.set_column(b, &v);
            scaled.set_column(b, &(v * *w));
        }
        let matrix = &scaled * cols.transpose();
        Ok(Self {
            dim: d,
            matrix: symmetrize(matrix),
        })
    }

    /// Projector onto traceless operators, `Id - P(I/sqrt(d))`.
    pub fn traceless_projector(d: usize) -> Self {
        let mut matrix = DMatrix::identity(d * d, d * d);
        matrix[(0, 0)] = T::zero();
        Self { dim: d, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, x: &HermOperator<T>) -> Result<HermOperator<T>> {
        check_same_dim(self.dim, x.dim())?;
        Ok(devectorize_unchecked(&(&self.matrix * vectorize(x)), self.dim))
    }

    /// Matrix action on vectorised coordinates.
    pub fn apply_vec(&self, v: &DVector<T>) -> DVector<T> {
        &self.matrix * v
    }

    /// Quadratic form `<X, S(X)>`.
    pub fn quadratic_form(&self, x: &HermOperator<T>) -> Result<T> {
        check_same_dim(self.dim, x.dim())?;
        let v = vectorize(x);
        Ok(v.dot(&(&self.matrix * &v)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn trace(&self) -> T {
        self.matrix.trace()
    }

    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.transpose(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * c,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (&self.matrix - &other.matrix).amax()
    }

    /// Largest entrywise asymmetry `|S_jk - S_kj|`.
    pub fn symmetry_defect(&self) -> T {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect() <= T::tol(SYMMETRY_TOL) * T::one().max(self.matrix.amax())
    }

    /// Full eigendecomposition with eigenvalues sorted descending.
    pub fn eig(&self) -> Result<SpectralDecomposition<T>> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric {
                defect: self.symmetry_defect().as_f64(),
            });
        }
        let (values, vectors) = sorted_eigen(&self.matrix);
        let eigenvectors = (0..values.len())
            .map(|k| devectorize_unchecked(&vectors.column(k).into_owned(), self.dim))
            .collect();
        Ok(SpectralDecomposition {
            eigenvalues: values,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric {
                defect: self.symmetry_defect().as_f64(),
            });
        }
        Ok(sorted_eigen(&self.matrix).0)
    }

    /// Moore–Penrose pseudo-inverse of a symmetric superoperator together with
    /// its numerical rank. Eigenvalues below `rel_tol * max|lambda|` count as zero.
    pub fn pseudo_inverse(&self, rel_tol: f64) -> Result<(Self, usize)> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric {
                defect: self.symmetry_defect().as_f64(),
            });
        }
        let (values, vectors) = sorted_eigen(&self.matrix);
        let scale = values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        let cutoff = T::tol(rel_tol) * scale;
        let n = values.len();
        let mut inv = DMatrix::zeros(n, n);
        let mut rank = 0;
        for (k, &lambda) in values.iter().enumerate() {
            if lambda.abs() <= cutoff || lambda == T::zero() {
                continue;
            }
            rank += 1;
            let v = vectors.column(k);
            inv += v * v.transpose() / lambda;
        }
        Ok((
            Self {
                dim: self.dim,
                matrix: symmetrize(inv),
            },
            rank,
        ))
    }

    /// Numerical rank with the default pseudo-inverse cutoff.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.pseudo_inverse(PINV_REL_TOL)?.1)
    }

    /// Matrix in the unit basis `{|i><j|}` acting on row-major `vec(X)`.
    pub fn to_unit_basis_matrix(&self) -> DMatrix<Complex<T>> {
        let b = unit_change_of_basis::<T>(self.dim);
        let s = self.matrix.map(|x| Complex::new(x, T::zero()));
        &b * s * b.adjoint()
    }

    /// Inverse of [`to_unit_basis_matrix`](Self::to_unit_basis_matrix);
    /// fails if the map does not preserve Hermiticity.
    pub fn from_unit_basis_matrix(d: usize, m: &DMatrix<Complex<T>>) -> Result<Self> {
        if m.shape() != (d * d, d * d) {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: m.nrows(),
            });
        }
        let b = unit_change_of_basis::<T>(d);
        let h = b.adjoint() * m * &b;
        let defect = h.iter().fold(T::zero(), |acc, z| acc.max(z.im.abs()));
        if defect > T::tol(1e-10) * T::one().max(h.iter().fold(T::zero(), |a, z| a.max(cabs(*z)))) {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
            });
        }
        Self::new(d, h.map(|z| z.re))
    }
}

/// Columns are the basis elements flattened row-major.
fn unit_change_of_basis<T: Real>(d: usize) -> DMatrix<Complex<T>> {
    let basis = HermBasis::<T>::standard(d).expect("d >= 2");
    let mut b = DMatrix::zeros(d * d, d * d);
    for (k, el) in basis.elements().iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                b[(i * d + j, k)] = el.matrix()[(i, j)];
            }
        }
    }
    b
}

fn symmetrize<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    let t = m.transpose();
    (m + t) * T::of(0.5)
}

fn sorted_eigen<T: Real>(m: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let eig = SymmetricEigen::new(symmetrize(m.clone()));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

impl<T: Real> Add for &SuperOperator<T> {
    type Output = SuperOperator<T>;

    fn add(self, rhs: Self) -> SuperOperator<T> {
        assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
        SuperOperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl<T: Real> Sub for &SuperOperator<T> {
    type Output = SuperOperator<T>;

    fn sub(self, rhs: Self) -> SuperOperator<T> {
        assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
        SuperOperator {
            dim: self.dim,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}
