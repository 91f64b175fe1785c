use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cabs, re, Complex, Real};

/// Absolute Hermiticity tolerance for externally supplied matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A `d x d` Hermitian matrix with `d >= 2`.
///
/// States, POVM elements, observables and dual-frame elements are all
/// represented by this type.
#[derive(Clone, Debug, PartialEq)]
pub struct HermOperator<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> HermOperator<T> {
    /// Wraps a matrix after checking it is square, at least `2 x 2` and
    /// Hermitian to within `1e-12` entrywise.
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::DimensionTooSmall(rows));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > T::tol(HERMITICITY_TOL) {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
            });
        }
        Ok(Self::hermitian_part(matrix))
    }

    /// Builds an operator from real entries (a real symmetric matrix).
    pub fn from_real(matrix: DMatrix<T>) -> Result<Self> {
        Self::new(matrix.map(re))
    }

    /// Takes `(M + M^†) / 2`. Used for results of arithmetic that is
    /// Hermitian in exact arithmetic.
    pub(crate) fn hermitian_part(matrix: DMatrix<Complex<T>>) -> Self {
        let half = T::of(0.5);
        let adj = matrix.adjoint();
        let matrix = (matrix + adj).map(|z| z * half);
        Self { matrix }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(d, d),
        }
    }

    /// `|v><v|` (not normalised).
    pub fn projector(v: &DVector<Complex<T>>) -> Self {
        let matrix = v * v.adjoint();
        Self::hermitian_part(matrix)
    }

    /// Computational basis projector `|k><k|`.
    pub fn basis_projector(d: usize, k: usize) -> Self {
        let mut matrix = DMatrix::zeros(d, d);
        matrix[(k, k)] = Complex::new(T::one(), T::zero());
        Self { matrix }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self::identity(d).scale(T::one() / T::of_usize(d))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.matrix[(i, i)].re)
    }

    /// Hilbert–Schmidt inner product `tr(X^† Y)`; panics on dimension mismatch.
    pub(crate) fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(T::zero(), |acc, (x, y)| acc + x.re * y.re + x.im * y.im)
    }

    /// Hilbert–Schmidt inner product `tr(X^† Y)`.
    pub fn hs_inner(&self, other: &Self) -> Result<T> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.dot(other))
    }

    /// `||X||_2^2 = tr(X^2)`; the purity when `X` is a state.
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * c),
        }
    }

    /// `X^2`.
    pub fn square(&self) -> Self {
        Self::hermitian_part(&self.matrix * &self.matrix)
    }

    /// `U X U^†`.
    pub fn conjugate_by(&self, u: &DMatrix<Complex<T>>) -> Self {
        Self::hermitian_part(u * &self.matrix * u.adjoint())
    }

    /// `tr(X Y)` for Hermitian inputs, equal to the HS inner product.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        self.hs_inner(other)
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<T>, DMatrix<Complex<T>>) {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().0
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        *self.eigenvalues().last().expect("dim >= 2")
    }

    /// Spectral norm.
    pub fn op_norm(&self) -> T {
        let ev = self.eigenvalues();
        ev[0].abs().max(ev[ev.len() - 1].abs())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(T::zero(), |acc, (x, y)| acc.max(cabs(*x - *y)))
    }

    /// Checks that this is a density matrix: unit trace within `1e-9` and
    /// minimum eigenvalue at least `-1e-10`.
    pub fn check_density_matrix(&self) -> Result<()> {
        let trace = self.trace();
        if (trace - T::one()).abs() > T::tol(1e-9) {
            return Err(Error::InvalidState(format!("trace {} differs from 1", trace.as_f64())));
        }
        let min = self.min_eigenvalue();
        if min < -T::tol(1e-10) {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", min.as_f64())));
        }
        Ok(())
    }

    /// Expectation `<phi| X |phi>`.
    pub fn expectation(&self, phi: &DVector<Complex<T>>) -> T {
        (phi.adjoint() * &self.matrix * phi)[(0, 0)].re
    }

    /// Converts to another precision.
    pub fn cast<U: Real>(&self) -> HermOperator<U> {
        HermOperator {
            matrix: self
                .matrix
                .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64()))),
        }
    }
}

/// Hilbert–Schmidt inner product `<X, Y> = tr(X^† Y)`; real for Hermitian
/// arguments.
pub fn hs_inner<T: Real>(x: &HermOperator<T>, y: &HermOperator<T>) -> Result<T> {
    x.hs_inner(y)
}

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn hermiticity_defect<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let n = m.nrows();
    let mut defect = T::zero();
    for i in 0..n {
        for j in i..n {
            defect = defect.max(cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    defect
}

/// Single-qubit Pauli matrix by label (`I`, `X`, `Y`, `Z`).
pub fn pauli<T: Real>(label: char) -> Option<HermOperator<T>> {
    let (o, l) = (T::zero(), T::one());
    let c = Complex::new;
    let entries = match label.to_ascii_uppercase() {
        'I' => [c(l, o), c(o, o), c(o, o), c(l, o)],
        'X' => [c(o, o), c(l, o), c(l, o), c(o, o)],
        'Y' => [c(o, o), c(o, -l), c(o, l), c(o, o)],
        'Z' => [c(l, o), c(o, o), c(o, o), c(-l, o)],
        _ => return None,
    };
    Some(HermOperator {
        matrix: DMatrix::from_row_slice(2, 2, &entries),
    })
}

/// Tensor product of Pauli matrices, e.g. `"XZ"` acting on two qubits.
pub fn pauli_string<T: Real>(labels: &str) -> Option<HermOperator<T>> {
    let mut acc: Option<DMatrix<Complex<T>>> = None;
    for ch in labels.chars() {
        let p = pauli::<T>(ch)?.matrix;
        acc = Some(match acc {
            None => p,
            Some(m) => m.kronecker(&p),
        });
    }
    acc.map(|matrix| HermOperator { matrix })
}

impl<T: Real> Add for &HermOperator<T> {
    type Output = HermOperator<T>;

    fn add(self, rhs: Self) -> HermOperator<T> {
        HermOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl<T: Real> Sub for &HermOperator<T> {
    type Output = HermOperator<T>;

    fn sub(self, rhs: Self) -> HermOperator<T> {
        HermOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl<T: Real> Neg for &HermOperator<T> {
    type Output = HermOperator<T>;

    fn neg(self) -> HermOperator<T> {
        HermOperator { matrix: -&self.matrix }
    }
}

impl<T: Real> Mul<T> for &HermOperator<T> {
    type Output = HermOperator<T>;

    fn mul(self, rhs: T) -> HermOperator<T> {
        self.scale(rhs)
    }
}

impl<T: Real> std::iter::Sum for HermOperator<T> {
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("sum of at least one operator");
        iter.fold(first, |acc, x| &acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(entries: &[(f64, f64)]) -> DVector<Complex<f64>> {
        DVector::from_iterator(entries.len(), entries.iter().map(|&(r, i)| Complex::new(r, i)))
    }

    #[test]
    fn hs_inner_examples() {
        let id = HermOperator::<f64>::identity(2);
        assert_eq!(hs_inner(&id, &id).unwrap(), 2.0);
        let z = pauli::<f64>('Z').unwrap();
        assert_eq!(hs_inner(&z, &z).unwrap(), 2.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p0 = HermOperator::basis_projector(2, 0);
        let plus = HermOperator::projector(&ket(&[(h, 0.0), (h, 0.0)]));
        assert!((hs_inner(&p0, &plus).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = HermOperator::<f64>::identity(2);
        let b = HermOperator::<f64>::identity(3);
        assert!(matches!(
            hs_inner(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn rejects_non_hermitian_and_tiny_dims() {
        let c = |re: f64| Complex::new(re, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(matches!(HermOperator::new(m), Err(Error::NotHermitian { .. })));
        let one = DMatrix::from_element(1, 1, Complex::new(1.0, 0.0));
        assert!(matches!(HermOperator::new(one), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn eigenvalues_sorted_ascending() {
        let x = pauli::<f64>('X').unwrap();
        let ev = x.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!((x.op_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_string_is_kronecker_product() {
        let xz = pauli_string::<f64>("XZ").unwrap();
        assert_eq!(xz.dim(), 4);
        assert!((xz.norm_sq() - 4.0).abs() < 1e-14);
        assert!(xz.trace().abs() < 1e-14);
        assert!(pauli_string::<f64>("XQ").is_none());
    }

    #[test]
    fn density_matrix_check() {
        let mixed = HermOperator::<f64>::maximally_mixed(3);
        assert!(mixed.check_density_matrix().is_ok());
        assert!(HermOperator::<f64>::identity(2).check_density_matrix().is_err());
    }
}
