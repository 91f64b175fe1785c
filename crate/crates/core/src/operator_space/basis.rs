//! Generalized Gell-Mann basis of `Herm(C^d)` and real vectorisation.
//!
//! Element ordering is frozen, since every vectorised fixture depends on it:
//!
//! 1. `I/sqrt(d)`;
//! 2. symmetric `(|j><k| + |k><j|)/sqrt(2)` for `j < k`, lexicographic;
//! 3. antisymmetric `(-i|j><k| + i|k><j|)/sqrt(2)` for `j < k`, lexicographic;
//! 4. diagonal `(sum_{j<l} |j><j| - l|l><l|)/sqrt(l(l+1))` for `l = 1..d-1`.
//!
//! For `d = 2` this is `{I, X, Y, Z}/sqrt(2)`.

use nalgebra::{DMatrix, DVector};

use super::herm::{check_same_dim, HermOperator};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Role of a basis element in the frozen ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisElement {
    Identity,
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
    Diagonal(usize),
}

/// Layout of the `d^2` basis elements.
pub fn layout(d: usize) -> Vec<BasisElement> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    let mut out = Vec::with_capacity(d * d);
    out.push(BasisElement::Identity);
    out.extend(pairs.iter().map(|&(j, k)| BasisElement::Symmetric(j, k)));
    out.extend(pairs.iter().map(|&(j, k)| BasisElement::Antisymmetric(j, k)));
    out.extend((1..d).map(BasisElement::Diagonal));
    out
}

/// Orthonormal Hermitian basis `{sigma_k}` of `Herm(C^d)` with `sigma_0 = I/sqrt(d)`.
#[derive(Clone, Debug)]
pub struct HermBasis<T: Real> {
    dim: usize,
    elements: Vec<HermOperator<T>>,
}

impl<T: Real> HermBasis<T> {
    /// Generalized Gell-Mann basis in the frozen ordering.
    pub fn standard(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let elements = (0..d * d)
            .map(|k| {
                let mut v = DVector::zeros(d * d);
                v[k] = T::one();
                devectorize_unchecked(&v, d)
            })
            .collect();
        Ok(Self { dim: d, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermOperator<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Components `<sigma_k, X>`.
    pub fn vectorize(&self, x: &HermOperator<T>) -> Result<DVector<T>> {
        check_same_dim(self.dim, x.dim())?;
        Ok(vectorize(x))
    }

    /// `sum_k v_k sigma_k`.
    pub fn devectorize(&self, v: &DVector<T>) -> Result<HermOperator<T>> {
        devectorize(v, self.dim)
    }
}

/// Components of `X` in the standard basis, computed directly from the entries.
pub fn vectorize<T: Real>(x: &HermOperator<T>) -> DVector<T> {
    let d = x.dim();
    let m = x.matrix();
    let sqrt2 = T::of(2.0).sqrt();
    let mut out = DVector::zeros(d * d);
    out[0] = x.trace() / T::of_usize(d).sqrt();
    let npairs = d * (d - 1) / 2;
    let mut p = 0;
    for j in 0..d {
        for k in j + 1..d {
            let z = m[(j, k)];
            out[1 + p] = sqrt2 * z.re;
            out[1 + npairs + p] = -sqrt2 * z.im;
            p += 1;
        }
    }
    let mut running = T::zero();
    for l in 1..d {
        running += m[(l - 1, l - 1)].re;
        let lf = T::of_usize(l);
        out[2 * npairs + l] = (running - lf * m[(l, l)].re) / (lf * (lf + T::one())).sqrt();
    }
    out
}

/// Inverse of [`vectorize`].
pub fn devectorize<T: Real>(v: &DVector<T>, d: usize) -> Result<HermOperator<T>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    check_same_dim(d * d, v.len())?;
    Ok(devectorize_unchecked(v, d))
}

pub(crate) fn devectorize_unchecked<T: Real>(v: &DVector<T>, d: usize) -> HermOperator<T> {
    let inv_sqrt2 = T::one() / T::of(2.0).sqrt();
    let mut m = DMatrix::<Complex<T>>::zeros(d, d);
    let id = v[0] / T::of_usize(d).sqrt();
    for i in 0..d {
        m[(i, i)].re = id;
    }
    let npairs = d * (d - 1) / 2;
    let mut p = 0;
    for j in 0..d {
        for k in j + 1..d {
            let s = v[1 + p] * inv_sqrt2;
            let a = v[1 + npairs + p] * inv_sqrt2;
            // sym: (|j><k| + |k><j|), antisym: (-i|j><k| + i|k><j|)
            m[(j, k)] = Complex::new(s, -a);
            m[(k, j)] = Complex::new(s, a);
            p += 1;
        }
    }
    for l in 1..d {
        let lf = T::of_usize(l);
        let c = v[2 * npairs + l] / (lf * (lf + T::one())).sqrt();
        for j in 0..l {
            m[(j, j)].re += c;
        }
        m[(l, l)].re -= lf * c;
    }
    HermOperator::hermitian_part(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_space::herm::pauli;

    #[test]
    fn qubit_basis_is_scaled_paulis() {
        let basis = HermBasis::<f64>::standard(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (el, label) in basis.elements().iter().zip(['I', 'X', 'Y', 'Z']) {
            let expected = pauli::<f64>(label).unwrap().scale(s);
            assert!(el.max_abs_diff(&expected) < 1e-15, "{label}");
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        for d in [2, 3, 4, 5] {
            let basis = HermBasis::<f64>::standard(d).unwrap();
            assert_eq!(basis.len(), d * d);
            for (j, a) in basis.elements().iter().enumerate() {
                for (k, b) in basis.elements().iter().enumerate() {
                    let g = a.hs_inner(b).unwrap();
                    let e = if j == k { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-12, "d={d} ({j},{k}) -> {g}");
                }
            }
        }
    }

    #[test]
    fn traces_of_elements() {
        let d = 4;
        let basis = HermBasis::<f64>::standard(d).unwrap();
        assert!((basis.elements()[0].trace() - (d as f64).sqrt()).abs() < 1e-14);
        for el in &basis.elements()[1..] {
            assert!(el.trace().abs() < 1e-12);
        }
    }

    #[test]
    fn vectorize_matches_inner_products() {
        let d = 3;
        let basis = HermBasis::<f64>::standard(d).unwrap();
        let x = &(&basis.elements()[2].scale(0.3) + &basis.elements()[7].scale(-1.7)) + &HermOperator::identity(d);
        let fast = vectorize(&x);
        for (k, el) in basis.elements().iter().enumerate() {
            assert!((fast[k] - el.hs_inner(&x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn qubit_vectorize_examples() {
        let r2 = 2f64.sqrt();
        let v = vectorize(&HermOperator::<f64>::identity(2));
        assert!((v - DVector::from_vec(vec![r2, 0.0, 0.0, 0.0])).amax() < 1e-15);
        let v = vectorize(&pauli::<f64>('Z').unwrap());
        assert!((v - DVector::from_vec(vec![0.0, 0.0, 0.0, r2])).amax() < 1e-15);
    }

    #[test]
    fn layout_order() {
        use BasisElement::*;
        assert_eq!(
            layout(3),
            vec![
                Identity,
                Symmetric(0, 1),
                Symmetric(0, 2),
                Symmetric(1, 2),
                Antisymmetric(0, 1),
                Antisymmetric(0, 2),
                Antisymmetric(1, 2),
                Diagonal(1),
                Diagonal(2),
            ]
        );
    }

    #[test]
    fn devectorize_checks_length() {
        let v = DVector::<f64>::zeros(5);
        assert!(devectorize(&v, 2).is_err());
    }
}
