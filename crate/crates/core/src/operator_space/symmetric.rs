//! Projectors onto the symmetric subspace of `(C^d)^{⊗t}` for `t = 2, 3`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `Π_sym` on `copies` tensor factors, as a real `d^t x d^t` matrix.
///
/// Tensor index ordering is `i_1 d^{t-1} + ... + i_t`, matching
/// [`tensor_power`].
pub fn sym_projector<T: Real>(d: usize, copies: usize) -> Result<DMatrix<T>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let perms: Vec<Vec<usize>> = match copies {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => PERMS3.iter().map(|p| p.to_vec()).collect(),
        other => return Err(Error::UnsupportedCopies(other)),
    };
    let n = d.pow(copies as u32);
    let weight = T::one() / T::of_usize(perms.len());
    let mut out = DMatrix::zeros(n, n);
    let mut digits = vec![0usize; copies];
    for col in 0..n {
        let mut rem = col;
        for slot in (0..copies).rev() {
            digits[slot] = rem % d;
            rem /= d;
        }
        for perm in &perms {
            let row = perm.iter().fold(0, |acc, &src| acc * d + digits[src]);
            out[(row, col)] += weight;
        }
    }
    Ok(out)
}

/// `psi^{⊗copies}`.
pub fn tensor_power<T: Real>(psi: &DVector<Complex<T>>, copies: usize) -> DVector<Complex<T>> {
    let mut acc = psi.clone();
    for _ in 1..copies {
        acc = acc.kronecker(psi);
    }
    acc
}

/// Dimension of the symmetric subspace, `C(d + t - 1, t)`.
pub fn sym_dimension(d: usize, copies: usize) -> usize {
    (0..copies).fold(1, |acc, k| acc * (d + k) / (k + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_match_symmetric_dimension() {
        for d in 2..=5 {
            let p2 = sym_projector::<f64>(d, 2).unwrap();
            assert_eq!(p2.trace().round() as usize, d * (d + 1) / 2);
            let p3 = sym_projector::<f64>(d, 3).unwrap();
            assert_eq!(p3.trace().round() as usize, d * (d + 1) * (d + 2) / 6);
            assert_eq!(sym_dimension(d, 3), d * (d + 1) * (d + 2) / 6);
        }
    }

    #[test]
    fn idempotent_and_symmetric() {
        for copies in [2, 3] {
            let p = sym_projector::<f64>(3, copies).unwrap();
            assert!((&p * &p - &p).amax() < 1e-12);
            assert!((&p - p.transpose()).amax() < 1e-15);
        }
    }

    #[test]
    fn singlet_is_annihilated() {
        let p = sym_projector::<f64>(2, 2).unwrap();
        let singlet = DVector::from_vec(vec![0.0, 1.0, -1.0, 0.0]);
        assert!((p * singlet).amax() < 1e-15);
    }

    #[test]
    fn unsupported_copies() {
        assert!(matches!(sym_projector::<f64>(2, 4), Err(Error::UnsupportedCopies(4))));
    }
}
