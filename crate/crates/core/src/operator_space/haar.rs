//! Random unitaries, states and observables.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::herm::HermOperator;
use crate::error::{Error, Result};
use crate::scalar::{cabs, Complex, Real};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(rng.sample::<f64, _>(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex<T>> {
    let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
    DMatrix::from_fn(rows, cols, |_, _| {
        let re = gaussian::<T, R>(rng);
        let im = gaussian::<T, R>(rng);
        Complex::new(re * s, im * s)
    })
}

/// Haar-distributed `d x d` unitary (QR of a Ginibre matrix with the phases
/// of `R`'s diagonal absorbed into `Q`).
pub fn random_haar_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex<T>> {
    loop {
        let g = ginibre::<T, R>(d, d, rng);
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        let mut degenerate = false;
        for k in 0..d {
            let rkk = r[(k, k)];
            let n = cabs(rkk);
            if n == T::zero() {
                degenerate = true;
                break;
            }
            let phase = rkk / Complex::new(n, T::zero());
            for z in q.column_mut(k).iter_mut() {
                *z *= phase;
            }
        }
        if !degenerate {
            return q;
        }
    }
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex<T>> {
    let v: DVector<Complex<T>> = DVector::from_fn(d, |_, _| {
        let re = gaussian::<T, R>(rng);
        let im = gaussian::<T, R>(rng);
        Complex::new(re, im)
    });
    let n = v.norm();
    v.unscale(n)
}

/// `U diag(spectrum) U^†` with Haar `U`.
pub fn random_state<T: Real, R: Rng + ?Sized>(d: usize, spectrum: &[T], rng: &mut R) -> Result<HermOperator<T>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    check_spectrum(d, spectrum)?;
    let u = random_haar_unitary::<T, R>(d, rng);
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        d,
        spectrum.iter().map(|&p| Complex::new(p, T::zero())),
    ));
    Ok(HermOperator::new(diag)?.conjugate_by(&u))
}

/// Conjugates a fixed operator by a Haar-random unitary.
pub fn haar_conjugate<T: Real, R: Rng + ?Sized>(x: &HermOperator<T>, rng: &mut R) -> HermOperator<T> {
    let u = random_haar_unitary::<T, R>(x.dim(), rng);
    x.conjugate_by(&u)
}

/// Checks that `spectrum` is a probability vector of length `d`.
pub fn check_spectrum<T: Real>(d: usize, spectrum: &[T]) -> Result<()> {
    if spectrum.len() != d {
        return Err(Error::InvalidSpectrum(format!(
            "expected {d} eigenvalues, got {}",
            spectrum.len()
        )));
    }
    if let Some(p) = spectrum.iter().find(|p| **p < T::zero()) {
        return Err(Error::InvalidSpectrum(format!("negative eigenvalue {}", p.as_f64())));
    }
    let total = spectrum.iter().fold(T::zero(), |a, &p| a + p);
    if (total - T::one()).abs() > T::tol(1e-12) {
        return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {}", total.as_f64())));
    }
    Ok(())
}

/// Spectrum `(p, (1-p)/(d-1), ...)` with the given purity, which must lie in
/// `[1/d, 1]`.
pub fn spectrum_with_purity<T: Real>(d: usize, purity: T) -> Result<Vec<T>> {
    let df = T::of_usize(d);
    let low = T::one() / df;
    if purity < low - T::tol(1e-12) || purity > T::one() + T::tol(1e-12) {
        return Err(Error::OutOfRange {
            name: "purity",
            value: purity.as_f64(),
            low: low.as_f64(),
            high: 1.0,
        });
    }
    // Solve p^2 + (1-p)^2/(d-1) = P for the largest root p.
    let m = df - T::one();
    let disc = ((purity * df - T::one()) * m).max(T::zero()).sqrt();
    let p = (T::one() + disc) / df;
    let rest = (T::one() - p) / m;
    let mut spectrum = vec![rest; d];
    spectrum[0] = p;
    let total = spectrum.iter().fold(T::zero(), |a, &x| a + x);
    spectrum[0] += T::one() - total;
    Ok(spectrum)
}

/// Gaussian (GUE-like) Hermitian matrix.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermOperator<T> {
    let g = ginibre::<T, R>(d, d, rng);
    HermOperator::new(&g + g.adjoint()).expect("G + G^† is Hermitian")
}

/// Random observable with `tr O = 0` and `tr O^2 = 1`.
pub fn random_traceless_observable<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermOperator<T> {
    let h = random_hermitian::<T, R>(d, rng);
    let shift = HermOperator::identity(d).scale(h.trace() / T::of_usize(d));
    let traceless = &h - &shift;
    let n = traceless.norm();
    traceless.scale(T::one() / n)
}

/// Full-rank random density matrix `G G^† / tr(G G^†)`.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermOperator<T> {
    let g = ginibre::<T, R>(d, d, rng);
    let w = HermOperator::new(&g * g.adjoint()).expect("G G^† is Hermitian");
    let t = w.trace();
    w.scale(T::one() / t)
}

/// Haar-random pure state `|psi><psi|`.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermOperator<T> {
    HermOperator::projector(&random_pure_vector::<T, R>(d, rng))
}
