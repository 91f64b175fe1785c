use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::{random_haar_unitary, HermOperator};
use crate::povm::unit_vector;
use crate::scalar::{Complex, Real};

/// One sample of the covariant measurement.
#[derive(Clone, Debug)]
pub struct CovariantDraw<T: Real> {
    /// `mu_{U,b} = U^† |b><b| U`.
    pub element: HermOperator<T>,
    pub outcome: usize,
    pub unitary: DMatrix<Complex<T>>,
}

/// Sampler for the continuous POVM `{U^† |b><b| U}` with Haar `U`.
///
/// Draws a Haar unitary, then an outcome `b` with probability
/// `<b| U rho U^† |b>`. Holds its own RNG and is meant for one thread.
#[derive(Clone, Debug)]
pub struct CovariantSampler {
    dim: usize,
    rng: ChaCha8Rng,
}

impl CovariantSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self::from_rng(dim, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn from_rng(dim: usize, rng: ChaCha8Rng) -> Self {
        Self { dim, rng }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn draw<T: Real>(&mut self, rho: &HermOperator<T>) -> Result<CovariantDraw<T>> {
        check_same_dim(self.dim, rho.dim())?;
        rho.check_density_matrix()?;
        let (unitary, outcome) = self.draw_unchecked(rho);
        let ket = unit_vector::<T>(self.dim, outcome);
        let element = HermOperator::projector(&ket).conjugate_by(&unitary.adjoint());
        Ok(CovariantDraw {
            element,
            outcome,
            unitary,
        })
    }

    /// Samples `(U, b)` without validating `rho`.
    pub(crate) fn draw_unchecked<T: Real>(&mut self, rho: &HermOperator<T>) -> (DMatrix<Complex<T>>, usize) {
        let u = random_haar_unitary::<T, _>(self.dim, &mut self.rng);
        let rotated = rho.conjugate_by(&u);
        let x: f64 = self.rng.random();
        let mut cum = 0.0;
        let mut outcome = self.dim - 1;
        for b in 0..self.dim {
            cum += rotated.matrix()[(b, b)].re.as_f64().max(0.0);
            if x < cum {
                outcome = b;
                break;
            }
        }
        (u, outcome)
    }
}
