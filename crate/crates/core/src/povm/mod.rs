//! POVM construction, validation and structure checks.

mod covariant;
mod design;
mod document;

pub use covariant::{CovariantDraw, CovariantSampler};
pub use design::{is_2design, is_3design, DesignCheck, DESIGN_TOL};
pub use document::{content_hash, operator_from_rows, operator_rows, PovmDocument};

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_space::{random_haar_unitary, HermOperator};
use crate::scalar::{cabs, Complex, Real};

/// Tolerances used by [`Povm::validate`].
pub const PSD_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-9;
pub const RANK1_TOL: f64 = 1e-10;
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// One term `w |psi><psi|` of a rank-1 POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedState<T: Real> {
    pub weight: T,
    pub state: DVector<Complex<T>>,
}

impl<T: Real> WeightedState<T> {
    pub fn element(&self) -> HermOperator<T> {
        HermOperator::projector(&self.state).scale(self.weight)
    }
}

/// Finite POVM `{mu_b}` on `C^d`, optionally carrying its rank-1 form.
#[derive(Clone, Debug)]
pub struct Povm<T: Real> {
    dim: usize,
    elements: Vec<HermOperator<T>>,
    rank1: Option<Vec<WeightedState<T>>>,
}

/// Outcome of [`Povm::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub outcomes: usize,
    /// `max(0, -min_b lambda_min(mu_b))`.
    pub psd_defect: f64,
    /// Max-entry norm of `sum_b mu_b - I`.
    pub completeness_defect: f64,
    /// Max-entry norm of `mu_b - w_b P(psi_b)`, when a rank-1 form is present.
    pub rank1_defect: Option<f64>,
    /// `|sum_b w_b - d|`, when a rank-1 form is present.
    pub weight_sum_defect: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// The three single-qubit POVMs used as worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AppendixPovm {
    /// `{P0, P1}`.
    Projective,
    /// `{P0, P1, P+, P-} / 2`.
    NonIc4,
    /// `{P0/3, P+/3, PR/3, I - ...}`.
    Ic4,
}

impl<T: Real> Povm<T> {
    /// Wraps a list of elements after checking they share a dimension.
    /// Positivity and completeness are checked by [`validate`](Self::validate).
    pub fn new(elements: Vec<HermOperator<T>>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::EmptyInput)?.dim();
        if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            elements,
            rank1: None,
        })
    }

    /// Builds `mu_b = w_b |psi_b><psi_b|`. States are normalised.
    pub fn from_rank1(terms: Vec<(T, DVector<Complex<T>>)>) -> Result<Self> {
        let dim = terms.first().ok_or(Error::EmptyInput)?.1.len();
        let mut rank1 = Vec::with_capacity(terms.len());
        for (b, (weight, state)) in terms.into_iter().enumerate() {
            if state.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: state.len(),
                });
            }
            if weight <= T::zero() {
                return Err(Error::NonPositiveWeight {
                    outcome: b,
                    value: weight.as_f64(),
                });
            }
            let n = state.norm();
            if n == T::zero() {
                return Err(Error::InvalidPovm(format!("state {b} is zero")));
            }
            rank1.push(WeightedState {
                weight,
                state: state.unscale(n),
            });
        }
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let elements = rank1.iter().map(WeightedState::element).collect();
        Ok(Self {
            dim,
            elements,
            rank1: Some(rank1),
        })
    }

    /// Attaches a rank-1 form; its consistency is checked by [`validate`](Self::validate).
    pub fn with_rank1_form(mut self, form: Vec<WeightedState<T>>) -> Result<Self> {
        if form.len() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                found: form.len(),
            });
        }
        self.rank1 = Some(form);
        Ok(self)
    }

    /// Projective measurement in an orthonormal basis.
    pub fn projective(basis: &[DVector<Complex<T>>]) -> Result<Self> {
        let d = basis.len();
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let mut defect = T::zero();
        for (j, u) in basis.iter().enumerate() {
            if u.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: u.len(),
                });
            }
            for (k, v) in basis.iter().enumerate().skip(j) {
                let g = u.dotc(v);
                let target = if j == k { T::one() } else { T::zero() };
                defect = defect.max(cabs(g - Complex::new(target, T::zero())));
            }
        }
        if defect > T::tol(ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal {
                defect: defect.as_f64(),
            });
        }
        Self::from_rank1(basis.iter().map(|v| (T::one(), v.clone())).collect())
    }

    /// Computational-basis measurement.
    pub fn computational(d: usize) -> Result<Self> {
        let basis: Vec<_> = (0..d).map(|k| unit_vector(d, k)).collect();
        Self::projective(&basis)
    }

    /// `mu_b = V^† P_b V` for an `l x d` isometry `V` made of the first `d`
    /// columns of a Haar-random `l x l` unitary.
    pub fn random_rank1<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if outcomes < d {
            return Err(Error::TooFewOutcomes { outcomes, dim: d });
        }
        let u = random_haar_unitary::<T, R>(outcomes, rng);
        let terms = (0..outcomes)
            .map(|b| {
                let v = DVector::from_fn(d, |i, _| u[(b, i)].conj());
                let w = v.norm_squared();
                (w, v)
            })
            .collect();
        Self::from_rank1(terms)
    }

    /// All `d(d+1)` vectors of `d+1` mutually unbiased bases, weighted by
    /// `1/(d+1)`. `d` must be prime.
    pub fn mub(d: usize) -> Result<Self> {
        if !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        let w = T::one() / T::of_usize(d + 1);
        let mut terms = Vec::with_capacity(d * (d + 1));
        if d == 2 {
            let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
            let c = |re: f64, im: f64| Complex::new(T::of(re) * h, T::of(im) * h);
            let vecs = [
                [c(1.0, 0.0), c(1.0, 0.0)],
                [c(1.0, 0.0), c(-1.0, 0.0)],
                [c(1.0, 0.0), c(0.0, 1.0)],
                [c(1.0, 0.0), c(0.0, -1.0)],
            ];
            for v in vecs {
                terms.push((w, DVector::from_row_slice(&v)));
            }
            terms.push((w, unit_vector(2, 0)));
            terms.push((w, unit_vector(2, 1)));
            return Self::from_rank1(terms);
        }
        for k in 0..d {
            terms.push((w, unit_vector(d, k)));
        }
        let norm = T::one() / T::of_usize(d).sqrt();
        let two_pi_over_d = T::two_pi() / T::of_usize(d);
        for k in 0..d {
            for j in 0..d {
                let v = DVector::from_fn(d, |n, _| {
                    let phase = (k * n * n + j * n) % d;
                    let angle = two_pi_over_d * T::of_usize(phase);
                    Complex::new(angle.cos() * norm, angle.sin() * norm)
                });
                terms.push((w, v));
            }
        }
        Self::from_rank1(terms)
    }

    /// The worked-example POVMs on a qubit.
    pub fn appendix(which: AppendixPovm) -> Self {
        let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
        let z = T::zero();
        let ket = |a: (T, T), b: (T, T)| DVector::from_vec(vec![Complex::new(a.0, a.1), Complex::new(b.0, b.1)]);
        let k0 = ket((T::one(), z), (z, z));
        let k1 = ket((z, z), (T::one(), z));
        let kp = ket((h, z), (h, z));
        let km = ket((h, z), (-h, z));
        let kr = ket((h, z), (z, h));
        let built = match which {
            AppendixPovm::Projective => Self::projective(&[k0, k1]),
            AppendixPovm::NonIc4 => {
                let half = T::of(0.5);
                Self::from_rank1(vec![(half, k0), (half, k1), (half, kp), (half, km)])
            }
            AppendixPovm::Ic4 => {
                let third = T::one() / T::of(3.0);
                let first: Vec<HermOperator<T>> = [k0, kp, kr]
                    .iter()
                    .map(|k| HermOperator::projector(k).scale(third))
                    .collect();
                let rest = first.iter().fold(HermOperator::identity(2), |acc, m| &acc - m);
                let mut elements = first;
                elements.push(rest);
                Self::new(elements)
            }
        };
        built.expect("fixture construction is infallible")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermOperator<T>] {
        &self.elements
    }

    pub fn rank1_form(&self) -> Option<&[WeightedState<T>]> {
        self.rank1.as_deref()
    }

    pub fn traces(&self) -> Vec<T> {
        self.elements.iter().map(HermOperator::trace).collect()
    }

    /// Average element purity `(1/d) sum_b tr(mu_b^2)/tr(mu_b)`, in `[1/d, 1]`.
    pub fn average_purity(&self) -> Result<T> {
        let d = T::of_usize(self.dim);
        let mut acc = T::zero();
        for (b, m) in self.elements.iter().enumerate() {
            let t = m.trace();
            if t <= T::zero() {
                return Err(Error::ZeroTraceElement { outcome: b });
            }
            acc += m.norm_sq() / t;
        }
        Ok(acc / d)
    }

    /// `p_b = <mu_b, rho>`.
    pub fn outcome_probabilities(&self, rho: &HermOperator<T>) -> Result<Vec<T>> {
        self.elements.iter().map(|m| m.hs_inner(rho)).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let d = self.dim;
        let mut failures = Vec::new();
        let mut min_eig = T::zero();
        for (b, m) in self.elements.iter().enumerate() {
            let e = m.min_eigenvalue();
            if e < -T::tol(PSD_TOL) {
                failures.push(format!("element {b} has eigenvalue {:e}", e.as_f64()));
            }
            min_eig = min_eig.min(e);
        }
        let total = self.elements.iter().fold(HermOperator::zeros(d), |acc, m| &acc + m);
        let completeness = total.max_abs_diff(&HermOperator::identity(d));
        if completeness > T::tol(COMPLETENESS_TOL) {
            failures.push(format!(
                "elements sum to identity only within {:e}",
                completeness.as_f64()
            ));
        }
        let (rank1_defect, weight_sum_defect) = match &self.rank1 {
            None => (None, None),
            Some(form) => {
                let rank1 = form
                    .iter()
                    .zip(&self.elements)
                    .map(|(ws, m)| ws.element().max_abs_diff(m))
                    .fold(T::zero(), |a, x| a.max(x));
                if rank1 > T::tol(RANK1_TOL) {
                    failures.push(format!("rank-1 form deviates by {:e}", rank1.as_f64()));
                }
                let wsum = form.iter().fold(T::zero(), |a, ws| a + ws.weight);
                let wdef = (wsum - T::of_usize(d)).abs();
                if wdef > T::tol(WEIGHT_SUM_TOL) {
                    failures.push(format!("weights sum to {}", wsum.as_f64()));
                }
                (Some(rank1.as_f64()), Some(wdef.as_f64()))
            }
        };
        ValidationReport {
            outcomes: self.len(),
            psd_defect: (-min_eig).max(T::zero()).as_f64(),
            completeness_defect: completeness.as_f64(),
            rank1_defect,
            weight_sum_defect,
            passed: failures.is_empty(),
            failures,
        }
    }

    /// Returns `self` if [`validate`](Self::validate) passes.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.passed {
            Ok(self)
        } else {
            Err(Error::InvalidPovm(report.failures.join("; ")))
        }
    }

    /// Converts to another precision.
    pub fn cast<U: Real>(&self) -> Povm<U> {
        let cast_vec = |v: &DVector<Complex<T>>| v.map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())));
        Povm {
            dim: self.dim,
            elements: self.elements.iter().map(HermOperator::cast).collect(),
            rank1: self.rank1.as_ref().map(|form| {
                form.iter()
                    .map(|ws| WeightedState {
                        weight: U::of(ws.weight.as_f64()),
                        state: cast_vec(&ws.state),
                    })
                    .collect()
            }),
        }
    }
}

/// `|k>` in `C^d`.
pub fn unit_vector<T: Real>(d: usize, k: usize) -> DVector<Complex<T>> {
    let mut v = DVector::zeros(d);
    v[k] = Complex::new(T::one(), T::zero());
    v
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projective_qubit_passes() {
        let p = Povm::<f64>::computational(2).unwrap();
        assert!(p.validate().passed);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn duplicated_projector_fails_completeness() {
        let p0 = HermOperator::<f64>::basis_projector(2, 0);
        let p = Povm::new(vec![p0.clone(), p0]).unwrap();
        let report = p.validate();
        assert!(!report.passed);
        assert!(report.completeness_defect > 0.9);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let v = unit_vector::<f64>(2, 0);
        assert!(matches!(
            Povm::projective(&[v.clone(), v]),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn appendix_fixtures_validate() {
        for which in [AppendixPovm::Projective, AppendixPovm::NonIc4, AppendixPovm::Ic4] {
            assert!(Povm::<f64>::appendix(which).validate().passed, "{which:?}");
        }
        let ic4 = Povm::<f64>::appendix(AppendixPovm::Ic4);
        assert!(ic4.elements()[3].min_eigenvalue() > 0.2);
        let non_ic = Povm::<f64>::appendix(AppendixPovm::NonIc4);
        assert!(non_ic.traces().iter().all(|t| (t - 0.5).abs() < 1e-15));
    }

    #[test]
    fn random_rank1_trace_and_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, l) in [(2, 10), (3, 9), (5, 100)] {
            let p = Povm::<f64>::random_rank1(d, l, &mut rng).unwrap();
            let report = p.validate();
            assert!(report.passed, "{report:?}");
            let total: f64 = p.traces().iter().sum();
            assert!((total - d as f64).abs() < 1e-9);
        }
        assert!(matches!(
            Povm::<f64>::random_rank1(3, 2, &mut rng),
            Err(Error::TooFewOutcomes { .. })
        ));
    }

    #[test]
    fn mub_overlaps() {
        for d in [2, 3, 5, 7] {
            let p = Povm::<f64>::mub(d).unwrap();
            assert_eq!(p.len(), d * (d + 1));
            assert!(p.validate().passed);
            let form = p.rank1_form().unwrap();
            for a in 0..form.len() {
                for b in a + 1..form.len() {
                    let ov = form[a].state.dotc(&form[b].state).norm_sqr();
                    let expected = if a / d == b / d { 0.0 } else { 1.0 / d as f64 };
                    assert!((ov - expected).abs() < 1e-10, "d={d} {a} {b} {ov}");
                }
            }
        }
        assert!(matches!(Povm::<f64>::mub(4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn primes() {
        let ps: Vec<usize> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
