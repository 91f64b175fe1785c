//! Frame superoperators, informational completeness, tightness and dual
//! frames.

mod dual;
mod oracle;

pub use dual::{
    alpha_dual, canonical_dual, canonical_estimator, estimator_bound, min_variance_dual, DualFrame, DualKind, DualMode,
    EstimatorBound,
};
pub use oracle::{brute_force_min_variance_oracle, random_valid_dual, ConstraintGeometry};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::{HermOperator, SuperOperator, PINV_REL_TOL};
use crate::povm::Povm;
use crate::scalar::Real;

/// Outcome probabilities below this are treated as zero by the rescaled frame.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Which weights `c_b` define `F = sum_b c_b P(mu_b)`.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameKind<T: Real> {
    /// `c_b = 1`.
    Plain,
    /// `c_b = 1/<mu_b, rho>`.
    Rescaled { prior: HermOperator<T> },
    /// `c_b = d / tr(mu_b)`.
    Canonical,
    /// `c_b = 1/alpha_b`.
    Alpha { alpha: Vec<T> },
}

impl<T: Real> FrameKind<T> {
    pub fn label(&self) -> &'static str {
        match self {
            FrameKind::Plain => "plain",
            FrameKind::Rescaled { .. } => "rescaled",
            FrameKind::Canonical => "canonical",
            FrameKind::Alpha { .. } => "alpha",
        }
    }
}

/// A frame superoperator with its cached spectrum and pseudo-inverse.
#[derive(Clone, Debug)]
pub struct FrameOperator<T: Real> {
    kind: FrameKind<T>,
    /// The rescaling `alpha_b`, so that `c_b = 1/alpha_b`.
    alpha: Vec<T>,
    superop: SuperOperator<T>,
    inverse: SuperOperator<T>,
    spectrum: Vec<T>,
    rank: usize,
}

impl<T: Real> FrameOperator<T> {
    fn build(p: &Povm<T>, kind: FrameKind<T>, alpha: Vec<T>) -> Result<Self> {
        let coeffs: Vec<T> = alpha.iter().map(|a| T::one() / *a).collect();
        let superop = SuperOperator::weighted_outer_sum(p.elements(), &coeffs)?;
        let spectrum = superop.eigenvalues()?;
        let (inverse, rank) = superop.pseudo_inverse(PINV_REL_TOL)?;
        Ok(Self {
            kind,
            alpha,
            superop,
            inverse,
            spectrum,
            rank,
        })
    }

    pub fn kind(&self) -> &FrameKind<T> {
        &self.kind
    }

    /// Rescaling weights `alpha_b` with `F = sum_b P(mu_b)/alpha_b`.
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.superop.dim()
    }

    pub fn superop(&self) -> &SuperOperator<T> {
        &self.superop
    }

    /// Pseudo-inverse (the inverse when the POVM is IC).
    pub fn inverse(&self) -> &SuperOperator<T> {
        &self.inverse
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_informationally_complete(&self) -> bool {
        let d = self.dim();
        self.rank == d * d
    }

    /// Errors unless the frame has full rank.
    pub fn require_ic(&self) -> Result<()> {
        if self.is_informationally_complete() {
            Ok(())
        } else {
            let d = self.dim();
            Err(Error::NotInformationallyComplete {
                rank: self.rank,
                required: d * d,
            })
        }
    }

    pub fn apply(&self, x: &HermOperator<T>) -> Result<HermOperator<T>> {
        self.superop.apply(x)
    }

    pub fn apply_inverse(&self, x: &HermOperator<T>) -> Result<HermOperator<T>> {
        self.inverse.apply(x)
    }

    pub fn trace(&self) -> T {
        self.superop.trace()
    }

    /// `tr(F^2)`.
    pub fn trace_sq(&self) -> T {
        self.spectrum.iter().fold(T::zero(), |acc, l| acc + *l * *l)
    }

    /// `tr(F^{-1})` of the pseudo-inverse.
    pub fn inverse_trace(&self) -> T {
        self.inverse.trace()
    }

    /// `Π F Π` with `Π` the projector onto traceless operators.
    pub fn traceless_part(&self) -> SuperOperator<T> {
        let mut m = self.superop.matrix().clone();
        m.row_mut(0).fill(T::zero());
        m.column_mut(0).fill(T::zero());
        SuperOperator::new(self.dim(), m).expect("same shape")
    }

    /// Spectrum of `Π F Π` restricted to the traceless subspace, descending.
    pub fn traceless_spectrum(&self) -> Vec<T> {
        let n = self.superop.matrix().nrows();
        let block: DMatrix<T> = self.superop.matrix().view((1, 1), (n - 1, n - 1)).into_owned();
        let eig = nalgebra::SymmetricEigen::new(block);
        let mut values: Vec<T> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        values
    }
}

/// `F = sum_b P(mu_b)`.
pub fn frame_superop<T: Real>(p: &Povm<T>) -> Result<FrameOperator<T>> {
    FrameOperator::build(p, FrameKind::Plain, vec![T::one(); p.len()])
}

/// `F_rho = sum_b P(mu_b)/<mu_b, rho>`.
///
/// Probabilities below `1e-12` are an error unless `floor` is given, in which
/// case they are raised to `floor`.
pub fn rescaled_frame_superop<T: Real>(
    p: &Povm<T>,
    prior: &HermOperator<T>,
    floor: Option<T>,
) -> Result<FrameOperator<T>> {
    let alpha = prior_probabilities(p, prior, floor)?;
    FrameOperator::build(p, FrameKind::Rescaled { prior: prior.clone() }, alpha)
}

/// `F_{I/d} = d sum_b P(mu_b)/tr(mu_b)`.
pub fn canonical_frame_superop<T: Real>(p: &Povm<T>) -> Result<FrameOperator<T>> {
    let d = T::of_usize(p.dim());
    let mut alpha = Vec::with_capacity(p.len());
    for (b, t) in p.traces().into_iter().enumerate() {
        if t <= T::tol(PROBABILITY_FLOOR) {
            return Err(Error::ZeroTraceElement { outcome: b });
        }
        alpha.push(t / d);
    }
    FrameOperator::build(p, FrameKind::Canonical, alpha)
}

/// `F_alpha = sum_b P(mu_b)/alpha_b` for positive `alpha`.
pub fn alpha_rescaled_frame_superop<T: Real>(p: &Povm<T>, alpha: &[T]) -> Result<FrameOperator<T>> {
    check_same_dim(p.len(), alpha.len())?;
    if let Some((b, a)) = alpha.iter().enumerate().find(|(_, a)| **a <= T::zero()) {
        return Err(Error::NonPositiveWeight {
            outcome: b,
            value: a.as_f64(),
        });
    }
    FrameOperator::build(p, FrameKind::Alpha { alpha: alpha.to_vec() }, alpha.to_vec())
}

/// `<mu_b, rho>` for a validated prior, with the zero-probability policy of
/// [`rescaled_frame_superop`].
pub fn prior_probabilities<T: Real>(p: &Povm<T>, prior: &HermOperator<T>, floor: Option<T>) -> Result<Vec<T>> {
    check_same_dim(p.dim(), prior.dim())?;
    prior.check_density_matrix()?;
    if let Some(f) = floor {
        if f <= T::zero() {
            return Err(Error::OutOfRange {
                name: "probability floor",
                value: f.as_f64(),
                low: 0.0,
                high: 1.0,
            });
        }
    }
    let probs = p.outcome_probabilities(prior)?;
    probs
        .into_iter()
        .enumerate()
        .map(|(b, pb)| {
            if pb >= T::of(PROBABILITY_FLOOR) {
                Ok(match floor {
                    Some(f) => pb.max(f),
                    None => pb,
                })
            } else {
                match floor {
                    Some(f) => Ok(f),
                    None => Err(Error::ZeroProbability {
                        outcome: b,
                        probability: pb.as_f64(),
                    }),
                }
            }
        })
        .collect()
}

pub fn is_informationally_complete<T: Real>(p: &Povm<T>) -> Result<bool> {
    Ok(frame_superop(p)?.is_informationally_complete())
}

/// Trace data of the canonical frame operator used by the tightness test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tightness {
    pub tight: bool,
    /// `tr(F̃_{I/d})`.
    pub a: f64,
    /// `tr(F̃_{I/d}^2)`.
    pub b: f64,
    /// `tr(F_{I/d}) = a + d`.
    pub trace_full: f64,
    /// `tr(F_{I/d}^2) = b + d^2`.
    pub trace_sq_full: f64,
}

/// Tight iff `(d^2-1) tr(F̃^2) = tr(F̃)^2` to relative precision `1e-9`.
pub fn is_tight<T: Real>(p: &Povm<T>) -> Result<Tightness> {
    let f = canonical_frame_superop(p)?;
    Ok(tightness_of(&f))
}

pub(crate) fn tightness_of<T: Real>(f: &FrameOperator<T>) -> Tightness {
    let d = f.dim();
    let tilde = f.traceless_spectrum();
    let a = tilde.iter().fold(T::zero(), |acc, l| acc + *l);
    let b = tilde.iter().fold(T::zero(), |acc, l| acc + *l * *l);
    let m = T::of_usize(d * d - 1);
    let gap = (m * b - a * a).abs();
    Tightness {
        tight: a > T::zero() && gap <= T::tol(1e-9) * a * a,
        a: a.as_f64(),
        b: b.as_f64(),
        trace_full: f.trace().as_f64(),
        trace_sq_full: f.trace_sq().as_f64(),
    }
}
