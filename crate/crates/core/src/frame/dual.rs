use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{
    alpha_rescaled_frame_superop, canonical_frame_superop, frame_superop, rescaled_frame_superop, FrameOperator,
};
use crate::error::Result;
use crate::operator_space::basis::devectorize_unchecked;
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::{vectorize, HermOperator};
use crate::povm::Povm;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    /// `F^{-1}(mu_b)`.
    CanonicalDual,
    /// `F_rho^{-1}(mu_b) / <mu_b, rho>`.
    MinVariance,
    /// `d F_{I/d}^{-1}(mu_b) / tr(mu_b)`.
    CanonicalEstimator,
    /// `F_alpha^{-1}(mu_b) / alpha_b`.
    Alpha,
    Custom,
}

impl DualKind {
    pub fn label(self) -> &'static str {
        match self {
            DualKind::CanonicalDual => "canonical_dual",
            DualKind::MinVariance => "min_variance",
            DualKind::CanonicalEstimator => "canonical_estimator",
            DualKind::Alpha => "alpha",
            DualKind::Custom => "custom",
        }
    }
}

/// Whether dual construction may fall back to the pseudo-inverse on a
/// non-IC POVM.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DualMode {
    #[default]
    Strict,
    /// Builds `F^+(mu_b)`, which reconstructs only the span of the POVM.
    Pseudo,
}

/// An unbiased estimator `b -> mu~_b`.
#[derive(Clone, Debug)]
pub struct DualFrame<T: Real> {
    kind: DualKind,
    elements: Vec<HermOperator<T>>,
    alpha: Option<Vec<T>>,
    support_restricted: bool,
    prior: Option<HermOperator<T>>,
}

impl<T: Real> DualFrame<T> {
    /// Wraps arbitrary dual elements. Use
    /// [`reconstruction_defect`](Self::reconstruction_defect) to check them.
    pub fn custom(p: &Povm<T>, elements: Vec<HermOperator<T>>) -> Result<Self> {
        check_same_dim(p.len(), elements.len())?;
        for el in &elements {
            check_same_dim(p.dim(), el.dim())?;
        }
        Ok(Self {
            kind: DualKind::Custom,
            elements,
            alpha: None,
            support_restricted: false,
            prior: None,
        })
    }

    /// `mu~_b = F_alpha^+(mu_b) / alpha_b` using a prebuilt frame operator.
    pub fn from_frame(p: &Povm<T>, frame: &FrameOperator<T>, kind: DualKind) -> Self {
        let d = p.dim();
        let inv = frame.inverse().matrix();
        let elements = p
            .elements()
            .iter()
            .zip(frame.alpha())
            .map(|(m, a)| devectorize_unchecked(&(inv * vectorize(m) / *a), d))
            .collect();
        let prior = match frame.kind() {
            super::FrameKind::Rescaled { prior } => Some(prior.clone()),
            _ => None,
        };
        Self {
            kind,
            elements,
            alpha: Some(frame.alpha().to_vec()),
            support_restricted: !frame.is_informationally_complete(),
            prior,
        }
    }

    pub fn kind(&self) -> DualKind {
        self.kind
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

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Rescaling weights when the dual has the form `F_alpha^{-1}(mu_b)/alpha_b`.
    pub fn alpha(&self) -> Option<&[T]> {
        self.alpha.as_deref()
    }

    /// True when built from a non-IC POVM in [`DualMode::Pseudo`]; such a
    /// dual only reconstructs operators in the span of the POVM.
    pub fn is_support_restricted(&self) -> bool {
        self.support_restricted
    }

    pub fn prior(&self) -> Option<&HermOperator<T>> {
        self.prior.as_ref()
    }

    /// Single-shot observable estimates `o(b) = <O, mu~_b>`.
    pub fn estimator_values(&self, o: &HermOperator<T>) -> Result<Vec<T>> {
        self.elements.iter().map(|m| m.hs_inner(o)).collect()
    }

    /// `sum_b <mu_b, rho> mu~_b`, which equals `rho` for a valid dual.
    pub fn reconstruct(&self, p: &Povm<T>, rho: &HermOperator<T>) -> Result<HermOperator<T>> {
        check_same_dim(p.len(), self.len())?;
        let probs = p.outcome_probabilities(rho)?;
        Ok(self
            .elements
            .iter()
            .zip(probs)
            .fold(HermOperator::zeros(p.dim()), |acc, (m, pb)| &acc + &m.scale(pb)))
    }

    /// Max-entry norm of `sum_b |mu~_b>><<mu_b| - Id` in the Hermitian basis.
    pub fn reconstruction_defect(&self, p: &Povm<T>) -> Result<T> {
        check_same_dim(p.len(), self.len())?;
        let n = p.dim() * p.dim();
        let pairing = self.matrix() * element_matrix(p).transpose();
        Ok((pairing - DMatrix::<T>::identity(n, n)).amax())
    }

    /// `sum_b p_b tr(mu~_b^2)`, the expected squared Hilbert–Schmidt norm of
    /// the single-shot estimate.
    pub fn delta_sq(&self, probs: &[T]) -> Result<T> {
        check_same_dim(self.len(), probs.len())?;
        Ok(self
            .elements
            .iter()
            .zip(probs)
            .fold(T::zero(), |acc, (m, pb)| acc + *pb * m.norm_sq()))
    }

    /// Columns are the vectorised dual elements.
    pub fn matrix(&self) -> DMatrix<T> {
        columns(&self.elements)
    }
}

pub(crate) fn columns<T: Real>(ops: &[HermOperator<T>]) -> DMatrix<T> {
    let n = ops[0].dim() * ops[0].dim();
    let mut m = DMatrix::zeros(n, ops.len());
    for (b, op) in ops.iter().enumerate() {
        m.set_column(b, &vectorize(op));
    }
    m
}

/// `d^2 x l` matrix of vectorised POVM elements.
pub(crate) fn element_matrix<T: Real>(p: &Povm<T>) -> DMatrix<T> {
    columns(p.elements())
}

pub(crate) fn from_columns<T: Real>(x: &DMatrix<T>, d: usize) -> Vec<HermOperator<T>> {
    (0..x.ncols())
        .map(|b| devectorize_unchecked(&DVector::from(x.column(b)), d))
        .collect()
}

/// `mu*_b = F^{-1}(mu_b)`.
pub fn canonical_dual<T: Real>(p: &Povm<T>, mode: DualMode) -> Result<DualFrame<T>> {
    let f = frame_superop(p)?;
    if mode == DualMode::Strict {
        f.require_ic()?;
    }
    Ok(DualFrame::from_frame(p, &f, DualKind::CanonicalDual))
}

/// Minimum-variance dual under `prior`: `F_rho^{-1}(mu_b) / <mu_b, rho>`.
pub fn min_variance_dual<T: Real>(p: &Povm<T>, prior: &HermOperator<T>, floor: Option<T>) -> Result<DualFrame<T>> {
    let f = rescaled_frame_superop(p, prior, floor)?;
    f.require_ic()?;
    Ok(DualFrame::from_frame(p, &f, DualKind::MinVariance))
}

/// `mu~_b = d F_{I/d}^{-1}(mu_b) / tr(mu_b)`.
pub fn canonical_estimator<T: Real>(p: &Povm<T>) -> Result<DualFrame<T>> {
    let f = canonical_frame_superop(p)?;
    f.require_ic()?;
    Ok(DualFrame::from_frame(p, &f, DualKind::CanonicalEstimator))
}

/// `mu~_b = F_alpha^{-1}(mu_b) / alpha_b`.
pub fn alpha_dual<T: Real>(p: &Povm<T>, alpha: &[T]) -> Result<DualFrame<T>> {
    let f = alpha_rescaled_frame_superop(p, alpha)?;
    f.require_ic()?;
    Ok(DualFrame::from_frame(p, &f, DualKind::Alpha))
}

/// Uniform bound on the single-shot estimates `|<O, mu~_b>|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorBound {
    pub bound: f64,
    pub max_abs_value: f64,
    pub holds: bool,
}

/// Bounds `max_b |<O, mu~_b>|`.
///
/// For duals of the form `F_alpha^{-1}(mu_b)/alpha_b` the bound is
/// `||O||_2 ||F_alpha^{-2}||_op^{1/2} max(1, max_b ||mu_b||_2/alpha_b)`, which
/// for the canonical dual (`alpha = 1`) is `||O||_2 ||F^{-2}||_op^{1/2}`.
/// Other duals fall back to `||O||_2 max_b ||mu~_b||_2`.
pub fn estimator_bound<T: Real>(p: &Povm<T>, dual: &DualFrame<T>, o: &HermOperator<T>) -> Result<EstimatorBound> {
    check_same_dim(p.len(), dual.len())?;
    check_same_dim(p.dim(), o.dim())?;
    let o_norm = o.norm();
    let bound = match dual.alpha() {
        Some(alpha) => {
            let f = alpha_rescaled_frame_superop(p, alpha)?;
            f.require_ic()?;
            let lambda_min = *f.spectrum().last().expect("nonempty");
            let scale = p
                .elements()
                .iter()
                .zip(alpha)
                .fold(T::one(), |acc, (m, a)| acc.max(m.norm() / *a));
            o_norm * scale / lambda_min
        }
        None => {
            frame_superop(p)?.require_ic()?;
            let largest = dual.elements().iter().fold(T::zero(), |acc, m| acc.max(m.norm()));
            o_norm * largest
        }
    };
    let max_abs = dual
        .estimator_values(o)?
        .into_iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    let slack = T::tol(1e-12) * (T::one() + bound);
    Ok(EstimatorBound {
        bound: bound.as_f64(),
        max_abs_value: max_abs.as_f64(),
        holds: max_abs <= bound + slack,
    })
}
