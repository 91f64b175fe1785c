use serde::{Deserialize, Serialize};

use super::{
    a_operator, beta, lambda1_star, mixed_state_variance, variance_averaged, variance_averaged_for_dual,
    variance_double_averaged, variance_eig_bounds, variance_exact, worst_case_lower_bound,
};
use crate::error::Result;
use crate::frame::{canonical_frame_superop, estimator_bound, tightness_of, DualFrame, DualKind, Tightness};
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::HermOperator;
use crate::povm::{content_hash, operator_rows, Povm};
use crate::scalar::Real;

/// What a report is computed for.
pub struct AnalysisInput<'a, T: Real> {
    pub povm: &'a Povm<T>,
    pub dual: &'a DualFrame<T>,
    pub observable: &'a HermOperator<T>,
    /// State for the exact variance; when absent only averaged figures are
    /// produced.
    pub state: Option<&'a HermOperator<T>>,
    /// Purity used for the averaged quantities. Defaults to `tr(rho^2)` when a
    /// state is given, otherwise to 1.
    pub purity: Option<T>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragedMethod {
    /// Closed form in terms of the canonical frame operator.
    ClosedForm,
    /// Linear Haar average of the second moment of a non-canonical dual.
    DualAverage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportContext {
    pub povm_hash: String,
    pub dim: usize,
    pub outcomes: usize,
    pub dual_kind: DualKind,
    pub support_restricted: bool,
    pub purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<Vec<[f64; 2]>>>,
    pub observable: Vec<Vec<[f64; 2]>>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceBounds {
    /// `Vd / λ+(F̃)`, bracketing `<O, F̃^{-1}(O)>` from below.
    pub eig_lower: Option<f64>,
    pub eig_upper: Option<f64>,
    /// The eigenvalue bracket shifted to the averaged variance.
    pub averaged_lower: Option<f64>,
    pub averaged_upper: Option<f64>,
    pub condition_number: Option<f64>,
    pub lambda1_star: Option<f64>,
    /// `Vd` times the worst-case lower bound.
    pub lambda1_star_lower: Option<f64>,
    pub a_min: f64,
    pub a_max: f64,
    pub shadow_norm_sq: f64,
    pub estimator_bound: Option<f64>,
    pub max_abs_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub context: ReportContext,
    pub exact: Option<f64>,
    /// `<O, rho>` for the given state.
    pub expectation: Option<f64>,
    pub averaged: Option<f64>,
    pub averaged_method: AveragedMethod,
    pub double_averaged: Option<f64>,
    /// `tr(O^2)/d - tr(O)^2/d^2`.
    pub mixed_state_variance: f64,
    pub beta: f64,
    pub informationally_complete: bool,
    pub frame_spectrum: Vec<f64>,
    pub tightness: Tightness,
    pub estimator_values: Vec<f64>,
    pub bounds: VarianceBounds,
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

/// Computes every variance figure available for the configuration. Figures
/// that need an IC POVM are left empty otherwise.
pub fn analyze<T: Real>(input: &AnalysisInput<'_, T>) -> Result<VarianceReport> {
    let AnalysisInput {
        povm: p,
        dual,
        observable: o,
        state,
        ..
    } = *input;
    check_same_dim(p.dim(), o.dim())?;
    check_same_dim(p.len(), dual.len())?;
    let d = p.dim();
    let purity = match (input.purity, state) {
        (Some(pur), _) => pur,
        (None, Some(rho)) => rho.norm_sq(),
        (None, None) => T::one(),
    };
    let purity = purity.min(T::one());
    let frame = canonical_frame_superop(p)?;
    let ic = frame.is_informationally_complete();

    let (exact, expectation) = match state {
        Some(rho) => (
            Some(variance_exact(p, dual, rho, o)?.as_f64()),
            Some(o.hs_inner(rho)?.as_f64()),
        ),
        None => (None, None),
    };

    let canonical = dual.kind() == DualKind::CanonicalEstimator;
    let method = if canonical {
        AveragedMethod::ClosedForm
    } else {
        AveragedMethod::DualAverage
    };
    let averaged = if canonical && ic {
        Some(variance_averaged(p, o, purity)?.as_f64())
    } else if ic || !dual.is_support_restricted() {
        Some(variance_averaged_for_dual(p, dual, o, purity)?.as_f64())
    } else {
        None
    };
    let double_averaged = if ic {
        Some(variance_double_averaged(p, o, purity)?.as_f64())
    } else {
        None
    };

    let v = mixed_state_variance(o);
    let vd = v * T::of_usize(d);
    let tightness = tightness_of(&frame);
    let (eig, l1, l1_bound) = if ic {
        let eig = variance_eig_bounds(p, o)?;
        let a = T::of(tightness.a);
        let b = T::of(tightness.b);
        let l1 = lambda1_star(a, b, d).ok();
        let bound = worst_case_lower_bound(a, b, d, purity).ok().map(|w| (w * vd).as_f64());
        (Some(eig), l1.map(|x| x.as_f64()), bound)
    } else {
        (None, None, None)
    };
    let averaged_bracket = eig.map(|e| e.averaged(d, v.as_f64(), purity.as_f64()));

    let a_op = a_operator(p, dual, o)?;
    let values = dual.estimator_values(o)?;
    let est_bound = if ic {
        Some(estimator_bound(p, dual, o)?.bound)
    } else {
        None
    };
    let max_abs = values.iter().fold(0.0f64, |acc, v| acc.max(v.as_f64().abs()));

    Ok(VarianceReport {
        context: ReportContext {
            povm_hash: content_hash(p),
            dim: d,
            outcomes: p.len(),
            dual_kind: dual.kind(),
            support_restricted: dual.is_support_restricted(),
            purity: purity.as_f64(),
            state: state.map(operator_rows),
            observable: operator_rows(o),
            seed: input.seed,
        },
        exact,
        expectation,
        averaged,
        averaged_method: method,
        double_averaged,
        mixed_state_variance: v.as_f64(),
        beta: beta(o, purity)?.as_f64(),
        informationally_complete: ic,
        frame_spectrum: to_f64(frame.spectrum()),
        tightness,
        estimator_values: to_f64(&values),
        bounds: VarianceBounds {
            eig_lower: eig.map(|e| e.lower),
            eig_upper: eig.map(|e| e.upper),
            averaged_lower: averaged_bracket.map(|b| b.0),
            averaged_upper: averaged_bracket.map(|b| b.1),
            condition_number: eig.map(|e| e.condition_number),
            lambda1_star: l1,
            lambda1_star_lower: l1_bound,
            a_min: a_op.min_eigenvalue().as_f64(),
            a_max: a_op.max_eigenvalue().as_f64(),
            shadow_norm_sq: a_op.op_norm().as_f64(),
            estimator_bound: est_bound,
            max_abs_estimate: max_abs,
        },
    })
}

impl VarianceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
