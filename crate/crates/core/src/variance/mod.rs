//! Exact, state-averaged and bounded variances of frame-based estimators.

mod report;

pub use report::{analyze, AnalysisInput, AveragedMethod, VarianceBounds, VarianceReport};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{canonical_frame_superop, DualFrame, FrameOperator};
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::{random_state, HermOperator, SuperOperator};
use crate::povm::Povm;
use crate::scalar::Real;

/// `C_rho = sum_b <mu_b, rho> P(mu~_b) - P(rho)`.
#[derive(Clone, Debug)]
pub struct MseMatrix<T: Real> {
    superop: SuperOperator<T>,
}

impl<T: Real> MseMatrix<T> {
    pub fn superop(&self) -> &SuperOperator<T> {
        &self.superop
    }

    /// Expected squared Hilbert–Schmidt error of the state estimate.
    pub fn trace(&self) -> T {
        self.superop.trace()
    }

    /// `<O, C_rho(O)>`.
    pub fn quadratic_form(&self, o: &HermOperator<T>) -> Result<T> {
        self.superop.quadratic_form(o)
    }
}

fn check_config<T: Real>(p: &Povm<T>, dual: &DualFrame<T>) -> Result<()> {
    check_same_dim(p.len(), dual.len())?;
    check_same_dim(p.dim(), dual.dim())
}

pub fn mse_matrix<T: Real>(p: &Povm<T>, dual: &DualFrame<T>, rho: &HermOperator<T>) -> Result<MseMatrix<T>> {
    check_config(p, dual)?;
    check_same_dim(p.dim(), rho.dim())?;
    rho.check_density_matrix()?;
    let probs = p.outcome_probabilities(rho)?;
    let first = SuperOperator::weighted_outer_sum(dual.elements(), &probs)?;
    let superop = &first - &SuperOperator::outer(rho);
    Ok(MseMatrix { superop })
}

/// `tr(C_rho)`.
pub fn state_error<T: Real>(p: &Povm<T>, dual: &DualFrame<T>, rho: &HermOperator<T>) -> Result<T> {
    Ok(mse_matrix(p, dual, rho)?.trace())
}

/// `Var[o|rho] = sum_b <mu_b, rho> <O, mu~_b>^2 - <O, rho>^2`.
pub fn variance_exact<T: Real>(
    p: &Povm<T>,
    dual: &DualFrame<T>,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
) -> Result<T> {
    check_config(p, dual)?;
    check_same_dim(p.dim(), rho.dim())?;
    check_same_dim(p.dim(), o.dim())?;
    let probs = p.outcome_probabilities(rho)?;
    let values = dual.estimator_values(o)?;
    let second = probs
        .iter()
        .zip(&values)
        .fold(T::zero(), |acc, (pb, v)| acc + *pb * *v * *v);
    let mean = o.hs_inner(rho)?;
    Ok(second - mean * mean)
}

/// `Var[o|rho]` computed as `<O, C_rho(O)>`.
pub fn variance_exact_via_mse<T: Real>(
    p: &Povm<T>,
    dual: &DualFrame<T>,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
) -> Result<T> {
    mse_matrix(p, dual, rho)?.quadratic_form(o)
}

/// Variance of `O` on the maximally mixed state, `tr(O^2)/d - tr(O)^2/d^2`.
pub fn mixed_state_variance<T: Real>(o: &HermOperator<T>) -> T {
    let d = T::of_usize(o.dim());
    let t = o.trace();
    o.norm_sq() / d - t * t / (d * d)
}

fn check_purity<T: Real>(d: usize, purity: T) -> Result<()> {
    let low = T::one() / T::of_usize(d);
    let eps = T::tol(1e-12);
    if purity < low - eps || purity > T::one() + eps {
        return Err(Error::OutOfRange {
            name: "purity",
            value: purity.as_f64(),
            low: low.as_f64(),
            high: 1.0,
        });
    }
    Ok(())
}

/// Haar average of `<O, rho>^2` over states of purity `P`:
/// `tr(O)^2/d^2 + (dP - 1) V / (d^2 - 1)`.
pub fn beta<T: Real>(o: &HermOperator<T>, purity: T) -> Result<T> {
    let d = o.dim();
    check_purity(d, purity)?;
    let df = T::of_usize(d);
    let t = o.trace();
    Ok(t * t / (df * df) + (df * purity - T::one()) * mixed_state_variance(o) / (df * df - T::one()))
}

/// `<O, F̃_{I/d}^{-1}(O)>` for an IC POVM.
pub fn traceless_inverse_form<T: Real>(f: &FrameOperator<T>, o: &HermOperator<T>) -> Result<T> {
    f.require_ic()?;
    let d = T::of_usize(f.dim());
    let t = o.trace();
    Ok(f.inverse().quadratic_form(o)? - t * t / (d * d))
}

/// Variance of the canonical estimator averaged over Haar-rotated states of
/// purity `P`: `<O, F̃_{I/d}^{-1}(O)> - (dP - 1) V / (d^2 - 1)`.
pub fn variance_averaged<T: Real>(p: &Povm<T>, o: &HermOperator<T>, purity: T) -> Result<T> {
    check_same_dim(p.dim(), o.dim())?;
    let d = p.dim();
    check_purity(d, purity)?;
    let f = canonical_frame_superop(p)?;
    let df = T::of_usize(d);
    let q = traceless_inverse_form(&f, o)?;
    Ok(q - (df * purity - T::one()) * mixed_state_variance(o) / (df * df - T::one()))
}

/// Haar-averaged variance for an arbitrary dual,
/// `sum_b tr(mu_b)/d <O, mu~_b>^2 - beta`, exact because `Var[o|rho]` is
/// affine in `rho` apart from the `<O, rho>^2` term.
pub fn variance_averaged_for_dual<T: Real>(
    p: &Povm<T>,
    dual: &DualFrame<T>,
    o: &HermOperator<T>,
    purity: T,
) -> Result<T> {
    check_config(p, dual)?;
    check_same_dim(p.dim(), o.dim())?;
    let d = T::of_usize(p.dim());
    let values = dual.estimator_values(o)?;
    let second = p
        .traces()
        .iter()
        .zip(&values)
        .fold(T::zero(), |acc, (t, v)| acc + *t / d * *v * *v);
    Ok(second - beta(o, purity)?)
}

/// Sample mean of `Var[o|U rho U^†]` over Haar `U` with a fixed spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub fn variance_averaged_monte_carlo<T: Real, R: Rng + ?Sized>(
    p: &Povm<T>,
    dual: &DualFrame<T>,
    o: &HermOperator<T>,
    spectrum: &[T],
    samples: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    if samples < 2 {
        return Err(Error::BadGroupCount {
            groups: samples,
            samples,
        });
    }
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let rho = random_state(p.dim(), spectrum, rng)?;
        values.push(variance_exact(p, dual, &rho, o)?.as_f64());
    }
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}

/// Eigenvalue bracket `Vd/λ+ <= <O, F̃^{-1}(O)> <= Vd/λ-` for `F̃ = F̃_{I/d}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigBounds {
    pub lower: f64,
    pub upper: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `λ+ / λ-`.
    pub condition_number: f64,
}

impl EigBounds {
    /// Shifts the bracket to the averaged variance at purity `P`.
    pub fn averaged(&self, d: usize, v: f64, purity: f64) -> (f64, f64) {
        let df = d as f64;
        let shift = (df * purity - 1.0) * v / (df * df - 1.0);
        (self.lower - shift, self.upper - shift)
    }
}

pub fn variance_eig_bounds<T: Real>(p: &Povm<T>, o: &HermOperator<T>) -> Result<EigBounds> {
    check_same_dim(p.dim(), o.dim())?;
    let f = canonical_frame_superop(p)?;
    f.require_ic()?;
    let spec = f.traceless_spectrum();
    let lambda_plus = spec[0];
    let lambda_minus = *spec.last().expect("d >= 2");
    if lambda_minus <= T::zero() {
        return Err(Error::NotInformationallyComplete {
            rank: f.rank(),
            required: p.dim() * p.dim(),
        });
    }
    let vd = mixed_state_variance(o) * T::of_usize(p.dim());
    Ok(EigBounds {
        lower: (vd / lambda_plus).as_f64(),
        upper: (vd / lambda_minus).as_f64(),
        lambda_plus: lambda_plus.as_f64(),
        lambda_minus: lambda_minus.as_f64(),
        condition_number: (lambda_plus / lambda_minus).as_f64(),
    })
}

/// Largest value of `min(spec F̃)` compatible with `a = tr F̃` and
/// `b = tr F̃^2`.
pub fn lambda1_star<T: Real>(a: T, b: T, d: usize) -> Result<T> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let m = T::of_usize(d * d - 1);
    let eps = T::tol(1e-12);
    let scale = T::one().max(a * a);
    if b <= T::zero() || a <= T::zero() {
        return Err(Error::Infeasible(format!(
            "need a, b > 0, got a = {}, b = {}",
            a.as_f64(),
            b.as_f64()
        )));
    }
    if b > a * a + eps * scale || a * a > m * b + eps * scale {
        return Err(Error::Infeasible(format!(
            "need b <= a^2 <= (d^2-1) b, got a = {}, b = {}",
            a.as_f64(),
            b.as_f64()
        )));
    }
    // Round-off in a tight frame would otherwise be amplified by the root.
    let mut gap = (m * b - a * a).max(T::zero());
    if gap <= T::tol(1e-12) * a * a {
        gap = T::zero();
    }
    let mm1 = m - T::one();
    Ok(a / m - (mm1 * gap).sqrt() / (m * mm1))
}

/// `1/λ1* - (P - 1/d)/(d^2 - 1)`; multiply by `Vd` for the variance bound.
pub fn worst_case_lower_bound<T: Real>(a: T, b: T, d: usize, purity: T) -> Result<T> {
    check_purity(d, purity)?;
    let l1 = lambda1_star(a, b, d)?;
    if l1 <= T::zero() {
        return Err(Error::Infeasible(format!("λ1* = {} is not positive", l1.as_f64())));
    }
    let df = T::of_usize(d);
    Ok(T::one() / l1 - (purity - T::one() / df) / (df * df - T::one()))
}

/// `A = sum_b <O, mu~_b>^2 mu_b`, so that `<A, rho> = Var[o|rho] + <O, rho>^2`.
pub fn a_operator<T: Real>(p: &Povm<T>, dual: &DualFrame<T>, o: &HermOperator<T>) -> Result<HermOperator<T>> {
    check_config(p, dual)?;
    check_same_dim(p.dim(), o.dim())?;
    let values = dual.estimator_values(o)?;
    Ok(p.elements()
        .iter()
        .zip(values)
        .fold(HermOperator::zeros(p.dim()), |acc, (m, v)| &acc + &m.scale(v * v)))
}

/// Extremes of the second moment `<A, rho>` over states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

/// `(λ_min(A), λ_max(A))`; `max_rho Var[o|rho] <= ||A||_op`.
pub fn variance_minmax<T: Real>(p: &Povm<T>, dual: &DualFrame<T>, o: &HermOperator<T>) -> Result<MinMax> {
    let a = a_operator(p, dual, o)?;
    Ok(MinMax {
        min: a.min_eigenvalue().as_f64(),
        max: a.max_eigenvalue().as_f64(),
    })
}

/// `||O||_sh^2 = ||A||_op`, the state-maximised second moment.
pub fn shadow_norm_sq<T: Real>(p: &Povm<T>, dual: &DualFrame<T>, o: &HermOperator<T>) -> Result<T> {
    Ok(a_operator(p, dual, o)?.op_norm())
}

/// Closed-form `Var[o|rho]` for a rank-1 3-design with the canonical
/// estimator. Whether the POVM is a 3-design is not checked.
pub fn variance_3design<T: Real>(rho: &HermOperator<T>, o: &HermOperator<T>, d: usize) -> Result<T> {
    check_same_dim(d, rho.dim())?;
    check_same_dim(d, o.dim())?;
    let df = T::of_usize(d);
    let two = T::of(2.0);
    let tr_o = o.trace();
    let tr_ro = o.hs_inner(rho)?;
    let o2 = o.square();
    let tr_o2 = o2.trace();
    let tr_o2r = o2.hs_inner(rho)?;
    Ok(
        -(tr_o * tr_o + two * tr_o * tr_ro) / (df + two) + (df + T::one()) / (df + two) * (tr_o2 + two * tr_o2r)
            - tr_ro * tr_ro,
    )
}

/// Variance averaged over states of purity `P` and Haar-rotated observables:
/// `Vd (tr F_{I/d}^{-1} - P) / (d^2 - 1)`.
pub fn variance_double_averaged<T: Real>(p: &Povm<T>, o: &HermOperator<T>, purity: T) -> Result<T> {
    check_same_dim(p.dim(), o.dim())?;
    let d = p.dim();
    check_purity(d, purity)?;
    let f = canonical_frame_superop(p)?;
    f.require_ic()?;
    let df = T::of_usize(d);
    let vd = mixed_state_variance(o) * df;
    Ok(vd / (df * df - T::one()) * (f.inverse_trace() - purity))
}

/// Smallest average state error for tight POVMs whose elements have average
/// purity `w`: `(d^2-1)^2/(d^2 w - d) - (P - 1/d)`.
pub fn tight_general_error<T: Real>(d: usize, avg_purity: T, purity: T) -> Result<T> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let df = T::of_usize(d);
    let low = T::one() / df;
    if avg_purity <= low || avg_purity > T::one() + T::tol(1e-12) {
        return Err(Error::OutOfRange {
            name: "average element purity",
            value: avg_purity.as_f64(),
            low: low.as_f64(),
            high: 1.0,
        });
    }
    check_purity(d, purity)?;
    let m = df * df - T::one();
    Ok(m * m / (df * df * avg_purity - df) - (purity - low))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::canonical_estimator;
    use crate::operator_space::pauli;
    use crate::povm::AppendixPovm;

    fn h3() -> (Povm<f64>, DualFrame<f64>) {
        let p = Povm::appendix(AppendixPovm::Ic4);
        let dual = canonical_estimator(&p).unwrap();
        (p, dual)
    }

    #[test]
    fn fixture_variances() {
        let (p, dual) = h3();
        let p0 = HermOperator::basis_projector(2, 0);
        let p1 = HermOperator::basis_projector(2, 1);
        let [x, y, z] = ['X', 'Y', 'Z'].map(|c| pauli::<f64>(c).unwrap());
        assert!((variance_exact(&p, &dual, &p0, &z).unwrap() - 8.0).abs() < 1e-9);
        assert!((variance_exact(&p, &dual, &p1, &x).unwrap() - 5.0).abs() < 1e-9);
        assert!((variance_exact(&p, &dual, &p1, &y).unwrap() - 5.0).abs() < 1e-9);
        assert!(variance_exact(&p, &dual, &p1, &z).unwrap().abs() < 1e-9);
        let via = variance_exact_via_mse(&p, &dual, &p0, &z).unwrap();
        assert!((via - 8.0).abs() < 1e-9);
    }

    #[test]
    fn constant_observable_has_zero_variance() {
        let (p, dual) = h3();
        let c = HermOperator::identity(2).scale(3.0);
        let rho = HermOperator::maximally_mixed(2);
        assert!(variance_exact(&p, &dual, &rho, &c).unwrap().abs() < 1e-9);
    }

    #[test]
    fn fixture_a_operator() {
        let (p, dual) = h3();
        let x = pauli::<f64>('X').unwrap();
        let a = a_operator(&p, &dual, &x).unwrap();
        let expected = HermOperator::from_real(nalgebra::DMatrix::from_row_slice(2, 2, &[5.0, 4.0, 4.0, 5.0])).unwrap();
        assert!(a.max_abs_diff(&expected) < 1e-9);
        let mm = variance_minmax(&p, &dual, &x).unwrap();
        assert!((mm.min - 1.0).abs() < 1e-9 && (mm.max - 9.0).abs() < 1e-9);
        assert!((shadow_norm_sq(&p, &dual, &x).unwrap() - 9.0).abs() < 1e-9);
    }

    #[test]
    fn lambda1_star_values() {
        let l = lambda1_star(10.0 / 3.0, 14.0 / 3.0, 2).unwrap();
        assert!((l - (10.0 - 13f64.sqrt()) / 9.0).abs() < 1e-12);
        assert!(lambda1_star(1.0, 2.0, 2).is_err());
        assert!(lambda1_star(10.0, 1.0, 2).is_err());
        // Tight: λ1* = a/(d^2-1).
        let d = 3;
        let a = (d * (d - 1)) as f64;
        let b = a * a / 8.0;
        let bound = worst_case_lower_bound(a, b, d, 1.0).unwrap();
        assert!((bound - (9.0 + 3.0 - 1.0 - 1.0) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn tight_general_error_values() {
        assert!((tight_general_error::<f64>(2, 1.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((tight_general_error::<f64>(3, 1.0, 0.5).unwrap() - (9.0 + 3.0 - 1.0 - 0.5)).abs() < 1e-12);
        assert!((tight_general_error::<f64>(2, 0.75, 1.0).unwrap() - 8.5).abs() < 1e-12);
        assert!(tight_general_error(2, 0.5, 1.0).is_err());
    }

    #[test]
    fn purity_range_checked() {
        let (p, _) = h3();
        let z = pauli::<f64>('Z').unwrap();
        assert!(variance_averaged(&p, &z, 0.3).is_err());
        assert!(variance_averaged(&p, &z, 1.2).is_err());
    }
}
