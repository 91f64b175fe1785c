//! Direct constrained least-squares minimisation over all duals, independent of
//! the frame-operator formulas.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::dual::{element_matrix, from_columns, DualFrame};
use crate::error::{Error, Result};
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::{vectorize, HermOperator};
use crate::povm::Povm;
use crate::scalar::Real;

/// The affine set `{X : X M^T = Id}` of duals, where `M` holds the
/// vectorised POVM elements as columns.
#[derive(Clone, Debug)]
pub struct ConstraintGeometry<T: Real> {
    dim: usize,
    m: DMatrix<T>,
    /// `M^+`, `l x d^2`.
    pinv: DMatrix<T>,
    /// Projector onto `ker M`, `l x l`.
    null_proj: DMatrix<T>,
    rank: usize,
}

impl<T: Real> ConstraintGeometry<T> {
    pub fn new(p: &Povm<T>) -> Result<Self> {
        let m = element_matrix(p);
        let (n, l) = m.shape();
        let svd = m.clone().svd(true, true);
        let u = svd.u.as_ref().expect("computed");
        let v_t = svd.v_t.as_ref().expect("computed");
        let smax = svd.singular_values.max();
        let cutoff = T::tol(1e-10) * smax;
        let mut pinv = DMatrix::zeros(l, n);
        let mut row_proj = DMatrix::zeros(l, l);
        let mut rank = 0;
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff {
                continue;
            }
            rank += 1;
            let vk = v_t.row(k).transpose();
            let uk = u.column(k);
            pinv += &vk * uk.transpose() / s;
            row_proj += &vk * vk.transpose();
        }
        let null_proj = DMatrix::identity(l, l) - row_proj;
        Ok(Self {
            dim: p.dim(),
            m,
            pinv,
            null_proj,
            rank,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the space of dual perturbations per operator component.
    pub fn nullity(&self) -> usize {
        self.m.ncols() - self.rank
    }

    pub fn null_projector(&self) -> &DMatrix<T> {
        &self.null_proj
    }

    fn require_feasible(&self) -> Result<()> {
        let n = self.dim * self.dim;
        if self.rank < n {
            return Err(Error::Infeasible(format!(
                "dual constraints need rank {n}, POVM spans {}",
                self.rank
            )));
        }
        Ok(())
    }

    /// Minimum-norm dual, `X0 = (M^+)^T`.
    pub fn particular_dual(&self) -> Result<DMatrix<T>> {
        self.require_feasible()?;
        Ok(self.pinv.transpose())
    }
}

/// Solves `min_v v^T diag(w) v` subject to `M v = c` for every column `c` of
/// `rhs` through the KKT system `[[2 diag(w), M^T], [M, 0]]`.
fn kkt_solve<T: Real>(m: &DMatrix<T>, weights: &[T], rhs: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (n, l) = m.shape();
    let mut kkt = DMatrix::zeros(l + n, l + n);
    for (b, w) in weights.iter().enumerate() {
        kkt[(b, b)] = T::of(2.0) * *w;
    }
    kkt.view_mut((0, l), (l, n)).copy_from(&m.transpose());
    kkt.view_mut((l, 0), (n, l)).copy_from(m);
    let mut full_rhs = DMatrix::zeros(l + n, rhs.ncols());
    full_rhs.view_mut((l, 0), (n, rhs.ncols())).copy_from(rhs);
    let sol = kkt
        .lu()
        .solve(&full_rhs)
        .ok_or_else(|| Error::Infeasible("KKT system is singular".into()))?;
    Ok(sol.rows(0, l).into_owned())
}

/// Minimises the expected cost directly over the affine set of duals with
/// Lagrange multipliers.
///
/// Without an observable the cost is `sum_b p_b tr(mu~_b^2)`; with one it is
/// `sum_b p_b <O, mu~_b>^2`, where `p_b = <mu_b, prior>`. In the observable
/// case only the values `<O, mu~_b>` are determined; the returned dual is the
/// minimum-norm dual corrected along `O`.
pub fn brute_force_min_variance_oracle<T: Real>(
    p: &Povm<T>,
    prior: &HermOperator<T>,
    observable: Option<&HermOperator<T>>,
) -> Result<DualFrame<T>> {
    check_same_dim(p.dim(), prior.dim())?;
    prior.check_density_matrix()?;
    let geom = ConstraintGeometry::new(p)?;
    let x0 = geom.particular_dual()?;
    let probs = p.outcome_probabilities(prior)?;
    let x = match observable {
        None => {
            // Row i of X minimises the weighted norm subject to (X M^T)_i = e_i.
            let n = p.dim() * p.dim();
            kkt_solve(&geom.m, &probs, &DMatrix::identity(n, n))?.transpose()
        }
        Some(o) => {
            check_same_dim(p.dim(), o.dim())?;
            let ov = vectorize(o);
            let norm_sq = ov.norm_squared();
            if norm_sq == T::zero() {
                x0
            } else {
                let rhs = DMatrix::from_column_slice(ov.len(), 1, ov.as_slice());
                let v = kkt_solve(&geom.m, &probs, &rhs)?;
                let w = v - x0.transpose() * &rhs;
                x0 + &ov * w.transpose() / norm_sq
            }
        }
    };
    DualFrame::custom(p, from_columns(&x, p.dim()))
}

/// `base + scale * G P_N` with Gaussian `G`: a random element of the affine
/// set of duals.
pub fn random_valid_dual<T: Real, R: Rng + ?Sized>(
    p: &Povm<T>,
    base: &DualFrame<T>,
    scale: T,
    rng: &mut R,
) -> Result<DualFrame<T>> {
    check_same_dim(p.len(), base.len())?;
    let geom = ConstraintGeometry::new(p)?;
    geom.require_feasible()?;
    let n = p.dim() * p.dim();
    let g = DMatrix::from_fn(n, p.len(), |_, _| T::of(rng.sample::<f64, _>(StandardNormal)));
    let x = base.matrix() + g * &geom.null_proj * scale;
    DualFrame::custom(p, from_columns(&x, p.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{canonical_estimator, min_variance_dual};
    use crate::operator_space::random_density_matrix;
    use crate::povm::AppendixPovm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimal_povm_has_unique_dual() {
        let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
        let geom = ConstraintGeometry::new(&p).unwrap();
        assert_eq!(geom.nullity(), 0);
        let oracle = brute_force_min_variance_oracle(&p, &HermOperator::basis_projector(2, 0), None).unwrap();
        let can = canonical_estimator(&p).unwrap();
        for (a, b) in oracle.elements().iter().zip(can.elements()) {
            assert!(a.max_abs_diff(b) < 1e-10);
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = Povm::<f64>::random_rank1(2, 5, &mut rng).unwrap();
        let prior = random_density_matrix(2, &mut rng);
        let oracle = brute_force_min_variance_oracle(&p, &prior, None).unwrap();
        let closed = min_variance_dual(&p, &prior, None).unwrap();
        for (a, b) in oracle.elements().iter().zip(closed.elements()) {
            assert!(a.max_abs_diff(b) < 1e-8);
        }
    }

    #[test]
    fn random_duals_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let p = Povm::<f64>::random_rank1(3, 12, &mut rng).unwrap();
        let base = canonical_estimator(&p).unwrap();
        let other = random_valid_dual(&p, &base, 0.5, &mut rng).unwrap();
        assert!(other.reconstruction_defect(&p).unwrap() < 1e-10);
        let diff = base.elements()[0].max_abs_diff(&other.elements()[0]);
        assert!(diff > 1e-3);
    }

    #[test]
    fn non_ic_is_infeasible() {
        let p = Povm::<f64>::appendix(AppendixPovm::NonIc4);
        assert!(matches!(
            brute_force_min_variance_oracle(&p, &HermOperator::maximally_mixed(2), None),
            Err(Error::Infeasible(_))
        ));
    }
}
