use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Povm, WeightedState};
use crate::error::{Error, Result};
use crate::operator_space::{sym_dimension, sym_projector, tensor_power};
use crate::scalar::{cabs, Complex, Real};

/// Residual threshold for the design checks.
pub const DESIGN_TOL: f64 = 1e-9;

/// Result of a t-design check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignCheck {
    pub passed: bool,
    /// Max-entry norm of `sum_b w_b P(psi_b)^{⊗t} - d Π_sym / dim(Sym^t)`.
    pub residual: f64,
}

/// Weighted complex projective 2-design check.
pub fn is_2design<T: Real>(p: &Povm<T>) -> Result<DesignCheck> {
    design_check(p, 2)
}

/// Weighted complex projective 3-design check.
pub fn is_3design<T: Real>(p: &Povm<T>) -> Result<DesignCheck> {
    design_check(p, 3)
}

fn design_check<T: Real>(p: &Povm<T>, t: usize) -> Result<DesignCheck> {
    let form = p.rank1_form().ok_or(Error::MissingRank1Form)?;
    let d = p.dim();
    let moment = tensor_moment(form, t);
    let target = sym_projector::<T>(d, t)? * (T::of_usize(d) / T::of_usize(sym_dimension(d, t)));
    let residual = moment
        .iter()
        .zip(target.iter())
        .fold(T::zero(), |acc, (m, s)| acc.max(cabs(*m - Complex::new(*s, T::zero()))));
    Ok(DesignCheck {
        passed: residual <= T::tol(DESIGN_TOL),
        residual: residual.as_f64(),
    })
}

/// `sum_b w_b (|psi_b><psi_b|)^{⊗t}` computed as `Psi Psi^†`.
fn tensor_moment<T: Real>(form: &[WeightedState<T>], t: usize) -> DMatrix<Complex<T>> {
    let n = form[0].state.len().pow(t as u32);
    let mut psi = DMatrix::zeros(n, form.len());
    for (b, ws) in form.iter().enumerate() {
        let col = tensor_power(&ws.state, t) * Complex::new(ws.weight.sqrt(), T::zero());
        psi.set_column(b, &col);
    }
    &psi * psi.adjoint()
}
