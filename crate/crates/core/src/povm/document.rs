use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Povm, WeightedState};
use crate::error::{Error, Result};
use crate::operator_space::HermOperator;
use crate::scalar::{Complex, Real};

/// JSON form of a POVM. Complex numbers are `[re, im]` pairs and matrices are
/// lists of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmDocument {
    pub dim: usize,
    pub elements: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Vec<[f64; 2]>>>,
}

fn pair<T: Real>(z: &Complex<T>) -> [f64; 2] {
    [z.re.as_f64(), z.im.as_f64()]
}

fn unpair<T: Real>(p: &[f64; 2]) -> Complex<T> {
    Complex::new(T::of(p[0]), T::of(p[1]))
}

/// Rows of `[re, im]` pairs.
pub fn operator_rows<T: Real>(x: &HermOperator<T>) -> Vec<Vec<[f64; 2]>> {
    let d = x.dim();
    (0..d)
        .map(|i| (0..d).map(|j| pair(&x.matrix()[(i, j)])).collect())
        .collect()
}

/// Inverse of [`operator_rows`]; the matrix must be square and Hermitian.
pub fn operator_from_rows<T: Real>(rows: &[Vec<[f64; 2]>]) -> Result<HermOperator<T>> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Document(format!("expected {d} entries per row")));
    }
    HermOperator::new(DMatrix::from_fn(d, d, |i, j| unpair::<T>(&rows[i][j])))
}

impl PovmDocument {
    pub fn from_povm<T: Real>(p: &Povm<T>) -> Self {
        let d = p.dim();
        let elements = p.elements().iter().map(operator_rows).collect();
        let (weights, states) = match p.rank1_form() {
            Some(form) => (
                Some(form.iter().map(|ws| ws.weight.as_f64()).collect()),
                Some(form.iter().map(|ws| ws.state.iter().map(pair).collect()).collect()),
            ),
            None => (None, None),
        };
        Self {
            dim: d,
            elements,
            weights,
            states,
        }
    }

    /// Rebuilds the POVM. Elements must be Hermitian; positivity and
    /// completeness are left to [`Povm::validate`].
    pub fn to_povm<T: Real>(&self) -> Result<Povm<T>> {
        let d = self.dim;
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for (b, rows) in self.elements.iter().enumerate() {
            if rows.len() != d {
                return Err(Error::Document(format!("element {b} is not {d}x{d}")));
            }
            elements.push(operator_from_rows(rows)?);
        }
        let povm = Povm::new(elements)?;
        match (&self.weights, &self.states) {
            (None, None) => Ok(povm),
            (Some(w), Some(s)) => {
                if w.len() != povm.len() || s.len() != povm.len() {
                    return Err(Error::Document(
                        "weights and states must have one entry per element".into(),
                    ));
                }
                let mut form = Vec::with_capacity(w.len());
                for (b, (&weight, state)) in w.iter().zip(s).enumerate() {
                    if state.len() != d {
                        return Err(Error::Document(format!("state {b} has wrong length")));
                    }
                    form.push(WeightedState {
                        weight: T::of(weight),
                        state: DVector::from_iterator(d, state.iter().map(unpair::<T>)),
                    });
                }
                povm.with_rank1_form(form)
            }
            _ => Err(Error::Document("weights and states must be given together".into())),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }
}

/// SHA-256 of the compact JSON encoding of the POVM, hex encoded.
pub fn content_hash<T: Real>(p: &Povm<T>) -> String {
    let bytes = serde_json::to_vec(&PovmDocument::from_povm(p)).expect("document serialises");
    hex::encode(Sha256::digest(&bytes))
}
