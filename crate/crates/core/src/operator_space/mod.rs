//! Hermitian operators, the standard operator basis, superoperators and
//! random sampling of states and unitaries.

pub mod basis;
pub mod haar;
pub mod herm;
pub mod superop;
pub mod symmetric;

pub use basis::{devectorize, layout, vectorize, BasisElement, HermBasis};
pub use haar::{
    haar_conjugate, random_density_matrix, random_haar_unitary, random_hermitian, random_pure_state,
    random_pure_vector, random_state, random_traceless_observable, spectrum_with_purity,
};
pub use herm::{hs_inner, pauli, pauli_string, HermOperator};
pub use superop::{SpectralDecomposition, SuperOperator, PINV_REL_TOL};
pub use symmetric::{sym_dimension, sym_projector, tensor_power};
