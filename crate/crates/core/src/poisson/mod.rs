//! Bi-Hamiltonian structure of the reduced system.

pub mod auxiliary;
pub mod checks;
pub mod tensors;

pub use auxiliary::{f_eval, g_eval, Branch};
pub use checks::{
    bi_involution_check, compatibility_check, jacobi_point, jacobi_residual, lenard_magri_check, rank_check,
    restricted_pairs,
};
pub use tensors::{AuxChoice, Bivector5, P_f_matrix, Q_g_matrix};
