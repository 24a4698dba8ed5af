//! Dense complex linear algebra: Hermitian eigensolver, Jacobi SVD and the
//! derived PSD-range, polar, null-space and least-squares routines.

mod decomp;
mod eig;
mod mat;
mod svd;
mod tol;

pub use decomp::{
    column_space, coords_in_span, lstsq, null_space, op_norm, pd_sqrt_pair, polar_unitary,
    psd_support, rank, PsdSupport,
};
pub use eig::{hermitian_eig, HermitianEig};
pub use mat::{vdot, vnorm, CMat};
pub use svd::{svd, Svd};
pub use tol::Tolerance;
