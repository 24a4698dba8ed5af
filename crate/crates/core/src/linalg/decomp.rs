use crate::linalg::{hermitian_eig, svd, CMat, Tolerance};
use crate::scalar::{cr, Real, C};
use crate::{Error, Result};

/// Range of a positive semidefinite matrix with its nonzero spectrum.
#[derive(Clone, Debug)]
pub struct PsdSupport<T> {
    pub rank: usize,
    /// Orthonormal eigenvectors spanning the range, as columns.
    pub basis: CMat<T>,
    /// Matching eigenvalues, all above the cut.
    pub weights: Vec<T>,
    /// Smallest eigenvalue seen, for reporting.
    pub min_eigenvalue: T,
}

impl<T: Real> PsdSupport<T> {
    pub fn reconstruct(&self) -> CMat<T> {
        let w = CMat::diag_real(&self.weights);
        &(&self.basis * &w) * &self.basis.adjoint()
    }

    /// Orthonormal basis of the kernel is the complement of `basis`; this
    /// returns `basis * diag(weights)^{-1/2}`.
    pub fn whitened_basis(&self) -> CMat<T> {
        let inv: Vec<T> = self.weights.iter().map(|w| T::one() / w.sqrt()).collect();
        &self.basis * &CMat::diag_real(&inv)
    }
}

/// Splits a PSD matrix into range and kernel using the cut
/// `lambda <= tol.threshold(||M||_2)`.
pub fn psd_support<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<PsdSupport<T>> {
    let eig = hermitian_eig(m, tol)?;
    let cut = tol.threshold(eig.norm());
    let min = eig.values.first().copied().unwrap_or_else(T::zero);
    if min < -cut {
        return Err(Error::NotPsd(min.to_f64_lossy()));
    }
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > cut).collect();
    let mut keep_sorted = keep.clone();
    // largest weight first
    keep_sorted.reverse();
    Ok(PsdSupport {
        rank: keep_sorted.len(),
        basis: eig.vectors.select_columns(&keep_sorted),
        weights: keep_sorted.iter().map(|&k| eig.values[k]).collect(),
        min_eigenvalue: min,
    })
}

/// Unitary factor `M (M*M)^{-1/2}` of an invertible square matrix.
pub fn polar_unitary<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<CMat<T>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("polar factor of {}x{}", m.rows(), m.cols())));
    }
    let s = svd(m)?;
    let smin = s.sigma.last().copied().unwrap_or_else(T::zero);
    if m.rows() > 0 && smin <= tol.eps * s.max_sigma() {
        return Err(Error::Singular(smin.to_f64_lossy()));
    }
    Ok(&s.u * &s.v.adjoint())
}

/// Operator 2-norm.
pub fn op_norm<T: Real>(m: &CMat<T>) -> Result<T> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(T::zero());
    }
    Ok(svd(m)?.max_sigma())
}

/// Orthonormal basis (columns) of `{x : M x = 0}`.
pub fn null_space<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<CMat<T>> {
    let s = svd(m)?;
    let cut = tol.threshold(s.max_sigma());
    let idx: Vec<usize> = (0..s.sigma.len()).filter(|&k| s.sigma[k] <= cut).collect();
    Ok(s.v.select_columns(&idx))
}

/// Orthonormal basis (columns) of the range of `M`.
pub fn column_space<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<CMat<T>> {
    let s = svd(m)?;
    let cut = tol.threshold(s.max_sigma());
    let idx: Vec<usize> = (0..s.sigma.len()).filter(|&k| s.sigma[k] > cut).collect();
    Ok(s.u.select_columns(&idx))
}

pub fn rank<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<usize> {
    let s = svd(m)?;
    Ok(s.rank_above(tol.threshold(s.max_sigma())))
}

/// Minimum-norm least-squares solution of `M X = B` and the max-norm residual.
pub fn lstsq<T: Real>(m: &CMat<T>, b: &CMat<T>, tol: &Tolerance<T>) -> Result<(CMat<T>, T)> {
    if m.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "least squares with {} equations and {} right-hand rows",
            m.rows(),
            b.rows()
        )));
    }
    let s = svd(m)?;
    let cut = tol.threshold(s.max_sigma());
    let inv: Vec<C<T>> =
        s.sigma.iter().map(|&x| if x > cut { cr(T::one() / x) } else { cr(T::zero()) }).collect();
    let ub = &s.u.adjoint() * b;
    let scaled = &CMat::diag(&inv) * &ub;
    let x = &s.v * &scaled;
    let res = (&(m * &x) - b).norm_max();
    Ok((x, res))
}

/// Coefficients expressing `target` in the span of `basis` (all the same shape),
/// with the max-norm residual of the best fit.
pub fn coords_in_span<T: Real>(
    basis: &[CMat<T>],
    target: &CMat<T>,
    tol: &Tolerance<T>,
) -> Result<(Vec<C<T>>, T)> {
    if basis.is_empty() {
        return Ok((Vec::new(), target.norm_max()));
    }
    let cols: Vec<Vec<C<T>>> = basis.iter().map(|b| b.to_vec()).collect();
    let len = cols[0].len();
    let a = CMat::from_columns(len, &cols);
    let (x, res) = lstsq(&a, &CMat::col_vec(&target.to_vec()), tol)?;
    Ok((x.column(0), res))
}

/// Hermitian square root and inverse square root of a positive definite matrix.
pub fn pd_sqrt_pair<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<(CMat<T>, CMat<T>)> {
    let e = hermitian_eig(m, tol)?;
    let cut = tol.threshold(e.norm());
    if let Some(&min) = e.values.first() {
        if min <= cut {
            return Err(Error::Singular(min.to_f64_lossy()));
        }
    }
    let sq: Vec<T> = e.values.iter().map(|v| v.sqrt()).collect();
    let isq: Vec<T> = sq.iter().map(|v| T::one() / *v).collect();
    let vh = e.vectors.adjoint();
    Ok((
        &(&e.vectors * &CMat::diag_real(&sq)) * &vh,
        &(&e.vectors * &CMat::diag_real(&isq)) * &vh,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn support_of_diag_one_zero() {
        let s = psd_support(&CMat::<f64>::diag_real(&[1.0, 0.0]), &tol()).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.weights, vec![1.0]);
        assert!((s.basis[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_of_pair_delta_gram() {
        // G[(s,u),(t,v)] = delta_su delta_tv on 2x2 index pairs
        let g = CMat::<f64>::from_fn(4, 4, |i, j| {
            let (s, u, t, v) = (i / 2, i % 2, j / 2, j % 2);
            cr(if s == u && t == v { 1.0 } else { 0.0 })
        });
        let s = psd_support(&g, &tol()).unwrap();
        assert_eq!(s.rank, 1);
        assert!((s.weights[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tiny_eigenvalue_is_cut() {
        let s = psd_support(&CMat::<f64>::diag_real(&[1e-15, 3.0]), &tol()).unwrap();
        assert_eq!(s.rank, 1);
        assert!((s.weights[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let r = psd_support(&CMat::<f64>::diag_real(&[1.0, -0.5]), &tol());
        assert!(matches!(r, Err(Error::NotPsd(_))));
    }

    #[test]
    fn polar_examples() {
        let i2 = CMat::<f64>::identity(2);
        assert!(polar_unitary(&i2, &tol()).unwrap().dist_max(&i2) < 1e-15);
        let two = i2.scale_real(2.0);
        assert!(polar_unitary(&two, &tol()).unwrap().dist_max(&i2) < 1e-15);
        let d = CMat::<f64>::diag_real(&[2.0, -3.0]);
        let u = polar_unitary(&d, &tol()).unwrap();
        assert!(u.dist_max(&CMat::diag_real(&[1.0, -1.0])) < 1e-15);
        let sing = CMat::<f64>::diag_real(&[1.0, 0.0]);
        assert!(matches!(polar_unitary(&sing, &tol()), Err(Error::Singular(_))));
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = CMat::<f64>::from_real(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        let n = null_space(&m, &tol()).unwrap();
        assert_eq!(n.cols(), 2);
        assert!((&m * &n).norm_max() < 1e-14);
    }

    #[test]
    fn lstsq_exact_system() {
        let m = CMat::<f64>::from_real(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let b = CMat::<f64>::from_real(2, 1, &[2.0, 2.0]);
        let (x, res) = lstsq(&m, &b, &tol()).unwrap();
        assert!(res < 1e-15);
        assert!((x[(1, 0)].re - 0.5).abs() < 1e-15);
    }
}
