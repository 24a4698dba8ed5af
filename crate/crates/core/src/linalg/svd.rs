use crate::linalg::eig::jacobi_rotation;
use crate::linalg::CMat;
use crate::scalar::{cr, Real};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `M = U diag(sigma) V*` with `V` square.
///
/// Columns of `U` paired with zero singular values are left as zero vectors.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// Descending.
    pub sigma: Vec<T>,
    pub u: CMat<T>,
    pub v: CMat<T>,
}

impl<T: Real> Svd<T> {
    pub fn max_sigma(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values above `cut`.
    pub fn rank_above(&self, cut: T) -> usize {
        self.sigma.iter().filter(|&&s| s > cut).count()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(m: &CMat<T>) -> Result<Svd<T>> {
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut v = CMat::identity(n);
    let eps = T::epsilon();
    // columns below this squared norm are numerically zero and never rotated
    let floor = eps * eps * m.norm_fro().powi(2);

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta) = (T::zero(), T::zero());
                let mut gamma = cr(T::zero());
                for k in 0..rows {
                    let (xp, xq) = (a[(k, p)], a[(k, q)]);
                    alpha += xp.norm_sqr();
                    beta += xq.norm_sqr();
                    gamma += xp.conj() * xq;
                }
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = jacobi_rotation(alpha, beta, gamma);
                let (cc, sc) = (cr(c), cr(s));
                for k in 0..rows {
                    let (xp, xq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = xp * cc - xq * sc * ph;
                    a[(k, q)] = xp * sc + xq * cc * ph;
                }
                for k in 0..n {
                    let (xp, xq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = xp * cc - xq * sc * ph;
                    v[(k, q)] = xp * sc + xq * cc * ph;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let norms: Vec<T> = (0..n)
        .map(|j| (0..rows).map(|k| a[(k, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite singular values"));
    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let mut u = CMat::zeros(rows, n);
    for (dst, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > T::zero() {
            for k in 0..rows {
                u[(k, dst)] = a[(k, j)] / cr(s);
            }
        }
    }
    Ok(Svd { sigma, u, v: v.select_columns(&order) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn reconstructs_rectangular() {
        let m = CMat::from_row_major(
            3,
            2,
            vec![c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0), c(1.0, 1.0), c(3.0, 0.0), c(-0.5, 0.25)],
        )
        .unwrap();
        let s = svd(&m).unwrap();
        let r = &(&s.u * &CMat::diag_real(&s.sigma)) * &s.v.adjoint();
        assert!(r.dist_max(&m) < 1e-12);
        assert!(s.sigma[0] >= s.sigma[1]);
    }

    #[test]
    fn rank_deficient_wide_matrix() {
        let m = CMat::<f64>::from_real(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let s = svd(&m).unwrap();
        assert_eq!(s.rank_above(1e-9 * s.max_sigma()), 1);
    }
}
