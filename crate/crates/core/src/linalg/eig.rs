use crate::linalg::{CMat, Tolerance};
use crate::scalar::{cr, Real, C};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: CMat<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn reconstruct(&self) -> CMat<T> {
        let d = CMat::diag_real(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }

    /// Spectral radius.
    pub fn norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// The 2x2 unitary that zeroes the `(p,q)` coupling of the Hermitian pencil
/// `[[app, apq], [conj(apq), aqq]]`.
///
/// Returned as `(c, s, phase)` with `U = [[c, s], [-s*phase, c*phase]]` and
/// `phase = exp(-i arg(apq))`.
pub(crate) fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> (T, T, C<T>) {
    let r = apq.norm();
    let phase = C::new(apq.re / r, -apq.im / r);
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, t * c, phase)
}

/// Cyclic complex Jacobi eigensolver.
///
/// Rejects inputs with `max |M - M*| > eps (1 + max|M|)`; the Hermitian part is
/// diagonalized otherwise.
pub fn hermitian_eig<T: Real>(m: &CMat<T>, tol: &Tolerance<T>) -> Result<HermitianEig<T>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("eigendecomposition of {}x{}", m.rows(), m.cols())));
    }
    let defect = m.hermitian_defect();
    if defect > tol.eps * (T::one() + m.norm_max()) {
        return Err(Error::NotHermitian(defect.to_f64_lossy()));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMat::identity(n);
    let scale = a.norm_fro();
    let eps = T::epsilon();
    let floor = eps * eps * scale;

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                if r <= floor || r <= eps * (app * aqq).abs().sqrt() * T::lit(0.5) {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = jacobi_rotation(app, aqq, apq);
                let (cc, sc) = (cr(c), cr(s));
                // A <- A U
                for k in 0..n {
                    let (xp, xq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = xp * cc - xq * sc * ph;
                    a[(k, q)] = xp * sc + xq * cc * ph;
                }
                // A <- U* A
                let phc = ph.conj();
                for k in 0..n {
                    let (xp, xq) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = xp * cc - xq * sc * phc;
                    a[(q, k)] = xp * sc + xq * cc * phc;
                }
                a[(p, q)] = cr(T::zero());
                a[(q, p)] = cr(T::zero());
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
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

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.select_columns(&order);
    Ok(HermitianEig { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn diagonal_input_is_left_alone() {
        let m = CMat::<f64>::diag_real(&[0.0, 1.0]);
        let e = hermitian_eig(&m, &tol()).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0]);
        assert!(e.vectors.dist_max(&CMat::identity(2)) < 1e-15);
    }

    #[test]
    fn swap_matrix_has_eigenvalues_pm_one() {
        let m = CMat::<f64>::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&m, &tol()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_by_one() {
        let m = CMat::<f64>::from_real(1, 1, &[5.0]);
        let e = hermitian_eig(&m, &tol()).unwrap();
        assert_eq!(e.values, vec![5.0]);
        assert_eq!(e.vectors[(0, 0)].re, 1.0);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = CMat::from_row_major(
            3,
            3,
            vec![
                c(2.0, 0.0),
                c(1.0, -1.0),
                c(0.0, 0.5),
                c(1.0, 1.0),
                c(-1.0, 0.0),
                c(0.3, 0.2),
                c(0.0, -0.5),
                c(0.3, -0.2),
                c(4.0, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eig(&m, &tol()).unwrap();
        assert!(e.reconstruct().dist_fro(&m) < 1e-12);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.dist_max(&CMat::identity(3)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMat::<f64>::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m, &tol()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn empty_matrix() {
        let e = hermitian_eig(&CMat::<f64>::zeros(0, 0), &tol()).unwrap();
        assert!(e.values.is_empty());
    }

    #[test]
    fn single_precision_works() {
        let m = CMat::<f32>::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = hermitian_eig(&m, &Tolerance::default()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-5);
        assert!((e.values[1] - 3.0).abs() < 1e-5);
    }
}
