use crate::linalg::{psd_support, CMat, Tolerance};
use crate::module::ops::unit_vec;
use crate::module::{HilbertModule, ModuleAction};
use crate::scalar::{czero, Real, C};
use crate::{Error, Result};

/// `E ⊗_Φ F` realized on the orthogonal complement of the null space of the
/// tensor-product form.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerTensor<T> {
    pub module: HilbertModule<T>,
    /// Columns span the complement of the null space in `E ⊗ F` (index `s·d_F + u`);
    /// its adjoint is the canonical surjection.
    pub proj: CMat<T>,
    pub min_eigenvalue: T,
    dim_f: usize,
}

impl<T: Real> InnerTensor<T> {
    /// Class of `ξ ⊗ η`.
    pub fn simple(&self, xi: &[C<T>], eta: &[C<T>]) -> Vec<C<T>> {
        self.proj.adjoint().mul_vec(&CMat::col_vec(xi).kron(&CMat::col_vec(eta)).to_vec())
    }

    /// `(Φ)_*(T): ξ ⊗ η ↦ Tξ ⊗ η`.
    pub fn pushforward(&self, t: &CMat<T>) -> Result<CMat<T>> {
        if t.rows() * self.dim_f != self.proj.rows() || !t.is_square() {
            return Err(Error::ShapeMismatch("operator on the left factor".into()));
        }
        let lifted = t.kron(&CMat::identity(self.dim_f));
        Ok(&(&self.proj.adjoint() * &lifted) * &self.proj)
    }

    /// `(Φ)_* ∘ Ψ` for an action `Ψ` on the left factor.
    pub fn push_action(&self, psi: &ModuleAction<T>) -> Result<ModuleAction<T>> {
        let images = psi.images().iter().map(|m| self.pushforward(m)).collect::<Result<_>>()?;
        ModuleAction::new(psi.source().clone(), self.module.clone(), images)
    }
}

/// Inner tensor product of a Hilbert `B`-module `E` with a Hilbert `C`-module
/// `F` on which `B` acts through `phi`.
pub fn inner_tensor<T: Real>(e: &HilbertModule<T>, phi: &ModuleAction<T>, tol: &Tolerance<T>) -> Result<InnerTensor<T>> {
    if phi.source() != e.over() {
        return Err(Error::AlgebraMismatch);
    }
    phi.require_nondegenerate(tol)?;
    let f = phi.module();
    let (de, df) = (e.dim(), f.dim());
    let n = de * df;
    let cdim = f.over().dim();

    let mut form = vec![vec![czero(); cdim]; n * n];
    for s in 0..de {
        for t in 0..de {
            let m = phi.apply_coeffs(e.gram_coeffs(s, t));
            for u in 0..df {
                let fu = unit_vec(df, u);
                for v in 0..df {
                    form[(s * df + u) * n + t * df + v] = f.inner_coeffs(&fu, &m.column(v));
                }
            }
        }
    }
    let diag = f.over().diagonal_units();
    let q = CMat::from_fn(n, n, |a, b| diag.iter().fold(czero(), |acc, &k| acc + form[a * n + b][k]));
    let (w, min_eigenvalue) = if n == 0 {
        (CMat::zeros(0, 0), T::zero())
    } else {
        let sup = psd_support(&q.hermitian_part(), tol)?;
        (sup.basis, sup.min_eigenvalue)
    };
    let r = w.cols();
    let wa = w.adjoint();
    let id_e = CMat::identity(de);
    let action = (0..cdim).map(|g| &(&wa * &id_e.kron(f.right_action(g))) * &w).collect();
    let cols: Vec<Vec<C<T>>> = (0..r).map(|j| w.column(j)).collect();
    let module = HilbertModule::from_parts(f.over().clone(), r, action, |j, k| {
        let mut v = vec![czero(); cdim];
        for a in 0..n {
            let x = cols[j][a].conj();
            if x == czero() {
                continue;
            }
            for b in 0..n {
                let c = x * cols[k][b];
                if c == czero() {
                    continue;
                }
                for (acc, g) in v.iter_mut().zip(&form[a * n + b]) {
                    *acc += c * *g;
                }
            }
        }
        v
    })?;
    Ok(InnerTensor { module, proj: w, min_eigenvalue, dim_f: df })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixStarAlgebra;
    use crate::module::validate_module;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn scalars_tensor_scalars() {
        let e = HilbertModule::<f64>::hilbert_space(1);
        let g = inner_tensor(&e, &ModuleAction::scalars(&e), &tol()).unwrap();
        assert_eq!(g.module.dim(), 1);
        assert!(validate_module(&g.module, &tol()).unwrap().is_valid());
    }

    #[test]
    fn rows_tensor_columns_is_one_dimensional() {
        // M_2 acts on ℂ² (over ℂ) by matrix multiplication
        let e = HilbertModule::<f64>::row_module(2);
        let f = HilbertModule::hilbert_space(2);
        let m2 = MatrixStarAlgebra::full(2);
        let phi = ModuleAction::new(m2.clone(), f, (0..4).map(|k| m2.identity_image(k)).collect()).unwrap();
        let g = inner_tensor(&e, &phi, &tol()).unwrap();
        assert_eq!(g.module.dim(), 1);
        assert!(validate_module(&g.module, &tol()).unwrap().is_valid());
    }

    #[test]
    fn first_coordinate_tensor() {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let e = HilbertModule::<f64>::over_itself(&c2);
        let f = HilbertModule::hilbert_space(1);
        let phi = ModuleAction::new(c2, f, vec![CMat::identity(1), CMat::zeros(1, 1)]).unwrap();
        let g = inner_tensor(&e, &phi, &tol()).unwrap();
        assert_eq!(g.module.dim(), 1);
        // the second summand is killed
        assert!(g.pushforward(&CMat::diag_real(&[0.0, 1.0])).unwrap().norm_max() < 1e-12);
    }
}
