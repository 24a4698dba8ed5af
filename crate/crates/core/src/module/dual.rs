use crate::algebra::{AlgElem, MatrixStarAlgebra};
use crate::linalg::{coords_in_span, lstsq, rank, CMat, Tolerance};
use crate::module::ops::unit_vec;
use crate::module::{compact_space, is_full, module_adjoint, rank_one, validate_module, AdjointableOp, HilbertModule, ModuleAction};
use crate::scalar::{Real, C};
use crate::structure::decompose;
use crate::{Error, Result};

/// Seed for the structure recovery of `K_A(E)` when no isomorphism is supplied.
pub const STRUCTURE_SEED: u64 = 0x4d6f726974;

/// `Ẽ = K_A(E, A)`, a Hilbert module over `B ≅ K_A(E)`, with `α: A → L_B(Ẽ)`.
#[derive(Clone, Debug)]
pub struct DualModule<T> {
    pub source: HilbertModule<T>,
    /// `B → L_A(E)`, an isomorphism onto `K_A(E)`.
    pub iso: ModuleAction<T>,
    /// Basis of `K_A(E, A)`, maps `E → A` of shape `dim(A) × d`.
    pub carrier: Vec<AdjointableOp<T>>,
    /// `Ẽ` in carrier coordinates, over the source of `iso`.
    pub module: HilbertModule<T>,
    /// `α(a)(T) = a·T`.
    pub alpha: ModuleAction<T>,
    /// Largest distance of some `T*∘S` from `K_A(E)`.
    pub membership_residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualReport<T> {
    pub module_ok: bool,
    pub alpha_ok: bool,
    pub alpha_injective: bool,
    /// `dim K_B(Ẽ) = dim A`, so that `α` is onto the compacts.
    pub alpha_onto: bool,
    pub membership_ok: bool,
    pub membership_residual: T,
    pub alpha_residual: T,
}

impl<T: Real> DualReport<T> {
    pub fn is_valid(&self) -> bool {
        self.module_ok && self.alpha_ok && self.alpha_injective && self.alpha_onto && self.membership_ok
    }
}

/// Builds `Ẽ` using the block structure of `K_A(E)` recovered numerically.
pub fn dual_module<T: Real>(e: &HilbertModule<T>, tol: &Tolerance<T>) -> Result<DualModule<T>> {
    let iso = compact_iso(e, tol)?;
    DualModule::with_iso(e, iso, tol)
}

/// `K_A(E)` as a declared algebra acting on `E`.
pub fn compact_iso<T: Real>(e: &HilbertModule<T>, tol: &Tolerance<T>) -> Result<ModuleAction<T>> {
    let span = compact_space(e, e, tol)?;
    let q = e.trace_gram();
    let dec = decompose(&span, Some(&q), tol, STRUCTURE_SEED)?;
    ModuleAction::new(dec.algebra, e.clone(), dec.units)
}

impl<T: Real> DualModule<T> {
    /// Builds `Ẽ` over the source algebra of `iso`, which must map onto `K_A(E)`.
    pub fn with_iso(e: &HilbertModule<T>, iso: ModuleAction<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !is_full(e, tol) {
            return Err(Error::NotFull);
        }
        if iso.module() != e {
            return Err(Error::InvalidMorphism("isomorphism acts on a different module".into()));
        }
        let a = e.over();
        let aa = HilbertModule::over_itself(a);
        let basis = compact_space(e, &aa, tol)?;
        let carrier: Vec<AdjointableOp<T>> = basis
            .iter()
            .map(|t| Ok(AdjointableOp { mat: t.clone(), adjoint: module_adjoint(e, &aa, t, tol)? }))
            .collect::<Result<_>>()?;
        let m = carrier.len();
        let b: MatrixStarAlgebra = iso.source().clone();

        let action: Vec<CMat<T>> = (0..b.dim())
            .map(|beta| {
                let targets: Vec<CMat<T>> = carrier.iter().map(|t| &t.mat * iso.image(beta)).collect();
                coords_matrix(&basis, &targets, tol)
            })
            .collect::<Result<_>>()?;

        let mut gram = vec![Vec::new(); m * m];
        let mut membership_residual = T::zero();
        for j in 0..m {
            for k in 0..m {
                let prod = &carrier[j].adjoint * &carrier[k].mat;
                let (coef, res) = coords_in_span(iso.images(), &prod, tol)?;
                membership_residual = membership_residual.max(res);
                gram[j * m + k] = coef;
            }
        }
        let module = HilbertModule::from_parts(b, m, action, |j, k| gram[j * m + k].clone())?;

        let alpha_images: Vec<CMat<T>> = (0..a.dim())
            .map(|k| {
                let left = a.left_mult::<T>(k);
                let targets: Vec<CMat<T>> = carrier.iter().map(|t| &left * &t.mat).collect();
                coords_matrix(&basis, &targets, tol)
            })
            .collect::<Result<_>>()?;
        let alpha = ModuleAction::new(a.clone(), module.clone(), alpha_images)?;
        Ok(Self { source: e.clone(), iso, carrier, module, alpha, membership_residual })
    }

    /// Carrier coordinates of a map `E → A` (`dim(A) × d`).
    pub fn coords(&self, t: &CMat<T>, tol: &Tolerance<T>) -> Result<(Vec<C<T>>, T)> {
        let basis: Vec<CMat<T>> = self.carrier.iter().map(|c| c.mat.clone()).collect();
        coords_in_span(&basis, t, tol)
    }

    /// The concrete map `E → A` with the given carrier coordinates.
    pub fn materialize(&self, x: &[C<T>]) -> CMat<T> {
        let a = self.source.over().dim();
        let mut m = CMat::zeros(a, self.source.dim());
        for (c, &z) in self.carrier.iter().zip(x) {
            m.axpy(z, &c.mat);
        }
        m
    }

    /// `max ||α(a_k)(θ_{b_l, e_s}) − θ_{a_k b_l, e_s}||` over basis triples, in carrier coordinates.
    pub fn alpha_identity_residual(&self, tol: &Tolerance<T>) -> Result<T> {
        let a = self.source.over();
        let aa = HilbertModule::over_itself(a);
        let d = self.source.dim();
        let mut worst = T::zero();
        for s in 0..d {
            let xi = unit_vec(d, s);
            let thetas: Vec<Vec<C<T>>> = (0..a.dim())
                .map(|l| Ok(self.coords(&rank_one(&aa, &unit_vec(a.dim(), l), &self.source, &xi)?.mat, tol)?.0))
                .collect::<Result<_>>()?;
            for k in 0..a.dim() {
                for l in 0..a.dim() {
                    let lhs = self.alpha.image(k).mul_vec(&thetas[l]);
                    let rhs = match a.product_index(k, l) {
                        Some(p) => thetas[p].clone(),
                        None => vec![C::new(T::zero(), T::zero()); lhs.len()],
                    };
                    let r = lhs.iter().zip(&rhs).map(|(x, y)| (*x - *y).norm()).fold(T::zero(), T::max);
                    worst = worst.max(r);
                }
            }
        }
        Ok(worst)
    }

    /// `||α(a)(θ_{b,ξ}) − θ_{ab,ξ}||` for `a, b ∈ A`, `ξ ∈ E`, as maps `E → A`.
    pub fn alpha_identity_at(&self, a: &AlgElem<T>, b: &AlgElem<T>, xi: &[C<T>], tol: &Tolerance<T>) -> Result<T> {
        let aa = HilbertModule::over_itself(self.source.over());
        let theta_b = rank_one(&aa, &b.to_vec(), &self.source, xi)?.mat;
        let theta_ab = rank_one(&aa, &a.mul(b)?.to_vec(), &self.source, xi)?.mat;
        let (x, _) = self.coords(&theta_b, tol)?;
        Ok(self.materialize(&self.alpha.apply(a)?.mul_vec(&x)).dist_max(&theta_ab))
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> Result<DualReport<T>> {
        let module_ok = validate_module(&self.module, tol)?.is_valid();
        let ar = self.alpha.validate(tol)?;
        let a = self.source.over();
        let stacked: Vec<Vec<C<T>>> = self.alpha.images().iter().map(CMat::to_vec).collect();
        let n = self.module.dim() * self.module.dim();
        let alpha_injective = a.dim() == 0 || rank(&CMat::from_columns(n, &stacked), tol)? == a.dim();
        let alpha_onto = compact_space(&self.module, &self.module, tol)?.len() == a.dim();
        let alpha_residual = ar.max_residual().max(self.alpha_identity_residual(tol)?);
        Ok(DualReport {
            module_ok,
            alpha_ok: ar.is_valid() && ar.nondegenerate,
            alpha_injective,
            alpha_onto,
            membership_ok: tol.accepts(self.membership_residual, T::one()),
            membership_residual: self.membership_residual,
            alpha_residual,
        })
    }
}

/// Columns are the coordinates of each target in the span of `basis`.
fn coords_matrix<T: Real>(basis: &[CMat<T>], targets: &[CMat<T>], tol: &Tolerance<T>) -> Result<CMat<T>> {
    let m = basis.len();
    if m == 0 {
        return Ok(CMat::zeros(0, targets.len()));
    }
    let len = basis[0].rows() * basis[0].cols();
    let a = CMat::from_columns(len, &basis.iter().map(CMat::to_vec).collect::<Vec<_>>());
    let b = CMat::from_columns(len, &targets.iter().map(CMat::to_vec).collect::<Vec<_>>());
    Ok(lstsq(&a, &b, tol)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn dual_of_complex_line() {
        let d = dual_module(&HilbertModule::<f64>::hilbert_space(1), &tol()).unwrap();
        assert_eq!(d.module.dim(), 1);
        assert_eq!(d.iso.source().blocks(), &[1]);
        assert!(d.validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn dual_of_rows_is_columns() {
        let d = dual_module(&HilbertModule::<f64>::row_module(2), &tol()).unwrap();
        assert_eq!(d.iso.source().blocks(), &[1]);
        assert_eq!(d.module.dim(), 2);
        let r = d.validate(&tol()).unwrap();
        assert!(r.is_valid(), "{r:?}");
        assert!(r.alpha_residual < 1e-10);
    }

    #[test]
    fn dual_of_m2_over_itself() {
        let e = HilbertModule::<f64>::over_itself(&MatrixStarAlgebra::full(2));
        let d = dual_module(&e, &tol()).unwrap();
        assert_eq!(d.iso.source().blocks(), &[2]);
        assert_eq!(d.module.dim(), 4);
        assert!(d.validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn non_full_module_has_no_dual() {
        let e = HilbertModule::<f64>::standard(&MatrixStarAlgebra::diagonal(2), &[1, 0], None).unwrap();
        assert!(matches!(dual_module(&e, &tol()), Err(Error::NotFull)));
    }
}
