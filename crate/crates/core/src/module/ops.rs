use crate::algebra::{AlgElem, MatrixStarAlgebra};
use crate::induction::InducedSpace;
use crate::linalg::{column_space, lstsq, op_norm, CMat, Tolerance};
use crate::module::HilbertModule;
use crate::rep::Representation;
use crate::scalar::{czero, Real, C};
use crate::{Error, Result};

/// A module map together with its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointableOp<T> {
    pub mat: CMat<T>,
    pub adjoint: CMat<T>,
}

impl<T: Real> AdjointableOp<T> {
    pub fn identity(d: usize) -> Self {
        Self { mat: CMat::identity(d), adjoint: CMat::identity(d) }
    }

    pub fn star(&self) -> Self {
        Self { mat: self.adjoint.clone(), adjoint: self.mat.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { mat: &self.mat * &other.mat, adjoint: &other.adjoint * &self.adjoint }
    }

    pub fn apply(&self, x: &[C<T>]) -> Vec<C<T>> {
        self.mat.mul_vec(x)
    }
}

/// `max_α ||T R^E_α − R^F_α T||`: failure of `T(ξa) = T(ξ)a`.
pub fn linearity_residual<T: Real>(e: &HilbertModule<T>, f: &HilbertModule<T>, t: &CMat<T>) -> T {
    (0..e.over().dim())
        .map(|a| (t * e.right_action(a)).dist_max(&(f.right_action(a) * t)))
        .fold(T::zero(), T::max)
}

/// `max_{s,t} ||⟨T e_s, f_t⟩_F − ⟨e_s, S f_t⟩_E||` for `T: E → F`, `S: F → E`.
pub fn adjoint_residual<T: Real>(e: &HilbertModule<T>, f: &HilbertModule<T>, t: &CMat<T>, s: &CMat<T>) -> T {
    let mut worst = T::zero();
    for i in 0..e.dim() {
        let te = t.column(i);
        let ei = unit_vec(e.dim(), i);
        for j in 0..f.dim() {
            let fj = unit_vec(f.dim(), j);
            let lhs = f.inner_coeffs(&te, &fj);
            let rhs = e.inner_coeffs(&ei, &s.column(j));
            let r = lhs.iter().zip(&rhs).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max);
            worst = worst.max(r);
        }
    }
    worst
}

/// The only candidate adjoint, `Q_E^{-1} T* Q_F`, from the trace inner products.
pub fn module_adjoint<T: Real>(e: &HilbertModule<T>, f: &HilbertModule<T>, t: &CMat<T>, tol: &Tolerance<T>) -> Result<CMat<T>> {
    let qe = e.trace_gram();
    let rhs = &t.adjoint() * &f.trace_gram();
    Ok(lstsq(&qe, &rhs, tol)?.0)
}

/// Checks that `T: E → F` is module-linear and solves for its adjoint.
pub fn adjoint_of<T: Real>(
    e: &HilbertModule<T>,
    f: &HilbertModule<T>,
    t: &CMat<T>,
    tol: &Tolerance<T>,
) -> Result<AdjointableOp<T>> {
    if e.over() != f.over() {
        return Err(Error::AlgebraMismatch);
    }
    if t.shape() != (f.dim(), e.dim()) {
        return Err(Error::ShapeMismatch(format!("operator is {}x{}, expected {}x{}", t.rows(), t.cols(), f.dim(), e.dim())));
    }
    let scale = t.norm_max() * e.scale().max(f.scale()).max(T::one());
    let lin = linearity_residual(e, f, t);
    if !tol.accepts(lin, scale) {
        return Err(Error::NotAdjointable(format!("not module-linear (residual {:e})", lin.to_f64_lossy())));
    }
    let s = module_adjoint(e, f, t, tol)?;
    let res = adjoint_residual(e, f, t, &s);
    if !tol.accepts(res, scale) {
        return Err(Error::NotAdjointable(format!("adjoint equations inconsistent (residual {:e})", res.to_f64_lossy())));
    }
    Ok(AdjointableOp { mat: t.clone(), adjoint: s })
}

/// `θ_{η,ξ}: ζ ↦ η⟨ξ, ζ⟩` from `E` to `F`, with adjoint `θ_{ξ,η}`.
pub fn rank_one<T: Real>(
    f: &HilbertModule<T>,
    eta: &[C<T>],
    e: &HilbertModule<T>,
    xi: &[C<T>],
) -> Result<AdjointableOp<T>> {
    if e.over() != f.over() {
        return Err(Error::AlgebraMismatch);
    }
    if eta.len() != f.dim() || xi.len() != e.dim() {
        return Err(Error::ShapeMismatch("rank-one operator vectors".into()));
    }
    Ok(AdjointableOp { mat: theta(f, eta, e, xi), adjoint: theta(e, xi, f, eta) })
}

fn theta<T: Real>(f: &HilbertModule<T>, eta: &[C<T>], e: &HilbertModule<T>, xi: &[C<T>]) -> CMat<T> {
    let cols: Vec<Vec<C<T>>> = (0..e.dim())
        .map(|t| f.action_of(&e.inner_coeffs(xi, &unit_vec(e.dim(), t))).mul_vec(eta))
        .collect();
    CMat::from_columns(f.dim(), &cols)
}

/// Residuals of `θ_{η,ξ}* = θ_{ξ,η}` and `θ_{η,ξ}∘θ_{ζ,μ} = θ_{η⟨ξ,ζ⟩,μ}` on `E`,
/// the adjoint taken with respect to the module inner product.
pub fn theta_residuals<T: Real>(
    e: &HilbertModule<T>,
    eta: &[C<T>],
    xi: &[C<T>],
    zeta: &[C<T>],
    mu: &[C<T>],
    tol: &Tolerance<T>,
) -> Result<(T, T)> {
    let t = rank_one(e, eta, e, xi)?;
    let star = module_adjoint(e, e, &t.mat, tol)?.dist_max(&rank_one(e, xi, e, eta)?.mat);
    let weighted = e.act(eta, &e.inner(xi, zeta)?)?;
    let comp = (&t.mat * &rank_one(e, zeta, e, mu)?.mat).dist_max(&rank_one(e, &weighted, e, mu)?.mat);
    Ok((star, comp))
}

/// Frobenius-orthonormal basis of `K_A(E, F) = span{θ_{f_u, e_s}}`, as `d_F × d_E` matrices.
pub fn compact_space<T: Real>(e: &HilbertModule<T>, f: &HilbertModule<T>, tol: &Tolerance<T>) -> Result<Vec<CMat<T>>> {
    if e.over() != f.over() {
        return Err(Error::AlgebraMismatch);
    }
    let (de, df) = (e.dim(), f.dim());
    if de == 0 || df == 0 {
        return Ok(Vec::new());
    }
    let mut cols = Vec::with_capacity(de * df);
    for u in 0..df {
        for s in 0..de {
            cols.push(theta(f, &unit_vec(df, u), e, &unit_vec(de, s)).to_vec());
        }
    }
    let span = column_space(&CMat::from_columns(de * df, &cols), tol)?;
    Ok((0..span.cols()).map(|j| CMat::col_vec(&span.column(j)).reshape(df, de)).collect())
}

/// Every block of the algebra receives a nonzero inner product.
pub fn is_full<T: Real>(e: &HilbertModule<T>, tol: &Tolerance<T>) -> bool {
    let alg = e.over();
    let cut = tol.threshold(e.scale());
    (0..alg.num_blocks()).all(|i| {
        let n = alg.blocks()[i];
        let o = alg.block_offset(i);
        (0..e.dim()).any(|s| {
            let g = e.gram_coeffs(s, s);
            (0..n).map(|a| g[o + a * n + a].re).fold(T::zero(), |x, y| x + y) > cut
        })
    })
}

/// `||T||` in `L_A(E)`, computed as the norm of the induced operator under
/// the identity representation of `A` (which is faithful).
pub fn operator_norm<T: Real>(e: &HilbertModule<T>, t: &CMat<T>, tol: &Tolerance<T>) -> Result<T> {
    if t.shape() != (e.dim(), e.dim()) {
        return Err(Error::ShapeMismatch("operator must be d × d".into()));
    }
    let space = InducedSpace::new(e, &Representation::identity(e.over()), tol)?;
    op_norm(&space.operator(t)?)
}

pub(crate) fn unit_vec<T: Real>(n: usize, i: usize) -> Vec<C<T>> {
    let mut v = vec![czero(); n];
    v[i] = C::new(T::one(), T::zero());
    v
}

/// A *-morphism `Φ: A → L_B(E)`, one operator per matrix unit of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleAction<T> {
    source: MatrixStarAlgebra,
    module: HilbertModule<T>,
    images: Vec<CMat<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionReport<T> {
    /// Every image is module-linear.
    pub linear_ok: bool,
    /// Every image has an adjoint.
    pub adjointable_ok: bool,
    pub mult_ok: bool,
    /// `Φ(a*) = Φ(a)*` with the module adjoint.
    pub star_ok: bool,
    /// `Φ(1) = id_E`.
    pub nondegenerate: bool,
    pub linear_residual: T,
    pub adjoint_residual: T,
    pub mult_residual: T,
    pub star_residual: T,
    pub unit_residual: T,
}

impl<T: Real> ActionReport<T> {
    pub fn is_valid(&self) -> bool {
        self.linear_ok && self.adjointable_ok && self.mult_ok && self.star_ok
    }

    pub fn max_residual(&self) -> T {
        self.linear_residual.max(self.adjoint_residual).max(self.mult_residual).max(self.star_residual)
    }
}

impl<T: Real> ModuleAction<T> {
    pub fn new(source: MatrixStarAlgebra, module: HilbertModule<T>, images: Vec<CMat<T>>) -> Result<Self> {
        let d = module.dim();
        if images.len() != source.dim() || images.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::ShapeMismatch("one d×d operator per source basis element".into()));
        }
        Ok(Self { source, module, images })
    }

    /// `A` acting on itself by left multiplication.
    pub fn left_regular(a: &MatrixStarAlgebra) -> Self {
        let images = (0..a.dim()).map(|k| a.left_mult(k)).collect();
        Self { source: a.clone(), module: HilbertModule::over_itself(a), images }
    }

    /// `ℂ` acting by scalars.
    pub fn scalars(module: &HilbertModule<T>) -> Self {
        Self {
            source: MatrixStarAlgebra::full(1),
            module: module.clone(),
            images: vec![CMat::identity(module.dim())],
        }
    }

    pub fn source(&self) -> &MatrixStarAlgebra {
        &self.source
    }

    pub fn module(&self) -> &HilbertModule<T> {
        &self.module
    }

    pub fn images(&self) -> &[CMat<T>] {
        &self.images
    }

    pub fn image(&self, k: usize) -> &CMat<T> {
        &self.images[k]
    }

    pub fn apply(&self, a: &AlgElem<T>) -> Result<CMat<T>> {
        if a.parent() != &self.source {
            return Err(Error::ParentMismatch);
        }
        Ok(self.apply_coeffs(&a.to_vec()))
    }

    pub fn apply_coeffs(&self, a: &[C<T>]) -> CMat<T> {
        let d = self.module.dim();
        let mut m = CMat::zeros(d, d);
        for (img, &c) in self.images.iter().zip(a) {
            if c != czero() {
                m.axpy(c, img);
            }
        }
        m
    }

    /// `Φ ∘ π` for a linear map `π` given by its action matrix on coefficients.
    pub fn pullback(&self, source: &MatrixStarAlgebra, action: &CMat<T>) -> Result<Self> {
        if action.shape() != (self.source.dim(), source.dim()) {
            return Err(Error::ShapeMismatch("pullback map shape".into()));
        }
        let images = (0..source.dim()).map(|k| self.apply_coeffs(&action.column(k))).collect();
        Self::new(source.clone(), self.module.clone(), images)
    }

    /// The same action transported along a module map `u: E → F` with
    /// adjoint `u_adj`: `a ↦ u Φ(a) u_adj`.
    pub fn transport(&self, target: &HilbertModule<T>, u: &CMat<T>, u_adj: &CMat<T>) -> Result<Self> {
        if u.shape() != (target.dim(), self.module.dim()) || u_adj.shape() != (self.module.dim(), target.dim()) {
            return Err(Error::ShapeMismatch("transport map shape".into()));
        }
        let images = self.images.iter().map(|m| &(u * m) * u_adj).collect();
        Self::new(self.source.clone(), target.clone(), images)
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> Result<ActionReport<T>> {
        let e = &self.module;
        let alg = &self.source;
        let d = e.dim();
        let scale = self.images.iter().map(CMat::norm_max).fold(T::zero(), T::max);
        let mscale = scale * e.scale().max(T::one());

        let linear_residual =
            self.images.iter().map(|m| linearity_residual(e, e, m)).fold(T::zero(), T::max);
        let adjoints: Vec<CMat<T>> =
            self.images.iter().map(|m| module_adjoint(e, e, m, tol)).collect::<Result<_>>()?;
        let adjoint_residual = self
            .images
            .iter()
            .zip(&adjoints)
            .map(|(m, s)| adjoint_residual(e, e, m, s))
            .fold(T::zero(), T::max);

        let zero = CMat::zeros(d, d);
        let mut mult_residual = T::zero();
        for k in 0..alg.dim() {
            for l in 0..alg.dim() {
                let lhs = alg.product_index(k, l).map_or(&zero, |p| &self.images[p]);
                mult_residual = mult_residual.max(lhs.dist_max(&(&self.images[k] * &self.images[l])));
            }
        }
        let star_residual = (0..alg.dim())
            .map(|k| self.images[alg.star_index(k)].dist_max(&adjoints[k]))
            .fold(T::zero(), T::max);
        let unit_residual = self.apply_coeffs(&alg.unit::<T>().to_vec()).dist_max(&CMat::identity(d));

        Ok(ActionReport {
            linear_ok: tol.accepts(linear_residual, mscale),
            adjointable_ok: tol.accepts(adjoint_residual, mscale),
            mult_ok: tol.accepts(mult_residual, scale * scale),
            star_ok: tol.accepts(star_residual, scale),
            nondegenerate: tol.accepts(unit_residual, T::one()),
            linear_residual,
            adjoint_residual,
            mult_residual,
            star_residual,
            unit_residual,
        })
    }

    /// Errors unless the action is a nondegenerate *-morphism into `L_B(E)`.
    pub fn require_nondegenerate(&self, tol: &Tolerance<T>) -> Result<ActionReport<T>> {
        let r = self.validate(tol)?;
        if !r.is_valid() {
            return Err(Error::InvalidMorphism(format!(
                "module action residual {:e}",
                r.max_residual().to_f64_lossy()
            )));
        }
        if !r.nondegenerate {
            return Err(Error::DegenerateMorphism(r.unit_residual.to_f64_lossy()));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn identity_is_self_adjoint() {
        let e = HilbertModule::<f64>::over_itself(&MatrixStarAlgebra::new(vec![1, 2]).unwrap());
        let op = adjoint_of(&e, &e, &CMat::identity(5), &tol()).unwrap();
        assert!(op.adjoint.dist_max(&CMat::identity(5)) < 1e-12);
    }

    #[test]
    fn scalar_multiple_has_conjugate_adjoint() {
        let e = HilbertModule::<f64>::row_module(2);
        let z = c(2.0, 3.0);
        let op = adjoint_of(&e, &e, &CMat::identity(2).scale(z), &tol()).unwrap();
        assert!(op.adjoint.dist_max(&CMat::identity(2).scale(z.conj())) < 1e-12);
    }

    #[test]
    fn swap_on_c2_is_not_linear() {
        let e = HilbertModule::<f64>::over_itself(&MatrixStarAlgebra::diagonal(2));
        let swap = CMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(adjoint_of(&e, &e, &swap, &tol()), Err(Error::NotAdjointable(_))));
    }

    #[test]
    fn rank_one_examples() {
        let e = HilbertModule::<f64>::hilbert_space(1);
        let t = rank_one(&e, &[cr(1.0)], &e, &[cr(1.0)]).unwrap();
        assert_eq!(t.mat, CMat::identity(1));

        let h = HilbertModule::<f64>::hilbert_space(2);
        let (eta, xi) = (vec![cr(1.0), c(0.0, 2.0)], vec![c(1.0, 1.0), cr(3.0)]);
        let t = rank_one(&h, &eta, &h, &xi).unwrap();
        let outer = &CMat::col_vec(&eta) * &CMat::col_vec(&xi).adjoint();
        assert!(t.mat.dist_max(&outer) < 1e-12);

        // on rows over M_2, θ_{η,ξ} is the scalar ηξ*
        let r = HilbertModule::<f64>::row_module(2);
        let t = rank_one(&r, &eta, &r, &xi).unwrap();
        let s = eta[0] * xi[0].conj() + eta[1] * xi[1].conj();
        assert!(t.mat.dist_max(&CMat::identity(2).scale(s)) < 1e-12);
    }

    #[test]
    fn compact_space_dimensions() {
        let cases = [
            (HilbertModule::<f64>::hilbert_space(1), 1),
            (HilbertModule::row_module(2), 1),
            (HilbertModule::over_itself(&MatrixStarAlgebra::full(2)), 4),
            (HilbertModule::hilbert_space(2), 4),
        ];
        for (e, dim) in cases {
            assert_eq!(compact_space(&e, &e, &tol()).unwrap().len(), dim);
        }
    }

    #[test]
    fn fullness() {
        assert!(is_full(&HilbertModule::<f64>::over_itself(&MatrixStarAlgebra::diagonal(2)), &tol()));
        assert!(is_full(&HilbertModule::<f64>::row_module(2), &tol()));
        let half = HilbertModule::<f64>::standard(&MatrixStarAlgebra::diagonal(2), &[1, 0], None).unwrap();
        assert!(!is_full(&half, &tol()));
    }

    #[test]
    fn operator_norms() {
        let e = HilbertModule::<f64>::over_itself(&MatrixStarAlgebra::diagonal(2));
        assert!((operator_norm(&e, &CMat::identity(2), &tol()).unwrap() - 1.0).abs() < 1e-12);
        assert!((operator_norm(&e, &CMat::identity(2).scale_real(2.0), &tol()).unwrap() - 2.0).abs() < 1e-12);
        let t = CMat::diag_real(&[1.0, 3.0]);
        assert!((operator_norm(&e, &t, &tol()).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn left_regular_action_is_valid() {
        let a = MatrixStarAlgebra::new(vec![1, 2]).unwrap();
        let r = ModuleAction::<f64>::left_regular(&a).validate(&tol()).unwrap();
        assert!(r.is_valid() && r.nondegenerate, "{r:?}");
    }
}
