//! Rieffel induction: from a Hilbert `B`-module `E`, a nondegenerate action
//! `Φ: A → L_B(E)` and a representation `φ` of `B`, build the representation
//! of `A` on the completion of `E ⊗ H` under `⟨ξ⊗h, η⊗k⟩ = ⟨h, φ(⟨ξ,η⟩)k⟩`.

use crate::linalg::{lstsq, psd_support, CMat, Tolerance};
use crate::module::{adjoint_of, inner_tensor, AdjointableOp, HilbertModule, ModuleAction, ModuleTower};
use crate::rep::{direct_sum, unitarily_equivalent, EquivalenceVerdict, Representation, WitnessRequest};
use crate::scalar::{Real, C};
use crate::tower::AlgebraTower;
use crate::{Error, Result};

/// The quotient of `E ⊗ H` by the null space of the induced form.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedSpace<T> {
    hdim: usize,
    /// `G[(s,u),(t,v)] = φ(⟨e_s, e_t⟩)[u,v]`, indexed `s·hdim + u`.
    pub gram: CMat<T>,
    /// Orthonormal eigenvectors spanning the complement of the null space.
    pub basis: CMat<T>,
    /// Matching eigenvalues, largest first.
    pub weights: Vec<T>,
    pub min_eigenvalue: T,
    /// `basis · diag(weights)^{-1/2}`: an orthonormal basis of the induced space.
    p: CMat<T>,
    /// `p* G`, the coordinates map from `E ⊗ H`.
    coords: CMat<T>,
}

impl<T: Real> InducedSpace<T> {
    pub fn new(e: &HilbertModule<T>, phi: &Representation<T>, tol: &Tolerance<T>) -> Result<Self> {
        if phi.algebra() != e.over() {
            return Err(Error::AlgebraMismatch);
        }
        let (d, h) = (e.dim(), phi.hdim());
        let n = d * h;
        let mut gram = CMat::zeros(n, n);
        for s in 0..d {
            for t in 0..d {
                let img = phi.evaluate(&e.gram_entry(s, t))?;
                gram.set_submatrix(s * h, t * h, &img);
            }
        }
        let (basis, weights, min_eigenvalue) = if n == 0 {
            (CMat::zeros(0, 0), Vec::new(), T::zero())
        } else {
            let sup = psd_support(&gram.hermitian_part(), tol)?;
            (sup.basis.clone(), sup.weights.clone(), sup.min_eigenvalue)
        };
        let inv: Vec<T> = weights.iter().map(|w| T::one() / w.sqrt()).collect();
        let p = &basis * &CMat::diag_real(&inv);
        let coords = &p.adjoint() * &gram;
        Ok(Self { hdim: h, gram, basis, weights, min_eigenvalue, p, coords })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `T ⊗ I` on the quotient: `P* G (T ⊗ I) P`.
    pub fn operator(&self, t: &CMat<T>) -> Result<CMat<T>> {
        if t.rows() * self.hdim != self.gram.rows() || !t.is_square() {
            return Err(Error::ShapeMismatch("operator does not act on the module".into()));
        }
        let lifted = t.kron(&CMat::identity(self.hdim));
        Ok(&(&self.coords * &lifted) * &self.p)
    }

    /// Coordinates of the class of `ξ ⊗ h`.
    pub fn lift(&self, xi: &[C<T>], h: &[C<T>]) -> Vec<C<T>> {
        self.coords.mul_vec(&CMat::col_vec(xi).kron(&CMat::col_vec(h)).to_vec())
    }

    /// `||G P P* G − G||_max`: failure of the defining inner-product identity on simple tensors.
    pub fn identity_residual(&self) -> T {
        (&self.coords.adjoint() * &self.coords).dist_max(&self.gram)
    }
}

/// `Φ: A → L_B(E)` together with a representation of `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct InductionContext<T> {
    pub action: ModuleAction<T>,
    pub rep: Representation<T>,
}

impl<T: Real> InductionContext<T> {
    /// Checks that both `Φ` and `φ` are nondegenerate *-morphisms.
    pub fn new(action: ModuleAction<T>, rep: Representation<T>, tol: &Tolerance<T>) -> Result<Self> {
        if rep.algebra() != action.module().over() {
            return Err(Error::AlgebraMismatch);
        }
        match action.require_nondegenerate(tol) {
            Err(Error::DegenerateMorphism(r)) => {
                return Err(Error::DegenerateContext(format!("action is degenerate (unit residual {r:e})")))
            }
            other => {
                other?;
            }
        }
        let r = rep.validate(tol);
        if !r.is_valid() {
            return Err(Error::InvalidRep(format!("residual {:e}", r.max_residual().to_f64_lossy())));
        }
        if !r.nondegenerate {
            return Err(Error::DegenerateContext(format!(
                "representation is degenerate (unit residual {:e})",
                r.unit_residual.to_f64_lossy()
            )));
        }
        Ok(Self { action, rep })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InducedRep<T> {
    pub space: InducedSpace<T>,
    pub rep: Representation<T>,
}

impl<T: Real> InducedRep<T> {
    /// `max ||lift(ξb ⊗ h) − lift(ξ ⊗ φ(b)h)||` over basis `ξ`, `h`, `b`.
    pub fn balance_residual(&self, ctx: &InductionContext<T>) -> Result<T> {
        let e = ctx.action.module();
        let mut worst = T::zero();
        for b in 0..e.over().dim() {
            let lhs = self.space.operator(e.right_action(b))?;
            let rhs = &self.space.coords * &CMat::identity(e.dim()).kron(ctx.rep.image(b));
            let rhs = &rhs * &self.space.p;
            worst = worst.max(lhs.dist_max(&rhs));
        }
        Ok(worst)
    }
}

pub fn induce<T: Real>(ctx: &InductionContext<T>, tol: &Tolerance<T>) -> Result<InducedRep<T>> {
    let space = InducedSpace::new(ctx.action.module(), &ctx.rep, tol)?;
    let images = ctx.action.images().iter().map(|m| space.operator(m)).collect::<Result<Vec<_>>>()?;
    let rep = Representation::new(ctx.action.source().clone(), space.dim(), images)?;
    Ok(InducedRep { space, rep })
}

pub fn induced_operator<T: Real>(ind: &InducedRep<T>, t: &AdjointableOp<T>) -> Result<CMat<T>> {
    ind.space.operator(&t.mat)
}

/// Shorthand for inducing `rep` through `action`.
pub fn induce_rep<T: Real>(action: &ModuleAction<T>, rep: &Representation<T>, tol: &Tolerance<T>) -> Result<Representation<T>> {
    Ok(induce(&InductionContext::new(action.clone(), rep.clone(), tol)?, tol)?.rep)
}

/// Equivalent inputs induce equivalent representations.
pub fn check_remark33_reps<T: Real>(
    action: &ModuleAction<T>,
    phi1: &Representation<T>,
    phi2: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<EquivalenceVerdict<T>> {
    let a = induce_rep(action, phi1, tol)?;
    let b = induce_rep(action, phi2, tol)?;
    unitarily_equivalent(&a, &b, tol, req)
}

/// Transporting the action along a module unitary `u: E → F` gives an
/// equivalent induced representation.
pub fn check_remark33_unitary<T: Real>(
    action: &ModuleAction<T>,
    f: &HilbertModule<T>,
    u: &CMat<T>,
    phi: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<EquivalenceVerdict<T>> {
    let e = action.module();
    let op = adjoint_of(e, f, u, tol)?;
    let ue = (&op.adjoint * &op.mat).dist_max(&CMat::identity(e.dim()));
    let uf = (&op.mat * &op.adjoint).dist_max(&CMat::identity(f.dim()));
    if !tol.accepts(ue.max(uf), T::one()) {
        return Err(Error::InvalidMorphism(format!("not a module unitary (residual {:e})", ue.max(uf).to_f64_lossy())));
    }
    let moved = action.transport(f, &op.mat, &op.adjoint)?;
    let a = induce_rep(action, phi, tol)?;
    let b = induce_rep(&moved, phi, tol)?;
    unitarily_equivalent(&a, &b, tol, req)
}

/// Induction commutes with direct sums.
pub fn check_direct_sum<T: Real>(
    action: &ModuleAction<T>,
    summands: &[Representation<T>],
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<EquivalenceVerdict<T>> {
    let whole = induce_rep(action, &direct_sum(summands)?, tol)?;
    let parts = summands.iter().map(|r| induce_rep(action, r, tol)).collect::<Result<Vec<_>>>()?;
    unitarily_equivalent(&whole, &direct_sum(&parts)?, tol, req)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StagesReport<T> {
    /// Induced over `E ⊗_{Φ₂} F`.
    pub left: Representation<T>,
    /// Induced over `F`, then over `E`.
    pub right: Representation<T>,
    pub tensor_dim: usize,
    pub verdict: EquivalenceVerdict<T>,
}

/// Induction in stages for `Φ₁: A → L_B(E)`, `Φ₂: B → L_C(F)` and `φ` of `C`.
pub fn check_stages<T: Real>(
    phi1: &ModuleAction<T>,
    phi2: &ModuleAction<T>,
    rep: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<StagesReport<T>> {
    let g = inner_tensor(phi1.module(), phi2, tol)?;
    let left = induce_rep(&g.push_action(phi1)?, rep, tol)?;
    let middle = induce_rep(phi2, rep, tol)?;
    let right = induce_rep(phi1, &middle, tol)?;
    let verdict = unitarily_equivalent(&left, &right, tol, req)?;
    Ok(StagesReport { left, right, tensor_dim: g.module.dim(), verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prop34Report<T> {
    /// Lowest node of the `A`-tower through which the action on `E_q` factors.
    pub found_p: String,
    pub factorization_residual: T,
    /// Induced from `φ_q ∘ π_q` over the top module, as a representation of the top algebra.
    pub limit: Representation<T>,
    /// Induced at node level and pulled back to the top algebra.
    pub node: Representation<T>,
    pub verdict: EquivalenceVerdict<T>,
}

/// Compares induction at the limit with induction through a factorization
/// node, for a representation of `B` given at node `q`.
pub fn check_prop34<T: Real>(
    atower: &AlgebraTower<T>,
    etower: &ModuleTower<T>,
    action: &ModuleAction<T>,
    q: &str,
    rep_q: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<Prop34Report<T>> {
    let btower = etower.base();
    let atop = atower.top()?;
    let btop = btower.top()?;
    if action.source() != atower.algebra(atop) || action.module() != etower.module(btop) {
        return Err(Error::AlgebraMismatch);
    }
    let lifted = btower.lift_representation(q, rep_q.clone(), tol)?;
    let limit = induce_rep(action, &lifted.at_top(btower)?, tol)?;

    let qi = btower.poset().index(q)?;
    let eq = etower.module(qi);
    let pushed: Vec<CMat<T>> =
        action.images().iter().map(|m| etower.push_operator(m, qi, tol)).collect::<Result<_>>()?;
    let dq = eq.dim();
    let target = CMat::from_columns(dq * dq, &pushed.iter().map(CMat::to_vec).collect::<Vec<_>>());

    for p in atower.poset().bottom_up() {
        let pi = atower.projection(p)?;
        let (xt, res) = lstsq(&pi.action().transpose(), &target.transpose(), tol)?;
        if !tol.accepts(res, target.norm_max()) {
            continue;
        }
        let x = xt.transpose();
        let ap = atower.algebra(p);
        let images = (0..ap.dim()).map(|k| CMat::col_vec(&x.column(k)).reshape(dq, dq)).collect();
        let node_action = ModuleAction::new(ap.clone(), eq.clone(), images)?;
        let node = induce_rep(&node_action, rep_q, tol)?.pullback(atower.algebra(atop), pi.action())?;
        let verdict = unitarily_equivalent(&limit, &node, tol, req)?;
        return Ok(Prop34Report {
            found_p: atower.poset().name(p).to_string(),
            factorization_residual: res,
            limit,
            node,
            verdict,
        });
    }
    Err(Error::NoFactorizationNode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixStarAlgebra;
    use crate::scalar::cr;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn scalars_induce_identity() {
        let e = HilbertModule::<f64>::hilbert_space(1);
        let ctx = InductionContext::new(ModuleAction::scalars(&e), Representation::identity(e.over()), &tol()).unwrap();
        let ind = induce(&ctx, &tol()).unwrap();
        assert_eq!(ind.rep.hdim(), 1);
        assert!(ind.rep.image(0).dist_max(&CMat::identity(1)) < 1e-12);
    }

    #[test]
    fn c2_first_coordinate() {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let phi = Representation::new(c2.clone(), 1, vec![CMat::identity(1), CMat::zeros(1, 1)]).unwrap();
        let ctx = InductionContext::new(ModuleAction::left_regular(&c2), phi, &tol()).unwrap();
        let ind = induce(&ctx, &tol()).unwrap();
        assert!(ind.space.gram.dist_max(&CMat::diag_real(&[1.0, 0.0])) < 1e-15);
        assert_eq!(ind.rep.hdim(), 1);
        assert_eq!(ind.rep.image(0)[(0, 0)], cr(1.0));
        assert_eq!(ind.rep.image(1)[(0, 0)], cr(0.0));
        let t = AdjointableOp { mat: CMat::diag_real(&[0.0, 1.0]), adjoint: CMat::diag_real(&[0.0, 1.0]) };
        assert!(induced_operator(&ind, &t).unwrap().norm_max() < 1e-15);
        let two = AdjointableOp { mat: CMat::identity(2).scale_real(2.0), adjoint: CMat::identity(2).scale_real(2.0) };
        assert!(induced_operator(&ind, &two).unwrap().dist_max(&CMat::identity(1).scale_real(2.0)) < 1e-12);
        assert!(ind.balance_residual(&ctx).unwrap() < 1e-12);
        assert!(ind.space.identity_residual() < 1e-12);
    }

    #[test]
    fn compacts_on_rows() {
        // ℂ acting on ℂ^{1×2} by scalars, φ = id of M_2
        let e = HilbertModule::<f64>::row_module(2);
        let ctx = InductionContext::new(ModuleAction::scalars(&e), Representation::identity(e.over()), &tol()).unwrap();
        let ind = induce(&ctx, &tol()).unwrap();
        assert_eq!(ind.space.dim(), 1);
        assert!((ind.space.weights[0] - 2.0).abs() < 1e-12);
        assert!(ind.rep.image(0).dist_max(&CMat::identity(1)) < 1e-12);
    }

    #[test]
    fn degenerate_rep_is_rejected() {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let phi = Representation::new(c2.clone(), 2, vec![CMat::diag_real(&[1.0, 0.0]), CMat::zeros(2, 2)]).unwrap();
        let r = InductionContext::new(ModuleAction::left_regular(&c2), phi, &tol());
        assert!(matches!(r, Err(Error::DegenerateContext(_))));
    }

    #[test]
    fn direct_sum_of_coordinates_is_regular() {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let p1 = Representation::new(c2.clone(), 1, vec![CMat::identity(1), CMat::zeros(1, 1)]).unwrap();
        let p2 = Representation::new(c2.clone(), 1, vec![CMat::zeros(1, 1), CMat::identity(1)]).unwrap();
        let action = ModuleAction::left_regular(&c2);
        let v = check_direct_sum(&action, &[p1.clone(), p2.clone()], &tol(), WitnessRequest::default()).unwrap();
        assert!(v.equivalent);
        let whole = induce_rep(&action, &direct_sum(&[p1, p2]).unwrap(), &tol()).unwrap();
        assert!(unitarily_equivalent(&whole, &Representation::identity(&c2), &tol(), WitnessRequest::default())
            .unwrap()
            .equivalent);
    }

    #[test]
    fn stages_with_rows_and_columns() {
        let m2 = MatrixStarAlgebra::full(2);
        let e = HilbertModule::<f64>::row_module(2);
        let f = HilbertModule::hilbert_space(2);
        let phi2 = ModuleAction::new(m2.clone(), f, (0..4).map(|k| m2.identity_image(k)).collect()).unwrap();
        let phi1 = ModuleAction::scalars(&e);
        let c = MatrixStarAlgebra::full(1);
        let r = check_stages(&phi1, &phi2, &Representation::identity(&c), &tol(), WitnessRequest::default()).unwrap();
        assert!(r.verdict.equivalent);
        assert_eq!(r.left.hdim(), 1);
        assert_eq!(r.right.hdim(), 1);
    }
}
