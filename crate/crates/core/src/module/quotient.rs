use std::collections::BTreeMap;

use crate::algebra::StarMorphism;
use crate::linalg::{lstsq, psd_support, CMat, Tolerance};
use crate::module::{operator_norm, validate_module, HilbertModule};
use crate::scalar::{cr, Real, C};
use crate::tower::AlgebraTower;
use crate::{Error, Result};

/// `E / {ξ : π(⟨ξ, ξ⟩) = 0}` as a module over the target of `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quotient<T> {
    pub module: HilbertModule<T>,
    /// The quotient map in coordinates, `r × d`.
    pub sigma: CMat<T>,
    /// Orthonormal complement of the kernel, `d × r`; `sigma = lift*`.
    pub lift: CMat<T>,
}

pub fn quotient_module<T: Real>(e: &HilbertModule<T>, pi: &StarMorphism<T>, tol: &Tolerance<T>) -> Result<Quotient<T>> {
    if pi.source() != e.over() {
        return Err(Error::AlgebraMismatch);
    }
    let target = pi.target();
    let d = e.dim();
    let diag = target.diagonal_units();
    let pushed: Vec<Vec<C<T>>> =
        (0..d * d).map(|st| pi.action().mul_vec(e.gram_coeffs(st / d, st % d))).collect();
    let q = CMat::from_fn(d, d, |s, t| diag.iter().fold(cr(T::zero()), |acc, &k| acc + pushed[s * d + t][k]));
    let w = if d == 0 { CMat::zeros(0, 0) } else { psd_support(&q.hermitian_part(), tol)?.basis };
    let r = w.cols();

    // preimages of the target matrix units
    let (pre, res) = lstsq(pi.action(), &CMat::identity(target.dim()), tol)?;
    if !tol.accepts(res, T::one()) {
        return Err(Error::InvalidMorphism("quotient map is not surjective".into()));
    }
    let wa = w.adjoint();
    let action = (0..target.dim()).map(|b| &(&wa * &e.action_of(&pre.column(b))) * &w).collect();
    let cols: Vec<Vec<C<T>>> = (0..r).map(|j| w.column(j)).collect();
    let module = HilbertModule::from_parts(target.clone(), r, action, |j, k| {
        pi.action().mul_vec(&e.inner_coeffs(&cols[j], &cols[k]))
    })?;
    Ok(Quotient { module, sigma: wa, lift: w })
}

/// One module per node of an algebra tower with connecting maps `σ_pq`.
#[derive(Clone, Debug)]
pub struct ModuleTower<T> {
    base: AlgebraTower<T>,
    modules: Vec<HilbertModule<T>>,
    connecting: BTreeMap<(usize, usize), CMat<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleTowerReport<T> {
    pub modules_ok: bool,
    /// `σ_pq(ξa) = σ_pq(ξ) π_pq(a)`.
    pub action_residual: T,
    /// `⟨σ_pq ξ, σ_pq η⟩ = π_pq(⟨ξ, η⟩)`.
    pub inner_residual: T,
    /// `σ_qr ∘ σ_pq = σ_pr`.
    pub composition_residual: T,
    pub coherent: bool,
}

impl<T: Real> ModuleTowerReport<T> {
    pub fn is_valid(&self) -> bool {
        self.modules_ok && self.coherent
    }
}

/// A node module with the map from top-node coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Localized<T> {
    pub node: String,
    pub module: HilbertModule<T>,
    pub sigma: CMat<T>,
}

impl<T: Real> ModuleTower<T> {
    pub fn new(
        base: AlgebraTower<T>,
        modules: BTreeMap<String, HilbertModule<T>>,
        connecting: BTreeMap<(String, String), CMat<T>>,
    ) -> Result<Self> {
        let poset = base.poset();
        let mods = poset
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let m = modules.get(n).cloned().ok_or_else(|| Error::UnknownNode(n.clone()))?;
                if m.over() != base.algebra(i) {
                    return Err(Error::AlgebraMismatch);
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut conn = BTreeMap::new();
        for ((p, q), s) in connecting {
            let (pi, qi) = (poset.index(&p)?, poset.index(&q)?);
            if pi == qi || !poset.geq(pi, qi) {
                return Err(Error::MalformedPoset(format!("module map {p} → {q} but not {p} > {q}")));
            }
            if s.shape() != (mods[qi].dim(), mods[pi].dim()) {
                return Err(Error::ShapeMismatch(format!("module map {p} → {q}")));
            }
            conn.insert((pi, qi), s);
        }
        for (p, q) in poset.strict_pairs() {
            if !conn.contains_key(&(p, q)) {
                return Err(Error::MalformedPoset(format!(
                    "missing module map {} → {}",
                    poset.name(p),
                    poset.name(q)
                )));
            }
        }
        Ok(Self { base, modules: mods, connecting: conn })
    }

    /// Localizes a module over the top algebra at every node.
    pub fn from_top(base: AlgebraTower<T>, top_module: HilbertModule<T>, tol: &Tolerance<T>) -> Result<Self> {
        let top = base.top()?;
        if top_module.over() != base.algebra(top) {
            return Err(Error::AlgebraMismatch);
        }
        let n = base.poset().len();
        let d = top_module.dim();
        let quotients = (0..n)
            .map(|p| {
                if p == top {
                    let id = CMat::identity(d);
                    return Ok(Quotient { module: top_module.clone(), sigma: id.clone(), lift: id });
                }
                quotient_module(&top_module, &base.projection(p)?, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut connecting = BTreeMap::new();
        for (p, q) in base.poset().strict_pairs() {
            connecting.insert((p, q), &quotients[q].sigma * &quotients[p].lift);
        }
        let modules = quotients.into_iter().map(|q| q.module).collect();
        Ok(Self { base, modules, connecting })
    }

    pub fn base(&self) -> &AlgebraTower<T> {
        &self.base
    }

    pub fn module(&self, p: usize) -> &HilbertModule<T> {
        &self.modules[p]
    }

    pub fn module_at(&self, name: &str) -> Result<&HilbertModule<T>> {
        Ok(&self.modules[self.base.poset().index(name)?])
    }

    /// `σ_pq`; the identity when `p == q`.
    pub fn connecting(&self, p: usize, q: usize) -> Result<CMat<T>> {
        if p == q {
            return Ok(CMat::identity(self.modules[p].dim()));
        }
        self.connecting.get(&(p, q)).cloned().ok_or_else(|| {
            let poset = self.base.poset();
            Error::MalformedPoset(format!("{} is not above {}", poset.name(p), poset.name(q)))
        })
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> Result<ModuleTowerReport<T>> {
        let mut modules_ok = true;
        for m in &self.modules {
            modules_ok &= validate_module(m, tol)?.is_valid();
        }
        let poset = self.base.poset();
        let (mut action_residual, mut inner_residual, mut composition_residual) = (T::zero(), T::zero(), T::zero());
        let mut scale = T::one();
        for (&(p, q), s) in &self.connecting {
            let (ep, eq) = (&self.modules[p], &self.modules[q]);
            let pi = self.base.connecting(p, q)?;
            scale = scale.max(s.norm_max()).max(ep.scale()).max(eq.scale());
            for a in 0..ep.over().dim() {
                let lhs = s * ep.right_action(a);
                let rhs = &eq.action_of(&pi.action().column(a)) * s;
                action_residual = action_residual.max(lhs.dist_max(&rhs));
            }
            let cols: Vec<Vec<C<T>>> = (0..ep.dim()).map(|j| s.column(j)).collect();
            for i in 0..ep.dim() {
                for j in 0..ep.dim() {
                    let lhs = eq.inner_coeffs(&cols[i], &cols[j]);
                    let rhs = pi.action().mul_vec(ep.gram_coeffs(i, j));
                    let r = lhs.iter().zip(&rhs).map(|(x, y)| (*x - *y).norm()).fold(T::zero(), T::max);
                    inner_residual = inner_residual.max(r);
                }
            }
            for r in 0..poset.len() {
                if r != q && poset.geq(q, r) {
                    let composed = &self.connecting(q, r)? * s;
                    composition_residual = composition_residual.max(composed.dist_max(&self.connecting(p, r)?));
                }
            }
        }
        let worst = action_residual.max(inner_residual).max(composition_residual);
        Ok(ModuleTowerReport {
            modules_ok,
            action_residual,
            inner_residual,
            composition_residual,
            coherent: tol.accepts(worst, scale * scale),
        })
    }

    pub fn localize(&self, p: &str) -> Result<Localized<T>> {
        let idx = self.base.poset().index(p)?;
        let top = self.base.top()?;
        Ok(Localized { node: p.to_string(), module: self.modules[idx].clone(), sigma: self.connecting(top, idx)? })
    }

    /// Coherent family `(σ_p ξ)_p` of a top-node element.
    pub fn limit_from_top(&self, x: &[C<T>]) -> Result<Vec<Vec<C<T>>>> {
        let top = self.base.top()?;
        (0..self.modules.len()).map(|p| Ok(self.connecting(top, p)?.mul_vec(x))).collect()
    }

    /// `(π_p)_*(T)`: the operator induced on `E_p` by a top-node operator.
    pub fn push_operator(&self, t: &CMat<T>, p: usize, tol: &Tolerance<T>) -> Result<CMat<T>> {
        let top = self.base.top()?;
        let sigma = self.connecting(top, p)?;
        if t.shape() != (sigma.cols(), sigma.cols()) {
            return Err(Error::ShapeMismatch("operator on the top module".into()));
        }
        let (right_inv, _) = lstsq(&sigma, &CMat::identity(sigma.rows()), tol)?;
        Ok(&(&sigma * t) * &right_inv)
    }
}

pub fn localize_module<T: Real>(tower: &ModuleTower<T>, p: &str) -> Result<Localized<T>> {
    tower.localize(p)
}

/// `p̃(T) = ||(π_p)_*(T)||` on `E_p`.
pub fn operator_seminorm<T: Real>(tower: &ModuleTower<T>, t: &CMat<T>, p: &str, tol: &Tolerance<T>) -> Result<T> {
    let idx = tower.base().poset().index(p)?;
    let tp = tower.push_operator(t, idx, tol)?;
    operator_norm(tower.module(idx), &tp, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixStarAlgebra;
    use crate::scalar::cr;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn c2_tower(keep: usize) -> AlgebraTower<f64> {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let c1 = MatrixStarAlgebra::diagonal(1);
        AlgebraTower::two_node("p", "q", StarMorphism::block_projection(&c2, &c1, &[keep]).unwrap()).unwrap()
    }

    #[test]
    fn single_node_localization_is_identity() {
        let a = MatrixStarAlgebra::full(2);
        let t = ModuleTower::from_top(AlgebraTower::single("p", a.clone()), HilbertModule::row_module(2), &tol()).unwrap();
        let loc = t.localize("p").unwrap();
        assert_eq!(loc.module.dim(), 2);
        assert!(loc.sigma.dist_max(&CMat::identity(2)) < 1e-12);
        assert!(t.validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn c2_localization_picks_first_coordinate() {
        let e = HilbertModule::over_itself(&MatrixStarAlgebra::diagonal(2));
        let t = ModuleTower::from_top(c2_tower(0), e, &tol()).unwrap();
        assert!(t.validate(&tol()).unwrap().is_valid());
        let loc = localize_module(&t, "q").unwrap();
        assert_eq!(loc.module.dim(), 1);
        let x = loc.sigma.mul_vec(&[cr(3.0), cr(5.0)]);
        assert!((x[0].norm() - 3.0).abs() < 1e-12);
        assert!(matches!(t.localize("r"), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn non_full_module_vanishes_at_second_block() {
        let e = HilbertModule::standard(&MatrixStarAlgebra::diagonal(2), &[1, 0], None).unwrap();
        let t = ModuleTower::from_top(c2_tower(1), e, &tol()).unwrap();
        assert_eq!(t.module_at("q").unwrap().dim(), 0);
        assert!(t.validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn seminorms_of_left_multiplication() {
        let e = HilbertModule::over_itself(&MatrixStarAlgebra::diagonal(2));
        let t = ModuleTower::from_top(c2_tower(0), e, &tol()).unwrap();
        let op = CMat::diag_real(&[1.0, 3.0]);
        assert!((operator_seminorm(&t, &op, "p", &tol()).unwrap() - 3.0).abs() < 1e-12);
        assert!((operator_seminorm(&t, &op, "q", &tol()).unwrap() - 1.0).abs() < 1e-12);
        let id = CMat::identity(2).scale_real(2.0);
        assert!((operator_seminorm(&t, &id, "q", &tol()).unwrap() - 2.0).abs() < 1e-12);
    }
}
