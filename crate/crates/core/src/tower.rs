//! Finite inverse systems `A = lim← A_p` indexed by a finite directed poset of
//! seminorm labels.
//!
//! A finite directed poset always has a greatest node; it is used to build
//! coherent tuples, but limit elements are still stored nodewise.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{check_morphism, AlgElem, MatrixStarAlgebra, StarMorphism};
use crate::linalg::Tolerance;
use crate::rep::Representation;
use crate::scalar::Real;
use crate::{Error, Result};

/// Nodes with a partial order `p ≥ q` and optional declared upper bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct SeminormPoset {
    nodes: Vec<String>,
    /// Strict and reflexive pairs `(p, q)` meaning `p ≥ q`, by index.
    geq: BTreeSet<(usize, usize)>,
    bounds: BTreeMap<(usize, usize), usize>,
}

impl SeminormPoset {
    /// `order` lists pairs `(p, q)` with `p ≥ q`; reflexive pairs are implied.
    pub fn new<S: AsRef<str>>(
        nodes: &[S],
        order: &[(S, S)],
        upper_bounds: &[(S, S, S)],
    ) -> Result<Self> {
        let nodes: Vec<String> = nodes.iter().map(|s| s.as_ref().to_string()).collect();
        let unique: BTreeSet<&String> = nodes.iter().collect();
        if unique.len() != nodes.len() {
            return Err(Error::MalformedPoset("duplicate node label".into()));
        }
        if nodes.is_empty() {
            return Err(Error::MalformedPoset("no nodes".into()));
        }
        let find = |s: &S| -> Result<usize> {
            nodes
                .iter()
                .position(|n| n == s.as_ref())
                .ok_or_else(|| Error::UnknownNode(s.as_ref().to_string()))
        };
        let mut geq: BTreeSet<(usize, usize)> = (0..nodes.len()).map(|i| (i, i)).collect();
        for (p, q) in order {
            geq.insert((find(p)?, find(q)?));
        }
        let mut bounds = BTreeMap::new();
        for (p, q, r) in upper_bounds {
            bounds.insert((find(p)?, find(q)?), find(r)?);
        }
        Ok(Self { nodes, geq, bounds })
    }

    /// A single node.
    pub fn point(name: &str) -> Self {
        Self::new(&[name], &[], &[]).expect("one node")
    }

    /// Two nodes `top ≥ bottom`.
    pub fn chain2(top: &str, bottom: &str) -> Self {
        Self::new(&[top, bottom], &[(top, bottom)], &[]).expect("two distinct nodes")
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.nodes.iter().position(|n| n == name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn geq(&self, p: usize, q: usize) -> bool {
        self.geq.contains(&(p, q))
    }

    /// Strict pairs `p > q`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        self.geq.iter().copied().filter(|(p, q)| p != q).collect()
    }

    /// Checks antisymmetry and transitivity.
    pub fn check_order(&self) -> Result<()> {
        for &(p, q) in &self.geq {
            if p != q && self.geq.contains(&(q, p)) {
                return Err(Error::MalformedPoset(format!(
                    "{} ≥ {} and {} ≥ {}",
                    self.nodes[p], self.nodes[q], self.nodes[q], self.nodes[p]
                )));
            }
            for r in 0..self.nodes.len() {
                if self.geq.contains(&(q, r)) && !self.geq.contains(&(p, r)) {
                    return Err(Error::MalformedPoset(format!(
                        "not transitive: {} ≥ {} ≥ {}",
                        self.nodes[p], self.nodes[q], self.nodes[r]
                    )));
                }
            }
        }
        Ok(())
    }

    /// An upper bound of `p` and `q`: the declared one when present (and valid),
    /// otherwise the first node above both.
    pub fn upper_bound(&self, p: usize, q: usize) -> Option<usize> {
        let declared = self.bounds.get(&(p, q)).or_else(|| self.bounds.get(&(q, p))).copied();
        if let Some(r) = declared {
            return (self.geq(r, p) && self.geq(r, q)).then_some(r);
        }
        (0..self.nodes.len()).find(|&r| self.geq(r, p) && self.geq(r, q))
    }

    pub fn is_directed(&self) -> bool {
        (0..self.len()).all(|p| (0..self.len()).all(|q| self.upper_bound(p, q).is_some()))
    }

    /// The greatest node, which exists in every finite directed poset.
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|q| self.geq(t, q)))
    }

    /// Node indices ordered so that every node comes after all nodes below it.
    pub fn bottom_up(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&p| (0..self.len()).filter(|&q| self.geq(p, q)).count());
        idx
    }
}

/// One algebra per node and a surjective *-morphism `π_pq` for each `p > q`.
#[derive(Clone, Debug)]
pub struct AlgebraTower<T> {
    poset: SeminormPoset,
    algebras: Vec<MatrixStarAlgebra>,
    connecting: BTreeMap<(usize, usize), StarMorphism<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerReport<T> {
    pub order_ok: bool,
    pub directed_ok: bool,
    /// Every `π_pq` is a *-morphism.
    pub morphisms_ok: bool,
    pub surjections_ok: bool,
    /// `max ||π_qr ∘ π_pq − π_pr||` over chains `p > q > r`.
    pub coherence_residual: T,
    pub coherent: bool,
    pub max_morphism_residual: T,
}

impl<T: Real> TowerReport<T> {
    pub fn is_valid(&self) -> bool {
        self.order_ok && self.directed_ok && self.morphisms_ok && self.surjections_ok && self.coherent
    }
}

impl<T: Real> AlgebraTower<T> {
    pub fn new(
        poset: SeminormPoset,
        algebras: BTreeMap<String, MatrixStarAlgebra>,
        connecting: BTreeMap<(String, String), StarMorphism<T>>,
    ) -> Result<Self> {
        let algs = poset
            .nodes()
            .iter()
            .map(|n| algebras.get(n).cloned().ok_or_else(|| Error::UnknownNode(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut conn = BTreeMap::new();
        for ((p, q), m) in connecting {
            let (pi, qi) = (poset.index(&p)?, poset.index(&q)?);
            if pi == qi || !poset.geq(pi, qi) {
                return Err(Error::MalformedPoset(format!("connecting map {p} → {q} but not {p} > {q}")));
            }
            if m.source() != &algs[pi] || m.target() != &algs[qi] {
                return Err(Error::ShapeMismatch(format!("connecting map {p} → {q} has the wrong algebras")));
            }
            conn.insert((pi, qi), m);
        }
        for (p, q) in poset.strict_pairs() {
            if !conn.contains_key(&(p, q)) {
                return Err(Error::MalformedPoset(format!(
                    "missing connecting map {} → {}",
                    poset.name(p),
                    poset.name(q)
                )));
            }
        }
        Ok(Self { poset, algebras: algs, connecting: conn })
    }

    /// A tower with one node.
    pub fn single(name: &str, algebra: MatrixStarAlgebra) -> Self {
        Self {
            poset: SeminormPoset::point(name),
            algebras: vec![algebra],
            connecting: BTreeMap::new(),
        }
    }

    /// Two nodes `top ≥ bottom` joined by `pi`.
    pub fn two_node(top: &str, bottom: &str, pi: StarMorphism<T>) -> Result<Self> {
        let algebras = BTreeMap::from([
            (top.to_string(), pi.source().clone()),
            (bottom.to_string(), pi.target().clone()),
        ]);
        let connecting = BTreeMap::from([((top.to_string(), bottom.to_string()), pi)]);
        Self::new(SeminormPoset::chain2(top, bottom), algebras, connecting)
    }

    pub fn poset(&self) -> &SeminormPoset {
        &self.poset
    }

    pub fn algebra(&self, p: usize) -> &MatrixStarAlgebra {
        &self.algebras[p]
    }

    pub fn algebra_at(&self, name: &str) -> Result<&MatrixStarAlgebra> {
        Ok(&self.algebras[self.poset.index(name)?])
    }

    /// `π_pq`; the identity when `p == q`.
    pub fn connecting(&self, p: usize, q: usize) -> Result<StarMorphism<T>> {
        if p == q {
            return Ok(StarMorphism::identity(&self.algebras[p]));
        }
        self.connecting.get(&(p, q)).cloned().ok_or_else(|| {
            Error::MalformedPoset(format!("{} is not above {}", self.poset.name(p), self.poset.name(q)))
        })
    }

    pub fn top(&self) -> Result<usize> {
        self.poset.top().ok_or_else(|| Error::MalformedPoset("no greatest node".into()))
    }

    /// `π_p` realized as `π_{top,p}`.
    pub fn projection(&self, p: usize) -> Result<StarMorphism<T>> {
        self.connecting(self.top()?, p)
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> Result<TowerReport<T>> {
        self.poset.check_order()?;
        let directed_ok = self.poset.is_directed();
        let mut morphisms_ok = true;
        let mut surjections_ok = true;
        let mut max_morphism_residual = T::zero();
        for m in self.connecting.values() {
            let r = check_morphism(m, tol)?;
            morphisms_ok &= r.is_star_morphism();
            surjections_ok &= r.surjective;
            max_morphism_residual = max_morphism_residual.max(r.max_residual);
        }
        let mut coherence_residual = T::zero();
        for (&(p, q), pq) in &self.connecting {
            for r in 0..self.poset.len() {
                if r == q || !self.poset.geq(q, r) {
                    continue;
                }
                let composed = self.connecting(q, r)?.after(pq)?;
                let direct = self.connecting(p, r)?;
                coherence_residual = coherence_residual.max(composed.action().dist_max(direct.action()));
            }
        }
        Ok(TowerReport {
            order_ok: true,
            directed_ok,
            morphisms_ok,
            surjections_ok,
            coherence_residual,
            coherent: tol.accepts(coherence_residual, T::one()),
            max_morphism_residual,
        })
    }

    /// Builds and checks a coherent tuple.
    pub fn limit_element(&self, components: BTreeMap<String, AlgElem<T>>, tol: &Tolerance<T>) -> Result<LimitElement<T>> {
        let comps = self
            .poset
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let a = components.get(n).cloned().ok_or_else(|| Error::UnknownNode(n.clone()))?;
                if a.parent() != &self.algebras[i] {
                    return Err(Error::ParentMismatch);
                }
                Ok(a)
            })
            .collect::<Result<Vec<_>>>()?;
        let el = LimitElement { components: comps };
        let (res, at) = self.coherence_residual(&el)?;
        let scale = el.components.iter().map(AlgElem::norm_max).fold(T::zero(), T::max);
        if !tol.accepts(res, scale) {
            return Err(Error::Incoherent(res.to_f64_lossy(), at));
        }
        Ok(el)
    }

    /// The coherent tuple `(π_p(a))_p` of an element of the top algebra.
    pub fn limit_from_top(&self, a: &AlgElem<T>) -> Result<LimitElement<T>> {
        let comps = (0..self.poset.len())
            .map(|p| self.projection(p)?.apply(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(LimitElement { components: comps })
    }

    fn coherence_residual(&self, el: &LimitElement<T>) -> Result<(T, String)> {
        let mut worst = (T::zero(), String::new());
        for (&(p, q), m) in &self.connecting {
            let r = m.apply(&el.components[p])?.sub(&el.components[q])?.norm_max();
            if r > worst.0 {
                worst = (r, format!("{} → {}", self.poset.name(p), self.poset.name(q)));
            }
        }
        Ok(worst)
    }

    /// Attaches a representation of `A_p` as a representation of the limit.
    pub fn lift_representation(&self, p: &str, rep: Representation<T>, tol: &Tolerance<T>) -> Result<TowerRepresentation<T>> {
        let idx = self.poset.index(p)?;
        if rep.algebra() != &self.algebras[idx] {
            return Err(Error::AlgebraMismatch);
        }
        let report = rep.validate(tol);
        if !report.is_valid() {
            return Err(Error::InvalidRep(format!(
                "representation at {p} is not a *-morphism (residual {:e})",
                report.max_residual().to_f64_lossy()
            )));
        }
        Ok(TowerRepresentation { node: p.to_string(), node_index: idx, rep, nondegenerate: report.nondegenerate })
    }
}

/// Coherent family `(a_p)_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitElement<T> {
    components: Vec<AlgElem<T>>,
}

impl<T: Real> LimitElement<T> {
    pub fn components(&self) -> &[AlgElem<T>] {
        &self.components
    }

    pub fn localize(&self, tower: &AlgebraTower<T>, p: &str) -> Result<AlgElem<T>> {
        Ok(self.components[tower.poset().index(p)?].clone())
    }

    /// `p(a) = ||a_p||`.
    pub fn seminorm(&self, tower: &AlgebraTower<T>, p: &str) -> Result<T> {
        Ok(self.components[tower.poset().index(p)?].norm())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn star(&self) -> Self {
        Self { components: self.components.iter().map(AlgElem::star).collect() }
    }
}

/// A representation of the limit that factors through node `node`.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerRepresentation<T> {
    pub node: String,
    node_index: usize,
    pub rep: Representation<T>,
    pub nondegenerate: bool,
}

impl<T: Real> TowerRepresentation<T> {
    pub fn evaluate(&self, a: &LimitElement<T>) -> Result<crate::linalg::CMat<T>> {
        self.rep.evaluate(&a.components[self.node_index])
    }

    /// The same representation written on the top algebra, `φ_p ∘ π_{top,p}`.
    pub fn at_top(&self, tower: &AlgebraTower<T>) -> Result<Representation<T>> {
        let top = tower.top()?;
        let pi = tower.connecting(top, self.node_index)?;
        self.rep.pullback(tower.algebra(top), pi.action())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::scalar::cr;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn c2_tower() -> AlgebraTower<f64> {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let c1 = MatrixStarAlgebra::diagonal(1);
        AlgebraTower::two_node("p", "q", StarMorphism::block_projection(&c2, &c1, &[0]).unwrap()).unwrap()
    }

    fn elem(alg: &MatrixStarAlgebra, v: &[f64]) -> AlgElem<f64> {
        alg.element(&v.iter().map(|&x| cr(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_node_tower_is_valid() {
        let t = AlgebraTower::<f64>::single("p", MatrixStarAlgebra::full(2));
        let r = t.validate(&tol()).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.coherence_residual, 0.0);
    }

    #[test]
    fn two_node_projection_tower() {
        assert!(c2_tower().validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn sum_map_tower_is_rejected() {
        let c2 = MatrixStarAlgebra::diagonal(2);
        let c1 = MatrixStarAlgebra::diagonal(1);
        let f = StarMorphism::new(c2, c1, CMat::from_real(1, 2, &[1.0, 1.0])).unwrap();
        let r = AlgebraTower::two_node("p", "q", f).unwrap().validate(&tol()).unwrap();
        assert!(r.surjections_ok);
        assert!(!r.morphisms_ok);
        assert!(!r.is_valid());
    }

    #[test]
    fn malformed_order() {
        let p = SeminormPoset::new(&["a", "b"], &[("a", "b"), ("b", "a")], &[]).unwrap();
        assert!(matches!(p.check_order(), Err(Error::MalformedPoset(_))));
        let p = SeminormPoset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")], &[]).unwrap();
        assert!(matches!(p.check_order(), Err(Error::MalformedPoset(_))));
    }

    #[test]
    fn undirected_poset_detected() {
        let p = SeminormPoset::new(&["a", "b"], &[], &[]).unwrap();
        assert!(!p.is_directed());
        assert!(p.top().is_none());
    }

    #[test]
    fn localize_and_seminorms() {
        let t = c2_tower();
        let (c2, c1) = (t.algebra_at("p").unwrap().clone(), t.algebra_at("q").unwrap().clone());
        let a = t
            .limit_element(
                BTreeMap::from([("p".into(), elem(&c2, &[3.0, 5.0])), ("q".into(), elem(&c1, &[3.0]))]),
                &tol(),
            )
            .unwrap();
        assert_eq!(a.localize(&t, "q").unwrap(), elem(&c1, &[3.0]));
        assert_eq!(a.localize(&t, "p").unwrap(), elem(&c2, &[3.0, 5.0]));
        assert!((a.seminorm(&t, "p").unwrap() - 5.0).abs() < 1e-15);
        assert!((a.seminorm(&t, "q").unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(a.localize(&t, "r"), Err(Error::UnknownNode(_))));

        let bad = t.limit_element(
            BTreeMap::from([("p".into(), elem(&c2, &[3.0, 5.0])), ("q".into(), elem(&c1, &[4.0]))]),
            &tol(),
        );
        assert!(matches!(bad, Err(Error::Incoherent(..))));
    }

    #[test]
    fn lifted_representations() {
        let t = c2_tower();
        let c1 = MatrixStarAlgebra::diagonal(1);
        let c2 = MatrixStarAlgebra::diagonal(2);
        let a = t.limit_from_top(&elem(&c2, &[3.0, 5.0])).unwrap();

        let phi_q = t.lift_representation("q", Representation::identity(&c1), &tol()).unwrap();
        assert_eq!(phi_q.evaluate(&a).unwrap()[(0, 0)], cr(3.0));

        let phi_p = t.lift_representation("p", Representation::identity(&c2), &tol()).unwrap();
        assert!(phi_p.evaluate(&a).unwrap().dist_max(&CMat::diag_real(&[3.0, 5.0])) < 1e-15);
        assert!(phi_p.nondegenerate);

        let corner = Representation::new(c2.clone(), 2, vec![CMat::diag_real(&[1.0, 0.0]), CMat::zeros(2, 2)]).unwrap();
        let lifted = t.lift_representation("p", corner, &tol()).unwrap();
        assert!(!lifted.nondegenerate);
    }
}
