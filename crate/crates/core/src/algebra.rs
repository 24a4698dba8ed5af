//! Finite-dimensional C*-algebras `M_{n_1} ⊕ … ⊕ M_{n_k}`, their elements and
//! *-morphisms between them.
//!
//! Elements are vectorized in the matrix-unit basis: block by block, each block
//! row-major. Basis index `k` therefore names a matrix unit `E^{(i)}_{ab}`.

use crate::linalg::{hermitian_eig, op_norm, rank, CMat, Tolerance};
use crate::scalar::{cone, czero, Real, C};
use crate::{Error, Result};

/// Direct sum of full matrix blocks. An empty block list is the zero algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixStarAlgebra {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
}

/// Position of a matrix unit inside the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitIndex {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl MatrixStarAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.contains(&0) {
            return Err(Error::ShapeMismatch("matrix blocks must have size >= 1".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        for &n in &blocks {
            offsets.push(acc);
            acc += n * n;
        }
        offsets.push(acc);
        Ok(Self { blocks, offsets })
    }

    /// `M_n`.
    pub fn full(n: usize) -> Self {
        Self::new(vec![n]).expect("n >= 1")
    }

    /// `ℂ^k`.
    pub fn diagonal(k: usize) -> Self {
        Self::new(vec![1; k]).expect("unit blocks")
    }

    pub fn zero() -> Self {
        Self::new(Vec::new()).expect("empty block list")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Size of the identity representation, `Σ n_i`.
    pub fn unit_rank(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn block_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn index_of(&self, u: UnitIndex) -> usize {
        let n = self.blocks[u.block];
        self.offsets[u.block] + u.row * n + u.col
    }

    pub fn unit_of(&self, k: usize) -> UnitIndex {
        let block = self.offsets.partition_point(|&o| o <= k) - 1;
        let n = self.blocks[block];
        let r = k - self.offsets[block];
        UnitIndex { block, row: r / n, col: r % n }
    }

    /// Basis index of `E_k E_l`, or `None` when the product vanishes.
    pub fn product_index(&self, k: usize, l: usize) -> Option<usize> {
        let (a, b) = (self.unit_of(k), self.unit_of(l));
        (a.block == b.block && a.col == b.row)
            .then(|| self.index_of(UnitIndex { block: a.block, row: a.row, col: b.col }))
    }

    /// Basis index of `E_k*`.
    pub fn star_index(&self, k: usize) -> usize {
        let u = self.unit_of(k);
        self.index_of(UnitIndex { block: u.block, row: u.col, col: u.row })
    }

    /// Basis indices of the diagonal matrix units.
    pub fn diagonal_units(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&k| {
            let u = self.unit_of(k);
            u.row == u.col
        })
        .collect()
    }

    pub fn basis<T: Real>(&self, k: usize) -> AlgElem<T> {
        let mut v = vec![czero(); self.dim()];
        v[k] = cone();
        self.element(&v).expect("basis vector has the right length")
    }

    pub fn unit<T: Real>(&self) -> AlgElem<T> {
        AlgElem { parent: self.clone(), blocks: self.blocks.iter().map(|&n| CMat::identity(n)).collect() }
    }

    pub fn zero_element<T: Real>(&self) -> AlgElem<T> {
        AlgElem { parent: self.clone(), blocks: self.blocks.iter().map(|&n| CMat::zeros(n, n)).collect() }
    }

    pub fn element<T: Real>(&self, v: &[C<T>]) -> Result<AlgElem<T>> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for an algebra of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let o = self.offsets[i];
                CMat::from_fn(n, n, |a, b| v[o + a * n + b])
            })
            .collect();
        Ok(AlgElem { parent: self.clone(), blocks })
    }

    pub fn from_blocks<T: Real>(&self, blocks: Vec<CMat<T>>) -> Result<AlgElem<T>> {
        if blocks.len() != self.blocks.len()
            || blocks.iter().zip(&self.blocks).any(|(m, &n)| m.shape() != (n, n))
        {
            return Err(Error::ShapeMismatch("block shapes do not match the algebra".into()));
        }
        Ok(AlgElem { parent: self.clone(), blocks })
    }

    /// Matrix of left multiplication by basis element `k` on vectorized elements.
    pub fn left_mult<T: Real>(&self, k: usize) -> CMat<T> {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for l in 0..d {
            if let Some(p) = self.product_index(k, l) {
                m[(p, l)] = cone();
            }
        }
        m
    }

    /// Matrix of right multiplication by basis element `k` on vectorized elements.
    pub fn right_mult<T: Real>(&self, k: usize) -> CMat<T> {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for l in 0..d {
            if let Some(p) = self.product_index(l, k) {
                m[(p, l)] = cone();
            }
        }
        m
    }

    /// Block-diagonal embedding of basis element `k` into `M_{Σ n_i}`.
    pub fn identity_image<T: Real>(&self, k: usize) -> CMat<T> {
        let u = self.unit_of(k);
        let shift: usize = self.blocks[..u.block].iter().sum();
        let n = self.unit_rank();
        CMat::unit(n, n, shift + u.row, shift + u.col)
    }
}

/// Element of a [`MatrixStarAlgebra`], one square matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElem<T> {
    parent: MatrixStarAlgebra,
    blocks: Vec<CMat<T>>,
}

impl<T: Real> AlgElem<T> {
    pub fn parent(&self) -> &MatrixStarAlgebra {
        &self.parent
    }

    pub fn blocks(&self) -> &[CMat<T>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat<T> {
        &self.blocks[i]
    }

    pub fn to_vec(&self) -> Vec<C<T>> {
        self.blocks.iter().flat_map(|b| b.to_vec()).collect()
    }

    fn same_parent(&self, other: &Self) -> Result<()> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_parent(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Ok(Self { parent: self.parent.clone(), blocks })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_parent(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(Self { parent: self.parent.clone(), blocks })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_parent(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Ok(Self { parent: self.parent.clone(), blocks })
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { parent: self.parent.clone(), blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn star(&self) -> Self {
        Self { parent: self.parent.clone(), blocks: self.blocks.iter().map(CMat::adjoint).collect() }
    }

    /// C*-norm: largest singular value over all blocks.
    pub fn norm(&self) -> T {
        self.blocks
            .iter()
            .map(|b| op_norm(b).expect("SVD of a small block converges"))
            .fold(T::zero(), T::max)
    }

    pub fn norm_max(&self) -> T {
        self.blocks.iter().map(CMat::norm_max).fold(T::zero(), T::max)
    }

    pub fn dist(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm())
    }

    pub fn is_positive(&self, tol: &Tolerance<T>) -> bool {
        let band = tol.eps * (T::one() + self.norm());
        self.blocks.iter().all(|b| {
            if b.hermitian_defect() > band {
                return false;
            }
            match hermitian_eig(b, tol) {
                Ok(e) => e.values.first().is_none_or(|&m| m >= -band),
                Err(_) => false,
            }
        })
    }
}

/// Linear map between algebras stored as a matrix on vectorized elements.
#[derive(Clone, Debug)]
pub struct StarMorphism<T> {
    source: MatrixStarAlgebra,
    target: MatrixStarAlgebra,
    action: CMat<T>,
}

/// Outcome of [`check_morphism`].
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismReport<T> {
    pub linear_ok: bool,
    pub mult_ok: bool,
    pub star_ok: bool,
    pub surjective: bool,
    pub injective: bool,
    pub unital: bool,
    pub mult_residual: T,
    pub star_residual: T,
    pub unit_residual: T,
    pub max_residual: T,
}

impl<T: Real> MorphismReport<T> {
    pub fn is_star_morphism(&self) -> bool {
        self.linear_ok && self.mult_ok && self.star_ok
    }
}

impl<T: Real> StarMorphism<T> {
    pub fn new(source: MatrixStarAlgebra, target: MatrixStarAlgebra, action: CMat<T>) -> Result<Self> {
        if action.shape() != (target.dim(), source.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "morphism action is {}x{}, expected {}x{}",
                action.rows(),
                action.cols(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(Self { source, target, action })
    }

    /// Builds the action by evaluating `f` on the source basis.
    pub fn from_fn(
        source: &MatrixStarAlgebra,
        target: &MatrixStarAlgebra,
        f: impl Fn(&AlgElem<T>) -> AlgElem<T>,
    ) -> Result<Self> {
        let cols: Vec<Vec<C<T>>> = (0..source.dim()).map(|k| f(&source.basis(k)).to_vec()).collect();
        Self::new(source.clone(), target.clone(), CMat::from_columns(target.dim(), &cols))
    }

    pub fn identity(alg: &MatrixStarAlgebra) -> Self {
        Self { source: alg.clone(), target: alg.clone(), action: CMat::identity(alg.dim()) }
    }

    /// Target block `j` receives source block `picks[j]`; sizes must agree.
    pub fn block_projection(
        source: &MatrixStarAlgebra,
        target: &MatrixStarAlgebra,
        picks: &[usize],
    ) -> Result<Self> {
        if picks.len() != target.num_blocks() {
            return Err(Error::ShapeMismatch("one source block per target block".into()));
        }
        let mut action = CMat::zeros(target.dim(), source.dim());
        for (j, &i) in picks.iter().enumerate() {
            let n = *source
                .blocks()
                .get(i)
                .ok_or_else(|| Error::ShapeMismatch(format!("source has no block {i}")))?;
            if n != target.blocks()[j] {
                return Err(Error::ShapeMismatch(format!("block {i} of size {n} cannot map to block {j}")));
            }
            for a in 0..n {
                for b in 0..n {
                    let s = source.index_of(UnitIndex { block: i, row: a, col: b });
                    let t = target.index_of(UnitIndex { block: j, row: a, col: b });
                    action[(t, s)] = cone();
                }
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), action })
    }

    pub fn source(&self) -> &MatrixStarAlgebra {
        &self.source
    }

    pub fn target(&self) -> &MatrixStarAlgebra {
        &self.target
    }

    pub fn action(&self) -> &CMat<T> {
        &self.action
    }

    pub fn apply(&self, a: &AlgElem<T>) -> Result<AlgElem<T>> {
        if a.parent() != &self.source {
            return Err(Error::ParentMismatch);
        }
        self.target.element(&self.action.mul_vec(&a.to_vec()))
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Self) -> Result<Self> {
        if first.target != self.source {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self {
            source: first.source.clone(),
            target: self.target.clone(),
            action: &self.action * &first.action,
        })
    }
}

/// Verifies linearity, multiplicativity and *-preservation on the matrix-unit
/// basis; surjectivity and injectivity by rank; unitality by `Φ(1) = 1`.
pub fn check_morphism<T: Real>(phi: &StarMorphism<T>, tol: &Tolerance<T>) -> Result<MorphismReport<T>> {
    let (src, tgt) = (&phi.source, &phi.target);
    let linear_ok = phi.action.shape() == (tgt.dim(), src.dim()) && phi.action.is_finite();
    if !linear_ok {
        return Err(Error::ShapeMismatch("morphism action does not match its algebras".into()));
    }
    let images: Vec<AlgElem<T>> =
        (0..src.dim()).map(|k| tgt.element(&phi.action.column(k))).collect::<Result<_>>()?;
    let scale = images.iter().map(AlgElem::norm_max).fold(T::zero(), T::max);

    let mut mult_residual = T::zero();
    for k in 0..src.dim() {
        for l in 0..src.dim() {
            let lhs = match src.product_index(k, l) {
                Some(p) => images[p].clone(),
                None => tgt.zero_element(),
            };
            let rhs = images[k].mul(&images[l])?;
            mult_residual = mult_residual.max(lhs.sub(&rhs)?.norm_max());
        }
    }
    let mut star_residual = T::zero();
    for k in 0..src.dim() {
        let lhs = &images[src.star_index(k)];
        star_residual = star_residual.max(lhs.sub(&images[k].star())?.norm_max());
    }
    let unit_img = phi.apply(&src.unit())?;
    let unit_residual = unit_img.sub(&tgt.unit())?.norm_max();
    let r = rank(&phi.action, tol)?;

    let sq = scale * scale;
    Ok(MorphismReport {
        linear_ok,
        mult_ok: tol.accepts(mult_residual, sq),
        star_ok: tol.accepts(star_residual, scale),
        surjective: r == tgt.dim(),
        injective: r == src.dim(),
        unital: tol.accepts(unit_residual, T::one()),
        mult_residual,
        star_residual,
        unit_residual,
        max_residual: mult_residual.max(star_residual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn c2() -> MatrixStarAlgebra {
        MatrixStarAlgebra::diagonal(2)
    }

    #[test]
    fn scalar_product() {
        let a = MatrixStarAlgebra::diagonal(1);
        let x = a.element(&[cr(2.0)]).unwrap();
        let y = a.element(&[cr(3.0)]).unwrap();
        assert_eq!(x.mul(&y).unwrap().to_vec(), vec![cr(6.0)]);
    }

    #[test]
    fn matrix_units_multiply() {
        let m2 = MatrixStarAlgebra::full(2);
        let e12 = m2.basis::<f64>(1);
        let e21 = m2.basis::<f64>(2);
        assert_eq!(e12.mul(&e21).unwrap(), m2.basis(0));
        assert_eq!(m2.product_index(1, 2), Some(0));
        assert_eq!(m2.product_index(1, 1), None);
    }

    #[test]
    fn star_of_mixed_element() {
        let a = MatrixStarAlgebra::new(vec![1, 2]).unwrap();
        let x = a
            .from_blocks(vec![CMat::diag(&[c(2.0, 1.0)]), CMat::unit(2, 2, 0, 1)])
            .unwrap();
        let s = x.star();
        assert_eq!(s.block(0)[(0, 0)], c(2.0, -1.0));
        assert_eq!(s.block(1), &CMat::unit(2, 2, 1, 0));
    }

    #[test]
    fn parent_mismatch_is_reported() {
        let x = c2().unit::<f64>();
        let y = MatrixStarAlgebra::full(2).unit::<f64>();
        assert_eq!(x.mul(&y), Err(Error::ParentMismatch));
    }

    #[test]
    fn norms() {
        let x = c2().element::<f64>(&[cr(3.0), cr(-4.0)]).unwrap();
        assert!((x.norm() - 4.0).abs() < 1e-15);
        let m2 = MatrixStarAlgebra::full(2);
        assert!((m2.basis::<f64>(1).norm() - 1.0).abs() < 1e-15);
        let a = MatrixStarAlgebra::new(vec![2, 1]).unwrap();
        let y = a
            .from_blocks::<f64>(vec![CMat::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]), CMat::from_real(1, 1, &[1.0])])
            .unwrap();
        assert!((y.norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn positivity() {
        let m2 = MatrixStarAlgebra::full(2);
        assert!(m2.unit::<f64>().is_positive(&tol()));
        let neg = MatrixStarAlgebra::diagonal(1).element(&[cr(-1.0)]).unwrap();
        assert!(!neg.is_positive(&tol()));
        let ones = m2.element(&[cr(1.0); 4]).unwrap();
        assert!(ones.is_positive(&tol()));
    }

    #[test]
    fn identity_morphism_passes() {
        let m2 = MatrixStarAlgebra::full(2);
        let r = check_morphism(&StarMorphism::<f64>::identity(&m2), &tol()).unwrap();
        assert!(r.is_star_morphism() && r.surjective && r.injective && r.unital);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn first_coordinate_projection() {
        let c1 = MatrixStarAlgebra::diagonal(1);
        let pi = StarMorphism::<f64>::block_projection(&c2(), &c1, &[0]).unwrap();
        let r = check_morphism(&pi, &tol()).unwrap();
        assert!(r.mult_ok && r.star_ok && r.surjective && r.unital);
        assert!(!r.injective);
    }

    #[test]
    fn transpose_is_an_anti_morphism() {
        let m2 = MatrixStarAlgebra::full(2);
        let t = StarMorphism::<f64>::from_fn(&m2, &m2, |a| m2.from_blocks(vec![a.block(0).transpose()]).unwrap())
            .unwrap();
        let r = check_morphism(&t, &tol()).unwrap();
        assert!(!r.mult_ok);
        assert!(r.star_ok);
        assert!(r.mult_residual > 0.5);
    }

    #[test]
    fn sum_map_is_not_multiplicative() {
        let c1 = MatrixStarAlgebra::diagonal(1);
        let f = StarMorphism::<f64>::new(c2(), c1, CMat::from_real(1, 2, &[1.0, 1.0])).unwrap();
        let r = check_morphism(&f, &tol()).unwrap();
        assert!(r.surjective);
        assert!(!r.mult_ok);
    }

    #[test]
    fn zero_algebra_has_no_basis() {
        let z = MatrixStarAlgebra::zero();
        assert_eq!(z.dim(), 0);
        assert_eq!(z.unit::<f64>().norm(), 0.0);
        let pi = StarMorphism::<f64>::block_projection(&c2(), &z, &[]).unwrap();
        let r = check_morphism(&pi, &tol()).unwrap();
        assert!(r.is_star_morphism() && r.surjective && r.unital);
    }
}
