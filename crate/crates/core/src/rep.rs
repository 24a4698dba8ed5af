//! *-representations of matrix *-algebras on finite-dimensional Hilbert spaces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{AlgElem, MatrixStarAlgebra, UnitIndex};
use crate::linalg::{null_space, polar_unitary, CMat, Tolerance};
use crate::scalar::{c, czero, Real, C};
use crate::{Error, Result};

/// Images of the matrix-unit basis under a linear map `A → L(ℂ^hdim)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<T> {
    algebra: MatrixStarAlgebra,
    hdim: usize,
    images: Vec<CMat<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepReport<T> {
    pub mult_ok: bool,
    pub star_ok: bool,
    pub nondegenerate: bool,
    pub mult_residual: T,
    pub star_residual: T,
    pub unit_residual: T,
}

impl<T: Real> RepReport<T> {
    pub fn is_valid(&self) -> bool {
        self.mult_ok && self.star_ok
    }

    pub fn max_residual(&self) -> T {
        self.mult_residual.max(self.star_residual)
    }
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceMethod {
    TraceCriterion,
    ExplicitIntertwiner,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceVerdict<T> {
    pub equivalent: bool,
    pub trace_residual: T,
    pub witness: Option<CMat<T>>,
    /// `max_k ||U φ₁(b_k) − φ₂(b_k) U||` when a witness is present.
    pub intertwining_residual: Option<T>,
    /// `||U*U − I||_max` when a witness is present.
    pub unitarity_residual: Option<T>,
    pub method: EquivalenceMethod,
}

/// Options for [`unitarily_equivalent`].
#[derive(Clone, Copy, Debug)]
pub struct WitnessRequest {
    pub want_witness: bool,
    pub seed: u64,
    pub retries: usize,
}

impl Default for WitnessRequest {
    fn default() -> Self {
        Self { want_witness: false, seed: 0x5eed, retries: 8 }
    }
}

impl WitnessRequest {
    pub fn with_witness(seed: u64) -> Self {
        Self { want_witness: true, seed, ..Self::default() }
    }
}

impl<T: Real> Representation<T> {
    pub fn new(algebra: MatrixStarAlgebra, hdim: usize, images: Vec<CMat<T>>) -> Result<Self> {
        if images.len() != algebra.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} images for an algebra of dimension {}",
                images.len(),
                algebra.dim()
            )));
        }
        if let Some(bad) = images.iter().find(|m| m.shape() != (hdim, hdim)) {
            return Err(Error::ShapeMismatch(format!(
                "image of shape {}x{} on a space of dimension {hdim}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { algebra, hdim, images })
    }

    /// The block-diagonal identity representation on `ℂ^{Σ n_i}`; faithful.
    pub fn identity(algebra: &MatrixStarAlgebra) -> Self {
        let images = (0..algebra.dim()).map(|k| algebra.identity_image(k)).collect();
        Self { algebra: algebra.clone(), hdim: algebra.unit_rank(), images }
    }

    /// `⊕_i (id_{M_{n_i}})^{⊕ m_i}`, with block `i` repeated `mult[i]` times.
    pub fn from_multiplicities(algebra: &MatrixStarAlgebra, mult: &[usize]) -> Result<Self> {
        if mult.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch("one multiplicity per block".into()));
        }
        let hdim: usize = mult.iter().zip(algebra.blocks()).map(|(m, n)| m * n).sum();
        let mut images = vec![CMat::zeros(hdim, hdim); algebra.dim()];
        let mut shift = 0;
        for (i, (&m, &n)) in mult.iter().zip(algebra.blocks()).enumerate() {
            for copy in 0..m {
                let base = shift + copy * n;
                for a in 0..n {
                    for b in 0..n {
                        let k = algebra.index_of(UnitIndex { block: i, row: a, col: b });
                        images[k][(base + a, base + b)] = C::new(T::one(), T::zero());
                    }
                }
            }
            shift += m * n;
        }
        Ok(Self { algebra: algebra.clone(), hdim, images })
    }

    pub fn algebra(&self) -> &MatrixStarAlgebra {
        &self.algebra
    }

    pub fn hdim(&self) -> usize {
        self.hdim
    }

    pub fn images(&self) -> &[CMat<T>] {
        &self.images
    }

    pub fn image(&self, k: usize) -> &CMat<T> {
        &self.images[k]
    }

    pub fn evaluate(&self, a: &AlgElem<T>) -> Result<CMat<T>> {
        if a.parent() != &self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = CMat::zeros(self.hdim, self.hdim);
        for (x, img) in a.to_vec().into_iter().zip(&self.images) {
            if x != czero() {
                out.axpy(x, img);
            }
        }
        Ok(out)
    }

    /// `U φ(·) U*`.
    pub fn conjugate(&self, u: &CMat<T>) -> Result<Self> {
        if u.shape() != (self.hdim, self.hdim) {
            return Err(Error::ShapeMismatch("conjugating unitary has the wrong size".into()));
        }
        let uh = u.adjoint();
        let images = self.images.iter().map(|m| &(u * m) * &uh).collect();
        Ok(Self { algebra: self.algebra.clone(), hdim: self.hdim, images })
    }

    /// `φ ∘ π` for a morphism `π: A' → A` given by its action matrix.
    pub fn pullback(&self, source: &MatrixStarAlgebra, action: &CMat<T>) -> Result<Self> {
        if action.shape() != (self.algebra.dim(), source.dim()) {
            return Err(Error::ShapeMismatch("pullback action does not match".into()));
        }
        let images = (0..source.dim())
            .map(|k| self.evaluate(&self.algebra.element(&action.column(k))?))
            .collect::<Result<_>>()?;
        Ok(Self { algebra: source.clone(), hdim: self.hdim, images })
    }

    /// Traces of all basis images.
    pub fn character(&self) -> Vec<C<T>> {
        self.images.iter().map(CMat::trace).collect()
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> RepReport<T> {
        let alg = &self.algebra;
        let scale = self.images.iter().map(CMat::norm_max).fold(T::zero(), T::max);
        let zero = CMat::zeros(self.hdim, self.hdim);
        let mut mult_residual = T::zero();
        for k in 0..alg.dim() {
            for l in 0..alg.dim() {
                let lhs = alg.product_index(k, l).map_or(&zero, |p| &self.images[p]);
                let rhs = &self.images[k] * &self.images[l];
                mult_residual = mult_residual.max(lhs.dist_max(&rhs));
            }
        }
        let star_residual = (0..alg.dim())
            .map(|k| self.images[alg.star_index(k)].dist_max(&self.images[k].adjoint()))
            .fold(T::zero(), T::max);
        let unit = self.evaluate(&alg.unit()).expect("own algebra");
        let unit_residual = unit.dist_max(&CMat::identity(self.hdim));
        RepReport {
            mult_ok: tol.accepts(mult_residual, scale * scale),
            star_ok: tol.accepts(star_residual, scale),
            nondegenerate: tol.accepts(unit_residual, T::one()),
            mult_residual,
            star_residual,
            unit_residual,
        }
    }

    /// Errors unless `self` is a nondegenerate *-representation.
    pub fn require_nondegenerate(&self, tol: &Tolerance<T>) -> Result<()> {
        let r = self.validate(tol);
        if !r.is_valid() {
            return Err(Error::InvalidRep(format!(
                "not a *-morphism (mult {:e}, star {:e})",
                r.mult_residual.to_f64_lossy(),
                r.star_residual.to_f64_lossy()
            )));
        }
        if !r.nondegenerate {
            return Err(Error::InvalidRep(format!(
                "degenerate: |φ(1) − I| = {:e}",
                r.unit_residual.to_f64_lossy()
            )));
        }
        Ok(())
    }
}

/// Block-diagonal direct sum.
pub fn direct_sum<T: Real>(reps: &[Representation<T>]) -> Result<Representation<T>> {
    let first = reps.first().ok_or_else(|| Error::Empty("direct sum of no representations".into()))?;
    if reps.iter().any(|r| r.algebra != first.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    let hdim = reps.iter().map(|r| r.hdim).sum();
    let images = (0..first.algebra.dim())
        .map(|k| CMat::block_diag(&reps.iter().map(|r| r.images[k].clone()).collect::<Vec<_>>()))
        .collect();
    Ok(Representation { algebra: first.algebra.clone(), hdim, images })
}

/// Basis of `{X : X φ₁(b) = φ₂(b) X for all basis b}`, as `hdim₂ × hdim₁` matrices.
pub fn intertwiners<T: Real>(
    phi1: &Representation<T>,
    phi2: &Representation<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<CMat<T>>> {
    if phi1.algebra != phi2.algebra {
        return Err(Error::AlgebraMismatch);
    }
    let (h1, h2) = (phi1.hdim, phi2.hdim);
    if h1 == 0 || h2 == 0 {
        return Ok(Vec::new());
    }
    // row-major vec: vec(X B) = (I ⊗ Bᵀ) vec X, vec(A X) = (A ⊗ I) vec X
    let (i1, i2) = (CMat::identity(h1), CMat::identity(h2));
    let blocks: Vec<CMat<T>> = (0..phi1.algebra.dim())
        .map(|k| &i2.kron(&phi1.images[k].transpose()) - &phi2.images[k].kron(&i1))
        .collect();
    let system = CMat::vstack(&blocks);
    let ns = null_space(&system, tol)?;
    Ok((0..ns.cols()).map(|j| CMat::col_vec(&ns.column(j)).reshape(h2, h1)).collect())
}

/// `tr φ(e^i_{11})` for each block `i`: the multiplicity of `id_{M_{n_i}}` in `φ`.
pub fn multiplicities<T: Real>(phi: &Representation<T>) -> Vec<T> {
    let alg = &phi.algebra;
    (0..alg.num_blocks())
        .map(|i| phi.images[alg.index_of(UnitIndex { block: i, row: 0, col: 0 })].trace().re)
        .collect()
}

/// `Σ m_i²`, read off the multiplicities of a nondegenerate representation.
pub fn commutant_dim<T: Real>(phi: &Representation<T>, tol: &Tolerance<T>) -> Result<usize> {
    phi.require_nondegenerate(tol)?;
    Ok(multiplicities(phi).iter().map(|m| m.round().to_usize().unwrap_or(0).pow(2)).sum())
}

/// `Σ_i Σ_{a,b} φ₂(e^i_{ab}) M φ₁(e^i_{ba})`, an intertwiner from `φ₁` to `φ₂`
/// for every `M`; onto the intertwiner space as `M` ranges over all matrices.
pub fn average_intertwiner<T: Real>(phi1: &Representation<T>, phi2: &Representation<T>, m: &CMat<T>) -> CMat<T> {
    let alg = &phi1.algebra;
    let mut x = CMat::zeros(phi2.hdim, phi1.hdim);
    for k in 0..alg.dim() {
        let u = alg.unit_of(k);
        let back = alg.index_of(UnitIndex { block: u.block, row: u.col, col: u.row });
        x.axpy(C::new(T::one(), T::zero()), &(&(&phi2.images[k] * m) * &phi1.images[back]));
    }
    x
}

/// Irreducible iff the commutant is one-dimensional.
pub fn is_irreducible<T: Real>(phi: &Representation<T>, tol: &Tolerance<T>) -> Result<bool> {
    phi.require_nondegenerate(tol)?;
    Ok(commutant_dim(phi, tol)? == 1)
}

/// Decides unitary equivalence by comparing characters on the full basis; with
/// `want_witness`, also extracts an intertwining unitary from a random element
/// of the intertwiner space.
pub fn unitarily_equivalent<T: Real>(
    phi1: &Representation<T>,
    phi2: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<EquivalenceVerdict<T>> {
    if phi1.algebra != phi2.algebra {
        return Err(Error::AlgebraMismatch);
    }
    phi1.require_nondegenerate(tol)?;
    phi2.require_nondegenerate(tol)?;

    let (c1, c2) = (phi1.character(), phi2.character());
    let trace_residual = if phi1.hdim == phi2.hdim {
        c1.iter().zip(&c2).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max)
    } else {
        T::infinity()
    };
    let scale = c1.iter().chain(&c2).map(|z| z.norm()).fold(T::zero(), T::max);
    let equivalent = phi1.hdim == phi2.hdim && trace_residual <= tol.gap_band(scale);

    let mut verdict = EquivalenceVerdict {
        equivalent,
        trace_residual,
        witness: None,
        intertwining_residual: None,
        unitarity_residual: None,
        method: EquivalenceMethod::TraceCriterion,
    };
    if !(req.want_witness && equivalent) {
        return Ok(verdict);
    }

    let u = find_witness(phi1, phi2, tol, req)?;
    verdict.intertwining_residual = Some(intertwining_residual(phi1, phi2, &u));
    verdict.unitarity_residual =
        Some((&u.adjoint() * &u).dist_max(&CMat::identity(phi1.hdim)));
    verdict.witness = Some(u);
    verdict.method = EquivalenceMethod::ExplicitIntertwiner;
    Ok(verdict)
}

pub fn intertwining_residual<T: Real>(
    phi1: &Representation<T>,
    phi2: &Representation<T>,
    u: &CMat<T>,
) -> T {
    phi1.images
        .iter()
        .zip(&phi2.images)
        .map(|(a, b)| (u * a).dist_max(&(b * u)))
        .fold(T::zero(), T::max)
}

fn find_witness<T: Real>(
    phi1: &Representation<T>,
    phi2: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<CMat<T>> {
    let h = phi1.hdim;
    if h == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let scale = phi2.images.iter().map(CMat::norm_max).fold(T::zero(), T::max);
    for _ in 0..req.retries.max(1) {
        let m = CMat::from_fn(h, h, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c(T::lit(re), T::lit(im))
        });
        let x = average_intertwiner(phi1, phi2, &m);
        let Ok(u) = polar_unitary(&x, tol) else { continue };
        let res = intertwining_residual(phi1, phi2, &u);
        if tol.accepts(res, scale) {
            return Ok(u);
        }
    }
    Err(Error::WitnessNotFound(req.retries.max(1)))
}
