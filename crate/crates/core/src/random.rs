//! Seeded instance generator for the randomized checks.
//!
//! Inner products are `x* H_i y` on each block with `H_i = X*X + εI`, so every
//! generated module passes the block-Choi test by construction. Actions are
//! direct sums of unital representations on the multiplicity spaces, conjugated
//! by `H_i^{-1/2}` so that they are `*`-preserving for the weighted form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::MatrixStarAlgebra;
use crate::linalg::{pd_sqrt_pair, polar_unitary, CMat, Tolerance};
use crate::module::{HilbertModule, ModuleAction};
use crate::rep::Representation;
use crate::scalar::{c, Real, C};
use crate::{Error, Result};

/// Size limits for generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_blocks: usize,
    pub max_block: usize,
    pub max_module_dim: usize,
    pub max_hdim: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { max_blocks: 2, max_block: 2, max_module_dim: 3, max_hdim: 4 }
    }
}

/// Added to `X*X` in generated weights.
pub const WEIGHT_SHIFT: f64 = 0.25;
pub const DEFAULT_RETRIES: usize = 64;

pub struct Generator {
    rng: ChaCha8Rng,
    pub bounds: Bounds,
    pub retries: usize,
}

/// `Φ₁: A → L_B(E)`, `Φ₂: B → L_C(F)` and `φ` of `C`.
#[derive(Clone, Debug)]
pub struct StagesInstance<T> {
    pub phi1: ModuleAction<T>,
    pub phi2: ModuleAction<T>,
    pub rep: Representation<T>,
}

/// `Φ: A → L_B(E)` with summands `φ_i` of `B`.
#[derive(Clone, Debug)]
pub struct DirectSumInstance<T> {
    pub action: ModuleAction<T>,
    pub summands: Vec<Representation<T>>,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), bounds: Bounds::default(), retries: DEFAULT_RETRIES }
    }

    pub fn with_bounds(seed: u64, bounds: Bounds) -> Self {
        Self { bounds, ..Self::new(seed) }
    }

    pub fn gaussian<T: Real>(&mut self) -> C<T> {
        let x: f64 = StandardNormal.sample(&mut self.rng);
        let y: f64 = StandardNormal.sample(&mut self.rng);
        c(T::lit(x), T::lit(y))
    }

    pub fn vector<T: Real>(&mut self, n: usize) -> Vec<C<T>> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    pub fn matrix<T: Real>(&mut self, rows: usize, cols: usize) -> CMat<T> {
        CMat::from_fn(rows, cols, |_, _| self.gaussian())
    }

    /// Polar part of a Gaussian matrix.
    pub fn unitary<T: Real>(&mut self, n: usize, tol: &Tolerance<T>) -> Result<CMat<T>> {
        for _ in 0..self.retries {
            let m = self.matrix(n, n);
            if let Ok(u) = polar_unitary(&m, tol) {
                return Ok(u);
            }
        }
        Err(Error::GeneratorExhausted(self.retries))
    }

    /// `X*X + εI`, scaled down by `n`.
    pub fn positive_definite<T: Real>(&mut self, n: usize) -> CMat<T> {
        let x = self.matrix::<T>(n, n);
        let mut h = (&x.adjoint() * &x).scale_real(T::one() / T::lit(n.max(1) as f64));
        h.axpy(c(T::lit(WEIGHT_SHIFT), T::zero()), &CMat::identity(n));
        h
    }

    pub fn algebra(&mut self) -> MatrixStarAlgebra {
        let k = self.rng.random_range(1..=self.bounds.max_blocks);
        let blocks = (0..k).map(|_| self.rng.random_range(1..=self.bounds.max_block)).collect();
        MatrixStarAlgebra::new(blocks).expect("positive block sizes")
    }

    /// A random element in coefficient form.
    pub fn element<T: Real>(&mut self, a: &MatrixStarAlgebra) -> Vec<C<T>> {
        self.vector(a.dim())
    }

    /// A multiplicity vector with `Σ μ_j n_j = total`, drawn uniformly from all of them.
    fn multiplicities_for(&mut self, a: &MatrixStarAlgebra, total: usize) -> Option<Vec<usize>> {
        let all = multiplicity_vectors(a.blocks(), total);
        if all.is_empty() {
            return None;
        }
        let i = self.rng.random_range(0..all.len());
        Some(all[i].clone())
    }

    /// A unital representation on exactly `hdim` dimensions, in a random basis.
    pub fn rep_of_dim<T: Real>(
        &mut self,
        a: &MatrixStarAlgebra,
        hdim: usize,
        tol: &Tolerance<T>,
    ) -> Result<Option<Representation<T>>> {
        let Some(mult) = self.multiplicities_for(a, hdim) else {
            return Ok(None);
        };
        let u = self.unitary(hdim, tol)?;
        Ok(Some(Representation::from_multiplicities(a, &mult)?.conjugate(&u)?))
    }

    /// A nonzero unital representation with `hdim ≤ max_hdim`.
    pub fn rep<T: Real>(&mut self, a: &MatrixStarAlgebra, tol: &Tolerance<T>) -> Result<Representation<T>> {
        for _ in 0..self.retries {
            let h = self.rng.random_range(1..=self.bounds.max_hdim);
            if let Some(r) = self.rep_of_dim(a, h, tol)? {
                return Ok(r);
            }
        }
        Err(Error::GeneratorExhausted(self.retries))
    }

    /// `⊕ ℂ^{m_i × n_i}` over `B` with random weights, `1 ≤ dim ≤ max_module_dim`.
    pub fn module<T: Real>(&mut self, b: &MatrixStarAlgebra) -> Result<HilbertModule<T>> {
        let mults = self.module_mults(b)?;
        let weights: Vec<CMat<T>> = mults.iter().map(|&m| self.positive_definite(m)).collect();
        HilbertModule::standard(b, &mults, Some(&weights))
    }

    fn module_mults(&mut self, b: &MatrixStarAlgebra) -> Result<Vec<usize>> {
        for _ in 0..self.retries {
            let mults: Vec<usize> = b.blocks().iter().map(|_| self.rng.random_range(0..=self.bounds.max_module_dim)).collect();
            let d: usize = mults.iter().zip(b.blocks()).map(|(m, n)| m * n).sum();
            if (1..=self.bounds.max_module_dim).contains(&d) {
                return Ok(mults);
            }
        }
        Err(Error::GeneratorExhausted(self.retries))
    }

    /// A random algebra `A` and a unital action `A → L_B(E)` on a random module over `b`.
    pub fn module_action<T: Real>(&mut self, b: &MatrixStarAlgebra, tol: &Tolerance<T>) -> Result<ModuleAction<T>> {
        for _ in 0..self.retries {
            let a = self.algebra();
            let mults = self.module_mults(b)?;
            let mut reps = Vec::with_capacity(mults.len());
            for &m in &mults {
                reps.push(if m == 0 { None } else { self.rep_of_dim(&a, m, tol)? });
            }
            if mults.iter().zip(&reps).any(|(&m, r)| m > 0 && r.is_none()) {
                continue;
            }
            let weights: Vec<CMat<T>> = mults.iter().map(|&m| self.positive_definite(m)).collect();
            let e = HilbertModule::standard(b, &mults, Some(&weights))?;
            let mut images = vec![CMat::zeros(e.dim(), e.dim()); a.dim()];
            let mut offset = 0;
            for ((&m, &n), (rep, h)) in mults.iter().zip(b.blocks()).zip(reps.iter().zip(&weights)) {
                if let Some(rep) = rep {
                    let (sq, isq) = pd_sqrt_pair(h, tol)?;
                    for (k, img) in images.iter_mut().enumerate() {
                        let w = &(&isq * rep.image(k)) * &sq;
                        for r in 0..m {
                            for r2 in 0..m {
                                for col in 0..n {
                                    img[(offset + r2 * n + col, offset + r * n + col)] = w[(r2, r)];
                                }
                            }
                        }
                    }
                }
                offset += m * n;
            }
            return ModuleAction::new(a, e, images);
        }
        Err(Error::GeneratorExhausted(self.retries))
    }

    pub fn stages_instance<T: Real>(&mut self, tol: &Tolerance<T>) -> Result<StagesInstance<T>> {
        let c_alg = self.algebra();
        let phi2 = self.module_action(&c_alg, tol)?;
        let phi1 = self.module_action(phi2.source(), tol)?;
        let rep = self.rep(&c_alg, tol)?;
        Ok(StagesInstance { phi1, phi2, rep })
    }

    pub fn direct_sum_instance<T: Real>(&mut self, tol: &Tolerance<T>) -> Result<DirectSumInstance<T>> {
        let b = self.algebra();
        let action = self.module_action(&b, tol)?;
        let k = self.rng.random_range(2..=3);
        let summands = (0..k).map(|_| self.rep(&b, tol)).collect::<Result<_>>()?;
        Ok(DirectSumInstance { action, summands })
    }
}

/// All `μ` with `Σ μ_j n_j = total`, in lexicographic order.
pub fn multiplicity_vectors(blocks: &[usize], total: usize) -> Vec<Vec<usize>> {
    fn go(blocks: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match blocks.split_first() {
            None => {
                if left == 0 {
                    out.push(cur.clone());
                }
            }
            Some((&n, rest)) => {
                for m in 0..=left / n {
                    cur.push(m);
                    go(rest, left - m * n, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(blocks, total, &mut Vec::new(), &mut out);
    out
}
