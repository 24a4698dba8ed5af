//! Finite-dimensional Hilbert C*-modules over matrix *-algebras.
//!
//! A module of dimension `d` over `A` is stored in coordinates: the right
//! action of each matrix unit `b_α` is a `d × d` matrix `R_α` whose column `s`
//! holds `e_s · b_α`, and each inner product `⟨e_s, e_t⟩` is a coefficient
//! vector in `A`. Inner products are conjugate-linear in the first slot.

pub(crate) mod dual;
pub(crate) mod ops;
mod quotient;
mod tensor;

pub use dual::{compact_iso, dual_module, DualModule, DualReport};
pub use ops::{
    adjoint_of, compact_space, is_full, module_adjoint, operator_norm, rank_one, ActionReport, AdjointableOp,
    ModuleAction, theta_residuals,
};
pub use quotient::{localize_module, operator_seminorm, quotient_module, Localized, ModuleTower, ModuleTowerReport, Quotient};
pub use tensor::{inner_tensor, InnerTensor};

use crate::algebra::{AlgElem, MatrixStarAlgebra, UnitIndex};
use crate::linalg::{hermitian_eig, lstsq, CMat, Tolerance};
use crate::scalar::{cone, czero, Real, C};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertModule<T> {
    over: MatrixStarAlgebra,
    dim: usize,
    action: Vec<CMat<T>>,
    /// `gram[s * dim + t]` is the coefficient vector of `⟨e_s, e_t⟩`.
    gram: Vec<Vec<C<T>>>,
}

impl<T: Real> HilbertModule<T> {
    /// From the flat tensors: `action` is `d × (dim(A)·d)` with entry
    /// `[s', α·d + s]` the `s'` coordinate of `e_s · b_α`; `inner` is
    /// `dim(A) × d²` with entry `[α, s·d + t]` the `b_α` coefficient of `⟨e_s, e_t⟩`.
    pub fn new(over: MatrixStarAlgebra, dim: usize, action: &CMat<T>, inner: &CMat<T>) -> Result<Self> {
        let n = over.dim();
        if action.shape() != (dim, n * dim) {
            return Err(Error::ShapeMismatch(format!(
                "action tensor is {}x{}, expected {}x{}",
                action.rows(),
                action.cols(),
                dim,
                n * dim
            )));
        }
        if inner.shape() != (n, dim * dim) {
            return Err(Error::ShapeMismatch(format!(
                "inner tensor is {}x{}, expected {}x{}",
                inner.rows(),
                inner.cols(),
                n,
                dim * dim
            )));
        }
        if !action.is_finite() || !inner.is_finite() {
            return Err(Error::InvalidModule("non-finite entries".into()));
        }
        let action = (0..n).map(|a| action.submatrix(0, a * dim, dim, dim)).collect();
        let gram = (0..dim * dim).map(|st| inner.column(st)).collect();
        Ok(Self { over, dim, action, gram })
    }

    /// From per-unit action matrices and a function giving `⟨e_s, e_t⟩`.
    pub fn from_parts(
        over: MatrixStarAlgebra,
        dim: usize,
        action: Vec<CMat<T>>,
        gram: impl Fn(usize, usize) -> Vec<C<T>>,
    ) -> Result<Self> {
        if action.len() != over.dim() || action.iter().any(|r| r.shape() != (dim, dim)) {
            return Err(Error::ShapeMismatch("one d×d action matrix per algebra basis element".into()));
        }
        let mut g = Vec::with_capacity(dim * dim);
        for s in 0..dim {
            for t in 0..dim {
                let v = gram(s, t);
                if v.len() != over.dim() {
                    return Err(Error::ShapeMismatch("inner product coefficient length".into()));
                }
                g.push(v);
            }
        }
        Ok(Self { over, dim, action, gram: g })
    }

    /// `⊕_i ℂ^{m_i × n_i}` over `⊕_i M_{n_i}` with `⟨x, y⟩_i = x_i* H_i y_i`;
    /// `H_i = I` when `weights` is `None`.
    pub fn standard(over: &MatrixStarAlgebra, mults: &[usize], weights: Option<&[CMat<T>]>) -> Result<Self> {
        let blocks = over.blocks();
        if mults.len() != blocks.len() {
            return Err(Error::ShapeMismatch("one multiplicity per block".into()));
        }
        if let Some(w) = weights {
            if w.len() != blocks.len() || w.iter().zip(mults).any(|(h, &m)| h.shape() != (m, m)) {
                return Err(Error::ShapeMismatch("weight i must be m_i × m_i".into()));
            }
        }
        let mut offsets = vec![0];
        for (&m, &n) in mults.iter().zip(blocks) {
            offsets.push(offsets.last().unwrap() + m * n);
        }
        let d = *offsets.last().unwrap();
        let mut action = vec![CMat::zeros(d, d); over.dim()];
        for (k, r) in action.iter_mut().enumerate() {
            let u = over.unit_of(k);
            let n = blocks[u.block];
            for row in 0..mults[u.block] {
                let o = offsets[u.block] + row * n;
                r[(o + u.col, o + u.row)] = cone();
            }
        }
        let coord = |s: usize| {
            let i = offsets.partition_point(|&o| o <= s) - 1;
            let n = blocks[i];
            let r = s - offsets[i];
            (i, r / n, r % n)
        };
        Self::from_parts(over.clone(), d, action, |s, t| {
            let mut v = vec![czero(); over.dim()];
            let ((i, r, a), (j, r2, b)) = (coord(s), coord(t));
            if i == j {
                let h = weights.map_or(if r == r2 { cone() } else { czero() }, |w| w[i][(r, r2)]);
                v[over.index_of(UnitIndex { block: i, row: a, col: b })] = h;
            }
            v
        })
    }

    /// `A` as a module over itself with `⟨a, b⟩ = a* b`.
    pub fn over_itself(over: &MatrixStarAlgebra) -> Self {
        Self::standard(over, over.blocks(), None).expect("block sizes are valid multiplicities")
    }

    /// Row vectors `ℂ^{1×n}` over `M_n`, `⟨ξ, η⟩ = ξ* η`.
    pub fn row_module(n: usize) -> Self {
        Self::standard(&MatrixStarAlgebra::full(n), &[1], None).expect("single block")
    }

    /// `ℂ^n` as a Hilbert module over `ℂ`.
    pub fn hilbert_space(n: usize) -> Self {
        Self::standard(&MatrixStarAlgebra::full(1), &[n], None).expect("single block")
    }

    pub fn zero(over: &MatrixStarAlgebra) -> Self {
        Self { over: over.clone(), dim: 0, action: vec![CMat::zeros(0, 0); over.dim()], gram: Vec::new() }
    }

    pub fn over(&self) -> &MatrixStarAlgebra {
        &self.over
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R_α`, the matrix of `ξ ↦ ξ · b_α`.
    pub fn right_action(&self, alpha: usize) -> &CMat<T> {
        &self.action[alpha]
    }

    /// Matrix of `ξ ↦ ξ · a` for a coefficient vector `a`.
    pub fn action_of(&self, a: &[C<T>]) -> CMat<T> {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (r, &c) in self.action.iter().zip(a) {
            if c != czero() {
                m.axpy(c, r);
            }
        }
        m
    }

    pub fn action_tensor(&self) -> CMat<T> {
        CMat::hstack(&self.action)
    }

    pub fn inner_tensor(&self) -> CMat<T> {
        CMat::from_columns(self.over.dim(), &self.gram)
    }

    /// Coefficients of `⟨e_s, e_t⟩`.
    pub fn gram_coeffs(&self, s: usize, t: usize) -> &[C<T>] {
        &self.gram[s * self.dim + t]
    }

    pub fn gram_entry(&self, s: usize, t: usize) -> AlgElem<T> {
        self.over.element(self.gram_coeffs(s, t)).expect("stored with the algebra dimension")
    }

    pub fn act(&self, x: &[C<T>], a: &AlgElem<T>) -> Result<Vec<C<T>>> {
        if a.parent() != &self.over {
            return Err(Error::ParentMismatch);
        }
        self.check_vec(x)?;
        Ok(self.action_of(&a.to_vec()).mul_vec(x))
    }

    /// Coefficients of `⟨x, y⟩`.
    pub fn inner_coeffs(&self, x: &[C<T>], y: &[C<T>]) -> Vec<C<T>> {
        let mut v = vec![czero(); self.over.dim()];
        for s in 0..self.dim {
            let xs = x[s].conj();
            if xs == czero() {
                continue;
            }
            for t in 0..self.dim {
                let c = xs * y[t];
                if c == czero() {
                    continue;
                }
                for (acc, g) in v.iter_mut().zip(self.gram_coeffs(s, t)) {
                    *acc += c * *g;
                }
            }
        }
        v
    }

    pub fn inner(&self, x: &[C<T>], y: &[C<T>]) -> Result<AlgElem<T>> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        self.over.element(&self.inner_coeffs(x, y))
    }

    /// `||ξ|| = ||⟨ξ, ξ⟩||^{1/2}`.
    pub fn norm(&self, x: &[C<T>]) -> Result<T> {
        Ok(self.inner(x, x)?.norm().sqrt())
    }

    /// `M_i[(a,s),(b,t)] = ⟨e_s, e_t⟩_i[a,b]`, indexed `a·d + s`.
    pub fn choi_block(&self, i: usize) -> CMat<T> {
        let n = self.over.blocks()[i];
        let d = self.dim;
        CMat::from_fn(n * d, n * d, |r, c| {
            let (a, s, b, t) = (r / d, r % d, c / d, c % d);
            self.gram_coeffs(s, t)[self.over.index_of(UnitIndex { block: i, row: a, col: b })]
        })
    }

    /// `Q[s,t] = tr ⟨e_s, e_t⟩`, so that `x* Q y = tr ⟨x, y⟩`.
    pub fn trace_gram(&self) -> CMat<T> {
        let diag = self.over.diagonal_units();
        CMat::from_fn(self.dim, self.dim, |s, t| {
            let g = self.gram_coeffs(s, t);
            diag.iter().fold(czero(), |acc, &k| acc + g[k])
        })
    }

    /// Largest coefficient in the inner product and the action.
    pub fn scale(&self) -> T {
        let g = self.gram.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max);
        let r = self.action.iter().map(CMat::norm_max).fold(T::zero(), T::max);
        g.max(r)
    }

    /// The same module in the basis `e'_j = Σ_i S[i,j] e_i`; `S` must be invertible.
    pub fn change_basis(&self, s: &CMat<T>, tol: &Tolerance<T>) -> Result<Self> {
        let d = self.dim;
        if s.shape() != (d, d) {
            return Err(Error::ShapeMismatch("basis change must be d × d".into()));
        }
        let (s_inv, res) = lstsq(s, &CMat::identity(d), tol)?;
        if !tol.accepts((s * &s_inv).dist_max(&CMat::identity(d)), T::one()) {
            return Err(Error::Singular(res.to_f64_lossy()));
        }
        let action = self.action.iter().map(|r| &(&s_inv * r) * s).collect();
        let cols: Vec<Vec<C<T>>> = (0..d).map(|j| s.column(j)).collect();
        Self::from_parts(self.over.clone(), d, action, |a, b| self.inner_coeffs(&cols[a], &cols[b]))
    }

    /// `E ⊕ F` with orthogonal summands.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.over != other.over {
            return Err(Error::AlgebraMismatch);
        }
        let (d1, d2) = (self.dim, other.dim);
        let action = self.action.iter().zip(&other.action).map(|(a, b)| CMat::block_diag(&[a.clone(), b.clone()])).collect();
        let zero = vec![czero(); self.over.dim()];
        Self::from_parts(self.over.clone(), d1 + d2, action, |s, t| match (s < d1, t < d1) {
            (true, true) => self.gram_coeffs(s, t).to_vec(),
            (false, false) => other.gram_coeffs(s - d1, t - d1).to_vec(),
            _ => zero.clone(),
        })
    }

    fn check_vec(&self, x: &[C<T>]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::ShapeMismatch(format!("module element of length {} in dimension {}", x.len(), self.dim)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleReport<T> {
    /// `(ξa)b = ξ(ab)` and `ξ·1 = ξ`.
    pub assoc_ok: bool,
    /// `⟨ξ, ηa⟩ = ⟨ξ, η⟩a`.
    pub linearity_ok: bool,
    /// `⟨ξ, η⟩* = ⟨η, ξ⟩`.
    pub symmetry_ok: bool,
    /// Every block-Choi matrix is PSD.
    pub psd_ok: bool,
    /// `⟨ξ, ξ⟩ = 0` only for `ξ = 0`.
    pub definite_ok: bool,
    pub full: bool,
    pub assoc_residual: T,
    pub linearity_residual: T,
    pub symmetry_residual: T,
    pub min_choi_eigenvalue: T,
    pub min_trace_gram_eigenvalue: T,
}

impl<T: Real> ModuleReport<T> {
    /// All axioms hold; fullness is reported separately.
    pub fn is_valid(&self) -> bool {
        self.assoc_ok && self.linearity_ok && self.symmetry_ok && self.psd_ok && self.definite_ok
    }

    pub fn max_residual(&self) -> T {
        self.assoc_residual.max(self.linearity_residual).max(self.symmetry_residual)
    }
}

pub fn validate_module<T: Real>(e: &HilbertModule<T>, tol: &Tolerance<T>) -> Result<ModuleReport<T>> {
    let alg = &e.over;
    let d = e.dim;
    let n = alg.dim();
    let scale_r = e.action.iter().map(CMat::norm_max).fold(T::zero(), T::max);
    let scale_g = e.gram.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max);

    let zero = CMat::zeros(d, d);
    let mut assoc_residual = T::zero();
    for k in 0..n {
        for l in 0..n {
            let lhs = &e.action[l] * &e.action[k];
            let rhs = alg.product_index(k, l).map_or(&zero, |p| &e.action[p]);
            assoc_residual = assoc_residual.max(lhs.dist_max(rhs));
        }
    }
    let unit = e.action_of(&alg.unit::<T>().to_vec());
    let unit_residual = unit.dist_max(&CMat::identity(d));

    let right: Vec<CMat<T>> = (0..n).map(|k| alg.right_mult(k)).collect();
    let mut linearity_residual = T::zero();
    let mut symmetry_residual = T::zero();
    for s in 0..d {
        for t in 0..d {
            let g = e.gram_coeffs(s, t);
            for (k, rk) in right.iter().enumerate() {
                let mut lhs: Vec<C<T>> = vec![czero(); n];
                for u in 0..d {
                    let c = e.action[k][(u, t)];
                    if c != czero() {
                        for (acc, x) in lhs.iter_mut().zip(e.gram_coeffs(s, u)) {
                            *acc += c * *x;
                        }
                    }
                }
                let rhs = rk.mul_vec(g);
                let r = lhs.iter().zip(&rhs).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max);
                linearity_residual = linearity_residual.max(r);
            }
            let gs = e.gram_entry(s, t).star();
            let gt = e.gram_entry(t, s);
            symmetry_residual = symmetry_residual.max(gs.sub(&gt)?.norm_max());
        }
    }

    let mut psd_ok = true;
    let mut min_choi = T::zero();
    for i in 0..alg.num_blocks() {
        let m = e.choi_block(i).hermitian_part();
        if m.rows() == 0 {
            continue;
        }
        let eig = hermitian_eig(&m, tol)?;
        let min = eig.values[0];
        min_choi = if i == 0 { min } else { min_choi.min(min) };
        psd_ok &= min >= -tol.threshold(eig.norm());
    }

    let q = e.trace_gram().hermitian_part();
    let (definite_ok, min_q) = if d == 0 {
        (true, T::zero())
    } else {
        let eig = hermitian_eig(&q, tol)?;
        let min = eig.values[0];
        (min > tol.threshold(eig.norm()), min)
    };

    Ok(ModuleReport {
        assoc_ok: tol.accepts(assoc_residual.max(unit_residual), scale_r * scale_r),
        linearity_ok: tol.accepts(linearity_residual, scale_g * scale_r.max(T::one())),
        symmetry_ok: tol.accepts(symmetry_residual, scale_g),
        psd_ok,
        definite_ok: psd_ok && definite_ok,
        full: is_full(e, tol),
        assoc_residual: assoc_residual.max(unit_residual),
        linearity_residual,
        symmetry_residual,
        min_choi_eigenvalue: min_choi,
        min_trace_gram_eigenvalue: min_q,
    })
}

/// Errors unless the module satisfies every axiom.
pub fn require_valid<T: Real>(e: &HilbertModule<T>, tol: &Tolerance<T>) -> Result<ModuleReport<T>> {
    let r = validate_module(e, tol)?;
    if !r.is_valid() {
        return Err(Error::InvalidModule(format!(
            "assoc {} linearity {} symmetry {} psd {} definite {}",
            r.assoc_ok, r.linearity_ok, r.symmetry_ok, r.psd_ok, r.definite_ok
        )));
    }
    Ok(r)
}
