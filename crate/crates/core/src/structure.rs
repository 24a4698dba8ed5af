//! Block structure of a concrete finite-dimensional operator *-algebra.
//!
//! Minimal central projections come from the spectral projections of a
//! random self-adjoint central element; within each central summand, matrix
//! units come from the spectral projections of a random self-adjoint element
//! and one generic off-diagonal compression per row.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::MatrixStarAlgebra;
use crate::linalg::{column_space, coords_in_span, hermitian_eig, null_space, pd_sqrt_pair, CMat, Tolerance};
use crate::scalar::{c, cr, Real, C};
use crate::{Error, Result};

const ATTEMPTS: usize = 8;

/// An isomorphism from a declared [`MatrixStarAlgebra`] onto a concrete algebra:
/// `units[k]` is the image of matrix unit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub algebra: MatrixStarAlgebra,
    pub units: Vec<CMat<T>>,
}

/// Decomposes the algebra spanned by `span` (square matrices of one size).
///
/// The involution is `X ↦ W^{-1} X* W` for the positive definite `weight`
/// (plain adjoint when `None`); the span must be closed under products and
/// this involution.
pub fn decompose<T: Real>(
    span: &[CMat<T>],
    weight: Option<&CMat<T>>,
    tol: &Tolerance<T>,
    seed: u64,
) -> Result<Decomposition<T>> {
    let d = span.first().map_or(0, CMat::rows);
    if span.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::ShapeMismatch("span matrices must share one square shape".into()));
    }
    // conjugate so that the involution becomes the plain adjoint
    let (to, from) = match weight {
        Some(w) => pd_sqrt_pair(w, tol)?,
        None => (CMat::identity(d), CMat::identity(d)),
    };
    let conj: Vec<CMat<T>> = span.iter().map(|m| &(&to * m) * &from).collect();
    let basis = orthonormal_span(&conj, d, tol)?;
    if basis.is_empty() {
        return Ok(Decomposition { algebra: MatrixStarAlgebra::zero(), units: Vec::new() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Error::Structure("no attempt made".into());
    for _ in 0..ATTEMPTS {
        match attempt(&basis, d, tol, &mut rng) {
            Ok((blocks, units)) => {
                let algebra = MatrixStarAlgebra::new(blocks)?;
                let units = units.iter().map(|u| &(&from * u) * &to).collect();
                return Ok(Decomposition { algebra, units });
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn orthonormal_span<T: Real>(mats: &[CMat<T>], d: usize, tol: &Tolerance<T>) -> Result<Vec<CMat<T>>> {
    if mats.is_empty() || d == 0 {
        return Ok(Vec::new());
    }
    let cols: Vec<Vec<C<T>>> = mats.iter().map(CMat::to_vec).collect();
    let s = column_space(&CMat::from_columns(d * d, &cols), tol)?;
    Ok((0..s.cols()).map(|j| CMat::col_vec(&s.column(j)).reshape(d, d)).collect())
}

fn gaussian<T: Real>(rng: &mut ChaCha8Rng) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::lit(x)
}

fn random_hermitian<T: Real>(basis: &[CMat<T>], d: usize, rng: &mut ChaCha8Rng) -> CMat<T> {
    let mut h = CMat::zeros(d, d);
    for b in basis {
        let g: T = gaussian(rng);
        h.axpy(cr(g), &(b + &b.adjoint()));
    }
    h.hermitian_part()
}

fn random_element<T: Real>(basis: &[CMat<T>], d: usize, rng: &mut ChaCha8Rng) -> CMat<T> {
    let mut h = CMat::zeros(d, d);
    for b in basis {
        let (re, im): (T, T) = (gaussian(rng), gaussian(rng));
        h.axpy(c(re, im), b);
    }
    h
}

/// Groups ascending eigenvalues whose neighbours differ by at most `band`.
fn clusters<T: Real>(values: &[T], band: T) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(cl) if v - values[*cl.last().unwrap()] <= band => cl.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn projector<T: Real>(vectors: &CMat<T>, idx: &[usize]) -> CMat<T> {
    let v = vectors.select_columns(idx);
    &v * &v.adjoint()
}

fn in_span<T: Real>(basis: &[CMat<T>], m: &CMat<T>, tol: &Tolerance<T>) -> Result<bool> {
    let (_, res) = coords_in_span(basis, m, tol)?;
    Ok(tol.accepts(res, m.norm_max()))
}

type Attempt<T> = (Vec<usize>, Vec<CMat<T>>);

fn attempt<T: Real>(basis: &[CMat<T>], d: usize, tol: &Tolerance<T>, rng: &mut ChaCha8Rng) -> Result<Attempt<T>> {
    // center
    let comm: Vec<Vec<C<T>>> = basis
        .iter()
        .map(|x| CMat::vstack(&basis.iter().map(|k| &(x * k) - &(k * x)).collect::<Vec<_>>()).to_vec())
        .collect();
    let rows = comm[0].len();
    let ns = null_space(&CMat::from_columns(rows, &comm), tol)?;
    let center: Vec<CMat<T>> = (0..ns.cols())
        .map(|j| {
            let mut z = CMat::zeros(d, d);
            for (k, b) in basis.iter().enumerate() {
                z.axpy(ns[(k, j)], b);
            }
            z
        })
        .collect();

    let h = random_hermitian(&center, d, rng);
    let eig = hermitian_eig(&h, tol)?;
    let band = tol.gap_band(eig.norm());
    let mut central = Vec::new();
    for cl in clusters(&eig.values, band) {
        let p = projector(&eig.vectors, &cl);
        if in_span(basis, &p, tol)? {
            central.push(p);
        } else if eig.values[cl[0]].abs() > band {
            return Err(Error::Structure("spectral projection of a central element left the algebra".into()));
        }
    }

    let mut blocks = Vec::new();
    let mut units = Vec::new();
    for p in &central {
        let sub = orthonormal_span(&basis.iter().map(|k| k * p).collect::<Vec<_>>(), d, tol)?;
        let n = (sub.len() as f64).sqrt().round() as usize;
        if n * n != sub.len() || n == 0 {
            return Err(Error::Structure(format!("central summand of dimension {} is not a full matrix block", sub.len())));
        }
        units.extend(matrix_units(&sub, p, n, d, tol, rng)?);
        blocks.push(n);
    }
    if blocks.iter().map(|n| n * n).sum::<usize>() != basis.len() {
        return Err(Error::Structure("central summands do not exhaust the algebra".into()));
    }
    for u in &units {
        if !in_span(basis, u, tol)? {
            return Err(Error::Structure("matrix unit left the algebra".into()));
        }
    }
    Ok((blocks, units))
}

fn matrix_units<T: Real>(
    sub: &[CMat<T>],
    p: &CMat<T>,
    n: usize,
    d: usize,
    tol: &Tolerance<T>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CMat<T>>> {
    if n == 1 {
        return Ok(vec![p.clone()]);
    }
    // restrict to the range of p so the kernel does not form its own cluster
    let range = hermitian_eig(&p.hermitian_part(), tol)?;
    let keep: Vec<usize> = (0..d).filter(|&i| range.values[i] > T::lit(0.5)).collect();
    let v = range.vectors.select_columns(&keep);
    let x = random_hermitian(sub, d, rng);
    let xr = &(&v.adjoint() * &x) * &v;
    let eig = hermitian_eig(&xr.hermitian_part(), tol)?;
    let cls = clusters(&eig.values, tol.gap_band(eig.norm()));
    if cls.len() != n || cls.iter().any(|c| c.len() != keep.len() / n) {
        return Err(Error::Structure("minimal projections did not separate".into()));
    }
    let q: Vec<CMat<T>> = cls
        .iter()
        .map(|cl| {
            let w = &v * &eig.vectors.select_columns(cl);
            &w * &w.adjoint()
        })
        .collect();

    let y = random_element(sub, d, rng);
    let tr1 = q[0].trace().re;
    let mut col = vec![q[0].clone()];
    for qa in &q[1..] {
        let m = &(qa * &y) * &q[0];
        let c2 = (&m.adjoint() * &m).trace().re / tr1;
        if c2 <= tol.threshold(T::one()) {
            return Err(Error::Structure("degenerate off-diagonal compression".into()));
        }
        col.push(m.scale_real(T::one() / c2.sqrt()));
    }
    let mut units = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            units.push(&col[a] * &col[b].adjoint());
        }
    }
    Ok(units)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn check_units(dec: &Decomposition<f64>) {
        let a = &dec.algebra;
        for k in 0..a.dim() {
            for l in 0..a.dim() {
                let prod = &dec.units[k] * &dec.units[l];
                let want = a.product_index(k, l).map_or(CMat::zeros(prod.rows(), prod.cols()), |p| dec.units[p].clone());
                assert!(prod.dist_max(&want) < 1e-9, "units {k},{l}");
            }
            assert!(dec.units[a.star_index(k)].dist_max(&dec.units[k].adjoint()) < 1e-9);
        }
    }

    #[test]
    fn full_matrix_algebra() {
        let span: Vec<CMat<f64>> = (0..4).map(|k| CMat::unit(2, 2, k / 2, k % 2)).collect();
        let dec = decompose(&span, None, &tol(), 1).unwrap();
        assert_eq!(dec.algebra.blocks(), &[2]);
        check_units(&dec);
    }

    #[test]
    fn block_diagonal_with_multiplicity() {
        // ℂ ⊕ (M_2 ⊗ I_2) inside M_5
        let m2 = MatrixStarAlgebra::full(2);
        let mut span = vec![CMat::<f64>::unit(5, 5, 0, 0)];
        for k in 0..4 {
            let u = m2.unit_of(k);
            let e = CMat::unit(2, 2, u.row, u.col).kron(&CMat::identity(2));
            let mut m = CMat::zeros(5, 5);
            m.set_submatrix(1, 1, &e);
            span.push(m);
        }
        let dec = decompose(&span, None, &tol(), 7).unwrap();
        let mut blocks = dec.algebra.blocks().to_vec();
        blocks.sort();
        assert_eq!(blocks, vec![1, 2]);
        check_units(&dec);
    }

    #[test]
    fn weighted_involution() {
        // diagonal algebra ℂ² is closed under any diagonal-weight involution
        let w = CMat::diag_real(&[2.0, 5.0]);
        let span = vec![CMat::<f64>::unit(2, 2, 0, 0), CMat::unit(2, 2, 1, 1)];
        let dec = decompose(&span, Some(&w), &tol(), 3).unwrap();
        assert_eq!(dec.algebra.blocks(), &[1, 1]);
    }
}
