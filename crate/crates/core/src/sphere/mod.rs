//! Bidegree harmonic spaces H(p, q) on the unit sphere of ℂⁿ, built in exact
//! rational arithmetic.
//!
//! A monomial z^α z̄^β carries the torus weight α − β. Both the Laplacian
//! 4 Σ ∂²/∂z_j∂z̄_j and the L²(dσ) inner product preserve that weight, so the
//! nullspace and the Gram–Schmidt pass run block by block.

mod cache;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::integer_nullspace;
use crate::scalar::ratio_to_f64;

pub use cache::{read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};

/// Exponent vector of a monomial in n variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self { entries }
    }

    pub fn zero(n: usize) -> Self {
        Self { entries: vec![0; n] }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// All exponent vectors in `n` variables of total degree `d`, in
    /// lexicographically decreasing order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(MultiIndex::new(cur.clone()));
                return;
            }
            for v in (0..=left).rev() {
                cur[pos] = v;
                rec(pos + 1, left - v, cur, out);
            }
        }
        if n > 0 {
            rec(0, d, &mut cur, &mut out);
        }
        out
    }

    fn factorial(&self) -> BigInt {
        self.entries.iter().map(|&e| factorial_big(e as u64)).product()
    }
}

fn factorial_big(k: u64) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

/// dim H(p, q) = (p+q+n−1)(p+n−2)!(q+n−2)! / (p! q! (n−1)! (n−2)!).
pub fn harmonic_dimension(n: usize, p: usize, q: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::Parameter(format!("harmonic spaces need n >= 2, got {n}")));
    }
    let (n, p, q) = (n as u64, p as u64, q as u64);
    let num = BigInt::from(p + q + n - 1) * factorial_big(p + n - 2) * factorial_big(q + n - 2);
    let den = factorial_big(p) * factorial_big(q) * factorial_big(n - 1) * factorial_big(n - 2);
    let v = num / den;
    u64::try_from(v).map_err(|_| Error::Capacity("dimension exceeds u64".into()))
}

/// ∫ z^α z̄^β dσ over the normalized sphere measure.
pub fn sphere_monomial_integral(alpha: &MultiIndex, beta: &MultiIndex) -> BigRational {
    assert_eq!(alpha.dim(), beta.dim(), "multi-indices over different dimensions");
    if alpha != beta {
        return BigRational::zero();
    }
    let n = alpha.dim() as u64;
    let num = factorial_big(n - 1) * alpha.factorial();
    let den = factorial_big(n - 1 + alpha.degree() as u64);
    BigRational::new(num, den)
}

/// Largest monomial count accepted by [`build_harmonic_basis`].
pub const DEFAULT_MONOMIAL_CAPACITY: usize = 200_000;

/// Exact orthogonal basis of H(p, q) with the squared norms of its rows.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    n: usize,
    p: usize,
    q: usize,
    /// (α, β) for every column, z^α z̄^β
    monomials: Vec<(MultiIndex, MultiIndex)>,
    coeffs: Vec<Vec<BigRational>>,
    sq_norms: Vec<BigRational>,
    /// sparse normalized rows for floating evaluation
    scaled: Vec<Vec<(usize, f64)>>,
}

fn bidegree_monomials(n: usize, p: usize, q: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let alphas = MultiIndex::all_of_degree(n, p as u32);
    let betas = MultiIndex::all_of_degree(n, q as u32);
    let mut out = Vec::with_capacity(alphas.len() * betas.len());
    for a in &alphas {
        for b in &betas {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

fn weight(a: &MultiIndex, b: &MultiIndex) -> Vec<i64> {
    a.entries.iter().zip(&b.entries).map(|(&x, &y)| x as i64 - y as i64).collect()
}

/// ⟨z^α z̄^β, z^γ z̄^δ⟩ = ∫ z^{α+δ} z̄^{β+γ} dσ.
pub fn monomial_inner(x: &(MultiIndex, MultiIndex), y: &(MultiIndex, MultiIndex)) -> BigRational {
    let hol: Vec<u32> = x.0.entries.iter().zip(&y.1.entries).map(|(a, b)| a + b).collect();
    let anti: Vec<u32> = x.1.entries.iter().zip(&y.0.entries).map(|(a, b)| a + b).collect();
    sphere_monomial_integral(&MultiIndex::new(hol), &MultiIndex::new(anti))
}

/// Columns grouped by torus weight.
fn weight_blocks(monomials: &[(MultiIndex, MultiIndex)]) -> BTreeMap<Vec<i64>, Vec<usize>> {
    let mut blocks: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, (a, b)) in monomials.iter().enumerate() {
        blocks.entry(weight(a, b)).or_default().push(i);
    }
    blocks
}

/// Integer matrix of the Laplacian 4 Σ_j ∂²/∂z_j∂z̄_j from bidegree (p, q)
/// into (p−1, q−1), restricted to the given columns.
fn laplacian_rows(
    n: usize,
    cols: &[usize],
    monomials: &[(MultiIndex, MultiIndex)],
) -> Vec<Vec<BigInt>> {
    let mut targets: BTreeMap<(MultiIndex, MultiIndex), Vec<BigInt>> = BTreeMap::new();
    for (c, &col) in cols.iter().enumerate() {
        let (a, b) = &monomials[col];
        for j in 0..n {
            if a.entries[j] > 0 && b.entries[j] > 0 {
                let coef = BigInt::from(4u64 * a.entries[j] as u64 * b.entries[j] as u64);
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2.entries[j] -= 1;
                b2.entries[j] -= 1;
                let row = targets.entry((a2, b2)).or_insert_with(|| vec![BigInt::zero(); cols.len()]);
                row[c] += coef;
            }
        }
    }
    targets.into_values().collect()
}

/// Applies the Laplacian to a coefficient row; used to certify harmonicity.
pub fn apply_laplacian(basis: &HarmonicBasis, row: &[BigRational]) -> Vec<BigRational> {
    let all: Vec<usize> = (0..basis.monomials.len()).collect();
    let mat = laplacian_rows(basis.n, &all, &basis.monomials);
    mat.iter()
        .map(|r| {
            r.iter()
                .zip(row)
                .fold(BigRational::zero(), |acc, (m, c)| acc + BigRational::from_integer(m.clone()) * c)
        })
        .collect()
}

/// Dimension of the Laplacian nullspace computed exactly, without the
/// orthogonalization pass.
pub fn harmonic_nullspace_dim(n: usize, p: usize, q: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::Parameter(format!("harmonic spaces need n >= 2, got {n}")));
    }
    let monomials = bidegree_monomials(n, p, q);
    Ok(weight_blocks(&monomials)
        .values()
        .map(|cols| integer_nullspace(&laplacian_rows(n, cols, &monomials), cols.len()).len())
        .sum())
}

pub fn build_harmonic_basis(n: usize, p: usize, q: usize) -> Result<HarmonicBasis> {
    build_harmonic_basis_with_capacity(n, p, q, DEFAULT_MONOMIAL_CAPACITY)
}

pub fn build_harmonic_basis_with_capacity(n: usize, p: usize, q: usize, capacity: usize) -> Result<HarmonicBasis> {
    if n < 2 {
        return Err(Error::Parameter(format!("harmonic spaces need n >= 2, got {n}")));
    }
    let count = MultiIndex::all_of_degree(n, p as u32).len() * MultiIndex::all_of_degree(n, q as u32).len();
    if count > capacity {
        return Err(Error::Capacity(format!("{count} monomials exceed the bound {capacity}")));
    }
    let monomials = bidegree_monomials(n, p, q);
    let mut coeffs = Vec::new();
    let mut sq_norms = Vec::new();
    for cols in weight_blocks(&monomials).values() {
        let null = integer_nullspace(&laplacian_rows(n, cols, &monomials), cols.len());
        let gram = block_gram(cols, &monomials);
        let mut done: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for v in null {
            let mut w: Vec<BigRational> = v.into_iter().map(BigRational::from_integer).collect();
            for (u, norm) in &done {
                let proj = block_inner(&w, u, &gram) / norm;
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= &proj * ui;
                }
            }
            clear_denominators(&mut w);
            let norm = block_inner(&w, &w, &gram);
            done.push((w, norm));
        }
        for (w, norm) in done {
            let mut row = vec![BigRational::zero(); monomials.len()];
            for (local, &col) in cols.iter().enumerate() {
                row[col] = w[local].clone();
            }
            coeffs.push(row);
            sq_norms.push(norm);
        }
    }
    Ok(HarmonicBasis::assemble(n, p, q, monomials, coeffs, sq_norms))
}

fn block_gram(cols: &[usize], monomials: &[(MultiIndex, MultiIndex)]) -> Vec<Vec<BigRational>> {
    cols.iter()
        .map(|&i| cols.iter().map(|&j| monomial_inner(&monomials[i], &monomials[j])).collect())
        .collect()
}

fn block_inner(u: &[BigRational], v: &[BigRational], gram: &[Vec<BigRational>]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() || gram[i][j].is_zero() {
                continue;
            }
            acc += ui * vj * &gram[i][j];
        }
    }
    acc
}

/// Rescales a rational vector to coprime integers with a positive leading
/// entry; keeps the stored coefficients small.
fn clear_denominators(v: &mut [BigRational]) {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(BigInt::one);
    for (slot, x) in v.iter_mut().zip(ints) {
        *slot = BigRational::from_integer(x * &sign / &g);
    }
}

impl HarmonicBasis {
    fn assemble(
        n: usize,
        p: usize,
        q: usize,
        monomials: Vec<(MultiIndex, MultiIndex)>,
        coeffs: Vec<Vec<BigRational>>,
        sq_norms: Vec<BigRational>,
    ) -> Self {
        let scaled = coeffs
            .iter()
            .zip(&sq_norms)
            .map(|(row, norm)| {
                let s = ratio_to_f64(norm).sqrt();
                row.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i, ratio_to_f64(c) / s))
                    .collect()
            })
            .collect();
        Self { n, p, q, monomials, coeffs, sq_norms, scaled }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn monomials(&self) -> &[(MultiIndex, MultiIndex)] {
        &self.monomials
    }

    pub fn coeffs(&self) -> &[Vec<BigRational>] {
        &self.coeffs
    }

    pub fn sq_norms(&self) -> &[BigRational] {
        &self.sq_norms
    }

    /// Exact L²(dσ) inner product of two coefficient rows.
    pub fn inner(&self, u: &[BigRational], v: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let g = monomial_inner(&self.monomials[i], &self.monomials[j]);
                if !g.is_zero() {
                    acc += ui * vj * g;
                }
            }
        }
        acc
    }

    /// Exact Gram matrix of the stored rows.
    pub fn gram(&self) -> Vec<Vec<BigRational>> {
        self.coeffs
            .iter()
            .map(|u| self.coeffs.iter().map(|v| self.inner(u, v)).collect())
            .collect()
    }

    /// Another orthogonal basis of the same space: rows mixed by a
    /// deterministic pseudo-random integer matrix, then re-orthogonalized
    /// with the full inner product.
    pub fn reorthogonalized(&self, seed: u64) -> HarmonicBasis {
        let d = self.dim();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        let mut mixed: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = vec![BigRational::zero(); self.monomials.len()];
            for (j, src) in self.coeffs.iter().enumerate() {
                let w = if i == j { next() + 10 } else { next() };
                if w == 0 {
                    continue;
                }
                let w = BigRational::from_integer(BigInt::from(w));
                for (slot, c) in row.iter_mut().zip(src) {
                    *slot += &w * c;
                }
            }
            mixed.push(row);
        }
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        let mut norms: Vec<BigRational> = Vec::with_capacity(d);
        for mut w in mixed {
            for (u, nu) in rows.iter().zip(&norms) {
                let proj = self.inner(&w, u) / nu;
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= &proj * ui;
                }
            }
            clear_denominators(&mut w);
            let nrm = self.inner(&w, &w);
            rows.push(w);
            norms.push(nrm);
        }
        HarmonicBasis::assemble(self.n, self.p, self.q, self.monomials.clone(), rows, norms)
    }

    /// Values z^α z̄^β of all monomials at z.
    pub fn monomial_values(&self, z: &[Complex64]) -> Vec<Complex64> {
        let maxdeg = self.p.max(self.q);
        let pows: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zi| {
                let mut v = Vec::with_capacity(maxdeg + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=maxdeg {
                    v.push(acc);
                    acc *= zi;
                }
                v
            })
            .collect();
        self.monomials
            .iter()
            .map(|(a, b)| {
                let mut acc = Complex64::new(1.0, 0.0);
                for i in 0..self.n {
                    acc *= pows[i][a.entries[i] as usize] * pows[i][b.entries[i] as usize].conj();
                }
                acc
            })
            .collect()
    }

    /// Orthonormal h^j(z, z̄), j = 0..d (zero-based).
    pub fn eval(&self, j: usize, z: &[Complex64]) -> Result<Complex64> {
        if j >= self.dim() {
            return Err(Error::Index(format!("basis index {j} out of range 0..{}", self.dim())));
        }
        if z.len() != self.n {
            return Err(Error::Parameter(format!("point has {} coordinates, expected {}", z.len(), self.n)));
        }
        let vals = self.monomial_values(z);
        Ok(self.scaled[j].iter().map(|&(i, c)| vals[i] * c).sum())
    }

    /// All orthonormal basis values at z.
    pub fn eval_all(&self, z: &[Complex64]) -> Vec<Complex64> {
        let vals = self.monomial_values(z);
        self.scaled
            .iter()
            .map(|row| row.iter().map(|&(i, c)| vals[i] * c).sum())
            .collect()
    }

    /// Σ_j h^j(θ) conj h^j(ω), the reproducing kernel of H(p, q).
    pub fn zonal(&self, theta: &[Complex64], omega: &[Complex64]) -> Complex64 {
        let a = self.eval_all(theta);
        let b = self.eval_all(omega);
        a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum()
    }
}

/// Exact L²(dσ) pairing of row `i` of `a` with row `j` of `b`, unnormalized.
pub fn cross_inner(a: &HarmonicBasis, i: usize, b: &HarmonicBasis, j: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for (ka, ca) in a.coeffs[i].iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (kb, cb) in b.coeffs[j].iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let g = monomial_inner(&a.monomials[ka], &b.monomials[kb]);
            if !g.is_zero() {
                acc += ca * cb * g;
            }
        }
    }
    acc
}

/// Σ_j |h^j(θ)|², equal to dim H(p, q) on the unit sphere.
pub fn addition_kernel_check(basis: &HarmonicBasis, theta: &[Complex64]) -> Result<f64> {
    let norm: f64 = theta.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-14 {
        return Err(Error::Domain(format!("|θ|² = {norm} is not on the unit sphere")));
    }
    Ok(basis.eval_all(theta).iter().map(|h| h.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(harmonic_dimension(4, 0, 0).unwrap(), 1);
        assert_eq!(harmonic_dimension(2, 1, 1).unwrap(), 3);
        assert_eq!(harmonic_dimension(3, 2, 1).unwrap(), 15);
        assert_eq!(harmonic_dimension(2, 2, 0).unwrap(), 3);
        assert!(harmonic_dimension(1, 0, 0).is_err());
    }

    #[test]
    fn monomial_integrals() {
        let z = MultiIndex::zero(2);
        assert_eq!(sphere_monomial_integral(&z, &z), rational(1, 1));
        let e1 = MultiIndex::new(vec![1, 0]);
        let e2 = MultiIndex::new(vec![0, 1]);
        assert_eq!(sphere_monomial_integral(&e1, &e1), rational(1, 2));
        assert_eq!(sphere_monomial_integral(&e1, &e2), rational(0, 1));
        // n = 3, |z_1|^4 |z_2|^2: 2! 2! 1! / 5! = 1/30
        let a = MultiIndex::new(vec![2, 1, 0]);
        assert_eq!(sphere_monomial_integral(&a, &a), rational(1, 30));
    }

    #[test]
    fn small_bases() {
        let b = build_harmonic_basis(2, 0, 0).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.sq_norms()[0], rational(1, 1));

        let b = build_harmonic_basis(2, 1, 0).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.monomials().iter().all(|(_, beta)| beta.degree() == 0));

        let b = build_harmonic_basis(2, 1, 1).unwrap();
        assert_eq!(b.dim(), 3);
        // the weight-zero row is z1 z̄1 − z2 z̄2 up to sign
        let diag = b
            .coeffs()
            .iter()
            .zip(b.sq_norms())
            .find(|(row, _)| row.iter().filter(|c| !c.is_zero()).count() == 2)
            .unwrap();
        let nonzero: Vec<_> = diag.0.iter().filter(|c| !c.is_zero()).cloned().collect();
        assert_eq!(nonzero[0].clone() + nonzero[1].clone(), rational(0, 1));
        // ‖z1 z̄1 − z2 z̄2‖² = 1/3 + 1/3 − 2·1/6 = 1/3
        assert_eq!(diag.1.clone() / (nonzero[0].clone() * nonzero[0].clone()), rational(1, 3));
    }

    #[test]
    fn eval_normalization_and_homogeneity() {
        let b = build_harmonic_basis(2, 1, 1).unwrap();
        let theta = [c(1.0, 0.0), c(0.0, 0.0)];
        // only the weight-zero row survives at θ = e1; its value is ±√3
        let vals = b.eval_all(&theta);
        let nonzero: Vec<f64> = vals.iter().map(|v| v.norm()).filter(|v| *v > 1e-14).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0] - 3f64.sqrt()).abs() < 1e-14);

        let b = build_harmonic_basis(3, 2, 1).unwrap();
        let th = [c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)];
        let r = 0.7;
        let scaled: Vec<Complex64> = th.iter().map(|z| z * r).collect();
        for j in 0..b.dim() {
            let lhs = b.eval(j, &scaled).unwrap();
            let rhs = b.eval(j, &th).unwrap() * r.powi(3);
            assert!((lhs - rhs).norm() < 1e-14);
        }
        assert!(b.eval(b.dim(), &th).is_err());
    }

    #[test]
    fn constant_basis_and_addition_kernel() {
        let b = build_harmonic_basis(2, 0, 0).unwrap();
        assert!((b.eval(0, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap() - 1.0).norm() < 1e-15);
        let b = build_harmonic_basis(2, 1, 1).unwrap();
        assert!((addition_kernel_check(&b, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap() - 3.0).abs() < 1e-13);
        let b = build_harmonic_basis(2, 2, 0).unwrap();
        let th = [c(0.36, 0.48), c(-0.8 * 0.6, 0.8 * 0.8 * 0.0 + 0.64)];
        let norm: f64 = th.iter().map(|z| z.norm_sqr()).sum();
        let th: Vec<Complex64> = th.iter().map(|z| z / norm.sqrt()).collect();
        assert!((addition_kernel_check(&b, &th).unwrap() - 3.0).abs() < 1e-12);
        assert!(addition_kernel_check(&b, &[c(0.5, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn capacity_bound() {
        assert!(matches!(build_harmonic_basis_with_capacity(3, 2, 2, 10), Err(Error::Capacity(_))));
    }
}
