//! The eigenspace A_m^{2,ν}: eigenvalue, orthonormal basis Φ_{p,q,j},
//! reproducing kernel, coherent-state normalization and overlaps, Poisson
//! kernels, and finite-difference application of the magnetic operator.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{cosh2_distance, radial_rule, tanh2_distance, BallPoint};
use crate::orthopoly::{jacobi_at_one, jacobi_eval, JacobiParams};
use crate::params::SpaceParams;
use crate::scalar::ratio_to_f64;
use crate::special::{gamma, ln_gamma};
use crate::sphere::{build_harmonic_basis, cross_inner, harmonic_dimension, HarmonicBasis};

/// ε = 4ν(2m + n) − 4m(m + n).
pub fn eigenvalue(params: &SpaceParams) -> f64 {
    let (n, nu, m) = (params.n() as f64, *params.nu(), params.m() as f64);
    4.0 * nu * (2.0 * m + n) - 4.0 * m * (m + n)
}

/// Label (p, q, j) of a basis element; j runs from 1 to d(n, p, q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub p: usize,
    pub q: usize,
    pub j: usize,
}

impl BasisIndex {
    pub fn new(params: &SpaceParams, p: usize, q: usize, j: usize) -> Result<Self> {
        if q > params.m() {
            return Err(Error::Index(format!("q = {q} exceeds m = {}", params.m())));
        }
        let d = harmonic_dimension(params.n(), p, q)? as usize;
        if j == 0 || j > d {
            return Err(Error::Index(format!("j = {j} outside 1..={d}")));
        }
        Ok(Self { p, q, j })
    }
}

/// Normalization constant of Φ_{p,q,j}.
pub fn kappa(params: &SpaceParams, p: usize, q: usize) -> Result<f64> {
    let (n, nu, m) = (params.n() as f64, *params.nu(), params.m());
    if q > m {
        return Err(Error::Index(format!("q = {q} exceeds m = {m}")));
    }
    let (pf, qf, mf) = (p as f64, q as f64, m as f64);
    let beta = params.beta();
    let ln = ln_gamma((m - q) as f64 + 1.0)? + beta.ln() + ln_gamma(2.0 * nu - mf + pf)?
        - n.ln()
        - ln_gamma(2.0 * nu - mf - n - qf + 1.0)?
        - ln_gamma(pf + n + mf)?;
    Ok((0.5 * ln).exp())
}

fn radial_jacobi(params: &SpaceParams, p: usize, q: usize) -> Result<JacobiParams> {
    JacobiParams::new((params.n() + p + q) as f64 - 1.0, params.beta())
}

/// (2(ν−m) − n)Γ(2ν − m) / (n! Γ(2ν − m − n + 1)), the prefactor of the
/// closed-form kernel.
pub fn kernel_constant(params: &SpaceParams) -> f64 {
    let (n, nu, m) = (params.n() as f64, *params.nu(), params.m() as f64);
    let ln = ln_gamma(2.0 * nu - m).unwrap() - ln_gamma(n + 1.0).unwrap() - ln_gamma(2.0 * nu - m - n + 1.0).unwrap();
    params.beta() * ln.exp()
}

fn kernel_family(params: &SpaceParams) -> JacobiParams {
    JacobiParams::new(params.n() as f64 - 1.0, params.beta()).expect("admissible parameters")
}

/// N = const · Γ(m + n)/(m! Γ(n)), the constant diagonal of the kernel.
pub fn normalization_factor(params: &SpaceParams) -> f64 {
    kernel_constant(params) * jacobi_at_one(params.m(), &(params.n() as f64 - 1.0))
}

/// Closed-form reproducing kernel K(z, w).
pub fn kernel_closed(params: &SpaceParams, z: &BallPoint, w: &BallPoint) -> Complex64 {
    let nu = *params.nu();
    let mu = nu - params.m() as f64;
    let one = Complex64::new(1.0, 0.0);
    let phase = Complex64::from_polar(1.0, -2.0 * nu * (one - z.inner(w)).arg());
    let radial = cosh2_distance(z, w).powf(-mu);
    let poly = jacobi_eval(params.m(), &kernel_family(params), &(1.0 - 2.0 * tanh2_distance(z, w)));
    phase * (kernel_constant(params) * radial * poly)
}

/// |⟨z|w⟩|² for normalized coherent states; exactly 1 on the diagonal since
/// the Jacobi factor enters as P_m(x)/P_m(1).
pub fn cs_overlap_abs2(params: &SpaceParams, z: &BallPoint, w: &BallPoint) -> f64 {
    let mu = *params.nu() - params.m() as f64;
    let tanh2 = tanh2_distance(z, w);
    if tanh2 == 0.0 {
        return 1.0;
    }
    let fam = kernel_family(params);
    let ratio = jacobi_eval(params.m(), &fam, &(1.0 - 2.0 * tanh2)) / jacobi_at_one(params.m(), &(params.n() as f64 - 1.0));
    (1.0 - tanh2).powf(2.0 * mu) * ratio * ratio
}

/// Poisson kernel P_λ^ν(z, θ) with first exponent (iλ + n)/2.
pub fn poisson_kernel(nu: f64, lambda: Complex64, z: &BallPoint, theta: &[Complex64]) -> Result<Complex64> {
    if theta.len() != z.dim() {
        return Err(Error::Parameter("θ and z have different dimensions".into()));
    }
    let zt: Complex64 = z.coords().iter().zip(theta).map(|(a, b)| a * b.conj()).sum();
    let one = Complex64::new(1.0, 0.0);
    let den = (one - zt).norm_sqr();
    if den < 1e-30 {
        return Err(Error::Domain("⟨z, θ⟩ = 1".into()));
    }
    let n = z.dim() as f64;
    let expo = (Complex64::new(0.0, 1.0) * lambda + n) * 0.5;
    let first = Complex64::new((1.0 - z.norm_sq()) / den, 0.0).powc(expo);
    let second = Complex64::from_polar(1.0, -2.0 * nu * (one - zt).arg());
    Ok(first * second)
}

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-3;

type BallFn<'a> = &'a dyn Fn(&BallPoint) -> Complex64;

/// Real-coordinate derivatives of f at z with step h: gradient in
/// (x_1, y_1, …, x_n, y_n) and the full Hessian.
fn derivatives(f: BallFn, z: &BallPoint, h: f64) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
    let n = z.dim();
    let base: Vec<f64> = z.coords().iter().flat_map(|c| [c.re, c.im]).collect();
    let at = |shift: &[(usize, f64)]| -> Result<Complex64> {
        let mut x = base.clone();
        for &(k, s) in shift {
            x[k] += s;
        }
        let p = BallPoint::new((0..n).map(|j| Complex64::new(x[2 * j], x[2 * j + 1])).collect())?;
        Ok(f(&p))
    };
    let dim = 2 * n;
    let f0 = at(&[])?;
    let mut grad = vec![Complex64::new(0.0, 0.0); dim];
    let mut hess = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for a in 0..dim {
        let fp = at(&[(a, h)])?;
        let fm = at(&[(a, -h)])?;
        grad[a] = (fp - fm) / (2.0 * h);
        hess[a][a] = (fp - f0 * 2.0 + fm) / (h * h);
        for b in 0..a {
            let v = (at(&[(a, h), (b, h)])? - at(&[(a, h), (b, -h)])? - at(&[(a, -h), (b, h)])? + at(&[(a, -h), (b, -h)])?)
                / (4.0 * h * h);
            hess[a][b] = v;
            hess[b][a] = v;
        }
    }
    Ok((grad, hess))
}

fn check_step(z: &BallPoint, h: f64) -> Result<()> {
    if !(h > 0.0 && h < 0.05) {
        return Err(Error::Parameter(format!("finite-difference step {h} outside (0, 0.05)")));
    }
    if 1.0 - z.norm_sq().sqrt() <= 4.0 * h * (2.0 * z.dim() as f64).sqrt() {
        return Err(Error::Domain("point too close to the boundary for the step".into()));
    }
    Ok(())
}

/// One O(h²) evaluation of H_ν f.
fn h_nu_once(nu: f64, f: BallFn, z: &BallPoint, h: f64) -> Result<Complex64> {
    let n = z.dim();
    let (g, hs) = derivatives(f, z, h)?;
    let i = Complex64::new(0.0, 1.0);
    let zc = z.coords();
    let mut second = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            // ∂_{z_a}∂_{z̄_b} = ¼[∂x_a∂x_b + ∂y_a∂y_b + i(∂x_a∂y_b − ∂y_a∂x_b)]
            let d = (hs[xa][xb] + hs[ya][yb] + i * (hs[xa][yb] - hs[ya][xb])) * 0.25;
            let coef = if a == b { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) } - zc[a] * zc[b].conj();
            second += coef * d;
        }
    }
    // Σ z_j∂_j − z̄_j∂̄_j = i Σ (y_j ∂x_j − x_j ∂y_j)
    let mut rot = Complex64::new(0.0, 0.0);
    for j in 0..n {
        rot += i * (zc[j].im * g[2 * j] - zc[j].re * g[2 * j + 1]);
    }
    let f0 = f(z);
    Ok(-(second + rot * nu + f0 * (nu * nu)) * (4.0 * (1.0 - z.norm_sq())) + f0 * (4.0 * nu * nu))
}

/// Magnetic Schrödinger operator
/// H_ν = −4(1 − |z|²)(Σ(δ_ij − z_i z̄_j)∂_i∂̄_j + ν Σ(z_j∂_j − z̄_j∂̄_j) + ν²) + 4ν²
/// by central differences with one Richardson step (h, h/2).
pub fn apply_h_fd(nu: f64, f: BallFn, z: &BallPoint, h: f64) -> Result<Complex64> {
    check_step(z, h)?;
    let coarse = h_nu_once(nu, f, z, h)?;
    let fine = h_nu_once(nu, f, z, h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Laplace–Beltrami operator Δ = 4(1 − |z|²)Σ(δ_ij − z_i z̄_j)∂_i∂̄_j, which
/// equals −H_0.
pub fn apply_laplacian_fd(f: BallFn, z: &BallPoint, h: f64) -> Result<Complex64> {
    Ok(-apply_h_fd(0.0, f, z, h)?)
}

/// Harmonic bases H(p, q) for p ≤ p_max, q ≤ q_max in a fixed dimension.
#[derive(Clone, Debug)]
pub struct BasisSet {
    n: usize,
    bases: BTreeMap<(usize, usize), HarmonicBasis>,
}

impl BasisSet {
    pub fn build(n: usize, p_max: usize, q_max: usize) -> Result<Self> {
        let mut bases = BTreeMap::new();
        for p in 0..=p_max {
            for q in 0..=q_max {
                bases.insert((p, q), build_harmonic_basis(n, p, q)?);
            }
        }
        Ok(Self { n, bases })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> Result<&HarmonicBasis> {
        self.bases
            .get(&(p, q))
            .ok_or_else(|| Error::Index(format!("no basis cached for (p, q) = ({p}, {q})")))
    }

    /// Replaces one bidegree by another orthogonal basis of the same space.
    pub fn replace(&mut self, basis: HarmonicBasis) -> Result<()> {
        if basis.n() != self.n {
            return Err(Error::Parameter("basis dimension mismatch".into()));
        }
        self.bases.insert(basis.bidegree(), basis);
        Ok(())
    }

    pub fn p_max(&self) -> usize {
        self.bases.keys().map(|k| k.0).max().unwrap_or(0)
    }
}

/// Literal κ together with the value actually used after the norm check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaRecord {
    pub p: usize,
    pub q: usize,
    pub literal: f64,
    pub used: f64,
    /// ‖Φ‖² − 1 with the literal constant
    pub norm_deviation: f64,
}

/// Nodes of the radial rule used for norms and Gram matrices.
pub const GRAM_NODES: usize = 64;
/// Literal constants whose norm misses 1 by more than this are replaced.
pub const RENORM_TOL: f64 = 1e-10;

/// A concrete eigenspace with cached harmonic bases and checked constants.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    params: SpaceParams,
    bases: BasisSet,
    kappas: BTreeMap<(usize, usize), KappaRecord>,
}

/// One radial moment n ∫ t^{n−1+s}(1 − t)^{2(ν−m)−n−1} P P' dt with exact
/// Gauss–Jacobi quadrature.
fn radial_moment(params: &SpaceParams, a: (usize, usize), b: (usize, usize), half_degree: i32) -> Result<f64> {
    let rule = radial_rule(params.n(), params.beta() - 1.0, GRAM_NODES, false)?;
    let (m, n) = (params.m(), params.n() as f64);
    let ja = radial_jacobi(params, a.0, a.1)?;
    let jb = radial_jacobi(params, b.0, b.1)?;
    Ok(n * rule.integrate(|t| {
        let x = 1.0 - 2.0 * t;
        t.powi(half_degree) * jacobi_eval(m - a.1, &ja, &x) * jacobi_eval(m - b.1, &jb, &x)
    }))
}

impl Eigenspace {
    pub fn new(params: SpaceParams, p_max: usize) -> Result<Self> {
        let bases = BasisSet::build(params.n(), p_max, params.m())?;
        Self::with_bases(params, bases)
    }

    pub fn with_bases(params: SpaceParams, bases: BasisSet) -> Result<Self> {
        if bases.n() != params.n() {
            return Err(Error::Parameter("basis dimension mismatch".into()));
        }
        let mut kappas = BTreeMap::new();
        for p in 0..=bases.p_max() {
            for q in 0..=params.m() {
                let literal = kappa(&params, p, q)?;
                let moment = radial_moment(&params, (p, q), (p, q), (p + q) as i32)?;
                let norm = literal * literal * moment;
                let used = if (norm - 1.0).abs() > RENORM_TOL { 1.0 / moment.sqrt() } else { literal };
                kappas.insert((p, q), KappaRecord { p, q, literal, used, norm_deviation: norm - 1.0 });
            }
        }
        Ok(Self { params, bases, kappas })
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn bases(&self) -> &BasisSet {
        &self.bases
    }

    pub fn kappa_records(&self) -> Vec<KappaRecord> {
        self.kappas.values().copied().collect()
    }

    fn kappa_used(&self, p: usize, q: usize) -> Result<f64> {
        self.kappas
            .get(&(p, q))
            .map(|r| r.used)
            .ok_or_else(|| Error::Index(format!("(p, q) = ({p}, {q}) beyond the cached range")))
    }

    /// Every index with p ≤ p_max, in (p, q, j) order.
    pub fn indices(&self, p_max: usize) -> Result<Vec<BasisIndex>> {
        let mut out = Vec::new();
        for p in 0..=p_max {
            for q in 0..=self.params.m() {
                let d = self.bases.get(p, q)?.dim();
                out.extend((1..=d).map(|j| BasisIndex { p, q, j }));
            }
        }
        Ok(out)
    }

    /// (1 − |z|²)^{ν−m} P_{m−q}^{(n+p+q−1, 2(ν−m)−n)}(1 − 2|z|²) times κ.
    fn radial_factor(&self, p: usize, q: usize, t: f64) -> Result<f64> {
        let mu = *self.params.nu() - self.params.m() as f64;
        let jp = radial_jacobi(&self.params, p, q)?;
        Ok(self.kappa_used(p, q)? * (1.0 - t).powf(mu) * jacobi_eval(self.params.m() - q, &jp, &(1.0 - 2.0 * t)))
    }

    /// Φ_{p,q,j}(z).
    pub fn phi(&self, idx: BasisIndex, z: &BallPoint) -> Result<Complex64> {
        let basis = self.bases.get(idx.p, idx.q)?;
        if idx.j == 0 || idx.j > basis.dim() {
            return Err(Error::Index(format!("j = {} outside 1..={}", idx.j, basis.dim())));
        }
        Ok(basis.eval(idx.j - 1, z.coords())? * self.radial_factor(idx.p, idx.q, z.norm_sq())?)
    }

    /// Bilinear partial sum of Φ(z) conj Φ(w) over p ≤ p_max.
    pub fn kernel_truncated(&self, z: &BallPoint, w: &BallPoint, p_max: usize) -> Result<TruncatedKernel> {
        if z.norm_sq() > 0.64 || w.norm_sq() > 0.64 {
            return Err(Error::Domain("truncated kernel needs |z|, |w| ≤ 0.8".into()));
        }
        let mut shells = Vec::with_capacity(p_max + 1);
        for p in 0..=p_max {
            let mut shell = Complex64::new(0.0, 0.0);
            for q in 0..=self.params.m() {
                let basis = self.bases.get(p, q)?;
                let rz = self.radial_factor(p, q, z.norm_sq())?;
                let rw = self.radial_factor(p, q, w.norm_sq())?;
                shell += basis.zonal(z.coords(), w.coords()) * (rz * rw);
            }
            shells.push(shell);
        }
        let value = shells.iter().rev().sum();
        let rho = (z.norm_sq() * w.norm_sq()).sqrt();
        let last = shells.last().map(|s| s.norm()).unwrap_or(0.0);
        Ok(TruncatedKernel { value, tail_estimate: last * rho / (1.0 - rho), shells })
    }

    /// Gram matrix ⟨Φ_a, Φ_b⟩ in L²(dμ_n) over p ≤ p_max, with exact angular
    /// integrals and exact radial quadrature.
    pub fn gram(&self, p_max: usize) -> Result<(Vec<BasisIndex>, Vec<Vec<f64>>)> {
        let idx = self.indices(p_max)?;
        let mut moments: BTreeMap<((usize, usize), (usize, usize)), f64> = BTreeMap::new();
        let mut g = vec![vec![0.0; idx.len()]; idx.len()];
        for (r, a) in idx.iter().enumerate() {
            let ba = self.bases.get(a.p, a.q)?;
            for (c, b) in idx.iter().enumerate().skip(r) {
                let bb = self.bases.get(b.p, b.q)?;
                let ang = cross_inner(ba, a.j - 1, bb, b.j - 1);
                if num_traits::Zero::is_zero(&ang) {
                    continue;
                }
                let ang = ratio_to_f64(&ang)
                    / (ratio_to_f64(&ba.sq_norms()[a.j - 1]) * ratio_to_f64(&bb.sq_norms()[b.j - 1])).sqrt();
                let key = ((a.p, a.q), (b.p, b.q));
                let half = ((a.p + a.q + b.p + b.q) / 2) as i32;
                let mom = match moments.get(&key) {
                    Some(v) => *v,
                    None => {
                        let v = radial_moment(&self.params, key.0, key.1, half)?;
                        moments.insert(key, v);
                        v
                    }
                };
                let v = self.kappa_used(a.p, a.q)? * self.kappa_used(b.p, b.q)? * mom * ang;
                g[r][c] = v;
                g[c][r] = v;
            }
        }
        Ok((idx, g))
    }
}

/// Partial kernel sum with its per-shell contributions.
#[derive(Clone, Debug)]
pub struct TruncatedKernel {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub shells: Vec<Complex64>,
}

/// λ_m = i(2m + n − 2ν) from the discrete spectrum; ε = λ_m² + 4ν² + n².
pub fn discrete_lambda(params: &SpaceParams) -> Complex64 {
    Complex64::new(0.0, (2 * params.m() + params.n()) as f64 - 2.0 * params.nu())
}

/// Γ-ratio form of the kernel diagonal, kept for cross-checks.
pub fn normalization_factor_gamma(params: &SpaceParams) -> Result<f64> {
    let (n, nu, m) = (params.n() as f64, *params.nu(), params.m() as f64);
    Ok(params.beta() * gamma(2.0 * nu - m)? * gamma(m + n)?
        / (gamma(n + 1.0)? * gamma(2.0 * nu - m - n + 1.0)? * gamma(m + 1.0)? * gamma(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize, nu: f64, m: usize) -> SpaceParams {
        SpaceParams::new(n, nu, m).unwrap()
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(&sp(2, 3.5, 0)), 28.0);
        assert_eq!(eigenvalue(&sp(2, 3.5, 1)), 44.0);
        let p = sp(2, 3.5, 1);
        let l = discrete_lambda(&p);
        assert!(((l * l).re + 4.0 * 3.5 * 3.5 + 4.0 - 44.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_and_normalization() {
        let p = sp(2, 2.0, 0);
        assert!((kappa(&p, 0, 0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        assert!((normalization_factor(&p) - 3.0).abs() < 1e-13);
        let p = sp(3, 4.25, 1);
        assert!((normalization_factor(&p) - normalization_factor_gamma(&p).unwrap()).abs() < 1e-10 * normalization_factor(&p));
        assert!(kappa(&p, 0, 2).is_err());
    }

    #[test]
    fn overlap_examples() {
        let p = sp(2, 2.0, 0);
        let o = BallPoint::origin(2);
        let w = BallPoint::on_axis(2, 0, 0.6).unwrap();
        assert!((cs_overlap_abs2(&p, &o, &w) - 0.16777216).abs() < 1e-14);
        assert_eq!(cs_overlap_abs2(&p, &w, &w), 1.0);
    }

    #[test]
    fn diagonal_of_closed_kernel() {
        let p = sp(2, 3.5, 1);
        let z = BallPoint::from_reals(&[(0.3, -0.2), (0.1, 0.4)]).unwrap();
        let k = kernel_closed(&p, &z, &z);
        assert!((k.re - normalization_factor(&p)).abs() < 1e-11 * k.re);
        assert!(k.im.abs() < 1e-12);
    }

    #[test]
    fn poisson_at_origin() {
        let o = BallPoint::origin(2);
        let th = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let v = poisson_kernel(1.0, Complex64::new(1.3, 0.0), &o, &th).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn fd_constant() {
        let z = BallPoint::from_reals(&[(0.2, 0.0), (0.1, 0.05)]).unwrap();
        let one = |_: &BallPoint| Complex64::new(1.0, 0.0);
        assert!(apply_h_fd(0.0, &one, &z, FD_STEP).unwrap().norm() < 1e-9);
        assert!(apply_h_fd(0.0, &one, &z, 0.5).is_err());
    }
}
