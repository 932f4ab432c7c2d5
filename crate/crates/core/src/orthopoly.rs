//! Jacobi and Wilson polynomials, and the Clebsch–Gordan coefficients that
//! expand P_m^{(n−1, 2(ν−m)−n)}(u)² in the family P_k^{(n−1, 2(ν−m))}(u).
//!
//! Everything here is generic over [`Scalar`]; with the rational field the
//! coefficients are exact.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg;
use crate::params::SpaceParams;
use crate::scalar::Scalar;
use crate::special::hyper::{kampe_de_feriet_2221, pochhammer, KdfParams};

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiParams<T: Scalar = f64> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> JacobiParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha.to_f64() > -1.0) || !(beta.to_f64() > -1.0) {
            return Err(Error::Parameter(format!(
                "Jacobi parameters ({}, {}) must exceed -1",
                alpha.to_f64(),
                beta.to_f64()
            )));
        }
        Ok(Self { alpha, beta })
    }
}

/// P_m^{(α,β)}(x) by the three-term recurrence.
pub fn jacobi_eval<T: Scalar>(m: usize, params: &JacobiParams<T>, x: &T) -> T {
    let two = T::from_i64(2);
    let (a, b) = (params.alpha.clone(), params.beta.clone());
    let mut prev = T::one();
    if m == 0 {
        return prev;
    }
    let ab = a.clone() + b.clone();
    let mut cur = (a.clone() + T::one()) + (ab.clone() + two.clone()) * (x.clone() - T::one()) / two.clone();
    for k in 2..=m {
        let k_t = T::from_usize(k);
        let s = two.clone() * k_t.clone() + ab.clone();
        let denom = two.clone() * k_t.clone() * (k_t.clone() + ab.clone()) * (s.clone() - two.clone());
        let lin = (s.clone() - T::one())
            * (s.clone() * (s.clone() - two.clone()) * x.clone() + a.clone() * a.clone() - b.clone() * b.clone());
        let back = two.clone()
            * (k_t.clone() + a.clone() - T::one())
            * (k_t + b.clone() - T::one())
            * s;
        let next = (lin * cur.clone() - back * prev) / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// P_m^{(α,β)}(x) = (α+1)_m/m! · ₂F₁(−m, m+α+β+1; α+1; (1−x)/2) as a finite sum.
pub fn jacobi_hypergeometric<T: Scalar>(m: usize, params: &JacobiParams<T>, x: &T) -> T {
    let two = T::from_i64(2);
    let y = (T::one() - x.clone()) / two;
    let a1 = params.alpha.clone() + T::one();
    let top = T::from_usize(m) + params.alpha.clone() + params.beta.clone() + T::one();
    let mut term = T::one();
    let mut total = T::one();
    for j in 0..m {
        let j_t = T::from_usize(j);
        term = term * (j_t.clone() - T::from_usize(m)) * (top.clone() + j_t.clone()) * y.clone()
            / ((a1.clone() + j_t.clone()) * (j_t + T::one()));
        total = total + term.clone();
    }
    pochhammer(&a1, m) / factorial::<T>(m) * total
}

/// P_m^{(α,β)}(1) = Γ(m+α+1)/(m! Γ(α+1)) = (α+1)_m / m!.
pub fn jacobi_at_one<T: Scalar>(m: usize, alpha: &T) -> T {
    pochhammer(&(alpha.clone() + T::one()), m) / factorial::<T>(m)
}

pub(crate) fn factorial<T: Scalar>(k: usize) -> T {
    pochhammer(&T::one(), k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WilsonParams<T: Scalar = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> WilsonParams<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }
}

/// Wilson polynomial W_k(t; a, b, c, d) with t standing for x².
///
/// The terminating ₄F₃ is multiplied through by (a+b)_k (a+c)_k (a+d)_k so no
/// division by a vanishing Pochhammer can occur; t may be negative.
pub fn wilson_eval<T: Scalar>(k: usize, t: &T, params: &WilsonParams<T>) -> T {
    let WilsonParams { a, b, c, d } = params;
    let ab = a.clone() + b.clone();
    let ac = a.clone() + c.clone();
    let ad = a.clone() + d.clone();
    let top = T::from_usize(k) + a.clone() + b.clone() + c.clone() + d.clone() - T::one();
    let mut total = T::zero();
    // ∏_{l<j} ((a+l)² + t) = (a+ix)_j (a−ix)_j
    let mut shifted = T::one();
    let mut j_fact = T::one();
    for j in 0..=k {
        if j > 0 {
            let l = a.clone() + T::from_usize(j - 1);
            shifted = shifted * (l.clone() * l + t.clone());
            j_fact = j_fact * T::from_usize(j);
        }
        let j_t = T::from_usize(j);
        let tail = pochhammer(&(ab.clone() + j_t.clone()), k - j)
            * pochhammer(&(ac.clone() + j_t.clone()), k - j)
            * pochhammer(&(ad.clone() + j_t), k - j);
        let term = pochhammer(&(-T::from_usize(k)), j) * pochhammer(&top, j) * shifted.clone() * tail
            / j_fact.clone();
        total = total + term;
    }
    total
}

/// Expansion family of the square: P_k^{(n−1, 2(ν−m))}.
pub fn target_family<T: Scalar>(params: &SpaceParams<T>) -> JacobiParams<T> {
    JacobiParams { alpha: T::from_usize(params.n() - 1), beta: params.two_nu_minus_m() }
}

/// Family of the squared polynomial: P_m^{(n−1, 2(ν−m)−n)}.
pub fn source_family<T: Scalar>(params: &SpaceParams<T>) -> JacobiParams<T> {
    JacobiParams { alpha: T::from_usize(params.n() - 1), beta: params.beta() }
}

/// Linearization coefficients A_k, k = 0..=2m, from the closed form with a
/// terminating Kampé de Fériet factor at unit arguments.
pub fn linearization_coeffs<T: Scalar>(params: &SpaceParams<T>) -> Result<Vec<T>> {
    let m = params.m();
    let n = T::from_usize(params.n());
    let nu = params.nu().clone();
    let two_l = params.two_nu_minus_m();
    let two = T::from_i64(2);
    let mi = |v: i64| T::from_i64(v);
    let mm = m as i64;
    let nn = params.n() as i64;
    let mut out = Vec::with_capacity(2 * m + 1);
    for k in 0..=2 * m {
        let kt = T::from_usize(k);
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        let l2m = pochhammer(&two_l, 2 * m);
        let lm = pochhammer(&two_l, m);
        let num = pochhammer(&(two_l.clone() + n.clone()), k)
            * pochhammer(&n, 2 * m)
            * (two.clone() * kt.clone() + two_l.clone() + n.clone())
            * sign
            * factorial::<T>(2 * m)
            * l2m.clone()
            * l2m;
        let den = pochhammer(&n, k)
            * pochhammer(&(two_l.clone() + n.clone()), 2 * m + k + 1)
            * factorial::<T>(m)
            * factorial::<T>(m)
            * factorial::<T>(2 * m - k)
            * lm.clone()
            * lm;
        let one_minus_2nu = T::one() - two.clone() * nu.clone();
        let kdf = KdfParams {
            a: [mi(k as i64 - 2 * mm), -(two.clone() * nu.clone()) - kt - n.clone()],
            b: [mi(-mm), mi(1 - nn - mm)],
            c: [mi(-mm), mi(1 - nn - mm)],
            d: [mi(-2 * mm), mi(1 - 2 * mm - nn)],
            kappa: one_minus_2nu.clone(),
            rho: one_minus_2nu,
        };
        let f = kampe_de_feriet_2221(&kdf, &T::one(), &T::one())?;
        out.push(num / den * f);
    }
    Ok(out)
}

/// A_k for floating ν, evaluated exactly at the binary rational ν and
/// rounded once. The floating sum loses a few digits to cancellation.
pub fn linearization_coeffs_rounded(params: &SpaceParams<f64>) -> Result<Vec<f64>> {
    let exact = SpaceParams::new(params.n(), BigRational::from_f64(*params.nu()), params.m())?;
    Ok(linearization_coeffs(&exact)?.iter().map(Scalar::to_f64).collect())
}

/// Coefficients obtained by matching the square against the target family at
/// 2m+1 collocation points: an independent route to A_k.
pub fn linearization_coeffs_collocation<T: Scalar>(params: &SpaceParams<T>, points: &[T]) -> Result<Vec<T>> {
    let size = 2 * params.m() + 1;
    if points.len() != size {
        return Err(Error::Parameter(format!("need {size} collocation points, got {}", points.len())));
    }
    let src = source_family(params);
    let dst = target_family(params);
    let matrix: Vec<Vec<T>> = points
        .iter()
        .map(|u| (0..size).map(|k| jacobi_eval(k, &dst, u)).collect())
        .collect();
    let rhs: Vec<T> = points
        .iter()
        .map(|u| {
            let p = jacobi_eval(params.m(), &src, u);
            p.clone() * p
        })
        .collect();
    linalg::solve(matrix, rhs)
}

/// Distinct rational collocation nodes in (−1, 1).
pub fn rational_nodes<T: Scalar>(count: usize) -> Vec<T> {
    (0..count)
        .map(|i| T::from_i64(2 * i as i64 + 1 - count as i64) / T::from_usize(count + 1))
        .collect()
}

/// Chebyshev points of the first kind on [−1, 1].
pub fn chebyshev_points(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / count as f64).cos())
        .collect()
}

/// max_u |P_m²(u) − Σ_k A_k P_k(u)| / (1 + |P_m²(u)|) over the samples.
pub fn linearization_residual<T: Scalar>(params: &SpaceParams<T>, u_samples: &[T]) -> Result<f64> {
    let coeffs = linearization_coeffs(params)?;
    Ok(residual_with(params, &coeffs, u_samples))
}

/// Same residual, in the exact field when `T` is rational.
pub fn linearization_residual_exact<T: Scalar>(params: &SpaceParams<T>, coeffs: &[T], u: &T) -> T {
    let src = source_family(params);
    let dst = target_family(params);
    let p = jacobi_eval(params.m(), &src, u);
    let mut acc = p.clone() * p;
    for (k, a) in coeffs.iter().enumerate() {
        acc = acc - a.clone() * jacobi_eval(k, &dst, u);
    }
    acc
}

fn residual_with<T: Scalar>(params: &SpaceParams<T>, coeffs: &[T], u_samples: &[T]) -> f64 {
    let src = source_family(params);
    u_samples
        .iter()
        .map(|u| {
            let p = jacobi_eval(params.m(), &src, u).to_f64();
            let diff = linearization_residual_exact(params, coeffs, u).to_f64();
            diff.abs() / (1.0 + p * p)
        })
        .fold(0.0, f64::max)
}
