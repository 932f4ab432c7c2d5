//! Geometry of the Bergman ball: points, distance, the involutive
//! automorphisms φ_a, and quadrature rules in the radial variable t = |z|².
//!
//! Measures: dμ is Lebesgue measure normalized to μ(B) = 1 and dσ is the
//! normalized surface measure, so ∫ f dμ = ∫₀¹ n t^{n−1} ∫_S f(√t θ) dσ(θ) dt.
//! The invariant measure is dμ_n = (1 − |z|²)^{−n−1} dμ.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::orthopoly::{jacobi_eval, JacobiParams};
use crate::scalar::ratio_to_f64;
use crate::special::{ln_gamma, Compensated, CompensatedValue};
use crate::sphere::{sphere_monomial_integral, MultiIndex};

/// Quadrature nodes never come closer to t = 1 than this.
pub const GUARD_BAND: f64 = 1e-12;

/// Point strictly inside the unit ball of ℂⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
    norm_sq: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq < 1.0) || coords.is_empty() {
            return Err(Error::Domain(format!("|z|² = {norm_sq} is not inside the unit ball")));
        }
        Ok(Self { coords, norm_sq })
    }

    pub fn origin(n: usize) -> Self {
        Self { coords: vec![Complex64::new(0.0, 0.0); n], norm_sq: 0.0 }
    }

    /// r·e_k (zero-based k).
    pub fn on_axis(n: usize, k: usize, r: f64) -> Result<Self> {
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[k] = Complex64::new(r, 0.0);
        Self::new(coords)
    }

    pub fn from_reals(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// ⟨z, w⟩ = Σ z_j conj(w_j).
    pub fn inner(&self, w: &BallPoint) -> Complex64 {
        self.coords.iter().zip(&w.coords).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<BallPoint> {
        BallPoint::new(self.coords.iter().map(|z| z * s).collect())
    }
}

fn check_dims(z: &BallPoint, w: &BallPoint) {
    assert_eq!(z.dim(), w.dim(), "points of different dimension");
}

/// cosh² d(z, w).
pub fn cosh2_distance(z: &BallPoint, w: &BallPoint) -> f64 {
    check_dims(z, w);
    (Complex64::new(1.0, 0.0) - z.inner(w)).norm_sqr() / ((1.0 - z.norm_sq) * (1.0 - w.norm_sq))
}

/// tanh² d(z, w) = |φ_z(w)|², computed without the 1 − 1/cosh² cancellation
/// for nearby points.
pub fn tanh2_distance(z: &BallPoint, w: &BallPoint) -> f64 {
    check_dims(z, w);
    let den = (Complex64::new(1.0, 0.0) - z.inner(w)).norm_sqr();
    // |1−⟨z,w⟩|² − (1−|z|²)(1−|w|²) = |z−w|² − (|z|²|w|² − |⟨z,w⟩|²)
    let diff: f64 = z.coords.iter().zip(&w.coords).map(|(a, b)| (a - b).norm_sqr()).sum();
    let cross = z.norm_sq * w.norm_sq - z.inner(w).norm_sqr();
    ((diff - cross) / den).clamp(0.0, 1.0)
}

pub fn bergman_distance(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    let c = cosh2_distance(z, w).sqrt();
    if !(c >= 1.0 - 1e-12) {
        return Err(Error::Domain(format!("cosh d = {c} below 1")));
    }
    let t = tanh2_distance(z, w).sqrt();
    if t < 0.5 {
        Ok(t.atanh())
    } else {
        Ok(c.max(1.0).acosh())
    }
}

/// The involution φ_a exchanging a and 0.
pub fn mobius_involution(a: &BallPoint, z: &BallPoint) -> BallPoint {
    check_dims(a, z);
    let one = Complex64::new(1.0, 0.0);
    let za = z.inner(a);
    let den = one - za;
    let coords: Vec<Complex64> = if a.norm_sq == 0.0 {
        z.coords.iter().map(|c| -c).collect()
    } else {
        let s = (1.0 - a.norm_sq).sqrt();
        a.coords
            .iter()
            .zip(&z.coords)
            .map(|(&ai, &zi)| {
                let pz = ai * za / a.norm_sq;
                let qz = zi - pz;
                (ai - pz - qz * s) / den
            })
            .collect()
    };
    let norm_sq = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().min(1.0 - f64::EPSILON);
    BallPoint { coords, norm_sq }
}

/// Refinement policy for non-polynomial radial integrands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement {
    pub max_levels: usize,
    pub rel_tol: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self { max_levels: 6, rel_tol: 1e-12 }
    }
}

/// Quadrature for ∫₀¹ f(t) t^{a}(1 − t)^{γ} dt.
///
/// A plain rule is Gauss–Jacobi. An adaptive rule is a composite: a
/// Gauss–Jacobi head on [0, 1/2], Gauss–Legendre panels
/// [1 − 2^{−k}, 1 − 2^{−k−1}] and a Gauss–Jacobi end panel, which
/// tracks integrands that oscillate in log(1 − t).
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    weight_exponents: (f64, f64),
    points: usize,
    adaptive: Option<Refinement>,
}

/// Value with an error estimate from successive refinements.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub levels: usize,
}

/// Gauss rule for ∫₀¹ g(s) s^{p}(1 − s)^{q} ds.
pub fn gauss_jacobi_unit(count: usize, p: f64, q: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::Parameter("a rule needs at least one node".into()));
    }
    if !(p > -1.0 && q > -1.0) {
        return Err(Error::Parameter(format!("weight exponents ({p}, {q}) must exceed -1")));
    }
    // x = 1 − 2s, weight (1 − x)^p (1 + x)^q
    let (a, b) = (p, q);
    let nf = count as f64;
    let mut jm = DMatrix::<f64>::zeros(count, count);
    for k in 0..count {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        jm[(k, k)] = if k == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        if k + 1 < count {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a + b;
            let beta = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
            jm[(k, k + 1)] = beta.sqrt();
            jm[(k + 1, k)] = beta.sqrt();
        }
    }
    let mut xs: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    xs.sort_by(|u, v| v.partial_cmp(u).unwrap());

    let pn = JacobiParams::new(a, b)?;
    let dp = JacobiParams::new(a + 1.0, b + 1.0)?;
    let dscale = (nf + a + b + 1.0) / 2.0;
    let log_c = ln_gamma(nf + a + 1.0)? + ln_gamma(nf + b + 1.0)? - ln_gamma(nf + a + b + 1.0)? - ln_gamma(nf + 1.0)?;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for x0 in xs {
        let mut x = x0;
        for _ in 0..8 {
            let val = jacobi_eval(count, &pn, &x);
            let der = dscale * jacobi_eval(count - 1, &dp, &x);
            let step = val / der;
            let next = (x - step).clamp(-1.0 + 1e-300, 1.0 - 1e-300);
            let done = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3);
            x = next;
            if done {
                break;
            }
        }
        let der = dscale * jacobi_eval(count - 1, &dp, &x);
        let w = (log_c - ((1.0 - x * x) * der * der).ln()).exp();
        nodes.push((1.0 - x) / 2.0);
        weights.push(w);
    }
    Ok((nodes, weights))
}

fn guard_check(nodes: &[f64]) -> Result<()> {
    match nodes.iter().find(|&&t| !(t > 0.0 && t <= 1.0 - GUARD_BAND)) {
        Some(t) => Err(Error::Quadrature(format!("node {t} violates the guard band"))),
        None => Ok(()),
    }
}

fn composite(a: f64, gamma: f64, points: usize, panels: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (gl_x, gl_w) = gauss_jacobi_unit(points, 0.0, 0.0)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut panels = panels;
    // the end panel must respect the guard band
    let (end_x, end_w) = gauss_jacobi_unit(points, gamma, 0.0)?;
    let smallest = end_x.iter().cloned().fold(f64::INFINITY, f64::min);
    while panels > 1 && 0.5f64.powi(panels as i32) * smallest < 2.0 * GUARD_BAND {
        panels -= 1;
    }
    // ∫₀^{1/2} f t^a (1−t)^γ dt = 2^{−a−1} ∫₀¹ f(s/2) s^a (1 − s/2)^γ ds
    let (head_x, head_w) = gauss_jacobi_unit(points, a, 0.0)?;
    let head_scale = 0.5f64.powf(a + 1.0);
    for (s, w) in head_x.iter().zip(&head_w) {
        let t = s / 2.0;
        nodes.push(t);
        weights.push(head_scale * w * (1.0 - t).powf(gamma));
    }
    for k in 1..panels {
        let lo = 1.0 - 0.5f64.powi(k as i32);
        let hi = 1.0 - 0.5f64.powi(k as i32 + 1);
        let len = hi - lo;
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let t = lo + len * x;
            nodes.push(t);
            weights.push(len * w * t.powf(a) * (1.0 - t).powf(gamma));
        }
    }
    // ∫_{1−L}^{1} f t^a (1−t)^γ dt = L^{γ+1} ∫₀¹ f(1 − Ls)(1 − Ls)^a s^γ ds
    let len = 0.5f64.powi(panels as i32);
    let scale = len.powf(gamma + 1.0);
    for (s, w) in end_x.iter().zip(&end_w) {
        let t = 1.0 - len * s;
        nodes.push(t);
        weights.push(scale * w * t.powf(a));
    }
    Ok((nodes, weights))
}

const BASE_PANELS: usize = 12;
const MAX_POINTS: usize = 256;

/// Radial rule for weight t^{n−1}(1 − t)^γ.
pub fn radial_rule(n: usize, gamma: f64, points: usize, adaptive: bool) -> Result<QuadratureRule> {
    let rule = if adaptive { Some(Refinement::default()) } else { None };
    weighted_rule((n as f64) - 1.0, gamma, points, rule)
}

/// Rule for weight t^{a}(1 − t)^γ with an explicit refinement policy.
pub fn weighted_rule(a: f64, gamma: f64, points: usize, adaptive: Option<Refinement>) -> Result<QuadratureRule> {
    if !(gamma > -1.0) {
        return Err(Error::Parameter(format!("(1−t) exponent {gamma} must exceed -1")));
    }
    let (nodes, weights) = match adaptive {
        None => gauss_jacobi_unit(points, a, gamma)?,
        Some(_) => composite(a, gamma, points, BASE_PANELS)?,
    };
    guard_check(&nodes)?;
    Ok(QuadratureRule { nodes, weights, weight_exponents: (a, gamma), points, adaptive })
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// (t-power, (1 − t)-power) of the weight.
    pub fn weight_exponents(&self) -> (f64, f64) {
        self.weight_exponents
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn refinement(&self) -> Option<Refinement> {
        self.adaptive
    }

    /// Σ w_i f(t_i), summed in node order.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: CompensatedValue + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let mut acc = Compensated::new();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(t) * w);
        }
        acc.value()
    }

    fn refined(&self, level: usize) -> Result<QuadratureRule> {
        let (a, gamma) = self.weight_exponents;
        let points = (self.points << level).min(MAX_POINTS);
        let (nodes, weights) = match self.adaptive {
            None => gauss_jacobi_unit(points, a, gamma)?,
            Some(_) => composite(a, gamma, points, BASE_PANELS + 6 * level)?,
        };
        guard_check(&nodes)?;
        Ok(QuadratureRule { nodes, weights, weight_exponents: self.weight_exponents, points, adaptive: self.adaptive })
    }

    /// Integrates with successive refinement until two levels agree to the
    /// rule's relative tolerance. Plain rules are compared against one
    /// doubling.
    pub fn integrate_adaptive<T, F>(&self, f: F) -> Result<Estimate<T>>
    where
        T: CompensatedValue + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let coarse = self.integrate(&f);
        let Some(policy) = self.adaptive else {
            let fine = self.refined(1)?.integrate(&f);
            return Ok(Estimate { value: fine, error: (fine - coarse).modulus(), levels: 1 });
        };
        let mut prev = coarse;
        for level in 1..=policy.max_levels {
            let next = self.refined(level)?.integrate(&f);
            let error = (next - prev).modulus();
            if error <= policy.rel_tol * next.modulus() {
                return Ok(Estimate { value: next, error, levels: level });
            }
            prev = next;
        }
        Err(Error::Quadrature(format!(
            "no convergence to {} within {} refinements",
            policy.rel_tol, policy.max_levels
        )))
    }
}

/// One term c·z^α z̄^β of a polynomial angular factor.
pub type SphericalTerm = (BigRational, MultiIndex, MultiIndex);

/// ∫_B radial(|z|²)(1 − |z|²)^γ Σ c z^α z̄^β dμ(z), where γ is the rule's
/// (1 − t) exponent. The angular integrals are exact.
pub fn ball_integrate<F: Fn(f64) -> f64>(radial: F, spherical: &[SphericalTerm], rule: &QuadratureRule) -> Result<f64> {
    let Some(first) = spherical.first() else {
        return Ok(0.0);
    };
    let n = first.1.dim();
    let (a, _) = rule.weight_exponents();
    if a != (n as f64) - 1.0 {
        return Err(Error::Parameter(format!("rule t-exponent {a} does not match n − 1 = {}", n - 1)));
    }
    let mut acc = Compensated::new();
    for (c, alpha, beta) in spherical {
        let ang = ratio_to_f64(&(c * sphere_monomial_integral(alpha, beta)));
        if ang == 0.0 {
            continue;
        }
        let half = (alpha.degree() + beta.degree()) as i32 / 2;
        let rad = rule.integrate(|t| radial(t) * t.powi(half));
        acc.add(n as f64 * ang * rad);
    }
    Ok(acc.value())
}

/// Product rule on the unit sphere of ℂⁿ: a collapsed Gauss–Jacobi rule on
/// the simplex of |θ_j|² times the trapezoid rule on the torus of phases.
///
/// Exact for θ^α θ̄^β when every |α_j − β_j| < `phases` and
/// |α| ≤ 2·`simplex_points` − 1.
#[derive(Clone, Debug)]
pub struct SphereRule {
    points: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n: usize, simplex_points: usize, phases: usize) -> Result<Self> {
        if n < 1 || phases == 0 {
            return Err(Error::Parameter("sphere rule needs n >= 1 and phases >= 1".into()));
        }
        // simplex: s_k = u_k Π_{i<k}(1 − u_i), weight (1 − u_k)^{n−1−k}
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for k in 0..n.saturating_sub(1) {
            let (xs, ws) = gauss_jacobi_unit(simplex_points, 0.0, (n - 2 - k) as f64)?;
            let mut next = Vec::with_capacity(simplex.len() * xs.len());
            for (prefix, w0) in &simplex {
                for (u, w) in xs.iter().zip(&ws) {
                    let mut p = prefix.clone();
                    p.push(*u);
                    next.push((p, w0 * w));
                }
            }
            simplex = next;
        }
        let norm: f64 = (1..n).map(|k| k as f64).product();
        let tau = 2.0 * PI / phases as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let torus = phases.pow(n as u32);
        for (us, w) in &simplex {
            let mut s = Vec::with_capacity(n);
            let mut rest = 1.0;
            for &u in us {
                s.push(rest * u);
                rest *= 1.0 - u;
            }
            s.push(rest);
            for idx in 0..torus {
                let mut code = idx;
                let theta: Vec<Complex64> = s
                    .iter()
                    .map(|&sj| {
                        let l = code % phases;
                        code /= phases;
                        Complex64::from_polar(sj.max(0.0).sqrt(), tau * l as f64)
                    })
                    .collect();
                points.push(theta);
                weights.push(w * norm / torus as f64);
            }
        }
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_S f dσ.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: CompensatedValue + Mul<f64, Output = T>,
        F: Fn(&[Complex64]) -> T,
    {
        let mut acc = Compensated::new();
        for (p, &w) in self.points.iter().zip(&self.weights) {
            acc.add(f(p) * w);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::special::gamma;

    fn beta_fn(x: f64, y: f64) -> f64 {
        gamma(x).unwrap() * gamma(y).unwrap() / gamma(x + y).unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = BallPoint::origin(2);
        let w = BallPoint::on_axis(2, 0, 0.6).unwrap();
        assert!((bergman_distance(&o, &w).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(bergman_distance(&w, &w).unwrap(), 0.0);
        let z = BallPoint::from_reals(&[(0.1, -0.3), (0.2, 0.4)]).unwrap();
        let d1 = bergman_distance(&z, &w).unwrap();
        let d2 = bergman_distance(&w, &z).unwrap();
        assert!((d1 - d2).abs() < 1e-15);
        assert!(BallPoint::from_reals(&[(0.8, 0.0), (0.6, 0.0)]).is_err());
    }

    #[test]
    fn involution() {
        let a = BallPoint::from_reals(&[(0.3, 0.1), (-0.2, 0.25)]).unwrap();
        let o = BallPoint::origin(2);
        let fa0 = mobius_involution(&a, &o);
        let fa_a = mobius_involution(&a, &a);
        for k in 0..2 {
            assert!((fa0.coords()[k] - a.coords()[k]).norm() < 1e-15);
            assert!(fa_a.coords()[k].norm() < 1e-15);
        }
        let z = BallPoint::from_reals(&[(-0.4, 0.2), (0.1, 0.5)]).unwrap();
        let back = mobius_involution(&a, &mobius_involution(&a, &z));
        for k in 0..2 {
            assert!((back.coords()[k] - z.coords()[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn beta_examples() {
        let rule = radial_rule(2, 1.5, 8, false).unwrap();
        assert!((rule.integrate(|_| 1.0) - 1.0 / 8.75).abs() < 1e-15);
        assert!((rule.integrate(|t| t) - 2.0 / 39.375).abs() < 1e-15);
        assert!(radial_rule(2, -1.0, 8, false).is_err());
    }

    #[test]
    fn moments_exact() {
        for &(a, g) in &[(1.0, 1.5), (2.0, 0.0), (3.0, -0.5), (1.0, 7.0)] {
            let count = 12;
            let (xs, ws) = gauss_jacobi_unit(count, a, g).unwrap();
            for j in 0..2 * count {
                let approx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(j as i32)).sum();
                let exact = beta_fn(a + 1.0 + j as f64, g + 1.0);
                assert!(((approx - exact) / exact).abs() < 1e-13, "a={a} g={g} j={j}");
            }
        }
    }

    #[test]
    fn adaptive_rule_matches_exact() {
        let rule = radial_rule(2, 0.5, 16, true).unwrap();
        let est = rule.integrate_adaptive(|t: f64| (3.0 * t).cos()).unwrap();
        let plain = radial_rule(2, 0.5, 40, false).unwrap().integrate(|t: f64| (3.0 * t).cos());
        assert!((est.value - plain).abs() < 1e-12);
        assert!(rule.nodes().iter().all(|&t| t <= 1.0 - GUARD_BAND));
    }

    #[test]
    fn ball_integral_examples() {
        let zero = MultiIndex::zero(2);
        let one = vec![(rational(1, 1), zero.clone(), zero.clone())];
        let flat = radial_rule(2, 0.0, 4, false).unwrap();
        assert!((ball_integrate(|_| 1.0, &one, &flat).unwrap() - 1.0).abs() < 1e-15);
        let e1 = MultiIndex::new(vec![1, 0]);
        let z1 = vec![(rational(1, 1), e1.clone(), e1)];
        assert!((ball_integrate(|_| 1.0, &z1, &flat).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // |Φ_{0,0}|² at n = 2, ν = 2: κ² = 3, integrand 3(1−t)^{2ν−n−1} against dμ
        let rule = radial_rule(2, 1.0, 4, false).unwrap();
        assert!((ball_integrate(|_| 3.0, &one, &rule).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_rule_moments() {
        for n in 1..=3 {
            let rule = SphereRule::new(n, 4, 5).unwrap();
            assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        }
        let rule = SphereRule::new(3, 4, 5).unwrap();
        let a = MultiIndex::new(vec![2, 1, 0]);
        let v = rule.integrate(|th: &[Complex64]| th[0].norm_sqr().powi(2) * th[1].norm_sqr());
        assert!((v - ratio_to_f64(&sphere_monomial_integral(&a, &a))).abs() < 1e-15);
        let off = rule.integrate(|th: &[Complex64]| th[0] * th[1].conj());
        assert!(off.norm() < 1e-15);
    }
}
