//! Spectral symbol of the Berezin transform as a function of the
//! Laplace–Beltrami operator, with λ² = −Δ-eigenvalue − n².
//!
//! The quadrature of the spherical transform of the profile is the reference
//! value. The Wilson-polynomial closed form, the m = 0 gamma ratio and the
//! ₃F₂ form are all compared against it. [`constant_audit`] fits the global
//! constant of the closed form against the quadrature.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::berezin::c_const;
use crate::error::{Error, Result};
use crate::geometry::{weighted_rule, BallPoint, Estimate, Refinement};
use crate::orthopoly::{jacobi_eval, linearization_coeffs_rounded, wilson_eval, JacobiParams, WilsonParams};
use crate::params::SpaceParams;
use crate::special::{
    gamma, gamma_pair, gauss_2f1_regularized, hyp_3f2_unit_detailed, ln_gamma, ln_gamma_complex, rgamma_complex,
    SeriesControl,
};

/// Which multiplicative constants the closed forms use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConstantMode {
    /// Constants fixed against the quadrature reference.
    #[default]
    Audited,
    /// Constants exactly as in the closed-form derivation.
    Literal,
}

/// Normalization of the Koornwinder right side relative to its printed form.
const KOORNWINDER_SCALE: f64 = 0.5;

fn mode_scale(mode: ConstantMode) -> f64 {
    match mode {
        ConstantMode::Audited => KOORNWINDER_SCALE,
        ConstantMode::Literal => 1.0,
    }
}

fn i_times(lambda: Complex64) -> Complex64 {
    Complex64::new(0.0, 1.0) * lambda
}

/// λ²/4 for λ on the real or imaginary axis.
fn wilson_argument(lambda: Complex64) -> Result<f64> {
    if lambda.re != 0.0 && lambda.im != 0.0 {
        return Err(Error::Parameter(format!("λ = {lambda} must be real or purely imaginary")));
    }
    Ok((lambda * lambda).re / 4.0)
}

/// Spherical function φ_λ(z) = (1 − |z|²)^{(iλ+n)/2} ₂F₁((iλ+n)/2, (iλ+n)/2; n; |z|²).
pub fn spherical_function(n: usize, lambda: Complex64, z: &BallPoint) -> Result<Complex64> {
    let t = z.norm_sq();
    let a = (i_times(lambda) + n as f64) * 0.5;
    let f = gauss_2f1_regularized(a, a, Complex64::new(n as f64, 0.0), t, &SeriesControl::default())?;
    let v = Complex64::new(1.0 - t, 0.0).powc(a) * f;
    if lambda.im == 0.0 {
        if v.im.abs() > 1e-12 * v.norm().max(1.0) {
            return Err(Error::Domain(format!("spherical function has imaginary part {} at real λ", v.im)));
        }
        return Ok(Complex64::new(v.re, 0.0));
    }
    Ok(v)
}

/// ₂F₁((n+iλ)/2, (n−iλ)/2; n; t/(t−1)), the spherical function φ_{−λ} at |z|² = t.
fn phi_minus_lambda(n: usize, lambda: Complex64, t: f64) -> Result<Complex64> {
    let il = i_times(lambda);
    let nf = n as f64;
    gauss_2f1_regularized((il + nf) * 0.5, (-il + nf) * 0.5, Complex64::new(nf, 0.0), t / (t - 1.0), &SeriesControl::default())
}

/// Default policy for the reference quadratures.
pub fn reference_refinement() -> Refinement {
    Refinement { max_levels: 6, rel_tol: 1e-12 }
}

const REFERENCE_POINTS: usize = 16;

fn real_estimate(est: Estimate<Complex64>, lambda: Complex64) -> Result<Estimate<f64>> {
    let on_axis = lambda.re == 0.0 || lambda.im == 0.0;
    if on_axis && est.value.im.abs() > 1e-9 * est.value.norm().max(1e-300) {
        return Err(Error::Quadrature(format!("transform has imaginary part {} on an axis", est.value.im)));
    }
    Ok(Estimate { value: est.value.re, error: est.error, levels: est.levels })
}

/// Spherical transform of the profile,
/// n ∫₀¹ t^{n−1}(1−t)^{2(ν−m)−n−1} P_m(1−2t)² ₂F₁((n+iλ)/2, (n−iλ)/2; n; t/(t−1)) dt.
pub fn spherical_transform_quad(params: &SpaceParams, lambda: Complex64, refinement: Refinement) -> Result<Estimate<f64>> {
    let n = params.n();
    let rule = weighted_rule(n as f64 - 1.0, params.beta() - 1.0, REFERENCE_POINTS, Some(refinement))?;
    let fam = JacobiParams::new(n as f64 - 1.0, params.beta())?;
    let m = params.m();
    let failure = std::cell::RefCell::new(None);
    let est = rule.integrate_adaptive(|t| {
        let p = jacobi_eval(m, &fam, &(1.0 - 2.0 * t));
        match phi_minus_lambda(n, lambda, t) {
            Ok(f) => f * (n as f64 * p * p),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    })?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    real_estimate(est, lambda)
}

/// Parameters (α, β, δ, μ′) of the Koornwinder integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KoornwinderParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu_prime: f64,
}

impl KoornwinderParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, mu_prime: f64) -> Result<Self> {
        if !(alpha > -1.0 && delta > -1.0 && delta + mu_prime > -1.0) {
            return Err(Error::Parameter(format!(
                "Koornwinder parameters need α, δ > −1 and δ + μ′ > −1 (got α={alpha}, δ={delta}, μ′={mu_prime})"
            )));
        }
        Ok(Self { alpha, beta, delta, mu_prime })
    }

    /// The instance that evaluates the k-th radial integral of the symbol.
    pub fn for_space(params: &SpaceParams) -> Self {
        let two = params.two_nu_minus_m();
        let n = params.n() as f64;
        Self { alpha: n - 1.0, beta: 0.0, delta: two, mu_prime: two - n - 1.0 }
    }

    fn wilson(&self) -> WilsonParams<f64> {
        let Self { alpha, beta, delta, mu_prime } = *self;
        WilsonParams::new(
            (delta + mu_prime + 1.0) / 2.0,
            (delta - mu_prime + 1.0) / 2.0,
            (alpha + beta + 1.0) / 2.0,
            (alpha - beta + 1.0) / 2.0,
        )
    }
}

/// Left side ∫₀^∞ cosh^{−α+β−δ−μ′−1} sinh^{2α+1} P_k^{(α,δ)}(1 − 2tanh²)
/// ₂F₁((α+β+1±iλ)/2; α+1; −sinh²) dt, evaluated in u = tanh² t.
pub fn koornwinder_integral_quad(kp: &KoornwinderParams, k: usize, lambda: f64, refinement: Refinement) -> Result<Estimate<f64>> {
    let KoornwinderParams { alpha, beta, delta, mu_prime } = *kp;
    // ½ u^α (1−u)^{(δ+μ′−α−β)/2 − 1}; the ₂F₁ decays like (1−u)^{(α+β+1)/2},
    // which is moved into the weight
    let decay = (alpha + beta + 1.0) / 2.0;
    let rule = weighted_rule(alpha, (delta + mu_prime - 1.0) / 2.0, REFERENCE_POINTS, Some(refinement))?;
    let fam = JacobiParams::new(alpha, delta)?;
    let lam = Complex64::new(lambda, 0.0);
    let a = (i_times(lam) + alpha + beta + 1.0) * 0.5;
    let b = (-i_times(lam) + alpha + beta + 1.0) * 0.5;
    let c = Complex64::new(alpha + 1.0, 0.0);
    let failure = std::cell::RefCell::new(None);
    let est = rule.integrate_adaptive(|u| {
        let p = jacobi_eval(k, &fam, &(1.0 - 2.0 * u));
        match gauss_2f1_regularized(a, b, c, u / (u - 1.0), &SeriesControl::default()) {
            Ok(f) => f * (0.5 * p * (1.0 - u).powf(-decay)),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    })?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    real_estimate(est, lam)
}

/// Γ × Wilson right side of the Koornwinder integral.
pub fn koornwinder_rhs(kp: &KoornwinderParams, k: usize, lambda: f64, mode: ConstantMode) -> Result<f64> {
    let KoornwinderParams { alpha, beta, delta, mu_prime } = *kp;
    let kf = k as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let pair = gamma_pair((delta + mu_prime + 1.0) / 2.0, Complex64::new(lambda, 0.0))?;
    let ln_den = ln_gamma(kf + 1.0)? + ln_gamma((alpha + beta + delta + mu_prime + 2.0) / 2.0 + kf)?
        + ln_gamma((alpha - beta + delta + mu_prime + 2.0) / 2.0 + kf)?;
    let w = wilson_eval(k, &(lambda * lambda / 4.0), &kp.wilson());
    Ok(mode_scale(mode) * sign * gamma(alpha + 1.0)? * pair * (-ln_den).exp() * w)
}

fn symbol_wilson_params(params: &SpaceParams, b: f64) -> WilsonParams<f64> {
    let n = params.n() as f64;
    WilsonParams::new(params.two_nu_minus_m() - n / 2.0, b, n / 2.0, n / 2.0)
}

/// The candidate values of the second Wilson parameter.
pub fn wilson_b_candidates(n: usize) -> [f64; 2] {
    let h = n as f64 / 2.0;
    [1.0 + h, 1.0 - h]
}

/// Closed form of the k-th radial integral,
/// 2nΓ(n)(−1)^k/(k!Γ²(2(ν−m)+k)) |Γ(2(ν−m) − n/2 + iλ/2)|² W_k(λ²/4), times
/// the Koornwinder normalization in audited mode.
pub fn i_k_closed(params: &SpaceParams, k: usize, lambda: Complex64, mode: ConstantMode) -> Result<f64> {
    if k > 2 * params.m() {
        return Err(Error::Index(format!("k = {k} exceeds 2m = {}", 2 * params.m())));
    }
    let n = params.n() as f64;
    let two = params.two_nu_minus_m();
    let kf = k as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let pre = 2.0 * n * gamma(n)? * sign * (-(ln_gamma(kf + 1.0)? + 2.0 * ln_gamma(two + kf)?)).exp();
    let t = wilson_argument(lambda)?;
    let w = wilson_eval(k, &t, &symbol_wilson_params(params, 1.0 + n / 2.0));
    Ok(mode_scale(mode) * pre * gamma_pair(two - n / 2.0, lambda)? * w)
}

/// Quadrature of the k-th radial integral
/// n ∫ t^{n−1}(1−t)^{2(ν−m)−n−1} P_k^{(n−1, 2(ν−m))}(1−2t) φ_{−λ}(t) dt.
pub fn i_k_quad(params: &SpaceParams, k: usize, lambda: f64, refinement: Refinement) -> Result<Estimate<f64>> {
    let kp = KoornwinderParams::for_space(params);
    let est = koornwinder_integral_quad(&kp, k, lambda, refinement)?;
    let scale = 2.0 * params.n() as f64;
    Ok(Estimate { value: scale * est.value, error: scale * est.error, levels: est.levels })
}

/// Coefficients γ_0..γ_{2m} of the Wilson expansion of the symbol.
pub fn gamma_coeffs(params: &SpaceParams, mode: ConstantMode) -> Result<Vec<f64>> {
    let a = linearization_coeffs_rounded(params)?;
    let n = params.n() as f64;
    let two = params.two_nu_minus_m();
    let c = c_const(params);
    let mut out = Vec::with_capacity(a.len());
    for (k, ak) in a.iter().enumerate() {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let pre = 2.0 * n * gamma(n)? * sign * (-(ln_gamma(kf + 1.0)? + 2.0 * ln_gamma(two + kf)?)).exp();
        out.push(mode_scale(mode) * c * ak * pre);
    }
    Ok(out)
}

/// Wilson sum with explicit coefficients and second Wilson parameter.
pub fn symbol_wilson_with(params: &SpaceParams, lambda: Complex64, coeffs: &[f64], b: f64) -> Result<f64> {
    let n = params.n() as f64;
    let t = wilson_argument(lambda)?;
    let wp = symbol_wilson_params(params, b);
    let sum: f64 = coeffs.iter().enumerate().map(|(k, g)| g * wilson_eval(k, &t, &wp)).sum();
    Ok(gamma_pair(params.two_nu_minus_m() - n / 2.0, lambda)? * sum)
}

/// Symbol of the Berezin transform in Wilson form.
pub fn symbol_wilson(params: &SpaceParams, lambda: Complex64, mode: ConstantMode) -> Result<f64> {
    let g = gamma_coeffs(params, mode)?;
    symbol_wilson_with(params, lambda, &g, 1.0 + params.n() as f64 / 2.0)
}

/// m = 0 symbol |Γ(2ν − n/2 + iλ/2)|² / (Γ(2ν − n) Γ(2ν)).
pub fn symbol_peetre(nu: f64, n: usize, lambda: Complex64) -> Result<f64> {
    let nf = n as f64;
    if !(2.0 * nu > nf) {
        return Err(Error::Admissibility(format!("2ν = {} must exceed n = {n}", 2.0 * nu)));
    }
    wilson_argument(lambda)?;
    let ln = ln_gamma(2.0 * nu - nf)? + ln_gamma(2.0 * nu)?;
    Ok(gamma_pair(2.0 * nu - nf / 2.0, lambda)? * (-ln).exp())
}

/// Coefficients C_j, j = 0..2m, of the ₃F₂ form.
pub fn c_coeffs_3f2(params: &SpaceParams) -> Result<Vec<f64>> {
    let (n, nu, m) = (params.n() as f64, *params.nu(), params.m());
    let mf = m as f64;
    let lnfact = |k: usize| ln_gamma(k as f64 + 1.0);
    let front_ln = ln_gamma(n + mf)? - lnfact(m)? - ln_gamma(2.0 * nu - n - mf + 1.0)? - ln_gamma(2.0 * nu - n)?;
    let mut out = Vec::with_capacity(2 * m + 1);
    for j in 0..=2 * m {
        let jf = j as f64;
        let mut inner = 0.0;
        for p in j.saturating_sub(m)..=m.min(j) {
            let pf = p as f64;
            let ln = 2.0 * lnfact(m)? + ln_gamma(2.0 * nu - mf)? + ln_gamma(2.0 * nu - mf + jf - pf)?
                - lnfact(j - p)?
                - lnfact(m + p - j)?
                - lnfact(p)?
                - lnfact(m - p)?
                - ln_gamma(n + jf - pf)?
                - ln_gamma(n + pf)?;
            inner += ln.exp();
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(params.beta() * sign * (front_ln + ln_gamma(n + jf)?).exp() * inner);
    }
    Ok(out)
}

/// The ₃F₂ form of the symbol, evaluated as written. Diagnostic only.
pub fn symbol_3f2(params: &SpaceParams, lambda: f64) -> Result<Complex64> {
    let n = params.n() as f64;
    let mu = *params.nu() - params.m() as f64;
    let two = params.two_nu_minus_m();
    let s = (Complex64::new(n, lambda)) * 0.5; // (n + iλ)/2
    let cs = c_coeffs_3f2(params)?;
    let ctl = SeriesControl::default();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, cj) in cs.iter().enumerate() {
        let jf = j as f64;
        let num = ln_gamma_complex(Complex64::new(two - n / 2.0, lambda / 2.0))?.exp();
        let den = rgamma_complex(s + two + jf);
        let f = hyp_3f2_unit_detailed(
            [s, Complex64::new(n + jf, 0.0), s],
            [s + mu + jf, Complex64::new(n, 0.0)],
            &ctl,
        )?;
        acc += num * den * f.value * *cj;
    }
    Ok(acc)
}

/// One row of a symbol sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSample {
    pub lambda: f64,
    pub quad_value: f64,
    pub quad_error: f64,
    pub wilson_value: f64,
    pub peetre_value: Option<f64>,
    pub f32_value: Option<f64>,
    pub rel_gap_quad_wilson: f64,
    pub audit_scale: f64,
}

impl SymbolSample {
    /// Relative gap between the ₃F₂ value and the quadrature.
    pub fn f32_gap(&self) -> Option<f64> {
        self.f32_value.map(|v| rel_gap(v, self.quad_value))
    }
}

pub fn rel_gap(a: f64, reference: f64) -> f64 {
    (a - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Quadrature, Wilson, Peetre and ₃F₂ values of the symbol at λ.
pub fn symbol_sample(params: &SpaceParams, lambda: f64, mode: ConstantMode, audit_scale: f64) -> Result<SymbolSample> {
    let lam = Complex64::new(lambda, 0.0);
    let quad = spherical_transform_quad(params, lam, reference_refinement())?;
    let c = c_const(params);
    let quad_value = c * quad.value;
    let wilson_value = symbol_wilson(params, lam, mode)?;
    let peetre_value = if params.m() == 0 { Some(symbol_peetre(*params.nu(), params.n(), lam)?) } else { None };
    let f32_value = symbol_3f2(params, lambda).ok().map(|v| v.re);
    Ok(SymbolSample {
        lambda,
        quad_value,
        quad_error: c * quad.error,
        wilson_value,
        peetre_value,
        f32_value,
        rel_gap_quad_wilson: rel_gap(wilson_value, quad_value),
        audit_scale,
    })
}

/// Evaluates every λ of the grid independently; output order follows the
/// grid regardless of the thread count.
pub fn symbol_sweep(params: &SpaceParams, grid: &[f64], mode: ConstantMode, audit_scale: f64) -> Vec<Result<SymbolSample>> {
    grid.par_iter().map(|&l| symbol_sample(params, l, mode, audit_scale)).collect()
}

/// Header of the symbol CSV.
pub const CSV_HEADER: &str = "lambda,quad,wilson,peetre,f32,rel_gap,audit_scale";

/// 17 significant digits: plain decimal for moderate magnitudes, scientific
/// otherwise.
pub fn format_sig17(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..16).contains(&e) {
        format!("{:.*}", (16 - e) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(format_sig17).unwrap_or_else(|| "nan".into())
}

impl SymbolSample {
    /// One CSV row in the column order of [`CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        [
            format_sig17(self.lambda),
            format_sig17(self.quad_value),
            format_sig17(self.wilson_value),
            opt_cell(self.peetre_value),
            opt_cell(self.f32_value),
            format_sig17(self.rel_gap_quad_wilson),
            format_sig17(self.audit_scale),
        ]
        .join(",")
    }

    /// Row for a λ whose evaluation failed.
    pub fn failed_row(lambda: f64, audit_scale: f64) -> String {
        format!("{},nan,nan,nan,nan,nan,{}", format_sig17(lambda), format_sig17(audit_scale))
    }
}

/// Relative least-squares scale s minimizing Σ((s·a_i − r_i)/r_i)².
pub fn fit_scale(values: &[f64], reference: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (a, r) in values.iter().zip(reference) {
        let q = a / r;
        num += q;
        den += q * q;
    }
    num / den
}

fn max_rel_residual(values: &[f64], reference: &[f64], s: f64) -> f64 {
    values.iter().zip(reference).map(|(a, r)| rel_gap(s * a, *r)).fold(0.0, f64::max)
}

/// Fit of one Wilson parameterization against the quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateFit {
    pub b: f64,
    pub scale: f64,
    pub residual: f64,
}

/// Outcome of reconciling the closed-form constants with the quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub n: usize,
    pub nu: f64,
    pub m: usize,
    pub lambdas: Vec<f64>,
    pub quad: Vec<f64>,
    pub literal_gamma: Vec<f64>,
    pub audited_gamma: Vec<f64>,
    pub candidates: Vec<CandidateFit>,
    pub chosen_b: f64,
    pub fitted_scale: f64,
    pub literal_residual: f64,
    pub audited_residual: f64,
    pub refit_scale: f64,
    pub f32_gaps: Vec<Option<f64>>,
}

/// Residual bound the audited constants must meet.
pub const AUDIT_TOL: f64 = 1e-8;
/// Above this no parameterization is acceptable.
pub const AUDIT_FAIL: f64 = 1e-6;

/// Fits the global constant of the literal Wilson form and decides the
/// second Wilson parameter, both against the quadrature reference.
pub fn constant_audit(params: &SpaceParams, lambda_grid: &[f64]) -> Result<AuditReport> {
    if lambda_grid.len() < 4 {
        return Err(Error::Parameter("the audit needs at least 4 λ values".into()));
    }
    let c = c_const(params);
    let mut quad = Vec::with_capacity(lambda_grid.len());
    for &l in lambda_grid {
        quad.push(c * spherical_transform_quad(params, Complex64::new(l, 0.0), reference_refinement())?.value);
    }
    let literal_gamma = gamma_coeffs(params, ConstantMode::Literal)?;
    let audited_gamma = gamma_coeffs(params, ConstantMode::Audited)?;
    let mut candidates = Vec::new();
    for b in wilson_b_candidates(params.n()) {
        let vals = lambda_grid
            .iter()
            .map(|&l| symbol_wilson_with(params, Complex64::new(l, 0.0), &literal_gamma, b))
            .collect::<Result<Vec<_>>>()?;
        let scale = fit_scale(&vals, &quad);
        candidates.push(CandidateFit { b, scale, residual: max_rel_residual(&vals, &quad, scale) });
    }
    let best = *candidates
        .iter()
        .min_by(|x, y| x.residual.partial_cmp(&y.residual).unwrap_or(std::cmp::Ordering::Equal))
        .expect("two candidates");
    if !(best.residual < AUDIT_FAIL) {
        return Err(Error::Audit(format!("no Wilson parameterization fits (best residual {:.3e})", best.residual)));
    }
    let literal_vals = lambda_grid
        .iter()
        .map(|&l| symbol_wilson_with(params, Complex64::new(l, 0.0), &literal_gamma, best.b))
        .collect::<Result<Vec<_>>>()?;
    let audited_vals = lambda_grid
        .iter()
        .map(|&l| symbol_wilson_with(params, Complex64::new(l, 0.0), &audited_gamma, best.b))
        .collect::<Result<Vec<_>>>()?;
    let f32_gaps = lambda_grid
        .iter()
        .zip(&quad)
        .map(|(&l, q)| symbol_3f2(params, l).ok().map(|v| rel_gap(v.re, *q)))
        .collect();
    Ok(AuditReport {
        n: params.n(),
        nu: *params.nu(),
        m: params.m(),
        lambdas: lambda_grid.to_vec(),
        quad: quad.clone(),
        literal_gamma,
        audited_gamma,
        candidates,
        chosen_b: best.b,
        fitted_scale: best.scale,
        literal_residual: max_rel_residual(&literal_vals, &quad, 1.0),
        audited_residual: max_rel_residual(&audited_vals, &quad, 1.0),
        refit_scale: fit_scale(&audited_vals, &quad),
        f32_gaps,
    })
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.audited_residual <= AUDIT_TOL
    }
}

fn fmt_num(x: f64) -> String {
    format_sig17(x)
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "constant audit n={} nu={} m={}", self.n, self.nu, self.m)?;
        for c in &self.candidates {
            writeln!(f, "candidate b={} scale={} residual={:.3e}", c.b, fmt_num(c.scale), c.residual)?;
        }
        writeln!(f, "chosen b={}", self.chosen_b)?;
        writeln!(f, "fitted scale={}", fmt_num(self.fitted_scale))?;
        for (k, (l, a)) in self.literal_gamma.iter().zip(&self.audited_gamma).enumerate() {
            writeln!(f, "gamma[{k}] literal={} audited={}", fmt_num(*l), fmt_num(*a))?;
        }
        writeln!(f, "literal residual={:.3e}", self.literal_residual)?;
        writeln!(f, "audited residual={:.3e}", self.audited_residual)?;
        writeln!(f, "audited refit scale={}", fmt_num(self.refit_scale))?;
        for ((l, q), g) in self.lambdas.iter().zip(&self.quad).zip(&self.f32_gaps) {
            match g {
                Some(g) => writeln!(f, "3F2 lambda={l} quad={} rel_gap={g:.3e}", fmt_num(*q))?,
                None => writeln!(f, "3F2 lambda={l} quad={} rel_gap=diverged", fmt_num(*q))?,
            }
        }
        write!(f, "status={}", if self.passed() { "PASS" } else { "FAIL" })
    }
}
