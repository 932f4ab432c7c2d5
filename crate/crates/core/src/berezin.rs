//! Berezin transforms attached to A_m^{2,ν}: the constant c, the radial
//! profile h, the bi-invariant kernel, and quadrature application to
//! observables.
//!
//! Off-center evaluation substitutes w = φ_z(u); the kernel becomes radial in
//! u and dμ_n is invariant, so
//! B[φ](z) = c ∫₀¹ n t^{n−1}(1−t)^{2(ν−m)−n−1} P_m(1−2t)² ∫_S φ(φ_z(√t θ)) dσ dt.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{mobius_involution, radial_rule, tanh2_distance, BallPoint, SphereRule};
use crate::orthopoly::{jacobi_eval, JacobiParams};
use crate::params::SpaceParams;
use crate::special::{ln_gamma, Compensated};

/// Γ(n) m! (2(ν−m)−n) Γ(2ν−m) / (n! Γ(n+m) Γ(2ν−m−n+1)).
pub fn c_const(params: &SpaceParams) -> f64 {
    let (n, nu, m) = (params.n() as f64, *params.nu(), params.m() as f64);
    let ln = ln_gamma(n).unwrap() + ln_gamma(m + 1.0).unwrap() + ln_gamma(2.0 * nu - m).unwrap()
        - ln_gamma(n + 1.0).unwrap()
        - ln_gamma(n + m).unwrap()
        - ln_gamma(2.0 * nu - m - n + 1.0).unwrap();
    params.beta() * ln.exp()
}

fn profile_family(params: &SpaceParams) -> JacobiParams {
    JacobiParams::new(params.n() as f64 - 1.0, params.beta()).expect("admissible parameters")
}

/// h(ξ) = (1 − |ξ|²)^{2(ν−m)} P_m^{(n−1, 2(ν−m)−n)}(1 − 2|ξ|²)².
pub fn radial_profile(params: &SpaceParams, xi_norm_sq: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi_norm_sq) {
        return Err(Error::Domain(format!("|ξ|² = {xi_norm_sq} outside [0, 1)")));
    }
    let p = jacobi_eval(params.m(), &profile_family(params), &(1.0 - 2.0 * xi_norm_sq));
    Ok((1.0 - xi_norm_sq).powf(params.two_nu_minus_m()) * p * p)
}

/// Density of B[·](z) against dμ_n(w).
pub fn berezin_kernel(params: &SpaceParams, z: &BallPoint, w: &BallPoint) -> f64 {
    let t = tanh2_distance(z, w);
    let p = jacobi_eval(params.m(), &profile_family(params), &(1.0 - 2.0 * t));
    c_const(params) * (1.0 - t).powf(params.two_nu_minus_m()) * p * p
}

/// Boundary behaviour promised by an observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntegrabilityHint {
    Bounded,
    /// |φ(w)| ≲ (1 − |w|²)^{−s}
    BoundaryGrowth(f64),
}

/// Function on the ball together with its integrability hint.
pub struct ObservableFn<'a> {
    f: Box<dyn Fn(&BallPoint) -> f64 + Sync + 'a>,
    hint: IntegrabilityHint,
}

impl<'a> ObservableFn<'a> {
    pub fn new<F: Fn(&BallPoint) -> f64 + Sync + 'a>(f: F, hint: IntegrabilityHint) -> Self {
        Self { f: Box::new(f), hint }
    }

    pub fn bounded<F: Fn(&BallPoint) -> f64 + Sync + 'a>(f: F) -> Self {
        Self::new(f, IntegrabilityHint::Bounded)
    }

    pub fn eval(&self, w: &BallPoint) -> f64 {
        (self.f)(w)
    }

    pub fn hint(&self) -> IntegrabilityHint {
        self.hint
    }
}

/// Discretization of the substituted Berezin integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerezinRule {
    pub radial_points: usize,
    pub simplex_points: usize,
    pub phases: usize,
}

impl BerezinRule {
    pub fn for_dimension(n: usize) -> Self {
        match n {
            0..=2 => Self { radial_points: 32, simplex_points: 16, phases: 24 },
            3 => Self { radial_points: 24, simplex_points: 10, phases: 12 },
            _ => Self { radial_points: 16, simplex_points: 6, phases: 8 },
        }
    }

    /// The companion rule used for the error estimate.
    pub fn refined(&self) -> Self {
        Self {
            radial_points: self.radial_points * 3 / 2,
            simplex_points: self.simplex_points * 3 / 2,
            phases: self.phases * 3 / 2,
        }
    }
}

/// Quadrature value with the gap to the refined rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerezinValue {
    pub value: f64,
    pub error: f64,
}

fn check_hint(params: &SpaceParams, phi: &ObservableFn) -> Result<()> {
    if let IntegrabilityHint::BoundaryGrowth(s) = phi.hint() {
        let room = params.beta();
        if !(s < room) {
            return Err(Error::Domain(format!(
                "observable growth exponent {s} is not integrable against the kernel (needs < {room})"
            )));
        }
    }
    Ok(())
}

/// c ∫ (weight) P_m(1−2t)² ∫_S g(√t θ) dσ dt for one rule.
fn substituted_integral<G: Fn(&BallPoint) -> f64>(params: &SpaceParams, g: &G, rule: &BerezinRule) -> Result<f64> {
    let n = params.n();
    let radial = radial_rule(n, params.beta() - 1.0, rule.radial_points, false)?;
    let sphere = SphereRule::new(n, rule.simplex_points, rule.phases)?;
    let fam = profile_family(params);
    let bad = std::cell::Cell::new(None);
    let total = radial.integrate(|t| {
        let p = jacobi_eval(params.m(), &fam, &(1.0 - 2.0 * t));
        let r = t.sqrt();
        let ang = sphere.integrate(|theta: &[Complex64]| {
            let u = BallPoint::new(theta.iter().map(|c| c * r).collect()).expect("node inside the ball");
            let v = g(&u);
            if !v.is_finite() && bad.get().is_none() {
                bad.set(Some(t));
            }
            v
        });
        n as f64 * p * p * ang
    });
    if let Some(t) = bad.get() {
        return Err(Error::Domain(format!("observable not finite at |u|² = {t}")));
    }
    Ok(c_const(params) * total)
}

fn with_error<G: Fn(&BallPoint) -> f64>(params: &SpaceParams, g: G, rule: &BerezinRule) -> Result<BerezinValue> {
    let coarse = substituted_integral(params, &g, rule)?;
    let fine = substituted_integral(params, &g, &rule.refined())?;
    Ok(BerezinValue { value: fine, error: (fine - coarse).abs() })
}

/// B[φ](z) by quadrature, with an error estimate from a refined rule.
pub fn berezin_apply(params: &SpaceParams, phi: &ObservableFn, z: &BallPoint, rule: &BerezinRule) -> Result<BerezinValue> {
    check_hint(params, phi)?;
    if z.dim() != params.n() {
        return Err(Error::Parameter("point dimension does not match n".into()));
    }
    with_error(params, |u: &BallPoint| phi.eval(&mobius_involution(z, u)), rule)
}

/// m = 0 transform through the cosh^{−4ν} form,
/// Γ(2ν)/(n! Γ(2ν−n)) ∫ (1 − |u|²)^{2ν} φ(φ_z(u)) dμ_n(u).
pub fn berezin_apply_m0(nu: f64, n: usize, phi: &ObservableFn, z: &BallPoint, rule: &BerezinRule) -> Result<BerezinValue> {
    if !(2.0 * nu > n as f64) {
        return Err(Error::Admissibility(format!("2ν = {} must exceed n = {n}", 2.0 * nu)));
    }
    if z.dim() != n {
        return Err(Error::Parameter("point dimension does not match n".into()));
    }
    if let IntegrabilityHint::BoundaryGrowth(s) = phi.hint() {
        if !(s < 2.0 * nu - n as f64) {
            return Err(Error::Domain(format!("observable growth exponent {s} is not integrable")));
        }
    }
    let nf = n as f64;
    let c0 = (ln_gamma(2.0 * nu)? - ln_gamma(nf + 1.0)? - ln_gamma(2.0 * nu - nf)?).exp();
    let run = |rule: &BerezinRule| -> Result<f64> {
        let radial = radial_rule(n, 2.0 * nu - nf - 1.0, rule.radial_points, false)?;
        let sphere = SphereRule::new(n, rule.simplex_points, rule.phases)?;
        let total = radial.integrate(|t| {
            let r = t.sqrt();
            let ang = sphere.integrate(|theta: &[Complex64]| {
                let u = BallPoint::new(theta.iter().map(|c| c * r).collect()).expect("node inside the ball");
                phi.eval(&mobius_involution(z, &u))
            });
            nf * ang
        });
        Ok(c0 * total)
    };
    let coarse = run(rule)?;
    let fine = run(&rule.refined())?;
    Ok(BerezinValue { value: fine, error: (fine - coarse).abs() })
}

/// ∫ kernel(z, w) dμ_n(w) integrated directly in w, without the Möbius
/// substitution.
pub fn kernel_mass(params: &SpaceParams, z: &BallPoint, rule: &BerezinRule) -> Result<BerezinValue> {
    let n = params.n();
    let run = |rule: &BerezinRule| -> Result<f64> {
        let radial = radial_rule(n, params.beta() - 1.0, rule.radial_points, false)?;
        let sphere = SphereRule::new(n, rule.simplex_points, rule.phases)?;
        let fam = profile_family(params);
        let expo = params.two_nu_minus_m();
        let one = Complex64::new(1.0, 0.0);
        let total = radial.integrate(|t| {
            let r = t.sqrt();
            let ang = sphere.integrate(|theta: &[Complex64]| {
                let w = BallPoint::new(theta.iter().map(|c| c * r).collect()).expect("node inside the ball");
                // kernel / (1 − |w|²)^{2(ν−m)}
                let ratio = (1.0 - z.norm_sq()) / (one - z.inner(&w)).norm_sqr();
                let p = jacobi_eval(params.m(), &fam, &(1.0 - 2.0 * tanh2_distance(z, &w)));
                ratio.powf(expo) * p * p
            });
            n as f64 * ang
        });
        Ok(c_const(params) * total)
    };
    let coarse = run(rule)?;
    let fine = run(&rule.refined())?;
    Ok(BerezinValue { value: fine, error: (fine - coarse).abs() })
}

/// One-dimensional reduction for radial observables at the origin:
/// c n ∫ t^{n−1}(1−t)^{2(ν−m)−n−1} P_m(1−2t)² φ(t) dt.
pub fn berezin_radial_at_origin<F: Fn(f64) -> f64>(params: &SpaceParams, phi_of_t: F, points: usize) -> Result<f64> {
    let rule = radial_rule(params.n(), params.beta() - 1.0, points, false)?;
    let fam = profile_family(params);
    let mut acc = Compensated::new();
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let p = jacobi_eval(params.m(), &fam, &(1.0 - 2.0 * t));
        acc.add(w * p * p * phi_of_t(t));
    }
    Ok(c_const(params) * params.n() as f64 * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize, nu: f64, m: usize) -> SpaceParams {
        SpaceParams::new(n, nu, m).unwrap()
    }

    #[test]
    fn constants() {
        assert!((c_const(&sp(2, 2.0, 0)) - 3.0).abs() < 1e-13);
        let p = sp(2, 3.5, 1);
        assert!((radial_profile(&p, 0.0).unwrap() - 4.0).abs() < 1e-14);
        let mid = jacobi_eval(1, &profile_family(&p), &0.0);
        assert!((radial_profile(&p, 0.5).unwrap() - 0.5f64.powf(5.0) * mid * mid).abs() < 1e-15);
        assert!(radial_profile(&p, 1.0).is_err());
    }

    #[test]
    fn unit_mass_of_profile() {
        for (n, nu, m) in [(2, 3.5, 1), (2, 3.5, 2), (3, 4.25, 1), (2, 2.0, 0)] {
            let p = sp(n, nu, m);
            let v = berezin_radial_at_origin(&p, |_| 1.0, 32).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{n} {nu} {m}: {v}");
        }
    }

    #[test]
    fn kernel_on_diagonal() {
        let p = sp(2, 3.5, 1);
        let z = BallPoint::from_reals(&[(0.3, 0.1), (-0.2, 0.0)]).unwrap();
        assert!((berezin_kernel(&p, &z, &z) - c_const(&p) * 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unbounded() {
        let p = sp(2, 3.5, 1);
        let phi = ObservableFn::new(|w: &BallPoint| 1.0 / (1.0 - w.norm_sq()).powi(5), IntegrabilityHint::BoundaryGrowth(5.0));
        let rule = BerezinRule { radial_points: 4, simplex_points: 2, phases: 2 };
        assert!(berezin_apply(&p, &phi, &BallPoint::origin(2), &rule).is_err());
    }
}
