//! Pochhammer symbols and hypergeometric series.
//!
//! `₂F₁` is only needed for real arguments `x < 1`. The evaluator picks a
//! route by argument:
//!
//! | argument        | route                                              |
//! |-----------------|----------------------------------------------------|
//! | `[0, 1/2]`      | direct series                                      |
//! | `(-1, 0)`       | Pfaff map to `x/(x-1)`                             |
//! | `(-∞, -1]`      | connection formula, two series in `1/(1-x)`        |
//! | `(1/2, 1)`      | Pfaff map to `(-∞, -1)`, then as above             |
//!
//! The two connection terms cancel as `a − b` approaches an integer, losing
//! digits well before the exact degeneracy, so for `x ≥ −49` the Pfaff-mapped
//! series is summed directly instead.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::gamma::{gamma_complex, rgamma_complex};
use crate::special::sum::Compensated;

/// Truncation control for the infinite series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Terms whose magnitude falls below this are treated as zero.
    pub tiny_threshold: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-14, max_terms: 100_000, tiny_threshold: 1e-300 }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::Parameter(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::Parameter("max_terms must be at least 1".into()));
        }
        Ok(Self { rel_tol, max_terms, ..Self::default() })
    }
}

/// Rising factorial (x)_k = x (x+1) ... (x+k-1).
pub fn pochhammer<T: Scalar>(x: &T, k: usize) -> T {
    let mut acc = T::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc = acc * term.clone();
        term = term + T::one();
    }
    acc
}

/// Floating Pochhammer with an overflow flag.
pub fn pochhammer_checked(x: f64, k: usize) -> (f64, bool) {
    let v = pochhammer(&x, k);
    (v, !v.is_finite())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn nonpositive_integer(z: Complex64) -> Option<usize> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        Some((-z.re) as usize)
    } else {
        None
    }
}

/// Power series of ₂F₁ for |x| <= 1/2 or terminating parameters.
fn series_2f1(a: Complex64, b: Complex64, cc: Complex64, x: f64, ctl: &SeriesControl) -> Result<Complex64> {
    let limit = [nonpositive_integer(a), nonpositive_integer(b)]
        .into_iter()
        .flatten()
        .min();
    let mut acc = Compensated::<Complex64>::new();
    let mut term = c(1.0);
    acc.add(term);
    let mut small_run = 0;
    for k in 0..ctl.max_terms {
        if let Some(n) = limit {
            if k >= n {
                return Ok(acc.value());
            }
        }
        let kf = k as f64;
        let den = (cc + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::Parameter(format!("c = {cc} is a nonpositive integer")));
        }
        term = term * (a + kf) * (b + kf) / den * x;
        acc.add(term);
        let scale = acc.value().norm().max(ctl.tiny_threshold);
        if term.norm() <= ctl.rel_tol * 0.1 * scale || term.norm() < ctl.tiny_threshold {
            small_run += 1;
            if small_run >= 2 {
                return Ok(acc.value());
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence { terms: ctl.max_terms })
}

/// Gauss hypergeometric function ₂F₁(a, b; c; x) for real x < 1.
///
/// Fails with [`Error::DegenerateConnection`] when the large-argument branch
/// is needed and a − b is (numerically) an integer; use
/// [`gauss_2f1_regularized`] in that case.
pub fn gauss_2f1(a: Complex64, b: Complex64, cc: Complex64, x: f64, ctl: &SeriesControl) -> Result<Complex64> {
    if x == 0.0 {
        return Ok(c(1.0));
    }
    if !(x < 1.0) {
        return Err(Error::Domain(format!("₂F₁ argument {x} is not below 1")));
    }
    if nonpositive_integer(a).is_some() || nonpositive_integer(b).is_some() {
        return series_2f1(a, b, cc, x, ctl);
    }
    if nonpositive_integer(cc).is_some() {
        return Err(Error::Parameter(format!("c = {cc} is a nonpositive integer")));
    }
    if (0.0..=0.5).contains(&x) {
        series_2f1(a, b, cc, x, ctl)
    } else if x > -1.0 && x < 0.0 {
        // F(a,b;c;x) = (1-x)^{-a} F(a, c-b; c; x/(x-1))
        let y = x / (x - 1.0);
        Ok(c(1.0 - x).powc(-a) * series_2f1(a, cc - b, cc, y, ctl)?)
    } else if x > 0.5 {
        // (1/2, 1): Pfaff to (-inf, -1)
        let y = x / (x - 1.0);
        Ok(c(1.0 - x).powc(-a) * large_negative(a, cc - b, cc, y, ctl)?)
    } else {
        large_negative(a, b, cc, x, ctl)
    }
}

fn large_negative(a: Complex64, b: Complex64, cc: Complex64, x: f64, ctl: &SeriesControl) -> Result<Complex64> {
    let y = x / (x - 1.0);
    if y <= PFAFF_SERIES_LIMIT {
        Ok(c(1.0 - x).powc(-a) * series_2f1(a, cc - b, cc, y, ctl)?)
    } else {
        connection_2f1(a, b, cc, x, ctl)
    }
}

const DEGENERACY_GAP: f64 = 1e-5;
/// Largest Pfaff argument summed directly, reached at x = −49.
const PFAFF_SERIES_LIMIT: f64 = 0.98;

fn integer_gap(z: Complex64) -> f64 {
    (z.re - z.re.round()).abs().hypot(z.im)
}

/// Large negative argument, x <= -1.
fn connection_2f1(a: Complex64, b: Complex64, cc: Complex64, x: f64, ctl: &SeriesControl) -> Result<Complex64> {
    let diff = a - b;
    if integer_gap(diff) < DEGENERACY_GAP {
        return Err(Error::DegenerateConnection(diff.re));
    }
    let w = 1.0 / (1.0 - x);
    let gc = gamma_complex(cc)?;
    let first = gc * gamma_complex(b - a)? * rgamma_complex(b) * rgamma_complex(cc - a)
        * c(1.0 - x).powc(-a)
        * series_2f1(a, cc - b, a - b + 1.0, w, ctl)?;
    let second = gc * gamma_complex(a - b)? * rgamma_complex(a) * rgamma_complex(cc - b)
        * c(1.0 - x).powc(-b)
        * series_2f1(b, cc - a, b - a + 1.0, w, ctl)?;
    Ok(first + second)
}

/// Perturbation used when a − b is an integer in the connection branch.
pub const DEGENERATE_STEP: f64 = 1e-4;

/// ₂F₁ with the degenerate connection case handled by symmetric perturbation
/// of `b` and one Richardson step, giving an O(h⁴) estimate.
pub fn gauss_2f1_regularized(
    a: Complex64,
    b: Complex64,
    cc: Complex64,
    x: f64,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    match gauss_2f1(a, b, cc, x, ctl) {
        Err(Error::DegenerateConnection(_)) => {
            let h = DEGENERATE_STEP;
            let sym = |step: f64| -> Result<Complex64> {
                let up = gauss_2f1(a, b + step, cc, x, ctl)?;
                let down = gauss_2f1(a, b - step, cc, x, ctl)?;
                Ok((up + down) * 0.5)
            };
            let g1 = sym(h)?;
            let g2 = sym(2.0 * h)?;
            Ok((g1 * 4.0 - g2) / 3.0)
        }
        other => other,
    }
}

/// Series value together with its truncation diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: usize,
    pub tail_estimate: f64,
}

/// ₃F₂(a1, a2, a3; b1, b2; 1) with asymptotic tail correction.
pub fn hyp_3f2_unit(a: [Complex64; 3], b: [Complex64; 2], ctl: &SeriesControl) -> Result<Complex64> {
    hyp_3f2_unit_detailed(a, b, ctl).map(|s| s.value)
}

pub fn hyp_3f2_unit_detailed(a: [Complex64; 3], b: [Complex64; 2], ctl: &SeriesControl) -> Result<SeriesValue> {
    let limit = a.iter().filter_map(|&z| nonpositive_integer(z)).min();
    let excess = b[0] + b[1] - a[0] - a[1] - a[2];
    if limit.is_none() && !(excess.re > 0.0) {
        return Err(Error::Divergence(format!(
            "Re(b1 + b2 - a1 - a2 - a3) = {} is not positive",
            excess.re
        )));
    }
    let mut acc = Compensated::<Complex64>::new();
    let mut term = c(1.0);
    acc.add(term);
    for k in 0..ctl.max_terms {
        if let Some(n) = limit {
            if k >= n {
                return Ok(SeriesValue { value: acc.value(), terms: k + 1, tail_estimate: 0.0 });
            }
        }
        let kf = k as f64;
        let den = (b[0] + kf) * (b[1] + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::Parameter("denominator parameter is a nonpositive integer".into()));
        }
        term = term * (a[0] + kf) * (a[1] + kf) * (a[2] + kf) / den;
        acc.add(term);
        if limit.is_none() && k > 8 {
            // terms ~ C j^{-1-s}; remaining sum ~ C (j + 1/2)^{-s} / s
            let j = kf + 1.0;
            let tail = term * c(j).powc(excess + 1.0) * c(j + 0.5).powc(-excess) / excess;
            let total = acc.value() + tail;
            // the corrected sum is off by the next asymptotic order, ~ tail / j
            let err = tail.norm() / j;
            if err <= ctl.rel_tol * total.norm() || term.norm() < ctl.tiny_threshold {
                return Ok(SeriesValue { value: total, terms: k + 2, tail_estimate: err });
            }
            if k + 1 == ctl.max_terms {
                if err <= 1e-8 * total.norm() {
                    return Ok(SeriesValue { value: total, terms: k + 2, tail_estimate: err });
                }
                break;
            }
        }
    }
    Err(Error::NonConvergence { terms: ctl.max_terms })
}

/// Parameters of the Kampé de Fériet function F^{2:2}_{2:1}.
#[derive(Clone, Debug, PartialEq)]
pub struct KdfParams<T> {
    /// joint numerator parameters, Pochhammer index q + s
    pub a: [T; 2],
    /// numerator parameters in x
    pub b: [T; 2],
    /// numerator parameters in y
    pub c: [T; 2],
    /// joint denominator parameters
    pub d: [T; 2],
    pub kappa: T,
    pub rho: T,
}

fn termination_bound<T: Scalar>(v: &[T]) -> Option<usize> {
    v.iter()
        .filter(|x| x.is_nonpositive_integer())
        .map(|x| (-x.to_f64()).round() as usize)
        .min()
}

/// Terminating double sum
///
/// ```text
/// Σ_{q,s} (a1)_{q+s}(a2)_{q+s}(b1)_q(b2)_q(c1)_s(c2)_s
///         / ((d1)_{q+s}(d2)_{q+s}(κ)_q(ρ)_s) · x^q/q! · y^s/s!
/// ```
///
/// Exact when `T` is the rational field.
pub fn kampe_de_feriet_2221<T: Scalar>(p: &KdfParams<T>, x: &T, y: &T) -> Result<T> {
    let joint = termination_bound(&p.a);
    let bx = termination_bound(&p.b);
    let by = termination_bound(&p.c);
    let zero = T::zero();
    let qmax = match (joint, bx, *x == zero) {
        (_, _, true) => Some(0),
        (Some(j), Some(b), _) => Some(j.min(b)),
        (j, b, _) => j.or(b),
    };
    let smax = match (joint, by, *y == zero) {
        (_, _, true) => Some(0),
        (Some(j), Some(c), _) => Some(j.min(c)),
        (j, c, _) => j.or(c),
    };
    let (qmax, smax) = match (qmax, smax) {
        (Some(q), Some(s)) => (q, s),
        _ => return Err(Error::NonTerminating),
    };
    let joint_max = joint.unwrap_or(qmax + smax);
    let mut total = T::zero();
    let mut xq = T::one();
    let mut q_fact = T::one();
    for q in 0..=qmax {
        if q > 0 {
            xq = xq * x.clone();
            q_fact = q_fact * T::from_usize(q);
        }
        let mut ys = T::one();
        let mut s_fact = T::one();
        for s in 0..=smax {
            if s > 0 {
                ys = ys * y.clone();
                s_fact = s_fact * T::from_usize(s);
            }
            if q + s > joint_max {
                break;
            }
            let num = pochhammer(&p.a[0], q + s)
                * pochhammer(&p.a[1], q + s)
                * pochhammer(&p.b[0], q)
                * pochhammer(&p.b[1], q)
                * pochhammer(&p.c[0], s)
                * pochhammer(&p.c[1], s);
            if num == zero {
                continue;
            }
            let den = pochhammer(&p.d[0], q + s)
                * pochhammer(&p.d[1], q + s)
                * pochhammer(&p.kappa, q)
                * pochhammer(&p.rho, s)
                * q_fact.clone()
                * s_fact.clone();
            if den == zero {
                return Err(Error::Parameter(format!(
                    "denominator vanishes at (q, s) = ({q}, {s})"
                )));
            }
            total = total + num * xq.clone() * ys.clone() / den;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&3.0, 4), 360.0);
        assert_eq!(pochhammer(&-2.0, 4), 0.0);
        assert_eq!(pochhammer(&0.5, 0), 1.0);
        assert_eq!(pochhammer(&rational(1, 2), 3), rational(15, 8));
        let (v, overflow) = pochhammer_checked(1e100, 5);
        assert!(overflow && v.is_infinite());
    }

    #[test]
    fn gauss_closed_forms() {
        let ctl = SeriesControl::default();
        let v = gauss_2f1(cx(0.3), cx(1.7), cx(2.2), 0.0, &ctl).unwrap();
        assert_eq!(v, cx(1.0));
        let v = gauss_2f1(cx(1.0), cx(1.0), cx(2.0), 0.5, &ctl).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-14);
        let v = gauss_2f1(cx(0.5), cx(3.0), cx(3.0), 0.36, &ctl).unwrap();
        assert!((v.re - 1.25).abs() < 1e-14);
    }

    #[test]
    fn gauss_log_closed_form_all_regions() {
        // ₂F₁(1,1;2;x) = -ln(1-x)/x
        let ctl = SeriesControl::default();
        for &x in &[-1e6, -50.0, -3.0, -1.0, -0.7, -0.2, 0.3, 0.6, 0.95] {
            let v = gauss_2f1(cx(1.0), cx(1.0), cx(2.0), x, &ctl);
            // a - b = 0 is degenerate in the connection branch
            let v = match v {
                Err(Error::DegenerateConnection(_)) => {
                    gauss_2f1_regularized(cx(1.0), cx(1.0), cx(2.0), x, &ctl).unwrap()
                }
                other => other.unwrap(),
            };
            let want = -(1.0 - x).ln() / x;
            assert!(((v.re - want) / want).abs() < 1e-9, "x = {x}: {v} vs {want}");
        }
    }

    #[test]
    fn gauss_binomial_nondegenerate_connection() {
        // ₂F₁(a, b; b; x) = (1-x)^{-a}
        let ctl = SeriesControl::default();
        for &x in &[-0.5, -1.0, -7.5, -300.0, 0.8] {
            let v = gauss_2f1(cx(0.3), cx(1.9), cx(1.9), x, &ctl).unwrap();
            let want = (1.0 - x).powf(-0.3);
            assert!(((v.re - want) / want).abs() < 1e-13, "x = {x}");
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_connection_is_reported() {
        let ctl = SeriesControl::default();
        let r = gauss_2f1(cx(1.0), cx(2.0), cx(3.5), -400.0, &ctl);
        assert!(matches!(r, Err(Error::DegenerateConnection(_))));
        // closer in, the direct route takes over: ₂F₁(1,2;3.5;x) is finite
        assert!(gauss_2f1(cx(1.0), cx(2.0), cx(3.5), -4.0, &ctl).is_ok());
    }

    #[test]
    fn terminating_and_divergence() {
        let ctl = SeriesControl::default();
        // ₂F₁(-2, b; c; x) = 1 - 2bx/c + b(b+1)x²/(c(c+1))
        let v = gauss_2f1(cx(-2.0), cx(1.5), cx(2.0), -10.0, &ctl).unwrap();
        let want = 1.0 + 2.0 * 1.5 * 10.0 / 2.0 + 1.5 * 2.5 * 100.0 / 6.0;
        assert!((v.re - want).abs() < 1e-12);
        assert!(gauss_2f1(cx(0.5), cx(0.5), cx(1.0), 1.0, &ctl).is_err());
        assert!(gauss_2f1(cx(0.5), cx(0.5), cx(-2.0), 0.3, &ctl).is_err());
    }

    #[test]
    fn hyp3f2_terminating_examples() {
        let ctl = SeriesControl::default();
        let v = hyp_3f2_unit([cx(1.5), cx(2.0), cx(0.0)], [cx(3.0), cx(4.0)], &ctl).unwrap();
        assert_eq!(v, cx(1.0));
        let v = hyp_3f2_unit([cx(-1.0), cx(2.0), cx(3.0)], [cx(4.0), cx(5.0)], &ctl).unwrap();
        assert!((v.re - 0.7).abs() < 1e-15);
        let v = hyp_3f2_unit([cx(-2.0), cx(1.0), cx(1.0)], [cx(1.0), cx(1.0)], &ctl).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn hyp3f2_reduces_to_gauss_sum() {
        // ₃F₂(a, b, c; d, c; 1) = ₂F₁(a, b; d; 1) = Γ(d)Γ(d-a-b)/(Γ(d-a)Γ(d-b))
        use crate::special::gamma::gamma;
        let ctl = SeriesControl::default();
        let (a, b, d) = (0.4, 0.7, 2.9);
        let v = hyp_3f2_unit([cx(a), cx(b), cx(1.3)], [cx(d), cx(1.3)], &ctl).unwrap();
        let want = gamma(d).unwrap() * gamma(d - a - b).unwrap()
            / (gamma(d - a).unwrap() * gamma(d - b).unwrap());
        assert!(((v.re - want) / want).abs() < 1e-10, "{} vs {want}", v.re);
        let div = hyp_3f2_unit([cx(1.0), cx(1.0), cx(1.0)], [cx(1.5), cx(1.5)], &ctl);
        assert!(matches!(div, Err(Error::Divergence(_))));
    }

    #[test]
    fn kdf_examples() {
        let p = KdfParams {
            a: [-1.0, 1.0],
            b: [1.0, 1.0],
            c: [1.0, 1.0],
            d: [1.0, 1.0],
            kappa: 1.0,
            rho: 1.0,
        };
        assert_eq!(kampe_de_feriet_2221(&p, &1.0, &1.0).unwrap(), -1.0);
        assert_eq!(kampe_de_feriet_2221(&p, &0.0, &0.0).unwrap(), 1.0);
        let open = KdfParams { a: [0.5, 1.0], ..p.clone() };
        assert_eq!(kampe_de_feriet_2221(&open, &1.0, &1.0), Err(Error::NonTerminating));
        assert_eq!(kampe_de_feriet_2221(&open, &0.0, &0.0).unwrap(), 1.0);
        let zero_top = KdfParams { a: [0.0, 3.0], ..p };
        assert_eq!(kampe_de_feriet_2221(&zero_top, &1.0, &1.0).unwrap(), 1.0);
    }

    #[test]
    fn kdf_rational_matches_float() {
        let r = |n, d| rational(n, d);
        let pr: KdfParams<BigRational> = KdfParams {
            a: [r(-3, 1), r(-17, 2)],
            b: [r(-2, 1), r(-1, 1)],
            c: [r(-2, 1), r(-1, 1)],
            d: [r(-4, 1), r(-5, 1)],
            kappa: r(-6, 1),
            rho: r(-6, 1),
        };
        let exact = kampe_de_feriet_2221(&pr, &r(1, 1), &r(1, 1)).unwrap();
        let pf = KdfParams {
            a: [-3.0, -8.5],
            b: [-2.0, -1.0],
            c: [-2.0, -1.0],
            d: [-4.0, -5.0],
            kappa: -6.0,
            rho: -6.0,
        };
        let float = kampe_de_feriet_2221(&pf, &1.0, &1.0).unwrap();
        let e = exact.to_f64();
        assert!(((float - e) / e).abs() < 1e-13);
    }
}
