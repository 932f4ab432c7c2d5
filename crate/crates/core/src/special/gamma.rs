//! Real and complex gamma functions.
//!
//! Both paths shift the argument to `Re z >= 16`, apply the Stirling series
//! there and undo the shift with a single product. Arguments with
//! `Re z < 1/2` go through the reflection formula first.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT_TARGET: f64 = 16.0;

/// B_{2k} / (2k (2k - 1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn stirling_tail(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + *c;
    }
    acc * inv
}

fn ln_gamma_shifted(z: Complex64) -> Complex64 {
    // z.re >= 0.5 here
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.re < SHIFT_TARGET {
        prod *= w;
        w += 1.0;
        shifted = true;
    }
    let stirling = (w - 0.5) * w.ln() - w + LN_SQRT_2PI + stirling_tail(w);
    if shifted {
        stirling - prod.ln()
    } else {
        stirling
    }
}

/// Complex log-gamma. The imaginary part is correct modulo 2π, which is all
/// that exponentiation and modulus computations need.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_pole(z.re) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        let reflected = ln_gamma_shifted(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - reflected)
    } else {
        Ok(ln_gamma_shifted(z))
    }
}

pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return gamma(z.re).map(|g| Complex64::new(g, 0.0));
    }
    ln_gamma_complex(z).map(|l| l.exp())
}

/// Reciprocal gamma, entire: zero at the poles of Γ.
pub fn rgamma_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 && is_pole(z.re) {
        return Complex64::new(0.0, 0.0);
    }
    match gamma_complex(z) {
        Ok(g) => g.inv(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Real log |Γ(x)|.
pub fn ln_gamma(x: f64) -> Result<f64> {
    ln_gamma_complex(Complex64::new(x, 0.0)).map(|l| l.re)
}

/// Real gamma function. Exact products for small positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    let mut w = x;
    let mut prod = 1.0;
    while w < SHIFT_TARGET {
        prod *= w;
        w += 1.0;
    }
    if w > 171.7 {
        return Ok(f64::INFINITY);
    }
    let lg = (w - 0.5) * w.ln() - w + LN_SQRT_2PI + stirling_tail(Complex64::new(w, 0.0)).re;
    Ok(lg.exp() / prod)
}

/// |Γ(x + iy)|².
pub fn gamma_abs_sq(x: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        let g = gamma(x)?;
        return Ok(g * g);
    }
    let l = ln_gamma_complex(Complex64::new(x, y))?;
    Ok((2.0 * l.re).exp())
}

/// Γ(x + iλ/2) Γ(x − iλ/2) for complex λ.
///
/// For real λ this is |Γ(x + iλ/2)|²; along the imaginary axis it is the
/// analytic continuation used when the symbol is evaluated at the bottom of
/// the spectrum.
pub fn gamma_pair(x: f64, lambda: Complex64) -> Result<f64> {
    let i_half = Complex64::new(0.0, 0.5) * lambda;
    let plus = Complex64::new(x, 0.0) + i_half;
    let minus = Complex64::new(x, 0.0) - i_half;
    if lambda.re == 0.0 {
        // both arguments real
        return Ok(gamma(plus.re)? * gamma(minus.re)?);
    }
    if lambda.im == 0.0 {
        return gamma_abs_sq(x, lambda.re / 2.0);
    }
    let l = ln_gamma_complex(plus)? + ln_gamma_complex(minus)?;
    Ok(l.exp().re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(2.0).unwrap(), 1.0);
        assert_eq!(gamma(6.0).unwrap(), 120.0);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-15);
        assert!(rel(gamma(4.5).unwrap(), 11.631_728_396_567_45) < 1e-14);
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(30.25).unwrap(), 2.062_805_313_775_346_9e31) < 1e-13);
    }

    #[test]
    fn poles_are_reported() {
        assert_eq!(gamma(0.0), Err(Error::Pole(0.0)));
        assert_eq!(gamma(-3.0), Err(Error::Pole(-3.0)));
        assert!(gamma_abs_sq(-2.0, 0.0).is_err());
        assert!(gamma_abs_sq(-2.0, 0.1).is_ok());
    }

    #[test]
    fn abs_sq_reflection_identity() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for &t in &[0.0, 0.3, 1.0, 4.0, 17.5, 49.0] {
            let want = PI / (PI * t).cosh();
            assert!(rel(gamma_abs_sq(0.5, t).unwrap(), want) < 1e-13, "t = {t}");
        }
        // |Γ(1 + it)|² = πt / sinh(πt)
        for &t in &[0.2, 2.0, 30.0] {
            let want = PI * t / (PI * t).sinh();
            assert!(rel(gamma_abs_sq(1.0, t).unwrap(), want) < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn recurrence_in_complex_plane() {
        for &(x, y) in &[(-3.7, 2.0), (0.1, -5.0), (12.0, 40.0), (45.0, 3.0), (-20.5, 0.7)] {
            let z = Complex64::new(x, y);
            let lhs = gamma_complex(z + 1.0).unwrap();
            let rhs = z * gamma_complex(z).unwrap();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn pair_continuation_matches_product() {
        // λ = -2i gives Γ(x + 1) Γ(x - 1)
        let v = gamma_pair(3.5, Complex64::new(0.0, -2.0)).unwrap();
        let want = gamma(4.5).unwrap() * gamma(2.5).unwrap();
        assert!(rel(v, want) < 1e-14);
        let real = gamma_pair(2.0, Complex64::new(1.4, 0.0)).unwrap();
        assert!(rel(real, gamma_abs_sq(2.0, 0.7).unwrap()) < 1e-15);
    }
}
