use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The triple (n, ν, m) labelling a generalized Bergman space.
///
/// Admissible when 2ν > n and 2(ν − m) − n > 0, i.e. m does not exceed
/// ⌊ν − n/2⌋ and the top level is excluded when ν − n/2 is itself an integer
/// (the weight exponent would vanish and the basis would not normalize).
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceParams<T: Scalar = f64> {
    n: usize,
    nu: T,
    m: usize,
}

impl<T: Scalar> SpaceParams<T> {
    pub fn new(n: usize, nu: T, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Admissibility(format!("complex dimension n = {n} must be at least 2")));
        }
        let two_nu = T::from_i64(2) * nu.clone();
        if !positive(&(two_nu.clone() - T::from_usize(n))) {
            return Err(Error::Admissibility(format!("2ν = {} must exceed n = {n}", two_nu.to_f64())));
        }
        let gap = two_nu - T::from_usize(2 * m + n);
        if !positive(&gap) {
            return Err(Error::Admissibility(format!(
                "level m = {m} leaves 2(ν − m) − n = {} ≤ 0",
                gap.to_f64()
            )));
        }
        Ok(Self { n, nu, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> &T {
        &self.nu
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// 2(ν − m), the exponent pair of the weight (1 − |z|²)^{2(ν−m)}.
    pub fn two_nu_minus_m(&self) -> T {
        T::from_i64(2) * (self.nu.clone() - T::from_usize(self.m))
    }

    /// 2(ν − m) − n, the Jacobi β parameter of the basis; always positive.
    pub fn beta(&self) -> T {
        self.two_nu_minus_m() - T::from_usize(self.n)
    }

    /// Largest admissible level for this (n, ν).
    pub fn max_level(n: usize, nu: &T) -> Option<usize> {
        let mut best = None;
        for m in 0.. {
            if Self::new(n, nu.clone(), m).is_ok() {
                best = Some(m);
            } else {
                break;
            }
        }
        best
    }

    pub fn to_f64(&self) -> SpaceParams<f64> {
        SpaceParams { n: self.n, nu: self.nu.to_f64(), m: self.m }
    }

    pub fn nu_f64(&self) -> f64 {
        self.nu.to_f64()
    }
}

fn positive<T: Scalar>(x: &T) -> bool {
    // exact for rationals, sign test for floats
    !x.is_zero() && x.to_f64() > 0.0
}
