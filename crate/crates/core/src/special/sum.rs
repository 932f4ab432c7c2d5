use std::ops::{Add, Sub};

use num_complex::Complex64;
use num_traits::Zero;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated<T> {
    sum: T,
    carry: T,
}

pub trait CompensatedValue: Copy + Zero + Add<Output = Self> + Sub<Output = Self> {
    fn bigger(a: &Self, b: &Self) -> bool;
    fn modulus(&self) -> f64;
}

impl CompensatedValue for f64 {
    fn bigger(a: &Self, b: &Self) -> bool {
        a.abs() >= b.abs()
    }

    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl CompensatedValue for Complex64 {
    fn bigger(a: &Self, b: &Self) -> bool {
        a.l1_norm() >= b.l1_norm()
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }
}

impl<T: CompensatedValue> Compensated<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if T::bigger(&self.sum, &x) {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: CompensatedValue> FromIterator<T> for Compensated<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of `f64`.
pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Compensated<f64>>().value()
}
