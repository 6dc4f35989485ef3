//! Double-word arithmetic: a value is carried as an unevaluated sum `hi + lo`.
//!
//! Used where determinants of nearly singular covariance blocks cancel to a
//! few ulps in plain arithmetic.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd<T> {
    pub hi: T,
    pub lo: T,
}

fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl<T: Real> Dd<T> {
    pub fn new(x: T) -> Self {
        Self { hi: x, lo: T::zero() }
    }

    /// Exact product of two working-precision numbers.
    pub fn prod(a: T, b: T) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    pub fn value(self) -> T {
        self.hi + self.lo
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= T::zero() {
            return Self::new(T::zero());
        }
        let y = Self::new(self.hi.sqrt());
        y + (self - y * y) / (y * T::lit(2.0))
    }
}

impl<T: Real> Add for Dd<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl<T: Real> Neg for Dd<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl<T: Real> Sub for Dd<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Mul for Dd<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Self { hi, lo }
    }
}

impl<T: Real> Mul<T> for Dd<T> {
    type Output = Self;
    fn mul(self, o: T) -> Self {
        let (p, e) = two_prod(self.hi, o);
        let (hi, lo) = quick_two_sum(p, e + self.lo * o);
        Self { hi, lo }
    }
}

impl<T: Real> Div for Dd<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_rounding_of_products() {
        let a = 1.0 + f64::EPSILON;
        let p = Dd::prod(a, a);
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn cancellation_keeps_low_word() {
        let x = 1e8 + 0.1_f64;
        let d = Dd::prod(x, x) - Dd::prod(1e8, 1e8);
        // x^2 - 1e16 = 2e8 * dx + dx^2, with dx the exact representable offset
        let dx = x - 1e8;
        let want = 2e8 * dx + dx * dx;
        assert!((d.value() - want).abs() < 1e-8 * want);
    }

    #[test]
    fn division_and_sqrt() {
        let third = Dd::new(1.0_f64) / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::new(1.0);
        assert!(back.value().abs() < 1e-30);
        let r = Dd::new(2.0_f64).sqrt();
        let sq = r * r - Dd::new(2.0);
        assert!(sq.value().abs() < 1e-30);
    }
}
