use std::fmt::{Debug, Display};

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the analytic pipeline is generic over.
///
/// Implemented for `f32` and `f64`. The one linear-algebra primitive the
/// covariance pipeline needs is routed through nalgebra here so that the
/// numeric modules only see `Float` methods.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot represent at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Eigenvalues of a Hermitian matrix given in row-major order, ascending.
    fn hermitian_eigenvalues(n: usize, row_major: &[Complex<Self>]) -> Vec<Self>;
}

fn hermitian_eigenvalues_impl<T>(n: usize, row_major: &[Complex<T>]) -> Vec<T>
where
    T: RealField + Copy + PartialOrd,
{
    let m = DMatrix::from_row_slice(n, n, row_major);
    let mut ev: Vec<T> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            fn hermitian_eigenvalues(n: usize, row_major: &[Complex<$t>]) -> Vec<$t> {
                hermitian_eigenvalues_impl(n, row_major)
            }
        }
    )*};
}

impl_real!(f32, f64);

/// Unnormalised sinc with `sinc(0) = 1`.
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}
