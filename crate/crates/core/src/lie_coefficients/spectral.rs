//! Coefficients for couplings that are finite sums of complex exponentials.
//!
//! With `g(t) = sum_k c_k exp(i w_k t)` every coefficient reduces to the
//! exponential integrals
//!
//! ```text
//! E1(l, tau)    = int_0^tau exp(i l t) dt
//! E2(m, l, tau) = int_0^tau exp(i m t) int_0^t exp(i l s) ds dt
//! ```
//!
//! `E2` is `tau^2` times the second divided difference of `exp` at the nodes
//! `(0, i m tau, i (m + l) tau)`. It is evaluated from the exponential of the
//! bidiagonal 3x3 matrix carrying those nodes, which stays accurate when nodes
//! coalesce (the resonant limit) instead of dividing by their differences.

use num_complex::Complex;

use crate::real::{sinc, Real};

/// One term `amplitude * exp(i * frequency * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<T> {
    pub amplitude: Complex<T>,
    pub frequency: T,
}

/// `int_0^tau exp(i l t) dt`
pub fn exp_integral<T: Real>(l: T, tau: T) -> Complex<T> {
    let half = T::lit(0.5) * l * tau;
    Complex::from_polar(tau * sinc(half), half)
}

/// `exp[i x, i y]`, first divided difference of `exp` at two imaginary nodes.
fn dd1_imag<T: Real>(x: T, y: T) -> Complex<T> {
    let half = T::lit(0.5);
    Complex::from_polar(sinc(half * (x - y)), half * (x + y))
}

/// Upper triangular 3x3 complex matrix.
#[derive(Clone, Copy)]
struct Tri3<T> {
    d: [Complex<T>; 3],
    u01: Complex<T>,
    u12: Complex<T>,
    u02: Complex<T>,
}

impl<T: Real> Tri3<T> {
    fn mul(&self, o: &Self) -> Self {
        Tri3 {
            d: [self.d[0] * o.d[0], self.d[1] * o.d[1], self.d[2] * o.d[2]],
            u01: self.d[0] * o.u01 + self.u01 * o.d[1],
            u12: self.d[1] * o.u12 + self.u12 * o.d[2],
            u02: self.d[0] * o.u02 + self.u01 * o.u12 + self.u02 * o.d[2],
        }
    }

    fn scale(&self, s: T) -> Self {
        Tri3 { d: [self.d[0] * s, self.d[1] * s, self.d[2] * s], u01: self.u01 * s, u12: self.u12 * s, u02: self.u02 * s }
    }

    fn add_identity(&self) -> Self {
        let one = Complex::new(T::one(), T::zero());
        Tri3 { d: [self.d[0] + one, self.d[1] + one, self.d[2] + one], ..*self }
    }
}

/// `exp[i x0, i x1, i x2]`, second divided difference of `exp` at imaginary nodes.
pub fn exp_divided_difference2<T: Real>(x0: T, x1: T, x2: T) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let norm = x0.abs().max(x1.abs()).max(x2.abs()) + T::one();
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > T::lit(0.5) {
        scale = scale * T::lit(0.5);
        squarings += 1;
    }

    let a = Tri3 {
        d: [Complex::new(T::zero(), x0 * scale), Complex::new(T::zero(), x1 * scale), Complex::new(T::zero(), x2 * scale)],
        u01: Complex::new(scale, T::zero()),
        u12: Complex::new(scale, T::zero()),
        u02: zero,
    };

    // Horner form of the truncated Taylor series of exp(a).
    let degree = 18;
    let mut e = Tri3 { d: [zero; 3], u01: zero, u12: zero, u02: zero }.add_identity();
    for k in (1..=degree).rev() {
        e = a.mul(&e).scale(T::one() / T::lit(k as f64)).add_identity();
    }

    // Squaring phase; the diagonal and first superdiagonal have closed forms and are reset each step.
    let mut s = scale;
    for _ in 0..squarings {
        e = e.mul(&e);
        s = s * T::lit(2.0);
        let (y0, y1, y2) = (x0 * s, x1 * s, x2 * s);
        e.d = [
            Complex::from_polar(T::one(), y0),
            Complex::from_polar(T::one(), y1),
            Complex::from_polar(T::one(), y2),
        ];
        e.u01 = dd1_imag(y0, y1) * s;
        e.u12 = dd1_imag(y1, y2) * s;
    }
    // exp(A)_{02} = s^2 * exp[nodes]; s is 1 here.
    e.u02
}

/// `int_0^tau exp(i m t) int_0^t exp(i l s) ds dt`
pub fn nested_exp_integral<T: Real>(m: T, l: T, tau: T) -> Complex<T> {
    exp_divided_difference2(T::zero(), m * tau, (m + l) * tau) * (tau * tau)
}

/// `(F_{N^2}, F_+, F_-)` for `g(t) = sum of modes`, which must describe a real function.
pub fn coefficients<T: Real>(modes: &[Mode<T>], tau: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let i_half = Complex::new(T::zero(), half);
    // g cos and g sin as exponential sums
    let mut with_cos = Vec::with_capacity(2 * modes.len());
    let mut with_sin = Vec::with_capacity(2 * modes.len());
    for m in modes {
        for s in [T::one(), -T::one()] {
            let freq = m.frequency + s;
            with_cos.push(Mode { amplitude: m.amplitude * half, frequency: freq });
            // sin t = -i/2 e^{it} + i/2 e^{-it}
            with_sin.push(Mode { amplitude: m.amplitude * (-i_half * s), frequency: freq });
        }
    }

    let mut f_plus = Complex::new(T::zero(), T::zero());
    for c in &with_cos {
        f_plus = f_plus - c.amplitude * exp_integral(c.frequency, tau);
    }
    let mut f_minus = Complex::new(T::zero(), T::zero());
    for c in &with_sin {
        f_minus = f_minus - c.amplitude * exp_integral(c.frequency, tau);
    }
    let mut f_na2 = Complex::new(T::zero(), T::zero());
    for outer in &with_sin {
        for inner in &with_cos {
            f_na2 = f_na2 + outer.amplitude * inner.amplitude * nested_exp_integral(outer.frequency, inner.frequency, tau);
        }
    }
    f_na2 = f_na2 * T::lit(-2.0);
    (f_na2.re, f_plus.re, f_minus.re)
}

/// Exponential decomposition of `g0 * (1 + epsilon * sin(omega0 t))`.
pub fn modulated_modes<T: Real>(g0: T, epsilon: T, omega0: T) -> Vec<Mode<T>> {
    let side = g0 * epsilon * T::lit(0.5);
    vec![
        Mode { amplitude: Complex::new(g0, T::zero()), frequency: T::zero() },
        Mode { amplitude: Complex::new(T::zero(), -side), frequency: omega0 },
        Mode { amplitude: Complex::new(T::zero(), side), frequency: -omega0 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureConfig};

    fn dd2_direct(x: [f64; 3]) -> Complex<f64> {
        let e = |t: f64| Complex::from_polar(1.0, t);
        let i = Complex::new(0.0, 1.0);
        let d01 = (e(x[1]) - e(x[0])) / (i * (x[1] - x[0]));
        let d12 = (e(x[2]) - e(x[1])) / (i * (x[2] - x[1]));
        (d12 - d01) / (i * (x[2] - x[0]))
    }

    #[test]
    fn divided_difference_matches_direct_formula_for_separated_nodes() {
        for nodes in [[0.0, 1.3, -2.1], [0.0, 25.0, 60.0], [0.0, -40.0, 7.5], [3.0, -110.0, 80.0]] {
            let got = exp_divided_difference2(nodes[0], nodes[1], nodes[2]);
            let want = dd2_direct(nodes);
            assert!((got - want).norm() < 1e-13, "{nodes:?}: {got} vs {want}");
        }
    }

    #[test]
    fn divided_difference_with_coincident_nodes() {
        // exp[0,0,0] = 1/2 and exp[0,0,ix] = (e^{ix} - 1 - ix) / (ix)^2
        assert!((exp_divided_difference2(0.0, 0.0, 0.0) - Complex::new(0.5, 0.0)).norm() < 1e-15);
        let x = 3.7;
        let ix = Complex::new(0.0, x);
        let want = (ix.exp() - 1.0 - ix) / (ix * ix);
        assert!((exp_divided_difference2(0.0, 0.0, x) - want).norm() < 1e-14);
        assert!((exp_divided_difference2(x, 0.0, 0.0) - want).norm() < 1e-14);
    }

    #[test]
    fn nested_integral_matches_quadrature() {
        let cfg = QuadratureConfig::with_tol(1e-13);
        for (m, l, tau) in [(1.0, -1.0, 5.0), (2.5, 0.3, 7.0), (-0.999_999, 1.0, 12.0)] {
            let got = nested_exp_integral(m, l, tau);
            let inner = |t: f64| exp_integral(l, t);
            let re = integrate(|t: f64| (Complex::from_polar(1.0, m * t) * inner(t)).re, 0.0, tau, &cfg).unwrap();
            let im = integrate(|t: f64| (Complex::from_polar(1.0, m * t) * inner(t)).im, 0.0, tau, &cfg).unwrap();
            assert!((got.re - re.value).abs() < 1e-11 && (got.im - im.value).abs() < 1e-11, "{m} {l} {tau}");
        }
    }

    #[test]
    fn constant_coupling_from_modes() {
        let modes = [Mode { amplitude: Complex::new(1.0, 0.0), frequency: 0.0 }];
        let tau = 2.3_f64;
        let (n2, p, m) = coefficients(&modes, tau);
        assert!((n2 + (tau - tau.sin() * tau.cos())).abs() < 1e-14);
        assert!((p + tau.sin()).abs() < 1e-15);
        assert!((m - (tau.cos() - 1.0)).abs() < 1e-15);
    }
}
