//! Decoupling coefficients of the optomechanical time-evolution operator.
//!
//! For the rotating-frame Hamiltonian `N_b - g(tau) N_a (b + b^dag)` the
//! evolution factorises into exponentials of `N_a^2`, `N_a B_+` and
//! `N_a B_-` whose coefficients are
//!
//! ```text
//! F_+     = - int_0^tau g(t) cos t dt
//! F_-     = - int_0^tau g(t) sin t dt
//! F_{N^2} = -2 int_0^tau g(t) sin t ( int_0^t g(s) cos s ds ) dt
//! ```
//!
//! plus the derived phase `theta_a = 2 (F_{N^2} + F_+ F_-)` and the complex
//! displacement `F = F_- + i F_+`.

mod profile;
pub mod spectral;
mod trap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Cumulative, QuadratureConfig};
use crate::real::{sinc, Real};

pub use profile::{CouplingProfile, Tabulated};
pub use trap::{trap_parameters_to_coupling, TrapCoupling, TrapParameters};

/// Below this distance from `omega0 = 1` the expanded modulated form is refused.
pub const RESONANCE_GUARD: f64 = 1e-4;

/// Coefficients at one time. The derived fields are always recomputed from the primitive three.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionCoefficients<T> {
    tau: T,
    f_na2: T,
    f_b_plus: T,
    f_b_minus: T,
    theta_a: T,
    f_complex: Complex<T>,
}

impl<T: Real> EvolutionCoefficients<T> {
    pub fn from_primitives(tau: T, f_na2: T, f_b_plus: T, f_b_minus: T) -> Self {
        let theta_a = T::lit(2.0) * (f_na2 + f_b_plus * f_b_minus);
        Self { tau, f_na2, f_b_plus, f_b_minus, theta_a, f_complex: Complex::new(f_b_minus, f_b_plus) }
    }

    pub fn zero(tau: T) -> Self {
        Self::from_primitives(tau, T::zero(), T::zero(), T::zero())
    }

    pub fn tau(&self) -> T {
        self.tau
    }
    pub fn f_na2(&self) -> T {
        self.f_na2
    }
    pub fn f_b_plus(&self) -> T {
        self.f_b_plus
    }
    pub fn f_b_minus(&self) -> T {
        self.f_b_minus
    }
    pub fn theta_a(&self) -> T {
        self.theta_a
    }
    /// `F = F_- + i F_+`
    pub fn f_complex(&self) -> Complex<T> {
        self.f_complex
    }

    /// Largest absolute difference over the three primitive coefficients.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.f_na2 - other.f_na2)
            .abs()
            .max((self.f_b_plus - other.f_b_plus).abs())
            .max((self.f_b_minus - other.f_b_minus).abs())
    }
}

/// Closed form for a constant coupling `g0`.
pub fn coeffs_constant<T: Real>(g0: T, tau: T) -> EvolutionCoefficients<T> {
    let two = T::lit(2.0);
    let f_na2 = -g0 * g0 * (T::one() - sinc(two * tau)) * tau;
    let f_b_plus = -g0 * tau.sin();
    // cos(tau) - 1 without cancellation near tau = 0
    let s = (tau / two).sin();
    let f_b_minus = -two * g0 * s * s;
    EvolutionCoefficients::from_primitives(tau, f_na2, f_b_plus, f_b_minus)
}

/// Coefficients for `g0 (1 + epsilon sin(omega0 tau))`, exact for every `omega0` including resonance.
pub fn coeffs_modulated<T: Real>(g0: T, epsilon: T, omega0: T, tau: T) -> EvolutionCoefficients<T> {
    if epsilon == T::zero() || omega0 == T::zero() {
        return coeffs_constant(g0, tau);
    }
    let modes = spectral::modulated_modes(g0, epsilon, omega0);
    let (f_na2, f_b_plus, f_b_minus) = spectral::coefficients(&modes, tau);
    EvolutionCoefficients::from_primitives(tau, f_na2, f_b_plus, f_b_minus)
}

/// Term-by-term trigonometric expansion of the modulated coefficients.
///
/// Loses precision as `omega0 -> 1` through its `1 / (1 - omega0^2)` factors, so
/// it refuses `|omega0 - 1| <= RESONANCE_GUARD`.
pub fn coeffs_modulated_expanded<T: Real>(g0: T, epsilon: T, omega0: T, tau: T) -> Result<EvolutionCoefficients<T>> {
    if omega0 < T::zero() || !omega0.is_finite() {
        return Err(Error::InvalidParameter(format!("omega0 must be finite and non-negative, got {omega0}")));
    }
    if (omega0 - T::one()).abs() <= T::lit(RESONANCE_GUARD) {
        return Err(Error::ResonanceSingularity { omega0: omega0.as_f64() });
    }
    if epsilon == T::zero() || omega0 == T::zero() {
        return Ok(coeffs_constant(g0, tau));
    }

    let (t, w, e) = (tau, omega0, epsilon);
    let g2 = g0 * g0;
    let (one, two, four, eight) = (T::one(), T::lit(2.0), T::lit(4.0), T::lit(8.0));
    let (st, ct) = (t.sin(), t.cos());
    let (swt, cwt) = ((w * t).sin(), (w * t).cos());
    let s2t = (two * t).sin();
    let c2t = (two * t).cos();
    let sh = (t / two).sin();
    let sdiff = ((one - w) * t / two).sin();
    let plus = one + w;
    let minus = one - w * w;

    let mut f_na2 = -g2 * (t - st * ct);
    f_na2 = f_na2 + two * e * g2 / w * (st * st * cwt - two * sh * sh);
    f_na2 = f_na2 - e * g2 / (four * w * plus) * four * s2t * swt;
    f_na2 = f_na2 - e * g2 / (two * w * minus) * eight * ct * sdiff * sdiff;
    let e2 = e * e * g2;
    f_na2 = f_na2 + e2 / (four * w * plus) * (two * t - four * st * cwt * (ct * cwt - two));
    f_na2 = f_na2
        + e2 / (four * w * minus)
            * (four * st * cwt * (ct * cwt - two) + eight * ct * swt + (one - two * c2t) * (two * w * t).sin() - two * t);
    f_na2 = f_na2
        + e2 / (four * w * minus * minus)
            * (eight * w * st * cwt - two * w * s2t * (two * t * w).cos() - eight * ct * swt + two * c2t * (two * t * w).sin());

    let f_b_plus = -g0 / plus * e * st * swt + two * w * g0 / minus * e * sdiff * sdiff - g0 * st;
    let f_b_minus = -two * g0 * sh * sh - g0 * e * (w * st * cwt - ct * swt) / minus;
    Ok(EvolutionCoefficients::from_primitives(tau, f_na2, f_b_plus, f_b_minus))
}

/// Closed form at resonance `omega0 = 1`.
pub fn coeffs_resonant<T: Real>(g0: T, epsilon: T, tau: T) -> EvolutionCoefficients<T> {
    if epsilon == T::zero() {
        return coeffs_constant(g0, tau);
    }
    let t = tau;
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let st = t.sin();
    let s2t = (two * t).sin();
    let sh = (t / two).sin();
    let bracket = T::lit(16.0) * t - T::lit(8.0) * s2t
        + epsilon * (T::lit(32.0) - T::lit(36.0) * t.cos() + four * (T::lit(3.0) * t).cos())
        + epsilon * epsilon * (T::lit(6.0) * t - four * s2t + s2t * (two * t).cos());
    let f_na2 = -g0 * g0 / T::lit(16.0) * bracket;
    let f_b_plus = -g0 * st * (T::one() + epsilon / two * st);
    let f_b_minus = g0 / four * epsilon * (s2t - two * t) - two * g0 * sh * sh;
    EvolutionCoefficients::from_primitives(tau, f_na2, f_b_plus, f_b_minus)
}

/// The same resonant closed form written with `sin(4 tau)` in place of `sin(2 tau) cos(2 tau)`.
pub fn coeffs_resonant_quadruple_angle<T: Real>(g0: T, epsilon: T, tau: T) -> EvolutionCoefficients<T> {
    let t = tau;
    let two = T::lit(2.0);
    let bracket = epsilon * epsilon * (T::lit(12.0) * t - T::lit(8.0) * (two * t).sin() + (T::lit(4.0) * t).sin())
        + epsilon * (T::lit(64.0) - T::lit(72.0) * t.cos() + T::lit(8.0) * (T::lit(3.0) * t).cos())
        + T::lit(32.0) * t
        - T::lit(16.0) * (two * t).sin();
    let f_na2 = -g0 * g0 / T::lit(32.0) * bracket;
    let st = t.sin();
    let f_b_plus = -g0 * st * (T::one() + epsilon / two * st);
    let sh = (t / two).sin();
    let f_b_minus = g0 / T::lit(4.0) * epsilon * ((two * t).sin() - two * t) - two * g0 * sh * sh;
    EvolutionCoefficients::from_primitives(tau, f_na2, f_b_plus, f_b_minus)
}

/// Coefficients by adaptive quadrature for any profile.
///
/// The double integral is an outer quadrature over a cached cumulative inner
/// integral; the tolerance budget is split between the three coefficients.
pub fn coeffs_numeric<T: Real>(
    profile: &CouplingProfile<T>,
    tau: T,
    quad: &QuadratureConfig<T>,
) -> Result<EvolutionCoefficients<T>> {
    profile.check_domain(tau)?;
    if tau == T::zero() {
        return Ok(EvolutionCoefficients::zero(tau));
    }
    let tol = quad.abs_tol;
    let quarter = QuadratureConfig { abs_tol: tol * T::lit(0.25), ..*quad };
    let f_b_plus = -integrate(|t| profile.value(t) * t.cos(), T::zero(), tau, &quarter)?.value;
    let f_b_minus = -integrate(|t| profile.value(t) * t.sin(), T::zero(), tau, &quarter)?.value;

    // |outer integrand| <= bound * |inner|, so the inner error is amplified by at most bound * tau.
    let gain = T::one() + T::lit(2.0) * profile.bound() * tau;
    let inner_cfg = QuadratureConfig { abs_tol: tol * T::lit(0.125) / gain, ..*quad };
    let mut inner = Cumulative::new(|s| profile.value(s) * s.cos(), T::zero(), tau, &inner_cfg)?;
    let outer_cfg = QuadratureConfig { abs_tol: tol * T::lit(0.25), max_evals: quad.max_evals.saturating_sub(inner.evals) };
    let outer = integrate(|t| profile.value(t) * t.sin() * inner.at(t), T::zero(), tau, &outer_cfg)?;
    let f_na2 = T::lit(-2.0) * outer.value;
    Ok(EvolutionCoefficients::from_primitives(tau, f_na2, f_b_plus, f_b_minus))
}

/// Best available evaluation for a profile: closed forms where they exist, quadrature otherwise.
pub fn coeffs_for<T: Real>(profile: &CouplingProfile<T>, tau: T) -> Result<EvolutionCoefficients<T>> {
    profile.check_domain(tau)?;
    Ok(match profile {
        CouplingProfile::Constant { g0 } => coeffs_constant(*g0, tau),
        CouplingProfile::Modulated { g0, epsilon, omega0 } if *omega0 == T::one() => coeffs_resonant(*g0, *epsilon, tau),
        CouplingProfile::Modulated { g0, epsilon, omega0 } => coeffs_modulated(*g0, *epsilon, *omega0, tau),
        CouplingProfile::Tabulated(_) => coeffs_numeric(profile, tau, &QuadratureConfig::default())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize, end: f64) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| end * k as f64 / (n - 1) as f64)
    }

    #[test]
    fn constant_at_half_period() {
        let c = coeffs_constant(1.0, PI);
        assert!((c.f_na2() + PI).abs() < 1e-14);
        assert!(c.f_b_plus().abs() < 1e-15);
        assert!((c.f_b_minus() + 2.0).abs() < 1e-15);
        assert!((c.theta_a() + 2.0 * PI).abs() < 1e-14);
        assert!((c.f_complex() - Complex::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_at_full_period() {
        let c = coeffs_constant(1.0, 2.0 * PI);
        assert!(c.f_b_plus().abs() < 1e-15 && c.f_b_minus().abs() < 1e-15);
        assert!(c.f_complex().norm() < 1e-15);
        assert!((c.theta_a() + 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn zero_coupling_gives_zero_coefficients() {
        let c = coeffs_constant(0.0, 5.3);
        assert_eq!(c.f_na2(), 0.0);
        assert_eq!(c.f_b_plus(), 0.0);
        assert_eq!(c.f_b_minus(), 0.0);
        let m = coeffs_modulated(0.0, 0.7, 1.3, 5.3);
        assert_eq!(m.f_complex().norm(), 0.0);
        let q = coeffs_numeric(&CouplingProfile::constant(0.0), 5.3, &QuadratureConfig::default()).unwrap();
        assert_eq!(q.f_na2(), 0.0);
        assert_eq!(q.theta_a(), 0.0);
    }

    #[test]
    fn derived_fields_are_bit_consistent() {
        let c = coeffs_modulated(0.9, 0.4, 2.2, 3.1);
        let again = EvolutionCoefficients::from_primitives(c.tau(), c.f_na2(), c.f_b_plus(), c.f_b_minus());
        assert_eq!(c, again);
        assert_eq!(c.theta_a(), 2.0 * (c.f_na2() + c.f_b_plus() * c.f_b_minus()));
    }

    #[test]
    fn everything_vanishes_at_tau_zero() {
        let p = CouplingProfile::modulated(1.0, 1.0, 0.5);
        for c in [
            coeffs_constant(1.3, 0.0),
            coeffs_modulated(1.0, 1.0, 0.5, 0.0),
            coeffs_modulated_expanded(1.0, 1.0, 0.5, 0.0).unwrap(),
            coeffs_resonant(1.0, 1.0, 0.0),
            coeffs_numeric(&p, 0.0, &QuadratureConfig::default()).unwrap(),
        ] {
            assert_eq!(c.f_na2(), 0.0);
            assert_eq!(c.f_b_plus(), 0.0);
            assert_eq!(c.f_b_minus(), 0.0);
        }
    }

    #[test]
    fn zero_amplitude_collapses_to_constant_exactly() {
        for w in [0.3, 0.7, 1.0, 2.0] {
            for t in grid(50, 6.0 * PI) {
                assert_eq!(coeffs_modulated(1.0, 0.0, w, t), coeffs_constant(1.0, t));
            }
        }
        for t in grid(50, 6.0 * PI) {
            assert_eq!(coeffs_modulated_expanded(1.0, 0.0, 0.7, t).unwrap(), coeffs_constant(1.0, t));
            assert_eq!(coeffs_resonant(1.0, 0.0, t).max_abs_diff(&coeffs_constant(1.0, t)), 0.0);
        }
    }

    #[test]
    fn expanded_form_guards_resonance() {
        for w in [1.0, 1.0 + 1e-6, 1.0 - 0.99e-4] {
            assert!(matches!(coeffs_modulated_expanded(1.0, 1.0, w, PI), Err(Error::ResonanceSingularity { .. })));
        }
        assert!(coeffs_modulated_expanded(1.0, 1.0, 1.0 + 2e-4, PI).is_ok());
        assert!(coeffs_modulated_expanded(1.0, 1.0, -0.5, PI).is_err());
    }

    #[test]
    fn expanded_and_exponential_sum_forms_agree_off_resonance() {
        for w in [0.3, 0.5, 0.8, 1.3, 2.0, 3.5] {
            for t in grid(40, 6.0 * PI) {
                let a = coeffs_modulated(0.8, 0.6, w, t);
                let b = coeffs_modulated_expanded(0.8, 0.6, w, t).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-11, "w={w} t={t}: {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn resonant_forms_agree_on_grid() {
        for t in grid(200, 6.0 * PI) {
            let a = coeffs_resonant(1.3, 0.7, t);
            let b = coeffs_resonant_quadruple_angle(1.3, 0.7, t);
            assert!(a.max_abs_diff(&b) <= 1e-12, "{t}");
        }
    }

    #[test]
    fn resonant_full_period_value() {
        let c = coeffs_resonant(1.0, 1.0, 2.0 * PI);
        assert!(c.f_b_plus().abs() < 1e-14);
        assert!((c.f_b_minus() + PI).abs() < 1e-14);
        assert!((c.f_complex() - Complex::new(-PI, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn resonant_displacement_grows_linearly() {
        let (g0, eps) = (2.0_f64, 1.0_f64);
        let mut prev = f64::INFINITY;
        for tau in [1e2, 1e3, 1e4] {
            let f = coeffs_resonant(g0, eps, tau).f_complex().norm_sqr();
            let ratio = f / (0.25 * g0 * g0 * eps * eps * tau * tau);
            assert!((ratio - 1.0).abs() < prev);
            prev = (ratio - 1.0).abs();
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn exponential_sum_form_at_exact_resonance() {
        for t in grid(60, 6.0 * PI) {
            let a = coeffs_modulated(1.0, 1.0, 1.0, t);
            let b = coeffs_resonant(1.0, 1.0, t);
            assert!(a.max_abs_diff(&b) < 1e-12, "{t}");
        }
    }

    #[test]
    fn numeric_matches_constant_closed_form() {
        let c = coeffs_numeric(&CouplingProfile::constant(1.0), PI, &QuadratureConfig::default()).unwrap();
        assert!(c.max_abs_diff(&coeffs_constant(1.0, PI)) < 1e-9);
    }

    #[test]
    fn numeric_on_tabulated_linear_ramp() {
        // g(t) = t on [0, 4]; closed forms by direct antiderivatives.
        let samples: Vec<(f64, f64)> = (0..=40).map(|i| (0.1 * i as f64, 0.1 * i as f64)).collect();
        let p = CouplingProfile::Tabulated(Tabulated::new(&samples).unwrap());
        let tau = 3.0;
        let c = coeffs_numeric(&p, tau, &QuadratureConfig::default()).unwrap();
        let fp = -(tau * tau.sin() + tau.cos() - 1.0);
        let fm = -(tau.sin() - tau * tau.cos());
        assert!((c.f_b_plus() - fp).abs() < 1e-9);
        assert!((c.f_b_minus() - fm).abs() < 1e-9);
        assert!(coeffs_numeric(&p, 4.5, &QuadratureConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn constant_displacement_is_periodic(g0 in 0.0f64..3.0, tau in 0.0f64..20.0, n in 1u32..4) {
            let a = coeffs_constant(g0, tau).f_complex();
            let b = coeffs_constant(g0, tau + 2.0 * PI * n as f64).f_complex();
            prop_assert!((a - b).norm() < 1e-12 * (1.0 + g0));
            let z = coeffs_constant(g0, 2.0 * PI * n as f64).f_complex();
            prop_assert!(z.norm() < 1e-13 * (1.0 + g0));
        }

        #[test]
        fn single_precision_tracks_double(g0 in 0.0f64..2.0, eps in 0.0f64..1.0, w in 0.0f64..3.0, tau in 0.0f64..10.0) {
            let d = coeffs_modulated(g0, eps, w, tau);
            let s = coeffs_modulated(g0 as f32, eps as f32, w as f32, tau as f32);
            let scale = 1.0 + g0 * g0 * tau;
            prop_assert!((d.f_na2() - s.f_na2() as f64).abs() < 1e-4 * scale);
            prop_assert!((d.f_b_plus() - s.f_b_plus() as f64).abs() < 1e-4 * scale);
        }
    }
}
