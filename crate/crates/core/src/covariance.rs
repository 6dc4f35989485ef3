//! Heisenberg-picture moments and the 4x4 covariance matrix of the evolved state.
//!
//! The covariance matrix is stored in the ladder basis `(a, b, a^dag, b^dag)`
//! and normalised so the vacuum is the identity. Entry `(n, m)` (zero based)
//! is labelled `sigma_{n+1, m+1}`, e.g. `sigma_31 = 2<a^2> - 2<a>^2` sits at
//! `[2][0]`. The matrix is Hermitian with block form `[[A, B], [B*, A*]]`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lie_coefficients::EvolutionCoefficients;
use crate::real::Real;

/// Initial mechanical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanics<T> {
    Coherent { mu_m: Complex<T> },
    Thermal { nbar: T },
}

/// Coherent optics with coherent or thermal mechanics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState<T> {
    pub mu_c: Complex<T>,
    pub mechanics: Mechanics<T>,
}

impl<T: Real> InitialState<T> {
    pub fn coherent(mu_c: Complex<T>, mu_m: Complex<T>) -> Self {
        Self { mu_c, mechanics: Mechanics::Coherent { mu_m } }
    }

    pub fn thermal(mu_c: Complex<T>, nbar: T) -> Result<Self> {
        if !(nbar >= T::zero()) || !nbar.is_finite() {
            return Err(Error::InvalidParameter(format!("thermal occupation must be finite and >= 0, got {nbar}")));
        }
        Ok(Self { mu_c, mechanics: Mechanics::Thermal { nbar } })
    }

    pub fn nbar(&self) -> T {
        match self.mechanics {
            Mechanics::Coherent { .. } => T::zero(),
            Mechanics::Thermal { nbar } => nbar,
        }
    }

    pub fn mu_m(&self) -> Complex<T> {
        match self.mechanics {
            Mechanics::Coherent { mu_m } => mu_m,
            Mechanics::Thermal { .. } => Complex::new(T::zero(), T::zero()),
        }
    }

    /// Von Neumann entropy of the initial state, `s_V(2 nbar + 1)`.
    pub fn entropy_initial(&self) -> T {
        match self.mechanics {
            Mechanics::Coherent { .. } => T::zero(),
            Mechanics::Thermal { nbar } => crate::entropy_measure::thermal_entropy(nbar),
        }
    }
}

/// First and second moments at time `tau` (rotating frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub a1: Complex<T>,
    pub b1: Complex<T>,
    pub a2: Complex<T>,
    pub b2: Complex<T>,
    pub na: Complex<T>,
    pub nb: Complex<T>,
    pub ab: Complex<T>,
    pub ab_dag: Complex<T>,
}

impl<T: Real> Moments<T> {
    pub fn vacuum() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { a1: z, b1: z, a2: z, b2: z, na: z, nb: z, ab: z, ab_dag: z }
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        [
            self.a1 - o.a1,
            self.b1 - o.b1,
            self.a2 - o.a2,
            self.b2 - o.b2,
            self.na - o.na,
            self.nb - o.nb,
            self.ab - o.ab,
            self.ab_dag - o.ab_dag,
        ]
        .iter()
        .fold(T::zero(), |m, d| m.max(d.norm()))
    }
}

fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::from_polar(T::one(), phase)
}

/// Displaced thermal mechanics: `mu_m` displacement on top of `nbar` thermal phonons.
fn moments_displaced_thermal<T: Real>(
    coeffs: &EvolutionCoefficients<T>,
    mu_c: Complex<T>,
    mu_m: Complex<T>,
    nbar: T,
) -> Moments<T> {
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let theta = coeffs.theta_a();
    let f = coeffs.f_complex();
    let fc = f.conj();
    let f2 = f.norm_sqr();
    let n = mu_c.norm_sqr();
    let tau = coeffs.tau();

    // exp(F* mu_m* - F mu_m) is a pure phase
    let xi = (fc * mu_m.conj() - f * mu_m).im;
    // |mu|^2 (e^{-i theta} - 1) = -2|mu|^2 sin^2(theta/2) - i |mu|^2 sin(theta)
    let s_half = (theta * half).sin();
    let re1 = -two * n * s_half * s_half - half * f2 - nbar * f2;
    let im1 = -half * theta - n * theta.sin() + xi;
    let pre = mu_c * Complex::from_polar(re1.exp(), im1);

    let s_full = theta.sin();
    let re2 = -two * n * s_full * s_full - two * f2 - T::lit(4.0) * nbar * f2;
    let im2 = -two * theta - n * (two * theta).sin() + two * xi;
    let a2 = mu_c * mu_c * Complex::from_polar(re2.exp(), im2);

    let x = cis(-theta) * n;
    let one = Complex::new(T::one(), T::zero());
    let shift = mu_m + fc * n;
    let b1 = cis(-tau) * shift;
    let b2 = cis(-two * tau) * (shift * shift + fc * fc * n);
    let nb = shift.norm_sqr() + f2 * n + nbar;
    let ab = pre * cis(-tau) * (mu_m + fc * nbar + (x + one) * fc);
    let ab_dag = pre * cis(tau) * (mu_m.conj() - f * nbar + x * f);

    Moments {
        a1: pre,
        b1,
        a2,
        b2,
        na: Complex::new(n, T::zero()),
        nb: Complex::new(nb, T::zero()),
        ab,
        ab_dag,
    }
}

/// Moments for coherent optics and coherent mechanics.
pub fn moments_coherent<T: Real>(coeffs: &EvolutionCoefficients<T>, mu_c: Complex<T>, mu_m: Complex<T>) -> Moments<T> {
    moments_displaced_thermal(coeffs, mu_c, mu_m, T::zero())
}

/// Moments for coherent optics and thermal mechanics with mean occupation `nbar`.
///
/// The thermal average over the mechanical amplitude is done in closed form,
/// e.g. the characteristic-function factor averages to `exp(-nbar |F|^2)`.
pub fn moments_thermal<T: Real>(coeffs: &EvolutionCoefficients<T>, mu_c: Complex<T>, nbar: T) -> Result<Moments<T>> {
    if !(nbar >= T::zero()) {
        return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {nbar}")));
    }
    Ok(moments_displaced_thermal(coeffs, mu_c, Complex::new(T::zero(), T::zero()), nbar))
}

pub fn moments<T: Real>(coeffs: &EvolutionCoefficients<T>, initial: &InitialState<T>) -> Result<Moments<T>> {
    match initial.mechanics {
        Mechanics::Coherent { mu_m } => Ok(moments_coherent(coeffs, initial.mu_c, mu_m)),
        Mechanics::Thermal { nbar } => moments_thermal(coeffs, initial.mu_c, nbar),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T> {
    sigma: [[Complex<T>; 4]; 4],
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn identity() -> Self {
        let mut sigma = [[Complex::new(T::zero(), T::zero()); 4]; 4];
        for (i, row) in sigma.iter_mut().enumerate() {
            row[i] = Complex::new(T::one(), T::zero());
        }
        Self { sigma }
    }

    /// Wraps an arbitrary matrix in the ladder basis; no invariants are checked.
    pub fn from_array(sigma: [[Complex<T>; 4]; 4]) -> Self {
        Self { sigma }
    }

    /// Real diagonal matrix `diag(d1, d2, d1, d2)`-style input, e.g. product thermal states.
    pub fn diagonal(d: [T; 4]) -> Self {
        let mut m = Self::identity();
        for (i, v) in d.iter().enumerate() {
            m.sigma[i][i] = Complex::new(*v, T::zero());
        }
        m
    }

    pub fn as_array(&self) -> &[[Complex<T>; 4]; 4] {
        &self.sigma
    }

    /// Zero-based entry.
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.sigma[row][col]
    }

    /// Largest deviation from the Hermitian block pattern
    /// `sigma_33 = sigma_11`, `sigma_44 = sigma_22`, `sigma_34 = sigma_21`, `sigma_32 = sigma_41`
    /// and `sigma = sigma^dag`.
    pub fn pattern_defect(&self) -> T {
        let s = &self.sigma;
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((s[i][j] - s[j][i].conj()).norm());
            }
        }
        for (a, b) in [((2, 2), (0, 0)), ((3, 3), (1, 1)), ((2, 3), (1, 0)), ((2, 1), (3, 0))] {
            worst = worst.max((s[a.0][a.1] - s[b.0][b.1]).norm());
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.sigma[i][j] - other.sigma[i][j]).norm());
            }
        }
        worst
    }

    /// Real covariance matrix in quadrature order `(q_a, p_a, q_b, p_b)` with
    /// `q = (a + a^dag)/sqrt 2`, `p = -i (a - a^dag)/sqrt 2`.
    pub fn to_quadrature(&self) -> [[T; 4]; 4] {
        let h = T::FRAC_1_SQRT_2();
        let z = Complex::new(T::zero(), T::zero());
        let r = Complex::new(h, T::zero());
        let i = Complex::new(T::zero(), h);
        let u = [[r, z, r, z], [-i, z, i, z], [z, r, z, r], [z, -i, z, i]];
        // V = U Sigma U^dag where Sigma is the transpose of the stored labelling.
        let mut v = [[T::zero(); 4]; 4];
        for (row, vrow) in v.iter_mut().enumerate() {
            for (col, out) in vrow.iter_mut().enumerate() {
                let mut acc = z;
                for k in 0..4 {
                    if u[row][k] == z {
                        continue;
                    }
                    for l in 0..4 {
                        if u[col][l] == z {
                            continue;
                        }
                        acc = acc + u[row][k] * self.sigma[l][k] * u[col][l].conj();
                    }
                }
                *out = acc.re;
            }
        }
        v
    }
}

const IMAG_TOL: f64 = 1e-10;

/// Builds the covariance matrix from the eight moments.
pub fn covariance_from_moments<T: Real>(m: &Moments<T>) -> Result<CovarianceMatrix<T>> {
    let tol = T::lit(IMAG_TOL);
    for (name, v) in [("<a^dag a>", m.na), ("<b^dag b>", m.nb)] {
        if v.im.abs() > tol * (T::one() + v.re.abs()) {
            return Err(Error::InvariantViolation(format!("{name} has imaginary part {}", v.im)));
        }
    }
    let two = T::lit(2.0);
    let one = T::one();
    let s11 = Complex::new(one + two * (m.na.re - m.a1.norm_sqr()), T::zero());
    let s22 = Complex::new(one + two * (m.nb.re - m.b1.norm_sqr()), T::zero());
    let c = (m.ab_dag - m.a1 * m.b1.conj()) * two;
    let sa = (m.a2 - m.a1 * m.a1) * two;
    let sb = (m.b2 - m.b1 * m.b1) * two;
    let d = (m.ab - m.a1 * m.b1) * two;
    Ok(CovarianceMatrix { sigma: assemble(s11, s22, c, sa, sb, d) })
}

fn assemble<T: Real>(
    s11: Complex<T>,
    s22: Complex<T>,
    c: Complex<T>,
    sa: Complex<T>,
    sb: Complex<T>,
    d: Complex<T>,
) -> [[Complex<T>; 4]; 4] {
    [
        [s11, c.conj(), sa.conj(), d.conj()],
        [c, s22, d.conj(), sb.conj()],
        [sa, d, s11.conj(), c],
        [d, sb, c.conj(), s22.conj()],
    ]
}

/// Entry-by-entry closed forms for coherent inputs, evaluated as printed.
///
/// The `sigma_11` expression keeps the factor `exp(F* mu_m* - F mu_m)`, which is a
/// pure phase and makes the diagonal complex unless `mu_m = 0`; the moments route
/// is authoritative and this form only cross-checks it at `mu_m = 0`.
pub fn covariance_coherent_direct<T: Real>(
    coeffs: &EvolutionCoefficients<T>,
    mu_c: Complex<T>,
    mu_m: Complex<T>,
) -> CovarianceMatrix<T> {
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let theta = coeffs.theta_a();
    let tau = coeffs.tau();
    let f = coeffs.f_complex();
    let fc = f.conj();
    let f2 = f.norm_sqr();
    let n = mu_c.norm_sqr();
    let ex = (fc * mu_m.conj() - f * mu_m).exp();
    let rot = cis(-theta) - one;
    let s_half = (theta * half).sin();

    let s11 = one + (one - ex * (-T::lit(4.0) * n * s_half * s_half - f2).exp()) * (two * n);
    let s31 = mu_c * mu_c * cis(-theta) * (-f2).exp() * two
        * (cis(-theta) * ((cis(-two * theta) - one) * n).exp() * (-f2).exp() * ex * ex
            - (rot * (two * n)).exp() * ex * ex);
    let s22 = one + one * (two * n * f2);
    let s42 = cis(-two * tau) * fc * fc * (two * n);
    let common = cis(-half * theta) * (rot * n).exp() * (-half * f2).exp() * ex;
    let s21 = f * mu_c * rot * (two * n) * cis(tau) * common;
    let s41 = fc * mu_c * (rot * n + one) * cis(-tau) * common * two;

    CovarianceMatrix { sigma: assemble(s11, s22, s21, s31, s42, s41) }
}

/// Leading-order matrix for large `|mu_c|`: only the optical diagonal and the mechanical block survive.
pub fn covariance_large_mu<T: Real>(coeffs: &EvolutionCoefficients<T>, mu_c: Complex<T>) -> CovarianceMatrix<T> {
    let two = T::lit(2.0);
    let n = mu_c.norm_sqr();
    let f = coeffs.f_complex();
    let f2 = f.norm_sqr();
    let s_half = (coeffs.theta_a() * T::lit(0.5)).sin();
    let decay = T::lit(-4.0) * n * s_half * s_half - f2;
    let s11 = T::one() - two * n * decay.exp_m1();
    let s22 = two * n * f2 + T::one();
    let s42 = cis(-two * coeffs.tau()) * f.conj() * f.conj() * (two * n);
    let z = Complex::new(T::zero(), T::zero());
    let s11 = Complex::new(s11, T::zero());
    let s22 = Complex::new(s22, T::zero());
    CovarianceMatrix { sigma: assemble(s11, s22, z, z, s42, z) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_coefficients::{coeffs_constant, coeffs_modulated};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn vacuum_moments_and_identity() {
        let m = moments_coherent(&EvolutionCoefficients::zero(0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(m.max_abs_diff(&Moments::vacuum()), 0.0);
        let s = covariance_from_moments(&m).unwrap();
        assert_eq!(s.max_abs_diff(&CovarianceMatrix::identity()), 0.0);
    }

    #[test]
    fn photon_number_is_conserved() {
        let k = coeffs_modulated(1.3, 0.4, 0.7, 2.9);
        let m = moments_coherent(&k, c(2.0, 0.0), c(0.3, -0.1));
        assert_eq!(m.na, c(4.0, 0.0));
        let t = moments_thermal(&k, c(1.2, 0.5), 0.7).unwrap();
        assert_eq!(t.na.re, c(1.2, 0.5).norm_sqr());
    }

    #[test]
    fn half_period_mechanical_mean() {
        let k = coeffs_constant(1.0, std::f64::consts::PI);
        let m = moments_coherent(&k, c(1.0, 0.0), c(0.0, 0.0));
        assert!((m.b1 - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn half_period_covariance_entries() {
        let k = coeffs_constant(1.0, std::f64::consts::PI);
        let s = covariance_from_moments(&moments_coherent(&k, c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        let e4 = (-4.0f64).exp();
        assert!((s.entry(0, 0).re - (1.0 + 2.0 * (1.0 - e4))).abs() < 1e-14);
        assert!((s.entry(0, 0).re - 2.963_368_722_222_531).abs() < 1e-12);
        assert!((s.entry(1, 1).re - 9.0).abs() < 1e-13);
        assert!((s.entry(3, 1) - c(8.0, 0.0)).norm() < 1e-13);
        let direct = covariance_coherent_direct(&k, c(1.0, 0.0), c(0.0, 0.0));
        assert!((direct.entry(2, 0).re - 2.0 * e4 * (e4 - 1.0)).abs() < 1e-14);
        assert!((direct.entry(2, 0).re + 0.035_960_352_521_663_33).abs() < 1e-14);
    }

    #[test]
    fn thermal_at_zero_occupation_equals_coherent_vacuum_mechanics() {
        for tau in [0.3, 1.7, 4.0] {
            let k = coeffs_modulated(0.9, 0.5, 1.4, tau);
            let a = moments_thermal(&k, c(0.8, -0.4), 0.0).unwrap();
            let b = moments_coherent(&k, c(0.8, -0.4), c(0.0, 0.0));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn free_thermal_state() {
        let m = moments_thermal(&EvolutionCoefficients::zero(0.0), c(0.0, 0.0), 2.0).unwrap();
        assert_eq!(m.nb.re, 2.0);
        assert_eq!(m.a1.norm() + m.b1.norm(), 0.0);
        let s = covariance_from_moments(&m).unwrap();
        assert_eq!(s.max_abs_diff(&CovarianceMatrix::diagonal([1.0, 5.0, 1.0, 5.0])), 0.0);
    }

    #[test]
    fn complex_number_operators_are_rejected() {
        let mut m = Moments::<f64>::vacuum();
        m.nb = c(1.0, 1e-3);
        assert!(matches!(covariance_from_moments(&m), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn coherent_products_give_identity() {
        let m = moments_coherent(&EvolutionCoefficients::zero(0.0), c(3.0, 1.0), c(-2.0, 0.5));
        let s = covariance_from_moments(&m).unwrap();
        assert!(s.max_abs_diff(&CovarianceMatrix::identity()) < 1e-13);
    }

    #[test]
    fn full_period_recurrence_gives_identity() {
        let k = coeffs_constant(1.0, 2.0 * std::f64::consts::PI);
        let s = covariance_from_moments(&moments_coherent(&k, c(2.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!(s.max_abs_diff(&CovarianceMatrix::identity()) < 1e-12);
    }

    #[test]
    fn large_mu_entries() {
        let k = coeffs_constant(1.0, std::f64::consts::PI);
        let s = covariance_large_mu(&k, c(10.0, 0.0));
        assert!((s.entry(1, 1).re - 801.0).abs() < 1e-10);
        // Dropped entries are O(1) against O(|mu|^2) survivors, so compare on the matrix scale.
        let exact = covariance_from_moments(&moments_coherent(&k, c(10.0, 0.0), c(0.0, 0.0))).unwrap();
        let scale = (0..16).fold(0.0_f64, |m, k| m.max(exact.entry(k / 4, k % 4).norm()));
        for i in 0..4 {
            for j in 0..4 {
                let e = exact.entry(i, j);
                let a = s.entry(i, j);
                assert!((e - a).norm() <= 0.01 * scale, "({i},{j}) {e} vs {a}");
            }
        }
        let zero = covariance_large_mu(&EvolutionCoefficients::zero(0.0), c(10.0, 0.0));
        assert!(zero.max_abs_diff(&CovarianceMatrix::identity()) < 1e-12);
    }

    #[test]
    fn quadrature_form_of_vacuum_and_thermal() {
        let v = CovarianceMatrix::<f64>::identity().to_quadrature();
        for (i, row) in v.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let t = CovarianceMatrix::<f64>::diagonal([3.0, 1.0, 3.0, 1.0]).to_quadrature();
        assert!((t[0][0] - 3.0).abs() < 1e-15 && (t[1][1] - 3.0).abs() < 1e-15 && (t[2][2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_form_of_single_mode_squeezing() {
        // <a^2> = -cosh r sinh r, <a^dag a> = sinh^2 r: V = diag(e^{2r}, e^{-2r}) for the optics
        let r = 0.4_f64;
        let mut m = Moments::vacuum();
        m.na = c(r.sinh().powi(2), 0.0);
        m.a2 = c(-r.cosh() * r.sinh(), 0.0);
        let v = covariance_from_moments(&m).unwrap().to_quadrature();
        assert!((v[0][0] - (-2.0 * r).exp()).abs() < 1e-14 || (v[0][0] - (2.0 * r).exp()).abs() < 1e-14);
        assert!((v[0][0] * v[1][1] - 1.0).abs() < 1e-13);
        assert!(v[0][1].abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn direct_and_moment_routes_agree_without_mechanical_displacement(
            g0 in 0.0f64..2.0, tau in 0.0f64..12.0, re in -2.0f64..2.0, im in -2.0f64..2.0,
        ) {
            let k = coeffs_constant(g0, tau);
            let mu = c(re, im);
            let a = covariance_from_moments(&moments_coherent(&k, mu, c(0.0, 0.0))).unwrap();
            let b = covariance_coherent_direct(&k, mu, c(0.0, 0.0));
            prop_assert!(a.max_abs_diff(&b) <= 1e-12 * (1.0 + mu.norm_sqr() * (1.0 + k.f_complex().norm_sqr())));
        }

        #[test]
        fn hermitian_block_pattern(
            g0 in 0.0f64..2.0, eps in 0.0f64..1.0, w in 0.0f64..2.5, tau in 0.0f64..12.0,
            re in -2.0f64..2.0, im in -2.0f64..2.0, mre in -1.0f64..1.0, nbar in 0.0f64..3.0,
        ) {
            let k = coeffs_modulated(g0, eps, w, tau);
            let a = covariance_from_moments(&moments_coherent(&k, c(re, im), c(mre, -mre))).unwrap();
            prop_assert!(a.pattern_defect() <= 1e-12);
            let t = covariance_from_moments(&moments_thermal(&k, c(re, im), nbar).unwrap()).unwrap();
            prop_assert!(t.pattern_defect() <= 1e-12);
        }
    }
}
