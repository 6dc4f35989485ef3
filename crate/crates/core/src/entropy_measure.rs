//! Symplectic spectra, Gaussian entropies and the non-Gaussianity measure.

use num_complex::Complex;

use crate::compensated::Dd;
use crate::covariance::{CovarianceMatrix, InitialState};
use crate::error::{Error, Result};
use crate::real::Real;

/// Symplectic eigenvalues below `1 - NU_REJECT` are an uncertainty violation;
/// anything in `[1 - NU_REJECT, 1)` is rounding noise and is clamped to 1.
pub const NU_REJECT: f64 = 1e-6;

const BINARY_ENTROPY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticPair<T> {
    pub nu_plus: T,
    pub nu_minus: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaResult<T> {
    pub delta: T,
    pub entropy_gaussian: T,
    pub entropy_initial: T,
    pub pair: SymplecticPair<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticRoute {
    /// Spectrum of `Z sigma` with `Z = diag(1, 1, -1, -1)`, via a Cholesky congruence.
    Spectrum,
    /// Quadrature-basis invariants `Delta` and `det V`.
    Invariants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Small,
    Large,
}

/// Unclamped `(nu_plus, nu_minus)` from the requested route.
pub fn raw_symplectic_spectrum<T: Real>(sigma: &CovarianceMatrix<T>, route: SymplecticRoute) -> Result<(T, T)> {
    match route {
        SymplecticRoute::Spectrum => spectrum_route(sigma),
        SymplecticRoute::Invariants => Ok(invariant_route(sigma)),
    }
}

fn spectrum_route<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<(T, T)> {
    // sigma = L L^dag, then Z sigma is similar to the Hermitian L^dag Z L.
    let s = sigma.as_array();
    let zero = Complex::new(T::zero(), T::zero());
    let mut l = [[zero; 4]; 4];
    for j in 0..4 {
        let mut pivot = s[j][j].re;
        for k in 0..j {
            pivot = pivot - l[j][k].norm_sqr();
        }
        if !(pivot > T::zero()) {
            return Err(Error::NonPhysicalState { nu: pivot.as_f64() });
        }
        let d = pivot.sqrt();
        l[j][j] = Complex::new(d, T::zero());
        for i in j + 1..4 {
            let mut acc = s[i][j];
            for k in 0..j {
                acc = acc - l[i][k] * l[j][k].conj();
            }
            l[i][j] = acc / d;
        }
    }
    let z = [T::one(), T::one(), -T::one(), -T::one()];
    let mut k = [zero; 16];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = zero;
            for r in i.max(j)..4 {
                acc = acc + l[r][i].conj() * l[r][j] * z[r];
            }
            k[4 * i + j] = acc;
        }
    }
    let ev = T::hermitian_eigenvalues(4, &k);
    let half = T::lit(0.5);
    Ok(((ev[3] - ev[0]) * half, (ev[2] - ev[1]) * half))
}

fn invariant_route<T: Real>(sigma: &CovarianceMatrix<T>) -> (T, T) {
    let v = sigma.to_quadrature();
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| Dd::prod(v[r0][c0], v[r1][c1]) - Dd::prod(v[r0][c1], v[r1][c0]);
    let det_a = minor(0, 1, 0, 1);
    let det_b = minor(2, 3, 2, 3);
    let det_c = minor(0, 1, 2, 3);
    // Laplace expansion along the first two rows.
    let pairs = [((0, 1), (2, 3), false), ((0, 2), (1, 3), true), ((0, 3), (1, 2), false), ((1, 2), (0, 3), false), ((1, 3), (0, 2), true), ((2, 3), (0, 1), false)];
    let mut det_v = Dd::new(T::zero());
    for ((c0, c1), (d0, d1), negative) in pairs {
        let term = minor(0, 1, c0, c1) * minor(2, 3, d0, d1);
        det_v = if negative { det_v - term } else { det_v + term };
    }
    let big_delta = det_a + det_b + det_c * T::lit(2.0);
    let mut disc = big_delta * big_delta - det_v * T::lit(4.0);
    if disc.hi < T::zero() {
        disc = Dd::new(T::zero());
    }
    let plus_sq = (big_delta + disc.sqrt()) * T::lit(0.5);
    if !(plus_sq.hi > T::zero()) {
        return (T::zero(), T::zero());
    }
    let minus_sq = det_v / plus_sq;
    (plus_sq.sqrt().value(), minus_sq.sqrt().value())
}

fn clamp_nu<T: Real>(nu: T) -> Result<T> {
    if !(nu >= T::one() - T::lit(NU_REJECT)) {
        return Err(Error::NonPhysicalState { nu: nu.as_f64() });
    }
    Ok(nu.max(T::one()))
}

fn clamp_pair<T: Real>((p, m): (T, T)) -> Result<SymplecticPair<T>> {
    let (p, m) = if p >= m { (p, m) } else { (m, p) };
    Ok(SymplecticPair { nu_plus: clamp_nu(p)?, nu_minus: clamp_nu(m)? })
}

/// Symplectic eigenvalues of a two-mode covariance matrix.
pub fn symplectic_eigenvalues<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<SymplecticPair<T>> {
    clamp_pair(spectrum_route(sigma)?)
}

/// Same quantity from the quadrature-basis invariants, evaluated in double-word arithmetic.
pub fn symplectic_eigenvalues_invariant<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<SymplecticPair<T>> {
    clamp_pair(invariant_route(sigma))
}

/// `s_V(x)`, the entropy of a thermal mode with symplectic eigenvalue `x`.
pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    if !(x >= T::one() - T::lit(BINARY_ENTROPY_SLACK)) || x.is_infinite() {
        return Err(Error::DomainError { x: x.as_f64() });
    }
    let h = (x - T::one()).max(T::zero()) * T::lit(0.5);
    if h == T::zero() {
        return Ok(T::zero());
    }
    Ok((T::one() + h) * h.ln_1p() - h * h.ln())
}

/// Entropy of a thermal mode with mean occupation `nbar`, `s_V(2 nbar + 1)`.
pub fn thermal_entropy<T: Real>(nbar: T) -> T {
    let n = nbar.max(T::zero());
    if n == T::zero() {
        return T::zero();
    }
    (T::one() + n) * n.ln_1p() - n * n.ln()
}

pub fn gaussian_entropy<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<T> {
    let p = symplectic_eigenvalues(sigma)?;
    Ok(binary_entropy(p.nu_plus)? + binary_entropy(p.nu_minus)?)
}

/// `delta = S(sigma) - S(rho)` with the state entropy supplied by the caller.
pub fn delta_with_entropy<T: Real>(sigma: &CovarianceMatrix<T>, entropy_state: T) -> Result<DeltaResult<T>> {
    let pair = symplectic_eigenvalues(sigma)?;
    let entropy_gaussian = binary_entropy(pair.nu_plus)? + binary_entropy(pair.nu_minus)?;
    Ok(DeltaResult {
        delta: (entropy_gaussian - entropy_state).max(T::zero()),
        entropy_gaussian,
        entropy_initial: entropy_state,
        pair,
    })
}

/// Non-Gaussianity of a unitarily evolved state, whose entropy is that of the input.
pub fn delta<T: Real>(sigma: &CovarianceMatrix<T>, initial: &InitialState<T>) -> Result<DeltaResult<T>> {
    delta_with_entropy(sigma, initial.entropy_initial())
}

/// Leading small-amplitude behaviour `-(1 + (1 - 2 e^{-|F|^2}) |F|^2) |mu|^2 ln|mu|`.
pub fn delta_small_mu<T: Real>(f_complex: Complex<T>, mu_c: Complex<T>) -> T {
    let n = mu_c.norm_sqr();
    if n == T::zero() {
        return T::zero();
    }
    let f2 = f_complex.norm_sqr();
    let coeff = T::one() + (T::one() - T::lit(2.0) * (-f2).exp()) * f2;
    -coeff * n * T::lit(0.5) * n.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeMuDelta<T> {
    /// `s_V(nu_plus) + s_V(nu_minus)` with the large-amplitude eigenvalues.
    pub full: T,
    /// `4 ln|mu_c|`
    pub leading: T,
    pub pair: SymplecticPair<T>,
}

/// Large-amplitude approximation built from the reduced covariance matrix.
///
/// The phase `e^{-2i tau}` of the surviving mechanical correlation does not
/// enter the eigenvalues, so no time argument is needed.
pub fn delta_large_mu<T: Real>(theta_a: T, f_complex: Complex<T>, mu_c: Complex<T>) -> LargeMuDelta<T> {
    let two = T::lit(2.0);
    let n = mu_c.norm_sqr();
    let f2 = f_complex.norm_sqr();
    let s = (theta_a * T::lit(0.5)).sin();
    let nu_plus = T::one() - two * n * (-T::lit(4.0) * n * s * s - f2).exp_m1();
    let nu_minus = (T::lit(4.0) * n * f2 + T::one()).sqrt();
    let sv = |x: T| binary_entropy(x).unwrap_or(T::zero());
    let leading = if n > T::zero() { two * n.ln() } else { T::neg_infinity() };
    LargeMuDelta {
        full: sv(nu_plus) + sv(nu_minus),
        leading,
        pair: SymplecticPair { nu_plus: nu_plus.max(nu_minus), nu_minus: nu_minus.min(nu_plus) },
    }
}

/// Asymptotic forms of `s_V(1 + delta_nu)` near the pure and the highly mixed limits.
pub fn entropy_expansion<T: Real>(delta_nu: T, regime: Regime) -> T {
    let h = delta_nu * T::lit(0.5);
    match regime {
        Regime::Small if h == T::zero() => T::zero(),
        Regime::Small => -h * h.ln(),
        Regime::Large => h.ln() + T::one(),
    }
}

/// Local symplectic eigenvalues `(nu_A, nu_B)` of the optical and mechanical blocks.
pub fn local_symplectic_eigenvalues<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<(T, T)> {
    let s = sigma.as_array();
    let nu_a = (s[0][0].re * s[0][0].re - s[2][0].norm_sqr()).max(T::zero()).sqrt();
    let nu_b = (s[1][1].re * s[1][1].re - s[3][1].norm_sqr()).max(T::zero()).sqrt();
    Ok((clamp_nu(nu_a)?, clamp_nu(nu_b)?))
}

/// Araki-Lieb lower bound `max(0, |s_V(nu_A) - s_V(nu_B)| - S(rho))` on delta.
pub fn araki_lieb_bound<T: Real>(sigma: &CovarianceMatrix<T>, entropy_state: T) -> Result<T> {
    let (a, b) = local_symplectic_eigenvalues(sigma)?;
    let gap = (binary_entropy(a)? - binary_entropy(b)?).abs();
    Ok((gap - entropy_state).max(T::zero()))
}

pub fn araki_lieb_witness<T: Real>(sigma: &CovarianceMatrix<T>, initial: &InitialState<T>) -> Result<T> {
    araki_lieb_bound(sigma, initial.entropy_initial())
}
