//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! [`Cumulative`] keeps the converged partition of an integrand so that
//! `t -> integral over [a, t]` can be queried repeatedly at the cost of one
//! extra 15-point rule per query. The nested coefficient integrals use it as
//! their inner integral.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    /// Absolute error target.
    pub abs_tol: T,
    /// Maximum number of integrand evaluations.
    pub max_evals: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self { abs_tol: T::lit(1e-10), max_evals: 1_000_000 }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_tol(abs_tol: T) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) || self.max_evals < 15 {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs a positive tolerance and at least 15 evaluations (got {}, {})",
                self.abs_tol, self.max_evals
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Panel<T> {
    pub a: T,
    pub b: T,
    pub value: T,
    pub error: T,
}

struct ByError<T>(Panel<T>);

impl<T: Real> PartialEq for ByError<T> {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl<T: Real> Eq for ByError<T> {}
impl<T: Real> PartialOrd for ByError<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for ByError<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.partial_cmp(&other.0.error).unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod rule with the embedded 7-point Gauss estimate.
pub fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * radius;
    let error = ((kronrod - gauss) * radius).abs();
    (value, error)
}

/// Adaptive partition of `[a, b]` whose panel errors sum below `cfg.abs_tol`.
/// Panels come back ordered by their left endpoint.
pub fn adaptive_panels<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    cfg: &QuadratureConfig<T>,
) -> Result<(Vec<Panel<T>>, usize)> {
    cfg.validate()?;
    let (value, error) = gauss_kronrod(&mut f, a, b);
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(ByError(Panel { a, b, value, error }));
    let mut total_err = error;
    let tiny = T::epsilon() * T::lit(64.0);

    while total_err > cfg.abs_tol {
        let worst = match heap.pop() {
            Some(p) => p.0,
            None => break,
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(T::one());
        if evals + 30 > cfg.max_evals || (worst.b - worst.a) < tiny * scale {
            heap.push(ByError(worst));
            return Err(Error::QuadratureFailure {
                tol: cfg.abs_tol.as_f64(),
                estimate: total_err.as_f64(),
                evals,
            });
        }
        let (lv, le) = gauss_kronrod(&mut f, worst.a, mid);
        let (rv, re) = gauss_kronrod(&mut f, mid, worst.b);
        evals += 30;
        total_err = total_err - worst.error + le + re;
        heap.push(ByError(Panel { a: worst.a, b: mid, value: lv, error: le }));
        heap.push(ByError(Panel { a: mid, b: worst.b, value: rv, error: re }));
        // Running updates drift; resum now and then.
        if evals % 3000 == 15 {
            total_err = heap.iter().fold(T::zero(), |acc, p| acc + p.0.error);
        }
    }

    let mut panels: Vec<Panel<T>> = heap.into_iter().map(|p| p.0).collect();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    Ok((panels, evals))
}

/// Integral of `f` over `[a, b]` to absolute tolerance `cfg.abs_tol`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate { value: T::zero(), error: T::zero(), evals: 0 });
    }
    let (panels, evals) = adaptive_panels(f, a, b, cfg)?;
    let value = pairwise_sum(panels.iter().map(|p| p.value));
    let error = panels.iter().fold(T::zero(), |acc, p| acc + p.error);
    Ok(Estimate { value, error, evals })
}

fn pairwise_sum<T: Real, I: Iterator<Item = T>>(it: I) -> T {
    // Kahan-Babuska summation
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t) + x);
        } else {
            comp = comp + ((x - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Running integral `t -> integral of f over [a, t]` on a cached adaptive partition.
pub struct Cumulative<T, F> {
    f: F,
    panels: Vec<Panel<T>>,
    prefix: Vec<T>,
    /// Sum of the panel error estimates.
    pub error: T,
    pub evals: usize,
}

impl<T: Real, F: FnMut(T) -> T> Cumulative<T, F> {
    pub fn new(mut f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Self> {
        let (panels, evals) = if a == b {
            (vec![Panel { a, b, value: T::zero(), error: T::zero() }], 0)
        } else {
            adaptive_panels(&mut f, a, b, cfg)?
        };
        let mut prefix = Vec::with_capacity(panels.len() + 1);
        let mut acc = T::zero();
        let mut comp = T::zero();
        prefix.push(T::zero());
        for p in &panels {
            let y = p.value - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            prefix.push(acc);
        }
        let error = panels.iter().fold(T::zero(), |s, p| s + p.error);
        Ok(Self { f, panels, prefix, error, evals })
    }

    /// Integral from the left end of the partition up to `t` (clamped to the partition).
    pub fn at(&mut self, t: T) -> T {
        let first = self.panels[0].a;
        let last = self.panels[self.panels.len() - 1].b;
        if t <= first {
            return T::zero();
        }
        if t >= last {
            return self.prefix[self.panels.len()];
        }
        let idx = match self.panels.binary_search_by(|p| p.a.partial_cmp(&t).unwrap_or(Ordering::Less)) {
            Ok(i) => return self.prefix[i],
            Err(i) => i - 1,
        };
        let a = self.panels[idx].a;
        let (partial, _) = gauss_kronrod(&mut self.f, a, t);
        self.evals += 15;
        self.prefix[idx] + partial
    }

    pub fn total(&self) -> T {
        self.prefix[self.panels.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_up_to_degree_29_are_exact_on_one_panel() {
        let mut f = |x: f64| x.powi(22) - 3.0 * x.powi(5) + 1.0;
        let (v, _) = gauss_kronrod(&mut f, -1.0, 2.0);
        let exact = (2f64.powi(23) + 1.0) / 23.0 - 0.5 * (64.0 - 1.0) + 3.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn oscillatory_integral_reaches_tolerance() {
        let cfg = QuadratureConfig::with_tol(1e-12);
        let est = integrate(|x: f64| (20.0 * x).sin() * x.exp(), 0.0, 3.0, &cfg).unwrap();
        let exact = (3f64.exp() * ((3.0 * 20.0f64).sin() - 20.0 * (60.0f64).cos()) + 20.0) / 401.0;
        assert!((est.value - exact).abs() < 1e-11, "{} vs {}", est.value, exact);
        assert!(est.error <= 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig { abs_tol: 1e-14, max_evals: 60 };
        let err = integrate(|x: f64| (50.0 * x).cos(), 0.0, 10.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn nonpositive_tolerance_is_rejected() {
        let cfg = QuadratureConfig { abs_tol: 0.0, max_evals: 100 };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn cumulative_matches_antiderivative_inside_panels() {
        let cfg = QuadratureConfig::with_tol(1e-13);
        let mut c = Cumulative::new(|x: f64| x.cos(), 0.0, 2.0 * PI, &cfg).unwrap();
        for k in 0..50 {
            let t = 0.123 * k as f64;
            assert!((c.at(t) - t.min(2.0 * PI).sin()).abs() < 1e-12, "t = {t}");
        }
        assert!(c.total().abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let cfg = QuadratureConfig { abs_tol: 1e-5_f32, max_evals: 10_000 };
        let est = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, &cfg).unwrap();
        assert!((est.value - 2.0).abs() < 1e-5);
    }
}
