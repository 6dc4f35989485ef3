use crate::error::{Error, Result};
use crate::real::Real;

/// Time dependence of the dimensionless light-matter coupling.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingProfile<T> {
    Constant { g0: T },
    /// `g0 * (1 + epsilon * sin(omega0 * tau))`
    Modulated { g0: T, epsilon: T, omega0: T },
    Tabulated(Tabulated<T>),
}

impl<T: Real> CouplingProfile<T> {
    pub fn constant(g0: T) -> Self {
        CouplingProfile::Constant { g0 }
    }

    pub fn modulated(g0: T, epsilon: T, omega0: T) -> Self {
        CouplingProfile::Modulated { g0, epsilon, omega0 }
    }

    pub fn value(&self, tau: T) -> T {
        match self {
            CouplingProfile::Constant { g0 } => *g0,
            CouplingProfile::Modulated { g0, epsilon, omega0 } => *g0 * (T::one() + *epsilon * (*omega0 * tau).sin()),
            CouplingProfile::Tabulated(t) => t.value(tau),
        }
    }

    /// Upper bound on `|g|` over the profile's domain.
    pub fn bound(&self) -> T {
        match self {
            CouplingProfile::Constant { g0 } => g0.abs(),
            CouplingProfile::Modulated { g0, epsilon, .. } => g0.abs() * (T::one() + epsilon.abs()),
            CouplingProfile::Tabulated(t) => t.bound(),
        }
    }

    /// Errors unless the profile can be evaluated on `[0, tau]`.
    pub fn check_domain(&self, tau: T) -> Result<()> {
        if !(tau >= T::zero()) {
            return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
        }
        match self {
            CouplingProfile::Tabulated(t) if tau > t.end() || t.start() > T::zero() => {
                Err(Error::ProfileDomain { tau: tau.as_f64() })
            }
            _ => Ok(()),
        }
    }
}

/// Sampled coupling with monotone piecewise-cubic (Fritsch-Carlson) interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    tau: Vec<T>,
    g: Vec<T>,
    slope: Vec<T>,
}

impl<T: Real> Tabulated<T> {
    pub fn new(samples: &[(T, T)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("tabulated profile needs at least two samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter("tabulated sample times must be strictly increasing".into()));
        }
        if samples.iter().any(|(t, g)| !t.is_finite() || !g.is_finite()) {
            return Err(Error::InvalidParameter("tabulated samples must be finite".into()));
        }
        let tau: Vec<T> = samples.iter().map(|s| s.0).collect();
        let g: Vec<T> = samples.iter().map(|s| s.1).collect();
        let n = tau.len();
        let secant: Vec<T> = (0..n - 1).map(|i| (g[i + 1] - g[i]) / (tau[i + 1] - tau[i])).collect();

        let mut slope = vec![T::zero(); n];
        slope[0] = secant[0];
        slope[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slope[i] = if secant[i - 1] * secant[i] <= T::zero() {
                T::zero()
            } else {
                T::lit(0.5) * (secant[i - 1] + secant[i])
            };
        }
        for i in 0..n - 1 {
            if secant[i] == T::zero() {
                slope[i] = T::zero();
                slope[i + 1] = T::zero();
                continue;
            }
            let alpha = slope[i] / secant[i];
            let beta = slope[i + 1] / secant[i];
            let r = alpha * alpha + beta * beta;
            if r > T::lit(9.0) {
                let s = T::lit(3.0) / r.sqrt();
                slope[i] = s * alpha * secant[i];
                slope[i + 1] = s * beta * secant[i];
            }
        }
        Ok(Self { tau, g, slope })
    }

    pub fn start(&self) -> T {
        self.tau[0]
    }

    pub fn end(&self) -> T {
        self.tau[self.tau.len() - 1]
    }

    pub fn samples(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.tau.iter().copied().zip(self.g.iter().copied())
    }

    fn bound(&self) -> T {
        self.g.iter().fold(T::zero(), |m, g| m.max(g.abs()))
    }

    /// Interpolated value; clamped to the end samples outside the table.
    pub fn value(&self, t: T) -> T {
        let n = self.tau.len();
        if t <= self.tau[0] {
            return self.g[0];
        }
        if t >= self.tau[n - 1] {
            return self.g[n - 1];
        }
        let i = match self.tau.binary_search_by(|x| x.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => return self.g[i],
            Err(i) => i - 1,
        };
        let h = self.tau[i + 1] - self.tau[i];
        let s = (t - self.tau[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.g[i] + h10 * h * self.slope[i] + h01 * self.g[i + 1] + h11 * h * self.slope[i + 1]
    }
}
