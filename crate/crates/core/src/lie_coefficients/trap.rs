//! Trapping frequency and light-matter coupling of a levitated dielectric sphere.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const HBAR: f64 = 1.054_571_817e-34;
const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// SI parameters of an optically trapped bead inside a cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParameters {
    pub bead_radius: f64,
    pub density: f64,
    pub relative_permittivity: f64,
    /// Trapping-beam intensity (W/m^2).
    pub intensity: f64,
    pub waist: f64,
    pub cavity_length: f64,
    pub wavelength: f64,
    pub mode_volume: f64,
    /// Phase offset of the standing wave at the trap centre (rad).
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapCoupling {
    /// Mechanical angular frequency (rad/s).
    pub omega_m: f64,
    /// Coupling rate (rad/s).
    pub g: f64,
    /// `g / omega_m`
    pub g_tilde: f64,
}

impl TrapParameters {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bead_radius", self.bead_radius),
            ("density", self.density),
            ("relative_permittivity", self.relative_permittivity),
            ("intensity", self.intensity),
            ("waist", self.waist),
            ("cavity_length", self.cavity_length),
            ("wavelength", self.wavelength),
            ("mode_volume", self.mode_volume),
            ("phase", self.phase),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.relative_permittivity <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "relative permittivity must exceed 1, got {}",
                self.relative_permittivity
            )));
        }
        Ok(())
    }

    /// Clausius-Mossotti factor `3 (eps_r - 1) / (eps_r + 2)`.
    pub fn clausius_mossotti(&self) -> f64 {
        3.0 * (self.relative_permittivity - 1.0) / (self.relative_permittivity + 2.0)
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.bead_radius.powi(3)
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }
}

/// Trapping frequency `omega_m^2 = 2 eps_c eps0 E0^2 V / (m W0^2)` with `E0^2 = 2 I / (c eps0)`,
/// and coupling `g = sqrt(hbar / (2 omega_m m)) omega_c^2 V eps_c phase / (2 V_c c)`.
pub fn trap_parameters_to_coupling(p: &TrapParameters) -> Result<TrapCoupling> {
    p.validate()?;
    let eps_c = p.clausius_mossotti();
    let volume = p.volume();
    let mass = p.mass();
    let field_sq = 2.0 * p.intensity / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY);
    let omega_m = (2.0 / mass * eps_c * VACUUM_PERMITTIVITY * field_sq * volume / (p.waist * p.waist)).sqrt();
    let omega_c = 2.0 * PI * SPEED_OF_LIGHT / p.wavelength;
    let zero_point = (HBAR / (2.0 * omega_m * mass)).sqrt();
    let g = zero_point * omega_c * omega_c * volume * eps_c * p.phase / (2.0 * p.mode_volume * SPEED_OF_LIGHT);
    Ok(TrapCoupling { omega_m, g, g_tilde: g / omega_m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn silica() -> TrapParameters {
        TrapParameters {
            bead_radius: 50e-9,
            density: 2200.0,
            relative_permittivity: 2.1,
            intensity: 6e10,
            waist: 1e-6,
            cavity_length: 1e-2,
            wavelength: 1064e-9,
            mode_volume: 1e-12,
            phase: 0.1,
        }
    }

    #[test]
    fn silica_bead_reference_values() {
        // Independent evaluation of the same expressions in double precision.
        let c = trap_parameters_to_coupling(&silica()).unwrap();
        assert!((c.omega_m / 541_189.012_271_364_8 - 1.0).abs() < 1e-12);
        assert!((c.g / 2.025_973_867_713_266_6 - 1.0).abs() < 1e-12);
        assert!((c.g_tilde / 3.743_560_607_799_99e-6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trap_frequency_matches_rayleigh_tweezer_form() {
        // omega_m^2 = 4 eps_c I / (rho c W0^2)
        let p = silica();
        let c = trap_parameters_to_coupling(&p).unwrap();
        let expect = (4.0 * p.clausius_mossotti() * p.intensity / (p.density * SPEED_OF_LIGHT * p.waist * p.waist)).sqrt();
        assert!((c.omega_m / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_phase_doubles_coupling() {
        let p = silica();
        let a = trap_parameters_to_coupling(&p).unwrap();
        let b = trap_parameters_to_coupling(&TrapParameters { phase: 2.0 * p.phase, ..p }).unwrap();
        assert_eq!(a.omega_m, b.omega_m);
        assert!((b.g / a.g - 2.0).abs() < 1e-14);
        assert!((b.g_tilde / a.g_tilde - 2.0).abs() < 1e-14);
    }

    #[test]
    fn clausius_mossotti_saturates() {
        let p = TrapParameters { relative_permittivity: 1e12, ..silica() };
        assert!((p.clausius_mossotti() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(trap_parameters_to_coupling(&TrapParameters { waist: 0.0, ..silica() }).is_err());
        assert!(trap_parameters_to_coupling(&TrapParameters { relative_permittivity: 1.0, ..silica() }).is_err());
        assert!(trap_parameters_to_coupling(&TrapParameters { intensity: f64::NAN, ..silica() }).is_err());
    }
}
