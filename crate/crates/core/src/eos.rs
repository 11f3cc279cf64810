//! Ideal-gas-like closure `ρ(p, S) = ρ_ref (p e^{-S})^{1/Γ}`.
//!
//! Smooth, positive for every `p > 0`, and with the closed form `ρ_p = ρ/(Γ p)`, so the
//! hyperbolicity condition `ρ > 0, ρ_p > 0` holds on the whole admissible domain.

use crate::error::{MhdError, Result};
use crate::scalar::{dot3, lit, Real, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EosParams<T> {
    pub adiabatic_exponent: T,
    pub reference_density: T,
}

impl<T: Real> EosParams<T> {
    pub fn new(adiabatic_exponent: T, reference_density: T) -> Result<Self> {
        if !(adiabatic_exponent > T::one()) {
            return Err(MhdError::InvalidEos {
                name: "adiabatic_exponent",
                value: adiabatic_exponent.as_f64(),
            });
        }
        if !(reference_density > T::zero()) {
            return Err(MhdError::InvalidEos {
                name: "reference_density",
                value: reference_density.as_f64(),
            });
        }
        Ok(EosParams {
            adiabatic_exponent,
            reference_density,
        })
    }
}

impl<T: Real> Default for EosParams<T> {
    /// Monatomic gas, unit reference density.
    fn default() -> Self {
        EosParams {
            adiabatic_exponent: lit(5.0 / 3.0),
            reference_density: T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermoPoint<T> {
    pub pressure: T,
    pub entropy: T,
    pub rho: T,
    pub rho_p: T,
}

impl<T: Real> ThermoPoint<T> {
    /// `ρ_p / ρ`, the ratio that appears in every plasma matrix.
    pub fn rho_p_over_rho(&self) -> T {
        self.rho_p / self.rho
    }
}

pub fn density<T: Real>(params: &EosParams<T>, p: T, s: T) -> Result<ThermoPoint<T>> {
    if !(p > T::zero()) {
        return Err(MhdError::NonPositivePressure { p: p.as_f64() });
    }
    let gamma = params.adiabatic_exponent;
    let rho = params.reference_density * (p * (-s).exp()).powf(gamma.recip());
    let rho_p = rho / (gamma * p);
    Ok(ThermoPoint {
        pressure: p,
        entropy: s,
        rho,
        rho_p,
    })
}

/// Evaluates the closure at `p = q − |H|²/2`.
pub fn density_from_total_pressure<T: Real>(
    params: &EosParams<T>,
    q: T,
    h: &Vec3<T>,
    s: T,
) -> Result<ThermoPoint<T>> {
    density(params, q - lit::<T>(0.5) * dot3(h, h), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_state() {
        let t = density(&EosParams::<f64>::default(), 1.0, 0.0).unwrap();
        assert_eq!(t.rho, 1.0);
        assert!((t.rho_p - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rho_p_matches_central_difference() {
        let eos = EosParams::<f64>::default();
        let p = 8.0;
        let t = density(&eos, p, 0.0).unwrap();
        assert!((t.rho - 8f64.powf(0.6)).abs() < 1e-13);
        assert!((t.rho_p - 8f64.powf(0.6) / (5.0 / 3.0 * 8.0)).abs() < 1e-14);
        let step = 1e-5 * p;
        let fd = (density(&eos, p + step, 0.0).unwrap().rho - density(&eos, p - step, 0.0).unwrap().rho)
            / (2.0 * step);
        assert!(((fd - t.rho_p) / t.rho_p).abs() < 1e-6);
    }

    #[test]
    fn pressure_boundary_is_rejected() {
        let eos = EosParams::<f64>::default();
        assert!(matches!(density(&eos, 0.0, 0.0), Err(MhdError::NonPositivePressure { .. })));
        assert!(matches!(
            density_from_total_pressure(&eos, 0.5, &[1.0, 0.0, 0.0], 0.0),
            Err(MhdError::NonPositivePressure { .. })
        ));
    }

    #[test]
    fn total_pressure_subtracts_magnetic_part() {
        let eos = EosParams::<f64>::default();
        let a = density_from_total_pressure(&eos, 1.5, &[1.0, 0.0, 0.0], 0.0).unwrap();
        let b = density(&eos, 1.0, 0.0).unwrap();
        assert_eq!(a, b);
        let c = density_from_total_pressure(&eos, 1.0, &[0.0; 3], 0.0).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn invalid_params() {
        assert!(EosParams::new(1.0, 1.0).is_err());
        assert!(EosParams::new(1.4, 0.0).is_err());
        assert!(EosParams::new(1.4, 2.0).is_ok());
    }
}
