//! Conversions between laboratory units and the dimensionless scale used
//! internally, where `hbar = k_B = omega0 = 1`.
//!
//! Energies are measured in units of the level splitting `hbar*omega0`,
//! times in units of `1/omega0` and rates in units of `omega0`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Boltzmann constant in meV/K.
pub const K_B_MEV_PER_K: f64 = 8.617333e-2;
/// Reduced Planck constant in meV*s.
pub const HBAR_MEV_S: f64 = 6.582120e-13;

/// Level splitting used throughout the reference experiments.
pub const DEFAULT_HBAR_OMEGA0_MEV: f64 = 25.0;

/// Fixes the physical size of the level splitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem {
    hbar_omega0_mev: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hbar_omega0_mev: DEFAULT_HBAR_OMEGA0_MEV,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar_omega0_mev: f64) -> Result<Self> {
        if !(hbar_omega0_mev.is_finite() && hbar_omega0_mev > 0.0) {
            return Err(Error::domain(format!(
                "level splitting must be positive, got {hbar_omega0_mev} meV"
            )));
        }
        Ok(UnitSystem { hbar_omega0_mev })
    }

    pub fn hbar_omega0_mev(&self) -> f64 {
        self.hbar_omega0_mev
    }

    /// Angular frequency of the level splitting in rad/s.
    pub fn omega0_rad_per_s(&self) -> f64 {
        self.hbar_omega0_mev / HBAR_MEV_S
    }

    /// The temperature, in kelvin, at which `k_B T = hbar*omega0`.
    pub fn hbar_omega0_over_kb_k(&self) -> f64 {
        self.hbar_omega0_mev / K_B_MEV_PER_K
    }

    /// Length of one scaled time unit `1/omega0`, in picoseconds.
    pub fn time_unit_ps(&self) -> f64 {
        1e12 / self.omega0_rad_per_s()
    }

    /// Dimensionless inverse temperature `hbar*omega0 / (k_B T)`.
    pub fn beta_tilde(&self, temperature_k: f64) -> Result<f64> {
        if !(temperature_k > 0.0) {
            return Err(Error::domain(format!(
                "temperature must be positive, got {temperature_k} K"
            )));
        }
        Ok(self.hbar_omega0_over_kb_k() / temperature_k)
    }

    pub fn kelvin_from_beta_tilde(&self, beta_tilde: f64) -> Result<f64> {
        if !(beta_tilde > 0.0) {
            return Err(Error::domain(format!(
                "scaled inverse temperature must be positive, got {beta_tilde}"
            )));
        }
        Ok(self.hbar_omega0_over_kb_k() / beta_tilde)
    }

    /// `omega0 * t` for `t` in seconds.
    pub fn scaled_time(&self, t_s: f64) -> f64 {
        self.omega0_rad_per_s() * t_s
    }

    pub fn seconds_from_scaled(&self, t_scaled: f64) -> f64 {
        t_scaled / self.omega0_rad_per_s()
    }

    /// Converts a rate in units of `omega0` to inverse seconds.
    pub fn rate_per_s(&self, rate_scaled: f64) -> f64 {
        rate_scaled * self.omega0_rad_per_s()
    }

    pub fn rate_per_ps(&self, rate_scaled: f64) -> f64 {
        self.rate_per_s(rate_scaled) * 1e-12
    }
}

/// Width of one of `n` equal intervals covering the period `2*pi/omega`.
///
/// `omega` is an angular frequency in rad/s; the result is in seconds.
pub fn interval_duration(omega_rad_per_s: f64, n: usize) -> Result<f64> {
    if !(omega_rad_per_s.is_finite() && omega_rad_per_s > 0.0) {
        return Err(Error::domain(format!(
            "modulation frequency must be positive, got {omega_rad_per_s} rad/s"
        )));
    }
    if n == 0 {
        return Err(Error::domain("interval count must be at least 1"));
    }
    Ok(TAU / omega_rad_per_s / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_initial_temperature() {
        let units = UnitSystem::default();
        let beta = units.beta_tilde(270.71).unwrap();
        assert!((beta - 1.07).abs() < 0.01, "{beta}");
        let beta = units.beta_tilde(200.0).unwrap();
        assert!((beta - 1.4505).abs() < 1e-3, "{beta}");
    }

    #[test]
    fn temperature_scale_near_290k() {
        let t = UnitSystem::default().hbar_omega0_over_kb_k();
        assert!((t - 290.1).abs() < 0.5, "{t}");
    }

    #[test]
    fn hot_limit() {
        let units = UnitSystem::default();
        assert!(units.beta_tilde(1e12).unwrap() < 1e-9);
    }

    #[test]
    fn rejects_nonpositive_temperature() {
        let units = UnitSystem::default();
        assert!(matches!(units.beta_tilde(0.0), Err(Error::Domain(_))));
        assert!(units.beta_tilde(-3.0).is_err());
        assert!(units.beta_tilde(f64::NAN).is_err());
        assert!(UnitSystem::new(0.0).is_err());
    }

    #[test]
    fn time_unit_consistency() {
        let units = UnitSystem::default();
        let product = units.time_unit_ps() * units.omega0_rad_per_s() * 1e-12;
        assert!((product - 1.0).abs() < 1e-12);
        // one scaled unit is about 0.026 ps
        assert!((units.scaled_time(0.0263e-12) - 1.0).abs() < 0.01);
        assert!((units.scaled_time(0.0306e-12) - 1.164).abs() < 2e-3);
        assert_eq!(units.scaled_time(0.0), 0.0);
    }

    #[test]
    fn interval_widths() {
        let dt = interval_duration(5e12, 41).unwrap();
        assert!((dt * 1e12 - 0.031).abs() < 5e-4, "{dt}");
        let dt = interval_duration(1e12, 41).unwrap();
        assert!((dt * 1e12 - 0.15325).abs() < 1e-5, "{dt}");
        assert_eq!(interval_duration(2.0, 1).unwrap(), TAU / 2.0);
        assert!(interval_duration(1e12, 0).is_err());
        assert!(interval_duration(-1.0, 3).is_err());
    }

    proptest! {
        #[test]
        fn beta_round_trip(beta in 0.01f64..100.0) {
            let units = UnitSystem::default();
            let t = units.kelvin_from_beta_tilde(beta).unwrap();
            let back = units.beta_tilde(t).unwrap();
            prop_assert!(((back - beta) / beta).abs() < 1e-12);
        }

        #[test]
        fn beta_decreases_with_temperature(t in 1.0f64..1e4, dt in 1e-3f64..100.0) {
            let units = UnitSystem::default();
            prop_assert!(units.beta_tilde(t + dt).unwrap() < units.beta_tilde(t).unwrap());
        }
    }
}
