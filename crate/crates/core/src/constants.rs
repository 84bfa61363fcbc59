//! Atomic and geometric constants, loadable from a TOML file.
//!
//! Nothing here is hard-coded into the physics routines; every operation
//! takes these values as arguments. Defaults describe the Rb D1 line and
//! the guided-mode geometry used throughout the built-in scenarios.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Resonant two-level cross section prefactor: sigma_0 = 3 lambda^2 / (2 pi).
pub fn sigma0(wavelength: f64) -> f64 {
    3.0 * wavelength * wavelength / (2.0 * std::f64::consts::PI)
}

/// Constants config. All rates are angular frequencies (rad/s), lengths in
/// meters.
///
/// Fields:
/// - `gamma_e`: excited-state population decay rate Gamma_e (rad/s)
/// - `wavelength`: probe transition wavelength (m)
/// - `waist`: guided-mode beam waist w0 (m)
/// - `sigma_ratio`: sigma_eg / sigma_0, the hyperfine strength factor in (0,1]
/// - `dipole_ratio`: mu_s / mu_p, switch-to-probe dipole matrix element ratio
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub gamma_e: f64,
    pub wavelength: f64,
    pub waist: f64,
    pub sigma_ratio: f64,
    pub dipole_ratio: f64,
}

impl Constants {
    /// Rb D1 defaults with the guided-mode waist w0 = 1.9 um. The strength
    /// factor is calibrated so that 100 on-axis atoms give OD = 1, i.e.
    /// 200 sigma_eg = A.
    pub fn rb_d1() -> Self {
        let wavelength = 794.979e-9;
        let waist = 1.9e-6;
        let area = std::f64::consts::PI * waist * waist;
        let sigma_ratio = (area / 200.0) / sigma0(wavelength);
        Constants {
            gamma_e: 2.0 * std::f64::consts::PI * 5.746e6,
            wavelength,
            waist,
            sigma_ratio,
            dipole_ratio: 1.0,
        }
    }

    /// gamma_13 consistent with the two-level limit: Gamma_e / 2.
    pub fn gamma13(&self) -> f64 {
        self.gamma_e / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_e > 0.0) {
            return Err(Error::InvalidParameter("gamma_e must be > 0".into()));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::InvalidParameter("wavelength must be > 0".into()));
        }
        if !(self.waist > 0.0) {
            return Err(Error::InvalidParameter("waist must be > 0".into()));
        }
        if !(self.sigma_ratio > 0.0 && self.sigma_ratio <= 1.0) {
            return Err(Error::InvalidParameter(
                "sigma_ratio must be in (0, 1]".into(),
            ));
        }
        if !(self.dipole_ratio >= 0.0) {
            return Err(Error::InvalidParameter("dipole_ratio must be >= 0".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let c: Constants =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        c.validate()?;
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self).expect("constants serialize");
        std::fs::write(path, text)?;
        Ok(())
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::rb_d1()
    }
}
