//! Incoherent pump switch: pump photons transfer ground-state population
//! via excited-state decay branching, and the transferred atoms absorb the
//! probe on a cycling transition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the incoherent transfer model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferModel {
    /// Atoms transferred per absorbed pump photon, in (0, 1]. Limited by
    /// the excited-state branching ratio.
    pub transfer_eff: f64,
    /// Atoms initially available in the source state.
    pub n_available: f64,
    /// Probe attenuation exponent per pump photon (1/photon).
    pub kappa: f64,
}

impl TransferModel {
    /// Calibrated defaults: 300 pump photons transfer 150 atoms and halve
    /// the probe transmission; 3000 atoms available.
    pub fn calibrated() -> Self {
        TransferModel {
            transfer_eff: 0.5,
            n_available: 3000.0,
            kappa: std::f64::consts::LN_2 / 300.0,
        }
    }

    /// Microscopic parameterization: kappa = p_cycling * transfer_eff where
    /// p_cycling is the per-atom probe absorption exponent on the cycling
    /// transition.
    pub fn from_cycling_probability(
        p_cycling: f64,
        transfer_eff: f64,
        n_available: f64,
    ) -> Result<Self> {
        if !(p_cycling >= 0.0) {
            return Err(Error::InvalidParameter("p_cycling must be >= 0".into()));
        }
        let tm = TransferModel {
            transfer_eff,
            n_available,
            kappa: p_cycling * transfer_eff,
        };
        tm.validate()?;
        Ok(tm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transfer_eff > 0.0 && self.transfer_eff <= 1.0) {
            return Err(Error::InvalidParameter(
                "transfer_eff must be in (0, 1]".into(),
            ));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter("kappa must be >= 0".into()));
        }
        if !(self.n_available >= 0.0) || !self.n_available.is_finite() {
            return Err(Error::InvalidParameter("n_available must be >= 0".into()));
        }
        Ok(())
    }

    /// Pump photon count beyond which all available atoms are transferred.
    pub fn saturation_pump(&self) -> f64 {
        self.n_available / self.transfer_eff
    }
}

impl Default for TransferModel {
    fn default() -> Self {
        Self::calibrated()
    }
}

/// Atoms transferred by `n_pump` pump photons: min(eff * n_pump, available).
pub fn atoms_transferred(n_pump: f64, tm: &TransferModel) -> Result<f64> {
    tm.validate()?;
    if !(n_pump >= 0.0) || !n_pump.is_finite() {
        return Err(Error::InvalidParameter("n_pump must be >= 0".into()));
    }
    Ok((tm.transfer_eff * n_pump).min(tm.n_available))
}

/// Probe transmission vs pump photon number: exponential in the transferred
/// population, with a plateau once the source state is emptied.
pub fn probe_transmission_incoherent(n_pump: f64, tm: &TransferModel) -> Result<f64> {
    tm.validate()?;
    if !(n_pump >= 0.0) || !n_pump.is_finite() {
        return Err(Error::InvalidParameter("n_pump must be >= 0".into()));
    }
    let effective = n_pump.min(tm.saturation_pump());
    Ok((-tm.kappa * effective).exp())
}
