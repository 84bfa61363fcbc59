//! Conversions between experimental observables (photon numbers, atom
//! numbers, beam geometry) and model parameters (optical depth, Rabi
//! frequencies squared), plus the interaction-probability and projected
//! threshold scalings.

use serde::{Deserialize, Serialize};

use crate::constants::sigma0;
use crate::error::{Error, Result};

/// Guided-mode geometry. The beam area A = pi w0^2 is always derived from
/// the waist, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Probe transition wavelength (m).
    pub wavelength: f64,
    /// Beam waist w0 (m).
    pub waist: f64,
    /// mu_s / mu_p.
    pub dipole_ratio: f64,
}

impl Geometry {
    pub fn new(wavelength: f64, waist: f64, dipole_ratio: f64) -> Result<Self> {
        let g = Geometry {
            wavelength,
            waist,
            dipole_ratio,
        };
        g.validate()?;
        Ok(g)
    }

    /// A = pi w0^2.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.waist * self.waist
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(Error::InvalidParameter("wavelength must be > 0".into()));
        }
        if !(self.waist > 0.0) || !self.waist.is_finite() {
            return Err(Error::InvalidParameter("waist must be > 0".into()));
        }
        if !(self.dipole_ratio >= 0.0) || !self.dipole_ratio.is_finite() {
            return Err(Error::InvalidParameter("dipole_ratio must be >= 0".into()));
        }
        Ok(())
    }
}

/// On-axis effective atom number and cross-section calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Effective on-axis atom number N_eff.
    pub n_eff: f64,
    /// sigma_eg / sigma_0, in (0, 1].
    pub sigma_ratio: f64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_eff >= 0.0) || !self.n_eff.is_finite() {
            return Err(Error::InvalidParameter("n_eff must be >= 0".into()));
        }
        if !(self.sigma_ratio > 0.0 && self.sigma_ratio <= 1.0) {
            return Err(Error::InvalidParameter(
                "sigma_ratio must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// sigma_eg = sigma_ratio * 3 lambda^2 / (2 pi).
    pub fn sigma_eg(&self, wavelength: f64) -> f64 {
        self.sigma_ratio * sigma0(wavelength)
    }
}

/// OD = 2 N_eff sigma_eg / A.
pub fn od_from_atoms(ens: &EnsembleSpec, geom: &Geometry) -> Result<f64> {
    ens.validate()?;
    geom.validate()?;
    Ok(2.0 * ens.n_eff * ens.sigma_eg(geom.wavelength) / geom.area())
}

/// Exact inverse of [`od_from_atoms`].
pub fn atoms_from_od(od: f64, sigma_ratio: f64, geom: &Geometry) -> Result<f64> {
    geom.validate()?;
    if !(od >= 0.0) {
        return Err(Error::InvalidParameter("od must be >= 0".into()));
    }
    if !(sigma_ratio > 0.0 && sigma_ratio <= 1.0) {
        return Err(Error::InvalidParameter(
            "sigma_ratio must be in (0, 1]".into(),
        ));
    }
    Ok(od * geom.area() / (2.0 * sigma_ratio * sigma0(geom.wavelength)))
}

/// Rabi frequency squared of a pulse with `n` photons of effective duration
/// `duration` in the guided mode:
///
/// Omega^2 = (3/pi)(lambda^2/A) * gamma * (mu ratio)^2 * n / duration
///
/// This is the normalization under which `od * Im f(0)` reproduces the
/// closed-form switch exponent with flux n / (sqrt(2) t_p + t_d). A
/// probe-normalized transition (the control field) uses mu_ratio = 1.
pub fn rabi_sq_from_photons(
    n: f64,
    duration: f64,
    geom: &Geometry,
    gamma: f64,
    mu_ratio: f64,
) -> Result<f64> {
    geom.validate()?;
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter("photon count must be >= 0".into()));
    }
    if !(duration > 0.0) {
        return Err(Error::InvalidParameter("duration must be > 0".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter("gamma must be > 0".into()));
    }
    let lam_sq_over_a = geom.wavelength * geom.wavelength / geom.area();
    Ok((3.0 / std::f64::consts::PI) * lam_sq_over_a * gamma * mu_ratio * mu_ratio * n / duration)
}

/// Inverse of [`rabi_sq_from_photons`]: photons at fixed duration.
pub fn photons_from_rabi_sq(
    rabi_sq: f64,
    duration: f64,
    geom: &Geometry,
    gamma: f64,
    mu_ratio: f64,
) -> Result<f64> {
    geom.validate()?;
    if !(rabi_sq >= 0.0) {
        return Err(Error::InvalidParameter("rabi_sq must be >= 0".into()));
    }
    if !(duration > 0.0) || !(gamma > 0.0) || !(mu_ratio > 0.0) {
        return Err(Error::InvalidParameter(
            "duration, gamma, mu_ratio must be > 0".into(),
        ));
    }
    let lam_sq_over_a = geom.wavelength * geom.wavelength / geom.area();
    Ok(rabi_sq * duration * std::f64::consts::PI
        / (3.0 * lam_sq_over_a * gamma * mu_ratio * mu_ratio))
}

/// Single-atom / single-photon interaction probability p = 2 sigma_eg / A,
/// the per-atom OD contribution, clamped to [0, 1].
pub fn interaction_probability(geom: &Geometry, ens: &EnsembleSpec) -> Result<f64> {
    geom.validate()?;
    ens.validate()?;
    Ok((2.0 * ens.sigma_eg(geom.wavelength) / geom.area()).clamp(0.0, 1.0))
}

/// Improvement schemes for the projected switch-photon threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// N_s ~ A / lambda^2.
    Baseline,
    /// Both pulses slowed: N_s ~ (1/sqrt(OD)) A / lambda^2.
    CopropagatingSlow,
    /// Stationary-pulse: interaction probability ~ OD lambda^2 / A.
    Stationary,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Scheme::Baseline),
            "copropagating-slow" => Ok(Scheme::CopropagatingSlow),
            "stationary" => Ok(Scheme::Stationary),
            other => Err(Error::UnknownScheme(other.into())),
        }
    }
}

/// Projected photon threshold (baseline, copropagating-slow) or interaction
/// probability (stationary) for the given scheme.
pub fn projected_threshold(scheme: Scheme, od: f64, geom: &Geometry) -> Result<f64> {
    geom.validate()?;
    if !(od > 0.0) {
        return Err(Error::InvalidParameter("od must be > 0".into()));
    }
    let a_over_lam_sq = geom.area() / (geom.wavelength * geom.wavelength);
    Ok(match scheme {
        Scheme::Baseline => a_over_lam_sq,
        Scheme::CopropagatingSlow => a_over_lam_sq / od.sqrt(),
        Scheme::Stationary => (od / a_over_lam_sq).min(1.0),
    })
}
