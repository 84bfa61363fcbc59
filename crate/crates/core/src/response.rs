//! Frequency-dependent atomic response of the four-level N-scheme and its
//! analytic limits (two-level line, EIT transparency, CW switch absorption,
//! group delay).
//!
//! The complex response is
//!
//! ```text
//! f(dp) = gamma13 (|Os|^2 - 4 d12 d24) / (d24 (4 d12 d13 - |Oc|^2) - d13 |Os|^2)
//! ```
//!
//! with complex detunings `d_ij = dp + i gamma_ij`. The probe detuning seen
//! by the medium is the carrier detuning plus the sideband frequency. The
//! medium acts on a probe pulse through the spectral filter
//! `exp(i OD f / 2)`, so intensity attenuation is `exp(-OD Im f)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the atomic medium entering the N-scheme response.
/// Rates and Rabi frequencies are angular (rad/s); `od` is dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Optical depth (resonant two-level intensity attenuation exponent).
    pub od: f64,
    /// Coherence decay rate of |1>-|3> (rad/s). Gamma_e / 2 for a pure
    /// radiatively broadened line.
    pub gamma13: f64,
    /// Ground-state decoherence rate |1>-|2> (rad/s).
    pub gamma12: f64,
    /// Coherence decay rate of |2>-|4> (rad/s).
    pub gamma24: f64,
    /// |Omega_c|^2, control Rabi frequency squared (rad^2/s^2).
    pub rabi_c_sq: f64,
    /// |Omega_s|^2, switch Rabi frequency squared (rad^2/s^2).
    pub rabi_s_sq: f64,
}

impl MediumParams {
    /// Bare two-level medium: no control, no switch, no ground decoherence.
    pub fn two_level(od: f64, gamma13: f64) -> Self {
        MediumParams {
            od,
            gamma13,
            gamma12: 0.0,
            gamma24: gamma13,
            rabi_c_sq: 0.0,
            rabi_s_sq: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.od.is_finite()
            && self.gamma13.is_finite()
            && self.gamma12.is_finite()
            && self.gamma24.is_finite()
            && self.rabi_c_sq.is_finite()
            && self.rabi_s_sq.is_finite();
        if !finite {
            return Err(Error::InvalidParameter("non-finite medium parameter".into()));
        }
        if self.od < 0.0 {
            return Err(Error::InvalidParameter("od must be >= 0".into()));
        }
        if self.gamma13 < 0.0 || self.gamma12 < 0.0 || self.gamma24 < 0.0 {
            return Err(Error::InvalidParameter("decay rates must be >= 0".into()));
        }
        if self.rabi_c_sq < 0.0 || self.rabi_s_sq < 0.0 {
            return Err(Error::InvalidParameter("Rabi squares must be >= 0".into()));
        }
        if self.od > 0.0 && self.gamma13 == 0.0 {
            return Err(Error::InvalidParameter(
                "gamma13 must be > 0 when od > 0 (lossless absorber)".into(),
            ));
        }
        Ok(())
    }
}

/// Constants of a single optical transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionParams {
    /// Excited-state population decay rate Gamma_e (rad/s).
    pub gamma_e: f64,
    /// Transition wavelength (m).
    pub wavelength: f64,
    /// sigma_eg / sigma_0 in (0, 1].
    pub strength_factor: f64,
    /// mu_s / mu_p.
    pub dipole_ratio: f64,
}

impl TransitionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_e > 0.0) {
            return Err(Error::InvalidParameter("gamma_e must be > 0".into()));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::InvalidParameter("wavelength must be > 0".into()));
        }
        if !(self.strength_factor > 0.0 && self.strength_factor <= 1.0) {
            return Err(Error::InvalidParameter(
                "strength_factor must be in (0, 1]".into(),
            ));
        }
        if !(self.dipole_ratio >= 0.0) {
            return Err(Error::InvalidParameter("dipole_ratio must be >= 0".into()));
        }
        Ok(())
    }
}

/// Natural line profile: T = exp(-od / (1 + 4 (delta_p / Gamma_e)^2)).
pub fn natural_line_transmission(delta_p: f64, od: f64, gamma_e: f64) -> Result<f64> {
    if !delta_p.is_finite() || !od.is_finite() || !gamma_e.is_finite() {
        return Err(Error::InvalidParameter("non-finite input".into()));
    }
    if od < 0.0 {
        return Err(Error::InvalidParameter("od must be >= 0".into()));
    }
    if gamma_e <= 0.0 {
        return Err(Error::InvalidParameter("gamma_e must be > 0".into()));
    }
    let x = delta_p / gamma_e;
    Ok((-od / (1.0 + 4.0 * x * x)).exp())
}

/// Complex atomic response f at sideband frequency `omega` on a carrier
/// detuned by `delta_probe` from the |1>-|3> resonance.
pub fn complex_response(omega: f64, delta_probe: f64, m: &MediumParams) -> Result<Complex64> {
    m.validate()?;
    if !omega.is_finite() || !delta_probe.is_finite() {
        return Err(Error::InvalidParameter("non-finite detuning".into()));
    }
    let dp = delta_probe + omega;
    let d12 = Complex64::new(dp, m.gamma12);
    let d13 = Complex64::new(dp, m.gamma13);
    let d24 = Complex64::new(dp, m.gamma24);
    // With no switch field the d24 factor cancels from numerator and
    // denominator, and with no control field d12 cancels too. Cancel
    // explicitly so the resonant, fully coherent limits (d12 = 0 or
    // d24 = 0) stay finite instead of hitting 0/0.
    let (num, den) = if m.rabi_s_sq == 0.0 && m.rabi_c_sq == 0.0 {
        (Complex64::new(-m.gamma13, 0.0), d13)
    } else if m.rabi_s_sq == 0.0 {
        (-4.0 * m.gamma13 * d12, 4.0 * d12 * d13 - m.rabi_c_sq)
    } else {
        (
            m.gamma13 * (Complex64::new(m.rabi_s_sq, 0.0) - 4.0 * d12 * d24),
            d24 * (4.0 * d12 * d13 - m.rabi_c_sq) - d13 * m.rabi_s_sq,
        )
    };
    if den.norm_sqr() == 0.0 {
        return Err(Error::SingularResponse);
    }
    Ok(num / den)
}

/// Resonant CW transmission exp(-od * Im f(0)): the long-pulse limit of the
/// transmission integral.
pub fn cw_resonant_transmission(m: &MediumParams) -> Result<f64> {
    let f = complex_response(0.0, 0.0, m)?;
    Ok((-m.od * f.im).exp())
}

/// Rabi-convention factor for the group delay. `Propagated` (kappa = 2) is
/// the phase-slope of the response under the exp(i OD f / 2) propagator;
/// `Text` (kappa = 1) is the OD gamma13 / |Omega_c|^2 form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DelayConvention {
    Propagated,
    Text,
}

impl DelayConvention {
    pub fn kappa(self) -> f64 {
        match self {
            DelayConvention::Propagated => 2.0,
            DelayConvention::Text => 1.0,
        }
    }
}

/// Ideal-EIT group delay t_d = kappa * OD * gamma13 / |Omega_c|^2.
///
/// Requires the ideal EIT regime (Omega_c > 0, Omega_s = 0, gamma12 = 0).
/// The default convention is the model-consistent one: near resonance
/// f ~ 4 gamma13 dp / Omega_c^2, so the exp(i OD f / 2) phase slope gives
/// t_d = 2 OD gamma13 / Omega_c^2.
pub fn analytic_group_delay(m: &MediumParams, convention: DelayConvention) -> Result<f64> {
    m.validate()?;
    if m.rabi_c_sq <= 0.0 {
        return Err(Error::InvalidParameter(
            "Omega_c must be > 0 for EIT group delay".into(),
        ));
    }
    if m.rabi_s_sq != 0.0 || m.gamma12 != 0.0 {
        return Err(Error::InvalidParameter(
            "group delay formula requires Omega_s = 0 and gamma12 = 0".into(),
        ));
    }
    Ok(convention.kappa() * m.od * m.gamma13 / m.rabi_c_sq)
}
