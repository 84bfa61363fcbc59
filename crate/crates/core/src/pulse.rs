//! Gaussian probe pulse propagation through the atomic medium.
//!
//! The medium acts as a spectral filter `exp(i OD f(omega) / 2)` on the
//! slowly varying envelope. Two independent routes to the energy
//! transmission are provided: the full transform propagation
//! ([`propagate_pulse`]) and direct quadrature of the transmission integral
//! ([`pulse_transmission`]). The resonant closed form with its threshold
//! inversion lives in [`closed_form_transmission`] / [`switch_threshold`].

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photometry::Geometry;
use crate::quadrature;
use crate::response::{complex_response, MediumParams};

/// Gaussian probe pulse: envelope E_in(t) ~ exp(-t^2 / (4 t_p^2)),
/// normalized so that the integral of |E_in|^2 over time equals `photons`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// rms envelope width (s).
    pub t_p: f64,
    /// Carrier detuning from the |1>-|3> resonance (rad/s).
    pub delta_probe: f64,
    /// Mean input photon number N_in.
    pub photons: f64,
}

impl PulseSpec {
    pub fn resonant(t_p: f64) -> Self {
        PulseSpec {
            t_p,
            delta_probe: 0.0,
            photons: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_p > 0.0) || !self.t_p.is_finite() {
            return Err(Error::InvalidParameter("t_p must be > 0".into()));
        }
        if !(self.photons >= 0.0) || !self.photons.is_finite() {
            return Err(Error::InvalidParameter("photons must be >= 0".into()));
        }
        if !self.delta_probe.is_finite() {
            return Err(Error::InvalidParameter("delta_probe must be finite".into()));
        }
        Ok(())
    }
}

/// Frequency sampling for the transform propagation: the grid spans
/// [-span, span] in angular frequency with `samples` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Half-span of the angular frequency grid (rad/s).
    pub span: f64,
    /// Sample count, a power of two >= 4096.
    pub samples: usize,
}

impl GridSpec {
    /// Default sampling rule: span = 8 / t_p (covers the Gaussian spectrum
    /// to exp(-128)), 4096 samples.
    pub fn for_pulse(pulse: &PulseSpec) -> Self {
        GridSpec {
            span: 8.0 / pulse.t_p,
            samples: 4096,
        }
    }

    pub fn validate(&self, pulse: &PulseSpec) -> Result<()> {
        if !self.samples.is_power_of_two() || self.samples < 4096 {
            return Err(Error::InvalidParameter(
                "grid samples must be a power of two >= 4096".into(),
            ));
        }
        if !(self.span * pulse.t_p >= 8.0 - 1e-12) {
            return Err(Error::InvalidParameter(
                "grid span must be >= 8 / t_p".into(),
            ));
        }
        Ok(())
    }
}

/// Grid bookkeeping recorded with every propagation result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub samples: usize,
    pub omega_span: f64,
    pub omega_step: f64,
    pub time_step: f64,
    pub time_span: f64,
}

/// Output of [`propagate_pulse`].
#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// N_out / N_in.
    pub transmission: f64,
    /// Output-peak delay relative to the input peak (s), sub-sample
    /// interpolated.
    pub delay: f64,
    /// Energy-centroid delay (s).
    pub centroid_delay: f64,
    /// Time grid (s) of the sampled envelopes.
    pub time: Vec<f64>,
    /// Output complex envelope on `time`.
    pub envelope_out: Vec<Complex64>,
    /// Input complex envelope on `time`.
    pub envelope_in: Vec<Complex64>,
    pub grid_meta: GridMeta,
}

/// Propagate a Gaussian probe pulse through the medium's spectral filter.
///
/// The output envelope is the inverse transform of
/// `E_in(omega) exp(i OD f(omega) / 2)` where f is evaluated at the probe
/// detuning `delta_probe + omega`.
pub fn propagate_pulse(
    pulse: &PulseSpec,
    m: &MediumParams,
    grid: &GridSpec,
) -> Result<PropagationResult> {
    pulse.validate()?;
    m.validate()?;
    grid.validate(pulse)?;

    let n = grid.samples;
    let d_omega = 2.0 * grid.span / n as f64;
    let dt = 2.0 * std::f64::consts::PI / (2.0 * grid.span);
    let t0 = -(n as f64) / 2.0 * dt;

    let amp = if pulse.photons > 0.0 {
        // int |A exp(-t^2/4tp^2)|^2 dt = A^2 tp sqrt(2 pi) = photons
        (pulse.photons / (pulse.t_p * (2.0 * std::f64::consts::PI).sqrt())).sqrt()
    } else {
        1.0
    };

    let time: Vec<f64> = (0..n).map(|k| t0 + k as f64 * dt).collect();
    let envelope_in: Vec<Complex64> = time
        .iter()
        .map(|&t| Complex64::new(amp * (-t * t / (4.0 * pulse.t_p * pulse.t_p)).exp(), 0.0))
        .collect();

    // Forward transform with the e^{+i omega t} kernel is the unnormalized
    // inverse DFT; the return trip uses the forward DFT divided by n.
    let mut planner = FftPlanner::new();
    let mut spectrum = envelope_in.clone();
    planner.plan_fft_inverse(n).process(&mut spectrum);

    for (k, s) in spectrum.iter_mut().enumerate() {
        let omega = if k < n / 2 {
            k as f64 * d_omega
        } else {
            (k as f64 - n as f64) * d_omega
        };
        let f = complex_response(omega, pulse.delta_probe, m)?;
        *s *= (Complex64::new(0.0, 0.5 * m.od) * f).exp();
    }

    let mut envelope_out = spectrum;
    planner.plan_fft_forward(n).process(&mut envelope_out);
    for s in envelope_out.iter_mut() {
        *s /= n as f64;
    }

    let energy_in: f64 = envelope_in.iter().map(|e| e.norm_sqr()).sum();
    let energy_out: f64 = envelope_out.iter().map(|e| e.norm_sqr()).sum();
    let transmission = energy_out / energy_in;

    // Aliasing guard: energy within 3 samples of either time edge.
    let edge_energy: f64 = envelope_out[..3]
        .iter()
        .chain(envelope_out[n - 3..].iter())
        .map(|e| e.norm_sqr())
        .sum();
    if energy_out > 0.0 && edge_energy / energy_out > 1e-6 {
        return Err(Error::GridTooSmall {
            edge_fraction: edge_energy / energy_out,
        });
    }

    let est = extract_delay(&time, &envelope_in, &envelope_out)?;

    Ok(PropagationResult {
        transmission,
        delay: est.peak,
        centroid_delay: est.centroid,
        time,
        envelope_out,
        envelope_in,
        grid_meta: GridMeta {
            samples: n,
            omega_span: grid.span,
            omega_step: d_omega,
            time_step: dt,
            time_span: n as f64 * dt,
        },
    })
}

/// Delay estimates produced by [`extract_delay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEstimate {
    /// Peak-to-peak delay with parabolic sub-sample interpolation (s).
    pub peak: f64,
    /// Difference of the |E|^2 energy centroids (s).
    pub centroid: f64,
}

/// Peak-to-peak (and centroid) delay between two envelopes on a shared
/// time grid.
pub fn extract_delay(
    time: &[f64],
    envelope_in: &[Complex64],
    envelope_out: &[Complex64],
) -> Result<DelayEstimate> {
    if time.len() != envelope_in.len() || time.len() != envelope_out.len() || time.len() < 3 {
        return Err(Error::DegenerateEnvelope(
            "envelopes and time grid must share a length >= 3".into(),
        ));
    }
    let t_in = peak_time(time, envelope_in)?;
    let t_out = peak_time(time, envelope_out)?;
    let c_in = centroid_time(time, envelope_in)?;
    let c_out = centroid_time(time, envelope_out)?;
    Ok(DelayEstimate {
        peak: t_out - t_in,
        centroid: c_out - c_in,
    })
}

fn peak_time(time: &[f64], env: &[Complex64]) -> Result<f64> {
    let power: Vec<f64> = env.iter().map(|e| e.norm_sqr()).collect();
    let (imax, &pmax) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let pmin = power.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(pmax > 0.0) || (pmax - pmin) <= 1e-9 * pmax {
        return Err(Error::DegenerateEnvelope("flat envelope, no peak".into()));
    }
    // flag competing local maxima of comparable height away from the peak
    for i in 1..power.len() - 1 {
        if power[i] > power[i - 1]
            && power[i] > power[i + 1]
            && power[i] > 0.999 * pmax
            && (i as i64 - imax as i64).unsigned_abs() > 3
        {
            return Err(Error::DegenerateEnvelope(
                "multiple peaks of comparable height".into(),
            ));
        }
    }
    if imax == 0 || imax == power.len() - 1 {
        return Ok(time[imax]);
    }
    // Parabolic interpolation around the maximum, on log power when the
    // neighbors are strictly positive (exact for Gaussian envelopes).
    let (ym, y0, yp) = if power[imax - 1] > 0.0 && power[imax + 1] > 0.0 {
        (power[imax - 1].ln(), power[imax].ln(), power[imax + 1].ln())
    } else {
        (power[imax - 1], power[imax], power[imax + 1])
    };
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom.abs() > 0.0 {
        0.5 * (ym - yp) / denom
    } else {
        0.0
    };
    let dt = time[1] - time[0];
    Ok(time[imax] + shift.clamp(-0.5, 0.5) * dt)
}

fn centroid_time(time: &[f64], env: &[Complex64]) -> Result<f64> {
    let mut w = 0.0;
    let mut s = 0.0;
    for (&t, e) in time.iter().zip(env) {
        let p = e.norm_sqr();
        w += p;
        s += p * t;
    }
    if !(w > 0.0) {
        return Err(Error::DegenerateEnvelope("zero-energy envelope".into()));
    }
    Ok(s / w)
}

/// Transmission integral: sqrt(2/pi) t_p * int dw exp(-2 t_p^2 w^2)
/// exp(-OD Im f(w)), by adaptive quadrature to relative 1e-8.
pub fn pulse_transmission(pulse: &PulseSpec, m: &MediumParams) -> Result<f64> {
    pulse.validate()?;
    m.validate()?;
    let tp = pulse.t_p;
    let integrand = |w: f64| -> f64 {
        let f = complex_response(w, pulse.delta_probe, m).expect("validated medium");
        (-2.0 * tp * tp * w * w).exp() * (-m.od * f.im).exp()
    };
    let span = 8.0 / tp;
    let v = quadrature::integrate(&integrand, -span, span, 1e-8, 64)?;
    Ok(((2.0 / std::f64::consts::PI).sqrt() * tp * v).min(1.0))
}

/// Closed-form resonant transmission:
///
/// ```text
/// T = exp(-n_s (mu_s/mu_p)^2 (3/pi)(lambda^2/A) t_d/(sqrt(2) t_p + t_d))
///     / sqrt(1 + 8 t_d^2 / (od t_p^2))
/// ```
pub fn closed_form_transmission(
    n_s: f64,
    t_p: f64,
    t_d: f64,
    od: f64,
    geom: &Geometry,
) -> Result<f64> {
    geom.validate()?;
    if !(n_s >= 0.0) {
        return Err(Error::InvalidParameter("n_s must be >= 0".into()));
    }
    if !(t_p > 0.0) {
        return Err(Error::InvalidParameter("t_p must be > 0".into()));
    }
    if !(t_d >= 0.0) {
        return Err(Error::InvalidParameter("t_d must be >= 0".into()));
    }
    if !(od > 0.0) {
        return Err(Error::InvalidParameter("od must be > 0".into()));
    }
    let lam_sq_over_a = geom.wavelength * geom.wavelength / geom.area();
    let exponent = n_s
        * geom.dipole_ratio.powi(2)
        * (3.0 / std::f64::consts::PI)
        * lam_sq_over_a
        * t_d
        / (std::f64::consts::SQRT_2 * t_p + t_d);
    let bandwidth = (1.0 + 8.0 * t_d * t_d / (od * t_p * t_p)).sqrt();
    Ok((-exponent).exp() / bandwidth)
}

/// Photon count at which the closed-form exponential factor drops the
/// transmission to `target` times its n_s = 0 value:
///
/// n_s = -ln(target) (mu_p/mu_s)^2 (pi/3)(A/lambda^2)(sqrt(2) t_p + t_d)/t_d
pub fn switch_threshold(
    target: f64,
    t_p: f64,
    t_d: f64,
    od: f64,
    geom: &Geometry,
) -> Result<f64> {
    geom.validate()?;
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidParameter("target must be in (0, 1]".into()));
    }
    if !(od > 0.0) {
        return Err(Error::InvalidParameter("od must be > 0".into()));
    }
    if !(t_p > 0.0) {
        return Err(Error::InvalidParameter("t_p must be > 0".into()));
    }
    if !(t_d > 0.0) {
        return Err(Error::InvalidParameter(
            "t_d must be > 0 (no switching without slow light)".into(),
        ));
    }
    if !(geom.dipole_ratio > 0.0) {
        return Err(Error::InvalidParameter(
            "dipole_ratio must be > 0 to invert the switch exponent".into(),
        ));
    }
    let a_over_lam_sq = geom.area() / (geom.wavelength * geom.wavelength);
    Ok(-target.ln()
        * geom.dipole_ratio.powi(-2)
        * (std::f64::consts::PI / 3.0)
        * a_over_lam_sq
        * (std::f64::consts::SQRT_2 * t_p + t_d)
        / t_d)
}
