//! Dipole-trap broadened absorption profiles.
//!
//! Atoms trapped in a red-detuned Gaussian-beam potential see a radially
//! varying AC-Stark shift of the probe transition. The observed profile is
//! the natural Lorentzian exponent kernel averaged over the radial thermal
//! density, exponentiated with the optical depth. Modulated probing
//! (`trap_on = false`) removes the shift entirely.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::response::natural_line_transmission;

/// Dipole trap and ensemble parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// Peak differential AC-Stark shift at r = 0 (rad/s).
    pub delta_ac_max: f64,
    /// Trap beam waist w0 (m).
    pub waist: f64,
    /// Trap depth (K), informational and used for the Boltzmann weight.
    pub depth: f64,
    /// Ensemble temperature (K).
    pub temperature: f64,
    /// False models synchronous trap/probe modulation (no shift).
    pub trap_on: bool,
}

impl TrapSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0) || !self.waist.is_finite() {
            return Err(Error::InvalidParameter("waist must be > 0".into()));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::InvalidParameter("temperature must be >= 0".into()));
        }
        if !(self.depth >= 0.0) || !self.depth.is_finite() {
            return Err(Error::InvalidParameter("depth must be >= 0".into()));
        }
        if !self.delta_ac_max.is_finite() {
            return Err(Error::InvalidParameter("delta_ac_max must be finite".into()));
        }
        Ok(())
    }
}

/// AC-Stark shift at radius r: delta_ac_max * exp(-2 r^2 / w0^2).
pub fn ac_stark_shift(r: f64, trap: &TrapSpec) -> Result<f64> {
    trap.validate()?;
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter("r must be >= 0".into()));
    }
    Ok(trap.delta_ac_max * (-2.0 * r * r / (trap.waist * trap.waist)).exp())
}

/// Lorentzian exponent kernel of the natural line: L = 1/(1 + 4 (d/Ge)^2).
fn lorentz_kernel(delta: f64, gamma_e: f64) -> f64 {
    let x = delta / gamma_e;
    1.0 / (1.0 + 4.0 * x * x)
}

/// Relative radial Boltzmann weight in the Gaussian potential
/// U(r) = -U0 exp(-2 r^2 / w0^2), normalized to 1 at r = 0 to keep the
/// exponent bounded. Includes the 2D area element r.
fn radial_weight(r: f64, beta: f64, waist: f64) -> f64 {
    r * (beta * ((-2.0 * r * r / (waist * waist)).exp() - 1.0)).exp()
}

/// Trap-broadened transmission profile on a detuning grid.
///
/// With the trap on, T(d) = exp(-od * <L(d - shift(r))>) where the average
/// runs over the radial Boltzmann density truncated at r = 2 w0. With the
/// trap off (modulated probing) the natural profile is returned.
pub fn broadened_profile(
    detunings: &[f64],
    od: f64,
    gamma_e: f64,
    trap: &TrapSpec,
) -> Result<Vec<f64>> {
    trap.validate()?;
    if !(od >= 0.0) {
        return Err(Error::InvalidParameter("od must be >= 0".into()));
    }
    if !(gamma_e > 0.0) {
        return Err(Error::InvalidParameter("gamma_e must be > 0".into()));
    }
    if !trap.trap_on || trap.delta_ac_max == 0.0 {
        return detunings
            .iter()
            .map(|&d| natural_line_transmission(d, od, gamma_e))
            .collect();
    }
    if trap.temperature == 0.0 {
        // all atoms at the trap center: rigid shift by delta_ac_max
        return detunings
            .iter()
            .map(|&d| natural_line_transmission(d - trap.delta_ac_max, od, gamma_e))
            .collect();
    }
    let beta = trap.depth / trap.temperature;
    let r_max = 2.0 * trap.waist;
    let norm = quadrature::integrate(&|r| radial_weight(r, beta, trap.waist), 0.0, r_max, 1e-9, 64)?;
    detunings
        .iter()
        .map(|&d| {
            let avg = quadrature::integrate(
                &|r| {
                    let shift =
                        trap.delta_ac_max * (-2.0 * r * r / (trap.waist * trap.waist)).exp();
                    radial_weight(r, beta, trap.waist) * lorentz_kernel(d - shift, gamma_e)
                },
                0.0,
                r_max,
                1e-8,
                64,
            )? / norm;
            Ok((-od * avg).exp())
        })
        .collect()
}

/// Monte-Carlo oracle for [`broadened_profile`]: samples atom radii from
/// the same truncated Boltzmann density by inverse-CDF lookup and averages
/// the Lorentzian kernel.
pub fn broadened_profile_mc(
    detunings: &[f64],
    od: f64,
    gamma_e: f64,
    trap: &TrapSpec,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    trap.validate()?;
    if !(od >= 0.0) || !(gamma_e > 0.0) {
        return Err(Error::InvalidParameter("od >= 0, gamma_e > 0 required".into()));
    }
    if !trap.trap_on || trap.delta_ac_max == 0.0 || trap.temperature == 0.0 {
        return broadened_profile(detunings, od, gamma_e, trap);
    }
    let beta = trap.depth / trap.temperature;
    let r_max = 2.0 * trap.waist;

    // tabulated inverse CDF of the radial density
    let table = 1 << 15;
    let dr = r_max / table as f64;
    let mut cdf = Vec::with_capacity(table + 1);
    cdf.push(0.0);
    let mut acc = 0.0;
    let mut prev = radial_weight(0.0, beta, trap.waist);
    for i in 1..=table {
        let w = radial_weight(i as f64 * dr, beta, trap.waist);
        acc += 0.5 * (prev + w) * dr;
        cdf.push(acc);
        prev = w;
    }
    let total = *cdf.last().unwrap();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sums = vec![0.0_f64; detunings.len()];
    for _ in 0..samples {
        let u = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < u).max(1);
        let (c0, c1) = (cdf[idx - 1], cdf[idx]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        let r = (idx as f64 - 1.0 + frac) * dr;
        let shift = trap.delta_ac_max * (-2.0 * r * r / (trap.waist * trap.waist)).exp();
        for (s, &d) in sums.iter_mut().zip(detunings) {
            *s += lorentz_kernel(d - shift, gamma_e);
        }
    }
    Ok(sums
        .into_iter()
        .map(|s| (-od * s / samples as f64).exp())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_e() -> f64 {
        2.0 * std::f64::consts::PI * 5.746e6
    }

    fn trap() -> TrapSpec {
        TrapSpec {
            delta_ac_max: 2.0 * std::f64::consts::PI * 30e6,
            waist: 1.9e-6,
            depth: 10e-3,
            temperature: 1e-3,
            trap_on: true,
        }
    }

    #[test]
    fn stark_shift_profile() {
        let t = trap();
        assert_eq!(ac_stark_shift(0.0, &t).unwrap(), t.delta_ac_max);
        let at_waist = ac_stark_shift(t.waist, &t).unwrap();
        assert!((at_waist / t.delta_ac_max - (-2.0_f64).exp()).abs() < 1e-12);
        let mut off = t;
        off.delta_ac_max = 0.0;
        for r in [0.0, 0.5e-6, 3e-6] {
            assert_eq!(ac_stark_shift(r, &off).unwrap(), 0.0);
        }
    }

    #[test]
    fn no_shift_reduces_to_natural_profile() {
        let mut t = trap();
        t.delta_ac_max = 0.0;
        let grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5 * gamma_e()).collect();
        let prof = broadened_profile(&grid, 30.0, gamma_e(), &t).unwrap();
        for (&d, &p) in grid.iter().zip(&prof) {
            let nat = natural_line_transmission(d, 30.0, gamma_e()).unwrap();
            assert!((p - nat).abs() < 1e-15);
        }
    }

    #[test]
    fn trap_off_returns_unshifted_profile() {
        let mut t = trap();
        t.trap_on = false;
        let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * gamma_e()).collect();
        let prof = broadened_profile(&grid, 30.0, gamma_e(), &t).unwrap();
        for (&d, &p) in grid.iter().zip(&prof) {
            let nat = natural_line_transmission(d, 30.0, gamma_e()).unwrap();
            assert_eq!(p, nat);
        }
    }

    #[test]
    fn zero_temperature_is_rigid_shift() {
        let mut t = trap();
        t.temperature = 0.0;
        let grid: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.5 * gamma_e()).collect();
        let prof = broadened_profile(&grid, 30.0, gamma_e(), &t).unwrap();
        for (&d, &p) in grid.iter().zip(&prof) {
            let shifted = natural_line_transmission(d - t.delta_ac_max, 30.0, gamma_e()).unwrap();
            assert!((p - shifted).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_minimum_tracks_shift_and_width_grows() {
        let gamma_e = gamma_e();
        let grid: Vec<f64> = (-200..=600)
            .map(|i| i as f64 * 0.05 * gamma_e)
            .collect();
        let min_pos = |prof: &[f64]| {
            let i = prof
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            grid[i]
        };
        let mut t = trap();
        t.temperature = 0.2e-3; // cold: atoms concentrated near the peak shift
        let p1 = broadened_profile(&grid, 10.0, gamma_e, &t).unwrap();
        let mut t2 = t;
        t2.delta_ac_max = 2.0 * t.delta_ac_max;
        let p2 = broadened_profile(&grid, 10.0, gamma_e, &t2).unwrap();
        assert!(min_pos(&p2) > min_pos(&p1));

        // width of -ln T grows with temperature
        let fwhm = |prof: &[f64]| {
            let logt: Vec<f64> = prof.iter().map(|&v| -v.ln()).collect();
            let max = logt.iter().cloned().fold(0.0, f64::max);
            let above = logt.iter().filter(|&&v| v > 0.5 * max).count();
            above as f64
        };
        let mut hot = t;
        hot.temperature = 5e-3;
        let ph = broadened_profile(&grid, 10.0, gamma_e, &hot).unwrap();
        assert!(fwhm(&ph) >= fwhm(&p1));
    }

    #[test]
    fn quadrature_matches_monte_carlo() {
        let t = trap();
        let gamma_e = gamma_e();
        let probe: Vec<f64> = vec![-2.0, 0.0, 2.0, 5.0, 8.0]
            .into_iter()
            .map(|x| x * gamma_e)
            .collect();
        let quad = broadened_profile(&probe, 10.0, gamma_e, &t).unwrap();
        let mc = broadened_profile_mc(&probe, 10.0, gamma_e, &t, 1_000_000, 42).unwrap();
        for (q, m) in quad.iter().zip(&mc) {
            assert!((q - m).abs() / q < 0.01, "quad {q} vs mc {m}");
        }
    }
}
