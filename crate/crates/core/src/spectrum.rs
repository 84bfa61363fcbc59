//! Sampled transmission-vs-detuning spectra and their CSV representation.
//!
//! CSV schema: header `detuning_hz,transmission,stderr`, one row per point.
//! Detunings inside the library are angular (rad/s); the CSV column is in
//! ordinary Hz, converted at the I/O boundary.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Which transmission model generated / should fit the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Free: od.
    TwoLevel,
    /// Free: od, rabi_c_sq, gamma12.
    Eit,
    /// Free: od, rabi_c_sq, gamma12, rabi_s_sq.
    NScheme,
}

impl ModelKind {
    pub fn free_parameter_count(self) -> usize {
        match self {
            ModelKind::TwoLevel => 1,
            ModelKind::Eit => 3,
            ModelKind::NScheme => 4,
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::TwoLevel => &["od"],
            ModelKind::Eit => &["od", "rabi_c_sq", "gamma12"],
            ModelKind::NScheme => &["od", "rabi_c_sq", "gamma12", "rabi_s_sq"],
        }
    }
}

/// One measured point: (detuning rad/s, transmission, standard error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub detuning: f64,
    pub transmission: f64,
    pub stderr: f64,
}

/// A transmission spectrum plus the metadata the fit model needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub points: Vec<SpectrumPoint>,
    /// rms probe pulse width used when the spectrum was taken (s).
    pub t_p: f64,
    pub model: ModelKind,
}

impl Spectrum {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_p > 0.0) {
            return Err(Error::InvalidParameter("t_p must be > 0".into()));
        }
        if self.points.len() < 8 * self.model.free_parameter_count() {
            return Err(Error::InvalidParameter(format!(
                "need >= {} points for {} free parameters, have {}",
                8 * self.model.free_parameter_count(),
                self.model.free_parameter_count(),
                self.points.len()
            )));
        }
        for w in self.points.windows(2) {
            if !(w[1].detuning > w[0].detuning) {
                return Err(Error::InvalidParameter(
                    "detunings must be strictly increasing".into(),
                ));
            }
        }
        for p in &self.points {
            if !(p.stderr >= 0.0) || !p.stderr.is_finite() {
                return Err(Error::InvalidParameter("stderr must be >= 0".into()));
            }
            if !(p.transmission >= 0.0 && p.transmission <= 1.0 + 5.0 * p.stderr) {
                return Err(Error::InvalidParameter(format!(
                    "transmission {} outside [0, 1 + 5 stderr]",
                    p.transmission
                )));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "detuning_hz,transmission,stderr")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{}",
                p.detuning / (2.0 * std::f64::consts::PI),
                p.transmission,
                p.stderr
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    /// Parse the CSV schema. `t_p` and `model` are not stored in the CSV
    /// and must be supplied by the caller.
    pub fn load_csv(path: &Path, t_p: f64, model: ModelKind) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, t_p, model)
    }

    pub fn parse_csv(text: &str, t_p: f64, model: ModelKind) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty spectrum CSV".into()))?;
        if header.trim() != "detuning_hz,transmission,stderr" {
            return Err(Error::Config(format!(
                "expected header 'detuning_hz,transmission,stderr', got '{header}'"
            )));
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Config(format!("row {}: expected 3 columns", i + 2)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("row {}: {e}", i + 2)))
            };
            points.push(SpectrumPoint {
                detuning: parse(cols[0])? * 2.0 * std::f64::consts::PI,
                transmission: parse(cols[1])?,
                stderr: parse(cols[2])?,
            });
        }
        let s = Spectrum { points, t_p, model };
        s.validate()?;
        Ok(s)
    }
}
