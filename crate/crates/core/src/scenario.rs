//! Config-driven scenario runner: reproduces each figure's model content,
//! runs parameter sweeps, and simulates the switch truth table with photon
//! counting noise. Outputs are CSV data plus a self-contained SVG plot and
//! a manifest, all byte-deterministic for a fixed config and seed.
//!
//! Seeding scheme: every randomized sub-task draws from a ChaCha12 stream
//! seeded with the root seed; independent sub-tasks (truth-table rows,
//! sweep points) use `set_stream(counter)` with a documented counter so
//! parallel execution cannot reorder random draws.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::incoherent::{probe_transmission_incoherent, TransferModel};
use crate::photometry::{rabi_sq_from_photons, Geometry};
use crate::pulse::{propagate_pulse, pulse_transmission, GridSpec, PulseSpec};
use crate::response::{analytic_group_delay, DelayConvention, MediumParams};
use crate::svg::{line_plot, Series};
use crate::trap::{broadened_profile, TrapSpec};

pub const CONFIG_VERSION: u32 = 1;

pub const SWEEP_AXES: &[&str] = &[
    "n_pump",
    "control_photons",
    "switch_photons",
    "od",
    "t_p",
    "delta_p",
];

/// Declarative description of one figure-reproduction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub id: String,
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_eta")]
    pub detection_efficiency: f64,
}

fn default_eta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScenarioKind {
    /// Dipole-trap broadened absorption profile (trap on) next to the
    /// modulated-probe natural profile (trap off).
    TrapProfile {
        od: f64,
        trap: TrapSpec,
        /// Detuning grid half-span (rad/s), centered on the bare resonance.
        span: f64,
        points: usize,
    },
    /// Probe transmission vs pump photon number for the incoherent switch.
    IncoherentSweep {
        transfer: TransferModel,
        max_pump: f64,
        points: usize,
    },
    /// Probe spectra without and with the control field.
    EitSpectrum {
        medium: MediumParams,
        t_p: f64,
        span: f64,
        points: usize,
    },
    /// EIT spectra without and with the switch field (the medium's
    /// rabi_s_sq is the switched curve).
    SwitchSpectrum {
        medium: MediumParams,
        t_p: f64,
        span: f64,
        points: usize,
    },
    /// Reference and delayed pulse envelopes.
    PulseShapes { medium: MediumParams, t_p: f64 },
    /// Resonant transmission vs control photon number.
    ControlSweep {
        od: f64,
        gamma12: f64,
        t_p: f64,
        control_duration: f64,
        max_photons: f64,
        points: usize,
    },
    /// Normalized transmission vs switch photon number.
    SwitchSweep {
        medium: MediumParams,
        t_p: f64,
        max_photons: f64,
        points: usize,
    },
    /// Photon-counting truth table at a configured switch attenuation.
    TruthTable {
        medium: MediumParams,
        t_p: f64,
        probe_photons: f64,
        /// Multiplies the EIT transmission for the switch-on rows.
        switch_attenuation: f64,
        #[serde(default)]
        background: f64,
        trials: u32,
    },
    /// Generic sweep of a recognized parameter through the pulse pipeline.
    Sweep {
        axis: String,
        start: f64,
        stop: f64,
        points: usize,
        medium: MediumParams,
        t_p: f64,
        #[serde(default)]
        transfer: Option<TransferModel>,
        #[serde(default)]
        control_duration: Option<f64>,
    },
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if !(self.detection_efficiency > 0.0 && self.detection_efficiency <= 1.0) {
            return Err(Error::Config(
                "detection_efficiency must be in (0, 1]".into(),
            ));
        }
        match &self.scenario {
            ScenarioKind::TrapProfile {
                od, trap, span, points,
            } => {
                trap.validate()?;
                require(*od >= 0.0, "od must be >= 0")?;
                require(*span > 0.0, "span must be > 0")?;
                require(*points >= 2, "points must be >= 2")?;
            }
            ScenarioKind::IncoherentSweep {
                transfer, max_pump, points,
            } => {
                transfer.validate()?;
                require(*max_pump > 0.0, "max_pump must be > 0")?;
                require(*points >= 2, "points must be >= 2")?;
            }
            ScenarioKind::EitSpectrum {
                medium, t_p, span, points,
            }
            | ScenarioKind::SwitchSpectrum {
                medium, t_p, span, points,
            } => {
                medium.validate()?;
                require(*t_p > 0.0, "t_p must be > 0")?;
                require(*span > 0.0, "span must be > 0")?;
                require(*points >= 2, "points must be >= 2")?;
            }
            ScenarioKind::PulseShapes { medium, t_p } => {
                medium.validate()?;
                require(*t_p > 0.0, "t_p must be > 0")?;
            }
            ScenarioKind::ControlSweep {
                od,
                gamma12,
                t_p,
                control_duration,
                max_photons,
                points,
            } => {
                require(*od >= 0.0, "od must be >= 0")?;
                require(*gamma12 >= 0.0, "gamma12 must be >= 0")?;
                require(*t_p > 0.0, "t_p must be > 0")?;
                require(*control_duration > 0.0, "control_duration must be > 0")?;
                require(*max_photons > 0.0, "max_photons must be > 0")?;
                require(*points >= 2, "points must be >= 2")?;
            }
            ScenarioKind::SwitchSweep {
                medium, t_p, max_photons, points,
            } => {
                medium.validate()?;
                require(medium.rabi_c_sq > 0.0, "switch sweep needs a control field")?;
                require(*t_p > 0.0, "t_p must be > 0")?;
                require(*max_photons > 0.0, "max_photons must be > 0")?;
                require(*points >= 2, "points must be >= 2")?;
            }
            ScenarioKind::TruthTable {
                medium,
                t_p,
                probe_photons,
                switch_attenuation,
                background,
                trials,
            } => {
                medium.validate()?;
                require(*t_p > 0.0, "t_p must be > 0")?;
                require(*probe_photons >= 0.0, "probe_photons must be >= 0")?;
                require(
                    *switch_attenuation > 0.0 && *switch_attenuation <= 1.0,
                    "switch_attenuation must be in (0, 1]",
                )?;
                require(*background >= 0.0, "background must be >= 0")?;
                require(*trials >= 1, "trials must be >= 1")?;
                if self.seed.is_none() {
                    return Err(Error::Config(
                        "seed is required when noise is on (truth-table trials)".into(),
                    ));
                }
            }
            ScenarioKind::Sweep {
                axis,
                start,
                stop,
                points,
                medium,
                t_p,
                transfer,
                control_duration,
            } => {
                if !SWEEP_AXES.contains(&axis.as_str()) {
                    return Err(Error::UnknownAxis {
                        axis: axis.clone(),
                        valid: SWEEP_AXES.join(", "),
                    });
                }
                medium.validate()?;
                require(*t_p > 0.0, "t_p must be > 0")?;
                require(*points >= 1, "sweep range must be nonempty")?;
                require(stop >= start, "stop must be >= start")?;
                if axis == "n_pump" && transfer.is_none() {
                    return Err(Error::Config("n_pump sweep needs a transfer model".into()));
                }
                if axis == "control_photons" && control_duration.is_none() {
                    return Err(Error::Config(
                        "control_photons sweep needs control_duration".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg.into()))
    }
}

/// One row of the switch truth table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TruthRow {
    pub probe_on: bool,
    pub switch_on: bool,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthTable {
    pub rows: [TruthRow; 4],
}

/// In-memory tabular result of a scenario run.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub x_label: &'static str,
    pub y_label: &'static str,
    /// Extra metadata recorded in the manifest.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_svg(&self, title: &str) -> String {
        let x: Vec<f64> = self.rows.iter().map(|r| r[0]).collect();
        let colors = ["#1a1a1a", "#c62828", "#1565c0", "#2e7d32"];
        let columns: Vec<Vec<f64>> = (1..self.headers.len())
            .map(|c| self.rows.iter().map(|r| r[c]).collect())
            .collect();
        let series: Vec<Series> = columns
            .iter()
            .enumerate()
            .map(|(i, y)| Series {
                label: self.headers[i + 1],
                x: &x,
                y,
                color: colors[i % colors.len()],
            })
            .collect();
        line_plot(title, self.x_label, self.y_label, &series)
    }
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

const HZ: f64 = 1.0 / (2.0 * std::f64::consts::PI);

/// Evaluate a scenario into a table. Pure given (config, constants); all
/// randomness is derived from the config seed.
pub fn evaluate_scenario(config: &ScenarioConfig, constants: &Constants) -> Result<Table> {
    config.validate()?;
    constants.validate()?;
    let geom = Geometry::new(constants.wavelength, constants.waist, constants.dipole_ratio)?;
    match &config.scenario {
        ScenarioKind::TrapProfile {
            od, trap, span, points,
        } => {
            let grid = linspace(-span, *span, *points);
            let on = broadened_profile(&grid, *od, constants.gamma_e, trap)?;
            let mut off_spec = *trap;
            off_spec.trap_on = false;
            let off = broadened_profile(&grid, *od, constants.gamma_e, &off_spec)?;
            Ok(Table {
                headers: vec!["detuning_hz", "t_trap_on", "t_trap_off"],
                rows: grid
                    .iter()
                    .zip(on.iter().zip(&off))
                    .map(|(&d, (&a, &b))| vec![d * HZ, a, b])
                    .collect(),
                x_label: "probe detuning (Hz)",
                y_label: "transmission",
                notes: vec![],
            })
        }
        ScenarioKind::IncoherentSweep {
            transfer, max_pump, points,
        } => {
            let grid = linspace(0.0, *max_pump, *points);
            let rows = grid
                .iter()
                .map(|&n| Ok(vec![n, probe_transmission_incoherent(n, transfer)?]))
                .collect::<Result<_>>()?;
            Ok(Table {
                headers: vec!["n_pump", "transmission"],
                rows,
                x_label: "pump photons",
                y_label: "probe transmission",
                notes: vec![],
            })
        }
        ScenarioKind::EitSpectrum {
            medium, t_p, span, points,
        } => {
            let grid = linspace(-span, *span, *points);
            let bare = MediumParams::two_level(medium.od, medium.gamma13);
            let mut eit = *medium;
            eit.rabi_s_sq = 0.0;
            let rows = spectrum_rows(&grid, *t_p, &[bare, eit])?;
            Ok(Table {
                headers: vec!["detuning_hz", "t_no_control", "t_eit"],
                rows,
                x_label: "probe detuning (Hz)",
                y_label: "transmission",
                notes: vec![],
            })
        }
        ScenarioKind::SwitchSpectrum {
            medium, t_p, span, points,
        } => {
            let grid = linspace(-span, *span, *points);
            let mut eit = *medium;
            eit.rabi_s_sq = 0.0;
            let rows = spectrum_rows(&grid, *t_p, &[eit, *medium])?;
            Ok(Table {
                headers: vec!["detuning_hz", "t_eit", "t_switched"],
                rows,
                x_label: "probe detuning (Hz)",
                y_label: "transmission",
                notes: vec![],
            })
        }
        ScenarioKind::PulseShapes { medium, t_p } => {
            let pulse = PulseSpec::resonant(*t_p);
            let grid = GridSpec {
                span: 64.0 / t_p,
                samples: 32768,
            };
            let reference = propagate_pulse(&pulse, &MediumParams::two_level(0.0, medium.gamma13), &grid)?;
            let eit = propagate_pulse(&pulse, medium, &grid)?;
            let window = 12.0 * t_p;
            let rows: Vec<Vec<f64>> = reference
                .time
                .iter()
                .enumerate()
                .filter(|(_, &t)| t.abs() <= window)
                .map(|(i, &t)| {
                    vec![
                        t,
                        reference.envelope_out[i].norm_sqr(),
                        eit.envelope_out[i].norm_sqr(),
                    ]
                })
                .collect();
            Ok(Table {
                headers: vec!["time_s", "p_reference", "p_eit"],
                rows,
                x_label: "time (s)",
                y_label: "|envelope|^2",
                notes: vec![
                    ("peak_delay_s".into(), format!("{}", eit.delay)),
                    ("centroid_delay_s".into(), format!("{}", eit.centroid_delay)),
                    ("transmission".into(), format!("{}", eit.transmission)),
                    ("grid_samples".into(), format!("{}", eit.grid_meta.samples)),
                    ("grid_omega_span".into(), format!("{}", eit.grid_meta.omega_span)),
                ],
            })
        }
        ScenarioKind::ControlSweep {
            od,
            gamma12,
            t_p,
            control_duration,
            max_photons,
            points,
        } => {
            let gamma13 = constants.gamma13();
            let grid = linspace(0.0, *max_photons, *points);
            let rows: Vec<Vec<f64>> = grid
                .par_iter()
                .map(|&n| -> Result<Vec<f64>> {
                    let rabi_c_sq = if n > 0.0 {
                        rabi_sq_from_photons(n, *control_duration, &geom, gamma13, 1.0)?
                    } else {
                        0.0
                    };
                    let m = MediumParams {
                        od: *od,
                        gamma13,
                        gamma12: *gamma12,
                        gamma24: gamma13,
                        rabi_c_sq,
                        rabi_s_sq: 0.0,
                    };
                    Ok(vec![n, pulse_transmission(&PulseSpec::resonant(*t_p), &m)?])
                })
                .collect::<Result<_>>()?;
            Ok(Table {
                headers: vec!["control_photons", "transmission"],
                rows,
                x_label: "control photons per pulse",
                y_label: "resonant transmission",
                notes: vec![],
            })
        }
        ScenarioKind::SwitchSweep {
            medium, t_p, max_photons, points,
        } => {
            let mut eit = *medium;
            eit.rabi_s_sq = 0.0;
            let t_d = analytic_group_delay(
                &MediumParams { gamma12: 0.0, ..eit },
                DelayConvention::Text,
            )?;
            let duration = std::f64::consts::SQRT_2 * t_p + t_d;
            let t0 = pulse_transmission(&PulseSpec::resonant(*t_p), &eit)?;
            let grid = linspace(0.0, *max_photons, *points);
            let rows: Vec<Vec<f64>> = grid
                .par_iter()
                .map(|&n| -> Result<Vec<f64>> {
                    let mut m = eit;
                    m.rabi_s_sq = rabi_sq_from_photons(
                        n,
                        duration,
                        &geom,
                        m.gamma24,
                        geom.dipole_ratio,
                    )?;
                    let t = pulse_transmission(&PulseSpec::resonant(*t_p), &m)?;
                    Ok(vec![n, t / t0])
                })
                .collect::<Result<_>>()?;
            Ok(Table {
                headers: vec!["switch_photons", "transmission_normalized"],
                rows,
                x_label: "switch photons per pulse",
                y_label: "T / T(0)",
                notes: vec![
                    ("t_d_text_s".into(), format!("{t_d}")),
                    ("effective_duration_s".into(), format!("{duration}")),
                    ("t_eit".into(), format!("{t0}")),
                ],
            })
        }
        ScenarioKind::TruthTable { .. } => {
            let table = truth_table(config, constants, None)?;
            Ok(Table {
                headers: vec!["probe_on", "switch_on", "mean_detected", "std_detected"],
                rows: table
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.probe_on as u8 as f64,
                            r.switch_on as u8 as f64,
                            r.mean,
                            r.std,
                        ]
                    })
                    .collect(),
                x_label: "probe on",
                y_label: "detected photons",
                notes: vec![],
            })
        }
        ScenarioKind::Sweep {
            axis,
            start,
            stop,
            points,
            medium,
            t_p,
            transfer,
            control_duration,
        } => {
            let gamma13 = medium.gamma13;
            let grid = linspace(*start, *stop, *points);
            let mut rows: Vec<Vec<f64>> = grid
                .par_iter()
                .map(|&v| -> Result<Vec<f64>> {
                    let value = match axis.as_str() {
                        "n_pump" => {
                            probe_transmission_incoherent(v, transfer.as_ref().unwrap())?
                        }
                        "control_photons" => {
                            let mut m = *medium;
                            m.rabi_c_sq = if v > 0.0 {
                                rabi_sq_from_photons(
                                    v,
                                    control_duration.unwrap(),
                                    &geom,
                                    gamma13,
                                    1.0,
                                )?
                            } else {
                                0.0
                            };
                            pulse_transmission(&PulseSpec::resonant(*t_p), &m)?
                        }
                        "switch_photons" => {
                            let mut eit = *medium;
                            eit.rabi_s_sq = 0.0;
                            let t_d = analytic_group_delay(
                                &MediumParams { gamma12: 0.0, ..eit },
                                DelayConvention::Text,
                            )?;
                            let mut m = eit;
                            m.rabi_s_sq = rabi_sq_from_photons(
                                v,
                                std::f64::consts::SQRT_2 * t_p + t_d,
                                &geom,
                                m.gamma24,
                                geom.dipole_ratio,
                            )?;
                            pulse_transmission(&PulseSpec::resonant(*t_p), &m)?
                        }
                        "od" => {
                            let m = MediumParams { od: v, ..*medium };
                            pulse_transmission(&PulseSpec::resonant(*t_p), &m)?
                        }
                        "t_p" => pulse_transmission(&PulseSpec::resonant(v), medium)?,
                        "delta_p" => pulse_transmission(
                            &PulseSpec {
                                t_p: *t_p,
                                delta_probe: v,
                                photons: 1.0,
                            },
                            medium,
                        )?,
                        other => {
                            return Err(Error::UnknownAxis {
                                axis: other.into(),
                                valid: SWEEP_AXES.join(", "),
                            })
                        }
                    };
                    Ok(vec![v, value])
                })
                .collect::<Result<_>>()?;
            // output ordered by axis value regardless of execution order
            rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
            Ok(Table {
                headers: vec!["axis_value", "transmission"],
                rows,
                x_label: "axis value",
                y_label: "transmission",
                notes: vec![("axis".into(), axis.clone())],
            })
        }
    }
}

fn spectrum_rows(grid: &[f64], t_p: f64, media: &[MediumParams]) -> Result<Vec<Vec<f64>>> {
    grid.par_iter()
        .map(|&d| -> Result<Vec<f64>> {
            let mut row = vec![d * HZ];
            for m in media {
                row.push(pulse_transmission(
                    &PulseSpec {
                        t_p,
                        delta_probe: d,
                        photons: 1.0,
                    },
                    m,
                )?);
            }
            Ok(row)
        })
        .collect()
}

/// Simulate the truth table: for each (probe, switch) combination, detected
/// counts are Poisson with mean probe_photons * T * eta (or the background
/// for probe-off rows). Row index is the RNG stream counter.
pub fn truth_table(
    config: &ScenarioConfig,
    _constants: &Constants,
    trials_override: Option<u32>,
) -> Result<TruthTable> {
    config.validate()?;
    let (medium, t_p, probe_photons, attenuation, background, trials) = match &config.scenario {
        ScenarioKind::TruthTable {
            medium,
            t_p,
            probe_photons,
            switch_attenuation,
            background,
            trials,
        } => (
            medium,
            *t_p,
            *probe_photons,
            *switch_attenuation,
            *background,
            trials_override.unwrap_or(*trials),
        ),
        _ => {
            return Err(Error::Config(
                "truth-table requires a truth-table scenario".into(),
            ))
        }
    };
    let seed = config.seed.expect("validated");
    let eta = config.detection_efficiency;
    let mut eit = *medium;
    eit.rabi_s_sq = 0.0;
    let t_off = pulse_transmission(&PulseSpec::resonant(t_p), &eit)?;
    let t_on = t_off * attenuation;

    let combos = [(false, false), (false, true), (true, false), (true, true)];
    let mut rows = Vec::with_capacity(4);
    for (i, &(probe_on, switch_on)) in combos.iter().enumerate() {
        let mean = if probe_on {
            let t = if switch_on { t_on } else { t_off };
            background + probe_photons * t * eta
        } else {
            background
        };
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..trials {
            let k = if mean > 0.0 {
                Poisson::new(mean).expect("positive mean").sample(&mut rng)
            } else {
                0.0
            };
            sum += k;
            sumsq += k * k;
        }
        let n = trials as f64;
        let m = sum / n;
        let var = if trials > 1 {
            ((sumsq - n * m * m) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        rows.push(TruthRow {
            probe_on,
            switch_on,
            mean: m,
            std: var.sqrt(),
        });
    }
    Ok(TruthTable {
        rows: [rows[0], rows[1], rows[2], rows[3]],
    })
}

/// Output format selection for `run_scenario`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (csv|svg|both)"
            ))),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    tool_version: &'static str,
    config_version: u32,
    scenario_id: &'a str,
    config_sha256: String,
    seed: Option<u64>,
    outputs: Vec<String>,
    notes: Vec<(String, String)>,
}

/// Run a scenario and write CSV/SVG plus a manifest into `out_dir`.
/// Everything is computed before anything is written, so a failing run
/// leaves no partial outputs. Returns the written paths.
pub fn run_scenario(
    config: &ScenarioConfig,
    constants: &Constants,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    let table = evaluate_scenario(config, constants)?;

    let config_json =
        serde_json::to_string_pretty(config).map_err(|e| Error::Config(e.to_string()))?;
    let hash = Sha256::digest(config_json.as_bytes());
    let hash_hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();

    let mut outputs: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let csv_name = format!("{}.csv", config.id);
    let svg_name = format!("{}.svg", config.id);
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        outputs.push((out_dir.join(&csv_name), table.to_csv().into_bytes()));
    }
    if matches!(format, OutputFormat::Svg | OutputFormat::Both) {
        outputs.push((out_dir.join(&svg_name), table.to_svg(&config.id).into_bytes()));
    }
    let manifest = Manifest {
        tool: "slowlight",
        tool_version: env!("CARGO_PKG_VERSION"),
        config_version: config.version,
        scenario_id: &config.id,
        config_sha256: hash_hex,
        seed: config.seed,
        outputs: outputs
            .iter()
            .map(|(p, _)| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        notes: table.notes.clone(),
    };
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    outputs.push((
        out_dir.join(format!("{}.manifest.json", config.id)),
        manifest_json.into_bytes(),
    ));

    std::fs::create_dir_all(out_dir).map_err(|e| {
        Error::Config(format!("cannot create output dir {}: {e}", out_dir.display()))
    })?;
    let mut written = Vec::new();
    for (path, bytes) in outputs {
        if let Err(e) = std::fs::write(&path, &bytes) {
            // remove anything already written from this run
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(Error::Config(format!(
                "cannot write {}: {e}",
                path.display()
            )));
        }
        written.push(path);
    }
    Ok(written)
}

/// Built-in figure scenarios, shipped as JSON data files.
pub fn builtin_scenario(id: &str) -> Option<&'static str> {
    match id {
        "fig1d" => Some(include_str!("../scenarios/fig1d.json")),
        "fig2b" => Some(include_str!("../scenarios/fig2b.json")),
        "fig3c" => Some(include_str!("../scenarios/fig3c.json")),
        "fig3d" => Some(include_str!("../scenarios/fig3d.json")),
        "fig3e" => Some(include_str!("../scenarios/fig3e.json")),
        "fig4c" => Some(include_str!("../scenarios/fig4c.json")),
        "fig4d" => Some(include_str!("../scenarios/fig4d.json")),
        "fig4e" => Some(include_str!("../scenarios/fig4e.json")),
        _ => None,
    }
}

pub const BUILTIN_IDS: &[&str] = &[
    "fig1d", "fig2b", "fig3c", "fig3d", "fig3e", "fig4c", "fig4d", "fig4e",
];

/// Resolve a scenario argument: a built-in id or a path to a JSON config.
pub fn resolve_scenario(arg: &str) -> Result<ScenarioConfig> {
    if let Some(text) = builtin_scenario(arg) {
        return ScenarioConfig::from_json(text);
    }
    let path = Path::new(arg);
    if path.exists() {
        return ScenarioConfig::load(path);
    }
    Err(Error::Config(format!(
        "'{arg}' is neither a built-in scenario ({}) nor an existing config file",
        BUILTIN_IDS.join(", ")
    )))
}
