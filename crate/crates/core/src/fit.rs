//! Nonlinear least-squares fitting of the pulse-transmission model to
//! spectra: extracts optical depth, control and switch Rabi frequencies,
//! and the ground-state decoherence rate.
//!
//! Damped (Levenberg-Marquardt) minimization of weighted residuals, with
//! positive parameters fitted in log space so positivity needs no
//! constrained solver. Damping is multiplicative: x10 on a rejected step,
//! /10 on an accepted one, starting from 1e-3.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{pulse_transmission, PulseSpec};
use crate::response::MediumParams;
use crate::spectrum::{ModelKind, Spectrum, SpectrumPoint};

/// Noise model for synthetic spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Noise {
    None,
    /// Additive Gaussian noise with the given standard deviation.
    Gaussian { sigma: f64 },
    /// Counting statistics: transmission is converted to expected counts
    /// (mean_counts at T = 1), Poisson-sampled, and converted back.
    Poisson { mean_counts: f64 },
}

/// Fixed (non-fitted) rates of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedRates {
    pub gamma13: f64,
    pub gamma24: f64,
}

/// Fit output: fitted medium, covariance of the free parameters (physical
/// space, ordered as [`ModelKind::parameter_names`]), residual sum of
/// squares, and convergence info.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: MediumParams,
    pub free_values: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub sse: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    /// Standard errors of the free parameters.
    pub fn stderrs(&self) -> Vec<f64> {
        (0..self.free_values.len())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }
}

fn medium_from_free(free: &[f64], model: ModelKind, rates: &FixedRates) -> MediumParams {
    let mut m = MediumParams {
        od: free[0],
        gamma13: rates.gamma13,
        gamma12: 0.0,
        gamma24: rates.gamma24,
        rabi_c_sq: 0.0,
        rabi_s_sq: 0.0,
    };
    match model {
        ModelKind::TwoLevel => {}
        ModelKind::Eit => {
            m.rabi_c_sq = free[1];
            m.gamma12 = free[2];
        }
        ModelKind::NScheme => {
            m.rabi_c_sq = free[1];
            m.gamma12 = free[2];
            m.rabi_s_sq = free[3];
        }
    }
    m
}

fn free_from_medium(m: &MediumParams, model: ModelKind) -> Vec<f64> {
    match model {
        ModelKind::TwoLevel => vec![m.od],
        ModelKind::Eit => vec![m.od, m.rabi_c_sq, m.gamma12],
        ModelKind::NScheme => vec![m.od, m.rabi_c_sq, m.gamma12, m.rabi_s_sq],
    }
}

fn model_values(
    detunings: &[f64],
    t_p: f64,
    free: &[f64],
    model: ModelKind,
    rates: &FixedRates,
) -> Result<Vec<f64>> {
    let m = medium_from_free(free, model, rates);
    m.validate()?;
    detunings
        .par_iter()
        .map(|&d| {
            pulse_transmission(
                &PulseSpec {
                    t_p,
                    delta_probe: d,
                    photons: 1.0,
                },
                &m,
            )
        })
        .collect()
}

/// Generate a synthetic spectrum from the model with reproducible seeded
/// noise.
pub fn synthesize_spectrum(
    params: &MediumParams,
    rates: &FixedRates,
    t_p: f64,
    detunings: &[f64],
    model: ModelKind,
    noise: Noise,
    seed: u64,
) -> Result<Spectrum> {
    params.validate()?;
    let free = free_from_medium(params, model);
    let values = model_values(detunings, t_p, &free, model, rates)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let points = detunings
        .iter()
        .zip(&values)
        .map(|(&d, &t)| {
            let (transmission, stderr) = match noise {
                Noise::None => (t, 0.0),
                Noise::Gaussian { sigma } => {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    ((t + sigma * n).max(0.0), sigma)
                }
                Noise::Poisson { mean_counts } => {
                    let mu = (mean_counts * t).max(0.0);
                    let k = if mu > 0.0 {
                        Poisson::new(mu).expect("positive mean").sample(&mut rng)
                    } else {
                        0.0
                    };
                    (k / mean_counts, k.max(1.0).sqrt() / mean_counts)
                }
            };
            SpectrumPoint {
                detuning: d,
                transmission,
                stderr,
            }
        })
        .collect();
    let s = Spectrum {
        points,
        t_p,
        model,
    };
    s.validate()?;
    Ok(s)
}

/// Fit options. Bounds are physical-space (low, high) pairs per free
/// parameter; `None` bounds each parameter to a factor of 1e6 either way
/// of its initialization.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub bounds: Option<Vec<(f64, f64)>>,
    pub step_tol: f64,
    pub grad_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            bounds: None,
            step_tol: 1e-8,
            grad_tol: 1e-10,
        }
    }
}

const LOG_STEP: f64 = 1e-6;
const PARAM_FLOOR: f64 = 1e-300;
const DEFAULT_BOUND_SPAN: f64 = 6.0 * std::f64::consts::LN_10;

/// Fit the transmission model to a spectrum by damped least squares.
///
/// `init` supplies the starting values of the free parameters (selected by
/// `data.model`); its fixed rates are taken from `rates`. The accepted-step
/// SSE sequence is monotone non-increasing by construction.
pub fn fit_spectrum(
    data: &Spectrum,
    init: &MediumParams,
    rates: &FixedRates,
    opts: &FitOptions,
) -> Result<FitResult> {
    data.validate()?;
    let model = data.model;
    let k = model.free_parameter_count();
    let init_free = free_from_medium(init, model);
    for (&v, name) in init_free.iter().zip(model.parameter_names()) {
        if !(v > 0.0) && *name != "gamma12" && *name != "rabi_s_sq" {
            return Err(Error::InvalidParameter(format!(
                "initial {name} must be > 0 for log-space fitting"
            )));
        }
    }
    let log_bounds: Vec<(f64, f64)> = match &opts.bounds {
        Some(b) => {
            if b.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "expected {k} bound pairs, got {}",
                    b.len()
                )));
            }
            b.iter()
                .map(|&(lo, hi)| (lo.max(PARAM_FLOOR).ln(), hi.ln()))
                .collect()
        }
        // Default: a factor-1e6 window each way around the initialization.
        // Log-space Gauss-Newton steps along weakly constrained directions
        // can be enormous; unbounded, they run to parameter values where
        // the model overflows or the Jacobian column underflows to zero.
        None => init_free
            .iter()
            .map(|&v| {
                let c = v.max(PARAM_FLOOR).ln();
                (c - DEFAULT_BOUND_SPAN, c + DEFAULT_BOUND_SPAN)
            })
            .collect(),
    };

    let detunings: Vec<f64> = data.points.iter().map(|p| p.detuning).collect();
    let obs: Vec<f64> = data.points.iter().map(|p| p.transmission).collect();
    // unit weights when standard errors are absent
    let weighted = data.points.iter().all(|p| p.stderr > 0.0);
    let weights: Vec<f64> = data
        .points
        .iter()
        .map(|p| if weighted { 1.0 / p.stderr } else { 1.0 })
        .collect();

    let mut theta: Vec<f64> = init_free
        .iter()
        .zip(&log_bounds)
        .map(|(&v, &(lo, hi))| v.max(PARAM_FLOOR).ln().clamp(lo, hi))
        .collect();

    let residuals = |theta: &[f64]| -> Result<Vec<f64>> {
        let free: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        let vals = model_values(&detunings, data.t_p, &free, model, rates)?;
        Ok(vals
            .iter()
            .zip(&obs)
            .zip(&weights)
            .map(|((m, o), w)| (m - o) * w)
            .collect())
    };

    let mut r = residuals(&theta)?;
    let mut sse: f64 = r.iter().map(|x| x * x).sum();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let n = r.len();

    let mut jac = DMatrix::zeros(n, k);
    for iter in 0..opts.max_iterations {
        iterations = iter + 1;
        // central-difference Jacobian in log space
        let cols: Vec<Vec<f64>> = (0..k)
            .map(|j| -> Result<Vec<f64>> {
                let mut tp = theta.clone();
                let mut tm = theta.clone();
                tp[j] += LOG_STEP;
                tm[j] -= LOG_STEP;
                let rp = residuals(&tp)?;
                let rm = residuals(&tm)?;
                Ok(rp
                    .iter()
                    .zip(&rm)
                    .map(|(a, b)| (a - b) / (2.0 * LOG_STEP))
                    .collect())
            })
            .collect::<Result<_>>()?;
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                jac[(i, j)] = v;
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * &rv;

        if g.norm() < opts.grad_tol {
            converged = true;
            break;
        }

        // flag directions the data cannot constrain
        for j in 0..k {
            if a[(j, j)] <= 0.0 {
                let mut dir = vec![0.0; k];
                dir[j] = 1.0;
                return Err(Error::SingularNormalEquations { direction: dir });
            }
        }

        let mut accepted = false;
        while lambda < 1e14 {
            let mut damped = a.clone();
            for j in 0..k {
                damped[(j, j)] += lambda * a[(j, j)];
            }
            let step = match damped.clone().cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = theta
                .iter()
                .zip(step.iter())
                .zip(&log_bounds)
                .map(|((&t, &d), &(lo, hi))| (t + d).clamp(lo, hi))
                .collect();
            // a trial point where the model cannot be evaluated (overflow,
            // quadrature failure) is simply a rejected step
            let r_trial = match residuals(&trial) {
                Ok(r) => r,
                Err(_) => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let sse_trial: f64 = r_trial.iter().map(|x| x * x).sum();
            if sse_trial.is_finite() && sse_trial <= sse {
                let step_norm = step.norm();
                let theta_norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt().max(1.0);
                theta = trial;
                r = r_trial;
                sse = sse_trial;
                lambda = (lambda / 10.0).max(1e-14);
                accepted = true;
                if step_norm / theta_norm < opts.step_tol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // damping exhausted without an acceptable step: we are at a
            // local minimum to working precision
            converged = g.norm() < 1e-6;
            break;
        }
        if converged {
            break;
        }
    }

    // covariance in log space, mapped to physical space via diag(p)
    let jt = jac.transpose();
    let a = &jt * &jac;
    let free: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
    let covariance = match a.clone().try_inverse() {
        Some(inv) => {
            let scale = if weighted {
                1.0
            } else if n > k {
                sse / (n - k) as f64
            } else {
                1.0
            };
            let mut c = inv * scale;
            for i in 0..k {
                for j in 0..k {
                    c[(i, j)] *= free[i] * free[j];
                }
            }
            c
        }
        None => DMatrix::from_element(k, k, f64::NAN),
    };

    Ok(FitResult {
        params: medium_from_free(&free, model, rates),
        free_values: free,
        covariance,
        sse,
        converged,
        iterations,
    })
}

/// Deterministic heuristic initial guess from the data itself.
pub fn default_init(data: &Spectrum, rates: &FixedRates) -> Result<MediumParams> {
    data.validate()?;
    let t: Vec<f64> = data.points.iter().map(|p| p.transmission).collect();
    let t_min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut errs: Vec<f64> = data.points.iter().map(|p| p.stderr).collect();
    errs.sort_by(f64::total_cmp);
    let med_err = errs[errs.len() / 2];
    if t_max - t_min < (3.0 * med_err).max(1e-3) {
        return Err(Error::UnderInformative(
            "spectrum is flat: no absorption feature to initialize from".into(),
        ));
    }
    if t_max < 0.01 {
        return Err(Error::UnderInformative(
            "spectrum is fully opaque everywhere".into(),
        ));
    }

    // od from the absorption depth, scaled for pulse-bandwidth averaging
    let od = (-(t_min.max(1e-13)).ln() * 1.2).clamp(0.05, 90.0);
    let mut m = MediumParams {
        od,
        gamma13: rates.gamma13,
        gamma12: 0.0,
        gamma24: rates.gamma24,
        rabi_c_sq: 0.0,
        rabi_s_sq: 0.0,
    };
    if data.model == ModelKind::TwoLevel {
        return Ok(m);
    }

    // transparency window: transmission at resonance and its half-width
    let i0 = data
        .points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.detuning.abs().total_cmp(&b.1.detuning.abs()))
        .unwrap()
        .0;
    let t_res = t[i0];
    let half = 0.5 * (t_res + t_min);
    let mut right = data.points.last().unwrap().detuning;
    for p in &data.points[i0..] {
        if p.transmission < half {
            right = p.detuning;
            break;
        }
    }
    let mut left = data.points[0].detuning;
    for p in data.points[..i0].iter().rev() {
        if p.transmission < half {
            left = p.detuning;
            break;
        }
    }
    let half_width = (0.5 * (right - left)).max(
        data.points[1].detuning - data.points[0].detuning,
    );
    let rabi_c_sq = 4.0 * rates.gamma13 * half_width * od.sqrt();
    m.rabi_c_sq = rabi_c_sq;

    // residual resonance absorption split between gamma12 (and Omega_s^2
    // for the N-scheme)
    let a = (-(t_res.max(1e-13)).ln() / od).clamp(0.0, 0.999);
    let share = if data.model == ModelKind::NScheme { 0.5 } else { 1.0 };
    let a12 = a * share;
    m.gamma12 = (a12 * rabi_c_sq / (4.0 * rates.gamma13 * (1.0 - a12).max(1e-3)))
        .max(1e-6 * rates.gamma13);
    if data.model == ModelKind::NScheme {
        m.rabi_s_sq = ((a * (1.0 - share)) * rates.gamma24 * rabi_c_sq / rates.gamma13)
            .max(1e-6 * rabi_c_sq);
    }
    Ok(m)
}

/// Write a fit report as structured key-value text, covariance included.
pub fn fit_report(result: &FitResult, model: ModelKind) -> String {
    let mut out = String::new();
    out.push_str(&format!("model = {:?}\n", model));
    out.push_str(&format!("converged = {}\n", result.converged));
    out.push_str(&format!("iterations = {}\n", result.iterations));
    out.push_str(&format!("sse = {}\n", result.sse));
    let names = model.parameter_names();
    let errs = result.stderrs();
    for ((name, v), e) in names.iter().zip(&result.free_values).zip(&errs) {
        out.push_str(&format!("{name} = {v}\n{name}_stderr = {e}\n"));
    }
    for i in 0..names.len() {
        for j in 0..names.len() {
            out.push_str(&format!(
                "cov_{}_{} = {}\n",
                names[i],
                names[j],
                result.covariance[(i, j)]
            ));
        }
    }
    out
}
