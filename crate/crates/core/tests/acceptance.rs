//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture` or on failure).

use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use slowlight::constants::Constants;
use slowlight::fit::{fit_spectrum, synthesize_spectrum, FitOptions, FixedRates, Noise};
use slowlight::incoherent::{atoms_transferred, probe_transmission_incoherent, TransferModel};
use slowlight::photometry::{
    od_from_atoms, photons_from_rabi_sq, projected_threshold, Scheme,
};
use slowlight::pulse::{
    closed_form_transmission, propagate_pulse, pulse_transmission, switch_threshold,
};
use slowlight::response::{
    analytic_group_delay, complex_response, natural_line_transmission, DelayConvention,
};
use slowlight::scenario::{resolve_scenario, run_scenario, truth_table, OutputFormat, BUILTIN_IDS};
use slowlight::spectrum::ModelKind;
use slowlight::trap::{broadened_profile, broadened_profile_mc, TrapSpec};
use slowlight::{EnsembleSpec, Geometry, GridSpec, MediumParams, PulseSpec};

fn report(criterion: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion} ({name}): {} [{detail}]",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn gamma_e() -> f64 {
    Constants::rb_d1().gamma_e
}

/// Symmetric detuning grid dense near resonance (log-spaced magnitudes)
/// so narrow transparency windows are always resolved.
fn log_symmetric_grid(outer: f64, inner: f64, half_count: usize) -> Vec<f64> {
    let mut dets = vec![0.0];
    for i in 0..half_count {
        let u = i as f64 / (half_count - 1) as f64;
        let mag = inner * (outer / inner).powf(u);
        dets.push(mag);
        dets.push(-mag);
    }
    dets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dets
}

#[test]
fn criterion_1_two_level_reduction() {
    let ge = gamma_e();
    let mut max_rel: f64 = 0.0;
    for od in [1.0, 3.0, 30.0] {
        let m = MediumParams::two_level(od, ge / 2.0);
        for i in -1000..=1000 {
            let dp = 0.01 * i as f64 * ge;
            let f = complex_response(0.0, dp, &m).unwrap();
            let t = (-od * f.im).exp();
            let t_nat = natural_line_transmission(dp, od, ge).unwrap();
            max_rel = max_rel.max((t - t_nat).abs() / t_nat.max(1e-300));
        }
    }
    report(
        1,
        "two-level reduction",
        max_rel < 1e-12,
        &format!("max relative deviation {max_rel:.3e}, bound 1e-12"),
    );
}

#[test]
fn criterion_2_route_equivalence() {
    let ge = gamma_e();
    let g13 = ge / 2.0;
    let mut rng = ChaCha12Rng::seed_from_u64(0x524f555445);
    let mut max_abs: f64 = 0.0;
    for i in 0..200 {
        let od = rng.gen_range(0.5..30.0);
        let rabi_c_sq = if i % 4 == 0 {
            0.0
        } else {
            (rng.gen_range(0.5..8.0) * g13).powi(2)
        };
        let m = MediumParams {
            od,
            gamma13: g13,
            gamma12: rng.gen_range(0.0..0.05) * g13,
            gamma24: rng.gen_range(0.5..1.5) * g13,
            rabi_c_sq,
            rabi_s_sq: rng.gen_range(0.0..0.2) * rabi_c_sq,
        };
        let pulse = PulseSpec {
            t_p: 5e-8 * 10f64.powf(rng.gen_range(0.0..1.3)),
            delta_probe: rng.gen_range(-2.0..2.0) * ge,
            photons: 1.0,
        };
        let quad = pulse_transmission(&pulse, &m).unwrap();
        let grid = GridSpec {
            span: 8.0 / pulse.t_p,
            samples: 16384,
        };
        let fft = propagate_pulse(&pulse, &m, &grid).unwrap().transmission;
        max_abs = max_abs.max((quad - fft).abs());
    }
    report(
        2,
        "route equivalence",
        max_abs < 1e-6,
        &format!("max |quadrature - transform| {max_abs:.3e} over 200 draws, bound 1e-6"),
    );
}

#[test]
fn criterion_3_closed_form_validity_map() {
    let g13 = gamma_e() / 2.0;
    let t_p = 150e-9;
    let geom = Geometry::new(794.979e-9, 1.9e-6, 1.0).unwrap();
    let ods = [3.0, 10.0, 30.0];
    let ratios = [0.2, 0.5, 1.0, 2.0, 5.0];
    let switch_fracs = [0.0, 0.04];

    let mut csv = String::from(
        "od,td_over_tp,switch_fraction,kappa,transmission_full,transmission_closed_form,relative_deviation\n",
    );
    let mut max_dev = [0.0f64; 2]; // indexed by kappa - 1
    for kappa in [1.0, 2.0] {
        for &od in &ods {
            for &ratio in &ratios {
                for &frac in &switch_fracs {
                    let t_d = ratio * t_p;
                    let rabi_c_sq = kappa * od * g13 / t_d;
                    let m = MediumParams {
                        od,
                        gamma13: g13,
                        gamma12: 0.0,
                        gamma24: g13,
                        rabi_c_sq,
                        rabi_s_sq: frac * rabi_c_sq,
                    };
                    let t_full = pulse_transmission(&PulseSpec::resonant(t_p), &m).unwrap();
                    let n_s = photons_from_rabi_sq(
                        m.rabi_s_sq,
                        std::f64::consts::SQRT_2 * t_p + t_d,
                        &geom,
                        m.gamma24,
                        1.0,
                    )
                    .unwrap();
                    let t_cf = closed_form_transmission(n_s, t_p, t_d, od, &geom).unwrap();
                    let dev = (t_full - t_cf).abs() / t_full;
                    max_dev[kappa as usize - 1] = max_dev[kappa as usize - 1].max(dev);
                    csv.push_str(&format!(
                        "{od},{ratio},{frac},{kappa},{t_full},{t_cf},{dev}\n"
                    ));
                }
            }
        }
    }
    let winner = if max_dev[0] <= max_dev[1] { 1 } else { 2 };
    csv.push_str(&format!("# selected kappa = {winner}\n"));
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("validity_map.csv");
    fs::write(&path, &csv).unwrap();

    let best = max_dev[winner - 1];
    report(
        3,
        "closed-form validity map",
        best <= 0.10,
        &format!(
            "kappa {winner} selected (max deviation {:.4} vs {:.4}); map at {}",
            max_dev[winner - 1],
            max_dev[2 - winner],
            path.display()
        ),
    );
}

#[test]
fn criterion_4_group_delay() {
    let g13 = gamma_e() / 2.0;
    let od = 3.0;
    // control power chosen so the propagated delay is exactly 100 ns
    let t_d_target = 100e-9;
    let m = MediumParams {
        od,
        gamma13: g13,
        gamma12: 0.0,
        gamma24: g13,
        rabi_c_sq: 2.0 * od * g13 / t_d_target,
        rabi_s_sq: 0.0,
    };
    let t_d_analytic = analytic_group_delay(&m, DelayConvention::Propagated).unwrap();

    // narrowband regime: long pulse, measured peak delay vs analytic
    let narrow = PulseSpec::resonant(2e-6);
    let res = propagate_pulse(&narrow, &m, &GridSpec::for_pulse(&narrow)).unwrap();
    let narrow_err = (res.delay - t_d_analytic).abs() / t_d_analytic;

    // anchor: 150 ns pulse delayed by ~100 ns for some control power.
    // Finite pulse bandwidth shaves the peak delay below the narrowband
    // value, so retune the control a few times toward the target.
    let anchor = PulseSpec::resonant(150e-9);
    let mut m_anchor = m;
    let mut anchor_delay = 0.0;
    for _ in 0..4 {
        let res = propagate_pulse(&anchor, &m_anchor, &GridSpec::for_pulse(&anchor)).unwrap();
        anchor_delay = res.delay;
        m_anchor.rabi_c_sq *= res.delay / t_d_target;
    }
    let anchor_err = (anchor_delay - t_d_target).abs() / t_d_target;

    // implied group velocity over a 0.3 mm medium
    let v_g = 0.3e-3 / t_d_analytic;
    let vg_err = (v_g - 3000.0).abs() / 3000.0;

    report(
        4,
        "group delay",
        narrow_err < 0.05 && anchor_err < 0.10 && vg_err < 0.10,
        &format!(
            "narrowband delay {:.2} ns (analytic {:.2} ns, err {:.2}%); \
             150 ns pulse delay {:.2} ns (err {:.2}%); v_g {:.0} m/s",
            res.delay * 1e9,
            t_d_analytic * 1e9,
            100.0 * narrow_err,
            anchor_delay * 1e9,
            100.0 * anchor_err,
            v_g
        ),
    );
}

#[test]
fn criterion_5_calibration_anchors() {
    let c = Constants::rb_d1();
    let geom = Geometry::new(c.wavelength, c.waist, c.dipole_ratio).unwrap();
    let od100 = od_from_atoms(
        &EnsembleSpec {
            n_eff: 100.0,
            sigma_ratio: c.sigma_ratio,
        },
        &geom,
    )
    .unwrap();
    let od3000 = od_from_atoms(
        &EnsembleSpec {
            n_eff: 3000.0,
            sigma_ratio: c.sigma_ratio,
        },
        &geom,
    )
    .unwrap();

    let tm = TransferModel::calibrated();
    let t300 = probe_transmission_incoherent(300.0, &tm).unwrap();
    let n300 = atoms_transferred(300.0, &tm).unwrap();

    let (t_p, t_d, od) = (150e-9, 100e-9, 3.0);
    let ratio = switch_threshold(0.1, t_p, t_d, od, &geom).unwrap()
        / switch_threshold(0.5, t_p, t_d, od, &geom).unwrap();

    let pass = (od100 - 1.0).abs() < 1e-9
        && (od3000 - 30.0).abs() < 1e-9
        && (t300 - 0.5).abs() < 0.005
        && (n300 - 150.0).abs() < 1e-9
        && (ratio - 3.32).abs() < 0.01;
    report(
        5,
        "calibration anchors",
        pass,
        &format!(
            "100 atoms -> OD {od100:.12}; 3000 -> OD {od3000:.9}; \
             300 pump -> T {t300:.4}, {n300:.1} atoms; threshold ratio {ratio:.4}"
        ),
    );
}

#[test]
fn criterion_6_threshold_arithmetic() {
    let geom = Geometry::new(795e-9, 1.9e-6, 1.0).unwrap();
    // t_d >> t_p: the geometric prefactor survives alone
    let t_p = 150e-9;
    let n_e = switch_threshold((-1.0f64).exp(), t_p, 1e6 * t_p, 3.0, &geom).unwrap();
    let coprop = projected_threshold(Scheme::CopropagatingSlow, 100.0, &geom).unwrap();
    let pass = (n_e - 18.8).abs() <= 0.1 && (coprop - 1.79).abs() <= 0.01;
    report(
        6,
        "threshold arithmetic",
        pass,
        &format!("1/e threshold {n_e:.3} photons; copropagating-slow at OD 100: {coprop:.4}"),
    );
}

#[test]
fn criterion_7_fit_round_trip() {
    let ge = gamma_e();
    let g13 = ge / 2.0;
    let rates = FixedRates {
        gamma13: g13,
        gamma24: g13,
    };
    let t_p = 1e-6;
    let dets = log_symmetric_grid(10.0 * ge, 1e-3 * ge, 40);
    let opts = FitOptions::default();

    // zero-noise round trips from +/-30% perturbed starts
    let mut rng = ChaCha12Rng::seed_from_u64(0x524f554e44);
    let mut ok = 0usize;
    let mut worst: f64 = 0.0;
    let total = 100;
    for i in 0..total {
        let model = if i % 2 == 0 {
            ModelKind::Eit
        } else {
            ModelKind::NScheme
        };
        let rabi_c_sq = (rng.gen_range(0.5..20.0) * g13).powi(2);
        let truth = MediumParams {
            od: 10f64.powf(rng.gen_range(0.0..(50f64).log10())),
            gamma13: g13,
            gamma12: rng.gen_range(1e-3..0.1) * g13,
            gamma24: g13,
            rabi_c_sq,
            rabi_s_sq: if model == ModelKind::NScheme {
                rng.gen_range(0.005..0.04) * rabi_c_sq
            } else {
                0.0
            },
        };
        let data =
            synthesize_spectrum(&truth, &rates, t_p, &dets, model, Noise::None, i as u64).unwrap();
        let mut init = truth;
        init.od *= rng.gen_range(0.7..1.3);
        init.rabi_c_sq *= rng.gen_range(0.7..1.3);
        init.gamma12 *= rng.gen_range(0.7..1.3);
        init.rabi_s_sq *= rng.gen_range(0.7..1.3);
        let fit = fit_spectrum(&data, &init, &rates, &opts).unwrap();
        let truth_free = match model {
            ModelKind::Eit => vec![truth.od, truth.rabi_c_sq, truth.gamma12],
            _ => vec![truth.od, truth.rabi_c_sq, truth.gamma12, truth.rabi_s_sq],
        };
        let rel = fit
            .free_values
            .iter()
            .zip(&truth_free)
            .map(|(f, t)| (f - t).abs() / t)
            .fold(0.0f64, f64::max);
        worst = worst.max(rel);
        if rel < 1e-6 {
            ok += 1;
        }
    }

    // 5% noise: Mahalanobis distances vs the reported covariance
    let truth = MediumParams {
        od: 1.5,
        gamma13: g13,
        gamma12: 0.2 * g13,
        gamma24: g13,
        rabi_c_sq: (3.0 * g13).powi(2),
        rabi_s_sq: 0.0,
    };
    let truth_free = [truth.od, truth.rabi_c_sq, truth.gamma12];
    let trials = 100;
    let mut chi2_sum = 0.0;
    for s in 0..trials {
        let data = synthesize_spectrum(
            &truth,
            &rates,
            t_p,
            &dets,
            ModelKind::Eit,
            Noise::Gaussian { sigma: 0.05 },
            1000 + s,
        )
        .unwrap();
        let fit = fit_spectrum(&data, &truth, &rates, &opts).unwrap();
        let inv = fit
            .covariance
            .clone()
            .try_inverse()
            .expect("positive-definite covariance");
        let d: Vec<f64> = fit
            .free_values
            .iter()
            .zip(&truth_free)
            .map(|(f, t)| f - t)
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                chi2_sum += d[i] * inv[(i, j)] * d[j];
            }
        }
    }
    let df = 3.0 * trials as f64;
    let chi = ChiSquared::new(df).unwrap();
    let (lo, hi) = (chi.inverse_cdf(0.025), chi.inverse_cdf(0.975));
    let chi2_ok = chi2_sum > lo && chi2_sum < hi;

    report(
        7,
        "fit round-trip",
        ok == total && chi2_ok,
        &format!(
            "{ok}/{total} zero-noise refits within 1e-6 (worst {worst:.2e}); \
             noise chi2 {chi2_sum:.1} in [{lo:.1}, {hi:.1}]"
        ),
    );
}

#[test]
fn criterion_8_determinism_and_truth_table() {
    let constants = Constants::rb_d1();
    let mut identical = true;
    let mut detail = String::new();
    for id in BUILTIN_IDS {
        let cfg = resolve_scenario(id).unwrap();
        let mut contents = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            run_scenario(&cfg, &constants, dir.path(), OutputFormat::Csv).unwrap();
            contents.push(fs::read(dir.path().join(format!("{id}.csv"))).unwrap());
        }
        if contents[0] != contents[1] {
            identical = false;
            detail.push_str(&format!("{id} differs; "));
        }
    }

    let cfg = resolve_scenario("fig4e").unwrap();
    let table = truth_table(&cfg, &constants, None).unwrap();
    let off = &table.rows[2]; // probe on, switch off
    let on = &table.rows[3]; // probe on, switch on
    let n = 10_000f64;
    let ratio = off.mean / on.mean;
    let sigma = ratio
        * ((off.std / off.mean).powi(2) / n + (on.std / on.mean).powi(2) / n).sqrt();
    let e = std::f64::consts::E;
    let ratio_ok = (ratio - e).abs() < 3.0 * sigma;

    report(
        8,
        "determinism and truth table",
        identical && ratio_ok,
        &format!(
            "{}all built-ins byte-identical: {identical}; on/off ratio {ratio:.4} \
             vs e = {e:.4} ({:.1} sigma)",
            detail,
            (ratio - e).abs() / sigma
        ),
    );
}

#[test]
fn criterion_9_trap_spectroscopy_oracle() {
    let ge = gamma_e();
    let trap = TrapSpec {
        delta_ac_max: 2.0 * std::f64::consts::PI * 30e6,
        waist: 1.9e-6,
        depth: 10e-3,
        temperature: 1e-3,
        trap_on: true,
    };
    let dets: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|&x| x * trap.delta_ac_max)
        .collect();
    let quad = broadened_profile(&dets, 30.0, ge, &trap).unwrap();
    let mc = broadened_profile_mc(&dets, 30.0, ge, &trap, 2_000_000, 7).unwrap();
    let max_rel = quad
        .iter()
        .zip(&mc)
        .map(|(q, m)| (q - m).abs() / m)
        .fold(0.0f64, f64::max);

    let cold = TrapSpec {
        temperature: 0.0,
        ..trap
    };
    let rigid = broadened_profile(&dets, 30.0, ge, &cold).unwrap();
    let max_shift_err = dets
        .iter()
        .zip(&rigid)
        .map(|(&d, &t)| {
            let expect = natural_line_transmission(d - trap.delta_ac_max, 30.0, ge).unwrap();
            (t - expect).abs()
        })
        .fold(0.0f64, f64::max);

    report(
        9,
        "trap-spectroscopy oracle",
        max_rel < 0.01 && max_shift_err < 1e-6,
        &format!(
            "quadrature vs Monte Carlo max relative deviation {max_rel:.4}; \
             cold-limit deviation {max_shift_err:.2e}"
        ),
    );
}
