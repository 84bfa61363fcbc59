use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use slowlight::constants::Constants;
use slowlight::error::{Error, Result};
use slowlight::fit::{default_init, fit_report, fit_spectrum, FitOptions, FixedRates};
use slowlight::scenario::{
    resolve_scenario, run_scenario, truth_table, OutputFormat, BUILTIN_IDS,
};
use slowlight::spectrum::{ModelKind, Spectrum};

#[derive(Parser)]
#[command(
    name = "slowlight",
    about = "Few-photon nonlinear optics in an optically dense atomic ensemble: \
             EIT spectra, slow-light pulse propagation, photon switching, and \
             spectral fitting",
    version
)]
struct Cli {
    /// Constants config (TOML). Defaults to the built-in Rb D1 values.
    #[arg(long, global = true)]
    constants: Option<PathBuf>,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: a built-in id (fig1d, fig2b, fig3c, fig3d, fig3e,
    /// fig4c, fig4d, fig4e) or a path to a JSON config.
    Simulate {
        scenario: String,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "both")]
        format: String,
    },
    /// Run a parameter sweep scenario (same config schema; the scenario
    /// must produce a swept axis).
    Sweep {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Fit the transmission model to a spectrum CSV
    /// (columns: detuning_hz,transmission,stderr).
    Fit {
        csv: PathBuf,
        /// Model: two-level | eit | n-scheme.
        #[arg(long, default_value = "eit")]
        model: String,
        /// rms probe pulse width in seconds.
        #[arg(long)]
        t_p: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Simulate the switch truth table of a truth-table scenario.
    TruthTable {
        scenario: String,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a scenario config file against the schema.
    ValidateConfig { path: PathBuf },
}

fn load_constants(path: &Option<PathBuf>) -> Result<Constants> {
    match path {
        Some(p) => Constants::load(p),
        None => Ok(Constants::rb_d1()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let constants = load_constants(&cli.constants)?;
    match cli.command {
        Command::Simulate {
            scenario,
            seed,
            format,
        }
        | Command::Sweep {
            scenario,
            seed,
            format,
        } => {
            let mut cfg = resolve_scenario(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = Some(s);
            }
            let fmt: OutputFormat = format.parse()?;
            let written = run_scenario(&cfg, &constants, &cli.out_dir, fmt)?;
            for p in written {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Fit {
            csv,
            model,
            t_p,
            report,
        } => {
            let model = match model.as_str() {
                "two-level" => ModelKind::TwoLevel,
                "eit" => ModelKind::Eit,
                "n-scheme" => ModelKind::NScheme,
                other => {
                    return Err(Error::Config(format!(
                        "unknown model '{other}' (two-level|eit|n-scheme)"
                    )))
                }
            };
            let data = Spectrum::load_csv(&csv, t_p, model)?;
            let rates = FixedRates {
                gamma13: constants.gamma13(),
                gamma24: constants.gamma13(),
            };
            let init = default_init(&data, &rates)?;
            let result = fit_spectrum(&data, &init, &rates, &FitOptions::default())?;
            let text = fit_report(&result, model);
            match report {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::TruthTable {
            scenario,
            trials,
            seed,
        } => {
            let mut cfg = resolve_scenario(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = Some(s);
            }
            let table = truth_table(&cfg, &constants, trials)?;
            println!("probe_on,switch_on,mean_detected,std_detected");
            for r in &table.rows {
                println!("{},{},{},{}", r.probe_on, r.switch_on, r.mean, r.std);
            }
            Ok(())
        }
        Command::ValidateConfig { path } => {
            let cfg = slowlight::scenario::ScenarioConfig::load(&path)?;
            println!("ok: scenario '{}' (version {})", cfg.id, cfg.version);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_)) {
                eprintln!("built-in scenarios: {}", BUILTIN_IDS.join(", "));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
