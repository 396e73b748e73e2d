//! Command-line workbench for unbalanced-cat phase estimation.
//!
//! Subcommands: `bounds` (precision bounds table), `posterior` (estimator
//! distribution curves), `simulate` (Monte Carlo campaign), `sweep`
//! (bounds/MC over a parameter range), `reproduce` (the two reference
//! parameter sets). Every command writes a run manifest next to its outputs
//! so any run can be replayed exactly.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use catphase::bounds::{full_report, BoundsReport};
use catphase::likelihood::{
    posterior_curve, posterior_moments, EstimatorMethod, GridSpec, PosteriorCurve, PosteriorMode,
};
use catphase::model::condition_diagnostics;
use catphase::montecarlo::{run_campaign, CampaignConfig, CampaignSummary, PhiPolicy, TrialRecord};
use catphase::{Error as LibError, Phase, PriorWindow, ProbeSpec};

mod config;
mod output;

use config::{ConfigError, ConfigFile};
use output::{fmt_f64, write_atomic, RunManifest};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::InvalidInput(_) | LibError::Regime(_) => CliError::Validation(e.to_string()),
            LibError::GridCoverage { .. }
            | LibError::Quadrature { .. }
            | LibError::Exhaustive(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Parses a count flag that may be written in scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() || v < 1.0 || v > 9.0e18 || v.fract() != 0.0 {
        return Err(format!("`{s}` is not a positive integer count"));
    }
    Ok(v as u64)
}

#[derive(Parser, Debug)]
#[command(
    name = "catphase",
    version,
    about = "Bounds and Monte Carlo workbench for phase estimation with unbalanced-cat probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Prior window width W in radians
    #[arg(long = "W")]
    w: Option<f64>,
    /// Mean photon number of the probe
    #[arg(long)]
    nbar: Option<f64>,
    /// Repetitions per trial (accepts scientific notation, e.g. 1e6)
    #[arg(long, value_parser = parse_count)]
    m: Option<u64>,
    /// Probe amplitude nu in (0, 1)
    #[arg(long)]
    nu: Option<f64>,
    /// True phase in radians
    #[arg(long)]
    phi: Option<f64>,
    /// Monte Carlo trials
    #[arg(long, value_parser = parse_count)]
    trials: Option<u64>,
    /// Master seed for reproducible campaigns
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance for adaptive quadrature
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory (default: $CATPHASE_OUT or the working directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key = value config file; explicit flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Linearized,
    ExactArcsin,
}

impl From<MethodArg> for EstimatorMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Linearized => EstimatorMethod::Linearized,
            MethodArg::ExactArcsin => EstimatorMethod::ExactArcsin,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PolicyArg {
    /// Every trial uses the phase given by --phi
    Fixed,
    /// Each trial draws its phase uniformly from [0, W]
    Prior,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SweepParam {
    M,
    Nu,
    Nbar,
    W,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Figure {
    Fig1,
    Fig2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute every bound and reference scale for one parameter set
    Bounds(CommonArgs),
    /// Evaluate the exact and Gaussian estimator distributions on a grid
    Posterior(CommonArgs),
    /// Run a Monte Carlo campaign and write records plus summary
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Estimator used to invert each tally
        #[arg(long, value_enum, default_value_t = MethodArg::Linearized)]
        method: MethodArg,
        /// How the true phase of each trial is chosen
        #[arg(long, value_enum, default_value_t = PolicyArg::Fixed)]
        policy: PolicyArg,
    },
    /// Tabulate bounds (and optionally MC rmse) over a parameter range
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Which parameter to sweep
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated grid values for the swept parameter
        #[arg(long)]
        values: String,
        /// Also run a fixed-phase Monte Carlo campaign per grid point
        #[arg(long)]
        with_mc: bool,
        /// When sweeping nu, derive m from a fixed m*nu^2 product
        #[arg(long)]
        hold_mnu2: Option<f64>,
    },
    /// Emit the reference parameter sets: curves, summary, ratio chain
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Fully resolved parameters after merging flags, config file, and defaults.
#[derive(Debug, Clone)]
struct Params {
    w: f64,
    nbar: f64,
    m: u64,
    nu: f64,
    phi: f64,
    trials: u64,
    seed: u64,
    tol: f64,
    out: PathBuf,
}

impl Params {
    fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let out = args
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from))
            .or_else(|| std::env::var_os("CATPHASE_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self {
            w: args.w.or(file.get_f64("W")?).unwrap_or(1e-3),
            nbar: args.nbar.or(file.get_f64("nbar")?).unwrap_or(1.0),
            m: args.m.or(file.get_count("m")?).unwrap_or(1_000_000),
            nu: args.nu.or(file.get_f64("nu")?).unwrap_or(0.1),
            phi: args.phi.or(file.get_f64("phi")?).unwrap_or(1e-4),
            trials: args.trials.or(file.get_count("trials")?).unwrap_or(10_000),
            seed: args
                .seed
                .or(file.get_count("seed")?)
                .unwrap_or(20_260_824),
            tol: args.tol.or(file.get_f64("tol")?).unwrap_or(1e-8),
            out,
        })
    }

    fn probe(&self) -> Result<ProbeSpec, CliError> {
        Ok(ProbeSpec::new(self.nu, self.nbar)?)
    }

    fn prior(&self) -> Result<PriorWindow, CliError> {
        Ok(PriorWindow::new(self.w)?)
    }

    fn phase(&self) -> Result<Phase, CliError> {
        Ok(Phase::new(self.phi)?)
    }

    fn record(&self, manifest: &mut RunManifest) {
        manifest.param_f64("W", self.w);
        manifest.param_f64("nbar", self.nbar);
        manifest.param("m", self.m);
        manifest.param_f64("nu", self.nu);
        manifest.param_f64("phi", self.phi);
        manifest.param("trials", self.trials);
        manifest.param("master_seed", self.seed);
        manifest.param_f64("tol", self.tol);
    }

    fn ensure_outdir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(common) => cmd_bounds(&common),
        Command::Posterior(common) => cmd_posterior(&common),
        Command::Simulate {
            common,
            method,
            policy,
        } => cmd_simulate(&common, method, policy),
        Command::Sweep {
            common,
            param,
            values,
            with_mc,
            hold_mnu2,
        } => cmd_sweep(&common, param, &values, with_mc, hold_mnu2),
        Command::Reproduce { figure, common } => cmd_reproduce(figure, &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn bounds_rows(report: &BoundsReport) -> Vec<(&'static str, String)> {
    let d = &report.diagnostics;
    vec![
        ("weak_scale", fmt_f64(report.weak_scale)),
        ("strong_scale", fmt_f64(report.strong_scale)),
        ("cr", fmt_f64(report.cr)),
        ("qcr", fmt_f64(report.qcr)),
        ("zz_exact", fmt_f64(report.zz_exact)),
        ("zz_closed", fmt_f64(report.zz_closed)),
        ("bcr", fmt_f64(report.bcr)),
        ("quadrature_abs_error", fmt_f64(report.quadrature_abs_error)),
        ("c1", fmt_f64(d.c1)),
        ("c2", fmt_f64(d.c2)),
        ("mnu2", fmt_f64(d.mnu2)),
        ("c1_ok", d.c1_ok.to_string()),
        ("c2_ok", d.c2_ok.to_string()),
    ]
}

fn cmd_bounds(common: &CommonArgs) -> Result<(), CliError> {
    let params = Params::resolve(common)?;
    let probe = params.probe()?;
    let prior = params.prior()?;
    let report = full_report(&probe, &prior, params.m, params.phase()?, params.tol)?;

    let rows = bounds_rows(&report);
    for (name, value) in &rows {
        println!("{name:<22} {value}");
    }

    params.ensure_outdir()?;
    let mut csv = String::from("quantity,value\n");
    for (name, value) in &rows {
        writeln!(csv, "{name},{value}").unwrap();
    }
    let csv_path = params.out.join("bounds.csv");
    write_atomic(&csv_path, &csv)?;

    let mut manifest = RunManifest::new("bounds");
    params.record(&mut manifest);
    manifest.output(&csv_path);
    manifest.write(&params.out, "bounds")?;
    Ok(())
}

/// Exact and Gaussian curves evaluated on the same grid.
fn curve_pair(
    probe: &ProbeSpec,
    phi: Phase,
    m: u64,
) -> Result<(PosteriorCurve, PosteriorCurve), CliError> {
    let spec = GridSpec::default();
    let exact = posterior_curve(probe, phi, m, PosteriorMode::ExactBinomial, &spec)?;
    let gauss = posterior_curve(probe, phi, m, PosteriorMode::GaussianApprox, &spec)?;
    Ok((exact, gauss))
}

fn curves_csv(exact: &PosteriorCurve, gauss: &PosteriorCurve) -> String {
    let mut csv = String::from("phi_hat,density_exact,density_gauss\n");
    for ((x, de), dg) in exact
        .grid()
        .iter()
        .zip(exact.density())
        .zip(gauss.density())
    {
        writeln!(csv, "{},{},{}", fmt_f64(*x), fmt_f64(*de), fmt_f64(*dg)).unwrap();
    }
    csv
}

/// Largest |exact - gauss| relative to the exact peak, over the region where
/// the exact density exceeds 1% of its peak.
fn curve_deviation(exact: &PosteriorCurve, gauss: &PosteriorCurve) -> f64 {
    let peak = exact.peak();
    exact
        .density()
        .iter()
        .zip(gauss.density())
        .filter(|(de, _)| **de > 0.01 * peak)
        .map(|(de, dg)| (de - dg).abs() / peak)
        .fold(0.0, f64::max)
}

fn cmd_posterior(common: &CommonArgs) -> Result<(), CliError> {
    let params = Params::resolve(common)?;
    let probe = params.probe()?;
    let phi = params.phase()?;
    let (exact, gauss) = curve_pair(&probe, phi, params.m)?;
    let (mean_e, var_e) = posterior_moments(&exact);
    let (mean_g, var_g) = posterior_moments(&gauss);

    println!("mean_exact        {}", fmt_f64(mean_e));
    println!("sqrt_var_exact    {}", fmt_f64(var_e.sqrt()));
    println!("mean_gauss        {}", fmt_f64(mean_g));
    println!("sqrt_var_gauss    {}", fmt_f64(var_g.sqrt()));
    println!("curve_deviation   {}", fmt_f64(curve_deviation(&exact, &gauss)));

    params.ensure_outdir()?;
    let csv_path = params.out.join("posterior.csv");
    write_atomic(&csv_path, &curves_csv(&exact, &gauss))?;

    let mut manifest = RunManifest::new("posterior");
    params.record(&mut manifest);
    manifest.output(&csv_path);
    manifest.write(&params.out, "posterior")?;
    Ok(())
}

fn summary_rows(summary: &CampaignSummary) -> Vec<(&'static str, String)> {
    vec![
        ("trials", summary.trials.to_string()),
        ("mse", fmt_f64(summary.mse)),
        ("mse_stderr", fmt_f64(summary.mse_stderr)),
        ("bias", fmt_f64(summary.bias)),
        ("bias_stderr", fmt_f64(summary.bias_stderr)),
        ("rmse", fmt_f64(summary.rmse)),
        ("clamp_fraction", fmt_f64(summary.clamp_fraction)),
        ("clamp_warning", summary.clamp_warning.to_string()),
        ("rmse_over_weak", fmt_f64(summary.comparisons.vs_weak)),
        ("rmse_over_strong", fmt_f64(summary.comparisons.vs_strong)),
        ("rmse_over_prior", fmt_f64(summary.comparisons.vs_prior_width)),
        ("rmse_over_cr", fmt_f64(summary.comparisons.vs_cr)),
        ("rmse_over_zz_closed", fmt_f64(summary.comparisons.vs_zz_closed)),
    ]
}

fn records_csv(records: &[TrialRecord]) -> String {
    let mut csv = String::from("index,phi_true,k,phi_hat,error,clamped\n");
    for r in records {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.index,
            fmt_f64(r.phi_true),
            r.k,
            fmt_f64(r.phi_hat),
            fmt_f64(r.error),
            r.clamped
        )
        .unwrap();
    }
    csv
}

fn cmd_simulate(common: &CommonArgs, method: MethodArg, policy: PolicyArg) -> Result<(), CliError> {
    let params = Params::resolve(common)?;
    let config = CampaignConfig {
        probe: params.probe()?,
        prior: params.prior()?,
        m: params.m,
        trials: params.trials,
        phi_policy: match policy {
            PolicyArg::Fixed => PhiPolicy::Fixed(params.phi),
            PolicyArg::Prior => PhiPolicy::SampleFromPrior,
        },
        estimator_method: method.into(),
        master_seed: params.seed,
    };
    let (records, summary) = run_campaign(&config)?;

    for (name, value) in summary_rows(&summary) {
        println!("{name:<22} {value}");
    }

    params.ensure_outdir()?;
    let records_path = params.out.join("simulate_records.csv");
    write_atomic(&records_path, &records_csv(&records))?;
    let mut csv = String::from("quantity,value\n");
    for (name, value) in summary_rows(&summary) {
        writeln!(csv, "{name},{value}").unwrap();
    }
    let summary_path = params.out.join("simulate_summary.csv");
    write_atomic(&summary_path, &csv)?;

    let mut manifest = RunManifest::new("simulate");
    params.record(&mut manifest);
    manifest.param("method", format!("{method:?}"));
    manifest.param("policy", format!("{policy:?}"));
    manifest.output(&records_path);
    manifest.output(&summary_path);
    manifest.write(&params.out, "simulate")?;
    Ok(())
}

fn cmd_sweep(
    common: &CommonArgs,
    param: SweepParam,
    values: &str,
    with_mc: bool,
    hold_mnu2: Option<f64>,
) -> Result<(), CliError> {
    let params = Params::resolve(common)?;
    let grid: Vec<f64> = values
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("sweep value `{s}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err(CliError::Validation("sweep value list is empty".into()));
    }
    if hold_mnu2.is_some() && !matches!(param, SweepParam::Nu) {
        return Err(CliError::Validation(
            "--hold-mnu2 only applies when sweeping nu".into(),
        ));
    }

    let param_name = match param {
        SweepParam::M => "m",
        SweepParam::Nu => "nu",
        SweepParam::Nbar => "nbar",
        SweepParam::W => "W",
    };
    let mut csv = String::from(
        "param,value,weak_scale,strong_scale,cr,qcr,zz_exact,zz_closed,bcr,c1,c2,mnu2,c1_ok,c2_ok,rmse\n",
    );
    for (i, &value) in grid.iter().enumerate() {
        let mut p = params.clone();
        match param {
            SweepParam::M => {
                p.m = parse_count(&value.to_string())
                    .map_err(|e| CliError::Validation(format!("sweep value for m: {e}")))?;
            }
            SweepParam::Nu => {
                p.nu = value;
                if let Some(mnu2) = hold_mnu2 {
                    let m = (mnu2 / (value * value)).round();
                    p.m = parse_count(&m.to_string()).map_err(|e| {
                        CliError::Validation(format!("derived m from --hold-mnu2: {e}"))
                    })?;
                }
            }
            SweepParam::Nbar => p.nbar = value,
            SweepParam::W => p.w = value,
        }
        let probe = p.probe()?;
        let prior = p.prior()?;
        let report = full_report(&probe, &prior, p.m, p.phase()?, p.tol)?;
        let rmse = if with_mc {
            let config = CampaignConfig {
                probe,
                prior,
                m: p.m,
                trials: p.trials,
                phi_policy: PhiPolicy::Fixed(p.phi),
                estimator_method: EstimatorMethod::Linearized,
                master_seed: p.seed.wrapping_add(i as u64),
            };
            let (_, summary) = run_campaign(&config)?;
            fmt_f64(summary.rmse)
        } else {
            String::new()
        };
        let d = &report.diagnostics;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            param_name,
            fmt_f64(value),
            fmt_f64(report.weak_scale),
            fmt_f64(report.strong_scale),
            fmt_f64(report.cr),
            fmt_f64(report.qcr),
            fmt_f64(report.zz_exact),
            fmt_f64(report.zz_closed),
            fmt_f64(report.bcr),
            fmt_f64(d.c1),
            fmt_f64(d.c2),
            fmt_f64(d.mnu2),
            d.c1_ok,
            d.c2_ok,
            rmse
        )
        .unwrap();
    }

    print!("{csv}");
    params.ensure_outdir()?;
    let csv_path = params.out.join("sweep.csv");
    write_atomic(&csv_path, &csv)?;

    let mut manifest = RunManifest::new("sweep");
    params.record(&mut manifest);
    manifest.param("sweep_param", param_name);
    manifest.param("sweep_values", values);
    manifest.param("with_mc", with_mc);
    if let Some(mnu2) = hold_mnu2 {
        manifest.param_f64("hold_mnu2", mnu2);
    }
    manifest.output(&csv_path);
    manifest.write(&params.out, "sweep")?;
    Ok(())
}

fn cmd_reproduce(figure: Figure, common: &CommonArgs) -> Result<(), CliError> {
    let mut params = Params::resolve(common)?;
    // reference parameter sets; only output location, seed, trials, and
    // quadrature tolerance remain configurable
    params.w = 1e-3;
    params.nbar = 1.0;
    params.phi = 1e-4;
    let stem = match figure {
        Figure::Fig1 => {
            params.m = 1_000_000;
            params.nu = 0.1;
            "reproduce_fig1"
        }
        Figure::Fig2 => {
            params.m = 16_000;
            params.nu = 0.03;
            "reproduce_fig2"
        }
    };
    let probe = params.probe()?;
    let prior = params.prior()?;
    let phi = params.phase()?;

    let (exact, gauss) = curve_pair(&probe, phi, params.m)?;
    let (_, var_e) = posterior_moments(&exact);
    let (_, var_g) = posterior_moments(&gauss);
    let sigma = var_g.sqrt();
    let report = full_report(&probe, &prior, params.m, phi, params.tol)?;
    let diagnostics = condition_diagnostics(&probe, &prior, params.m)?;

    let rows: Vec<(&str, String)> = vec![
        ("sqrt_variance", fmt_f64(sigma)),
        ("sqrt_variance_exact", fmt_f64(var_e.sqrt())),
        ("marker_phi", fmt_f64(params.phi)),
        ("marker_W", fmt_f64(params.w)),
        ("ratio_vs_weak", fmt_f64(sigma / report.weak_scale)),
        ("ratio_vs_prior", fmt_f64(sigma / params.w)),
        ("ratio_vs_strong", fmt_f64(sigma / report.strong_scale)),
        ("zz_exact", fmt_f64(report.zz_exact)),
        ("zz_closed", fmt_f64(report.zz_closed)),
        ("curve_deviation", fmt_f64(curve_deviation(&exact, &gauss))),
        ("c1", fmt_f64(diagnostics.c1)),
        ("c2", fmt_f64(diagnostics.c2)),
        ("c1_ok", diagnostics.c1_ok.to_string()),
        ("c2_ok", diagnostics.c2_ok.to_string()),
    ];
    for (name, value) in &rows {
        println!("{name:<22} {value}");
    }

    params.ensure_outdir()?;
    let curves_path = params.out.join(format!("{stem}_curves.csv"));
    write_atomic(&curves_path, &curves_csv(&exact, &gauss))?;
    let mut csv = String::from("quantity,value\n");
    for (name, value) in &rows {
        writeln!(csv, "{name},{value}").unwrap();
    }
    let summary_path = params.out.join(format!("{stem}_summary.csv"));
    write_atomic(&summary_path, &csv)?;

    let mut manifest = RunManifest::new(&format!("reproduce {stem}"));
    params.record(&mut manifest);
    manifest.output(&curves_path);
    manifest.output(&summary_path);
    manifest.write(&params.out, stem)?;
    Ok(())
}
