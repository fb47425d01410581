//! Command-line front end: one subcommand per library capability.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use harmonia::analysis::{Analysis, GridConfig};
use harmonia::config::ExperimentConfig;
use harmonia::heat::{heat_config, heat_kernel, heat_span_projection, parse_times};
use harmonia::io::{read_radial_csv, write_line, write_radial};
use harmonia::operators::{fundamental_solution, identify_operator, solve, BuiltinOperator};
use harmonia::radial::{apply_polynomial, LaplacePolynomial, RadialGrid, RadialProfile};
use harmonia::spherical::spherical_function;
use harmonia::suite::{run_suite, Suite};
use harmonia::{Error, ModelSpace};

#[derive(Parser)]
#[command(name = "harmonia", version, about = "Radial harmonic analysis on harmonic model spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand; flags override the config file.
#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Space: e<n>, h<n>, euclidean:<n>, hyperbolic:<n>, damek-ricci:<p>:<q>.
    #[arg(long, global = true)]
    space: Option<String>,
    /// Radius of the computational window.
    #[arg(long, global = true)]
    rmax: Option<f64>,
    /// Number of radial collocation nodes.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Largest spectral parameter on the λ-grid.
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    /// Number of λ-grid nodes.
    #[arg(long, global = true)]
    lambda_nodes: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Spherical function φ_λ on the radial grid, as CSV.
    Phi {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Imaginary part of λ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Abel transform of a radial profile CSV.
    Abel {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Radial convolution of two profile CSVs.
    Conv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fundamental solution of P(Δ) in the Abel domain, as a line CSV.
    Fundsol {
        /// Coefficients of P, low to high, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[command(flatten)]
        common: Common,
    },
    /// Solves P(Δ)u = f for a radial right-hand side.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        rhs: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Recovers P with L = P(Δ) for a built-in radial operator.
    Identify {
        /// builtin:laplacian, builtin:laplacian2, builtin:r2 or builtin:poly:<coeffs>.
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 4)]
        mbound: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Heat kernel h_t, as CSV.
    Heat {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Projection of a target onto the span of heat kernels, as JSON.
    HeatSpan {
        #[arg(long)]
        target: PathBuf,
        /// log:<t0>:<t1>:<count> or a comma-separated list.
        #[arg(long)]
        times: String,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a verification suite and writes its JSON report.
    Verify {
        /// cheigf, abel, algebra, fundsol, heat or all.
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

/// Process outcome: exit code plus message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => 2,
            Error::Capability(_) | Error::ResonantSymbol(_) => 3,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads().and_then(|()| run(cli.command)) {
        eprintln!("harmonia: {}", f.message);
        return ExitCode::from(f.code);
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> Outcome {
    let Ok(value) = std::env::var("HARMONIA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("HARMONIA_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))?;
    Ok(())
}

impl Common {
    /// Config file (or defaults) with the command-line overrides applied.
    fn experiment(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(space) = &self.space {
            config.space = space.clone();
        }
        let grid = &mut config.grid;
        if let Some(r) = self.rmax {
            grid.r_max = r;
        }
        if let Some(n) = self.nodes {
            grid.radial_nodes = n;
        }
        if let Some(l) = self.lambda_max {
            grid.lambda_max = l;
        }
        if let Some(k) = self.lambda_nodes {
            grid.lambda_nodes = k;
        }
        if let Some(out) = &self.out {
            config.output = Some(out.clone());
        }
        config.validate()?;
        Ok(config)
    }

    fn analysis(&self) -> Result<(ExperimentConfig, Analysis), Error> {
        let config = self.experiment()?;
        let analysis = Analysis::new(config.model_space()?, config.grid.clone())?;
        Ok((config, analysis))
    }
}

fn output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<(), Error>) -> Result<(), Error> {
    match path {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            write(&mut file)
        }
        None => write(&mut std::io::stdout().lock()),
    }
}

fn read_profile(path: &Path, analysis: &Analysis) -> Result<RadialProfile, Error> {
    read_radial_csv(path, &analysis.profile(|_| 0.0))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Phi { lambda, lambda_im, common } => {
            let config = common.experiment()?;
            let grid = Arc::new(RadialGrid::new(config.grid.r_max, config.grid.radial_nodes)?);
            let phi = spherical_function(&config.model_space()?, Complex64::new(lambda, lambda_im), grid)?;
            output(config.output.as_deref(), |w| write_radial(w, &phi))?;
        }
        Command::Abel { input, common } => {
            let (config, a) = common.analysis()?;
            let line = a.abel_transform(&read_profile(&input, &a)?)?;
            output(config.output.as_deref(), |w| write_line(w, &line))?;
        }
        Command::Conv { a: first, b: second, common } => {
            let (config, a) = common.analysis()?;
            let uv = a.radial_convolve(&read_profile(&first, &a)?, &read_profile(&second, &a)?)?;
            output(config.output.as_deref(), |w| write_radial(w, &uv))?;
        }
        Command::Fundsol { poly, common } => {
            let (config, a) = common.analysis()?;
            let p = LaplacePolynomial::parse(&poly)?;
            let fundamental = fundamental_solution(a.space(), &p)?;
            eprintln!("decay rate {:.6}, delta residual {:.3e}", fundamental.decay_rate(), fundamental.delta_residual(0.05));
            output(config.output.as_deref(), |w| write_line(w, &fundamental.line_profile(&a)))?;
        }
        Command::Solve { poly, rhs, common } => {
            let (config, a) = common.analysis()?;
            let p = LaplacePolynomial::parse(&poly)?;
            let f = read_profile(&rhs, &a)?;
            let u = solve(&a, &p, &f)?;
            let residual = apply_polynomial(a.space(), &p, &u)?.max_abs_diff(&f)? / f.sup_norm().max(f64::MIN_POSITIVE);
            eprintln!("relative residual {residual:.3e}");
            output(config.output.as_deref(), |w| write_radial(w, &u))?;
        }
        Command::Identify { op, mbound, common } => {
            let config = common.experiment()?;
            let space = config.model_space()?;
            let operator = BuiltinOperator::parse(&op)?;
            let p = identify_operator(&space, |u| operator.apply(&space, u), mbound)?;
            let coeffs: Vec<[f64; 2]> = p.coeffs().iter().map(|c| [c.re, c.im]).collect();
            let report = json!({ "space": space.to_string(), "operator": op, "polynomial": p.to_string(), "coefficients": coeffs });
            output(config.output.as_deref(), |w| Ok(writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?))?;
        }
        Command::Heat { t, common } => {
            let config = common.experiment()?;
            let space = config.model_space()?;
            let a = Analysis::new(space, heat_grid(&space, &config, t))?;
            let kernel = heat_kernel(&a, t)?;
            output(config.output.as_deref(), |w| write_radial(w, kernel.profile()))?;
        }
        Command::HeatSpan { target, times, common } => {
            let config = common.experiment()?;
            let space = config.model_space()?;
            let times = parse_times(&times)?;
            let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
            let a = Analysis::new(space, heat_grid(&space, &config, t_min))?;
            let report = heat_span_projection(&a, &read_profile(&target, &a)?, &times)?;
            let body = json!({
                "space": space.to_string(),
                "relative_l1_residual": report.relative_l1_residual(),
                "report": report,
            });
            output(config.output.as_deref(), |w| Ok(writeln!(w, "{}", serde_json::to_string_pretty(&body)?)?))?;
        }
        Command::Verify { suite, seed, samples, common } => {
            let suite = Suite::parse(&suite)?;
            let mut config = common.experiment()?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(samples) = samples {
                config.samples = samples;
            }
            config.validate()?;
            let report = run_suite(&config, suite)?;
            output(config.output.as_deref(), |w| Ok(writeln!(w, "{}", report.to_json())?))?;
            let failures: Vec<&str> = report.failures().map(|e| e.check_name.as_str()).collect();
            if !failures.is_empty() {
                return Err(Failure { code: 1, message: format!("failed checks: {}", failures.join(", ")) });
            }
        }
    }
    Ok(())
}

/// The configured grid, widened in λ when `t` needs it.
fn heat_grid(space: &ModelSpace, config: &ExperimentConfig, t: f64) -> GridConfig {
    if t > 0.0 {
        heat_config(space, config.grid.clone(), t)
    } else {
        config.grid.clone()
    }
}
