mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AtomSpec, CliError, KernelName};
use config::{parse_pairs, ConfigError, RunConfig};

/// Fourier-Bessel kernels, maximal functions and Hardy-space atoms on (0, 1).
#[derive(Debug, Parser)]
#[command(name = "fbh", version)]
struct Cli {
    /// Config file of `key = value` lines layered over the shipped defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Bessel order, > -1/2.
    #[arg(long, global = true, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override any config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Positive zeros of J_nu as CSV `n,lambda`.
    Zeros {
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Kernel values on a uniform point grid as CSV `t,x,y,value`.
    Kernel {
        #[arg(long, value_enum, default_value = "calP")]
        kind: KernelName,
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.5, 1.0])]
        times: Vec<f64>,
        /// Points per axis, spaced `i / (points + 1)`.
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Ratio of a kernel to its claimed bound over a grid.
    Estimates {
        /// sharp-calP, sharp-P, grad-calP, delta-P, dy-P, heat-halfline,
        /// heat-halfline-grad, heat-L-upper or heat-L-large.
        #[arg(long, default_value = "sharp-calP")]
        lemma: String,
        /// Nodes per axis; the config key `grid` when absent.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Maximal function of a sampled input: CSV `x,value` plus a JSON summary.
    Maximal {
        /// phi1, psi1, quadratic or bump.
        #[arg(long, default_value = "quadratic", conflicts_with = "input")]
        function: String,
        /// CSV `x,value` table, interpolated onto the quadrature nodes.
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// calP, P, calT, T-halfline or P-halfline.
        #[arg(long, default_value = "calP")]
        kind: String,
    },
    /// Residuals of the cutoff identity for a bump input.
    Duhamel {
        #[arg(long, default_value_t = 0.3)]
        t: f64,
        #[arg(long, default_value_t = 0.25)]
        center: f64,
        #[arg(long, default_value_t = 0.2)]
        radius: f64,
    },
    /// Size and smoothness constants of a localized kernel family.
    Uchiyama {
        /// calK, K or K_r.
        #[arg(long, default_value = "calK")]
        family: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        j: i32,
    },
    /// Validate, decompose into, or sample atoms.
    Atoms {
        #[command(subcommand)]
        action: AtomsCommand,
    },
    /// Maximal-function norm against the atomic norm, with a refinement check.
    H1Report {
        #[arg(long, default_value = "phi1")]
        function: String,
        /// I (Bessel measure) or J (Lebesgue); `calL` and `L` are accepted too.
        #[arg(long, default_value = "I")]
        family: String,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Radial Dirichlet problem in the unit ball: CSV `t,x,value` of `u(x, t)`.
    Dirichlet {
        #[arg(long, default_value = "phi1", conflicts_with = "input")]
        function: String,
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// Ambient dimension n >= 2; sets nu = n/2 - 1.
        #[arg(long, conflicts_with = "nu")]
        dim: Option<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.25, 0.5, 1.0])]
        times: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum AtomsCommand {
    /// Check support, size and cancellation of one atom.
    Validate {
        #[arg(long, default_value = "I")]
        family: String,
        /// Special atom on the j-th cell.
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["interval", "breaks"])]
        special: Option<i32>,
        /// `a,b`; alone it gives the Haar atom of the interval.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', requires = "heights", allow_negative_numbers = true)]
        breaks: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', requires = "breaks", allow_negative_numbers = true)]
        heights: Option<Vec<f64>>,
    },
    /// Atomic decomposition of a named function.
    Decompose {
        #[arg(long, default_value = "quadratic")]
        function: String,
        #[arg(long, default_value = "I")]
        family: String,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Seeded random atoms with their validation results.
    Batch {
        #[arg(long, default_value = "I")]
        family: String,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        max_scale: Option<u32>,
        /// Also compute each atom's maximal-function norm.
        #[arg(long)]
        norms: bool,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut layers = Vec::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.clone(),
            source,
        })?;
        layers.push(parse_pairs(&text)?);
    }
    let mut flags = Vec::new();
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::Invalid(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        flags.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(nu) = cli.nu {
        flags.push(("nu".into(), nu.to_string()));
    }
    if let Command::Dirichlet { dim: Some(n), .. } = cli.command {
        flags.push(("nu".into(), (f64::from(n) / 2.0 - 1.0).to_string()));
    }
    if let Some(seed) = cli.seed {
        flags.push(("seed".into(), seed.to_string()));
    }
    layers.push(flags);
    RunConfig::layered(&layers)
}

fn run(cli: &Cli) -> Result<Vec<output::Artifact>, CliError> {
    let cfg = load_config(cli)?;
    if cli.show_config {
        return Ok(vec![output::Artifact::json("config.json", &cfg).map_err(|e| CliError::Failed {
            operation: "serialize".into(),
            detail: e.to_string(),
        })?]);
    }
    match &cli.command {
        Command::Zeros { count } => commands::zeros(&cfg, *count),
        Command::Kernel { kind, times, points } => commands::kernel(&cfg, *kind, times, *points),
        Command::Estimates { lemma, grid } => commands::estimates(&cfg, lemma, *grid),
        Command::Maximal { function, input, kind } => commands::maximal(&cfg, function, input.as_deref(), kind),
        Command::Duhamel { t, center, radius } => commands::duhamel(&cfg, *t, *center, *radius),
        Command::Uchiyama { family, j } => commands::uchiyama(&cfg, family, *j),
        Command::Atoms { action } => match action {
            AtomsCommand::Validate {
                family,
                special,
                interval,
                breaks,
                heights,
            } => {
                let iv = match interval.as_deref() {
                    None => None,
                    Some(&[a, b]) => Some((a, b)),
                    Some(_) => return Err(ConfigError::Invalid("--interval expects `a,b`".into()).into()),
                };
                let spec = match (special, breaks, heights, iv) {
                    (Some(j), ..) => AtomSpec::Special(*j),
                    (None, Some(b), Some(h), iv) => AtomSpec::Step {
                        interval: iv,
                        breaks: b.clone(),
                        heights: h.clone(),
                    },
                    (None, _, _, Some(iv)) => AtomSpec::Haar(iv),
                    _ => AtomSpec::Special(0),
                };
                commands::atoms_validate(&cfg, family, spec)
            }
            AtomsCommand::Decompose { function, family, depth } => commands::atoms_decompose(&cfg, function, family, *depth),
            AtomsCommand::Batch {
                family,
                count,
                max_scale,
                norms,
            } => commands::atoms_batch(&cfg, family, *count, *max_scale, *norms),
        },
        Command::H1Report { function, family, depth } => commands::h1_report(&cfg, function, family, *depth),
        Command::Dirichlet { function, input, times, .. } => commands::dirichlet(&cfg, function, input.as_deref(), times),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|arts| {
        match &cli.out {
            Some(dir) => output::write_atomic(dir, &arts)?,
            None => output::write_stdout(&arts)?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(c) => eprintln!("error: {c}"),
                _ => eprintln!("{}", serde_json::json!({"operation": e.operation(), "error": e.to_string()})),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
