use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use llscond::catalog::GrattonWeights;
use llscond::conditioning::OptimizerConfig;
use llscond::family::{ExampleSpec, PaperExample};
use llscond::io::{ingest, write_matrix_market, write_rhs};
use llscond::perturb::{TrialConfig, DEFAULT_SLACK};
use llscond::report::{
    analyze, catalog_report, example_report, perturb_report, render, AnalysisOptions, ErrorReport, OutputFormat,
    ScaleChoice,
};
use llscond::{Error, LlsProblem};

#[derive(Parser, Debug)]
#[command(
    name = "llscond",
    version,
    about = "Condition numbers and error bounds for full-column-rank least squares"
)]
struct Cli {
    /// Output format: text, json or csv.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: OutputFormat,

    /// Seed for the optimizer restarts and perturbation trials.
    #[arg(long, global = true, env = "LLSCOND_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geometry, condition numbers, bounds and catalog for one problem.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Also compute the exact condition number w.r.t. A.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value = "default", value_parser = parse_scales)]
        scales: ScaleChoice,
        /// Optimizer starts for --exact.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value = "default", value_parser = parse_weights)]
        gratton_weights: GrattonWeights,
        /// Perturbation size used to evaluate bound coefficients.
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// Random perturbation trials against the first-order bound.
    Perturb {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Allowed ratio excess before a trial counts as a violation.
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
    },
    /// Literature condition numbers and bound coefficients.
    Catalog {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "default", value_parser = parse_scales)]
        scales: ScaleChoice,
        #[arg(long, default_value = "default", value_parser = parse_weights)]
        gratton_weights: GrattonWeights,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// Closed forms of the three-parameter example next to computed values.
    PaperExample {
        /// Example parameters, e.g. alpha=0.1,beta=1,phi=pi/10,eps=1e-8.
        #[arg(long, default_value = "", value_parser = parse_example)]
        example: ExampleSpec,
        /// Also write A, b and ΔA as files into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Matrix file (MatrixMarket or CSV).
    matrix: Option<PathBuf>,
    /// Right-hand side file (one value per line, or CSV).
    rhs: Option<PathBuf>,
    /// Use the built-in example instead of files, e.g. alpha=0.1,beta=1,phi=pi/10.
    #[arg(long, value_parser = parse_example, conflicts_with_all = ["matrix", "rhs"])]
    example: Option<ExampleSpec>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scales(s: &str) -> Result<ScaleChoice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_example(s: &str) -> Result<ExampleSpec, String> {
    ExampleSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_weights(s: &str) -> Result<GrattonWeights, String> {
    if s.trim().eq_ignore_ascii_case("default") {
        return Ok(GrattonWeights::default());
    }
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected 'a,b' or 'default', got '{s}'"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad weight '{a}'"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad weight '{b}'"))?;
    GrattonWeights::new(a, b).map_err(|e| e.to_string())
}

enum Loaded {
    Files(LlsProblem, String),
    Example(Box<PaperExample>),
}

impl Loaded {
    fn problem(&self) -> &LlsProblem {
        match self {
            Loaded::Files(p, _) => p,
            Loaded::Example(ex) => &ex.problem,
        }
    }

    fn source(&self) -> String {
        match self {
            Loaded::Files(_, s) => s.clone(),
            Loaded::Example(ex) => format!(
                "example alpha={} beta={} phi={} eps={}",
                ex.spec.alpha, ex.spec.beta, ex.spec.phi, ex.spec.epsilon
            ),
        }
    }

    fn example(&self) -> Option<&PaperExample> {
        match self {
            Loaded::Example(ex) => Some(ex),
            Loaded::Files(..) => None,
        }
    }
}

fn load(input: &Input) -> Result<Loaded, Error> {
    match (&input.example, &input.matrix, &input.rhs) {
        (Some(spec), _, _) => {
            let ex = spec.build()?;
            for w in &ex.warnings {
                eprintln!("warning: {w}");
            }
            Ok(Loaded::Example(Box::new(ex)))
        }
        (None, Some(m), Some(b)) => {
            let p = ingest(m, b)?;
            Ok(Loaded::Files(p, format!("{} {}", m.display(), b.display())))
        }
        _ => Err(Error::InvalidConfig(
            "give a matrix file and a right-hand side file, or --example".into(),
        )),
    }
}

fn write_example_files(dir: &Path, spec: &ExampleSpec) -> Result<(), Error> {
    let io_err = |path: &Path, e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, body) in [
        ("a.mtx", write_matrix_market(&spec.matrix())),
        ("b.vec", write_rhs(&spec.rhs())),
        ("delta_a.mtx", write_matrix_market(&spec.delta_a())),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Command::Analyze {
            input,
            exact,
            scales,
            restarts,
            gratton_weights,
            eps,
        } => {
            let loaded = load(input)?;
            let opts = AnalysisOptions {
                scales: *scales,
                exact: *exact,
                optimizer: OptimizerConfig {
                    restarts: *restarts,
                    seed: cli.seed,
                    ..OptimizerConfig::default()
                },
                gratton: *gratton_weights,
                eps: *eps,
            };
            let rep = analyze(loaded.problem(), &loaded.source(), &opts, loaded.example())?;
            render(&rep, cli.format)
        }
        Command::Perturb {
            input,
            trials,
            eps,
            slack,
        } => {
            let loaded = load(input)?;
            let cfg = TrialConfig {
                slack: *slack,
                ..TrialConfig::new(*trials, *eps, cli.seed)
            };
            let rep = perturb_report(loaded.problem(), &loaded.source(), &cfg)?;
            render(&rep, cli.format)
        }
        Command::Catalog {
            input,
            scales,
            gratton_weights,
            eps,
        } => {
            let loaded = load(input)?;
            let opts = AnalysisOptions {
                scales: *scales,
                gratton: *gratton_weights,
                eps: *eps,
                ..AnalysisOptions::default()
            };
            let rep = catalog_report(loaded.problem(), &loaded.source(), &opts)?;
            render(&rep, cli.format)
        }
        Command::PaperExample { example, out_dir } => {
            let rep = example_report(example)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(dir) = out_dir {
                write_example_files(dir, example)?;
            }
            render(&rep, cli.format)
        }
    }
}

/// `--format json` as typed, for reporting argument errors before parsing
/// has succeeded.
fn wants_json(args: &[String]) -> bool {
    args.windows(2).any(|w| w[0] == "--format" && w[1].eq_ignore_ascii_case("json"))
        || args.iter().any(|a| a.eq_ignore_ascii_case("--format=json"))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() && wants_json(&args) => {
            let report = ErrorReport {
                error: e
                    .to_string()
                    .lines()
                    .next()
                    .unwrap_or_default()
                    .trim_start_matches("error: ")
                    .to_string(),
                kind: "validation".into(),
                exit_code: 2,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            eprint!("{e}");
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let report = ErrorReport::new(&err);
            if cli.format == OutputFormat::Json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            } else {
                eprintln!("error ({}): {err}", report.kind);
            }
            ExitCode::from(report.exit_code as u8)
        }
    }
}
