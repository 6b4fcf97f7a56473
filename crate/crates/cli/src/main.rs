mod config;

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use mist_core::advantage::group_advantages;
use mist_core::exec::{
    build_kill_matrix, default_workers, ExecError, Executor, JobRunner, KillMatrix, Limits, ProcessRunner,
    ReplayRunner, DEFAULT_RUNNER,
};
use mist_core::mutation::{generate_mutants_with, manifest_json, parse_manifest, Category, MutationOptions, Mutant, Regeneration, Weighting};
use mist_core::prompt::render_prompt;
use mist_core::repair::{backtrack_repair, extract_code_block, DEFAULT_MAX_BACKTRACK};
use mist_core::rerank::{build_consensus, Named};
use mist_core::reward::score_trajectory;
use mist_core::suite::{curve_csv, greedy_select, minimize_suite, mutation_score, selection_json, utility_curve};
use mist_core::syntax::parse_source;
use serde::Deserialize;

use config::FileConfig;

#[derive(Parser)]
#[command(name = "mist", version, about = "Mutation testing and test-suite utility for Python code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// Flat TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Runner command line, whitespace separated (default: MIST_RUNNER or
    /// `python3 -u -m mist_runner`).
    #[arg(long)]
    runner: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    timeout: Option<f64>,
    /// Address-space cap per runner process, in MiB.
    #[arg(long)]
    memory_mb: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate first-order mutants and print the manifest.
    Mutate {
        src: PathBuf,
        #[arg(long, value_delimiter = ',')]
        categories: Vec<String>,
        #[arg(long)]
        limit: Option<usize>,
        /// Weight mutants by control-flow nesting depth.
        #[arg(long)]
        weights: bool,
        #[arg(long, default_value_t = 0.25)]
        lambda: f64,
        /// Regenerate the whole module instead of splicing the edit.
        #[arg(long)]
        unparse: bool,
    },
    /// Run every test method against the source and each mutant; print CSV.
    Matrix {
        src: PathBuf,
        tests: PathBuf,
        #[arg(long)]
        mutants: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Mutation score of a suite over a kill matrix.
    Score {
        matrix: PathBuf,
        /// Comma-separated test ids (default: every test in the matrix).
        #[arg(long, value_delimiter = ',')]
        suite: Option<Vec<String>>,
    },
    /// Score a suite method by method and print the reward trace.
    Reward {
        src: Option<PathBuf>,
        suite: Option<PathBuf>,
        #[arg(long)]
        mutants: Option<PathBuf>,
        /// Smoke-test module used to pre-filter mutants.
        #[arg(long)]
        smoke: Option<PathBuf>,
        /// Answer from a recorded kill matrix instead of running tests.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Print the effective configuration and exit.
        #[arg(long)]
        show_config: bool,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Group-relative advantages of trajectory rewards.
    Advantages {
        #[arg(allow_negative_numbers = true, required = true)]
        rewards: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        sigma_eps: f64,
    },
    /// Greedy selection of up to k tests.
    Select {
        matrix: PathBuf,
        #[arg(short)]
        k: usize,
        /// Manifest supplying mutant weights (default: all 1).
        #[arg(long)]
        mutants: Option<PathBuf>,
    },
    /// Drop tests that add nothing to a suite's coverage.
    Minimize {
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
        #[arg(long)]
        mutants: Option<PathBuf>,
    },
    /// Marginal gain and cumulative score along an ordering.
    Curve {
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        #[arg(long)]
        mutants: Option<PathBuf>,
    },
    /// Rank code candidates by how many suites they fully pass.
    Rerank {
        manifest: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Extract the first fenced code block and trim it to a parseable prefix.
    Repair {
        /// Input file (default: standard input).
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_BACKTRACK)]
        max_backtrack: usize,
        /// Skip code-block extraction.
        #[arg(long)]
        raw: bool,
    },
    /// Print the test-generation prompt.
    Prompt {
        #[arg(long)]
        question: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Domain(anyhow::Error),
    Usage(anyhow::Error),
    Infra(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Infra(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Domain(e) | Failure::Usage(e) | Failure::Infra(e) => e,
        }
    }
}

impl From<ExecError> for Failure {
    fn from(e: ExecError) -> Self {
        match e {
            ExecError::Unrecorded(_) => Failure::Domain(e.into()),
            _ => Failure::Infra(e.into()),
        }
    }
}

type Outcome = Result<String, Failure>;

trait Classify<T> {
    fn domain(self) -> Result<T, Failure>;
    fn usage(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn domain(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Domain(e.into()))
    }

    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .usage()
}

fn load_mutants(path: &Path) -> Result<Vec<Mutant>, Failure> {
    parse_manifest(&read(path)?)
        .with_context(|| format!("parsing manifest {}", path.display()))
        .domain()
}

fn load_matrix(path: &Path, mutants: Option<&Path>) -> Result<KillMatrix, Failure> {
    let manifest = mutants.map(load_mutants).transpose()?;
    KillMatrix::from_csv(&read(path)?, manifest.as_deref())
        .with_context(|| format!("reading matrix {}", path.display()))
        .domain()
}

fn runner_command(flag: Option<&str>) -> Vec<String> {
    let from_env = std::env::var("MIST_RUNNER").ok();
    match flag.or(from_env.as_deref()) {
        Some(cmd) if !cmd.trim().is_empty() => cmd.split_whitespace().map(String::from).collect(),
        _ => DEFAULT_RUNNER.iter().map(|s| s.to_string()).collect(),
    }
}

fn executor(opts: &RunOpts, cfg: &FileConfig, runner: Option<Arc<dyn JobRunner>>) -> Executor {
    let workers = if cfg.workers > 0 { cfg.workers } else { default_workers() };
    let limits = Limits {
        timeout: cfg.timeout(),
        memory_mb: opts.memory_mb,
    };
    let runner = runner.unwrap_or_else(|| Arc::new(ProcessRunner::new(runner_command(opts.runner.as_deref()))));
    Executor::new(runner, workers, limits)
}

fn check_run_opts(opts: &RunOpts) -> Result<FileConfig, Failure> {
    if let Some(t) = opts.timeout {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(anyhow!("--timeout must be positive")));
        }
    }
    let mut cfg = FileConfig::load(opts.config.as_deref()).usage()?;
    // flags win over the environment and the file
    if let Some(w) = opts.workers {
        cfg.workers = w;
    }
    if let Some(t) = opts.timeout {
        cfg.timeout_s = t;
    }
    Ok(cfg)
}

fn require<'a>(arg: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, Failure> {
    arg.as_deref()
        .ok_or_else(|| Failure::Usage(anyhow!("missing required argument {name}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    id: String,
    path: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RerankManifest {
    candidates: Vec<Entry>,
    suites: Vec<Entry>,
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Mutate {
            src,
            categories,
            limit,
            weights,
            lambda,
            unparse,
        } => {
            let categories: BTreeSet<Category> = if categories.is_empty() {
                Category::all()
            } else {
                categories
                    .iter()
                    .map(|c| c.trim().to_ascii_uppercase().parse::<Category>())
                    .collect::<Result<_, _>>()
                    .usage()?
            };
            if limit == Some(0) {
                return Err(Failure::Usage(anyhow!("--limit must be positive")));
            }
            let unit = parse_source(&read(&src)?).domain()?;
            let opts = MutationOptions {
                categories,
                limit,
                weighting: Weighting {
                    enabled: weights,
                    lambda,
                },
                regeneration: if unparse { Regeneration::Unparse } else { Regeneration::Splice },
            };
            Ok(manifest_json(&generate_mutants_with(&unit, &opts)))
        }
        Command::Matrix {
            src,
            tests,
            mutants,
            run,
        } => {
            let cfg = check_run_opts(&run)?;
            let source = read(&src)?;
            parse_source(&source).domain()?;
            let tests = read(&tests)?;
            let mutants = load_mutants(&mutants)?;
            let exec = executor(&run, &cfg, None);
            Ok(build_kill_matrix(&exec, &source, &mutants, &tests)?.to_csv())
        }
        Command::Score { matrix, suite } => {
            let m = load_matrix(&matrix, None)?;
            let suite = suite.unwrap_or_else(|| m.tests.clone());
            Ok(format!("{}\n", mutation_score(&m, &suite).domain()?))
        }
        Command::Reward {
            src,
            suite,
            mutants,
            smoke,
            matrix,
            show_config,
            run,
        } => {
            let cfg = check_run_opts(&run)?;
            if show_config {
                return Ok(cfg.to_toml());
            }
            let source = read(require(&src, "<SRC>")?)?;
            parse_source(&source).domain()?;
            let suite = read(require(&suite, "<SUITE>")?)?;
            let mutants = load_mutants(require(&mutants, "--mutants")?)?;
            let smoke = smoke.as_deref().map(read).transpose()?;
            let replay: Option<Arc<dyn JobRunner>> = match &matrix {
                Some(p) => {
                    let recorded = load_matrix(p, None)?;
                    Some(Arc::new(ReplayRunner::from_matrix(&recorded, &source, &mutants)))
                }
                None => None,
            };
            let exec = executor(&run, &cfg, replay);
            let trace = score_trajectory(&exec, &source, &mutants, &suite, &cfg.reward(), smoke.as_deref())
                .map_err(|e| match e {
                    mist_core::reward::ScoreError::Exec(e) => Failure::from(e),
                    other => Failure::Domain(other.into()),
                })?;
            Ok(trace.to_json())
        }
        Command::Advantages { rewards, sigma_eps } => {
            if !(sigma_eps > 0.0) {
                return Err(Failure::Usage(anyhow!("--sigma-eps must be positive")));
            }
            let a = group_advantages(&rewards, sigma_eps).domain()?;
            Ok(a.iter().map(|v| format!("{v}\n")).collect())
        }
        Command::Select { matrix, k, mutants } => {
            let m = load_matrix(&matrix, mutants.as_deref())?;
            let s = greedy_select(&m, k);
            selection_json(&m, &s.order, &s.gains).domain()
        }
        Command::Minimize { matrix, suite, mutants } => {
            let m = load_matrix(&matrix, mutants.as_deref())?;
            let kept = minimize_suite(&m, &suite).domain()?;
            let curve = utility_curve(&m, &kept).domain()?;
            let gains: Vec<f64> = curve.iter().map(|p| p.marginal_gain).collect();
            selection_json(&m, &kept, &gains).domain()
        }
        Command::Curve { matrix, order, mutants } => {
            let m = load_matrix(&matrix, mutants.as_deref())?;
            Ok(curve_csv(&utility_curve(&m, &order).domain()?))
        }
        Command::Rerank { manifest, run } => {
            let cfg = check_run_opts(&run)?;
            let spec: RerankManifest = serde_json::from_str(&read(&manifest)?)
                .with_context(|| format!("parsing {}", manifest.display()))
                .domain()?;
            if spec.candidates.is_empty() || spec.suites.is_empty() {
                return Err(Failure::Domain(anyhow!("rerank needs at least one candidate and one suite")));
            }
            let base = manifest.parent().unwrap_or(Path::new("."));
            let load = |entries: &[Entry]| -> Result<Vec<Named>, Failure> {
                entries
                    .iter()
                    .map(|e| {
                        Ok(Named {
                            id: e.id.clone(),
                            source: read(&base.join(&e.path))?,
                        })
                    })
                    .collect()
            };
            let candidates = load(&spec.candidates)?;
            let suites = load(&spec.suites)?;
            let exec = executor(&run, &cfg, None);
            Ok(build_consensus(&exec, &candidates, &suites)?.to_json())
        }
        Command::Repair {
            input,
            max_backtrack,
            raw,
        } => {
            let text = match &input {
                Some(p) => read(p)?,
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).context("reading standard input").usage()?;
                    s
                }
            };
            let code = if raw { text } else { extract_code_block(&text) };
            let mut fixed = backtrack_repair(&code, max_backtrack).domain()?;
            if !fixed.ends_with('\n') {
                fixed.push('\n');
            }
            Ok(fixed)
        }
        Command::Prompt { question, solution } => Ok(render_prompt(&read(&question)?, &read(&solution)?)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("mist: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
