use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use oscillation_core::morphology::oscillation;
use oscillation_harness::checks::generate_input;
use oscillation_harness::format::save_grid_function;
use oscillation_harness::scenario::{self, RunOutput};
use oscillation_harness::spec::{CheckKind, CheckSpec, Expect, InputSpec, ModeDto, Params, Scenario, SweepDto};
use oscillation_harness::{examples, Parallel};

#[derive(Parser)]
#[command(name = "osc", version, about = "Oscillation seminorm and approach-map checks")]
struct Cli {
    /// Worker threads; defaults to every available core.
    #[arg(long, global = true, env = "OSC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write `osc_r f` of an input as a grid file.
    Osc {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        r: f64,
        #[arg(long, value_enum, default_value = "open")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "osc")]
        stem: String,
    },
    /// δ-sweep of `∫ osc_δ g` with CSV output.
    Sweep(SweepArgs),
    /// Seminorm estimate, optionally compared with a reference value.
    Seminorm(SweepArgs),
    /// Run a single inequality check.
    Verify {
        #[arg(value_enum)]
        check: VerifyKind,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Parameters as inline JSON or a path to a JSON file.
        #[arg(long)]
        params: Option<String>,
        #[arg(long, value_enum, default_value = "pass")]
        expect: ExpectArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The two worked examples.
    Example {
        #[arg(value_enum)]
        which: ExampleKind,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Component offset of the disconnected example.
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArg {
    /// Grid header or generator JSON.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArg,
    /// Sweep `osc_r f` instead of `f`.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "open")]
    mode: Mode,
    #[arg(long, requires_all = ["delta_max", "ratio"])]
    delta_min: Option<f64>,
    #[arg(long)]
    delta_max: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    expected: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Open,
    Closed,
}

impl From<Mode> for ModeDto {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Open => ModeDto::Open,
            Mode::Closed => ModeDto::Closed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Thm1,
    Thm2,
    Sandwich,
    Density,
    Continuity,
    Contraction,
    Derivative,
    Lemma3,
    Coarea,
    OpenClosed,
    Decomposition,
}

impl From<VerifyKind> for CheckKind {
    fn from(k: VerifyKind) -> Self {
        match k {
            VerifyKind::Thm1 => CheckKind::Thm1,
            VerifyKind::Thm2 => CheckKind::Thm2,
            VerifyKind::Sandwich => CheckKind::Sandwich,
            VerifyKind::Density => CheckKind::Density,
            VerifyKind::Continuity => CheckKind::Continuity,
            VerifyKind::Contraction => CheckKind::Contraction,
            VerifyKind::Derivative => CheckKind::Derivative,
            VerifyKind::Lemma3 => CheckKind::Lemma3,
            VerifyKind::Coarea => CheckKind::Coarea,
            VerifyKind::OpenClosed => CheckKind::OpenClosed,
            VerifyKind::Decomposition => CheckKind::Decomposition,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpectArg {
    Pass,
    Fail,
    HypothesisError,
}

impl From<ExpectArg> for Expect {
    fn from(e: ExpectArg) -> Self {
        match e {
            ExpectArg::Pass => Expect::Pass,
            ExpectArg::Fail => Expect::Fail,
            ExpectArg::HypothesisError => Expect::HypothesisError,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleKind {
    Lattice,
    Disconnected,
}

/// A generator spec if the file has a `generator` key, otherwise a grid
/// header.
fn read_input(path: &Path) -> Result<InputSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    if value.get("generator").is_some() {
        return serde_json::from_value(value).with_context(|| format!("invalid generator in {}", path.display()));
    }
    let path = std::path::absolute(path)?;
    Ok(InputSpec::File { path })
}

fn read_params(arg: Option<&str>) -> Result<Params> {
    let Some(arg) = arg else { return Ok(Params::default()) };
    let text = if arg.trim_start().starts_with('{') {
        arg.to_owned()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))?
    };
    serde_json::from_str(&text).context("invalid parameters")
}

fn single(
    name: &str,
    input: Option<InputSpec>,
    check: CheckKind,
    expect: Expect,
    params: Params,
    seed: u64,
) -> Scenario {
    Scenario {
        name: name.to_owned(),
        input,
        params: Params::default(),
        checks: vec![CheckSpec { check, expect, params }],
        seed,
        output: None,
    }
}

fn execute(scenario: &Scenario, base_dir: &Path, out: Option<&Path>, threads: Option<usize>) -> Result<RunOutput> {
    let exec = Parallel::new(threads).context("cannot start the thread pool")?;
    let output = match out {
        Some(dir) => scenario::run_to_dir(scenario, base_dir, dir, &exec, exec.threads())?,
        None => scenario::run(scenario, base_dir, &exec)?,
    };
    if out.is_none() {
        for report in &output.reports {
            print!("{}", report.to_json());
        }
    } else {
        println!("{}", serde_json::to_string_pretty(&output.summary)?);
    }
    for report in output.reports.iter().filter(|r| !r.ok) {
        eprintln!(
            "{}: {:?}{}",
            report.check,
            report.verdict,
            report.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default()
        );
    }
    Ok(output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let threads = cli.threads;
    if threads == Some(0) {
        bail!("--threads must be positive");
    }
    let cwd = std::env::current_dir()?;
    let output = match cli.command {
        Command::Osc { input, r, mode, out, stem } => {
            let spec = read_input(&input.input)?;
            let loaded = generate_input(&spec, 0, &cwd)?;
            let g = oscillation(&loaded.grid, r, ModeDto::from(mode).into())?;
            let path = save_grid_function(&out, &stem, &g, loaded.c)?;
            println!("{}", path.display());
            return Ok(0);
        }
        Command::Sweep(args) => run_sweep(CheckKind::Sweep, args, threads, &cwd)?,
        Command::Seminorm(args) => run_sweep(CheckKind::Seminorm, args, threads, &cwd)?,
        Command::Verify { check, input, params, expect, seed, out } => {
            let input = input.as_deref().map(read_input).transpose()?;
            let kind = CheckKind::from(check);
            let params = read_params(params.as_deref())?;
            let scenario = single(kind.name(), input, kind, expect.into(), params, seed);
            execute(&scenario, &cwd, out.as_deref(), threads)?
        }
        Command::Example { which, alpha, n, out } => {
            let scenario = match which {
                ExampleKind::Lattice => examples::lattice(alpha),
                ExampleKind::Disconnected => examples::disconnected(n, alpha),
            };
            execute(&scenario, &cwd, out.as_deref(), threads)?
        }
        Command::Run { scenario: path, out } => {
            let scenario = scenario::load_scenario(&path)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let out = out
                .or_else(|| scenario.output.as_ref().map(|o| base.join(o)))
                .unwrap_or_else(|| cwd.join("osc-out").join(&scenario.name));
            execute(&scenario, &base, Some(&out), threads)?
        }
    };
    Ok(output.status.exit_code())
}

fn run_sweep(kind: CheckKind, args: SweepArgs, threads: Option<usize>, cwd: &Path) -> Result<RunOutput> {
    let input = read_input(&args.input.input)?;
    let sweep = match (args.delta_min, args.delta_max, args.ratio) {
        (Some(min), Some(max), Some(ratio)) => Some(SweepDto::Geometric { min, max, ratio }),
        _ => None,
    };
    let params = Params {
        r: args.r,
        alpha: Some(args.alpha),
        mode: Some(args.mode.into()),
        sweep,
        expected: args.expected,
        tolerance: args.tolerance,
        ..Params::default()
    };
    let scenario = single(kind.name(), Some(input), kind, Expect::Pass, params, 0);
    execute(&scenario, cwd, args.out.as_deref(), threads)
}
