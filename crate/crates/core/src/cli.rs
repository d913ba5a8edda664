//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::distributions::{Distribution, WeightedIndex};
use serde_json::json;

use crate::capacity::{
    c_dep, c_std, capacity_curve_with, format_sig, write_curve_csv, OuterOptions, DEFAULT_GRID,
};
use crate::channel_file::{channel_to_json, read_channel};
use crate::dist::{Avc, Channel, Dist};
use crate::error::Error;
use crate::example::{build_example, figure_data};
use crate::info::{compose_state, mutual_information};
use crate::simulate::{
    decode_list, random_constant_composition_codebook, rng_stream, transmit, within_budget,
    JammerExperiment, DEFAULT_EPSILON, MAX_RESAMPLES,
};
use crate::symmetry::{
    strong_cost, symmetrizability_with, symmetrizing_cost, CostKind, Formulation, LpCosts,
    MemoCosts, DEFAULT_MMAX,
};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_ETA: f64 = 0.05;

#[derive(Parser, Debug)]
#[command(
    name = "avc-list",
    version,
    about = "List-decoding bounds for state-constrained AVCs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Channel file (JSON).
    #[arg(long)]
    channel: Option<PathBuf>,
    /// Use the additive example `Y = X + S` with states `0..=σ`.
    #[arg(long)]
    example_sigma: Option<usize>,
}

impl Source {
    fn load(&self) -> Result<Avc, CliError> {
        load_source(self.channel.as_ref(), self.example_sigma)
    }
}

fn load_source(channel: Option<&PathBuf>, sigma: Option<usize>) -> Result<Avc, CliError> {
    match (channel, sigma) {
        (Some(path), None) => Ok(read_channel(path)?),
        (None, Some(sigma)) => Ok(build_example(sigma)?.into_avc()),
        _ => Err(CliError::Usage(
            "give exactly one of a channel file or --example-sigma".into(),
        )),
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CapacityMode {
    Std,
    Dep,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CostMode {
    Weak,
    Strong,
}

impl From<CostMode> for CostKind {
    fn from(m: CostMode) -> Self {
        match m {
            CostMode::Weak => CostKind::Weak,
            CostMode::Strong => CostKind::Strong,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a channel and print its dimensions.
    Info {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        example_sigma: Option<usize>,
        /// Write the channel as a channel file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Mutual information `I(P, W_s)` per state, or of the averaged channel.
    Mi {
        #[command(flatten)]
        source: Source,
        /// Input distribution; a single number is `P(1)` for binary inputs.
        #[arg(long)]
        p: String,
        /// State distribution to average the channel over.
        #[arg(long)]
        q: Option<String>,
    },
    /// Randomized-coding capacity under the state budget.
    Capacity {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "std")]
        mode: CapacityMode,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Symmetrizing cost at arity `m`.
    Symcost {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        p: String,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        mode: CostMode,
    },
    /// Symmetrizability threshold under the budget.
    Threshold {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        p: String,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_enum)]
        mode: CostMode,
        #[arg(long, default_value_t = DEFAULT_MMAX)]
        mmax: usize,
    },
    /// Capacity and list-decoding bound curves as CSV.
    Curve {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        list_size: usize,
        /// Budget grid `from:to:step`.
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_MMAX)]
        mmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo of the symmetrizing jammer against the list decoder.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        list_size: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        codewords: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Codebook input distribution; defaults to uniform.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        /// Required margin between the budget and the jammer's strong cost.
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Send one codeword under i.i.d. states and list-decode the output.
    DecodeDemo {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        list_size: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        codewords: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        p: Option<String>,
        /// State distribution; defaults to uniform over states costing at most the budget.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        message: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(Error::Io(e))
    }
}

/// Parses a comma-separated distribution over `k` symbols. A single number
/// is `P(1)` when `k = 2`.
fn parse_dist(text: &str, k: usize) -> Result<Dist, CliError> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("cannot parse distribution '{text}': {e}")))?;
    let values = if values.len() == 1 && k == 2 {
        vec![1.0 - values[0], values[0]]
    } else {
        values
    };
    if values.len() != k {
        return Err(CliError::Usage(format!(
            "distribution '{text}' has {} entries, expected {k}",
            values.len()
        )));
    }
    Ok(Dist::new(values)?)
}

/// Expands `from:to:step` into an ascending grid including both ends.
fn parse_lambda_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Usage(format!("budget grid '{text}' is not from:to:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    let (from, to, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Err(bad());
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| from + k as f64 * step).collect())
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| format_sig(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn join_indices(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Rounds to 6 significant digits for JSON reports.
fn sig(x: f64) -> serde_json::Value {
    match format_sig(x).parse::<f64>() {
        Ok(v) if v.is_finite() => json!(v),
        _ => json!(format_sig(x)),
    }
}

fn write_output(out: Option<&PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Info {
            file,
            example_sigma,
            emit,
        } => {
            let avc = load_source(file.as_ref(), example_sigma)?;
            writeln!(stdout, "x_size {}", avc.nx())?;
            writeln!(stdout, "s_size {}", avc.ns())?;
            writeln!(stdout, "y_size {}", avc.ny())?;
            writeln!(
                stdout,
                "cost {} to {}",
                format_sig(avc.min_cost()),
                format_sig(avc.max_cost())
            )?;
            if let Some(path) = emit {
                std::fs::write(path, channel_to_json(&avc) + "\n")?;
            }
        }
        Command::Mi { source, p, q } => {
            let avc = source.load()?;
            let p = parse_dist(&p, avc.nx())?;
            match q {
                Some(q) => {
                    let q = parse_dist(&q, avc.ns())?;
                    let v: Channel = compose_state(&avc, &q)?;
                    writeln!(stdout, "mi {}", format_sig(mutual_information(&p, &v)?))?;
                }
                None => {
                    for s in 0..avc.ns() {
                        let mi = mutual_information(&p, &avc.state_channel(s))?;
                        writeln!(stdout, "state {s} {}", format_sig(mi))?;
                    }
                }
            }
        }
        Command::Capacity {
            source,
            lambda,
            mode,
            grid,
        } => {
            let avc = source.load()?;
            let (value, p) = match mode {
                CapacityMode::Std => c_std(&avc, lambda, grid)?,
                CapacityMode::Dep => c_dep(&avc, lambda, grid)?,
            };
            writeln!(stdout, "capacity {}", format_sig(value))?;
            writeln!(stdout, "p {}", join(p.as_slice()))?;
        }
        Command::Symcost { source, p, m, mode } => {
            let avc = source.load()?;
            let p = parse_dist(&p, avc.nx())?;
            let cost = symmetrizing_cost(&avc, &p, m, mode.into(), Formulation::Exchangeable)?;
            writeln!(stdout, "cost {}", format_sig(cost.value))?;
        }
        Command::Threshold {
            source,
            p,
            lambda,
            mode,
            mmax,
        } => {
            let avc = source.load()?;
            let p = parse_dist(&p, avc.nx())?;
            let oracle = LpCosts::new(&avc);
            let t = symmetrizability_with(&oracle, mode.into(), &p, lambda, mmax)?;
            writeln!(stdout, "threshold {}", t.value)?;
            writeln!(stdout, "saturated {}", t.saturated)?;
            writeln!(stdout, "tie {}", t.tie)?;
            writeln!(stdout, "costs {}", join(&t.costs))?;
        }
        Command::Curve {
            source,
            list_size,
            lambda,
            grid,
            mmax,
            out,
        } => {
            let lambdas = parse_lambda_grid(&lambda)?;
            let points = match (source.channel.as_ref(), source.example_sigma) {
                (None, Some(sigma)) if mmax == DEFAULT_MMAX => {
                    figure_data(sigma, list_size, &lambdas, grid)?
                }
                _ => {
                    let avc = source.load()?;
                    let oracle = MemoCosts::new(LpCosts::new(&avc));
                    capacity_curve_with(
                        &avc,
                        &oracle,
                        list_size,
                        &lambdas,
                        OuterOptions { grid, m_max: mmax },
                    )?
                }
            };
            let mut buf = Vec::new();
            write_curve_csv(&points, &mut buf)?;
            write_output(out.as_ref(), stdout, &String::from_utf8_lossy(&buf))?;
        }
        Command::Simulate {
            source,
            lambda,
            list_size,
            n,
            codewords,
            trials,
            seed,
            p,
            eta,
            epsilon,
            out,
        } => {
            let avc = source.load()?;
            let p = match p {
                Some(p) => parse_dist(&p, avc.nx())?,
                None => Dist::uniform(avc.nx()),
            };
            let codebook = random_constant_composition_codebook(n, codewords, &p, seed)?;
            let cost = strong_cost(&avc, &codebook.input_type(), list_size)?;
            let u = cost.kernel()?.ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no symmetrizing jammer exists at list size {list_size}"
                ))
            })?;
            let report = JammerExperiment {
                list_size,
                lambda,
                eta,
                trials,
                seed,
                epsilon: Some(epsilon),
            }
            .run(&avc, &codebook, &u)?;
            let doc = json!({
                "trials": report.trials,
                "empirical_error": sig(report.empirical_error),
                "error_stderr": sig(report.error_stderr),
                "mean_cost_per_symbol": sig(report.mean_cost_per_symbol),
                "budget_violation_rate": sig(report.budget_violation_rate),
                "resamples": report.resamples,
                "over_list_trials": report.over_list_trials,
                "bound": sig(report.bound),
                "jammer_strong_cost": sig(cost.value),
                "seed": report.seed,
            });
            let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
            write_output(out.as_ref(), stdout, &text)?;
        }
        Command::DecodeDemo {
            source,
            lambda,
            list_size,
            n,
            codewords,
            seed,
            p,
            q,
            eta,
            message,
        } => {
            let avc = source.load()?;
            let p = match p {
                Some(p) => parse_dist(&p, avc.nx())?,
                None => Dist::uniform(avc.nx()),
            };
            let q = match q {
                Some(q) => parse_dist(&q, avc.ns())?,
                None => {
                    let cheap: Vec<f64> = avc
                        .cost()
                        .iter()
                        .map(|&c| if c <= lambda { 1.0 } else { 0.0 })
                        .collect();
                    let total: f64 = cheap.iter().sum();
                    if total == 0.0 {
                        return Err(Error::InfeasibleBudget {
                            lambda,
                            min_cost: avc.min_cost(),
                        }
                        .into());
                    }
                    Dist::new(cheap.iter().map(|v| v / total).collect())?
                }
            };
            let codebook = random_constant_composition_codebook(n, codewords, &p, seed)?;
            if message >= codebook.len() {
                return Err(CliError::Usage(format!("message {message} out of range")));
            }
            let mut rng = rng_stream(seed, 1);
            let states = WeightedIndex::new(q.as_slice())
                .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
            let mut s = None;
            for _ in 0..MAX_RESAMPLES {
                let draw: Vec<usize> = (0..n).map(|_| states.sample(&mut rng)).collect();
                let total: f64 = draw.iter().map(|&st| avc.cost()[st]).sum();
                if within_budget(total, n, lambda) {
                    s = Some(draw);
                    break;
                }
            }
            let s = s.ok_or(Error::BudgetExhausted {
                attempts: MAX_RESAMPLES,
            })?;
            let y = transmit(&avc, codebook.codeword(message), &s, &mut rng)?;
            let decoded = decode_list(&avc, &codebook, &y, lambda, eta, list_size)?;
            writeln!(stdout, "message {message}")?;
            writeln!(stdout, "x {}", join_indices(codebook.codeword(message)))?;
            writeln!(stdout, "s {}", join_indices(&s))?;
            writeln!(stdout, "y {}", join_indices(&y))?;
            writeln!(stdout, "plausible {}", join_indices(&decoded.plausible))?;
            writeln!(stdout, "list {}", join_indices(&decoded.list))?;
            writeln!(stdout, "over_list {}", decoded.over_list)?;
            writeln!(stdout, "decoded {}", decoded.list.contains(&message))?;
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (including the program name), writing results to
/// `stdout` and diagnostics to `stderr`.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
