use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use zopt_core::objectives::registry;
use zopt_core::sampler::{sample_batch, LogTarget, SamplerParams};
use zopt_core::theory::{run_check, CheckId};
use zopt_core::SeedStream;

use crate::error::{io_err, HarnessError, Result};
use crate::output::{format_float, write_summary_csv, write_text, write_trace_csv};
use crate::plan::{parse_plan, split_list, Algorithm, ExperimentPlan, DEFAULT_OUT};
use crate::runner::{run_plan, RunRecord, RunSettings};
use crate::summary::{format_summary_table, summarize, SummaryRow};
use crate::svg::{comparison_svg, convergence_svg};

/// Environment variable that overrides `--seed` for every subcommand.
pub const SEED_ENV: &str = "ZOPT_SEED";

#[derive(Debug, Parser)]
#[command(name = "zopt", version, about = "Sampling-based zeroth-order optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run optimizers on benchmark functions and write traces, summaries and plots.
    Bench(BenchArgs),
    /// Draw samples from exp(-theta U) restricted to a benchmark's search box.
    Sample(SampleArgs),
    /// Run empirical checks of the convergence and fidelity rates.
    Theory(TheoryArgs),
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated function ids.
    #[arg(long = "fn")]
    functions: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long = "dim")]
    dims: Option<String>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated algorithm ids (so, pso, de, bfgs, sa, shc, adam).
    #[arg(long)]
    algos: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plan file; flags given on the command line override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    target: String,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Particles in the drift estimate.
    #[arg(long, default_value_t = 1000)]
    np: usize,
    /// Euler steps.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Initial variance; defaults to the squared half-width of the search box.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = DEFAULT_OUT)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    /// lemma21, th24, th28, th29, th45 or all.
    #[arg(long, default_value = "all")]
    check: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = DEFAULT_OUT)]
    out: PathBuf,
}

/// Everything a benchmark invocation produced.
#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub records: Vec<RunRecord>,
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

impl BenchOutput {
    pub fn failed_runs(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Runs a plan and writes `traces.csv`, `summary.csv` and, per function and
/// dimension, `convergence_<fn>_d<d>.svg` and `comparison_<fn>_d<d>.svg` into `plan.out`.
pub fn bench(plan: &ExperimentPlan, settings: &RunSettings) -> Result<BenchOutput> {
    plan.validate()?;
    fs::create_dir_all(&plan.out).map_err(io_err(&plan.out))?;
    let records = run_plan(plan, settings);
    let rows = summarize(&records);
    let mut files = vec![plan.out.join("traces.csv"), plan.out.join("summary.csv")];
    write_trace_csv(&records, &files[0])?;
    write_summary_csv(&rows, &files[1])?;
    for f in &plan.functions {
        for &d in &plan.dims {
            let title = format!("{f}, d = {d}");
            let group: Vec<RunRecord> = records.iter().filter(|r| &r.function == f && r.dim == d).cloned().collect();
            if group.iter().any(|r| !r.trace.is_empty()) {
                let path = plan.out.join(format!("convergence_{f}_d{d}.svg"));
                write_text(&path, &convergence_svg(&group, &title)?)?;
                files.push(path);
            }
            let group_rows: Vec<SummaryRow> =
                rows.iter().filter(|r| &r.function == f && r.dim == d && r.trials > 0).cloned().collect();
            if !group_rows.is_empty() {
                let path = plan.out.join(format!("comparison_{f}_d{d}.svg"));
                write_text(&path, &comparison_svg(&group_rows, &title)?)?;
                files.push(path);
            }
        }
    }
    Ok(BenchOutput { records, rows, files })
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Invalid(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(HarnessError::Invalid(format!("{SEED_ENV}: {e}"))),
    }
}

fn bench_plan(args: &BenchArgs) -> Result<ExperimentPlan> {
    let mut plan = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| HarnessError::Invalid(format!("{}: {e}", path.display())))?;
            let parsed = parse_plan(&text)?;
            for w in &parsed.warnings {
                log::warn!("{}: {w}", path.display());
            }
            parsed.plan
        }
        None => ExperimentPlan::new(Vec::new(), Vec::new(), Algorithm::ALL.to_vec()),
    };
    if let Some(f) = &args.functions {
        plan.functions = split_list(f);
    }
    if let Some(d) = &args.dims {
        plan.dims = split_list(d)
            .iter()
            .map(|v| v.parse().map_err(|_| HarnessError::Invalid(format!("'{v}' is not a valid dimension"))))
            .collect::<Result<_>>()?;
    }
    if let Some(a) = &args.algos {
        plan.algos = split_list(a).iter().map(|v| v.parse()).collect::<zopt_core::Result<_>>()?;
    }
    if let Some(i) = args.iters {
        plan.iters = i;
    }
    if let Some(t) = args.trials {
        plan.trials = t;
    }
    if let Some(s) = args.seed {
        plan.seed = s;
    }
    if let Some(o) = &args.out {
        plan.out = o.clone();
    }
    if let Some(s) = seed_override()? {
        plan.seed = s;
    }
    plan.validate()?;
    Ok(plan)
}

fn run_bench(args: &BenchArgs) -> Result<i32> {
    let plan = bench_plan(args)?;
    let out = bench(&plan, &RunSettings::default())?;
    print!("{}", format_summary_table(&out.rows));
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    let failed = out.failed_runs();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", out.records.len());
        return Ok(2);
    }
    Ok(0)
}

fn write_samples(path: &Path, samples: &[Vec<f64>], dim: usize) -> Result<()> {
    let mut text = (0..dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    text.push('\n');
    for s in samples {
        text.push_str(&s.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    write_text(path, &text)
}

fn run_sample(args: &SampleArgs) -> Result<i32> {
    let seed = seed_override()?.unwrap_or(args.seed);
    let spec = registry(&args.target, args.dim)?;
    if !(args.theta > 0.0 && args.theta.is_finite()) {
        return Err(HarnessError::Invalid(format!("theta must be positive and finite, got {}", args.theta)));
    }
    let gamma = args.gamma.unwrap_or_else(|| spec.search_box.max_half_width().powi(2));
    let params = SamplerParams {
        particle_count: args.np,
        step_count: args.steps,
        ..SamplerParams::with_gamma(gamma)
    };
    for w in params.check()? {
        log::warn!("{w}");
    }
    let theta = args.theta;
    let kind = spec.kind;
    let target = LogTarget::new(spec.search_box.clone(), move |x: &[f64]| -theta * kind.eval(x));
    let samples = sample_batch(&target, &params, args.count, &SeedStream::new(seed).split("sample"))?;
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let path = args.out.join("samples.csv");
    write_samples(&path, &samples, args.dim)?;
    println!("wrote {} samples to {}", samples.len(), path.display());
    Ok(0)
}

fn run_theory(args: &TheoryArgs) -> Result<i32> {
    let seed = seed_override()?.unwrap_or(args.seed);
    let ids = CheckId::parse_selection(&args.check)?;
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let stream = SeedStream::new(seed);
    let mut all_passed = true;
    for id in ids {
        let report = run_check(id, &stream)?;
        let text = report.to_string();
        print!("{text}");
        write_text(&args.out.join(format!("theory_{id}.txt")), &text)?;
        all_passed &= report.passed;
    }
    Ok(if all_passed { 0 } else { 2 })
}

/// Parses `args` (program name first) and runs the subcommand. Returns 0 on success,
/// 1 for invalid input and 2 when a run or check fails.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Bench(a) => run_bench(a),
        Command::Sample(a) => run_sample(a),
        Command::Theory(a) => run_theory(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                1
            } else {
                2
            }
        }
    }
}
