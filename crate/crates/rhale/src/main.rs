//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or I/O failure, 3 infeasible
//! configuration, 4 internal error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rhale::baselines::{default_grid, ice, pdp};
use rhale::binning::BinningConfig;
use rhale::error::{Error, Result};
use rhale::estimator::{rhale_from_effects, Binning};
use rhale::evaluation::{run_benchmark, BenchmarkConfig, Metric};
use rhale::io;
use rhale::model::{local_effects, EffectSource, LocalEffects};
use rhale::report;
use rhale::synthetic::{generate, Example, GeneratorSpec, SyntheticDataset};

#[derive(Parser)]
#[command(
    name = "rhale",
    version,
    about = "Robust accumulated local effects with automatic variable-width binning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset: data.csv, gradients.csv, ground_truth.json.
    Synth(SynthArgs),
    /// Compute a feature effect: effect.json, effect.svg (and optional baselines).
    Explain(ExplainArgs),
    /// Sweep fixed bin counts against automatic binning: bench.csv, bench.json, SVGs.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CommonOut {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated subset of {json,csv,svg} to write.
    #[arg(long, default_value = "json,csv,svg")]
    format: String,
}

#[derive(Args)]
struct SynthArgs {
    /// Example name: concept, running, simulation-a, simulation-b,
    /// simulation-c, simulation:ALPHA,A1,A2, piecewise, nonlinear.
    #[arg(long)]
    example: String,
    /// Sample count.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct ExplainArgs {
    /// Built-in example to generate and explain (alternative to --data).
    #[arg(long)]
    example: Option<String>,
    /// Dataset CSV (one column per feature, optional trailing y column).
    #[arg(long, requires = "gradients", conflicts_with = "example")]
    data: Option<PathBuf>,
    /// Instance-gradient CSV aligned row-for-row with --data.
    #[arg(long)]
    gradients: Option<PathBuf>,
    /// Feature to explain: zero-based index or column name.
    #[arg(long, default_value = "0")]
    feature: String,
    /// Binning strategy: auto, fixed:K, or file:PATH (JSON array of limits).
    #[arg(long, default_value = "auto")]
    binning: String,
    /// Size-discount strength for automatic binning.
    #[arg(long)]
    alpha: Option<f64>,
    /// Minimum points per bin for automatic binning.
    #[arg(long)]
    n_ppb: Option<usize>,
    /// Maximum number of bins (grid resolution) for automatic binning.
    #[arg(long)]
    k_max: Option<usize>,
    /// Baseline to compute alongside the effect. Only `pdp-ice` is known.
    #[arg(long)]
    baseline: Option<String>,
    /// Sample count when generating from --example.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Generator seed when generating from --example.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct BenchArgs {
    /// Example name (benchmarks resample, so a generator is required).
    #[arg(long)]
    example: String,
    /// Feature to benchmark: zero-based index or name like x1.
    #[arg(long, default_value = "0")]
    feature: String,
    /// Size-discount strength for automatic binning.
    #[arg(long)]
    alpha: Option<f64>,
    /// Minimum points per bin for automatic binning.
    #[arg(long)]
    n_ppb: Option<usize>,
    /// Maximum number of bins for automatic binning.
    #[arg(long)]
    k_max: Option<usize>,
    /// Number of resampled trials.
    #[arg(long, default_value_t = 30)]
    trials: usize,
    /// Sample count per trial.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Master seed; trials and the oracle derive their own streams from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Clone, Copy)]
struct Formats {
    json: bool,
    csv: bool,
    svg: bool,
}

fn parse_formats(s: &str) -> Result<Formats> {
    let mut seen = BTreeSet::new();
    for part in s.split(',') {
        match part.trim() {
            "json" | "csv" | "svg" => {
                seen.insert(part.trim().to_string());
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown format {other:?}; expected a comma-separated subset of json,csv,svg"
                )))
            }
        }
    }
    Ok(Formats {
        json: seen.contains("json"),
        csv: seen.contains("csv"),
        svg: seen.contains("svg"),
    })
}

fn parse_example(s: &str) -> Result<Example> {
    match s {
        "concept" => Ok(Example::Concept),
        "running" => Ok(Example::Running),
        "simulation-a" => Ok(Example::simulation_a()),
        "simulation-b" => Ok(Example::simulation_b()),
        "simulation-c" => Ok(Example::simulation_c()),
        "piecewise" => Ok(Example::Piecewise),
        "nonlinear" => Ok(Example::Nonlinear),
        other => {
            if let Some(rest) = other.strip_prefix("simulation:") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::InvalidInput(format!(
                        "simulation takes three weights, e.g. simulation:1,1,1; got {other:?}"
                    )));
                }
                let mut w = [0.0; 3];
                for (slot, p) in w.iter_mut().zip(&parts) {
                    *slot = p.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidInput(format!("bad simulation weight {p:?}"))
                    })?;
                }
                return Ok(Example::Simulation {
                    alpha: w[0],
                    a1: w[1],
                    a2: w[2],
                });
            }
            Err(Error::InvalidInput(format!(
                "unknown example {other:?}; expected concept, running, simulation-a, \
                 simulation-b, simulation-c, simulation:ALPHA,A1,A2, piecewise, or nonlinear"
            )))
        }
    }
}

fn parse_binning(s: &str) -> Result<Binning> {
    if s == "auto" {
        return Ok(Binning::Auto);
    }
    if let Some(k) = s.strip_prefix("fixed:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad bin count in {s:?}")))?;
        return Ok(Binning::Fixed(k));
    }
    if let Some(path) = s.strip_prefix("file:") {
        let partition = io::read_partition_json(Path::new(path))?;
        return Ok(Binning::Given(partition));
    }
    Err(Error::InvalidInput(format!(
        "unknown binning {s:?}; expected auto, fixed:K, or file:PATH"
    )))
}

fn binning_config(alpha: Option<f64>, n_ppb: Option<usize>, k_max: Option<usize>) -> Result<BinningConfig> {
    let mut config = BinningConfig::default();
    if let Some(a) = alpha {
        config.alpha = a;
    }
    if n_ppb.is_some() {
        config.n_ppb = n_ppb;
    }
    if let Some(k) = k_max {
        config.k_max = k;
    }
    config.validate()?;
    Ok(config)
}

/// Resolves --feature given either a zero-based index or a column name.
fn resolve_feature(spec: &str, names: &[String]) -> Result<usize> {
    if let Ok(idx) = spec.parse::<usize>() {
        if idx >= names.len() {
            return Err(Error::InvalidInput(format!(
                "feature index {idx} out of range; dataset has {} features",
                names.len()
            )));
        }
        return Ok(idx);
    }
    names
        .iter()
        .position(|n| n == spec)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown feature {spec:?}; available: {}",
                names.join(", ")
            ))
        })
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let formats = parse_formats(&args.out.format)?;
    let example = parse_example(&args.example)?;
    let spec = GeneratorSpec {
        example,
        n: args.n,
        seed: args.seed,
    };
    let data: SyntheticDataset = generate(&spec)?;
    ensure_out_dir(&args.out.out)?;
    if formats.csv {
        io::write_dataset_csv(
            &args.out.out.join("data.csv"),
            &data.features,
            Some(&data.targets),
        )?;
        let (headers, rows) = io::gradients_table(&data.features, &data.model)?;
        io::write_table_csv(
            &args.out.out.join("gradients.csv"),
            &headers,
            &mut rows.into_iter(),
        )?;
    }
    if formats.json {
        let doc = io::GroundTruthDoc::new(&spec, &data.features);
        io::write_json(&args.out.out.join("ground_truth.json"), &doc)?;
    }
    Ok(())
}

/// Loads the instance-level effects for `explain` from either a built-in
/// generator or a data/gradients CSV pair.
struct ExplainInput {
    effects: LocalEffects,
    feature_name: String,
    /// Present only for generator input; baselines need model evaluations.
    dataset: Option<SyntheticDataset>,
}

fn load_explain_input(args: &ExplainArgs) -> Result<ExplainInput> {
    if let Some(example) = &args.example {
        let example = parse_example(example)?;
        let spec = GeneratorSpec {
            example,
            n: args.n,
            seed: args.seed,
        };
        let data = generate(&spec)?;
        let names = example.feature_names();
        let s = resolve_feature(&args.feature, &names)?;
        let effects = local_effects(&data.model, &data.features, s)?;
        Ok(ExplainInput {
            effects,
            feature_name: names[s].clone(),
            dataset: Some(data),
        })
    } else {
        let data_path = args.data.as_ref().ok_or_else(|| {
            Error::InvalidInput("explain needs either --example or --data with --gradients".into())
        })?;
        let grad_path = args.gradients.as_ref().ok_or_else(|| {
            Error::InvalidInput("--data requires --gradients (no built-in model to differentiate)".into())
        })?;
        let (features, _targets) = io::read_dataset_csv(data_path)?;
        let (_grad_headers, grads, grad_rows) = io::read_gradients_csv(grad_path)?;
        if grad_rows != features.n_rows() {
            return Err(Error::InvalidInput(format!(
                "row mismatch: {} data rows vs {} gradient rows",
                features.n_rows(),
                grad_rows
            )));
        }
        let grad_cols = grads.len() / grad_rows.max(1);
        if grad_cols != features.n_cols() {
            return Err(Error::InvalidInput(format!(
                "column mismatch: {} features vs {} gradient columns",
                features.n_cols(),
                grad_cols
            )));
        }
        let names: Vec<String> = (0..features.n_cols()).map(|j| features.column_name(j)).collect();
        let s = resolve_feature(&args.feature, &names)?;
        let xs = features.column(s);
        let col: Vec<f64> = (0..grad_rows).map(|i| grads[i * grad_cols + s]).collect();
        let effects = LocalEffects::new(s, xs, col, EffectSource::Analytic)?;
        Ok(ExplainInput {
            effects,
            feature_name: names[s].clone(),
            dataset: None,
        })
    }
}

fn cmd_explain(args: &ExplainArgs) -> Result<()> {
    let formats = parse_formats(&args.out.format)?;
    let binning = parse_binning(&args.binning)?;
    let config = binning_config(args.alpha, args.n_ppb, args.k_max)?;
    if let Some(b) = &args.baseline {
        if b != "pdp-ice" {
            return Err(Error::InvalidInput(format!(
                "unknown baseline {b:?}; only pdp-ice is available"
            )));
        }
        if args.example.is_none() {
            return Err(Error::InvalidInput(
                "--baseline pdp-ice needs model evaluations; use --example input".into(),
            ));
        }
    }
    let input = load_explain_input(args)?;
    let result = rhale_from_effects(&input.effects, &config, &binning)?;
    ensure_out_dir(&args.out.out)?;
    if formats.json {
        let doc = io::EffectDoc::new(&result, input.feature_name.clone(), args.binning.clone());
        io::write_json(&args.out.out.join("effect.json"), &doc)?;
    }
    if formats.svg {
        let title = format!("feature effect: {}", input.feature_name);
        let svg = report::effect_svg(&result, &input.feature_name, &title);
        write_text(&args.out.out.join("effect.svg"), &svg)?;
    }
    if args.baseline.is_some() {
        let data = &input.dataset.as_ref().unwrap();
        let s = result.feature_index;
        let grid = default_grid(&data.features, s)?;
        let pdp_curve = pdp(&data.model, &data.features, s, &grid)?;
        let ice_bundle = ice(&data.model, &data.features, s, &grid, true)?;
        if formats.json {
            let doc = io::PdpIceDoc::new(s, input.feature_name.clone(), &pdp_curve, &ice_bundle);
            io::write_json(&args.out.out.join("pdp_ice.json"), &doc)?;
        }
        if formats.svg {
            let title = format!("PDP and centered ICE: {}", input.feature_name);
            let svg = report::pdp_ice_svg(
                &pdp_curve.grid,
                &pdp_curve.values,
                &ice_bundle.curves,
                &input.feature_name,
                &title,
            );
            write_text(&args.out.out.join("pdp_ice.svg"), &svg)?;
        }
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let formats = parse_formats(&args.out.format)?;
    let example = parse_example(&args.example)?;
    let names = example.feature_names();
    let feature = resolve_feature(&args.feature, &names)?;
    let mut config = BenchmarkConfig::new(example, feature);
    config.n_per_trial = args.n;
    config.trials = args.trials;
    config.master_seed = args.seed;
    config.binning = binning_config(args.alpha, args.n_ppb, args.k_max)?;
    let report_data = run_benchmark(&config)?;
    let auto = report_data.aggregate("auto", None).ok_or_else(|| {
        Error::InvalidInput("benchmark produced no auto-binning aggregate".into())
    })?;
    if auto.feasible_trials == 0 {
        return Err(Error::Infeasible(format!(
            "auto binning was infeasible in all {} trials (n = {}, n_ppb = {})",
            config.trials,
            config.n_per_trial,
            config.binning.resolved_n_ppb(config.n_per_trial)
        )));
    }
    ensure_out_dir(&args.out.out)?;
    if formats.csv {
        io::write_bench_csv(&args.out.out.join("bench.csv"), &report_data)?;
    }
    if formats.svg {
        for (metric, stem) in [
            (Metric::Mu, "bench_l_mu"),
            (Metric::Sigma, "bench_l_sigma"),
            (Metric::Rho, "bench_l_rho"),
        ] {
            let title = format!("{}: {} vs fixed K", args.example, stem.trim_start_matches("bench_"));
            let svg = report::bench_svg(&report_data, metric, &title);
            write_text(&args.out.out.join(format!("{stem}.svg")), &svg)?;
        }
    }
    if formats.json {
        let doc = io::BenchDoc::new(report_data);
        io::write_json(&args.out.out.join("bench.json"), &doc)?;
    }
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Explain(args) => cmd_explain(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn main() -> ExitCode {
    match std::panic::catch_unwind(run) {
        Ok(Ok(())) => ExitCode::from(0),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(4)
        }
    }
}
