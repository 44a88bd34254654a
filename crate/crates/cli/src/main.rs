//! `wrnn`: synthesize data, decompose, train, forecast, evaluate, sweep.
//!
//! Every verb writes `run_manifest.txt` into its output directory. Failures
//! print one line `error: <usage|data|divergence>: <message>` and exit with
//! 2, 3 or 4.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wrnn_core::filters::{dwt, filter_bank, write_pyramid, Family, FilterError};
use wrnn_core::kv::KeyValues;
use wrnn_core::lifting::{lifting_forward, write_lifting_pyramid, LiftingError, StageBuilder};
use wrnn_core::metrics::{evaluate, mse_trace_export, MetricsError};
use wrnn_core::rnn::{read_checkpoint, write_checkpoint, RnnError};
use wrnn_core::timeseries::{load_csv, synth_meteo, Channel, TimeSeriesError};
use wrnn_core::wrnn::{
    forecast, prepare_vectors, run_experiment, run_table1_sweep, write_table1_csv, MeteoData,
    RunConfig, Wrnn, WrnnError,
};
use wrnn_core::Execution;

const MANIFEST: &str = "run_manifest.txt";

#[derive(Parser)]
#[command(name = "wrnn", version, about = "Wavelet recurrent network irradiance forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded synthetic irradiance, temperature, humidity and wind CSVs.
    Synth {
        #[arg(long, default_value_t = 60)]
        days: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose one `timestamp,value` CSV into a coefficient pyramid.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value = "bior3.7")]
        family: String,
        #[arg(long, value_enum, default_value_t = Transform::Dwt)]
        transform: Transform,
        /// Lifting only: fixed Haar stages instead of fitted predictors.
        #[arg(long)]
        haar: bool,
        #[arg(long, default_value_t = 4)]
        max_taps: usize,
        #[arg(long, default_value_t = 2)]
        n_constraints: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one network; writes the checkpoint, config and report.
    Train(RunArgs),
    /// Forecast with a trained model directory.
    Forecast {
        /// Directory written by `train`.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Score a forecast CSV against observations on their common timestamps.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        actual: PathBuf,
        /// Ignore timestamps before this epoch second.
        #[arg(long)]
        from: Option<i64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train every listed family on the same data and write `table1.csv`.
    Sweep {
        /// `all` or a comma list such as `db4,bior3.7`.
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// `key=value` settings applied after the config file.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    Dwt,
    Lifting,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Divergence(String),
}

impl CliError {
    fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Divergence(_) => "divergence",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Divergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Divergence(m) => m,
        }
    }
}

impl From<WrnnError> for CliError {
    fn from(e: WrnnError) -> Self {
        match e {
            WrnnError::BadConfig(_) | WrnnError::HorizonTooShort => CliError::Usage(e.to_string()),
            WrnnError::Diverged { .. }
            | WrnnError::Rnn(RnnError::Diverged { .. } | RnnError::NonFiniteActivation { .. }) => {
                CliError::Divergence(e.to_string())
            }
            WrnnError::Filter(FilterError::UnknownFamily(_) | FilterError::BadLevels) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<FilterError> for CliError {
    fn from(e: FilterError) -> Self {
        WrnnError::from(e).into()
    }
}

impl From<TimeSeriesError> for CliError {
    fn from(e: TimeSeriesError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<RnnError> for CliError {
    fn from(e: RnnError) -> Self {
        WrnnError::from(e).into()
    }
}

impl From<LiftingError> for CliError {
    fn from(e: LiftingError) -> Self {
        match e {
            LiftingError::BadOperator(_) | LiftingError::InfeasibleConstraints { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("bad arguments");
            let first = first.trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.message().replace(['\n', '\r'], " ");
            eprintln!("error: {}: {msg}", e.category());
            ExitCode::from(e.code())
        }
    }
}

/// Output directory plus the manifest echo accumulated while running.
struct Run {
    out: PathBuf,
    manifest: KeyValues,
}

impl Run {
    fn start(verb: &str, out: &Path) -> CliResult<Self> {
        fs::create_dir_all(out)?;
        let mut manifest = KeyValues::new();
        manifest
            .push("format", "wrnn-run-manifest")
            .push("version", 1)
            .push("command", verb)
            .push("wrnn_version", env!("CARGO_PKG_VERSION"))
            .push("parallel_feature", cfg!(feature = "parallel"));
        Ok(Self {
            out: out.to_path_buf(),
            manifest,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn echo_config(&mut self, cfg: &RunConfig) {
        for (k, v) in cfg.to_kv().iter() {
            self.manifest.push(&format!("config.{k}"), v);
        }
    }

    fn output(&mut self, name: &str) -> PathBuf {
        self.manifest.push("output", name);
        self.path(name)
    }

    fn finish(mut self, result: CliResult<()>) -> CliResult<()> {
        match &result {
            Ok(()) => self.manifest.set("status", "ok"),
            Err(e) => self.manifest.set("status", format!("error:{}", e.category())),
        };
        let written = self.manifest.write(self.path(MANIFEST));
        result?;
        written.map_err(CliError::from)
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Synth { days, seed, out } => {
            let mut run = Run::start("synth", &out)?;
            run.manifest.push("days", days).push("seed", seed);
            let result = synth(&mut run, days, seed);
            run.finish(result)
        }
        Command::Decompose {
            input,
            levels,
            family,
            transform,
            haar,
            max_taps,
            n_constraints,
            out,
        } => {
            let mut run = Run::start("decompose", &out)?;
            run.manifest
                .push("input", input.display())
                .push("levels", levels)
                .push("seed", "none");
            let result = decompose(
                &mut run,
                &input,
                levels,
                &family,
                transform,
                haar,
                (max_taps, n_constraints),
            );
            run.finish(result)
        }
        Command::Train(args) => {
            let mut run = Run::start("train", &args.out)?;
            let result = load_config(&args, None).and_then(|cfg| {
                run.echo_config(&cfg);
                run.manifest.push("seed", cfg.seed);
                train(&mut run, &cfg)
            });
            run.finish(result)
        }
        Command::Forecast { model, run: args } => {
            let mut run = Run::start("forecast", &args.out)?;
            run.manifest.push("model", model.display());
            let result = load_config(&args, Some(&model.join("run.cfg"))).and_then(|cfg| {
                run.echo_config(&cfg);
                run.manifest.push("seed", cfg.seed);
                predict(&mut run, &cfg, &model)
            });
            run.finish(result)
        }
        Command::Evaluate {
            pred,
            actual,
            from,
            out,
        } => {
            let mut run = Run::start("evaluate", &out)?;
            run.manifest
                .push("pred", pred.display())
                .push("actual", actual.display())
                .push("seed", "none");
            let result = score(&mut run, &pred, &actual, from);
            run.finish(result)
        }
        Command::Sweep {
            families,
            sequential,
            run: args,
        } => {
            let mut run = Run::start("sweep", &args.out)?;
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let result = load_config(&args, None).and_then(|cfg| {
                run.echo_config(&cfg);
                run.manifest.push("seed", cfg.seed).push("families", &families);
                sweep(&mut run, &cfg, &families, exec)
            });
            run.finish(result)
        }
    }
}

/// Base file (or the model's saved config), then `--config`, then overrides.
fn load_config(args: &RunArgs, base: Option<&Path>) -> CliResult<RunConfig> {
    let mut kv = KeyValues::new();
    for path in base.into_iter().chain(args.config.as_deref()) {
        let file = KeyValues::read(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for (k, v) in file.iter() {
            kv.push(k, v);
        }
    }
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override `{o}` is not key=value")))?;
        kv.push(k.trim(), v.trim());
    }
    Ok(RunConfig::from_kv(&kv)?)
}

fn synth(run: &mut Run, days: usize, seed: u64) -> CliResult<()> {
    for channel in Channel::METEO {
        let ts = synth_meteo(days, seed, channel)?;
        ts.write_csv(run.output(&format!("{}.csv", channel.file_stem())))?;
    }
    Ok(())
}

fn decompose(
    run: &mut Run,
    input: &Path,
    levels: usize,
    family: &str,
    transform: Transform,
    haar: bool,
    (max_taps, n_constraints): (usize, usize),
) -> CliResult<()> {
    let ts = load_csv(input, Channel::Synthetic, "timestamp", "value")?;
    match transform {
        Transform::Dwt => {
            let family: Family = family.parse()?;
            run.manifest
                .push("transform", "dwt")
                .push("family", family);
            let p = dwt(ts.values(), &filter_bank(family), levels)?;
            write_pyramid(&p, &run.out)?;
        }
        Transform::Lifting => {
            let builder = if haar {
                StageBuilder::FixedHaar
            } else {
                StageBuilder::Adaptive {
                    max_taps,
                    n_constraints,
                }
            };
            run.manifest
                .push("transform", "lifting")
                .push("builder", if haar { "haar" } else { "adaptive" })
                .push("max_taps", max_taps)
                .push("n_constraints", n_constraints);
            let p = lifting_forward(ts.values(), levels, &builder)?;
            write_lifting_pyramid(&p, &run.out)?;
        }
    }
    run.manifest.push("output", "manifest.txt");
    Ok(())
}

fn train(run: &mut Run, cfg: &RunConfig) -> CliResult<()> {
    let data = MeteoData::from_config(cfg)?;
    let (report, wrnn, _) = run_experiment(&data, cfg.family, cfg)?;
    cfg.to_kv().write(run.output("run.cfg"))?;
    write_checkpoint(&wrnn.net, run.output("net.ckpt"))?;
    mse_trace_export(&report.mse_trace, run.output("mse_trace.csv"))?;
    let mut kv = KeyValues::new();
    kv.push("family", report.family)
        .push("2N", report.neuron_count_2n)
        .push("relative_rms_percent", format!("{:.6}", report.relative_rms_percent))
        .push("gamma", format!("{:.6}", report.gamma))
        .push("epochs_to_converge", report.epochs_to_converge)
        .push("epochs_run", report.epochs_run)
        .push("test_samples", report.test_samples)
        .push("rms_normalization", report.rms_normalization);
    kv.write(run.output("report.txt"))?;
    println!(
        "{}: relative RMS {:.3} %, gamma {:.4}, best epoch {} of {}",
        report.family,
        report.relative_rms_percent,
        report.gamma,
        report.epochs_to_converge,
        report.epochs_run
    );
    Ok(())
}

fn predict(run: &mut Run, cfg: &RunConfig, model: &Path) -> CliResult<()> {
    let net = read_checkpoint(model.join("net.ckpt"))?;
    let topology = cfg.hidden.topology(cfg.family)?;
    if net.config().neurons != topology.neurons() || net.config().inputs != topology.external_inputs() {
        return Err(CliError::Usage(
            "checkpoint does not match the configured topology".into(),
        ));
    }
    let wrnn = Wrnn {
        family: cfg.family,
        topology,
        net,
    };
    let data = MeteoData::from_config(cfg)?;
    let vectors = prepare_vectors(&data, cfg.family, cfg)?;
    let fc = forecast(&wrnn, &vectors, &vectors.target_scale)?;
    fc.write_csv(run.output("forecast.csv"))?;
    data.irradiance.write_csv(run.output("observed.csv"))?;
    Ok(())
}

fn score(run: &mut Run, pred: &Path, actual: &Path, from: Option<i64>) -> CliResult<()> {
    let p = load_csv(pred, Channel::Irradiance, "timestamp", "value")?;
    let a = load_csv(actual, Channel::Irradiance, "timestamp", "value")?;
    if p.step() != a.step() {
        return Err(CliError::Data(format!(
            "forecast step {} s differs from observed step {} s",
            p.step(),
            a.step()
        )));
    }
    let start = p.start_epoch().max(a.start_epoch()).max(from.unwrap_or(i64::MIN));
    let end = p.end_epoch().min(a.end_epoch());
    let step = p.step();
    if end < start || (start - a.start_epoch()) % step != 0 || (start - p.start_epoch()) % step != 0 {
        return Err(CliError::Data(
            "forecast and observations share no timestamps".into(),
        ));
    }
    let n = ((end - start) / step) as usize + 1;
    let slice = |ts: &wrnn_core::timeseries::TimeSeries| {
        let first = ((start - ts.start_epoch()) / step) as usize;
        ts.values()[first..first + n].to_vec()
    };
    let result = evaluate(&slice(&p), &slice(&a))?;
    let mut kv = KeyValues::new();
    kv.push("relative_rms_percent", format!("{:.6}", result.relative_rms_percent))
        .push("gamma", format!("{:.6}", result.gamma))
        .push("mse", format!("{:.6}", result.mse))
        .push("n_samples", result.n_samples)
        .push("first_epoch", start)
        .push("last_epoch", end);
    kv.write(run.output("metrics.txt"))?;
    println!(
        "relative RMS {:.3} %, gamma {:.4}, {} samples",
        result.relative_rms_percent, result.gamma, result.n_samples
    );
    Ok(())
}

fn parse_families(list: &str) -> CliResult<Vec<Family>> {
    if list.trim() == "all" {
        return Ok(Family::TABLE1.to_vec());
    }
    list.split(',')
        .map(|f| f.trim().parse::<Family>().map_err(CliError::from))
        .collect()
}

fn sweep(run: &mut Run, cfg: &RunConfig, families: &str, exec: Execution) -> CliResult<()> {
    let families = parse_families(families)?;
    let data = MeteoData::from_config(cfg)?;
    let entries = run_table1_sweep(&families, &data, cfg, exec)?;
    write_table1_csv(&entries, run.output("table1.csv"))?;
    for e in &entries {
        match &e.result {
            Ok(r) => println!(
                "{}: relative RMS {:.3} %, gamma {:.4}, best epoch {}",
                e.family, r.relative_rms_percent, r.gamma, r.epochs_to_converge
            ),
            Err(err) => {
                let msg = err.to_string().replace('\n', " ");
                run.manifest.push("failed", format!("{}:{msg}", e.family));
                println!("{}: failed: {msg}", e.family);
            }
        }
    }
    Ok(())
}
