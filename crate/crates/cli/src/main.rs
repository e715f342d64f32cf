//! Command-line pipeline around the `elf-som` library: validate measurement
//! CSVs, train a clustering network, render per-position emission-level
//! reports, run the binning baselines, export plot data, and demonstrate the
//! whole flow on the bundled synthetic corpus.
//!
//! Every subcommand is deterministic: identical inputs, flags, and seed
//! produce byte-identical outputs. Exit codes: 0 on success, 1 on usage
//! errors (bad flags or tokens), 2 on data errors (unreadable files,
//! malformed rows, empty positions, broken model files).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use elf_som::{
    adapter_sample_csv, adapter_samples, build_dataset, build_level_report, default_epochs,
    emit_plot_data, equal_frequency_bins, equal_width_bins, from_model_string, parse_spectrum_csv,
    render_plot_series, render_report, summarize_adapters, to_model_string, train, BinAssignment,
    BinningError, EmissionDataset, InitMode, MeasurementPosition, NeighborhoodKernel, RenderFormat,
    SomConfig, SpectrumSample, DEFAULT_LIMIT_UT, DEMO_SEED,
};

#[derive(Parser)]
#[command(
    name = "elf-som",
    version,
    about = "Cluster ELF magnetic-field spectra of laptop AC adapters into emission levels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a measurement CSV and check its invariants
    Validate {
        /// Input measurement CSV
        csv: PathBuf,
    },
    /// Train a clustering network on one measurement position
    Train(TrainArgs),
    /// Render the emission-level report for a trained model
    Report(ReportArgs),
    /// Discretize one position with a binning baseline
    Baseline(BaselineArgs),
    /// Export plot-ready spectrum series for two positions of one adapter
    Plot(PlotArgs),
    /// Run the bundled synthetic corpus end-to-end and print all six reports
    Demo {
        /// Also write the corpus CSV, models, and reports into this directory
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Input measurement CSV
    csv: PathBuf,
    /// Measurement position to train on
    #[arg(long)]
    position: MeasurementPosition,
    /// Number of clusters (output neurons)
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    /// Training presentations; default max(10 x instance count, 1000)
    #[arg(long)]
    epochs: Option<usize>,
    /// Training seed
    #[arg(long, env = "SOM_EMISSION_SEED", default_value_t = 42)]
    seed: u64,
    /// Presentations spent in the ordering phase
    #[arg(long, default_value_t = 100)]
    ordering_steps: usize,
    /// Neighborhood radius at the start of the ordering phase
    #[arg(long, default_value_t = 3)]
    radius: usize,
    /// Learning rate at step 0
    #[arg(long, default_value_t = 0.5)]
    eta_start: f64,
    /// Learning rate after the ordering phase
    #[arg(long, default_value_t = 0.01)]
    eta_floor: f64,
    /// Write the model file here instead of stdout
    #[arg(long)]
    model: Option<PathBuf>,
    /// Prototype initialization: data-range or small-random
    #[arg(long, default_value = "data-range", value_parser = parse_init)]
    init: InitMode,
    /// Neighborhood kernel: flat or gaussian
    #[arg(long, default_value = "flat", value_parser = parse_kernel)]
    kernel: NeighborhoodKernel,
}

#[derive(Args)]
struct ReportArgs {
    /// Input measurement CSV
    csv: PathBuf,
    /// Measurement position to report on
    #[arg(long)]
    position: MeasurementPosition,
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Safety reference limit in microtesla
    #[arg(long, default_value_t = DEFAULT_LIMIT_UT)]
    limit: f64,
    /// Output format: markdown, csv, or json
    #[arg(long, default_value = "markdown", value_parser = parse_format)]
    format: RenderFormat,
}

#[derive(Args)]
struct BaselineArgs {
    /// Input measurement CSV
    csv: PathBuf,
    /// Measurement position to discretize
    #[arg(long)]
    position: MeasurementPosition,
    /// Discretization method: width or frequency
    #[arg(long, value_parser = parse_method)]
    method: BaselineMethod,
    /// Number of bins
    #[arg(long, default_value_t = 5)]
    bins: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// Input measurement CSV
    csv: PathBuf,
    /// Adapter identifier
    #[arg(long)]
    adapter: String,
    /// First position (series A)
    #[arg(long)]
    pos_a: MeasurementPosition,
    /// Second position (series B)
    #[arg(long)]
    pos_b: MeasurementPosition,
    /// Directory for the three series files
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BaselineMethod {
    Width,
    Frequency,
}

impl BaselineMethod {
    fn title(self) -> &'static str {
        match self {
            BaselineMethod::Width => "Equal-width",
            BaselineMethod::Frequency => "Equal-frequency",
        }
    }
}

fn parse_method(s: &str) -> Result<BaselineMethod, String> {
    match s {
        "width" => Ok(BaselineMethod::Width),
        "frequency" => Ok(BaselineMethod::Frequency),
        _ => Err(format!("unknown method `{s}` (expected width|frequency)")),
    }
}

fn parse_format(s: &str) -> Result<RenderFormat, String> {
    RenderFormat::parse_token(s)
        .ok_or_else(|| format!("unknown format `{s}` (expected markdown|csv|json)"))
}

fn parse_init(s: &str) -> Result<InitMode, String> {
    InitMode::parse_token(s)
        .ok_or_else(|| format!("unknown init mode `{s}` (expected data-range|small-random)"))
}

fn parse_kernel(s: &str) -> Result<NeighborhoodKernel, String> {
    NeighborhoodKernel::parse_token(s)
        .ok_or_else(|| format!("unknown kernel `{s}` (expected flat|gaussian)"))
}

/// Failures split by exit code: usage problems exit 1, data problems exit 2.
enum CliError {
    Usage(String),
    Data(String),
}

fn data(err: impl std::fmt::Display) -> CliError {
    CliError::Data(err.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Validate { csv } => cmd_validate(csv),
        Command::Train(args) => cmd_train(args),
        Command::Report(args) => cmd_report(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Demo { out_dir } => cmd_demo(out_dir.as_deref()),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|err| CliError::Data(format!("cannot read {}: {err}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|err| CliError::Data(format!("cannot write {}: {err}", path.display())))
}

fn load_samples(path: &Path) -> Result<Vec<SpectrumSample>, CliError> {
    let content = read_file(path)?;
    parse_spectrum_csv(&content).map_err(data)
}

fn load_dataset(path: &Path, position: MeasurementPosition) -> Result<EmissionDataset, CliError> {
    let samples = load_samples(path)?;
    build_dataset(&samples, position).map_err(data)
}

fn cmd_validate(path: &Path) -> Result<(), CliError> {
    let samples = load_samples(path)?;
    let summaries = summarize_adapters(&samples);
    let position_count: usize = {
        let mut present = [false; MeasurementPosition::ALL.len()];
        for sample in &samples {
            present[sample.position as usize] = true;
        }
        present.iter().filter(|p| **p).count()
    };
    println!(
        "OK: {} samples, {} adapters, {} positions",
        samples.len(),
        summaries.len(),
        position_count
    );
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.csv, args.position)?;
    let config = SomConfig {
        k: args.clusters,
        n: 1,
        epochs: args.epochs.unwrap_or_else(|| default_epochs(dataset.len())),
        ordering_steps: args.ordering_steps,
        initial_radius: args.radius,
        eta_start: args.eta_start,
        eta_floor: args.eta_floor,
        seed: args.seed,
        init: args.init,
        kernel: args.kernel,
    };
    config
        .validate()
        .map_err(|err| CliError::Usage(err.to_string()))?;
    let (network, trace) = train(&dataset.feature_vectors(), &config).map_err(data)?;
    let text = to_model_string(&config, &network);
    match &args.model {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "trained {} clusters on {} instances at {} in {} steps; quantization error {} -> {}",
        config.k,
        dataset.len(),
        dataset.position(),
        trace.presentations,
        trace.qe_initial,
        trace.qe_final
    );
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    if !args.limit.is_finite() {
        return Err(CliError::Usage(format!(
            "limit must be finite, found {}",
            args.limit
        )));
    }
    let dataset = load_dataset(&args.csv, args.position)?;
    let model_text = read_file(&args.model)?;
    let (_, network) = from_model_string(&model_text).map_err(data)?;
    let report = build_level_report(&dataset, &network, args.limit).map_err(data)?;
    print!("{}", render_report(&report, args.format));
    Ok(())
}

fn render_baseline(args: &BaselineArgs, values: &[f64], assignment: &BinAssignment) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "## {} baseline: {} ({} bins)\n\n",
        args.method.title(),
        args.position,
        args.bins
    ));
    if assignment.boundaries.is_empty() {
        out.push_str("boundaries (µT): (none)\n");
    } else {
        let rendered: Vec<String> = assignment.boundaries.iter().map(f64::to_string).collect();
        out.push_str(&format!("boundaries (µT): {}\n", rendered.join(", ")));
    }
    out.push_str("| bin | members | b_min (µT) | b_max (µT) |\n|---|---|---|---|\n");
    for (bin, size) in assignment.bin_sizes().into_iter().enumerate() {
        if size == 0 {
            out.push_str(&format!("| {bin} | 0 | - | - |\n"));
            continue;
        }
        let members = values
            .iter()
            .zip(&assignment.labels)
            .filter(|(_, &label)| label == bin)
            .map(|(&v, _)| v);
        let mut b_min = f64::INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        for v in members {
            b_min = b_min.min(v);
            b_max = b_max.max(v);
        }
        out.push_str(&format!("| {bin} | {size} | {b_min} | {b_max} |\n"));
    }
    out
}

fn cmd_baseline(args: &BaselineArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.csv, args.position)?;
    let values: Vec<f64> = dataset.instances().iter().map(|i| i.b_mean_ut).collect();
    let result = match args.method {
        BaselineMethod::Width => equal_width_bins(&values, args.bins),
        BaselineMethod::Frequency => equal_frequency_bins(&values, args.bins),
    };
    let assignment = result.map_err(|err| match err {
        BinningError::NonPositiveK => CliError::Usage(err.to_string()),
        _ => data(err),
    })?;
    print!("{}", render_baseline(args, &values, &assignment));
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let samples = load_samples(&args.csv)?;
    let series = emit_plot_data(&samples, &args.adapter, args.pos_a, args.pos_b).map_err(data)?;
    fs::create_dir_all(&args.out_dir).map_err(|err| {
        CliError::Data(format!("cannot create {}: {err}", args.out_dir.display()))
    })?;
    let names = [
        format!("{}_{}.dat", args.adapter, args.pos_a),
        format!("{}_{}.dat", args.adapter, args.pos_b),
        format!("{}_{}_minus_{}.dat", args.adapter, args.pos_a, args.pos_b),
    ];
    for (name, data_series) in names.iter().zip(&series) {
        let path = args.out_dir.join(name);
        write_file(&path, &render_plot_series(data_series))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_demo(out_dir: Option<&Path>) -> Result<(), CliError> {
    let samples = adapter_samples();
    println!(
        "Synthetic demonstration corpus: 3 adapters x 6 positions x 51 frequencies x 4 sweeps"
    );
    println!("Per-side maxima (µT):");
    println!();
    let mut header = String::from("| adapter |");
    let mut rule = String::from("|---|");
    for position in MeasurementPosition::ALL {
        header.push_str(&format!(" {position} |"));
        rule.push_str("---|");
    }
    println!("{header}");
    println!("{rule}");
    for summary in summarize_adapters(&samples) {
        let mut row = format!("| {} |", summary.adapter_id);
        for position in MeasurementPosition::ALL {
            row.push_str(&format!(" {} |", summary.positions[&position].b_max_ut));
        }
        println!("{row}");
    }
    println!();

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)
            .map_err(|err| CliError::Data(format!("cannot create {}: {err}", dir.display())))?;
        write_file(&dir.join("sample.csv"), &adapter_sample_csv())?;
    }

    for position in MeasurementPosition::ALL {
        let dataset = build_dataset(&samples, position).map_err(data)?;
        let config = SomConfig {
            epochs: default_epochs(dataset.len()),
            seed: DEMO_SEED,
            ..SomConfig::default()
        };
        let (network, _) = train(&dataset.feature_vectors(), &config).map_err(data)?;
        let report = build_level_report(&dataset, &network, DEFAULT_LIMIT_UT).map_err(data)?;
        let text = render_report(&report, RenderFormat::Markdown);
        print!("{text}");
        println!();
        if let Some(dir) = out_dir {
            write_file(
                &dir.join(format!("{position}.model")),
                &to_model_string(&config, &network),
            )?;
            write_file(&dir.join(format!("{position}.md")), &text)?;
        }
    }
    Ok(())
}
