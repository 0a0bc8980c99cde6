mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hbent::census::{self, asymptotic_quadratic_density, render_decimal};
use hbent::harness::{self, FunctionFormat};
use hbent::{Encoding, Error, FitnessKind, RunResult};

use settings::{parse_fitness, EvolveSettings, TermLimit};

#[derive(Parser)]
#[command(name = "hbent", version, about = "Search and count homogeneous bent Boolean functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded batch of evolutionary searches.
    Evolve(EvolveArgs),
    /// Count homogeneous bent functions of degree d in n variables.
    Census(CensusArgs),
    /// Report the properties of a function given as hex or monomials.
    Verify(VerifyArgs),
    /// Closed-form counts and densities of quadratic homogeneous bent functions.
    DensityFormula(FormulaArgs),
}

#[derive(Args)]
struct EvolveArgs {
    /// Key-value (TOML) file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Batch name, also the subdirectory of --out receiving the records.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, value_parser = parse_encoding)]
    encoding: Option<Encoding>,
    /// Required monomial count, or `unrestricted`.
    #[arg(long)]
    k: Option<TermLimit>,
    #[arg(long, value_parser = parse_fitness)]
    fitness: Option<FitnessKind>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation budget per run.
    #[arg(long)]
    evaluations: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    pmut: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    local_search: Option<bool>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl EvolveArgs {
    fn settings(self) -> anyhow::Result<EvolveSettings> {
        let base = match &self.config {
            Some(path) => EvolveSettings::load(path)?,
            None => EvolveSettings::default(),
        };
        Ok(base.overlay(EvolveSettings {
            name: self.name,
            n: self.n,
            degree: self.degree,
            encoding: self.encoding,
            k: self.k,
            fitness: self.fitness,
            runs: self.runs,
            seed: self.seed,
            evaluations: self.evaluations,
            population: self.population,
            pmut: self.pmut,
            local_search: self.local_search,
            ls_fraction: None,
            ls_trials: None,
            workers: self.workers,
            out: self.out,
        }))
    }
}

fn parse_encoding(s: &str) -> Result<Encoding, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct CensusArgs {
    #[arg(value_name = "N")]
    n_pos: Option<usize>,
    #[arg(value_name = "DEGREE")]
    degree_pos: Option<usize>,
    #[arg(long, conflicts_with = "n_pos")]
    n: Option<usize>,
    #[arg(long, conflicts_with = "degree_pos")]
    degree: Option<usize>,
    /// Directory receiving census_n{N}_d{D}.csv and .txt.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Hex,
    Anf,
}

#[derive(Args)]
struct VerifyArgs {
    /// File with a hex truth table, a monomial-form ANF, or run records
    /// (one JSON object per line); `-` reads standard input.
    file: PathBuf,
    #[arg(long)]
    degree: Option<usize>,
    /// Variable count for ANF input; inferred from the largest variable otherwise.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    format: InputFormat,
}

#[derive(Args)]
struct FormulaArgs {
    /// Even variable count; omitted prints n = 2, 4, ..., 16.
    #[arg(long)]
    n: Option<usize>,
    /// Factors in the partial product for the limiting density.
    #[arg(long, default_value_t = 30)]
    terms: usize,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Evolve(args) => evolve(args),
        Command::Census(args) => census_cmd(args),
        Command::Verify(args) => verify(args),
        Command::DensityFormula(args) => density_formula(args),
    }
}

fn evolve(args: EvolveArgs) -> anyhow::Result<()> {
    let settings = args.settings()?;
    let workers = settings.workers();
    let spec = settings.into_spec()?;
    let e = &spec.engine;
    println!(
        "batch {}: n={} d={} encoding={} k={} fitness={:?} runs={} seeds {}..{} workers={}",
        spec.name,
        e.n,
        e.d,
        e.encoding,
        e.k.map_or(TermLimit::Unrestricted, TermLimit::Terms),
        e.fitness,
        spec.runs,
        spec.base_seed,
        spec.base_seed + spec.runs as u64 - 1,
        workers
    );
    let outcome = harness::run_experiment(&spec, workers)?;
    for r in &outcome.results {
        println!(
            "seed {:>4}  success {:<5}  best {:>12}  evals {:>8}  terms {}",
            r.seed, r.success, r.best_value, r.evaluations_used, r.best_terms
        );
    }
    println!("records: {}", spec.batch_dir().join(harness::RUNS_FILE).display());
    println!(
        "success table: {}",
        spec.output_path.join(harness::SUCCESS_TABLE_FILE).display()
    );
    println!("successes: {}/{}", outcome.successes, spec.runs);
    Ok(())
}

fn census_cmd(args: CensusArgs) -> anyhow::Result<()> {
    let (Some(n), Some(d)) = (args.n.or(args.n_pos), args.degree.or(args.degree_pos)) else {
        bail!("census needs N and DEGREE");
    };
    let report = match census::density_report(n, d) {
        Ok(r) => r,
        Err(Error::InfeasibleEnumeration { .. }) if (n, d) == (8, 3) => census::cubic_n8_reference(),
        Err(e) => return Err(e.into()),
    };
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let stem = args.out.join(format!("census_n{n}_d{d}"));
    let csv = stem.with_extension("csv");
    let txt = stem.with_extension("txt");
    write(&csv, &report.to_csv())?;
    write(&txt, &report.to_text())?;
    print!("{}", report.to_text());
    println!("wrote {} and {}", csv.display(), txt.display());
    Ok(())
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn verify(args: VerifyArgs) -> anyhow::Result<()> {
    let text = if args.file.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).context("cannot read standard input")?
    } else {
        fs::read_to_string(&args.file)
            .with_context(|| format!("cannot read {}", args.file.display()))?
    };
    let format = match args.format {
        InputFormat::Auto => FunctionFormat::Auto,
        InputFormat::Hex => FunctionFormat::Hex,
        InputFormat::Anf => FunctionFormat::Anf,
    };
    if text.trim_start().starts_with('{') {
        for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let record: RunResult = serde_json::from_str(line)
                .with_context(|| format!("record {} is not a run record", i + 1))?;
            let tt = harness::parse_function(&record.best_anf, FunctionFormat::Anf, Some(record.n))?;
            let report = harness::verify_function(&tt, args.degree.unwrap_or(record.d));
            println!("seed {}: {report}", record.seed);
        }
        return Ok(());
    }
    let tt = harness::parse_function(&text, format, args.n)?;
    let d = match args.degree {
        Some(d) => d,
        None => hbent::algebraic_degree(&hbent::mobius_transform(&tt)),
    };
    println!("{}", harness::verify_function(&tt, d));
    Ok(())
}

fn density_formula(args: FormulaArgs) -> anyhow::Result<()> {
    let sizes: Vec<usize> = match args.n {
        Some(n) => vec![n],
        None => (2..=16).step_by(2).collect(),
    };
    println!("n,count,density,density_decimal");
    for n in sizes {
        let count = census::quadratic_bent_count(n)?;
        let density = census::quadratic_density(n)?;
        println!("{n},{count},{density},{}", render_decimal(&density));
    }
    println!(
        "limit ({} factors): {:.6}",
        args.terms,
        asymptotic_quadratic_density(args.terms)
    );
    Ok(())
}
