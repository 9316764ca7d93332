//! Thin command-line front end: generate bitstreams, test files, run the
//! comparison experiment, run parameter sweeps, and benchmark generators.
//! All logic lives in the library; this file only parses flags, wires
//! subcommands, and maps failures to exit codes (0 success, 1 usage,
//! 2 input/format, 3 internal).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use pendulum_prng::baselines::{HashDrbg, Lcg48};
use pendulum_prng::harness::{
    self, ExperimentConfig, GeneratorSpec, SeedSpec, SweepGrid,
};
use pendulum_prng::sts::{run_battery, TestParams};
use pendulum_prng::{Bitstream, Error, GeneratorConfig, Mode, PendulumRng, WordSource};

#[derive(Parser)]
#[command(
    name = "pendulum-prng",
    version,
    about = "Double-pendulum PRNG, statistical test battery, and comparison harness",
    after_help = "Exit codes: 0 success, 1 usage error, 2 input/format error, 3 internal failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bitstream and write it to a file or stdout.
    Gen(GenArgs),
    /// Run the ten-test battery on a bitstream file.
    Test(TestArgs),
    /// Run the four-generator comparison experiment.
    Compare(CompareArgs),
    /// Sweep pendulum parameters one axis at a time.
    Sweep(SweepArgs),
    /// Measure generation throughput and peak memory.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorKind {
    Pendulum,
    Lcg,
    Hashdrbg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    /// One '0'/'1' character per bit; whitespace ignored.
    Ascii,
    /// Packed bytes, MSB first; pass the bit count via --bits.
    Raw,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Random 1000-10000 simulation steps per 32-bit word (costly).
    Paper,
    /// Fixed stir interval per word (fast).
    Stream,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::LoopPerWord,
            ModeArg::Stream => Mode::Streaming,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Which generator to draw from.
    #[arg(long, value_enum)]
    generator: GeneratorKind,
    /// 64-bit seed; omitted = derived from the wall clock (and printed).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of bits to emit.
    #[arg(long)]
    bits: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// File format.
    #[arg(long, value_enum, default_value = "ascii")]
    format: FileFormat,
    /// Pendulum emission mode (pendulum generator only).
    #[arg(long, value_enum, default_value = "stream")]
    mode: ModeArg,
    /// Pendulum damping coefficient d in (0, 1].
    #[arg(long)]
    damping: Option<f64>,
    /// Pendulum gravity (m/s²).
    #[arg(long)]
    g: Option<f64>,
    /// Pendulum inner link length (m).
    #[arg(long)]
    l1: Option<f64>,
    /// Pendulum outer link length (m).
    #[arg(long)]
    l2: Option<f64>,
}

#[derive(Args)]
struct TestArgs {
    /// Bitstream file to test.
    #[arg(long = "in")]
    input: PathBuf,
    /// File format.
    #[arg(long, value_enum, default_value = "ascii")]
    format: FileFormat,
    /// Bit count for raw files (defaults to 8 × file size).
    #[arg(long)]
    bits: Option<usize>,
    /// Significance level.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Block-frequency block length M.
    #[arg(long = "block-m", default_value_t = 20)]
    block_m: usize,
    /// Serial pattern length m.
    #[arg(long = "serial-m", default_value_t = 13)]
    serial_m: usize,
    /// Approximate-entropy pattern length m.
    #[arg(long = "apen-m", default_value_t = 10)]
    apen_m: usize,
    /// Relax minimum-length preconditions.
    #[arg(long = "allow-short")]
    allow_short: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Streams per generator.
    #[arg(long, default_value_t = 10)]
    streams: usize,
    /// Bits per stream.
    #[arg(long, default_value_t = 1_000_000)]
    bits: usize,
    /// Base seed; stream i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here (the table always goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid spec, e.g. "g=9.0,9.81;ratio=0.5,1,2;d=1.0,0.9999".
    /// Axes: g (gravity), ratio (l1/l2), d (damping).
    #[arg(long)]
    grid: String,
    /// Streams per grid point.
    #[arg(long, default_value_t = 5)]
    streams: usize,
    /// Bits per stream (reduced scale keeps sweeps quick).
    #[arg(long, default_value_t = 100_000)]
    bits: usize,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here (the table always goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Which generator to measure.
    #[arg(long, value_enum)]
    generator: GeneratorKind,
    /// Bits to generate; rates below ~10⁶ bits are noisy.
    #[arg(long, default_value_t = 1_000_000)]
    bits: usize,
    /// Seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Pendulum emission mode (pendulum generator only).
    #[arg(long, value_enum, default_value = "stream")]
    mode: ModeArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Format { .. } | Error::Io(_) | Error::InsufficientLength { .. } => 2,
        Error::InvalidParam(_) => 1,
        Error::NonFiniteState => 3,
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        nanos ^ std::process::id() as u64
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Test(args) => cmd_test(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn pendulum_config(mode: ModeArg, damping: Option<f64>, g: Option<f64>, l1: Option<f64>, l2: Option<f64>) -> GeneratorConfig {
    let mut config = GeneratorConfig { mode: mode.into(), ..GeneratorConfig::default() };
    if let Some(d) = damping {
        config.d = d;
    }
    if let Some(g) = g {
        config.g = g;
    }
    if let Some(l1) = l1 {
        config.l1 = l1;
    }
    if let Some(l2) = l2 {
        config.l2 = l2;
    }
    config
}

fn cmd_gen(args: GenArgs) -> Result<(), Error> {
    let seed = resolve_seed(args.seed);
    let mut source: Box<dyn WordSource> = match args.generator {
        GeneratorKind::Pendulum => {
            let config = pendulum_config(args.mode, args.damping, args.g, args.l1, args.l2);
            eprintln!("seed: {seed}");
            eprintln!("config: {}", serde_json::to_string(&config).map_err(json_err)?);
            Box::new(PendulumRng::new(seed, config)?)
        }
        GeneratorKind::Lcg => {
            eprintln!("seed: {seed}");
            eprintln!("config: {{\"generator\":\"lcg\"}}");
            Box::new(Lcg48::new(seed))
        }
        GeneratorKind::Hashdrbg => {
            eprintln!("seed: {seed}");
            eprintln!("config: {{\"generator\":\"hashdrbg\"}}");
            Box::new(HashDrbg::new(seed))
        }
    };
    if args.bits == 0 {
        return Err(Error::InvalidParam("--bits must be >= 1".into()));
    }
    let eps = source.fill_bitstream(args.bits)?;
    eprintln!("bits: {}", eps.len());

    match args.out {
        Some(path) => {
            let mut writer = BufWriter::new(File::create(&path)?);
            write_stream(&eps, args.format, &mut writer)?;
            writer.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            write_stream(&eps, args.format, &mut writer)?;
            writer.flush()?;
        }
    }
    Ok(())
}

fn write_stream<W: Write>(eps: &Bitstream, format: FileFormat, writer: &mut W) -> Result<(), Error> {
    match format {
        FileFormat::Ascii => eps.write_ascii(writer)?,
        FileFormat::Raw => eps.write_raw(writer)?,
    }
    Ok(())
}

fn read_stream(path: &PathBuf, format: FileFormat, bits: Option<usize>) -> Result<Bitstream, Error> {
    let mut file = File::open(path)?;
    match format {
        FileFormat::Ascii => {
            let eps = Bitstream::read_ascii(&mut file)?;
            if let Some(n) = bits {
                if n > eps.len() {
                    return Err(Error::InvalidParam(format!(
                        "--bits {n} exceeds the {} bits in the file",
                        eps.len()
                    )));
                }
                let mut eps = eps;
                eps.truncate(n);
                return Ok(eps);
            }
            Ok(eps)
        }
        FileFormat::Raw => {
            let mut bytes = Vec::new();
            file.read_to_end(&mut bytes)?;
            Bitstream::read_raw(&bytes[..], bits)
        }
    }
}

fn cmd_test(args: TestArgs) -> Result<(), Error> {
    let params = TestParams {
        alpha: args.alpha,
        block_m: args.block_m,
        serial_m: args.serial_m,
        apen_m: args.apen_m,
        universal: None,
        allow_short: args.allow_short,
    };
    params.validate()?;
    let eps = read_stream(&args.input, args.format, args.bits)?;
    eprintln!(
        "config: {{\"n\":{},\"alpha\":{},\"block_m\":{},\"serial_m\":{},\"apen_m\":{}}}",
        eps.len(),
        args.alpha,
        args.block_m,
        args.serial_m,
        args.apen_m
    );

    let items = run_battery(&eps, &params);
    let mut failed = 0usize;
    let mut skipped = 0usize;
    for item in &items {
        match item.result() {
            Some(result) => {
                let ps: Vec<String> = result.p_values.iter().map(|p| format!("{p:.6}")).collect();
                let verdict = if result.pass { "PASS" } else { "FAIL" };
                println!("{:<27} p = {:<22} {verdict}", result.name, ps.join(", "));
                if !result.pass {
                    failed += 1;
                }
            }
            None => {
                if let pendulum_prng::sts::BatteryItem::Skipped { name, reason } = item {
                    println!("{name:<27} skipped: {reason}");
                    skipped += 1;
                }
            }
        }
    }
    let applicable = items.len() - skipped;
    println!(
        "summary: {}/{applicable} applicable tests passed, {failed} failed, {skipped} skipped",
        applicable - failed
    );
    Ok(())
}

fn comparison_generators() -> Vec<GeneratorSpec> {
    let paper = GeneratorConfig { mode: Mode::LoopPerWord, ..GeneratorConfig::default() };
    vec![
        GeneratorSpec::Pendulum { label: "pendulum-d1".into(), config: paper.clone() },
        GeneratorSpec::Pendulum {
            label: "pendulum-d0.9999".into(),
            config: GeneratorConfig { d: 0.9999, ..paper },
        },
        GeneratorSpec::Lcg,
        GeneratorSpec::HashDrbg,
    ]
}

fn cmd_compare(args: CompareArgs) -> Result<(), Error> {
    let seed = resolve_seed(args.seed);
    let config = ExperimentConfig {
        generators: comparison_generators(),
        streams_per_generator: args.streams,
        bits_per_stream: args.bits,
        test_params: TestParams::default(),
        seeds: SeedSpec::Base { base: seed },
        resource_bits: args.bits.max(1024),
        measure_resources: true,
    };
    eprintln!("seed: {seed}");
    eprintln!(
        "config: {{\"streams\":{},\"bits_per_stream\":{},\"resource_bits\":{}}}",
        args.streams, args.bits, config.resource_bits
    );
    let report = harness::run_experiment(&config)?;
    print!("{}", harness::render_table(&report));
    if let Some(path) = args.out {
        let file = File::create(&path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), &report).map_err(json_err)?;
        eprintln!("report: {}", path.display());
    }
    Ok(())
}

fn parse_grid(spec: &str) -> Result<SweepGrid, Error> {
    let mut grid = SweepGrid::default();
    for axis in spec.split(';').filter(|s| !s.trim().is_empty()) {
        let Some((name, values)) = axis.split_once('=') else {
            return Err(Error::InvalidParam(format!(
                "grid axis '{axis}' is not of the form name=v1,v2,..."
            )));
        };
        let parsed: Result<Vec<f64>, Error> = values
            .split(',')
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidParam(format!("grid value '{v}' is not a number"))
                })
            })
            .collect();
        let parsed = parsed?;
        if parsed.is_empty() {
            return Err(Error::InvalidParam(format!("grid axis '{name}' has no values")));
        }
        match name.trim() {
            "g" => grid.g = parsed,
            "ratio" => grid.length_ratio = parsed,
            "d" => grid.damping = parsed,
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown grid axis '{other}' (expected g, ratio, or d)"
                )))
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::InvalidParam("grid spec produced no points".into()));
    }
    Ok(grid)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let grid = parse_grid(&args.grid)?;
    let seed = resolve_seed(args.seed);
    let base = ExperimentConfig {
        generators: vec![GeneratorSpec::Pendulum {
            label: "pendulum".into(),
            config: GeneratorConfig::default(),
        }],
        streams_per_generator: args.streams,
        bits_per_stream: args.bits,
        test_params: TestParams::default(),
        seeds: SeedSpec::Base { base: seed },
        resource_bits: args.bits.max(1024),
        measure_resources: false,
    };
    eprintln!("seed: {seed}");
    eprintln!(
        "config: {{\"streams\":{},\"bits_per_stream\":{},\"grid\":\"{}\"}}",
        args.streams, args.bits, args.grid
    );
    let report = harness::sweep(&base, &grid)?;
    print!("{}", harness::render_sweep_table(&report));
    if let Some(path) = args.out {
        let file = File::create(&path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), &report).map_err(json_err)?;
        eprintln!("report: {}", path.display());
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let seed = resolve_seed(args.seed);
    let spec = match args.generator {
        GeneratorKind::Pendulum => GeneratorSpec::Pendulum {
            label: "pendulum".into(),
            config: GeneratorConfig { mode: args.mode.into(), ..GeneratorConfig::default() },
        },
        GeneratorKind::Lcg => GeneratorSpec::Lcg,
        GeneratorKind::Hashdrbg => GeneratorSpec::HashDrbg,
    };
    eprintln!("seed: {seed}");
    eprintln!("config: {{\"generator\":\"{}\",\"bits\":{}}}", spec.label(), args.bits);
    let usage = harness::measure_resources(&spec, seed, args.bits)?;
    println!("generator: {}", usage.generator);
    println!("bits: {}", usage.bits_measured);
    println!("throughput: {:.0} bits/s", usage.bits_per_second);
    match usage.peak_extra_bytes {
        Some(bytes) => println!("peak extra memory: {} KiB (best-effort estimate)", bytes / 1024),
        None => println!("peak extra memory: unavailable on this platform"),
    }
    Ok(())
}

fn json_err(err: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(err))
}
