//! Experiment orchestration: the generator comparison (pass-count table),
//! throughput/memory measurement, and one-variable-at-a-time parameter
//! sweeps. Reports come out as a versioned JSON document and as an aligned
//! plain-text table.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{HashDrbg, Lcg48, Lcg48LowBit};
use crate::error::{Error, Result};
use crate::generator::{GeneratorConfig, PendulumRng, WordSource};
use crate::sts::{run_battery, BatteryItem, TestParams, BATTERY_TEST_NAMES};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// A generator entry in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Pendulum { label: String, config: GeneratorConfig },
    Lcg,
    HashDrbg,
    /// The LCG low-bit battery-sensitivity fixture.
    LcgLowBit,
    /// Degenerate constant source (harness self-tests).
    Constant { bit: u8 },
}

impl GeneratorSpec {
    pub fn label(&self) -> String {
        match self {
            GeneratorSpec::Pendulum { label, .. } => label.clone(),
            GeneratorSpec::Lcg => "lcg".into(),
            GeneratorSpec::HashDrbg => "hashdrbg".into(),
            GeneratorSpec::LcgLowBit => "lcg-lowbit".into(),
            GeneratorSpec::Constant { bit } => format!("constant-{bit}"),
        }
    }

    pub fn instantiate(&self, seed: u64) -> Result<Box<dyn WordSource + Send>> {
        Ok(match self {
            GeneratorSpec::Pendulum { config, .. } => {
                Box::new(PendulumRng::new(seed, config.clone())?)
            }
            GeneratorSpec::Lcg => Box::new(Lcg48::new(seed)),
            GeneratorSpec::HashDrbg => Box::new(HashDrbg::new(seed)),
            GeneratorSpec::LcgLowBit => Box::new(Lcg48LowBit::new(seed)),
            GeneratorSpec::Constant { bit } => Box::new(ConstantSource { bit: *bit }),
        })
    }
}

/// Emits all-zero or all-one words forever.
struct ConstantSource {
    bit: u8,
}

impl WordSource for ConstantSource {
    fn next_word(&mut self) -> Result<u32> {
        Ok(if self.bit == 0 { 0 } else { u32::MAX })
    }
}

/// Per-stream seed assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedSpec {
    /// Stream i uses base + i (same seeds for every generator).
    Base { base: u64 },
    /// Explicit per-stream list; must cover streams_per_generator.
    Explicit { seeds: Vec<u64> },
}

impl SeedSpec {
    fn seed_for(&self, stream: usize) -> u64 {
        match self {
            SeedSpec::Base { base } => base.wrapping_add(stream as u64),
            SeedSpec::Explicit { seeds } => seeds[stream],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generators: Vec<GeneratorSpec>,
    pub streams_per_generator: usize,
    pub bits_per_stream: usize,
    pub test_params: TestParams,
    pub seeds: SeedSpec,
    /// Bits generated during throughput/memory measurement. Rates measured
    /// below ~10⁶ bits are noisy; reduced-scale smoke runs use less.
    pub resource_bits: usize,
    pub measure_resources: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            generators: vec![GeneratorSpec::Lcg, GeneratorSpec::HashDrbg],
            streams_per_generator: 10,
            bits_per_stream: 1_000_000,
            test_params: TestParams::default(),
            seeds: SeedSpec::Base { base: 0 },
            resource_bits: 1_000_000,
            measure_resources: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::InvalidParam("experiment needs at least one generator".into()));
        }
        if self.streams_per_generator < 1 {
            return Err(Error::InvalidParam("streams_per_generator must be >= 1".into()));
        }
        if self.bits_per_stream < 128 {
            return Err(Error::InvalidParam(format!(
                "bits_per_stream must be >= 128, got {}",
                self.bits_per_stream
            )));
        }
        if let SeedSpec::Explicit { seeds } = &self.seeds {
            if seeds.len() < self.streams_per_generator {
                return Err(Error::InvalidParam(format!(
                    "explicit seed list covers {} streams, need {}",
                    seeds.len(),
                    self.streams_per_generator
                )));
            }
        }
        if self.measure_resources && self.resource_bits < 1024 {
            return Err(Error::InvalidParam("resource_bits must be >= 1024".into()));
        }
        self.test_params.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamResult {
    pub seed: u64,
    /// Generation failure, if any; tests are absent in that case.
    pub error: Option<String>,
    pub tests: Vec<BatteryItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCount {
    pub test: String,
    pub passes: usize,
    pub skipped: usize,
    /// Streams where the test actually ran.
    pub applicable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorResult {
    pub generator: String,
    pub streams: Vec<StreamResult>,
    pub pass_counts: Vec<TestCount>,
    /// Sum of passes over the ten tests.
    pub overall: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceUsage {
    pub generator: String,
    pub bits_per_second: f64,
    pub bits_measured: usize,
    /// High-water-mark RSS delta around generation; allocation accounting
    /// is platform-dependent, hence best-effort.
    pub peak_extra_bytes: Option<u64>,
    pub memory_is_estimate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub results: Vec<GeneratorResult>,
    pub resources: Vec<ResourceUsage>,
}

/// Runs the comparison experiment: for every generator,
/// `streams_per_generator` streams of `bits_per_stream` bits from the
/// documented seeds, the full battery on each, pass counts per test, and
/// an Overall sum. Per-stream generator failures are recorded and the
/// experiment continues. Deterministic for fixed seeds (wall-clock resource
/// rows aside).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;

    let jobs: Vec<(usize, usize)> = (0..config.generators.len())
        .flat_map(|g| (0..config.streams_per_generator).map(move |s| (g, s)))
        .collect();

    let mut stream_results: Vec<((usize, usize), StreamResult)> = jobs
        .par_iter()
        .map(|&(g, s)| {
            let seed = config.seeds.seed_for(s);
            let spec = &config.generators[g];
            let result = match spec
                .instantiate(seed)
                .and_then(|mut src| src.fill_bitstream(config.bits_per_stream))
            {
                Ok(eps) => StreamResult {
                    seed,
                    error: None,
                    tests: run_battery(&eps, &config.test_params),
                },
                Err(err) => StreamResult { seed, error: Some(err.to_string()), tests: vec![] },
            };
            ((g, s), result)
        })
        .collect();
    stream_results.sort_by_key(|&(key, _)| key);

    let mut results = Vec::with_capacity(config.generators.len());
    for (g, spec) in config.generators.iter().enumerate() {
        let streams: Vec<StreamResult> = stream_results
            .iter()
            .filter(|&&((gi, _), _)| gi == g)
            .map(|(_, r)| r.clone())
            .collect();
        let pass_counts: Vec<TestCount> = BATTERY_TEST_NAMES
            .iter()
            .map(|&name| {
                let mut passes = 0;
                let mut skipped = 0;
                let mut applicable = 0;
                for stream in &streams {
                    match stream.tests.iter().find(|t| t.name() == name) {
                        Some(item) if item.is_skipped() => skipped += 1,
                        Some(item) => {
                            applicable += 1;
                            if item.passed() {
                                passes += 1;
                            }
                        }
                        None => {}
                    }
                }
                TestCount { test: name.to_string(), passes, skipped, applicable }
            })
            .collect();
        let overall = pass_counts.iter().map(|c| c.passes).sum();
        results.push(GeneratorResult { generator: spec.label(), streams, pass_counts, overall });
    }

    // Resource measurement runs serially to avoid contention skew.
    let resources = if config.measure_resources {
        config
            .generators
            .iter()
            .map(|spec| measure_resources(spec, config.seeds.seed_for(0), config.resource_bits))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![]
    };

    Ok(Report { format_version: REPORT_FORMAT_VERSION, config: config.clone(), results, resources })
}

/// Reads a peak-RSS style line from /proc/self/status (Linux); None
/// elsewhere or on parse failure.
fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            return rest.trim().trim_end_matches(" kB").trim().parse().ok();
        }
    }
    None
}

/// Wall-clock generation rate over `n_bits`, plus a best-effort peak-memory
/// delta. Rates measured below ~10⁶ bits are noisy; callers wanting stable
/// numbers should measure at least that much.
pub fn measure_resources(
    spec: &GeneratorSpec,
    seed: u64,
    n_bits: usize,
) -> Result<ResourceUsage> {
    if n_bits < 1024 {
        return Err(Error::InvalidParam(format!(
            "resource measurement needs at least 1024 bits, got {n_bits}"
        )));
    }
    let mut source = spec.instantiate(seed)?;
    let before_kb = peak_rss_kb();
    let start = Instant::now();
    let eps = source.fill_bitstream(n_bits)?;
    let elapsed = start.elapsed().as_secs_f64().max(1e-9);
    let after_kb = peak_rss_kb();
    drop(eps);

    let peak_extra_bytes = match (before_kb, after_kb) {
        (Some(b), Some(a)) => Some(a.saturating_sub(b) * 1024),
        _ => None,
    };
    Ok(ResourceUsage {
        generator: spec.label(),
        bits_per_second: n_bits as f64 / elapsed,
        bits_measured: n_bits,
        peak_extra_bytes,
        memory_is_estimate: true,
    })
}

/// One-variable-at-a-time sweep grid over the pendulum's physical knobs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepGrid {
    pub g: Vec<f64>,
    /// l1/l2 ratios; each point sets l1 = ratio · l2 with l2 from the base
    /// config.
    pub length_ratio: Vec<f64>,
    pub damping: Vec<f64>,
}

impl SweepGrid {
    pub fn is_empty(&self) -> bool {
        self.g.is_empty() && self.length_ratio.is_empty() && self.damping.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub overall: usize,
    /// Maximum attainable overall (streams × tests that ran).
    pub max_overall: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub format_version: u32,
    /// Rows sorted by score, best first.
    pub rows: Vec<SweepRow>,
    /// Whether scores fell as l1/l2 grew, when that axis was swept.
    pub length_ratio_trend: Option<String>,
}

/// Runs a reduced experiment per grid point, varying one pendulum knob at
/// a time from the base config's first pendulum generator. The base config
/// itself is never mutated. Per-point failures are recorded and the sweep
/// continues.
pub fn sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<SweepReport> {
    base.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidParam("sweep grid is empty".into()));
    }
    let pendulum = base
        .generators
        .iter()
        .find_map(|g| match g {
            GeneratorSpec::Pendulum { config, .. } => Some(config.clone()),
            _ => None,
        })
        .ok_or_else(|| {
            Error::InvalidParam("sweep needs a pendulum generator in the base config".into())
        })?;

    let mut rows = Vec::new();
    let mut ratio_scores: Vec<(f64, usize)> = Vec::new();

    let axes: [(&str, &[f64]); 3] = [
        ("g", &grid.g),
        ("length_ratio", &grid.length_ratio),
        ("damping", &grid.damping),
    ];
    for (axis, values) in axes {
        for &value in values {
            let mut config = pendulum.clone();
            match axis {
                "g" => config.g = value,
                "length_ratio" => config.l1 = value * config.l2,
                _ => config.d = value,
            }
            let label = format!("pendulum[{axis}={value}]");
            let point = ExperimentConfig {
                generators: vec![GeneratorSpec::Pendulum { label, config }],
                measure_resources: false,
                ..base.clone()
            };
            match run_experiment(&point) {
                Ok(report) => {
                    let result = &report.results[0];
                    let applicable: usize = result.pass_counts.iter().map(|c| c.applicable).sum();
                    let overall = result.overall;
                    if axis == "length_ratio" {
                        ratio_scores.push((value, overall));
                    }
                    rows.push(SweepRow {
                        axis: axis.to_string(),
                        value,
                        overall,
                        max_overall: applicable,
                        error: None,
                    });
                }
                Err(err) => rows.push(SweepRow {
                    axis: axis.to_string(),
                    value,
                    overall: 0,
                    max_overall: 0,
                    error: Some(err.to_string()),
                }),
            }
        }
    }

    let length_ratio_trend = if ratio_scores.len() >= 2 {
        ratio_scores.sort_by(|a, b| a.0.total_cmp(&b.0));
        let decreasing = ratio_scores.windows(2).all(|w| w[1].1 <= w[0].1);
        Some(
            if decreasing {
                "observed: score non-increasing as l1/l2 grows".to_string()
            } else {
                "not observed: score not monotone in l1/l2".to_string()
            },
        )
    } else {
        None
    };

    rows.sort_by(|a, b| b.overall.cmp(&a.overall).then(a.value.total_cmp(&b.value)));
    Ok(SweepReport { format_version: REPORT_FORMAT_VERSION, rows, length_ratio_trend })
}

/// Renders the pass-count table: one row per battery test plus Overall,
/// one column per generator, then the resource rows.
pub fn render_table(report: &Report) -> String {
    let mut columns: Vec<String> = vec!["Test Name".to_string()];
    columns.extend(report.results.iter().map(|r| r.generator.clone()));

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, &name) in BATTERY_TEST_NAMES.iter().enumerate() {
        let mut row = vec![name.to_string()];
        for result in &report.results {
            let count = &result.pass_counts[i];
            if count.applicable == 0 && count.skipped > 0 {
                row.push(format!("skipped ({})", truncate_reason(result, name)));
            } else {
                row.push(format!("{}", count.passes));
            }
        }
        rows.push(row);
    }
    let mut overall = vec!["Overall".to_string()];
    for result in &report.results {
        overall.push(format!("{}", result.overall));
    }
    rows.push(overall);

    if !report.resources.is_empty() {
        let mut throughput = vec!["Throughput (bits/s)".to_string()];
        let mut memory = vec!["Peak extra memory (KiB, est.)".to_string()];
        for result in &report.results {
            let usage = report.resources.iter().find(|u| u.generator == result.generator);
            match usage {
                Some(u) => {
                    throughput.push(format!("{:.0}", u.bits_per_second));
                    memory.push(match u.peak_extra_bytes {
                        Some(bytes) => format!("{}", bytes / 1024),
                        None => "n/a".to_string(),
                    });
                }
                None => {
                    throughput.push("n/a".into());
                    memory.push("n/a".into());
                }
            }
        }
        rows.push(throughput);
        rows.push(memory);
    }

    let mut widths: Vec<usize> = columns.iter().map(|c| c.len()).collect();
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }

    let mut out = String::new();
    let write_row = |out: &mut String, cells: &[String]| {
        for (i, cell) in cells.iter().enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<width$}", width = widths[0]);
            } else {
                let _ = write!(out, "  {cell:>width$}", width = widths[i]);
            }
        }
        out.push('\n');
    };
    write_row(&mut out, &columns);
    let total_width = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total_width));
    out.push('\n');
    for row in &rows {
        write_row(&mut out, row);
    }
    out
}

fn truncate_reason(result: &GeneratorResult, test: &str) -> String {
    for stream in &result.streams {
        if let Some(BatteryItem::Skipped { reason, .. }) =
            stream.tests.iter().find(|t| t.name() == test)
        {
            let mut reason = reason.clone();
            if let Some(idx) = reason.find(" bits") {
                reason.truncate(idx + 5);
            }
            return reason;
        }
    }
    "precondition".to_string()
}

/// Renders a sweep report as an aligned table.
pub fn render_sweep_table(report: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<14} {:>10} {:>9} {:>6}", "Axis", "Value", "Overall", "Max");
    let _ = writeln!(out, "{}", "-".repeat(43));
    for row in &report.rows {
        match &row.error {
            None => {
                let _ = writeln!(
                    out,
                    "{:<14} {:>10} {:>9} {:>6}",
                    row.axis, row.value, row.overall, row.max_overall
                );
            }
            Some(err) => {
                let _ = writeln!(out, "{:<14} {:>10} failed: {err}", row.axis, row.value);
            }
        }
    }
    if let Some(trend) = &report.length_ratio_trend {
        let _ = writeln!(out, "length-ratio trend: {trend}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(generators: Vec<GeneratorSpec>) -> ExperimentConfig {
        ExperimentConfig {
            generators,
            streams_per_generator: 2,
            bits_per_stream: 2048,
            test_params: TestParams::default(),
            seeds: SeedSpec::Base { base: 0 },
            resource_bits: 4096,
            measure_resources: false,
        }
    }

    #[test]
    fn constant_stream_passes_nothing() {
        let config = ExperimentConfig {
            streams_per_generator: 1,
            ..tiny_config(vec![GeneratorSpec::Constant { bit: 0 }])
        };
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.results[0].overall, 0);
        for count in &report.results[0].pass_counts {
            assert_eq!(count.passes, 0, "{}", count.test);
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let config = tiny_config(vec![GeneratorSpec::Lcg, GeneratorSpec::HashDrbg]);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.results, b.results);
    }

    #[test]
    fn table_has_ten_test_rows_plus_overall() {
        let config = tiny_config(vec![GeneratorSpec::HashDrbg]);
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.results[0].pass_counts.len(), 10);
        let table = render_table(&report);
        for name in BATTERY_TEST_NAMES {
            assert!(table.contains(name), "missing row {name}");
        }
        assert!(table.contains("Overall"));
    }

    #[test]
    fn skipped_tests_are_marked_not_failed() {
        let config = tiny_config(vec![GeneratorSpec::HashDrbg]);
        let report = run_experiment(&config).unwrap();
        // At 2048 bits the rank/universal tests (and serial at m=13) skip.
        let rank = report.results[0].pass_counts.iter().find(|c| c.test == "Rank").unwrap();
        assert_eq!(rank.applicable, 0);
        assert_eq!(rank.skipped, 2);
        let table = render_table(&report);
        assert!(table.contains("skipped"));
    }

    #[test]
    fn per_stream_seeds_are_base_plus_index() {
        let config = tiny_config(vec![GeneratorSpec::Lcg]);
        let report = run_experiment(&config).unwrap();
        let seeds: Vec<u64> = report.results[0].streams.iter().map(|s| s.seed).collect();
        assert_eq!(seeds, vec![0, 1]);
    }

    #[test]
    fn explicit_seed_list_must_cover_streams() {
        let mut config = tiny_config(vec![GeneratorSpec::Lcg]);
        config.seeds = SeedSpec::Explicit { seeds: vec![1] };
        assert!(run_experiment(&config).is_err());
    }

    #[test]
    fn resource_measurement_is_positive_and_finite() {
        let usage = measure_resources(&GeneratorSpec::Lcg, 0, 100_000).unwrap();
        assert!(usage.bits_per_second.is_finite() && usage.bits_per_second > 0.0);
        assert!(usage.memory_is_estimate);
    }

    #[test]
    fn sweep_single_point_equals_run_experiment() {
        let pendulum = GeneratorSpec::Pendulum {
            label: "pendulum".into(),
            config: GeneratorConfig::default(),
        };
        let base = ExperimentConfig {
            streams_per_generator: 1,
            bits_per_stream: 2048,
            measure_resources: false,
            ..tiny_config(vec![pendulum.clone()])
        };
        let grid = SweepGrid { g: vec![9.81], ..SweepGrid::default() };
        let report = sweep(&base, &grid).unwrap();
        assert_eq!(report.rows.len(), 1);

        let direct = run_experiment(&ExperimentConfig {
            generators: vec![GeneratorSpec::Pendulum {
                label: "pendulum[g=9.81]".into(),
                config: GeneratorConfig { g: 9.81, ..GeneratorConfig::default() },
            }],
            ..base
        })
        .unwrap();
        assert_eq!(report.rows[0].overall, direct.results[0].overall);
        assert!(report.length_ratio_trend.is_none());
    }

    #[test]
    fn sweep_does_not_mutate_base() {
        let base = ExperimentConfig {
            streams_per_generator: 1,
            bits_per_stream: 2048,
            ..tiny_config(vec![GeneratorSpec::Pendulum {
                label: "pendulum".into(),
                config: GeneratorConfig::default(),
            }])
        };
        let snapshot = base.clone();
        let grid = SweepGrid { damping: vec![1.0, 0.9999], ..SweepGrid::default() };
        let report = sweep(&base, &grid).unwrap();
        assert_eq!(base, snapshot);
        assert_eq!(report.rows.len(), 2);
    }

    #[test]
    fn sweep_requires_pendulum_and_nonempty_grid() {
        let base = tiny_config(vec![GeneratorSpec::Lcg]);
        let grid = SweepGrid { g: vec![9.81], ..SweepGrid::default() };
        assert!(sweep(&base, &grid).is_err());

        let base = tiny_config(vec![GeneratorSpec::Pendulum {
            label: "pendulum".into(),
            config: GeneratorConfig::default(),
        }]);
        assert!(sweep(&base, &SweepGrid::default()).is_err());
    }

    #[test]
    fn report_serializes_with_version() {
        let config = ExperimentConfig {
            streams_per_generator: 1,
            ..tiny_config(vec![GeneratorSpec::Lcg])
        };
        let report = run_experiment(&config).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["format_version"], 1);
        assert!(json["results"].as_array().unwrap().len() == 1);
        let back: Report = serde_json::from_value(json).unwrap();
        assert_eq!(back, report);
    }
}
