//! The ten-test statistical battery, with NIST SP 800-22 semantics:
//! frequency, block frequency, cumulative sums, runs, longest run of ones,
//! binary matrix rank, discrete Fourier transform, Maurer's universal
//! statistic, approximate entropy, and serial.
//!
//! Every test is a pure function of the bitstream returning a
//! [`TestResult`]; minimum-length preconditions follow the standard's
//! recommendations and can be relaxed with [`TestParams::allow_short`]
//! (needed for the textbook worked examples, which use ten-bit inputs).

mod basic;
mod patterns;
mod rank;
mod special;
mod spectral;
mod universal;

pub use basic::{
    block_frequency_test, cumulative_sums_test, frequency_test, longest_run_test, runs_test,
    CusumMode,
};
pub use patterns::{approximate_entropy_test, serial_test};
pub use rank::{gf2_rank, rank_probability, rank_test};
pub use special::{erfc, igamc};
pub use spectral::dft_test;
pub use universal::{universal_constants, universal_test};

use serde::{Deserialize, Serialize};

use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

/// Battery-wide tuning knobs. `Default` matches the standard's recommended
/// values for streams around 10⁵–10⁶ bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    /// Significance level; a test passes when every p-value is ≥ alpha.
    pub alpha: f64,
    /// Block length M for the block-frequency test.
    pub block_m: usize,
    /// Pattern length m for the serial test.
    pub serial_m: usize,
    /// Pattern length m for the approximate-entropy test.
    pub apen_m: usize,
    /// Explicit (L, Q) for the universal test; `None` derives both from n.
    pub universal: Option<(usize, usize)>,
    /// Relax minimum-length preconditions to their mathematical floors.
    pub allow_short: bool,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            block_m: 20,
            serial_m: 13,
            apen_m: 10,
            universal: None,
            allow_short: false,
        }
    }
}

impl TestParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParam(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.block_m == 0 {
            return Err(Error::InvalidParam("block_m must be >= 1".into()));
        }
        if self.serial_m < 3 {
            return Err(Error::InvalidParam(format!(
                "serial_m must be > 2, got {}",
                self.serial_m
            )));
        }
        if self.apen_m == 0 {
            return Err(Error::InvalidParam("apen_m must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a single statistical test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    /// One p-value for most tests; two for cumulative sums (forward and
    /// backward) and serial (∇ψ² and ∇²ψ²).
    pub p_values: Vec<f64>,
    /// True iff min(p_values) ≥ alpha.
    pub pass: bool,
    /// Named intermediate statistics (test-specific).
    pub statistics: Vec<(String, f64)>,
}

impl TestResult {
    pub(crate) fn new(
        name: &str,
        p_values: Vec<f64>,
        alpha: f64,
        statistics: Vec<(&str, f64)>,
    ) -> Self {
        let p_values: Vec<f64> = p_values.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let pass = p_values.iter().all(|&p| p >= alpha);
        Self {
            name: name.to_string(),
            p_values,
            pass,
            statistics: statistics.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn min_p(&self) -> f64 {
        self.p_values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The ten battery rows, in report order.
pub const BATTERY_TEST_NAMES: [&str; 10] = [
    "Frequency",
    "Block Frequency",
    "Cumulative Sums",
    "Runs",
    "Longest Run of Ones",
    "Rank",
    "Discrete Fourier Transform",
    "Universal Statistical",
    "Approximate Entropy",
    "Serial",
];

/// One battery row: either a completed test or the reason it was skipped
/// (insufficient length or parameter constraints for this n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BatteryItem {
    Completed(TestResult),
    Skipped { name: String, reason: String },
}

impl BatteryItem {
    pub fn name(&self) -> &str {
        match self {
            BatteryItem::Completed(r) => &r.name,
            BatteryItem::Skipped { name, .. } => name,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, BatteryItem::Completed(r) if r.pass)
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, BatteryItem::Skipped { .. })
    }

    pub fn result(&self) -> Option<&TestResult> {
        match self {
            BatteryItem::Completed(r) => Some(r),
            BatteryItem::Skipped { .. } => None,
        }
    }
}

fn item_from(name: &str, outcome: Result<TestResult>) -> BatteryItem {
    match outcome {
        Ok(result) => BatteryItem::Completed(result),
        Err(err) => BatteryItem::Skipped { name: name.to_string(), reason: err.to_string() },
    }
}

/// Runs all ten tests in report order. Tests whose preconditions fail for
/// this stream length are reported as skipped with the reason, never as
/// failed.
pub fn run_battery(eps: &Bitstream, params: &TestParams) -> Vec<BatteryItem> {
    let cusum = || -> Result<TestResult> {
        let fwd = cumulative_sums_test(eps, CusumMode::Forward, params)?;
        let bwd = cumulative_sums_test(eps, CusumMode::Backward, params)?;
        let mut p_values = fwd.p_values.clone();
        p_values.extend_from_slice(&bwd.p_values);
        let mut statistics: Vec<(&str, f64)> = Vec::new();
        for (k, v) in fwd.statistics.iter().chain(bwd.statistics.iter()) {
            statistics.push((k.as_str(), *v));
        }
        Ok(TestResult::new("Cumulative Sums", p_values, params.alpha, statistics))
    };

    vec![
        item_from("Frequency", frequency_test(eps, params)),
        item_from("Block Frequency", block_frequency_test(eps, params)),
        item_from("Cumulative Sums", cusum()),
        item_from("Runs", runs_test(eps, params)),
        item_from("Longest Run of Ones", longest_run_test(eps, params)),
        item_from("Rank", rank_test(eps, params)),
        item_from("Discrete Fourier Transform", dft_test(eps, params)),
        item_from("Universal Statistical", universal_test(eps, params)),
        item_from("Approximate Entropy", approximate_entropy_test(eps, params)),
        item_from("Serial", serial_test(eps, params)),
    ]
}
