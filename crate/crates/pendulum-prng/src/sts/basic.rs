//! Frequency, block-frequency, cumulative-sums, runs, and longest-run
//! tests.

use serde::{Deserialize, Serialize};

use super::special::{erfc, igamc};
use super::{TestParams, TestResult};
use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

fn require_length(
    test: &'static str,
    eps: &Bitstream,
    recommended: usize,
    floor: usize,
    params: &TestParams,
) -> Result<()> {
    let needed = if params.allow_short { floor } else { recommended };
    if eps.len() < needed {
        return Err(Error::InsufficientLength { test, needed, got: eps.len() });
    }
    Ok(())
}

/// Monobit frequency test: S_obs = |Σ(2ε−1)|/√n, p = erfc(S_obs/√2).
pub fn frequency_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    require_length("Frequency", eps, 100, 1, params)?;
    let n = eps.len() as f64;
    let sum = 2.0 * eps.ones() as f64 - n;
    let s_obs = sum.abs() / n.sqrt();
    let p = erfc(s_obs / std::f64::consts::SQRT_2);
    Ok(TestResult::new(
        "Frequency",
        vec![p],
        params.alpha,
        vec![("partial_sum", sum), ("s_obs", s_obs)],
    ))
}

/// Block-frequency test with block length M = `params.block_m`.
pub fn block_frequency_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    let m = params.block_m;
    require_length("Block Frequency", eps, 100, m, params)?;
    let n = eps.len();
    if !params.allow_short && (m < 20 || m > n / 100) {
        return Err(Error::InvalidParam(format!(
            "block length M={m} outside 20 <= M <= n/100 = {}",
            n / 100
        )));
    }
    let blocks = n / m;
    if blocks == 0 {
        return Err(Error::InsufficientLength { test: "Block Frequency", needed: m, got: n });
    }
    let bits = eps.as_slice();
    let mut chi2 = 0.0;
    for b in 0..blocks {
        let ones: usize = bits[b * m..(b + 1) * m].iter().map(|&x| x as usize).sum();
        let pi = ones as f64 / m as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * m as f64;
    let p = igamc(blocks as f64 / 2.0, chi2 / 2.0)?;
    Ok(TestResult::new(
        "Block Frequency",
        vec![p],
        params.alpha,
        vec![("chi_squared", chi2), ("blocks", blocks as f64)],
    ))
}

/// Direction for the cumulative-sums test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CusumMode {
    Forward,
    Backward,
}

/// Cumulative-sums test: z is the largest partial-sum magnitude of the ±1
/// sequence (taken in reverse for the backward mode); the p-value comes
/// from the standard's two-sided normal-CDF series.
pub fn cumulative_sums_test(
    eps: &Bitstream,
    mode: CusumMode,
    params: &TestParams,
) -> Result<TestResult> {
    require_length("Cumulative Sums", eps, 100, 1, params)?;
    let n = eps.len();
    let bits = eps.as_slice();
    let mut sum = 0i64;
    let mut z = 0i64;
    let indices: Box<dyn Iterator<Item = usize>> = match mode {
        CusumMode::Forward => Box::new(0..n),
        CusumMode::Backward => Box::new((0..n).rev()),
    };
    for i in indices {
        sum += 2 * bits[i] as i64 - 1;
        z = z.max(sum.abs());
    }
    let p = cusum_p_value(n, z);
    let stat_name = match mode {
        CusumMode::Forward => "z_forward",
        CusumMode::Backward => "z_backward",
    };
    Ok(TestResult::new("Cumulative Sums", vec![p], params.alpha, vec![(stat_name, z as f64)]))
}

fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

fn cusum_p_value(n: usize, z: i64) -> f64 {
    let n_f = n as f64;
    let z_f = z as f64;
    let sq = n_f.sqrt();
    // Terms with |4k·z| beyond ~40·√n contribute nothing at f64 precision.
    let k_cap = (10.0 * sq / z_f).ceil() as i64 + 1;
    let k_hi = ((n_f / z_f - 1.0) / 4.0).floor() as i64;
    let k_lo1 = ((-n_f / z_f + 1.0) / 4.0).floor() as i64;
    let k_lo2 = ((-n_f / z_f - 3.0) / 4.0).floor() as i64;

    let mut term1 = 0.0;
    for k in k_lo1.max(-k_cap)..=k_hi.min(k_cap) {
        let k_f = k as f64;
        term1 += normal_cdf((4.0 * k_f + 1.0) * z_f / sq) - normal_cdf((4.0 * k_f - 1.0) * z_f / sq);
    }
    let mut term2 = 0.0;
    for k in k_lo2.max(-k_cap)..=k_hi.min(k_cap) {
        let k_f = k as f64;
        term2 += normal_cdf((4.0 * k_f + 3.0) * z_f / sq) - normal_cdf((4.0 * k_f + 1.0) * z_f / sq);
    }
    1.0 - term1 + term2
}

/// Runs test: V_n = number of value changes + 1. Applies the standard's
/// prerequisite |π − ½| < 2/√n; when it fails the p-value is 0 by
/// convention.
pub fn runs_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    require_length("Runs", eps, 100, 2, params)?;
    let n = eps.len();
    let bits = eps.as_slice();
    let pi = eps.ones() as f64 / n as f64;
    if (pi - 0.5).abs() >= 2.0 / (n as f64).sqrt() {
        return Ok(TestResult::new(
            "Runs",
            vec![0.0],
            params.alpha,
            vec![("proportion", pi), ("v_n", 0.0)],
        ));
    }
    let mut v_n = 1u64;
    for i in 1..n {
        if bits[i] != bits[i - 1] {
            v_n += 1;
        }
    }
    let n_f = n as f64;
    let p = erfc(
        (v_n as f64 - 2.0 * n_f * pi * (1.0 - pi)).abs()
            / (2.0 * (2.0 * n_f).sqrt() * pi * (1.0 - pi)),
    );
    Ok(TestResult::new(
        "Runs",
        vec![p],
        params.alpha,
        vec![("proportion", pi), ("v_n", v_n as f64)],
    ))
}

struct LongestRunRegime {
    m: usize,
    k: usize,
    lowest: u32,
    probabilities: &'static [f64],
}

fn longest_run_regime(n: usize) -> LongestRunRegime {
    if n < 6272 {
        LongestRunRegime {
            m: 8,
            k: 3,
            lowest: 1,
            probabilities: &[0.21484375, 0.3671875, 0.23046875, 0.1875],
        }
    } else if n < 750_000 {
        LongestRunRegime {
            m: 128,
            k: 5,
            lowest: 4,
            probabilities: &[
                0.1174035788,
                0.242955959,
                0.249363483,
                0.17517706,
                0.102701071,
                0.112398847,
            ],
        }
    } else {
        LongestRunRegime {
            m: 10_000,
            k: 6,
            lowest: 10,
            probabilities: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        }
    }
}

/// Longest-run-of-ones test with the standard's three block-size regimes
/// (M = 8 below 6272 bits, M = 128 below 750 000, M = 10⁴ above).
pub fn longest_run_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    require_length("Longest Run of Ones", eps, 128, 8, params)?;
    let n = eps.len();
    let regime = longest_run_regime(n);
    let blocks = n / regime.m;
    if blocks == 0 {
        return Err(Error::InsufficientLength {
            test: "Longest Run of Ones",
            needed: regime.m,
            got: n,
        });
    }
    let bits = eps.as_slice();
    let mut counts = vec![0u64; regime.k + 1];
    for b in 0..blocks {
        let mut longest = 0u32;
        let mut current = 0u32;
        for &bit in &bits[b * regime.m..(b + 1) * regime.m] {
            if bit == 1 {
                current += 1;
                longest = longest.max(current);
            } else {
                current = 0;
            }
        }
        let category = longest.clamp(regime.lowest, regime.lowest + regime.k as u32) - regime.lowest;
        counts[category as usize] += 1;
    }
    let n_blocks = blocks as f64;
    let mut chi2 = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        let expected = n_blocks * regime.probabilities[i];
        chi2 += (c as f64 - expected) * (c as f64 - expected) / expected;
    }
    let p = igamc(regime.k as f64 / 2.0, chi2 / 2.0)?;
    let mut statistics = vec![("chi_squared", chi2), ("block_size", regime.m as f64)];
    statistics.extend(counts.iter().enumerate().map(|(i, &c)| {
        const NAMES: [&str; 7] = ["nu_0", "nu_1", "nu_2", "nu_3", "nu_4", "nu_5", "nu_6"];
        (NAMES[i], c as f64)
    }));
    Ok(TestResult::new("Longest Run of Ones", vec![p], params.alpha, statistics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relaxed() -> TestParams {
        TestParams { allow_short: true, ..TestParams::default() }
    }

    fn bs(s: &str) -> Bitstream {
        Bitstream::from_ascii_str(s).unwrap()
    }

    #[test]
    fn frequency_worked_example() {
        let r = frequency_test(&bs("1011010101"), &relaxed()).unwrap();
        assert!((r.p_values[0] - 0.527089).abs() < 1e-4, "{}", r.p_values[0]);
    }

    #[test]
    fn frequency_extremes() {
        let ones = Bitstream::from_bits(std::iter::repeat(1u8).take(100)).unwrap();
        let r = frequency_test(&ones, &TestParams::default()).unwrap();
        assert!(r.p_values[0] < 1e-20);
        assert!(!r.pass);

        let alternating = Bitstream::from_bits((0..100).map(|i| (i % 2) as u8)).unwrap();
        let r = frequency_test(&alternating, &TestParams::default()).unwrap();
        assert_eq!(r.p_values[0], 1.0);
    }

    #[test]
    fn frequency_enforces_minimum_length() {
        let short = bs("1011010101");
        assert!(matches!(
            frequency_test(&short, &TestParams::default()),
            Err(Error::InsufficientLength { needed: 100, got: 10, .. })
        ));
    }

    #[test]
    fn block_frequency_worked_example() {
        let params = TestParams { block_m: 3, allow_short: true, ..TestParams::default() };
        let r = block_frequency_test(&bs("0110011010"), &params).unwrap();
        assert!((r.p_values[0] - 0.801252).abs() < 1e-4, "{}", r.p_values[0]);
        let chi2 = r.statistics.iter().find(|(k, _)| *k == "chi_squared").unwrap().1;
        assert!((chi2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_frequency_balanced_blocks_give_p_one() {
        // 01 repeated: every 20-bit block has exactly ten ones.
        let eps = Bitstream::from_bits((0..2000).map(|i| (i % 2) as u8)).unwrap();
        let r = block_frequency_test(&eps, &TestParams::default()).unwrap();
        assert_eq!(r.p_values[0], 1.0);
    }

    #[test]
    fn block_frequency_all_ones_fails() {
        let eps = Bitstream::from_bits(std::iter::repeat(1u8).take(2000)).unwrap();
        let r = block_frequency_test(&eps, &TestParams::default()).unwrap();
        assert!(r.p_values[0] < 1e-20);
    }

    #[test]
    fn block_frequency_rejects_bad_m() {
        let eps = Bitstream::from_bits((0..1000).map(|i| (i % 2) as u8)).unwrap();
        let params = TestParams { block_m: 19, ..TestParams::default() };
        assert!(block_frequency_test(&eps, &params).is_err());
        let params = TestParams { block_m: 11, ..TestParams::default() };
        assert!(block_frequency_test(&eps, &params).is_err());
    }

    #[test]
    fn cusum_worked_example() {
        let r = cumulative_sums_test(&bs("1011010111"), CusumMode::Forward, &relaxed()).unwrap();
        assert!((r.p_values[0] - 0.411585).abs() < 1e-4, "{}", r.p_values[0]);
        assert_eq!(r.statistics[0].1, 4.0);
    }

    #[test]
    fn cusum_extremes() {
        let ones = Bitstream::from_bits(std::iter::repeat(1u8).take(100)).unwrap();
        let r = cumulative_sums_test(&ones, CusumMode::Forward, &TestParams::default()).unwrap();
        assert_eq!(r.statistics[0].1, 100.0);
        assert!(r.p_values[0] < 1e-20);

        let alternating = Bitstream::from_bits((0..10_000).map(|i| (i % 2) as u8)).unwrap();
        let r =
            cumulative_sums_test(&alternating, CusumMode::Forward, &TestParams::default()).unwrap();
        assert_eq!(r.statistics[0].1, 1.0);
        assert!(r.p_values[0] > 0.99);
    }

    #[test]
    fn cusum_backward_reverses() {
        // 0111: forward peak |S| = 2, backward peak |S| = 3.
        let eps = bs("0111");
        let f = cumulative_sums_test(&eps, CusumMode::Forward, &relaxed()).unwrap();
        let b = cumulative_sums_test(&eps, CusumMode::Backward, &relaxed()).unwrap();
        assert_eq!(f.statistics[0].1, 2.0);
        assert_eq!(b.statistics[0].1, 3.0);
    }

    #[test]
    fn runs_worked_example() {
        let r = runs_test(&bs("1001101011"), &relaxed()).unwrap();
        assert!((r.p_values[0] - 0.147232).abs() < 1e-4, "{}", r.p_values[0]);
    }

    #[test]
    fn runs_prerequisite_failure_gives_zero() {
        let ones = Bitstream::from_bits(std::iter::repeat(1u8).take(100)).unwrap();
        let r = runs_test(&ones, &TestParams::default()).unwrap();
        assert_eq!(r.p_values[0], 0.0);
        assert!(!r.pass);
    }

    #[test]
    fn runs_alternation_has_too_many_runs() {
        let alternating = Bitstream::from_bits((0..100).map(|i| (i % 2) as u8)).unwrap();
        let r = runs_test(&alternating, &TestParams::default()).unwrap();
        assert!(r.p_values[0] < 1e-10);
    }

    #[test]
    fn longest_run_worked_fixture() {
        // 128-bit fixture; categories tallied independently in this test.
        let fixture = concat!(
            "11001100000101010110110001001100111000000000001001",
            "00110101010001000100111101011010000000110101111100",
            "1100111001101101100010110010"
        );
        let eps = bs(fixture);
        assert_eq!(eps.len(), 128);

        // Independent tally: longest ones-run per 8-bit block.
        let bits = eps.as_slice();
        let mut tally = [0u64; 4];
        for block in bits.chunks(8) {
            let mut longest = 0u32;
            let mut run = 0u32;
            for &b in block {
                run = if b == 1 { run + 1 } else { 0 };
                longest = longest.max(run);
            }
            let idx = (longest.clamp(1, 4) - 1) as usize;
            tally[idx] += 1;
        }
        assert_eq!(tally, [4, 9, 3, 0]);

        let pi = [0.21484375, 0.3671875, 0.23046875, 0.1875];
        let chi2: f64 = tally
            .iter()
            .zip(pi.iter())
            .map(|(&v, &p)| (v as f64 - 16.0 * p).powi(2) / (16.0 * p))
            .sum();
        let expected_p = igamc(1.5, chi2 / 2.0).unwrap();

        let r = longest_run_test(&eps, &TestParams::default()).unwrap();
        assert!((r.p_values[0] - expected_p).abs() < 1e-12);
        assert!((r.p_values[0] - 0.180609).abs() < 1e-4, "{}", r.p_values[0]);
    }

    #[test]
    fn longest_run_extremes() {
        let zeros = Bitstream::from_bits(std::iter::repeat(0u8).take(128)).unwrap();
        let r = longest_run_test(&zeros, &TestParams::default()).unwrap();
        assert!(r.p_values[0] < 1e-9, "{}", r.p_values[0]);

        let ones = Bitstream::from_bits(std::iter::repeat(1u8).take(128)).unwrap();
        let r = longest_run_test(&ones, &TestParams::default()).unwrap();
        assert!(r.p_values[0] < 1e-9, "{}", r.p_values[0]);
    }

    #[test]
    fn longest_run_uses_larger_regimes() {
        let eps = Bitstream::from_bits((0..10_000).map(|i| (i % 2) as u8)).unwrap();
        let r = longest_run_test(&eps, &TestParams::default()).unwrap();
        let m = r.statistics.iter().find(|(k, _)| *k == "block_size").unwrap().1;
        assert_eq!(m, 128.0);

        let eps = Bitstream::from_bits((0..800_000).map(|i| (i % 2) as u8)).unwrap();
        let r = longest_run_test(&eps, &TestParams::default()).unwrap();
        let m = r.statistics.iter().find(|(k, _)| *k == "block_size").unwrap().1;
        assert_eq!(m, 10_000.0);
    }
}
