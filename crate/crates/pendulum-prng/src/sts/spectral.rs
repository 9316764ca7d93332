//! Discrete Fourier transform (spectral) test.
//!
//! The production path uses a fast transform; a direct-summation O(n²)
//! oracle lives in the test module and the two must agree, so the FFT is an
//! internal optimization rather than an interface commitment.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::special::erfc;
use super::{TestParams, TestResult};
use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

/// Magnitudes of the first n/2 DFT coefficients of `x`.
pub(crate) fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut buffer: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    buffer.iter().take(n / 2).map(|c| c.norm()).collect()
}

/// Spectral test: count of sub-threshold peaks among the first n/2 DFT
/// magnitudes of the ±1 sequence, normal-approximated.
pub fn dft_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    let n = eps.len();
    let needed = if params.allow_short { 2 } else { 1000 };
    if n < needed {
        return Err(Error::InsufficientLength {
            test: "Discrete Fourier Transform",
            needed,
            got: n,
        });
    }
    let x: Vec<f64> = eps.as_slice().iter().map(|&b| 2.0 * b as f64 - 1.0).collect();
    let magnitudes = dft_magnitudes(&x);

    let n_f = n as f64;
    let threshold = (n_f * (1.0 / 0.05f64).ln()).sqrt();
    let n0 = 0.95 * n_f / 2.0;
    let n1 = magnitudes.iter().filter(|&&m| m < threshold).count() as f64;
    let d = (n1 - n0) / (n_f * 0.95 * 0.05 / 4.0).sqrt();
    let p = erfc(d.abs() / std::f64::consts::SQRT_2);

    Ok(TestResult::new(
        "Discrete Fourier Transform",
        vec![p],
        params.alpha,
        vec![("threshold", threshold), ("n1", n1), ("d", d)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::Lcg48;
    use crate::generator::WordSource;

    /// Direct-summation O(n²) DFT magnitudes — the conformance oracle.
    fn dft_magnitudes_oracle(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n / 2)
            .map(|k| {
                let mut re = 0.0;
                let mut im = 0.0;
                for (j, &v) in x.iter().enumerate() {
                    let angle = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                    re += v * angle.cos();
                    im += v * angle.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    }

    #[test]
    fn constant_sequence_concentrates_at_dc() {
        let magnitudes = dft_magnitudes(&vec![1.0; 64]);
        assert!((magnitudes[0] - 64.0).abs() < 1e-9);
        for &m in &magnitudes[1..] {
            assert!(m < 1e-9);
        }
    }

    #[test]
    fn fast_transform_matches_direct_summation() {
        let mut lcg = Lcg48::new(7);
        let eps = lcg.fill_bitstream(1000).unwrap();
        let x: Vec<f64> = eps.as_slice().iter().map(|&b| 2.0 * b as f64 - 1.0).collect();
        let fast = dft_magnitudes(&x);
        let direct = dft_magnitudes_oracle(&x);
        assert_eq!(fast.len(), direct.len());
        for (a, b) in fast.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn fixture_p_value_matches_oracle() {
        let mut lcg = Lcg48::new(7);
        let eps = lcg.fill_bitstream(1000).unwrap();
        let r = dft_test(&eps, &TestParams::default()).unwrap();

        // Full oracle recomputation from the direct-summation magnitudes.
        let x: Vec<f64> = eps.as_slice().iter().map(|&b| 2.0 * b as f64 - 1.0).collect();
        let magnitudes = dft_magnitudes_oracle(&x);
        let n_f = 1000.0;
        let threshold = (n_f * (1.0 / 0.05f64).ln()).sqrt();
        let n1 = magnitudes.iter().filter(|&&m| m < threshold).count() as f64;
        let d = (n1 - 0.95 * n_f / 2.0) / (n_f * 0.95 * 0.05 / 4.0).sqrt();
        let expected = erfc(d.abs() / std::f64::consts::SQRT_2);

        assert!((r.p_values[0] - expected).abs() < 1e-6);
        // Independently computed reference for this fixture.
        assert!((r.p_values[0] - 0.561_657_715_0).abs() < 1e-6, "{}", r.p_values[0]);
    }

    #[test]
    fn alternation_is_a_single_spike() {
        let eps = Bitstream::from_bits((0..1000).map(|i| (i % 2) as u8)).unwrap();
        let r = dft_test(&eps, &TestParams::default()).unwrap();
        // All energy sits at the top frequency, outside the retained half,
        // so every retained magnitude is below threshold.
        let n1 = r.statistics.iter().find(|(k, _)| *k == "n1").unwrap().1;
        assert_eq!(n1, 500.0);
        assert!(r.p_values[0] < 1e-10);
    }

    #[test]
    fn length_precondition() {
        let eps = Bitstream::from_bits((0..999).map(|i| (i % 2) as u8)).unwrap();
        assert!(dft_test(&eps, &TestParams::default()).is_err());
        let relaxed = TestParams { allow_short: true, ..TestParams::default() };
        assert!(dft_test(&eps, &relaxed).is_ok());
    }
}
