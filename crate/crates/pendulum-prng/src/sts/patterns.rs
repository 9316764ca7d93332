//! Serial and approximate-entropy tests. Both count overlapping m-bit
//! patterns with wrap-around extension of the sequence.

use super::special::igamc;
use super::{TestParams, TestResult};
use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

/// Counts of every m-bit pattern over all n wrapped windows.
fn pattern_counts(bits: &[u8], m: usize) -> Vec<u64> {
    let n = bits.len();
    debug_assert!(m >= 1 && m <= 24 && n >= 1);
    let mask = (1usize << m) - 1;
    let mut counts = vec![0u64; 1 << m];
    // Seed the rolling window with the first m-1 bits.
    let mut window = 0usize;
    for &b in bits.iter().take(m - 1) {
        window = (window << 1) | b as usize;
    }
    for i in 0..n {
        let incoming = bits[(i + m - 1) % n];
        window = ((window << 1) | incoming as usize) & mask;
        counts[window] += 1;
    }
    counts
}

/// ψ²_m = (2^m/n)·Σν² − n over wrapped pattern counts; ψ²_0 = 0.
fn psi_squared(bits: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    let counts = pattern_counts(bits, m);
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    (2f64.powi(m as i32) / n) * sum_sq - n
}

/// Serial test with pattern length m: two p-values from ∇ψ² and ∇²ψ².
pub fn serial_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    let m = params.serial_m;
    let n = eps.len();
    if m < 3 {
        return Err(Error::InvalidParam(format!("serial pattern length m={m} must be > 2")));
    }
    if n < m {
        return Err(Error::InsufficientLength { test: "Serial", needed: m, got: n });
    }
    let log2n = (n as f64).log2().floor() as usize;
    if !params.allow_short && m + 2 >= log2n {
        return Err(Error::InvalidParam(format!(
            "serial pattern length m={m} violates m < floor(log2 n) - 2 = {}",
            log2n.saturating_sub(2)
        )));
    }
    let bits = eps.as_slice();
    let psi_m = psi_squared(bits, m);
    let psi_m1 = psi_squared(bits, m - 1);
    let psi_m2 = psi_squared(bits, m - 2);
    let del1 = psi_m - psi_m1;
    let del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    let p1 = igamc(2f64.powi(m as i32 - 2), (del1 / 2.0).max(0.0))?;
    let p2 = igamc(2f64.powi(m as i32 - 3), (del2 / 2.0).max(0.0))?;
    Ok(TestResult::new(
        "Serial",
        vec![p1, p2],
        params.alpha,
        vec![("psi2_m", psi_m), ("delta_psi2", del1), ("delta2_psi2", del2)],
    ))
}

/// Approximate-entropy test with pattern length m:
/// χ² = 2n(ln 2 − ApEn), ApEn = φ_m − φ_{m+1}.
pub fn approximate_entropy_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    let m = params.apen_m;
    let n = eps.len();
    if m == 0 {
        return Err(Error::InvalidParam("apen pattern length m must be >= 1".into()));
    }
    if n < m + 1 {
        return Err(Error::InsufficientLength { test: "Approximate Entropy", needed: m + 1, got: n });
    }
    let log2n = (n as f64).log2().floor() as usize;
    if !params.allow_short && m + 5 >= log2n {
        return Err(Error::InvalidParam(format!(
            "apen pattern length m={m} violates m < floor(log2 n) - 5 = {}",
            log2n.saturating_sub(5)
        )));
    }
    let bits = eps.as_slice();
    let phi = |mm: usize| -> f64 {
        let counts = pattern_counts(bits, mm);
        let n_f = n as f64;
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let frac = c as f64 / n_f;
                frac * frac.ln()
            })
            .sum()
    };
    let apen = phi(m) - phi(m + 1);
    let chi2 = (2.0 * n as f64 * (std::f64::consts::LN_2 - apen)).max(0.0);
    let p = igamc(2f64.powi(m as i32 - 1), chi2 / 2.0)?;
    Ok(TestResult::new(
        "Approximate Entropy",
        vec![p],
        params.alpha,
        vec![("apen", apen), ("chi_squared", chi2)],
    ))
}
