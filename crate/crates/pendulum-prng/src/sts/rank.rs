//! Binary matrix rank test: GF(2) rank of 32×32 matrices carved out of the
//! stream, compared against the theoretical rank distribution.

use super::special::igamc;
use super::{TestParams, TestResult};
use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

/// Rank over GF(2) of a matrix given as row bitmasks (bit `width-1` is the
/// leftmost column). Plain Gaussian elimination with XOR row updates.
pub fn gf2_rank(rows: &[u64], width: usize) -> usize {
    assert!(width <= 64);
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for col in (0..width).rev() {
        let Some(pivot) = (rank..rows.len()).find(|&i| (rows[i] >> col) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && (*row >> col) & 1 == 1 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Probability that a random m×q binary matrix has rank r, from the exact
/// product formula.
pub fn rank_probability(m: usize, q: usize, r: usize) -> f64 {
    if r > m.min(q) {
        return 0.0;
    }
    let exponent = (r * (q + m - r)) as i32 - (m * q) as i32;
    let mut prob = 2f64.powi(exponent);
    for i in 0..r {
        let num = (1.0 - 2f64.powi(i as i32 - q as i32)) * (1.0 - 2f64.powi(i as i32 - m as i32));
        let den = 1.0 - 2f64.powi(i as i32 - r as i32);
        prob *= num / den;
    }
    prob
}

const MATRIX_BITS: usize = 32 * 32;

/// Rank test on 32×32 matrices (row-major fill), three rank classes
/// {32, 31, ≤30}, χ² with 2 degrees of freedom.
pub fn rank_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    let n = eps.len();
    let needed = if params.allow_short { MATRIX_BITS } else { 38 * MATRIX_BITS };
    if n < needed {
        return Err(Error::InsufficientLength { test: "Rank", needed, got: n });
    }
    let matrices = n / MATRIX_BITS;
    let bits = eps.as_slice();

    let mut full = 0u64;
    let mut minus_one = 0u64;
    let mut rows = [0u64; 32];
    for k in 0..matrices {
        let base = k * MATRIX_BITS;
        for (i, row) in rows.iter_mut().enumerate() {
            let mut value = 0u64;
            for j in 0..32 {
                value = (value << 1) | bits[base + i * 32 + j] as u64;
            }
            *row = value;
        }
        match gf2_rank(&rows, 32) {
            32 => full += 1,
            31 => minus_one += 1,
            _ => {}
        }
    }
    let lower = matrices as u64 - full - minus_one;

    let p_full = rank_probability(32, 32, 32);
    let p_minus_one = rank_probability(32, 32, 31);
    let p_lower = 1.0 - p_full - p_minus_one;

    let n_m = matrices as f64;
    let chi2 = (full as f64 - n_m * p_full).powi(2) / (n_m * p_full)
        + (minus_one as f64 - n_m * p_minus_one).powi(2) / (n_m * p_minus_one)
        + (lower as f64 - n_m * p_lower).powi(2) / (n_m * p_lower);
    let p = igamc(1.0, chi2 / 2.0)?;

    Ok(TestResult::new(
        "Rank",
        vec![p],
        params.alpha,
        vec![
            ("chi_squared", chi2),
            ("matrices", n_m),
            ("full_rank", full as f64),
            ("rank_31", minus_one as f64),
            ("rank_le_30", lower as f64),
        ],
    ))
}
