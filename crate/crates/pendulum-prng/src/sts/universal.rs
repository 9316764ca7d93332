//! Maurer's universal statistical test: mean log₂ distance between
//! repeated L-bit blocks, a compressibility proxy.

use super::special::erfc;
use super::{TestParams, TestResult};
use crate::bitstream::Bitstream;
use crate::error::{Error, Result};

/// (expectedValue, variance) for L = 1..=16, transcribed from the
/// standard's table. Guarded by a checksum test and an independent series
/// evaluation of the expected values.
const CONSTANTS: [(f64, f64); 16] = [
    (0.7326495, 0.690),
    (1.5374383, 1.338),
    (2.4016068, 1.901),
    (3.3112247, 2.358),
    (4.2534266, 2.705),
    (5.2177052, 2.954),
    (6.1962507, 3.125),
    (7.1836656, 3.238),
    (8.1764248, 3.311),
    (9.1723243, 3.356),
    (10.170032, 3.384),
    (11.168765, 3.401),
    (12.168070, 3.410),
    (13.167693, 3.416),
    (14.167488, 3.419),
    (15.167379, 3.421),
];

/// The (expectedValue, variance) pair for block length L ∈ [1, 16].
pub fn universal_constants(l: usize) -> Option<(f64, f64)> {
    CONSTANTS.get(l.checked_sub(1)?).copied()
}

/// Minimum n for each default block length, from the standard's table.
const LENGTH_THRESHOLDS: [(usize, usize); 11] = [
    (1_059_061_760, 16),
    (496_435_200, 15),
    (231_669_760, 14),
    (107_560_960, 13),
    (49_643_520, 12),
    (22_753_280, 11),
    (10_342_400, 10),
    (4_654_080, 9),
    (2_068_480, 8),
    (904_960, 7),
    (387_840, 6),
];

const MIN_DEFAULT_N: usize = 387_840;

fn default_l(n: usize) -> Option<usize> {
    LENGTH_THRESHOLDS.iter().find(|&&(min_n, _)| n >= min_n).map(|&(_, l)| l)
}

/// Maurer's universal test. L and Q default from n per the standard
/// (Q = 10·2^L); both can be pinned via `params.universal`, which together
/// with `allow_short` permits runs below the n ≥ 387 840 floor.
pub fn universal_test(eps: &Bitstream, params: &TestParams) -> Result<TestResult> {
    let n = eps.len();
    let (l, q) = match params.universal {
        Some((l, q)) => {
            if !(1..=16).contains(&l) {
                return Err(Error::InvalidParam(format!("universal L={l} outside [1, 16]")));
            }
            if q == 0 {
                return Err(Error::InvalidParam("universal Q must be >= 1".into()));
            }
            if !params.allow_short && n < MIN_DEFAULT_N {
                return Err(Error::InsufficientLength {
                    test: "Universal Statistical",
                    needed: MIN_DEFAULT_N,
                    got: n,
                });
            }
            (l, q)
        }
        None => {
            let Some(l) = default_l(n) else {
                return Err(Error::InsufficientLength {
                    test: "Universal Statistical",
                    needed: MIN_DEFAULT_N,
                    got: n,
                });
            };
            (l, 10 << l)
        }
    };

    let blocks = n / l;
    if blocks <= q {
        return Err(Error::InsufficientLength {
            test: "Universal Statistical",
            needed: (q + 1) * l,
            got: n,
        });
    }
    let k = blocks - q;
    let bits = eps.as_slice();

    // last_seen[pattern] = 1-based index of its most recent occurrence.
    let mut last_seen = vec![0usize; 1 << l];
    let block_value = |i: usize| -> usize {
        let base = i * l;
        bits[base..base + l].iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    };
    for i in 0..q {
        last_seen[block_value(i)] = i + 1;
    }
    let mut log_sum = 0.0;
    for i in q..blocks {
        let v = block_value(i);
        let distance = (i + 1) - last_seen[v];
        log_sum += (distance as f64).log2();
        last_seen[v] = i + 1;
    }
    let f_n = log_sum / k as f64;

    let (expected, variance) = universal_constants(l).expect("L validated above");
    let k_f = k as f64;
    let c = 0.7 - 0.8 / l as f64 + (4.0 + 32.0 / l as f64) * k_f.powf(-3.0 / l as f64) / 15.0;
    let sigma = c * (variance / k_f).sqrt();
    let p = erfc((f_n - expected).abs() / (std::f64::consts::SQRT_2 * sigma));

    Ok(TestResult::new(
        "Universal Statistical",
        vec![p],
        params.alpha,
        vec![
            ("f_n", f_n),
            ("expected", expected),
            ("sigma", sigma),
            ("l", l as f64),
            ("q", q as f64),
            ("k", k_f),
        ],
    ))
}
