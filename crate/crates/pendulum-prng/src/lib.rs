//! A pseudo-random number generator driven by a simulated double pendulum,
//! together with the ten-test statistical battery (NIST SP 800-22
//! semantics) used to judge it, two reference generators (a 48-bit LCG and
//! a SHA-1 counter-mode source), and an experiment harness that produces
//! pass-count comparison tables, throughput/memory measurements, and
//! parameter sweeps.
//!
//! Start with the `examples/` directory: each major capability has a
//! runnable example (`generate`, `battery`, `compare`, `sweep`, `bench`,
//! `chaos`). The `pendulum-prng` binary exposes the same capabilities as
//! subcommands.

pub mod baselines;
pub mod bitstream;
pub mod dynamics;
mod error;
pub mod generator;
pub mod harness;
pub mod sts;

pub use bitstream::Bitstream;
pub use error::{Error, Result};
pub use generator::{extract_bits, seed_expand, GeneratorConfig, Mode, PendulumRng, WordSource};
