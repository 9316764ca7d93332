//! The pendulum generator: expands a 64-bit seed into initial conditions,
//! simulates the double pendulum, and extracts bits from the angles.
//!
//! Two emission modes exist. Loop-per-word re-simulates a randomly drawn
//! number of steps (default 1000–10000) before every 32-bit word — the
//! costly construction the comparison experiment measures. Streaming
//! advances a fixed stir interval (default 64 steps) per word, roughly two
//! orders of magnitude cheaper per bit. Both condition the pendulum with
//! `loop_range.0` steps at construction, so a loop range pinned to [k, k]
//! and a stir interval of k produce the same first word for the same seed.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::bitstream::Bitstream;
use crate::dynamics::{self, PendulumParams, PendulumState};
use crate::error::{Error, Result};

/// splitmix64: one additive step plus the mixing finalizer. The workhorse
/// behind seed expansion and loop-count draws.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps a 64-bit draw to the unit interval [0, 1) with 53-bit resolution.
fn unit_f64(draw: u64) -> f64 {
    (draw >> 11) as f64 * 2f64.powi(-53)
}

/// Word-emission discipline of the pendulum generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Draw a fresh step count from `loop_range` before every word.
    LoopPerWord,
    /// Advance a fixed `stir_steps` between words.
    Streaming,
}

/// Configuration of the pendulum generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Closed interval both masses are drawn from (kg).
    pub mass_range: (f64, f64),
    /// Closed interval for per-word step counts in loop-per-word mode; the
    /// lower bound is also the conditioning length applied at construction.
    pub loop_range: (u32, u32),
    /// Integration timestep (seconds).
    pub h: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Link lengths (m).
    pub l1: f64,
    pub l2: f64,
    /// Per-step velocity damping coefficient in (0, 1].
    pub d: f64,
    pub mode: Mode,
    /// Steps between extractions in streaming mode.
    pub stir_steps: u32,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            mass_range: (1.0, 300.0),
            loop_range: (1000, 10_000),
            h: 1e-3,
            g: 9.81,
            l1: 1.0,
            l2: 1.0,
            d: 1.0,
            mode: Mode::Streaming,
            stir_steps: 64,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let (mass_lo, mass_hi) = self.mass_range;
        if !(mass_lo > 0.0 && mass_hi >= mass_lo && mass_hi.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "mass_range must satisfy 0 < lo <= hi, got [{mass_lo}, {mass_hi}]"
            )));
        }
        let (loop_lo, loop_hi) = self.loop_range;
        if loop_lo < 1 || loop_hi < loop_lo || loop_hi > 1_000_000 {
            return Err(Error::InvalidParam(format!(
                "loop_range must satisfy 1 <= lo <= hi <= 1000000, got [{loop_lo}, {loop_hi}]"
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParam(format!("h must be > 0, got {}", self.h)));
        }
        if self.stir_steps < 1 {
            return Err(Error::InvalidParam("stir_steps must be >= 1".into()));
        }
        // Remaining physical fields share the pendulum's own domain.
        PendulumParams {
            m1: mass_lo,
            m2: mass_lo,
            l1: self.l1,
            l2: self.l2,
            g: self.g,
            d: self.d,
        }
        .validate()
    }
}

/// Deterministic seed expansion. Applies splitmix64 to the seed and draws,
/// in this fixed order: m1 and m2 uniform over `mass_range`, then θ1 and θ2
/// uniform over [0, 2π). Both angular velocities start at zero, so the
/// initial energy is purely potential and trajectories stay bounded for
/// d ≤ 1. Returns the remaining mixer state for later loop-count draws.
pub fn seed_expand(seed: u64, config: &GeneratorConfig) -> (PendulumParams, PendulumState, u64) {
    let mut mixer = seed;
    let (lo, hi) = config.mass_range;
    let m1 = lo + unit_f64(splitmix64(&mut mixer)) * (hi - lo);
    let m2 = lo + unit_f64(splitmix64(&mut mixer)) * (hi - lo);
    let theta1 = unit_f64(splitmix64(&mut mixer)) * TAU;
    let theta2 = unit_f64(splitmix64(&mut mixer)) * TAU;
    let params = PendulumParams {
        m1,
        m2,
        l1: config.l1,
        l2: config.l2,
        g: config.g,
        d: config.d,
    };
    (params, PendulumState::at_rest(theta1, theta2), mixer)
}

/// Extracts a 32-bit word from the two angles: each angle is reduced to
/// f = (θ mod 2π)/2π ∈ [0, 1), bits 33..48 of f's binary-fraction
/// expansion form a 16-bit field, and the two fields are concatenated
/// (θ1 high, θ2 low). The top 32 fraction bits are discarded because the
/// coarse angle is predictable over short horizons; the deep bits churn
/// chaotically.
pub fn extract_bits(state: &PendulumState) -> u32 {
    let field = |theta: f64| -> u32 {
        let fraction = theta.rem_euclid(TAU) / TAU;
        ((fraction * 2f64.powi(48)) as u64 & 0xFFFF) as u32
    };
    (field(state.theta1) << 16) | field(state.theta2)
}

/// The stateful pendulum generator. Single-caller; create one per worker.
#[derive(Debug, Clone)]
pub struct PendulumRng {
    config: GeneratorConfig,
    params: PendulumParams,
    state: PendulumState,
    mixer: u64,
}

impl PendulumRng {
    /// Expands the seed and applies the conditioning run of `loop_range.0`
    /// steps (both modes), leaving the generator ready to emit.
    pub fn new(seed: u64, config: GeneratorConfig) -> Result<Self> {
        config.validate()?;
        let (params, state, mixer) = seed_expand(seed, &config);
        let mut rng = Self { config, params, state, mixer };
        rng.advance(rng.config.loop_range.0)?;
        Ok(rng)
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn params(&self) -> &PendulumParams {
        &self.params
    }

    pub fn state(&self) -> &PendulumState {
        &self.state
    }

    fn advance(&mut self, steps: u32) -> Result<()> {
        let h = self.config.h;
        let mut s = self.state;
        for _ in 0..steps {
            s = dynamics::damp(&self.params, &dynamics::rk4_step(&self.params, &s, h));
        }
        // NaN/Inf is sticky through the arithmetic above, so one check per
        // advance is equivalent to one per step.
        if !s.is_finite() {
            return Err(Error::NonFiniteState);
        }
        self.state = s;
        Ok(())
    }

    /// Emits the next 32-bit word, advancing the pendulum per the mode.
    pub fn next_block(&mut self) -> Result<u32> {
        let steps = match self.config.mode {
            Mode::LoopPerWord => {
                let (lo, hi) = self.config.loop_range;
                let span = (hi - lo + 1) as u64;
                lo + (splitmix64(&mut self.mixer) % span) as u32
            }
            Mode::Streaming => self.config.stir_steps,
        };
        self.advance(steps)?;
        Ok(extract_bits(&self.state))
    }
}

impl WordSource for PendulumRng {
    fn next_word(&mut self) -> Result<u32> {
        self.next_block()
    }
}

/// Anything that emits 32-bit words; the pendulum generator and both
/// baselines implement it.
pub trait WordSource {
    fn next_word(&mut self) -> Result<u32>;

    /// Concatenates words MSB-first and truncates to exactly `n_bits`.
    fn fill_bitstream(&mut self, n_bits: usize) -> Result<Bitstream> {
        if n_bits == 0 {
            return Err(Error::InvalidParam("bit count must be >= 1".into()));
        }
        let mut bs = Bitstream::with_capacity(n_bits.div_ceil(32) * 32);
        while bs.len() < n_bits {
            bs.push_word_msb(self.next_word()?);
        }
        bs.truncate(n_bits);
        Ok(bs)
    }
}
