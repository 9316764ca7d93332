//! Reference generators for the comparison experiments: the 48-bit linear
//! congruential generator behind `java.util.Random`, and a SHA-1
//! counter-mode generator standing in for a hash-backed secure source.

mod sha1;

use crate::error::Result;
use crate::generator::WordSource;

const LCG_MULTIPLIER: u64 = 0x5DEE_CE66D;
const LCG_INCREMENT: u64 = 0xB;
const LCG_MASK: u64 = (1 << 48) - 1;

/// 48-bit LCG: state' = (0x5DEECE66D·state + 0xB) mod 2⁴⁸, output = top 32
/// bits of the new state. Seeding scrambles the seed with the multiplier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lcg48 {
    state: u64,
}

impl Lcg48 {
    pub fn new(seed: u64) -> Self {
        Self { state: (seed ^ LCG_MULTIPLIER) & LCG_MASK }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = LCG_MULTIPLIER.wrapping_mul(self.state).wrapping_add(LCG_INCREMENT) & LCG_MASK;
        (self.state >> 16) as u32
    }
}

impl WordSource for Lcg48 {
    fn next_word(&mut self) -> Result<u32> {
        Ok(self.next_u32())
    }
}

/// The LCG's weak low end: bit 0 of each output word (state bit 16), which
/// is periodic with period 2¹⁷. Packs 32 consecutive low bits per word,
/// MSB first. A battery-sensitivity fixture, not a real generator.
#[derive(Debug, Clone)]
pub struct Lcg48LowBit {
    inner: Lcg48,
}

impl Lcg48LowBit {
    pub fn new(seed: u64) -> Self {
        Self { inner: Lcg48::new(seed) }
    }
}

impl WordSource for Lcg48LowBit {
    fn next_word(&mut self) -> Result<u32> {
        let mut word = 0u32;
        for _ in 0..32 {
            word = (word << 1) | (self.inner.next_u32() & 1);
        }
        Ok(word)
    }
}

/// Hash-backed baseline: block i = SHA-1(seed_bytes ‖ big-endian 64-bit i),
/// 20-byte blocks consumed as five big-endian 32-bit words. Output block i
/// is a pure function of (seed, i).
#[derive(Debug, Clone)]
pub struct HashDrbg {
    seed_bytes: [u8; 8],
    counter: u64,
    block: [u32; 5],
    position: usize,
}

impl HashDrbg {
    pub fn new(seed: u64) -> Self {
        Self {
            seed_bytes: seed.to_be_bytes(),
            counter: 0,
            block: [0; 5],
            position: 5, // forces a refill on first use
        }
    }

    fn refill(&mut self) {
        let mut message = [0u8; 16];
        message[..8].copy_from_slice(&self.seed_bytes);
        message[8..].copy_from_slice(&self.counter.to_be_bytes());
        let digest = sha1::sha1(&message);
        for (i, chunk) in digest.chunks_exact(4).enumerate() {
            self.block[i] = u32::from_be_bytes(chunk.try_into().expect("4-byte chunk"));
        }
        self.counter += 1;
        self.position = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.position == 5 {
            self.refill();
        }
        let word = self.block[self.position];
        self.position += 1;
        word
    }
}

impl WordSource for HashDrbg {
    fn next_word(&mut self) -> Result<u32> {
        Ok(self.next_u32())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_golden_vector_seed_zero() {
        // Hand-evaluated with big-integer arithmetic:
        // state0 = 0 ^ 0x5DEECE66D, then two affine steps.
        let mut lcg = Lcg48::new(0);
        assert_eq!(lcg.state(), 0x5DEECE66D);
        assert_eq!(lcg.next_u32(), 0xBB20_B460);
        assert_eq!(lcg.next_u32(), 0xD4D9_5138);
        assert_eq!(lcg.next_u32(), 0x3D93_CB7A);
        assert_eq!(lcg.next_u32(), 0x9B39_70BE);
    }

    #[test]
    fn lcg_state_stays_in_48_bits() {
        let mut lcg = Lcg48::new(u64::MAX);
        for _ in 0..1000 {
            lcg.next_u32();
            assert!(lcg.state() < (1 << 48));
        }
    }

    #[test]
    fn lcg_low_state_bit_flips_every_step() {
        // Odd multiplier and odd increment flip the parity each step.
        let mut lcg = Lcg48::new(12345);
        let mut parity = lcg.state() & 1;
        for _ in 0..64 {
            lcg.next_u32();
            assert_eq!(lcg.state() & 1, parity ^ 1);
            parity = lcg.state() & 1;
        }
    }

    #[test]
    fn lcg_streams_are_deterministic() {
        let mut a = Lcg48::new(99);
        let mut b = Lcg48::new(99);
        for _ in 0..100 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
    }

    #[test]
    fn low_bit_stream_has_period_two_pow_17() {
        let mut source = Lcg48LowBit::new(0);
        let mut bits = Vec::with_capacity(1 << 19);
        for _ in 0..(1 << 14) {
            let w = source.next_word().unwrap();
            for shift in (0..32).rev() {
                bits.push(((w >> shift) & 1) as u8);
            }
        }
        let period = 1usize << 17;
        assert_eq!(&bits[..2048], &bits[period..period + 2048]);
        // ...and 2^16 is not a period.
        assert_ne!(&bits[..2048], &bits[period / 2..period / 2 + 2048]);
    }

    #[test]
    fn drbg_golden_words_seed_zero() {
        // First block: SHA-1(BE64(0) ‖ BE64(0)); cross-checked externally.
        let mut drbg = HashDrbg::new(0);
        assert_eq!(drbg.next_u32(), 0xE129_F27C);
        assert_eq!(drbg.next_u32(), 0x5103_BC5C);
        assert_eq!(drbg.next_u32(), 0xC44B_CDF0);
        assert_eq!(drbg.next_u32(), 0xA15E_160D);
        assert_eq!(drbg.next_u32(), 0x4450_66FF);
        // First word of the second block (counter = 1).
        assert_eq!(drbg.next_u32(), 0x8868_5C90);
    }

    #[test]
    fn drbg_streams_are_deterministic() {
        let mut a = HashDrbg::new(7);
        let mut b = HashDrbg::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
    }

    #[test]
    fn drbg_adjacent_seeds_avalanche() {
        // Seeds differing in one bit: first 160 output bits differ in at
        // least a quarter of positions.
        let mut a = HashDrbg::new(0);
        let mut b = HashDrbg::new(1);
        let mut differing = 0u32;
        for _ in 0..5 {
            differing += (a.next_u32() ^ b.next_u32()).count_ones();
        }
        assert!(differing >= 40, "only {differing}/160 bits differ");
    }
}
