//! Seeded pseudo-randomness for reproducible solver restarts.
//!
//! The generator is xoshiro256++. Its entire behaviour is pinned by the
//! update rule below, so a seed fixes every restart trajectory of the
//! solver bit-for-bit within this implementation:
//!
//! ```text
//! output = rotl(s0 + s3, 23) + s0
//! t  = s1 << 17
//! s2 ^= s0;  s3 ^= s1;  s1 ^= s2;  s0 ^= s3
//! s2 ^= t;   s3  = rotl(s3, 45)
//! ```
//!
//! (all operations on u64, wrapping). The four state words are filled from
//! the seed with the splitmix64 sequence, which also derives independent
//! per-restart streams via [`subseed`].

use num_complex::Complex64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for an independent stream (e.g. restart `index`) from a
/// base seed. Streams for distinct indices are decorrelated by splitmix64.
pub fn subseed(seed: u64, index: u64) -> u64 {
    let mut state = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    splitmix64(&mut state)
}

/// xoshiro256++ generator (Blackman & Vigna), seeded via splitmix64.
#[derive(Debug, Clone)]
pub struct Xoshiro256pp {
    s: [u64; 4],
}

impl Xoshiro256pp {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let s = [
            splitmix64(&mut state),
            splitmix64(&mut state),
            splitmix64(&mut state),
            splitmix64(&mut state),
        ];
        Xoshiro256pp { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1), 53 mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the Box-Muller transform.
    pub fn standard_normal(&mut self) -> f64 {
        let u = self.next_open01();
        let v = self.next_f64();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }

    /// Standard complex Gaussian: E|z|^2 = 1, independent re/im.
    pub fn standard_complex(&mut self) -> Complex64 {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(
            self.standard_normal() * scale,
            self.standard_normal() * scale,
        )
    }

    /// Uniform integer in [0, bound) by rejection; bound must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}
