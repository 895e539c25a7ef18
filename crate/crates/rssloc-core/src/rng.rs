//! Deterministic random streams.
//!
//! Every stochastic operation in this crate draws from an explicitly seeded
//! [`Stream`], so runs are reproducible bit for bit. Independent sub-streams
//! are split off with [`Stream::derive`] (pure function of a seed and an id
//! path, usable for random access, e.g. one stream per Monte-Carlo trial) or
//! [`RandomSource::substream`] (consumes one draw from the parent, e.g. one
//! stream per solver branch).

use core::f64::consts::PI;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const ID_MULT: u64 = 0xD134_2543_DE82_EF95;

#[inline]
fn splitmix_finish(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    splitmix_finish(*state)
}

/// A source of uniform 64-bit words, plus the derived draws the solver and
/// the measurement model consume.
///
/// The provided methods define the exact draw protocol (how many words each
/// variate consumes), which is part of the reproducibility contract.
pub trait RandomSource {
    fn next_u64(&mut self) -> u64;

    /// Uniform on [0, 1), 53-bit resolution. One word.
    #[inline]
    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform on [-1, 1). One word.
    #[inline]
    fn uniform_signed(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    /// Standard normal via Box-Muller. Exactly one Gaussian per call; no
    /// caching of the twin variate, so the draw count stays predictable.
    /// Two words per call (more only if the first uniform lands on 0).
    fn gaussian(&mut self) -> f64 {
        let mut u1 = self.uniform();
        while u1 <= 0.0 {
            u1 = self.uniform();
        }
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
    }

    /// Splits off an independent child stream tagged by `tag`, consuming one
    /// word from `self`. Children with distinct tags are independent of each
    /// other and of the parent's subsequent output.
    fn substream(&mut self, tag: u64) -> Stream {
        Stream::derive(self.next_u64(), &[tag])
    }
}

/// xoshiro256++ generator seeded through SplitMix64.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    s: [u64; 4],
}

impl Stream {
    /// Creates a stream from a 64-bit seed.
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for word in &mut s {
            *word = splitmix_next(&mut sm);
        }
        if s == [0; 4] {
            s[0] = GOLDEN;
        }
        Stream { s }
    }

    /// Creates the stream identified by `(seed, ids)`: a pure hash of the
    /// seed and the id path, independent for distinct paths. Random access
    /// by construction — deriving trial `i` never touches trial `j`.
    pub fn derive(seed: u64, ids: &[u64]) -> Self {
        let mut key = seed;
        for &id in ids {
            key = splitmix_finish(
                key.wrapping_add(GOLDEN)
                    .wrapping_add(id.wrapping_mul(ID_MULT)),
            );
        }
        Stream::from_seed(key)
    }
}

impl RandomSource for Stream {
    #[inline]
    fn next_u64(&mut self) -> u64 {
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
}
