//! Counter-based random substreams.
//!
//! A [`RngStream`] is a `(master_seed, stream_index)` pair. The generator is
//! ChaCha8 keyed by the master seed with the stream index selecting one of the
//! 2^64 independent ChaCha streams, so realization `i` never depends on how
//! many other realizations were drawn before it or on which worker drew it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Lane labels used to split one trajectory's stream into independent inputs.
pub mod lane {
    pub const SHOT_TRAIN: u64 = 1;
    pub const OU_PATH: u64 = 2;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub const fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Substream `index` under the same master seed.
    pub const fn substream(&self, index: u64) -> Self {
        Self::new(self.master_seed, index)
    }

    /// Derives an independent stream for the same index but a different
    /// purpose (shot train vs. environment noise).
    pub fn lane(&self, label: u64) -> Self {
        Self {
            master_seed: splitmix64(self.master_seed ^ splitmix64(label.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            stream_index: self.stream_index,
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn draw(s: RngStream) -> Vec<u64> {
        let mut r = s.rng();
        (0..8).map(|_| r.random()).collect()
    }

    #[test]
    fn same_stream_same_values() {
        let s = RngStream::new(42, 7);
        assert_eq!(draw(s), draw(s));
    }

    #[test]
    fn distinct_indices_and_lanes_differ() {
        let s = RngStream::new(42, 7);
        assert_ne!(draw(s), draw(s.substream(8)));
        assert_ne!(draw(s), draw(RngStream::new(43, 7)));
        assert_ne!(draw(s.lane(lane::SHOT_TRAIN)), draw(s.lane(lane::OU_PATH)));
        assert_eq!(s.lane(lane::OU_PATH).stream_index, 7);
    }

    #[test]
    fn streams_are_uncorrelated() {
        // Pearson correlation of uniform draws from neighbouring streams.
        let n = 20_000;
        let mut a = RngStream::new(1, 0).rng();
        let mut b = RngStream::new(1, 1).rng();
        let xs: Vec<f64> = (0..n).map(|_| a.random::<f64>()).collect();
        let ys: Vec<f64> = (0..n).map(|_| b.random::<f64>()).collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n as f64;
        let corr = cov / (1.0 / 12.0);
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr = {corr}");
    }
}
