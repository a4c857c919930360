//! Seeded random streams and the normal sampler used by every simulation.
//!
//! Streams are ChaCha8 keyed by the user seed with the stream id in the
//! cipher's nonce, so stream `c` of seed `s` is the same sequence no matter
//! which thread draws it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RNG_NAME: &str = "chacha8";
pub const NORMAL_SAMPLER_NAME: &str = "marsaglia-polar";

pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Marsaglia polar method. Produces normals in pairs; the spare is kept.
#[derive(Debug, Clone, Default)]
pub struct PolarNormal {
    spare: Option<f64>,
}

impl PolarNormal {
    pub fn new() -> Self {
        Self { spare: None }
    }

    /// Two independent standard normals.
    pub fn pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
        loop {
            let u = 2.0 * rng.random::<f64>() - 1.0;
            let v = 2.0 * rng.random::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (a, b) = Self::pair(rng);
        self.spare = Some(b);
        a
    }
}
