use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How standard normals are produced. Both methods are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NormalMethod {
    /// Box-Muller transform; the second variate of each pair is cached.
    #[default]
    BoxMuller,
    /// Marsaglia's polar rejection method; avoids the trigonometric calls.
    Polar,
}

/// A reproducible random stream keyed by `(seed, stream_id)`.
///
/// The underlying generator is ChaCha8 with the seed expanded into the key and
/// `stream_id` selecting the 64-bit stream (nonce). Distinct stream ids under
/// one seed are independent keystreams. The position of the stream is the
/// index of the next 32-bit word; [`RngStream::seek`] jumps to any position.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    spare: Option<f64>,
    method: NormalMethod,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
            spare: None,
            method: NormalMethod::default(),
        }
    }

    pub fn with_normal_method(mut self, method: NormalMethod) -> Self {
        self.method = method;
        self.spare = None;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn normal_method(&self) -> NormalMethod {
        self.method
    }

    /// Index of the next 32-bit word of the keystream.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Moves to word index `pos` and drops any cached normal variate.
    pub fn seek(&mut self, pos: u128) {
        self.rng.set_word_pos(pos);
        self.spare = None;
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate.
    #[inline]
    pub fn std_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        match self.method {
            NormalMethod::BoxMuller => {
                let r = (-2.0 * self.uniform_open().ln()).sqrt();
                let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
                self.spare = Some(r * s);
                r * c
            }
            NormalMethod::Polar => loop {
                let u = 2.0 * self.uniform() - 1.0;
                let v = 2.0 * self.uniform() - 1.0;
                let s = u * u + v * v;
                if s > 0.0 && s < 1.0 {
                    let f = (-2.0 * s.ln() / s).sqrt();
                    self.spare = Some(v * f);
                    return u * f;
                }
            },
        }
    }
}
