//! Synthetic RSSI surveys drawn from a calibrated model.
//!
//! # Determinism
//!
//! Every sample has its own position in a counter-based ChaCha8 stream:
//!
//! * key: `ChaCha8Rng::seed_from_u64(seed)`
//! * stream: the distance index
//! * word position: `4 × sample index` (each sample consumes two `u64`s)
//!
//! The two words become uniforms `u1 ∈ (0, 1]` and `u2 ∈ [0, 1)` from their top
//! 53 bits, and the deviate is the Box–Muller cosine branch
//! `√(−2 ln u1) · cos(2π u2)`, evaluated with the portable `libm` routines so
//! output is bit-identical across platforms. Samples depend only on
//! `(seed, distance index, sample index)`: appending distances or samples
//! never changes existing values, and generation order is irrelevant.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::domain::ShadowedPathLossModel;
use crate::error::{Error, Result};
use crate::io::{RssiSurvey, SurveyRow};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub model: ShadowedPathLossModel,
    pub distances: Vec<f64>,
    pub samples_per_distance: usize,
    pub seed: u64,
}

impl SimulationSpec {
    fn validate(&self) -> Result<()> {
        if self.samples_per_distance == 0 {
            return Err(Error::InvalidInput(
                "samples_per_distance must be >= 1".into(),
            ));
        }
        if self.distances.is_empty() {
            return Err(Error::InvalidInput(
                "at least one distance is required".into(),
            ));
        }
        if let Some(d) = self
            .distances
            .iter()
            .find(|d| !(**d > 0.0 && d.is_finite()))
        {
            return Err(Error::Domain {
                quantity: "distance",
                value: *d,
                requirement: "must be > 0",
            });
        }
        Ok(())
    }
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Standard normal deviate for one `(seed, stream, index)` coordinate.
pub fn standard_normal(seed: u64, stream: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 4);
    normal_from_words(rng.next_u64(), rng.next_u64())
}

fn normal_from_words(w1: u64, w2: u64) -> f64 {
    let u1 = ((w1 >> 11) + 1) as f64 * INV_2_53;
    let u2 = (w2 >> 11) as f64 * INV_2_53;
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * std::f64::consts::PI * u2)
}

/// `predict_mean_rss(d) + σ(d) z` for every distance and sample index, σ
/// clamped to the model's calibrated range.
pub fn simulate_survey(spec: &SimulationSpec) -> Result<RssiSurvey> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.distances.len());
    for (i, &d) in spec.distances.iter().enumerate() {
        let mean = spec.model.predict_mean_rss(d)?;
        let sigma = spec.model.sigma_at(d)?.value;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(i as u64);
        let samples = (0..spec.samples_per_distance)
            .map(|_| {
                // Sequential draws walk the word position 4 at a time, matching
                // `standard_normal(seed, i, j)`.
                let z = normal_from_words(rng.next_u64(), rng.next_u64());
                if sigma == 0.0 {
                    mean
                } else {
                    mean + sigma * z
                }
            })
            .collect();
        rows.push(SurveyRow {
            distance: d,
            samples,
        });
    }
    RssiSurvey::new("simulated", rows)
}
