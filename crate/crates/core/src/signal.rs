//! Deterministic test-capture synthesis: multi-tone signals, additive
//! Gaussian noise and an ideal mid-tread quantizer.
//!
//! Everything here is reproducible to the bit. The noise stream is ChaCha8
//! keyed with the capture seed (little-endian in the first 8 key bytes, rest
//! zero) feeding a Box-Muller transform:
//!
//! ```text
//! u = ((next_u64() >> 11) + 1) * 2^-53          // uniform in (0, 1]
//! z0 = sqrt(-2 ln u1) * cos(2 pi u2)
//! z1 = sqrt(-2 ln u1) * sin(2 pi u2)
//! ```
//!
//! so the stream can be replicated exactly in any language.

use std::f64::consts::{FRAC_PI_2, PI};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// One cosine component of a synthetic capture.
///
/// `amplitude` is a fraction of full scale, `phase` is in radians with the
/// cosine convention: `a * cos(2 pi f t + phase)`. A sine term is a cosine
/// with `phase = -pi/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneSpec {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl ToneSpec {
    pub fn cosine(amplitude: f64, frequency: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase: 0.0,
        }
    }

    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase: -FRAC_PI_2,
        }
    }
}

/// Full description of a synthetic capture; feed to [`synthesize`].
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureSpec {
    pub tones: Vec<ToneSpec>,
    /// Standard deviation of the additive Gaussian noise term.
    pub noise_sigma: f64,
    pub sample_rate: f64,
    /// Record length; must be a power of two >= 8.
    pub n_points: usize,
    pub seed: u64,
    /// When set, the summed signal is passed through [`quantize`] with this
    /// many bits.
    pub quantizer_bits: Option<u32>,
    /// Quantizer range is `[-full_scale, +full_scale - lsb]`.
    pub full_scale: f64,
}

impl CaptureSpec {
    /// The built-in two-tone reference capture:
    /// `0.7 cos(2 pi 50 MHz t) + sin(2 pi 12 MHz t) + 0.1 randn()`,
    /// 1024 points at 1.024 GHz so both tones land on integer bins (50, 12).
    pub fn reference_two_tone(seed: u64) -> Self {
        Self {
            tones: vec![ToneSpec::cosine(0.7, 50e6), ToneSpec::sine(1.0, 12e6)],
            noise_sigma: 0.1,
            sample_rate: 1.024e9,
            n_points: 1024,
            seed,
            quantizer_bits: None,
            full_scale: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < 8 {
            return Err(Error::BadLength {
                len: self.n_points,
                min: 8,
            });
        }
        if !self.sample_rate.is_finite() || self.sample_rate <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive and finite, got {}",
                self.sample_rate
            )));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        if !self.full_scale.is_finite() || self.full_scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "full scale must be > 0, got {}",
                self.full_scale
            )));
        }
        if let Some(bits) = self.quantizer_bits {
            if !(2..=32).contains(&bits) {
                return Err(Error::InvalidParameter(format!(
                    "quantizer bits must be in 2..=32, got {bits}"
                )));
            }
        }
        let mut max_freq = 0.0f64;
        for tone in &self.tones {
            if !tone.amplitude.is_finite() || tone.amplitude < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "tone amplitude must be >= 0, got {}",
                    tone.amplitude
                )));
            }
            if !tone.frequency.is_finite() || tone.frequency < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "tone frequency must be >= 0, got {}",
                    tone.frequency
                )));
            }
            max_freq = max_freq.max(tone.frequency);
        }
        if !self.tones.is_empty() && self.sample_rate <= 2.0 * max_freq {
            return Err(Error::NyquistViolation {
                sample_rate: self.sample_rate,
                max_tone_hz: max_freq,
            });
        }
        Ok(())
    }
}

/// A real-valued time-domain capture: the unit of processing throughout the
/// toolkit (one "group" in the accelerator model).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    samples: Vec<f64>,
    sample_rate: f64,
    full_scale: f64,
}

impl SampleBlock {
    /// Validates the block invariants: power-of-two length, finite values,
    /// positive sample rate and full scale.
    pub fn new(samples: Vec<f64>, sample_rate: f64, full_scale: f64) -> Result<Self> {
        if !samples.len().is_power_of_two() || samples.len() < 2 {
            return Err(Error::BadLength {
                len: samples.len(),
                min: 2,
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "samples must all be finite".into(),
            ));
        }
        if !sample_rate.is_finite() || sample_rate <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if !full_scale.is_finite() || full_scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "full scale must be positive and finite, got {full_scale}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            full_scale,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn full_scale(&self) -> f64 {
        self.full_scale
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `x[i]^2` over the block.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }
}

/// Standard-normal stream: ChaCha8 + Box-Muller, one value at a time.
struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self {
            rng: ChaCha8Rng::from_seed(key),
            spare: None,
        }
    }

    /// Uniform in (0, 1]: 53-bit mantissa, never zero so ln() is safe.
    fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Build a capture from its spec: summed tones, seeded Gaussian noise and
/// optional ideal quantization. Identical specs (including seed) always
/// yield bit-identical blocks.
pub fn synthesize(spec: &CaptureSpec) -> Result<SampleBlock> {
    spec.validate()?;
    let mut noise = GaussianStream::new(spec.seed);
    let mut samples = Vec::with_capacity(spec.n_points);
    for i in 0..spec.n_points {
        let t = i as f64 / spec.sample_rate;
        let mut value = spec
            .tones
            .iter()
            .map(|tone| tone.amplitude * (2.0 * PI * tone.frequency * t + tone.phase).cos())
            .sum::<f64>();
        if spec.noise_sigma > 0.0 {
            value += spec.noise_sigma * noise.next();
        }
        samples.push(value);
    }
    if let Some(bits) = spec.quantizer_bits {
        for v in &mut samples {
            *v = quantize(*v, bits, spec.full_scale);
        }
    }
    SampleBlock::new(samples, spec.sample_rate, spec.full_scale)
}

/// Ideal mid-tread quantizer: snaps `x` to the nearest of `2^bits` levels
/// `k * lsb` spanning `[-full_scale, full_scale - lsb]`, clipping
/// out-of-range inputs to the end codes. `lsb = 2 * full_scale / 2^bits`.
///
/// Ties at half-LSB boundaries round away from zero.
pub fn quantize(x: f64, bits: u32, full_scale: f64) -> f64 {
    assert!((2..=32).contains(&bits), "bits must be in 2..=32");
    assert!(full_scale > 0.0, "full_scale must be positive");
    let lsb = 2.0 * full_scale / (1u64 << bits) as f64;
    let half = 1i64 << (bits - 1);
    // `as` saturates on overflow, so huge inputs clamp cleanly.
    let code = (x / lsb).round() as i64;
    code.clamp(-half, half - 1) as f64 * lsb
}
