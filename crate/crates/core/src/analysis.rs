//! Power-spectrum computation and ADC dynamic-parameter extraction.
//!
//! The measurement model is the standard single-tone FFT test:
//!
//! * the capture is windowed (rectangular by default, for coherent
//!   sampling) and transformed,
//! * the complex spectrum is folded to a single-sided power spectrum,
//!   scaled so a coherent sine of amplitude `A` reports `A^2 / 2` in its
//!   bin regardless of window,
//! * every bin is assigned to exactly one of {DC, fundamental, harmonic,
//!   noise}, so the power bookkeeping is an exact partition,
//! * SINAD = fundamental over everything else, SNR = fundamental over the
//!   noise partition, THD = harmonics (orders 2..=H, alias-folded) over
//!   fundamental, SFDR = fundamental over the largest single non-excluded
//!   bin, ENOB = (SINAD_dB - 1.76) / 6.02.
//!
//! Under a rectangular window the single-sided powers sum exactly to the
//! time-domain mean power (Parseval), so the partition arithmetic is exact.
//! Non-rectangular windows aggregate the fundamental and each harmonic over
//! +/-3 bins and correct the noise estimate by the window's equivalent
//! noise bandwidth.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft::fft;
use crate::signal::SampleBlock;
use crate::{Error, Result};

/// Reports never carry infinities: ratios are clamped to +/- this value,
/// and degenerate noise-free captures report it directly.
pub const DB_CAP: f64 = 300.0;

/// Analysis window. Rectangular assumes coherent sampling; Hann and the
/// 4-term Blackman-Harris trade main-lobe width for leakage suppression on
/// non-coherent captures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Hann,
    BlackmanHarris4,
}

impl WindowKind {
    /// Periodic (DFT-even) window coefficients.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        match self {
            WindowKind::Rectangular => vec![1.0; n],
            WindowKind::Hann => (0..n)
                .map(|i| {
                    let phase = 2.0 * PI * i as f64 / n as f64;
                    0.5 - 0.5 * phase.cos()
                })
                .collect(),
            WindowKind::BlackmanHarris4 => {
                const A: [f64; 4] = [0.35875, 0.48829, 0.14128, 0.01168];
                (0..n)
                    .map(|i| {
                        let phase = 2.0 * PI * i as f64 / n as f64;
                        A[0] - A[1] * phase.cos() + A[2] * (2.0 * phase).cos()
                            - A[3] * (3.0 * phase).cos()
                    })
                    .collect()
            }
        }
    }

    /// Coherent gain `sum(w) / n`; 1 for rectangular.
    pub fn coherent_gain(self, n: usize) -> f64 {
        match self {
            WindowKind::Rectangular => 1.0,
            _ => self.coefficients(n).iter().sum::<f64>() / n as f64,
        }
    }

    /// Equivalent noise bandwidth in bins: `n * sum(w^2) / sum(w)^2`.
    /// Scales a noise-floor estimate read from a windowed spectrum back to
    /// the true noise power (processing-gain correction).
    pub fn enbw_bins(self, n: usize) -> f64 {
        match self {
            WindowKind::Rectangular => 1.0,
            _ => {
                let w = self.coefficients(n);
                let sum: f64 = w.iter().sum();
                let sum_sq: f64 = w.iter().map(|v| v * v).sum();
                n as f64 * sum_sq / (sum * sum)
            }
        }
    }

    /// Half-width of the bin span aggregated for the fundamental and each
    /// harmonic: single-bin for rectangular (coherent), +/-3 otherwise.
    pub fn span_bins(self) -> usize {
        match self {
            WindowKind::Rectangular => 0,
            _ => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Hann => "hann",
            WindowKind::BlackmanHarris4 => "blackman-harris4",
        }
    }
}

/// Single-sided power spectrum of one capture.
///
/// `power` has `n/2 + 1` entries. Under a rectangular window the entries
/// sum to the time-domain mean power; a coherent sine of amplitude `A`
/// reports `A^2 / 2` in its bin under every window.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub power: Vec<f64>,
    /// Hz per bin: `sample_rate / n`.
    pub bin_hz: f64,
    /// Transform size (time-domain length).
    pub n: usize,
    pub window: WindowKind,
}

impl SpectrumRecord {
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }
}

/// Window + fold a capture into a [`SpectrumRecord`].
pub fn power_spectrum(block: &SampleBlock, window: WindowKind) -> Result<SpectrumRecord> {
    let n = block.len();
    let data: Vec<Complex64> = match window {
        // Skip the multiply entirely so the coherent path is bit-exact.
        WindowKind::Rectangular => block
            .samples()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect(),
        _ => {
            let coeffs = window.coefficients(n);
            block
                .samples()
                .iter()
                .zip(&coeffs)
                .map(|(&v, &w)| Complex64::new(v * w, 0.0))
                .collect()
        }
    };
    let spectrum = fft(&data)?;
    let cg = window.coherent_gain(n);
    let norm = 1.0 / (n as f64 * n as f64 * cg * cg);
    let half = n / 2;
    let power = (0..=half)
        .map(|k| {
            let fold = if k == 0 || k == half { 1.0 } else { 2.0 };
            fold * spectrum[k].norm_sqr() * norm
        })
        .collect();
    Ok(SpectrumRecord {
        power,
        bin_hz: block.sample_rate() / n as f64,
        n,
        window,
    })
}

/// Index of the strongest non-DC bin; ties break to the lowest index.
pub fn find_fundamental(spectrum: &SpectrumRecord) -> Result<usize> {
    let mut best_bin = 0usize;
    let mut best_power = 0.0f64;
    for (bin, &p) in spectrum.power.iter().enumerate().skip(1) {
        if p > best_power {
            best_power = p;
            best_bin = bin;
        }
    }
    if best_power == 0.0 {
        return Err(Error::NoSignal);
    }
    Ok(best_bin)
}

/// Alias-fold the `order`-th harmonic of `fundamental_hz` into the first
/// Nyquist zone `[0, sample_rate / 2]`.
pub fn fold_harmonic(order: u32, fundamental_hz: f64, sample_rate: f64) -> f64 {
    let f = (order as f64 * fundamental_hz) % sample_rate;
    if f > sample_rate / 2.0 {
        sample_rate - f
    } else {
        f
    }
}

/// Power in dB relative to a full-scale sine (`full_scale^2 / 2`).
pub fn dbfs(power: f64, full_scale: f64) -> f64 {
    ratio_db(power, full_scale * full_scale / 2.0)
}

/// Knobs for [`analyze`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub window: WindowKind,
    /// Highest harmonic order folded into the THD sum (orders `2..=this`).
    pub max_harmonic: u32,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            window: WindowKind::Rectangular,
            max_harmonic: 6,
        }
    }
}

/// Location of one folded harmonic in the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicBin {
    pub order: u32,
    pub bin: usize,
}

/// The five dynamic parameters plus the bookkeeping that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynReport {
    pub snr_db: f64,
    pub sinad_db: f64,
    pub enob_bits: f64,
    pub thd_db: f64,
    pub sfdr_db: f64,
    pub fundamental_bin: usize,
    pub fundamental_hz: f64,
    pub harmonic_bins: Vec<HarmonicBin>,
    /// Largest single non-fundamental, non-DC bin; `None` when the
    /// exclusions cover the whole spectrum.
    pub spur_bin: Option<usize>,
    /// Set when non-fundamental power is below 1e-18 of the fundamental;
    /// SNR and SINAD then report [`DB_CAP`] instead of infinity.
    pub noise_free: bool,
}

fn ratio_db(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        return -DB_CAP;
    }
    if den <= 0.0 {
        return DB_CAP;
    }
    (10.0 * (num / den).log10()).clamp(-DB_CAP, DB_CAP)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BinClass {
    Dc,
    Fundamental,
    Harmonic,
    Noise,
}

/// Exact partition of the spectrum bins plus the per-class power sums.
struct Partition {
    class: Vec<BinClass>,
    p_dc: f64,
    p_fund: f64,
    p_harm: f64,
    p_noise: f64,
    harmonic_bins: Vec<HarmonicBin>,
}

fn partition(spectrum: &SpectrumRecord, fundamental: usize, opts: &AnalysisOptions) -> Partition {
    let half = spectrum.power.len() - 1;
    let span = spectrum.window.span_bins();
    let mut class = vec![BinClass::Noise; half + 1];

    // Priority: fundamental span first (it may reach down to bin 1), then
    // DC, then harmonics in ascending order. Each bin is claimed once.
    let lo = fundamental.saturating_sub(span).max(1);
    let hi = (fundamental + span).min(half);
    class[lo..=hi].fill(BinClass::Fundamental);
    class[0] = BinClass::Dc;
    if span > 0 && class[1] == BinClass::Noise {
        // Leakage from DC dominates bin 1 under non-rectangular windows.
        class[1] = BinClass::Dc;
    }

    let fundamental_hz = fundamental as f64 * spectrum.bin_hz;
    let sample_rate = spectrum.bin_hz * spectrum.n as f64;
    let mut harmonic_bins = Vec::new();
    for order in 2..=opts.max_harmonic {
        let folded_hz = fold_harmonic(order, fundamental_hz, sample_rate);
        let center = ((folded_hz / spectrum.bin_hz).round() as usize).min(half);
        harmonic_bins.push(HarmonicBin { order, bin: center });
        let lo = center.saturating_sub(span);
        let hi = (center + span).min(half);
        for slot in &mut class[lo..=hi] {
            if *slot == BinClass::Noise {
                *slot = BinClass::Harmonic;
            }
        }
    }

    let mut sums = [0.0f64; 4];
    for (bin, &p) in spectrum.power.iter().enumerate() {
        let idx = match class[bin] {
            BinClass::Dc => 0,
            BinClass::Fundamental => 1,
            BinClass::Harmonic => 2,
            BinClass::Noise => 3,
        };
        sums[idx] += p;
    }
    Partition {
        class,
        p_dc: sums[0],
        p_fund: sums[1],
        p_harm: sums[2],
        p_noise: sums[3],
        harmonic_bins,
    }
}

/// Compute the full dynamic-parameter report for one capture.
///
/// Expects a single dominant fundamental. Fails with [`Error::NoSignal`]
/// when the spectrum holds no energy outside DC.
pub fn analyze(block: &SampleBlock, opts: &AnalysisOptions) -> Result<DynReport> {
    let spectrum = power_spectrum(block, opts.window)?;
    let fundamental = find_fundamental(&spectrum)?;
    let parts = partition(&spectrum, fundamental, opts);
    debug_assert!(
        {
            let total = spectrum.total_power();
            (parts.p_dc + parts.p_fund + parts.p_harm + parts.p_noise - total).abs()
                <= 1e-12 * total + 1e-300
        },
        "bin partition failed to cover the spectrum exactly"
    );

    // Tones are read point-calibrated from the spectrum; the noise floor of
    // a windowed spectrum is inflated by the window's noise bandwidth.
    let enbw = opts.window.enbw_bins(spectrum.n);
    let noise = parts.p_noise / enbw;
    let p_else = parts.p_harm + noise;
    let noise_free = parts.p_harm + parts.p_noise < 1e-18 * parts.p_fund;

    let (snr_db, sinad_db) = if noise_free {
        (DB_CAP, DB_CAP)
    } else {
        (
            ratio_db(parts.p_fund, noise),
            ratio_db(parts.p_fund, p_else),
        )
    };
    let thd_db = ratio_db(parts.p_harm, parts.p_fund);

    let mut spur_bin = None;
    let mut spur_power = 0.0f64;
    for (bin, &p) in spectrum.power.iter().enumerate() {
        let eligible = matches!(
            parts.class[bin],
            BinClass::Harmonic | BinClass::Noise
        );
        if eligible && (spur_bin.is_none() || p > spur_power) {
            spur_bin = Some(bin);
            spur_power = p;
        }
    }
    let sfdr_db = match spur_bin {
        Some(_) => ratio_db(parts.p_fund, spur_power),
        None => DB_CAP,
    };

    Ok(DynReport {
        snr_db,
        sinad_db,
        enob_bits: (sinad_db - 1.76) / 6.02,
        thd_db,
        sfdr_db,
        fundamental_bin: fundamental,
        fundamental_hz: fundamental as f64 * spectrum.bin_hz,
        harmonic_bins: parts.harmonic_bins,
        spur_bin,
        noise_free,
    })
}
