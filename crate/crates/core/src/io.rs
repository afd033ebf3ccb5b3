//! Capture and report persistence.
//!
//! Binary capture layout (all little-endian):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "ACAP"
//!      4     2  format version (currently 1)
//!      6     2  payload encoding (0 = IEEE-754 binary64, little-endian)
//!      8     8  n_points (u64)
//!     16     8  sample_rate in Hz (f64)
//!     24     8  full_scale (f64)
//!     32   8*n  samples
//! ```
//!
//! CSV dialect everywhere: comma separator, `.` decimal point, one header
//! row. Floats are printed with Rust's shortest round-trip formatting, so
//! every format preserves full 64-bit precision.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::analysis::{DynReport, SpectrumRecord};
use crate::pipeline::{PipelineConfig, StreamStats, TransactionStats};
use crate::signal::SampleBlock;
use crate::{Error, Result};

const CAPTURE_MAGIC: [u8; 4] = *b"ACAP";
const CAPTURE_VERSION: u16 = 1;
const ENCODING_F64_LE: u16 = 0;
const HEADER_BYTES: usize = 32;

/// Write a capture in the binary format above.
pub fn write_capture(block: &SampleBlock, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CAPTURE_MAGIC)?;
    w.write_all(&CAPTURE_VERSION.to_le_bytes())?;
    w.write_all(&ENCODING_F64_LE.to_le_bytes())?;
    w.write_all(&(block.len() as u64).to_le_bytes())?;
    w.write_all(&block.sample_rate().to_le_bytes())?;
    w.write_all(&block.full_scale().to_le_bytes())?;
    for &v in block.samples() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a binary capture, validating magic, version, encoding and payload
/// length. The round trip through [`write_capture`] is bit-exact.
pub fn read_capture(path: &Path) -> Result<SampleBlock> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_BYTES {
        return Err(Error::LengthMismatch {
            expected: HEADER_BYTES as u64,
            actual: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != CAPTURE_MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != CAPTURE_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let encoding = u16::from_le_bytes(bytes[6..8].try_into().unwrap());
    if encoding != ENCODING_F64_LE {
        return Err(Error::UnsupportedEncoding(encoding));
    }
    let n_points = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let sample_rate = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let full_scale = f64::from_le_bytes(bytes[24..32].try_into().unwrap());

    let payload = &bytes[HEADER_BYTES..];
    if payload.len() as u64 != n_points * 8 {
        return Err(Error::LengthMismatch {
            expected: n_points,
            actual: payload.len() as u64 / 8,
        });
    }
    let samples: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SampleBlock::new(samples, sample_rate, full_scale)
}

/// Write a capture as `t,value` rows.
pub fn write_capture_csv<W: Write>(block: &SampleBlock, mut w: W) -> Result<()> {
    writeln!(w, "t,value")?;
    for (i, &v) in block.samples().iter().enumerate() {
        writeln!(w, "{},{}", i as f64 / block.sample_rate(), v)?;
    }
    Ok(())
}

/// Import a `t,value` CSV capture. The sample rate is recovered from the
/// spacing of the first two timestamps; `full_scale` is not representable
/// in the CSV and must be supplied.
pub fn read_capture_csv(path: &Path, full_scale: f64) -> Result<SampleBlock> {
    let text = std::fs::read_to_string(path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            // Header row.
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (t, v) = match (fields.next(), fields.next()) {
            (Some(t), Some(v)) => (t, v),
            _ => {
                return Err(Error::MalformedRecord {
                    line: idx + 1,
                    reason: "expected two comma-separated fields".into(),
                })
            }
        };
        let t: f64 = t.trim().parse().map_err(|e| Error::MalformedRecord {
            line: idx + 1,
            reason: format!("bad timestamp: {e}"),
        })?;
        let v: f64 = v.trim().parse().map_err(|e| Error::MalformedRecord {
            line: idx + 1,
            reason: format!("bad value: {e}"),
        })?;
        times.push(t);
        values.push(v);
    }
    if times.len() < 2 {
        return Err(Error::BadLength {
            len: times.len(),
            min: 2,
        });
    }
    let dt = times[1] - times[0];
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::MalformedRecord {
            line: 3,
            reason: "timestamps must be strictly increasing".into(),
        });
    }
    SampleBlock::new(values, 1.0 / dt, full_scale)
}

/// Export a spectrum as `bin_hz,power_db` rows (one per single-sided bin),
/// ready for any plotting tool. Zero-power bins floor at -400 dB.
pub fn write_spectrum_csv<W: Write>(spectrum: &SpectrumRecord, mut w: W) -> Result<()> {
    writeln!(w, "bin_hz,power_db")?;
    for (bin, &p) in spectrum.power.iter().enumerate() {
        let db = if p > 0.0 { 10.0 * p.log10() } else { -400.0 };
        writeln!(w, "{},{}", bin as f64 * spectrum.bin_hz, db)?;
    }
    Ok(())
}

/// Serialize any report to pretty JSON with stable field order.
pub fn emit_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// One-row CSV rendering of a report.
pub trait CsvReport {
    fn csv_header() -> &'static str;
    fn csv_row(&self) -> String;
}

/// Header line plus data row.
pub fn emit_csv<T: CsvReport>(value: &T) -> String {
    format!("{}\n{}\n", T::csv_header(), value.csv_row())
}

impl CsvReport for DynReport {
    fn csv_header() -> &'static str {
        "snr_db,sinad_db,enob_bits,thd_db,sfdr_db,fundamental_bin,fundamental_hz,spur_bin,noise_free,harmonic_bins"
    }

    fn csv_row(&self) -> String {
        let harmonics = self
            .harmonic_bins
            .iter()
            .map(|h| format!("{}:{}", h.order, h.bin))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.snr_db,
            self.sinad_db,
            self.enob_bits,
            self.thd_db,
            self.sfdr_db,
            self.fundamental_bin,
            self.fundamental_hz,
            self.spur_bin.map_or(String::new(), |b| b.to_string()),
            self.noise_free,
            harmonics
        )
    }
}

impl CsvReport for StreamStats {
    fn csv_header() -> &'static str {
        "total_cycles,latency_first_group,simulated_seconds,throughput_bytes_per_sec,groups_processed"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.total_cycles,
            self.latency_first_group,
            self.simulated_seconds,
            self.throughput_bytes_per_sec,
            self.groups_processed
        )
    }
}

impl CsvReport for TransactionStats {
    fn csv_header() -> &'static str {
        "clocks,host_overhead_s,wall_seconds,group_bytes,throughput_bytes_per_sec"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.clocks,
            self.host_overhead_s,
            self.wall_seconds,
            self.group_bytes,
            self.throughput_bytes_per_sec
        )
    }
}

/// Paired host-path vs simulated-accelerator-path timing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    /// Median wall-clock seconds per group on the host FFT path.
    pub baseline_seconds: f64,
    /// Median absolute deviation of the baseline repeats.
    pub baseline_mad_seconds: f64,
    /// Simulated accelerator seconds per group (transaction mode).
    pub accel_seconds: f64,
    pub speedup: f64,
    /// Simulated steady-state streaming throughput of the accelerator.
    pub throughput_bytes_per_sec: f64,
    pub repeats: u64,
    pub warmup: u64,
    pub config: PipelineConfig,
    pub toolkit_version: String,
    pub timestamp_unix: u64,
}

impl BenchReport {
    pub fn new(
        baseline_seconds: f64,
        baseline_mad_seconds: f64,
        accel_seconds: f64,
        repeats: u64,
        warmup: u64,
        config: PipelineConfig,
    ) -> Self {
        let throughput = config.steady_state_throughput();
        Self {
            baseline_seconds,
            baseline_mad_seconds,
            accel_seconds,
            speedup: baseline_seconds / accel_seconds,
            throughput_bytes_per_sec: throughput,
            repeats,
            warmup,
            config,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

impl CsvReport for BenchReport {
    fn csv_header() -> &'static str {
        "baseline_seconds,baseline_mad_seconds,accel_seconds,speedup,throughput_bytes_per_sec,repeats,warmup,toolkit_version,timestamp_unix"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.baseline_seconds,
            self.baseline_mad_seconds,
            self.accel_seconds,
            self.speedup,
            self.throughput_bytes_per_sec,
            self.repeats,
            self.warmup,
            self.toolkit_version,
            self.timestamp_unix
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, power_spectrum, AnalysisOptions, WindowKind};
    use crate::signal::{synthesize, CaptureSpec};

    fn temp_path(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("adcal-io-test-{}-{name}", std::process::id()));
        p
    }

    fn reference_block() -> SampleBlock {
        synthesize(&CaptureSpec::reference_two_tone(1)).unwrap()
    }

    // ------------------------------------------------------------ binary

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let block = reference_block();
        let path = temp_path("roundtrip.bin");
        write_capture(&block, &path).unwrap();
        let back = read_capture(&path).unwrap();
        assert_eq!(back.sample_rate(), block.sample_rate());
        assert_eq!(back.full_scale(), block.full_scale());
        let bits = |b: &SampleBlock| b.samples().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&block));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn truncated_payload_is_length_mismatch() {
        let block = reference_block();
        let path = temp_path("truncated.bin");
        write_capture(&block, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(
            read_capture(&path),
            Err(Error::LengthMismatch { .. })
        ));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_magic_and_version_are_distinct_errors() {
        let block = reference_block();
        let path = temp_path("magic.bin");
        write_capture(&block, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_capture(&path), Err(Error::BadMagic { .. })));

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'A';
        bytes[4] = 99;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_capture(&path),
            Err(Error::UnsupportedVersion(99))
        ));
        std::fs::remove_file(&path).ok();
    }

    // ------------------------------------------------------------ csv

    #[test]
    fn csv_import_of_hand_built_rows() {
        let path = temp_path("hand.csv");
        let mut text = String::from("t,value\n");
        for i in 0..8 {
            text.push_str(&format!("{},{}\n", i as f64 * 1e-9, i as f64 * 0.125));
        }
        std::fs::write(&path, text).unwrap();
        let block = read_capture_csv(&path, 1.0).unwrap();
        assert_eq!(block.len(), 8);
        assert!((block.sample_rate() - 1e9).abs() / 1e9 < 1e-12);
        assert_eq!(block.samples()[5], 0.625);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let block = reference_block();
        let path = temp_path("roundtrip.csv");
        let mut buf = Vec::new();
        write_capture_csv(&block, &mut buf).unwrap();
        std::fs::write(&path, &buf).unwrap();
        let back = read_capture_csv(&path, block.full_scale()).unwrap();
        assert_eq!(back.len(), 1024);
        // Shortest round-trip float formatting: values survive exactly.
        for (a, b) in back.samples().iter().zip(block.samples()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn malformed_csv_reports_line() {
        let path = temp_path("bad.csv");
        std::fs::write(&path, "t,value\n0.0,1.0\nnot-a-number,2.0\n").unwrap();
        match read_capture_csv(&path, 1.0) {
            Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected MalformedRecord, got {other:?}"),
        }
        std::fs::remove_file(&path).ok();
    }

    // ------------------------------------------------------------ reports

    #[test]
    fn dyn_report_json_has_expected_keys() {
        let report = analyze(&reference_block(), &AnalysisOptions::default()).unwrap();
        let json = emit_json(&report).unwrap();
        for key in [
            "snr_db",
            "sinad_db",
            "enob_bits",
            "thd_db",
            "sfdr_db",
            "fundamental_bin",
            "fundamental_hz",
            "harmonic_bins",
            "spur_bin",
            "noise_free",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }

    #[test]
    fn bench_report_round_trips_and_keeps_ratio() {
        let report = BenchReport::new(2.19e-3, 1e-6, 18e-6, 1000, 10, PipelineConfig::default());
        assert!((report.speedup - 2.19e-3 / 18e-6).abs() < 1e-12 * report.speedup);
        let json = emit_json(&report).unwrap();
        let back: BenchReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.speedup.to_bits(), report.speedup.to_bits());
        assert_eq!(back.config, report.config);

        // Equal baseline and accelerator times pin the ratio at exactly 1.
        let even = BenchReport::new(42e-6, 0.0, 42e-6, 1, 0, PipelineConfig::default());
        assert_eq!(even.speedup, 1.0);
    }

    #[test]
    fn reports_identical_except_timestamp() {
        let a = BenchReport::new(1e-3, 0.0, 1e-5, 10, 1, PipelineConfig::default());
        let b = BenchReport::new(1e-3, 0.0, 1e-5, 10, 1, PipelineConfig::default());
        let strip = |r: &BenchReport| {
            let mut v: serde_json::Value = serde_json::to_value(r).unwrap();
            v.as_object_mut().unwrap().remove("timestamp_unix");
            v
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn spectrum_csv_has_one_row_per_bin() {
        let spectrum = power_spectrum(&reference_block(), WindowKind::Rectangular).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&spectrum, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "bin_hz,power_db");
        assert_eq!(rows.len() - 1, 513); // N/2 + 1 data rows
    }

    #[test]
    fn csv_reports_render_one_row() {
        let report = analyze(&reference_block(), &AnalysisOptions::default()).unwrap();
        let text = emit_csv(&report);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].split(',').count(), rows[1].split(',').count());
    }
}
