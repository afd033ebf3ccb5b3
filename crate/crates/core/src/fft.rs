//! Radix-2 decimation-in-time FFT with a process-wide twiddle cache, plus a
//! direct-summation reference transform used for verification.
//!
//! The forward transform is unnormalized (`X[k] = sum_n x[n] e^{-2 pi i k n / N}`);
//! [`ifft`] applies the `1/N` factor. Twiddle tables are computed once per
//! transform size and shared behind an `Arc`, so repeated transforms (and the
//! benchmark harness) never pay for table construction.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::{Error, Result};

/// Precomputed roots of unity `e^{-2 pi i k / n}` for `k < n/2`, everything a
/// radix-2 butterfly pass needs.
#[derive(Debug)]
pub struct TwiddleTable {
    n: usize,
    factors: Vec<Complex64>,
}

impl TwiddleTable {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::BadLength { len: n, min: 2 });
        }
        let factors = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Ok(Self { n, factors })
    }

    /// Fetch the shared table for size `n`, computing it on first use.
    ///
    /// Lookups are safe from any number of threads; the table for each size
    /// is built exactly once.
    pub fn shared(n: usize) -> Result<Arc<TwiddleTable>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TwiddleTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("twiddle cache poisoned");
        if let Some(table) = map.get(&n) {
            return Ok(Arc::clone(table));
        }
        let table = Arc::new(TwiddleTable::new(n)?);
        map.insert(n, Arc::clone(&table));
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Complex64] {
        &self.factors
    }
}

/// Forward DFT of a power-of-two-length input. The input is not modified.
pub fn fft(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut data = input.to_vec();
    fft_in_place(&mut data)?;
    Ok(data)
}

/// In-place variant of [`fft`]: bit-reversal permutation followed by
/// log2(n) butterfly passes.
pub fn fft_in_place(data: &mut [Complex64]) -> Result<()> {
    let n = data.len();
    let table = TwiddleTable::shared(n)?;
    let bits = n.trailing_zeros();

    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let step = n / size;
        for base in (0..n).step_by(size) {
            for j in 0..half {
                let w = table.factors[j * step];
                let lo = data[base + j];
                let hi = data[base + j + half] * w;
                data[base + j] = lo + hi;
                data[base + j + half] = lo - hi;
            }
        }
        size *= 2;
    }
    Ok(())
}

/// Inverse DFT, normalized by `1/N`, via conjugate-forward-conjugate.
pub fn ifft(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut data: Vec<Complex64> = input.iter().map(Complex64::conj).collect();
    fft_in_place(&mut data)?;
    let scale = 1.0 / input.len() as f64;
    for v in &mut data {
        *v = v.conj() * scale;
    }
    Ok(data)
}

/// Direct O(N^2) summation of the DFT definition.
///
/// Reference implementation only: it shares no code with [`fft`] and exists
/// so tests can check the fast path against an independent computation.
/// Accepts any length.
pub fn dft_oracle(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    (0..n)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(idx, &v)| {
                    // Reduce k*idx mod n before forming the angle so large
                    // products do not cost precision.
                    let t = ((k as u128 * idx as u128) % n as u128) as f64;
                    let angle = -2.0 * PI * t / n as f64;
                    v * Complex64::new(angle.cos(), angle.sin())
                })
                .sum()
        })
        .collect()
}

/// Number of complex multiplications a full N-point radix-2 transform
/// performs: `n * log2(n)`.
pub fn butterfly_count(n: usize) -> Result<u64> {
    if !n.is_power_of_two() || n == 0 {
        return Err(Error::BadLength { len: n, min: 2 });
    }
    Ok(n as u64 * n.trailing_zeros() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(uniform(rng), uniform(rng)))
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    // ------------------------------------------------------------ fft

    #[test]
    fn impulse_transforms_to_all_ones() {
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[0] = Complex64::new(1.0, 0.0);
        let spectrum = fft(&x).unwrap();
        for v in spectrum {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_concentrates_at_dc() {
        let x = vec![Complex64::new(1.0, 0.0); 8];
        let spectrum = fft(&x).unwrap();
        assert!((spectrum[0] - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        for v in &spectrum[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn matches_oracle_on_random_1024_point_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_vec(&mut rng, 1024);
        let fast = fft(&x).unwrap();
        let slow = dft_oracle(&x);
        assert!(max_diff(&fast, &slow) < 1e-9);
    }

    #[test]
    fn matches_oracle_across_small_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for exp in 1..=8 {
            let n = 1usize << exp;
            for _ in 0..5 {
                let x = random_vec(&mut rng, n);
                let diff = max_diff(&fft(&x).unwrap(), &dft_oracle(&x));
                assert!(diff < 1e-9 * n as f64, "n={n} diff={diff}");
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two_length() {
        let x = vec![Complex64::new(1.0, 0.0); 12];
        assert!(matches!(fft(&x), Err(Error::BadLength { len: 12, .. })));
        assert!(matches!(fft(&x[..1]), Err(Error::BadLength { len: 1, .. })));
    }

    #[test]
    fn input_is_not_modified() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_vec(&mut rng, 64);
        let copy = x.clone();
        let _ = fft(&x).unwrap();
        assert_eq!(
            x.iter().map(|v| v.re.to_bits()).collect::<Vec<_>>(),
            copy.iter().map(|v| v.re.to_bits()).collect::<Vec<_>>()
        );
    }

    // ------------------------------------------------------------ oracle

    #[test]
    fn oracle_impulse() {
        let mut x = vec![Complex64::new(0.0, 0.0); 8];
        x[0] = Complex64::new(1.0, 0.0);
        for v in dft_oracle(&x) {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_basis_vector_orthogonality() {
        // x[n] = e^{+2 pi i k0 n / N} lands entirely in bin k0.
        let n = 32;
        let k0 = 5;
        let x: Vec<Complex64> = (0..n)
            .map(|i| {
                let angle = 2.0 * PI * (k0 * i) as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let spectrum = dft_oracle(&x);
        assert!((spectrum[k0] - Complex64::new(n as f64, 0.0)).norm() < 1e-9);
        for (k, v) in spectrum.iter().enumerate() {
            if k != k0 {
                assert!(v.norm() < 1e-9, "bin {k} holds {v}");
            }
        }
    }

    #[test]
    fn oracle_four_point_hand_sum() {
        let x: Vec<Complex64> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&r| Complex64::new(r, 0.0))
            .collect();
        let expected = [
            Complex64::new(10.0, 0.0),
            Complex64::new(-2.0, 2.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(-2.0, -2.0),
        ];
        let spectrum = dft_oracle(&x);
        for (v, e) in spectrum.iter().zip(&expected) {
            assert!((v - e).norm() < 1e-12);
        }
    }

    // ------------------------------------------------------------ butterfly count

    #[test]
    fn butterfly_counts() {
        assert_eq!(butterfly_count(1024).unwrap(), 10_240);
        assert_eq!(butterfly_count(2).unwrap(), 2);
        assert_eq!(butterfly_count(4096).unwrap(), 49_152);
        assert!(butterfly_count(1000).is_err());
        assert!(butterfly_count(0).is_err());
    }

    // ------------------------------------------------------------ invariants

    #[test]
    fn linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = random_vec(&mut rng, 256);
        let y = random_vec(&mut rng, 256);
        let (alpha, beta) = (Complex64::new(0.7, -0.2), Complex64::new(-1.3, 0.4));
        let combined: Vec<Complex64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let lhs = fft(&combined).unwrap();
        let fx = fft(&x).unwrap();
        let fy = fft(&y).unwrap();
        let rhs: Vec<Complex64> = fx
            .iter()
            .zip(&fy)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        assert!(max_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let x = random_vec(&mut rng, 1024);
        let spectrum = fft(&x).unwrap();
        let time: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let freq: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() / 1024.0;
        assert!((time - freq).abs() <= 1e-9 * time.abs());
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x = random_vec(&mut rng, 512);
        let back = ifft(&fft(&x).unwrap()).unwrap();
        assert!(max_diff(&x, &back) < 1e-10);
    }

    #[test]
    fn twiddle_table_invariants() {
        let table = TwiddleTable::new(256).unwrap();
        assert_eq!(table.n(), 256);
        assert_eq!(table.factors().len(), 128);
        assert_eq!(table.factors()[0], Complex64::new(1.0, 0.0));
        for f in table.factors() {
            assert!((f.norm() - 1.0).abs() < 1e-14);
        }
        assert!(TwiddleTable::new(100).is_err());
    }

    #[test]
    fn twiddle_cache_is_shared_and_thread_safe() {
        let a = TwiddleTable::shared(512).unwrap();
        let b = TwiddleTable::shared(512).unwrap();
        assert!(Arc::ptr_eq(&a, &b));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_vec(&mut rng, 2048);
        let expected = fft(&x).unwrap();
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let x = x.clone();
                let expected = expected.clone();
                std::thread::spawn(move || {
                    let got = fft(&x).unwrap();
                    assert_eq!(got.len(), expected.len());
                    for (g, e) in got.iter().zip(&expected) {
                        assert_eq!(g.re.to_bits(), e.re.to_bits());
                        assert_eq!(g.im.to_bits(), e.im.to_bits());
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }
}
