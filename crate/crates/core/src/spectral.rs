//! Forward DFT: an iterative radix-2 transform and the direct O(N^2) sum.
//!
//! Both compute the unnormalized `X(k) = sum_n x(n) exp{-j 2 pi k n / N}`.

use std::f64::consts::PI;
use std::ops::Deref;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// DFT bins; bin `k` is the tone `exp{j 2 pi k n / N}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumBuffer(Vec<Complex64>);

impl SpectrumBuffer {
    pub fn bins(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.0
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.norm()).collect()
    }
}

impl Deref for SpectrumBuffer {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

const CACHED_LOG2: usize = 16;

static TWIDDLES: [OnceLock<Vec<Complex64>>; CACHED_LOG2 + 1] =
    [const { OnceLock::new() }; CACHED_LOG2 + 1];

fn build_twiddles(n: usize) -> Vec<Complex64> {
    (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
        .collect()
}

fn check_pow2(n: usize) -> Result<()> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

/// In-place forward transform of a power-of-two length slice.
pub fn fft_in_place(data: &mut [Complex64]) -> Result<()> {
    let n = data.len();
    check_pow2(n)?;
    if n == 1 {
        return Ok(());
    }
    let log2 = n.trailing_zeros() as usize;
    let owned;
    let tw: &[Complex64] = if log2 <= CACHED_LOG2 {
        TWIDDLES[log2].get_or_init(|| build_twiddles(n))
    } else {
        owned = build_twiddles(n);
        &owned
    };

    let shift = usize::BITS as usize - log2;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if j > i {
            data.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            let (lo, hi) = data[start..start + len].split_at_mut(half);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = *b * tw[k * stride];
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// Fast transform of a power-of-two length buffer.
pub fn dft_fast(buf: &[Complex64]) -> Result<SpectrumBuffer> {
    let mut out = buf.to_vec();
    fft_in_place(&mut out)?;
    Ok(SpectrumBuffer(out))
}

/// Direct evaluation of the DFT sum. Accepts any length.
pub fn dft_reference(buf: &[Complex64]) -> SpectrumBuffer {
    let n = buf.len();
    let bins = (0..n)
        .map(|k| {
            buf.iter()
                .enumerate()
                .map(|(i, x)| {
                    // Reduce k*i mod N first so the phase stays small and exact.
                    let m = ((k as u64 * i as u64) % n as u64) as f64;
                    x * Complex64::from_polar(1.0, -2.0 * PI * m / n as f64)
                })
                .sum()
        })
        .collect();
    SpectrumBuffer(bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_buf(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[0] = Complex64::new(1.0, 0.0);
        for spec in [dft_fast(&x).unwrap(), dft_reference(&x)] {
            assert!(spec.iter().all(|b| (b - 1.0).norm() < 1e-12));
        }
    }

    #[test]
    fn single_tone_lands_in_its_bin() {
        let x: Vec<_> = (0..8)
            .map(|n| Complex64::from_polar(1.0, 2.0 * PI * 3.0 * n as f64 / 8.0))
            .collect();
        for spec in [dft_fast(&x).unwrap(), dft_reference(&x)] {
            for (k, b) in spec.iter().enumerate() {
                let want = if k == 3 { 8.0 } else { 0.0 };
                assert!((b - want).norm() < 1e-10, "bin {k}: {b}");
            }
        }
    }

    #[test]
    fn fast_matches_reference_256() {
        let x = random_buf(256, 7);
        assert!(max_dev(&dft_fast(&x).unwrap(), &dft_reference(&x)) < 1e-9);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(dft_fast(&random_buf(12, 1)), Err(Error::NotPowerOfTwo(12)));
        assert_eq!(dft_fast(&[]), Err(Error::NotPowerOfTwo(0)));
        assert_eq!(dft_fast(&random_buf(1, 1)).unwrap().len(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn linearity(l in 2u32..=9, seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let n = 1 << l;
            let (x, y) = (random_buf(n, seed), random_buf(n, seed ^ 0x5555));
            let (ca, cb) = (Complex64::new(a, b), Complex64::new(b, -a));
            let mix: Vec<_> = x.iter().zip(&y).map(|(p, q)| ca * p + cb * q).collect();
            let (fx, fy, fm) = (dft_fast(&x).unwrap(), dft_fast(&y).unwrap(), dft_fast(&mix).unwrap());
            let lin: Vec<_> = fx.iter().zip(fy.iter()).map(|(p, q)| ca * p + cb * q).collect();
            prop_assert!(max_dev(&fm, &lin) < 1e-9);
        }

        #[test]
        fn parseval(l in 1u32..=12, seed in any::<u64>()) {
            let x = random_buf(1 << l, seed);
            let time: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let freq: f64 = dft_fast(&x).unwrap().iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((freq - time * x.len() as f64).abs() <= 1e-9 * freq);
        }
    }
}
