//! Channel impairments: 2-tap fading, phase offset, carrier frequency
//! offset and AWGN calibrated to Eb/N0.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::css::IqBuffer;
use crate::error::{Error, Result};

/// Impairment configuration for one simulated link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    /// Power of the delayed tap, `0 <= rho <= 1`.
    pub rho: f64,
    /// Constant phase rotation in radians.
    pub psi: f64,
    /// Carrier offset in bins (cycles per symbol).
    pub delta_f: f64,
    pub ebn0_db: f64,
    pub fading_enabled: bool,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self::awgn(0.0)
    }
}

impl ChannelSpec {
    pub fn awgn(ebn0_db: f64) -> Self {
        Self {
            rho: 0.0,
            psi: 0.0,
            delta_f: 0.0,
            ebn0_db,
            fading_enabled: false,
        }
    }

    pub fn with_fading(mut self, rho: f64) -> Self {
        self.rho = rho;
        self.fading_enabled = true;
        self
    }

    pub fn with_phase_offset(mut self, psi: f64) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_freq_offset(mut self, delta_f: f64) -> Self {
        self.delta_f = delta_f;
        self
    }

    pub fn with_ebn0_db(mut self, ebn0_db: f64) -> Self {
        self.ebn0_db = ebn0_db;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidChannel(format!("rho = {} outside [0, 1]", self.rho)));
        }
        for (name, v) in [("psi", self.psi), ("delta_f", self.delta_f)] {
            if !v.is_finite() {
                return Err(Error::InvalidChannel(format!("{name} = {v} is not finite")));
            }
        }
        // +inf Eb/N0 is allowed and means a noiseless link.
        if self.ebn0_db.is_nan() || self.ebn0_db == f64::NEG_INFINITY {
            return Err(Error::InvalidChannel(format!("ebn0_db = {}", self.ebn0_db)));
        }
        Ok(())
    }

    /// Deterministic part of the chain: fading, then phase, then frequency
    /// offset.
    pub fn distort(&self, s: &[Complex64]) -> Result<IqBuffer> {
        let mut out = if self.fading_enabled {
            apply_fading(s, self.rho)?
        } else {
            IqBuffer::new(s.to_vec())
        };
        if self.psi != 0.0 {
            out = apply_phase_offset(&out, self.psi);
        }
        if self.delta_f != 0.0 {
            out = apply_freq_offset(&out, self.delta_f);
        }
        Ok(out)
    }

    /// Full chain with AWGN of per-sample variance `sigma2` added last.
    pub fn apply<R: Rng + ?Sized>(&self, s: &[Complex64], sigma2: f64, rng: &mut R) -> Result<IqBuffer> {
        let mut out = self.distort(s)?;
        add_awgn(&mut out, sigma2, rng);
        Ok(out)
    }
}

/// Per-sample complex noise variance giving the requested Eb/N0, with
/// `Eb = energy_total / bits_per_symbol`.
pub fn sigma_for_ebn0(ebn0_db: f64, energy_total: f64, bits_per_symbol: usize) -> Result<f64> {
    if energy_total.is_nan() || energy_total <= 0.0 {
        return Err(Error::NonPositiveEnergy(energy_total));
    }
    if bits_per_symbol == 0 {
        return Err(Error::InvalidChannel("bits per symbol must be at least 1".into()));
    }
    let eb = energy_total / bits_per_symbol as f64;
    Ok(eb / 10f64.powf(ebn0_db / 10.0))
}

pub(crate) fn add_awgn<R: Rng + ?Sized>(buf: &mut [Complex64], sigma2: f64, rng: &mut R) {
    if sigma2 <= 0.0 {
        return;
    }
    let sd = (sigma2 / 2.0).sqrt();
    for x in buf.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *x += Complex64::new(re * sd, im * sd);
    }
}

/// Adds circularly-symmetric Gaussian noise of total variance `sigma2`.
pub fn apply_awgn<R: Rng + ?Sized>(s: &[Complex64], sigma2: f64, rng: &mut R) -> IqBuffer {
    let mut out = IqBuffer::new(s.to_vec());
    add_awgn(&mut out, sigma2, rng);
    out
}

/// `y(n) = sqrt(1-rho) s(n) + sqrt(rho) s(n-1)` with `s(-1) = 0`.
pub fn apply_fading(s: &[Complex64], rho: f64) -> Result<IqBuffer> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidChannel(format!("rho = {rho} outside [0, 1]")));
    }
    let (a, b) = ((1.0 - rho).sqrt(), rho.sqrt());
    let zero = Complex64::new(0.0, 0.0);
    Ok(s.iter()
        .enumerate()
        .map(|(n, x)| x * a + if n == 0 { zero } else { s[n - 1] * b })
        .collect())
}

/// Multiplies every sample by `exp{j psi}`.
pub fn apply_phase_offset(s: &[Complex64], psi: f64) -> IqBuffer {
    let rot = Complex64::from_polar(1.0, psi);
    s.iter().map(|x| x * rot).collect()
}

/// Multiplies sample `n` by `exp{j 2 pi delta_f n / N}`, `N = s.len()`.
pub fn apply_freq_offset(s: &[Complex64], delta_f: f64) -> IqBuffer {
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, x)| x * Complex64::from_polar(1.0, 2.0 * PI * delta_f * i as f64 / n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::{symbol_energy, SpreadingFactor};
    use crate::spectral::dft_fast;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_buf(n: usize, seed: u64) -> IqBuffer {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        apply_awgn(&vec![Complex64::new(0.0, 0.0); n], 2.0, &mut rng)
    }

    #[test]
    fn sigma_examples() {
        let s = SpreadingFactor::new(6).unwrap();
        let n = s.n() as f64;
        assert!((sigma_for_ebn0(0.0, 2.0 * n, 13).unwrap() - 128.0 / 13.0).abs() < 1e-12);
        assert!((sigma_for_ebn0(0.0, n, 6).unwrap() - 64.0 / 6.0).abs() < 1e-12);
        assert_eq!(sigma_for_ebn0(f64::INFINITY, n, 6).unwrap(), 0.0);
        assert!(sigma_for_ebn0(300.0, n, 6).unwrap() < 1e-25);
        assert!(matches!(sigma_for_ebn0(3.0, 0.0, 6), Err(Error::NonPositiveEnergy(_))));
        assert!(sigma_for_ebn0(3.0, n, 0).is_err());
    }

    #[test]
    fn awgn_identity_variance_determinism() {
        let x = random_buf(64, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(apply_awgn(&x, 0.0, &mut rng), x);

        let zeros = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = apply_awgn(&zeros, 2.0, &mut rng);
        let var = w.iter().map(|v| v.norm_sqr()).sum::<f64>() / w.len() as f64;
        assert!((var - 2.0).abs() < 0.02, "variance {var}");
        let re_var = w.iter().map(|v| v.re * v.re).sum::<f64>() / w.len() as f64;
        assert!((re_var - 1.0).abs() < 0.01);

        let a = apply_awgn(&x, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
        let b = apply_awgn(&x, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn fading_examples() {
        let x = random_buf(8, 4);
        assert_eq!(apply_fading(&x, 0.0).unwrap(), x);
        let d = apply_fading(&x, 1.0).unwrap();
        assert_eq!(d[0], Complex64::new(0.0, 0.0));
        for n in 1..8 {
            assert_eq!(d[n], x[n - 1]);
        }
        let y = apply_fading(&x, 0.3).unwrap();
        for n in 0..8 {
            let prev = if n > 0 { x[n - 1] } else { Complex64::new(0.0, 0.0) };
            let want = x[n] * 0.7f64.sqrt() + prev * 0.3f64.sqrt();
            assert!((y[n] - want).norm() < 1e-15);
        }
        assert!(apply_fading(&x, 1.5).is_err());
        assert!(apply_fading(&x, -0.1).is_err());
    }

    #[test]
    fn fading_preserves_average_power() {
        let x = random_buf(100_000, 8);
        let y = apply_fading(&x, 0.3).unwrap();
        let ratio = symbol_energy(&y) / symbol_energy(&x);
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn phase_offset_examples() {
        let x = random_buf(8, 5);
        assert_eq!(apply_phase_offset(&x, 0.0), x);
        let neg = apply_phase_offset(&x, PI);
        for (a, b) in neg.iter().zip(x.iter()) {
            assert!((a + b).norm() < 1e-12);
        }
        let rot = apply_phase_offset(&x, PI / 8.0);
        for (a, b) in rot.iter().zip(x.iter()) {
            let want = Complex64::new(
                b.re * (PI / 8.0).cos() - b.im * (PI / 8.0).sin(),
                b.re * (PI / 8.0).sin() + b.im * (PI / 8.0).cos(),
            );
            assert!((a - want).norm() < 1e-12);
        }
        assert!((symbol_energy(&rot) - symbol_energy(&x)).abs() < 1e-12);
    }

    #[test]
    fn freq_offset_examples() {
        let x = random_buf(8, 6);
        assert_eq!(apply_freq_offset(&x, 0.0), x);
        let y = apply_freq_offset(&x, 0.1);
        for n in 0..8 {
            let ang = 2.0 * PI * 0.1 * n as f64 / 8.0;
            let want = x[n] * Complex64::new(ang.cos(), ang.sin());
            assert!((y[n] - want).norm() < 1e-12);
        }
        assert!((symbol_energy(&y) - symbol_energy(&x)).abs() < 1e-12);

        let tone: Vec<_> = (0..16)
            .map(|n| Complex64::from_polar(1.0, 2.0 * PI * 5.0 * n as f64 / 16.0))
            .collect();
        let spec = dft_fast(&apply_freq_offset(&tone, 1.0)).unwrap();
        let peak = (0..16).max_by(|&a, &b| spec[a].norm().total_cmp(&spec[b].norm())).unwrap();
        assert_eq!(peak, 6);
    }

    #[test]
    fn chain_order_and_noise_calibration() {
        let x = random_buf(32, 2);
        let ch = ChannelSpec::awgn(5.0).with_fading(0.3).with_phase_offset(0.4).with_freq_offset(0.1);
        let manual = apply_freq_offset(&apply_phase_offset(&apply_fading(&x, 0.3).unwrap(), 0.4), 0.1);
        assert_eq!(ch.distort(&x).unwrap(), manual);

        let sigma2 = sigma_for_ebn0(4.0, 1024.0, 19).unwrap();
        let zeros = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let w = ChannelSpec::awgn(4.0).apply(&zeros, sigma2, &mut rng).unwrap();
        let var = w.iter().map(|v| v.norm_sqr()).sum::<f64>() / w.len() as f64;
        assert!((var / sigma2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn spec_validation() {
        assert!(ChannelSpec::awgn(3.0).validate().is_ok());
        assert!(ChannelSpec::awgn(f64::INFINITY).validate().is_ok());
        assert!(ChannelSpec::awgn(f64::NAN).validate().is_err());
        assert!(ChannelSpec::awgn(3.0).with_fading(1.2).validate().is_err());
        assert!(ChannelSpec::awgn(3.0).with_freq_offset(f64::INFINITY).validate().is_err());
    }
}
