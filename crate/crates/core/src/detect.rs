//! Non-coherent DM-CSS detection and the generic correlation receiver.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::css::{chirp_ref, check_len, DmCssSymbol, IqBuffer, Polarity, Slope, SpreadingFactor};
use crate::error::{Error, Result};
use crate::spectral::fft_in_place;

/// Decision of [`detect_dm_css`] with the two branch peak magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub symbol: DmCssSymbol,
    /// Peak `|R_1(k)|` of the branch that removes an up-chirp.
    pub kappa1: f64,
    /// Peak `|R_2(k)|` of the branch that removes a down-chirp.
    pub kappa2: f64,
}

/// Removes a chirp of the given slope by multiplying with its conjugate.
///
/// Removing `Up` multiplies by the down-chirp (`r_1`), removing `Down`
/// multiplies by the up-chirp (`r_2`).
pub fn dechirp(r: &[Complex64], slope: Slope, sf: SpreadingFactor) -> Result<IqBuffer> {
    check_len(sf.n(), r.len())?;
    let c = chirp_ref(slope.flipped(), sf);
    Ok(r.iter().zip(c.iter()).map(|(x, y)| x * y).collect())
}

/// Dechirped spectrum for one slope hypothesis.
pub fn dechirped_spectrum(r: &[Complex64], slope: Slope, sf: SpreadingFactor) -> Result<Vec<Complex64>> {
    let mut buf = dechirp(r, slope, sf)?.into_samples();
    fft_in_place(&mut buf)?;
    Ok(buf)
}

/// Index of the largest magnitude among `indices`; the first one wins ties.
pub(crate) fn argmax_norm<I>(bins: &[Complex64], indices: I) -> (usize, f64)
where
    I: IntoIterator<Item = usize>,
{
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for k in indices {
        let m = bins[k].norm_sqr();
        if m > best.1 {
            best = (k, m);
        }
    }
    best
}

/// Non-coherent DM-CSS detector.
///
/// Both slope hypotheses are dechirped and transformed; the branch with the
/// larger peak magnitude decides the slope (ties go to `Up`). Within that
/// branch the strongest even and odd bins are the tone estimates and the
/// sign of each bin's real part is its phase decision.
pub fn detect_dm_css(r: &[Complex64], sf: SpreadingFactor) -> Result<DetectionResult> {
    let n = sf.n();
    let r1 = dechirped_spectrum(r, Slope::Up, sf)?;
    let r2 = dechirped_spectrum(r, Slope::Down, sf)?;
    let (_, p1) = argmax_norm(&r1, 0..n);
    let (_, p2) = argmax_norm(&r2, 0..n);
    let (bins, slope) = if p1 >= p2 { (&r1, Slope::Up) } else { (&r2, Slope::Down) };

    let (k_e, _) = argmax_norm(bins, (0..n).step_by(2));
    let (k_o, _) = argmax_norm(bins, (1..n).step_by(2));
    let symbol = DmCssSymbol::new(
        sf,
        k_e,
        k_o,
        Polarity::of(bins[k_e].re),
        Polarity::of(bins[k_o].re),
        slope,
    )?;
    Ok(DetectionResult {
        symbol,
        kappa1: p1.sqrt(),
        kappa2: p2.sqrt(),
    })
}

/// Index of the candidate with the largest `|<r, candidate>|`; lowest index
/// wins ties.
pub fn correlation_detect<B: AsRef<[Complex64]>>(r: &[Complex64], candidates: &[B]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, c) in candidates.iter().enumerate() {
        let c = c.as_ref();
        check_len(r.len(), c.len())?;
        let m = r.iter().zip(c).map(|(x, y)| x * y.conj()).sum::<Complex64>().norm_sqr();
        if m > best.1 {
            best = (i, m);
        }
    }
    Ok(best.0)
}

impl AsRef<[Complex64]> for IqBuffer {
    fn as_ref(&self) -> &[Complex64] {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::{bits_to_symbol, dm_css_bits, modulate, unchirped_symbol, up_chirp, BitWord};
    use crate::spectral::dft_reference;
    use std::f64::consts::PI;

    fn sf(l: u32) -> SpreadingFactor {
        SpreadingFactor::new(l).unwrap()
    }

    fn sym(l: u32, v: u64) -> DmCssSymbol {
        bits_to_symbol(&BitWord::from_u64(v, dm_css_bits(sf(l))), sf(l)).unwrap()
    }

    #[test]
    fn dechirp_recovers_unchirped() {
        let s = sf(6);
        for v in [0u64, 77, 1000, 4095] {
            let x = sym(6, v);
            let tx = modulate(&x, s).unwrap();
            let back = dechirp(&tx, x.slope(), s).unwrap();
            let f = unchirped_symbol(&x, s).unwrap();
            for (a, b) in back.iter().zip(f.iter()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let ones = dechirp(&up_chirp(s), Slope::Up, s).unwrap();
        assert!(ones.iter().all(|x| (x - 1.0).norm() < 1e-12));
    }

    #[test]
    fn dechirp_matches_product_oracle() {
        let s = sf(3);
        let r: Vec<Complex64> = (0..8)
            .map(|n| Complex64::new(0.3 * n as f64 - 1.0, (n as f64 * 1.7).sin()))
            .collect();
        for (slope, sign) in [(Slope::Up, -1.0), (Slope::Down, 1.0)] {
            let got = dechirp(&r, slope, s).unwrap();
            for n in 0..8 {
                let c = Complex64::from_polar(1.0, sign * 2.0 * PI * (n * n) as f64 / 8.0);
                assert!((got[n] - r[n] * c).norm() < 1e-12);
            }
        }
        assert!(dechirp(&r[..4], Slope::Up, s).is_err());
    }

    #[test]
    fn noiseless_branch_margin_n16() {
        // Brute-force spectra of both branches for every up-chirped symbol.
        let s = sf(4);
        for v in 0..(1u64 << 9) {
            let x = sym(4, v);
            if x.slope() != Slope::Up {
                continue;
            }
            let tx = modulate(&x, s).unwrap();
            let r1 = dft_reference(&dechirp(&tx, Slope::Up, s).unwrap());
            let r2 = dft_reference(&dechirp(&tx, Slope::Down, s).unwrap());
            assert!((r1[x.k_e()].norm() - 16.0).abs() < 1e-9);
            assert!((r1[x.k_o()].norm() - 16.0).abs() < 1e-9);
            let k2 = r2.iter().map(|b| b.norm()).fold(0.0, f64::max);
            // The mismatched branch holds a rate-2 chirp pair; its peak is
            // bounded by 2*sqrt(2N) = 11.31 for N = 16.
            assert!(k2 <= 2.0 * (32f64).sqrt() + 1e-9, "k2 = {k2}");
            let det = detect_dm_css(&tx, s).unwrap();
            assert!((det.kappa1 - 16.0).abs() < 1e-9 && det.kappa2 < det.kappa1);
        }
    }

    #[test]
    fn noiseless_roundtrip_lambda6() {
        let s = sf(6);
        for v in 0..(1u64 << dm_css_bits(s)) {
            let x = sym(6, v);
            assert_eq!(detect_dm_css(&modulate(&x, s).unwrap(), s).unwrap().symbol, x);
        }
    }

    #[test]
    fn equivariances() {
        let s = sf(5);
        for v in (0..(1u64 << 11)).step_by(7) {
            let x = sym(5, v);
            let tx = modulate(&x, s).unwrap();
            let base = detect_dm_css(&tx, s).unwrap();
            let scaled = detect_dm_css(&tx.scaled(3.7), s).unwrap();
            assert_eq!(scaled.symbol, base.symbol);

            let flipped = DmCssSymbol::new(s, x.k_e(), x.k_o(), x.alpha_e().flipped(), x.alpha_o(), x.slope())
                .unwrap();
            let d = detect_dm_css(&modulate(&flipped, s).unwrap(), s).unwrap().symbol;
            assert_eq!(d, flipped);

            let conj = detect_dm_css(&tx.conj(), s).unwrap();
            assert!((conj.kappa1 - base.kappa2).abs() < 1e-9);
            assert!((conj.kappa2 - base.kappa1).abs() < 1e-9);
            assert_eq!(conj.symbol.slope(), x.slope().flipped());
        }
    }

    #[test]
    fn correlation_basics() {
        let s = sf(4);
        let cands: Vec<IqBuffer> = (0..(1u64 << 9))
            .map(|v| modulate(&sym(4, v), s).unwrap())
            .collect();
        assert_eq!(correlation_detect(&cands[5], &cands[..1]).unwrap(), 0);
        let empty: &[IqBuffer] = &[];
        assert_eq!(correlation_detect(&cands[5], empty), Err(Error::EmptyCandidates));
        let lora: Vec<IqBuffer> = (0..16)
            .map(|k| {
                (0..16)
                    .map(|n| Complex64::from_polar(1.0, 2.0 * PI * (k * n) as f64 / 16.0))
                    .collect()
            })
            .collect();
        for (i, c) in lora.iter().enumerate() {
            assert_eq!(correlation_detect(c, &lora).unwrap(), i);
        }
    }
}
