//! Browser bindings for the DM-CSS demo page in `www/`.
//!
//! Three operations back the page: a waveform and dechirped-spectrum view,
//! a single detection under channel impairments, and a small BER sweep.
//! Each has a plain-Rust twin so it can be tested natively.

use dmcss::channel::{sigma_for_ebn0, ChannelSpec};
use dmcss::detect::{dechirped_spectrum, detect_dm_css};
use dmcss::sim::{run_sweep, trial_rng, SweepConfig};
use dmcss::{BitWord, Modem, SchemeId, Slope, SpreadingFactor};
use wasm_bindgen::prelude::*;

fn modem(scheme: &str, lambda: u32) -> dmcss::Result<Modem> {
    Modem::new(scheme.parse()?, SpreadingFactor::new(lambda)?)
}

fn word(m: &Modem, value: u32) -> dmcss::Result<BitWord> {
    let nbits = m.bits_per_symbol();
    if nbits < 32 && value >> nbits != 0 {
        return Err(dmcss::Error::BitLength {
            expected: nbits,
            got: 32 - value.leading_zeros() as usize,
        });
    }
    Ok(BitWord::from_u64(value as u64, nbits))
}

fn channel(ebn0_db: f64, psi: f64, delta_f: f64, rho: f64) -> ChannelSpec {
    let c = ChannelSpec::awgn(ebn0_db).with_phase_offset(psi).with_freq_offset(delta_f);
    if rho > 0.0 {
        c.with_fading(rho)
    } else {
        c
    }
}

fn js(e: dmcss::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = bitsPerSymbol)]
pub fn bits_per_symbol(scheme: &str, lambda: u32) -> Result<u32, JsError> {
    Ok(modem(scheme, lambda).map_err(js)?.bits_per_symbol() as u32)
}

/// Received samples plus both dechirped spectra.
#[wasm_bindgen]
pub struct View {
    re: Vec<f64>,
    im: Vec<f64>,
    up: Vec<f64>,
    down: Vec<f64>,
}

#[wasm_bindgen]
impl View {
    #[wasm_bindgen(getter)]
    pub fn re(&self) -> Vec<f64> {
        self.re.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn im(&self) -> Vec<f64> {
        self.im.clone()
    }

    /// `|DFT(r * c_d)|`, where up-chirp symbols peak
    #[wasm_bindgen(getter)]
    pub fn up(&self) -> Vec<f64> {
        self.up.clone()
    }

    /// `|DFT(r * c_u)|`, where down-chirp symbols peak
    #[wasm_bindgen(getter)]
    pub fn down(&self) -> Vec<f64> {
        self.down.clone()
    }
}

#[allow(clippy::too_many_arguments)]
pub fn view_impl(
    scheme: &str,
    lambda: u32,
    value: u32,
    ebn0_db: f64,
    psi: f64,
    delta_f: f64,
    rho: f64,
    seed: u32,
) -> dmcss::Result<View> {
    let m = modem(scheme, lambda)?;
    let tx = m.modulate_bits(&word(&m, value)?)?;
    let ch = channel(ebn0_db, psi, delta_f, rho);
    let r = if ebn0_db.is_finite() {
        let sigma2 = sigma_for_ebn0(ebn0_db, m.symbol_energy_total(), m.bits_per_symbol())?;
        ch.apply(&tx, sigma2, &mut trial_rng(seed as u64, ebn0_db, 0))?
    } else {
        ch.distort(&tx)?
    };
    let sf = m.spreading_factor();
    let mag = |slope| -> dmcss::Result<Vec<f64>> {
        Ok(dechirped_spectrum(&r, slope, sf)?.iter().map(|c| c.norm()).collect())
    };
    Ok(View {
        re: r.iter().map(|c| c.re).collect(),
        im: r.iter().map(|c| c.im).collect(),
        up: mag(Slope::Up)?,
        down: mag(Slope::Down)?,
    })
}

/// One symbol through the channel; a non-finite `ebn0_db` means no noise.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn view(
    scheme: &str,
    lambda: u32,
    value: u32,
    ebn0_db: f64,
    psi: f64,
    delta_f: f64,
    rho: f64,
    seed: u32,
) -> Result<View, JsError> {
    view_impl(scheme, lambda, value, ebn0_db, psi, delta_f, rho, seed).map_err(js)
}

/// Outcome of one detection.
#[wasm_bindgen(getter_with_clone)]
pub struct Detection {
    pub sent: String,
    pub detected: String,
    pub bit_errors: u32,
    /// DM-CSS only: peak magnitude of each dechirped branch
    pub kappa_up: f64,
    pub kappa_down: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn detect_impl(
    scheme: &str,
    lambda: u32,
    value: u32,
    ebn0_db: f64,
    psi: f64,
    delta_f: f64,
    rho: f64,
    seed: u32,
) -> dmcss::Result<Detection> {
    let m = modem(scheme, lambda)?;
    let sent = word(&m, value)?;
    let v = view_impl(scheme, lambda, value, ebn0_db, psi, delta_f, rho, seed)?;
    let r: Vec<dmcss::Complex64> = v.re.iter().zip(&v.im).map(|(&a, &b)| dmcss::Complex64::new(a, b)).collect();
    let got = m.detect_bits(&r)?;
    let (kappa_up, kappa_down) = if m.scheme() == SchemeId::DmCss {
        let d = detect_dm_css(&r, m.spreading_factor())?;
        (d.kappa1, d.kappa2)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(Detection {
        bit_errors: sent.hamming(&got) as u32,
        sent: sent.to_string(),
        detected: got.to_string(),
        kappa_up,
        kappa_down,
    })
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn detect(
    scheme: &str,
    lambda: u32,
    value: u32,
    ebn0_db: f64,
    psi: f64,
    delta_f: f64,
    rho: f64,
    seed: u32,
) -> Result<Detection, JsError> {
    detect_impl(scheme, lambda, value, ebn0_db, psi, delta_f, rho, seed).map_err(js)
}

#[allow(clippy::too_many_arguments)]
pub fn ber_curve_impl(
    scheme: &str,
    lambda: u32,
    grid: Vec<f64>,
    trials: u32,
    psi: f64,
    delta_f: f64,
    rho: f64,
    seed: u32,
) -> dmcss::Result<Vec<f64>> {
    let m = modem(scheme, lambda)?;
    let cfg = SweepConfig::new(m.scheme(), m.spreading_factor(), channel(0.0, psi, delta_f, rho))
        .with_grid(grid)
        .with_trials(trials as u64)
        .with_seed(seed as u64);
    Ok(run_sweep(&cfg)?.into_iter().map(|p| p.ber).collect())
}

/// BER at each grid point.
#[wasm_bindgen(js_name = berCurve)]
#[allow(clippy::too_many_arguments)]
pub fn ber_curve(
    scheme: &str,
    lambda: u32,
    grid: Vec<f64>,
    trials: u32,
    psi: f64,
    delta_f: f64,
    rho: f64,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    ber_curve_impl(scheme, lambda, grid, trials, psi, delta_f, rho, seed).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_view_peaks_at_the_symbol_tones() {
        // word 0 at λ=4: up-chirp, k_e=0, k_o=1
        let v = view_impl("dmcss", 4, 0, f64::INFINITY, 0.0, 0.0, 0.0, 1).unwrap();
        assert_eq!(v.re.len(), 16);
        assert!((v.up[0] - 16.0).abs() < 1e-9 && (v.up[1] - 16.0).abs() < 1e-9);
        assert!(v.up[2..].iter().all(|&x| x < 1e-9));
        assert!(v.down.iter().all(|&x| x < 16.0));
    }

    #[test]
    fn clean_detection_is_exact() {
        for scheme in ["dmcss", "lora", "sskics", "gcss", "dcrk"] {
            let d = detect_impl(scheme, 5, 3, f64::INFINITY, 0.0, 0.0, 0.0, 1).unwrap();
            assert_eq!(d.sent, d.detected, "{scheme}");
            assert_eq!(d.bit_errors, 0);
        }
        let d = detect_impl("dmcss", 5, 3, f64::INFINITY, 0.0, 0.0, 0.0, 1).unwrap();
        assert!(d.kappa_up > d.kappa_down);
    }

    #[test]
    fn out_of_range_word_rejected() {
        assert!(detect_impl("lora", 4, 16, 10.0, 0.0, 0.0, 0.0, 1).is_err());
        assert!(detect_impl("epsk", 6, 1, 10.0, 0.0, 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn ber_curve_falls_and_repeats() {
        let grid = vec![0.0, 4.0, 8.0];
        let a = ber_curve_impl("dmcss", 6, grid.clone(), 400, 0.0, 0.0, 0.0, 9).unwrap();
        assert!(a[0] > a[1] && a[1] >= a[2]);
        assert_eq!(a, ber_curve_impl("dmcss", 6, grid, 400, 0.0, 0.0, 0.0, 9).unwrap());
    }
}
