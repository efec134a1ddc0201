//! Reference CSS schemes: LoRa, SSK-ICS-LoRa, GCSS, DCRK-CSS and the
//! ePSK-LoRa transmitter.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::css::{chirp_ref, chirp_tables, check_len, IqBuffer, Slope, SpreadingFactor};
use crate::detect::{argmax_norm, dechirped_spectrum};
use crate::error::{Error, Result};
use crate::spectral::fft_in_place;

/// Modulation scheme with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeId {
    Lora,
    DmCss,
    /// ePSK-LoRa with `nb` sub-blocks and `mphi` phases.
    EpskLora { nb: usize, mphi: usize },
    SskIcsLora,
    /// Group CSS with `g` groups.
    Gcss { g: usize },
    /// Discrete chirp-rate keying with `mc` rates.
    DcrkCss { mc: usize },
}

impl SchemeId {
    pub const EPSK: SchemeId = SchemeId::EpskLora { nb: 2, mphi: 4 };
    pub const GCSS: SchemeId = SchemeId::Gcss { g: 2 };
    pub const DCRK: SchemeId = SchemeId::DcrkCss { mc: 8 };

    /// The six schemes with their default parameters.
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Lora,
        SchemeId::DmCss,
        SchemeId::EPSK,
        SchemeId::SskIcsLora,
        SchemeId::GCSS,
        SchemeId::DCRK,
    ];

    /// Short lowercase token used in configs and CSV output.
    pub fn token(&self) -> &'static str {
        match self {
            SchemeId::Lora => "lora",
            SchemeId::DmCss => "dmcss",
            SchemeId::EpskLora { .. } => "epsk",
            SchemeId::SskIcsLora => "sskics",
            SchemeId::Gcss { .. } => "gcss",
            SchemeId::DcrkCss { .. } => "dcrk",
        }
    }

    pub fn has_detector(&self) -> bool {
        !matches!(self, SchemeId::EpskLora { .. })
    }

    pub fn validate(&self, sf: SpreadingFactor) -> Result<()> {
        let n = sf.n();
        let bad = |msg: String| Err(Error::InvalidScheme(msg));
        match *self {
            SchemeId::Gcss { g } => {
                if !g.is_power_of_two() || g >= n {
                    return bad(format!("GCSS group count {g} must be a power of two below N = {n}"));
                }
            }
            SchemeId::DcrkCss { mc } => {
                if !mc.is_power_of_two() || mc > MAX_DCRK_RATES {
                    return bad(format!("DCRK rate count {mc} must be a power of two <= {MAX_DCRK_RATES}"));
                }
                if n < 2 * mc {
                    return bad(format!("DCRK with {mc} rates needs N >= {}", 2 * mc));
                }
            }
            SchemeId::EpskLora { nb, mphi } => {
                if !nb.is_power_of_two() || nb >= n {
                    return bad(format!("ePSK sub-block count {nb} must be a power of two below N"));
                }
                if !mphi.is_power_of_two() || mphi < 2 {
                    return bad(format!("ePSK phase count {mphi} must be a power of two >= 2"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeId::Lora => write!(f, "LoRa"),
            SchemeId::DmCss => write!(f, "DM-CSS"),
            SchemeId::EpskLora { nb, mphi } => write!(f, "ePSK-LoRa({nb},{mphi})"),
            SchemeId::SskIcsLora => write!(f, "SSK-ICS-LoRa"),
            SchemeId::Gcss { g } => write!(f, "GCSS(G={g})"),
            SchemeId::DcrkCss { mc } => write!(f, "DCRK-CSS(Mc={mc})"),
        }
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "lora" => Ok(SchemeId::Lora),
            "dmcss" => Ok(SchemeId::DmCss),
            "epsk" | "epsklora" => Ok(SchemeId::EPSK),
            "sskics" | "sskicslora" => Ok(SchemeId::SskIcsLora),
            "gcss" => Ok(SchemeId::GCSS),
            "dcrk" | "dcrkcss" => Ok(SchemeId::DCRK),
            _ => Err(Error::InvalidScheme(format!("unknown scheme '{s}'"))),
        }
    }
}

/// Bits carried per symbol.
pub fn scheme_bits_per_symbol(scheme: SchemeId, sf: SpreadingFactor) -> usize {
    let l = sf.lambda() as usize;
    let log2 = |x: usize| x.trailing_zeros() as usize;
    match scheme {
        SchemeId::Lora => l,
        SchemeId::DmCss => 2 * l + 1,
        SchemeId::EpskLora { nb, mphi } => log2(sf.n() / nb) + nb * log2(mphi),
        SchemeId::SskIcsLora => l + 2,
        SchemeId::Gcss { g } => g * log2(sf.n() / g),
        SchemeId::DcrkCss { mc } => l + log2(mc),
    }
}

/// Symbol of one of the baseline schemes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineSymbol {
    Lora { k: usize },
    SskIcs { variant: SskVariant, k: usize },
    /// One bin per group; `ks[i]` lies in `[i N/G, (i+1) N/G)`.
    Gcss { ks: Vec<usize> },
    Dcrk { rate_index: usize, k: usize },
    Epsk { k: usize, phases: Vec<usize> },
}

/// The four SSK-ICS-LoRa waveform families, in bit-mapping order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SskVariant {
    Up,
    Down,
    InterleavedUp,
    InterleavedDown,
}

impl SskVariant {
    pub const ALL: [SskVariant; 4] = [
        SskVariant::Up,
        SskVariant::Down,
        SskVariant::InterleavedUp,
        SskVariant::InterleavedDown,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn slope(self) -> Slope {
        match self {
            SskVariant::Up | SskVariant::InterleavedUp => Slope::Up,
            SskVariant::Down | SskVariant::InterleavedDown => Slope::Down,
        }
    }

    pub fn interleaved(self) -> bool {
        matches!(self, SskVariant::InterleavedUp | SskVariant::InterleavedDown)
    }
}

fn range_err(field: &'static str, value: usize, reason: &'static str) -> Error {
    Error::InvalidSymbol {
        field,
        value: value as i64,
        reason,
    }
}

fn check_bin(k: usize, limit: usize) -> Result<()> {
    if k < limit {
        Ok(())
    } else {
        Err(range_err("k", k, "bin index out of range"))
    }
}

/// Chirp of the given slope shifted to bin `k`: `exp{j 2pi/N n (k +/- n)}`.
fn shifted_chirp(k: usize, slope: Slope, sf: SpreadingFactor) -> IqBuffer {
    let t = chirp_tables(sf);
    let n = sf.n();
    chirp_ref(slope, sf)
        .iter()
        .enumerate()
        .map(|(i, c)| t.roots[(k * i) % n] * c)
        .collect()
}

/// LoRa symbol `exp{j 2pi/N n (k + n)}`.
pub fn modulate_lora(k: usize, sf: SpreadingFactor) -> Result<IqBuffer> {
    check_bin(k, sf.n())?;
    Ok(shifted_chirp(k, Slope::Up, sf))
}

/// Dechirp and pick the strongest bin.
pub fn detect_lora(r: &[Complex64], sf: SpreadingFactor) -> Result<usize> {
    let spec = dechirped_spectrum(r, Slope::Up, sf)?;
    Ok(argmax_norm(&spec, 0..sf.n()).0)
}

/// Row-column block interleaver over one symbol.
///
/// Samples are written row-wise into a `2^ceil(lambda/2) x 2^floor(lambda/2)`
/// matrix and read column-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    /// `out[i] = in[perm[i]]`.
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl Interleaver {
    pub fn new(sf: SpreadingFactor) -> Self {
        let l = sf.lambda();
        let rows = 1usize << l.div_ceil(2);
        let cols = 1usize << (l / 2);
        let mut perm = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                perm.push(r * cols + c);
            }
        }
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        Self { perm, inverse }
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave(&self, x: &[Complex64]) -> Result<IqBuffer> {
        check_len(self.perm.len(), x.len())?;
        Ok(self.perm.iter().map(|&p| x[p]).collect())
    }

    pub fn deinterleave(&self, x: &[Complex64]) -> Result<IqBuffer> {
        check_len(self.inverse.len(), x.len())?;
        Ok(self.inverse.iter().map(|&p| x[p]).collect())
    }
}

static INTERLEAVERS: [OnceLock<Interleaver>; (SpreadingFactor::MAX + 1) as usize] =
    [const { OnceLock::new() }; (SpreadingFactor::MAX + 1) as usize];

pub fn interleaver(sf: SpreadingFactor) -> &'static Interleaver {
    INTERLEAVERS[sf.lambda() as usize].get_or_init(|| Interleaver::new(sf))
}

/// SSK-ICS-LoRa symbol: shifted up/down chirp, optionally interleaved.
pub fn modulate_ssk_ics(variant: SskVariant, k: usize, sf: SpreadingFactor) -> Result<IqBuffer> {
    check_bin(k, sf.n())?;
    let base = shifted_chirp(k, variant.slope(), sf);
    if variant.interleaved() {
        interleaver(sf).interleave(&base)
    } else {
        Ok(base)
    }
}

/// Non-coherent ML over all `4N` SSK-ICS waveforms.
///
/// Correlating with an interleaved candidate equals correlating the
/// deinterleaved input with the plain one, so four dechirped spectra cover
/// the whole candidate set.
pub fn detect_ssk_ics(r: &[Complex64], sf: SpreadingFactor) -> Result<(SskVariant, usize)> {
    let n = sf.n();
    check_len(n, r.len())?;
    let deint = interleaver(sf).deinterleave(r)?;
    let mut best = (SskVariant::Up, 0, f64::NEG_INFINITY);
    for v in SskVariant::ALL {
        let input: &[Complex64] = if v.interleaved() { &deint } else { r };
        let spec = dechirped_spectrum(input, v.slope(), sf)?;
        let (k, m) = argmax_norm(&spec, 0..n);
        if m > best.2 {
            best = (v, k, m);
        }
    }
    Ok((best.0, best.1))
}

/// GCSS symbol: sum of `G` up-chirped tones, one per group.
pub fn modulate_gcss(ks: &[usize], sf: SpreadingFactor) -> Result<IqBuffer> {
    let g = ks.len();
    SchemeId::Gcss { g }.validate(sf)?;
    let n = sf.n();
    let width = n / g;
    for (i, &k) in ks.iter().enumerate() {
        if !(i * width..(i + 1) * width).contains(&k) {
            return Err(range_err("k_i", k, "outside its group range"));
        }
    }
    let roots = &chirp_tables(sf).roots;
    Ok(chirp_ref(Slope::Up, sf)
        .iter()
        .enumerate()
        .map(|(t, c)| ks.iter().map(|&k| roots[(k * t) % n]).sum::<Complex64>() * c)
        .collect())
}

/// Per-group argmax of the dechirped spectrum.
pub fn detect_gcss(r: &[Complex64], g: usize, sf: SpreadingFactor) -> Result<Vec<usize>> {
    SchemeId::Gcss { g }.validate(sf)?;
    let spec = dechirped_spectrum(r, Slope::Up, sf)?;
    let width = sf.n() / g;
    Ok((0..g)
        .map(|i| argmax_norm(&spec, i * width..(i + 1) * width).0)
        .collect())
}

const MAX_DCRK_RATES: usize = 16;

/// Rate multiplier for DCRK rate index `m`.
pub fn dcrk_rate(m: usize) -> usize {
    m + 1
}

static RATE_CHIRPS: [OnceLock<Vec<IqBuffer>>; (SpreadingFactor::MAX + 1) as usize] =
    [const { OnceLock::new() }; (SpreadingFactor::MAX + 1) as usize];

/// `exp{j pi rho n^2 / N}` for `rho = dcrk_rate(m)`, `m < 16`.
fn rate_chirps(sf: SpreadingFactor) -> &'static [IqBuffer] {
    RATE_CHIRPS[sf.lambda() as usize].get_or_init(|| {
        let n = sf.n() as u64;
        (0..MAX_DCRK_RATES)
            .map(|m| {
                let rho = dcrk_rate(m) as u64;
                (0..n)
                    .map(|i| {
                        let phase = (rho * i * i) % (2 * n);
                        Complex64::from_polar(1.0, PI * phase as f64 / n as f64)
                    })
                    .collect()
            })
            .collect()
    })
}

/// DCRK-CSS symbol `exp{j pi/N n (2k + rho_m n)}`.
pub fn modulate_dcrk(k: usize, rate_index: usize, mc: usize, sf: SpreadingFactor) -> Result<IqBuffer> {
    SchemeId::DcrkCss { mc }.validate(sf)?;
    check_bin(k, sf.n())?;
    if rate_index >= mc {
        return Err(range_err("m", rate_index, "rate index must be below Mc"));
    }
    let n = sf.n();
    let roots = &chirp_tables(sf).roots;
    Ok(rate_chirps(sf)[rate_index]
        .iter()
        .enumerate()
        .map(|(t, c)| roots[(k * t) % n] * c)
        .collect())
}

/// Dechirp with every candidate rate and take the global peak.
/// Returns `(rate_index, k)`.
pub fn detect_dcrk(r: &[Complex64], mc: usize, sf: SpreadingFactor) -> Result<(usize, usize)> {
    SchemeId::DcrkCss { mc }.validate(sf)?;
    let n = sf.n();
    check_len(n, r.len())?;
    let mut best = (0, 0, f64::NEG_INFINITY);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (m, c) in rate_chirps(sf)[..mc].iter().enumerate() {
        for ((b, x), y) in buf.iter_mut().zip(r).zip(c.iter()) {
            *b = x * y.conj();
        }
        fft_in_place(&mut buf)?;
        let (k, mag) = argmax_norm(&buf, 0..n);
        if mag > best.2 {
            best = (m, k, mag);
        }
    }
    Ok((best.0, best.1))
}

/// ePSK-LoRa symbol:
/// `sum_l exp{j 2pi (k n/N + l n/Nb + p_l/Mphi + n^2/N)}`, `l = 1..=Nb`.
pub fn modulate_epsk(k: usize, phases: &[usize], mphi: usize, sf: SpreadingFactor) -> Result<IqBuffer> {
    let nb = phases.len();
    SchemeId::EpskLora { nb, mphi }.validate(sf)?;
    let n = sf.n();
    check_bin(k, n / nb)?;
    if let Some(&p) = phases.iter().find(|&&p| p >= mphi) {
        return Err(range_err("p_l", p, "phase index must be below Mphi"));
    }
    let roots = &chirp_tables(sf).roots;
    let offsets: Vec<Complex64> = phases
        .iter()
        .map(|&p| Complex64::from_polar(1.0, 2.0 * PI * p as f64 / mphi as f64))
        .collect();
    Ok(chirp_ref(Slope::Up, sf)
        .iter()
        .enumerate()
        .map(|(t, c)| {
            let sum: Complex64 = offsets
                .iter()
                .enumerate()
                .map(|(i, off)| {
                    let l = i + 1;
                    roots[((k + l * n / nb) * t) % n] * off
                })
                .sum();
            sum * c
        })
        .collect())
}
