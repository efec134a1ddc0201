//! Dual-mode CSS symbols, chirps and waveform synthesis.
//!
//! A DM-CSS symbol activates one even and one odd DFT bin, gives each a
//! binary phase (0 or pi) and spreads the resulting two-tone signal with
//! either an up-chirp or a down-chirp. All waveforms here are one symbol
//! long (`N = 2^lambda` samples) and critically sampled.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Deref, DerefMut};
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of index bits `lambda`; a symbol spans `N = 2^lambda` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpreadingFactor(u32);

impl SpreadingFactor {
    pub const MIN: u32 = 2;
    pub const MAX: u32 = 16;

    pub fn new(lambda: u32) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(Error::InvalidSpreadingFactor(lambda))
        }
    }

    pub fn lambda(self) -> u32 {
        self.0
    }

    /// Samples per symbol, which is also the number of DFT bins.
    pub fn n(self) -> usize {
        1 << self.0
    }
}

impl TryFrom<u32> for SpreadingFactor {
    type Error = Error;

    fn try_from(lambda: u32) -> Result<Self> {
        Self::new(lambda)
    }
}

impl From<SpreadingFactor> for u32 {
    fn from(sf: SpreadingFactor) -> u32 {
        sf.0
    }
}

impl fmt::Display for SpreadingFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SF{}", self.0)
    }
}

/// Chirp direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slope {
    Up,
    Down,
}

impl Slope {
    pub fn flipped(self) -> Self {
        match self {
            Slope::Up => Slope::Down,
            Slope::Down => Slope::Up,
        }
    }
}

/// Binary phase of an activated tone: `+1` for phase 0, `-1` for phase pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }

    /// Sign decision with zero mapped to `Positive`.
    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Polarity::Negative
        } else {
            Polarity::Positive
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// One DM-CSS symbol: an even bin, an odd bin, their phase signs and the
/// chirp slope.
///
/// Construction goes through [`DmCssSymbol::new`], so every value carries an
/// even `k_e` and an odd `k_o` inside `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DmCssSymbol {
    k_e: usize,
    k_o: usize,
    alpha_e: Polarity,
    alpha_o: Polarity,
    slope: Slope,
}

impl DmCssSymbol {
    pub fn new(
        sf: SpreadingFactor,
        k_e: usize,
        k_o: usize,
        alpha_e: Polarity,
        alpha_o: Polarity,
        slope: Slope,
    ) -> Result<Self> {
        let sym = Self {
            k_e,
            k_o,
            alpha_e,
            alpha_o,
            slope,
        };
        sym.validate(sf)?;
        Ok(sym)
    }

    /// Checks the bin indices against a spreading factor.
    pub fn validate(&self, sf: SpreadingFactor) -> Result<()> {
        let n = sf.n();
        if !self.k_e.is_multiple_of(2) {
            return Err(symbol_err("k_e", self.k_e, "must be even"));
        }
        if self.k_e > n - 2 {
            return Err(symbol_err("k_e", self.k_e, "must not exceed N-2"));
        }
        if self.k_o % 2 != 1 {
            return Err(symbol_err("k_o", self.k_o, "must be odd"));
        }
        if self.k_o > n - 1 {
            return Err(symbol_err("k_o", self.k_o, "must not exceed N-1"));
        }
        Ok(())
    }

    pub fn k_e(&self) -> usize {
        self.k_e
    }

    pub fn k_o(&self) -> usize {
        self.k_o
    }

    pub fn alpha_e(&self) -> Polarity {
        self.alpha_e
    }

    pub fn alpha_o(&self) -> Polarity {
        self.alpha_o
    }

    pub fn slope(&self) -> Slope {
        self.slope
    }
}

fn symbol_err(field: &'static str, value: usize, reason: &'static str) -> Error {
    Error::InvalidSymbol {
        field,
        value: value as i64,
        reason,
    }
}

/// Complex baseband samples of one symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IqBuffer(Vec<Complex64>);

impl IqBuffer {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self(samples)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.0
    }

    /// Element-wise product.
    pub fn hadamard(&self, other: &IqBuffer) -> Result<IqBuffer> {
        check_len(self.len(), other.len())?;
        Ok(self.iter().zip(other.iter()).map(|(a, b)| a * b).collect())
    }

    pub fn conj(&self) -> IqBuffer {
        self.iter().map(|x| x.conj()).collect()
    }

    pub fn scaled(&self, c: f64) -> IqBuffer {
        self.iter().map(|x| x * c).collect()
    }
}

impl Deref for IqBuffer {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for IqBuffer {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl From<Vec<Complex64>> for IqBuffer {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

impl FromIterator<Complex64> for IqBuffer {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

/// Ordered binary digits, most significant field first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord(Vec<bool>);

impl BitWord {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Self((0..len).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn to_u64(&self) -> u64 {
        read_uint(&self.0)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Positions where two words differ.
    pub fn hamming(&self, other: &BitWord) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidSymbol {
                    field: "bit",
                    value: c as i64,
                    reason: "bit words contain only '0' and '1'",
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitWord)
    }
}

pub(crate) fn read_uint(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

pub(crate) fn write_uint(out: &mut Vec<bool>, value: u64, len: usize) {
    out.extend((0..len).rev().map(|i| (value >> i) & 1 == 1));
}

/// Per-N lookup tables: the N-th roots of unity and both chirps.
pub(crate) struct ChirpTables {
    pub(crate) roots: Vec<Complex64>,
    pub(crate) up: IqBuffer,
    pub(crate) down: IqBuffer,
}

static CHIRP_TABLES: [OnceLock<ChirpTables>; (SpreadingFactor::MAX + 1) as usize] =
    [const { OnceLock::new() }; (SpreadingFactor::MAX + 1) as usize];

pub(crate) fn chirp_tables(sf: SpreadingFactor) -> &'static ChirpTables {
    CHIRP_TABLES[sf.lambda() as usize].get_or_init(|| {
        let n = sf.n();
        let roots: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
            .collect();
        // n^2 mod N keeps the phase argument exact for every N.
        let up: IqBuffer = (0..n as u64)
            .map(|i| roots[((i * i) % n as u64) as usize])
            .collect();
        let down = up.conj();
        ChirpTables { roots, up, down }
    })
}

/// Tone `exp{j 2 pi k n / N}` sample at `n`, from the root table.
#[inline]
pub(crate) fn tone_sample(roots: &[Complex64], k: usize, n: usize) -> Complex64 {
    let len = roots.len();
    roots[(k % len) * (n % len) % len]
}

/// `c_u(n) = exp{j 2 pi n^2 / N}`.
pub fn up_chirp(sf: SpreadingFactor) -> IqBuffer {
    chirp_tables(sf).up.clone()
}

/// `c_d(n) = exp{-j 2 pi n^2 / N}`.
pub fn down_chirp(sf: SpreadingFactor) -> IqBuffer {
    chirp_tables(sf).down.clone()
}

pub fn chirp(slope: Slope, sf: SpreadingFactor) -> IqBuffer {
    match slope {
        Slope::Up => up_chirp(sf),
        Slope::Down => down_chirp(sf),
    }
}

pub(crate) fn chirp_ref(slope: Slope, sf: SpreadingFactor) -> &'static IqBuffer {
    let t = chirp_tables(sf);
    match slope {
        Slope::Up => &t.up,
        Slope::Down => &t.down,
    }
}

/// Two-tone signal `f(n) = a_e exp{j2pi k_e n/N} + a_o exp{j2pi k_o n/N}`.
pub fn unchirped_symbol(sym: &DmCssSymbol, sf: SpreadingFactor) -> Result<IqBuffer> {
    sym.validate(sf)?;
    let roots = &chirp_tables(sf).roots;
    let (ae, ao) = (sym.alpha_e.sign(), sym.alpha_o.sign());
    Ok((0..sf.n())
        .map(|n| tone_sample(roots, sym.k_e, n) * ae + tone_sample(roots, sym.k_o, n) * ao)
        .collect())
}

/// Chirped DM-CSS waveform `s(n) = f(n) c(n)`.
pub fn modulate(sym: &DmCssSymbol, sf: SpreadingFactor) -> Result<IqBuffer> {
    let f = unchirped_symbol(sym, sf)?;
    f.hadamard(chirp_ref(sym.slope, sf))
}

/// Average power `(1/N) sum |s(n)|^2`.
pub fn symbol_energy(buf: &[Complex64]) -> f64 {
    if buf.is_empty() {
        return 0.0;
    }
    buf.iter().map(|x| x.norm_sqr()).sum::<f64>() / buf.len() as f64
}

/// Bits per DM-CSS symbol, `2 lambda + 1`.
pub fn dm_css_bits(sf: SpreadingFactor) -> usize {
    2 * sf.lambda() as usize + 1
}

/// Maps `2 lambda + 1` bits to a symbol.
///
/// Layout: `[slope | v_e (lambda-1) | v_o (lambda-1) | alpha_e | alpha_o]`,
/// natural binary, most significant bit first; `k_e = 2 v_e`,
/// `k_o = 2 v_o + 1`. A zero bit is `Up` / `Positive`.
pub fn bits_to_symbol(bits: &BitWord, sf: SpreadingFactor) -> Result<DmCssSymbol> {
    let expected = dm_css_bits(sf);
    if bits.len() != expected {
        return Err(Error::BitLength {
            expected,
            got: bits.len(),
        });
    }
    let b = bits.bits();
    let w = sf.lambda() as usize - 1;
    let slope = if b[0] { Slope::Down } else { Slope::Up };
    let v_e = read_uint(&b[1..1 + w]) as usize;
    let v_o = read_uint(&b[1 + w..1 + 2 * w]) as usize;
    let pol = |bit: bool| {
        if bit {
            Polarity::Negative
        } else {
            Polarity::Positive
        }
    };
    DmCssSymbol::new(
        sf,
        2 * v_e,
        2 * v_o + 1,
        pol(b[2 * w + 1]),
        pol(b[2 * w + 2]),
        slope,
    )
}

/// Inverse of [`bits_to_symbol`].
pub fn symbol_to_bits(sym: &DmCssSymbol, sf: SpreadingFactor) -> Result<BitWord> {
    sym.validate(sf)?;
    let w = sf.lambda() as usize - 1;
    let mut out = Vec::with_capacity(dm_css_bits(sf));
    out.push(sym.slope == Slope::Down);
    write_uint(&mut out, (sym.k_e / 2) as u64, w);
    write_uint(&mut out, (sym.k_o / 2) as u64, w);
    out.push(sym.alpha_e == Polarity::Negative);
    out.push(sym.alpha_o == Polarity::Negative);
    Ok(BitWord(out))
}

/// `<a, b> = sum a(n) conj(b(n))`.
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| x * y.conj()).sum())
}
