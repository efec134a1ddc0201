//! Bit-level front end over every scheme, used by the simulation harness.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    detect_dcrk, detect_gcss, detect_lora, detect_ssk_ics, modulate_dcrk, modulate_epsk, modulate_gcss,
    modulate_lora, modulate_ssk_ics, scheme_bits_per_symbol, BaselineSymbol, SchemeId, SskVariant,
};
use crate::css::{self, read_uint, write_uint, BitWord, DmCssSymbol, IqBuffer, SpreadingFactor};
use crate::detect::detect_dm_css;
use crate::error::{Error, Result};

/// A symbol of any scheme.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    DmCss(DmCssSymbol),
    Baseline(BaselineSymbol),
}

/// Scheme bound to a spreading factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modem {
    scheme: SchemeId,
    sf: SpreadingFactor,
}

fn log2(x: usize) -> usize {
    x.trailing_zeros() as usize
}

impl Modem {
    pub fn new(scheme: SchemeId, sf: SpreadingFactor) -> Result<Self> {
        scheme.validate(sf)?;
        Ok(Self { scheme, sf })
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    pub fn spreading_factor(&self) -> SpreadingFactor {
        self.sf
    }

    pub fn bits_per_symbol(&self) -> usize {
        scheme_bits_per_symbol(self.scheme, self.sf)
    }

    /// Total symbol energy `sum |s(n)|^2`; the same for every symbol of a
    /// scheme.
    pub fn symbol_energy_total(&self) -> f64 {
        let tones = match self.scheme {
            SchemeId::DmCss => 2,
            SchemeId::Gcss { g } => g,
            SchemeId::EpskLora { nb, .. } => nb,
            _ => 1,
        };
        (tones * self.sf.n()) as f64
    }

    /// Named bit ranges of the symbol word, in mapping order.
    pub fn field_layout(&self) -> Vec<(String, Range<usize>)> {
        let l = self.sf.lambda() as usize;
        let n = self.sf.n();
        let mut fields = Vec::new();
        let mut at = 0;
        let mut push = |name: String, width: usize| {
            fields.push((name, at..at + width));
            at += width;
        };
        match self.scheme {
            SchemeId::DmCss => {
                push("slope".into(), 1);
                push("k_e".into(), l - 1);
                push("k_o".into(), l - 1);
                push("alpha_e".into(), 1);
                push("alpha_o".into(), 1);
            }
            SchemeId::Lora => push("k".into(), l),
            SchemeId::SskIcsLora => {
                push("variant".into(), 2);
                push("k".into(), l);
            }
            SchemeId::Gcss { g } => {
                for i in 0..g {
                    push(format!("k_{}", i + 1), log2(n / g));
                }
            }
            SchemeId::DcrkCss { mc } => {
                push("rate".into(), log2(mc));
                push("k".into(), l);
            }
            SchemeId::EpskLora { nb, mphi } => {
                push("k".into(), log2(n / nb));
                for i in 0..nb {
                    push(format!("p_{}", i + 1), log2(mphi));
                }
            }
        }
        fields
    }

    pub fn symbol_from_bits(&self, bits: &BitWord) -> Result<Symbol> {
        let expected = self.bits_per_symbol();
        if bits.len() != expected {
            return Err(Error::BitLength {
                expected,
                got: bits.len(),
            });
        }
        if self.scheme == SchemeId::DmCss {
            return css::bits_to_symbol(bits, self.sf).map(Symbol::DmCss);
        }
        let b = bits.bits();
        let fields: Vec<usize> = self
            .field_layout()
            .into_iter()
            .map(|(_, r)| read_uint(&b[r]) as usize)
            .collect();
        let n = self.sf.n();
        let sym = match self.scheme {
            SchemeId::Lora => BaselineSymbol::Lora { k: fields[0] },
            SchemeId::SskIcsLora => BaselineSymbol::SskIcs {
                variant: SskVariant::ALL[fields[0]],
                k: fields[1],
            },
            SchemeId::Gcss { g } => BaselineSymbol::Gcss {
                ks: fields.iter().enumerate().map(|(i, v)| i * n / g + v).collect(),
            },
            SchemeId::DcrkCss { .. } => BaselineSymbol::Dcrk {
                rate_index: fields[0],
                k: fields[1],
            },
            SchemeId::EpskLora { .. } => BaselineSymbol::Epsk {
                k: fields[0],
                phases: fields[1..].to_vec(),
            },
            SchemeId::DmCss => unreachable!(),
        };
        Ok(Symbol::Baseline(sym))
    }

    pub fn bits_from_symbol(&self, sym: &Symbol) -> Result<BitWord> {
        let n = self.sf.n();
        let layout = self.field_layout();
        let values: Vec<usize> = match (self.scheme, sym) {
            (SchemeId::DmCss, Symbol::DmCss(s)) => return css::symbol_to_bits(s, self.sf),
            (SchemeId::Lora, Symbol::Baseline(BaselineSymbol::Lora { k })) => vec![*k],
            (SchemeId::SskIcsLora, Symbol::Baseline(BaselineSymbol::SskIcs { variant, k })) => {
                vec![variant.index(), *k]
            }
            (SchemeId::Gcss { g }, Symbol::Baseline(BaselineSymbol::Gcss { ks })) if ks.len() == g => {
                ks.iter().enumerate().map(|(i, k)| k.wrapping_sub(i * n / g)).collect()
            }
            (SchemeId::DcrkCss { .. }, Symbol::Baseline(BaselineSymbol::Dcrk { rate_index, k })) => {
                vec![*rate_index, *k]
            }
            (SchemeId::EpskLora { nb, .. }, Symbol::Baseline(BaselineSymbol::Epsk { k, phases }))
                if phases.len() == nb =>
            {
                std::iter::once(*k).chain(phases.iter().copied()).collect()
            }
            _ => {
                return Err(Error::InvalidScheme(format!(
                    "symbol {sym:?} does not belong to {}",
                    self.scheme
                )))
            }
        };
        let mut out = Vec::with_capacity(self.bits_per_symbol());
        for ((name, range), v) in layout.into_iter().zip(values) {
            if v >> range.len() != 0 {
                return Err(Error::InvalidSymbol {
                    field: "field",
                    value: v as i64,
                    reason: if name.starts_with('k') {
                        "bin index out of range"
                    } else {
                        "field value out of range"
                    },
                });
            }
            write_uint(&mut out, v as u64, range.len());
        }
        Ok(BitWord::new(out))
    }

    pub fn modulate(&self, sym: &Symbol) -> Result<IqBuffer> {
        let sf = self.sf;
        match (self.scheme, sym) {
            (SchemeId::DmCss, Symbol::DmCss(s)) => css::modulate(s, sf),
            (_, Symbol::Baseline(b)) => match (self.scheme, b) {
                (SchemeId::Lora, BaselineSymbol::Lora { k }) => modulate_lora(*k, sf),
                (SchemeId::SskIcsLora, BaselineSymbol::SskIcs { variant, k }) => {
                    modulate_ssk_ics(*variant, *k, sf)
                }
                (SchemeId::Gcss { .. }, BaselineSymbol::Gcss { ks }) => modulate_gcss(ks, sf),
                (SchemeId::DcrkCss { mc }, BaselineSymbol::Dcrk { rate_index, k }) => {
                    modulate_dcrk(*k, *rate_index, mc, sf)
                }
                (SchemeId::EpskLora { mphi, .. }, BaselineSymbol::Epsk { k, phases }) => {
                    modulate_epsk(*k, phases, mphi, sf)
                }
                _ => Err(self.mismatch(sym)),
            },
            _ => Err(self.mismatch(sym)),
        }
    }

    fn mismatch(&self, sym: &Symbol) -> Error {
        Error::InvalidScheme(format!("symbol {sym:?} does not belong to {}", self.scheme))
    }

    pub fn detect(&self, r: &[Complex64]) -> Result<Symbol> {
        let sf = self.sf;
        Ok(match self.scheme {
            SchemeId::DmCss => Symbol::DmCss(detect_dm_css(r, sf)?.symbol),
            SchemeId::Lora => Symbol::Baseline(BaselineSymbol::Lora {
                k: detect_lora(r, sf)?,
            }),
            SchemeId::SskIcsLora => {
                let (variant, k) = detect_ssk_ics(r, sf)?;
                Symbol::Baseline(BaselineSymbol::SskIcs { variant, k })
            }
            SchemeId::Gcss { g } => Symbol::Baseline(BaselineSymbol::Gcss {
                ks: detect_gcss(r, g, sf)?,
            }),
            SchemeId::DcrkCss { mc } => {
                let (rate_index, k) = detect_dcrk(r, mc, sf)?;
                Symbol::Baseline(BaselineSymbol::Dcrk { rate_index, k })
            }
            SchemeId::EpskLora { .. } => return Err(Error::NoDetector(self.scheme.to_string())),
        })
    }

    pub fn modulate_bits(&self, bits: &BitWord) -> Result<IqBuffer> {
        self.modulate(&self.symbol_from_bits(bits)?)
    }

    pub fn detect_bits(&self, r: &[Complex64]) -> Result<BitWord> {
        self.bits_from_symbol(&self.detect(r)?)
    }

    /// Every waveform of the scheme, indexed by the bit word's integer value.
    pub fn waveform_table(&self) -> Result<Vec<IqBuffer>> {
        let nbits = self.bits_per_symbol();
        (0..1u64 << nbits)
            .map(|v| self.modulate_bits(&BitWord::from_u64(v, nbits)))
            .collect()
    }
}
