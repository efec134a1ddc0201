//! Dual-mode chirp spread spectrum (DM-CSS) modem.
//!
//! DM-CSS activates one even and one odd DFT bin per symbol, puts a binary
//! phase on each and chirps the result up or down, carrying `2 lambda + 1`
//! bits where LoRa carries `lambda`. The crate provides:
//!
//! * [`css`]: symbol types, chirps, waveform synthesis and bit mapping,
//! * [`spectral`]: radix-2 FFT and a direct DFT oracle,
//! * [`detect`]: the non-coherent DM-CSS detector and a correlation receiver,
//! * [`baselines`]: LoRa, SSK-ICS-LoRa, GCSS, DCRK-CSS and ePSK-LoRa,
//! * [`channel`]: fading, phase/frequency offsets and calibrated AWGN,
//! * [`sim`]: reproducible Monte Carlo BER sweeps and spectral efficiency.

pub mod baselines;
pub mod channel;
pub mod css;
pub mod detect;
pub mod error;
pub mod modem;
pub mod sim;
pub mod spectral;

pub use baselines::{BaselineSymbol, SchemeId, SskVariant};
pub use channel::ChannelSpec;
pub use css::{BitWord, DmCssSymbol, IqBuffer, Polarity, Slope, SpreadingFactor};
pub use detect::DetectionResult;
pub use error::{Error, Result};
pub use modem::{Modem, Symbol};
pub use num_complex::Complex64;
pub use sim::{BerPoint, RequiredSnrResult, SweepConfig};
pub use spectral::SpectrumBuffer;
