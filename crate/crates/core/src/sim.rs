//! Monte Carlo BER harness.
//!
//! Every trial draws its bits and noise from its own ChaCha stream keyed by
//! `(master_seed, Eb/N0, trial index)`, so results do not depend on how
//! trials are split across threads.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::baselines::{scheme_bits_per_symbol, SchemeId};
use crate::channel::{add_awgn, sigma_for_ebn0, ChannelSpec};
use crate::css::{BitWord, SpreadingFactor};
use crate::error::{Error, Result};
use crate::modem::Modem;

pub const DEFAULT_TARGET_BER: f64 = 1e-3;
pub const DEFAULT_TRIALS: u64 = 200_000;

const CHUNK: u64 = 512;

/// One BER experiment: a scheme over a channel and an Eb/N0 grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scheme: SchemeId,
    pub sf: SpreadingFactor,
    /// Impairments; its `ebn0_db` is replaced by each grid value.
    pub channel: ChannelSpec,
    pub ebn0_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub target_ber: f64,
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn new(scheme: SchemeId, sf: SpreadingFactor, channel: ChannelSpec) -> Self {
        Self {
            scheme,
            sf,
            channel,
            ebn0_grid: Vec::new(),
            trials_per_point: DEFAULT_TRIALS,
            target_ber: DEFAULT_TARGET_BER,
            master_seed: 0,
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.ebn0_grid = grid;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials_per_point = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_target(mut self, target_ber: f64) -> Self {
        self.target_ber = target_ber;
        self
    }

    /// Checks everything except the Eb/N0 grid.
    pub fn validate_setup(&self) -> Result<()> {
        if self.trials_per_point == 0 {
            return Err(Error::InvalidSweep("trials_per_point must be at least 1".into()));
        }
        if !(self.target_ber > 0.0 && self.target_ber < 1.0) {
            return Err(Error::InvalidSweep(format!(
                "target BER {} must lie in (0, 1)",
                self.target_ber
            )));
        }
        if !self.scheme.has_detector() {
            return Err(Error::NoDetector(self.scheme.to_string()));
        }
        self.scheme.validate(self.sf)?;
        self.channel.validate()
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_setup()?;
        if self.ebn0_grid.is_empty() {
            return Err(Error::InvalidSweep("Eb/N0 grid is empty".into()));
        }
        if self.ebn0_grid.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidSweep("Eb/N0 grid contains NaN".into()));
        }
        if self.ebn0_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSweep("Eb/N0 grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Measured error counts at one Eb/N0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub bits_per_symbol: usize,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub ber: f64,
    pub ser: f64,
    /// Error count per bit position of the symbol word.
    pub position_errors: Vec<u64>,
}

impl BerPoint {
    /// Error counts summed over each named field of the symbol word.
    pub fn field_errors(&self, modem: &Modem) -> Vec<(String, u64)> {
        modem
            .field_layout()
            .into_iter()
            .map(|(name, r)| (name, self.position_errors[r].iter().sum()))
            .collect()
    }
}

/// Eb/N0 where a BER curve crosses the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequiredSnrResult {
    pub ebn0_db_at_target: f64,
    /// `(Eb/N0, BER)` at or above the target.
    pub lower: (f64, f64),
    /// `(Eb/N0, BER)` at or below the target.
    pub upper: (f64, f64),
    pub note: String,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    bit_errors: u64,
    symbol_errors: u64,
    position_errors: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.bit_errors += other.bit_errors;
        self.symbol_errors += other.symbol_errors;
        if self.position_errors.len() < other.position_errors.len() {
            self.position_errors.resize(other.position_errors.len(), 0);
        }
        for (a, b) in self.position_errors.iter_mut().zip(other.position_errors) {
            *a += b;
        }
        self
    }
}

/// Random stream for one trial.
pub fn trial_rng(master_seed: u64, ebn0_db: f64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&ebn0_db.to_bits().to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..].copy_from_slice(b"dmcss-mc");
    ChaCha8Rng::from_seed(key)
}

struct TrialContext {
    modem: Modem,
    channel: ChannelSpec,
    sigma2: f64,
    nbits: usize,
    seed: u64,
    ebn0_db: f64,
}

impl TrialContext {
    fn run_range(&self, start: u64, end: u64) -> Result<Tally> {
        let mut tally = Tally {
            position_errors: vec![0; self.nbits],
            ..Tally::default()
        };
        let mask = if self.nbits == 64 { u64::MAX } else { (1u64 << self.nbits) - 1 };
        for trial in start..end {
            let mut rng = trial_rng(self.seed, self.ebn0_db, trial);
            let word = BitWord::from_u64(rng.random::<u64>() & mask, self.nbits);
            let tx = self.modem.modulate_bits(&word)?;
            let mut rx = self.channel.distort(&tx)?;
            add_awgn(&mut rx, self.sigma2, &mut rng);
            let decided = self.modem.detect_bits(&rx)?;
            let mut any = false;
            for (i, (a, b)) in word.bits().iter().zip(decided.bits()).enumerate() {
                if a != b {
                    tally.position_errors[i] += 1;
                    tally.bit_errors += 1;
                    any = true;
                }
            }
            tally.symbol_errors += any as u64;
        }
        Ok(tally)
    }
}

fn run_point(cfg: &SweepConfig, ebn0_db: f64) -> Result<BerPoint> {
    cfg.validate_setup()?;
    let modem = Modem::new(cfg.scheme, cfg.sf)?;
    let channel = cfg.channel.with_ebn0_db(ebn0_db);
    channel.validate()?;
    let nbits = modem.bits_per_symbol();
    let ctx = TrialContext {
        modem,
        channel,
        sigma2: sigma_for_ebn0(ebn0_db, modem.symbol_energy_total(), nbits)?,
        nbits,
        seed: cfg.master_seed,
        ebn0_db,
    };
    let trials = cfg.trials_per_point;
    let ranges: Vec<(u64, u64)> = (0..trials.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .collect();

    #[cfg(feature = "parallel")]
    let tallies: Vec<Tally> = ranges
        .par_iter()
        .map(|&(a, b)| ctx.run_range(a, b))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let tallies: Vec<Tally> = ranges
        .iter()
        .map(|&(a, b)| ctx.run_range(a, b))
        .collect::<Result<_>>()?;

    let total = tallies.into_iter().fold(Tally::default(), Tally::merge);
    Ok(BerPoint {
        ebn0_db,
        trials,
        bits_per_symbol: nbits,
        bit_errors: total.bit_errors,
        symbol_errors: total.symbol_errors,
        ber: total.bit_errors as f64 / (trials as f64 * nbits as f64),
        ser: total.symbol_errors as f64 / trials as f64,
        position_errors: total.position_errors,
    })
}

/// Runs `cfg.trials_per_point` trials at one Eb/N0.
pub fn run_ber_point(cfg: &SweepConfig, ebn0_db: f64) -> Result<BerPoint> {
    run_point(cfg, ebn0_db)
}

/// Runs every grid point in order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<BerPoint>> {
    cfg.validate()?;
    cfg.ebn0_grid.iter().map(|&e| run_point(cfg, e)).collect()
}

/// Interpolates the Eb/N0 at `target_ber`, linear in dB and in log10(BER),
/// between the first pair of points that straddles the target.
pub fn required_snr_at_target(points: &[BerPoint], target_ber: f64) -> Result<RequiredSnrResult> {
    let no_bracket = Error::NoBracket { target: target_ber };
    if let Some(p) = points.iter().find(|p| p.ber == target_ber) {
        return Ok(RequiredSnrResult {
            ebn0_db_at_target: p.ebn0_db,
            lower: (p.ebn0_db, p.ber),
            upper: (p.ebn0_db, p.ber),
            note: "exact grid hit".into(),
        });
    }
    let pair = points
        .windows(2)
        .find(|w| w[0].ber > target_ber && w[1].ber < target_ber)
        .ok_or(no_bracket.clone())?;
    let (a, b) = (&pair[0], &pair[1]);
    if b.ber <= 0.0 {
        // log interpolation needs a nonzero upper point; more trials needed
        return Err(no_bracket);
    }
    let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target_ber.log10());
    let x = a.ebn0_db + (lt - la) / (lb - la) * (b.ebn0_db - a.ebn0_db);
    Ok(RequiredSnrResult {
        ebn0_db_at_target: x,
        lower: (a.ebn0_db, a.ber),
        upper: (b.ebn0_db, b.ber),
        note: "log-linear interpolation".into(),
    })
}

/// Bits per symbol over `N`, in bits/s/Hz.
pub fn spectral_efficiency(scheme: SchemeId, sf: SpreadingFactor) -> Ratio<u64> {
    Ratio::new(scheme_bits_per_symbol(scheme, sf) as u64, sf.n() as u64)
}

/// SE gain over LoRa at the same spreading factor, in bits/s/Hz.
pub fn se_increase_over_lora(scheme: SchemeId, sf: SpreadingFactor) -> Ratio<i64> {
    let extra = scheme_bits_per_symbol(scheme, sf) as i64 - sf.lambda() as i64;
    Ratio::new(extra, sf.n() as i64)
}

/// SE gain over LoRa as a percentage of LoRa's SE.
pub fn se_increase_percent(scheme: SchemeId, sf: SpreadingFactor) -> f64 {
    let r = se_increase_over_lora(scheme, sf) / Ratio::from_integer(sf.lambda() as i64)
        * Ratio::from_integer(sf.n() as i64);
    100.0 * *r.numer() as f64 / *r.denom() as f64
}

/// Outcome of [`search_required_snr`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrSearch {
    pub result: RequiredSnrResult,
    pub coarse: Vec<BerPoint>,
    pub fine: Vec<BerPoint>,
}

/// Parameters for [`search_required_snr`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchPlan {
    pub start_db: f64,
    pub coarse_step_db: f64,
    pub coarse_trials: u64,
    pub fine_step_db: f64,
    pub max_db: f64,
}

impl Default for SearchPlan {
    fn default() -> Self {
        Self {
            start_db: 0.0,
            coarse_step_db: 1.0,
            coarse_trials: 10_000,
            fine_step_db: 0.25,
            max_db: 30.0,
        }
    }
}

/// Two-stage search for the Eb/N0 at `cfg.target_ber`.
///
/// A coarse walk with few trials locates the crossing; then points on a
/// `fine_step_db` lattice around it are run with `cfg.trials_per_point`
/// trials and interpolated. Lattice points are shared between curves, so
/// two configurations compared at the same lattice values see the same
/// bits and noise.
pub fn search_required_snr(cfg: &SweepConfig, plan: &SearchPlan) -> Result<SnrSearch> {
    cfg.validate_setup()?;
    let target = cfg.target_ber;
    let coarse_cfg = SweepConfig {
        trials_per_point: plan.coarse_trials,
        ..cfg.clone()
    };
    let mut coarse: Vec<BerPoint> = Vec::new();
    let mut x = plan.start_db;
    // walk down until the first point is above the target
    loop {
        let p = run_point(&coarse_cfg, x)?;
        let above = p.ber > target;
        coarse.insert(0, p);
        if above {
            break;
        }
        x -= plan.coarse_step_db;
        if x < plan.start_db - 30.0 {
            return Err(Error::NoBracket { target });
        }
    }
    x = coarse.last().map(|p| p.ebn0_db).unwrap_or(plan.start_db);
    while coarse.last().map(|p| p.ber > target).unwrap_or(true) {
        x += plan.coarse_step_db;
        if x > plan.max_db {
            return Err(Error::NoBracket { target });
        }
        coarse.push(run_point(&coarse_cfg, x)?);
    }
    let pair = coarse
        .windows(2)
        .find(|w| w[0].ber > target && w[1].ber <= target)
        .ok_or(Error::NoBracket { target })?;
    let (a, b) = (&pair[0], &pair[1]);
    let estimate = if b.ber > 0.0 {
        let (la, lb) = (a.ber.log10(), b.ber.log10());
        a.ebn0_db + (target.log10() - la) / (lb - la) * (b.ebn0_db - a.ebn0_db)
    } else {
        0.5 * (a.ebn0_db + b.ebn0_db)
    };

    let step = plan.fine_step_db;
    let lattice = |i: i64| (i as f64 * step * 1e6).round() / 1e6;
    let base = (estimate / step).floor() as i64;
    let mut lo = base - 1;
    let mut hi = base + 2;
    let mut fine: Vec<BerPoint> = (lo..=hi)
        .map(|i| run_point(cfg, lattice(i)))
        .collect::<Result<_>>()?;
    loop {
        match required_snr_at_target(&fine, target) {
            Ok(result) => return Ok(SnrSearch { result, coarse, fine }),
            Err(_) => {
                if fine[0].ber <= target {
                    lo -= 1;
                    fine.insert(0, run_point(cfg, lattice(lo))?);
                } else {
                    hi += 1;
                    if lattice(hi) > plan.max_db {
                        return Err(Error::NoBracket { target });
                    }
                    fine.push(run_point(cfg, lattice(hi))?);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(l: u32) -> SpreadingFactor {
        SpreadingFactor::new(l).unwrap()
    }

    fn point(ebn0_db: f64, ber: f64) -> BerPoint {
        BerPoint {
            ebn0_db,
            trials: 1,
            bits_per_symbol: 1,
            bit_errors: 0,
            symbol_errors: 0,
            ber,
            ser: 0.0,
            position_errors: vec![],
        }
    }

    #[test]
    fn interpolation_examples() {
        let r = required_snr_at_target(&[point(4.0, 1e-2), point(6.0, 1e-4)], 1e-3).unwrap();
        assert!((r.ebn0_db_at_target - 5.0).abs() < 1e-12);
        assert_eq!(r.lower, (4.0, 1e-2));
        let r = required_snr_at_target(&[point(4.0, 1e-2), point(5.0, 1e-3), point(6.0, 1e-4)], 1e-3)
            .unwrap();
        assert_eq!(r.ebn0_db_at_target, 5.0);
        assert!(matches!(
            required_snr_at_target(&[point(4.0, 1e-2), point(6.0, 2e-3)], 1e-3),
            Err(Error::NoBracket { .. })
        ));
        assert!(required_snr_at_target(&[point(4.0, 1e-2), point(6.0, 0.0)], 1e-3).is_err());
    }

    #[test]
    fn noiseless_points_are_error_free() {
        for scheme in [SchemeId::DmCss, SchemeId::Lora, SchemeId::SskIcsLora, SchemeId::GCSS, SchemeId::DCRK] {
            let cfg = SweepConfig::new(scheme, sf(6), ChannelSpec::default())
                .with_trials(1000)
                .with_seed(3);
            let p = run_ber_point(&cfg, f64::INFINITY).unwrap();
            assert_eq!((p.bit_errors, p.symbol_errors, p.ber), (0, 0, 0.0), "{scheme}");
        }
    }

    #[test]
    fn epsk_rejected() {
        let cfg = SweepConfig::new(SchemeId::EPSK, sf(6), ChannelSpec::default()).with_grid(vec![1.0]);
        assert!(matches!(run_sweep(&cfg), Err(Error::NoDetector(_))));
    }

    #[test]
    fn sweep_validation() {
        let base = SweepConfig::new(SchemeId::DmCss, sf(6), ChannelSpec::default()).with_trials(10);
        assert!(run_sweep(&base).is_err());
        assert!(run_sweep(&base.clone().with_grid(vec![1.0, 1.0])).is_err());
        assert!(run_sweep(&base.clone().with_grid(vec![1.0]).with_trials(0)).is_err());
        assert!(run_sweep(&base.clone().with_grid(vec![1.0]).with_target(1.0)).is_err());
        let pts = run_sweep(&base.with_grid(vec![0.0, 1.0, 2.0])).unwrap();
        assert_eq!(pts.iter().map(|p| p.ebn0_db).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn accounting_invariants() {
        let cfg = SweepConfig::new(SchemeId::DmCss, sf(5), ChannelSpec::default())
            .with_trials(3000)
            .with_seed(17);
        let p = run_ber_point(&cfg, 0.0).unwrap();
        assert!(p.bit_errors <= p.trials * p.bits_per_symbol as u64);
        assert!(p.symbol_errors <= p.trials && p.symbol_errors > 0);
        assert_eq!(p.position_errors.iter().sum::<u64>(), p.bit_errors);
        assert!(p.symbol_errors <= p.bit_errors);
        assert!((p.ber - p.bit_errors as f64 / (3000.0 * 11.0)).abs() < 1e-15);
    }

    #[test]
    fn trial_streams_differ() {
        let a: u64 = trial_rng(1, 2.0, 0).random();
        let b: u64 = trial_rng(1, 2.0, 1).random();
        let c: u64 = trial_rng(1, 2.5, 0).random();
        let d: u64 = trial_rng(2, 2.0, 0).random();
        assert!(a != b && a != c && a != d);
        assert_eq!(a, trial_rng(1, 2.0, 0).random::<u64>());
    }

    #[test]
    fn se_values() {
        assert_eq!(spectral_efficiency(SchemeId::DmCss, sf(6)), Ratio::new(13, 64));
        assert!((se_increase_percent(SchemeId::DmCss, sf(6)) - 116.666_666).abs() < 1e-4);
        assert!((se_increase_percent(SchemeId::DmCss, sf(12)) - 108.333_333).abs() < 1e-4);
        assert_eq!(se_increase_over_lora(SchemeId::GCSS, sf(8)), Ratio::new(6, 256));
    }
}
