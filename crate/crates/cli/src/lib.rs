//! Experiment runner behind the `dmcss` binary.
//!
//! A run is described by a flat TOML file:
//!
//! ```toml
//! schemes = ["dmcss", "lora"]
//! lambdas = [6, 7]
//! ebn0_db = [0.0, 2.0, 4.0]
//! trials = 1000
//! seed = 7
//! rho = 0.0       # 2-tap fading weight, 0 disables
//! psi = 0.0       # phase offset in radians
//! delta_f = 0.0   # frequency offset in bins
//! target_ber = 1e-3
//! ```
//!
//! `required-snr` runs an adaptive search when `ebn0_db` is omitted.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use dmcss::channel::ChannelSpec;
use dmcss::sim::{
    required_snr_at_target, run_sweep, search_required_snr, spectral_efficiency, SearchPlan, SweepConfig,
    DEFAULT_TARGET_BER, DEFAULT_TRIALS,
};
use dmcss::{BitWord, Modem, SchemeId, SpreadingFactor, Symbol};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

/// Largest waveform table `vectors` will export per scheme and λ.
pub const MAX_VECTOR_RECORDS: u64 = 1 << 16;

#[derive(Debug, Parser)]
#[command(name = "dmcss", version, about = "DM-CSS modem experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// csv (default) or json; vectors always writes json
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Overrides the config's seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads, 0 = one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// BER/SER at each grid point
    Ber,
    /// Eb/N0 needed to reach the target BER, with spectral efficiency
    RequiredSnr,
    /// Noiseless waveforms of every symbol as JSON
    Vectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e:#}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

fn config_err(e: anyhow::Error) -> CliError {
    CliError::Config(e)
}

fn runtime_err(e: anyhow::Error) -> CliError {
    CliError::Runtime(e)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schemes: Vec<String>,
    lambdas: Vec<u32>,
    #[serde(default)]
    ebn0_db: Option<Vec<f64>>,
    #[serde(default)]
    trials: Option<u64>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    rho: f64,
    #[serde(default)]
    psi: f64,
    #[serde(default)]
    delta_f: f64,
    #[serde(default)]
    target_ber: Option<f64>,
}

/// A validated experiment: one sweep per (scheme, λ) pair.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub schemes: Vec<SchemeId>,
    pub lambdas: Vec<SpreadingFactor>,
    pub ebn0_db: Option<Vec<f64>>,
    pub trials: u64,
    pub seed: u64,
    pub channel: ChannelSpec,
    pub target_ber: f64,
}

impl ExperimentConfig {
    pub fn parse(text: &str, command: Command) -> anyhow::Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("parsing config")?;
        if raw.schemes.is_empty() {
            bail!("`schemes` is empty");
        }
        if raw.lambdas.is_empty() {
            bail!("`lambdas` is empty");
        }
        let schemes = raw
            .schemes
            .iter()
            .map(|s| s.parse::<SchemeId>().map_err(|e| anyhow!(e)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let lambdas = raw
            .lambdas
            .iter()
            .map(|&l| SpreadingFactor::new(l).map_err(|e| anyhow!(e)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let mut channel = ChannelSpec::awgn(0.0)
            .with_phase_offset(raw.psi)
            .with_freq_offset(raw.delta_f);
        if raw.rho != 0.0 {
            channel = channel.with_fading(raw.rho);
        }
        let cfg = Self {
            schemes,
            lambdas,
            ebn0_db: raw.ebn0_db,
            trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
            seed: raw.seed,
            channel,
            target_ber: raw.target_ber.unwrap_or(DEFAULT_TARGET_BER),
        };
        cfg.check(command)?;
        Ok(cfg)
    }

    fn check(&self, command: Command) -> anyhow::Result<()> {
        for sweep in self.sweeps() {
            let (scheme, sf) = (sweep.scheme, sweep.sf);
            match command {
                Command::Vectors => {
                    let m = Modem::new(scheme, sf).with_context(|| format!("{scheme} at {sf}"))?;
                    if 1u64 << m.bits_per_symbol() > MAX_VECTOR_RECORDS {
                        bail!("{scheme} at {sf} has 2^{} symbols, more than vectors exports", m.bits_per_symbol());
                    }
                }
                Command::Ber => {
                    if self.ebn0_db.is_none() {
                        bail!("`ebn0_db` is required for ber");
                    }
                    sweep.validate().with_context(|| format!("{scheme} at {sf}"))?;
                }
                Command::RequiredSnr => match self.ebn0_db {
                    Some(_) => sweep.validate(),
                    None => sweep.validate_setup(),
                }
                .with_context(|| format!("{scheme} at {sf}"))?,
            }
        }
        Ok(())
    }

    pub fn sweeps(&self) -> impl Iterator<Item = SweepConfig> + '_ {
        self.schemes.iter().flat_map(move |&scheme| {
            self.lambdas.iter().map(move |&sf| {
                SweepConfig::new(scheme, sf, self.channel)
                    .with_grid(self.ebn0_db.clone().unwrap_or_default())
                    .with_trials(self.trials)
                    .with_seed(self.seed)
                    .with_target(self.target_ber)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRow {
    pub scheme: String,
    pub lambda: u32,
    pub rho: f64,
    pub psi: f64,
    pub delta_f: f64,
    pub ebn0_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ser: f64,
    pub seed: u64,
}

pub fn ber_rows(cfg: &ExperimentConfig) -> anyhow::Result<Vec<BerRow>> {
    let mut rows = Vec::new();
    for sweep in cfg.sweeps() {
        for p in run_sweep(&sweep).with_context(|| format!("{} at {}", sweep.scheme, sweep.sf))? {
            rows.push(BerRow {
                scheme: sweep.scheme.token().into(),
                lambda: sweep.sf.lambda(),
                rho: sweep.channel.rho,
                psi: sweep.channel.psi,
                delta_f: sweep.channel.delta_f,
                ebn0_db: p.ebn0_db,
                trials: p.trials,
                bit_errors: p.bit_errors,
                ber: p.ber,
                ser: p.ser,
                seed: sweep.master_seed,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequiredSnrRow {
    pub scheme: String,
    pub lambda: u32,
    /// exact, as `bits/N`
    pub se_rational: String,
    pub se: f64,
    /// empty when the target was not bracketed
    pub required_ebn0_db: Option<f64>,
    pub status: String,
}

pub const STATUS_OK: &str = "ok";
pub const STATUS_UNBRACKETED: &str = "unbracketed";

pub fn required_snr_rows(cfg: &ExperimentConfig) -> anyhow::Result<Vec<RequiredSnrRow>> {
    let mut rows = Vec::new();
    for sweep in cfg.sweeps() {
        let found = match &cfg.ebn0_db {
            Some(_) => {
                let points = run_sweep(&sweep)?;
                required_snr_at_target(&points, sweep.target_ber)
            }
            None => search_required_snr(&sweep, &SearchPlan::default()).map(|s| s.result),
        };
        let required = match found {
            Ok(r) => Some(r.ebn0_db_at_target),
            Err(dmcss::Error::NoBracket { .. }) => None,
            Err(e) => return Err(e).with_context(|| format!("{} at {}", sweep.scheme, sweep.sf)),
        };
        let se = spectral_efficiency(sweep.scheme, sweep.sf);
        rows.push(RequiredSnrRow {
            scheme: sweep.scheme.token().into(),
            lambda: sweep.sf.lambda(),
            se_rational: format!("{}/{}", se.numer(), se.denom()),
            se: *se.numer() as f64 / *se.denom() as f64,
            required_ebn0_db: required,
            status: if required.is_some() { STATUS_OK } else { STATUS_UNBRACKETED }.into(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
pub struct VectorRecord {
    pub scheme: String,
    pub lambda: u32,
    pub word: String,
    pub symbol: Symbol,
    /// interleaved re, im pairs
    pub samples: Box<RawValue>,
}

/// Formats samples with 17 significant digits so every f64 reads back exactly.
fn samples_json(samples: &[num_complex::Complex64]) -> anyhow::Result<Box<RawValue>> {
    let body: Vec<String> = samples
        .iter()
        .flat_map(|c| [c.re, c.im])
        .map(|x| format!("{x:.16e}"))
        .collect();
    Ok(RawValue::from_string(format!("[{}]", body.join(",")))?)
}

pub fn vector_records(cfg: &ExperimentConfig) -> anyhow::Result<Vec<VectorRecord>> {
    let mut out = Vec::new();
    for &scheme in &cfg.schemes {
        for &sf in &cfg.lambdas {
            let m = Modem::new(scheme, sf)?;
            let nbits = m.bits_per_symbol();
            for v in 0..1u64 << nbits {
                let word = BitWord::from_u64(v, nbits);
                let symbol = m.symbol_from_bits(&word)?;
                let tx = m.modulate(&symbol)?;
                out.push(VectorRecord {
                    scheme: scheme.token().into(),
                    lambda: sf.lambda(),
                    word: word.to_string(),
                    symbol,
                    samples: samples_json(&tx)?,
                });
            }
        }
    }
    Ok(out)
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(rows)?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            Ok(w.into_inner()?)
        }
    }
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)
        .with_context(|| format!("writing {}", tmp.path().display()))?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| config_err(anyhow!("--config <path> is required")))?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(config_err)?;
    let mut cfg = ExperimentConfig::parse(&text, cli.command).map_err(config_err)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.command == Command::Vectors && cli.format == Some(Format::Csv) {
        return Err(config_err(anyhow!("vectors only writes JSON")));
    }
    let format = cli.format.unwrap_or(Format::Csv);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("starting worker pool")
        .map_err(runtime_err)?;
    let bytes = pool
        .install(|| match cli.command {
            Command::Ber => render(&ber_rows(&cfg)?, format),
            Command::RequiredSnr => render(&required_snr_rows(&cfg)?, format),
            Command::Vectors => render(&vector_records(&cfg)?, Format::Json),
        })
        .map_err(runtime_err)?;
    match &cli.out {
        Some(p) => write_atomic(p, &bytes).map_err(runtime_err),
        None => std::io::stdout()
            .write_all(&bytes)
            .context("writing stdout")
            .map_err(runtime_err),
    }
}
