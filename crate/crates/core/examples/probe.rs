//! Times one BER point per scheme at lambda = 9.
//!
//! cargo run --release -p dmcss --example probe -- [trials]

use std::time::Instant;

use dmcss::sim::run_ber_point;
use dmcss::{ChannelSpec, SchemeId, SpreadingFactor, SweepConfig};

fn main() {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let sf = SpreadingFactor::new(9).unwrap();
    for scheme in SchemeId::ALL.into_iter().filter(|s| s.has_detector()) {
        let cfg = SweepConfig::new(scheme, sf, ChannelSpec::default()).with_trials(trials).with_seed(1);
        let t = Instant::now();
        let p = run_ber_point(&cfg, 3.5).unwrap();
        println!(
            "{:<18} ber {:.3e} ser {:.3e}  {:.2} us/trial",
            scheme.to_string(),
            p.ber,
            p.ser,
            t.elapsed().as_secs_f64() * 1e6 / trials as f64
        );
    }
}
