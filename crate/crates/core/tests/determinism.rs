use dmcss::channel::ChannelSpec;
use dmcss::sim::{run_ber_point, run_sweep, SweepConfig};
use dmcss::{SchemeId, SpreadingFactor};

fn cfg(scheme: SchemeId) -> SweepConfig {
    let channel = ChannelSpec::awgn(0.0).with_phase_offset(0.2).with_freq_offset(0.05).with_fading(0.1);
    SweepConfig::new(scheme, SpreadingFactor::new(7).unwrap(), channel)
        .with_grid(vec![1.0, 3.0, 5.0])
        .with_trials(3000)
        .with_seed(42)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_worker_count() {
    for scheme in [SchemeId::DmCss, SchemeId::Lora, SchemeId::SskIcsLora, SchemeId::GCSS, SchemeId::DCRK] {
        let c = cfg(scheme);
        let one = in_pool(1, || run_sweep(&c).unwrap());
        let four = in_pool(4, || run_sweep(&c).unwrap());
        assert_eq!(one, four, "{scheme}");
    }
}

#[test]
fn points_are_keyed_by_value_not_position() {
    let c = cfg(SchemeId::DmCss);
    let sweep = run_sweep(&c).unwrap();
    let alone = run_ber_point(&c, 3.0).unwrap();
    assert_eq!(sweep[1], alone);
    let other_seed = run_ber_point(&c.clone().with_seed(43), 3.0).unwrap();
    assert_ne!(alone.position_errors, other_seed.position_errors);
}

#[test]
fn field_errors_partition_bit_errors() {
    let c = cfg(SchemeId::DmCss);
    let modem = dmcss::Modem::new(c.scheme, c.sf).unwrap();
    let p = run_ber_point(&c, 1.0).unwrap();
    let fields = p.field_errors(&modem);
    let names: Vec<&str> = fields.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["slope", "k_e", "k_o", "alpha_e", "alpha_o"]);
    assert_eq!(fields.iter().map(|(_, e)| e).sum::<u64>(), p.bit_errors);
    assert_eq!(p.position_errors.len(), p.bits_per_symbol);
}
