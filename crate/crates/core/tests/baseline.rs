use sortition_core::experiments::{
    run_scenario_traced, seed_range, ScenarioConfig, SelectionMode, Trace,
};
use sortition_core::{presets, stats};

fn short(cfg: ScenarioConfig, epochs: u64) -> ScenarioConfig {
    let mut cfg = cfg.with_mode(SelectionMode::Random);
    cfg.sim.n_epochs = epochs;
    cfg
}

#[test]
fn random_mode_seats_everyone_equally_often() {
    let cfg = short(presets::small_pool(), 200);
    let expected = cfg.sortition.n_act() as f64 / cfg.sim.n_init as f64;
    let runs: Vec<_> = seed_range(0, 60)
        .into_iter()
        .map(|s| run_scenario_traced(&cfg.with_seed(s), Trace::Means).unwrap())
        .collect();
    for id in runs[0].activity_fraction.keys() {
        let fractions: Vec<f64> = runs.iter().map(|r| r.activity_fraction[id]).collect();
        let mean = stats::mean(&fractions).unwrap();
        let se = stats::sample_std(&fractions).unwrap() / (fractions.len() as f64).sqrt();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "{id}: {mean} vs {expected} (se {se})"
        );
    }
}

#[test]
fn merit_beats_random_on_a_fixed_pool() {
    for seed in 0..5 {
        let random = run_scenario_traced(
            &short(presets::large_pool(), 300).with_seed(seed),
            Trace::Means,
        )
        .unwrap();
        let merit = run_scenario_traced(
            &short(presets::large_pool(), 300)
                .with_seed(seed)
                .with_mode(SelectionMode::Merit),
            Trace::Means,
        )
        .unwrap();
        assert!(
            merit.time_avg_mean_t > random.time_avg_mean_t,
            "seed {seed}"
        );
    }
}

#[test]
fn full_and_means_traces_agree_on_means() {
    let cfg = short(presets::evolving_pool(), 150).with_mode(SelectionMode::Merit);
    let full = run_scenario_traced(&cfg, Trace::Full).unwrap();
    let means = run_scenario_traced(&cfg, Trace::Means).unwrap();
    assert_eq!(full.mean_series(), means.mean_series());
    assert_eq!(full.population_series(), means.population_series());
    assert!(means
        .epoch_records
        .iter()
        .all(|r| r.per_participant_ema.is_empty()));
}
