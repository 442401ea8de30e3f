//! Bundled scenario configurations.

use crate::experiments::{ScenarioConfig, SelectionMode};
use crate::population::SimConfig;
use crate::types::{SortitionParams, DEFAULT_ALPHA, DEFAULT_LAMBDA_PEN};

pub const GROWTH_RATE: f64 = 0.1;
pub const ATTRITION_RATE: f64 = 2e-3;
/// Active-set size used by the growing, shrinking and evolving pools.
pub const EVOLVING_N_ACT: usize = 25;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> ScenarioConfig,
}

impl Preset {
    pub fn config(&self) -> ScenarioConfig {
        (self.build)()
    }
}

fn scenario(label: &str, sim: SimConfig, percentile_p: f64, n_act: usize) -> ScenarioConfig {
    ScenarioConfig {
        label: label.to_string(),
        sim,
        sortition: SortitionParams::new(DEFAULT_ALPHA, percentile_p, DEFAULT_LAMBDA_PEN, n_act)
            .expect("preset parameters are in range"),
        mode: SelectionMode::Merit,
    }
}

pub fn small_pool() -> ScenarioConfig {
    scenario("small-pool", SimConfig::new(8, 1), 20.0, 5)
}

pub fn large_pool() -> ScenarioConfig {
    scenario("large-pool", SimConfig::new(80, 1), 20.0, 50)
}

pub fn growing_pool() -> ScenarioConfig {
    let sim = SimConfig {
        p_growth: GROWTH_RATE,
        ..SimConfig::new(8, 1)
    };
    scenario("growing-pool", sim, 20.0, EVOLVING_N_ACT)
}

pub fn shrinking_pool() -> ScenarioConfig {
    let sim = SimConfig {
        p_attr: ATTRITION_RATE,
        ..SimConfig::new(100, 1)
    };
    scenario("shrinking-pool", sim, 20.0, EVOLVING_N_ACT)
}

pub fn evolving_pool() -> ScenarioConfig {
    let sim = SimConfig {
        p_growth: GROWTH_RATE,
        p_attr: ATTRITION_RATE,
        ..SimConfig::new(100, 1)
    };
    scenario("evolving-pool", sim, 20.0, EVOLVING_N_ACT)
}

/// Base configuration of the percentile sweep; the percentile is overridden
/// at every grid point.
pub fn percentile_sweep() -> ScenarioConfig {
    ScenarioConfig {
        label: "percentile-sweep".to_string(),
        ..evolving_pool()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "small-pool",
        summary: "8 participants, 5 active, P=20%, fixed pool",
        build: small_pool,
    },
    Preset {
        name: "large-pool",
        summary: "80 participants, 50 active, P=20%, fixed pool",
        build: large_pool,
    },
    Preset {
        name: "growing-pool",
        summary: "8 initial participants, ~0.1 joiners per epoch, no attrition",
        build: growing_pool,
    },
    Preset {
        name: "shrinking-pool",
        summary: "100 initial participants, 2e-3 attrition, no growth",
        build: shrinking_pool,
    },
    Preset {
        name: "evolving-pool",
        summary: "100 initial participants, 0.1 growth and 2e-3 attrition",
        build: evolving_pool,
    },
    Preset {
        name: "percentile-sweep",
        summary: "evolving pool, base for the sweep over P",
        build: percentile_sweep,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
