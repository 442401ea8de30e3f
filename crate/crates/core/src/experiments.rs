//! Scenario runner: drives the population simulator and the engine through a
//! full run, in merit mode or with a uniformly random active set, and reduces
//! runs to the comparison statistics (activity/quality correlation, z-score,
//! percentile sweep).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine;
use crate::error::{Result, SortitionError};
use crate::population::{draw_instantaneous, Population, PopulationRngs, SimConfig};
use crate::rng::{SeedStreams, Stream};
use crate::stats;
use crate::types::{EpochContributions, ParticipantId, SortitionParams, SystemState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Active set chosen by the sortition engine.
    Merit,
    /// Active set redrawn uniformly at random every epoch.
    Random,
}

impl SelectionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionMode::Merit => "merit",
            SelectionMode::Random => "random",
        }
    }
}

impl std::fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub label: String,
    pub sim: SimConfig,
    pub sortition: SortitionParams,
    pub mode: SelectionMode,
}

impl ScenarioConfig {
    pub fn with_mode(&self, mode: SelectionMode) -> Self {
        ScenarioConfig {
            mode,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut cfg = self.clone();
        cfg.sim.seed = seed;
        cfg
    }
}

/// How much per-epoch detail a run keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trace {
    /// Active sets and every participant's EMA, each epoch.
    Full,
    /// Only the scalar per-epoch series.
    Means,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: u64,
    /// Participants present during the epoch.
    pub population: usize,
    pub n_active: usize,
    /// Empty under [`Trace::Means`].
    pub active_ids: BTreeSet<ParticipantId>,
    /// EMAs after this epoch's update. Empty under [`Trace::Means`].
    pub per_participant_ema: BTreeMap<ParticipantId, f64>,
    /// Mean score over this epoch's contributors; `None` if nobody was present.
    pub mean_t_active: Option<f64>,
    /// `mean_t_active` smoothed with the engine's alpha, for plotting.
    pub display_ema_mean_t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipantSummary {
    pub id: ParticipantId,
    pub median_quality: f64,
    pub join_epoch: u64,
    pub lifetime: u64,
    /// Epoch at which the participant left, if it left before the run ended.
    pub leave_epoch: Option<u64>,
    pub active_epochs: u64,
    pub activity_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub mode: SelectionMode,
    pub seed: u64,
    pub n_epochs: u64,
    pub activity_fraction: BTreeMap<ParticipantId, f64>,
    pub median_quality: BTreeMap<ParticipantId, f64>,
    /// Every participant that was ever present, in id order.
    pub participants: Vec<ParticipantSummary>,
    /// Mean over epochs of the unsmoothed per-epoch mean score.
    pub time_avg_mean_t: f64,
    pub epoch_records: Vec<EpochRecord>,
}

impl RunSummary {
    pub fn mean_series(&self) -> Vec<Option<f64>> {
        self.epoch_records.iter().map(|r| r.mean_t_active).collect()
    }

    pub fn population_series(&self) -> Vec<usize> {
        self.epoch_records.iter().map(|r| r.population).collect()
    }

    pub fn final_population(&self) -> usize {
        self.epoch_records.last().map_or(0, |r| r.population)
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunSummary> {
    run_scenario_traced(cfg, Trace::Full)
}

/// Uniform random subset of `min(n_act, N)` participants.
pub fn random_active_set<R: Rng + ?Sized>(
    state: &SystemState,
    n_act: usize,
    rng: &mut R,
) -> BTreeSet<ParticipantId> {
    let ids: Vec<ParticipantId> = state.participants().map(|p| p.id).collect();
    let k = n_act.min(ids.len());
    index::sample(rng, ids.len(), k)
        .into_iter()
        .map(|i| ids[i])
        .collect()
}

pub fn run_scenario_traced(cfg: &ScenarioConfig, trace: Trace) -> Result<RunSummary> {
    cfg.sim.validate()?;
    let params = cfg.sortition;
    let streams = SeedStreams::new(cfg.sim.seed);
    let mut pop_rngs = PopulationRngs::from_streams(&streams);
    let mut selection_rng = streams.stream(Stream::Selection);
    let mut baseline_rng = streams.stream(Stream::Baseline);

    let mut population = Population::initial(&cfg.sim, &mut pop_rngs)?;
    let mut state = SystemState::with_participants(0, population.ids())?;
    let mut active_epochs: BTreeMap<ParticipantId, u64> = BTreeMap::new();
    let mut records = Vec::with_capacity(cfg.sim.n_epochs as usize);
    let mut display: Option<f64> = None;

    for epoch in 0..cfg.sim.n_epochs {
        if epoch > 0 {
            let change = population.advance(epoch, &mut pop_rngs);
            for id in &change.departed {
                state.remove_participant(*id);
            }
            for id in &change.joined {
                state.insert_participant(*id)?;
            }
        }

        if !state.is_empty() {
            match cfg.mode {
                // Vacancies wait for the next selection unless the whole
                // active set is gone (also covers the opening draw).
                SelectionMode::Merit if state.active_set().is_empty() => {
                    let active = engine::select_active(&state, &params, &mut selection_rng)?;
                    state.set_active_set(active)?;
                }
                SelectionMode::Merit => {}
                SelectionMode::Random => {
                    let active = random_active_set(&state, params.n_act(), &mut baseline_rng);
                    state.set_active_set(active)?;
                }
            }
        }

        let active_now = state.active_set().clone();
        let mut contributions = EpochContributions::new(epoch);
        for &id in &active_now {
            let member = population
                .get(id)
                .expect("engine and population agree on membership");
            let score = draw_instantaneous(member, &cfg.sim, &mut streams.score_rng(id, epoch));
            contributions.insert(id, score);
            *active_epochs.entry(id).or_insert(0) += 1;
        }
        let scores: Vec<f64> = contributions.scores.values().copied().collect();
        let mean_t = stats::mean(&scores);

        if contributions.is_empty() {
            state.advance_epoch();
        } else {
            state = match cfg.mode {
                SelectionMode::Merit => {
                    engine::step(&state, &contributions, &params, &mut selection_rng)?
                }
                SelectionMode::Random => {
                    let targets = engine::compute_targets(&state, &contributions, &params)?;
                    let mut next = engine::apply_targets(&state, &targets, &params)?;
                    next.advance_epoch();
                    next
                }
            };
        }

        if let Some(m) = mean_t {
            display = Some(match display {
                Some(prev) => engine::ema_update(prev, m, params.alpha())?,
                None => m,
            });
        }

        let (active_ids, per_participant_ema) = match trace {
            Trace::Full => (
                active_now.clone(),
                state
                    .participants()
                    .filter(|p| p.has_history)
                    .map(|p| (p.id, p.ema_quality))
                    .collect(),
            ),
            Trace::Means => (BTreeSet::new(), BTreeMap::new()),
        };
        records.push(EpochRecord {
            epoch,
            population: population.len(),
            n_active: active_now.len(),
            active_ids,
            per_participant_ema,
            mean_t_active: mean_t,
            display_ema_mean_t: display,
        });
    }

    let present: Vec<f64> = records.iter().filter_map(|r| r.mean_t_active).collect();
    let time_avg_mean_t = stats::mean(&present)
        .ok_or_else(|| SortitionError::Degenerate("no epoch had an active participant".into()))?;

    let n_epochs = cfg.sim.n_epochs;
    let participants: Vec<ParticipantSummary> = population
        .everyone()
        .into_iter()
        .map(|p| {
            let active = active_epochs.get(&p.id).copied().unwrap_or(0);
            let leave = p.leave_epoch();
            ParticipantSummary {
                id: p.id,
                median_quality: p.median_quality,
                join_epoch: p.join_epoch,
                lifetime: p.lifetime,
                leave_epoch: (leave < n_epochs).then_some(leave),
                active_epochs: active,
                activity_fraction: active as f64 / n_epochs as f64,
            }
        })
        .collect();

    Ok(RunSummary {
        label: cfg.label.clone(),
        mode: cfg.mode,
        seed: cfg.sim.seed,
        n_epochs,
        activity_fraction: participants
            .iter()
            .map(|p| (p.id, p.activity_fraction))
            .collect(),
        median_quality: participants
            .iter()
            .map(|p| (p.id, p.median_quality))
            .collect(),
        participants,
        time_avg_mean_t,
        epoch_records: records,
    })
}

/// Merit run and its random baseline over the same population realization.
pub fn run_paired(cfg: &ScenarioConfig, trace: Trace) -> Result<(RunSummary, RunSummary)> {
    let merit_cfg = cfg.with_mode(SelectionMode::Merit);
    let random_cfg = cfg.with_mode(SelectionMode::Random);
    let (merit, random) = rayon::join(
        || run_scenario_traced(&merit_cfg, trace),
        || run_scenario_traced(&random_cfg, trace),
    );
    Ok((merit?, random?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub coefficient: f64,
    /// True when one of the variables has no spread and the coefficient was
    /// set to 0.
    pub degenerate: bool,
}

/// Spearman correlation between median quality and activity fraction over
/// every participant that was ever present.
pub fn activity_quality_correlation(summary: &RunSummary) -> Result<Correlation> {
    if summary.participants.len() < 3 {
        return Err(SortitionError::Degenerate(format!(
            "correlation needs at least 3 participants, run has {}",
            summary.participants.len()
        )));
    }
    let quality: Vec<f64> = summary
        .participants
        .iter()
        .map(|p| p.median_quality)
        .collect();
    let activity: Vec<f64> = summary
        .participants
        .iter()
        .map(|p| p.activity_fraction)
        .collect();
    Ok(match stats::spearman(&quality, &activity) {
        Some(coefficient) => Correlation {
            coefficient,
            degenerate: false,
        },
        None => Correlation {
            coefficient: 0.0,
            degenerate: true,
        },
    })
}

/// Gap between the time-averaged mean scores of both runs, in units of the
/// across-epoch standard deviation of the random run's per-epoch mean score.
pub fn z_score(merit: &RunSummary, random: &RunSummary) -> Result<f64> {
    if merit.epoch_records.len() != random.epoch_records.len() {
        return Err(SortitionError::EpochCountMismatch {
            merit: merit.epoch_records.len(),
            random: random.epoch_records.len(),
        });
    }
    let gap = (merit.time_avg_mean_t - random.time_avg_mean_t).abs();
    if gap == 0.0 {
        return Ok(0.0);
    }
    let series: Vec<f64> = random
        .epoch_records
        .iter()
        .filter_map(|r| r.mean_t_active)
        .collect();
    let spread = stats::population_std(&series)
        .ok_or_else(|| SortitionError::Degenerate("random run has no scored epoch".into()))?;
    Ok(gap / spread)
}

/// `n_points` percentiles evenly spaced over `(0, 100]`.
pub fn sweep_grid(n_points: usize) -> Vec<f64> {
    (1..=n_points)
        .map(|k| 100.0 * k as f64 / n_points as f64)
        .collect()
}

/// `count` consecutive seeds starting at `master`.
pub fn seed_range(master: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| master.wrapping_add(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSeedResult {
    pub seed: u64,
    pub mean_merit: f64,
    pub mean_random: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub percentile_p: f64,
    /// Seed averages of the per-seed columns.
    pub mean_merit: f64,
    pub mean_random: f64,
    pub z: f64,
    pub per_seed: Vec<SweepSeedResult>,
}

pub fn percentile_sweep(base: &ScenarioConfig, n_points: usize) -> Result<Vec<SweepPoint>> {
    percentile_sweep_seeds(base, n_points, &[base.sim.seed])
}

/// Paired merit/random runs at every grid percentile and every seed.
///
/// Runs execute in parallel; results come back ordered by percentile, then
/// seed, so the output does not depend on scheduling.
pub fn percentile_sweep_seeds(
    base: &ScenarioConfig,
    n_points: usize,
    seeds: &[u64],
) -> Result<Vec<SweepPoint>> {
    if n_points == 0 || seeds.is_empty() {
        return Err(SortitionError::invalid(
            "sweep",
            "needs at least one point and one seed",
        ));
    }
    let grid = sweep_grid(n_points);
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();

    let results: Vec<SweepSeedResult> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let mut cfg = base.with_seed(seed);
            cfg.sortition = base.sortition.with_percentile(grid[i])?;
            let merit = run_scenario_traced(&cfg.with_mode(SelectionMode::Merit), Trace::Means)?;
            let random = run_scenario_traced(&cfg.with_mode(SelectionMode::Random), Trace::Means)?;
            Ok(SweepSeedResult {
                seed,
                mean_merit: merit.time_avg_mean_t,
                mean_random: random.time_avg_mean_t,
                z: z_score(&merit, &random)?,
            })
        })
        .collect::<Result<_>>()?;

    Ok(grid
        .iter()
        .zip(results.chunks(seeds.len()))
        .map(|(&p, per_seed)| {
            let avg = |f: fn(&SweepSeedResult) -> f64| {
                per_seed.iter().map(f).sum::<f64>() / per_seed.len() as f64
            };
            SweepPoint {
                percentile_p: p,
                mean_merit: avg(|r| r.mean_merit),
                mean_random: avg(|r| r.mean_random),
                z: avg(|r| r.z),
                per_seed: per_seed.to_vec(),
            }
        })
        .collect())
}
