//! The merit-based sortition engine.
//!
//! Every epoch the engine turns the scores of the current active set into a
//! target for each participant, folds those targets into the participants'
//! exponential moving averages and ranks the averages to pick the next active
//! set:
//!
//! * contributors are pulled toward their own score,
//! * active participants that failed to contribute are pulled toward the
//!   lowest score minus `lambda_pen` population standard deviations,
//! * inactive participants are pulled toward the `percentile_p`-th percentile
//!   of the scores, which is what makes the boundary between both sets
//!   permeable.
//!
//! All functions are pure over explicit state. Randomness (tie-breaks and
//! filling seats from participants without history) comes from a caller-owned
//! stream.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::Rng;

use crate::error::{Result, SortitionError};
use crate::stats;
use crate::types::{EpochContributions, ParticipantId, SortitionParams, SystemState};

/// One EMA step: `alpha * target + (1 - alpha) * prev`.
///
/// The result always lies between `prev` and `target`.
pub fn ema_update(prev: f64, target: f64, alpha: f64) -> Result<f64> {
    if !prev.is_finite() || !target.is_finite() || !alpha.is_finite() {
        return Err(SortitionError::NonFinite {
            context: "EMA update",
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(SortitionError::invalid(
            "alpha",
            format!("{alpha} is outside (0, 1]"),
        ));
    }
    let next = alpha * target + (1.0 - alpha) * prev;
    // rounding can land one ulp outside the endpoints
    let (lo, hi) = if prev <= target {
        (prev, target)
    } else {
        (target, prev)
    };
    Ok(next.clamp(lo, hi))
}

/// Target of an active participant that produced no score this epoch.
pub fn absence_target(scores: &[f64], lambda_pen: f64) -> Result<f64> {
    let min = scores
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or(SortitionError::EmptySample)?;
    let sigma = stats::population_std(scores).ok_or(SortitionError::EmptySample)?;
    Ok(min - lambda_pen * sigma)
}

/// Targets for every participant in `state`.
pub fn compute_targets(
    state: &SystemState,
    contributions: &EpochContributions,
    params: &SortitionParams,
) -> Result<BTreeMap<ParticipantId, f64>> {
    if contributions.is_empty() {
        return Err(SortitionError::NoContributions {
            epoch: contributions.epoch,
        });
    }
    for (&id, score) in &contributions.scores {
        if !state.is_active(id) {
            return Err(SortitionError::InactiveContributor(id));
        }
        if !score.is_finite() {
            return Err(SortitionError::NonFinite {
                context: "contributed score",
            });
        }
    }

    let scores: Vec<f64> = contributions.scores.values().copied().collect();
    let inactive_target = stats::percentile(&scores, params.percentile_p())?;
    let absent_target = absence_target(&scores, params.lambda_pen())?;

    let targets = state
        .participants()
        .map(|p| {
            let target = match contributions.scores.get(&p.id) {
                Some(&score) => score,
                None if state.is_active(p.id) => absent_target,
                None => inactive_target,
            };
            (p.id, target)
        })
        .collect();
    Ok(targets)
}

/// Folds `targets` into every participant's EMA.
///
/// A participant without history adopts its first target as-is.
pub fn apply_targets(
    state: &SystemState,
    targets: &BTreeMap<ParticipantId, f64>,
    params: &SortitionParams,
) -> Result<SystemState> {
    if let Some(extra) = targets.keys().find(|id| !state.contains(**id)) {
        return Err(SortitionError::UnknownParticipant(*extra));
    }
    let mut next = state.clone();
    for p in state.participants() {
        let target = *targets
            .get(&p.id)
            .ok_or(SortitionError::MissingTarget(p.id))?;
        let slot = next
            .participant_mut(p.id)
            .expect("participant cloned from the same state");
        if p.has_history {
            slot.ema_quality = ema_update(p.ema_quality, target, params.alpha())?;
        } else {
            if !target.is_finite() {
                return Err(SortitionError::NonFinite { context: "target" });
            }
            slot.ema_quality = target;
            slot.has_history = true;
        }
    }
    Ok(next)
}

/// Picks the active set: top `n_act` participants by EMA.
///
/// Exact ties straddling the cut are resolved by a uniform random subset of
/// the tied group. Seats left over once every participant with history is in
/// are filled uniformly at random from participants without history.
pub fn select_active<R: Rng + ?Sized>(
    state: &SystemState,
    params: &SortitionParams,
    rng: &mut R,
) -> Result<BTreeSet<ParticipantId>> {
    if state.is_empty() {
        return Err(SortitionError::EmptyState);
    }
    let n_act = params.n_act();

    let mut ranked: Vec<(ParticipantId, f64)> = state
        .participants()
        .filter(|p| p.has_history)
        .map(|p| (p.id, p.ema_quality))
        .collect();
    let fresh: Vec<ParticipantId> = state
        .participants()
        .filter(|p| !p.has_history)
        .map(|p| p.id)
        .collect();

    // Descending by EMA; id order inside a tie keeps the draw reproducible.
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut selected = BTreeSet::new();
    if ranked.len() <= n_act {
        selected.extend(ranked.iter().map(|(id, _)| *id));
        let shortfall = (n_act - ranked.len()).min(fresh.len());
        for i in index::sample(rng, fresh.len(), shortfall) {
            selected.insert(fresh[i]);
        }
        return Ok(selected);
    }

    let cut = ranked[n_act - 1].1;
    let above = ranked.iter().take_while(|(_, q)| *q > cut).count();
    let tied: Vec<ParticipantId> = ranked[above..]
        .iter()
        .take_while(|(_, q)| *q == cut)
        .map(|(id, _)| *id)
        .collect();
    selected.extend(ranked[..above].iter().map(|(id, _)| *id));
    let seats = n_act - above;
    if seats == tied.len() {
        selected.extend(tied);
    } else {
        for i in index::sample(rng, tied.len(), seats) {
            selected.insert(tied[i]);
        }
    }
    Ok(selected)
}

/// Advances the state by one epoch: targets, EMA update, then selection of
/// the active set for the following epoch.
pub fn step<R: Rng + ?Sized>(
    state: &SystemState,
    contributions: &EpochContributions,
    params: &SortitionParams,
    rng: &mut R,
) -> Result<SystemState> {
    if contributions.epoch != state.epoch() {
        return Err(SortitionError::EpochMismatch {
            expected: state.epoch(),
            got: contributions.epoch,
        });
    }
    let targets = compute_targets(state, contributions, params)?;
    let mut next = apply_targets(state, &targets, params)?;
    let active = select_active(&next, params, rng)?;
    next.set_active_set(active)?;
    next.advance_epoch();
    Ok(next)
}

/// Initial state: every participant starts without history, and the first
/// active set is a uniform random draw.
pub fn initial_state<R, I>(ids: I, params: &SortitionParams, rng: &mut R) -> Result<SystemState>
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = ParticipantId>,
{
    let mut state = SystemState::with_participants(0, ids)?;
    if !state.is_empty() {
        let active = select_active(&state, params, rng)?;
        state.set_active_set(active)?;
    }
    Ok(state)
}
