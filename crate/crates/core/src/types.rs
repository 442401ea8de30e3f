//! Domain types shared by the engine, the population simulator and the
//! experiment runner.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SortitionError};

/// Stable participant identifier.
///
/// The ordering exists only to make iteration deterministic. It never carries
/// merit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParticipantId(pub u64);

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for ParticipantId {
    fn from(id: u64) -> Self {
        ParticipantId(id)
    }
}

/// Knobs of the sortition engine.
///
/// * `alpha` is the EMA smoothing factor, in `(0, 1]`.
/// * `percentile_p` is the promotion/relegation percentile in percent, in `(0, 100]`.
///   It sets the target handed to every inactive participant.
/// * `lambda_pen` multiplies the score spread subtracted from absent active
///   participants.
/// * `n_act` is the size of the active set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSortitionParams", into = "RawSortitionParams")]
pub struct SortitionParams {
    alpha: f64,
    percentile_p: f64,
    lambda_pen: f64,
    n_act: usize,
}

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_LAMBDA_PEN: f64 = 2.0;

impl SortitionParams {
    pub fn new(alpha: f64, percentile_p: f64, lambda_pen: f64, n_act: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
            return Err(SortitionError::invalid(
                "alpha",
                format!("{alpha} is outside (0, 1]"),
            ));
        }
        if !(percentile_p.is_finite() && percentile_p > 0.0 && percentile_p <= 100.0) {
            return Err(SortitionError::invalid(
                "percentile_p",
                format!("{percentile_p} is outside (0, 100]"),
            ));
        }
        if !(lambda_pen.is_finite() && lambda_pen >= 0.0) {
            return Err(SortitionError::invalid(
                "lambda_pen",
                format!("{lambda_pen} must be a finite value >= 0"),
            ));
        }
        if n_act == 0 {
            return Err(SortitionError::invalid("n_act", "must be at least 1"));
        }
        Ok(SortitionParams {
            alpha,
            percentile_p,
            lambda_pen,
            n_act,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn percentile_p(&self) -> f64 {
        self.percentile_p
    }

    pub fn lambda_pen(&self) -> f64 {
        self.lambda_pen
    }

    pub fn n_act(&self) -> usize {
        self.n_act
    }

    /// Copy with a different percentile, as used by the percentile sweep.
    pub fn with_percentile(&self, percentile_p: f64) -> Result<Self> {
        Self::new(self.alpha, percentile_p, self.lambda_pen, self.n_act)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSortitionParams {
    #[serde(default = "default_alpha")]
    alpha: f64,
    percentile_p: f64,
    #[serde(default = "default_lambda_pen")]
    lambda_pen: f64,
    n_act: usize,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_lambda_pen() -> f64 {
    DEFAULT_LAMBDA_PEN
}

impl TryFrom<RawSortitionParams> for SortitionParams {
    type Error = SortitionError;

    fn try_from(raw: RawSortitionParams) -> Result<Self> {
        SortitionParams::new(raw.alpha, raw.percentile_p, raw.lambda_pen, raw.n_act)
    }
}

impl From<SortitionParams> for RawSortitionParams {
    fn from(p: SortitionParams) -> Self {
        RawSortitionParams {
            alpha: p.alpha,
            percentile_p: p.percentile_p,
            lambda_pen: p.lambda_pen,
            n_act: p.n_act,
        }
    }
}

/// One participant as the engine sees it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipantState {
    pub id: ParticipantId,
    /// Smoothed quality. Meaningless while `has_history` is false.
    pub ema_quality: f64,
    pub has_history: bool,
}

impl ParticipantState {
    pub fn fresh(id: ParticipantId) -> Self {
        ParticipantState {
            id,
            ema_quality: 0.0,
            has_history: false,
        }
    }

    pub fn with_history(id: ParticipantId, ema_quality: f64) -> Self {
        ParticipantState {
            id,
            ema_quality,
            has_history: true,
        }
    }
}

/// Instantaneous scores reported by (a subset of) the active set in one epoch.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpochContributions {
    pub epoch: u64,
    pub scores: BTreeMap<ParticipantId, f64>,
}

impl EpochContributions {
    pub fn new(epoch: u64) -> Self {
        EpochContributions {
            epoch,
            scores: BTreeMap::new(),
        }
    }

    pub fn with_scores<I>(epoch: u64, scores: I) -> Self
    where
        I: IntoIterator<Item = (ParticipantId, f64)>,
    {
        EpochContributions {
            epoch,
            scores: scores.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, id: ParticipantId, score: f64) {
        self.scores.insert(id, score);
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }
}

/// Full engine state at the start of an epoch.
///
/// After every selection the active set holds `min(n_act, participants)`
/// members. Participants removed between selections leave vacancies that the
/// next selection fills.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SystemState {
    epoch: u64,
    participants: BTreeMap<ParticipantId, ParticipantState>,
    active_set: BTreeSet<ParticipantId>,
}

impl SystemState {
    /// State with the given participants, none of them with history and none active.
    pub fn with_participants<I>(epoch: u64, ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = ParticipantId>,
    {
        let mut state = SystemState {
            epoch,
            ..Default::default()
        };
        for id in ids {
            state.insert_participant(id)?;
        }
        Ok(state)
    }

    /// Assemble a state from explicit parts, validating its invariants.
    pub fn from_parts<I>(
        epoch: u64,
        participants: I,
        active_set: BTreeSet<ParticipantId>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = ParticipantState>,
    {
        let mut map = BTreeMap::new();
        for p in participants {
            if p.has_history && !p.ema_quality.is_finite() {
                return Err(SortitionError::NonFinite {
                    context: "participant EMA",
                });
            }
            if map.insert(p.id, p).is_some() {
                return Err(SortitionError::DuplicateParticipant(p.id));
            }
        }
        let mut state = SystemState {
            epoch,
            participants: map,
            active_set: BTreeSet::new(),
        };
        state.set_active_set(active_set)?;
        Ok(state)
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn len(&self) -> usize {
        self.participants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.participants.is_empty()
    }

    pub fn participants(&self) -> impl Iterator<Item = &ParticipantState> {
        self.participants.values()
    }

    pub fn participant(&self, id: ParticipantId) -> Option<&ParticipantState> {
        self.participants.get(&id)
    }

    pub fn contains(&self, id: ParticipantId) -> bool {
        self.participants.contains_key(&id)
    }

    pub fn active_set(&self) -> &BTreeSet<ParticipantId> {
        &self.active_set
    }

    pub fn is_active(&self, id: ParticipantId) -> bool {
        self.active_set.contains(&id)
    }

    pub fn inactive_ids(&self) -> impl Iterator<Item = ParticipantId> + '_ {
        self.participants
            .keys()
            .copied()
            .filter(move |id| !self.active_set.contains(id))
    }

    /// Adds a participant without history. It starts in the inactive set.
    pub fn insert_participant(&mut self, id: ParticipantId) -> Result<()> {
        if self.participants.contains_key(&id) {
            return Err(SortitionError::DuplicateParticipant(id));
        }
        self.participants.insert(id, ParticipantState::fresh(id));
        Ok(())
    }

    /// Removes a participant, vacating its active seat if it held one.
    pub fn remove_participant(&mut self, id: ParticipantId) -> Option<ParticipantState> {
        self.active_set.remove(&id);
        self.participants.remove(&id)
    }

    pub fn set_active_set(&mut self, active_set: BTreeSet<ParticipantId>) -> Result<()> {
        if let Some(unknown) = active_set
            .iter()
            .find(|id| !self.participants.contains_key(id))
        {
            return Err(SortitionError::UnknownParticipant(*unknown));
        }
        self.active_set = active_set;
        Ok(())
    }

    pub(crate) fn participant_mut(&mut self, id: ParticipantId) -> Option<&mut ParticipantState> {
        self.participants.get_mut(&id)
    }

    /// Moves to the next epoch without touching any participant.
    pub fn advance_epoch(&mut self) {
        self.epoch += 1;
    }
}
