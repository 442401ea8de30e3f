//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sortition_core::{
    EpochContributions, ParticipantId, ParticipantState, SortitionParams, SystemState,
};

/// `n` participants with history and random EMAs, the first `n_act` active.
pub fn fixture(
    n: usize,
    n_act: usize,
    seed: u64,
) -> (SystemState, EpochContributions, SortitionParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let participants: Vec<ParticipantState> = (0..n as u64)
        .map(|i| ParticipantState::with_history(ParticipantId(i), rng.random::<f64>()))
        .collect();
    let active = (0..n_act as u64).map(ParticipantId).collect();
    let state = SystemState::from_parts(0, participants, active).expect("valid fixture");
    let contributions = EpochContributions::with_scores(
        0,
        (0..n_act as u64).map(|i| (ParticipantId(i), rng.random::<f64>())),
    );
    let params = SortitionParams::new(0.1, 20.0, 2.0, n_act).expect("valid params");
    (state, contributions, params)
}
