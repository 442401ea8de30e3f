//! Synthetic participant population: fixed median abilities, volatile
//! per-epoch scores, Poisson arrivals and geometric lifetimes.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SortitionError};
use crate::rng::{SeedStreams, Stream};
use crate::types::ParticipantId;

pub const DEFAULT_MU_Q: f64 = 0.2;
pub const DEFAULT_SIGMA_Q: f64 = 0.1;
pub const DEFAULT_VOLATILITY: f64 = 0.2;
pub const DEFAULT_P_GROWTH: f64 = 1e-10;
pub const DEFAULT_P_ATTR: f64 = 1e-10;
pub const DEFAULT_N_EPOCHS: u64 = 1000;

/// Population-process parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSimConfig", into = "RawSimConfig")]
pub struct SimConfig {
    /// Mean of the median-quality distribution.
    pub mu_q: f64,
    /// Spread of the median-quality distribution.
    pub sigma_q: f64,
    /// Standard deviation of a participant's per-epoch score around its median.
    pub volatility_v: f64,
    /// Expected number of joiners per epoch.
    pub p_growth: f64,
    /// Per-epoch departure probability (geometric lifetime parameter).
    pub p_attr: f64,
    pub n_init: usize,
    pub n_epochs: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Defaults for everything except the initial pool size and seed.
    pub fn new(n_init: usize, seed: u64) -> Self {
        SimConfig {
            mu_q: DEFAULT_MU_Q,
            sigma_q: DEFAULT_SIGMA_Q,
            volatility_v: DEFAULT_VOLATILITY,
            p_growth: DEFAULT_P_GROWTH,
            p_attr: DEFAULT_P_ATTR,
            n_init,
            n_epochs: DEFAULT_N_EPOCHS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu_q.is_finite() {
            return Err(SortitionError::invalid("mu_q", "must be finite"));
        }
        if !(self.sigma_q.is_finite() && self.sigma_q > 0.0) {
            return Err(SortitionError::invalid(
                "sigma_q",
                format!("{} must be > 0", self.sigma_q),
            ));
        }
        if !(self.volatility_v.is_finite() && self.volatility_v >= 0.0) {
            return Err(SortitionError::invalid(
                "volatility_v",
                format!("{} must be >= 0", self.volatility_v),
            ));
        }
        if !(self.p_growth.is_finite() && self.p_growth >= 0.0) {
            return Err(SortitionError::invalid(
                "p_growth",
                format!("{} must be >= 0", self.p_growth),
            ));
        }
        if !(self.p_attr > 0.0 && self.p_attr < 1.0) {
            return Err(SortitionError::invalid(
                "p_attr",
                format!("{} is outside (0, 1)", self.p_attr),
            ));
        }
        if self.n_init == 0 {
            return Err(SortitionError::invalid("n_init", "must be at least 1"));
        }
        if self.n_epochs == 0 {
            return Err(SortitionError::invalid("n_epochs", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimConfig {
    #[serde(default = "d_mu_q")]
    mu_q: f64,
    #[serde(default = "d_sigma_q")]
    sigma_q: f64,
    #[serde(default = "d_volatility")]
    volatility_v: f64,
    #[serde(default = "d_p_growth")]
    p_growth: f64,
    #[serde(default = "d_p_attr")]
    p_attr: f64,
    n_init: usize,
    #[serde(default = "d_n_epochs")]
    n_epochs: u64,
    #[serde(default)]
    seed: u64,
}

fn d_mu_q() -> f64 {
    DEFAULT_MU_Q
}
fn d_sigma_q() -> f64 {
    DEFAULT_SIGMA_Q
}
fn d_volatility() -> f64 {
    DEFAULT_VOLATILITY
}
fn d_p_growth() -> f64 {
    DEFAULT_P_GROWTH
}
fn d_p_attr() -> f64 {
    DEFAULT_P_ATTR
}
fn d_n_epochs() -> u64 {
    DEFAULT_N_EPOCHS
}

impl TryFrom<RawSimConfig> for SimConfig {
    type Error = SortitionError;

    fn try_from(r: RawSimConfig) -> Result<Self> {
        let cfg = SimConfig {
            mu_q: r.mu_q,
            sigma_q: r.sigma_q,
            volatility_v: r.volatility_v,
            p_growth: r.p_growth,
            p_attr: r.p_attr,
            n_init: r.n_init,
            n_epochs: r.n_epochs,
            seed: r.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<SimConfig> for RawSimConfig {
    fn from(c: SimConfig) -> Self {
        RawSimConfig {
            mu_q: c.mu_q,
            sigma_q: c.sigma_q,
            volatility_v: c.volatility_v,
            p_growth: c.p_growth,
            p_attr: c.p_attr,
            n_init: c.n_init,
            n_epochs: c.n_epochs,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParticipant {
    pub id: ParticipantId,
    pub median_quality: f64,
    pub join_epoch: u64,
    /// Number of epochs the participant takes part in, starting at `join_epoch`.
    pub lifetime: u64,
}

impl SimParticipant {
    /// First epoch in which the participant is no longer present.
    pub fn leave_epoch(&self) -> u64 {
        self.join_epoch.saturating_add(self.lifetime)
    }
}

/// The three population substreams.
#[derive(Debug, Clone)]
pub struct PopulationRngs {
    pub medians: ChaCha8Rng,
    pub lifetimes: ChaCha8Rng,
    pub growth: ChaCha8Rng,
}

impl PopulationRngs {
    pub fn from_streams(streams: &SeedStreams) -> Self {
        PopulationRngs {
            medians: streams.stream(Stream::Medians),
            lifetimes: streams.stream(Stream::Lifetimes),
            growth: streams.stream(Stream::Growth),
        }
    }

    pub fn seeded(seed: u64) -> Self {
        Self::from_streams(&SeedStreams::new(seed))
    }
}

/// Draws `count` new participants joining at `epoch`, with ids taken from `next_id`.
pub fn spawn_participants(
    count: usize,
    cfg: &SimConfig,
    epoch: u64,
    next_id: &mut u64,
    rngs: &mut PopulationRngs,
) -> Vec<SimParticipant> {
    let medians = Normal::new(cfg.mu_q, cfg.sigma_q).expect("sigma_q validated > 0");
    let lifetimes = Geometric::new(cfg.p_attr).expect("p_attr validated in (0, 1)");
    (0..count)
        .map(|_| {
            let id = ParticipantId(*next_id);
            *next_id += 1;
            SimParticipant {
                id,
                median_quality: medians.sample(&mut rngs.medians),
                join_epoch: epoch,
                // failures before the first success, plus the success itself
                lifetime: lifetimes.sample(&mut rngs.lifetimes).saturating_add(1),
            }
        })
        .collect()
}

/// One epoch's score for `p`: a normal draw around its median quality.
pub fn draw_instantaneous<R: Rng + ?Sized>(
    p: &SimParticipant,
    cfg: &SimConfig,
    rng: &mut R,
) -> f64 {
    if cfg.volatility_v == 0.0 {
        return p.median_quality;
    }
    Normal::new(p.median_quality, cfg.volatility_v)
        .expect("volatility validated >= 0")
        .sample(rng)
}

/// Who left and who arrived during one population update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulationChange {
    pub departed: Vec<ParticipantId>,
    pub joined: Vec<ParticipantId>,
}

/// Current members plus everyone who has already left.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    cfg: SimConfig,
    members: BTreeMap<ParticipantId, SimParticipant>,
    departed: Vec<SimParticipant>,
    next_id: u64,
}

impl Population {
    /// The `n_init` founding participants, all joining at epoch 0.
    pub fn initial(cfg: &SimConfig, rngs: &mut PopulationRngs) -> Result<Self> {
        cfg.validate()?;
        let mut next_id = 0;
        let founders = spawn_participants(cfg.n_init, cfg, 0, &mut next_id, rngs);
        Ok(Population {
            cfg: *cfg,
            members: founders.into_iter().map(|p| (p.id, p)).collect(),
            departed: Vec::new(),
            next_id,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, id: ParticipantId) -> Option<&SimParticipant> {
        self.members.get(&id)
    }

    pub fn members(&self) -> impl Iterator<Item = &SimParticipant> {
        self.members.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParticipantId> + '_ {
        self.members.keys().copied()
    }

    pub fn departed(&self) -> &[SimParticipant] {
        &self.departed
    }

    /// Every participant seen so far, present or departed, in id order.
    pub fn everyone(&self) -> Vec<SimParticipant> {
        let mut all: Vec<SimParticipant> = self
            .members
            .values()
            .chain(&self.departed)
            .copied()
            .collect();
        all.sort_by_key(|p| p.id);
        all
    }

    /// Attrition then growth for `epoch`.
    ///
    /// Participants whose lifetime has run out leave whether or not they are
    /// active; a Poisson number of joiners arrives afterwards.
    pub fn advance(&mut self, epoch: u64, rngs: &mut PopulationRngs) -> PopulationChange {
        let leaving: Vec<ParticipantId> = self
            .members
            .values()
            .filter(|p| p.leave_epoch() <= epoch)
            .map(|p| p.id)
            .collect();
        for id in &leaving {
            if let Some(p) = self.members.remove(id) {
                self.departed.push(p);
            }
        }

        let arrivals = if self.cfg.p_growth > 0.0 {
            let draw: f64 = Poisson::new(self.cfg.p_growth)
                .expect("p_growth validated > 0")
                .sample(&mut rngs.growth);
            draw as usize
        } else {
            0
        };
        let joiners = spawn_participants(arrivals, &self.cfg, epoch, &mut self.next_id, rngs);
        let joined = joiners.iter().map(|p| p.id).collect();
        self.members.extend(joiners.into_iter().map(|p| (p.id, p)));

        PopulationChange {
            departed: leaving,
            joined,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;
    use rand::SeedableRng;

    fn cfg() -> SimConfig {
        SimConfig::new(8, 1)
    }

    #[test]
    fn spawn_zero() {
        let mut next = 0;
        let mut rngs = PopulationRngs::seeded(0);
        assert!(spawn_participants(0, &cfg(), 0, &mut next, &mut rngs).is_empty());
        assert_eq!(next, 0);
    }

    #[test]
    fn median_quality_moments() {
        let mut next = 0;
        let mut rngs = PopulationRngs::seeded(11);
        let ps = spawn_participants(100_000, &cfg(), 3, &mut next, &mut rngs);
        let medians: Vec<f64> = ps.iter().map(|p| p.median_quality).collect();
        let m = stats::mean(&medians).unwrap();
        let s = stats::sample_std(&medians).unwrap();
        assert!((m - 0.2).abs() < 0.001, "mean {m}");
        assert!((s - 0.1).abs() < 0.001, "std {s}");
        assert!(ps.iter().all(|p| p.join_epoch == 3 && p.lifetime >= 1));
        let ids: std::collections::BTreeSet<_> = ps.iter().map(|p| p.id).collect();
        assert_eq!(ids.len(), ps.len());
    }

    #[test]
    fn geometric_lifetime_mean() {
        let c = SimConfig {
            p_attr: 0.5,
            ..cfg()
        };
        let mut next = 0;
        let mut rngs = PopulationRngs::seeded(5);
        let ps = spawn_participants(100_000, &c, 0, &mut next, &mut rngs);
        let lt: Vec<f64> = ps.iter().map(|p| p.lifetime as f64).collect();
        let m = stats::mean(&lt).unwrap();
        // Var[G(p)] = (1 - p) / p^2 = 2
        let se = (2.0f64 / 100_000.0).sqrt();
        assert!((m - 2.0).abs() < 3.0 * se, "mean lifetime {m}");
        assert!(ps.iter().all(|p| p.lifetime >= 1));
    }

    #[test]
    fn instantaneous_draws() {
        let p = SimParticipant {
            id: ParticipantId(0),
            median_quality: 0.3,
            join_epoch: 0,
            lifetime: 10,
        };
        let still = SimConfig {
            volatility_v: 0.0,
            ..cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(draw_instantaneous(&p, &still, &mut rng), 0.3);

        let draws: Vec<f64> = (0..100_000)
            .map(|_| draw_instantaneous(&p, &cfg(), &mut rng))
            .collect();
        let m = stats::mean(&draws).unwrap();
        assert!((m - 0.3).abs() < 0.002, "mean {m}");
    }

    #[test]
    fn location_shift() {
        let a = SimParticipant {
            id: ParticipantId(0),
            median_quality: 0.1,
            join_epoch: 0,
            lifetime: 1,
        };
        let b = SimParticipant {
            median_quality: 0.35,
            ..a
        };
        for seed in 0..20 {
            let x = draw_instantaneous(&a, &cfg(), &mut ChaCha8Rng::seed_from_u64(seed));
            let y = draw_instantaneous(&b, &cfg(), &mut ChaCha8Rng::seed_from_u64(seed));
            assert!((y - x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn departures_follow_lifetime() {
        let c = SimConfig {
            p_attr: 0.3,
            p_growth: 0.5,
            n_init: 30,
            ..cfg()
        };
        let mut rngs = PopulationRngs::seeded(2);
        let mut pop = Population::initial(&c, &mut rngs).unwrap();
        let mut gone = std::collections::BTreeSet::new();
        for epoch in 1..200 {
            let before = pop.len();
            let change = pop.advance(epoch, &mut rngs);
            assert_eq!(
                pop.len(),
                before - change.departed.len() + change.joined.len()
            );
            for id in &change.departed {
                assert!(gone.insert(*id), "participant left twice");
            }
            for p in pop.members() {
                assert!(p.join_epoch <= epoch && epoch < p.leave_epoch());
                assert!(!gone.contains(&p.id));
            }
            for p in pop.departed() {
                assert!(p.leave_epoch() <= epoch);
            }
        }
    }

    #[test]
    fn negligible_rates_keep_pool_fixed() {
        let c = SimConfig::new(8, 0);
        let mut rngs = PopulationRngs::seeded(0);
        let mut pop = Population::initial(&c, &mut rngs).unwrap();
        for epoch in 1..1000 {
            let change = pop.advance(epoch, &mut rngs);
            assert!(change.departed.is_empty() && change.joined.is_empty());
        }
        assert_eq!(pop.len(), 8);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig {
            sigma_q: 0.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            p_attr: 1.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            p_attr: 0.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            p_growth: -0.1,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(SimConfig { n_init: 0, ..cfg() }.validate().is_err());
        assert!(cfg().validate().is_ok());
    }
}
