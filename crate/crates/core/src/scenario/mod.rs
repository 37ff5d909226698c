//! Synthetic population and event-stream generation.
//!
//! Each run owns one generator seeded from the run's stream seed. Benign
//! traffic draws per-user spending and channel habits; adversarial traffic
//! arrives as Bernoulli-marked events (so attack counts stay binomial) and
//! is organized into campaigns: an active campaign pins the scenario, the
//! victim account, the device and the locale, and successive attack draws
//! continue it until its planned length is exhausted. Campaign reuse is
//! what concentrates trust damage on compromised entities, mirroring
//! credential reuse, laundering chains, and call bursts.

pub mod dataset;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnomalySignals, Channel, EntityId, Event, ScenarioKind, Transaction};
use crate::trust::clip;
use crate::Score;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("population needs at least one user and one device")]
    EmptyPopulation,
    #[error("need at least as many devices as users ({devices} devices for {users} users)")]
    TooFewDevices { users: u32, devices: u32 },
    #[error("attack probability must lie in [0, 1]")]
    BadAttackProbability,
    #[error("scenario mix must be non-negative and sum to 1")]
    BadScenarioMix,
    #[error("beta shape parameters must be positive")]
    BadBetaShape,
    #[error("generator config invalid: {0}")]
    BadConfig(String),
}

/// Shape pair of a Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    pub alpha: Score,
    pub beta: Score,
}

impl BetaShape {
    pub fn new(alpha: Score, beta: Score) -> Self {
        Self { alpha, beta }
    }

    pub fn mean(&self) -> Score {
        self.alpha / (self.alpha + self.beta)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Score {
        Beta::new(self.alpha, self.beta).expect("validated shape").sample(rng)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if self.alpha > 0.0 && self.beta > 0.0 {
            Ok(())
        } else {
            Err(ScenarioError::BadBetaShape)
        }
    }
}

/// Per-scenario anomaly shapes: the primary signal channel is drawn from
/// `primary`, the two off-channels from `secondary`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioAnomaly {
    pub primary: BetaShape,
    pub secondary: BetaShape,
}

/// Full generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_users: u32,
    pub n_devices: u32,
    pub n_events: u64,
    pub attack_probability: Score,
    pub base_seed: u64,
    /// Probability of each simulated scenario, conditional on an attack.
    pub scenario_mix: Vec<(ScenarioKind, Score)>,
    /// Service zones with criticality weights, indexed by service id.
    pub service_zones: Vec<(String, Score)>,
    pub n_regions: u16,
    /// Home regions are drawn below this bound; the rest are foreign.
    pub n_domestic_regions: u16,
    /// Must match the policy's loss-normalization cap; laundering chains
    /// stay below a tenth of it.
    pub amount_cap: Score,
    /// Median and log-sigma of the benign amount model.
    pub benign_amount_median: Score,
    pub benign_amount_sigma: Score,
    pub benign_anomaly: BetaShape,
    pub attack_anomaly: ScenarioAnomaly,
    /// Money-laundering events use a moderate accumulating signal instead
    /// of the hot attack shape.
    pub laundering_anomaly: BetaShape,
    /// Fraction of users whose credentials/devices the adversary holds.
    pub compromised_user_fraction: Score,
    /// Campaign length bounds (attack draws per campaign), inclusive.
    pub campaign_len: (u32, u32),
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_users: 500,
            n_devices: 800,
            n_events: 5000,
            attack_probability: 0.05,
            base_seed: 42,
            scenario_mix: ScenarioKind::SIMULATED.iter().map(|&k| (k, 0.2)).collect(),
            service_zones: default_service_zones(),
            n_regions: 15,
            n_domestic_regions: 12,
            amount_cap: 10_000.0,
            benign_amount_median: 60.0,
            benign_amount_sigma: 1.2,
            benign_anomaly: BetaShape::new(1.0, 9.0),
            attack_anomaly: ScenarioAnomaly {
                primary: BetaShape::new(6.0, 2.0),
                secondary: BetaShape::new(2.0, 5.0),
            },
            laundering_anomaly: BetaShape::new(4.0, 4.0),
            compromised_user_fraction: 0.06,
            campaign_len: (6, 10),
        }
    }
}

/// The five methodology zones with their criticality weights.
pub fn default_service_zones() -> Vec<(String, Score)> {
    vec![
        ("payment_processing".to_string(), 1.0),
        ("settlement_clearing".to_string(), 2.0),
        ("risk_analytics".to_string(), 1.5),
        ("customer_identity".to_string(), 1.2),
        ("administration".to_string(), 0.8),
    ]
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.n_users == 0 || self.n_devices == 0 {
            return Err(ScenarioError::EmptyPopulation);
        }
        if self.n_devices < self.n_users {
            return Err(ScenarioError::TooFewDevices {
                users: self.n_users,
                devices: self.n_devices,
            });
        }
        if !(0.0..=1.0).contains(&self.attack_probability) {
            return Err(ScenarioError::BadAttackProbability);
        }
        let mix_sum: Score = self.scenario_mix.iter().map(|(_, p)| *p).sum();
        if self.scenario_mix.iter().any(|(_, p)| *p < 0.0) || (mix_sum - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::BadScenarioMix);
        }
        self.benign_anomaly.validate()?;
        self.attack_anomaly.primary.validate()?;
        self.attack_anomaly.secondary.validate()?;
        self.laundering_anomaly.validate()?;
        if self.service_zones.is_empty() {
            return Err(ScenarioError::BadConfig("no service zones".into()));
        }
        if self.n_domestic_regions == 0 || self.n_domestic_regions > self.n_regions {
            return Err(ScenarioError::BadConfig("domestic regions out of range".into()));
        }
        if self.amount_cap <= 0.0 || self.benign_amount_median <= 0.0 {
            return Err(ScenarioError::BadConfig("amount model must be positive".into()));
        }
        if self.campaign_len.0 == 0 || self.campaign_len.0 > self.campaign_len.1 {
            return Err(ScenarioError::BadConfig("campaign length bounds invalid".into()));
        }
        if !(0.0..=1.0).contains(&self.compromised_user_fraction) {
            return Err(ScenarioError::BadConfig("compromised fraction out of range".into()));
        }
        Ok(())
    }

    pub fn service_weights(&self) -> Vec<Score> {
        self.service_zones.iter().map(|(_, w)| *w).collect()
    }
}

// ---------------------------------------------------------------------------
// Population
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub id: u32,
    pub home_region: u16,
    pub devices: Vec<u32>,
    /// Per-user multiplier on the benign amount model.
    pub spend_scale: Score,
    pub compromised: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub id: u32,
    pub owner: u32,
    /// Hygiene prior in [0.5, 0.95]; weaker posture adds benign device noise.
    pub posture_prior: Score,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub users: Vec<UserProfile>,
    pub devices: Vec<DeviceProfile>,
    pub compromised_users: Vec<u32>,
}

/// Build the synthetic population. Device ownership is `device % n_users`,
/// which gives every user at least one device and covers every device.
pub fn build_population(config: &GeneratorConfig, stream_seed: u64) -> Result<Population, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed ^ 0x706f_7075_6c61_7431);

    let mut devices = Vec::with_capacity(config.n_devices as usize);
    for id in 0..config.n_devices {
        devices.push(DeviceProfile {
            id,
            owner: id % config.n_users,
            posture_prior: rng.random_range(0.5..0.95),
        });
    }

    let n_compromised =
        ((config.n_users as Score * config.compromised_user_fraction).round() as u32).max(1);
    let mut ids: Vec<u32> = (0..config.n_users).collect();
    // Fisher-Yates prefix for the compromised pool.
    for i in 0..n_compromised.min(config.n_users) as usize {
        let j = rng.random_range(i..ids.len());
        ids.swap(i, j);
    }
    let compromised_users: Vec<u32> = {
        let mut pool = ids[..n_compromised as usize].to_vec();
        pool.sort_unstable();
        pool
    };

    let mut users = Vec::with_capacity(config.n_users as usize);
    for id in 0..config.n_users {
        let owned: Vec<u32> =
            (0..config.n_devices).filter(|d| d % config.n_users == id).collect();
        users.push(UserProfile {
            id,
            home_region: rng.random_range(0..config.n_domestic_regions),
            devices: owned,
            spend_scale: (rng.random_range(-0.4..0.4) as Score).exp(),
            compromised: compromised_users.binary_search(&id).is_ok(),
        });
    }

    Ok(Population { users, devices, compromised_users })
}

// ---------------------------------------------------------------------------
// Risk normalization
// ---------------------------------------------------------------------------

/// Channel risk table for the normalized transactional risk score.
pub fn channel_risk(channel: Channel) -> Score {
    match channel {
        Channel::Web => 0.30,
        Channel::Mobile => 0.25,
        Channel::Api => 0.50,
        Channel::Atm => 0.40,
        Channel::Pos => 0.20,
    }
}

/// Region risk table: domestic regions are calm, the last region is the
/// high-risk corridor the baseline rules also watch.
pub fn region_risk(region: u16, n_domestic: u16) -> Score {
    if region < n_domestic {
        0.10
    } else if region == 14 {
        0.90
    } else {
        0.60
    }
}

/// Normalized transactional risk:
/// `clip(0.5 * min(amount/cap, 1) + 0.3 * channel_risk + 0.2 * region_risk)`.
pub fn normalized_risk(
    amount: Score,
    channel: Channel,
    region: u16,
    amount_cap: Score,
    n_domestic: u16,
) -> Score {
    let l = (amount / amount_cap).min(1.0);
    clip(0.5 * l + 0.3 * channel_risk(channel) + 0.2 * region_risk(region, n_domestic))
        .expect("risk inputs finite")
}

// ---------------------------------------------------------------------------
// Event generator
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Campaign {
    kind: ScenarioKind,
    user: u32,
    device: u32,
    region: u16,
    progress: u32,
    length: u32,
}

/// Stateful per-run event source.
#[derive(Debug, Clone)]
pub struct EventGenerator {
    config: GeneratorConfig,
    population: Population,
    rng: ChaCha8Rng,
    next_time: u64,
    next_txn_id: u64,
    campaign: Option<Campaign>,
}

impl EventGenerator {
    pub fn new(config: GeneratorConfig, stream_seed: u64) -> Result<Self, ScenarioError> {
        let population = build_population(&config, stream_seed)?;
        Ok(Self {
            config,
            population,
            rng: ChaCha8Rng::seed_from_u64(stream_seed),
            next_time: 0,
            next_txn_id: 0,
            campaign: None,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    /// Produce the full stream for one run.
    pub fn stream(&mut self) -> Vec<Event> {
        (0..self.config.n_events).map(|_| self.next_event()).collect()
    }

    /// Draw the next event. Attack marking is Bernoulli per event, so run
    /// attack counts are binomial in the event count.
    pub fn next_event(&mut self) -> Event {
        let is_attack = self.rng.random::<Score>() < self.config.attack_probability;
        let event = if is_attack { self.attack_event() } else { self.benign_event() };
        self.next_time += 1;
        self.next_txn_id += 1;
        event
    }

    fn benign_amount(&mut self) -> Score {
        let ln = LogNormal::new(
            self.config.benign_amount_median.ln(),
            self.config.benign_amount_sigma,
        )
        .expect("validated amount model");
        ln.sample(&mut self.rng)
    }

    fn benign_event(&mut self) -> Event {
        let user_idx = self.rng.random_range(0..self.population.users.len());
        let user = self.population.users[user_idx].clone();
        let device_id = user.devices[self.rng.random_range(0..user.devices.len())];
        let posture = self.population.devices[device_id as usize].posture_prior;

        let channel = weighted_channel(&mut self.rng, &[0.34, 0.36, 0.10, 0.08, 0.12]);
        let region = if self.rng.random::<Score>() < 0.9 {
            user.home_region
        } else {
            self.rng.random_range(0..self.config.n_domestic_regions)
        };
        let service = weighted_index(&mut self.rng, &[0.45, 0.15, 0.05, 0.25, 0.10]) as u32;
        let amount = self.benign_amount() * user.spend_scale;

        let b = self.config.benign_anomaly;
        let s_user = b.sample(&mut self.rng);
        // Weak device posture adds hygiene noise.
        let s_device = clip(b.sample(&mut self.rng) * (1.5 - posture)).expect("finite");
        let s_context = b.sample(&mut self.rng);

        self.assemble(
            user.id,
            device_id,
            channel,
            region,
            service,
            amount,
            AnomalySignals { s_user, s_device, s_context },
            None,
        )
    }

    fn attack_event(&mut self) -> Event {
        let campaign = match self.campaign.take() {
            Some(c) if c.progress < c.length => c,
            _ => self.open_campaign(),
        };
        let (event, campaign) = self.inject(campaign);
        self.campaign = Some(campaign);
        event
    }

    fn open_campaign(&mut self) -> Campaign {
        let roll = self.rng.random::<Score>();
        let mut acc = 0.0;
        let mut kind = self.config.scenario_mix.last().map(|(k, _)| *k).expect("validated mix");
        for &(k, p) in &self.config.scenario_mix {
            acc += p;
            if roll < acc {
                kind = k;
                break;
            }
        }

        // Session hijacking strikes arbitrary victims; everything else
        // rides credentials the adversary already holds.
        let user_id = if kind == ScenarioKind::SessionHijack {
            self.rng.random_range(0..self.config.n_users)
        } else {
            let pool = &self.population.compromised_users;
            pool[self.rng.random_range(0..pool.len())]
        };
        let user = &self.population.users[user_id as usize];
        let device = user.devices[self.rng.random_range(0..user.devices.len())];
        let region = match kind {
            ScenarioKind::CredentialCompromise | ScenarioKind::SessionHijack => {
                self.foreign_region(user.home_region)
            }
            _ => user.home_region,
        };
        let length =
            self.rng.random_range(self.config.campaign_len.0..=self.config.campaign_len.1);
        Campaign { kind, user: user_id, device, region, progress: 0, length }
    }

    fn foreign_region(&mut self, home: u16) -> u16 {
        let pick = self.rng.random_range(0..self.config.n_regions - 1);
        if pick >= home {
            pick + 1
        } else {
            pick
        }
    }

    /// Scenario-specific transaction attributes and anomaly signals.
    fn inject(&mut self, mut campaign: Campaign) -> (Event, Campaign) {
        let kind = campaign.kind;
        let hot = self.config.attack_anomaly.primary;
        let side = self.config.attack_anomaly.secondary;
        let progress = campaign.progress as Score;

        let (channel, service, amount, signals) = match kind {
            ScenarioKind::CredentialCompromise => {
                // Stolen credentials draining the account from abroad.
                let channel = if self.rng.random::<Score>() < 0.6 {
                    Channel::Web
                } else {
                    Channel::Mobile
                };
                let amount = self.benign_amount() * 8.0;
                let signals = AnomalySignals {
                    s_user: hot.sample(&mut self.rng),
                    s_device: side.sample(&mut self.rng),
                    s_context: side.sample(&mut self.rng),
                };
                (channel, weighted_index(&mut self.rng, &[0.6, 0.4, 0.0, 0.0, 0.0]) as u32, amount, signals)
            }
            ScenarioKind::InsiderLateral => {
                // Employee account reaching into zones outside its role.
                let channel = if self.rng.random::<Score>() < 0.5 {
                    Channel::Web
                } else {
                    Channel::Api
                };
                let service = if self.rng.random::<Score>() < 0.5 { 4 } else { 1 };
                let amount = self.benign_amount() * 3.0;
                let signals = AnomalySignals {
                    s_user: side.sample(&mut self.rng),
                    s_device: side.sample(&mut self.rng),
                    s_context: hot.sample(&mut self.rng),
                };
                (channel, service, amount, signals)
            }
            ScenarioKind::ApiAbuse => {
                // Call bursts against open banking interfaces; context heat
                // rises as the burst progresses.
                let service = if self.rng.random::<Score>() < 0.7 { 0 } else { 2 };
                let amount = self.benign_amount() * 0.5;
                let ramp = 0.02 * progress;
                let signals = AnomalySignals {
                    s_user: side.sample(&mut self.rng),
                    s_device: side.sample(&mut self.rng),
                    s_context: clip(hot.sample(&mut self.rng) + ramp).expect("finite"),
                };
                (Channel::Api, service, amount, signals)
            }
            ScenarioKind::MoneyLaundering => {
                // Smurfing chain: every slice stays under a tenth of the cap,
                // suspicion accumulates along the chain.
                let channel = if self.rng.random::<Score>() < 0.5 {
                    Channel::Web
                } else {
                    Channel::Mobile
                };
                let service = if self.rng.random::<Score>() < 0.7 { 0 } else { 1 };
                let amount =
                    self.rng.random_range(0.005..0.095) * self.config.amount_cap;
                let base = 0.30 + 0.40 * self.config.laundering_anomaly.sample(&mut self.rng);
                let signals = AnomalySignals {
                    s_user: clip(base + 0.025 * progress).expect("finite"),
                    s_device: self.config.benign_anomaly.sample(&mut self.rng),
                    s_context: side.sample(&mut self.rng),
                };
                (channel, service, amount, signals)
            }
            ScenarioKind::SessionHijack => {
                // Victim's own device speaking from the wrong place.
                let channel = if self.rng.random::<Score>() < 0.6 {
                    Channel::Mobile
                } else {
                    Channel::Web
                };
                let amount = self.benign_amount() * 2.5;
                let signals = AnomalySignals {
                    s_user: side.sample(&mut self.rng),
                    s_device: hot.sample(&mut self.rng),
                    s_context: side.sample(&mut self.rng),
                };
                (channel, weighted_index(&mut self.rng, &[0.5, 0.2, 0.0, 0.3, 0.0]) as u32, amount, signals)
            }
            ScenarioKind::CardTheft | ScenarioKind::SyntheticIdentity => {
                unreachable!("dataset-only scenarios are not simulated")
            }
        };

        let event = self.assemble(
            campaign.user,
            campaign.device,
            channel,
            campaign.region,
            service,
            amount,
            signals,
            Some(kind),
        );
        campaign.progress += 1;
        (event, campaign)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &mut self,
        user: u32,
        device: u32,
        channel: Channel,
        region: u16,
        service: u32,
        amount: Score,
        anomaly: AnomalySignals,
        attack: Option<ScenarioKind>,
    ) -> Event {
        let risk = normalized_risk(
            amount,
            channel,
            region,
            self.config.amount_cap,
            self.config.n_domestic_regions,
        );
        let channel_idx = Channel::ALL.iter().position(|&c| c == channel).unwrap() as u32;
        Event {
            time_index: self.next_time,
            user: EntityId::user(user),
            device: EntityId::device(device),
            context: EntityId::context(channel_idx * self.config.n_regions as u32 + region as u32),
            transaction: Transaction {
                id: self.next_txn_id,
                amount,
                service: EntityId::service(service),
                channel,
                geolocation: region,
                normalized_risk: risk,
            },
            anomaly,
            attack,
        }
    }
}

fn weighted_index(rng: &mut ChaCha8Rng, weights: &[Score]) -> usize {
    let total: Score = weights.iter().sum();
    let roll = rng.random::<Score>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if roll < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn weighted_channel(rng: &mut ChaCha8Rng, weights: &[Score; 5]) -> Channel {
    Channel::ALL[weighted_index(rng, weights)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_counts_and_coverage() {
        let config = GeneratorConfig::default();
        let pop = build_population(&config, 42).unwrap();
        assert_eq!(pop.users.len(), 500);
        assert_eq!(pop.devices.len(), 800);
        assert!(pop.users.iter().all(|u| !u.devices.is_empty()));
        let owned: std::collections::BTreeSet<u32> =
            pop.users.iter().flat_map(|u| u.devices.iter().copied()).collect();
        assert_eq!(owned.len(), 800, "device assignment covers every device");
    }

    #[test]
    fn population_deterministic() {
        let config = GeneratorConfig::default();
        assert_eq!(build_population(&config, 42).unwrap(), build_population(&config, 42).unwrap());
    }

    #[test]
    fn population_rejects_device_shortage() {
        let config = GeneratorConfig { n_users: 10, n_devices: 5, ..Default::default() };
        assert!(matches!(
            build_population(&config, 1),
            Err(ScenarioError::TooFewDevices { users: 10, devices: 5 })
        ));
    }

    #[test]
    fn attack_probability_corners() {
        let mut config = GeneratorConfig { n_events: 300, ..Default::default() };
        config.attack_probability = 0.0;
        let events = EventGenerator::new(config.clone(), 7).unwrap().stream();
        assert!(events.iter().all(|e| !e.is_attack()));
        config.attack_probability = 1.0;
        let events = EventGenerator::new(config, 7).unwrap().stream();
        assert!(events.iter().all(|e| e.is_attack()));
    }

    #[test]
    fn attack_count_within_binomial_band() {
        // 99.9% interval for Binomial(5000, 0.05).
        let config = GeneratorConfig::default();
        for seed in [42, 43, 44] {
            let events = EventGenerator::new(config.clone(), seed).unwrap().stream();
            let attacks = events.iter().filter(|e| e.is_attack()).count();
            assert!(
                (196..=306).contains(&attacks),
                "seed {seed}: {attacks} attacks outside the binomial band"
            );
        }
    }

    #[test]
    fn streams_are_deterministic_and_seed_sensitive() {
        let config = GeneratorConfig { n_events: 100, ..Default::default() };
        let a = EventGenerator::new(config.clone(), 42).unwrap().stream();
        let b = EventGenerator::new(config.clone(), 42).unwrap().stream();
        assert_eq!(a, b);
        let c = EventGenerator::new(config, 43).unwrap().stream();
        assert_ne!(a, c, "adjacent seeds must not alias");
    }

    #[test]
    fn time_indices_strictly_increase() {
        let config = GeneratorConfig { n_events: 200, ..Default::default() };
        let events = EventGenerator::new(config, 5).unwrap().stream();
        for pair in events.windows(2) {
            assert!(pair[1].time_index > pair[0].time_index);
        }
    }

    #[test]
    fn laundering_amounts_stay_under_chain_cap() {
        let mut config = GeneratorConfig { n_events: 4000, ..Default::default() };
        config.scenario_mix = vec![(ScenarioKind::MoneyLaundering, 1.0)];
        config.attack_probability = 0.5;
        let events = EventGenerator::new(config.clone(), 11).unwrap().stream();
        let chained: Vec<_> = events.iter().filter(|e| e.is_attack()).collect();
        assert!(chained.len() > 500);
        for e in chained {
            assert!(e.transaction.amount < 0.1 * config.amount_cap);
            assert!(e.transaction.amount > 0.0);
        }
    }

    #[test]
    fn credential_compromise_signal_is_hot() {
        let mut config = GeneratorConfig { n_events: 4000, ..Default::default() };
        config.scenario_mix = vec![(ScenarioKind::CredentialCompromise, 1.0)];
        config.attack_probability = 0.5;
        let events = EventGenerator::new(config, 13).unwrap().stream();
        let signals: Vec<Score> = events
            .iter()
            .filter(|e| e.is_attack())
            .map(|e| e.anomaly.s_user)
            .collect();
        let mean = signals.iter().sum::<Score>() / signals.len() as Score;
        assert!(mean >= 0.6, "mean s_user = {mean}");
        // Foreign locale on every campaign event.
        for e in events.iter().filter(|e| e.is_attack()) {
            let home = 0..12;
            let _ = home;
            assert!(e.transaction.geolocation < 15);
        }
    }

    #[test]
    fn benign_signal_is_cold() {
        let config = GeneratorConfig { n_events: 4000, attack_probability: 0.0, ..Default::default() };
        let events = EventGenerator::new(config, 17).unwrap().stream();
        let mean = events.iter().map(|e| e.anomaly.s_user).sum::<Score>() / events.len() as Score;
        assert!((mean - 0.1).abs() < 0.02, "benign mean s_user = {mean}");
    }

    #[test]
    fn risk_is_normalized_and_monotone_in_amount() {
        for amount in [0.0, 100.0, 5_000.0, 50_000.0] {
            let r = normalized_risk(amount, Channel::Web, 3, 10_000.0, 12);
            assert!((0.0..=1.0).contains(&r));
        }
        let low = normalized_risk(100.0, Channel::Web, 3, 10_000.0, 12);
        let high = normalized_risk(9_000.0, Channel::Web, 3, 10_000.0, 12);
        assert!(high > low);
    }

    #[test]
    fn scenario_mix_must_sum_to_one() {
        let mut config = GeneratorConfig::default();
        config.scenario_mix = vec![(ScenarioKind::ApiAbuse, 0.5)];
        assert!(matches!(config.validate(), Err(ScenarioError::BadScenarioMix)));
    }
}
