//! The evaluation scorecard: transactional integrity, automation
//! efficiency, trust adaptation, threat scoring, risk bands, and the
//! auxiliary pressure/segmentation/confidence metrics, plus confusion
//! metrics over decision logs.
//!
//! The formula layer is pure and generic over the scalar type. The
//! [`MetricsAccumulator`] streams over decision records during a run and
//! produces a [`RunMetrics`] scorecard at the end; every value it emits can
//! be recomputed by a batch pass over the same log.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityId, ScenarioKind};
use crate::scalar::Real;
use crate::Score;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("epsilon must be positive")]
    BadEpsilon,
    #[error("window length must be at least 2")]
    BadWindow,
    #[error("no trajectories")]
    NoTrajectories,
    #[error("no trajectory point for user {user} at time {time_index}")]
    MissingAnchor { user: u32, time_index: u64 },
    #[error("no transactions")]
    NoTransactions,
    #[error("count {0} exceeds total {1}")]
    CountExceedsTotal(u64, u64),
    #[error("service weight must be positive")]
    BadServiceWeight,
    #[error("threat score weights must be non-negative and sum to 1")]
    BadThreatWeights,
    #[error("risk band thresholds must be strictly increasing within (0, 1)")]
    BadThresholds,
    #[error("band {0} outside [1, {1}]")]
    BandOutOfRange(u8, u8),
    #[error("window duration must be positive")]
    BadDuration,
    #[error("scaling coefficient must be positive")]
    BadCoefficient,
    #[error("records must be non-empty")]
    EmptyRecords,
    #[error("unknown service index {0}")]
    UnknownService(u32),
}

fn unit<R: Real>(x: R) -> Result<R, MetricsError> {
    if !x.is_finite() || x < R::zero() || x > R::one() {
        return Err(MetricsError::ScoreOutOfRange(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Pure metric formulas
// ---------------------------------------------------------------------------

/// Relative identity-trust drop over a window: `(start - end) / max(start, eps)`.
/// Positive when trust degraded.
pub fn delta_identity<R: Real>(i_start: R, i_end: R, epsilon: R) -> Result<R, MetricsError> {
    let start = unit(i_start)?;
    let end = unit(i_end)?;
    if !epsilon.is_finite() || epsilon <= R::zero() {
        return Err(MetricsError::BadEpsilon);
    }
    Ok((start - end) / start.max(epsilon))
}

/// Identity trust adaptation level: mean relative trust drop over windows
/// anchored at attack events.
///
/// Each anchor `(user, time_index)` opens a window covering `window_len`
/// consecutive points of that user's trajectory starting at the anchor,
/// truncated at the trajectory end. Returns 0 when there are no anchors.
pub fn ital<R: Real>(
    trajectories: &BTreeMap<u32, Vec<(u64, R)>>,
    attack_events: &[(u32, u64)],
    window_len: usize,
    epsilon: R,
) -> Result<R, MetricsError> {
    if trajectories.is_empty() {
        return Err(MetricsError::NoTrajectories);
    }
    if window_len < 2 {
        return Err(MetricsError::BadWindow);
    }
    if attack_events.is_empty() {
        return Ok(R::zero());
    }
    let mut sum = R::zero();
    let mut count = 0usize;
    for &(user, time_index) in attack_events {
        let track = trajectories
            .get(&user)
            .ok_or(MetricsError::MissingAnchor { user, time_index })?;
        let pos = track
            .binary_search_by_key(&time_index, |(t, _)| *t)
            .map_err(|_| MetricsError::MissingAnchor { user, time_index })?;
        let end = (pos + window_len - 1).min(track.len() - 1);
        sum = sum + delta_identity(track[pos].1, track[end].1, epsilon)?;
        count += 1;
    }
    Ok(sum / R::from_usize(count).unwrap())
}

/// Valid/attempted transaction counts for one service, with its
/// criticality weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceCounts<R> {
    pub n_valid: u64,
    pub n_total: u64,
    pub weight: R,
}

/// Transactional integrity index: criticality-weighted ratio of valid
/// completed to attempted transactions.
pub fn tii<R: Real>(counts: &[ServiceCounts<R>]) -> Result<R, MetricsError> {
    let mut num = R::zero();
    let mut den = R::zero();
    for sc in counts {
        if !sc.weight.is_finite() || sc.weight <= R::zero() {
            return Err(MetricsError::BadServiceWeight);
        }
        if sc.n_valid > sc.n_total {
            return Err(MetricsError::CountExceedsTotal(sc.n_valid, sc.n_total));
        }
        num = num + sc.weight * R::from_u64(sc.n_valid).unwrap();
        den = den + sc.weight * R::from_u64(sc.n_total).unwrap();
    }
    if den == R::zero() {
        return Err(MetricsError::NoTransactions);
    }
    Ok(num / den)
}

/// Security automation efficiency: share of security-relevant incidents
/// fully handled by automation. Zero when there were no incidents.
pub fn sae<R: Real>(total_incidents: u64, auto_handled: u64) -> Result<R, MetricsError> {
    if auto_handled > total_incidents {
        return Err(MetricsError::CountExceedsTotal(auto_handled, total_incidents));
    }
    if total_incidents == 0 {
        return Ok(R::zero());
    }
    Ok(R::from_u64(auto_handled).unwrap() / R::from_u64(total_incidents).unwrap())
}

/// Automation confidence factor: `mu * confirmed / total`. Zero when no
/// automated actions were taken.
pub fn acf<R: Real>(total_actions: u64, confirmed_correct: u64, mu: R) -> Result<R, MetricsError> {
    if confirmed_correct > total_actions {
        return Err(MetricsError::CountExceedsTotal(confirmed_correct, total_actions));
    }
    if !mu.is_finite() || mu <= R::zero() {
        return Err(MetricsError::BadCoefficient);
    }
    if total_actions == 0 {
        return Ok(R::zero());
    }
    Ok(mu * R::from_u64(confirmed_correct).unwrap() / R::from_u64(total_actions).unwrap())
}

/// Confidence-adjusted automation efficiency.
pub fn sae_star<R: Real>(sae_value: R, acf_value: R) -> R {
    sae_value * acf_value
}

/// Financial threat score: `alpha*L + beta*P + gamma*E` over normalized
/// loss, exploitation probability, and systemic exposure.
pub fn fts<R: Real>(
    loss: R,
    exploit_prob: R,
    exposure: R,
    alpha: R,
    beta: R,
    gamma: R,
) -> Result<R, MetricsError> {
    let l = unit(loss)?;
    let p = unit(exploit_prob)?;
    let e = unit(exposure)?;
    for w in [alpha, beta, gamma] {
        if !w.is_finite() || w < R::zero() {
            return Err(MetricsError::BadThreatWeights);
        }
    }
    let sum = alpha + beta + gamma;
    if (sum - R::one()).abs() > R::from_f64(1e-9).unwrap() {
        return Err(MetricsError::BadThreatWeights);
    }
    Ok(alpha * l + beta * p + gamma * e)
}

/// Map a threat score to its discrete risk band under the half-open
/// convention: band k covers `[tau_{k-1}, tau_k)` with `tau_0 = 0` and
/// `tau_K = +inf`, so K thresholds-plus-one bands are numbered 1..=K.
pub fn risk_band<R: Real>(fts_value: R, thresholds: &[R]) -> Result<u8, MetricsError> {
    let mut prev = R::zero();
    for &tau in thresholds {
        if !(tau > prev && tau < R::one()) {
            return Err(MetricsError::BadThresholds);
        }
        prev = tau;
    }
    let below = thresholds.iter().take_while(|&&tau| fts_value >= tau).count();
    Ok(below as u8 + 1)
}

/// Transactional risk pressure: `delta * volume * mean_risk / duration`.
pub fn trp<R: Real>(
    volume: R,
    mean_risk: R,
    window_duration: R,
    delta: R,
) -> Result<R, MetricsError> {
    if !volume.is_finite() || volume < R::zero() {
        return Err(MetricsError::ScoreOutOfRange(volume.to_f64().unwrap_or(f64::NAN)));
    }
    unit(mean_risk)?;
    if !window_duration.is_finite() || window_duration <= R::zero() {
        return Err(MetricsError::BadDuration);
    }
    if !delta.is_finite() || delta <= R::zero() {
        return Err(MetricsError::BadCoefficient);
    }
    Ok(delta * volume * mean_risk / window_duration)
}

/// Adaptive segmentation strength: `lambda * zones_adaptive / zones_total`.
pub fn ass<R: Real>(zones_adaptive: u64, zones_total: u64, lambda: R) -> Result<R, MetricsError> {
    if zones_total == 0 {
        return Err(MetricsError::NoTransactions);
    }
    if zones_adaptive > zones_total {
        return Err(MetricsError::CountExceedsTotal(zones_adaptive, zones_total));
    }
    if !lambda.is_finite() || lambda <= R::zero() {
        return Err(MetricsError::BadCoefficient);
    }
    Ok(lambda * R::from_u64(zones_adaptive).unwrap() / R::from_u64(zones_total).unwrap())
}

// ---------------------------------------------------------------------------
// Decision records and confusion metrics
// ---------------------------------------------------------------------------

/// PDP action, ordered from most permissive to most restrictive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Allow,
    StepUp,
    Block,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Allow => "allow",
            Action::StepUp => "step_up",
            Action::Block => "block",
        }
    }

    /// An event is flagged when it was not silently allowed.
    pub fn is_flagged(self) -> bool {
        self != Action::Allow
    }
}

/// One PDP decision with the event attributes needed to rebuild every
/// metric from the log alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub time_index: u64,
    pub user: EntityId,
    pub device: EntityId,
    pub service: EntityId,
    pub scenario: Option<ScenarioKind>,
    pub amount: Score,
    pub normalized_risk: Score,
    pub action: Action,
    pub theta: Score,
    pub fts: Score,
    pub band: u8,
    pub automated: bool,
    /// Simulated analyst confirmation for flagged actions, `None` for allows.
    pub confirmed_correct: Option<bool>,
    /// Identity score of the acting user after this event's trust update.
    pub identity_after: Score,
}

impl DecisionRecord {
    pub fn is_attack(&self) -> bool {
        self.scenario.is_some()
    }
}

/// Classification quality of flagged-vs-attack, with undefined ratios kept
/// absent instead of coerced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub precision: Option<Score>,
    pub recall: Option<Score>,
    pub f1: Option<Score>,
    pub fpr: Option<Score>,
    pub fnr: Option<Score>,
}

fn ratio(num: u64, den: u64) -> Option<Score> {
    if den == 0 {
        None
    } else {
        Some(num as Score / den as Score)
    }
}

/// Derive the ratio metrics from raw confusion counts.
pub fn confusion_from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Confusion {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Confusion {
        tp,
        fp,
        fn_,
        tn,
        precision,
        recall,
        f1,
        fpr: ratio(fp, fp + tn),
        fnr: ratio(fn_, fn_ + tp),
    }
}

/// Confusion metrics over a decision log: positive = flagged
/// (step-up or block), ground truth = attack annotation.
pub fn confusion_metrics(records: &[DecisionRecord]) -> Result<Confusion, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecords);
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
    for rec in records {
        match (rec.action.is_flagged(), rec.is_attack()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(confusion_from_counts(tp, fp, fn_, tn))
}

// ---------------------------------------------------------------------------
// Run scorecard and streaming accumulation
// ---------------------------------------------------------------------------

/// Attack outcomes for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScenarioOutcomes {
    pub allowed: u64,
    pub challenged: u64,
    pub blocked: u64,
}

/// Complete scorecard for one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub tii: Score,
    pub sae: Score,
    pub sae_star: Score,
    pub ital: Score,
    pub acf: Score,
    pub trp: Score,
    pub ass: Score,
    pub precision: Option<Score>,
    pub recall: Option<Score>,
    pub f1: Option<Score>,
    pub fpr: Option<Score>,
    pub fnr: Option<Score>,
    pub per_service_tii: BTreeMap<String, Score>,
    pub per_scenario: BTreeMap<String, ScenarioOutcomes>,
    pub events: u64,
    pub attacks: u64,
    pub incidents_auto: u64,
    pub actions_automated: u64,
    pub actions_confirmed: u64,
}

impl RunMetrics {
    /// Scalar metrics by name, for aggregation and comparison tables.
    pub const SCALAR_NAMES: [&'static str; 7] =
        ["tii", "sae", "sae_star", "ital", "acf", "trp", "ass"];

    pub fn scalar(&self, name: &str) -> Option<Score> {
        match name {
            "tii" => Some(self.tii),
            "sae" => Some(self.sae),
            "sae_star" => Some(self.sae_star),
            "ital" => Some(self.ital),
            "acf" => Some(self.acf),
            "trp" => Some(self.trp),
            "ass" => Some(self.ass),
            "precision" => self.precision,
            "recall" => self.recall,
            "f1" => self.f1,
            "fpr" => self.fpr,
            "fnr" => self.fnr,
            _ => None,
        }
    }
}

/// Challenge completion model for step-up outcomes. The default is the
/// deterministic corner: legitimate parties always pass, attackers never
/// do. Fractional rates draw a per-event uniform from a salted hash so the
/// outcome is reproducible for a given salt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChallengeModel {
    pub legit_pass_rate: Score,
    pub attacker_pass_rate: Score,
    pub salt: u64,
}

impl Default for ChallengeModel {
    fn default() -> Self {
        Self { legit_pass_rate: 1.0, attacker_pass_rate: 0.0, salt: 0 }
    }
}

impl ChallengeModel {
    pub fn passes(&self, time_index: u64, is_attack: bool) -> bool {
        let rate = if is_attack { self.attacker_pass_rate } else { self.legit_pass_rate };
        if rate >= 1.0 {
            return true;
        }
        if rate <= 0.0 {
            return false;
        }
        let h = splitmix64(self.salt ^ time_index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        ((h >> 11) as f64 / (1u64 << 53) as f64) < rate
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Everything the accumulator needs to turn a decision log into a scorecard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Service registry: name and criticality weight per service index.
    pub services: Vec<(String, Score)>,
    pub window_len: usize,
    pub epsilon: Score,
    pub challenge: ChallengeModel,
    pub acf_mu: Score,
    pub trp_delta: Score,
    pub ass_lambda: Score,
    pub zones_adaptive: u64,
    pub zones_total: u64,
}

/// Streaming scorecard accumulation over a run's decision stream.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    config: MetricsConfig,
    per_service: Vec<(u64, u64)>,
    per_scenario: BTreeMap<ScenarioKind, ScenarioOutcomes>,
    trajectories: BTreeMap<u32, Vec<(u64, Score)>>,
    anchors: Vec<(u32, u64)>,
    tp: u64,
    fp: u64,
    fn_: u64,
    tn: u64,
    incidents_auto: u64,
    actions_automated: u64,
    actions_confirmed: u64,
    events: u64,
    attacks: u64,
    volume: Score,
    risk_sum: Score,
}

impl MetricsAccumulator {
    pub fn new(config: MetricsConfig) -> Self {
        let per_service = vec![(0, 0); config.services.len()];
        Self {
            config,
            per_service,
            per_scenario: BTreeMap::new(),
            trajectories: BTreeMap::new(),
            anchors: Vec::new(),
            tp: 0,
            fp: 0,
            fn_: 0,
            tn: 0,
            incidents_auto: 0,
            actions_automated: 0,
            actions_confirmed: 0,
            events: 0,
            attacks: 0,
            volume: 0.0,
            risk_sum: 0.0,
        }
    }

    /// Whether a decision completes the transaction as valid: silent allows
    /// of benign traffic, plus benign step-ups whose challenge is passed.
    fn is_valid(&self, rec: &DecisionRecord) -> bool {
        if rec.is_attack() {
            return false;
        }
        match rec.action {
            Action::Allow => true,
            Action::StepUp => self.config.challenge.passes(rec.time_index, false),
            Action::Block => false,
        }
    }

    /// Whether an attack was fully handled by automation: automated blocks,
    /// or automated step-ups the attacker fails to pass.
    fn is_auto_handled(&self, rec: &DecisionRecord) -> bool {
        if !rec.is_attack() || !rec.automated {
            return false;
        }
        match rec.action {
            Action::Block => true,
            Action::StepUp => !self.config.challenge.passes(rec.time_index, true),
            Action::Allow => false,
        }
    }

    pub fn record(&mut self, rec: &DecisionRecord) -> Result<(), MetricsError> {
        let service_idx = rec.service.index as usize;
        if service_idx >= self.per_service.len() {
            return Err(MetricsError::UnknownService(rec.service.index));
        }
        self.events += 1;
        self.volume += rec.amount;
        self.risk_sum += rec.normalized_risk;

        let valid = self.is_valid(rec);
        let slot = &mut self.per_service[service_idx];
        slot.1 += 1;
        if valid {
            slot.0 += 1;
        }

        self.trajectories
            .entry(rec.user.index)
            .or_default()
            .push((rec.time_index, rec.identity_after));

        match (rec.action.is_flagged(), rec.is_attack()) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }

        if rec.action.is_flagged() && rec.automated {
            self.actions_automated += 1;
            if rec.confirmed_correct == Some(true) {
                self.actions_confirmed += 1;
            }
        }

        if let Some(kind) = rec.scenario {
            self.attacks += 1;
            self.anchors.push((rec.user.index, rec.time_index));
            let outcomes = self.per_scenario.entry(kind).or_default();
            match rec.action {
                Action::Allow => outcomes.allowed += 1,
                Action::StepUp => outcomes.challenged += 1,
                Action::Block => outcomes.blocked += 1,
            }
            if self.is_auto_handled(rec) {
                self.incidents_auto += 1;
            }
        }
        Ok(())
    }

    pub fn finalize(self) -> Result<RunMetrics, MetricsError> {
        let counts: Vec<ServiceCounts<Score>> = self
            .per_service
            .iter()
            .zip(self.config.services.iter())
            .map(|(&(valid, total), (_, weight))| ServiceCounts {
                n_valid: valid,
                n_total: total,
                weight: *weight,
            })
            .collect();
        let tii_value = tii(&counts)?;

        let mut per_service_tii = BTreeMap::new();
        for (sc, (name, _)) in counts.iter().zip(self.config.services.iter()) {
            if sc.n_total > 0 {
                per_service_tii
                    .insert(name.clone(), sc.n_valid as Score / sc.n_total as Score);
            }
        }

        let sae_value: Score = sae(self.attacks, self.incidents_auto)?;
        let acf_value: Score =
            acf(self.actions_automated, self.actions_confirmed, self.config.acf_mu)?;
        let ital_value = ital(
            &self.trajectories,
            &self.anchors,
            self.config.window_len,
            self.config.epsilon,
        )?;
        let mean_risk = if self.events == 0 { 0.0 } else { self.risk_sum / self.events as Score };
        let trp_value = trp(self.volume, mean_risk, self.events.max(1) as Score, self.config.trp_delta)?;
        let ass_value: Score =
            ass(self.config.zones_adaptive, self.config.zones_total, self.config.ass_lambda)?;
        let confusion = confusion_from_counts(self.tp, self.fp, self.fn_, self.tn);

        let per_scenario = self
            .per_scenario
            .into_iter()
            .map(|(k, v)| (k.name().to_string(), v))
            .collect();

        Ok(RunMetrics {
            tii: tii_value,
            sae: sae_value,
            sae_star: sae_star(sae_value, acf_value),
            ital: ital_value,
            acf: acf_value,
            trp: trp_value,
            ass: ass_value,
            precision: confusion.precision,
            recall: confusion.recall,
            f1: confusion.f1,
            fpr: confusion.fpr,
            fnr: confusion.fnr,
            per_service_tii,
            per_scenario,
            events: self.events,
            attacks: self.attacks,
            incidents_auto: self.incidents_auto,
            actions_automated: self.actions_automated,
            actions_confirmed: self.actions_confirmed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EntityKind;

    #[test]
    fn delta_identity_examples() {
        assert!((delta_identity(0.8_f64, 0.4, 1e-6).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(delta_identity(0.7_f64, 0.7, 1e-6).unwrap(), 0.0);
        assert_eq!(delta_identity(0.0_f64, 0.0, 1e-6).unwrap(), 0.0);
        assert!(delta_identity(1.2_f64, 0.5, 1e-6).is_err());
        assert!(delta_identity(0.5_f64, 0.5, 0.0).is_err());
    }

    fn one_user_track(points: &[(u64, f64)]) -> BTreeMap<u32, Vec<(u64, f64)>> {
        let mut m = BTreeMap::new();
        m.insert(0, points.to_vec());
        m
    }

    #[test]
    fn ital_single_window() {
        let tracks = one_user_track(&[(0, 0.8), (1, 0.6), (2, 0.4)]);
        let value = ital(&tracks, &[(0, 0)], 3, 1e-6).unwrap();
        assert!((value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ital_no_attacks_is_zero() {
        let tracks = one_user_track(&[(0, 0.8), (1, 0.8)]);
        assert_eq!(ital(&tracks, &[], 10, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn ital_mean_of_windows() {
        let mut tracks = one_user_track(&[(0, 0.8), (5, 0.4)]);
        tracks.insert(1, vec![(2, 1.0), (3, 0.9)]);
        // Windows: (0.8 - 0.4)/0.8 = 0.5 and (1.0 - 0.9)/1.0 = 0.1.
        let value = ital(&tracks, &[(0, 0), (1, 2)], 10, 1e-6).unwrap();
        assert!((value - 0.3).abs() < 1e-12);
    }

    #[test]
    fn ital_rejects_empty_and_missing() {
        let empty = BTreeMap::new();
        assert!(matches!(ital::<f64>(&empty, &[], 10, 1e-6), Err(MetricsError::NoTrajectories)));
        let tracks = one_user_track(&[(0, 0.8)]);
        assert!(matches!(
            ital(&tracks, &[(0, 99)], 10, 1e-6),
            Err(MetricsError::MissingAnchor { .. })
        ));
        assert!(matches!(ital(&tracks, &[(0, 0)], 1, 1e-6), Err(MetricsError::BadWindow)));
    }

    #[test]
    fn ital_invariant_under_time_shift() {
        let tracks = one_user_track(&[(3, 0.9), (7, 0.5), (9, 0.3)]);
        let base = ital(&tracks, &[(0, 3)], 3, 1e-6).unwrap();
        let shifted_tracks = one_user_track(&[(1003, 0.9), (1007, 0.5), (1009, 0.3)]);
        let shifted = ital(&shifted_tracks, &[(0, 1003)], 3, 1e-6).unwrap();
        assert_eq!(base, shifted);
    }

    #[test]
    fn tii_examples() {
        let one = |valid, total, weight| ServiceCounts { n_valid: valid, n_total: total, weight };
        assert_eq!(tii(&[one(10, 10, 1.0_f64)]).unwrap(), 1.0);
        let mixed: f64 = tii(&[one(10, 10, 1.0), one(5, 10, 2.0)]).unwrap();
        assert!((mixed - 20.0 / 30.0).abs() < 1e-12);
        assert_eq!(tii(&[one(0, 10, 1.0), one(0, 4, 3.0)]).unwrap(), 0.0);
        assert!(matches!(tii(&[one(0, 0, 1.0)]), Err(MetricsError::NoTransactions)));
        assert!(tii(&[one(5, 3, 1.0)]).is_err());
        assert!(tii(&[one(1, 2, 0.0)]).is_err());
    }

    #[test]
    fn sae_examples() {
        assert!((sae::<f64>(100, 43).unwrap() - 0.43).abs() < 1e-15);
        assert_eq!(sae::<f64>(100, 0).unwrap(), 0.0);
        assert_eq!(sae::<f64>(0, 0).unwrap(), 0.0);
        assert!(sae::<f64>(10, 11).is_err());
    }

    #[test]
    fn acf_examples() {
        assert!((acf::<f64>(50, 45, 1.0).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(acf::<f64>(50, 50, 1.0).unwrap(), 1.0);
        assert_eq!(acf::<f64>(0, 0, 1.0).unwrap(), 0.0);
        assert!(acf::<f64>(5, 6, 1.0).is_err());
    }

    #[test]
    fn sae_star_examples() {
        assert_eq!(sae_star(0.43_f64, 1.0), 0.43);
        assert!((sae_star(0.43_f64, 0.9) - 0.387).abs() < 1e-12);
        assert_eq!(sae_star(0.0_f64, 0.77), 0.0);
    }

    #[test]
    fn fts_examples() {
        assert_eq!(fts(0.0_f64, 0.0, 0.0, 0.5, 0.3, 0.2).unwrap(), 0.0);
        assert_eq!(fts(1.0_f64, 1.0, 1.0, 0.5, 0.3, 0.2).unwrap(), 1.0);
        let mid: f64 = fts(0.4, 0.5, 0.3, 0.5, 0.3, 0.2).unwrap();
        assert!((mid - 0.41).abs() < 1e-12);
        assert!(fts(0.4_f64, 0.5, 0.3, 0.5, 0.3, 0.3).is_err());
        assert!(fts(1.4_f64, 0.5, 0.3, 0.5, 0.3, 0.2).is_err());
    }

    #[test]
    fn risk_band_examples() {
        let taus = [0.25_f64, 0.5, 0.75];
        assert_eq!(risk_band(0.0, &taus).unwrap(), 1);
        assert_eq!(risk_band(0.41, &taus).unwrap(), 2);
        assert_eq!(risk_band(0.75, &taus).unwrap(), 4);
        // Half-open boundaries: each threshold falls into the upper band.
        assert_eq!(risk_band(0.25, &taus).unwrap(), 2);
        assert_eq!(risk_band(0.5, &taus).unwrap(), 3);
        assert_eq!(risk_band(1.0, &taus).unwrap(), 4);
        assert!(risk_band(0.3_f64, &[0.5, 0.5]).is_err());
        assert!(risk_band(0.3_f64, &[0.5, 0.4]).is_err());
        assert!(risk_band(0.3_f64, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn trp_examples() {
        assert!((trp(1000.0_f64, 0.2, 100.0, 1.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(trp(0.0_f64, 0.6, 10.0, 1.0).unwrap(), 0.0);
        assert!((trp(500.0_f64, 1.0, 500.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(trp(10.0_f64, 0.5, 0.0, 1.0), Err(MetricsError::BadDuration)));
    }

    #[test]
    fn ass_examples() {
        assert_eq!(ass::<f64>(5, 5, 1.0).unwrap(), 1.0);
        assert_eq!(ass::<f64>(0, 5, 1.0).unwrap(), 0.0);
        assert!((ass::<f64>(3, 5, 1.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(ass::<f64>(6, 5, 1.0).is_err());
    }

    fn record(action: Action, attack: bool) -> DecisionRecord {
        DecisionRecord {
            time_index: 0,
            user: EntityId::user(0),
            device: EntityId::device(0),
            service: EntityId { kind: EntityKind::Service, index: 0 },
            scenario: attack.then_some(ScenarioKind::CredentialCompromise),
            amount: 10.0,
            normalized_risk: 0.2,
            action,
            theta: 0.5,
            fts: 0.2,
            band: 1,
            automated: true,
            confirmed_correct: action.is_flagged().then_some(attack),
            identity_after: 0.8,
        }
    }

    #[test]
    fn confusion_perfect_classifier() {
        let records = vec![record(Action::Block, true), record(Action::Allow, false)];
        let c = confusion_metrics(&records).unwrap();
        assert_eq!(c.precision, Some(1.0));
        assert_eq!(c.recall, Some(1.0));
        assert_eq!(c.f1, Some(1.0));
    }

    #[test]
    fn confusion_degenerate_denominator() {
        let records = vec![record(Action::Allow, true), record(Action::Allow, false)];
        let c = confusion_metrics(&records).unwrap();
        assert_eq!(c.recall, Some(0.0));
        assert_eq!(c.precision, None);
        assert_eq!(c.f1, None);
    }

    #[test]
    fn confusion_hand_computed() {
        let c = confusion_from_counts(5, 15, 5, 100);
        assert_eq!(c.precision, Some(0.25));
        assert_eq!(c.recall, Some(0.5));
        assert!((c.f1.unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn f1_is_harmonic_mean() {
        for (tp, fp, fn_) in [(5u64, 3u64, 2u64), (1, 0, 0), (2, 9, 14), (7, 7, 7)] {
            let c = confusion_from_counts(tp, fp, fn_, 11);
            if let (Some(p), Some(r), Some(f1)) = (c.precision, c.recall, c.f1) {
                assert!((f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn challenge_model_deterministic_corners() {
        let model = ChallengeModel::default();
        assert!(model.passes(42, false));
        assert!(!model.passes(42, true));
        let fractional = ChallengeModel { legit_pass_rate: 0.5, attacker_pass_rate: 0.5, salt: 7 };
        // Deterministic given salt and time index.
        for t in 0..50 {
            assert_eq!(fractional.passes(t, false), fractional.passes(t, false));
        }
    }
}
