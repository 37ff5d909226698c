//! Composite trust scoring and exponential-smoothing trust adaptation.
//!
//! Every entity carries a normalized score in [0, 1]. An event's composite
//! trust is a weighted linear combination of the actor's identity score,
//! the device posture score, the inverse transactional risk, and the
//! contextual consistency score. After each decision the per-entity scores
//! are pulled toward `1 - anomaly` by exponential smoothing, so sustained
//! anomalies erode trust geometrically while benign activity restores it.
//!
//! The arithmetic is generic over the scalar type; the crate root exposes
//! `f64` aliases for simulation use.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityId, EntityKind};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrustError {
    #[error("non-finite trust value")]
    NonFinite,
    #[error("score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("adaptation rate must lie in (0, 1]")]
    BadAdaptationRate,
    #[error("epsilon must be positive")]
    BadEpsilon,
    #[error("trust weights must be non-negative and sum to 1 (sum deviates by {0})")]
    BadWeights(f64),
}

/// Saturate a finite value into [0, 1].
pub fn clip<R: Real>(x: R) -> Result<R, TrustError> {
    if !x.is_finite() {
        return Err(TrustError::NonFinite);
    }
    Ok(x.min(R::one()).max(R::zero()))
}

fn check_unit<R: Real>(x: R) -> Result<R, TrustError> {
    if !x.is_finite() {
        return Err(TrustError::NonFinite);
    }
    if x < R::zero() || x > R::one() {
        return Err(TrustError::ScoreOutOfRange(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(x)
}

/// Map an anomaly score to its trust target: benign evidence (s near 0)
/// targets full trust, strong anomalies (s near 1) target zero trust.
pub fn g_map<R: Real>(s: R) -> Result<R, TrustError> {
    Ok(R::one() - check_unit(s)?)
}

/// One exponential-smoothing step: `clip((1 - eta) * current + eta * (1 - anomaly))`.
///
/// `eta` controls adaptation speed; the same rule serves identity, device,
/// and context scores.
pub fn update_trust<R: Real>(current: R, anomaly: R, eta: R) -> Result<R, TrustError> {
    let current = check_unit(current)?;
    let target = g_map(anomaly)?;
    if !eta.is_finite() || eta <= R::zero() || eta > R::one() {
        return Err(TrustError::BadAdaptationRate);
    }
    clip((R::one() - eta) * current + eta * target)
}

/// Weights of the composite trust combination. Non-negative, sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustWeights<R> {
    pub w_identity: R,
    pub w_device: R,
    pub w_risk: R,
    pub w_context: R,
}

/// Tolerance on the weight-sum constraint.
const WEIGHT_SUM_TOL: f64 = 1e-9;

impl<R: Real> TrustWeights<R> {
    pub fn new(w_identity: R, w_device: R, w_risk: R, w_context: R) -> Result<Self, TrustError> {
        let weights = Self { w_identity, w_device, w_risk, w_context };
        weights.validate()?;
        Ok(weights)
    }

    pub fn validate(&self) -> Result<(), TrustError> {
        let parts = [self.w_identity, self.w_device, self.w_risk, self.w_context];
        if parts.iter().any(|w| !w.is_finite() || *w < R::zero()) {
            return Err(TrustError::BadWeights(f64::NAN));
        }
        let sum = parts.iter().copied().fold(R::zero(), |a, b| a + b);
        let dev = (sum - R::one()).abs();
        if dev > R::from_f64(WEIGHT_SUM_TOL).unwrap() {
            return Err(TrustError::BadWeights(dev.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }
}

impl<R: Real> Default for TrustWeights<R> {
    /// Default split (0.30, 0.25, 0.25, 0.20) for identity, device, risk,
    /// context: sums to 1 and mildly favors identity.
    fn default() -> Self {
        Self {
            w_identity: R::from_f64(0.30).unwrap(),
            w_device: R::from_f64(0.25).unwrap(),
            w_risk: R::from_f64(0.25).unwrap(),
            w_context: R::from_f64(0.20).unwrap(),
        }
    }
}

/// Smoothing rates for identity, device, and context adaptation, plus the
/// epsilon guard used by relative-drop metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationParams<R> {
    pub eta_identity: R,
    pub eta_device: R,
    pub eta_context: R,
    pub epsilon: R,
}

impl<R: Real> AdaptationParams<R> {
    pub fn new(eta_identity: R, eta_device: R, eta_context: R, epsilon: R) -> Result<Self, TrustError> {
        let params = Self { eta_identity, eta_device, eta_context, epsilon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), TrustError> {
        for eta in [self.eta_identity, self.eta_device, self.eta_context] {
            if !eta.is_finite() || eta <= R::zero() || eta > R::one() {
                return Err(TrustError::BadAdaptationRate);
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= R::zero() {
            return Err(TrustError::BadEpsilon);
        }
        Ok(())
    }
}

impl<R: Real> Default for AdaptationParams<R> {
    /// Rates (0.15, 0.10, 0.10): a sustained attack (s near 0.9) halves
    /// identity trust within about six events.
    fn default() -> Self {
        Self {
            eta_identity: R::from_f64(0.15).unwrap(),
            eta_device: R::from_f64(0.10).unwrap(),
            eta_context: R::from_f64(0.10).unwrap(),
            epsilon: R::from_f64(1e-6).unwrap(),
        }
    }
}

/// Composite trust score: `w_I*I + w_D*D + w_R*(1 - R) + w_C*C`.
///
/// The `1 - R` transform keeps the result trust-oriented: higher values
/// mean higher trust across all four components.
pub fn composite_trust<R: Real>(
    weights: &TrustWeights<R>,
    identity: R,
    device: R,
    txn_risk: R,
    context: R,
) -> Result<R, TrustError> {
    weights.validate()?;
    let identity = check_unit(identity)?;
    let device = check_unit(device)?;
    let txn_risk = check_unit(txn_risk)?;
    let context = check_unit(context)?;
    clip(
        weights.w_identity * identity
            + weights.w_device * device
            + weights.w_risk * (R::one() - txn_risk)
            + weights.w_context * context,
    )
}

/// Default prior for entities never seen before.
pub const INITIAL_TRUST: f64 = 0.8;

/// Per-entity trust scores for one simulation run. Single-writer: each run
/// owns its own instance; every stored score stays in [0, 1] because all
/// writes go through [`update_trust`].
#[derive(Debug, Clone)]
pub struct TrustState<R> {
    identity: HashMap<u32, R>,
    device: HashMap<u32, R>,
    context: HashMap<u32, R>,
    prior: R,
}

impl<R: Real> TrustState<R> {
    pub fn new(prior: R) -> Self {
        Self {
            identity: HashMap::new(),
            device: HashMap::new(),
            context: HashMap::new(),
            prior,
        }
    }

    fn map_for(&self, kind: EntityKind) -> &HashMap<u32, R> {
        match kind {
            EntityKind::User => &self.identity,
            EntityKind::Device => &self.device,
            EntityKind::Context => &self.context,
            EntityKind::Service => panic!("services carry no trust score"),
        }
    }

    fn map_for_mut(&mut self, kind: EntityKind) -> &mut HashMap<u32, R> {
        match kind {
            EntityKind::User => &mut self.identity,
            EntityKind::Device => &mut self.device,
            EntityKind::Context => &mut self.context,
            EntityKind::Service => panic!("services carry no trust score"),
        }
    }

    /// Current score; unseen entities start at the prior.
    pub fn score(&self, id: EntityId) -> R {
        self.map_for(id.kind).get(&id.index).copied().unwrap_or(self.prior)
    }

    /// Apply one smoothing step to the entity and return the new score.
    pub fn apply_update(&mut self, id: EntityId, anomaly: R, eta: R) -> Result<R, TrustError> {
        let current = self.score(id);
        let next = update_trust(current, anomaly, eta)?;
        self.map_for_mut(id.kind).insert(id.index, next);
        Ok(next)
    }

    /// All scores stored for a kind, ordered by entity index.
    pub fn scores_of_kind(&self, kind: EntityKind) -> Vec<(u32, R)> {
        let mut out: Vec<(u32, R)> = self.map_for(kind).iter().map(|(k, v)| (*k, *v)).collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }
}

impl<R: Real> Default for TrustState<R> {
    fn default() -> Self {
        Self::new(R::from_f64(INITIAL_TRUST).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w25() -> TrustWeights<f64> {
        TrustWeights::new(0.25, 0.25, 0.25, 0.25).unwrap()
    }

    #[test]
    fn clip_saturates() {
        assert_eq!(clip(0.5_f64).unwrap(), 0.5);
        assert_eq!(clip(1.3_f64).unwrap(), 1.0);
        assert_eq!(clip(-0.2_f64).unwrap(), 0.0);
        assert_eq!(clip(f64::NAN), Err(TrustError::NonFinite));
        assert_eq!(clip(f64::INFINITY), Err(TrustError::NonFinite));
    }

    #[test]
    fn g_map_inverts_anomaly() {
        assert_eq!(g_map(0.0_f64).unwrap(), 1.0);
        assert_eq!(g_map(1.0_f64).unwrap(), 0.0);
        assert_eq!(g_map(0.3_f64).unwrap(), 0.7);
        assert!(g_map(1.2_f64).is_err());
        assert!(g_map(-0.1_f64).is_err());
    }

    #[test]
    fn update_trust_examples() {
        // Benign fixed point.
        assert_eq!(update_trust(1.0_f64, 0.0, 0.1).unwrap(), 1.0);
        // 0.9 * 1.0 + 0.1 * 0.0
        assert!((update_trust(1.0_f64, 1.0, 0.1).unwrap() - 0.9).abs() < 1e-15);
        // 0.8 * 0.5 + 0.2 * 0.5
        assert!((update_trust(0.5_f64, 0.5, 0.2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn update_trust_rejects_bad_eta() {
        assert_eq!(update_trust(0.5_f64, 0.5, 0.0), Err(TrustError::BadAdaptationRate));
        assert_eq!(update_trust(0.5_f64, 0.5, 1.5), Err(TrustError::BadAdaptationRate));
    }

    #[test]
    fn composite_trust_examples() {
        let w = w25();
        assert_eq!(composite_trust(&w, 1.0, 1.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(composite_trust(&w, 0.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
        // 0.25 * (0.8 + 0.6 + 0.6 + 0.5)
        let theta = composite_trust(&w, 0.8, 0.6, 0.4, 0.5).unwrap();
        assert!((theta - 0.625).abs() < 1e-12);
    }

    #[test]
    fn composite_trust_rejects_out_of_range() {
        let w = w25();
        assert!(composite_trust(&w, 1.2, 0.5, 0.5, 0.5).is_err());
        assert!(composite_trust(&w, 0.5, 0.5, -0.1, 0.5).is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(TrustWeights::new(0.4_f64, 0.3, 0.2, 0.2).is_err());
        assert!(TrustWeights::new(-0.1_f64, 0.5, 0.3, 0.3).is_err());
        assert!(TrustWeights::<f64>::default().validate().is_ok());
    }

    #[test]
    fn identity_weight_passthrough() {
        let w = TrustWeights::new(1.0_f64, 0.0, 0.0, 0.0).unwrap();
        for i in 0..=10 {
            let score = f64::from(i) / 10.0;
            assert_eq!(composite_trust(&w, score, 0.3, 0.7, 0.2).unwrap(), score);
        }
    }

    #[test]
    fn benign_convergence_is_geometric() {
        let eta = 0.15_f64;
        let mut x = 0.2_f64;
        for _ in 0..200 {
            let next = update_trust(x, 0.0, eta).unwrap();
            assert!(next >= x, "benign updates never lower trust");
            let lhs = (1.0 - next).abs();
            let rhs = (1.0 - eta) * (1.0 - x).abs();
            assert!((lhs - rhs).abs() < 1e-12);
            x = next;
        }
        assert!((1.0 - x) < 1e-12);
    }

    #[test]
    fn hostile_convergence_is_geometric() {
        let eta = 0.15_f64;
        let mut x = 0.9_f64;
        for _ in 0..200 {
            let next = update_trust(x, 1.0, eta).unwrap();
            assert!(next <= x, "hostile updates never raise trust");
            assert!((next - (1.0 - eta) * x).abs() < 1e-15);
            x = next;
        }
        assert!(x < 1e-12);
    }

    #[test]
    fn trust_state_lazy_prior_and_update() {
        let mut state = TrustState::<f64>::default();
        let alice = EntityId::user(7);
        assert_eq!(state.score(alice), INITIAL_TRUST);
        let next = state.apply_update(alice, 1.0, 0.15).unwrap();
        assert!((next - 0.8 * 0.85).abs() < 1e-15);
        assert_eq!(state.score(alice), next);
        // Other entities untouched.
        assert_eq!(state.score(EntityId::user(8)), INITIAL_TRUST);
        assert_eq!(state.score(EntityId::device(7)), INITIAL_TRUST);
    }
}
