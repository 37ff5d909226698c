//! Shared domain model: entities, transactions, anomaly signals, events.
//!
//! An event is one timestamped request against a service: an acting user,
//! the device they present, the transaction payload, and the contextual
//! state the request arrives in. Attack-annotated events additionally
//! carry the scenario that produced them.

use serde::{Deserialize, Serialize};

/// Entity namespaces tracked by the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    User,
    Device,
    Context,
    Service,
}

/// Identifier unique within its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId {
    pub kind: EntityKind,
    pub index: u32,
}

impl EntityId {
    pub fn user(index: u32) -> Self {
        Self { kind: EntityKind::User, index }
    }

    pub fn device(index: u32) -> Self {
        Self { kind: EntityKind::Device, index }
    }

    pub fn context(index: u32) -> Self {
        Self { kind: EntityKind::Context, index }
    }

    pub fn service(index: u32) -> Self {
        Self { kind: EntityKind::Service, index }
    }
}

/// Access channel a transaction arrives through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Web,
    Mobile,
    Api,
    Atm,
    Pos,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::Web,
        Channel::Mobile,
        Channel::Api,
        Channel::Atm,
        Channel::Pos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Web => "web",
            Channel::Mobile => "mobile",
            Channel::Api => "api",
            Channel::Atm => "atm",
            Channel::Pos => "pos",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "web" => Some(Channel::Web),
            "mobile" => Some(Channel::Mobile),
            "api" => Some(Channel::Api),
            "atm" => Some(Channel::Atm),
            "pos" => Some(Channel::Pos),
            _ => None,
        }
    }
}

/// Adversarial scenario taxonomy. The first five drive the simulation by
/// default; the last two appear only in generated datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    CredentialCompromise,
    InsiderLateral,
    ApiAbuse,
    MoneyLaundering,
    SessionHijack,
    CardTheft,
    SyntheticIdentity,
}

impl ScenarioKind {
    /// Scenarios injected by the simulation engine.
    pub const SIMULATED: [ScenarioKind; 5] = [
        ScenarioKind::CredentialCompromise,
        ScenarioKind::InsiderLateral,
        ScenarioKind::ApiAbuse,
        ScenarioKind::MoneyLaundering,
        ScenarioKind::SessionHijack,
    ];

    /// Full taxonomy used for dataset generation.
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::CredentialCompromise,
        ScenarioKind::InsiderLateral,
        ScenarioKind::ApiAbuse,
        ScenarioKind::MoneyLaundering,
        ScenarioKind::SessionHijack,
        ScenarioKind::CardTheft,
        ScenarioKind::SyntheticIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::CredentialCompromise => "credential_compromise",
            ScenarioKind::InsiderLateral => "insider_lateral",
            ScenarioKind::ApiAbuse => "api_abuse",
            ScenarioKind::MoneyLaundering => "money_laundering",
            ScenarioKind::SessionHijack => "session_hijack",
            ScenarioKind::CardTheft => "card_theft",
            ScenarioKind::SyntheticIdentity => "synthetic_identity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// One financial transaction attached to an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub id: u64,
    /// Amount in currency units, non-negative.
    pub amount: f64,
    /// One of the configured service zones.
    pub service: EntityId,
    pub channel: Channel,
    /// Small-integer region code.
    pub geolocation: u16,
    /// Normalized transactional risk in [0, 1].
    pub normalized_risk: f64,
}

/// Anomaly scores supplied by the behavioral layer. Values near 0 are
/// benign, values near 1 strongly anomalous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalySignals {
    pub s_user: f64,
    pub s_device: f64,
    pub s_context: f64,
}

impl AnomalySignals {
    pub fn max_signal(&self) -> f64 {
        self.s_user.max(self.s_device).max(self.s_context)
    }
}

/// One timestamped request in a run's event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Strictly increasing within a run.
    pub time_index: u64,
    pub user: EntityId,
    pub device: EntityId,
    pub context: EntityId,
    pub transaction: Transaction,
    pub anomaly: AnomalySignals,
    /// Ground-truth attack annotation, `None` for benign traffic.
    pub attack: Option<ScenarioKind>,
}

impl Event {
    pub fn is_attack(&self) -> bool {
        self.attack.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for kind in ScenarioKind::ALL {
            assert_eq!(ScenarioKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(ScenarioKind::parse("phishing"), None);
    }

    #[test]
    fn channel_names_round_trip() {
        for ch in Channel::ALL {
            assert_eq!(Channel::parse(ch.name()), Some(ch));
        }
    }
}
