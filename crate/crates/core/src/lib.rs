//! Deterministic discrete-event simulator and evaluation harness for
//! financial zero-trust policy engines.
//!
//! The crate pits two policy decision points against the same synthetic
//! event streams: a static rule-based baseline and an adaptive engine that
//! combines composite trust scoring, financial threat bands, automation
//! runbooks, and an autonomy gate. A Monte Carlo harness aggregates the
//! scorecard (TII, SAE, SAE*, ITAL, ACF and friends), a sensitivity driver
//! sweeps configuration parameters, and a self-contained statistics module
//! validates the comparisons.
//!
//! The numeric core (trust arithmetic, metric formulas, statistical tests)
//! is generic over the scalar type via `num-traits`; the simulation layer
//! instantiates it at `f64` through the aliases below.

pub mod harness;
pub mod metrics;
pub mod model;
pub mod policy;
pub mod scalar;
pub mod scenario;
pub mod stats;
pub mod trust;

/// Scalar type used by the simulation layer.
pub type Score = f64;

/// Trust weights instantiated at the simulation scalar.
pub type Weights = trust::TrustWeights<Score>;
/// Adaptation parameters instantiated at the simulation scalar.
pub type Adaptation = trust::AdaptationParams<Score>;
/// Trust state instantiated at the simulation scalar.
pub type Trust = trust::TrustState<Score>;
