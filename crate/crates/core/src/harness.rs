//! Experiment orchestration: single runs, Monte Carlo batches over both
//! decision engines, aggregate reporting, the engine comparison protocol,
//! OFAT sensitivity sweeps, and simulation-vs-empirical correlation.
//!
//! Runs are paired: when both engines are selected they consume the
//! identical event stream for each run index, so every observed metric
//! difference comes from the policy logic alone. Run `i` is seeded with
//! `base_seed + i`; runs execute in parallel and are aggregated in run
//! order, which makes parallel and serial execution byte-identical.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{
    ChallengeModel, DecisionRecord, MetricsAccumulator, MetricsConfig, MetricsError, RunMetrics,
    ScenarioOutcomes,
};
use crate::model::Event;
use crate::policy::{BaselineEngine, BaselineRules, PolicyConfig, PolicyError, SecurebankEngine};
use crate::scenario::{EventGenerator, GeneratorConfig, ScenarioError};
use crate::stats::{
    bonferroni, cohens_d, mann_whitney_u, pearson_r, shapiro_wilk, welch_t, Sample, StatsError,
};
use crate::Score;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("run config invalid: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("unknown sensitivity parameter `{0}`")]
    UnknownParameter(String),
    #[error("sensitivity grid for `{0}` is empty")]
    EmptyGrid(String),
    #[error("correlation undefined: need at least 2 paired points, have {0}")]
    TooFewPoints(usize),
    #[error("metric vectors disagree: {0}")]
    VectorMismatch(String),
}

/// Which decision engine to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Baseline,
    Securebank,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Baseline => "baseline",
            EngineKind::Securebank => "securebank",
        }
    }
}

/// Metrics-layer knobs that are not part of the policy or generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTuning {
    /// Trajectory window length for the trust-adaptation metric.
    pub window_len: usize,
    pub legit_pass_rate: Score,
    pub attacker_pass_rate: Score,
    pub acf_mu: Score,
    pub trp_delta: Score,
    pub ass_lambda: Score,
}

impl Default for MetricsTuning {
    fn default() -> Self {
        Self {
            window_len: 10,
            legit_pass_rate: 1.0,
            attacker_pass_rate: 0.0,
            acf_mu: 1.0,
            trp_delta: 1.0,
            ass_lambda: 1.0,
        }
    }
}

/// Complete experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub runs: u32,
    pub events_per_run: u64,
    pub base_seed: u64,
    pub engines: Vec<EngineKind>,
    pub generator: GeneratorConfig,
    pub policy: PolicyConfig,
    pub baseline_rules: BaselineRules,
    pub metrics: MetricsTuning,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            runs: 30,
            events_per_run: 5000,
            base_seed: 42,
            engines: vec![EngineKind::Baseline, EngineKind::Securebank],
            generator: GeneratorConfig::default(),
            policy: PolicyConfig::default(),
            baseline_rules: BaselineRules::default(),
            metrics: MetricsTuning::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::BadConfig("runs must be at least 1".into()));
        }
        if self.events_per_run == 0 {
            return Err(HarnessError::BadConfig("events_per_run must be at least 1".into()));
        }
        if self.engines.is_empty() {
            return Err(HarnessError::BadConfig("no engines selected".into()));
        }
        self.generator.validate()?;
        self.policy.validate()?;
        self.baseline_rules.validate()?;
        if self.metrics.window_len < 2 {
            return Err(HarnessError::BadConfig("window_len must be at least 2".into()));
        }
        Ok(())
    }

    /// Engines in deterministic report order.
    pub fn ordered_engines(&self) -> Vec<EngineKind> {
        let mut engines = self.engines.clone();
        engines.sort();
        engines.dedup();
        engines
    }

    fn metrics_config(&self, engine: EngineKind, run_seed: u64) -> MetricsConfig {
        let zones_total = self.generator.service_zones.len() as u64;
        MetricsConfig {
            services: self.generator.service_zones.clone(),
            window_len: self.metrics.window_len,
            epsilon: self.policy.adaptation.epsilon,
            challenge: ChallengeModel {
                legit_pass_rate: self.metrics.legit_pass_rate,
                attacker_pass_rate: self.metrics.attacker_pass_rate,
                salt: run_seed,
            },
            acf_mu: self.metrics.acf_mu,
            trp_delta: self.metrics.trp_delta,
            ass_lambda: self.metrics.ass_lambda,
            zones_adaptive: match engine {
                EngineKind::Baseline => 0,
                EngineKind::Securebank => zones_total,
            },
            zones_total,
        }
    }
}

/// Generate the event stream for one run: run `i` uses `base_seed + i`.
pub fn run_stream(config: &RunConfig, run_index: u32) -> Result<Vec<Event>, HarnessError> {
    if run_index >= config.runs {
        return Err(HarnessError::BadConfig(format!(
            "run index {run_index} outside 0..{}",
            config.runs
        )));
    }
    let mut generator_config = config.generator.clone();
    generator_config.n_events = config.events_per_run;
    generator_config.base_seed = config.base_seed;
    let mut generator =
        EventGenerator::new(generator_config, config.base_seed + run_index as u64)?;
    Ok(generator.stream())
}

/// Drive one engine over a prepared stream.
pub fn run_engine(
    config: &RunConfig,
    engine: EngineKind,
    events: &[Event],
    run_index: u32,
) -> Result<(RunMetrics, Vec<DecisionRecord>), HarnessError> {
    let run_seed = config.base_seed + run_index as u64;
    let mut accumulator = MetricsAccumulator::new(config.metrics_config(engine, run_seed));
    let mut log = Vec::with_capacity(events.len());
    match engine {
        EngineKind::Baseline => {
            let mut pdp =
                BaselineEngine::new(config.baseline_rules.clone(), config.policy.initial_trust)?;
            for event in events {
                let record = pdp.decide(event);
                accumulator.record(&record)?;
                log.push(record);
            }
        }
        EngineKind::Securebank => {
            let mut pdp = SecurebankEngine::new(
                config.policy.clone(),
                config.generator.service_weights(),
            )?;
            for event in events {
                let record = pdp.decide(event);
                accumulator.record(&record)?;
                log.push(record);
            }
        }
    }
    Ok((accumulator.finalize()?, log))
}

/// One run of one engine, stream included: the spec-level entry point.
pub fn run_once(
    config: &RunConfig,
    run_index: u32,
    engine: EngineKind,
) -> Result<(RunMetrics, Vec<DecisionRecord>), HarnessError> {
    config.validate()?;
    let events = run_stream(config, run_index)?;
    run_engine(config, engine, &events, run_index)
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Mean / sample standard deviation / extremes of one metric across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Score,
    pub std: Score,
    pub min: Score,
    pub max: Score,
    pub n: u32,
}

impl MetricSummary {
    /// Sample statistics with the n-1 denominator; a single observation
    /// reports zero spread.
    pub fn from_values(values: &[Score]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<Score>() / n as Score;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<Score>() / (n - 1) as Score)
                .sqrt()
        };
        let min = values.iter().copied().fold(Score::INFINITY, Score::min);
        let max = values.iter().copied().fold(Score::NEG_INFINITY, Score::max);
        Self { mean, std, min, max, n: n as u32 }
    }
}

/// Per-engine aggregate across all runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineAggregate {
    pub engine: String,
    pub metrics: BTreeMap<String, MetricSummary>,
    pub per_service_tii: BTreeMap<String, MetricSummary>,
    /// Attack outcomes summed over all runs.
    pub per_scenario: BTreeMap<String, ScenarioOutcomes>,
    /// Raw per-run scorecards, ordered by run index.
    pub runs: Vec<RunMetrics>,
}

/// Aggregate report over all engines and runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub runs: u32,
    pub events_per_run: u64,
    pub base_seed: u64,
    pub engines: Vec<EngineAggregate>,
}

impl AggregateReport {
    pub fn engine(&self, name: &str) -> Option<&EngineAggregate> {
        self.engines.iter().find(|e| e.engine == name)
    }
}

/// Metrics aggregated with optional values: a summary appears when every
/// run defined the metric.
const OPTIONAL_METRICS: [&str; 5] = ["precision", "recall", "f1", "fpr", "fnr"];

fn aggregate_engine(engine: EngineKind, runs: Vec<RunMetrics>) -> EngineAggregate {
    let mut metrics = BTreeMap::new();
    for name in RunMetrics::SCALAR_NAMES {
        let values: Vec<Score> = runs.iter().map(|r| r.scalar(name).unwrap()).collect();
        metrics.insert(name.to_string(), MetricSummary::from_values(&values));
    }
    for name in OPTIONAL_METRICS {
        let values: Vec<Score> = runs.iter().filter_map(|r| r.scalar(name)).collect();
        if values.len() == runs.len() {
            metrics.insert(name.to_string(), MetricSummary::from_values(&values));
        }
    }

    let mut per_service_tii = BTreeMap::new();
    if let Some(first) = runs.first() {
        for service in first.per_service_tii.keys() {
            let values: Vec<Score> =
                runs.iter().filter_map(|r| r.per_service_tii.get(service).copied()).collect();
            if !values.is_empty() {
                per_service_tii.insert(service.clone(), MetricSummary::from_values(&values));
            }
        }
    }

    let mut per_scenario: BTreeMap<String, ScenarioOutcomes> = BTreeMap::new();
    for run in &runs {
        for (name, outcomes) in &run.per_scenario {
            let entry = per_scenario.entry(name.clone()).or_default();
            entry.allowed += outcomes.allowed;
            entry.challenged += outcomes.challenged;
            entry.blocked += outcomes.blocked;
        }
    }

    EngineAggregate {
        engine: engine.name().to_string(),
        metrics,
        per_service_tii,
        per_scenario,
        runs,
    }
}

/// Run the full Monte Carlo batch. Runs execute in parallel; the report is
/// assembled in (engine, run index) order so output does not depend on
/// scheduling.
pub fn monte_carlo(config: &RunConfig) -> Result<AggregateReport, HarnessError> {
    config.validate()?;
    let engines = config.ordered_engines();

    let mut per_run: Vec<(u32, Vec<(EngineKind, RunMetrics)>)> = (0..config.runs)
        .into_par_iter()
        .map(|run_index| -> Result<_, HarnessError> {
            let events = run_stream(config, run_index)?;
            let mut results = Vec::with_capacity(engines.len());
            for &engine in &engines {
                let (metrics, _) = run_engine(config, engine, &events, run_index)?;
                results.push((engine, metrics));
            }
            Ok((run_index, results))
        })
        .collect::<Result<Vec<_>, _>>()?;
    per_run.sort_by_key(|(idx, _)| *idx);

    let engine_aggregates = engines
        .iter()
        .map(|&engine| {
            let runs: Vec<RunMetrics> = per_run
                .iter()
                .map(|(_, results)| {
                    results
                        .iter()
                        .find(|(e, _)| *e == engine)
                        .map(|(_, m)| m.clone())
                        .expect("every run covers every engine")
                })
                .collect();
            aggregate_engine(engine, runs)
        })
        .collect();

    Ok(AggregateReport {
        runs: config.runs,
        events_per_run: config.events_per_run,
        base_seed: config.base_seed,
        engines: engine_aggregates,
    })
}

/// Drive the configured engines over an externally ingested stream (one
/// run per engine, no generator involved).
pub fn run_ingested(
    config: &RunConfig,
    events: &[Event],
    services: &[(String, Score)],
) -> Result<Vec<(EngineKind, RunMetrics, Vec<DecisionRecord>)>, HarnessError> {
    let mut adapted = config.clone();
    adapted.generator.service_zones = services.to_vec();
    adapted.events_per_run = events.len() as u64;
    let mut out = Vec::new();
    for engine in adapted.ordered_engines() {
        let (metrics, log) = run_engine(&adapted, engine, events, 0)?;
        out.push((engine, metrics, log));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Engine comparison protocol
// ---------------------------------------------------------------------------

/// Metrics compared between engines and corrected as one family.
pub const HEADLINE_METRICS: [&str; 3] = ["tii", "sae", "ital"];

/// Normality verdict for one engine's sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapiroSummary {
    pub w: Option<Score>,
    pub p_value: Option<Score>,
    pub normal: bool,
    pub note: Option<String>,
}

/// One metric's between-engine test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTest {
    pub metric: String,
    pub shapiro: BTreeMap<String, ShapiroSummary>,
    /// "welch" or "mann_whitney", chosen by the normality check.
    pub test: String,
    pub statistic: Score,
    pub df: Option<Score>,
    pub p_value: Score,
    pub cohens_d: Option<Score>,
    pub rank_biserial: Option<Score>,
    pub significant_after_bonferroni: bool,
}

/// Statistical comparison of the two engines over the headline family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTests {
    pub family_alpha: Score,
    pub bonferroni_threshold: Score,
    pub normality_alpha: Score,
    pub tests: Vec<MetricTest>,
}

fn shapiro_summary(sample: &Sample<Score>, alpha: Score) -> ShapiroSummary {
    match shapiro_wilk(sample) {
        Ok(result) => ShapiroSummary {
            w: Some(result.statistic),
            p_value: Some(result.p_value),
            normal: result.p_value >= alpha,
            note: None,
        },
        // Degenerate samples (constant values, size bounds) cannot support
        // the normal-theory route.
        Err(e) => ShapiroSummary { w: None, p_value: None, normal: false, note: Some(e.to_string()) },
    }
}

/// Compare two engines' per-run samples metric by metric: Shapiro-Wilk
/// gates the Welch vs Mann-Whitney choice, Bonferroni corrects the family,
/// and both effect sizes are reported where defined.
pub fn compare_engines(
    report: &AggregateReport,
    metrics: &[&str],
    family_alpha: Score,
    normality_alpha: Score,
) -> Result<StatTests, HarnessError> {
    let baseline = report
        .engine(EngineKind::Baseline.name())
        .ok_or_else(|| HarnessError::BadConfig("report lacks baseline engine".into()))?;
    let securebank = report
        .engine(EngineKind::Securebank.name())
        .ok_or_else(|| HarnessError::BadConfig("report lacks securebank engine".into()))?;

    let mut tests = Vec::new();
    let mut p_values = Vec::new();
    for &metric in metrics {
        let values = |agg: &EngineAggregate| -> Result<Sample<Score>, HarnessError> {
            let v: Vec<Score> = agg.runs.iter().filter_map(|r| r.scalar(metric)).collect();
            if v.len() != agg.runs.len() {
                return Err(HarnessError::BadConfig(format!(
                    "metric {metric} undefined in some runs"
                )));
            }
            Ok(Sample::new(format!("{}/{metric}", agg.engine), v)?)
        };
        let base_sample = values(baseline)?;
        let sb_sample = values(securebank)?;

        let mut shapiro = BTreeMap::new();
        let base_normal = shapiro_summary(&base_sample, normality_alpha);
        let sb_normal = shapiro_summary(&sb_sample, normality_alpha);
        let use_welch = base_normal.normal && sb_normal.normal;
        shapiro.insert(baseline.engine.clone(), base_normal);
        shapiro.insert(securebank.engine.clone(), sb_normal);

        let rank = mann_whitney_u(&sb_sample, &base_sample)?;
        let d = cohens_d(&sb_sample, &base_sample).ok();
        let (test, statistic, df, p_value) = if use_welch {
            let t = welch_t(&sb_sample, &base_sample)?;
            ("welch".to_string(), t.statistic, t.df, t.p_value)
        } else {
            ("mann_whitney".to_string(), rank.statistic, None, rank.p_value)
        };

        p_values.push(p_value);
        tests.push(MetricTest {
            metric: metric.to_string(),
            shapiro,
            test,
            statistic,
            df,
            p_value,
            cohens_d: d,
            rank_biserial: rank.effect_size,
            significant_after_bonferroni: false,
        });
    }

    let (threshold, flags) = bonferroni(&p_values, family_alpha)?;
    for (test, flag) in tests.iter_mut().zip(flags) {
        test.significant_after_bonferroni = flag;
    }

    Ok(StatTests {
        family_alpha,
        bonferroni_threshold: threshold,
        normality_alpha,
        tests,
    })
}

// ---------------------------------------------------------------------------
// OFAT sensitivity
// ---------------------------------------------------------------------------

/// Parameters the sweep driver knows how to vary.
pub const SWEEPABLE_PARAMETERS: [&str; 8] = [
    "eta_identity",
    "eta_device",
    "eta_context",
    "theta_block",
    "theta_stepup",
    "acf_autonomy_floor",
    "amount_cap",
    "attack_probability",
];

/// Default OFAT grid: adaptation speed, step-up threshold, attack rate.
pub fn default_sensitivity_grid() -> Vec<(String, Vec<Score>)> {
    vec![
        ("eta_identity".to_string(), vec![0.05, 0.15, 0.30]),
        ("theta_stepup".to_string(), vec![0.65, 0.75, 0.85]),
        ("attack_probability".to_string(), vec![0.02, 0.05, 0.10]),
    ]
}

fn apply_parameter(config: &mut RunConfig, name: &str, value: Score) -> Result<(), HarnessError> {
    match name {
        "eta_identity" => config.policy.adaptation.eta_identity = value,
        "eta_device" => config.policy.adaptation.eta_device = value,
        "eta_context" => config.policy.adaptation.eta_context = value,
        "theta_block" => config.policy.theta_block = value,
        "theta_stepup" => config.policy.theta_stepup = value,
        "acf_autonomy_floor" => config.policy.acf_autonomy_floor = value,
        "amount_cap" => {
            config.policy.amount_cap = value;
            config.generator.amount_cap = value;
        }
        "attack_probability" => config.generator.attack_probability = value,
        other => return Err(HarnessError::UnknownParameter(other.to_string())),
    }
    Ok(())
}

/// One grid point: the varied value and per-engine metric means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: Score,
    pub metrics: BTreeMap<String, BTreeMap<String, Score>>,
}

/// One parameter's sweep with coefficient-of-variation summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSweep {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    /// engine -> metric -> CV of the point means; absent when the mean of
    /// means is zero.
    pub cv: BTreeMap<String, BTreeMap<String, Option<Score>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub runs_per_point: u32,
    pub parameters: Vec<ParameterSweep>,
}

/// One-factor-at-a-time sweep: vary each parameter alone from the base
/// config, run the Monte Carlo batch per grid value, and summarize each
/// headline metric's dispersion as sigma/mu over the grid.
pub fn sensitivity_ofat(
    base: &RunConfig,
    grid: &[(String, Vec<Score>)],
    runs_per_point: Option<u32>,
) -> Result<SensitivityReport, HarnessError> {
    base.validate()?;
    let runs = runs_per_point.unwrap_or(base.runs);
    let mut parameters = Vec::new();
    for (name, values) in grid {
        if values.is_empty() {
            return Err(HarnessError::EmptyGrid(name.clone()));
        }
        // Surface unknown names before spending any simulation time.
        apply_parameter(&mut base.clone(), name, values[0])?;

        let mut points = Vec::new();
        for &value in values {
            let mut config = base.clone();
            config.runs = runs;
            apply_parameter(&mut config, name, value)?;
            config
                .validate()
                .map_err(|e| HarnessError::BadConfig(format!("{name}={value}: {e}")))?;
            let report = monte_carlo(&config)?;
            let mut metrics = BTreeMap::new();
            for engine in &report.engines {
                let mut per_metric = BTreeMap::new();
                for &metric in &HEADLINE_METRICS {
                    per_metric
                        .insert(metric.to_string(), engine.metrics[metric].mean);
                }
                metrics.insert(engine.engine.clone(), per_metric);
            }
            points.push(SweepPoint { value, metrics });
        }

        let mut cv = BTreeMap::new();
        if let Some(first) = points.first() {
            for engine in first.metrics.keys() {
                let mut per_metric = BTreeMap::new();
                for &metric in &HEADLINE_METRICS {
                    let values: Vec<Score> =
                        points.iter().map(|p| p.metrics[engine][metric]).collect();
                    let summary = MetricSummary::from_values(&values);
                    let value = if summary.mean == 0.0 {
                        None
                    } else {
                        Some(summary.std / summary.mean)
                    };
                    per_metric.insert(metric.to_string(), value);
                }
                cv.insert(engine.clone(), per_metric);
            }
        }
        parameters.push(ParameterSweep { parameter: name.clone(), points, cv });
    }
    Ok(SensitivityReport { runs_per_point: runs, parameters })
}

// ---------------------------------------------------------------------------
// Simulation vs empirical comparison
// ---------------------------------------------------------------------------

/// Metric set used for the simulation/empirical correlation.
pub const COMPARISON_METRICS: [&str; 5] = ["tii", "sae", "sae_star", "ital", "acf"];

/// Ordered (engine, metric, value) triples.
pub type MetricVector = Vec<(String, String, Score)>;

pub fn metric_vector_from_aggregate(report: &AggregateReport) -> MetricVector {
    let mut out = Vec::new();
    for engine in &report.engines {
        for &metric in &COMPARISON_METRICS {
            out.push((engine.engine.clone(), metric.to_string(), engine.metrics[metric].mean));
        }
    }
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    out
}

pub fn metric_vector_from_runs(runs: &[(String, RunMetrics)]) -> MetricVector {
    let mut out = Vec::new();
    for (engine, metrics) in runs {
        for &metric in &COMPARISON_METRICS {
            out.push((engine.clone(), metric.to_string(), metrics.scalar(metric).unwrap()));
        }
    }
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    out
}

/// Per-pair error entry of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub engine: String,
    pub metric: String,
    pub simulated: Score,
    pub empirical: Score,
    pub absolute_error: Score,
    pub relative_error: Option<Score>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalComparison {
    pub pearson_r: Score,
    pub rows: Vec<ComparisonRow>,
}

/// Pearson correlation between the simulated and empirical metric vectors
/// over all (engine, metric) pairs, plus a signed error table.
pub fn compare_empirical(
    simulated: &MetricVector,
    empirical: &MetricVector,
) -> Result<EmpiricalComparison, HarnessError> {
    if simulated.len() != empirical.len() {
        return Err(HarnessError::VectorMismatch(format!(
            "{} simulated vs {} empirical entries",
            simulated.len(),
            empirical.len()
        )));
    }
    for (s, e) in simulated.iter().zip(empirical.iter()) {
        if s.0 != e.0 || s.1 != e.1 {
            return Err(HarnessError::VectorMismatch(format!(
                "({}, {}) vs ({}, {})",
                s.0, s.1, e.0, e.1
            )));
        }
    }
    if simulated.len() < 2 {
        return Err(HarnessError::TooFewPoints(simulated.len()));
    }
    let x: Vec<Score> = simulated.iter().map(|(_, _, v)| *v).collect();
    let y: Vec<Score> = empirical.iter().map(|(_, _, v)| *v).collect();
    let r = pearson_r(&x, &y)?;
    let rows = simulated
        .iter()
        .zip(empirical.iter())
        .map(|((engine, metric, sim), (_, _, emp))| ComparisonRow {
            engine: engine.clone(),
            metric: metric.clone(),
            simulated: *sim,
            empirical: *emp,
            absolute_error: emp - sim,
            relative_error: if *sim == 0.0 { None } else { Some((emp - sim) / sim) },
        })
        .collect();
    Ok(EmpiricalComparison { pearson_r: r, rows })
}
