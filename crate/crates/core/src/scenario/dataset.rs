//! Calibrated transaction dataset generation and the adaptation layer that
//! maps transaction files back into simulation events.
//!
//! Generated datasets reproduce the reference corpus statistics: a 3.5%
//! fraud rate split across seven scenario classes, lognormal amounts fitted
//! to the reported mean/median pair, and the 1000-user / 1033-device /
//! 9-service / 5-channel / 15-region entity inventory at 10k rows.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, LogNormal};
use thiserror::Error;

use crate::model::{AnomalySignals, Channel, EntityId, Event, ScenarioKind, Transaction};
use crate::scenario::{normalized_risk, BetaShape};
use crate::trust::clip;
use crate::Score;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset size {0} too small for calibration (minimum 100)")]
    TooSmall(u64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("dataset is empty")]
    Empty,
}

/// Target fraud share of generated datasets.
pub const FRAUD_RATE: Score = 0.035;

/// Reference amount statistics the lognormal model is fitted to.
pub const AMOUNT_MEAN: Score = 352.07;
pub const AMOUNT_MEDIAN: Score = 94.22;

/// Seven-way fraud scenario distribution of the reference corpus.
pub const SCENARIO_DISTRIBUTION: [(ScenarioKind, Score); 7] = [
    (ScenarioKind::CredentialCompromise, 0.214),
    (ScenarioKind::InsiderLateral, 0.186),
    (ScenarioKind::ApiAbuse, 0.157),
    (ScenarioKind::MoneyLaundering, 0.171),
    (ScenarioKind::SessionHijack, 0.143),
    (ScenarioKind::CardTheft, 0.080),
    (ScenarioKind::SyntheticIdentity, 0.049),
];

/// The nine banking services of the dataset schema, with criticality
/// weights for the metrics layer.
pub const DATASET_SERVICES: [(&str, Score); 9] = [
    ("payments", 1.0),
    ("settlement", 2.0),
    ("risk_analytics", 1.5),
    ("aml", 1.8),
    ("customer_identity", 1.2),
    ("lending", 1.1),
    ("cards", 1.0),
    ("treasury", 1.6),
    ("administration", 0.8),
];

pub const CSV_HEADER: &str =
    "transaction_id,timestamp,user_id,device_id,service,channel,geolocation,amount,fraud_flag,fraud_scenario";

const N_REGIONS: u16 = 15;
const N_DOMESTIC: u16 = 12;
const DEVICE_RATIO: Score = 1.033;
const COMPROMISED_DEVICE_RATIO: Score = 0.063;
/// 18 months of seconds, spread uniformly across the rows.
const SPAN_SECONDS: u64 = 540 * 86_400;

/// One row of the transaction CSV schema.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionRecord {
    pub transaction_id: u64,
    pub timestamp: String,
    pub user_id: String,
    pub device_id: String,
    pub service: String,
    pub channel: Channel,
    pub geolocation: u16,
    pub amount: Score,
    pub fraud_flag: bool,
    pub fraud_scenario: Option<ScenarioKind>,
}

/// Lognormal parameters fitted to the reference mean/median:
/// `mu = ln(median)`, `sigma = sqrt(2 ln(mean/median))`.
pub fn amount_model() -> (Score, Score) {
    (AMOUNT_MEDIAN.ln(), (2.0 * (AMOUNT_MEAN / AMOUNT_MEDIAN).ln()).sqrt())
}

/// Exact per-class fraud counts: nearest-integer apportionment of the
/// scenario distribution, with the largest class absorbing the residual so
/// the counts sum to the fraud total.
pub fn scenario_counts(fraud_total: u64) -> Vec<(ScenarioKind, u64)> {
    let mut counts: Vec<(ScenarioKind, u64)> = SCENARIO_DISTRIBUTION
        .iter()
        .map(|&(kind, share)| (kind, (share * fraud_total as Score).round() as u64))
        .collect();
    let assigned: u64 = counts.iter().map(|(_, c)| *c).sum();
    let diff = fraud_total as i64 - assigned as i64;
    if diff != 0 {
        counts[0].1 = (counts[0].1 as i64 + diff).max(0) as u64;
    }
    counts
}

fn format_timestamp(epoch_seconds: u64) -> String {
    // Days since 1970-01-01 -> civil date (Howard Hinnant's algorithm).
    let days = epoch_seconds / 86_400;
    let secs = epoch_seconds % 86_400;
    let z = days as i64 + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let year = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = doy - (153 * mp + 2) / 5 + 1;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = if month <= 2 { year + 1 } else { year };
    format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        year,
        month,
        day,
        secs / 3600,
        (secs % 3600) / 60,
        secs % 60
    )
}

fn parse_timestamp(s: &str) -> Option<u64> {
    // Strict `YYYY-MM-DDThh:mm:ssZ`.
    let bytes = s.as_bytes();
    if bytes.len() != 20 || bytes[4] != b'-' || bytes[7] != b'-' || bytes[10] != b'T'
        || bytes[13] != b':' || bytes[16] != b':' || bytes[19] != b'Z'
    {
        return None;
    }
    let num = |range: std::ops::Range<usize>| s[range].parse::<i64>().ok();
    let (y, mo, d) = (num(0..4)?, num(5..7)?, num(8..10)?);
    let (h, mi, sec) = (num(11..13)?, num(14..16)?, num(17..19)?);
    if !(1..=12).contains(&mo) || !(1..=31).contains(&d) || h > 23 || mi > 59 || sec > 59 {
        return None;
    }
    let year = if mo <= 2 { y - 1 } else { y };
    let era = year.div_euclid(400);
    let yoe = year - era * 400;
    let mp = if mo > 2 { mo - 3 } else { mo + 9 };
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    let days = era * 146_097 + doe - 719_468;
    Some((days * 86_400 + h * 3600 + mi * 60 + sec) as u64)
}

/// Generate a calibrated dataset of `n` transaction records.
pub fn generate_dataset(n: u64, seed: u64) -> Result<Vec<TransactionRecord>, DatasetError> {
    if n < 100 {
        return Err(DatasetError::TooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6461_7461_7365_7431);

    let n_users = (n / 10).max(1) as u32;
    let n_devices = ((n_users as Score * DEVICE_RATIO).round() as u32).max(n_users);
    let n_compromised = ((n_devices as Score * COMPROMISED_DEVICE_RATIO).round() as u32).max(1);

    // Deterministic compromised-device pool: prefix of a shuffled id list.
    let mut device_ids: Vec<u32> = (0..n_devices).collect();
    for i in 0..n_compromised as usize {
        let j = rng.random_range(i..device_ids.len());
        device_ids.swap(i, j);
    }
    let compromised: Vec<u32> = device_ids[..n_compromised as usize].to_vec();

    let home_region: Vec<u16> =
        (0..n_users).map(|_| rng.random_range(0..N_DOMESTIC)).collect();

    // Fraud rows: exact count, scattered deterministically.
    let fraud_total = (FRAUD_RATE * n as Score).round() as u64;
    let mut positions: Vec<u64> = (0..n).collect();
    for i in 0..fraud_total as usize {
        let j = rng.random_range(i..positions.len());
        positions.swap(i, j);
    }
    let mut fraud_rows: Vec<u64> = positions[..fraud_total as usize].to_vec();
    fraud_rows.sort_unstable();
    let mut scenario_of_row: std::collections::BTreeMap<u64, ScenarioKind> =
        std::collections::BTreeMap::new();
    {
        let mut queue: Vec<ScenarioKind> = Vec::with_capacity(fraud_total as usize);
        for (kind, count) in scenario_counts(fraud_total) {
            queue.extend(std::iter::repeat_n(kind, count as usize));
        }
        // Interleave the classes across the run.
        for i in (1..queue.len()).rev() {
            let j = rng.random_range(0..=i);
            queue.swap(i, j);
        }
        for (row, kind) in fraud_rows.iter().zip(queue) {
            scenario_of_row.insert(*row, kind);
        }
    }

    let (mu, sigma) = amount_model();
    let amounts = LogNormal::new(mu, sigma).expect("fitted lognormal");
    let step = SPAN_SECONDS as Score / n as Score;
    let start = parse_timestamp("2023-01-01T00:00:00Z").unwrap();

    let mut records = Vec::with_capacity(n as usize);
    for row in 0..n {
        let scenario = scenario_of_row.get(&row).copied();
        let (user, device) = if scenario.is_some() {
            let device = compromised[rng.random_range(0..compromised.len())];
            (device % n_users, device)
        } else {
            let user = rng.random_range(0..n_users);
            // Owners are device % n_users; each user owns the devices
            // congruent to their id.
            let owned: Vec<u32> =
                (user..n_devices).step_by(n_users as usize).collect();
            (user, owned[rng.random_range(0..owned.len())])
        };
        let home = home_region[user as usize];

        let (channel, region, amount_scale) = match scenario {
            None => {
                let channel = Channel::ALL[weighted(&mut rng, &[0.34, 0.36, 0.10, 0.08, 0.12])];
                let region = if rng.random::<Score>() < 0.9 {
                    home
                } else {
                    rng.random_range(0..N_DOMESTIC)
                };
                (channel, region, 1.0)
            }
            Some(ScenarioKind::CredentialCompromise) => {
                (Channel::Web, foreign(&mut rng, home), 4.0)
            }
            Some(ScenarioKind::InsiderLateral) => (Channel::Web, home, 1.5),
            Some(ScenarioKind::ApiAbuse) => (Channel::Api, home, 0.5),
            Some(ScenarioKind::MoneyLaundering) => (Channel::Mobile, home, 1.0),
            Some(ScenarioKind::SessionHijack) => (Channel::Mobile, foreign(&mut rng, home), 2.0),
            Some(ScenarioKind::CardTheft) => (Channel::Pos, foreign(&mut rng, home), 1.0),
            Some(ScenarioKind::SyntheticIdentity) => (Channel::Web, home, 1.0),
        };

        let mut amount = amounts.sample(&mut rng) * amount_scale;
        if scenario == Some(ScenarioKind::MoneyLaundering) {
            // Laundering slices stay below a tenth of the policy cap.
            amount = amount.min(rng.random_range(100.0..995.0));
        }
        amount = (amount * 100.0).round() / 100.0;

        let service = match scenario {
            Some(ScenarioKind::InsiderLateral) => "administration",
            Some(ScenarioKind::MoneyLaundering) => "aml",
            Some(ScenarioKind::ApiAbuse) => "payments",
            _ => DATASET_SERVICES[weighted(
                &mut rng,
                &[0.30, 0.10, 0.05, 0.05, 0.20, 0.08, 0.12, 0.04, 0.06],
            )]
            .0,
        };

        records.push(TransactionRecord {
            transaction_id: row + 1,
            timestamp: format_timestamp(start + (row as Score * step) as u64),
            user_id: format!("U{user:05}"),
            device_id: format!("D{device:05}"),
            service: service.to_string(),
            channel,
            geolocation: region,
            amount,
            fraud_flag: scenario.is_some(),
            fraud_scenario: scenario,
        });
    }
    Ok(records)
}

fn weighted(rng: &mut ChaCha8Rng, weights: &[Score]) -> usize {
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

fn foreign(rng: &mut ChaCha8Rng, home: u16) -> u16 {
    let pick = rng.random_range(0..N_REGIONS - 1);
    if pick >= home {
        pick + 1
    } else {
        pick
    }
}

/// Write records in the canonical CSV schema (amounts with two decimals).
pub fn write_csv<W: Write>(records: &[TransactionRecord], mut out: W) -> Result<(), DatasetError> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.2},{},{}",
            r.transaction_id,
            r.timestamp,
            r.user_id,
            r.device_id,
            r.service,
            r.channel.name(),
            r.geolocation,
            r.amount,
            u8::from(r.fraud_flag),
            r.fraud_scenario.map_or("", |s| s.name()),
        )?;
    }
    Ok(())
}

pub fn write_csv_file(records: &[TransactionRecord], path: &Path) -> Result<(), DatasetError> {
    let file = std::fs::File::create(path)?;
    write_csv(records, std::io::BufWriter::new(file))
}

/// Ingested stream with its service registry and ordering diagnostics.
#[derive(Debug)]
pub struct IngestedDataset {
    pub events: Vec<Event>,
    /// Service name and criticality weight per service index.
    pub services: Vec<(String, Score)>,
    /// True when rows arrived out of timestamp order and were re-sorted.
    pub reordered: bool,
}

fn parse_entity(field: &str, prefix: char, row: usize) -> Result<u32, DatasetError> {
    field
        .strip_prefix(prefix)
        .and_then(|digits| digits.parse::<u32>().ok())
        .ok_or_else(|| DatasetError::BadRow {
            row,
            message: format!("malformed entity id `{field}` (expected {prefix}<digits>)"),
        })
}

/// Map a transaction file onto the simulation event format.
///
/// Rows are validated against the schema (unknown services or channels and
/// inconsistent fraud annotations are errors), sorted by timestamp when
/// necessary, and given anomaly signals synthesized from the fraud
/// scenario signature, seeded by the row's transaction id.
pub fn ingest_dataset<R: Read>(reader: R) -> Result<IngestedDataset, DatasetError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let found = csv_reader.headers()?.iter().collect::<Vec<_>>().join(",");
        if found != CSV_HEADER {
            return Err(DatasetError::BadHeader {
                expected: CSV_HEADER.to_string(),
                found,
            });
        }
    }

    let services: Vec<(String, Score)> =
        DATASET_SERVICES.iter().map(|&(name, w)| (name.to_string(), w)).collect();

    let mut rows: Vec<(u64, TransactionRecord)> = Vec::new();
    for (idx, result) in csv_reader.records().enumerate() {
        let row = idx + 2; // header is line 1
        let record = result?;
        let field = |i: usize, name: &str| -> Result<String, DatasetError> {
            record
                .get(i)
                .map(str::to_string)
                .ok_or_else(|| DatasetError::BadRow { row, message: format!("missing {name}") })
        };
        let bad = |message: String| DatasetError::BadRow { row, message };

        let transaction_id = field(0, "transaction_id")?
            .parse::<u64>()
            .map_err(|e| bad(format!("transaction_id: {e}")))?;
        let timestamp = field(1, "timestamp")?;
        let ts = parse_timestamp(&timestamp)
            .ok_or_else(|| bad(format!("unparseable timestamp `{timestamp}`")))?;
        let user_id = field(2, "user_id")?;
        let device_id = field(3, "device_id")?;
        parse_entity(&user_id, 'U', row)?;
        parse_entity(&device_id, 'D', row)?;
        let service = field(4, "service")?;
        if !services.iter().any(|(name, _)| *name == service) {
            return Err(bad(format!("unknown service `{service}`")));
        }
        let channel_name = field(5, "channel")?;
        let channel = Channel::parse(&channel_name)
            .ok_or_else(|| bad(format!("unknown channel `{channel_name}`")))?;
        let geolocation = field(6, "geolocation")?
            .parse::<u16>()
            .map_err(|e| bad(format!("geolocation: {e}")))?;
        if geolocation >= N_REGIONS {
            return Err(bad(format!("geolocation {geolocation} outside 0..{N_REGIONS}")));
        }
        let amount = field(7, "amount")?
            .parse::<Score>()
            .map_err(|e| bad(format!("amount: {e}")))?;
        if !(amount.is_finite() && amount >= 0.0) {
            return Err(bad(format!("amount {amount} must be non-negative")));
        }
        let fraud_flag = match field(8, "fraud_flag")?.as_str() {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("fraud_flag `{other}` must be 0 or 1"))),
        };
        let scenario_name = field(9, "fraud_scenario")?;
        let fraud_scenario = if scenario_name.is_empty() {
            None
        } else {
            Some(
                ScenarioKind::parse(&scenario_name)
                    .ok_or_else(|| bad(format!("unknown fraud_scenario `{scenario_name}`")))?,
            )
        };
        if fraud_flag != fraud_scenario.is_some() {
            return Err(bad("fraud_scenario must be non-empty exactly when fraud_flag=1".into()));
        }

        rows.push((
            ts,
            TransactionRecord {
                transaction_id,
                timestamp,
                user_id,
                device_id,
                service,
                channel,
                geolocation,
                amount,
                fraud_flag,
                fraud_scenario,
            },
        ));
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }

    let reordered = rows.windows(2).any(|w| w[0].0 > w[1].0);
    if reordered {
        rows.sort_by_key(|(ts, r)| (*ts, r.transaction_id));
    }

    let events = rows
        .iter()
        .enumerate()
        .map(|(i, (_, r))| record_to_event(r, i as u64, &services))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(IngestedDataset { events, services, reordered })
}

pub fn ingest_dataset_file(path: &Path) -> Result<IngestedDataset, DatasetError> {
    let file = std::fs::File::open(path)?;
    ingest_dataset(std::io::BufReader::new(file))
}

fn record_to_event(
    record: &TransactionRecord,
    time_index: u64,
    services: &[(String, Score)],
) -> Result<Event, DatasetError> {
    let user = parse_entity(&record.user_id, 'U', time_index as usize + 2)?;
    let device = parse_entity(&record.device_id, 'D', time_index as usize + 2)?;
    let service_idx = services
        .iter()
        .position(|(name, _)| *name == record.service)
        .expect("service validated during parse") as u32;
    let channel_idx = Channel::ALL.iter().position(|&c| c == record.channel).unwrap() as u32;

    Ok(Event {
        time_index,
        user: EntityId::user(user),
        device: EntityId::device(device),
        context: EntityId::context(channel_idx * N_REGIONS as u32 + record.geolocation as u32),
        transaction: Transaction {
            id: record.transaction_id,
            amount: record.amount,
            service: EntityId::service(service_idx),
            channel: record.channel,
            geolocation: record.geolocation,
            normalized_risk: normalized_risk(
                record.amount,
                record.channel,
                record.geolocation,
                10_000.0,
                N_DOMESTIC,
            ),
        },
        anomaly: synthesize_signals(record),
        attack: record.fraud_scenario,
    })
}

/// Anomaly signals for an ingested row, deterministic in the transaction id.
fn synthesize_signals(record: &TransactionRecord) -> AnomalySignals {
    let mut rng = ChaCha8Rng::seed_from_u64(record.transaction_id ^ 0x7369_676e_616c_7331);
    let draw = |shape: BetaShape, rng: &mut ChaCha8Rng| {
        Beta::new(shape.alpha, shape.beta).expect("static shape").sample(rng)
    };
    let benign = BetaShape::new(1.0, 9.0);
    let hot = BetaShape::new(6.0, 2.0);
    let side = BetaShape::new(2.0, 5.0);
    match record.fraud_scenario {
        None => AnomalySignals {
            s_user: draw(benign, &mut rng),
            s_device: draw(benign, &mut rng),
            s_context: draw(benign, &mut rng),
        },
        Some(kind) => {
            let (u, d, c) = match kind {
                ScenarioKind::CredentialCompromise => (hot, side, side),
                ScenarioKind::InsiderLateral => (side, side, hot),
                ScenarioKind::ApiAbuse => (side, side, hot),
                ScenarioKind::MoneyLaundering => {
                    let base = 0.30 + 0.40 * draw(BetaShape::new(4.0, 4.0), &mut rng);
                    return AnomalySignals {
                        s_user: clip(base + 0.1).expect("finite"),
                        s_device: draw(benign, &mut rng),
                        s_context: draw(side, &mut rng),
                    };
                }
                ScenarioKind::SessionHijack => (side, hot, side),
                ScenarioKind::CardTheft => (side, hot, side),
                ScenarioKind::SyntheticIdentity => (hot, side, side),
            };
            AnomalySignals {
                s_user: draw(u, &mut rng),
                s_device: draw(d, &mut rng),
                s_context: draw(c, &mut rng),
            }
        }
    }
}
