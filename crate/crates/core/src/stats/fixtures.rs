//! Frozen oracle fixtures for the statistical test suite.
//!
//! Each fixture is a pair of samples together with reference results
//! computed once by an independent reference implementation and recorded
//! in `fixtures_data.inc`. The suite passes when every statistic agrees
//! within [`STAT_TOL`] and every p-value within [`P_TOL`] absolute.

use super::{bonferroni, cohens_d, mann_whitney_u, pearson_r, shapiro_wilk, welch_t, Sample};

/// Absolute tolerance on test statistics.
pub const STAT_TOL: f64 = 1e-6;
/// Absolute tolerance on p-values.
pub const P_TOL: f64 = 1e-3;

/// A sample pair with reference results for every applicable test.
#[derive(Debug)]
pub struct SamplePairFixture {
    pub name: &'static str,
    pub a: &'static [f64],
    pub b: &'static [f64],
    /// (W, p) for sample a.
    pub shapiro_a: (f64, f64),
    /// (W, p) for sample b.
    pub shapiro_b: (f64, f64),
    /// (t, df, p).
    pub welch: (f64, f64, f64),
    /// (U of a, two-sided p).
    pub mann_whitney: (f64, f64),
    pub cohens_d: f64,
    /// Present only for equal-length pairs.
    pub pearson: Option<f64>,
}

pub const FIXTURES: &[SamplePairFixture] = include!("fixtures_data.inc");

/// One comparison against a frozen reference value.
#[derive(Debug, Clone)]
pub struct FixtureCheck {
    pub fixture: &'static str,
    pub quantity: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl FixtureCheck {
    fn new(fixture: &'static str, quantity: &str, expected: f64, actual: f64, tol: f64) -> Self {
        Self {
            fixture,
            quantity: quantity.to_string(),
            expected,
            actual,
            tolerance: tol,
            passed: (expected - actual).abs() <= tol,
        }
    }
}

/// Run every fixture through the implementation and report each comparison.
pub fn run_all() -> Vec<FixtureCheck> {
    let mut checks = Vec::new();
    for fx in FIXTURES {
        let a = Sample::new(format!("{}/a", fx.name), fx.a.to_vec()).expect("fixture sample");
        let b = Sample::new(format!("{}/b", fx.name), fx.b.to_vec()).expect("fixture sample");

        let sw_a = shapiro_wilk(&a).expect("fixture shapiro a");
        checks.push(FixtureCheck::new(fx.name, "shapiro_a.w", fx.shapiro_a.0, sw_a.statistic, STAT_TOL));
        checks.push(FixtureCheck::new(fx.name, "shapiro_a.p", fx.shapiro_a.1, sw_a.p_value, P_TOL));
        let sw_b = shapiro_wilk(&b).expect("fixture shapiro b");
        checks.push(FixtureCheck::new(fx.name, "shapiro_b.w", fx.shapiro_b.0, sw_b.statistic, STAT_TOL));
        checks.push(FixtureCheck::new(fx.name, "shapiro_b.p", fx.shapiro_b.1, sw_b.p_value, P_TOL));

        let w = welch_t(&a, &b).expect("fixture welch");
        checks.push(FixtureCheck::new(fx.name, "welch.t", fx.welch.0, w.statistic, STAT_TOL));
        checks.push(FixtureCheck::new(fx.name, "welch.df", fx.welch.1, w.df.unwrap(), STAT_TOL));
        checks.push(FixtureCheck::new(fx.name, "welch.p", fx.welch.2, w.p_value, P_TOL));

        let mw = mann_whitney_u(&a, &b).expect("fixture mann-whitney");
        checks.push(FixtureCheck::new(fx.name, "mann_whitney.u", fx.mann_whitney.0, mw.statistic, STAT_TOL));
        checks.push(FixtureCheck::new(fx.name, "mann_whitney.p", fx.mann_whitney.1, mw.p_value, P_TOL));

        let d = cohens_d(&a, &b).expect("fixture cohens d");
        checks.push(FixtureCheck::new(fx.name, "cohens_d", fx.cohens_d, d, STAT_TOL));

        if let Some(expected_r) = fx.pearson {
            let r = pearson_r(&a.values, &b.values).expect("fixture pearson");
            checks.push(FixtureCheck::new(fx.name, "pearson.r", expected_r, r, STAT_TOL));
        }
    }

    // Correction threshold for the three-metric family.
    let (threshold, _) = bonferroni(&[0.01, 0.01, 0.01], 0.05).expect("bonferroni");
    checks.push(FixtureCheck::new("bonferroni_m3", "threshold", 0.016667, threshold, 5e-7));

    checks
}

pub fn all_pass(checks: &[FixtureCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_corpus_is_large_enough() {
        assert!(FIXTURES.len() >= 10);
    }

    #[test]
    fn every_fixture_matches_reference() {
        let checks = run_all();
        let failures: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(
            failures.is_empty(),
            "{} fixture checks failed, first: {:?}",
            failures.len(),
            failures.first()
        );
    }
}
