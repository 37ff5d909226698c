//! Self-contained statistical validation suite: normality testing,
//! two-sample tests, multiple-comparison correction, effect sizes,
//! correlation, and coefficient of variation.
//!
//! All tests are two-sided. Nothing here depends on an external statistics
//! crate; the distribution machinery lives in [`dist`].

pub mod dist;
pub mod fixtures;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use dist::{normal_cdf, normal_ppf, t_two_sided_p};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample must contain at least {0} values")]
    TooFewValues(usize),
    #[error("sample size {0} outside supported range [{1}, {2}]")]
    SizeOutOfRange(usize, usize, usize),
    #[error("all sample values must be finite")]
    NonFinite,
    #[error("zero variance")]
    ZeroVariance,
    #[error("undefined correlation")]
    UndefinedCorrelation,
    #[error("samples must have equal length")]
    LengthMismatch,
    #[error("mean is zero, coefficient of variation undefined")]
    ZeroMean,
    #[error("family alpha must lie in (0, 1)")]
    BadAlpha,
}

/// A labelled sample of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample<R> {
    pub label: String,
    pub values: Vec<R>,
}

impl<R: Real> Sample<R> {
    pub fn new(label: impl Into<String>, values: Vec<R>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::TooFewValues(1));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(Self { label: label.into(), values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> R {
        let n = R::from_usize(self.len()).unwrap();
        self.values.iter().copied().fold(R::zero(), |a, b| a + b) / n
    }

    /// Sample variance (n - 1 denominator); zero for a single observation.
    pub fn variance(&self) -> R {
        if self.len() < 2 {
            return R::zero();
        }
        let mean = self.mean();
        let ss = self
            .values
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .fold(R::zero(), |a, b| a + b);
        ss / R::from_usize(self.len() - 1).unwrap()
    }

    pub fn std_dev(&self) -> R {
        self.variance().sqrt()
    }
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult<R> {
    pub statistic: R,
    pub p_value: R,
    pub df: Option<R>,
    pub effect_size: Option<R>,
    pub significant_after_correction: bool,
}

fn c<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant representable")
}

fn clamp_p<R: Real>(p: R) -> R {
    p.max(R::zero()).min(R::one())
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk normality test
// ---------------------------------------------------------------------------

const SHAPIRO_MIN_N: usize = 3;
const SHAPIRO_MAX_N: usize = 5000;

/// Shapiro-Wilk W test for normality, following the standard published
/// approximation for the coefficients and the p-value transforms
/// (Royston's algorithm, valid for 3 <= n <= 5000).
pub fn shapiro_wilk<R: Real>(sample: &Sample<R>) -> Result<TestResult<R>, StatsError> {
    let n = sample.len();
    if !(SHAPIRO_MIN_N..=SHAPIRO_MAX_N).contains(&n) {
        return Err(StatsError::SizeOutOfRange(n, SHAPIRO_MIN_N, SHAPIRO_MAX_N));
    }
    let mut x = sample.values.clone();
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mean = sample.mean();
    let ssq = x
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .fold(R::zero(), |a, b| a + b);
    if ssq == R::zero() {
        return Err(StatsError::ZeroVariance);
    }

    // Expected normal order statistics via Blom's approximation.
    let n_r = c::<R>(n as f64);
    let mut m: Vec<R> = (1..=n)
        .map(|i| normal_ppf((c::<R>(i as f64) - c(0.375)) / (n_r + c(0.25))))
        .collect();
    let m_ss = m.iter().map(|&v| v * v).fold(R::zero(), |a, b| a + b);

    let mut a = vec![R::zero(); n];
    if n == 3 {
        a[0] = c(-std::f64::consts::FRAC_1_SQRT_2);
        a[2] = c(std::f64::consts::FRAC_1_SQRT_2);
    } else {
        let rsn = n_r.sqrt().recip();
        let cn = m[n - 1] / m_ss.sqrt();
        let an = cn + poly(&[0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056], rsn);
        if n == 4 || n == 5 {
            let phi = (m_ss - c::<R>(2.0) * m[n - 1] * m[n - 1])
                / (R::one() - c::<R>(2.0) * an * an);
            let scale = phi.sqrt();
            for (i, ai) in a.iter_mut().enumerate().take(n - 1).skip(1) {
                *ai = m[i] / scale;
            }
            a[n - 1] = an;
            a[0] = -an;
        } else {
            let cn1 = m[n - 2] / m_ss.sqrt();
            let an1 =
                cn1 + poly(&[0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633], rsn);
            let phi = (m_ss
                - c::<R>(2.0) * m[n - 1] * m[n - 1]
                - c::<R>(2.0) * m[n - 2] * m[n - 2])
                / (R::one() - c::<R>(2.0) * an * an - c::<R>(2.0) * an1 * an1);
            let scale = phi.sqrt();
            for (i, ai) in a.iter_mut().enumerate().take(n - 2).skip(2) {
                *ai = m[i] / scale;
            }
            a[n - 1] = an;
            a[n - 2] = an1;
            a[0] = -an;
            a[1] = -an1;
        }
    }
    // m is no longer needed beyond this point.
    m.clear();

    let num: R = a
        .iter()
        .zip(x.iter())
        .map(|(&ai, &xi)| ai * xi)
        .fold(R::zero(), |acc, v| acc + v);
    let w = (num * num / ssq).min(R::one());

    let p = if n == 3 {
        // Exact small-sample form.
        let pi = c::<R>(std::f64::consts::PI);
        let six_over_pi = c::<R>(6.0) / pi;
        clamp_p(six_over_pi * (w.sqrt().asin() - c::<R>(0.75).sqrt().asin()))
    } else if n <= 11 {
        let nf = n as f64;
        let gamma = c::<R>(-2.273 + 0.459 * nf);
        let one_minus_w = (R::one() - w).max(c(1e-300));
        let y = -(gamma - one_minus_w.ln()).ln();
        let mu = c::<R>(0.5440 - 0.39978 * nf + 0.025054 * nf * nf - 0.0006714 * nf * nf * nf);
        let sigma =
            c::<R>((1.3822 - 0.77857 * nf + 0.062767 * nf * nf - 0.0020322 * nf * nf * nf).exp());
        clamp_p(R::one() - normal_cdf((y - mu) / sigma))
    } else {
        let u = (n as f64).ln();
        let one_minus_w = (R::one() - w).max(c(1e-300));
        let y = one_minus_w.ln();
        let mu = c::<R>(-1.5861 - 0.31082 * u - 0.083751 * u * u + 0.0038915 * u * u * u);
        let sigma = c::<R>((-0.4803 - 0.082676 * u + 0.0030302 * u * u).exp());
        clamp_p(R::one() - normal_cdf((y - mu) / sigma))
    };

    Ok(TestResult {
        statistic: w,
        p_value: p,
        df: None,
        effect_size: None,
        significant_after_correction: false,
    })
}

/// Horner evaluation with the constant term first.
fn poly<R: Real>(coef: &[f64], x: R) -> R {
    coef.iter()
        .rev()
        .fold(R::zero(), |acc, &co| acc * x + c(co))
}

// ---------------------------------------------------------------------------
// Welch's t-test
// ---------------------------------------------------------------------------

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom and a two-sided p-value.
pub fn welch_t<R: Real>(a: &Sample<R>, b: &Sample<R>) -> Result<TestResult<R>, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewValues(2));
    }
    let (va, vb) = (a.variance(), b.variance());
    if va == R::zero() && vb == R::zero() {
        return Err(StatsError::ZeroVariance);
    }
    let (na, nb) = (
        R::from_usize(a.len()).unwrap(),
        R::from_usize(b.len()).unwrap(),
    );
    let se2 = va / na + vb / nb;
    let t = (a.mean() - b.mean()) / se2.sqrt();
    let df = se2 * se2
        / ((va / na) * (va / na) / (na - R::one()) + (vb / nb) * (vb / nb) / (nb - R::one()));
    let p = clamp_p(t_two_sided_p(t, df));
    Ok(TestResult {
        statistic: t,
        p_value: p,
        df: Some(df),
        effect_size: None,
        significant_after_correction: false,
    })
}

// ---------------------------------------------------------------------------
// Mann-Whitney U test
// ---------------------------------------------------------------------------

/// Mann-Whitney U test with midrank tie handling, a tie- and
/// continuity-corrected normal approximation for the two-sided p-value,
/// and the rank-biserial correlation `1 - 2U/(n_a n_b)` as effect size.
///
/// The reported U counts pairs won by `a` (ties count half), so complete
/// separation with `a` below `b` gives U = 0 and rank-biserial 1.
pub fn mann_whitney_u<R: Real>(a: &Sample<R>, b: &Sample<R>) -> Result<TestResult<R>, StatsError> {
    let (na, nb) = (a.len(), b.len());
    if na == 0 || nb == 0 {
        return Err(StatsError::TooFewValues(1));
    }
    let n = na + nb;
    let mut pooled: Vec<(R, bool)> = a
        .values
        .iter()
        .map(|&v| (v, true))
        .chain(b.values.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite values"));

    // Midranks plus the tie-group sizes needed for the variance correction.
    let mut rank_sum_a = R::zero();
    let mut tie_correction = R::zero();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let count = j - i + 1;
        let midrank = c::<R>((i + j + 2) as f64) / c(2.0);
        let in_a = pooled[i..=j].iter().filter(|(_, is_a)| *is_a).count();
        rank_sum_a = rank_sum_a + midrank * c(in_a as f64);
        if count > 1 {
            let t = c::<R>(count as f64);
            tie_correction = tie_correction + t * t * t - t;
        }
        i = j + 1;
    }

    let na_r = c::<R>(na as f64);
    let nb_r = c::<R>(nb as f64);
    let u_a = rank_sum_a - na_r * (na_r + R::one()) / c(2.0);
    let product = na_r * nb_r;
    let rank_biserial = R::one() - c::<R>(2.0) * u_a / product;

    let n_r = c::<R>(n as f64);
    let mean_u = product / c(2.0);
    let var_u = product / c(12.0)
        * ((n_r + R::one()) - tie_correction / (n_r * (n_r - R::one())));
    let p = if var_u <= R::zero() {
        // Every observation tied across both samples: no evidence either way.
        R::one()
    } else {
        let diff = u_a - mean_u;
        let correction = if diff > R::zero() {
            c::<R>(-0.5)
        } else if diff < R::zero() {
            c(0.5)
        } else {
            R::zero()
        };
        let z = (diff + correction) / var_u.sqrt();
        clamp_p(c::<R>(2.0) * normal_cdf(-z.abs()))
    };

    Ok(TestResult {
        statistic: u_a,
        p_value: p,
        df: None,
        effect_size: Some(rank_biserial),
        significant_after_correction: false,
    })
}

// ---------------------------------------------------------------------------
// Effect sizes, correction, correlation, dispersion
// ---------------------------------------------------------------------------

/// Cohen's d with the (n - 1)-weighted pooled standard deviation.
pub fn cohens_d<R: Real>(a: &Sample<R>, b: &Sample<R>) -> Result<R, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewValues(2));
    }
    let na = R::from_usize(a.len()).unwrap();
    let nb = R::from_usize(b.len()).unwrap();
    let pooled_var = ((na - R::one()) * a.variance() + (nb - R::one()) * b.variance())
        / (na + nb - c(2.0));
    if pooled_var <= R::zero() {
        return Err(StatsError::ZeroVariance);
    }
    Ok((a.mean() - b.mean()) / pooled_var.sqrt())
}

/// Bonferroni correction: returns the per-test threshold `alpha / m` and a
/// significance flag per p-value.
pub fn bonferroni<R: Real>(
    p_values: &[R],
    family_alpha: R,
) -> Result<(R, Vec<bool>), StatsError> {
    if p_values.is_empty() {
        return Err(StatsError::TooFewValues(1));
    }
    if !(family_alpha > R::zero() && family_alpha < R::one()) {
        return Err(StatsError::BadAlpha);
    }
    let threshold = family_alpha / R::from_usize(p_values.len()).unwrap();
    let flags = p_values.iter().map(|&p| p < threshold).collect();
    Ok((threshold, flags))
}

/// Pearson product-moment correlation.
pub fn pearson_r<R: Real>(x: &[R], y: &[R]) -> Result<R, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch);
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewValues(2));
    }
    let n = R::from_usize(x.len()).unwrap();
    let mean_x = x.iter().copied().fold(R::zero(), |a, b| a + b) / n;
    let mean_y = y.iter().copied().fold(R::zero(), |a, b| a + b) / n;
    let mut sxy = R::zero();
    let mut sxx = R::zero();
    let mut syy = R::zero();
    for (&xi, &yi) in x.iter().zip(y.iter()) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == R::zero() || syy == R::zero() {
        return Err(StatsError::UndefinedCorrelation);
    }
    // Single sqrt of the product keeps r == 1 exact for identical inputs.
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-R::one()).min(R::one()))
}

/// Coefficient of variation: sample standard deviation over the mean.
pub fn coeff_variation<R: Real>(sample: &Sample<R>) -> Result<R, StatsError> {
    let mean = sample.mean();
    if mean == R::zero() {
        return Err(StatsError::ZeroMean);
    }
    Ok(sample.std_dev() / mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> Sample<f64> {
        Sample::new("test", values.to_vec()).unwrap()
    }

    #[test]
    fn sample_rejects_empty_and_non_finite() {
        assert!(Sample::<f64>::new("x", vec![]).is_err());
        assert!(Sample::new("x", vec![1.0, f64::NAN]).is_err());
        assert!(Sample::new("x", vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn shapiro_rejects_degenerate_input() {
        assert!(matches!(
            shapiro_wilk(&s(&[1.0, 2.0])),
            Err(StatsError::SizeOutOfRange(2, 3, 5000))
        ));
        assert!(matches!(
            shapiro_wilk(&s(&[1.0, 1.0, 1.0])),
            Err(StatsError::ZeroVariance)
        ));
    }

    #[test]
    fn shapiro_near_normal_sample_scores_high() {
        // Ten points exactly linear in normal quantiles.
        let values: Vec<f64> = (1..=10)
            .map(|i| dist::normal_ppf((i as f64 - 0.375) / 10.25))
            .collect();
        let res = shapiro_wilk(&s(&values)).unwrap();
        assert!(res.statistic > 0.98, "W = {}", res.statistic);
        assert!(res.p_value > 0.5);
    }

    #[test]
    fn shapiro_bimodal_sample_rejected() {
        let mut values = vec![0.0; 15];
        values.extend(vec![1.0; 15]);
        let res = shapiro_wilk(&s(&values)).unwrap();
        assert!(res.p_value < 0.01, "p = {}", res.p_value);
    }

    #[test]
    fn welch_identical_samples() {
        let a = s(&[1.0, 2.0, 3.0, 4.0]);
        let res = welch_t(&a, &a.clone()).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn welch_hand_computed_example() {
        // Equal variances 2.5, se = 1, so t = -1 with df = 8.
        let a = s(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = s(&[2.0, 3.0, 4.0, 5.0, 6.0]);
        let res = welch_t(&a, &b).unwrap();
        assert!((res.statistic - (-1.0)).abs() < 1e-12);
        assert!((res.df.unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn welch_antisymmetric() {
        let a = s(&[1.0, 2.0, 5.0, 7.0]);
        let b = s(&[2.0, 4.0, 4.5, 9.0, 3.0]);
        let ab = welch_t(&a, &b).unwrap();
        let ba = welch_t(&b, &a).unwrap();
        assert!((ab.statistic + ba.statistic).abs() < 1e-14);
        assert!((ab.p_value - ba.p_value).abs() < 1e-14);
    }

    #[test]
    fn welch_rejects_two_constant_samples() {
        assert!(matches!(
            welch_t(&s(&[2.0, 2.0, 2.0]), &s(&[3.0, 3.0])),
            Err(StatsError::ZeroVariance)
        ));
    }

    #[test]
    fn mann_whitney_complete_separation() {
        let res = mann_whitney_u(&s(&[1.0, 2.0]), &s(&[3.0, 4.0])).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.effect_size, Some(1.0));
    }

    #[test]
    fn mann_whitney_identical_multisets() {
        let res = mann_whitney_u(&s(&[1.0, 2.0, 2.0, 3.0]), &s(&[2.0, 1.0, 3.0, 2.0])).unwrap();
        assert!(res.effect_size.unwrap().abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_u_sum_identity() {
        let a = s(&[1.0, 5.0, 5.0, 2.5, 7.0]);
        let b = s(&[5.0, 2.5, 8.0, 1.0]);
        let u_a = mann_whitney_u(&a, &b).unwrap().statistic;
        let u_b = mann_whitney_u(&b, &a).unwrap().statistic;
        assert_eq!(u_a + u_b, (a.len() * b.len()) as f64);
    }

    #[test]
    fn mann_whitney_all_tied_is_inconclusive() {
        let res = mann_whitney_u(&s(&[2.0, 2.0]), &s(&[2.0, 2.0, 2.0])).unwrap();
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn cohens_d_examples() {
        let a = s(&[1.0, 2.0, 3.0]);
        assert_eq!(cohens_d(&a, &a.clone()).unwrap(), 0.0);
        // Means 10 and 8, both variances 1, pooled sd 1 -> d = 2.
        let hi = s(&[9.0, 10.0, 11.0]);
        let lo = s(&[7.0, 8.0, 9.0]);
        assert!((cohens_d(&hi, &lo).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            cohens_d(&s(&[5.0, 5.0]), &s(&[5.0, 5.0])),
            Err(StatsError::ZeroVariance)
        ));
    }

    #[test]
    fn bonferroni_family_of_three() {
        let (threshold, flags) = bonferroni(&[0.0001_f64, 0.02, 0.5], 0.05).unwrap();
        assert!((threshold - 0.05 / 3.0).abs() < 1e-15);
        assert!((threshold - 0.016667).abs() < 5e-7);
        assert_eq!(flags, vec![true, false, false]);
        let (single, _) = bonferroni(&[0.04], 0.05).unwrap();
        assert_eq!(single, 0.05);
    }

    #[test]
    fn pearson_basics() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(pearson_r(&x, &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(pearson_r(&x, &[-1.0, -2.0, -3.0]).unwrap(), -1.0);
        assert_eq!(pearson_r(&x, &x).unwrap(), 1.0);
        assert!(matches!(
            pearson_r(&x, &[5.0, 5.0, 5.0]),
            Err(StatsError::UndefinedCorrelation)
        ));
    }

    #[test]
    fn pearson_affine_invariance() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0];
        let y = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = pearson_r(&x, &y).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 3.5 * v + 11.0).collect();
        let y2: Vec<f64> = y.iter().map(|v| 0.25 * v - 2.0).collect();
        assert!((pearson_r(&x2, &y2).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn coeff_variation_examples() {
        assert_eq!(coeff_variation(&s(&[3.0, 3.0, 3.0])).unwrap(), 0.0);
        let cv = coeff_variation(&s(&[0.4, 0.5, 0.6])).unwrap();
        assert!((cv - 0.2).abs() < 1e-12);
        // Scale invariance under positive scaling.
        let cv_scaled = coeff_variation(&s(&[4.0, 5.0, 6.0])).unwrap();
        assert!((cv - cv_scaled).abs() < 1e-12);
        assert!(matches!(
            coeff_variation(&s(&[-1.0, 1.0])),
            Err(StatsError::ZeroMean)
        ));
    }
}
