//! Agreement statistics between estimates and ground truth.
//!
//! Two views are produced. The aggregate error rate pools absolute
//! residuals over every pair in a group; the per-event percentage error is
//! summarized by its mean and sample SD. Correlation, its p-value and the
//! adjusted R² against the identity line complete each report row.

mod report;
pub mod special;

pub use report::{
    build_report, pairs_from_estimates, render_agreement_table, render_rate_table, ActivitySet,
    CohortGroup, GroupingSpec, MetricsReport, Quantity, ReportRow, Source,
};

use crate::activity::{Activity, Cohort};
use crate::error::{Error, Result};

/// p-values below this are reported as `<1e-15`.
pub const P_VALUE_FLOOR: f64 = 1e-15;

/// One estimate with the value it should have matched.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatePair {
    pub subject_id: String,
    pub cohort: Option<Cohort>,
    pub activity: Activity,
    pub quantity: Quantity,
    pub source: Source,
    /// Observed ground truth.
    pub observed: f64,
    /// Calculated estimate.
    pub calculated: f64,
}

/// `100 · Σ|c − o| / Σ|o|` over all pairs.
pub fn error_rate(pairs: &[EstimatePair]) -> Result<f64> {
    check_homogeneous(pairs)?;
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), p| {
        (n + (p.calculated - p.observed).abs(), d + p.observed.abs())
    });
    if den == 0.0 {
        return Err(Error::Degenerate("sum of observed values is zero".into()));
    }
    Ok(100.0 * num / den)
}

/// The error-rate expression exactly as typeset in the source study:
/// `|Σ|c − o| − Σ|o|| / Σ|o| · 100`. It approaches 100 % for a perfect
/// estimator and is kept only for auditing.
pub fn error_rate_literal(pairs: &[EstimatePair]) -> Result<f64> {
    check_homogeneous(pairs)?;
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), p| {
        (n + (p.calculated - p.observed).abs(), d + p.observed.abs())
    });
    if den == 0.0 {
        return Err(Error::Degenerate("sum of observed values is zero".into()));
    }
    Ok(100.0 * ((num - den) / den).abs())
}

fn check_homogeneous(pairs: &[EstimatePair]) -> Result<()> {
    let first = pairs.first().ok_or(Error::Empty("no estimate pairs"))?;
    if pairs
        .iter()
        .any(|p| p.quantity != first.quantity || p.source != first.source)
    {
        return Err(Error::Config(
            "error rate pairs must share quantity and source".into(),
        ));
    }
    Ok(())
}

/// Signed percentage error `100 · (c − o) / o`; overestimates are
/// positive. `None` when the observed value is not positive.
pub fn pct_error(pair: &EstimatePair) -> Option<f64> {
    pct_error_values(pair.observed, pair.calculated)
}

pub fn pct_error_values(observed: f64, calculated: f64) -> Option<f64> {
    (observed > 0.0).then(|| 100.0 * (calculated - observed) / observed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample (n − 1) standard deviation; zero for a single value.
    pub sd: f64,
    pub single_value: bool,
}

pub fn mean_sd(values: &[f64]) -> Result<MeanSd> {
    if values.is_empty() {
        return Err(Error::Empty("no values"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok(MeanSd {
            mean,
            sd: 0.0,
            single_value: true,
        });
    }
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    Ok(MeanSd {
        mean,
        sd: (ss / (n - 1.0)).sqrt(),
        single_value: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided; values under [`P_VALUE_FLOOR`] are stored as 0.
    pub p: f64,
    pub n: usize,
}

/// Sample Pearson correlation with a two-sided Student-t p-value on
/// `n − 2` degrees of freedom.
pub fn pearson(observed: &[f64], calculated: &[f64]) -> Result<Correlation> {
    if observed.len() != calculated.len() {
        return Err(Error::Config("correlation inputs differ in length".into()));
    }
    let n = observed.len();
    if n < 3 {
        return Err(Error::Undefined("correlation of fewer than 3 pairs"));
    }
    let nf = n as f64;
    let mx = observed.iter().sum::<f64>() / nf;
    let my = calculated.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in observed.iter().zip(calculated) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("correlation with zero variance"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = nf - 2.0;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        special::student_t_two_sided(t, df)
    };
    Ok(Correlation {
        r,
        p: if p < P_VALUE_FLOOR { 0.0 } else { p },
        n,
    })
}

/// Adjusted R² of `predicted` against `observed` with `k` predictors.
pub fn adjusted_r2(observed: &[f64], predicted: &[f64], k: usize) -> Result<f64> {
    if observed.len() != predicted.len() {
        return Err(Error::Config("adjusted R² inputs differ in length".into()));
    }
    let n = observed.len();
    if n <= k + 1 {
        return Err(Error::Undefined("adjusted R² with n <= k + 1"));
    }
    let mean = observed.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = observed.iter().map(|o| (o - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Undefined("adjusted R² with zero total variance"));
    }
    let ss_res: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(o, p)| (o - p).powi(2))
        .sum();
    let r2 = 1.0 - ss_res / ss_tot;
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - k as f64 - 1.0))
}
