use std::fmt;
use std::str::FromStr;

use crate::activity::{Activity, Cohort};
use crate::error::{Error, Result};
use crate::signal_io::EstimateRow;

use super::{
    adjusted_r2, error_rate, error_rate_literal, mean_sd, pct_error, pearson, EstimatePair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Steps,
    Distance,
    StepLength,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Steps, Quantity::Distance, Quantity::StepLength];

    pub fn label(self) -> &'static str {
        match self {
            Quantity::Steps => "Steps",
            Quantity::Distance => "Distance",
            Quantity::StepLength => "StepLength",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    System,
    Pedometer,
}

impl Source {
    pub const ALL: [Source; 2] = [Source::System, Source::Pedometer];

    pub fn label(self) -> &'static str {
        match self {
            Source::System => "System",
            Source::Pedometer => "Pedometer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CohortGroup {
    Td,
    Dmd,
    All,
}

impl CohortGroup {
    pub const ALL: [CohortGroup; 3] = [CohortGroup::Td, CohortGroup::Dmd, CohortGroup::All];

    pub fn label(self) -> &'static str {
        match self {
            CohortGroup::Td => "TD",
            CohortGroup::Dmd => "DMD",
            CohortGroup::All => "All",
        }
    }

    pub fn contains(self, cohort: Option<Cohort>) -> bool {
        match self {
            CohortGroup::All => true,
            CohortGroup::Td => cohort == Some(Cohort::Td),
            CohortGroup::Dmd => cohort == Some(Cohort::Dmd),
        }
    }
}

/// Which activities a report row pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActivitySet {
    Single(Activity),
    /// SC-L1..SC-L5.
    Calibration,
    /// 6MWT, 100MRW and FW.
    Evaluation,
    All,
}

impl ActivitySet {
    pub fn label(self) -> String {
        match self {
            ActivitySet::Single(a) => a.label().to_string(),
            ActivitySet::Calibration => "SC-L1..SC-L5".to_string(),
            ActivitySet::Evaluation => "6MWT+100MRW+FW".to_string(),
            ActivitySet::All => "All".to_string(),
        }
    }

    pub fn contains(self, activity: Activity) -> bool {
        match self {
            ActivitySet::Single(a) => a == activity,
            ActivitySet::Calibration => activity.is_calibration(),
            ActivitySet::Evaluation => !activity.is_calibration(),
            ActivitySet::All => true,
        }
    }

    /// Every single activity, then the two pooled sets, then all.
    pub fn standard() -> Vec<ActivitySet> {
        Activity::ALL
            .iter()
            .map(|&a| ActivitySet::Single(a))
            .chain([ActivitySet::Calibration, ActivitySet::Evaluation, ActivitySet::All])
            .collect()
    }
}

macro_rules! label_traits {
    ($ty:ty, $variants:expr, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.label())
            }
        }

        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                $variants
                    .into_iter()
                    .find(|v| v.label() == s)
                    .ok_or_else(|| Error::Config(format!(concat!("unknown ", $what, " `{}`"), s)))
            }
        }
    };
}

label_traits!(Quantity, Quantity::ALL, "quantity");
label_traits!(Source, Source::ALL, "source");
label_traits!(CohortGroup, CohortGroup::ALL, "cohort group");
label_traits!(ActivitySet, ActivitySet::standard(), "activity set");

/// One line of the report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub activity_set: ActivitySet,
    pub cohort: CohortGroup,
    pub source: Source,
    pub quantity: Quantity,
    pub n: usize,
    pub gt_total: f64,
    pub error_rate_pct: Option<f64>,
    pub mean_pct_error: Option<f64>,
    pub sd_pct_error: Option<f64>,
    pub pearson_r: Option<f64>,
    pub p_value: Option<f64>,
    pub adjusted_r2: Option<f64>,
}

/// Cartesian grouping used by [`build_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingSpec {
    pub activity_sets: Vec<ActivitySet>,
    pub cohorts: Vec<CohortGroup>,
    pub sources: Vec<Source>,
    pub quantities: Vec<Quantity>,
    /// Report the error rate in its literal typeset form (auditing only).
    pub literal_error_rate: bool,
}

impl Default for GroupingSpec {
    fn default() -> Self {
        Self {
            activity_sets: ActivitySet::standard(),
            cohorts: CohortGroup::ALL.to_vec(),
            sources: Source::ALL.to_vec(),
            quantities: Quantity::ALL.to_vec(),
            literal_error_rate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub rows: Vec<ReportRow>,
    /// Pairs left out of the percentage-error statistics of each row
    /// because their observed value was not positive. Parallel to `rows`.
    pub n_excluded: Vec<usize>,
    /// Groups with no pairs; these produce no row.
    pub omitted_groups: usize,
}

impl MetricsReport {
    pub fn find(
        &self,
        activity_set: ActivitySet,
        cohort: CohortGroup,
        source: Source,
        quantity: Quantity,
    ) -> Option<&ReportRow> {
        self.rows.iter().find(|r| {
            r.activity_set == activity_set
                && r.cohort == cohort
                && r.source == source
                && r.quantity == quantity
        })
    }
}

/// Turns per-activity estimate rows into pairs. A pair is produced only
/// when both sides are present; average step length truth is observed
/// distance over observed steps.
pub fn pairs_from_estimates(rows: &[EstimateRow]) -> Vec<EstimatePair> {
    let mut out = Vec::new();
    for r in rows {
        let mut push = |quantity, source, observed: Option<f64>, calculated: Option<f64>| {
            if let (Some(observed), Some(calculated)) = (observed, calculated) {
                out.push(EstimatePair {
                    subject_id: r.subject_id.clone(),
                    cohort: r.cohort,
                    activity: r.activity,
                    quantity,
                    source,
                    observed,
                    calculated,
                });
            }
        };
        let obs_steps = r.observed_steps.map(|s| s as f64);
        let obs_len = ratio(r.observed_distance_m, obs_steps);
        push(Quantity::Steps, Source::System, obs_steps, Some(r.step_count as f64));
        push(Quantity::Distance, Source::System, r.observed_distance_m, Some(r.distance_m));
        push(Quantity::StepLength, Source::System, obs_len, r.avg_step_length_m);

        let ped_steps = r.pedometer_steps.map(|s| s as f64);
        push(Quantity::Steps, Source::Pedometer, obs_steps, ped_steps);
        push(Quantity::Distance, Source::Pedometer, r.observed_distance_m, r.pedometer_distance_m);
        push(
            Quantity::StepLength,
            Source::Pedometer,
            obs_len,
            ratio(r.pedometer_distance_m, ped_steps),
        );
    }
    out
}

fn ratio(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    match (num, den) {
        (Some(n), Some(d)) if d > 0.0 => Some(n / d),
        _ => None,
    }
}

/// Computes one row per non-empty group of `spec`.
pub fn build_report(pairs: &[EstimatePair], spec: &GroupingSpec) -> MetricsReport {
    let mut report = MetricsReport::default();
    for &activity_set in &spec.activity_sets {
        for &cohort in &spec.cohorts {
            for &source in &spec.sources {
                for &quantity in &spec.quantities {
                    let group: Vec<EstimatePair> = pairs
                        .iter()
                        .filter(|p| {
                            p.source == source
                                && p.quantity == quantity
                                && activity_set.contains(p.activity)
                                && cohort.contains(p.cohort)
                        })
                        .cloned()
                        .collect();
                    if group.is_empty() {
                        report.omitted_groups += 1;
                        continue;
                    }
                    let (mut row, excluded) =
                        group_row(activity_set, cohort, source, quantity, &group);
                    if spec.literal_error_rate {
                        row.error_rate_pct = error_rate_literal(&group).ok();
                    }
                    report.rows.push(row);
                    report.n_excluded.push(excluded);
                }
            }
        }
    }
    report
}

fn group_row(
    activity_set: ActivitySet,
    cohort: CohortGroup,
    source: Source,
    quantity: Quantity,
    group: &[EstimatePair],
) -> (ReportRow, usize) {
    let pct: Vec<f64> = group.iter().filter_map(pct_error).collect();
    let excluded = group.len() - pct.len();
    let stats = mean_sd(&pct).ok();
    let observed: Vec<f64> = group.iter().map(|p| p.observed).collect();
    let calculated: Vec<f64> = group.iter().map(|p| p.calculated).collect();
    let corr = pearson(&observed, &calculated).ok();
    let row = ReportRow {
        activity_set,
        cohort,
        source,
        quantity,
        n: group.len(),
        gt_total: observed.iter().sum(),
        error_rate_pct: error_rate(group).ok(),
        mean_pct_error: stats.map(|s| s.mean),
        sd_pct_error: stats.filter(|s| !s.single_value).map(|s| s.sd),
        pearson_r: corr.map(|c| c.r),
        p_value: corr.map(|c| c.p),
        adjusted_r2: adjusted_r2(&observed, &calculated, 1).ok(),
    };
    (row, excluded)
}

fn cell(v: Option<f64>, digits: usize, suffix: &str) -> String {
    v.map(|v| format!("{v:.digits$}{suffix}"))
        .unwrap_or_else(|| "-".to_string())
}

/// Plain-text table in the style of a per-activity error appendix: for
/// each quantity, the ground-truth total and the system and pedometer
/// error rates. Only rows of `cohort` are shown.
pub fn render_rate_table(report: &MetricsReport, cohort: CohortGroup) -> String {
    let mut sets: Vec<ActivitySet> = Vec::new();
    for r in report.rows.iter().filter(|r| r.cohort == cohort) {
        if !sets.contains(&r.activity_set) {
            sets.push(r.activity_set);
        }
    }
    let mut out = format!(
        "{:<16}{:>12}{:>10}{:>10}{:>12}{:>10}{:>10}{:>10}{:>10}{:>10}\n",
        "Activity",
        "Steps GT",
        "System",
        "Pedo",
        "Dist GT (m)",
        "System",
        "Pedo",
        "Len GT",
        "System",
        "Pedo"
    );
    for set in sets {
        out.push_str(&format!("{:<16}", set.label()));
        for (q, width) in [(Quantity::Steps, 12), (Quantity::Distance, 12), (Quantity::StepLength, 10)] {
            let sys = report.find(set, cohort, Source::System, q);
            let ped = report.find(set, cohort, Source::Pedometer, q);
            let gt = sys.or(ped).map(|r| match q {
                Quantity::StepLength => r.gt_total / r.n as f64,
                _ => r.gt_total,
            });
            let digits = if q == Quantity::Steps { 0 } else { 2 };
            out.push_str(&format!(
                "{:>width$}{:>10}{:>10}",
                cell(gt, digits, ""),
                cell(sys.and_then(|r| r.error_rate_pct), 2, "%"),
                cell(ped.and_then(|r| r.error_rate_pct), 2, "%"),
            ));
        }
        out.push('\n');
    }
    out
}

/// Plain-text agreement table: mean (SD) percentage error and
/// correlation (p-value) of the system estimates, per activity set and
/// quantity.
pub fn render_agreement_table(report: &MetricsReport, cohort: CohortGroup) -> String {
    let mut out = format!(
        "{:<16}{:<12}{:>22}{:>26}{:>10}\n",
        "Activity", "Quantity", "Pct error mean (SD)", "Correlation (p)", "Adj R2"
    );
    for r in report
        .rows
        .iter()
        .filter(|r| r.cohort == cohort && r.source == Source::System)
    {
        let pct = match (r.mean_pct_error, r.sd_pct_error) {
            (Some(m), Some(s)) => format!("{m:.2} ({s:.2})"),
            (Some(m), None) => format!("{m:.2}"),
            _ => "-".into(),
        };
        let corr = match (r.pearson_r, r.p_value) {
            (Some(rv), Some(p)) if p < super::P_VALUE_FLOOR => format!("{rv:.4} (<1e-15)"),
            (Some(rv), Some(p)) => format!("{rv:.4} ({p:.2e})"),
            _ => "-".into(),
        };
        out.push_str(&format!(
            "{:<16}{:<12}{:>22}{:>26}{:>10}\n",
            r.activity_set.label(),
            r.quantity.label(),
            pct,
            corr,
            cell(r.adjusted_r2, 4, "")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(subject: &str, cohort: Cohort, activity: Activity, steps: usize, obs: u64) -> EstimateRow {
        EstimateRow {
            subject_id: subject.into(),
            cohort: Some(cohort),
            activity,
            step_count: steps,
            distance_m: steps as f64 * 0.5,
            avg_step_length_m: Some(0.5),
            avg_step_duration_s: Some(0.5),
            cadence_steps_per_min: Some(120.0),
            speed_m_per_s: Some(1.0),
            extrapolated_step_fraction: 0.0,
            observed_steps: Some(obs),
            observed_distance_m: Some(obs as f64 * 0.5),
            observed_duration_s: Some(obs as f64 * 0.5),
            pedometer_steps: None,
            pedometer_distance_m: None,
        }
    }

    #[test]
    fn labels_round_trip() {
        for s in ActivitySet::standard() {
            assert_eq!(s.label().parse::<ActivitySet>().unwrap(), s);
        }
        for q in Quantity::ALL {
            assert_eq!(q.to_string().parse::<Quantity>().unwrap(), q);
        }
        assert!("Nope".parse::<Source>().is_err());
    }

    #[test]
    fn single_subject_single_activity() {
        let pairs = pairs_from_estimates(&[row("S1", Cohort::Td, Activity::ScL3, 50, 50)]);
        assert_eq!(pairs.len(), 3);
        let spec = GroupingSpec {
            activity_sets: vec![ActivitySet::Single(Activity::ScL3)],
            cohorts: vec![CohortGroup::All],
            ..GroupingSpec::default()
        };
        let rep = build_report(&pairs, &spec);
        assert_eq!(rep.rows.len(), 3);
        assert_eq!(rep.omitted_groups, 3);
        let steps = rep.find(ActivitySet::Single(Activity::ScL3), CohortGroup::All, Source::System, Quantity::Steps).unwrap();
        assert_eq!(steps.error_rate_pct, Some(0.0));
        assert_eq!(steps.mean_pct_error, Some(0.0));
        assert_eq!(steps.sd_pct_error, None);
        assert_eq!(steps.pearson_r, None);
    }

    #[test]
    fn group_counts_follow_partition() {
        let mut rows = Vec::new();
        for s in 0..6 {
            let cohort = if s < 3 { Cohort::Td } else { Cohort::Dmd };
            for (k, &a) in Activity::ALL.iter().enumerate() {
                rows.push(row(&format!("S{s}"), cohort, a, 40 + k + s, 40 + k as u64));
            }
        }
        let rep = build_report(&pairs_from_estimates(&rows), &GroupingSpec::default());
        let n = |set, c| rep.find(set, c, Source::System, Quantity::Steps).unwrap().n;
        assert_eq!(n(ActivitySet::All, CohortGroup::All), 48);
        assert_eq!(n(ActivitySet::All, CohortGroup::Td), 24);
        assert_eq!(n(ActivitySet::Calibration, CohortGroup::Dmd), 15);
        assert_eq!(n(ActivitySet::Evaluation, CohortGroup::All), 18);
        assert_eq!(n(ActivitySet::Single(Activity::FreeWalk), CohortGroup::Td), 3);
        // no pedometer data anywhere
        assert!(rep.rows.iter().all(|r| r.source == Source::System));
        assert_eq!(rep.rows.len(), 11 * 3 * 3);
        let all = rep.find(ActivitySet::All, CohortGroup::All, Source::System, Quantity::Steps).unwrap();
        let (num, den) = rows.iter().fold((0.0, 0.0), |(a, b), r| {
            let o = r.observed_steps.unwrap() as f64;
            (a + (r.step_count as f64 - o).abs(), b + o)
        });
        assert!((all.error_rate_pct.unwrap() - 100.0 * num / den).abs() < 1e-12);
        let table = render_rate_table(&rep, CohortGroup::All);
        assert_eq!(table.lines().count(), 12);
        assert!(render_agreement_table(&rep, CohortGroup::All).contains("6MWT+100MRW+FW"));
    }

    #[test]
    fn zero_truth_pairs_are_tallied() {
        let mut r = row("S", Cohort::Dmd, Activity::FreeWalk, 3, 0);
        r.observed_distance_m = Some(0.0);
        let mut rows = vec![r];
        rows.push(row("T", Cohort::Dmd, Activity::FreeWalk, 10, 10));
        let rep = build_report(
            &pairs_from_estimates(&rows),
            &GroupingSpec {
                activity_sets: vec![ActivitySet::All],
                cohorts: vec![CohortGroup::All],
                sources: vec![Source::System],
                quantities: vec![Quantity::Steps],
                literal_error_rate: false,
            },
        );
        assert_eq!(rep.rows[0].n, 2);
        assert_eq!(rep.n_excluded[0], 1);
        assert!((rep.rows[0].error_rate_pct.unwrap() - 30.0).abs() < 1e-12);
    }
}
