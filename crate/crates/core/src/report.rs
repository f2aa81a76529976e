//! Check records and the certificate they are collected into.

use serde::{Serialize, Serializer};

/// Which group and which construction a record was computed on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub group: String,
    pub construction: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub group: String,
    pub construction: String,
    pub anchor: String,
    #[serde(serialize_with = "sci")]
    pub residual: f64,
    #[serde(serialize_with = "sci_opt")]
    pub bound: Option<f64>,
    #[serde(serialize_with = "sci")]
    pub tolerance: f64,
    pub pass: bool,
    pub draws: usize,
}

impl CheckRecord {
    /// A residual that must not exceed `tolerance`.
    pub fn residual(
        suite: &str,
        check: impl Into<String>,
        anchor: &str,
        label: &Label,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            suite: suite.into(),
            check: check.into(),
            group: label.group.clone(),
            construction: label.construction.clone(),
            anchor: anchor.into(),
            residual,
            bound: None,
            tolerance,
            pass: residual <= tolerance,
            draws: 1,
        }
    }

    /// An inequality `lhs ≤ bound + slack`.
    pub fn bounded(
        suite: &str,
        check: impl Into<String>,
        anchor: &str,
        label: &Label,
        lhs: f64,
        bound: f64,
        slack: f64,
    ) -> Self {
        Self {
            bound: Some(bound),
            pass: lhs <= bound + slack,
            ..Self::residual(suite, check, anchor, label, lhs, slack)
        }
    }

    /// A measured value with no pass criterion beyond being finite.
    pub fn logged(suite: &str, check: impl Into<String>, anchor: &str, label: &Label, value: f64) -> Self {
        Self {
            tolerance: f64::INFINITY,
            pass: value.is_finite(),
            ..Self::residual(suite, check, anchor, label, value, 0.0)
        }
    }

    pub fn with_draws(mut self, draws: usize) -> Self {
        self.draws = draws;
        self
    }

    /// How far the record is from failing; larger is worse.
    pub fn excess(&self) -> f64 {
        match self.bound {
            Some(b) => self.residual - b,
            None => self.residual - self.tolerance,
        }
    }

    fn sort_key(&self) -> (&str, &str, &str, &str) {
        (&self.suite, &self.group, &self.construction, &self.check)
    }
}

/// Keep the worst of several records describing the same check over many
/// draws, with `draws` summed.
pub fn worst_of(records: Vec<CheckRecord>) -> Option<CheckRecord> {
    let total: usize = records.iter().map(|r| r.draws).sum();
    let all_pass = records.iter().all(|r| r.pass);
    let mut worst = records.into_iter().reduce(|a, b| {
        if !b.pass && a.pass || (a.pass == b.pass && b.excess() > a.excess()) {
            b
        } else {
            a
        }
    })?;
    worst.draws = total;
    worst.pass = all_pass;
    Some(worst)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub version: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl CheckReport {
    /// Records are sorted by (suite, group, construction, check); the sort is
    /// stable so equal keys keep their generation order.
    pub fn new(seed: u64, mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn merge(reports: impl IntoIterator<Item = CheckReport>, seed: u64) -> Self {
        Self::new(seed, reports.into_iter().flat_map(|r| r.records).collect())
    }
}

/// Seventeen significant digits round-trip every f64.
pub fn format_sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn sci<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_sci(*x))
}

fn sci_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&format_sci(*v)),
        None => s.serialize_none(),
    }
}
