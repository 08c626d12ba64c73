//! Abstention-aware classification metrics and per-country accuracy.
//!
//! An abstention counts against recall and accuracy of the person's true
//! class but never against precision. A class with no decided predictions
//! reports precision 1.0 and raises a zero-support flag instead of NaN.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::country::CountryCode;
use crate::types::{BackendId, GenderLabel, PersonRecord, Prediction, TrueGender};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("cannot compute metrics over an empty dataset")]
    EmptyDataset,
    #[error("minimum country instances must be at least 1")]
    InvalidThreshold,
    #[error("{backend} has {got} predictions for {expected} records")]
    LengthMismatch {
        backend: BackendId,
        expected: usize,
        got: usize,
    },
}

/// Confusion counts. Subscripts name the true class except for `fp_*`, which
/// name the predicted class: `fp_f` counts true males predicted female.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionTally {
    pub tp_f: u64,
    pub fp_f: u64,
    pub tp_m: u64,
    pub fp_m: u64,
    pub abstain_f: u64,
    pub abstain_m: u64,
}

impl ConfusionTally {
    pub fn record(&mut self, truth: TrueGender, predicted: GenderLabel) {
        match (truth, predicted) {
            (TrueGender::Female, GenderLabel::Female) => self.tp_f += 1,
            (TrueGender::Female, GenderLabel::Male) => self.fp_m += 1,
            (TrueGender::Female, _) => self.abstain_f += 1,
            (TrueGender::Male, GenderLabel::Male) => self.tp_m += 1,
            (TrueGender::Male, GenderLabel::Female) => self.fp_f += 1,
            (TrueGender::Male, _) => self.abstain_m += 1,
        }
    }

    pub fn n_female(&self) -> u64 {
        self.tp_f + self.fp_m + self.abstain_f
    }

    pub fn n_male(&self) -> u64 {
        self.tp_m + self.fp_f + self.abstain_m
    }

    pub fn total(&self) -> u64 {
        self.n_female() + self.n_male()
    }

    pub fn correct(&self) -> u64 {
        self.tp_f + self.tp_m
    }

    pub fn decided(&self) -> u64 {
        self.total() - self.abstain_f - self.abstain_m
    }
}

impl Add for ConfusionTally {
    type Output = ConfusionTally;

    fn add(self, o: ConfusionTally) -> ConfusionTally {
        ConfusionTally {
            tp_f: self.tp_f + o.tp_f,
            fp_f: self.fp_f + o.fp_f,
            tp_m: self.tp_m + o.tp_m,
            fp_m: self.fp_m + o.fp_m,
            abstain_f: self.abstain_f + o.abstain_f,
            abstain_m: self.abstain_m + o.abstain_m,
        }
    }
}

impl AddAssign for ConfusionTally {
    fn add_assign(&mut self, o: ConfusionTally) {
        *self = *self + o;
    }
}

impl Sum for ConfusionTally {
    fn sum<I: Iterator<Item = ConfusionTally>>(iter: I) -> ConfusionTally {
        iter.fold(ConfusionTally::default(), Add::add)
    }
}

pub fn tally<'a>(records: impl IntoIterator<Item = (&'a PersonRecord, &'a Prediction)>) -> ConfusionTally {
    let mut t = ConfusionTally::default();
    for (person, prediction) in records {
        t.record(person.true_gender(), prediction.label());
    }
    t
}

/// `2PR / (P + R)`, or 0 when both are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Overall accuracy recovered from per-class recalls and class sizes.
pub fn accuracy_identity_check(recall_f: f64, recall_m: f64, n_f: u64, n_m: u64) -> f64 {
    (recall_f * n_f as f64 + recall_m * n_m as f64) / (n_f + n_m) as f64
}

/// One row of the per-method table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub tally: ConfusionTally,
    pub precision_f: f64,
    pub recall_f: f64,
    pub f1_f: f64,
    pub precision_m: f64,
    pub recall_m: f64,
    pub f1_m: f64,
    pub accuracy: f64,
    pub coverage: f64,
    /// No record was predicted female; `precision_f` is reported as 1.0.
    pub zero_support_f: bool,
    pub zero_support_m: bool,
}

fn ratio_or_one(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(t: &ConfusionTally) -> Result<MethodMetrics, EvalError> {
    let n = t.total();
    if n == 0 {
        return Err(EvalError::EmptyDataset);
    }
    let precision_f = ratio_or_one(t.tp_f, t.tp_f + t.fp_f);
    let precision_m = ratio_or_one(t.tp_m, t.tp_m + t.fp_m);
    // a class absent from the data cannot be missed
    let recall_f = ratio_or_one(t.tp_f, t.n_female());
    let recall_m = ratio_or_one(t.tp_m, t.n_male());
    Ok(MethodMetrics {
        tally: *t,
        precision_f,
        recall_f,
        f1_f: f1(precision_f, recall_f),
        precision_m,
        recall_m,
        f1_m: f1(precision_m, recall_m),
        accuracy: t.correct() as f64 / n as f64,
        coverage: t.decided() as f64 / n as f64,
        zero_support_f: t.tp_f + t.fp_f == 0,
        zero_support_m: t.tp_m + t.fp_m == 0,
    })
}

/// Row label of the country report: a country, or everything pooled below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CountryGroup {
    Country(CountryCode),
    Other,
}

impl fmt::Display for CountryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountryGroup::Country(c) => write!(f, "{c}"),
            CountryGroup::Other => f.write_str("other"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRow {
    pub group: CountryGroup,
    pub instance_count: usize,
    pub correct: BTreeMap<BackendId, usize>,
}

impl CountryRow {
    pub fn accuracy(&self, backend: BackendId) -> Option<f64> {
        self.correct
            .get(&backend)
            .map(|&c| c as f64 / self.instance_count as f64)
    }
}

/// Per-country accuracy, rows sorted by instance count (descending, ties by
/// code) with the pooled `other` row last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryReport {
    pub min_instances: usize,
    pub backends: Vec<BackendId>,
    pub rows: Vec<CountryRow>,
}

impl CountryReport {
    pub fn total_instances(&self) -> usize {
        self.rows.iter().map(|r| r.instance_count).sum()
    }

    pub fn row(&self, group: CountryGroup) -> Option<&CountryRow> {
        self.rows.iter().find(|r| r.group == group)
    }
}

/// Records plus every method's predictions, aligned by index.
#[derive(Debug, Clone, Default)]
pub struct EvaluationRun {
    pub records: Vec<PersonRecord>,
    pub predictions: BTreeMap<BackendId, Vec<Prediction>>,
}

impl EvaluationRun {
    pub fn new(records: Vec<PersonRecord>) -> EvaluationRun {
        EvaluationRun {
            records,
            predictions: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, backend: BackendId, predictions: Vec<Prediction>) -> Result<(), EvalError> {
        if predictions.len() != self.records.len() {
            return Err(EvalError::LengthMismatch {
                backend,
                expected: self.records.len(),
                got: predictions.len(),
            });
        }
        self.predictions.insert(backend, predictions);
        Ok(())
    }

    pub fn tally(&self, backend: BackendId) -> Option<ConfusionTally> {
        self.predictions
            .get(&backend)
            .map(|preds| tally(self.records.iter().zip(preds)))
    }

    pub fn method_metrics(&self) -> Result<BTreeMap<BackendId, MethodMetrics>, EvalError> {
        self.predictions
            .keys()
            .map(|&b| Ok((b, metrics(&self.tally(b).expect("present"))?)))
            .collect()
    }

    pub fn country_report(&self, min_instances: usize) -> Result<CountryReport, EvalError> {
        if min_instances == 0 {
            return Err(EvalError::InvalidThreshold);
        }
        let mut sizes: HashMap<Option<CountryCode>, usize> = HashMap::new();
        for r in &self.records {
            *sizes.entry(r.country()).or_default() += 1;
        }
        let group_of = |c: Option<CountryCode>| match c {
            Some(code) if sizes[&c] >= min_instances => CountryGroup::Country(code),
            _ => CountryGroup::Other,
        };

        let backends: Vec<BackendId> = self.predictions.keys().copied().collect();
        let mut rows: BTreeMap<CountryGroup, CountryRow> = BTreeMap::new();
        for (i, record) in self.records.iter().enumerate() {
            let group = group_of(record.country());
            let row = rows.entry(group).or_insert_with(|| CountryRow {
                group,
                instance_count: 0,
                correct: backends.iter().map(|&b| (b, 0)).collect(),
            });
            row.instance_count += 1;
            for (backend, preds) in &self.predictions {
                if preds[i].label() == record.true_gender().label() {
                    *row.correct.get_mut(backend).expect("seeded") += 1;
                }
            }
        }
        let mut rows: Vec<CountryRow> = rows.into_values().collect();
        rows.sort_by(|a, b| {
            (a.group == CountryGroup::Other)
                .cmp(&(b.group == CountryGroup::Other))
                .then(b.instance_count.cmp(&a.instance_count))
                .then(a.group.cmp(&b.group))
        });
        Ok(CountryReport {
            min_instances,
            backends,
            rows,
        })
    }
}

/// Per-country accuracy for a single method's predictions.
pub fn country_breakdown(
    records: &[(PersonRecord, Prediction)],
    min_instances: usize,
) -> Result<CountryReport, EvalError> {
    let mut run = EvaluationRun::new(records.iter().map(|(r, _)| r.clone()).collect());
    if let Some((_, first)) = records.first() {
        run.insert(first.source(), records.iter().map(|(_, p)| *p).collect())?;
    }
    run.country_report(min_instances)
}
