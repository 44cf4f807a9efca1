//! Binary classification metrics, ROC/AUC and per-run summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Counts decisions against labels (`true` = positive / fake).
pub fn confusion(decisions: &[bool], labels: &[bool]) -> Result<ConfusionCounts> {
    if decisions.len() != labels.len() {
        return Err(Error::domain(format!(
            "decision/label length mismatch: {} vs {}",
            decisions.len(),
            labels.len()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (&d, &l) in decisions.iter().zip(labels) {
        match (d, l) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// The nine reported metrics, in report order.
pub const METRIC_NAMES: [&str; 9] = [
    "accuracy",
    "sensitivity",
    "specificity",
    "precision",
    "f_measure",
    "mcc",
    "npv",
    "fpr",
    "fnr",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSuite {
    pub accuracy: f64,
    pub precision: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub f_measure: f64,
    pub mcc: f64,
    pub npv: f64,
    pub fnr: f64,
    pub fpr: f64,
    /// Set when some ratio had a zero denominator and was reported as 0.
    pub undefined: bool,
}

impl MetricSuite {
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "accuracy" => self.accuracy,
            "precision" => self.precision,
            "sensitivity" => self.sensitivity,
            "specificity" => self.specificity,
            "f_measure" => self.f_measure,
            "mcc" => self.mcc,
            "npv" => self.npv,
            "fnr" => self.fnr,
            "fpr" => self.fpr,
            _ => return None,
        })
    }

    pub fn values(&self) -> [f64; 9] {
        METRIC_NAMES.map(|n| self.get(n).unwrap())
    }
}

fn ratio(num: f64, den: f64, undefined: &mut bool) -> f64 {
    if den == 0.0 {
        *undefined = true;
        0.0
    } else {
        num / den
    }
}

pub fn metric_suite(c: &ConfusionCounts) -> Result<MetricSuite> {
    if c.total() == 0 {
        return Err(Error::domain("empty confusion counts"));
    }
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let mut undefined = false;
    let accuracy = (tp + tn) / (tp + tn + fp + fn_);
    let precision = ratio(tp, tp + fp, &mut undefined);
    let sensitivity = ratio(tp, tp + fn_, &mut undefined);
    let specificity = ratio(tn, tn + fp, &mut undefined);
    let npv = ratio(tn, tn + fn_, &mut undefined);
    let f_measure = ratio(2.0 * precision * sensitivity, precision + sensitivity, &mut undefined);
    let mcc_den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    let mcc = ratio(tp * tn - fp * fn_, mcc_den, &mut undefined);
    // complements are only meaningful when the rate itself was defined
    let fnr = if tp + fn_ > 0.0 { 1.0 - sensitivity } else { 0.0 };
    let fpr = if tn + fp > 0.0 { 1.0 - specificity } else { 0.0 };
    Ok(MetricSuite {
        accuracy,
        precision,
        sensitivity,
        specificity,
        f_measure,
        mcc,
        npv,
        fnr,
        fpr,
        undefined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` points from `(0, 0)` to `(1, 1)`, non-decreasing in both.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC by sweeping a threshold down through the sorted unique scores.
/// Tied scores move both rates in one step, so ties contribute half credit
/// to the trapezoidal AUC.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::domain("score/label length mismatch"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::domain("scores must be finite"));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Refused("ROC needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let (x0, y0) = *points.last().unwrap();
        let pt = (fp as f64 / neg as f64, tp as f64 / pos as f64);
        auc += (pt.0 - x0) * (pt.1 + y0) / 2.0;
        points.push(pt);
    }
    Ok(RocCurve { points, auc })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub mean: f64,
    pub maximum: f64,
    pub std_deviation: f64,
    pub median: f64,
    pub minimum: f64,
}

pub const STATISTIC_NAMES: [&str; 5] = ["mean", "maximum", "std", "median", "minimum"];

impl RunStatistics {
    pub fn values(&self) -> [f64; 5] {
        [self.mean, self.maximum, self.std_deviation, self.median, self.minimum]
    }
}

/// Median with the midpoint rule for even counts. Panics on empty input.
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Summary over repeated runs; sample (n-1) standard deviation, 0 for a singleton.
pub fn run_statistics(values: &[f64]) -> Result<RunStatistics> {
    if values.is_empty() {
        return Err(Error::domain("no values to summarise"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_deviation = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(RunStatistics {
        mean,
        maximum: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        std_deviation,
        median: median(values),
        minimum: values.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
