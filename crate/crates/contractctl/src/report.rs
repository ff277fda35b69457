//! The JSON run report and the tolerance gates applied to it.

use std::collections::BTreeMap;

use contraction_core::report::{strictly_decreasing, ConvergenceReport};
use serde::{Serialize, Serializer};

use crate::params::Params;

pub const BUILD_STAMP: &str = env!("CONTRACTCTL_BUILD_STAMP");

fn order_value<S: Serializer>(v: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, o) in v {
        if o.is_finite() {
            m.serialize_entry(k, o)?;
        } else if *o == f64::INFINITY {
            // All errors sat below the round-off floor.
            m.serialize_entry(k, "inf")?;
        } else {
            m.serialize_entry(k, &Option::<f64>::None)?;
        }
    }
    m.end()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Rule {
    AtMost,
    AtLeast,
    OrderWithin,
    OrderAtLeast,
    StrictlyDecreasing,
    LastOverFirstAtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    /// Key under `tol` that overrides the limit.
    pub name: String,
    /// The metric or check the rule is applied to.
    pub target: String,
    pub rule: Rule,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub limit: Vec<f64>,
    pub value: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub experiment: String,
    pub params: Params,
    pub t_values: Vec<f64>,
    pub errors: BTreeMap<String, Vec<f64>>,
    #[serde(serialize_with = "order_value")]
    pub fitted_order: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_errors: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_errors: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, f64>,
    pub gates: Vec<Gate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
    pub passed: bool,
    pub seed: u64,
    pub build_stamp: String,
}

impl Report {
    pub fn new(experiment: &str, params: &Params) -> Self {
        Self {
            experiment: experiment.to_string(),
            params: params.clone(),
            t_values: params.t().to_vec(),
            errors: BTreeMap::new(),
            fitted_order: BTreeMap::new(),
            l2_errors: None,
            sup_errors: None,
            checks: BTreeMap::new(),
            gates: Vec::new(),
            outputs: Vec::new(),
            passed: true,
            seed: params.seed(),
            build_stamp: BUILD_STAMP.to_string(),
        }
    }

    /// Copies the metrics of a convergence report under `prefix/`.
    pub fn absorb(&mut self, prefix: &str, r: &ConvergenceReport) {
        for (k, v) in &r.errors {
            self.errors.insert(key(prefix, k), v.clone());
        }
        for (k, v) in &r.fitted_order {
            self.fitted_order.insert(key(prefix, k), *v);
        }
    }

    pub fn metric(&self, name: &str) -> &[f64] {
        self.errors.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn check(&mut self, name: &str, value: f64) {
        self.checks.insert(name.to_string(), value);
    }

    fn limit(params: &Params, name: &str, default: f64) -> f64 {
        params.tol.get(name).copied().unwrap_or(default)
    }

    fn push(&mut self, gate: Gate) {
        self.passed &= gate.passed;
        self.gates.push(gate);
    }

    /// `value ≤ limit` for a check (or the last entry of a metric when `target` names one).
    pub fn gate_at_most(&mut self, name: &str, target: &str, default: f64) {
        let limit = Self::limit(&self.params, name, default);
        let value = self.scalar(target);
        self.push(Gate {
            name: name.into(),
            target: target.into(),
            rule: Rule::AtMost,
            limit: vec![limit],
            value,
            passed: value.is_some_and(|v| v <= limit),
        });
    }

    pub fn gate_at_least(&mut self, name: &str, target: &str, default: f64) {
        let limit = Self::limit(&self.params, name, default);
        let value = self.scalar(target);
        self.push(Gate {
            name: name.into(),
            target: target.into(),
            rule: Rule::AtLeast,
            limit: vec![limit],
            value,
            passed: value.is_some_and(|v| v >= limit),
        });
    }

    /// Fitted order within `[lo, hi]`; the tolerance key widens the window symmetrically about 1.
    pub fn gate_order_within(&mut self, name: &str, metric: &str, lo: f64, hi: f64) {
        let (lo, hi) = match self.params.tol.get(name) {
            Some(half) => ((lo + hi) / 2.0 - half, (lo + hi) / 2.0 + half),
            None => (lo, hi),
        };
        let value = self.fitted_order.get(metric).copied();
        self.push(Gate {
            name: name.into(),
            target: metric.into(),
            rule: Rule::OrderWithin,
            limit: vec![lo, hi],
            value: value.filter(|v| v.is_finite()),
            passed: value.is_some_and(|v| v >= lo && v <= hi),
        });
    }

    pub fn gate_order_at_least(&mut self, name: &str, metric: &str, default: f64) {
        let limit = Self::limit(&self.params, name, default);
        let value = self.fitted_order.get(metric).copied();
        self.push(Gate {
            name: name.into(),
            target: metric.into(),
            rule: Rule::OrderAtLeast,
            limit: vec![limit],
            value: value.filter(|v| v.is_finite()),
            passed: value.is_some_and(|v| v >= limit),
        });
    }

    /// Strictly decreasing over the first `len` entries (all when `None`).
    pub fn gate_decreasing(&mut self, name: &str, metric: &str, len: Option<usize>) {
        let m = self.metric(metric);
        let m = &m[..len.unwrap_or(m.len()).min(m.len())];
        let passed = m.len() >= 2 && strictly_decreasing(m);
        self.push(Gate {
            name: name.into(),
            target: metric.into(),
            rule: Rule::StrictlyDecreasing,
            limit: Vec::new(),
            value: None,
            passed,
        });
    }

    pub fn gate_last_over_first(&mut self, name: &str, metric: &str, default: f64) {
        let limit = Self::limit(&self.params, name, default);
        let m = self.metric(metric);
        let value = match (m.first(), m.last()) {
            (Some(f), Some(l)) if *f > 0.0 => Some(l / f),
            _ => None,
        };
        self.push(Gate {
            name: name.into(),
            target: metric.into(),
            rule: Rule::LastOverFirstAtMost,
            limit: vec![limit],
            value,
            passed: value.is_some_and(|v| v <= limit),
        });
    }

    fn scalar(&self, target: &str) -> Option<f64> {
        self.checks
            .get(target)
            .copied()
            .or_else(|| self.metric(target).last().copied())
            .filter(|v| !v.is_nan())
    }

    pub fn failed_gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| !g.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn key(prefix: &str, k: &str) -> String {
    if prefix.is_empty() {
        k.to_string()
    } else {
        format!("{prefix}/{k}")
    }
}
