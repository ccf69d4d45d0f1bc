use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

/// How a check's residual is judged against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Pass iff `residual ≤ threshold`.
    AtMost,
    /// Pass iff `residual > threshold` (separation checks).
    Exceeds,
}

/// One named numerical check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "finite_or_null")]
    pub residual: f64,
    #[serde(skip)]
    pub threshold: f64,
    #[serde(skip)]
    pub criterion: Criterion,
    pub pass: bool,
}

fn finite_or_null<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self { name: name.into(), residual, threshold, criterion: Criterion::AtMost, pass: residual <= threshold }
    }

    pub fn exceeds(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self { name: name.into(), residual, threshold, criterion: Criterion::Exceeds, pass: residual > threshold }
    }

    /// A check that failed for a reason other than a large residual.
    pub fn failed(name: impl Into<String>) -> Self {
        Self { name: name.into(), residual: f64::INFINITY, threshold: 0.0, criterion: Criterion::AtMost, pass: false }
    }

    /// Re-judges the residual against a different threshold.
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = match self.criterion {
            Criterion::AtMost => self.residual <= threshold,
            Criterion::Exceeds => self.residual > threshold,
        };
        self
    }
}

/// Running maximum of residuals that also remembers hard failures.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct MaxResidual {
    value: f64,
    broken: bool,
}

impl MaxResidual {
    pub fn push(&mut self, r: f64) {
        if r.is_nan() {
            self.broken = true;
        } else {
            self.value = self.value.max(r);
        }
    }

    pub fn push_result(&mut self, r: crate::Result<f64>) {
        match r {
            Ok(v) => self.push(v),
            Err(_) => self.broken = true,
        }
    }

    pub fn into_check(self, name: &str, threshold: f64) -> Check {
        if self.broken {
            Check::failed(name)
        } else {
            Check::at_most(name, self.value, threshold)
        }
    }
}

/// A list of checks for one verification target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub target: String,
    pub checks: Vec<Check>,
    /// Named quantities reported alongside the checks.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
