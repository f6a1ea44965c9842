use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which extreme of the sampled ratios is the informative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    /// Upper-bound checks: the largest ratio is reported.
    Max,
    /// Lower-bound checks: the smallest ratio is reported.
    Min,
}

/// Result of scanning a bound over a finite set of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub description: String,
    pub extremum: Extremum,
    pub samples: u64,
    pub worst_ratio: f64,
    pub worst_witness: Vec<i64>,
    pub parameters: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(description: impl Into<String>, extremum: Extremum) -> Self {
        let worst_ratio = match extremum {
            Extremum::Max => f64::NEG_INFINITY,
            Extremum::Min => f64::INFINITY,
        };
        Self {
            description: description.into(),
            extremum,
            samples: 0,
            worst_ratio,
            worst_witness: Vec::new(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn parameter(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    /// Records one sample; NaN ratios always become the witness.
    pub fn observe(&mut self, ratio: f64, witness: &[i64]) {
        self.samples += 1;
        if self.worst_ratio.is_nan() {
            return;
        }
        let worse = ratio.is_nan()
            || match self.extremum {
                Extremum::Max => ratio > self.worst_ratio,
                Extremum::Min => ratio < self.worst_ratio,
            };
        if worse {
            self.worst_ratio = ratio;
            self.worst_witness = witness.to_vec();
        }
    }

    pub fn merge(&mut self, other: &BoundReport) {
        let samples = self.samples + other.samples;
        if other.samples > 0 {
            self.observe(other.worst_ratio, &other.worst_witness);
        }
        self.samples = samples;
    }
}
