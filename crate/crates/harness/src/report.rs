//! Run reports: config echo, per-trial rows, aggregates and provenance.

use std::path::Path;

use qsteg_core::cv::QuadratureSetting;
use qsteg_core::cvproto::EfficiencyReport;
use qsteg_core::stats::{wilson_99, MeanEstimate};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub result: ExperimentResult,
    /// Trials lost to an embedding failure across the whole run.
    pub embedding_failures: u64,
    /// Varies between otherwise identical runs.
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub schema_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub threads: usize,
    pub elapsed_seconds: f64,
}

/// Binomial proportion with a 99% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci99_lo: f64,
    pub ci99_hi: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        let ci = wilson_99(successes, trials.max(1));
        Proportion {
            successes,
            trials,
            rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci99_lo: ci.lo,
            ci99_hi: ci.hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentResult {
    DvDirect {
        trials: Vec<DvDirectTrial>,
        sift_aborts: u64,
        qber_aborts: u64,
        /// Wrong stego bits over every run that got past sifting.
        stego_error: Proportion,
        qber: Option<MeanEstimate>,
    },
    DvReverse {
        trials: Vec<DvReverseTrial>,
        stego_error: Proportion,
        /// Detector verdicts at the configured significance, when Eve listens.
        false_positives: Option<Proportion>,
        induced_qber: Option<MeanEstimate>,
    },
    CvRun {
        protocol: String,
        trials: Vec<CvTrial>,
        confirmed_fraction: Option<MeanEstimate>,
        conclusive_fraction: Option<MeanEstimate>,
        bit_error_rate: Option<MeanEstimate>,
        stego_error: Option<Proportion>,
        histogram: Histogram,
    },
    SteganalysisSweep {
        rows: Vec<PowerRow>,
        reverse: Option<PowerRow>,
    },
    MdepCurve {
        points: Vec<MdepRow>,
    },
    EfficiencyTable {
        rows: Vec<EfficiencyReport>,
        reference: Vec<ReferenceRow>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DvDirectTrial {
    pub index: u64,
    pub displacement: usize,
    pub message: bool,
    pub recovered: Option<bool>,
    pub sift_len: usize,
    pub qber: Option<f64>,
    pub aborted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DvReverseTrial {
    pub index: u64,
    pub message: bool,
    pub recovered: bool,
    pub sift_len: usize,
    pub verdict: Option<bool>,
    pub p_value: Option<f64>,
    pub induced_qber: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTrial {
    pub index: u64,
    pub conclusive: usize,
    pub confirmed_fraction: f64,
    pub bit_error_rate: Option<f64>,
    pub message: Option<bool>,
    pub recovered: Option<bool>,
}

/// Counts of one state's homodyne values in one quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub state: usize,
    pub setting: QuadratureSetting,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values outside the outer edges.
    pub below: u64,
    pub above: u64,
    /// Model density at each bin centre.
    pub model_density: Vec<f64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.below + self.above + self.counts.iter().sum::<u64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    /// Embedding rate; `None` for the reverse-communication row.
    pub rate: Option<f64>,
    pub detections: Proportion,
    pub estimated_rate: Option<MeanEstimate>,
    pub induced_qber: Option<MeanEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdepRow {
    pub rate: f64,
    pub mdep: f64,
    pub converged: bool,
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub protocol: String,
    pub states: usize,
    pub listed_pe: f64,
    pub formula_pe: f64,
}

impl RunReport {
    /// Everything that must reproduce exactly under the same config and
    /// seed: the report minus execution details and thread settings.
    pub fn content(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        let map = value.as_object_mut().expect("report is an object");
        map.remove("execution");
        if let Some(config) = map.get_mut("config").and_then(|c| c.as_object_mut()) {
            config.remove("threads");
        }
        value
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| HarnessError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
