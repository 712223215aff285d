//! Experiment configuration, read from and written to JSON.

use std::path::Path;

use qsteg_core::adversary::{ChannelModel, EveMeasurement, EveStrategy};
use qsteg_core::cvproto::CvProtocol;
use qsteg_core::dv::ReverseVariant;
use qsteg_core::qstate::EmbeddingParams;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    /// Independent runs; ignored by `mdep_curve`.
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Worker threads; `None` uses every core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub experiment: Experiment,
}

fn default_trials() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Check-bit stego runs over BB84.
    DvDirect {
        m: usize,
        #[serde(default)]
        delta: Option<usize>,
        #[serde(default = "default_abort_qber")]
        abort_qber: f64,
        #[serde(default)]
        channel: ChannelModel,
        /// Fixed displacement; when absent each run uses the displacement
        /// rule on the previous run's key length.
        #[serde(default)]
        displacement: Option<usize>,
    },
    /// Reverse-announcement BB84 runs, optionally under interception.
    DvReverse {
        m: usize,
        #[serde(default)]
        delta: Option<usize>,
        #[serde(default)]
        channel: ChannelModel,
        #[serde(default)]
        variant: ReverseVariant,
        #[serde(default = "default_displacement")]
        displacement: usize,
        #[serde(default)]
        eve: Option<EveStrategy>,
        #[serde(default = "default_significance")]
        significance: f64,
    },
    /// CV protocol runs with reverse embedding.
    CvRun {
        protocol: CvProtocol,
        alpha: f64,
        #[serde(default = "default_x0")]
        x0: f64,
        n_signals: usize,
        #[serde(default = "default_displacement")]
        displacement: usize,
        #[serde(default = "default_true")]
        embed: bool,
    },
    /// Detection rate of the steganalysis test against direct embedding at
    /// each rate, plus the false-positive rate on reverse runs.
    SteganalysisSweep {
        rates: Vec<f64>,
        #[serde(default = "default_bias")]
        bias: f64,
        /// Signals per trial: `4(m + δ)`.
        m: usize,
        #[serde(default)]
        delta: Option<usize>,
        #[serde(default = "default_intercept")]
        intercept_fraction: f64,
        #[serde(default = "default_significance")]
        significance: f64,
        #[serde(default = "default_true")]
        include_reverse: bool,
        /// Trials for the reverse row; defaults to `trials`.
        #[serde(default)]
        reverse_trials: Option<u64>,
    },
    MdepCurve {
        rates: Vec<f64>,
        #[serde(default = "default_bias")]
        bias: f64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default = "default_max_iterations")]
        max_iterations: usize,
        /// Grid resolution of the dual brute-force check; absent skips it.
        #[serde(default)]
        oracle_resolution: Option<usize>,
    },
    EfficiencyTable {
        #[serde(default = "default_protocols")]
        protocols: Vec<CvProtocol>,
        #[serde(default = "default_alpha_coherent")]
        alpha_coherent: f64,
        #[serde(default = "default_alpha_pascs")]
        alpha_pascs: f64,
        #[serde(default = "default_x0")]
        x0: f64,
        signals: usize,
    },
}

fn default_abort_qber() -> f64 {
    0.11
}
fn default_displacement() -> usize {
    1
}
fn default_significance() -> f64 {
    0.01
}
fn default_x0() -> f64 {
    0.4
}
fn default_true() -> bool {
    true
}
fn default_bias() -> f64 {
    1.0
}
fn default_intercept() -> f64 {
    1.0
}
fn default_tolerance() -> f64 {
    1e-12
}
fn default_max_iterations() -> usize {
    100_000
}
fn default_protocols() -> Vec<CvProtocol> {
    vec![CvProtocol::O4, CvProtocol::E4, CvProtocol::CvB92]
}
fn default_alpha_coherent() -> f64 {
    0.8
}
fn default_alpha_pascs() -> f64 {
    1.2
}

impl Experiment {
    pub fn tag(&self) -> &'static str {
        match self {
            Experiment::DvDirect { .. } => "dv_direct",
            Experiment::DvReverse { .. } => "dv_reverse",
            Experiment::CvRun { .. } => "cv_run",
            Experiment::SteganalysisSweep { .. } => "steganalysis_sweep",
            Experiment::MdepCurve { .. } => "mdep_curve",
            Experiment::EfficiencyTable { .. } => "efficiency_table",
        }
    }
}

fn check(ok: bool, field: &str, reason: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::config(field, reason()))
    }
}

fn unit(x: f64, field: &str) -> Result<()> {
    check((0.0..=1.0).contains(&x), field, || format!("{x} is outside [0, 1]"))
}

fn open_unit(x: f64, field: &str) -> Result<()> {
    check(x > 0.0 && x < 1.0, field, || format!("{x} is outside (0, 1)"))
}

fn channel(c: &ChannelModel, field: &str) -> Result<()> {
    c.validate().map_err(|e| HarnessError::config(field, e.to_string()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<()> {
        check(self.schema_version == SCHEMA_VERSION, "schema_version", || {
            format!("{} is not supported (expected {SCHEMA_VERSION})", self.schema_version)
        })?;
        check(self.trials >= 1, "trials", || "must be at least 1".into())?;
        if let Some(t) = self.threads {
            check(t >= 1, "threads", || "must be at least 1".into())?;
        }
        match &self.experiment {
            Experiment::DvDirect {
                m,
                abort_qber,
                channel: c,
                displacement,
                ..
            } => {
                check(*m >= 2, "experiment.m", || format!("{m} < 2"))?;
                unit(*abort_qber, "experiment.abort_qber")?;
                channel(c, "experiment.channel")?;
                if let Some(d) = displacement {
                    check(*d >= 1, "experiment.displacement", || "must be at least 1".into())?;
                }
            }
            Experiment::DvReverse {
                m,
                channel: c,
                displacement,
                eve,
                significance,
                ..
            } => {
                check(*m >= 2, "experiment.m", || format!("{m} < 2"))?;
                channel(c, "experiment.channel")?;
                check(*displacement >= 1, "experiment.displacement", || "must be at least 1".into())?;
                if let Some(e) = eve {
                    unit(e.intercept_fraction, "experiment.eve.intercept_fraction")?;
                    if let EveMeasurement::OptimalPovm { hypothesis } = e.measurement {
                        unit(hypothesis.rate, "experiment.eve.measurement.hypothesis.rate")?;
                        unit(hypothesis.bias, "experiment.eve.measurement.hypothesis.bias")?;
                    }
                }
                open_unit(*significance, "experiment.significance")?;
            }
            Experiment::CvRun {
                alpha,
                x0,
                n_signals,
                displacement,
                ..
            } => {
                check(alpha.is_finite() && *alpha >= 0.0, "experiment.alpha", || format!("{alpha} < 0"))?;
                check(x0.is_finite() && *x0 >= 0.0, "experiment.x0", || format!("{x0} < 0"))?;
                check(*n_signals >= 1, "experiment.n_signals", || "must be at least 1".into())?;
                check(*displacement >= 1, "experiment.displacement", || "must be at least 1".into())?;
            }
            Experiment::SteganalysisSweep {
                rates,
                bias,
                m,
                intercept_fraction,
                significance,
                reverse_trials,
                ..
            } => {
                check(!rates.is_empty(), "experiment.rates", || "empty grid".into())?;
                for (i, r) in rates.iter().enumerate() {
                    unit(*r, &format!("experiment.rates[{i}]"))?;
                }
                unit(*bias, "experiment.bias")?;
                check(*m >= 2, "experiment.m", || format!("{m} < 2"))?;
                check(*intercept_fraction > 0.0 && *intercept_fraction <= 1.0, "experiment.intercept_fraction", || {
                    format!("{intercept_fraction} is outside (0, 1]")
                })?;
                open_unit(*significance, "experiment.significance")?;
                if let Some(t) = reverse_trials {
                    check(*t >= 1, "experiment.reverse_trials", || "must be at least 1".into())?;
                }
            }
            Experiment::MdepCurve {
                rates,
                bias,
                tolerance,
                max_iterations,
                oracle_resolution,
            } => {
                check(!rates.is_empty(), "experiment.rates", || "empty grid".into())?;
                for (i, r) in rates.iter().enumerate() {
                    unit(*r, &format!("experiment.rates[{i}]"))?;
                }
                unit(*bias, "experiment.bias")?;
                check(*tolerance > 0.0, "experiment.tolerance", || "must be positive".into())?;
                check(*max_iterations >= 1, "experiment.max_iterations", || "must be at least 1".into())?;
                if let Some(r) = oracle_resolution {
                    check(*r >= 8, "experiment.oracle_resolution", || format!("{r} < 8"))?;
                }
            }
            Experiment::EfficiencyTable {
                protocols,
                alpha_coherent,
                alpha_pascs,
                x0,
                signals,
            } => {
                check(!protocols.is_empty(), "experiment.protocols", || "empty list".into())?;
                check(!protocols.contains(&CvProtocol::NState), "experiment.protocols", || {
                    "N-state needs an explicit state set; use cv presets".into()
                })?;
                check(*alpha_coherent >= 0.0, "experiment.alpha_coherent", || "must be non-negative".into())?;
                check(*alpha_pascs >= 0.0, "experiment.alpha_pascs", || "must be non-negative".into())?;
                check(*x0 >= 0.0, "experiment.x0", || "must be non-negative".into())?;
                check(*signals >= 1, "experiment.signals", || "must be at least 1".into())?;
            }
        }
        Ok(())
    }
}

/// Eve with the optimal measurement for honest (unembedded) traffic.
pub fn optimal_eve(intercept_fraction: f64) -> EveStrategy {
    EveStrategy {
        intercept_fraction,
        measurement: EveMeasurement::OptimalPovm {
            hypothesis: EmbeddingParams::none(),
        },
    }
}
