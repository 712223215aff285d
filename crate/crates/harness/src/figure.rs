//! CSV series for plotting: one header line, comma-separated columns,
//! LF line endings.

use std::fmt::Write;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::report::{ExperimentResult, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Figure {
    #[value(name = "mdep_vs_E")]
    #[serde(rename = "mdep_vs_E")]
    MdepVsE,
    #[value(name = "power_vs_E")]
    #[serde(rename = "power_vs_E")]
    PowerVsE,
    #[value(name = "quadrature_histogram")]
    #[serde(rename = "quadrature_histogram")]
    QuadratureHistogram,
    #[value(name = "efficiency_bars")]
    #[serde(rename = "efficiency_bars")]
    EfficiencyBars,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::MdepVsE => "mdep_vs_E",
            Figure::PowerVsE => "power_vs_E",
            Figure::QuadratureHistogram => "quadrature_histogram",
            Figure::EfficiencyBars => "efficiency_bars",
        }
    }
}

fn missing(figure: Figure, series: &'static str) -> HarnessError {
    HarnessError::MissingSeries {
        figure: figure.name().to_string(),
        series,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), |v| v.to_string())
}

/// Renders one figure's series from `report`.
pub fn emit_figure_data(report: &RunReport, figure: Figure) -> Result<String> {
    let mut out = String::new();
    match (figure, &report.result) {
        (Figure::MdepVsE, ExperimentResult::MdepCurve { points }) => {
            out.push_str("E,mdep\n");
            for p in points {
                writeln!(out, "{},{}", p.rate, p.mdep).unwrap();
            }
        }
        (Figure::MdepVsE, _) => return Err(missing(figure, "mdep_curve.points")),
        (Figure::PowerVsE, ExperimentResult::SteganalysisSweep { rows, .. }) => {
            out.push_str("E,power,ci99_lo,ci99_hi,mean_estimated_E\n");
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    opt(r.rate),
                    r.detections.rate,
                    r.detections.ci99_lo,
                    r.detections.ci99_hi,
                    opt(r.estimated_rate.map(|m| m.mean))
                )
                .unwrap();
            }
        }
        (Figure::PowerVsE, _) => return Err(missing(figure, "steganalysis_sweep.rows")),
        (Figure::QuadratureHistogram, ExperimentResult::CvRun { histogram: h, .. }) => {
            out.push_str("bin_lo,bin_hi,count,density,model_density\n");
            let total = h.total().max(1) as f64;
            for (k, w) in h.edges.windows(2).enumerate() {
                let density = h.counts[k] as f64 / (total * (w[1] - w[0]));
                writeln!(out, "{},{},{},{},{}", w[0], w[1], h.counts[k], density, h.model_density[k]).unwrap();
            }
        }
        (Figure::QuadratureHistogram, _) => return Err(missing(figure, "cv_run.histogram")),
        (Figure::EfficiencyBars, ExperimentResult::EfficiencyTable { rows, .. }) => {
            out.push_str("protocol,empirical_pe,reference_pe,conclusive_fraction\n");
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.protocol.replace(',', ";"),
                    r.empirical_pe,
                    opt(r.analytic_pe),
                    r.conclusive_fraction
                )
                .unwrap();
            }
        }
        (Figure::EfficiencyBars, _) => return Err(missing(figure, "efficiency_table.rows")),
    }
    Ok(out)
}
