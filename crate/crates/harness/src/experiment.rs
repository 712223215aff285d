//! Experiment dispatch and Monte Carlo orchestration.
//!
//! Trial `i` of an experiment draws from `derive_stream(seed, tag, i)`, so
//! results do not depend on scheduling. Trials are collected in index order
//! and aggregated sequentially.

use std::time::Instant;

use qsteg_core::adversary::{mdep_curve, steganalyze, ChannelModel, DetectionReport, Eavesdropper};
use qsteg_core::cv::{quadrature_moments, quadrature_pdf, QuadratureSetting};
use qsteg_core::cvproto::{
    efficiency_measure, n_state_formula, reverse_embed_cv, reverse_extract_cv, CvEngine, CvProtocol,
    CvProtocolSpec, EFFICIENCY_TABLE,
};
use qsteg_core::dv::{
    bb84_reverse_extract, bb84_reverse_run, bb84_reverse_run_with_eve, bb84_run_with_eve, displacement_next, mqs_run,
    DvConfig, Preparation, ReverseVariant,
};
use qsteg_core::qstate::{bb84_ensemble, mdep_bruteforce, EmbeddingParams};
use qsteg_core::seed::{derive_stream, Stream};
use qsteg_core::stats::{mean_estimate, MeanEstimate};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{optimal_eve, Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::report::*;

const HISTOGRAM_BINS: usize = 48;
const HISTOGRAM_SPAN: f64 = 6.0;

fn mean_of(values: &[f64]) -> Option<MeanEstimate> {
    (!values.is_empty()).then(|| mean_estimate(values))
}

/// Splits a trial result into a value or a counted embedding failure.
enum Trial<T> {
    Done(T),
    EmbeddingFailed,
}

fn trial<T>(r: qsteg_core::Result<T>) -> Result<Trial<T>> {
    match r {
        Ok(v) => Ok(Trial::Done(v)),
        Err(qsteg_core::Error::EmbeddingFailure(_)) => Ok(Trial::EmbeddingFailed),
        Err(e) => Err(e.into()),
    }
}

/// Runs `f` for trial indices `0..n` in parallel, in index order.
fn run_trials<T, F>(seed: u64, tag: &str, n: u64, f: F) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> Result<Trial<T>> + Sync,
{
    let outcomes: Vec<Result<Trial<T>>> = (0..n)
        .into_par_iter()
        .map(|i| f(i, &mut derive_stream(seed, tag, i)))
        .collect();
    let mut done = Vec::with_capacity(n as usize);
    let mut failures = 0;
    for o in outcomes {
        match o? {
            Trial::Done(v) => done.push(v),
            Trial::EmbeddingFailed => failures += 1,
        }
    }
    Ok((done, failures))
}

fn dv_config(m: usize, delta: Option<usize>, abort_qber: f64, channel: ChannelModel) -> Result<DvConfig> {
    let mut c = DvConfig::new(m)?;
    if let Some(d) = delta {
        c.delta = d;
    }
    c.abort_qber = abort_qber;
    c.channel = channel;
    c.validate()?;
    Ok(c)
}

/// Runs `config` on a pool of `config.threads` workers (all cores when
/// unset) and assembles the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::config("threads", e.to_string()))?;
    let start = Instant::now();
    let (result, embedding_failures) = pool.install(|| dispatch(config))?;
    Ok(RunReport {
        config: config.clone(),
        provenance: Provenance {
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: config.schema_version,
        },
        result,
        embedding_failures,
        execution: Execution {
            threads: pool.current_num_threads(),
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

fn dispatch(config: &ExperimentConfig) -> Result<(ExperimentResult, u64)> {
    let seed = config.seed;
    let trials = config.trials;
    let tag = config.experiment.tag();
    match &config.experiment {
        Experiment::DvDirect {
            m,
            delta,
            abort_qber,
            channel,
            displacement,
        } => dv_direct(
            seed,
            trials,
            &dv_config(*m, *delta, *abort_qber, *channel)?,
            *displacement,
        ),
        Experiment::DvReverse {
            m,
            delta,
            channel,
            variant,
            displacement,
            eve,
            significance,
        } => {
            let c = dv_config(*m, *delta, 0.11, *channel)?;
            let eve = eve.map(Eavesdropper::new).transpose()?;
            let (rows, failures) = run_trials(seed, tag, trials, |i, rng| {
                let message = rng.random::<bool>();
                let d = *displacement;
                let (run, obs) = match &eve {
                    Some(e) => match trial(bb84_reverse_run_with_eve(&c, e, Some(message), d, *variant, rng))? {
                        Trial::Done(v) => v,
                        Trial::EmbeddingFailed => return Ok(Trial::EmbeddingFailed),
                    },
                    None => match trial(bb84_reverse_run(&c, Some(message), d, *variant, rng))? {
                        Trial::Done(v) => (v, Vec::new()),
                        Trial::EmbeddingFailed => return Ok(Trial::EmbeddingFailed),
                    },
                };
                let t = &run.transcript;
                let bits: Vec<bool> = t.prepared.iter().map(|s| s.bit()).collect();
                let recovered = bb84_reverse_extract(&bits, &t.announcements, d, *variant)?;
                let detection = match &eve {
                    Some(e) => Some(steganalyze(&obs, e, *significance)?),
                    None => None,
                };
                Ok(Trial::Done(DvReverseTrial {
                    index: i,
                    message,
                    recovered,
                    sift_len: t.sift_len(),
                    verdict: detection.as_ref().map(|r| r.verdict),
                    p_value: detection.as_ref().map(|r| r.p_value),
                    induced_qber: eve.as_ref().and(t.sifted_error_rate()),
                }))
            })?;
            let errors = rows.iter().filter(|r| r.recovered != r.message).count() as u64;
            let false_positives = eve.as_ref().map(|_| {
                let hits = rows.iter().filter(|r| r.verdict == Some(true)).count() as u64;
                Proportion::new(hits, rows.len() as u64)
            });
            let qbers: Vec<f64> = rows.iter().filter_map(|r| r.induced_qber).collect();
            let result = ExperimentResult::DvReverse {
                stego_error: Proportion::new(errors, rows.len() as u64),
                false_positives,
                induced_qber: mean_of(&qbers),
                trials: rows,
            };
            Ok((result, failures))
        }
        Experiment::CvRun {
            protocol,
            alpha,
            x0,
            n_signals,
            displacement,
            embed,
        } => cv_run(seed, trials, &preset(*protocol, *alpha, *x0, *n_signals)?, *displacement, *embed),
        Experiment::SteganalysisSweep {
            rates,
            bias,
            m,
            delta,
            intercept_fraction,
            significance,
            include_reverse,
            reverse_trials,
        } => {
            let c = dv_config(*m, *delta, 0.11, ChannelModel::Lossless)?;
            let eve = Eavesdropper::new(optimal_eve(*intercept_fraction))?;
            let mut rows = Vec::with_capacity(rates.len());
            for (k, &rate) in rates.iter().enumerate() {
                let prep = if rate == 0.0 {
                    Preparation::Uniform
                } else {
                    Preparation::Embedded(EmbeddingParams::new(rate, *bias)?)
                };
                let (reports, _) = run_trials(seed, &format!("{tag}/rate-{k}"), trials, |_, rng| {
                    let (t, obs) = bb84_run_with_eve(&c, &prep, &eve, rng)?;
                    let mut r = steganalyze(&obs, &eve, *significance)?;
                    r.induced_qber = t.sifted_error_rate();
                    Ok(Trial::Done(r))
                })?;
                rows.push(power_row(Some(rate), &reports));
            }
            let mut failures = 0;
            let reverse = if *include_reverse {
                let n = reverse_trials.unwrap_or(trials);
                let (reports, f) = run_trials(seed, &format!("{tag}/reverse"), n, |i, rng| {
                    let message = rng.random::<bool>();
                    let d = displacement_next(Some(i as usize), c.m);
                    let out = bb84_reverse_run_with_eve(&c, &eve, Some(message), d, ReverseVariant::B, rng);
                    match trial(out)? {
                        Trial::Done((run, obs)) => {
                            let mut r = steganalyze(&obs, &eve, *significance)?;
                            r.induced_qber = run.transcript.sifted_error_rate();
                            Ok(Trial::Done(r))
                        }
                        Trial::EmbeddingFailed => Ok(Trial::EmbeddingFailed),
                    }
                })?;
                failures = f;
                Some(power_row(None, &reports))
            } else {
                None
            };
            Ok((ExperimentResult::SteganalysisSweep { rows, reverse }, failures))
        }
        Experiment::MdepCurve {
            rates,
            bias,
            tolerance,
            max_iterations,
            oracle_resolution,
        } => {
            let curve = mdep_curve(rates, *bias, *tolerance, *max_iterations)?;
            let points = curve
                .par_iter()
                .map(|p| {
                    let oracle = match oracle_resolution {
                        Some(res) => Some(mdep_bruteforce(&bb84_ensemble(EmbeddingParams::new(p.rate, *bias)?), *res)?),
                        None => None,
                    };
                    Ok(MdepRow {
                        rate: p.rate,
                        mdep: p.mdep,
                        converged: p.converged,
                        oracle,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((ExperimentResult::MdepCurve { points }, 0))
        }
        Experiment::EfficiencyTable {
            protocols,
            alpha_coherent,
            alpha_pascs,
            x0,
            signals,
        } => {
            let rows = protocols
                .par_iter()
                .enumerate()
                .map(|(k, &p)| {
                    let alpha = match p {
                        CvProtocol::CvBb84Pascs | CvProtocol::CvB92 => *alpha_pascs,
                        _ => *alpha_coherent,
                    };
                    let spec = preset(p, alpha, *x0, *signals)?;
                    Ok(efficiency_measure(&spec, *signals, &mut derive_stream(seed, tag, k as u64))?)
                })
                .collect::<Result<Vec<_>>>()?;
            let reference = EFFICIENCY_TABLE
                .iter()
                .map(|r| ReferenceRow {
                    protocol: r.label.to_string(),
                    states: r.states,
                    listed_pe: r.efficiency,
                    formula_pe: n_state_formula(r.states),
                })
                .collect();
            Ok((ExperimentResult::EfficiencyTable { rows, reference }, 0))
        }
    }
}

fn preset(protocol: CvProtocol, alpha: f64, x0: f64, n: usize) -> Result<CvProtocolSpec> {
    let spec = match protocol {
        CvProtocol::O4 => CvProtocolSpec::o4(alpha, x0, n),
        CvProtocol::E4 => CvProtocolSpec::e4(alpha, x0, n),
        CvProtocol::CvBb84Pascs => CvProtocolSpec::cv_bb84_pascs(alpha, x0, n),
        CvProtocol::CvB92 => CvProtocolSpec::cvb92(alpha, x0, n),
        CvProtocol::NState => {
            return Err(HarnessError::config(
                "experiment.protocol",
                "n_state has no preset state set",
            ))
        }
    };
    spec.map_err(|e| HarnessError::config("experiment", e.to_string()))
}

fn power_row(rate: Option<f64>, reports: &[DetectionReport]) -> PowerRow {
    let hits = reports.iter().filter(|r| r.verdict).count() as u64;
    let estimates: Vec<f64> = reports.iter().map(|r| r.estimated_rate).collect();
    let qbers: Vec<f64> = reports.iter().filter_map(|r| r.induced_qber).collect();
    PowerRow {
        rate,
        detections: Proportion::new(hits, reports.len() as u64),
        estimated_rate: mean_of(&estimates),
        induced_qber: mean_of(&qbers),
    }
}

fn dv_direct(seed: u64, trials: u64, c: &DvConfig, displacement: Option<usize>) -> Result<(ExperimentResult, u64)> {
    let tag = "dv_direct";
    let one = |i: u64, d: usize, rng: &mut Stream| -> Result<Trial<DvDirectTrial>> {
        let message = rng.random::<bool>();
        let out = match trial(mqs_run(c, message, d, rng))? {
            Trial::Done(o) => o,
            Trial::EmbeddingFailed => return Ok(Trial::EmbeddingFailed),
        };
        Ok(Trial::Done(DvDirectTrial {
            index: i,
            displacement: d,
            message,
            recovered: out.recovered_bit,
            sift_len: out.transcript.sift_len(),
            qber: out.transcript.qber,
            aborted: out.transcript.aborted,
        }))
    };
    let (rows, failures) = match displacement {
        Some(d) => run_trials(seed, tag, trials, |i, rng| one(i, d, rng))?,
        None => {
            // Each displacement depends on the previous run's key length.
            let mut rows = Vec::with_capacity(trials as usize);
            let mut failures = 0;
            let mut previous = None;
            for i in 0..trials {
                let d = displacement_next(previous, c.m);
                match one(i, d, &mut derive_stream(seed, tag, i))? {
                    Trial::Done(row) => {
                        previous = row.recovered.map(|_| row.sift_len - c.m);
                        rows.push(row);
                    }
                    Trial::EmbeddingFailed => failures += 1,
                }
            }
            (rows, failures)
        }
    };
    let sift_aborts = rows.iter().filter(|r| r.recovered.is_none()).count() as u64;
    let qber_aborts = rows.iter().filter(|r| r.recovered.is_some() && r.aborted).count() as u64;
    let completed: Vec<&DvDirectTrial> = rows.iter().filter(|r| r.recovered.is_some()).collect();
    let errors = completed.iter().filter(|r| r.recovered != Some(r.message)).count() as u64;
    let qbers: Vec<f64> = completed.iter().filter_map(|r| r.qber).collect();
    let result = ExperimentResult::DvDirect {
        sift_aborts,
        qber_aborts,
        stego_error: Proportion::new(errors, completed.len() as u64),
        qber: mean_of(&qbers),
        trials: rows,
    };
    Ok((result, failures))
}

fn cv_run(seed: u64, trials: u64, spec: &CvProtocolSpec, d: usize, embed: bool) -> Result<(ExperimentResult, u64)> {
    let engine = CvEngine::new(spec.clone())?;
    let hist_state = 0;
    let hist_setting = QuadratureSetting::Position;
    let fock = spec.states[hist_state].state.fock()?;
    let (mean, var) = quadrature_moments(&fock, hist_setting);
    let sd = var.sqrt();
    let lo = mean - HISTOGRAM_SPAN * sd;
    let width = 2.0 * HISTOGRAM_SPAN * sd / HISTOGRAM_BINS as f64;
    let edges: Vec<f64> = (0..=HISTOGRAM_BINS).map(|k| lo + k as f64 * width).collect();
    let centres: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let model_density = quadrature_pdf(&fock, hist_setting, &centres)?;

    let (rows, failures) = run_trials(seed, "cv_run", trials, |i, rng| {
        let t = engine.run(rng);
        let mut counts = vec![0u64; HISTOGRAM_BINS + 2];
        for k in 0..t.n_signals() {
            if t.sent[k] == hist_state && t.settings[k] == hist_setting {
                let x = (t.raw_values[k] - lo) / width;
                let slot = if x < 0.0 {
                    0
                } else if x >= HISTOGRAM_BINS as f64 {
                    HISTOGRAM_BINS + 1
                } else {
                    x as usize + 1
                };
                counts[slot] += 1;
            }
        }
        let (message, recovered) = if embed {
            let message = rng.random::<bool>();
            match trial(reverse_embed_cv(&t, message, d, rng))? {
                Trial::Done(ann) => (Some(message), Some(reverse_extract_cv(&ann, d, &t.sender_bits)?)),
                Trial::EmbeddingFailed => return Ok(Trial::EmbeddingFailed),
            }
        } else {
            (None, None)
        };
        Ok(Trial::Done((
            CvTrial {
                index: i,
                conclusive: t.conclusive.len(),
                confirmed_fraction: t.confirmed_fraction(),
                bit_error_rate: t.bit_error_rate(),
                message,
                recovered,
            },
            counts,
        )))
    })?;

    let mut all = vec![0u64; HISTOGRAM_BINS + 2];
    for (_, counts) in &rows {
        for (a, c) in all.iter_mut().zip(counts) {
            *a += c;
        }
    }
    let trials: Vec<CvTrial> = rows.into_iter().map(|(t, _)| t).collect();
    let confirmed: Vec<f64> = trials.iter().map(|t| t.confirmed_fraction).collect();
    let conclusive: Vec<f64> = trials
        .iter()
        .map(|t| t.conclusive as f64 / spec.n_signals as f64)
        .collect();
    let bers: Vec<f64> = trials.iter().filter_map(|t| t.bit_error_rate).collect();
    let stego_error = embed.then(|| {
        let wrong = trials.iter().filter(|t| t.recovered != t.message).count() as u64;
        Proportion::new(wrong, trials.len() as u64)
    });
    let result = ExperimentResult::CvRun {
        protocol: spec.label(),
        confirmed_fraction: mean_of(&confirmed),
        conclusive_fraction: mean_of(&conclusive),
        bit_error_rate: mean_of(&bers),
        stego_error,
        histogram: Histogram {
            state: hist_state,
            setting: hist_setting,
            edges,
            below: all[0],
            above: all[HISTOGRAM_BINS + 1],
            counts: all[1..=HISTOGRAM_BINS].to_vec(),
            model_density,
        },
        trials,
    };
    Ok((result, failures))
}
