use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsteg_harness::report::ExperimentResult;
use qsteg_harness::{emit_figure_data, run_experiment, Experiment, ExperimentConfig, Figure, HarnessError, Result, RunReport};

#[derive(Parser)]
#[command(name = "qsteg", version, about = "Simulate and analyse QKD-embedded steganography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config trial count.
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum discrimination error of the embedded BB84 ensemble against E.
    MdepCurve {
        /// Grid points spread evenly over [0, 1].
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, default_value_t = 1.0)]
        bias: f64,
        /// Also evaluate the dual grid-search oracle at this resolution.
        #[arg(long)]
        oracle_resolution: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Basis-usable fractions of the CV protocols next to the reference table.
    EfficiencyTable {
        #[arg(long, default_value_t = 100_000)]
        signals: usize,
        #[arg(long, default_value_t = 0.4)]
        x0: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Detection rate on direct embedding and on reverse runs.
    Steganalyze {
        /// Embedding rates to test, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        rates: Vec<f64>,
        /// Half the sifted length; each trial sends 4(m + delta) signals.
        #[arg(long, default_value_t = 2250)]
        m: usize,
        #[arg(long, default_value_t = 250)]
        delta: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        reverse_trials: Option<u64>,
        #[arg(long, default_value_t = 0.01)]
        significance: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Extract CSV figure data from a saved report.
    Figure {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        name: Figure,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Directory for report.json (and figure CSV where applicable).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn execute(config: ExperimentConfig, out: Option<&Path>, figure: Option<Figure>) -> Result<RunReport> {
    config.validate()?;
    let report = run_experiment(&config)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        report.write(&dir.join("report.json"))?;
        if let Some(f) = figure {
            write_file(&dir.join(format!("{}.csv", f.name())), &emit_figure_data(&report, f)?)?;
        }
    }
    Ok(report)
}

fn config(seed: u64, trials: u64, threads: Option<usize>, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: qsteg_harness::SCHEMA_VERSION,
        seed,
        trials,
        threads,
        experiment,
    }
}

fn summary(report: &RunReport) -> String {
    let mut lines = Vec::new();
    match &report.result {
        ExperimentResult::DvDirect {
            stego_error,
            sift_aborts,
            qber_aborts,
            qber,
            ..
        } => {
            lines.push(format!(
                "stego bit errors {}/{} (rate {:.4}, 99% CI [{:.4}, {:.4}])",
                stego_error.successes, stego_error.trials, stego_error.rate, stego_error.ci99_lo, stego_error.ci99_hi
            ));
            lines.push(format!("aborted at sifting {sift_aborts}, by error rate {qber_aborts}"));
            if let Some(q) = qber {
                lines.push(format!("mean check error rate {:.4}", q.mean));
            }
        }
        ExperimentResult::DvReverse {
            stego_error,
            false_positives,
            induced_qber,
            ..
        } => {
            lines.push(format!("stego bit errors {}/{}", stego_error.successes, stego_error.trials));
            if let Some(fp) = false_positives {
                lines.push(format!(
                    "detector alarms {}/{} (rate {:.4}, 99% CI [{:.4}, {:.4}])",
                    fp.successes, fp.trials, fp.rate, fp.ci99_lo, fp.ci99_hi
                ));
            }
            if let Some(q) = induced_qber {
                lines.push(format!("induced sifted error rate {:.4}", q.mean));
            }
        }
        ExperimentResult::CvRun {
            protocol,
            confirmed_fraction,
            conclusive_fraction,
            bit_error_rate,
            stego_error,
            ..
        } => {
            lines.push(protocol.clone());
            let show = |name: &str, m: &Option<qsteg_core::stats::MeanEstimate>| {
                m.map(|m| format!("{name} {:.4}", m.mean)).unwrap_or_else(|| format!("{name} n/a"))
            };
            lines.push(show("basis-usable fraction", confirmed_fraction));
            lines.push(show("conclusive fraction", conclusive_fraction));
            lines.push(show("conclusive bit error rate", bit_error_rate));
            if let Some(s) = stego_error {
                lines.push(format!("stego bit errors {}/{}", s.successes, s.trials));
            }
        }
        ExperimentResult::SteganalysisSweep { rows, reverse } => {
            for r in rows.iter().chain(reverse) {
                let label = r.rate.map_or_else(|| "reverse".to_string(), |e| format!("E={e}"));
                lines.push(format!(
                    "{label:>10}  detected {}/{}  rate {:.4}  99% CI [{:.4}, {:.4}]",
                    r.detections.successes, r.detections.trials, r.detections.rate, r.detections.ci99_lo, r.detections.ci99_hi
                ));
            }
        }
        ExperimentResult::MdepCurve { points } => {
            for p in points {
                let oracle = p.oracle.map(|o| format!("  oracle {o:.6}")).unwrap_or_default();
                lines.push(format!("E={:.3}  mdep {:.6}{oracle}", p.rate, p.mdep));
            }
        }
        ExperimentResult::EfficiencyTable { rows, reference } => {
            for r in rows {
                let analytic = r.analytic_pe.map(|a| format!("{a:.4}")).unwrap_or_else(|| "-".into());
                lines.push(format!("{:<24} empirical {:.4}  reference {analytic}", r.protocol, r.empirical_pe));
            }
            for r in reference {
                lines.push(format!(
                    "{:<24} listed {:.4}  (2+N)/(2+2N) {:.4}",
                    r.protocol, r.listed_pe, r.formula_pe
                ));
            }
        }
    }
    if report.embedding_failures > 0 {
        lines.push(format!("embedding failures: {}", report.embedding_failures));
    }
    lines.join("\n")
}

fn finish(report: &RunReport) -> Result<()> {
    println!("{}", summary(report));
    if report.embedding_failures > 0 {
        let trials = report.config.trials;
        return Err(HarnessError::Embedding {
            failures: report.embedding_failures,
            trials,
        });
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config: path,
            seed,
            trials,
            common,
        } => {
            let mut config = ExperimentConfig::load(&path)?;
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(t) = trials {
                config.trials = t;
            }
            if common.threads.is_some() {
                config.threads = common.threads;
            }
            let report = execute(config, Some(common.out.as_deref().unwrap_or(Path::new("."))), None)?;
            finish(&report)
        }
        Command::MdepCurve {
            points,
            bias,
            oracle_resolution,
            common,
        } => {
            if points < 2 {
                return Err(HarnessError::config("points", "need at least 2"));
            }
            let rates = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
            let experiment = Experiment::MdepCurve {
                rates,
                bias,
                tolerance: 1e-12,
                max_iterations: 100_000,
                oracle_resolution,
            };
            let report = execute(config(0, 1, common.threads, experiment), common.out.as_deref(), Some(Figure::MdepVsE))?;
            print!("{}", emit_figure_data(&report, Figure::MdepVsE)?);
            Ok(())
        }
        Command::EfficiencyTable {
            signals,
            x0,
            seed,
            common,
        } => {
            let experiment = Experiment::EfficiencyTable {
                protocols: vec![
                    qsteg_core::cvproto::CvProtocol::O4,
                    qsteg_core::cvproto::CvProtocol::E4,
                    qsteg_core::cvproto::CvProtocol::CvBb84Pascs,
                    qsteg_core::cvproto::CvProtocol::CvB92,
                ],
                alpha_coherent: 0.8,
                alpha_pascs: 1.2,
                x0,
                signals,
            };
            let report = execute(config(seed, 1, common.threads, experiment), common.out.as_deref(), Some(Figure::EfficiencyBars))?;
            finish(&report)
        }
        Command::Steganalyze {
            rates,
            m,
            delta,
            trials,
            reverse_trials,
            significance,
            seed,
            common,
        } => {
            let experiment = Experiment::SteganalysisSweep {
                rates,
                bias: 1.0,
                m,
                delta: Some(delta),
                intercept_fraction: 1.0,
                significance,
                include_reverse: true,
                reverse_trials,
            };
            let report = execute(config(seed, trials, common.threads, experiment), common.out.as_deref(), Some(Figure::PowerVsE))?;
            finish(&report)
        }
        Command::Figure { report, name, out } => {
            let report = RunReport::load(&report)?;
            let csv = emit_figure_data(&report, name)?;
            match out {
                Some(path) => write_file(&path, &csv),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
