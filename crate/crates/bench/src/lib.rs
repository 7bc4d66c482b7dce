//! Monte Carlo harness comparing least squares with the truncated min-max
//! estimator (and optionally ridge and a Gibbs posterior draw) on synthetic
//! designs with exactly known excess risk.

pub mod config;
pub mod output;
pub mod run;
pub mod summary;

use std::path::PathBuf;

pub use config::{parse_config, ConfigError, Estimator, ExperimentConfig};
pub use run::{rep_rng, run_repetition, run_repetitions, simulate, Repetition, RepetitionRecord};
pub use summary::{mean_ci, summarize, MeanCi, SummaryError, SummaryRow};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Output(#[from] output::OutputError),
    #[error(transparent)]
    Summary(#[from] SummaryError),
    #[error("repetition {rep} cannot be plotted: {source}")]
    Plot {
        rep: usize,
        source: trunc_regress::Error,
    },
}

/// Paths of the files written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub records: PathBuf,
    pub summary_csv: PathBuf,
    pub summary_md: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Runs every repetition, writes `records.csv`, then the summary files and
/// the optional plot data.
pub fn run_experiment(
    config: &ExperimentConfig,
) -> Result<(Vec<RepetitionRecord>, SummaryRow, OutputFiles), HarnessError> {
    let out = &config.output_dir;
    output::create_dir(out)?;
    let records = run_repetitions(config);
    let records_path = out.join("records.csv");
    output::write_records(&records_path, &records)?;

    let summary = summarize(&config.label(), &records)?;
    let summary_csv = out.join("summary.csv");
    let summary_md = out.join("summary.md");
    output::write_summary_csv(&summary_csv, &summary)?;
    output::write_summary_md(&summary_md, &summary)?;

    let plots = match config.plot_rep {
        Some(rep) => write_plot(config, rep)?,
        None => Vec::new(),
    };
    Ok((
        records,
        summary,
        OutputFiles {
            records: records_path,
            summary_csv,
            summary_md,
            plots,
        },
    ))
}

/// Writes `plots/rep_<k>_points.csv`, plus `plots/rep_<k>_curves.csv` for the
/// `ts` design.
pub fn write_plot(config: &ExperimentConfig, rep: usize) -> Result<Vec<PathBuf>, HarnessError> {
    let r = simulate(config, rep).map_err(|source| HarnessError::Plot { rep, source })?;
    let dir = config.output_dir.join("plots");
    output::create_dir(&dir)?;
    let n = r.data.len();
    let erased = r
        .minmax
        .as_ref()
        .map_or_else(|| vec![false; n], |m| m.erased_mask(n));
    let points = dir.join(format!("rep_{rep}_points.csv"));
    output::write_points(&points, config.design, &r.data, &erased)?;
    let mut files = vec![points];
    if config.design == trunc_regress::synth::Design::Ts {
        let theta = r.minmax.as_ref().map_or(&r.ols, |m| &m.theta_hat);
        let curves = dir.join(format!("rep_{rep}_curves.csv"));
        output::write_curves(&curves, theta, &r.ols)?;
        files.push(curves);
    }
    Ok(files)
}
