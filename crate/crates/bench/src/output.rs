//! CSV and markdown writers. Numbers use the shortest decimal form that
//! round-trips.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use trunc_regress::synth::{ts_features, ts_input_from_features, ts_regression, Design};
use trunc_regress::{Dataset, ParamVector};

use crate::run::RepetitionRecord;
use crate::summary::{MeanCi, SummaryRow};

/// Points on the fitted-curve grid, `x = k/511`.
pub const CURVE_POINTS: usize = 512;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), OutputError> {
    let csv_err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub const RECORD_HEADER: [&str; 9] = [
    "rep",
    "excess_ols",
    "excess_minmax",
    "differs",
    "n_removed",
    "alpha",
    "excess_ridge",
    "excess_gibbs",
    "error",
];

pub fn write_records(path: &Path, records: &[RepetitionRecord]) -> Result<(), OutputError> {
    let rows = records.iter().map(|r| {
        vec![
            r.rep.to_string(),
            num(r.excess_ols),
            opt(r.excess_minmax),
            u8::from(r.minmax_differs).to_string(),
            r.n_removed.to_string(),
            opt(r.alpha),
            opt(r.excess_ridge),
            opt(r.excess_gibbs),
            r.error.clone().unwrap_or_default(),
        ]
    });
    write_csv(path, &strings(&RECORD_HEADER), rows)
}

fn ci_cells(c: Option<MeanCi>) -> [String; 2] {
    match c {
        Some(c) => [num(c.mean), num(c.half_width)],
        None => [String::new(), String::new()],
    }
}

pub fn write_summary_csv(path: &Path, s: &SummaryRow) -> Result<(), OutputError> {
    let mut header = strings(&["label", "total", "failed", "differs", "improves"]);
    let mut row = vec![
        s.label.clone(),
        s.total.to_string(),
        s.failed.to_string(),
        s.differs.to_string(),
        s.improves.to_string(),
    ];
    let cols = [
        ("ols", Some(s.ols)),
        ("minmax", s.minmax),
        ("ols_given_differs", s.ols_given_differs),
        ("minmax_given_differs", s.minmax_given_differs),
        ("ridge", s.ridge),
        ("gibbs", s.gibbs),
        ("removed_given_differs", s.removed_given_differs),
    ];
    for (name, c) in cols {
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_half_width"));
        row.extend(ci_cells(c));
    }
    write_csv(path, &header, [row])
}

fn md_cell(c: Option<MeanCi>) -> String {
    match c {
        Some(c) if c.half_width.is_nan() => format!("{:.3}", c.mean),
        Some(c) => format!("{:.3} (± {:.3})", c.mean, c.half_width),
        None => "n/a".into(),
    }
}

/// Markdown table with one row, columns as in the usual comparison tables.
pub fn summary_markdown(s: &SummaryRow) -> String {
    let mut out = String::new();
    let mut head = vec![
        "",
        "repetitions",
        "minmax ≠ ols",
        "minmax < ols",
        "E R(ols) − R*",
        "E R(minmax) − R*",
        "E[R(ols) − R*] given ≠",
        "E[R(minmax) − R*] given ≠",
    ];
    let mut cells = vec![
        s.label.clone(),
        s.total.to_string(),
        s.differs.to_string(),
        s.improves.to_string(),
        md_cell(Some(s.ols)),
        md_cell(s.minmax),
        md_cell(s.ols_given_differs),
        md_cell(s.minmax_given_differs),
    ];
    if s.ridge.is_some() {
        head.push("E R(ridge) − R*");
        cells.push(md_cell(s.ridge));
    }
    if s.gibbs.is_some() {
        head.push("E R(gibbs) − R*");
        cells.push(md_cell(s.gibbs));
    }
    if s.failed > 0 {
        head.push("failed");
        cells.push(s.failed.to_string());
    }
    let _ = writeln!(out, "| {} |", head.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
    let _ = writeln!(out, "| {} |", cells.join(" | "));
    out
}

pub fn write_summary_md(path: &Path, s: &SummaryRow) -> Result<(), OutputError> {
    fs::write(path, summary_markdown(s)).map_err(io_err(path))
}

/// Input coordinates of row `i` for plotting: the scalar input for `ts`,
/// the feature vector otherwise.
fn plot_inputs(design: Design, data: &Dataset, i: usize) -> Vec<f64> {
    match design {
        Design::Ts => vec![ts_input_from_features(data.row(i))],
        _ => data.row(i).to_vec(),
    }
}

/// `x, y, erased` (with `x1, …, xd` for multivariate inputs).
pub fn write_points(
    path: &Path,
    design: Design,
    data: &Dataset,
    erased: &[bool],
) -> Result<(), OutputError> {
    let width = plot_inputs(design, data, 0).len();
    let mut header: Vec<String> = if width == 1 {
        vec!["x".into()]
    } else {
        (1..=width).map(|k| format!("x{k}")).collect()
    };
    header.push("y".into());
    header.push("erased".into());
    let rows = (0..data.len()).map(|i| {
        let mut row: Vec<String> = plot_inputs(design, data, i).into_iter().map(num).collect();
        row.push(num(data.output(i)));
        row.push(u8::from(erased[i]).to_string());
        row
    });
    write_csv(path, &header, rows)
}

/// `x, fhat, regression, fhat_ols` on a regular grid of `[0, 1]`.
pub fn write_curves(
    path: &Path,
    theta: &ParamVector,
    ols: &ParamVector,
) -> Result<(), OutputError> {
    let d = theta.dim();
    let rows = (0..CURVE_POINTS).map(|k| {
        let x = k as f64 / (CURVE_POINTS - 1) as f64;
        let phi = ts_features(x, d);
        vec![
            num(x),
            num(theta.predict(&phi)),
            num(ts_regression(x)),
            num(ols.predict(&phi)),
        ]
    });
    write_csv(
        path,
        &strings(&["x", "fhat", "regression", "fhat_ols"]),
        rows,
    )
}

pub fn create_dir(path: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(path).map_err(io_err(path))
}
