//! Aggregation of repetition records into one table row.

use crate::run::RepetitionRecord;

/// Normal-approximation 95% quantile.
pub const Z95: f64 = 1.96;

/// Sample mean with the half-width of its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    /// `1.96·s/√m`; NaN for a single value.
    pub half_width: f64,
    pub count: usize,
}

/// `None` for an empty sample.
pub fn mean_ci(values: &[f64]) -> Option<MeanCi> {
    let m = values.len();
    if m == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let half_width = if m == 1 {
        f64::NAN
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
        Z95 * (var / m as f64).sqrt()
    };
    Some(MeanCi {
        mean,
        half_width,
        count: m,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    /// Successful repetitions.
    pub total: usize,
    pub failed: usize,
    pub differs: usize,
    pub improves: usize,
    pub ols: MeanCi,
    pub minmax: Option<MeanCi>,
    pub ols_given_differs: Option<MeanCi>,
    pub minmax_given_differs: Option<MeanCi>,
    pub ridge: Option<MeanCi>,
    pub gibbs: Option<MeanCi>,
    /// Mean number of discarded points over the repetitions that differ.
    pub removed_given_differs: Option<MeanCi>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SummaryError {
    #[error("no records to summarize")]
    Empty,
    #[error("all {0} repetitions failed")]
    AllFailed(usize),
}

fn collect(recs: &[&RepetitionRecord], f: impl Fn(&RepetitionRecord) -> Option<f64>) -> Vec<f64> {
    recs.iter().filter_map(|r| f(r)).collect()
}

/// Aggregates successful records; failed ones are only counted.
pub fn summarize(label: &str, records: &[RepetitionRecord]) -> Result<SummaryRow, SummaryError> {
    if records.is_empty() {
        return Err(SummaryError::Empty);
    }
    let ok: Vec<&RepetitionRecord> = records.iter().filter(|r| !r.failed()).collect();
    let failed = records.len() - ok.len();
    let ols =
        mean_ci(&collect(&ok, |r| Some(r.excess_ols))).ok_or(SummaryError::AllFailed(failed))?;
    let differ: Vec<&RepetitionRecord> = ok.iter().copied().filter(|r| r.minmax_differs).collect();
    Ok(SummaryRow {
        label: label.to_string(),
        total: ok.len(),
        failed,
        differs: differ.len(),
        improves: ok.iter().filter(|r| r.improves()).count(),
        ols,
        minmax: mean_ci(&collect(&ok, |r| r.excess_minmax)),
        ols_given_differs: mean_ci(&collect(&differ, |r| Some(r.excess_ols))),
        minmax_given_differs: mean_ci(&collect(&differ, |r| r.excess_minmax)),
        ridge: mean_ci(&collect(&ok, |r| r.excess_ridge)),
        gibbs: mean_ci(&collect(&ok, |r| r.excess_gibbs)),
        removed_given_differs: mean_ci(&collect(&differ, |r| Some(r.n_removed as f64))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(rep: usize, ols: f64, mm: f64) -> RepetitionRecord {
        RepetitionRecord {
            rep,
            excess_ols: ols,
            excess_minmax: Some(mm),
            minmax_differs: ols != mm,
            n_removed: if ols != mm { 3 } else { 0 },
            alpha: Some(1.0),
            excess_ridge: None,
            excess_gibbs: None,
            error: None,
        }
    }

    #[test]
    fn constant_sample() {
        let c = mean_ci(&[2.5; 7]).unwrap();
        assert_eq!((c.mean, c.half_width), (2.5, 0.0));
    }

    #[test]
    fn two_points() {
        let c = mean_ci(&[0.0, 2.0]).unwrap();
        assert_eq!(c.mean, 1.0);
        assert!((c.half_width - 1.96).abs() < 1e-15);
    }

    #[test]
    fn single_and_empty() {
        assert!(mean_ci(&[]).is_none());
        assert!(mean_ci(&[4.0]).unwrap().half_width.is_nan());
        assert_eq!(summarize("x", &[]), Err(SummaryError::Empty));
        let s = summarize("x", &[rec(0, 1.0, 1.0)]).unwrap();
        assert_eq!(s.total, 1);
        assert!(s.ols.half_width.is_nan());
    }

    #[test]
    fn counts_and_conditionals() {
        let mut recs = vec![
            rec(0, 4.0, 1.0),
            rec(1, 2.0, 2.0),
            rec(2, 1.0, 3.0),
            rec(3, 6.0, 2.0),
        ];
        recs.push(RepetitionRecord {
            error: Some("boom".into()),
            ..rec(4, f64::NAN, f64::NAN)
        });
        let s = summarize("INC(n=4,d=1)", &recs).unwrap();
        assert_eq!((s.total, s.failed, s.differs, s.improves), (4, 1, 3, 2));
        assert_eq!(s.ols.mean, 13.0 / 4.0);
        assert_eq!(s.minmax.unwrap().mean, 2.0);
        assert_eq!(s.ols_given_differs.unwrap().mean, 11.0 / 3.0);
        assert_eq!(s.minmax_given_differs.unwrap().mean, 2.0);
        assert!(s.ols.half_width > 0.0);
        assert!(s.ridge.is_none());
    }

    #[test]
    fn all_failed() {
        let r = RepetitionRecord {
            error: Some("boom".into()),
            ..rec(0, f64::NAN, f64::NAN)
        };
        assert_eq!(summarize("x", &[r]), Err(SummaryError::AllFailed(1)));
    }
}
