//! Series alignment and comparison metrics for cross-model verification.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("series misaligned at position {index}: hour {left} vs hour {right}")]
    Misaligned { index: usize, left: i64, right: i64 },
    #[error("no overlapping samples after discarding {warmup} warm-up hours")]
    Empty { warmup: usize },
    #[error("cannot parse series: {0}")]
    Parse(String),
}

/// Comparison metrics over aligned hourly series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMetrics {
    pub schema: u32,
    /// Root-mean-square error, K.
    pub rmse: f64,
    /// Mean bias (a - b), K.
    pub mbe: f64,
    /// Largest absolute difference, K.
    pub max_abs: f64,
    /// Compared samples.
    pub n: usize,
    /// Leading hours excluded from the metrics.
    pub warmup_discarded: usize,
}

/// Computes metrics over two hour-indexed series. Hours must match pairwise;
/// samples with hour < `warmup` are discarded.
pub fn compare_series(
    a: &[(i64, f64)],
    b: &[(i64, f64)],
    warmup: usize,
) -> Result<ComparisonMetrics, CompareError> {
    if a.len() != b.len() {
        // find the first structural difference for the report
        let n = a.len().min(b.len());
        for i in 0..n {
            if a[i].0 != b[i].0 {
                return Err(CompareError::Misaligned { index: i, left: a[i].0, right: b[i].0 });
            }
        }
        return Err(CompareError::Misaligned {
            index: n,
            left: a.get(n).map_or(-1, |v| v.0),
            right: b.get(n).map_or(-1, |v| v.0),
        });
    }
    for (i, (ra, rb)) in a.iter().zip(b.iter()).enumerate() {
        if ra.0 != rb.0 {
            return Err(CompareError::Misaligned { index: i, left: ra.0, right: rb.0 });
        }
    }
    let mut sum_sq = 0.0;
    let mut sum = 0.0;
    let mut max_abs = 0.0f64;
    let mut n = 0usize;
    for (ra, rb) in a.iter().zip(b.iter()) {
        if ra.0 < warmup as i64 {
            continue;
        }
        let d = ra.1 - rb.1;
        sum_sq += d * d;
        sum += d;
        max_abs = max_abs.max(d.abs());
        n += 1;
    }
    if n == 0 {
        return Err(CompareError::Empty { warmup });
    }
    Ok(ComparisonMetrics {
        schema: 1,
        rmse: (sum_sq / n as f64).sqrt(),
        mbe: sum / n as f64,
        max_abs,
        n,
        warmup_discarded: warmup,
    })
}

/// Extracts `(hour, value)` pairs from a CSV with an `hour` first column;
/// `column` picks the value field by header name.
pub fn parse_hour_series(csv: &str, column: &str) -> Result<Vec<(i64, f64)>, CompareError> {
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| CompareError::Parse("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"hour") {
        return Err(CompareError::Parse(format!(
            "first column must be `hour`, got `{}`",
            cols.first().unwrap_or(&"")
        )));
    }
    let idx = cols
        .iter()
        .position(|c| *c == column)
        .ok_or_else(|| CompareError::Parse(format!("no column `{column}` in `{header}`")))?;
    let mut out = Vec::new();
    for (ln, row) in lines.enumerate() {
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(CompareError::Parse(format!(
                "line {}: expected {} fields, got {}",
                ln + 2,
                cols.len(),
                fields.len()
            )));
        }
        let hour: i64 = fields[0]
            .parse()
            .map_err(|_| CompareError::Parse(format!("line {}: bad hour `{}`", ln + 2, fields[0])))?;
        let v: f64 = fields[idx]
            .parse()
            .map_err(|_| CompareError::Parse(format!("line {}: bad value `{}`", ln + 2, fields[idx])))?;
        out.push((hour, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(vals: &[f64]) -> Vec<(i64, f64)> {
        vals.iter().enumerate().map(|(h, v)| (h as i64, *v)).collect()
    }

    #[test]
    fn identical_series_have_zero_metrics() {
        let a = series(&[1.0, 2.0, 3.0]);
        let m = compare_series(&a, &a, 0).unwrap();
        assert_eq!(m.rmse, 0.0);
        assert_eq!(m.max_abs, 0.0);
        assert_eq!(m.n, 3);
    }

    #[test]
    fn constant_offset_metrics() {
        let a = series(&[10.0, 11.0, 12.0, 13.0]);
        let b: Vec<(i64, f64)> = a.iter().map(|&(h, v)| (h, v - 0.5)).collect();
        let m = compare_series(&a, &b, 0).unwrap();
        assert!((m.rmse - 0.5).abs() < 1e-15);
        assert!((m.mbe - 0.5).abs() < 1e-15);
        assert!((m.max_abs - 0.5).abs() < 1e-15);
    }

    /// Frozen from a high-precision independent computation.
    #[test]
    fn fixed_case_against_oracle() {
        let a = series(&[20.1, 21.3, 19.8, 22.4, 20.0, 18.7]);
        let b = series(&[20.4, 20.9, 19.9, 22.1, 20.6, 18.2]);
        let m = compare_series(&a, &b, 0).unwrap();
        assert!((m.rmse - 0.4).abs() < 1e-12);
        assert!((m.mbe - 0.03333333333333333).abs() < 1e-12);
        assert!((m.max_abs - 0.6).abs() < 1e-12);
    }

    #[test]
    fn warmup_discard() {
        let a = series(&[100.0, 1.0, 1.0]);
        let b = series(&[0.0, 1.0, 1.0]);
        let m = compare_series(&a, &b, 1).unwrap();
        assert_eq!(m.rmse, 0.0);
        assert_eq!(m.n, 2);
        assert_eq!(m.warmup_discarded, 1);
    }

    #[test]
    fn misalignment_reports_first_mismatch() {
        let a = vec![(0i64, 1.0), (1, 1.0), (3, 1.0)];
        let b = vec![(0i64, 1.0), (1, 1.0), (2, 1.0)];
        match compare_series(&a, &b, 0).unwrap_err() {
            CompareError::Misaligned { index, left, right } => {
                assert_eq!((index, left, right), (2, 3, 2));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn parse_series_picks_column() {
        let csv = "hour,T_a,T_x\n0,20.5,21.0\n1,20.6,21.1\n";
        let s = parse_hour_series(csv, "T_a").unwrap();
        assert_eq!(s, vec![(0, 20.5), (1, 20.6)]);
        assert!(parse_hour_series(csv, "missing").is_err());
    }

    #[test]
    fn metrics_serialize_with_schema() {
        let m = ComparisonMetrics {
            schema: 1,
            rmse: 0.1,
            mbe: 0.0,
            max_abs: 0.2,
            n: 10,
            warmup_discarded: 72,
        };
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"schema\":1"));
        assert!(json.contains("\"warmup_discarded\":72"));
    }
}
