use std::fmt::Write as _;

use foldnet::linalg::pearson_corr;

/// Error of one sample, measured before that sample's update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub sample_index: usize,
    pub error: f64,
    /// Correlation of `(index, error)` over rows `0..=sample_index`; absent
    /// while it is undefined. Not written to CSV.
    pub running_corr: Option<f64>,
}

/// Incremental Pearson correlation of `(index, error)` pairs.
#[derive(Debug, Clone, Default)]
pub struct RunningCorrelation {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl RunningCorrelation {
    pub fn push(&mut self, x: f64, y: f64) -> Option<f64> {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
        let cov = self.n * self.sxy - self.sx * self.sy;
        let vx = self.n * self.sxx - self.sx * self.sx;
        let vy = self.n * self.syy - self.sy * self.sy;
        (vx > 0.0 && vy > 0.0).then(|| (cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
    }
}

/// Correlation of `(sample_index, error)`; NaN when it is undefined.
pub fn index_error_correlation(rows: &[MetricsRow]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| r.sample_index as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error).collect();
    pearson_corr(&xs, &ys).unwrap_or(f64::NAN)
}

/// Header, one line per row, then `# pearson=<value>`.
pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from("sample_index,error\n");
    for row in rows {
        writeln!(out, "{},{}", row.sample_index, row.error).unwrap();
    }
    writeln!(out, "# pearson={}", index_error_correlation(rows)).unwrap();
    out
}

/// Reads the `# pearson=` line back from a metrics file.
pub fn parse_pearson(csv: &str) -> Option<f64> {
    csv.lines()
        .rev()
        .find_map(|line| line.strip_prefix("# pearson="))
        .and_then(|v| v.trim().parse().ok())
}
