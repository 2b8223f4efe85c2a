use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linsys::LowerBoundSample;
use crate::sdp::StructureReport;
use crate::{Error, Result};

/// Slack for the ordering checks (monotonicity in `N`, improvement over the
/// filter-free bound, sandwich between sampled and certified gains).
pub const ORDER_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub degree: usize,
    /// `None` when the cell failed.
    pub gamma: Option<f64>,
    pub status: String,
    pub gap: Option<f64>,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Re-evaluation of the optimal point (LMI residual, sign structure of `P_a`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    pub alpha: f64,
    pub non_increasing: bool,
    /// Largest increase between consecutive solved degrees (<= 0 if none).
    pub worst_increase: f64,
    /// Degrees `N` whose bound exceeds the previous solved one by more than the slack.
    pub violations: Vec<usize>,
    /// Every degree in the column was solved.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementVerdict {
    pub alpha: f64,
    /// Every filtered bound is at most the filter-free bound (+ slack).
    pub holds: bool,
    pub worst_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub system: String,
    pub hinf: f64,
    pub max_degree: usize,
    pub alphas: Vec<f64>,
    pub rows: Vec<BoundRow>,
    pub lower_bound: Option<LowerBoundSample>,
    pub monotonicity: Vec<MonotonicityVerdict>,
    pub improvement: Vec<ImprovementVerdict>,
    /// Filter-free bound does not exceed the H-infinity norm (+ slack).
    pub filter_free_below_hinf: Option<bool>,
    /// Every solved bound is at least the sampled lower bound (- slack).
    pub sandwich: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(Self::Json),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct CsvRow {
    alpha: f64,
    #[serde(rename = "N")]
    degree: usize,
    gamma: Option<f64>,
    status: String,
    gap: Option<f64>,
    seconds: f64,
}

impl BoundReport {
    pub fn row(&self, alpha: f64, degree: usize) -> Option<&BoundRow> {
        self.rows
            .iter()
            .find(|r| r.alpha == alpha && r.degree == degree)
    }

    pub fn gamma(&self, alpha: f64, degree: usize) -> Option<f64> {
        self.row(alpha, degree)?.gamma
    }

    /// `(N, gamma)` for one `alpha`, ascending in `N`.
    pub fn column(&self, alpha: f64) -> Vec<(usize, Option<f64>)> {
        let mut col: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.alpha == alpha)
            .map(|r| (r.degree, r.gamma))
            .collect();
        col.sort_by_key(|c| c.0);
        col
    }

    /// Smallest solved bound as `(alpha, N, gamma)`.
    pub fn best(&self) -> Option<(f64, usize, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.gamma.map(|g| (r.alpha, r.degree, g)))
            .min_by(|a, b| a.2.total_cmp(&b.2))
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| r.gamma.is_none())
    }

    /// Solved rows whose optimal point failed the structure re-check.
    pub fn structure_failures(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows
            .iter()
            .filter(|r| r.structure.as_ref().is_some_and(|s| !s.passes()))
    }

    pub fn all_monotone(&self) -> bool {
        self.monotonicity.iter().all(|m| m.non_increasing)
    }

    /// Recomputes verdicts and warnings from `rows`, `hinf` and `lower_bound`.
    pub(crate) fn evaluate(&mut self) {
        self.warnings.clear();
        self.monotonicity.clear();
        self.improvement.clear();
        for &alpha in &self.alphas.clone() {
            let col = self.column(alpha);
            let solved: Vec<(usize, f64)> =
                col.iter().filter_map(|&(n, g)| g.map(|g| (n, g))).collect();
            let mut worst = f64::NEG_INFINITY;
            let mut violations = Vec::new();
            for pair in solved.windows(2) {
                let inc = pair[1].1 - pair[0].1;
                worst = worst.max(inc);
                if inc > ORDER_SLACK {
                    violations.push(pair[1].0);
                    self.warnings.push(format!(
                        "alpha = {alpha}: bound increases by {inc:e} from N = {} to N = {}",
                        pair[0].0, pair[1].0
                    ));
                }
            }
            self.monotonicity.push(MonotonicityVerdict {
                alpha,
                non_increasing: violations.is_empty(),
                worst_increase: if worst.is_finite() { worst } else { 0.0 },
                violations,
                complete: solved.len() == col.len(),
            });

            if let Some(base) = self.gamma(alpha, 0) {
                let excess = solved
                    .iter()
                    .filter(|(n, _)| *n > 0)
                    .map(|(_, g)| g - base)
                    .fold(f64::NEG_INFINITY, f64::max);
                let excess = if excess.is_finite() { excess } else { 0.0 };
                if excess > ORDER_SLACK {
                    self.warnings.push(format!(
                        "alpha = {alpha}: a filtered bound exceeds the filter-free bound by {excess:e}"
                    ));
                }
                self.improvement.push(ImprovementVerdict {
                    alpha,
                    holds: excess <= ORDER_SLACK,
                    worst_excess: excess,
                });
            }
        }
        self.filter_free_below_hinf = self
            .rows
            .iter()
            .find(|r| r.degree == 0)
            .and_then(|r| r.gamma)
            .map(|g| {
                let ok = g <= self.hinf + ORDER_SLACK;
                if !ok {
                    self.warnings.push(format!(
                        "filter-free bound {g} exceeds the H-infinity norm {}",
                        self.hinf
                    ));
                }
                ok
            });
        self.sandwich = self.lower_bound.as_ref().map(|lb| {
            let low = self
                .rows
                .iter()
                .filter_map(|r| r.gamma)
                .filter(|&g| g < lb.gamma_lb - ORDER_SLACK)
                .count();
            if low > 0 {
                self.warnings.push(format!(
                    "{low} bound(s) fall below the sampled lower bound {}",
                    lb.gamma_lb
                ));
            }
            low == 0
        });
        let mut notes: Vec<String> = self
            .failed_rows()
            .map(|r| {
                format!(
                    "cell alpha = {}, N = {} failed ({}): {}",
                    r.alpha,
                    r.degree,
                    r.status,
                    r.error.as_deref().unwrap_or("no detail")
                )
            })
            .collect();
        for r in self.structure_failures() {
            let failures = r
                .structure
                .as_ref()
                .map(|s| s.failures().join("; "))
                .unwrap_or_default();
            notes.push(format!(
                "cell alpha = {}, N = {}: structure check failed: {failures}",
                r.alpha, r.degree
            ));
        }
        self.warnings.extend(notes);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(CsvRow {
                alpha: r.alpha,
                degree: r.degree,
                gamma: r.gamma,
                status: r.status.clone(),
                gap: r.gap,
                seconds: r.seconds,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Solver(format!("CSV is not UTF-8: {e}")))
    }

    pub fn write(&self, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
        let text = match format {
            ReportFormat::Json => self.to_json()?,
            ReportFormat::Csv => self.to_csv()?,
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alpha: f64, degree: usize, gamma: Option<f64>) -> BoundRow {
        BoundRow {
            alpha,
            degree,
            gamma,
            status: if gamma.is_some() {
                "optimal"
            } else {
                "numerical_trouble"
            }
            .into(),
            gap: gamma.map(|_| 1e-10),
            seconds: 0.5,
            error: gamma.is_none().then(|| "stalled".to_string()),
            structure: None,
        }
    }

    fn report(rows: Vec<BoundRow>) -> BoundReport {
        let mut r = BoundReport {
            system: "test".into(),
            hinf: 1.0,
            max_degree: 3,
            alphas: vec![rows[0].alpha],
            rows,
            lower_bound: None,
            monotonicity: vec![],
            improvement: vec![],
            filter_free_below_hinf: None,
            sandwich: None,
            warnings: vec![],
        };
        r.evaluate();
        r
    }

    #[test]
    fn verdicts_flag_increases_and_failures() {
        let r = report(vec![
            row(-1.0, 0, Some(0.9)),
            row(-1.0, 1, Some(0.8)),
            row(-1.0, 2, None),
            row(-1.0, 3, Some(0.85)),
        ]);
        let m = &r.monotonicity[0];
        assert!(!m.non_increasing && !m.complete);
        assert_eq!(m.violations, vec![3]);
        assert!((m.worst_increase - 0.05).abs() < 1e-12);
        assert!(r.improvement[0].holds);
        assert_eq!(r.filter_free_below_hinf, Some(true));
        assert_eq!(r.warnings.len(), 2);
        assert_eq!(r.best(), Some((-1.0, 1, 0.8)));
    }

    #[test]
    fn csv_has_fixed_columns_and_full_precision() {
        let r = report(vec![row(-1.0, 0, Some(0.1 + 0.2)), row(-1.0, 1, None)]);
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("alpha,N,gamma,status,gap,seconds"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[2].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(lines.next(), Some("-1.0,1,,numerical_trouble,,0.5"));
    }

    #[test]
    fn json_round_trip() {
        let r = report(vec![row(-1.2, 0, Some(0.7)), row(-1.2, 1, None)]);
        let back = BoundReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
