use std::path::Path;

use crate::csv::CsvTable;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// Slope of the log-log least-squares line: the empirical power.
    pub exponent: f64,
    /// Intercept in log space: ln of the prefactor.
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits y = exp(intercept) * x^exponent by least squares on (ln x, ln y).
/// Needs at least three strictly positive points so the fit quality is
/// meaningful.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(HarnessError::Config(format!(
            "a scaling fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(HarnessError::Config(format!(
                "scaling points must be positive and finite, got ({x}, {y})"
            )));
        }
        logs.push((x.ln(), y.ln()));
    }
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Config("all scaling points share one x value".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - (intercept + slope * p.0)).powi(2)).sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot <= f64::EPSILON * m {
        if ss_res <= f64::EPSILON * m {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(ScalingFit { exponent: slope, intercept, r_squared, points: points.len() })
}

/// Reads a comparison CSV and fits the growth of one bound family's Trotter
/// number against system size. Rows flagged as capped carry no finite count
/// and are skipped.
pub fn fit_from_csv(path: &Path, family: &str) -> Result<ScalingFit> {
    let table = CsvTable::read(path)?;
    let n_col = table.column("n")?;
    let family_col = table.column("family")?;
    let r_col = table.column("r_star")?;
    let capped_col = table.column("capped")?;
    let mut points = Vec::new();
    for row in 0..table.len() {
        if table.cell(row, family_col) != family {
            continue;
        }
        if table.cell(row, capped_col) == "true" || table.cell(row, r_col).is_empty() {
            continue;
        }
        points.push((table.f64(row, n_col)?, table.f64(row, r_col)?));
    }
    if points.len() < 3 {
        return Err(HarnessError::Config(format!(
            "family '{family}' has only {} finite rows in {}",
            points.len(),
            path.display()
        )));
    }
    scaling_fit(&points)
}
