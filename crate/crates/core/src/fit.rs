//! Least-squares helpers for decay/growth order detection.

/// Result of a log-log regression `log y ≈ slope · log(1+x) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

/// Fits `log y` against `log(1+x)` over the points with `y > 0`.
///
/// Returns `None` when fewer than two usable points remain.
pub fn log_log_fit(points: &[(f64, f64)]) -> Option<LogLogFit> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0 && y.is_finite())
        .map(|&(x, y)| ((1.0 + x).ln(), y.ln()))
        .collect();
    linear_fit(&data)
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(data: &[(f64, f64)]) -> Option<LogLogFit> {
    if data.len() < 2 {
        return None;
    }
    let m = data.len() as f64;
    let mx = data.iter().map(|p| p.0).sum::<f64>() / m;
    let my = data.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = data.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (data
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Some(LogLogFit {
        slope,
        intercept,
        residual,
    })
}
