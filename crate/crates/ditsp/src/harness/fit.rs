use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FitPoint {
    pub x: f64,
    pub mean: f64,
    /// 95% normal-approximation half-width of the mean.
    pub half_width: f64,
    pub trials: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_stderr: f64,
    pub points: Vec<FitPoint>,
}

pub fn summarize(x: f64, samples: &[f64], failed: usize) -> FitPoint {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 { samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    FitPoint { x, mean, half_width: 1.96 * (var / n.max(1) as f64).sqrt(), trials: n, failed }
}

/// Least squares of `log10(mean)` on `log10(x)`.
pub fn fit_loglog(points: Vec<FitPoint>) -> FitResult {
    let xs: Vec<f64> = points.iter().map(|p| p.x.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean.log10()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let slope_stderr = if xs.len() > 2 && sxx > 0.0 { (sse / (m - 2.0) / sxx).sqrt() } else { f64::NAN };
    FitResult { slope, intercept, r2, slope_stderr, points }
}
