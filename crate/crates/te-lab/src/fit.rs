//! Least-squares line fits, mostly on log-log data.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (zero for exactly two points).
    pub stderr: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    if !slope.is_finite() {
        return None;
    }
    Some(LineFit { slope, intercept, stderr, points: n })
}

/// Fit of `log y` against `log x`; non-positive values are rejected.
pub fn loglog(x: &[f64], y: &[f64]) -> Option<LineFit> {
    if x.iter().chain(y.iter()).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear(&lx, &ly)
}

/// `n` geometrically spaced points from `a` to `b` inclusive.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = geomspace(1.0, 100.0, 9);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
        let f = loglog(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        assert!((f.intercept - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(loglog(&[1.0, 2.0], &[0.0, 1.0]).is_none());
    }
}
