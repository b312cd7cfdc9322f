//! Small summary statistics.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean; zero for fewer than two samples.
pub fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in x.iter().zip(y) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Slope over the first `fraction` of a sequence indexed by position.
pub fn leading_slope(y: &[f64], fraction: f64) -> f64 {
    let k = ((y.len() as f64 * fraction).ceil() as usize).clamp(2.min(y.len()), y.len());
    let x: Vec<f64> = (0..k).map(|i| i as f64).collect();
    slope(&x, &y[..k])
}

/// Slope over the last `fraction` of a sequence indexed by position.
pub fn trailing_slope(y: &[f64], fraction: f64) -> f64 {
    let k = ((y.len() as f64 * fraction).ceil() as usize).clamp(2.min(y.len()), y.len());
    let start = y.len() - k;
    let x: Vec<f64> = (start..y.len()).map(|i| i as f64).collect();
    slope(&x, &y[start..])
}
