//! Order-independent reductions and small fitting helpers.

/// Pairwise (cascade) summation; deterministic for a given slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ordinary least-squares line y = a + b x; returns (a, b).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx).powi(2);
    }
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Least-squares parabola y = c0 + c1 x + c2 x²; returns [c0, c1, c2].
pub fn quadratic_fit(x: &[f64], y: &[f64]) -> [f64; 3] {
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut r = nalgebra::Vector3::<f64>::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let p = [1.0, xi, xi * xi];
        for i in 0..3 {
            r[i] += p[i] * yi;
            for j in 0..3 {
                m[(i, j)] += p[i] * p[j];
            }
        }
    }
    let c = m.lu().solve(&r).unwrap_or_else(nalgebra::Vector3::zeros);
    [c[0], c[1], c[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_ints() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }

    #[test]
    fn fits_recover_coefficients() {
        let x: Vec<f64> = (-3..=3).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v + 0.25 * v * v).collect();
        let c = quadratic_fit(&x, &y);
        assert!(
            (c[0] - 2.0).abs() < 1e-12 && (c[1] + 0.5).abs() < 1e-12 && (c[2] - 0.25).abs() < 1e-12
        );
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 3.0 * v).collect();
        let (a, b) = linear_fit(&x, &y);
        assert!((a - 1.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        let (m, s) = mean_and_stderr(&[2.0; 10]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 0.0);
    }
}
