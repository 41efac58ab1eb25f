//! Test-side oracles, written independently of the library's `stats` module.
#![allow(dead_code)]

use std::io::Write;

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in samples"));
    v
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Midpoint median.
pub fn median(xs: &[f64]) -> f64 {
    let s = sorted(xs);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// `sup_x |F_n(x) − F(x)|`, evaluating both one-sided gaps at each jump.
pub fn ks_one(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(xs);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max(((i + 1) as f64 / n - f).abs())
            .max((f - i as f64 / n).abs());
    }
    d
}

/// Two-sample KS distance by binary search of each pooled point in both samples.
pub fn ks_two(xs: &[f64], ys: &[f64]) -> f64 {
    let a = sorted(xs);
    let b = sorted(ys);
    let (n, m) = (a.len() as f64, b.len() as f64);
    a.iter()
        .chain(b.iter())
        .map(|&t| {
            let fa = a.partition_point(|&v| v <= t) as f64 / n;
            let fb = b.partition_point(|&v| v <= t) as f64 / m;
            (fa - fb).abs()
        })
        .fold(0.0, f64::max)
}

/// Asymptotic two-sample KS p-value (Kolmogorov distribution with the
/// Stephens small-sample correction).
pub fn ks_two_p_value(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lambda < 0.3 {
        return 1.0;
    }
    let q: f64 = (1..=200)
        .map(|k| {
            let k = k as f64;
            let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (2.0 * q).clamp(0.0, 1.0)
}

/// Gravity drifts `δ_i = η(2i − n − 1)/n`, built without the library constructor.
pub fn gravity_drifts(n: usize, eta: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| eta * (2 * i) as f64 / n as f64 - eta * (n + 1) as f64 / n as f64)
        .collect()
}

/// Prints a line past the test harness's output capture.
pub fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").expect("stdout");
    out.flush().expect("stdout");
}
