//! Shared statistics helpers for the integration suites.

/// Two-sided Kolmogorov-Smirnov p-value for the sup-distance `d` between an
/// empirical CDF over `m` points and a continuous target. Uses the standard
/// asymptotic series with the Stephens small-sample correction.
pub fn kolmogorov_p(d: f64, m: usize) -> f64 {
    let sm = (m as f64).sqrt();
    let lambda = (sm + 0.12 + 0.11 / sm) * d;
    let mut p = 0.0f64;
    for j in 1..=100 {
        let jf = j as f64;
        let term = 2.0 * (-2.0 * jf * jf * lambda * lambda).exp();
        p += if j % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// KS sup-distance of a sample against the uniform CDF on [0, 1].
pub fn ks_distance_uniform(sample: &mut [f64]) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let lo = i as f64 / m;
        let hi = (i + 1) as f64 / m;
        d = d.max((x - lo).abs()).max((hi - x).abs());
    }
    d
}

/// Median of a slice (averaging the middle pair for even lengths).
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}
