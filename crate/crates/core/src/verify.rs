//! Estimators and comparators that turn simulation output into pass/fail
//! evidence.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// Sample mean with standard error `sd / sqrt(n)` (sample sd, `n - 1`).
    pub fn mean_of<I: IntoIterator<Item = f64>>(xs: I) -> Result<Estimate> {
        // Welford keeps the variance accurate for large n.
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for x in xs {
            n += 1;
            let d = x - mean;
            mean += d / n as f64;
            m2 += d * (x - mean);
        }
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        Ok(Estimate {
            value: mean,
            stderr: (var / n as f64).sqrt(),
            n,
        })
    }

    /// `|value - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.stderr
        }
    }
}

/// Kolmogorov-Smirnov distance between the empirical CDF of a sorted
/// sample and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        let above = ((i + 1) as f64 / n - f).abs();
        let below = (f - i as f64 / n).abs();
        acc.max(above).max(below)
    }))
}

/// Sorts in place and returns the KS distance.
pub fn ks_unsorted<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> Result<f64> {
    sample.sort_by(f64::total_cmp);
    ks_distance(sample, cdf)
}

/// Critical KS distance at the 1% level for `n` draws.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Empirical `E z^k` over observed counts.
pub fn estimate_genfun(counts: &[usize], z: f64) -> Result<Estimate> {
    if counts.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(z.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!("|z| = {} > 1", z.abs())));
    }
    Estimate::mean_of(counts.iter().map(|&k| z.powi(k as i32)))
}

/// Least-squares slope of `log p` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.iter().any(|&(x, p)| !(x > 0.0 && p > 0.0)) {
        return Err(Error::InvalidArgument(
            "log-log fit needs positive coordinates".into(),
        ));
    }
    let logged: Vec<(f64, f64)> = points.iter().map(|&(x, p)| (x.ln(), p.ln())).collect();
    linear_slope(&logged)
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(points: &[(f64, f64)]) -> Result<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("degenerate abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Pearson correlation of paired samples.
pub fn correlation(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Sample median of an unsorted slice.
pub fn median(xs: &mut [f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Ok(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn uniform(x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    #[test]
    fn ks_hand_values() {
        assert_eq!(ks_distance(&[0.5], uniform).unwrap(), 0.5);
        assert_eq!(ks_distance(&[0.25, 0.75], uniform).unwrap(), 0.25);
        assert!(ks_distance(&[], uniform).is_err());
    }

    #[test]
    fn ks_of_true_law_is_below_critical_value() {
        let n = 100_000;
        let mut passes = 0;
        let seeds = 200;
        for seed in 0..seeds {
            let mut rng = rng::stream(seed, 0);
            let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            if ks_unsorted(&mut xs, uniform).unwrap() < ks_critical_1pct(n) {
                passes += 1;
            }
        }
        assert!(passes as f64 >= 0.97 * seeds as f64, "{passes}/{seeds}");
    }

    #[test]
    fn genfun_estimates() {
        let e = estimate_genfun(&[0, 0, 0], 0.3).unwrap();
        assert_eq!((e.value, e.stderr), (1.0, 0.0));
        let e = estimate_genfun(&[0, 4, 2, 7], 1.0).unwrap();
        assert_eq!((e.value, e.stderr), (1.0, 0.0));
        let counts = [0, 1, 0, 2, 0, 5];
        let e = estimate_genfun(&counts, 0.0).unwrap();
        assert_abs_diff_eq!(e.value, 0.5, epsilon = 1e-15);
        assert!(estimate_genfun(&[], 0.5).is_err());
        assert!(estimate_genfun(&[1], 1.5).is_err());
    }

    #[test]
    fn loglog_on_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0f64, 10.0, 300.0]
            .iter()
            .map(|&x| (x, 2.5 * x.powf(-0.7)))
            .collect();
        assert_abs_diff_eq!(loglog_slope(&pts).unwrap(), -0.7, epsilon = 1e-12);
        assert!(loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
        assert!(loglog_slope(&[(2.0, 1.0)]).is_err());
    }

    #[test]
    fn loglog_recovers_survival_exponent() {
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| 10f64.powf(2.0 + i as f64 * 0.1))
            .map(|x| (x, crate::laws::survival(x)))
            .collect();
        let s = loglog_slope(&pts).unwrap();
        assert_abs_diff_eq!(s, crate::laws::zero_exponents().lambda1, epsilon = 0.005);
    }

    #[test]
    fn estimate_stderr() {
        let e = Estimate::mean_of([1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(e.value, 2.5);
        assert_abs_diff_eq!(e.stderr, (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-15);
        assert!(Estimate::mean_of(std::iter::empty()).is_err());
    }

    proptest! {
        #[test]
        fn ks_invariant_under_monotone_maps(xs in prop::collection::vec(0.001f64..0.999, 1..50)) {
            let mut a = xs.clone();
            a.sort_by(f64::total_cmp);
            let d1 = ks_distance(&a, uniform).unwrap();
            // x -> x^3 applied to both sample and cdf.
            let b: Vec<f64> = a.iter().map(|x| x.powi(3)).collect();
            let d2 = ks_distance(&b, |y| uniform(y.cbrt())).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&d1));
        }

        #[test]
        fn genfun_at_zero_is_zero_frequency(counts in prop::collection::vec(0usize..5, 1..100)) {
            let e = estimate_genfun(&counts, 0.0).unwrap();
            let zeros = counts.iter().filter(|&&k| k == 0).count() as f64 / counts.len() as f64;
            prop_assert!((e.value - zeros).abs() < 1e-12);
        }

        #[test]
        fn loglog_exact(s in -3.0f64..3.0, c in 0.1f64..10.0) {
            let pts: Vec<(f64, f64)> = [1.5f64, 4.0, 9.0, 100.0].iter().map(|&x| (x, c * x.powf(s))).collect();
            prop_assert!((loglog_slope(&pts).unwrap() - s).abs() < 1e-10);
        }
    }
}
