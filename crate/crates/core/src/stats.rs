//! Classical statistics used by the detector and the Monte Carlo checks.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Two-sided 99% standard-normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;
/// Asymptotic one-sample Kolmogorov–Smirnov critical constant at α = 0.01:
/// reject when `D·√n` exceeds it.
pub const KS_CRIT_99: f64 = 1.627_607_5;

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 10_000;

/// Regularized lower incomplete gamma `P(a, x)` by its power series.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - libm::lgamma(a)).exp()
}

/// Regularized upper incomplete gamma `Q(a, x)` by Lentz's continued fraction.
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - libm::lgamma(a)).exp() * h
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x)/Γ(a)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        (1.0 - gamma_p_series(a, x)).clamp(0.0, 1.0)
    } else {
        gamma_q_fraction(a, x).clamp(0.0, 1.0)
    }
}

/// Survival function of the chi-squared distribution.
pub fn chi_squared_sf(statistic: f64, dof: usize) -> f64 {
    gamma_q(dof as f64 / 2.0, statistic / 2.0)
}

/// Pearson statistic of `observed` against the cell probabilities `expected`.
pub fn pearson_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = n * p;
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Goodness-of-fit test of `observed` counts against `expected` cell
/// probabilities; returns `(statistic, p_value)` with `k − 1` degrees of freedom.
pub fn chi_squared_gof(observed: &[u64], expected: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::param("observed", "need at least two cells matching the expected profile"));
    }
    let stat = pearson_statistic(observed, expected);
    Ok((stat, chi_squared_sf(stat, observed.len() - 1)))
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Two-sided interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// 99% Wilson score interval for a binomial proportion.
pub fn wilson_99(successes: u64, trials: u64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: (center - half).max(0.0),
        hi: (center + half).min(1.0),
    }
}

/// 99% interval a binomial proportion `p` is expected to land in over `trials`
/// draws (normal approximation around the known rate).
pub fn binomial_band_99(p: f64, trials: u64) -> Interval {
    let half = Z_99 * (p * (1.0 - p) / trials as f64).sqrt();
    Interval {
        lo: p - half,
        hi: p + half,
    }
}

/// Sample mean with a 99% normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub ci99: Interval,
    pub count: u64,
}

pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    let n = values.len() as f64;
    if values.is_empty() {
        return MeanEstimate {
            mean: f64::NAN,
            std_dev: f64::NAN,
            ci99: Interval { lo: f64::NAN, hi: f64::NAN },
            count: 0,
        };
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    let half = Z_99 * sd / n.sqrt();
    MeanEstimate {
        mean,
        std_dev: sd,
        ci99: Interval {
            lo: mean - half,
            hi: mean + half,
        },
        count: values.len() as u64,
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    // Closed form for three degrees of freedom.
    fn chi3_sf_closed(x: f64) -> f64 {
        libm::erfc((x / 2.0).sqrt()) + (2.0 * x / PI).sqrt() * (-x / 2.0).exp()
    }

    #[test]
    fn chi_squared_reference_points() {
        assert_eq!(chi_squared_sf(0.0, 3), 1.0);
        // Two degrees of freedom: exp(-x/2).
        assert!((chi_squared_sf(3.0, 2) - (-1.5f64).exp()).abs() < 1e-14);
        // 99th percentile of chi-squared(3).
        assert!((chi_squared_sf(11.344_866_730_144_373, 3) - 0.01).abs() < 1e-12);
        // scipy.stats.chi2.sf(125, 3)
        assert!((chi_squared_sf(125.0, 3) / 6.462_842_060_888_778e-27 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gof_rejects_mismatched_shapes() {
        assert!(chi_squared_gof(&[1, 2, 3], &[0.5, 0.5]).is_err());
        let (s, p) = chi_squared_gof(&[50, 50], &[0.5, 0.5]).unwrap();
        assert_eq!(s, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn ks_of_perfect_grid_is_half_step() {
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn wilson_covers_rate() {
        let ci = wilson_99(100, 10_000);
        assert!(ci.contains(0.01));
        assert!(ci.lo > 0.007 && ci.hi < 0.0135);
        let band = binomial_band_99(0.01, 10_000);
        assert!((band.hi - 0.01 - 2.5758 * 0.000_994_987).abs() < 1e-6);
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(Z_99) - 0.995).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn series_and_fraction_agree_with_closed_form(x in 0.0..200.0f64) {
            let got = chi_squared_sf(x, 3);
            let want = chi3_sf_closed(x);
            prop_assert!((got - want).abs() < 1e-10, "x={} got={} want={}", x, got, want);
            prop_assert!((got - want).abs() <= 1e-9 * want, "relative: x={} got={} want={}", x, got, want);
        }
    }
}
