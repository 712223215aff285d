use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FockVector, StateKind, VACUUM_VARIANCE};
use crate::stats::normal_cdf;
use crate::{Error, Result, C64};

/// Grid size of tabulated quadrature densities.
pub const PDF_TABLE_POINTS: usize = 4096;
/// Half-width of the tabulation window, in standard deviations.
pub const PDF_TABLE_SPAN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QuadratureSetting {
    Position,
    Momentum,
}

impl QuadratureSetting {
    pub const BOTH: [QuadratureSetting; 2] = [QuadratureSetting::Position, QuadratureSetting::Momentum];

    /// Phase `e^{−iθn}` taking momentum statistics onto position statistics.
    fn rotate(self, n: usize, c: C64) -> C64 {
        match self {
            QuadratureSetting::Position => c,
            QuadratureSetting::Momentum => match n % 4 {
                0 => c,
                1 => C64::new(c.im, -c.re),
                2 => -c,
                _ => C64::new(-c.im, c.re),
            },
        }
    }

    /// Mean of a coherent state `|β⟩` in this quadrature.
    pub fn coherent_mean(self, beta: C64) -> f64 {
        match self {
            QuadratureSetting::Position => beta.re,
            QuadratureSetting::Momentum => beta.im,
        }
    }
}

fn rotated(state: &FockVector, setting: QuadratureSetting) -> Vec<C64> {
    state
        .coefficients()
        .iter()
        .enumerate()
        .map(|(n, c)| setting.rotate(n, *c))
        .collect()
}

/// `Σₙ cₙ ψₙ(q)` with `ψₙ` the normalized Hermite functions in the
/// dimensionless coordinate `q`, evaluated by the three-term recurrence.
fn wavefunction(coeffs: &[C64], q: f64) -> C64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-q * q / 2.0).exp();
    let mut acc = coeffs[0] * cur;
    for (n, c) in coeffs.iter().enumerate().skip(1) {
        let next = (2.0 / n as f64).sqrt() * q * cur - ((n - 1) as f64 / n as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        acc += *c * cur;
    }
    acc
}

/// Homodyne density of `state` for `setting` at each grid point.
pub fn quadrature_pdf(state: &FockVector, setting: QuadratureSetting, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("grid", "must be strictly increasing"));
    }
    let coeffs = rotated(state, setting);
    // x = q/√2, so p(x) = √2 |ψ(√2 x)|².
    Ok(grid
        .iter()
        .map(|&x| SQRT_2 * wavefunction(&coeffs, SQRT_2 * x).norm_sqr())
        .collect())
}

/// Mean and variance of the quadrature from number-basis moments.
pub fn quadrature_moments(state: &FockVector, setting: QuadratureSetting) -> (f64, f64) {
    let c = rotated(state, setting);
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut n_mean = 0.0;
    for n in 0..c.len() {
        n_mean += n as f64 * c[n].norm_sqr();
        if n + 1 < c.len() {
            a1 += c[n].conj() * c[n + 1] * ((n + 1) as f64).sqrt();
        }
        if n + 2 < c.len() {
            a2 += c[n].conj() * c[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
        }
    }
    let mean = a1.re;
    let second = (2.0 * a2.re + 2.0 * n_mean + 1.0) / 4.0;
    (mean, (second - mean * mean).max(0.0))
}

/// Draws homodyne outcomes for one (state, quadrature) pair.
///
/// Coherent states sample their Gaussian exactly. Everything else is
/// tabulated on [`PDF_TABLE_POINTS`] points over mean ± [`PDF_TABLE_SPAN`]
/// standard deviations and inverted by binary search with linear
/// interpolation of the cumulative trapezoid sums.
#[derive(Debug, Clone)]
pub enum QuadratureSampler {
    Gaussian { mean: f64, std_dev: f64 },
    Table { grid: Vec<f64>, cdf: Vec<f64> },
}

impl QuadratureSampler {
    pub fn new(state: &FockVector, setting: QuadratureSetting) -> Self {
        if let StateKind::Coherent(alpha) = state.kind() {
            return QuadratureSampler::Gaussian {
                mean: setting.coherent_mean(alpha.value()),
                std_dev: VACUUM_VARIANCE.sqrt(),
            };
        }
        let (mean, var) = quadrature_moments(state, setting);
        let sd = var.sqrt().max(VACUUM_VARIANCE.sqrt() / 4.0);
        let lo = mean - PDF_TABLE_SPAN * sd;
        let step = 2.0 * PDF_TABLE_SPAN * sd / (PDF_TABLE_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..PDF_TABLE_POINTS).map(|i| lo + i as f64 * step).collect();
        let pdf = quadrature_pdf(state, setting, &grid).expect("grid is increasing");
        let mut cdf = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in pdf.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * step;
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|v| *v /= acc);
        QuadratureSampler::Table { grid, cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            QuadratureSampler::Gaussian { mean, std_dev } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + std_dev * z
            }
            QuadratureSampler::Table { grid, cdf } => {
                let u: f64 = rng.random();
                // First index with cdf >= u.
                let hi = cdf.partition_point(|&c| c < u).clamp(1, cdf.len() - 1);
                let lo = hi - 1;
                let span = cdf[hi] - cdf[lo];
                let t = if span > 0.0 { (u - cdf[lo]) / span } else { 0.0 };
                grid[lo] + t * (grid[hi] - grid[lo])
            }
        }
    }

    /// CDF of the distribution this sampler draws from.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            QuadratureSampler::Gaussian { mean, std_dev } => normal_cdf((x - mean) / std_dev),
            QuadratureSampler::Table { grid, cdf } => {
                if x <= grid[0] {
                    return 0.0;
                }
                if x >= grid[grid.len() - 1] {
                    return 1.0;
                }
                let hi = grid.partition_point(|&g| g < x).max(1);
                let lo = hi - 1;
                let t = (x - grid[lo]) / (grid[hi] - grid[lo]);
                cdf[lo] + t * (cdf[hi] - cdf[lo])
            }
        }
    }
}

/// One homodyne outcome. Builds a fresh sampler per call; protocol engines
/// keep a [`QuadratureSampler`] per state instead.
pub fn sample_quadrature<R: Rng + ?Sized>(state: &FockVector, setting: QuadratureSetting, rng: &mut R) -> f64 {
    QuadratureSampler::new(state, setting).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::{auto_cutoff, coherent_fock, pascs_fock, Amplitude};
    use crate::seed::stream_from_seed;
    use crate::stats::ks_statistic;

    fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
        grid.windows(2)
            .zip(f.windows(2))
            .map(|(g, v)| 0.5 * (v[0] + v[1]) * (g[1] - g[0]))
            .sum()
    }

    fn gaussian(x: f64, mean: f64) -> f64 {
        let var = VACUUM_VARIANCE;
        (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    fn amp(re: f64, im: f64) -> Amplitude {
        Amplitude::new(C64::new(re, im)).unwrap()
    }

    #[test]
    fn vacuum_is_centred_gaussian() {
        let v = FockVector::vacuum(20);
        let grid = linspace(-4.0, 4.0, 2001);
        let pdf = quadrature_pdf(&v, QuadratureSetting::Position, &grid).unwrap();
        for (x, p) in grid.iter().zip(&pdf) {
            assert!((p - gaussian(*x, 0.0)).abs() < 1e-12);
        }
        let (m, var) = quadrature_moments(&v, QuadratureSetting::Position);
        assert!(m.abs() < 1e-15 && (var - 0.25).abs() < 1e-15);
    }

    #[test]
    fn diagonal_coherent_state_centres_on_both_axes() {
        let a = amp(0.8, 0.8);
        let s = coherent_fock(a, auto_cutoff(a)).unwrap();
        let grid = linspace(0.8 - 4.0, 0.8 + 4.0, 2001);
        for setting in QuadratureSetting::BOTH {
            let pdf = quadrature_pdf(&s, setting, &grid).unwrap();
            for (x, p) in grid.iter().zip(&pdf) {
                assert!((p - gaussian(*x, 0.8)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pascs_density_is_normalized_and_non_gaussian() {
        let a = amp(1.0, 0.0);
        let (s, _) = pascs_fock(a, auto_cutoff(a) + 2).unwrap();
        let (mean, var) = quadrature_moments(&s, QuadratureSetting::Position);
        let sd = var.sqrt();
        let grid = linspace(mean - 8.0 * sd, mean + 8.0 * sd, 4001);
        let pdf = quadrature_pdf(&s, QuadratureSetting::Position, &grid).unwrap();
        assert!((trapezoid(&grid, &pdf) - 1.0).abs() < 1e-6);
        assert!(pdf.iter().all(|p| *p >= 0.0));
        let max_diff = grid
            .iter()
            .zip(&pdf)
            .map(|(x, p)| (p - gaussian(*x, 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(max_diff > 0.01, "{max_diff}");
    }

    #[test]
    fn rejects_unsorted_grid() {
        let v = FockVector::vacuum(4);
        assert!(quadrature_pdf(&v, QuadratureSetting::Position, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn sampled_moments() {
        let mut rng = stream_from_seed(11);
        let n = 100_000;
        let v = FockVector::vacuum(10);
        let xs: Vec<f64> = (0..n).map(|_| sample_quadrature(&v, QuadratureSetting::Position, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01 && (var - 0.25).abs() < 0.01);

        let a = amp(1.0, 0.0);
        let s = QuadratureSampler::new(&coherent_fock(a, auto_cutoff(a)).unwrap(), QuadratureSetting::Position);
        let mean = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01);
    }

    #[test]
    fn pascs_sampling_ks() {
        let a = amp(1.0, 0.0);
        let (state, _) = pascs_fock(a, auto_cutoff(a) + 2).unwrap();
        let sampler = QuadratureSampler::new(&state, QuadratureSetting::Position);
        assert!(matches!(sampler, QuadratureSampler::Table { .. }));
        let mut rng = stream_from_seed(5);
        let xs: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        assert!(ks_statistic(&xs, |x| sampler.cdf(x)) < 0.01);
    }
}
