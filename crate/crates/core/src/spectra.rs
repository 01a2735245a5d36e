//! Eigenvalues, empirical spectral distributions and the two limit laws.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::entries::EntrySequence;
use crate::error::{Error, Result};
use crate::fourier;
use crate::matrix::MatrixKind;

/// Largest tolerated `|a_ij - a_ji|` for `eigenvalues_dense`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Sorted eigenvalues of one matrix (or a pooled collection of matrices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    eigenvalues: Vec<f64>,
}

impl SpectralSample {
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues }
    }

    /// Concatenates samples with equal weight per eigenvalue.
    pub fn pooled<'a>(samples: impl IntoIterator<Item = &'a SpectralSample>) -> Self {
        Self::new(
            samples
                .into_iter()
                .flat_map(|s| s.eigenvalues.iter().copied())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn max_abs_deviation(&self, other: &SpectralSample) -> f64 {
        assert_eq!(self.len(), other.len(), "samples differ in length");
        self.eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Reference path: dense symmetric eigendecomposition.
pub fn eigenvalues_dense(m: &DMatrix<f64>) -> Result<SpectralSample> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let eig = SymmetricEigen::new(m.clone());
    Ok(SpectralSample::new(
        eig.eigenvalues.iter().copied().collect(),
    ))
}

/// Closed-form spectrum through the discrete Fourier transform of the entries.
pub fn eigenvalues_fast(kind: MatrixKind, x: &EntrySequence) -> SpectralSample {
    let mu = fourier::symbol(kind, x);
    SpectralSample::new(fourier::eigenvalues_from_symbol(kind, &mu))
}

/// `F(x) = #{lambda_k <= x} / n`.
pub fn esd_cdf(s: &SpectralSample, x: f64) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    s.eigenvalues.partition_point(|&v| v <= x) as f64 / s.len() as f64
}

/// `(1/n) sum_k lambda_k^h`.
pub fn esd_moment(s: &SpectralSample, h: u32) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    s.eigenvalues.iter().map(|&v| v.powi(h as i32)).sum::<f64>() / s.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitLaw {
    /// Density `|x| exp(-x^2)`; even moments `p!`.
    SymmetrizedRayleigh,
    /// Even moments `(2p)! / (2^p p!)`.
    StandardGaussian,
}

impl LimitLaw {
    /// The limit law of the ESD for the given matrix kind.
    pub fn for_kind(kind: MatrixKind) -> Self {
        match kind {
            MatrixKind::Reverse => LimitLaw::SymmetrizedRayleigh,
            MatrixKind::Symmetric => LimitLaw::StandardGaussian,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LimitLaw::SymmetrizedRayleigh => "symmetrized-rayleigh",
            LimitLaw::StandardGaussian => "standard-gaussian",
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        match self {
            LimitLaw::SymmetrizedRayleigh => {
                let tail = 0.5 * (-x * x).exp();
                if x < 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
            LimitLaw::StandardGaussian => 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2),
        }
    }

    pub fn pdf(self, x: f64) -> f64 {
        match self {
            LimitLaw::SymmetrizedRayleigh => x.abs() * (-x * x).exp(),
            LimitLaw::StandardGaussian => {
                (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
        }
    }

    pub fn moment(self, h: u32) -> f64 {
        limit_moment(self, h)
    }
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LimitLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "symmetrized-rayleigh" | "rayleigh" => Ok(LimitLaw::SymmetrizedRayleigh),
            "standard-gaussian" | "gaussian" => Ok(LimitLaw::StandardGaussian),
            other => Err(Error::invalid(format!("unknown limit law '{other}'"))),
        }
    }
}

pub(crate) fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

/// `(2s)! / (2^s s!)`, the number of pair partitions of `2s` points.
pub(crate) fn double_factorial_odd(s: u32) -> u128 {
    (1..=s as u128).map(|k| 2 * k - 1).product()
}

/// Limit moment `beta_h`: `p!` (Rayleigh) or `(2p)!/(2^p p!)` (Gaussian) for
/// `h = 2p`, zero for odd `h`.
pub fn limit_moment(law: LimitLaw, h: u32) -> f64 {
    if h % 2 == 1 {
        return 0.0;
    }
    let p = h / 2;
    match law {
        LimitLaw::SymmetrizedRayleigh => factorial(p) as f64,
        LimitLaw::StandardGaussian => double_factorial_odd(p) as f64,
    }
}

/// Two-sided Kolmogorov-Smirnov distance between the ESD of `s` and `law`,
/// checking both one-sided limits at every jump.
pub fn ks_distance(s: &SpectralSample, law: LimitLaw) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::invalid("KS distance of an empty sample"));
    }
    let n = s.len() as f64;
    Ok(s.eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = law.cdf(x);
            let above = (k + 1) as f64 / n - f;
            let below = f - k as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max))
}

/// Equal-width histogram over `[min - 0.1, max + 0.1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub const PAD: f64 = 0.1;

    pub fn from_sample(s: &SpectralSample, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("histogram needs at least one bin"));
        }
        if s.is_empty() {
            return Err(Error::invalid("histogram of an empty sample"));
        }
        let ev = s.eigenvalues();
        let lo = ev[0] - Self::PAD;
        let hi = ev[ev.len() - 1] + Self::PAD;
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in ev {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Self { lo, width, counts })
    }

    pub fn center(&self, b: usize) -> f64 {
        self.lo + (b as f64 + 0.5) * self.width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count normalised to a density.
    pub fn density(&self, b: usize) -> f64 {
        self.counts[b] as f64 / (self.total() as f64 * self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entries::{sample_entries, EntryDistribution};
    use crate::matrix::CirculantMatrix;

    fn sample(v: &[f64]) -> SpectralSample {
        SpectralSample::new(v.to_vec())
    }

    #[test]
    fn dense_known_spectra() {
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(eigenvalues_dense(&swap).unwrap().eigenvalues().len(), 2);
        let ev = eigenvalues_dense(&swap).unwrap();
        assert!((ev.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((ev.eigenvalues()[1] - 1.0).abs() < 1e-14);
        let id = eigenvalues_dense(&DMatrix::identity(3, 3)).unwrap();
        assert!(id.eigenvalues().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn dense_rejects_asymmetric_and_non_square() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0 + 1e-9, 0.0]);
        assert!(matches!(eigenvalues_dense(&m), Err(Error::InvalidInput(_))));
        let r = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(eigenvalues_dense(&r), Err(Error::InvalidInput(_))));
    }

    /// Characteristic polynomial by Faddeev-LeVerrier, roots by bisection on
    /// sign changes of the polynomial over a fine grid.
    fn char_poly_roots(a: &DMatrix<f64>) -> Vec<f64> {
        let n = a.nrows();
        let mut coeffs = vec![1.0];
        let mut mk = DMatrix::<f64>::zeros(n, n);
        let id = DMatrix::<f64>::identity(n, n);
        let mut c = 1.0;
        for k in 1..=n {
            mk = a * &mk + &id * c;
            c = -(a * &mk).trace() / k as f64;
            coeffs.push(c);
        }
        let p = |x: f64| coeffs.iter().fold(0.0, |acc, &ck| acc * x + ck);
        let bound = 1.0 + coeffs.iter().skip(1).map(|v| v.abs()).fold(0.0, f64::max);
        let steps = 200_000;
        let mut roots = Vec::new();
        let mut prev = -bound;
        for s in 1..=steps {
            let x = -bound + 2.0 * bound * s as f64 / steps as f64;
            let (fa, fb) = (p(prev), p(x));
            if fa == 0.0 {
                roots.push(prev);
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi) = (prev, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p(lo) * p(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = x;
        }
        roots
    }

    #[test]
    fn dense_matches_characteristic_polynomial_roots() {
        // reverse circulant, n = 4, unscaled entries 1, 2, 3, 4
        let x = EntrySequence::from_values(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = CirculantMatrix::new(MatrixKind::Reverse, x)
            .materialize()
            .unwrap()
            * 2.0;
        let ev = eigenvalues_dense(&m).unwrap();
        let roots = char_poly_roots(&m);
        assert_eq!(roots.len(), 4);
        for (a, b) in ev.eigenvalues().iter().zip(&roots) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn fast_scalar_identity() {
        let c = 3.5;
        let mut v = vec![0.0; 7];
        v[0] = c;
        let s = eigenvalues_fast(
            MatrixKind::Symmetric,
            &EntrySequence::from_values(v).unwrap(),
        );
        assert!(s
            .eigenvalues()
            .iter()
            .all(|e| (e - c / 7f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn fast_reverse_two_by_two() {
        let (a, b) = (0.3, -1.7);
        let s = eigenvalues_fast(
            MatrixKind::Reverse,
            &EntrySequence::from_values(vec![a, b]).unwrap(),
        );
        let r2 = 2f64.sqrt();
        let mut expected = [(b - a) / r2, (b + a) / r2];
        expected.sort_by(f64::total_cmp);
        assert!((s.eigenvalues()[0] - expected[0]).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - expected[1]).abs() < 1e-14);
    }

    #[test]
    fn fast_matches_dense_n64() {
        for kind in MatrixKind::ALL {
            let x = sample_entries(&EntryDistribution::StandardGaussian, 64, 5).unwrap();
            let dense =
                eigenvalues_dense(&CirculantMatrix::new(kind, x.clone()).materialize().unwrap())
                    .unwrap();
            assert!(eigenvalues_fast(kind, &x).max_abs_deviation(&dense) <= 1e-8);
        }
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        for kind in MatrixKind::ALL {
            for n in [3usize, 10, 33, 100] {
                let x = sample_entries(&EntryDistribution::UniformSqrt3, n, n as u64).unwrap();
                let tr = CirculantMatrix::new(kind, x.clone())
                    .materialize()
                    .unwrap()
                    .trace();
                let sum: f64 = eigenvalues_fast(kind, &x).eigenvalues().iter().sum();
                assert!((tr - sum).abs() <= 1e-9 * tr.abs().max(1.0), "{kind} {n}");
            }
        }
    }

    #[test]
    fn esd_cdf_cases() {
        let s = sample(&[-1.0, 1.0]);
        assert_eq!(esd_cdf(&s, 0.0), 0.5);
        assert_eq!(esd_cdf(&s, -2.0), 0.0);
        let t = sample(&[0.5, 1.0, 1.0, 2.0]);
        // right-continuous with ties
        assert_eq!(esd_cdf(&t, 1.0), 0.75);
        assert_eq!(esd_cdf(&t, 0.5), 0.25);
        assert_eq!(esd_cdf(&t, 2.0), 1.0);
    }

    #[test]
    fn esd_moment_cases() {
        let s = sample(&[-1.0, 1.0]);
        assert_eq!(esd_moment(&s, 2), 1.0);
        assert_eq!(esd_moment(&s, 3), 0.0);
    }

    #[test]
    fn esd_moment_matches_dense_trace_power() {
        for kind in MatrixKind::ALL {
            let n = 16;
            let x = sample_entries(&EntryDistribution::StandardGaussian, n, 8).unwrap();
            let m = CirculantMatrix::new(kind, x.clone()).materialize().unwrap();
            let s = eigenvalues_fast(kind, &x);
            let mut pow = DMatrix::<f64>::identity(n, n);
            for h in 1..=6u32 {
                pow *= &m;
                let direct = pow.trace() / n as f64;
                let est = esd_moment(&s, h);
                assert!(
                    (direct - est).abs() <= 1e-8 * direct.abs().max(1.0),
                    "{kind} h={h}"
                );
            }
        }
    }

    #[test]
    fn limit_moment_values() {
        assert_eq!(limit_moment(LimitLaw::SymmetrizedRayleigh, 4), 2.0);
        assert_eq!(limit_moment(LimitLaw::StandardGaussian, 6), 15.0);
        assert_eq!(limit_moment(LimitLaw::SymmetrizedRayleigh, 7), 0.0);
        assert_eq!(limit_moment(LimitLaw::StandardGaussian, 7), 0.0);
        assert_eq!(limit_moment(LimitLaw::StandardGaussian, 2), 1.0);
    }

    /// Composite Simpson rule on `[a, b]`.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
        let h = (b - a) / intervals as f64;
        let mut acc = f(a) + f(b);
        for k in 1..intervals {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn rayleigh_density_and_moments_by_quadrature() {
        let law = LimitLaw::SymmetrizedRayleigh;
        let mass =
            simpson(|x| law.pdf(x), -6.0, 0.0, 20_000) + simpson(|x| law.pdf(x), 0.0, 6.0, 20_000);
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
        for p in 1..=5u32 {
            let f = |x: f64| x.powi(2 * p as i32) * law.pdf(x);
            let m = 2.0 * simpson(f, 0.0, 12.0, 200_000);
            let target = limit_moment(law, 2 * p);
            assert!(
                ((m - target) / target).abs() < 1e-6,
                "p={p}: {m} vs {target}"
            );
        }
    }

    #[test]
    fn gaussian_density_integrates_to_one() {
        let law = LimitLaw::StandardGaussian;
        let mass = simpson(|x| law.pdf(x), -10.0, 10.0, 20_000);
        assert!((mass - 1.0).abs() < 1e-6);
        for p in 1..=5u32 {
            let f = |x: f64| x.powi(2 * p as i32) * law.pdf(x);
            let m = simpson(f, -14.0, 14.0, 200_000);
            let target = limit_moment(law, 2 * p);
            assert!(((m - target) / target).abs() < 1e-6);
        }
    }

    #[test]
    fn cdfs_are_monotone_and_normalised() {
        for law in [LimitLaw::SymmetrizedRayleigh, LimitLaw::StandardGaussian] {
            assert!(law.cdf(-40.0) < 1e-12);
            assert!((law.cdf(40.0) - 1.0).abs() < 1e-12);
            let mut prev = 0.0;
            for k in -800..=800 {
                let c = law.cdf(k as f64 / 100.0);
                assert!(c >= prev);
                prev = c;
            }
            assert!((law.cdf(0.0) - 0.5).abs() < 1e-15);
        }
    }

    fn quantile(law: LimitLaw, u: f64) -> f64 {
        let (mut lo, mut hi) = (-20.0, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if law.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn ks_on_quantile_grid() {
        for law in [LimitLaw::SymmetrizedRayleigh, LimitLaw::StandardGaussian] {
            let n = 500;
            let pts: Vec<f64> = (1..=n)
                .map(|k| quantile(law, (k as f64 - 0.5) / n as f64))
                .collect();
            let d = ks_distance(&SpectralSample::new(pts), law).unwrap();
            assert!(d <= 0.5 / n as f64 + 1e-9, "{law}: {d}");
        }
    }

    #[test]
    fn ks_single_point_at_median() {
        for law in [LimitLaw::SymmetrizedRayleigh, LimitLaw::StandardGaussian] {
            let d = ks_distance(&sample(&[0.0]), law).unwrap();
            assert!((d - 0.5).abs() < 1e-15);
        }
        assert!(ks_distance(&sample(&[]), LimitLaw::StandardGaussian).is_err());
    }

    #[test]
    fn histogram_counts_everything() {
        let s = sample(&[-1.0, -0.5, 0.0, 0.0, 2.0]);
        let h = Histogram::from_sample(&s, 4).unwrap();
        assert_eq!(h.total(), 5);
        assert!((h.lo + 1.1).abs() < 1e-15);
        let mass: f64 = (0..4).map(|b| h.density(b) * h.width).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}
