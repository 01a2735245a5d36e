//! Mixed moments of words in independent reverse or symmetric circulant
//! matrices, their limits, and Monte Carlo estimates at finite `n`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::entries::{derive_seed, sample_entries, EntryDistribution};
use crate::error::{Error, Result};
use crate::fourier;
use crate::matrix::{CirculantMatrix, MatrixKind};
use crate::stats::OnlineStats;

/// Largest dimension for which the estimator multiplies dense matrices.
pub const DENSE_PRODUCT_MAX_N: usize = 256;

/// A word `t_1 t_2 ... t_h` over labels `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    word: Vec<usize>,
    m: usize,
}

impl Monomial {
    pub fn new(word: Vec<usize>, m: usize) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::invalid("monomial must be nonempty"));
        }
        if let Some(&bad) = word.iter().find(|&&t| t == 0 || t > m) {
            return Err(Error::invalid(format!("label {bad} outside 1..={m}")));
        }
        Ok(Self { word, m })
    }

    /// Family size taken as the largest label.
    pub fn from_word(word: Vec<usize>) -> Result<Self> {
        let m = word.iter().copied().max().unwrap_or(0);
        Self::new(word, m)
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Occurrences `d_i` of each label, indexed `0..m`.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut d = vec![0; self.m];
        for &t in &self.word {
            d[t - 1] += 1;
        }
        d
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Accepts `1,2,2,1`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let word = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad label '{p}' in word '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_word(word)
    }
}

/// Every word of length `h` over `1..=m`, in lexicographic order.
pub fn all_words(h: usize, m: usize) -> impl Iterator<Item = Monomial> {
    let total = if m == 0 { 0 } else { m.pow(h as u32) };
    (0..total).map(move |mut code| {
        let mut word = vec![0; h];
        for slot in word.iter_mut().rev() {
            *slot = code % m + 1;
            code /= m;
        }
        Monomial { word, m }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryProfile {
    /// Count of label `i + 1` at even (1-based) positions.
    pub even: Vec<usize>,
    /// Count of label `i + 1` at odd (1-based) positions.
    pub odd: Vec<usize>,
    pub symmetric: bool,
}

pub fn symmetry_profile(q: &Monomial) -> SymmetryProfile {
    let mut even = vec![0; q.m];
    let mut odd = vec![0; q.m];
    for (pos, &t) in q.word.iter().enumerate() {
        if (pos + 1) % 2 == 0 {
            even[t - 1] += 1;
        } else {
            odd[t - 1] += 1;
        }
    }
    let symmetric = even == odd;
    SymmetryProfile {
        even,
        odd,
        symmetric,
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, v| acc * v)
}

fn pairings(s: usize) -> BigUint {
    (1..=s as u64).fold(BigUint::one(), |acc, k| acc * (2 * k - 1))
}

/// Limit state of a word in the half-independent reverse circulant family:
/// `prod s_i!` for symmetric words (label `i` used `2 s_i` times), else zero.
pub fn rc_limit_phi_exact(q: &Monomial) -> BigUint {
    let profile = symmetry_profile(q);
    if !profile.symmetric {
        return BigUint::zero();
    }
    profile.odd.iter().map(|&s| factorial(s)).product()
}

pub fn rc_limit_phi(q: &Monomial) -> f64 {
    rc_limit_phi_exact(q).to_f64().unwrap_or(f64::INFINITY)
}

/// Limit state of a word in independent symmetric circulant matrices:
/// `prod (2 s_i)! / (2^{s_i} s_i!)` when every label count is even.
pub fn sc_limit_phi_exact(q: &Monomial) -> BigUint {
    let counts = q.label_counts();
    if counts.iter().any(|d| d % 2 == 1) {
        return BigUint::zero();
    }
    counts.iter().map(|&d| pairings(d / 2)).product()
}

pub fn sc_limit_phi(q: &Monomial) -> f64 {
    sc_limit_phi_exact(q).to_f64().unwrap_or(f64::INFINITY)
}

pub fn limit_phi(kind: MatrixKind, q: &Monomial) -> f64 {
    match kind {
        MatrixKind::Reverse => rc_limit_phi(q),
        MatrixKind::Symmetric => sc_limit_phi(q),
    }
}

/// `phi_2(q(a_1, ..., a_m))` for `a_i = [[0, eta_i], [conj(eta_i), 0]]` with
/// independent standard complex Gaussians `eta_i`, evaluated symbolically.
pub fn half_independent_model_phi_exact(q: &Monomial) -> BigUint {
    let mut total = BigUint::zero();
    for start in 0..2usize {
        // walk the single nonzero path of the anti-diagonal product from `start`
        let mut row = start;
        let mut eta = vec![0usize; q.m];
        let mut eta_bar = vec![0usize; q.m];
        for &t in &q.word {
            if row == 0 {
                eta[t - 1] += 1;
            } else {
                eta_bar[t - 1] += 1;
            }
            row = 1 - row;
        }
        if row != start {
            continue;
        }
        // E[eta^r conj(eta)^s] = r! [r == s]
        if eta == eta_bar {
            total += eta.iter().map(|&r| factorial(r)).product::<BigUint>();
        }
    }
    // normalized trace on 2x2 matrices; both diagonal paths carry equal weight
    total / 2u32
}

pub fn half_independent_model_phi(q: &Monomial) -> f64 {
    half_independent_model_phi_exact(q)
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

/// Monte Carlo estimate of `(1/n) E Tr(q)` with standard-Gaussian entries.
pub fn phi_n_estimate(
    kind: MatrixKind,
    q: &Monomial,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    phi_n_estimate_with(
        kind,
        q,
        &EntryDistribution::StandardGaussian,
        n,
        trials,
        seed,
    )
}

/// Seeds for trial `k`, label `l` come from `derive_seed(seed, [k, l])`.
pub fn phi_n_estimate_with(
    kind: MatrixKind,
    q: &Monomial,
    dist: &EntryDistribution,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    let values = (0..trials)
        .into_par_iter()
        .map(|k| normalized_word_trace(kind, q, dist, n, derive_seed(seed, &[k as u64])))
        .collect::<Result<Vec<f64>>>()?;
    let stats: OnlineStats = values.into_iter().collect();
    Ok((stats.mean(), stats.std_error()))
}

/// `(1/n) Tr(q)` for one draw of the family; label `l` uses
/// `derive_seed(trial_seed, [l])`.
fn normalized_word_trace(
    kind: MatrixKind,
    q: &Monomial,
    dist: &EntryDistribution,
    n: usize,
    trial_seed: u64,
) -> Result<f64> {
    let family = (1..=q.m)
        .map(|l| sample_entries(dist, n, derive_seed(trial_seed, &[l as u64])))
        .collect::<Result<Vec<_>>>()?;
    let trace = if n <= DENSE_PRODUCT_MAX_N {
        let mats = family
            .into_iter()
            .map(|x| CirculantMatrix::new(kind, x).materialize())
            .collect::<Result<Vec<_>>>()?;
        let mut prod = DMatrix::<f64>::identity(n, n);
        for &t in &q.word {
            prod = &prod * &mats[t - 1];
        }
        prod.trace()
    } else {
        let symbols: Vec<_> = family.iter().map(|x| fourier::symbol(kind, x)).collect();
        let word: Vec<usize> = q.word.iter().map(|t| t - 1).collect();
        fourier::word_trace(kind, &symbols, &word)
    };
    Ok(trace / n as f64)
}
