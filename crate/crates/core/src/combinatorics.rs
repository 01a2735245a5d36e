//! Constrained index sets, pair-matching classifiers, counting identities and
//! the exact finite-`n` expected-moment oracle.
//!
//! Index sets are streamed: the free coordinates run through an odometer and
//! the last coordinate is solved from the congruence, so nothing of size
//! `n^h` is ever stored.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::SqrtScaled;
use crate::matrix::MatrixKind;

/// Default cap on the size of an enumerated index space.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_BUDGET`].
pub const BUDGET_ENV: &str = "CIRCLAB_ENUM_BUDGET";

/// Current enumeration budget (read once from the environment).
pub fn enumeration_budget() -> u128 {
    static BUDGET: OnceLock<u128> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().replace('_', "").parse().ok())
            .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
    })
}

pub(crate) fn check_budget(what: &'static str, base: u128, len: u32) -> Result<()> {
    let limit = enumeration_budget();
    let space = base.checked_pow(len).unwrap_or(u128::MAX);
    if space > limit {
        return Err(Error::Resource {
            what,
            requested: space,
            limit,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A tuple of 1-based matrix-entry indices, optionally with a sign per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexVector {
    pub indices: Vec<usize>,
    pub signs: Option<Vec<Sign>>,
}

impl IndexVector {
    pub fn unsigned(indices: Vec<usize>) -> Self {
        Self {
            indices,
            signs: None,
        }
    }

    pub fn signed(indices: Vec<usize>, signs: Vec<Sign>) -> Result<Self> {
        if indices.len() != signs.len() {
            return Err(Error::invalid("indices and signs differ in length"));
        }
        Ok(Self {
            indices,
            signs: Some(signs),
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Lazily yields every tuple in `{lo..=hi}^len` in lexicographic order.
fn odometer(len: usize, lo: usize, hi: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut state = if hi < lo && len > 0 {
        None
    } else {
        Some(vec![lo; len])
    };
    std::iter::from_fn(move || {
        let current = state.take()?;
        let mut next = current.clone();
        let mut pos = len;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if next[pos] < hi {
                next[pos] += 1;
                state = Some(next);
                break;
            }
            next[pos] = lo;
        }
        Some(current)
    })
}

fn rem(v: i64, n: usize) -> usize {
    v.rem_euclid(n as i64) as usize
}

fn alternating_sum(j: &[usize]) -> i64 {
    j.iter()
        .enumerate()
        .map(|(k, &v)| if k % 2 == 0 { -(v as i64) } else { v as i64 })
        .sum()
}

fn validate_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    Ok(())
}

/// Tuples `j in {1..n}^len` with `sum_k (-1)^k j_k = target (mod n)`
/// (positions `k` counted from 1).
pub(crate) fn alternating_congruence(
    n: usize,
    len: usize,
    target: i64,
) -> impl Iterator<Item = Vec<usize>> {
    let free = len.saturating_sub(1);
    let empty_ok = len == 0 && rem(target, n) == 0;
    let solved = (len > 0)
        .then(|| {
            odometer(free, 1, n).map(move |mut j| {
                let s = alternating_sum(&j);
                // sign of position `len` is (-1)^len
                let last_sign: i64 = if len.is_multiple_of(2) { 1 } else { -1 };
                let r = rem(last_sign * (target - s), n);
                j.push(if r == 0 { n } else { r });
                j
            })
        })
        .into_iter()
        .flatten();
    empty_ok.then(Vec::new).into_iter().chain(solved)
}

/// `A_{2p}`: vectors in `{1..n}^{2p}` whose alternating sum is `0 (mod n)`.
pub fn enumerate_a2p(n: usize, p: usize) -> Result<impl Iterator<Item = IndexVector>> {
    validate_n(n)?;
    check_budget("A_2p enumeration", n as u128, 2 * p as u32)?;
    Ok(alternating_congruence(n, 2 * p, 0).map(IndexVector::unsigned))
}

/// `A_{p,i}`: vectors in `{1..n}^{2p+1}` whose alternating sum is `2i - 1 (mod n)`.
pub fn enumerate_api(n: usize, p: usize, i: usize) -> Result<impl Iterator<Item = IndexVector>> {
    validate_n(n)?;
    if i == 0 || i > n {
        return Err(Error::invalid(format!("i = {i} outside 1..={n}")));
    }
    check_budget("A_(p,i) enumeration", n as u128, 2 * p as u32 + 1)?;
    Ok(alternating_congruence(n, 2 * p + 1, 2 * i as i64 - 1).map(IndexVector::unsigned))
}

/// Signed tuples `(eps, j)` with `j in {1..upper}^k` and `sum eps_i j_i = target (mod n)`;
/// one item per sign vector and index vector.
pub(crate) fn signed_congruence(
    n: usize,
    k: usize,
    upper: usize,
    target: i64,
) -> impl Iterator<Item = (Vec<Sign>, Vec<usize>)> {
    let empty_ok = k == 0 && rem(target, n) == 0;
    let digits = 2 * upper;
    let solved = (k > 0 && upper > 0)
        .then(|| {
            odometer(k - 1, 0, digits - 1).flat_map(move |d| {
                let mut signs = Vec::with_capacity(k);
                let mut idx = Vec::with_capacity(k);
                let mut s: i64 = 0;
                for &digit in &d {
                    let (sign, j) = if digit < upper {
                        (Sign::Plus, digit + 1)
                    } else {
                        (Sign::Minus, digit - upper + 1)
                    };
                    s += sign.value() * j as i64;
                    signs.push(sign);
                    idx.push(j);
                }
                [Sign::Plus, Sign::Minus]
                    .into_iter()
                    .filter_map(move |last| {
                        let r = rem(last.value() * (target - s), n);
                        (r >= 1 && r <= upper).then(|| {
                            let mut sg = signs.clone();
                            let mut ix = idx.clone();
                            sg.push(last);
                            ix.push(r);
                            (sg, ix)
                        })
                    })
            })
        })
        .into_iter()
        .flatten();
    empty_ok
        .then(|| (Vec::new(), Vec::new()))
        .into_iter()
        .chain(solved)
}

/// `C_k`: signed vectors with `j_i in 1..=floor(n/2)` and `sum eps_i j_i = 0 (mod n)`.
pub fn enumerate_ck(n: usize, k: usize) -> Result<impl Iterator<Item = IndexVector>> {
    validate_n(n)?;
    enumerate_ck_with_upper(n, k, n / 2)
}

pub(crate) fn enumerate_ck_with_upper(
    n: usize,
    k: usize,
    upper: usize,
) -> Result<impl Iterator<Item = IndexVector>> {
    check_budget("C_k enumeration", 2 * upper as u128, k as u32)?;
    Ok(signed_congruence(n, k, upper, 0).map(|(s, j)| IndexVector {
        indices: j,
        signs: Some(s),
    }))
}

/// `C~_k` (even `n` only): `j_i in 1..=n/2-1`, `sum eps_i j_i = 0 (mod n/2)` but
/// `!= 0 (mod n)`, i.e. `= n/2 (mod n)`.
pub fn enumerate_ck_tilde(n: usize, k: usize) -> Result<impl Iterator<Item = IndexVector>> {
    validate_n(n)?;
    if n % 2 == 1 {
        return Err(Error::invalid("C~_k is only defined for even n"));
    }
    let upper = n / 2 - 1;
    check_budget("C~_k enumeration", 2 * upper as u128, k as u32)?;
    Ok(
        signed_congruence(n, k, upper, (n / 2) as i64).map(|(s, j)| IndexVector {
            indices: j,
            signs: Some(s),
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchClass {
    OddEvenPairMatched,
    OppositeSignPairMatched,
    /// Every value appears exactly twice but some pair violates the position/sign rule.
    PairMatchedOther,
    /// Some value appears exactly once.
    HasUnmatched,
    /// No singletons, some value appears three or more times.
    HasHigherOrderMatch,
}

/// Positions (0-based) of each distinct value.
fn positions(indices: &[usize]) -> HashMap<usize, Vec<usize>> {
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, &v) in indices.iter().enumerate() {
        map.entry(v).or_default().push(k);
    }
    map
}

fn classify_with(
    indices: &[usize],
    matched: impl Fn(usize, usize) -> bool,
    full: MatchClass,
) -> MatchClass {
    let pos = positions(indices);
    if pos.values().any(|p| p.len() == 1) {
        return MatchClass::HasUnmatched;
    }
    if pos.values().any(|p| p.len() > 2) {
        return MatchClass::HasHigherOrderMatch;
    }
    if pos.values().all(|p| matched(p[0], p[1])) {
        full
    } else {
        MatchClass::PairMatchedOther
    }
}

/// Whether `value` occurs exactly twice, once at an odd and once at an even
/// (1-based) position.
pub fn is_entry_odd_even_matched(v: &IndexVector, value: usize) -> bool {
    let p: Vec<usize> = v
        .indices
        .iter()
        .enumerate()
        .filter(|&(_, &x)| x == value)
        .map(|(k, _)| k)
        .collect();
    p.len() == 2 && p[0] % 2 != p[1] % 2
}

pub fn classify_odd_even(v: &IndexVector) -> MatchClass {
    classify_with(
        &v.indices,
        |a, b| a % 2 != b % 2,
        MatchClass::OddEvenPairMatched,
    )
}

fn signs_of(v: &IndexVector) -> Result<&[Sign]> {
    v.signs
        .as_deref()
        .ok_or_else(|| Error::invalid("opposite-sign classification needs a sign vector"))
}

/// Whether `value` occurs exactly twice and with opposite signs.
pub fn is_entry_opposite_sign_matched(v: &IndexVector, value: usize) -> Result<bool> {
    let signs = signs_of(v)?;
    let p: Vec<usize> = v
        .indices
        .iter()
        .enumerate()
        .filter(|&(_, &x)| x == value)
        .map(|(k, _)| k)
        .collect();
    Ok(p.len() == 2 && signs[p[0]] != signs[p[1]])
}

pub fn classify_opposite_sign(v: &IndexVector) -> Result<MatchClass> {
    let signs = signs_of(v)?;
    Ok(classify_with(
        &v.indices,
        |a, b| signs[a] != signs[b],
        MatchClass::OppositeSignPairMatched,
    ))
}

/// Number of odd-even pair matched vectors in `A_{2p}`, by enumeration.
pub fn count_odd_even_matched(n: usize, p: usize) -> Result<u128> {
    Ok(enumerate_a2p(n, p)?
        .filter(|v| classify_odd_even(v) == MatchClass::OddEvenPairMatched)
        .count() as u128)
}

/// `p! * n (n-1) ... (n-p+1)`.
pub fn odd_even_closed_form(n: usize, p: usize) -> u128 {
    let falling: u128 = (0..p)
        .map(|k| (n as u128).saturating_sub(k as u128))
        .product();
    crate::spectra::factorial(p as u32) * falling
}

/// Number of opposite-sign pair matched `(eps, j)` pairs in `C_{2p}`, by enumeration.
pub fn count_opposite_sign_matched(n: usize, p: usize) -> Result<u128> {
    let mut count = 0u128;
    for v in enumerate_ck(n, 2 * p)? {
        if classify_opposite_sign(&v)? == MatchClass::OppositeSignPairMatched {
            count += 1;
        }
    }
    Ok(count)
}

/// `(n^p / 2^p) * C(2p, p) * p!`, the leading-order size of the opposite-sign
/// matched set.
pub fn opposite_sign_asymptotic(n: usize, p: usize) -> f64 {
    let binom = binomial(2 * p as u64, p as u64);
    (n as f64 / 2.0).powi(p as i32) * binom as f64 * crate::spectra::factorial(p as u32) as f64
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `sum_J E[X_J]` over a stream of index tuples, with `E[X_J]` the product of
/// raw moments over the distinct values of `J` (values taken mod `n`).
fn expected_sum<I>(tuples: I, n: usize, moments: &dyn Fn(u32) -> BigRational) -> BigRational
where
    I: Iterator<Item = Vec<usize>>,
{
    // group by multiplicity signature, then weight once per signature
    let mut signatures: HashMap<Vec<u32>, u128> = HashMap::new();
    let mut counts: Vec<(usize, u32)> = Vec::new();
    for j in tuples {
        counts.clear();
        for &v in &j {
            let v = v % n;
            match counts.iter_mut().find(|(x, _)| *x == v) {
                Some((_, c)) => *c += 1,
                None => counts.push((v, 1)),
            }
        }
        let mut sig: Vec<u32> = counts.iter().map(|&(_, c)| c).collect();
        sig.sort_unstable();
        *signatures.entry(sig).or_default() += 1;
    }
    let mut total = BigRational::zero();
    for (sig, count) in signatures {
        let mut term = BigRational::from_integer(BigInt::from(count));
        for m in sig {
            term *= moments(m);
        }
        total += term;
    }
    total
}

fn signed_indices(
    n: usize,
    k: usize,
    upper: usize,
    target: i64,
) -> impl Iterator<Item = Vec<usize>> {
    signed_congruence(n, k, upper, target).map(|(_, j)| j)
}

/// Exact `E[(1/n) Tr(M^h)]` at finite `n`, for i.i.d. entries with raw moments
/// `moments(r) = E[X^r]`. Returned as `q * n^(e/2)`.
pub fn exact_expected_moment(
    kind: MatrixKind,
    n: usize,
    h: usize,
    moments: &dyn Fn(u32) -> BigRational,
) -> Result<SqrtScaled> {
    validate_n(n)?;
    if h == 0 {
        return Err(Error::invalid("moment order must be at least 1"));
    }
    let nn = n as u64;
    match kind {
        MatrixKind::Reverse => {
            if h.is_multiple_of(2) {
                let p = h / 2;
                check_budget("A_2p enumeration", n as u128, h as u32)?;
                let sum = expected_sum(alternating_congruence(n, 2 * p, 0), n, moments);
                // (1/n) * n^{-(p-1)} * sum
                Ok(SqrtScaled::new(sum, -(h as i32), nn))
            } else {
                let p = (h - 1) / 2;
                check_budget("A_(p,i) enumeration", n as u128, h as u32 + 1)?;
                let mut sum = BigRational::zero();
                for i in 1..=n {
                    sum += expected_sum(
                        alternating_congruence(n, 2 * p + 1, 2 * i as i64 - 1),
                        n,
                        moments,
                    );
                }
                // (1/n) * n^{-h/2} * sum
                Ok(SqrtScaled::new(sum, -(h as i32) - 2, nn))
            }
        }
        MatrixKind::Symmetric => {
            let mut sum = BigRational::zero();
            if n % 2 == 1 {
                let upper = n / 2;
                check_budget("C_k enumeration", 2 * upper as u128, h as u32)?;
                for k in 0..=h {
                    let inner = expected_sum(signed_indices(n, k, upper, 0), n, moments);
                    let c = BigRational::from_integer(BigInt::from(binomial(h as u64, k as u64)));
                    sum += c * moments((h - k) as u32) * inner;
                }
            } else {
                let upper = n / 2 - 1;
                check_budget("C_k enumeration", 2 * upper as u128, h as u32)?;
                for k in 0..=h {
                    let m = h - k;
                    // E[Y_k / 2] and E[Y~_k / 2] expand (X_0 +- X_{n/2})^m with
                    // independent X_0 and X_{n/2}
                    let mut half_y = BigRational::zero();
                    let mut half_y_tilde = BigRational::zero();
                    for r in 0..=m {
                        let t =
                            BigRational::from_integer(BigInt::from(binomial(m as u64, r as u64)))
                                * moments((m - r) as u32)
                                * moments(r as u32);
                        if r % 2 == 0 {
                            half_y += t;
                        } else {
                            half_y_tilde += t;
                        }
                    }
                    let c = BigRational::from_integer(BigInt::from(binomial(h as u64, k as u64)));
                    let a = expected_sum(signed_indices(n, k, upper, 0), n, moments);
                    let b = if half_y_tilde.is_zero() {
                        BigRational::zero()
                    } else {
                        expected_sum(signed_indices(n, k, upper, (n / 2) as i64), n, moments)
                    };
                    sum += c * (half_y * a + half_y_tilde * b);
                }
            }
            // (1/n) * n^{-(h-2)/2} * sum
            Ok(SqrtScaled::new(sum, -(h as i32), nn))
        }
    }
}

/// `exact_expected_moment` for an entry law.
pub fn exact_expected_moment_for(
    kind: MatrixKind,
    n: usize,
    h: usize,
    dist: &crate::entries::EntryDistribution,
) -> Result<SqrtScaled> {
    exact_expected_moment(kind, n, h, &|r| dist.raw_moment(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entries::{EntryDistribution, IntegerLaw};
    use crate::spectra::{limit_moment, LimitLaw};
    use num_traits::One;
    use std::collections::HashSet;

    fn brute_alternating(n: usize, len: usize, target: i64) -> HashSet<Vec<usize>> {
        odometer(len, 1, n)
            .filter(|j| rem(alternating_sum(j) - target, n) == 0)
            .collect()
    }

    #[test]
    fn odometer_counts() {
        assert_eq!(odometer(3, 1, 4).count(), 64);
        assert_eq!(odometer(0, 1, 4).count(), 1);
        assert_eq!(odometer(2, 0, 0).count(), 1);
    }

    #[test]
    fn a2p_small_cases() {
        let got: Vec<_> = enumerate_a2p(3, 1).unwrap().map(|v| v.indices).collect();
        assert_eq!(got, vec![vec![1, 1], vec![2, 2], vec![3, 3]]);
        for n in 1..9 {
            assert_eq!(enumerate_a2p(n, 1).unwrap().count(), n);
        }
        assert_eq!(enumerate_a2p(2, 2).unwrap().count(), 8);
    }

    #[test]
    fn a2p_cardinality_and_brute_force_agreement() {
        for n in 1..=6usize {
            for p in 1..=2usize {
                let got: HashSet<_> = enumerate_a2p(n, p).unwrap().map(|v| v.indices).collect();
                assert_eq!(got.len() as u128, (n as u128).pow(2 * p as u32 - 1));
                assert_eq!(got, brute_alternating(n, 2 * p, 0));
            }
        }
    }

    #[test]
    fn api_cases() {
        let got: Vec<_> = enumerate_api(2, 0, 1).unwrap().map(|v| v.indices).collect();
        assert_eq!(got, vec![vec![1]]);
        for n in 1..=4usize {
            for p in 0..=1usize {
                let total: usize = (1..=n)
                    .map(|i| enumerate_api(n, p, i).unwrap().count())
                    .sum();
                assert_eq!(total as u128, (n as u128).pow(2 * p as u32 + 1));
                for i in 1..=n {
                    let got: HashSet<_> =
                        enumerate_api(n, p, i).unwrap().map(|v| v.indices).collect();
                    assert_eq!(got, brute_alternating(n, 2 * p + 1, 2 * i as i64 - 1));
                }
            }
        }
        assert!(enumerate_api(3, 1, 0).is_err());
        assert!(enumerate_api(3, 1, 4).is_err());
    }

    #[test]
    fn api_disjoint_for_odd_n() {
        let a: HashSet<_> = enumerate_api(3, 1, 1).unwrap().map(|v| v.indices).collect();
        let b: HashSet<_> = enumerate_api(3, 1, 2).unwrap().map(|v| v.indices).collect();
        assert!(a.is_disjoint(&b));
        for n in [3usize, 5] {
            let mut union = HashSet::new();
            for i in 1..=n {
                for v in enumerate_api(n, 1, i).unwrap() {
                    assert!(union.insert(v.indices), "A_(p,i) overlap at n={n}");
                }
            }
            assert_eq!(union.len(), n.pow(3));
        }
    }

    fn brute_signed(
        n: usize,
        k: usize,
        upper: usize,
        target: i64,
    ) -> HashSet<(Vec<Sign>, Vec<usize>)> {
        let mut out = HashSet::new();
        for j in odometer(k, 1, upper) {
            for s in odometer(k, 0, 1) {
                let signs: Vec<Sign> = s
                    .iter()
                    .map(|&b| if b == 0 { Sign::Plus } else { Sign::Minus })
                    .collect();
                let sum: i64 = signs
                    .iter()
                    .zip(&j)
                    .map(|(e, &v)| e.value() * v as i64)
                    .sum();
                if rem(sum - target, n) == 0 {
                    out.insert((signs, j.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn ck_cases() {
        assert_eq!(enumerate_ck(5, 2).unwrap().count(), 4);
        for n in [3usize, 5, 7, 9, 11] {
            assert_eq!(enumerate_ck(n, 1).unwrap().count(), 0);
        }
        assert_eq!(enumerate_ck(5, 0).unwrap().count(), 1);
        assert_eq!(enumerate_ck_tilde(6, 1).unwrap().count(), 0);
        assert_eq!(enumerate_ck_tilde(6, 0).unwrap().count(), 0);
        assert!(enumerate_ck_tilde(5, 2).is_err());
    }

    #[test]
    fn ck_agrees_with_brute_force() {
        for n in 2..=8usize {
            for k in 0..=4usize {
                let got: HashSet<_> = enumerate_ck(n, k)
                    .unwrap()
                    .map(|v| (v.signs.unwrap(), v.indices))
                    .collect();
                assert_eq!(got, brute_signed(n, k, n / 2, 0), "n={n} k={k}");
                if n % 2 == 0 {
                    let got: HashSet<_> = enumerate_ck_tilde(n, k)
                        .unwrap()
                        .map(|v| (v.signs.unwrap(), v.indices))
                        .collect();
                    assert_eq!(got, brute_signed(n, k, n / 2 - 1, (n / 2) as i64));
                }
            }
        }
    }

    #[test]
    fn odd_even_classifier_examples() {
        let v = IndexVector::unsigned(vec![5, 5, 3, 4]);
        assert!(is_entry_odd_even_matched(&v, 5));
        assert_ne!(classify_odd_even(&v), MatchClass::OddEvenPairMatched);
        let w = IndexVector::unsigned(vec![5, 2, 5, 3]);
        assert!(!is_entry_odd_even_matched(&w, 5));
        assert_eq!(
            classify_odd_even(&IndexVector::unsigned(vec![7, 7])),
            MatchClass::OddEvenPairMatched
        );
        assert_eq!(
            classify_odd_even(&IndexVector::unsigned(vec![1, 2, 1, 2])),
            MatchClass::PairMatchedOther
        );
        assert_eq!(
            classify_odd_even(&IndexVector::unsigned(vec![1, 1, 1, 1])),
            MatchClass::HasHigherOrderMatch
        );
    }

    #[test]
    fn opposite_sign_classifier_examples() {
        use Sign::*;
        let v = IndexVector::signed(vec![3, 5, 8, 5], vec![Plus, Plus, Plus, Minus]).unwrap();
        assert!(is_entry_opposite_sign_matched(&v, 5).unwrap());
        let w = IndexVector::signed(vec![3, 5, 8, 5], vec![Plus, Plus, Plus, Plus]).unwrap();
        assert!(!is_entry_opposite_sign_matched(&w, 5).unwrap());
        let full = IndexVector::signed(vec![4, 4], vec![Plus, Minus]).unwrap();
        assert_eq!(
            classify_opposite_sign(&full).unwrap(),
            MatchClass::OppositeSignPairMatched
        );
        // a value appearing four times is never pair matched
        let quad = IndexVector::signed(vec![2, 2, 2, 2], vec![Plus, Minus, Plus, Minus]).unwrap();
        assert_eq!(
            classify_opposite_sign(&quad).unwrap(),
            MatchClass::HasHigherOrderMatch
        );
        assert!(classify_opposite_sign(&IndexVector::unsigned(vec![1, 1])).is_err());
    }

    #[test]
    fn odd_even_counts_match_closed_form() {
        assert_eq!(count_odd_even_matched(4, 1).unwrap(), 4);
        assert_eq!(count_odd_even_matched(4, 2).unwrap(), 24);
        for n in 1..=10usize {
            for p in 1..=3usize {
                assert_eq!(
                    count_odd_even_matched(n, p).unwrap(),
                    odd_even_closed_form(n, p)
                );
            }
        }
    }

    #[test]
    fn odd_even_ratio_tends_to_one() {
        let ratios: Vec<f64> = [8usize, 16, 32]
            .iter()
            .map(|&n| count_odd_even_matched(n, 2).unwrap() as f64 / (2.0 * (n * n) as f64))
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
        assert!(ratios[2] > 0.96);
    }

    #[test]
    fn matched_vectors_satisfy_congruence() {
        // classify over the whole product space == classify over A_2p
        for n in 2..=5usize {
            for p in 1..=2usize {
                let over_space = odometer(2 * p, 1, n)
                    .filter(|j| {
                        classify_odd_even(&IndexVector::unsigned(j.clone()))
                            == MatchClass::OddEvenPairMatched
                    })
                    .inspect(|j| assert_eq!(rem(alternating_sum(j), n), 0))
                    .count() as u128;
                assert_eq!(over_space, count_odd_even_matched(n, p).unwrap());
            }
        }
    }

    #[test]
    fn opposite_sign_counts() {
        assert_eq!(count_opposite_sign_matched(5, 1).unwrap(), 4);
        assert_eq!(count_opposite_sign_matched(7, 1).unwrap(), 6);
        assert!((opposite_sign_asymptotic(5, 1) - 5.0).abs() < 1e-12);
        let r = count_opposite_sign_matched(5, 1).unwrap() as f64 / opposite_sign_asymptotic(5, 1);
        assert!((r - 0.8).abs() < 1e-12);
        // closed form at odd n: 3 pairings x 4 sign orders x U (U-1), U = (n-1)/2
        for n in [5usize, 7, 9, 11] {
            let u = (n / 2) as u128;
            assert_eq!(count_opposite_sign_matched(n, 2).unwrap(), 12 * u * (u - 1));
        }
    }

    #[test]
    fn budget_refusal() {
        assert!(matches!(enumerate_a2p(200, 4), Err(Error::Resource { .. })));
        assert!(matches!(
            exact_expected_moment_for(MatrixKind::Reverse, 1000, 4, &EntryDistribution::Rademacher),
            Err(Error::Resource { .. })
        ));
    }

    fn rademacher(kind: MatrixKind, n: usize, h: usize) -> SqrtScaled {
        exact_expected_moment_for(kind, n, h, &EntryDistribution::Rademacher).unwrap()
    }

    #[test]
    fn second_moment_is_exactly_one() {
        for kind in MatrixKind::ALL {
            for n in 1..=12usize {
                for dist in [
                    EntryDistribution::Rademacher,
                    EntryDistribution::StandardGaussian,
                ] {
                    let v = exact_expected_moment_for(kind, n, 2, &dist).unwrap();
                    assert!(
                        v.exact_eq(&SqrtScaled::new(BigRational::one(), 0, n as u64)),
                        "{kind} n={n}: {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn rademacher_fourth_moment_counts_even_multiplicities() {
        let n = 4;
        let even = enumerate_a2p(n, 2)
            .unwrap()
            .filter(|v| {
                positions(&v.indices.iter().map(|j| j % n).collect::<Vec<_>>())
                    .values()
                    .all(|p| p.len() % 2 == 0)
            })
            .count();
        let expected = SqrtScaled::new(BigRational::new((even as i64).into(), 16.into()), 0, 4);
        assert!(rademacher(MatrixKind::Reverse, n, 4).exact_eq(&expected));
    }

    #[test]
    fn m1_limits_are_approached_monotonically() {
        for kind in MatrixKind::ALL {
            let law = LimitLaw::for_kind(kind);
            for h in [2usize, 4] {
                let gaps: Vec<f64> = [8usize, 16, 32, 64]
                    .iter()
                    .map(|&n| (rademacher(kind, n, h).to_f64() - limit_moment(law, h as u32)).abs())
                    .collect();
                assert!(
                    gaps.windows(2).all(|w| w[1] <= w[0] + 1e-15),
                    "{kind} h={h}: {gaps:?}"
                );
            }
        }
        assert!((rademacher(MatrixKind::Reverse, 32, 4).to_f64() - 2.0).abs() < 1e-12);
        assert!((rademacher(MatrixKind::Symmetric, 64, 4).to_f64() - 3.0).abs() < 0.1);
    }

    #[test]
    fn odd_moments_decay() {
        let skewed =
            EntryDistribution::IntegerTest(IntegerLaw::new(vec![(-1, 2), (2, 1)]).unwrap());
        for kind in MatrixKind::ALL {
            let vals: Vec<f64> = [5usize, 9, 17]
                .iter()
                .map(|&n| {
                    exact_expected_moment_for(kind, n, 3, &skewed)
                        .unwrap()
                        .to_f64()
                        .abs()
                })
                .collect();
            assert!(vals.iter().all(|v| *v > 0.0));
            // symmetric kind gains extra equilateral index triangles when 3 | n
            if kind == MatrixKind::Reverse {
                assert!(vals.windows(2).all(|w| w[1] < w[0]), "{kind}: {vals:?}");
            }
            for (&n, v) in [5usize, 9, 17].iter().zip(&vals) {
                assert!(v * (n as f64).sqrt() <= 4.0, "{kind} n={n}: {v}");
            }
        }
    }
}
