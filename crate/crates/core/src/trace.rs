//! Closed trace formulas for products of reverse circulant matrices and powers
//! of symmetric circulant matrices, checked against direct matrix products.
//!
//! Every formula is evaluated on the unscaled entries and carries the
//! `n^(-h/2)` normalisation as an exponent of `sqrt(n)`, so integer inputs give
//! exact results.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::combinatorics::{alternating_congruence, binomial, check_budget, signed_congruence};
use crate::entries::{derive_seed, sample_entries, EntryDistribution, EntrySequence, IntegerLaw};
use crate::error::{Error, Result};
use crate::exact::{SqrtScaled, TraceScalar};
use crate::matrix::{CirculantMatrix, MatrixKind};

/// `sum * n^(half_exponent / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled<T> {
    pub sum: T,
    pub half_exponent: i32,
}

impl Scaled<f64> {
    pub fn value(&self, n: usize) -> f64 {
        self.sum * (n as f64).powf(self.half_exponent as f64 / 2.0)
    }
}

impl Scaled<BigInt> {
    pub fn exact(&self, n: usize) -> SqrtScaled {
        SqrtScaled::from_integer(self.sum.clone(), self.half_exponent, n as u64)
    }
}

fn product<T: TraceScalar>(factors: &[&[T]], j: &[usize], n: usize) -> T {
    factors
        .iter()
        .zip(j)
        .fold(T::one(), |acc, (x, &idx)| acc * x[idx % n].clone())
}

/// Reverse circulant product trace by the `A_{2p}` / `A_{p,i}` formula.
/// `factors[r]` holds the unscaled entries of the `r`-th matrix.
pub fn rc_formula<T: TraceScalar>(n: usize, factors: &[&[T]]) -> Result<Scaled<T>> {
    let h = check_factors(n, factors)?;
    check_budget("reverse trace formula", n as u128, h as u32)?;
    if h % 2 == 0 {
        let mut sum = T::zero();
        for j in alternating_congruence(n, h, 0) {
            sum = sum + product(factors, &j, n);
        }
        // n^{-(p-1)}
        Ok(Scaled {
            sum,
            half_exponent: 2 - h as i32,
        })
    } else {
        let mut sum = T::zero();
        for i in 1..=n {
            for j in alternating_congruence(n, h, 2 * i as i64 - 1) {
                sum = sum + product(factors, &j, n);
            }
        }
        // n^{-(2p+1)/2}
        Ok(Scaled {
            sum,
            half_exponent: -(h as i32),
        })
    }
}

fn signed_sum<T: TraceScalar>(n: usize, factors: &[&[T]], upper: usize, target: i64) -> T {
    let k = factors.len();
    let mut sum = T::zero();
    for (_, j) in signed_congruence(n, k, upper, target) {
        sum = sum + product(factors, &j, n);
    }
    sum
}

fn power<T: TraceScalar>(x: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x.clone())
}

/// `Tr(SC^p)` by the binomial `C_k` formula (odd `n`) or the `Y_k`, `Y~_k`
/// formula (even `n`). For even `n` the index range of `C_k` is `1..=n/2-1`,
/// since `X_{n/2}` enters only through `Y_k` and `Y~_k`.
pub fn sc_power_formula<T: TraceScalar>(n: usize, x: &[T], p: usize) -> Result<Scaled<T>> {
    if x.len() != n || n == 0 {
        return Err(Error::invalid("entry length does not match n"));
    }
    if p == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    let upper = if n % 2 == 1 { n / 2 } else { n / 2 - 1 };
    check_budget("symmetric trace formula", 2 * upper as u128, p as u32)?;
    let x0 = &x[0];
    let mut sum = T::zero();
    for k in 0..=p {
        let factors: Vec<&[T]> = vec![x; k];
        let c = T::from_i64(binomial(p as u64, k as u64) as i64);
        let m = p - k;
        if n % 2 == 1 {
            let inner = signed_sum(n, &factors, upper, 0);
            sum = sum + c * power(x0, m) * inner;
        } else {
            let xh = &x[n / 2];
            // Y_k / 2 keeps the even powers of X_{n/2}, Y~_k / 2 the odd ones
            let mut half_y = T::zero();
            let mut half_y_tilde = T::zero();
            for r in 0..=m {
                let t = T::from_i64(binomial(m as u64, r as u64) as i64)
                    * power(x0, m - r)
                    * power(xh, r);
                if r % 2 == 0 {
                    half_y = half_y + t;
                } else {
                    half_y_tilde = half_y_tilde + t;
                }
            }
            let a = signed_sum(n, &factors, upper, 0);
            let b = signed_sum(n, &factors, upper, (n / 2) as i64);
            sum = sum + c * (half_y * a + half_y_tilde * b);
        }
    }
    // n^{-(p-2)/2}
    Ok(Scaled {
        sum,
        half_exponent: 2 - p as i32,
    })
}

/// Main term `n^{-p/2} sum_{C_p} X^(1)_{j_1} ... X^(p)_{j_p}` of
/// `(1/n) Tr(SC^(1) ... SC^(p))`, with `C_p` over `1..=floor(n/2)`.
pub fn sc_compact_main<T: TraceScalar>(n: usize, factors: &[&[T]]) -> Result<Scaled<T>> {
    let p = check_factors(n, factors)?;
    check_budget("compact symmetric formula", 2 * (n / 2) as u128, p as u32)?;
    Ok(Scaled {
        sum: signed_sum(n, factors, n / 2, 0),
        half_exponent: -(p as i32),
    })
}

/// `Tr(M_1 ... M_h)` of the unscaled matrices by dense multiplication.
pub fn direct_trace<T: TraceScalar>(
    kind: MatrixKind,
    n: usize,
    factors: &[&[T]],
) -> Result<Scaled<T>> {
    let h = check_factors(n, factors)?;
    let build = |x: &[T]| -> Vec<Vec<T>> {
        (1..=n)
            .map(|i| {
                (1..=n)
                    .map(|j| x[kind.source_index(n, i, j)].clone())
                    .collect()
            })
            .collect()
    };
    let mut acc = build(factors[0]);
    for x in &factors[1..] {
        let b = build(x);
        let mut next = vec![vec![T::zero(); n]; n];
        for (i, row) in acc.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, bk) in b[k].iter().enumerate() {
                    next[i][j] = next[i][j].clone() + a.clone() * bk.clone();
                }
            }
        }
        acc = next;
    }
    let sum = (0..n).fold(T::zero(), |s, i| s + acc[i][i].clone());
    Ok(Scaled {
        sum,
        half_exponent: -(h as i32),
    })
}

fn check_factors<T>(n: usize, factors: &[&[T]]) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    if factors.is_empty() {
        return Err(Error::invalid("need at least one matrix"));
    }
    if factors.iter().any(|x| x.len() != n) {
        return Err(Error::invalid("matrices must share the dimension n"));
    }
    Ok(factors.len())
}

fn common_n(matrices: &[&CirculantMatrix], kind: MatrixKind) -> Result<usize> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::invalid("need at least one matrix"))?;
    let n = first.n();
    for m in matrices {
        if m.n() != n {
            return Err(Error::invalid("matrices must share the dimension n"));
        }
        if m.kind() != kind {
            return Err(Error::invalid(format!(
                "expected {kind} circulant matrices"
            )));
        }
    }
    Ok(n)
}

fn integer_entries(m: &CirculantMatrix) -> Result<Vec<BigInt>> {
    m.entries()
        .integer_values()
        .map(|v| v.into_iter().map(BigInt::from).collect())
        .ok_or_else(|| Error::invalid("exact evaluation needs integer entries"))
}

/// `Tr(RC^(1) ... RC^(h))` of the scaled matrices, via the formula.
pub fn trace_rc_product(matrices: &[&CirculantMatrix]) -> Result<f64> {
    let n = common_n(matrices, MatrixKind::Reverse)?;
    let factors: Vec<&[f64]> = matrices.iter().map(|m| m.entries().values()).collect();
    Ok(rc_formula(n, &factors)?.value(n))
}

/// Exact version of [`trace_rc_product`] for integer entries.
pub fn trace_rc_product_exact(matrices: &[&CirculantMatrix]) -> Result<SqrtScaled> {
    let n = common_n(matrices, MatrixKind::Reverse)?;
    let ints = matrices
        .iter()
        .map(|m| integer_entries(m))
        .collect::<Result<Vec<_>>>()?;
    let factors: Vec<&[BigInt]> = ints.iter().map(|v| v.as_slice()).collect();
    Ok(rc_formula(n, &factors)?.exact(n))
}

/// `Tr(SC^p)` of the scaled matrix, via the formula.
pub fn trace_sc_power(m: &CirculantMatrix, p: usize) -> Result<f64> {
    let n = common_n(&[m], MatrixKind::Symmetric)?;
    Ok(sc_power_formula(n, m.entries().values(), p)?.value(n))
}

pub fn trace_sc_power_exact(m: &CirculantMatrix, p: usize) -> Result<SqrtScaled> {
    let n = common_n(&[m], MatrixKind::Symmetric)?;
    let x = integer_entries(m)?;
    Ok(sc_power_formula(n, &x, p)?.exact(n))
}

/// `(main_term, remainder)` with `main_term + remainder = (1/n) Tr(SC^(1) ... SC^(p))`.
pub fn trace_sc_product_compact(matrices: &[&CirculantMatrix]) -> Result<(f64, f64)> {
    let n = common_n(matrices, MatrixKind::Symmetric)?;
    let factors: Vec<&[f64]> = matrices.iter().map(|m| m.entries().values()).collect();
    let main = sc_compact_main(n, &factors)?.value(n);
    let direct = direct_trace(MatrixKind::Symmetric, n, &factors)?.value(n) / n as f64;
    Ok((main, direct - main))
}

/// Exact `(main_term, remainder)` for integer entries.
pub fn trace_sc_product_compact_exact(
    matrices: &[&CirculantMatrix],
) -> Result<(SqrtScaled, SqrtScaled)> {
    let n = common_n(matrices, MatrixKind::Symmetric)?;
    let ints = matrices
        .iter()
        .map(|m| integer_entries(m))
        .collect::<Result<Vec<_>>>()?;
    let factors: Vec<&[BigInt]> = ints.iter().map(|v| v.as_slice()).collect();
    let main = sc_compact_main(n, &factors)?;
    let direct = direct_trace(MatrixKind::Symmetric, n, &factors)?;
    let p = factors.len() as i32;
    // direct / n = D n^{-(p+2)/2}; main = S n^{-p/2} = (n S) n^{-(p+2)/2}
    let remainder = &direct.sum - BigInt::from(n) * &main.sum;
    Ok((
        main.exact(n),
        SqrtScaled::from_integer(remainder, -p - 2, n as u64),
    ))
}

/// One formula-versus-direct comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TraceComparison {
    pub kind: MatrixKind,
    pub n: usize,
    pub h: usize,
    pub formula_value: f64,
    pub direct_value: f64,
    pub abs_diff: f64,
    /// Equality in exact arithmetic.
    pub exact_equal: bool,
}

/// Integer law used by [`verify_trace`].
pub fn verification_law() -> EntryDistribution {
    EntryDistribution::IntegerTest(IntegerLaw::uniform(&[-3, -2, -1, 0, 1, 2, 3]).expect("static"))
}

/// Draws integer entries from `seed` and compares formula and direct traces
/// exactly. Reverse kind uses `h` independent matrices, symmetric kind the
/// `h`-th power of one matrix.
pub fn verify_trace(kind: MatrixKind, n: usize, h: usize, seed: u64) -> Result<TraceComparison> {
    verify_trace_with(kind, n, h, &verification_law(), seed)
}

/// [`verify_trace`] with entries drawn from an integer-valued `law`.
pub fn verify_trace_with(
    kind: MatrixKind,
    n: usize,
    h: usize,
    law: &EntryDistribution,
    seed: u64,
) -> Result<TraceComparison> {
    if h == 0 {
        return Err(Error::invalid("h must be at least 1"));
    }
    if !law.is_integer() {
        return Err(Error::invalid(format!(
            "exact verification needs integer entries, got {law}"
        )));
    }
    let draw = |label: u64| -> Result<Vec<BigInt>> {
        let x: EntrySequence = sample_entries(law, n, derive_seed(seed, &[label]))?;
        Ok(x.integer_values()
            .expect("integer law")
            .into_iter()
            .map(BigInt::from)
            .collect())
    };
    let (formula, direct) = match kind {
        MatrixKind::Reverse => {
            let xs = (0..h as u64).map(draw).collect::<Result<Vec<_>>>()?;
            let factors: Vec<&[BigInt]> = xs.iter().map(|v| v.as_slice()).collect();
            (
                rc_formula(n, &factors)?.exact(n),
                direct_trace(kind, n, &factors)?.exact(n),
            )
        }
        MatrixKind::Symmetric => {
            let x = draw(0)?;
            let factors: Vec<&[BigInt]> = vec![&x; h];
            (
                sc_power_formula(n, &x, h)?.exact(n),
                direct_trace(kind, n, &factors)?.exact(n),
            )
        }
    };
    let exact_equal = formula.exact_eq(&direct);
    Ok(TraceComparison {
        kind,
        n,
        h,
        formula_value: formula.to_f64(),
        direct_value: direct.to_f64(),
        abs_diff: formula.abs_diff_f64(&direct),
        exact_equal,
    })
}

/// Exact rational value, when the half-exponent is even.
pub fn as_rational(v: &SqrtScaled) -> Option<BigRational> {
    if v.half_exponent % 2 != 0 && !v.coeff.is_zero() {
        return None;
    }
    let whole = v.half_exponent / 2;
    let n = BigInt::from(v.n);
    Some(if whole >= 0 {
        &v.coeff * BigRational::from_integer(num_traits::pow(n, whole as usize))
    } else {
        &v.coeff / BigRational::from_integer(num_traits::pow(n, (-whole) as usize))
    })
}
