//! Fourier-domain description of circulant-type matrices.
//!
//! With `f_t = (w^{t k})_k`, `w = exp(2 pi i / n)`, a symmetric circulant matrix
//! acts as `f_t -> mu_t f_t` and a reverse circulant matrix as
//! `f_t -> mu_{-t} f_{-t}`. Both spectra and traces of words in independent
//! matrices of one kind follow from the per-matrix symbol `mu`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::entries::EntrySequence;
use crate::matrix::MatrixKind;

/// Symbol `mu_0..mu_{n-1}` of the scaled matrix built from `x`.
pub fn symbol(kind: MatrixKind, x: &EntrySequence) -> Vec<Complex64> {
    let n = x.n();
    let scale = 1.0 / (n as f64).sqrt();
    let mut buf: Vec<Complex64> = match kind {
        // first row c_m = X_{min(m, n-m)}
        MatrixKind::Symmetric => (0..n)
            .map(|m| Complex64::new(x.values()[m.min(n - m)] * scale, 0.0))
            .collect(),
        MatrixKind::Reverse => x
            .values()
            .iter()
            .map(|&v| Complex64::new(v * scale, 0.0))
            .collect(),
    };
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    match kind {
        MatrixKind::Symmetric => {
            // even first row: the transform is real
            for v in buf.iter_mut() {
                v.im = 0.0;
            }
        }
        MatrixKind::Reverse => {
            // mu_t = w^t * sum_s X_s w^{-t s}
            for (t, v) in buf.iter_mut().enumerate() {
                let angle = 2.0 * std::f64::consts::PI * t as f64 / n as f64;
                *v *= Complex64::from_polar(1.0, angle);
            }
        }
    }
    buf
}

/// Real eigenvalues (unsorted) from a symbol.
pub fn eigenvalues_from_symbol(kind: MatrixKind, mu: &[Complex64]) -> Vec<f64> {
    let n = mu.len();
    match kind {
        MatrixKind::Symmetric => mu.iter().map(|v| v.re).collect(),
        MatrixKind::Reverse => {
            // on span{f_t, f_-t} the matrix is [[0, mu_t], [mu_-t, 0]]
            let mut out = Vec::with_capacity(n);
            out.push(mu[0].re);
            if n.is_multiple_of(2) {
                out.push(mu[n / 2].re);
            }
            for t in 1..n.div_ceil(2) {
                let r = (mu[t] * mu[n - t]).re.max(0.0).sqrt();
                out.push(r);
                out.push(-r);
            }
            out
        }
    }
}

/// `Tr(M_{word[0]} M_{word[1]} ... M_{word[h-1]})` where `symbols[l]` is the
/// symbol of matrix `l`; every matrix has the given kind.
pub fn word_trace(kind: MatrixKind, symbols: &[Vec<Complex64>], word: &[usize]) -> f64 {
    let Some(first) = symbols.first() else {
        return 0.0;
    };
    let n = first.len();
    match kind {
        MatrixKind::Symmetric => (0..n)
            .map(|t| word.iter().map(|&l| symbols[l][t].re).product::<f64>())
            .sum(),
        MatrixKind::Reverse => {
            let mut total = Complex64::new(0.0, 0.0);
            for t in 0..n {
                // the rightmost factor acts first
                let mut mode = t;
                let mut coeff = Complex64::new(1.0, 0.0);
                for &l in word.iter().rev() {
                    let flipped = (n - mode) % n;
                    coeff *= symbols[l][flipped];
                    mode = flipped;
                }
                if mode == t {
                    total += coeff;
                }
            }
            total.re
        }
    }
}
