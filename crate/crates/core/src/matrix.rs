//! Reverse circulant and symmetric circulant matrices defined by index maps.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::entries::EntrySequence;
use crate::error::{Error, Result};

/// Largest dimension `materialize` will build by default.
pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    /// `(i, j) -> X_{(i+j-1) mod n}`; each row is the previous one rotated left.
    Reverse,
    /// `(i, j) -> X_{min(|i-j|, n-|i-j|)}`; each row is the previous one rotated right.
    Symmetric,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 2] = [MatrixKind::Reverse, MatrixKind::Symmetric];

    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Reverse => "reverse",
            MatrixKind::Symmetric => "symmetric",
        }
    }

    /// Position in `X_0..X_{n-1}` feeding entry `(i, j)` (1-based `i`, `j`).
    #[inline]
    pub fn source_index(self, n: usize, i: usize, j: usize) -> usize {
        match self {
            MatrixKind::Reverse => (i + j - 1) % n,
            MatrixKind::Symmetric => {
                let d = i.abs_diff(j);
                d.min(n - d)
            }
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reverse" | "rc" | "reverse-circulant" => Ok(MatrixKind::Reverse),
            "symmetric" | "sc" | "symmetric-circulant" => Ok(MatrixKind::Symmetric),
            other => Err(Error::invalid(format!("unknown matrix kind '{other}'"))),
        }
    }
}

/// An `n x n` circulant-type matrix with entries `X_k / sqrt(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantMatrix {
    kind: MatrixKind,
    entries: EntrySequence,
}

impl CirculantMatrix {
    pub fn new(kind: MatrixKind, entries: EntrySequence) -> Self {
        Self { kind, entries }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.entries.n()
    }

    pub fn entries(&self) -> &EntrySequence {
        &self.entries
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        Ok(())
    }

    /// Entry `(i, j)` without the `1/sqrt(n)` factor; 1-based indices.
    pub fn unscaled_entry(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i, j)?;
        Ok(self.entries.values()[self.kind.source_index(self.n(), i, j)])
    }

    /// Entry `(i, j)` of the scaled matrix; 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.unscaled_entry(i, j)? / (self.n() as f64).sqrt())
    }

    pub fn materialize(&self) -> Result<DMatrix<f64>> {
        self.materialize_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<DMatrix<f64>> {
        let n = self.n();
        if n > cap {
            return Err(Error::Resource {
                what: "dense materialization",
                requested: n as u128,
                limit: cap as u128,
            });
        }
        let scale = 1.0 / (n as f64).sqrt();
        let x = self.entries.values();
        Ok(DMatrix::from_fn(n, n, |r, c| {
            x[self.kind.source_index(n, r + 1, c + 1)] * scale
        }))
    }
}
