//! Seeded entry sequences `X_0, ..., X_{n-1}` for circulant-type matrices.
//!
//! Every supported law is centred with unit variance and has finite moments of
//! all orders, except the integer test law which is unscaled and exists so that
//! trace identities can be checked in exact arithmetic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite integer law given as `(value, weight)` pairs; probabilities are
/// `weight / total_weight`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerLaw {
    support: Vec<(i64, u32)>,
}

impl IntegerLaw {
    pub fn new(support: Vec<(i64, u32)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("integer law needs a nonempty support"));
        }
        if support.iter().any(|&(_, w)| w == 0) {
            return Err(Error::invalid("integer law weights must be positive"));
        }
        Ok(Self { support })
    }

    /// Equal weights on every listed value.
    pub fn uniform(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| (v, 1)).collect())
    }

    pub fn support(&self) -> &[(i64, u32)] {
        &self.support
    }

    fn total_weight(&self) -> u64 {
        self.support.iter().map(|&(_, w)| w as u64).sum()
    }
}

impl Default for IntegerLaw {
    fn default() -> Self {
        Self::uniform(&[-2, -1, 0, 1, 2]).expect("static support")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryDistribution {
    StandardGaussian,
    Rademacher,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    UniformSqrt3,
    IntegerTest(IntegerLaw),
}

impl EntryDistribution {
    pub fn tag(&self) -> &'static str {
        match self {
            EntryDistribution::StandardGaussian => "gaussian",
            EntryDistribution::Rademacher => "rademacher",
            EntryDistribution::UniformSqrt3 => "uniform",
            EntryDistribution::IntegerTest(_) => "integer",
        }
    }

    /// Exact raw moment `E[X^r]`.
    pub fn raw_moment(&self, r: u32) -> BigRational {
        if r == 0 {
            return BigRational::one();
        }
        match self {
            EntryDistribution::StandardGaussian => {
                if r % 2 == 1 {
                    BigRational::zero()
                } else {
                    // (r-1)!!
                    let mut acc = BigInt::one();
                    let mut k = r as i64 - 1;
                    while k > 1 {
                        acc *= k;
                        k -= 2;
                    }
                    BigRational::from_integer(acc)
                }
            }
            EntryDistribution::Rademacher => {
                if r % 2 == 1 {
                    BigRational::zero()
                } else {
                    BigRational::one()
                }
            }
            EntryDistribution::UniformSqrt3 => {
                if r % 2 == 1 {
                    BigRational::zero()
                } else {
                    let num = num_traits::pow(BigInt::from(3), (r / 2) as usize);
                    BigRational::new(num, BigInt::from(r + 1))
                }
            }
            EntryDistribution::IntegerTest(law) => {
                let mut num = BigInt::zero();
                for &(v, w) in &law.support {
                    num += num_traits::pow(BigInt::from(v), r as usize) * BigInt::from(w);
                }
                BigRational::new(num, BigInt::from(law.total_weight()))
            }
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, EntryDistribution::IntegerTest(_))
    }

    fn draw(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            EntryDistribution::StandardGaussian => (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
            EntryDistribution::Rademacher => (0..n)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect(),
            EntryDistribution::UniformSqrt3 => {
                let a = 3f64.sqrt();
                (0..n).map(|_| rng.random_range(-a..a)).collect()
            }
            EntryDistribution::IntegerTest(law) => {
                let index = WeightedIndex::new(law.support.iter().map(|&(_, w)| w))
                    .expect("validated weights");
                (0..n)
                    .map(|_| law.support[index.sample(rng)].0 as f64)
                    .collect()
            }
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryDistribution::IntegerTest(law) => {
                write!(f, "integer:")?;
                for (k, (v, w)) in law.support.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    if *w == 1 {
                        write!(f, "{v}")?;
                    } else {
                        write!(f, "{v}*{w}")?;
                    }
                }
                Ok(())
            }
            other => f.write_str(other.tag()),
        }
    }
}

impl FromStr for EntryDistribution {
    type Err = Error;

    /// Accepts `gaussian`, `rademacher`, `uniform`, `integer` (support -2..=2)
    /// and `integer:v1,v2*w2,...` with optional integer weights.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" | "standard-gaussian" | "normal" => Ok(Self::StandardGaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" | "uniform-sqrt3" => Ok(Self::UniformSqrt3),
            "integer" | "integer-test" => Ok(Self::IntegerTest(IntegerLaw::default())),
            other => {
                let Some(listing) = other
                    .strip_prefix("integer:")
                    .or_else(|| other.strip_prefix("integer-test:"))
                else {
                    return Err(Error::invalid(format!("unknown distribution '{other}'")));
                };
                let mut support = Vec::new();
                for item in listing.split(',').filter(|t| !t.trim().is_empty()) {
                    let (v, w) = match item.split_once('*') {
                        Some((v, w)) => (v, w),
                        None => (item, "1"),
                    };
                    let v: i64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad support value '{v}'")))?;
                    let w: u32 = w
                        .trim()
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad weight '{w}'")))?;
                    support.push((v, w));
                }
                Ok(Self::IntegerTest(IntegerLaw::new(support)?))
            }
        }
    }
}

/// Where an entry sequence came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EntrySource {
    Sampled {
        distribution: EntryDistribution,
        seed: u64,
    },
    Explicit,
}

/// Unscaled entries `X_0, ..., X_{n-1}`. The `1/sqrt(n)` factor is applied by
/// the matrix accessors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySequence {
    values: Vec<f64>,
    source: EntrySource,
}

impl EntrySequence {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        Ok(Self {
            values,
            source: EntrySource::Explicit,
        })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::from_values(values.iter().map(|&v| v as f64).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> &EntrySource {
        &self.source
    }

    pub fn distribution(&self) -> Option<&EntryDistribution> {
        match &self.source {
            EntrySource::Sampled { distribution, .. } => Some(distribution),
            EntrySource::Explicit => None,
        }
    }

    /// The values as exact integers, if every value is integral and fits in `i64`.
    pub fn integer_values(&self) -> Option<Vec<i64>> {
        self.values
            .iter()
            .map(|&v| {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Some(v as i64)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Draws `n` independent entries from `dist`; deterministic in `(dist, n, seed)`.
pub fn sample_entries(dist: &EntryDistribution, n: usize, seed: u64) -> Result<EntrySequence> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(EntrySequence {
        values: dist.draw(n, &mut rng),
        source: EntrySource::Sampled {
            distribution: dist.clone(),
            seed,
        },
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and a path of
/// integer coordinates (trial index, matrix label, ...). Order-sensitive in the
/// path, independent of evaluation order.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p.wrapping_add(0x632b_e59b_d9b4_e019)))
    })
}
