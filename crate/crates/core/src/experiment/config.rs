use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::entries::EntryDistribution;
use crate::error::{Error, Result};
use crate::joint::Monomial;
use crate::matrix::MatrixKind;

/// Smallest trial count accepted by the fourth-moment decay command.
pub const M3_MIN_TRIALS: usize = 200;
pub const DEFAULT_BINS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Lsd,
    M3,
    TraceVerify,
    Combinatorics,
    Joint,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Lsd => "lsd",
            Command::M3 => "m3",
            Command::TraceVerify => "trace-verify",
            Command::Combinatorics => "combinatorics",
            Command::Joint => "joint",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

/// Optional settings from flags or a TOML file. Every field is optional so two
/// layers can be merged with [`ConfigOverrides::or`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub kind: Option<String>,
    pub n: Option<Vec<usize>>,
    pub h: Option<Vec<u32>>,
    pub dist: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub bins: Option<usize>,
    pub threshold: Option<f64>,
    pub words: Option<Vec<String>>,
}

impl ConfigOverrides {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fields set in `self` win over `lower`.
    pub fn or(self, lower: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            kind: self.kind.or(lower.kind),
            n: self.n.or(lower.n),
            h: self.h.or(lower.h),
            dist: self.dist.or(lower.dist),
            trials: self.trials.or(lower.trials),
            seed: self.seed.or(lower.seed),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
            bins: self.bins.or(lower.bins),
            threshold: self.threshold.or(lower.threshold),
            words: self.words.or(lower.words),
        }
    }
}

fn display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_all<T: fmt::Display, S: Serializer>(
    v: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub kinds: Vec<MatrixKind>,
    pub n: Vec<usize>,
    /// Moment orders; for `combinatorics` these are the half-lengths `p`.
    pub h: Vec<u32>,
    #[serde(serialize_with = "display")]
    pub dist: EntryDistribution,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub bins: usize,
    pub threshold: f64,
    #[serde(serialize_with = "display_all")]
    pub words: Vec<Monomial>,
}

/// Parses `2,4,8` and inclusive ranges such as `2..8` or `2-8`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::invalid(format!("bad list '{s}'"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let range = item
            .split_once("..=")
            .or_else(|| item.split_once(".."))
            .or_else(|| item.split_once('-'));
        match range {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_kinds(s: &str) -> Result<Vec<MatrixKind>> {
    match s.trim() {
        "both" | "all" => Ok(MatrixKind::ALL.to_vec()),
        other => other.split(',').map(str::parse).collect(),
    }
}

fn default_words(kinds: &[MatrixKind]) -> Vec<&'static str> {
    let mut words = Vec::new();
    if kinds.contains(&MatrixKind::Reverse) {
        words.extend(["1,2,2,1", "1,2,1,2", "1,1,1,1"]);
    }
    if kinds.contains(&MatrixKind::Symmetric) {
        for w in ["1,2,1,2", "1,1,1,1"] {
            if !words.contains(&w) {
                words.push(w);
            }
        }
    }
    words
}

impl ExperimentConfig {
    /// Fills unset fields with the command's defaults and validates.
    pub fn resolve(command: Command, o: ConfigOverrides) -> Result<Self> {
        let kinds = match &o.kind {
            Some(k) => parse_kinds(k)?,
            None => MatrixKind::ALL.to_vec(),
        };
        let (n, h, trials, threshold): (Vec<usize>, Vec<u32>, usize, f64) = match command {
            Command::Lsd => (vec![2000], vec![2, 3, 4, 6], 50, 0.03),
            Command::M3 => (vec![64, 128, 256, 512], vec![2], 500, -1.0),
            Command::TraceVerify => ((2..=8).collect(), (1..=5).collect(), 10, 0.0),
            Command::Combinatorics => (vec![4], vec![1, 2], 1, 0.7),
            Command::Joint => (vec![500], vec![], 200, 3.0),
        };
        let words = match &o.words {
            Some(ws) => ws
                .iter()
                .map(|w| w.parse())
                .collect::<Result<Vec<Monomial>>>()?,
            None if command == Command::Joint => default_words(&kinds)
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<Monomial>>>()?,
            None => Vec::new(),
        };
        let format = match (&o.format, &o.out) {
            (Some(f), _) => f.parse()?,
            (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        };
        let dist = match &o.dist {
            Some(d) => d.parse()?,
            None if command == Command::TraceVerify => crate::trace::verification_law(),
            None => EntryDistribution::StandardGaussian,
        };
        let cfg = ExperimentConfig {
            command,
            kinds,
            n: o.n.unwrap_or(n),
            h: o.h.unwrap_or(h),
            dist,
            trials: o.trials.unwrap_or(trials),
            seed: o.seed.unwrap_or(0),
            out: o.out,
            format,
            bins: o.bins.unwrap_or(DEFAULT_BINS),
            threshold: o.threshold.unwrap_or(threshold),
            words,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::invalid("no matrix kind selected"));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::invalid("n values must be positive"));
        }
        if self.h.contains(&0) {
            return Err(Error::invalid("h values must be positive"));
        }
        if self.command != Command::Joint && self.h.is_empty() {
            return Err(Error::invalid("at least one h value is required"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.command == Command::M3 && self.trials < M3_MIN_TRIALS {
            return Err(Error::invalid(format!(
                "m3 needs at least {M3_MIN_TRIALS} trials, got {}",
                self.trials
            )));
        }
        if self.bins == 0 {
            return Err(Error::invalid("bins must be positive"));
        }
        if !self.threshold.is_finite() {
            return Err(Error::invalid("threshold must be finite"));
        }
        if self.command == Command::TraceVerify && !self.dist.is_integer() {
            return Err(Error::invalid("trace-verify needs an integer entry law"));
        }
        if self.command == Command::Joint && self.words.is_empty() {
            return Err(Error::invalid("joint needs at least one word"));
        }
        Ok(())
    }
}
