//! Experiment configuration: a line-oriented `key = value` file, overridden
//! key by key from the command line.
//!
//! ```text
//! # u1 on the L-shape, both algorithms
//! target = u1
//! alg = both
//! max_leaves = 100000
//! quadrature = adaptive
//! tol = 1e-9
//! stride = 10
//! out = results/u1
//! ```
//!
//! Keys:
//!
//! | key            | values                                  | default      |
//! |----------------|-----------------------------------------|--------------|
//! | `target`       | `u1`, `u2`, `affine`, `xsq`             | `u1`         |
//! | `alg`          | `alg1`, `alg2`, `both`                  | `both`       |
//! | `iters`        | iterations (stopping rule)              | `1000`       |
//! | `max_leaves`   | leaf count (stopping rule)              |              |
//! | `err_below`    | global error threshold (stopping rule)  |              |
//! | `stop`         | `indicator_zero` (stopping rule)        |              |
//! | `cap`          | iteration cap                           | `10000000`   |
//! | `quadrature`   | `adaptive`, `plain`                     | `adaptive`   |
//! | `tol`          | adaptive quadrature tolerance           | `1e-9`       |
//! | `max_depth`    | adaptive doubling levels                | `8`          |
//! | `near_factor`  | point-locus proximity in diameters      | `2`          |
//! | `stride`       | checkpoint stride                       | `10`         |
//! | `out`          | output directory                        | `out`        |
//! | `oracle_depth` | complexity enumerated by `certify`      | `8`          |
//! | `state_cap`    | enumeration state cap                   | `10000000`   |
//!
//! The stopping-rule keys are mutually exclusive; the last one given wins.

use std::path::PathBuf;
use std::str::FromStr;

use crate::indicators::{Algorithm, StoppingRule, DEFAULT_ITERATION_CAP};
use crate::local_error::{target_by_name, QuadratureMode, QuadratureSettings};
use crate::oracle::DEFAULT_STATE_CAP;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmChoice {
    One(Algorithm),
    Both,
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::One(a) => vec![a],
            AlgorithmChoice::Both => vec![Algorithm::Conforming, Algorithm::Simple],
        }
    }
}

impl FromStr for AlgorithmChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "both" {
            Ok(AlgorithmChoice::Both)
        } else {
            s.parse().map(AlgorithmChoice::One)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub target: String,
    pub algorithm: AlgorithmChoice,
    pub stopping: StoppingRule,
    pub iteration_cap: usize,
    pub quadrature: QuadratureSettings,
    pub stride: usize,
    pub output_dir: PathBuf,
    pub oracle_depth: usize,
    pub state_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            target: "u1".into(),
            algorithm: AlgorithmChoice::Both,
            stopping: StoppingRule::MaxIterations(1000),
            iteration_cap: DEFAULT_ITERATION_CAP,
            quadrature: QuadratureSettings::default(),
            stride: 10,
            output_dir: PathBuf::from("out"),
            oracle_depth: 8,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{value}`")))
}

impl ExperimentConfig {
    /// Parses a configuration file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse { line: i + 1, message: format!("expected `key = value`, got `{line}`") });
            };
            config.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(message) => Error::Parse { line: i + 1, message },
                other => other,
            })?;
        }
        Ok(config)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "target" => {
                target_by_name(value)?;
                self.target = value.to_string();
            }
            "alg" => self.algorithm = value.parse()?,
            "iters" => self.stopping = StoppingRule::MaxIterations(number(key, value)?),
            "max_leaves" => self.stopping = StoppingRule::MaxLeaves(number(key, value)?),
            "err_below" => self.stopping = StoppingRule::ErrorBelow(number(key, value)?),
            "stop" => match value {
                "indicator_zero" => self.stopping = StoppingRule::IndicatorZero,
                _ => return Err(Error::Config(format!("unknown stopping rule `{value}`"))),
            },
            "cap" => self.iteration_cap = number(key, value)?,
            "quadrature" => {
                self.quadrature.mode = match (value, self.quadrature.mode) {
                    ("plain", _) => QuadratureMode::Plain,
                    ("adaptive", QuadratureMode::Adaptive { tol, max_depth }) => QuadratureMode::Adaptive { tol, max_depth },
                    ("adaptive", QuadratureMode::Plain) => QuadratureSettings::default().mode,
                    _ => return Err(Error::Config(format!("quadrature must be `plain` or `adaptive`, got `{value}`"))),
                }
            }
            "tol" | "max_depth" => {
                let QuadratureMode::Adaptive { tol, max_depth } = self.quadrature.mode else {
                    return Err(Error::Config(format!("`{key}` only applies to adaptive quadrature")));
                };
                self.quadrature.mode = if key == "tol" {
                    QuadratureMode::Adaptive { tol: number(key, value)?, max_depth }
                } else {
                    QuadratureMode::Adaptive { tol, max_depth: number(key, value)? }
                };
            }
            "near_factor" => self.quadrature.near_factor = number(key, value)?,
            "stride" => self.stride = number(key, value)?,
            "out" => self.output_dir = PathBuf::from(value),
            "oracle_depth" => self.oracle_depth = number(key, value)?,
            "state_cap" => self.state_cap = number(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        target_by_name(&self.target)?;
        if self.stride == 0 {
            return Err(Error::Config("stride must be positive".into()));
        }
        if let QuadratureMode::Adaptive { tol, .. } = self.quadrature.mode {
            if !(tol > 0.0) {
                return Err(Error::Config("tol must be positive".into()));
            }
        }
        if !(self.quadrature.near_factor >= 0.0) {
            return Err(Error::Config("near_factor must be nonnegative".into()));
        }
        if let StoppingRule::ErrorBelow(e) = self.stopping {
            if !(e >= 0.0) {
                return Err(Error::Config("err_below must be nonnegative".into()));
            }
        }
        Ok(())
    }
}
