use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lpq::offset::Method;
use lpq::{Algorithm, OracleSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgArg {
    Amplified,
    Qft,
    Qhs,
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Amplified => Algorithm::Amplified,
            AlgArg::Qft => Algorithm::Qft,
            AlgArg::Qhs => Algorithm::Qhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Counting,
    Decreasing,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Counting => Method::Counting,
            MethodArg::Decreasing => Method::Decreasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every setting a run can take. Loaded from `--config`, then overridden
/// field by field by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub p: Option<u64>,
    pub s: Option<u64>,
    pub alg: Option<AlgArg>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict: Option<bool>,
    pub method: Option<MethodArg>,
    pub runs: Option<u64>,
    pub q_max: Option<u64>,
    pub iterations_override: Option<u64>,
    pub y: Option<u64>,
    pub period: Option<u64>,
    pub verify: Option<bool>,
    pub log2_n_min: Option<u32>,
    pub log2_n_max: Option<u32>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with any of the settings below; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Size of the label space.
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Number of marked labels.
    #[arg(long, global = true)]
    pub m: Option<u64>,
    /// Period.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Offset of the first marked label.
    #[arg(long, global = true)]
    pub s: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub alg: Option<AlgArg>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent. For `sweep`, a directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Require P² ≤ N and 2M ≤ N (the default).
    #[arg(long, global = true, overrides_with = "no_strict")]
    pub strict: bool,
    /// Accept any instance that fits in the label space.
    #[arg(long, global = true, overrides_with = "strict")]
    pub no_strict: bool,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Monte-Carlo runs; zero skips the simulation.
    #[arg(long, global = true)]
    pub runs: Option<u64>,
    /// Largest convergent denominator accepted (default ⌊√N⌋).
    #[arg(long, global = true)]
    pub q_max: Option<u64>,
    /// Grover iterations for the amplified algorithm instead of ⌊π/4θ⌋.
    #[arg(long, global = true)]
    pub iterations_override: Option<u64>,
    /// Measured label for `recover`.
    #[arg(long, global = true)]
    pub y: Option<u64>,
    /// Putative period for `find-offset` (default: the instance's P).
    #[arg(long, global = true)]
    pub period: Option<u64>,
    /// Check the recovered candidate against the oracle.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Smallest exponent j of N = 2^j in `sweep`.
    #[arg(long, global = true)]
    pub log2_n_min: Option<u32>,
    /// Largest exponent j of N = 2^j in `sweep`.
    #[arg(long, global = true)]
    pub log2_n_max: Option<u32>,
}

impl Flags {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => load(path)?,
            None => RunConfig::default(),
        };
        let strict = if self.no_strict {
            Some(false)
        } else if self.strict {
            Some(true)
        } else {
            base.strict
        };
        Ok(RunConfig {
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            p: self.p.or(base.p),
            s: self.s.or(base.s),
            alg: self.alg.or(base.alg),
            seed: self.seed.or(base.seed),
            out: self.out.clone().or(base.out),
            format: self.format.or(base.format),
            strict,
            method: self.method.or(base.method),
            runs: self.runs.or(base.runs),
            q_max: self.q_max.or(base.q_max),
            iterations_override: self.iterations_override.or(base.iterations_override),
            y: self.y.or(base.y),
            period: self.period.or(base.period),
            verify: if self.verify { Some(true) } else { base.verify },
            log2_n_min: self.log2_n_min.or(base.log2_n_min),
            log2_n_max: self.log2_n_max.or(base.log2_n_max),
        })
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
}

fn required(value: Option<u64>, flag: &str) -> Result<u64, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing --{flag}")))
}

impl RunConfig {
    pub fn n(&self) -> Result<u64, CliError> {
        required(self.n, "n")
    }

    pub fn m(&self) -> Result<u64, CliError> {
        required(self.m, "m")
    }

    pub fn p(&self) -> Result<u64, CliError> {
        required(self.p, "p")
    }

    pub fn s(&self) -> Result<u64, CliError> {
        required(self.s, "s")
    }

    pub fn y(&self) -> Result<u64, CliError> {
        required(self.y, "y")
    }

    pub fn strict(&self) -> bool {
        self.strict.unwrap_or(true)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn algorithm(&self) -> Algorithm {
        self.alg.unwrap_or(AlgArg::Amplified).into()
    }

    pub fn method(&self) -> Method {
        self.method.unwrap_or(MethodArg::Decreasing).into()
    }

    pub fn spec(&self) -> Result<OracleSpec, CliError> {
        let spec = OracleSpec::new(self.n()?, self.m()?, self.p()?, self.s()?, self.strict())?;
        Ok(spec)
    }
}
