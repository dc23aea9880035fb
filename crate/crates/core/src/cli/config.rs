use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::chain::{Identity, Mode};
use crate::engine::{FrequencyVector, TABLE_CAP};
use crate::partition::ENUMERATION_CAP;
use crate::samplers::{RandomFreqModel, STEP_CAP};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EvalPeppf,
    Shift,
    Converge,
    SimulateCrp,
    SampleX,
    ChainKernel,
    Identities,
    CheckSymmetric,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EvalPeppf => "eval-peppf",
            Command::Shift => "shift",
            Command::Converge => "converge",
            Command::SimulateCrp => "simulate-crp",
            Command::SampleX => "sample-x",
            Command::ChainKernel => "chain-kernel",
            Command::Identities => "identities",
            Command::CheckSymmetric => "check-symmetric",
        }
    }
}

/// Which partition probability function a table is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Product formula with the configured frequencies in order of appearance.
    Extreme,
    /// Exchangeable paintbox with the same atoms.
    Paintbox,
}

/// A complete run. Every field has an explicit default, shown by `--print-config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub frequencies: RandomFreqModel,
    pub generator: Generator,
    /// Ground-set size of the observed window.
    pub m: usize,
    /// Number of shifts.
    pub n_max: usize,
    /// Table level for `eval-peppf`, `shift` and `check-symmetric`.
    pub level: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// Symmetry and reversal tolerance.
    pub tolerance: f64,
    /// Required final distance for `converge`.
    pub threshold: Option<f64>,
    pub table_cap: usize,
    pub enumeration_cap: usize,
    pub step_cap: usize,
    /// Table file to validate in `eval-peppf`.
    pub table: Option<PathBuf>,
    pub identities: Vec<Identity>,
    pub mode: Mode,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            frequencies: RandomFreqModel::Fixed(
                FrequencyVector::new(vec![0.6, 0.4]).expect("valid default"),
            ),
            generator: Generator::Extreme,
            m: 2,
            n_max: 2,
            level: 4,
            samples: 100_000,
            seed: None,
            threads: None,
            tolerance: 1e-10,
            threshold: None,
            table_cap: TABLE_CAP,
            enumeration_cap: ENUMERATION_CAP,
            step_cap: STEP_CAP,
            table: None,
            identities: Identity::ALL.to_vec(),
            mode: Mode::Exact,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("malformed config {}: {e}", path.display())))
    }

    fn samples_with_seed(&self) -> bool {
        match self.command {
            Some(Command::Converge | Command::SimulateCrp | Command::SampleX) => true,
            Some(Command::Identities) => self.mode == Mode::MonteCarlo,
            _ => false,
        }
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<Command, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        self.frequencies
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.samples_with_seed() && self.seed.is_none() {
            return Err(CliError::Config(format!(
                "command {} samples and needs a seed",
                command.name()
            )));
        }
        if self.samples_with_seed() && self.samples == 0 {
            return Err(CliError::Config("samples must be positive".into()));
        }
        if self.m == 0 {
            return Err(CliError::Config("m must be positive".into()));
        }
        if self.m > self.enumeration_cap {
            return Err(CliError::Config(format!(
                "m = {} exceeds the enumeration cap {}",
                self.m, self.enumeration_cap
            )));
        }
        if self.level == 0 || self.level > self.table_cap {
            return Err(CliError::Config(format!(
                "level = {} outside 1..={}",
                self.level, self.table_cap
            )));
        }
        if command == Command::Shift && self.n_max >= self.level {
            return Err(CliError::Config(format!(
                "{} shifts need a table level above {}",
                self.n_max, self.n_max
            )));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be positive".into()));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(CliError::Config("tolerance must be nonnegative".into()));
        }
        Ok(command)
    }
}
