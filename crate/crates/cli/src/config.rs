use std::fmt;
use std::path::{Path, PathBuf};

use expgap_core::{corpus, BlockKind};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Det,
    Reduce,
    Verify,
    Amplify,
    Kitaev,
    Energy,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Spectrum,
        Command::Det,
        Command::Reduce,
        Command::Verify,
        Command::Amplify,
        Command::Kitaev,
        Command::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Det => "det",
            Command::Reduce => "reduce",
            Command::Verify => "verify",
            Command::Amplify => "amplify",
            Command::Kitaev => "kitaev",
            Command::Energy => "energy",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Command parameters. Every field is optional so that flags, a config
/// file and the defaults can be layered.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Instance file, or inline instance JSON when it starts with `{`.
    pub instance: Option<String>,
    /// Corpus verifier name or verifier file.
    pub verifier: Option<String>,
    pub kind: Option<BlockKind>,
    pub ell: Option<usize>,
    pub r: Option<usize>,
    pub precision_bits: Option<usize>,
    pub g: Option<u32>,
    pub bits: Option<u32>,
    pub seed: Option<u64>,
    /// `best`, `random` or `basis:<index>`.
    pub witness: Option<String>,
    /// Where `kitaev` writes the instance JSON.
    pub emit: Option<PathBuf>,
}

pub const DEFAULT_ELL: usize = 8;
pub const DEFAULT_TRIALS: usize = 3;
pub const DEFAULT_PRECISION_BITS: usize = 4;
pub const DEFAULT_BITS: u32 = 30;
pub const DEFAULT_SEED: u64 = 0;

impl Params {
    /// Field-wise `self` where set, otherwise `lower`.
    pub fn over(self, lower: Params) -> Params {
        Params {
            instance: self.instance.or(lower.instance),
            verifier: self.verifier.or(lower.verifier),
            kind: self.kind.or(lower.kind),
            ell: self.ell.or(lower.ell),
            r: self.r.or(lower.r),
            precision_bits: self.precision_bits.or(lower.precision_bits),
            g: self.g.or(lower.g),
            bits: self.bits.or(lower.bits),
            seed: self.seed.or(lower.seed),
            witness: self.witness.or(lower.witness),
            emit: self.emit.or(lower.emit),
        }
    }

    pub fn kind(&self) -> BlockKind {
        self.kind.unwrap_or(BlockKind::Path)
    }

    pub fn ell(&self) -> usize {
        self.ell.unwrap_or(DEFAULT_ELL)
    }

    pub fn trials(&self) -> usize {
        self.r.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS)
    }

    pub fn bits(&self) -> u32 {
        self.bits.unwrap_or(DEFAULT_BITS)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn witness(&self) -> &str {
        self.witness.as_deref().unwrap_or("best")
    }

    fn rebase(mut self, dir: &Path) -> Params {
        let rebase_ref = |s: String| {
            if s.trim_start().starts_with('{') || corpus_name(&s) || Path::new(&s).is_absolute() {
                s
            } else {
                dir.join(s).to_string_lossy().into_owned()
            }
        };
        self.instance = self.instance.map(rebase_ref);
        self.verifier = self.verifier.map(rebase_ref);
        self.emit = self.emit.map(|p| if p.is_absolute() { p } else { dir.join(p) });
        self
    }
}

fn corpus_name(s: &str) -> bool {
    corpus::MACHINE_NAMES.contains(&s) || corpus::VERIFIER_NAMES.contains(&s)
}

/// One experiment: a command, its parameters and where the report goes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: Params,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// On-disk form. Paths inside are relative to the file.
///
/// ```toml
/// command = "spectrum"
/// output = "spectrum.csv"
/// format = "csv"
///
/// [params]
/// kind = "path"
/// ell = 16
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub params: Params,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let mut file: ConfigFile = toml::from_str(&text)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        file.params = file.params.rebase(dir);
        file.output = file.output.map(|p| if p.is_absolute() { p } else { dir.join(p) });
        Ok(file)
    }
}

impl ExperimentConfig {
    /// Layers command-line values over a config file over the defaults.
    pub fn resolve(
        command: Option<Command>,
        flags: Params,
        output: Option<PathBuf>,
        format: Option<Format>,
        file: Option<ConfigFile>,
    ) -> Result<Self, CliError> {
        let file = file.unwrap_or_default();
        let command = match (command, file.command) {
            (Some(c), _) => c,
            (None, Some(name)) => name.parse()?,
            (None, None) => return Err(CliError::Usage("no command given".into())),
        };
        Ok(ExperimentConfig {
            command,
            params: flags.over(file.params),
            output: output.or(file.output),
            format: format.or(file.format).unwrap_or_default(),
        })
    }
}
