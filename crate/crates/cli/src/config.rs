//! Optional key-value config file shared by all subcommands. Command-line
//! flags win over the file; the master seed falls back to `NETSLICE_SEED`
//! and then to 1.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

pub const SEED_ENV: &str = "NETSLICE_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub master_seed: Option<u64>,
    pub replications: Option<usize>,
    pub walks: Option<usize>,
    pub parallel_runs: Option<usize>,
    pub mode: Option<String>,
    pub region_cut: Option<f64>,
    pub scope: Option<String>,
    pub truncate_at_tick: Option<u64>,
    pub er_p: Option<f64>,
    pub ba_attach: Option<usize>,
    pub geo_jitter: Option<f64>,
    pub exemplars: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn master_seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(s) = flag.or(self.master_seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}={v} is not a 64-bit seed")),
            Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
            Err(e) => bail!("{SEED_ENV}: {e}"),
        }
    }

    pub fn out(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| self.out.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// `flag`, else the file's value, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Parses a file value through clap's value parser for the same flag.
pub fn parse_enum<T: clap::ValueEnum>(key: &str, value: Option<&str>) -> Result<Option<T>> {
    value
        .map(|v| T::from_str(v, true).map_err(|e| anyhow::anyhow!("config `{key}`: {e}")))
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("walkz = 3").is_err());
        let c: FileConfig = toml::from_str("walks = 3\nmodel = \"geo\"").unwrap();
        assert_eq!(c.walks, Some(3));
    }

    #[test]
    fn flags_win() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
        let c = FileConfig {
            master_seed: Some(9),
            ..FileConfig::default()
        };
        assert_eq!(c.master_seed(Some(4)).unwrap(), 4);
        assert_eq!(c.master_seed(None).unwrap(), 9);
    }
}
