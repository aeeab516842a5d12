//! TOML configuration file shared by all subcommands.
//!
//! ```toml
//! seed = 42          # overridden by MAXENT_SEED, then by --seed
//! alpha = 0.05
//! threads = 4
//! burn_in = 50
//! thin = 5
//!
//! [study]            # the mc-study configuration, see `StudyConfig`
//! replications = 500
//! n = 500
//! [study.generator]
//! kind = "er"
//! m = 100
//! p = 0.02
//! [study.test]
//! test = "gof-sparse"
//! motif = "triangle"
//! c0 = 2.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::study::StudyConfig;

pub const SEED_ENV: &str = "MAXENT_SEED";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub threads: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub study: Option<StudyConfig>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text)
    }
}

/// Seed precedence: command-line flag, then `MAXENT_SEED`, then the config file.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(text) = env {
        let seed = text
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={text:?} is not an unsigned 64-bit integer")))?;
        return Ok(Some(seed));
    }
    Ok(config)
}

/// [`resolve_seed`] reading the environment.
pub fn seed_from_env(flag: Option<u64>, config: Option<u64>) -> Result<Option<u64>> {
    let env = std::env::var(SEED_ENV).ok();
    resolve_seed(flag, env.as_deref(), config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some("2"), Some(3)).unwrap(), Some(1));
        assert_eq!(resolve_seed(None, Some("2"), Some(3)).unwrap(), Some(2));
        assert_eq!(resolve_seed(None, None, Some(3)).unwrap(), Some(3));
        assert_eq!(resolve_seed(None, None, None).unwrap(), None);
        assert!(resolve_seed(None, Some("x"), None).is_err());
    }

    #[test]
    fn parses_documented_example() {
        let text = r#"
            seed = 42
            alpha = 0.05
            threads = 4
            [study]
            replications = 500
            n = 500
            [study.generator]
            kind = "er"
            m = 100
            p = 0.02
            [study.test]
            test = "gof-sparse"
            motif = "triangle"
            c0 = 2.0
        "#;
        let c = Config::parse(text).unwrap();
        assert_eq!(c.seed, Some(42));
        assert_eq!(c.study.unwrap().replications, 500);
        assert!(Config::parse("sed = 1").is_err());
    }
}
