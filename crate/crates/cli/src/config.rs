use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Environment variable naming a default configuration file.
pub const CONFIG_ENV: &str = "HOLLOWTREE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Run settings read from TOML. Command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    pub threshold: Option<f64>,
    pub format: Option<Format>,
    pub counts: Option<PathBuf>,
    pub graph: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0) || !t.is_finite() {
                return Err(format!("tolerance must be positive, got {t}"));
            }
        }
        if self.max_iter == Some(0) {
            return Err("max_iter must be at least 1".into());
        }
        if let Some(t) = self.threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(format!("threshold must lie in [0, 1], got {t}"));
            }
        }
        Ok(())
    }

    /// Parses a config file; relative input paths are taken relative to it.
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let s = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut c: RunConfig = toml::from_str(&s).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut c.counts, &mut c.graph].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Explicit path first, then the environment variable, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<RunConfig, String> {
        match explicit {
            Some(p) => RunConfig::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => RunConfig::load(Path::new(&p)),
                _ => Ok(RunConfig::default()),
            },
        }
    }
}
