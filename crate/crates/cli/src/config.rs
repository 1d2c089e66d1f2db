//! Shared run configuration, read from JSON and overridden by flags.

use std::path::{Path, PathBuf};

use lexdiv::ingest::{CleanConfig, FilterConfig};
use serde::{Deserialize, Serialize};

use crate::Usage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub label: String,
    pub paths: Vec<PathBuf>,
    /// Keep only records from these sources; empty keeps all.
    #[serde(default)]
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpora: Vec<CorpusConfig>,
    pub clean: CleanConfig,
    pub filter: FilterConfig,
    pub orders: Vec<usize>,
    pub alpha: f64,
    pub bins_per_decade: u32,
    pub seed: u64,
    /// Not part of the config digest.
    pub out_dir: PathBuf,
    pub lags: Vec<u32>,
    /// Default frequency tables for the two systems, one per order.
    pub tables_a: Vec<PathBuf>,
    pub tables_b: Vec<PathBuf>,
    /// Default monthly panel directory.
    pub panel: Option<PathBuf>,
    /// Style file for rendered figures.
    pub style: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpora: Vec::new(),
            clean: CleanConfig::default(),
            filter: FilterConfig::default(),
            orders: vec![1, 2, 3],
            alpha: lexdiv::rtd::DEFAULT_ALPHA,
            bins_per_decade: 15,
            seed: 0,
            out_dir: PathBuf::from("."),
            lags: vec![1, 6, 12],
            tables_a: Vec::new(),
            tables_b: Vec::new(),
            panel: None,
            style: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory, and every referenced path must exist.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for c in &mut cfg.corpora {
            c.paths.iter_mut().for_each(fix);
        }
        cfg.tables_a.iter_mut().for_each(fix);
        cfg.tables_b.iter_mut().for_each(fix);
        cfg.panel.iter_mut().for_each(fix);
        cfg.style.iter_mut().for_each(fix);
        fix(&mut cfg.out_dir);

        let referenced = cfg
            .corpora
            .iter()
            .flat_map(|c| &c.paths)
            .chain(&cfg.tables_a)
            .chain(&cfg.tables_b)
            .chain(&cfg.panel)
            .chain(&cfg.style);
        require_paths(referenced)?;
        Ok(cfg)
    }
}

/// Usage error naming the first path that does not exist.
pub fn require_paths<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> anyhow::Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(Usage(format!("no such file or directory: {}", p.display())).into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.tsv"), "").unwrap();
        let cfg_path = dir.path().join("run.json");
        std::fs::write(&cfg_path, r#"{"tables_a": ["a.tsv"], "alpha": 0.5}"#).unwrap();
        let cfg = RunConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.tables_a, vec![dir.path().join("a.tsv")]);
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!(cfg.lags, vec![1, 6, 12]);
    }

    #[test]
    fn missing_path_and_unknown_field_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.json");
        std::fs::write(&cfg_path, r#"{"panel": "nowhere"}"#).unwrap();
        let e = RunConfig::load(&cfg_path).unwrap_err();
        assert!(e.downcast_ref::<Usage>().is_some());
        std::fs::write(&cfg_path, r#"{"alhpa": 1}"#).unwrap();
        assert!(RunConfig::load(&cfg_path)
            .unwrap_err()
            .downcast_ref::<Usage>()
            .is_some());
    }
}
