//! Output metadata and the small TSV readers shared by subcommands.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const TOOL: &str = concat!("lexdiv ", env!("CARGO_PKG_VERSION"));

/// Header recorded at the top of every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Meta {
    /// Digest over the effective config and the subcommand arguments. The
    /// output directory and thread count are left out since neither
    /// changes any output.
    pub fn new(command: &str, config: &RunConfig, args: &impl Serialize, seed: u64) -> Self {
        let mut cfg = config.clone();
        cfg.out_dir = PathBuf::new();
        let doc = serde_json::json!({ "command": command, "config": cfg, "args": args });
        let digest = Sha256::digest(doc.to_string().as_bytes());
        Self {
            tool: TOOL.into(),
            command: command.into(),
            config_sha256: hex::encode(digest),
            seed,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("tool: {}", self.tool),
            format!("command: {}", self.command),
            format!("config-sha256: {}", self.config_sha256),
            format!("seed: {}", self.seed),
        ]
    }

    /// Creates `path` (and its parent) and writes the header as `# ` lines.
    pub fn create_tsv(&self, path: &Path) -> anyhow::Result<BufWriter<File>> {
        let mut w = create(path)?;
        for l in self.lines() {
            writeln!(w, "# {l}")?;
        }
        Ok(w)
    }

    /// Writes `body` as a JSON object with the header under `"meta"`.
    pub fn write_json(&self, path: &Path, body: &impl Serialize) -> anyhow::Result<()> {
        let mut v = serde_json::to_value(body)?;
        let obj = v.as_object_mut().context("JSON output must be an object")?;
        obj.insert("meta".into(), serde_json::to_value(self)?);
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &v)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

pub fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    log::info!("writing {}", path.display());
    Ok(BufWriter::new(f))
}

/// File name without `.tsv` and without a trailing `.comments` or
/// `.series` part: `incel.comments.tsv` → `incel`.
pub fn label_of(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = name.strip_suffix(".tsv").unwrap_or(&name);
    let name = name
        .strip_suffix(".comments")
        .or_else(|| name.strip_suffix(".series"))
        .unwrap_or(name);
    name.to_owned()
}

fn data_lines(path: &Path) -> anyhow::Result<impl Iterator<Item = (usize, String)>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let lines: Vec<(usize, String)> = BufReader::new(f)
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .collect::<std::io::Result<_>>()
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(lines
        .into_iter()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty()))
}

/// Values of the named column of a headed TSV file.
pub fn read_column<T>(path: &Path, column: &str) -> anyhow::Result<Vec<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    let mut lines = data_lines(path)?;
    let (_, header) = lines
        .next()
        .with_context(|| format!("{}: missing header line", path.display()))?;
    let idx = header
        .split('\t')
        .position(|h| h == column)
        .with_context(|| format!("{}: no column named {column:?}", path.display()))?;
    lines
        .map(|(no, l)| {
            let field = l
                .split('\t')
                .nth(idx)
                .with_context(|| format!("{}:{no}: missing column {column:?}", path.display()))?;
            field
                .parse()
                .map_err(|e| anyhow::anyhow!("{}:{no}: {field:?}: {e}", path.display()))
        })
        .collect()
}

/// Second column of a two-column series file with a header line.
pub fn read_series(path: &Path) -> anyhow::Result<Vec<f64>> {
    let mut lines = data_lines(path)?;
    let (_, header) = lines
        .next()
        .with_context(|| format!("{}: missing header line", path.display()))?;
    let column = header
        .split('\t')
        .nth(1)
        .with_context(|| format!("{}: expected two columns", path.display()))?
        .to_owned();
    read_column(path, &column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(label_of(Path::new("out/incel.comments.tsv")), "incel");
        assert_eq!(label_of(Path::new("women.series.tsv")), "women");
        assert_eq!(label_of(Path::new("x")), "x");
    }

    #[test]
    fn columns() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        std::fs::write(&p, "# tool: x\ncreated_utc\ttokens\n10\t3\n\n11\t0\n").unwrap();
        assert_eq!(read_column::<u64>(&p, "tokens").unwrap(), vec![3, 0]);
        assert_eq!(read_series(&p).unwrap(), vec![3.0, 0.0]);
        assert!(read_column::<u64>(&p, "nope").is_err());
        std::fs::write(&p, "a\tb\n1\tx\n").unwrap();
        assert!(read_series(&p).unwrap_err().to_string().contains(":2:"));
    }

    #[test]
    fn digest_ignores_out_dir() {
        let a = RunConfig::default();
        let b = RunConfig {
            out_dir: "elsewhere".into(),
            ..Default::default()
        };
        let c = RunConfig {
            alpha: 0.5,
            ..Default::default()
        };
        let d = |cfg: &RunConfig| Meta::new("rank", cfg, &(), 0).config_sha256;
        assert_eq!(d(&a), d(&b));
        assert_ne!(d(&a), d(&c));
    }
}
