use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::filter::RejectionTally;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

impl SourceFile {
    pub fn describe(path: &Path) -> Result<Self> {
        let (sha256, bytes) = sha256_file(path)?;
        Ok(Self {
            path: path.to_path_buf(),
            bytes,
            sha256,
        })
    }

    /// Re-hashes the file and compares against the recorded digest.
    pub fn verify(&self) -> Result<()> {
        let (actual, _) = sha256_file(&self.path)?;
        if actual != self.sha256 {
            return Err(Error::DigestMismatch {
                path: self.path.clone(),
                expected: self.sha256.clone(),
                actual,
            });
        }
        Ok(())
    }
}

/// Summary of one ingested corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub label: String,
    /// Retained comments.
    pub record_count: u64,
    /// Cleaned 1-gram tokens over all retained comments.
    pub token_count: u64,
    /// `(min, max)` of `created_utc`, absent for an empty corpus.
    pub date_range: Option<(i64, i64)>,
    pub rejections: RejectionTally,
    /// Records dropped because their source was not selected.
    #[serde(default)]
    pub excluded_by_source: u64,
    pub skipped_lines: u64,
    pub sources: Vec<SourceFile>,
}

impl CorpusManifest {
    pub fn verify_sources(&self) -> Result<()> {
        self.sources.iter().try_for_each(SourceFile::verify)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(Error::at_path(path))?;
        serde_json::to_writer_pretty(io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(Error::at_path(path))?;
        Ok(serde_json::from_reader(BufReader::new(f))?)
    }
}

pub fn sha256_reader<R: Read>(mut r: R) -> io::Result<(String, u64)> {
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut n_total = 0u64;
    loop {
        let n = r.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        n_total += n as u64;
    }
    Ok((hex::encode(hasher.finalize()), n_total))
}

/// Hex SHA-256 and byte length of a file.
pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let f = File::open(path).map_err(Error::at_path(path))?;
    sha256_reader(f).map_err(Error::at_path(path))
}

/// Opens a dump for line reading, decompressing `.zst`/`.zstd` and `.gz`
/// files by extension.
pub fn open_dump(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let f = File::open(path).map_err(Error::at_path(path))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    Ok(match ext.as_deref() {
        Some("zst") | Some("zstd") => {
            let mut dec = zstd::stream::read::Decoder::new(f).map_err(Error::at_path(path))?;
            // Pushshift archives use a 2 GiB window.
            dec.window_log_max(31).map_err(Error::at_path(path))?;
            Box::new(BufReader::with_capacity(1 << 20, dec))
        }
        Some("gz") => Box::new(BufReader::with_capacity(
            1 << 20,
            flate2::read::MultiGzDecoder::new(f),
        )),
        _ => Box::new(BufReader::with_capacity(1 << 20, f)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn known_digest() {
        let (d, n) = sha256_reader(&b"abc"[..]).unwrap();
        assert_eq!(n, 3);
        assert_eq!(
            d,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn compressed_dumps_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let text = "{\"a\":1}\n{\"a\":2}\n";
        let plain = dir.path().join("d.ndjson");
        std::fs::write(&plain, text).unwrap();
        let gz = dir.path().join("d.ndjson.gz");
        let mut enc = flate2::write::GzEncoder::new(
            File::create(&gz).unwrap(),
            flate2::Compression::default(),
        );
        enc.write_all(text.as_bytes()).unwrap();
        enc.finish().unwrap();
        let zst = dir.path().join("d.ndjson.zst");
        std::fs::write(&zst, zstd::encode_all(text.as_bytes(), 3).unwrap()).unwrap();
        for p in [&plain, &gz, &zst] {
            let mut s = String::new();
            open_dump(p).unwrap().read_to_string(&mut s).unwrap();
            assert_eq!(s, text, "{}", p.display());
        }
    }

    #[test]
    fn tampered_source_fails_verification() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        std::fs::write(&p, "one").unwrap();
        let src = SourceFile::describe(&p).unwrap();
        src.verify().unwrap();
        std::fs::write(&p, "two").unwrap();
        assert!(matches!(src.verify(), Err(Error::DigestMismatch { .. })));
    }
}
