//! HTTP(S) download of dump files with range-based resumption.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::{info, warn};

use super::manifest::SourceFile;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Retries after the first attempt for network failures and 5xx replies.
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    /// Per-attempt timeout; `None` waits indefinitely.
    pub timeout: Option<Duration>,
    /// Hex SHA-256 the finished file must have.
    pub expected_sha256: Option<String>,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            max_retries: 5,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
            timeout: None,
            expected_sha256: None,
        }
    }
}

/// Path of the in-progress download for `dest`.
pub fn partial_path(dest: &Path) -> PathBuf {
    let mut name = dest.file_name().unwrap_or_default().to_os_string();
    name.push(".part");
    dest.with_file_name(name)
}

enum Attempt {
    Done,
    Retry(String),
}

fn fetch_err(url: &str, message: impl Into<String>) -> Error {
    Error::Fetch {
        url: url.to_owned(),
        message: message.into(),
    }
}

/// First byte offset of a `Content-Range: bytes a-b/n` header.
fn content_range_start(value: &str) -> Option<u64> {
    let rest = value.trim().strip_prefix("bytes")?.trim_start();
    rest.split('-').next()?.trim().parse().ok()
}

fn attempt(agent: &ureq::Agent, url: &str, part: &Path) -> Result<Attempt> {
    let offset = fs::metadata(part).map(|m| m.len()).unwrap_or(0);
    let mut req = agent.get(url);
    if offset > 0 {
        req = req.header("Range", format!("bytes={offset}-"));
    }
    let mut resp = match req.call() {
        Ok(r) => r,
        Err(e) => return Ok(Attempt::Retry(e.to_string())),
    };
    let status = resp.status().as_u16();
    let append = match status {
        200 => false,
        206 => {
            let start = resp
                .headers()
                .get("content-range")
                .and_then(|v| v.to_str().ok())
                .and_then(content_range_start);
            if start != Some(offset) {
                // Server resumed somewhere else; start over.
                File::create(part).map_err(Error::at_path(part))?;
                return Ok(Attempt::Retry(format!(
                    "unexpected Content-Range start {start:?} for offset {offset}"
                )));
            }
            true
        }
        416 if offset > 0 => return Ok(Attempt::Done),
        500..=599 => return Ok(Attempt::Retry(format!("HTTP {status}"))),
        _ => return Err(fetch_err(url, format!("HTTP {status}"))),
    };
    let mut file = if append {
        OpenOptions::new()
            .append(true)
            .open(part)
            .map_err(Error::at_path(part))?
    } else {
        File::create(part).map_err(Error::at_path(part))?
    };
    let mut body = resp.body_mut().as_reader();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = match body.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => {
                file.flush().map_err(Error::at_path(part))?;
                return Ok(Attempt::Retry(e.to_string()));
            }
        };
        file.write_all(&buf[..n]).map_err(Error::at_path(part))?;
    }
    file.sync_all().map_err(Error::at_path(part))?;
    Ok(Attempt::Done)
}

/// Downloads `url` to `dest`, resuming from `dest.part` when a previous
/// attempt was interrupted, and returns the manifest entry for the file.
pub fn fetch_dump(url: &str, dest: &Path, opts: &FetchOptions) -> Result<SourceFile> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(opts.timeout)
        .build()
        .into();
    let part = partial_path(dest);
    let mut backoff = opts.initial_backoff;
    let mut tries = 0;
    loop {
        match attempt(&agent, url, &part)? {
            Attempt::Done => break,
            Attempt::Retry(reason) if tries < opts.max_retries => {
                tries += 1;
                warn!(
                    "{url}: {reason}; retry {tries}/{} in {backoff:?}",
                    opts.max_retries
                );
                std::thread::sleep(backoff);
                backoff = (backoff * 2).min(opts.max_backoff);
            }
            Attempt::Retry(reason) => {
                return Err(fetch_err(url, format!("{reason} (after {tries} retries)")))
            }
        }
    }
    let entry = SourceFile::describe(&part)?;
    if let Some(expected) = &opts.expected_sha256 {
        if !expected.eq_ignore_ascii_case(&entry.sha256) {
            // a bad file must not be resumed by the next call
            fs::remove_file(&part).map_err(Error::at_path(&part))?;
            return Err(Error::DigestMismatch {
                path: dest.to_path_buf(),
                expected: expected.clone(),
                actual: entry.sha256,
            });
        }
    }
    fs::rename(&part, dest).map_err(Error::at_path(dest))?;
    info!("fetched {url} ({} bytes)", entry.bytes);
    Ok(SourceFile {
        path: dest.to_path_buf(),
        ..entry
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_content_range() {
        assert_eq!(content_range_start("bytes 100-199/200"), Some(100));
        assert_eq!(content_range_start("bytes */200"), None);
    }

    #[test]
    fn part_path_sits_beside_destination() {
        assert_eq!(
            partial_path(Path::new("/tmp/RC_2019-01.zst")),
            PathBuf::from("/tmp/RC_2019-01.zst.part")
        );
    }
}
