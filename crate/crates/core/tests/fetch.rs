//! Resumable download against a scripted local HTTP server.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use lexdiv::ingest::fetch::partial_path;
use lexdiv::ingest::manifest::sha256_reader;
use lexdiv::ingest::{fetch_dump, FetchOptions};
use lexdiv::Error;

/// What the server does with one request.
#[derive(Clone, Copy)]
enum Reply {
    /// Honor any Range header; send only the first `n` bytes of the
    /// promised body, then hang up.
    CutAfter(usize),
    Full,
    Status(u16),
}

struct Server {
    url: String,
    ranges: Arc<Mutex<Vec<Option<u64>>>>,
}

fn read_request(stream: &TcpStream) -> Option<u64> {
    let mut reader = BufReader::new(stream);
    let mut range = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            return range;
        }
        let lower = line.to_ascii_lowercase();
        if let Some(v) = lower.strip_prefix("range: bytes=") {
            range = v.trim().trim_end_matches('-').parse().ok();
        }
    }
}

fn serve(body: Vec<u8>, script: Vec<Reply>) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!(
        "http://{}/RC_2019-01.ndjson",
        listener.local_addr().unwrap()
    );
    let ranges = Arc::new(Mutex::new(Vec::new()));
    let seen = Arc::clone(&ranges);
    thread::spawn(move || {
        for reply in script {
            let (mut stream, _) = listener.accept().unwrap();
            let start = read_request(&stream);
            seen.lock().unwrap().push(start);
            let from = start.unwrap_or(0) as usize;
            let rest = &body[from.min(body.len())..];
            let head = match (reply, start) {
                (Reply::Status(code), _) => format!("HTTP/1.1 {code} Nope\r\nContent-Length: 0\r\n\r\n"),
                (_, Some(s)) if s as usize >= body.len() => {
                    "HTTP/1.1 416 Range Not Satisfiable\r\nContent-Length: 0\r\n\r\n".to_owned()
                }
                (_, Some(s)) => format!(
                    "HTTP/1.1 206 Partial Content\r\nContent-Length: {}\r\nContent-Range: bytes {s}-{}/{}\r\n\r\n",
                    rest.len(),
                    body.len() - 1,
                    body.len()
                ),
                (_, None) => format!("HTTP/1.1 200 OK\r\nContent-Length: {}\r\n\r\n", rest.len()),
            };
            stream.write_all(head.as_bytes()).unwrap();
            let send = match reply {
                Reply::CutAfter(n) => &rest[..n.min(rest.len())],
                Reply::Full => rest,
                Reply::Status(_) => &[][..],
            };
            let _ = stream.write_all(send);
            let _ = stream.flush();
        }
    });
    Server { url, ranges }
}

fn body() -> Vec<u8> {
    (0..200_000u32)
        .flat_map(|i| format!("{{\"n\":{i}}}\n").into_bytes())
        .collect::<Vec<u8>>()
}

fn quick() -> FetchOptions {
    FetchOptions {
        max_retries: 3,
        initial_backoff: Duration::from_millis(5),
        max_backoff: Duration::from_millis(20),
        timeout: Some(Duration::from_secs(10)),
        expected_sha256: None,
    }
}

#[test]
fn interrupted_download_resumes_with_range() {
    let data = body();
    let (sha, len) = sha256_reader(&data[..]).unwrap();
    let server = serve(
        data.clone(),
        vec![
            Reply::CutAfter(100_000),
            Reply::CutAfter(50_000),
            Reply::Full,
        ],
    );
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("dump.ndjson");
    let opts = FetchOptions {
        expected_sha256: Some(sha.clone()),
        ..quick()
    };
    let got = fetch_dump(&server.url, &dest, &opts).unwrap();
    assert_eq!(std::fs::read(&dest).unwrap(), data);
    assert_eq!((got.sha256, got.bytes), (sha, len));
    assert!(!partial_path(&dest).exists());
    assert_eq!(
        *server.ranges.lock().unwrap(),
        vec![None, Some(100_000), Some(150_000)]
    );
}

#[test]
fn partial_file_from_an_earlier_run_is_resumed() {
    let data = body();
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("dump.ndjson");
    std::fs::write(partial_path(&dest), &data[..1234]).unwrap();
    let server = serve(data.clone(), vec![Reply::Full]);
    fetch_dump(&server.url, &dest, &quick()).unwrap();
    assert_eq!(std::fs::read(&dest).unwrap(), data);
    assert_eq!(*server.ranges.lock().unwrap(), vec![Some(1234)]);
}

#[test]
fn server_errors_are_retried_client_errors_are_not() {
    let data = body();
    let dir = tempfile::tempdir().unwrap();
    let server = serve(
        data.clone(),
        vec![Reply::Status(503), Reply::Status(500), Reply::Full],
    );
    fetch_dump(&server.url, &dir.path().join("a"), &quick()).unwrap();

    let server = serve(data, vec![Reply::Status(404), Reply::Full]);
    let e = fetch_dump(&server.url, &dir.path().join("b"), &quick()).unwrap_err();
    assert!(matches!(e, Error::Fetch { .. }), "{e}");
    assert_eq!(server.ranges.lock().unwrap().len(), 1);
}

#[test]
fn retries_run_out() {
    let dir = tempfile::tempdir().unwrap();
    let server = serve(body(), vec![Reply::Status(502); 4]);
    let e = fetch_dump(&server.url, &dir.path().join("a"), &quick()).unwrap_err();
    assert!(e.to_string().contains("after 3 retries"), "{e}");
}

#[test]
fn digest_mismatch_discards_the_download() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("a");
    let server = serve(body(), vec![Reply::Full]);
    let opts = FetchOptions {
        expected_sha256: Some("00".repeat(32)),
        ..quick()
    };
    let e = fetch_dump(&server.url, &dest, &opts).unwrap_err();
    assert!(matches!(e, Error::DigestMismatch { .. }));
    assert!(!dest.exists() && !partial_path(&dest).exists());
}
