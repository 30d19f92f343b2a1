//! Document fetching over a pluggable transport with bounded retries.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::AcquireError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportResponse {
    pub status: u16,
    pub body: Vec<u8>,
    pub content_type: Option<String>,
}

/// A failure below the HTTP layer: connection refused, timeout, missing
/// file permissions. Always retryable, unlike a 4xx status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportFailure {
    pub detail: String,
}

impl fmt::Display for TransportFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detail)
    }
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<TransportResponse, TransportFailure>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchPolicy {
    /// Extra attempts after the first, for retryable failures only.
    pub retries: u32,
    /// Base delay between attempts; doubles after each failure.
    pub backoff: Duration,
    /// Per-request timeout, enforced by the transport.
    pub timeout: Duration,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        FetchPolicy {
            retries: 3,
            backoff: Duration::from_millis(250),
            timeout: Duration::from_secs(30),
        }
    }
}

/// Terminal result of fetching one document. Dead links and transport
/// exhaustion are data, not errors: the pipeline records them and moves on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchOutcome {
    Fetched {
        body: Vec<u8>,
        content_type: Option<String>,
    },
    /// Definitive 4xx answer from the source: the document is gone.
    DeadLink { status: u16 },
    /// Retries exhausted on timeouts, 5xx, or other transient failures.
    TransportError { detail: String },
}

/// Fetch one URL. 2xx with a body succeeds; 4xx is a dead link immediately
/// (no retries); everything else (5xx, transport failures, empty 2xx bodies)
/// retries up to `policy.retries` times with doubling backoff.
pub fn fetch(
    transport: &dyn Transport,
    url: &str,
    policy: &FetchPolicy,
) -> Result<FetchOutcome, AcquireError> {
    if url.trim().is_empty() {
        return Err(AcquireError::InvalidUrl(url.to_string()));
    }
    let attempts = policy.retries.saturating_add(1);
    let mut backoff = policy.backoff;
    let mut last_detail = String::new();
    for attempt in 1..=attempts {
        match transport.get(url) {
            Ok(resp) if (200..300).contains(&resp.status) => {
                if resp.body.is_empty() {
                    last_detail = format!("empty body with status {}", resp.status);
                } else {
                    return Ok(FetchOutcome::Fetched {
                        body: resp.body,
                        content_type: resp.content_type,
                    });
                }
            }
            Ok(resp) if (400..500).contains(&resp.status) => {
                return Ok(FetchOutcome::DeadLink {
                    status: resp.status,
                })
            }
            Ok(resp) => last_detail = format!("unexpected status {}", resp.status),
            Err(failure) => last_detail = failure.detail,
        }
        if attempt < attempts {
            if !backoff.is_zero() {
                std::thread::sleep(backoff);
            }
            backoff = backoff.saturating_mul(2);
        }
    }
    Ok(FetchOutcome::TransportError {
        detail: format!("{last_detail} (after {attempts} attempts)"),
    })
}

/// Per-host politeness: consecutive requests to the same host are spaced at
/// least `interval` apart. Callers reserve a slot under the lock and sleep
/// outside it, so concurrent requests queue instead of stampeding.
#[derive(Debug)]
pub struct PolitenessGate {
    interval: Duration,
    slots: Mutex<HashMap<String, Instant>>,
}

impl PolitenessGate {
    pub fn new(interval: Duration) -> Self {
        PolitenessGate {
            interval,
            slots: Mutex::new(HashMap::new()),
        }
    }

    /// Block until this caller's reserved slot for `host` arrives.
    pub fn wait(&self, host: &str) {
        if self.interval.is_zero() || host.is_empty() {
            return;
        }
        let slot = {
            let mut slots = self.slots.lock().expect("politeness lock");
            let now = Instant::now();
            let slot = match slots.get(host) {
                Some(prev) => (*prev + self.interval).max(now),
                None => now,
            };
            slots.insert(host.to_string(), slot);
            slot
        };
        let now = Instant::now();
        if slot > now {
            std::thread::sleep(slot - now);
        }
    }
}

/// Real HTTP transport: blocking reqwest client plus a politeness gate.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    gate: PolitenessGate,
}

impl HttpTransport {
    pub fn new(timeout: Duration, politeness: Duration) -> Result<Self, AcquireError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("misl/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| AcquireError::Io(std::io::Error::other(e)))?;
        Ok(HttpTransport {
            client,
            gate: PolitenessGate::new(politeness),
        })
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<TransportResponse, TransportFailure> {
        let host = url::Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default();
        self.gate.wait(&host);
        let resp = self.client.get(url).send().map_err(|e| TransportFailure {
            detail: e.to_string(),
        })?;
        let status = resp.status().as_u16();
        let content_type = resp
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let body = resp
            .bytes()
            .map_err(|e| TransportFailure {
                detail: e.to_string(),
            })?
            .to_vec();
        Ok(TransportResponse {
            status,
            body,
            content_type,
        })
    }
}

/// Filesystem transport for local corpora: the url is a path, optionally
/// behind `file://`. A missing file maps to status 404 so the fetch layer
/// classifies it as a dead link, same as over HTTP.
#[derive(Debug, Default, Clone, Copy)]
pub struct FileTransport;

impl Transport for FileTransport {
    fn get(&self, url: &str) -> Result<TransportResponse, TransportFailure> {
        let path = url.strip_prefix("file://").unwrap_or(url);
        match std::fs::read(path) {
            Ok(body) => Ok(TransportResponse {
                status: 200,
                body,
                content_type: None,
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(TransportResponse {
                status: 404,
                body: Vec::new(),
                content_type: None,
            }),
            Err(e) => Err(TransportFailure {
                detail: format!("{path}: {e}"),
            }),
        }
    }
}

/// Routes http(s) URLs to [`HttpTransport`] and everything else to
/// [`FileTransport`].
pub struct DispatchTransport {
    http: HttpTransport,
    file: FileTransport,
}

impl DispatchTransport {
    pub fn new(timeout: Duration, politeness: Duration) -> Result<Self, AcquireError> {
        Ok(DispatchTransport {
            http: HttpTransport::new(timeout, politeness)?,
            file: FileTransport,
        })
    }
}

impl Transport for DispatchTransport {
    fn get(&self, url: &str) -> Result<TransportResponse, TransportFailure> {
        if url.starts_with("http://") || url.starts_with("https://") {
            self.http.get(url)
        } else {
            self.file.get(url)
        }
    }
}

/// Test transport that replays scripted responses per URL. Each scripted
/// entry is consumed once, except the last, which repeats forever; an URL
/// with no script fails with a transport error.
#[derive(Default)]
pub struct ScriptedTransport {
    scripts: Mutex<HashMap<String, VecDeque<Result<TransportResponse, TransportFailure>>>>,
    hits: Mutex<HashMap<String, u32>>,
}

impl ScriptedTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn script(&self, url: &str, result: Result<TransportResponse, TransportFailure>) {
        self.scripts
            .lock()
            .expect("script lock")
            .entry(url.to_string())
            .or_default()
            .push_back(result);
    }

    pub fn script_ok(&self, url: &str, body: &[u8]) {
        self.script(
            url,
            Ok(TransportResponse {
                status: 200,
                body: body.to_vec(),
                content_type: None,
            }),
        );
    }

    pub fn script_status(&self, url: &str, status: u16) {
        self.script(
            url,
            Ok(TransportResponse {
                status,
                body: Vec::new(),
                content_type: None,
            }),
        );
    }

    pub fn script_failure(&self, url: &str, detail: &str) {
        self.script(
            url,
            Err(TransportFailure {
                detail: detail.to_string(),
            }),
        );
    }

    /// Number of get() calls observed for `url`.
    pub fn hits(&self, url: &str) -> u32 {
        self.hits
            .lock()
            .expect("hits lock")
            .get(url)
            .copied()
            .unwrap_or(0)
    }
}

impl Transport for ScriptedTransport {
    fn get(&self, url: &str) -> Result<TransportResponse, TransportFailure> {
        *self
            .hits
            .lock()
            .expect("hits lock")
            .entry(url.to_string())
            .or_insert(0) += 1;
        let mut scripts = self.scripts.lock().expect("script lock");
        match scripts.get_mut(url) {
            Some(queue) if queue.len() > 1 => queue.pop_front().expect("non-empty queue"),
            Some(queue) if queue.len() == 1 => queue.front().expect("non-empty queue").clone(),
            _ => Err(TransportFailure {
                detail: format!("unscripted url {url:?}"),
            }),
        }
    }
}
