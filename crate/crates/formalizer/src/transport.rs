//! How chat requests reach a model: live HTTP, recorded fixtures, or a
//! recorder wrapped around either.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::FormalizerConfig;
use crate::FormalizerError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: "system".into(), content: content.into() }
    }
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: "user".into(), content: content.into() }
    }
    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: "assistant".into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    #[serde(default)]
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Unreachable(String),
    Timeout,
}

pub trait Transport {
    /// Content of the single returned choice.
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &T {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

pub struct HttpTransport {
    endpoint: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpTransport")
            .field("endpoint", &self.endpoint)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpTransport {
    pub fn new(cfg: &FormalizerConfig) -> Result<HttpTransport, FormalizerError> {
        cfg.validate()?;
        if cfg.endpoint.is_empty() {
            return Err(FormalizerError::Config("no endpoint configured".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| FormalizerError::Config(format!("HTTP client: {e}")))?;
        Ok(HttpTransport {
            endpoint: cfg.endpoint.clone(),
            api_key: cfg.api_key()?,
            client,
        })
    }
}

impl Transport for HttpTransport {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let mut builder = self.client.post(&self.endpoint).json(request);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        let classify = |e: reqwest::Error| {
            if e.is_timeout() {
                TransportError::Timeout
            } else {
                TransportError::Unreachable(e.without_url().to_string())
            }
        };
        let response = builder.send().map_err(classify)?;
        let status = response.status();
        if !status.is_success() {
            return Err(TransportError::Unreachable(format!("HTTP status {status}")));
        }
        let body: WireResponse = response.json().map_err(classify)?;
        body.choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| TransportError::Unreachable("response has no message content".into()))
    }
}

/// What a fixture records in place of a reply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordedFailure {
    Unreachable,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: ChatRequest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<RecordedFailure>,
}

/// On-disk fixture: a list of exchanges.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub exchanges: Vec<Exchange>,
}

impl Fixture {
    pub fn load(path: &Path) -> Result<Fixture, FormalizerError> {
        let text = fs::read_to_string(path)
            .map_err(|e| FormalizerError::Fixture(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| FormalizerError::Fixture(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), FormalizerError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| FormalizerError::Fixture(e.to_string()))?;
        fs::write(path, text + "\n")
            .map_err(|e| FormalizerError::Fixture(format!("{}: {e}", path.display())))
    }
}

/// Answers from recorded exchanges. A request matches an exchange when the
/// message lists are identical; model and temperature are ignored.
#[derive(Debug, Clone, Default)]
pub struct ReplayTransport {
    exchanges: Vec<Exchange>,
}

impl ReplayTransport {
    pub fn new(exchanges: Vec<Exchange>) -> ReplayTransport {
        ReplayTransport { exchanges }
    }

    /// A single fixture file, or every `*.json` file of a directory in
    /// name order.
    pub fn load(path: &Path) -> Result<ReplayTransport, FormalizerError> {
        let mut files: Vec<PathBuf> = if path.is_dir() {
            fs::read_dir(path)
                .map_err(|e| FormalizerError::Fixture(format!("{}: {e}", path.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect()
        } else {
            vec![path.to_path_buf()]
        };
        files.sort();
        let mut exchanges = Vec::new();
        for f in &files {
            exchanges.extend(Fixture::load(f)?.exchanges);
        }
        Ok(ReplayTransport { exchanges })
    }

    pub fn len(&self) -> usize {
        self.exchanges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exchanges.is_empty()
    }
}

impl Transport for ReplayTransport {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let hit = self
            .exchanges
            .iter()
            .find(|x| x.request.messages == request.messages)
            .ok_or_else(|| {
                TransportError::Unreachable("no recorded exchange matches this request".into())
            })?;
        match (&hit.response, hit.failure) {
            (_, Some(RecordedFailure::Timeout)) => Err(TransportError::Timeout),
            (_, Some(RecordedFailure::Unreachable)) | (None, None) => {
                Err(TransportError::Unreachable("recorded as unreachable".into()))
            }
            (Some(r), None) => Ok(r.clone()),
        }
    }
}

/// Forwards to `inner` and rewrites the fixture at `path` after every call.
pub struct RecordingTransport<T> {
    inner: T,
    path: PathBuf,
    fixture: Mutex<Fixture>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, path: impl Into<PathBuf>) -> RecordingTransport<T> {
        RecordingTransport { inner, path: path.into(), fixture: Mutex::new(Fixture::default()) }
    }

    pub fn fixture(&self) -> Fixture {
        self.fixture.lock().expect("recorder poisoned").clone()
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let result = self.inner.complete(request);
        let exchange = Exchange {
            request: request.clone(),
            response: result.as_ref().ok().cloned(),
            failure: match &result {
                Ok(_) => None,
                Err(TransportError::Timeout) => Some(RecordedFailure::Timeout),
                Err(TransportError::Unreachable(_)) => Some(RecordedFailure::Unreachable),
            },
        };
        let mut fixture = self.fixture.lock().expect("recorder poisoned");
        fixture.exchanges.push(exchange);
        // A failed write must not mask the model's answer.
        let _ = fixture.save(&self.path);
        result
    }
}
