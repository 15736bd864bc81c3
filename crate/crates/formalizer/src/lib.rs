//! Chat-completion client that asks a model for Lean formalizations and
//! proofs, validating every answer through the Lean subset parser.
//!
//! Transports are pluggable: [`HttpTransport`] talks to a live endpoint,
//! [`ReplayTransport`] answers from recorded fixtures, and
//! [`RecordingTransport`] captures new fixtures.

pub mod config;
pub mod prompt;
pub mod transport;

use reqverify_core::ir::{Formula, Signature};
use reqverify_core::lean::{parse_lean_def, LeanError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::FormalizerConfig;
pub use prompt::{extract_lean_block, render_formalize_prompt, render_prove_prompt};
pub use transport::{
    ChatMessage, ChatRequest, Exchange, Fixture, HttpTransport, RecordedFailure,
    RecordingTransport, ReplayTransport, Transport, TransportError,
};

/// Everything sent and received during one call, for audit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
    /// Requests sent, including ones that failed in transit.
    pub requests: u32,
    /// Transport failures and rejected answers, in order.
    pub events: Vec<String>,
}

#[derive(Debug, Error)]
pub enum FormalizerError {
    #[error("USAGE: {0}")]
    Usage(String),
    #[error("FORMALIZER_CONFIG: {0}")]
    Config(String),
    #[error("FIXTURE: {0}")]
    Fixture(String),
    #[error("SERVICE_UNREACHABLE: {message}")]
    ServiceUnreachable { message: String, transcript: Box<Transcript> },
    #[error("TIMEOUT: no answer within {seconds} s")]
    Timeout { seconds: u64, transcript: Box<Transcript> },
    #[error("NO_CODE_BLOCK: the answer has no ```lean4 block")]
    NoCodeBlock { transcript: Box<Transcript> },
    #[error("INVALID_LEAN after {attempts} answers: {last}")]
    InvalidLean { attempts: u32, last: LeanError, transcript: Box<Transcript> },
}

impl FormalizerError {
    pub fn code(&self) -> &'static str {
        match self {
            FormalizerError::Usage(_) => "USAGE",
            FormalizerError::Config(_) => "FORMALIZER_CONFIG",
            FormalizerError::Fixture(_) => "FIXTURE",
            FormalizerError::ServiceUnreachable { .. } => "SERVICE_UNREACHABLE",
            FormalizerError::Timeout { .. } => "TIMEOUT",
            FormalizerError::NoCodeBlock { .. } => "NO_CODE_BLOCK",
            FormalizerError::InvalidLean { .. } => "INVALID_LEAN",
        }
    }

    pub fn transcript(&self) -> Option<&Transcript> {
        match self {
            FormalizerError::ServiceUnreachable { transcript, .. }
            | FormalizerError::Timeout { transcript, .. }
            | FormalizerError::NoCodeBlock { transcript }
            | FormalizerError::InvalidLean { transcript, .. } => Some(transcript),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Formalization {
    pub formula: Formula,
    pub signature: Signature,
    /// The accepted Lean block.
    pub lean: String,
    pub transcript: Transcript,
}

#[derive(Debug, Clone)]
pub struct ProofAttempt {
    /// The first `lean4` block of the answer, unjudged.
    pub proof: String,
    /// False when the text still contains `sorry` or `admit`.
    pub completed: bool,
    pub transcript: Transcript,
}

struct Session<'a, T: Transport> {
    cfg: &'a FormalizerConfig,
    transport: T,
    transcript: Transcript,
}

impl<'a, T: Transport> Session<'a, T> {
    fn new(cfg: &'a FormalizerConfig, transport: T, user: String) -> Self {
        Session {
            cfg,
            transport,
            transcript: Transcript {
                model: cfg.model.clone(),
                temperature: cfg.temperature,
                messages: vec![
                    ChatMessage::system(prompt::SYSTEM_PROMPT),
                    ChatMessage::user(user),
                ],
                requests: 0,
                events: Vec::new(),
            },
        }
    }

    /// Sends the conversation so far, retrying transport failures.
    fn ask(&mut self) -> Result<String, FormalizerError> {
        let request = ChatRequest {
            model: self.cfg.model.clone(),
            messages: self.transcript.messages.clone(),
            temperature: self.cfg.temperature,
        };
        let mut last = TransportError::Timeout;
        for _ in 0..=self.cfg.max_retries {
            self.transcript.requests += 1;
            match self.transport.complete(&request) {
                Ok(reply) => {
                    self.transcript.messages.push(ChatMessage::assistant(reply.clone()));
                    return Ok(reply);
                }
                Err(e) => {
                    self.transcript.events.push(match &e {
                        TransportError::Timeout => "TIMEOUT".to_string(),
                        TransportError::Unreachable(m) => format!("SERVICE_UNREACHABLE: {m}"),
                    });
                    last = e;
                }
            }
        }
        let transcript = Box::new(self.transcript.clone());
        Err(match last {
            TransportError::Timeout => {
                FormalizerError::Timeout { seconds: self.cfg.timeout_secs, transcript }
            }
            TransportError::Unreachable(message) => {
                FormalizerError::ServiceUnreachable { message, transcript }
            }
        })
    }

    fn block(&self, reply: &str) -> Result<String, FormalizerError> {
        extract_lean_block(reply).ok_or_else(|| FormalizerError::NoCodeBlock {
            transcript: Box::new(self.transcript.clone()),
        })
    }
}

/// Asks the model to formalize `requirement` and validates the answer.
/// Rejected Lean is sent back with a correction request up to
/// `cfg.max_retries` times.
pub fn formalize_remote<T: Transport>(
    requirement: &str,
    cfg: &FormalizerConfig,
    transport: T,
) -> Result<Formalization, FormalizerError> {
    if requirement.trim().is_empty() {
        return Err(FormalizerError::Usage("requirement text is empty".into()));
    }
    cfg.validate()?;
    let mut s = Session::new(cfg, transport, render_formalize_prompt(requirement));
    let mut answers = 0;
    loop {
        let reply = s.ask()?;
        answers += 1;
        let lean = s.block(&reply)?;
        match parse_lean_def(&lean) {
            Ok((formula, signature)) => {
                return Ok(Formalization { formula, signature, lean, transcript: s.transcript })
            }
            Err(e) => {
                s.transcript.events.push(e.to_string());
                if answers > cfg.max_retries {
                    return Err(FormalizerError::InvalidLean {
                        attempts: answers,
                        last: e,
                        transcript: Box::new(s.transcript),
                    });
                }
                s.transcript.messages.push(ChatMessage::user(prompt::correction_prompt(&e.to_string())));
            }
        }
    }
}

/// Draws `cfg.samples` independent formalizations.
pub fn formalize_samples<T: Transport>(
    requirement: &str,
    cfg: &FormalizerConfig,
    transport: T,
) -> Vec<Result<Formalization, FormalizerError>> {
    (0..cfg.samples.max(1))
        .map(|_| formalize_remote(requirement, cfg, &transport))
        .collect()
}

/// Sends an equivalence theorem to the model and returns its continuation.
/// The answer is not judged; the verdict of record stays with the engine.
pub fn prove_remote<T: Transport>(
    theorem_text: &str,
    cfg: &FormalizerConfig,
    transport: T,
) -> Result<ProofAttempt, FormalizerError> {
    if theorem_text.trim().is_empty() {
        return Err(FormalizerError::Usage("theorem text is empty".into()));
    }
    cfg.validate()?;
    let mut s = Session::new(cfg, transport, render_prove_prompt(theorem_text));
    let reply = s.ask()?;
    let proof = s.block(&reply)?;
    let completed = !proof
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .any(|w| w == "sorry" || w == "admit");
    Ok(ProofAttempt { proof, completed, transcript: s.transcript })
}
