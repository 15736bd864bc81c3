use std::env;

use crate::FormalizerError;

pub const ENV_URL: &str = "FORMALIZER_URL";
pub const ENV_MODEL: &str = "FORMALIZER_MODEL";
pub const ENV_API_KEY_ENV: &str = "FORMALIZER_API_KEY_ENV";

pub const DEFAULT_MODEL: &str = "deepseek-ai/DeepSeek-Prover-V2-7B";
pub const DEFAULT_TIMEOUT_SECS: u64 = 120;
pub const DEFAULT_MAX_RETRIES: u32 = 2;

/// Connection and decoding settings. The API key is referenced by the name
/// of the environment variable that holds it, never stored here.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalizerConfig {
    /// Full chat-completions URL, e.g. `http://host:8000/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    pub api_key_env: Option<String>,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub temperature: f64,
    /// Candidates drawn by [`crate::formalize_samples`]; the pipeline uses one.
    pub samples: u32,
}

impl Default for FormalizerConfig {
    fn default() -> Self {
        FormalizerConfig {
            endpoint: String::new(),
            model: DEFAULT_MODEL.to_string(),
            api_key_env: None,
            timeout_secs: DEFAULT_TIMEOUT_SECS,
            max_retries: DEFAULT_MAX_RETRIES,
            temperature: 0.0,
            samples: 1,
        }
    }
}

impl FormalizerConfig {
    /// Reads `FORMALIZER_URL`, `FORMALIZER_MODEL` and
    /// `FORMALIZER_API_KEY_ENV`; everything else keeps its default.
    pub fn from_env() -> Result<FormalizerConfig, FormalizerError> {
        Self::from_lookup(|k| env::var(k).ok())
    }

    pub fn from_lookup(
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<FormalizerConfig, FormalizerError> {
        let non_empty = |k: &str| lookup(k).filter(|v| !v.trim().is_empty());
        let endpoint = non_empty(ENV_URL)
            .ok_or_else(|| FormalizerError::Config(format!("{ENV_URL} is not set")))?;
        let mut cfg = FormalizerConfig { endpoint, ..FormalizerConfig::default() };
        if let Some(m) = non_empty(ENV_MODEL) {
            cfg.model = m;
        }
        cfg.api_key_env = non_empty(ENV_API_KEY_ENV);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FormalizerError> {
        if self.timeout_secs == 0 {
            return Err(FormalizerError::Config("timeout must be positive".into()));
        }
        if self.samples == 0 {
            return Err(FormalizerError::Config("sample count must be positive".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(FormalizerError::Config(format!(
                "temperature must be a non-negative number, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Resolves the referenced API key, if any.
    pub(crate) fn api_key(&self) -> Result<Option<String>, FormalizerError> {
        match &self.api_key_env {
            None => Ok(None),
            Some(name) => env::var(name).map(Some).map_err(|_| {
                FormalizerError::Config(format!(
                    "{ENV_API_KEY_ENV} names `{name}`, which is not set"
                ))
            }),
        }
    }
}
