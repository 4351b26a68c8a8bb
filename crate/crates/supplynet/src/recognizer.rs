//! Entity recognizers used by the pipeline's recognize stage.

use std::time::Duration;

use serde_json::json;
use supplynet_core::recognize::{mentions_from_names, parse_name_array, supplier_prompt, CandidateMention, Gazetteer};
use supplynet_core::{Company, RecognizeError};

pub trait EntityRecognizer: Send + Sync {
    fn id(&self) -> &str;
    fn recognize(&self, company: &Company, text: &str, url: &str) -> Result<Vec<CandidateMention>, RecognizeError>;
}

pub struct GazetteerRecognizer(pub Gazetteer);

impl EntityRecognizer for GazetteerRecognizer {
    fn id(&self) -> &str {
        supplynet_core::recognize::GAZETTEER_ID
    }

    fn recognize(&self, _company: &Company, text: &str, url: &str) -> Result<Vec<CandidateMention>, RecognizeError> {
        Ok(self.0.recognize(text, url))
    }
}

pub const DEFAULT_LLM_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_LLM_MODEL: &str = "gpt-4o";
const CHUNK_CHARS: usize = 12_000;

/// Client for an OpenAI-compatible chat-completions endpoint. Decoding is
/// deterministic (temperature 0) and every reply must be a JSON name array.
pub struct LlmRecognizer {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl LlmRecognizer {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        LlmRecognizer {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: api_key.filter(|k| !k.is_empty()),
            agent,
        }
    }

    /// Reads `LLM_API_KEY`, and optionally `LLM_ENDPOINT` and `LLM_MODEL`.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var("LLM_ENDPOINT").unwrap_or_else(|_| DEFAULT_LLM_ENDPOINT.into()),
            std::env::var("LLM_MODEL").unwrap_or_else(|_| DEFAULT_LLM_MODEL.into()),
            std::env::var("LLM_API_KEY").ok(),
        )
    }

    pub fn has_credentials(&self) -> bool {
        self.api_key.is_some()
    }

    fn complete(&self, key: &str, prompt: &str) -> Result<String, RecognizeError> {
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "top_p": 1,
            "seed": 0,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {key}"))
            .send_json(&body)
            .map_err(|e| RecognizeError::Unavailable(e.to_string()))?;
        let reply: serde_json::Value = response
            .body_mut()
            .read_json()
            .map_err(|e| RecognizeError::MalformedResponse(e.to_string()))?;
        content_of(&reply)
    }
}

fn content_of(reply: &serde_json::Value) -> Result<String, RecognizeError> {
    reply["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| RecognizeError::MalformedResponse("reply has no message content".into()))
}

/// Splits text on character boundaries into pieces of at most `max` chars,
/// preferring to cut at line breaks.
pub fn chunk_text(text: &str, max: usize) -> Vec<&str> {
    let mut chunks = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        if rest.chars().count() <= max {
            chunks.push(rest);
            break;
        }
        let hard = rest.char_indices().nth(max).map(|(i, _)| i).unwrap_or(rest.len());
        let cut = rest[..hard].rfind('\n').filter(|&i| i > 0).map(|i| i + 1).unwrap_or(hard);
        chunks.push(&rest[..cut]);
        rest = &rest[cut..];
    }
    chunks
}

impl EntityRecognizer for LlmRecognizer {
    fn id(&self) -> &str {
        "llm"
    }

    fn recognize(&self, company: &Company, text: &str, url: &str) -> Result<Vec<CandidateMention>, RecognizeError> {
        let key = self
            .api_key
            .as_deref()
            .ok_or_else(|| RecognizeError::Unavailable("LLM_API_KEY is not set".into()))?;
        let mut names = Vec::new();
        for chunk in chunk_text(text, CHUNK_CHARS) {
            let reply = self.complete(key, &supplier_prompt(&company.legal_name, chunk))?;
            names.extend(parse_name_array(strip_fence(&reply))?);
        }
        Ok(mentions_from_names(names, url, self.id()))
    }
}

// Models sometimes wrap JSON in a markdown code fence.
fn strip_fence(reply: &str) -> &str {
    let t = reply.trim();
    match t.strip_prefix("```") {
        Some(inner) => {
            let inner = inner.strip_prefix("json").unwrap_or(inner);
            inner.strip_suffix("```").unwrap_or(inner).trim()
        }
        None => t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use supplynet_core::MetadataSource;

    #[test]
    fn gazetteer_recognizer() {
        let reg: Vec<Company> = ["Acme Corp", "Beta Ltd"]
            .iter()
            .map(|n| Company::named(n, MetadataSource::Seed).unwrap())
            .collect();
        let r = GazetteerRecognizer(Gazetteer::new(reg.iter()));
        let m = r.recognize(&reg[0], "We buy from Acme Corp and Beta Ltd", "u").unwrap();
        assert_eq!(m.len(), 2);
        assert!(r.recognize(&reg[0], "", "u").unwrap().is_empty());
    }

    #[test]
    fn llm_without_key_is_unavailable() {
        let r = LlmRecognizer::new(DEFAULT_LLM_ENDPOINT, DEFAULT_LLM_MODEL, None);
        let c = Company::named("Acme", MetadataSource::Seed).unwrap();
        assert!(matches!(r.recognize(&c, "text", "u"), Err(RecognizeError::Unavailable(_))));
    }

    #[test]
    fn reply_handling() {
        let reply = json!({"choices":[{"message":{"content":"```json\n[\"Acme\"]\n```"}}]});
        let content = content_of(&reply).unwrap();
        assert_eq!(parse_name_array(strip_fence(&content)).unwrap(), ["Acme"]);
        assert!(matches!(parse_name_array(strip_fence("not json")), Err(RecognizeError::MalformedResponse(_))));
        assert!(content_of(&json!({})).is_err());
    }

    #[test]
    fn chunks_cover_text() {
        let text = "line one\nline two\nline three\n";
        let chunks = chunk_text(text, 12);
        assert_eq!(chunks.concat(), text);
        assert!(chunks.iter().all(|c| c.chars().count() <= 12));
        assert!(chunk_text("", 5).is_empty());
        assert_eq!(chunk_text("ééééé", 2).concat(), "ééééé");
    }
}
