//! JSON-over-HTTP remote backend.
//!
//! One POST per model call, no streaming. Request body:
//!
//! ```json
//! {"task": "generate", "input": "<string>", "params": {"max_length": 256}}
//! ```
//!
//! Response body: `{"output": "<string>"}` for generate/summarize tasks,
//! `{"logits": [c, n, e]}` for nli, `{"tokens": [...]}` for annotate.
//! Transport failures and non-2xx statuses are retried up to the configured
//! count; schema-invalid responses fail immediately and carry the raw body
//! for debugging.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::annotation::{annotation_from_wire, Annotation, WireToken};
use super::{
    Backend, BackendCapabilities, BackendError, Decoding, GenerationRequest, NliLogits, Task,
};

/// Wire request object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRequest {
    pub task: Task,
    pub input: String,
    #[serde(default)]
    pub params: WireParams,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
}

/// Parsed wire response, one variant per response shape.
#[derive(Debug, Clone, PartialEq)]
pub enum WireResponse {
    Output(String),
    Logits(NliLogits),
    Tokens(Vec<WireToken>),
}

#[derive(Debug, Clone)]
pub struct RemoteOptions {
    pub timeout: Duration,
    /// Additional attempts after the first failed one.
    pub retries: u32,
}

impl Default for RemoteOptions {
    fn default() -> Self {
        RemoteOptions { timeout: Duration::from_secs(10), retries: 2 }
    }
}

/// POST `payload` to `endpoint` and parse the response for its task,
/// retrying transport failures and non-2xx statuses.
pub fn call_remote(
    endpoint: &str,
    payload: &WireRequest,
    options: &RemoteOptions,
) -> Result<WireResponse, BackendError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(options.timeout)
        .build()
        .map_err(|e| BackendError::Transport { attempts: 0, message: e.to_string() })?;

    let max_attempts = options.retries + 1;
    let mut last_err = None;
    for attempt in 1..=max_attempts {
        match client.post(endpoint).json(payload).send() {
            Err(e) => {
                last_err = Some(BackendError::Transport { attempts: attempt, message: e.to_string() });
            }
            Ok(resp) => {
                let status = resp.status();
                let body = resp.text().map_err(|e| BackendError::Transport {
                    attempts: attempt,
                    message: e.to_string(),
                })?;
                if !status.is_success() {
                    last_err = Some(BackendError::Status {
                        status: status.as_u16(),
                        attempts: attempt,
                        body,
                    });
                    continue;
                }
                return parse_response(payload.task, &body);
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn parse_response(task: Task, body: &str) -> Result<WireResponse, BackendError> {
    let schema_err = |message: String| BackendError::Schema { message, body: body.to_string() };
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| schema_err(format!("not JSON: {e}")))?;
    match task {
        Task::Generate | Task::SummarizeExt | Task::SummarizeAbs => {
            let out = value
                .get("output")
                .and_then(|v| v.as_str())
                .ok_or_else(|| schema_err("missing string field \"output\"".into()))?;
            Ok(WireResponse::Output(out.to_string()))
        }
        Task::Nli => {
            let arr: [f64; 3] = value
                .get("logits")
                .cloned()
                .map(serde_json::from_value)
                .transpose()
                .map_err(|e| schema_err(format!("bad \"logits\": {e}")))?
                .ok_or_else(|| schema_err("missing field \"logits\"".into()))?;
            let logits = NliLogits::new(arr[0], arr[1], arr[2])
                .map_err(|e| schema_err(e.to_string()))?;
            Ok(WireResponse::Logits(logits))
        }
        Task::Annotate => {
            let tokens: Vec<WireToken> = value
                .get("tokens")
                .cloned()
                .map(serde_json::from_value)
                .transpose()
                .map_err(|e| schema_err(format!("bad \"tokens\": {e}")))?
                .ok_or_else(|| schema_err("missing field \"tokens\"".into()))?;
            Ok(WireResponse::Tokens(tokens))
        }
    }
}

/// A backend that forwards every call to one HTTP endpoint.
pub struct RemoteBackend {
    endpoint: String,
    options: RemoteOptions,
    caps: BackendCapabilities,
}

impl RemoteBackend {
    /// By default a remote endpoint is assumed to serve all five tasks;
    /// narrow with [`RemoteBackend::with_tasks`] when routing tasks to
    /// different servers.
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteBackend {
            endpoint: endpoint.into(),
            options: RemoteOptions::default(),
            caps: BackendCapabilities::all(true),
        }
    }

    pub fn with_options(mut self, options: RemoteOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_tasks(mut self, tasks: impl IntoIterator<Item = Task>) -> Self {
        self.caps.supports = tasks.into_iter().collect();
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn check(&self, task: Task) -> Result<(), BackendError> {
        if self.caps.supports(task) {
            Ok(())
        } else {
            Err(BackendError::Unsupported(task))
        }
    }

    fn call(&self, task: Task, input: &str, params: WireParams) -> Result<WireResponse, BackendError> {
        self.check(task)?;
        let payload = WireRequest { task, input: input.to_string(), params };
        call_remote(&self.endpoint, &payload, &self.options)
    }

    fn expect_output(resp: WireResponse) -> Result<String, BackendError> {
        match resp {
            WireResponse::Output(s) => Ok(s),
            other => Err(BackendError::Schema {
                message: "expected an \"output\" response".into(),
                body: format!("{other:?}"),
            }),
        }
    }
}

impl Backend for RemoteBackend {
    fn capabilities(&self) -> &BackendCapabilities {
        &self.caps
    }

    fn generate(&self, request: &GenerationRequest) -> Result<String, BackendError> {
        let Decoding::Greedy = request.decoding;
        let params = WireParams { max_length: Some(request.max_length) };
        Self::expect_output(self.call(Task::Generate, &request.prompt, params)?)
    }

    fn nli_logits(&self, packed_input: &str) -> Result<NliLogits, BackendError> {
        match self.call(Task::Nli, packed_input, WireParams::default())? {
            WireResponse::Logits(l) => Ok(l),
            other => Err(BackendError::Schema {
                message: "expected a \"logits\" response".into(),
                body: format!("{other:?}"),
            }),
        }
    }

    fn annotate(&self, text: &str) -> Result<Annotation, BackendError> {
        if text.trim().is_empty() {
            return Ok(Annotation::empty());
        }
        match self.call(Task::Annotate, text, WireParams::default())? {
            WireResponse::Tokens(tokens) => annotation_from_wire(tokens),
            other => Err(BackendError::Schema {
                message: "expected a \"tokens\" response".into(),
                body: format!("{other:?}"),
            }),
        }
    }

    fn summarize_extractive(&self, input: &str) -> Result<String, BackendError> {
        Self::expect_output(self.call(Task::SummarizeExt, input, WireParams::default())?)
    }

    fn summarize_abstractive(&self, input: &str) -> Result<String, BackendError> {
        Self::expect_output(self.call(Task::SummarizeAbs, input, WireParams::default())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_serializes_to_wire_schema() {
        let req = WireRequest {
            task: Task::Generate,
            input: "prompt".into(),
            params: WireParams { max_length: Some(256) },
        };
        let v = serde_json::to_value(&req).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"task": "generate", "input": "prompt", "params": {"max_length": 256}})
        );
    }

    #[test]
    fn params_omitted_when_unset() {
        let req = WireRequest { task: Task::Nli, input: "x".into(), params: WireParams::default() };
        let v = serde_json::to_value(&req).unwrap();
        assert_eq!(v["params"], serde_json::json!({}));
    }

    #[test]
    fn parses_output_response() {
        let r = parse_response(Task::Generate, r#"{"output": "hello"}"#).unwrap();
        assert_eq!(r, WireResponse::Output("hello".into()));
    }

    #[test]
    fn wrong_output_type_is_schema_error() {
        let err = parse_response(Task::Generate, r#"{"output": 3}"#).unwrap_err();
        match err {
            BackendError::Schema { body, .. } => assert_eq!(body, r#"{"output": 3}"#),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn parses_logits_response() {
        let r = parse_response(Task::Nli, r#"{"logits": [3.0, -1.0, -2.0]}"#).unwrap();
        assert_eq!(r, WireResponse::Logits(NliLogits::new(3.0, -1.0, -2.0).unwrap()));
        assert!(parse_response(Task::Nli, r#"{"logits": [1.0, 2.0]}"#).is_err());
        assert!(parse_response(Task::Nli, r#"{"logits": "high"}"#).is_err());
    }

    #[test]
    fn parses_tokens_response() {
        let body = r#"{"tokens": [{"text": "Hi", "pos": "INTJ", "root": true}]}"#;
        match parse_response(Task::Annotate, body).unwrap() {
            WireResponse::Tokens(toks) => assert_eq!(toks[0].text, "Hi"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn garbage_body_is_schema_error() {
        assert!(matches!(
            parse_response(Task::Generate, "<html>oops</html>"),
            Err(BackendError::Schema { .. })
        ));
    }

    #[test]
    fn unreachable_endpoint_reports_attempts() {
        // port 9 (discard) on localhost is not listening
        let opts = RemoteOptions { timeout: Duration::from_millis(200), retries: 1 };
        let payload = WireRequest {
            task: Task::Generate,
            input: "x".into(),
            params: WireParams::default(),
        };
        let err = call_remote("http://127.0.0.1:9/", &payload, &opts).unwrap_err();
        match err {
            BackendError::Transport { attempts, .. } => assert_eq!(attempts, 2),
            other => panic!("expected transport error, got {other:?}"),
        }
    }

    #[test]
    fn capability_narrowing_is_enforced() {
        let remote = RemoteBackend::new("http://127.0.0.1:9/").with_tasks([Task::Nli]);
        let req = GenerationRequest::greedy("p", 1).unwrap();
        assert!(matches!(remote.generate(&req), Err(BackendError::Unsupported(Task::Generate))));
    }
}
