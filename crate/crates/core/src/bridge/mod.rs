//! Host side of the external matcher protocol.
//!
//! Out-of-process matchers (neural scorers and the like) speak newline
//! delimited JSON over their standard input and output:
//!
//! ```text
//! -> {"id":1,"pairs":[{"hyp":"...","prem":"..."}]}
//! <- {"id":1,"scores":[0.42]}
//! <- {"id":1,"error":"model crashed"}
//! ```
//!
//! One connection is strictly request/response. Scores are clamped into
//! `[0, 1]`.

pub mod stub;

use std::io::{self, BufRead, BufReader, Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::matchers::Matcher;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_BATCH_SIZE: usize = 64;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("failed to start bridge command `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: io::Error,
    },
    #[error("bridge batch {batch_id} ({pairs} pairs, first hyp {first_hyp:?}) timed out after {timeout:?}")]
    Timeout {
        batch_id: u64,
        pairs: usize,
        first_hyp: String,
        timeout: Duration,
    },
    #[error("bridge batch {batch_id}: protocol error: {message}")]
    Protocol { batch_id: i64, message: String },
    #[error("bridge batch {batch_id}: matcher failed: {message}")]
    Remote { batch_id: i64, message: String },
    #[error("bridge closed the connection while batch {batch_id} was pending")]
    Closed { batch_id: u64 },
    #[error("bridge connection is unusable after an earlier failure")]
    Poisoned,
    #[error("invalid bridge configuration: {0}")]
    Config(String),
    #[error("bridge i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgePair {
    pub hyp: String,
    pub prem: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeRequest {
    pub id: u64,
    pub pairs: Vec<BridgePair>,
}

/// A response line, either scores or a batch-wide failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BridgeResponse {
    Scores { id: i64, scores: Vec<f64> },
    Error { id: i64, error: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeConfig {
    /// Program and arguments of the matcher process.
    pub argv: Vec<String>,
    /// Upper-case matcher name used in metric names (`S1-<label>`).
    pub label: String,
    pub timeout: Duration,
    pub batch_size: usize,
}

impl BridgeConfig {
    pub fn new(argv: Vec<String>) -> Self {
        BridgeConfig {
            argv,
            label: "EXTERNAL".to_owned(),
            timeout: DEFAULT_TIMEOUT,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }

    /// Splits a shell-style command line into argv.
    pub fn from_command_line(cmd: &str) -> Result<Self, BridgeError> {
        let argv = shlex::split(cmd)
            .ok_or_else(|| BridgeError::Config(format!("cannot parse bridge command `{cmd}`")))?;
        let cfg = BridgeConfig::new(argv);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BridgeError> {
        if self.argv.is_empty() {
            return Err(BridgeError::Config("empty bridge command".into()));
        }
        if self.batch_size == 0 {
            return Err(BridgeError::Config("batch size must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(BridgeError::Config("timeout must be positive".into()));
        }
        Ok(())
    }
}

/// A connection to one external matcher.
pub struct BridgeClient {
    writer: Option<Box<dyn Write + Send>>,
    responses: Receiver<io::Result<String>>,
    child: Option<Child>,
    next_id: u64,
    timeout: Duration,
    batch_size: usize,
    label: String,
    poisoned: bool,
}

impl std::fmt::Debug for BridgeClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BridgeClient")
            .field("label", &self.label)
            .field("next_id", &self.next_id)
            .field("child", &self.child.as_ref().map(Child::id))
            .finish()
    }
}

impl BridgeClient {
    /// Starts the matcher process described by `config`.
    pub fn spawn(config: &BridgeConfig) -> Result<Self, BridgeError> {
        config.validate()?;
        let mut child = Command::new(&config.argv[0])
            .args(&config.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| BridgeError::Spawn {
                command: config.argv.join(" "),
                source,
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut client = BridgeClient::from_streams(stdout, stdin, config);
        client.child = Some(child);
        Ok(client)
    }

    /// Talks the protocol over arbitrary streams: responses are read from
    /// `reader`, requests written to `writer`.
    pub fn from_streams<R, W>(reader: R, writer: W, config: &BridgeConfig) -> Self
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        BridgeClient {
            writer: Some(Box::new(writer)),
            responses: rx,
            child: None,
            next_id: 1,
            timeout: config.timeout,
            batch_size: config.batch_size.max(1),
            label: config.label.clone(),
            poisoned: false,
        }
    }

    /// Serves `scorer` from a thread of this process through OS pipes.
    pub fn in_process<F>(scorer: F, config: &BridgeConfig) -> Result<Self, BridgeError>
    where
        F: FnMut(&str, &str) -> Result<f64, String> + Send + 'static,
    {
        let (req_reader, req_writer) = io::pipe()?;
        let (resp_reader, resp_writer) = io::pipe()?;
        thread::spawn(move || {
            let _ = stub::serve(BufReader::new(req_reader), resp_writer, scorer);
        });
        Ok(BridgeClient::from_streams(resp_reader, req_writer, config))
    }

    /// Sends one request with all `pairs` and waits for its response.
    pub fn score_batch(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, BridgeError> {
        if self.poisoned {
            return Err(BridgeError::Poisoned);
        }
        let id = self.next_id;
        self.next_id += 1;
        let result = self.round_trip(id, pairs);
        if result.is_err() {
            self.poisoned = !matches!(result, Err(BridgeError::Remote { .. }));
        }
        result
    }

    fn round_trip(&mut self, id: u64, pairs: &[(&str, &str)]) -> Result<Vec<f64>, BridgeError> {
        if pairs.is_empty() {
            return Ok(Vec::new());
        }
        let request = BridgeRequest {
            id,
            pairs: pairs
                .iter()
                .map(|(h, p)| BridgePair {
                    hyp: (*h).to_owned(),
                    prem: (*p).to_owned(),
                })
                .collect(),
        };
        let mut line = serde_json::to_string(&request).expect("request serializes");
        line.push('\n');
        let writer = self.writer.as_mut().ok_or(BridgeError::Poisoned)?;
        let sent = writer.write_all(line.as_bytes()).and_then(|_| writer.flush());
        if let Err(e) = sent {
            return Err(match e.kind() {
                io::ErrorKind::BrokenPipe => BridgeError::Closed { batch_id: id },
                _ => BridgeError::Io(e),
            });
        }

        let deadline = Instant::now() + self.timeout;
        let reply = loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            match self.responses.recv_timeout(remaining) {
                Ok(Ok(text)) if text.trim().is_empty() => continue,
                Ok(Ok(text)) => break text,
                Ok(Err(e)) => return Err(BridgeError::Io(e)),
                Err(RecvTimeoutError::Timeout) => {
                    return Err(BridgeError::Timeout {
                        batch_id: id,
                        pairs: pairs.len(),
                        first_hyp: pairs[0].0.chars().take(60).collect(),
                        timeout: self.timeout,
                    })
                }
                Err(RecvTimeoutError::Disconnected) => return Err(BridgeError::Closed { batch_id: id }),
            }
        };
        parse_response(&reply, id, pairs.len())
    }
}

/// Validates one response line against the request it answers.
pub fn parse_response(line: &str, expected_id: u64, expected_len: usize) -> Result<Vec<f64>, BridgeError> {
    let batch_id = expected_id as i64;
    let protocol = |message: String| BridgeError::Protocol { batch_id, message };
    let value: Value =
        serde_json::from_str(line).map_err(|e| protocol(format!("response is not JSON ({e})")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| protocol("response is not a JSON object".into()))?;
    let id = obj
        .get("id")
        .and_then(Value::as_i64)
        .ok_or_else(|| protocol("response has no integer `id`".into()))?;
    if let Some(err) = obj.get("error") {
        let message = err.as_str().map_or_else(|| err.to_string(), str::to_owned);
        return Err(BridgeError::Remote { batch_id: id, message });
    }
    if id != batch_id {
        return Err(protocol(format!("response id {id} does not match request id {expected_id}")));
    }
    let scores = obj
        .get("scores")
        .and_then(Value::as_array)
        .ok_or_else(|| protocol("response has neither `scores` nor `error`".into()))?;
    if scores.len() != expected_len {
        return Err(protocol(format!(
            "expected {expected_len} scores, got {}",
            scores.len()
        )));
    }
    scores
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .map(|x| x.clamp(0.0, 1.0))
                .ok_or_else(|| protocol(format!("score {i} is not a number: {v}")))
        })
        .collect()
}

impl Matcher for BridgeClient {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn score_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, crate::Error> {
        let mut out = Vec::with_capacity(pairs.len());
        for chunk in pairs.chunks(self.batch_size) {
            out.extend(self.score_batch(chunk)?);
        }
        Ok(out)
    }
}

impl Drop for BridgeClient {
    fn drop(&mut self) {
        // Closing stdin asks the matcher to exit.
        self.writer.take();
        if let Some(mut child) = self.child.take() {
            let deadline = Instant::now() + Duration::from_millis(500);
            while Instant::now() < deadline {
                if let Ok(Some(_)) = child.try_wait() {
                    return;
                }
                thread::sleep(Duration::from_millis(10));
            }
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> BridgeConfig {
        BridgeConfig {
            timeout: Duration::from_secs(5),
            ..BridgeConfig::new(vec!["unused".into()])
        }
    }

    #[test]
    fn request_wire_format_is_exact() {
        let req = BridgeRequest {
            id: 3,
            pairs: vec![BridgePair { hyp: "a \"b\"".into(), prem: "c".into() }],
        };
        assert_eq!(
            serde_json::to_string(&req).unwrap(),
            r#"{"id":3,"pairs":[{"hyp":"a \"b\"","prem":"c"}]}"#
        );
    }

    #[test]
    fn response_forms() {
        let ok = BridgeResponse::Scores { id: 7, scores: vec![1.0, 0.25] };
        assert_eq!(serde_json::to_string(&ok).unwrap(), r#"{"id":7,"scores":[1.0,0.25]}"#);
        let err = BridgeResponse::Error { id: -1, error: "bad".into() };
        assert_eq!(serde_json::to_string(&err).unwrap(), r#"{"id":-1,"error":"bad"}"#);
    }

    #[test]
    fn parse_response_checks_everything() {
        assert_eq!(parse_response(r#"{"id":2,"scores":[1.7,-3,0.5]}"#, 2, 3).unwrap(), [1.0, 0.0, 0.5]);
        assert!(matches!(
            parse_response(r#"{"id":2,"scores":[1.0]}"#, 2, 2),
            Err(BridgeError::Protocol { .. })
        ));
        assert!(matches!(
            parse_response(r#"{"id":2,"scores":["x"]}"#, 2, 1),
            Err(BridgeError::Protocol { .. })
        ));
        assert!(matches!(
            parse_response(r#"{"id":3,"scores":[1.0]}"#, 2, 1),
            Err(BridgeError::Protocol { .. })
        ));
        assert!(matches!(parse_response("nope", 2, 1), Err(BridgeError::Protocol { .. })));
        assert!(matches!(
            parse_response(r#"{"id":2,"error":"boom"}"#, 2, 1),
            Err(BridgeError::Remote { batch_id: 2, .. })
        ));
    }

    #[test]
    fn identity_stub_round_trip() {
        let mut client = BridgeClient::in_process(stub::StubScorer::Identity.into_fn(), &config()).unwrap();
        assert_eq!(client.score_batch(&[("a", "a")]).unwrap(), [1.0]);
        assert_eq!(
            client.score_batch(&[("a", "a"), ("a", "b"), ("c", "c")]).unwrap(),
            [1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn out_of_range_scores_are_clamped() {
        let mut client =
            BridgeClient::in_process(stub::StubScorer::Constant(1.7).into_fn(), &config()).unwrap();
        assert_eq!(client.score_batch(&[("x", "y")]).unwrap(), [1.0]);
    }

    #[test]
    fn remote_error_keeps_connection_usable() {
        let mut calls = 0;
        let scorer = move |_: &str, _: &str| {
            calls += 1;
            if calls == 1 {
                Err("first call fails".to_string())
            } else {
                Ok(0.5)
            }
        };
        let mut client = BridgeClient::in_process(scorer, &config()).unwrap();
        assert!(matches!(client.score_batch(&[("a", "b")]), Err(BridgeError::Remote { .. })));
        assert_eq!(client.score_batch(&[("a", "b")]).unwrap(), [0.5]);
    }

    #[test]
    fn silent_matcher_times_out_and_poisons() {
        let (req_reader, req_writer) = io::pipe().unwrap();
        let (resp_reader, resp_writer) = io::pipe().unwrap();
        let keep = thread::spawn(move || {
            // read requests, never answer
            let mut sink = String::new();
            let _ = BufReader::new(req_reader).read_line(&mut sink);
            thread::sleep(Duration::from_millis(400));
            drop(resp_writer);
        });
        let cfg = BridgeConfig { timeout: Duration::from_millis(100), ..config() };
        let mut client = BridgeClient::from_streams(resp_reader, req_writer, &cfg);
        let err = client.score_batch(&[("hello", "world")]).unwrap_err();
        match &err {
            BridgeError::Timeout { batch_id, pairs, .. } => assert_eq!((*batch_id, *pairs), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("batch 1"));
        assert!(matches!(client.score_batch(&[("a", "b")]), Err(BridgeError::Poisoned)));
        keep.join().unwrap();
    }

    #[test]
    fn closed_connection_is_reported() {
        let (_req_reader, req_writer) = io::pipe().unwrap();
        let (resp_reader, resp_writer) = io::pipe().unwrap();
        drop(resp_writer);
        let mut client = BridgeClient::from_streams(resp_reader, req_writer, &config());
        assert!(matches!(client.score_batch(&[("a", "b")]), Err(BridgeError::Closed { .. })));
    }

    #[test]
    fn matcher_impl_batches_transparently() {
        let cfg = BridgeConfig { batch_size: 2, ..config() };
        let mut client = BridgeClient::in_process(stub::StubScorer::Identity.into_fn(), &cfg).unwrap();
        let pairs = [("a", "a"), ("b", "c"), ("d", "d"), ("e", "f"), ("g", "g")];
        assert_eq!(client.score_pairs(&pairs).unwrap(), [1.0, 0.0, 1.0, 0.0, 1.0]);
        // five pairs in batches of two -> ids 1..=3 used
        assert_eq!(client.next_id, 4);
    }

    #[test]
    fn config_validation() {
        assert!(BridgeConfig::new(vec![]).validate().is_err());
        let cfg = BridgeConfig::from_command_line("python3 -u 'my adapter.py' --gpu 0").unwrap();
        assert_eq!(cfg.argv, ["python3", "-u", "my adapter.py", "--gpu", "0"]);
        assert!(BridgeConfig { batch_size: 0, ..cfg.clone() }.validate().is_err());
        assert!(BridgeConfig::from_command_line("").is_err());
    }

    #[test]
    fn spawn_failure_names_command() {
        let cfg = BridgeConfig::new(vec!["/definitely/not/here".into()]);
        let err = BridgeClient::spawn(&cfg).unwrap_err();
        assert!(err.to_string().contains("/definitely/not/here"));
    }
}
