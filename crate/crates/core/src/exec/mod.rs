//! Running test methods against code variants and collecting verdicts.

mod discover;
mod matrix;
mod process;
pub mod protocol;
mod replay;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use discover::{discover_tests, TestMethod};
pub use matrix::{build_kill_matrix, prefilter_vulnerable, prefilter_with_methods, KillMatrix, MatrixError, SOURCE_ROW};
pub use process::{ProcessRunner, DEFAULT_RUNNER};
pub use replay::{FnRunner, ReplayRunner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
            Status::Timeout => "TIMEOUT",
        }
    }

    /// Non-PASS outcomes count as a kill against a mutant.
    pub fn is_kill(self) -> bool {
        self != Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "PASS" => Ok(Status::Pass),
            "FAIL" => Ok(Status::Fail),
            "ERROR" => Ok(Status::Error),
            "TIMEOUT" => Ok(Status::Timeout),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub duration: f64,
    pub detail: Option<String>,
}

impl Verdict {
    /// Builds a verdict, dropping detail on PASS and raising a TIMEOUT's
    /// duration to at least `limit`.
    pub fn new(status: Status, duration: f64, detail: Option<String>, limit: Duration) -> Self {
        let mut duration = if duration.is_finite() { duration.max(0.0) } else { 0.0 };
        if status == Status::Timeout {
            duration = duration.max(limit.as_secs_f64());
        }
        let detail = match status {
            Status::Pass => None,
            _ => detail.filter(|d| !d.is_empty()),
        };
        Verdict { status, duration, detail }
    }

    pub fn pass() -> Self {
        Verdict {
            status: Status::Pass,
            duration: 0.0,
            detail: None,
        }
    }

    pub fn with_status(status: Status) -> Self {
        Verdict {
            status,
            duration: 0.0,
            detail: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub timeout: Duration,
    pub memory_mb: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            timeout: Duration::from_secs(5),
            memory_mb: None,
        }
    }
}

/// One test method against one code variant.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub code: Arc<str>,
    pub tests: Arc<str>,
    pub method: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("cannot start runner {command:?}")]
    Spawn {
        command: Vec<String>,
        #[source]
        source: std::io::Error,
    },
    #[error("runner protocol violation: {0}")]
    Protocol(String),
    #[error("runner i/o failure")]
    Io(#[from] std::io::Error),
    #[error("no recorded verdict for method {0}")]
    Unrecorded(String),
}

/// Executes jobs. A batch shares one code variant and is run sequentially;
/// each job still gets a fresh interpreter namespace.
pub trait JobRunner: Send + Sync {
    fn run_batch(&self, jobs: &[Job], limits: &Limits) -> Result<Vec<Verdict>, ExecError>;
}

/// Worker pool dispatching batches to a [`JobRunner`].
#[derive(Clone)]
pub struct Executor {
    runner: Arc<dyn JobRunner>,
    workers: usize,
    limits: Limits,
}

impl fmt::Debug for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers)
            .field("limits", &self.limits)
            .finish_non_exhaustive()
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Executor {
    pub fn new(runner: Arc<dyn JobRunner>, workers: usize, limits: Limits) -> Self {
        Executor {
            runner,
            workers: workers.max(1),
            limits,
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn run_test(&self, code: &str, tests: &str, method: &str) -> Result<Verdict, ExecError> {
        let job = Job {
            code: code.into(),
            tests: tests.into(),
            method: method.to_string(),
        };
        let mut out = self.runner.run_batch(std::slice::from_ref(&job), &self.limits)?;
        out.pop().ok_or_else(|| ExecError::Protocol("runner returned no verdict".into()))
    }

    /// Runs every batch, in parallel across batches. Output order matches
    /// input order regardless of completion order.
    pub fn run_batches(&self, batches: &[Vec<Job>]) -> Result<Vec<Vec<Verdict>>, ExecError> {
        let mut results: Vec<Option<Vec<Verdict>>> = vec![None; batches.len()];
        if batches.is_empty() {
            return Ok(Vec::new());
        }
        let next = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);
        let (tx, rx) = mpsc::channel::<(usize, Result<Vec<Verdict>, ExecError>)>();
        let mut first_error: Option<(usize, ExecError)> = None;
        std::thread::scope(|scope| {
            for _ in 0..self.workers.min(batches.len()) {
                let tx = tx.clone();
                let (next, stop) = (&next, &stop);
                scope.spawn(move || loop {
                    if stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(batch) = batches.get(i) else { break };
                    let res = self.runner.run_batch(batch, &self.limits);
                    if res.is_err() {
                        stop.store(true, Ordering::Relaxed);
                    }
                    if tx.send((i, res)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for (i, res) in rx {
                match res {
                    Ok(v) if v.len() == batches[i].len() => results[i] = Some(v),
                    Ok(v) => {
                        let err = ExecError::Protocol(format!("expected {} verdicts, got {}", batches[i].len(), v.len()));
                        if first_error.as_ref().is_none_or(|(j, _)| i < *j) {
                            first_error = Some((i, err));
                        }
                        stop.store(true, Ordering::Relaxed);
                    }
                    Err(e) => {
                        if first_error.as_ref().is_none_or(|(j, _)| i < *j) {
                            first_error = Some((i, e));
                        }
                    }
                }
            }
        });
        if let Some((_, e)) = first_error {
            return Err(e);
        }
        Ok(results.into_iter().map(|r| r.expect("every batch completed")).collect())
    }
}
