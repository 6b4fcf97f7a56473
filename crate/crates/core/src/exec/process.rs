//! Pool of runner subprocesses speaking the line protocol.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::protocol::{Request, Response};
use super::{ExecError, Job, JobRunner, Limits, Status, Verdict};

pub const DEFAULT_RUNNER: &[&str] = &["python3", "-u", "-m", "mist_runner"];

/// Wall-clock allowance beyond the job timeout before the runner process is
/// presumed hung and killed.
const GRACE: Duration = Duration::from_secs(1);

struct Shim {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Shim {
    fn spawn(command: &[String], memory_mb: Option<u64>) -> Result<Shim, ExecError> {
        let spawn_err = |source| ExecError::Spawn {
            command: command.to_vec(),
            source,
        };
        let (program, args) = command
            .split_first()
            .ok_or_else(|| spawn_err(std::io::Error::other("empty runner command")))?;
        let mut cmd = Command::new(program);
        cmd.args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null());
        if let Some(mb) = memory_mb {
            limit_address_space(&mut cmd, mb);
        }
        let mut child = cmd.spawn().map_err(spawn_err)?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Shim {
            child,
            stdin,
            lines: rx,
        })
    }

    fn send(&mut self, req: &Request) -> std::io::Result<()> {
        self.stdin.write_all(req.to_line().as_bytes())?;
        self.stdin.flush()
    }
}

impl Drop for Shim {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(unix)]
fn limit_address_space(cmd: &mut Command, mb: u64) {
    use std::os::unix::process::CommandExt;
    let bytes = mb.saturating_mul(1024 * 1024) as libc::rlim_t;
    // SAFETY: setrlimit is async-signal-safe and touches no parent state.
    unsafe {
        cmd.pre_exec(move || {
            let lim = libc::rlimit {
                rlim_cur: bytes,
                rlim_max: bytes,
            };
            if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            Ok(())
        });
    }
}

#[cfg(not(unix))]
fn limit_address_space(_cmd: &mut Command, _mb: u64) {}

enum Exchange {
    Answered(Response),
    Hung(f64),
    Exited,
}

/// Runs jobs in long-lived runner processes, one per concurrent batch.
/// A runner that times out, hangs or dies is discarded and replaced.
pub struct ProcessRunner {
    command: Vec<String>,
    idle: Mutex<Vec<Shim>>,
    next_id: AtomicU64,
}

impl ProcessRunner {
    pub fn new(command: Vec<String>) -> Self {
        ProcessRunner {
            command,
            idle: Mutex::new(Vec::new()),
            next_id: AtomicU64::new(0),
        }
    }

    pub fn with_default_command() -> Self {
        Self::new(DEFAULT_RUNNER.iter().map(|s| s.to_string()).collect())
    }

    pub fn command(&self) -> &[String] {
        &self.command
    }

    fn checkout(&self, limits: &Limits) -> Result<Shim, ExecError> {
        let pooled = self.idle.lock().expect("pool lock").pop();
        match pooled {
            Some(s) => Ok(s),
            None => Shim::spawn(&self.command, limits.memory_mb),
        }
    }

    fn exchange(shim: &mut Shim, req: &Request, wait: Duration) -> Result<Exchange, ExecError> {
        let started = Instant::now();
        if shim.send(req).is_err() {
            return Ok(Exchange::Exited);
        }
        match shim.lines.recv_timeout(wait) {
            Ok(line) => {
                let resp = Response::from_line(&line)
                    .map_err(|e| ExecError::Protocol(format!("malformed response {line:?}: {e}")))?;
                if resp.job_id != req.job_id {
                    return Err(ExecError::Protocol(format!(
                        "response for {:?} while waiting for {:?}",
                        resp.job_id, req.job_id
                    )));
                }
                Ok(Exchange::Answered(resp))
            }
            Err(RecvTimeoutError::Timeout) => Ok(Exchange::Hung(started.elapsed().as_secs_f64())),
            Err(RecvTimeoutError::Disconnected) => Ok(Exchange::Exited),
        }
    }

    fn run_one(&self, shim: &mut Option<Shim>, job: &Job, limits: &Limits) -> Result<Verdict, ExecError> {
        let req = Request {
            job_id: format!("j{}", self.next_id.fetch_add(1, Ordering::Relaxed)),
            code: job.code.to_string(),
            tests: job.tests.to_string(),
            method: job.method.clone(),
            timeout_s: limits.timeout.as_secs_f64(),
        };
        let wait = limits.timeout + GRACE;
        for attempt in 0..2 {
            let current = match shim {
                Some(s) => s,
                None => shim.insert(Shim::spawn(&self.command, limits.memory_mb)?),
            };
            match Self::exchange(current, &req, wait)? {
                Exchange::Answered(resp) => {
                    let status: Status = resp.status.parse().map_err(ExecError::Protocol)?;
                    if status == Status::Timeout {
                        *shim = None;
                    }
                    return Ok(Verdict::new(status, resp.duration_s, Some(resp.detail), limits.timeout));
                }
                Exchange::Hung(elapsed) => {
                    *shim = None;
                    return Ok(Verdict::new(
                        Status::Timeout,
                        elapsed,
                        Some("runner unresponsive".into()),
                        limits.timeout,
                    ));
                }
                Exchange::Exited => {
                    *shim = None;
                    if attempt == 1 {
                        break;
                    }
                }
            }
        }
        Ok(Verdict::new(Status::Error, 0.0, Some("runner exited".into()), limits.timeout))
    }
}

impl JobRunner for ProcessRunner {
    fn run_batch(&self, jobs: &[Job], limits: &Limits) -> Result<Vec<Verdict>, ExecError> {
        let mut shim = Some(self.checkout(limits)?);
        let mut out = Vec::with_capacity(jobs.len());
        for job in jobs {
            out.push(self.run_one(&mut shim, job, limits)?);
        }
        if let Some(s) = shim {
            self.idle.lock().expect("pool lock").push(s);
        }
        Ok(out)
    }
}
